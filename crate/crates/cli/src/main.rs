mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::{ToPrimitive, Zero};

use trees_core::counting::{counting_series, find_x0};
use trees_core::occurrence::{
    free_tree_text, occurrence_distribution, OccurrenceMode, OccurrenceTable,
};
use trees_core::series::UPoly;
use trees_core::stats::{
    asymptotic_checks, estrada_survey, table_moments, AsymptoticRow, SurveyRow,
};
use trees_core::system::{build_system, compute_mu, solve_series};
use trees_core::tree::{enumerate_trees, parse_free, FreeTree, TreeKind};
use trees_core::verify::{empirical_mu, run_suite, suite_names};
use trees_core::Error;

use report::{Format, Table};

/// Occurrence statistics and spectral surveys for bounded-degree trees.
#[derive(Parser, Debug)]
#[command(name = "trees", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Also write an SVG scatter plot of the report to this path.
    #[arg(long, global = true)]
    plot: Option<PathBuf>,

    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Number of trees of order n.
    Count {
        #[arg(long, default_value = "free")]
        kind: TreeKind,
        #[arg(long)]
        delta: usize,
        #[arg(long)]
        n: usize,
        /// Report every order from 1 to n.
        #[arg(long)]
        upto: bool,
        #[arg(long, value_enum, default_value_t = CountMethod::Series)]
        method: CountMethod,
    },
    /// Dominant singularity of the planted-tree series.
    X0 {
        #[arg(long)]
        delta: usize,
        #[arg(long, default_value_t = 600)]
        order: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Mean constant of the occurrence count of a subtree.
    Mu {
        #[arg(long)]
        delta: usize,
        /// Subtree in parent-array form ("" is a single vertex).
        #[arg(long)]
        subtree: String,
        #[arg(long, default_value_t = 600)]
        order: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = MuMethod::System)]
        method: MuMethod,
        /// Fit range for the empirical method.
        #[arg(long, default_value_t = 50)]
        n_min: usize,
        #[arg(long, default_value_t = 300)]
        n_max: usize,
    },
    /// Distribution of the occurrence count over all trees of order n.
    Dist {
        #[arg(long, default_value = "free")]
        kind: TreeKind,
        #[arg(long)]
        delta: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        subtree: String,
        #[arg(long, value_enum, default_value_t = DistMethod::Enumerate)]
        method: DistMethod,
        /// Internal vertices of the subtree must keep their host degree.
        #[arg(long)]
        pattern: bool,
        #[arg(long, value_enum, default_value_t = DistReport::Table)]
        report: DistReport,
        /// First order for `--report summary`.
        #[arg(long, default_value_t = 1)]
        n_min: usize,
    },
    /// Estrada and Zagreb indices of every free tree of order n.
    Estrada {
        #[arg(long)]
        delta: usize,
        #[arg(long)]
        n: usize,
        /// Number of even spectral moments to report.
        #[arg(long, default_value_t = 30)]
        k: usize,
    },
    /// Runs acceptance checks.
    Verify {
        /// Suite name, or "all".
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CountMethod {
    Series,
    Enumerate,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MuMethod {
    System,
    Empirical,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DistMethod {
    Enumerate,
    Series,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DistReport {
    Table,
    Moments,
    Summary,
}

/// Error class for the exit status.
enum Failure {
    Validation(String),
    Guard(String),
    Resource(String),
}

impl Failure {
    fn classify(e: anyhow::Error) -> Self {
        let msg = format!("{e:#}");
        match e.downcast_ref::<Error>() {
            Some(Error::ResourceCap { .. }) => Failure::Resource(msg),
            Some(Error::IncreaseOrder { .. })
            | Some(Error::NotStronglyConnected(_))
            | Some(Error::NoConvergence { .. }) => Failure::Guard(msg),
            _ => Failure::Validation(msg),
        }
    }

    fn exit(self) -> ExitCode {
        let (code, msg) = match self {
            Failure::Validation(m) => (1, m),
            Failure::Guard(m) => (2, m),
            Failure::Resource(m) => (3, m),
        };
        eprintln!("error: {msg}");
        ExitCode::from(code)
    }
}

fn kv_table(records: Vec<(&str, String)>) -> Table {
    let mut t = Table::new(["quantity", "value"]);
    for (k, v) in records {
        t.push(vec![k.to_string(), v]);
    }
    t
}

fn parse_subtree(s: &str) -> Result<FreeTree> {
    Ok(parse_free(s)?)
}

fn count(kind: TreeKind, delta: usize, n: usize, upto: bool, method: CountMethod) -> Result<Table> {
    if n == 0 {
        bail!(Error::InvalidArgument("n must be at least 1".into()));
    }
    let first = if upto { 1 } else { n };
    let mut t = Table::new(["n", "kind", "delta", "count"]).with_plot(0, 3);
    let label = format!("{kind:?}").to_lowercase();
    let counts: Vec<String> = match method {
        CountMethod::Series => {
            let b = counting_series(delta, n)?;
            let s = match kind {
                TreeKind::Free => b.t,
                TreeKind::Rooted => b.r,
                TreeKind::Planted => b.p,
            };
            (first..=n).map(|i| s.coeff(i).to_string()).collect()
        }
        CountMethod::Enumerate => (first..=n)
            .map(|i| Ok(enumerate_trees(kind, i, delta)?.len().to_string()))
            .collect::<Result<_>>()?,
    };
    for (i, c) in (first..=n).zip(counts) {
        t.push(vec![i.to_string(), label.clone(), delta.to_string(), c]);
    }
    Ok(t)
}

fn x0(delta: usize, order: usize, tol: f64) -> Result<Table> {
    let est = find_x0(delta, order, tol)?;
    let mut rec = vec![
        ("x0", format!("{:.10}", est.x0)),
        ("p_at_x0", format!("{:.10}", est.p_at_x0)),
        ("truncation", est.truncation.to_string()),
        ("bracket_width", format!("{:.3e}", est.bracket_width)),
    ];
    if let Some(fit) = &est.check {
        rec.push(("extrapolated_column_sum", format!("{:.10}", fit.g)));
        rec.push(("extrapolation_residual", format!("{:.3e}", fit.residual)));
    }
    Ok(kv_table(rec))
}

struct MuArgs {
    delta: usize,
    subtree: String,
    order: usize,
    tol: f64,
    method: MuMethod,
    n_min: usize,
    n_max: usize,
}

fn mu(a: MuArgs) -> Result<Table> {
    let h = parse_subtree(&a.subtree)?;
    match a.method {
        MuMethod::System => {
            let est = find_x0(a.delta, a.order, a.tol)?;
            let report = compute_mu(&build_system(a.delta, &h)?, est.x0, a.order)?;
            for w in &report.warnings {
                log::warn!("{w}");
            }
            Ok(kv_table(report.records()))
        }
        MuMethod::Empirical => {
            if a.n_min < 1 || a.n_max <= a.n_min {
                bail!(Error::InvalidArgument("need 1 <= n-min < n-max".into()));
            }
            let slope = empirical_mu(a.delta, &h, (a.n_min, a.n_max))?;
            Ok(kv_table(vec![
                ("n_min", a.n_min.to_string()),
                ("n_max", a.n_max.to_string()),
                ("mu", format!("{slope:.10}")),
            ]))
        }
    }
}

fn series_table(kind: TreeKind, n: usize, delta: usize, h: &FreeTree) -> Result<OccurrenceTable> {
    if n == 0 {
        bail!(Error::InvalidArgument("n must be at least 1".into()));
    }
    let solved = solve_series(&build_system(delta, h)?, n);
    let s = match kind {
        TreeKind::Free => &solved.t,
        TreeKind::Rooted => &solved.r,
        TreeKind::Planted => &solved.p,
    };
    let poly: &UPoly<_> = s.coeff(n);
    Ok(OccurrenceTable {
        kind,
        n,
        delta,
        subtree: h.canonical_code(),
        subtree_text: free_tree_text(h),
        counts: poly
            .terms()
            .iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(&k, c)| (k as u64, c.to_biguint().expect("counts are non-negative")))
            .collect(),
    })
}

struct DistArgs {
    kind: TreeKind,
    delta: usize,
    n: usize,
    subtree: String,
    method: DistMethod,
    pattern: bool,
    report: DistReport,
    n_min: usize,
}

fn dist(a: DistArgs) -> Result<Table> {
    let h = parse_subtree(&a.subtree)?;
    let mode = OccurrenceMode { pattern: a.pattern };
    if a.pattern && matches!(a.method, DistMethod::Series) {
        bail!(Error::InvalidArgument(
            "pattern occurrences are only available with --method enumerate".into()
        ));
    }
    let table = |n: usize| -> Result<OccurrenceTable> {
        match a.method {
            DistMethod::Enumerate => Ok(occurrence_distribution(a.kind, n, a.delta, &h, mode)?),
            DistMethod::Series => series_table(a.kind, n, a.delta, &h),
        }
    };
    match a.report {
        DistReport::Table => {
            let tab = table(a.n)?;
            let mut t = Table::new(OccurrenceTable::HEADER).with_plot(3, 4);
            for r in tab.rows() {
                t.push(r.to_vec());
            }
            Ok(t)
        }
        DistReport::Moments => {
            let m = table_moments(&table(a.n)?)?;
            Ok(kv_table(vec![
                ("n", m.n.to_string()),
                ("mean", m.mean.to_string()),
                ("variance", m.variance.to_string()),
                (
                    "mean_f64",
                    format!("{:.12}", m.mean.to_f64().unwrap_or(f64::NAN)),
                ),
                (
                    "variance_f64",
                    format!("{:.12}", m.variance.to_f64().unwrap_or(f64::NAN)),
                ),
                ("skewness", format!("{:.12}", m.skewness)),
                ("excess_kurtosis", format!("{:.12}", m.excess_kurtosis)),
            ]))
        }
        DistReport::Summary => {
            if a.n_min < 1 || a.n_min > a.n {
                bail!(Error::InvalidArgument("need 1 <= n-min <= n".into()));
            }
            let rows = asymptotic_checks(&h, a.delta, a.n_min..=a.n)?;
            let mut t = Table::new(AsymptoticRow::HEADER).with_plot(0, 2);
            for r in rows {
                t.push(r.record());
            }
            Ok(t)
        }
    }
}

fn estrada(delta: usize, n: usize, k: usize) -> Result<Table> {
    let survey = estrada_survey(n, delta, k)?;
    let mut t = Table::new(SurveyRow::header(k)).with_plot(2, 3);
    for r in &survey.rows {
        t.push(r.record());
    }
    eprintln!(
        "trees={} mean EE/n={:.9} std EE/n={:.9}",
        survey.rows.len(),
        survey.mean_ee_per_n,
        survey.std_ee_per_n
    );
    if let Some(fit) = &survey.fit {
        eprintln!(
            "EE ~ D: slope={:.10} intercept={:.10} r2={:.10}",
            fit.slope, fit.intercept, fit.r_squared
        );
    }
    Ok(t)
}

/// Returns the report and whether every check passed.
fn verify(suite: &str) -> Result<(Table, bool)> {
    let Some(outcomes) = run_suite(suite) else {
        bail!(Error::InvalidArgument(format!(
            "unknown suite {suite}; expected all or one of {}",
            suite_names().join(", ")
        )));
    };
    let mut t = Table::new(["criterion", "suite", "result", "detail"]);
    for o in &outcomes {
        eprintln!("{o}");
        t.push(vec![
            o.id.to_string(),
            o.suite.to_string(),
            if o.passed { "PASS" } else { "FAIL" }.to_string(),
            o.detail.clone(),
        ]);
    }
    Ok((t, outcomes.iter().all(|o| o.passed)))
}

fn run(cli: Cli) -> std::result::Result<(), Failure> {
    if let Some(n) = cli.out.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Validation(e.to_string()))?;
    }
    let mut all_passed = true;
    let table = match cli.command {
        Command::Count {
            kind,
            delta,
            n,
            upto,
            method,
        } => count(kind, delta, n, upto, method),
        Command::X0 { delta, order, tol } => x0(delta, order, tol),
        Command::Mu {
            delta,
            subtree,
            order,
            tol,
            method,
            n_min,
            n_max,
        } => mu(MuArgs {
            delta,
            subtree,
            order,
            tol,
            method,
            n_min,
            n_max,
        }),
        Command::Dist {
            kind,
            delta,
            n,
            subtree,
            method,
            pattern,
            report,
            n_min,
        } => dist(DistArgs {
            kind,
            delta,
            n,
            subtree,
            method,
            pattern,
            report,
            n_min,
        }),
        Command::Estrada { delta, n, k } => estrada(delta, n, k),
        Command::Verify { suite } => verify(&suite).map(|(t, ok)| {
            all_passed = ok;
            t
        }),
    }
    .map_err(Failure::classify)?;

    let out = &cli.out;
    table
        .write(out.format, out.output.as_deref())
        .map_err(|e| Failure::Validation(format!("{e:#}")))?;
    if let Some(path) = &out.plot {
        table
            .write_plot(path)
            .map_err(|e| Failure::Validation(format!("{e:#}")))?;
    }
    if !all_passed {
        return Err(Failure::Guard("some acceptance checks failed".into()));
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.exit(),
    }
}
