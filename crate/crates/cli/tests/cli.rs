use std::process::{Command, Output};

fn trees(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trees"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn value(csv: &str, key: &str) -> f64 {
    csv.lines()
        .find_map(|l| l.strip_prefix(&format!("{key},")))
        .unwrap_or_else(|| panic!("no {key} in {csv}"))
        .parse()
        .unwrap()
}

#[test]
fn count_free_trees() {
    let o = trees(&["count", "--kind", "free", "--delta", "4", "--n", "8"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "n,kind,delta,count\n8,free,4,18\n");
}

#[test]
fn count_methods_agree() {
    let a = trees(&[
        "count", "--kind", "rooted", "--delta", "3", "--n", "10", "--upto",
    ]);
    let b = trees(&[
        "count",
        "--kind",
        "rooted",
        "--delta",
        "3",
        "--n",
        "10",
        "--upto",
        "--method",
        "enumerate",
    ]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 11);
}

#[test]
fn singularity_constants() {
    let o = trees(&["x0", "--delta", "4"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!((value(&s, "x0") - 0.3551817).abs() < 5e-6);
    assert!((value(&s, "p_at_x0") - 1.117421).abs() < 5e-5);
}

#[test]
fn single_vertex_mu() {
    let o = trees(&["mu", "--delta", "4", "--subtree", ""]);
    assert!(o.status.success());
    assert!((value(&stdout(&o), "mu") - 1.0).abs() < 1e-3);
}

#[test]
fn files_are_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<_> = ["a.json", "b.json"]
        .iter()
        .map(|f| dir.path().join(f))
        .collect();
    for (p, threads) in paths.iter().zip(["1", "4"]) {
        let o = trees(&[
            "dist",
            "--delta",
            "4",
            "--n",
            "10",
            "--subtree",
            "0 1",
            "--format",
            "json",
            "--threads",
            threads,
            "--output",
            p.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(o.stdout.is_empty());
    }
    let a = std::fs::read(&paths[0]).unwrap();
    assert_eq!(a, std::fs::read(&paths[1]).unwrap());
    assert!(String::from_utf8(a)
        .unwrap()
        .contains("\"subtree\": \"0 0\""));
}

#[test]
fn dist_methods_agree() {
    for kind in ["free", "rooted", "planted"] {
        let base = [
            "dist",
            "--kind",
            kind,
            "--delta",
            "4",
            "--n",
            "9",
            "--subtree",
            "0 0 0",
        ];
        let a = trees(&base);
        let b = trees(&[&base[..], &["--method", "series"]].concat());
        assert!(a.status.success() && b.status.success());
        assert_eq!(a.stdout, b.stdout, "{kind}");
    }
}

#[test]
fn plot_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("ee.svg");
    let o = trees(&[
        "estrada",
        "--delta",
        "4",
        "--n",
        "7",
        "--k",
        "3",
        "--plot",
        svg.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(svg).unwrap();
    // one point per free tree of order 7 with degree at most 4
    assert_eq!(text.matches("<circle").count(), 9);
    assert!(stdout(&o).starts_with("tree,n,D,EE,M_2,M_4,M_6\n"));
}

#[test]
fn exit_codes() {
    let bad = trees(&["count", "--delta", "1", "--n", "3"]);
    assert_eq!(bad.status.code(), Some(1));
    let parse = trees(&["mu", "--delta", "4", "--subtree", "0 5"]);
    assert_eq!(parse.status.code(), Some(1));
    let coarse = trees(&["x0", "--delta", "4", "--order", "2"]);
    assert_eq!(coarse.status.code(), Some(2));
    let cap = trees(&["mu", "--delta", "4", "--subtree", "0 1 2 3 4 5 6 7"]);
    assert_eq!(cap.status.code(), Some(3));
    let suite = trees(&["verify", "--suite", "no-such-suite"]);
    assert_eq!(suite.status.code(), Some(1));
}

#[test]
fn verify_single_suite() {
    let o = trees(&["verify", "--suite", "derivative"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains(",derivative,PASS,"));
}
