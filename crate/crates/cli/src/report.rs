//! Tabular output in CSV or JSON, and a flat SVG scatter plot.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde_json::{Map, Number, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A header plus string records. Numbers are formatted by the producer so
/// that output is byte-stable.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Column indices used for `--plot`.
    pub plot: Option<(usize, usize)>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            ..Default::default()
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn with_plot(mut self, x: usize, y: usize) -> Self {
        self.plot = Some((x, y));
        self
    }

    pub fn render(&self, format: Format) -> Result<Vec<u8>> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.header)?;
                for r in &self.rows {
                    w.write_record(r)?;
                }
                Ok(w.into_inner()?)
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|r| {
                        let obj: Map<String, Value> = self
                            .header
                            .iter()
                            .zip(r)
                            .map(|(k, v)| (k.clone(), json_value(v)))
                            .collect();
                        Value::Object(obj)
                    })
                    .collect();
                let mut out = serde_json::to_vec_pretty(&rows)?;
                out.push(b'\n');
                Ok(out)
            }
        }
    }

    pub fn write(&self, format: Format, output: Option<&Path>) -> Result<()> {
        let bytes = self.render(format)?;
        match output {
            Some(path) => std::fs::write(path, bytes)
                .with_context(|| format!("writing {}", path.display()))?,
            None => std::io::stdout().write_all(&bytes)?,
        }
        Ok(())
    }

    pub fn write_plot(&self, path: &Path) -> Result<()> {
        let (xi, yi) = self
            .plot
            .context("this report has no numeric columns to plot")?;
        let points: Vec<(f64, f64)> = self
            .rows
            .iter()
            .filter_map(|r| Some((r[xi].parse().ok()?, r[yi].parse().ok()?)))
            .collect();
        let svg = scatter_svg(&points, &self.header[xi], &self.header[yi]);
        std::fs::write(path, svg).with_context(|| format!("writing {}", path.display()))
    }
}

/// Integers and plain decimals become JSON numbers; everything else
/// (including integers too large for `i64`) stays a string.
fn json_value(v: &str) -> Value {
    if let Ok(i) = v.parse::<i64>() {
        return Value::Number(i.into());
    }
    if v.bytes()
        .all(|b| b.is_ascii_digit() || b"+-.e".contains(&b))
        && v.contains(['.', 'e'])
    {
        if let Some(n) = v.parse::<f64>().ok().and_then(Number::from_f64) {
            return Value::Number(n);
        }
    }
    Value::String(v.to_string())
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;

fn scatter_svg(points: &[(f64, f64)], x_label: &str, y_label: &str) -> String {
    let range = |f: fn(&(f64, f64)) -> f64| {
        let lo = points.iter().map(f).fold(f64::INFINITY, f64::min);
        let hi = points.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
        if !lo.is_finite() {
            (0.0, 1.0)
        } else if hi > lo {
            (lo, hi)
        } else {
            (lo - 0.5, hi + 0.5)
        }
    };
    let (x0, x1) = range(|p| p.0);
    let (y0, y1) = range(|p| p.1);
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (l, r, t, b) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        s,
        r#"<path d="M{l} {t} L{l} {b} L{r} {b}" fill="none" stroke="black"/>"#
    );
    for (v, x) in [(x0, l), (x1, r)] {
        let _ = writeln!(
            s,
            r#"<text x="{x}" y="{}" font-size="12" text-anchor="middle">{}</text>"#,
            b + 18.0,
            tick(v)
        );
    }
    for (v, y) in [(y0, b), (y1, t)] {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{y}" font-size="12" text-anchor="end">{}</text>"#,
            l - 6.0,
            tick(v)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="14" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 15.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{}" font-size="14" text-anchor="middle" transform="rotate(-90 20 {})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_label)
    );
    for &(x, y) in points {
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="steelblue" fill-opacity="0.6"/>"#,
            sx(x),
            sy(y)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn tick(v: f64) -> String {
    if v.abs() >= 1e5 || (v != 0.0 && v.abs() < 1e-3) {
        format!("{v:.3e}")
    } else {
        format!("{}", (v * 1000.0).round() / 1000.0)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_values_are_typed() {
        assert_eq!(json_value("18"), Value::from(18));
        assert_eq!(json_value("0.5"), Value::from(0.5));
        assert_eq!(json_value("0 1"), Value::from("0 1"));
        assert_eq!(json_value("true"), Value::from("true"));
        let big = "123456789012345678901234567890";
        assert_eq!(json_value(big), Value::from(big));
    }

    #[test]
    fn csv_and_json_render() {
        let mut t = Table::new(["n", "count"]);
        t.push(vec!["8".into(), "18".into()]);
        assert_eq!(t.render(Format::Csv).unwrap(), b"n,count\n8,18\n");
        let json = String::from_utf8(t.render(Format::Json).unwrap()).unwrap();
        assert!(json.contains("\"count\": 18"));
    }

    #[test]
    fn svg_has_one_circle_per_point() {
        let svg = scatter_svg(&[(0.0, 1.0), (1.0, 2.0), (2.0, 2.0)], "x", "y<1>");
        assert_eq!(svg.matches("<circle").count(), 3);
        assert!(svg.contains("y&lt;1&gt;"));
    }
}
