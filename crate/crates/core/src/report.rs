//! Result serialization: CSV tables, placement traces, and the resolved
//! configuration echo. Floats are written with 12 significant digits.

use std::path::Path;

use crate::error::{Error, Result};
use crate::placement::SwarmResult;
use crate::scenario::ResultsTable;

/// CSV column order for results tables.
pub const RESULTS_HEADER: &str =
    "scheme,L,T,K,qx,qy,mean_throughput,ci95_lo,ci95_hi,runs,seed,feasible";

/// Format with 12 significant digits, fixed or scientific as appropriate,
/// trailing zeros trimmed.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponential format");
    let exp: i32 = exp.parse().expect("exponent parses");
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let trimmed = s.trim_end_matches('0').trim_end_matches('.');
    trimmed.to_string()
}

/// Render a results table as CSV (header always present).
pub fn results_csv(table: &ResultsTable) -> String {
    let mut out = String::from(RESULTS_HEADER);
    out.push('\n');
    for row in &table.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            row.scheme,
            row.layers,
            row.slots,
            row.k,
            fmt_sig(row.q.x),
            fmt_sig(row.q.y),
            fmt_sig(row.mean_throughput),
            fmt_sig(row.ci95_lo),
            fmt_sig(row.ci95_hi),
            row.runs,
            row.seed,
            row.feasible,
        ));
    }
    out
}

/// Render a results table as a JSON array of row objects.
pub fn results_json(table: &ResultsTable) -> String {
    let mut out = String::from("[\n");
    for (i, row) in table.rows.iter().enumerate() {
        out.push_str(&format!(
            "  {{\"scheme\":\"{}\",\"L\":{},\"T\":{},\"K\":{},\"qx\":{},\"qy\":{},\
             \"mean_throughput\":{},\"ci95_lo\":{},\"ci95_hi\":{},\"runs\":{},\"seed\":{},\
             \"feasible\":{}}}{}\n",
            row.scheme,
            row.layers,
            row.slots,
            row.k,
            fmt_sig(row.q.x),
            fmt_sig(row.q.y),
            fmt_sig(row.mean_throughput),
            fmt_sig(row.ci95_lo),
            fmt_sig(row.ci95_hi),
            row.runs,
            row.seed,
            row.feasible,
            if i + 1 == table.rows.len() { "" } else { "," },
        ));
    }
    out.push_str("]\n");
    out
}

/// Placement result as JSON: best position, fitness, and the per-iteration
/// global-best trace.
pub fn placement_json(result: &SwarmResult) -> String {
    let mut out = format!(
        "{{\n  \"q\": [{}, {}],\n  \"fitness\": {},\n  \"iterations\": {},\n  \"trace\": [\n",
        fmt_sig(result.q_star.x),
        fmt_sig(result.q_star.y),
        fmt_sig(result.fitness),
        result.trace.last().map_or(0, |t| t.iter),
    );
    for (i, t) in result.trace.iter().enumerate() {
        out.push_str(&format!(
            "    {{\"iter\":{},\"gbest_fit\":{},\"qx\":{},\"qy\":{}}}{}\n",
            t.iter,
            fmt_sig(t.gbest_fit),
            fmt_sig(t.q.x),
            fmt_sig(t.q.y),
            if i + 1 == result.trace.len() { "" } else { "," },
        ));
    }
    out.push_str("  ]\n}\n");
    out
}

/// Placement trace as plot-ready CSV.
pub fn trace_csv(result: &SwarmResult) -> String {
    let mut out = String::from("iter,gbest_fit,qx,qy\n");
    for t in &result.trace {
        out.push_str(&format!(
            "{},{},{},{}\n",
            t.iter,
            fmt_sig(t.gbest_fit),
            fmt_sig(t.q.x),
            fmt_sig(t.q.y)
        ));
    }
    out
}

/// Write `content` to `path`.
pub fn write_text(path: impl AsRef<Path>, content: &str) -> Result<()> {
    let path = path.as_ref();
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| Error::io(parent.display().to_string(), e))?;
        }
    }
    std::fs::write(path, content).map_err(|e| Error::io(path.display().to_string(), e))
}

/// Path of the sibling file carrying the resolved configuration.
pub fn config_echo_path(out: &Path) -> std::path::PathBuf {
    let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".config.json");
    out.with_file_name(name)
}

/// Write the resolved-configuration echo next to an output file.
pub fn write_config_echo(out: &Path, resolved_config: &str, master_seed: u64) -> Result<()> {
    let body = format!(
        "{{\n\"master_seed\": {master_seed},\n\"config\": {resolved_config}\n}}\n"
    );
    write_text(config_echo_path(out), &body)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::SchemeKind;
    use crate::channel::Point2D;
    use crate::placement::TracePoint;
    use crate::scenario::ResultRow;

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(0.375), "0.375");
        assert_eq!(fmt_sig(-500.0), "-500");
        assert_eq!(fmt_sig(62.5), "62.5");
        assert_eq!(fmt_sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_sig(2.15021888426e-9), "2.15021888426e-9");
        assert_eq!(fmt_sig(123456789012345.0), "1.23456789012e14");
    }

    #[test]
    fn formatting_round_trips_to_twelve_digits() {
        let values = [
            0.6513215599,
            5.0 / 8.0,
            3.0 / 8.0,
            8.620689655172414,
            -499.99999,
            1.2984e-56,
            0.0227501319481792,
        ];
        for v in values {
            let parsed: f64 = fmt_sig(v).parse().unwrap();
            let tol = 1e-11 * v.abs();
            assert!((parsed - v).abs() <= tol, "{v} -> {} -> {parsed}", fmt_sig(v));
        }
    }

    fn sample_table() -> ResultsTable {
        ResultsTable {
            rows: vec![ResultRow {
                scheme: SchemeKind::Uarnc,
                layers: 3,
                slots: 6,
                k: 2,
                q: Point2D::new(-12.5, 40.0),
                mean_throughput: 0.4125,
                ci95_lo: 0.40,
                ci95_hi: 0.425,
                runs: 100,
                seed: 42,
                feasible: true,
            }],
        }
    }

    #[test]
    fn csv_header_and_rows() {
        let empty = results_csv(&ResultsTable::default());
        assert_eq!(empty, format!("{RESULTS_HEADER}\n"));
        let csv = results_csv(&sample_table());
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), RESULTS_HEADER);
        assert_eq!(lines.next().unwrap(), "uarnc,3,6,2,-12.5,40,0.4125,0.4,0.425,100,42,true");
        assert!(lines.next().is_none());
    }

    #[test]
    fn results_json_parses() {
        let json = results_json(&sample_table());
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v[0]["scheme"], "uarnc");
        assert_eq!(v[0]["L"], 3);
        assert!((v[0]["mean_throughput"].as_f64().unwrap() - 0.4125).abs() < 1e-12);
    }

    #[test]
    fn placement_json_shape_and_monotone_trace() {
        let result = SwarmResult {
            q_star: Point2D::new(10.0, -20.0),
            fitness: 0.5,
            trace: vec![
                TracePoint { iter: 0, gbest_fit: 0.25, q: Point2D::new(0.0, 0.0) },
                TracePoint { iter: 1, gbest_fit: 0.5, q: Point2D::new(10.0, -20.0) },
            ],
            evaluations: 10,
        };
        let json = placement_json(&result);
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["q"][0], 10.0);
        assert_eq!(v["iterations"], 1);
        let trace = v["trace"].as_array().unwrap();
        assert_eq!(trace.len(), 2);
        let mut last = f64::NEG_INFINITY;
        for t in trace {
            let fit = t["gbest_fit"].as_f64().unwrap();
            assert!(fit >= last);
            last = fit;
        }
        let csv = trace_csv(&result);
        assert!(csv.starts_with("iter,gbest_fit,qx,qy\n"));
        assert_eq!(csv.lines().count(), 3);
    }

    #[test]
    fn echo_path_appends_suffix() {
        let p = config_echo_path(Path::new("out/results.csv"));
        assert_eq!(p, Path::new("out/results.csv.config.json"));
    }
}
