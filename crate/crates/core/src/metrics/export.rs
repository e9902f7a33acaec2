use std::fmt::Write as _;
use std::io::Write;

use crate::error::Result;
use crate::ot::ScoreGrid;

use super::{EvaluationReport, ScopeMetrics};

const METRICS: [&str; 5] = ["accuracy", "precision", "recall", "fpr", "fnr"];

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "undefined".to_string(), |x| x.to_string())
}

fn values(row: &ScopeMetrics) -> [Option<f64>; 5] {
    [Some(row.accuracy), Some(row.precision), Some(row.recall), row.fpr, row.fnr]
}

fn deltas(row: &ScopeMetrics) -> Option<[Option<f64>; 5]> {
    row.delta.map(|d| [Some(d.accuracy), Some(d.precision), Some(d.recall), d.fpr, d.fnr])
}

fn header(report_has_deltas: bool, lead: &[&str]) -> Vec<String> {
    let mut h: Vec<String> = lead.iter().map(|s| s.to_string()).collect();
    h.push("scope".into());
    h.extend(METRICS.iter().map(|m| m.to_string()));
    if report_has_deltas {
        h.extend(METRICS.iter().map(|m| format!("d_{m}")));
    }
    h
}

fn row_cells(row: &ScopeMetrics, with_deltas: bool) -> Vec<String> {
    let mut out = vec![row.scope.clone()];
    out.extend(values(row).map(cell));
    if with_deltas {
        match deltas(row) {
            Some(d) => out.extend(d.map(cell)),
            None => out.extend(std::iter::repeat("undefined".to_string()).take(5)),
        }
    }
    out
}

fn has_deltas(report: &EvaluationReport) -> bool {
    report.rows.iter().any(|r| r.delta.is_some())
}

/// One row per scope: `scope,accuracy,precision,recall,fpr,fnr` followed by
/// `d_*` columns when the report carries deltas.
pub fn write_report_csv<W: Write>(writer: W, report: &EvaluationReport) -> Result<()> {
    let with = has_deltas(report);
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(header(with, &[]))?;
    for row in &report.rows {
        w.write_record(row_cells(row, with))?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Per-bin reports with a leading `bin` (bin index) and `bin_center` column.
pub fn write_per_score_csv<W: Write>(writer: W, slices: &[(usize, EvaluationReport)], grid: &ScoreGrid) -> Result<()> {
    let with = slices.iter().any(|(_, r)| has_deltas(r));
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(header(with, &["bin", "bin_center"]))?;
    for (bin, report) in slices {
        for row in &report.rows {
            let mut cells = vec![bin.to_string(), grid.center(*bin).to_string()];
            cells.extend(row_cells(row, with));
            w.write_record(cells)?;
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

fn fixed(v: Option<f64>) -> String {
    v.map_or_else(|| "undef".to_string(), |x| format!("{x:.3}"))
}

fn signed(v: Option<f64>) -> String {
    v.map_or_else(|| "(undef)".to_string(), |x| format!("({x:+.3})"))
}

/// Aligned text table: one line per scope, each metric optionally followed by
/// its delta in parentheses, then the positive-rate ratios.
pub fn format_table(report: &EvaluationReport) -> String {
    let with = has_deltas(report);
    let scope_width = report.rows.iter().map(|r| r.scope.len()).max().unwrap_or(0).max(5);
    let col_width = if with { 17 } else { 9 };
    let mut out = String::new();
    let _ = write!(out, "{:<scope_width$}", "scope");
    for m in ["Accur.", "Precision", "Recall", "FPR", "FNR"] {
        let title = if with { format!("{m} (Δ)") } else { m.to_string() };
        let _ = write!(out, "  {title:>col_width$}");
    }
    out.push('\n');
    for row in &report.rows {
        let _ = write!(out, "{:<scope_width$}", row.scope);
        let d = deltas(row);
        for (i, v) in values(row).into_iter().enumerate() {
            let text = match (with, d) {
                (true, Some(d)) => format!("{} {}", fixed(v), signed(d[i])),
                _ => fixed(v),
            };
            let _ = write!(out, "  {text:>col_width$}");
        }
        out.push('\n');
    }
    for r in &report.ratios {
        let _ = writeln!(
            out,
            "positive rate {} / {} = {}",
            r.numerator,
            r.denominator,
            r.ratio.map_or_else(|| "undefined".to_string(), |x| format!("{:.1}%", 100.0 * x))
        );
    }
    out
}
