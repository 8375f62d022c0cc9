//! Machine-readable reports and their human renderings.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

/// Echo of every setting that influenced a run. Settings a command does not
/// use are left out.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub input: String,
    pub jobs: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_terms: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub span_relative: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub check: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub caps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport<R> {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: Config,
    pub wall_time_ms: f64,
    pub results: Vec<R>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureRecord {
    pub name: String,
    pub method: String,
    pub value: Option<f64>,
    pub abs_error_estimate: Option<f64>,
    pub pieces: Option<usize>,
    pub terms_used: Option<u64>,
    pub clamped: Option<bool>,
    pub wall_time_ms: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub name: String,
    pub estimate: Option<f64>,
    pub std_error: Option<f64>,
    pub samples: u64,
    pub wall_time_ms: f64,
    pub error: Option<String>,
}

/// Per-piece property verdicts of `decompose --check`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub iia: bool,
    pub iib: bool,
    pub iic: bool,
    pub iid: bool,
    pub iid_prime: bool,
    pub iie: bool,
    pub pd: bool,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PieceRecord {
    pub sign: i8,
    pub form: String,
    /// Index of the simplicial cone the piece was derived from.
    pub parent: usize,
    /// In ambient coordinates.
    pub generators: Vec<Vec<f64>>,
    pub gram: Option<Vec<Vec<f64>>>,
    pub lambda_min: Option<f64>,
    pub pd: Option<bool>,
    pub check: Option<CheckRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecomposeRecord {
    pub name: String,
    pub method: String,
    pub ambient_dim: usize,
    pub lineality_dim: usize,
    pub piece_dim: usize,
    pub simplices: usize,
    pub pieces: Vec<PieceRecord>,
    /// `None` without `--check`, or when no piece could be checked.
    pub check_passed: Option<bool>,
    pub wall_time_ms: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeRecord {
    pub name: String,
    pub beta: Vec<f64>,
    pub lambda_min: Option<f64>,
    /// Determinant at `β / (1 - λ_min)`; zero on the convergence boundary.
    pub boundary_residual: Option<f64>,
    pub caps: Vec<usize>,
    pub horizon: Option<usize>,
    /// `ln E(N + ℓ)`; `None` where the error vanishes.
    pub ln_errors: Vec<Option<f64>>,
    pub ratios: Vec<f64>,
    pub error: Option<String>,
}

fn opt(x: Option<f64>, prec: usize) -> String {
    x.map_or_else(|| "-".into(), |v| format!("{v:.prec$e}"))
}

pub fn measure_table(rows: &[MeasureRecord]) -> String {
    let mut out = format!(
        "{:<20} {:>18} {:>10} {:<16} {:>7} {:>12} {:>10}\n",
        "name", "value", "error", "method", "pieces", "terms", "time_ms"
    );
    for r in rows {
        let value = r.value.map_or_else(|| "-".into(), |v| format!("{v:.15}"));
        let _ = writeln!(
            out,
            "{:<20} {:>18} {:>10} {:<16} {:>7} {:>12} {:>10.2}{}",
            r.name,
            value,
            opt(r.abs_error_estimate, 1),
            r.method,
            r.pieces.map_or_else(|| "-".into(), |p| p.to_string()),
            r.terms_used.map_or_else(|| "-".into(), |t| t.to_string()),
            r.wall_time_ms,
            match (&r.error, r.clamped) {
                (Some(e), _) => format!("  error: {e}"),
                (None, Some(true)) => "  (clamped)".into(),
                _ => String::new(),
            }
        );
    }
    out
}

pub fn estimate_table(rows: &[EstimateRecord]) -> String {
    let mut out = format!(
        "{:<20} {:>12} {:>10} {:>10} {:>10}\n",
        "name", "estimate", "std_error", "samples", "time_ms"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:<20} {:>12} {:>10} {:>10} {:>10.2}{}",
            r.name,
            r.estimate.map_or_else(|| "-".into(), |v| format!("{v:.8}")),
            opt(r.std_error, 2),
            r.samples,
            r.wall_time_ms,
            r.error
                .as_ref()
                .map_or_else(String::new, |e| format!("  error: {e}"))
        );
    }
    out
}

fn vector(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
    format!("({})", parts.join(", "))
}

pub fn decompose_text(rows: &[DecomposeRecord]) -> String {
    let mut out = String::new();
    for r in rows {
        let _ = writeln!(
            out,
            "{} [{}]: {} piece(s) from {} simplex(es), lineality {}",
            r.name,
            r.method,
            r.pieces.len(),
            r.simplices,
            r.lineality_dim
        );
        if let Some(e) = &r.error {
            let _ = writeln!(out, "  error: {e}");
            continue;
        }
        for (i, p) in r.pieces.iter().enumerate() {
            let sign = if p.sign > 0 { '+' } else { '-' };
            let _ = writeln!(
                out,
                "  {sign}[{i}] {} parent {} λ_min {} pd {}",
                p.form,
                p.parent,
                opt(p.lambda_min, 3),
                p.pd.map_or_else(|| "-".into(), |b| b.to_string())
            );
            for g in &p.generators {
                let _ = writeln!(out, "      {}", vector(g));
            }
            if let Some(c) = &p.check {
                let _ = writeln!(
                    out,
                    "      check {}: IIa {} IIb {} IIc {} IId {} IId' {} IIe {} PD {}",
                    if c.passed { "pass" } else { "FAIL" },
                    c.iia,
                    c.iib,
                    c.iic,
                    c.iid,
                    c.iid_prime,
                    c.iie,
                    c.pd
                );
            }
        }
        if let Some(ok) = r.check_passed {
            let _ = writeln!(out, "  check: {}", if ok { "pass" } else { "FAIL" });
        }
    }
    out
}

pub fn probe_table(rows: &[ProbeRecord]) -> String {
    let mut out = String::new();
    for r in rows {
        let _ = writeln!(
            out,
            "{}: β {} λ_min {} boundary residual {}",
            r.name,
            vector(&r.beta),
            opt(r.lambda_min, 6),
            opt(r.boundary_residual, 2)
        );
        if let Some(e) = &r.error {
            let _ = writeln!(out, "  error: {e}");
            continue;
        }
        let _ = writeln!(out, "  {:>4} {:>14} {:>12}", "l", "ln E(N+l)", "ratio");
        for (l, (e, q)) in r.ln_errors.iter().zip(&r.ratios).enumerate() {
            let e = e.map_or_else(|| "-inf".into(), |v| format!("{v:.6}"));
            let _ = writeln!(out, "  {l:>4} {e:>14} {q:>12.6e}");
        }
    }
    out
}
