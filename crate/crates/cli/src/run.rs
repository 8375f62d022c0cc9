//! The subcommands. Cones are processed on the current rayon pool; results
//! come back in input order.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use solid_angle::decompose::check_piece;
use solid_angle::linalg::smallest_eigenvalue_dense;
use solid_angle::series::{on_convergence_boundary, truncation_decay_probe};
use solid_angle::{
    decompose_any, decompose_unsplit, mc_estimate, Cone, ConeForm, Decomposition, McConfig,
    MeasureMethod, MeasureOptions, Method,
};

use crate::input::{ConeFile, ConeSpec};
use crate::report::{
    CheckRecord, Config, DecomposeRecord, EstimateRecord, MeasureRecord, PieceRecord, ProbeRecord,
    RunReport,
};
use crate::Failure;

const EIGEN_TOL: f64 = 1e-12;

/// Results plus the wall time of the whole batch in milliseconds.
pub type Timed<R> = (Vec<R>, f64);

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn timed<R>(f: impl FnOnce() -> Vec<R>) -> Timed<R> {
    let start = Instant::now();
    let out = f();
    (out, ms(start))
}

fn cone(spec: &ConeSpec, dim: usize) -> Result<Cone<f64>, String> {
    Cone::new(dim, spec.generators.clone()).map_err(|e| e.to_string())
}

fn route(method: MeasureMethod) -> Method {
    match method {
        MeasureMethod::Decomp1 => Method::Decomp1,
        MeasureMethod::Decomp2 => Method::Decomp2,
        MeasureMethod::Decomp2Tridiag => Method::Decomp2Tridiag,
        MeasureMethod::ClosedForm | MeasureMethod::MonteCarlo => Method::Triangulation,
    }
}

fn report<R>(command: &str, config: Config, (results, wall_time_ms): Timed<R>) -> RunReport<R> {
    RunReport {
        tool: "solid-angle".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: command.into(),
        config,
        wall_time_ms,
        results,
    }
}

/// Prints `report` as a table, or as JSON to `json` (`-` for stdout).
pub fn emit<R: Serialize>(
    report: &RunReport<R>,
    json: Option<&Path>,
    table: fn(&[R]) -> String,
) -> Result<(), Failure> {
    let Some(path) = json else {
        print!("{}", table(&report.results));
        return Ok(());
    };
    let mut text = serde_json::to_string_pretty(report)
        .map_err(|e| Failure::Input(format!("serializing report: {e}")))?;
    text.push('\n');
    if path == Path::new("-") {
        std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Input(format!("writing report: {e}")))
    } else {
        std::fs::write(path, text)
            .map_err(|e| Failure::Input(format!("writing {}: {e}", path.display())))
    }
}

/// Reports per-cone failures on stderr.
pub fn status<'a>(
    rows: impl Iterator<Item = (&'a String, &'a Option<String>)>,
) -> Result<(), Failure> {
    let mut failed = false;
    for (name, error) in rows {
        if let Some(e) = error {
            eprintln!("error: cone `{name}`: {e}");
            failed = true;
        }
    }
    if failed {
        Err(Failure::Numeric)
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct MeasureSettings {
    pub method: MeasureMethod,
    pub tol: f64,
    pub max_terms: u64,
    pub samples: u64,
    pub seed: u64,
    pub span_relative: bool,
}

fn measure_one(spec: &ConeSpec, dim: usize, s: &MeasureSettings) -> MeasureRecord {
    let start = Instant::now();
    let method = spec.method.unwrap_or(s.method);
    let opts = MeasureOptions {
        method,
        tol: s.tol,
        max_terms: s.max_terms,
        span_relative: s.span_relative,
        mc: McConfig {
            samples: s.samples,
            seed: s.seed,
            ..McConfig::default()
        },
    };
    let mut rec = MeasureRecord {
        name: spec.name.clone(),
        method: method.name().into(),
        value: None,
        abs_error_estimate: None,
        pieces: None,
        terms_used: None,
        clamped: None,
        wall_time_ms: 0.0,
        error: None,
    };
    match cone(spec, dim).and_then(|c| solid_angle::measure(&c, &opts).map_err(|e| e.to_string())) {
        Ok(r) => {
            rec.value = Some(r.value);
            rec.abs_error_estimate = Some(r.abs_error_estimate);
            rec.pieces = Some(r.pieces);
            rec.terms_used = Some(r.terms_used);
            rec.clamped = Some(r.clamped);
        }
        Err(e) => rec.error = Some(e),
    }
    rec.wall_time_ms = ms(start);
    log::info!(
        "{}: {:?} via {} in {:.1} ms",
        rec.name,
        rec.value,
        rec.method,
        rec.wall_time_ms
    );
    rec
}

pub fn measure(file: &ConeFile, s: &MeasureSettings) -> Timed<MeasureRecord> {
    timed(|| {
        file.cones
            .par_iter()
            .map(|c| measure_one(c, file.dim, s))
            .collect()
    })
}

pub fn measure_report(
    input: &str,
    jobs: usize,
    s: &MeasureSettings,
    out: Timed<MeasureRecord>,
) -> RunReport<MeasureRecord> {
    let mc = s.method == MeasureMethod::MonteCarlo;
    let config = Config {
        input: input.into(),
        jobs,
        method: Some(s.method.name().into()),
        tol: Some(s.tol),
        max_terms: Some(s.max_terms),
        samples: mc.then_some(s.samples),
        seed: mc.then_some(s.seed),
        span_relative: Some(s.span_relative),
        ..Config::default()
    };
    report("measure", config, out)
}

fn piece_records(d: &Decomposition<f64>, check: bool) -> Vec<PieceRecord> {
    let tridiagonal = d.method == Method::Decomp2Tridiag;
    d.pieces
        .iter()
        .zip(&d.parent_of)
        .map(|(p, &j)| {
            let k = p.as_simplicial();
            let check = k
                .filter(|_| check && d.method != Method::Triangulation)
                .filter(|_| p.form != ConeForm::LowerDim)
                .map(|k| {
                    let c = check_piece(&d.parents[j], k);
                    CheckRecord {
                        iia: c.iia,
                        iib: c.iib,
                        iic: c.iic,
                        iid: c.iid,
                        iid_prime: c.iid_prime,
                        iie: c.iie,
                        pd: c.pd,
                        passed: c.passed(tridiagonal),
                    }
                });
            PieceRecord {
                sign: p.sign,
                form: p.form.to_string(),
                parent: j,
                generators: p.generators().iter().map(|g| d.lift(g)).collect(),
                gram: k.map(|k| k.gram().to_rows()),
                lambda_min: k.and_then(|k| smallest_eigenvalue_dense(k.gram(), EIGEN_TOL).ok()),
                pd: k.map(|k| k.is_pd()),
                check,
            }
        })
        .collect()
}

fn decompose_one(
    spec: &ConeSpec,
    dim: usize,
    method: MeasureMethod,
    check: bool,
    split: bool,
) -> DecomposeRecord {
    let start = Instant::now();
    let method = spec.method.unwrap_or(method);
    let mut rec = DecomposeRecord {
        name: spec.name.clone(),
        method: method.name().into(),
        ambient_dim: dim,
        lineality_dim: 0,
        piece_dim: 0,
        simplices: 0,
        pieces: Vec::new(),
        check_passed: None,
        wall_time_ms: 0.0,
        error: None,
    };
    let run = |c: Cone<f64>| {
        if split {
            decompose_any(&c, route(method))
        } else {
            decompose_unsplit(&c, route(method))
        }
        .map_err(|e| e.to_string())
    };
    match cone(spec, dim).and_then(run) {
        Ok(d) => {
            rec.lineality_dim = d.lineality.len();
            rec.piece_dim = d.piece_dim();
            rec.simplices = d.simplices;
            rec.pieces = piece_records(&d, check);
            let verdicts: Vec<bool> = rec
                .pieces
                .iter()
                .filter_map(|p| p.check.as_ref().map(|c| c.passed))
                .collect();
            if check && !verdicts.is_empty() {
                rec.check_passed = Some(verdicts.iter().all(|&v| v));
            }
        }
        Err(e) => rec.error = Some(e),
    }
    rec.wall_time_ms = ms(start);
    log::info!("{}: {} pieces", rec.name, rec.pieces.len());
    rec
}

pub fn decompose(
    file: &ConeFile,
    method: MeasureMethod,
    check: bool,
    split: bool,
) -> Timed<DecomposeRecord> {
    timed(|| {
        file.cones
            .par_iter()
            .map(|c| decompose_one(c, file.dim, method, check, split))
            .collect()
    })
}

pub fn decompose_report(
    input: &str,
    jobs: usize,
    method: MeasureMethod,
    check: bool,
    split: bool,
    out: Timed<DecomposeRecord>,
) -> RunReport<DecomposeRecord> {
    let config = Config {
        input: input.into(),
        jobs,
        method: Some(method.name().into()),
        check: Some(check),
        split: Some(split),
        ..Config::default()
    };
    report("decompose", config, out)
}

fn probe_one(name: String, beta: Vec<f64>, caps: usize, shift: usize) -> ProbeRecord {
    let caps = vec![caps; beta.len()];
    let mut rec = ProbeRecord {
        name,
        beta,
        lambda_min: None,
        boundary_residual: None,
        caps,
        horizon: None,
        ln_errors: Vec::new(),
        ratios: Vec::new(),
        error: None,
    };
    match truncation_decay_probe(&rec.beta, &rec.caps, shift) {
        Ok(p) => {
            // with all couplings zero λ_min is 1 and there is no boundary point
            if p.lambda_min < 1.0 {
                let x: Vec<f64> = rec.beta.iter().map(|b| b / (1.0 - p.lambda_min)).collect();
                rec.boundary_residual = Some(on_convergence_boundary(&x));
            }
            rec.lambda_min = Some(p.lambda_min);
            rec.horizon = Some(p.horizon);
            rec.ln_errors = p
                .ln_errors
                .iter()
                .map(|&e| e.is_finite().then_some(e))
                .collect();
            rec.ratios = p.ratios;
        }
        Err(e) => rec.error = Some(e.to_string()),
    }
    rec
}

fn probe_cone(spec: &ConeSpec, dim: usize, caps: usize, shift: usize) -> Vec<ProbeRecord> {
    let d = match cone(spec, dim)
        .and_then(|c| decompose_any(&c, Method::Decomp2Tridiag).map_err(|e| e.to_string()))
    {
        Ok(d) => d,
        Err(e) => {
            let mut r = probe_one(spec.name.clone(), Vec::new(), caps, shift);
            r.error = Some(e);
            return vec![r];
        }
    };
    d.measured_pieces()
        .enumerate()
        .filter_map(|(i, p)| {
            let k = p.as_simplicial()?;
            Some(probe_one(
                format!("{}#{i}", spec.name),
                k.beta(),
                caps,
                shift,
            ))
        })
        .collect()
}

/// Probes the couplings of `beta`, or of every tridiagonal piece of the
/// cones in `file`, named `cone#piece`.
pub fn probe(
    file: Option<&ConeFile>,
    beta: Option<&[f64]>,
    caps: usize,
    shift: usize,
) -> Timed<ProbeRecord> {
    timed(|| match (beta, file) {
        (Some(b), _) => vec![probe_one("beta".into(), b.to_vec(), caps, shift)],
        (None, Some(f)) => f
            .cones
            .par_iter()
            .map(|c| probe_cone(c, f.dim, caps, shift))
            .collect::<Vec<_>>()
            .concat(),
        (None, None) => Vec::new(),
    })
}

pub fn probe_report(
    input: &str,
    jobs: usize,
    beta: &Option<Vec<f64>>,
    caps: usize,
    shift: usize,
    out: Timed<ProbeRecord>,
) -> RunReport<ProbeRecord> {
    let config = Config {
        input: if beta.is_some() {
            String::new()
        } else {
            input.into()
        },
        jobs,
        beta: beta.clone(),
        caps: Some(caps),
        shift: Some(shift),
        ..Config::default()
    };
    report("probe", config, out)
}

pub fn estimate(file: &ConeFile, samples: u64, seed: u64) -> Timed<EstimateRecord> {
    let cfg = McConfig {
        samples,
        seed,
        ..McConfig::default()
    };
    timed(|| {
        file.cones
            .par_iter()
            .map(|spec| {
                let start = Instant::now();
                let r = cone(spec, file.dim)
                    .and_then(|c| mc_estimate(&c, &cfg).map_err(|e| e.to_string()));
                let (estimate, std_error, error) = match r {
                    Ok(m) => (Some(m.estimate), Some(m.std_error), None),
                    Err(e) => (None, None, Some(e)),
                };
                EstimateRecord {
                    name: spec.name.clone(),
                    estimate,
                    std_error,
                    samples,
                    wall_time_ms: ms(start),
                    error,
                }
            })
            .collect()
    })
}

pub fn estimate_report(
    input: &str,
    jobs: usize,
    samples: u64,
    seed: u64,
    out: Timed<EstimateRecord>,
) -> RunReport<EstimateRecord> {
    let config = Config {
        input: input.into(),
        jobs,
        samples: Some(samples),
        seed: Some(seed),
        ..Config::default()
    };
    report("estimate", config, out)
}
