//! One function per subcommand. Each returns the artifact bytes plus any
//! notes for stderr; `main` does all of the writing.

use std::f64::consts::PI;
use std::path::Path;

use ctxprob::algebra::{chsh_terms, phase_transform_raw};
use ctxprob::ensemble::Which;
use ctxprob::export::write_traces_csv;
use ctxprob::fluctuation::{fluctuation_demo as run_demo, JudgedTrace, Quadruple};
use ctxprob::model::{EprOrientation, MODEL_SCHEMA_VERSION};
use ctxprob::rng::derive_seed;
use ctxprob::{
    chsh, correlation, empirical_disturbance, epr_model, epr_probabilities, frequency_table,
    model_probabilities, sample_source, validate_model, ContextualModel, EprScenario, Error, Grid, OutcomePair,
    PhaseMatrix, ProbabilityTable, QuadruplePair, SettingPair, Verdict,
};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::config::{parse_angle, AngleValue, AnglesValue, Format, Settings, OPTIMAL_ANGLES};
use crate::error::{CliError, CliResult};
use crate::fmt::{round, sig};

pub const SCHEMA_VERSION: u32 = 1;

pub const EPR_SWEEP_HEADER: [&str; 8] = ["delta", "p11", "p12", "p21", "p22", "E_closed", "E_mc", "abs_err"];
pub const CHSH_HEADER: [&str; 8] = [
    "gamma1",
    "gamma2",
    "gamma1_prime",
    "gamma2_prime",
    "S_closed",
    "S_mc",
    "classical_bound",
    "tsirelson",
];
pub const LAMBDA_SCAN_HEADER: [&str; 9] = ["s", "regime", "admissible", "E_pi4", "S_opt", "p11", "p12", "p21", "p22"];
pub const SIMULATE_HEADER: [&str; 4] = ["quantity", "index", "closed", "empirical"];

/// Scenario at which lambda-scan reports E; Δ = π/4 with both analyzer
/// half-angles inside (0, π/2).
const LAMBDA_SCAN_SCENARIO: (f64, f64) = (PI / 2.0, 3.0 * PI / 4.0);

#[derive(Debug, Default)]
pub struct Report {
    pub body: Vec<u8>,
    pub notes: Vec<String>,
    /// Set when the command ran but its subject failed its checks.
    pub failure: Option<String>,
}

impl Report {
    fn new(body: Vec<u8>) -> Self {
        Report { body, ..Report::default() }
    }
}

fn num(x: f64) -> Value {
    json!(round(x))
}

fn grid_json(g: &Grid) -> Value {
    let mut map = Map::new();
    for ij in OutcomePair::ALL {
        map.insert(ij.to_string(), num(ij.at(g)));
    }
    Value::Object(map)
}

fn json_document(mut fields: Map<String, Value>) -> Vec<u8> {
    let mut doc = Map::new();
    doc.insert("schema_version".into(), json!(SCHEMA_VERSION));
    doc.append(&mut fields);
    let mut out = serde_json::to_vec_pretty(&Value::Object(doc)).expect("JSON values serialize");
    out.push(b'\n');
    out
}

fn csv_document<const N: usize>(header: [&str; N], rows: impl IntoIterator<Item = Vec<String>>) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| CliError::Io(format!("csv: {e}"));
    w.write_record(header).map_err(fail)?;
    for row in rows {
        w.write_record(row).map_err(fail)?;
    }
    w.into_inner().map_err(|e| CliError::Io(format!("csv: {e}")))
}

fn object(pairs: impl IntoIterator<Item = (&'static str, Value)>) -> Map<String, Value> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// E from Monte Carlo hidden b-frequencies of the EPR model at `s`.
fn sampled_correlation(s: EprScenario, samples: usize, seed: u64) -> CliResult<f64> {
    let src = sample_source(&epr_model(s), samples, seed)?;
    Ok(correlation(&frequency_table(&src, Which::Hidden)?))
}

struct SweepRow {
    delta: f64,
    p: ProbabilityTable,
    e_closed: f64,
    e_mc: f64,
}

pub fn epr_sweep(s: &Settings, gamma: Option<&str>) -> CliResult<Report> {
    let seed = s.seed()?;
    let grid = s.grid_or("0:pi:9")?;
    let gamma = match gamma {
        Some(text) => parse_angle(text)?,
        None => s.file.gamma.as_ref().map(AngleValue::resolve).transpose()?.unwrap_or(0.0),
    };
    let rows = grid
        .par_iter()
        .enumerate()
        .map(|(n, &delta)| {
            let scenario = EprScenario::new(gamma, gamma + delta);
            let p = epr_probabilities(scenario);
            let e_mc = sampled_correlation(scenario, s.samples, derive_seed(seed, n as u64))?;
            Ok(SweepRow { delta, p, e_closed: correlation(&p), e_mc })
        })
        .collect::<CliResult<Vec<SweepRow>>>()?;

    let body = match s.format_or(Format::Csv) {
        Format::Csv => csv_document(
            EPR_SWEEP_HEADER,
            rows.iter().map(|r| {
                let mut row = vec![sig(r.delta)];
                row.extend(OutcomePair::ALL.iter().map(|&ij| sig(r.p.get(ij))));
                row.extend([sig(r.e_closed), sig(r.e_mc), sig((r.e_mc - r.e_closed).abs())]);
                row
            }),
        )?,
        Format::Json => json_document(object([
            ("command", json!("epr-sweep")),
            ("seed", json!(seed)),
            ("samples", json!(s.samples)),
            ("gamma", num(gamma)),
            (
                "rows",
                rows.iter()
                    .map(|r| {
                        let mut row = object([("delta", num(r.delta))]);
                        for ij in OutcomePair::ALL {
                            row.insert(format!("p{ij}"), num(r.p.get(ij)));
                        }
                        row.insert("E_closed".into(), num(r.e_closed));
                        row.insert("E_mc".into(), num(r.e_mc));
                        row.insert("abs_err".into(), num((r.e_mc - r.e_closed).abs()));
                        Value::Object(row)
                    })
                    .collect(),
            ),
        ])),
    };
    Ok(Report::new(body))
}

pub fn chsh_report(s: &Settings, angles: Option<&str>) -> CliResult<Report> {
    let seed = s.seed()?;
    let angles = match angles {
        Some(text) => crate::config::parse_angle_list(text)?,
        None => s.file.angles.as_ref().map(AnglesValue::resolve).transpose()?.unwrap_or(OPTIMAL_ANGLES),
    };
    let [g1, g2, g1p, g2p] = angles;
    let s_closed = chsh(g1, g2, g1p, g2p);
    let terms = chsh_terms(g1, g2, g1p, g2p);
    let s_mc = terms
        .par_iter()
        .enumerate()
        .map(|(n, &(sign, scenario))| Ok(sign * sampled_correlation(scenario, s.samples, derive_seed(seed, n as u64))?))
        .collect::<CliResult<Vec<f64>>>()?
        .into_iter()
        .sum::<f64>();
    let tsirelson = 2.0 * 2f64.sqrt();

    let body = match s.format_or(Format::Json) {
        Format::Json => json_document(object([
            ("command", json!("chsh")),
            ("seed", json!(seed)),
            ("samples", json!(s.samples)),
            ("angles", Value::Array(angles.iter().map(|&a| num(a)).collect())),
            ("S_closed", num(s_closed)),
            ("S_mc", num(s_mc)),
            ("classical_bound", json!(2)),
            ("tsirelson", num(tsirelson)),
        ])),
        Format::Csv => {
            let mut row: Vec<String> = angles.iter().map(|&a| sig(a)).collect();
            row.extend([sig(s_closed), sig(s_mc), "2".into(), sig(tsirelson)]);
            csv_document(CHSH_HEADER, [row])?
        }
    };
    Ok(Report::new(body))
}

fn scaled(m: &ContextualModel, scale: f64) -> ContextualModel {
    let lambdas = m.phases.lambdas().map(|row| row.map(|l| scale * l));
    m.with_phases(PhaseMatrix::from_lambdas(&lambdas))
}

struct ScanRow {
    scale: f64,
    regime: ctxprob::Regime,
    admissible: bool,
    e: f64,
    s_opt: f64,
    p: Grid,
}

fn scan_row(scale: f64) -> ScanRow {
    let raw = |m: &ContextualModel| phase_transform_raw(&m.settings, &m.transition, &m.transition_prime, &m.phases);
    let admits = |m: &ContextualModel| model_probabilities(m).is_ok();

    let (g, gp) = LAMBDA_SCAN_SCENARIO;
    let e_model = scaled(&epr_model(EprScenario::new(g, gp)), scale);
    let p = raw(&e_model);
    let mut admissible = admits(&e_model);
    let [g1, g2, g1p, g2p] = OPTIMAL_ANGLES;
    let mut s_opt = 0.0;
    for (sign, scenario) in chsh_terms(g1, g2, g1p, g2p) {
        let m = scaled(&epr_model(scenario), scale);
        admissible &= admits(&m);
        s_opt += sign * correlation(&ProbabilityTable::from_raw(raw(&m)));
    }
    ScanRow {
        scale,
        regime: e_model.phases.regime(),
        admissible,
        e: correlation(&ProbabilityTable::from_raw(p)),
        s_opt,
        p,
    }
}

pub fn lambda_scan(s: &Settings) -> CliResult<Report> {
    let grid = s.grid_or("0:2:21")?;
    if let Some(neg) = grid.iter().find(|&&x| x < 0.0) {
        return Err(CliError::Usage(format!("λ scale must be nonnegative, got {neg}")));
    }
    let rows: Vec<ScanRow> = grid.par_iter().map(|&x| scan_row(x)).collect();
    let body = match s.format_or(Format::Csv) {
        Format::Csv => csv_document(
            LAMBDA_SCAN_HEADER,
            rows.iter().map(|r| {
                let mut row = vec![sig(r.scale), r.regime.to_string(), r.admissible.to_string(), sig(r.e), sig(r.s_opt)];
                row.extend(OutcomePair::ALL.iter().map(|ij| sig(ij.at(&r.p))));
                row
            }),
        )?,
        Format::Json => json_document(object([
            ("command", json!("lambda-scan")),
            (
                "rows",
                rows.iter()
                    .map(|r| {
                        json!({
                            "s": num(r.scale),
                            "regime": r.regime.to_string(),
                            "admissible": r.admissible,
                            "E_pi4": num(r.e),
                            "S_opt": num(r.s_opt),
                            "p": grid_json(&r.p),
                        })
                    })
                    .collect(),
            ),
        ])),
    };
    Ok(Report::new(body))
}

fn read_text(path: &Path, what: &str) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {what} {}: {e}", path.display())))
}

fn load_pair(path: &Path) -> CliResult<QuadruplePair> {
    serde_json::from_str(&read_text(path, "Q pair")?)
        .map_err(|e| CliError::Usage(format!("Q pair {}: {e}", path.display())))
}

fn parse_quadruple(text: &str) -> CliResult<Quadruple> {
    let digits: Vec<u8> = text.trim().bytes().map(|b| b.wrapping_sub(b'0')).collect();
    match digits.as_slice() {
        &[i, j, k, l] => Quadruple::new(i, j, k, l).map_err(CliError::from),
        _ => Err(CliError::Usage(format!("quadruple '{text}' must be four indices such as 1112"))),
    }
}

fn verdict_note(j: &JudgedTrace) -> String {
    match j.verdict {
        Verdict::Stabilizes { limit } => format!("{}: Stabilizes at {}", j.trace.target(), sig(limit)),
        Verdict::Fluctuates { low, high } => format!(
            "{}: Fluctuates in [{}, {}] (band {})",
            j.trace.target(),
            sig(low),
            sig(high),
            sig(high - low)
        ),
    }
}

fn verdict_json(v: &Verdict) -> Value {
    match *v {
        Verdict::Stabilizes { limit } => json!({ "verdict": "Stabilizes", "limit": num(limit) }),
        Verdict::Fluctuates { low, high } => {
            json!({ "verdict": "Fluctuates", "low": num(low), "high": num(high), "band": num(high - low) })
        }
    }
}

pub fn fluctuation_demo(s: &Settings, pair: Option<&Path>, quadruple: Option<&str>) -> CliResult<Report> {
    let seed = s.seed()?;
    let pair = match pair.or(s.file.pair.as_deref()) {
        Some(path) => load_pair(path)?,
        None => QuadruplePair::default_pair(),
    };
    let target = match quadruple.or(s.file.quadruple.as_deref()) {
        Some(text) => parse_quadruple(text)?,
        None => Quadruple::default(),
    };
    let report = run_demo(&pair, target, s.samples, seed, s.criterion)?;
    let judged: Vec<&JudgedTrace> = std::iter::once(&report.quadruple).chain(&report.observables).collect();

    let body = match s.format_or(Format::Csv) {
        Format::Csv => {
            let traces: Vec<_> = judged.iter().map(|j| &j.trace).collect();
            let mut buf = Vec::new();
            write_traces_csv(&traces, &mut buf, sig)?;
            buf
        }
        Format::Json => {
            let trace_json = |j: &JudgedTrace| {
                json!({
                    "target": j.trace.target(),
                    "verdict": verdict_json(&j.verdict),
                    "checkpoints": j.trace.checkpoints().iter().map(|&(m, f)| json!([m, num(f)])).collect::<Vec<_>>(),
                })
            };
            json_document(object([
                ("command", json!("fluctuation-demo")),
                ("seed", json!(seed)),
                ("samples", json!(s.samples)),
                ("epsilon", num(s.criterion.epsilon)),
                ("window", json!(s.criterion.window)),
                ("quadruple", trace_json(&report.quadruple)),
                ("observables", report.observables.iter().map(trace_json).collect()),
            ]))
        }
    };
    let mut out = Report::new(body);
    out.notes = judged.iter().map(|j| verdict_note(j)).collect();
    Ok(out)
}

fn model_path<'a>(s: &'a Settings, given: Option<&'a Path>) -> CliResult<&'a Path> {
    given
        .or(s.file.model.as_deref())
        .ok_or_else(|| CliError::Usage("a model file is required".into()))
}

fn load_model(path: &Path) -> CliResult<ContextualModel> {
    let model = ContextualModel::from_json(&read_text(path, "model")?)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    Ok(model)
}

pub fn validate(s: &Settings, given: Option<&Path>) -> CliResult<Report> {
    let path = model_path(s, given)?;
    let report = validate_model(&load_model(path)?);
    let orientation = match report.epr_orientation {
        Some(EprOrientation::Direct) => "direct",
        Some(EprOrientation::Mirrored) => "mirrored",
        None => "none",
    };
    let body = match s.format_or(Format::Csv) {
        Format::Json => json_document(object([
            ("command", json!("validate")),
            ("model", json!(path.display().to_string())),
            ("passed", json!(report.passed())),
            ("regime", json!(report.regime.to_string())),
            ("epr_admissible", json!(report.epr_admissible)),
            ("epr_orientation", json!(orientation)),
            (
                "checks",
                report
                    .checks
                    .iter()
                    .map(|c| json!({"name": c.name, "required": c.required, "passed": c.passed, "residual": num(c.residual)}))
                    .collect(),
            ),
        ])),
        Format::Csv => {
            let mut text = format!("{:<34}{:<10}{:<8}{}\n", "check", "required", "result", "residual");
            for c in &report.checks {
                let result = if c.passed { "ok" } else { "FAIL" };
                let required = if c.required { "yes" } else { "no" };
                text += &format!("{:<34}{:<10}{:<8}{}\n", c.name, required, result, sig(c.residual));
            }
            text += &format!("regime: {}\n", report.regime);
            text += &format!("EPR-admissible: {} ({orientation})\n", if report.epr_admissible { "yes" } else { "no" });
            text += &format!("validation: {}\n", if report.passed() { "PASS" } else { "FAIL" });
            text.into_bytes()
        }
    };
    let mut out = Report::new(body);
    if !report.passed() {
        let names: Vec<&str> = report.failures().map(|c| c.name).collect();
        out.failure = Some(format!("{}: failed {}", path.display(), names.join(", ")));
    }
    Ok(out)
}

pub fn simulate(s: &Settings, given: Option<&Path>, ensemble: Option<&Path>) -> CliResult<Report> {
    let seed = s.seed()?;
    let path = model_path(s, given)?;
    let model = load_model(path)?;
    let report = validate_model(&model);
    if !report.passed() {
        let names: Vec<&str> = report.failures().map(|c| c.name).collect();
        return Err(CliError::Failed(format!("{}: failed {}", path.display(), names.join(", "))));
    }
    let mut notes = Vec::new();
    let src = sample_source(&model, s.samples, seed)?;
    let p_closed = model_probabilities(&model)?;
    let nu_b = frequency_table(&src, Which::Hidden)?;
    let nu_a = src.setting_frequencies();
    let ctx = ctxprob::algebra::product_contexts(&model.transition, &model.transition_prime);
    let delta_closed = ctxprob::disturbance_term(&p_closed, &model.settings, &ctx);
    let (delta_mc, lambda_hat) = match empirical_disturbance(&model, s.samples, seed) {
        Ok(est) => (Some(est.final_delta()), Some(est.lambda_hat)),
        Err(e @ (Error::SingularContext { .. } | Error::EmptyContext(_))) => {
            notes.push(format!("no entanglement-coefficient estimate: {e}"));
            (None, None)
        }
        Err(e) => return Err(e.into()),
    };
    let lambda = model.phases.lambdas();

    if let Some(dest) = ensemble.or(s.file.ensemble.as_deref()) {
        let mut buf = Vec::new();
        ctxprob::export::write_ensemble_csv(&src, &mut buf)?;
        write_file(dest, &buf)?;
    }

    let body = match s.format_or(Format::Json) {
        Format::Json => json_document(object([
            ("command", json!("simulate")),
            ("model", json!(path.display().to_string())),
            ("model_schema_version", json!(MODEL_SCHEMA_VERSION)),
            ("seed", json!(seed)),
            ("samples", json!(s.samples)),
            ("p_b", grid_json(p_closed.grid())),
            ("nu_b", grid_json(nu_b.grid())),
            ("p_a", grid_json(model.settings.grid())),
            ("nu_a", grid_json(&nu_a)),
            ("delta_closed", grid_json(&delta_closed)),
            ("delta_mc", delta_mc.as_ref().map_or(Value::Null, grid_json)),
            ("lambda", grid_json(&lambda)),
            ("lambda_hat", lambda_hat.as_ref().map_or(Value::Null, grid_json)),
        ])),
        Format::Csv => {
            let mut rows = Vec::new();
            let opt = |g: &Option<Grid>, ij: OutcomePair| g.as_ref().map_or(String::new(), |g| sig(ij.at(g)));
            for kl in SettingPair::ALL {
                rows.push(vec!["p_a".into(), kl.to_string(), sig(model.settings.get(kl)), sig(kl.at(&nu_a))]);
            }
            for ij in OutcomePair::ALL {
                rows.push(vec!["p_b".into(), ij.to_string(), sig(p_closed.get(ij)), sig(nu_b.get(ij))]);
            }
            for ij in OutcomePair::ALL {
                rows.push(vec!["delta".into(), ij.to_string(), sig(ij.at(&delta_closed)), opt(&delta_mc, ij)]);
            }
            for ij in OutcomePair::ALL {
                rows.push(vec!["lambda".into(), ij.to_string(), sig(ij.at(&lambda)), opt(&lambda_hat, ij)]);
            }
            csv_document(SIMULATE_HEADER, rows)?
        }
    };
    Ok(Report { body, notes, failure: None })
}

pub fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    std::fs::write(path, bytes).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}
