//! Batch experiments: configuration files, dispatch to formulas and
//! simulators, and CSV output.

pub mod cases;
pub mod config;

use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use cases::{predict_case, simulate_case, Case, CasePrediction, CaseSimulation, Params};
pub use config::{ExperimentConfig, ParamValue, Sweep, CONFIG_VERSION};

use crate::error::{NetError, Result};

/// Column order of every CSV the harness writes.
pub const CSV_COLUMNS: [&str; 12] = [
    "case",
    "formula_id",
    "param_json",
    "epsilon_like",
    "tau_pred",
    "tau_mc",
    "stderr",
    "n_paths",
    "n_censored",
    "dt",
    "seed",
    "wall_time_s",
];

/// One CSV row; simulation fields are empty for prediction-only rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub case: String,
    pub formula_id: String,
    pub param_json: String,
    pub epsilon_like: Option<f64>,
    pub tau_pred: Option<f64>,
    pub tau_mc: Option<f64>,
    pub stderr: Option<f64>,
    pub n_paths: Option<usize>,
    pub n_censored: Option<usize>,
    pub dt: Option<f64>,
    pub seed: Option<u64>,
    pub wall_time_s: f64,
}

impl Row {
    pub fn ratio(&self) -> Option<f64> {
        Some(self.tau_mc? / self.tau_pred?)
    }

    pub fn z_score(&self) -> Option<f64> {
        let se = self.stderr?;
        let diff = self.tau_mc? - self.tau_pred?;
        if se > 0.0 {
            Some(diff / se)
        } else if diff == 0.0 {
            Some(0.0)
        } else {
            Some(f64::INFINITY.copysign(diff))
        }
    }
}

/// Rows plus messages meant for the operator (regime warnings, exit
/// probabilities).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub rows: Vec<Row>,
    pub notes: Vec<String>,
}

fn base_row(cfg: &ExperimentConfig, case: Case) -> Row {
    Row {
        case: case.to_string(),
        formula_id: String::new(),
        param_json: cfg.param_json(),
        epsilon_like: None,
        tau_pred: None,
        tau_mc: None,
        stderr: None,
        n_paths: None,
        n_censored: None,
        dt: None,
        seed: None,
        wall_time_s: 0.0,
    }
}

fn with_prediction(row: &mut Row, notes: &mut Vec<String>, pred: &CasePrediction) {
    row.formula_id = pred.formula_id.clone();
    row.tau_pred = Some(pred.tau);
    row.epsilon_like = pred.epsilon_like;
    if let Some(p) = &pred.prediction {
        if p.extrapolated {
            notes.push(format!("warning: {} outside the asymptotic regime ({})", p.formula_id, p.regime_note));
        }
    }
}

fn with_simulation(row: &mut Row, notes: &mut Vec<String>, sim: &CaseSimulation) {
    let e = &sim.estimate;
    row.tau_mc = Some(e.mean);
    row.stderr = Some(e.stderr);
    row.n_paths = Some(e.n_paths);
    row.n_censored = Some(e.n_censored);
    row.dt = Some(e.dt);
    row.seed = Some(e.seed);
    if e.flagged {
        notes.push(format!("warning: {} of {} paths censored", e.n_censored, e.n_paths));
    }
    if let Some(p) = &sim.exit_probs {
        notes.push(format!("exit probabilities {:?} +- {:?}", p.probs, p.stderr));
    }
}

/// Formula values, one row per sweep value.
pub fn predict(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let case = cfg.case()?;
    let mut rep = Report::default();
    for c in cfg.expand() {
        let t0 = Instant::now();
        let mut row = base_row(&c, case);
        let pred = predict_case(case, &c.params)?;
        with_prediction(&mut row, &mut rep.notes, &pred);
        row.wall_time_s = t0.elapsed().as_secs_f64();
        rep.rows.push(row);
    }
    Ok(rep)
}

fn run(cfg: &ExperimentConfig, need_prediction: bool) -> Result<Report> {
    cfg.validate()?;
    let case = cfg.case()?;
    if !case.has_simulator() {
        return Err(NetError::Unsupported(format!("case '{case}' has no simulator")));
    }
    let mut rep = Report::default();
    for c in cfg.expand() {
        let t0 = Instant::now();
        let mut row = base_row(&c, case);
        match predict_case(case, &c.params) {
            Ok(p) => with_prediction(&mut row, &mut rep.notes, &p),
            Err(e) if need_prediction => return Err(e),
            Err(e) => rep.notes.push(format!("no prediction: {e}")),
        }
        let sim = simulate_case(case, &c.params, &c.sim)
            .map_err(|e| NetError::Estimation(format!("{case} with {}: {e}", c.param_json())))?;
        with_simulation(&mut row, &mut rep.notes, &sim);
        row.wall_time_s = t0.elapsed().as_secs_f64();
        rep.rows.push(row);
    }
    Ok(rep)
}

/// Monte Carlo estimates; the prediction is filled in when one exists.
pub fn simulate(cfg: &ExperimentConfig) -> Result<Report> {
    run(cfg, false)
}

/// Outcome of the prediction-versus-simulation gate.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub report: Report,
    /// Per row: (ratio, z-score, pass).
    pub checks: Vec<(f64, f64, bool)>,
}

impl Comparison {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.2)
    }
}

/// A row passes when |z| <= z_bound or |ratio - 1| <= ratio_tol.
pub fn compare(cfg: &ExperimentConfig) -> Result<Comparison> {
    let report = run(cfg, true)?;
    let checks = report
        .rows
        .iter()
        .map(|r| {
            let ratio = r.ratio().unwrap_or(f64::NAN);
            let z = r.z_score().unwrap_or(f64::NAN);
            (ratio, z, z.abs() <= cfg.z_bound || (ratio - 1.0).abs() <= cfg.ratio_tol)
        })
        .collect();
    Ok(Comparison { report, checks })
}

/// Compare across the sweep grid; a sweep is required.
pub fn sweep(cfg: &ExperimentConfig) -> Result<Comparison> {
    match &cfg.sweep {
        None => Err(NetError::Config("sweep requires a [sweep] table".into())),
        Some(s) if s.values.is_empty() => Err(NetError::Config("sweep has no values".into())),
        Some(_) => compare(cfg),
    }
}

pub fn write_csv<W: Write>(rows: &[Row], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| NetError::Io(e.to_string()))?;
    }
    if rows.is_empty() {
        w.write_record(CSV_COLUMNS).map_err(|e| NetError::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<Row>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers().map_err(|e| NetError::Io(e.to_string()))?.iter().map(String::from).collect();
    if header != CSV_COLUMNS {
        return Err(NetError::Config(format!("unexpected CSV header {header:?}")));
    }
    r.deserialize().map(|row| row.map_err(|e| NetError::Io(e.to_string()))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn funnel_cfg() -> ExperimentConfig {
        let mut c = ExperimentConfig::new("planar_funnel");
        c.params.insert("Rc".into(), ParamValue::Num(1.0));
        c.params.insert("area".into(), ParamValue::Num(1.0));
        c.sweep = Some(Sweep { param: "eps".into(), values: vec![0.04, 0.01] });
        c
    }

    #[test]
    fn predict_sweep_rows() {
        let rep = predict(&funnel_cfg()).unwrap();
        assert_eq!(rep.rows.len(), 2);
        let (a, b) = (rep.rows[0].tau_pred.unwrap(), rep.rows[1].tau_pred.unwrap());
        assert!((a / b - 2.0).abs() < 1e-12);
        assert_eq!(rep.rows[0].formula_id, "PLANAR_FUNNEL_SYMMETRIC");
        assert_eq!(rep.rows[0].epsilon_like, Some(0.01));
    }

    #[test]
    fn csv_header_and_round_trip() {
        let rep = predict(&funnel_cfg()).unwrap();
        let mut buf = Vec::new();
        write_csv(&rep.rows, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().next().unwrap(), CSV_COLUMNS.join(","));
        assert_eq!(read_csv(&buf[..]).unwrap(), rep.rows);
    }

    #[test]
    fn sweep_needs_values() {
        let mut c = funnel_cfg();
        c.sweep = None;
        assert!(sweep(&c).is_err());
        c.sweep = Some(Sweep { param: "eps".into(), values: vec![] });
        assert!(sweep(&c).is_err());
    }

    #[test]
    fn disk_compare_gate() {
        let mut c = ExperimentConfig::new("disk");
        c.sim.dt = 1e-4;
        c.sim.n_paths = 2000;
        c.sim.adaptive = false;
        c.sim.workers = Some(1);
        let cmp = compare(&c).unwrap();
        assert!(cmp.passed(), "{:?}", cmp.checks);
        assert!((cmp.checks[0].0 - 1.0).abs() < 0.03);
        let again = compare(&c).unwrap();
        assert_eq!(again.report.rows[0].tau_mc, cmp.report.rows[0].tau_mc);
    }

    #[test]
    fn prediction_only_cases_refuse_simulation() {
        let c = ExperimentConfig::new("dumbbell");
        assert!(matches!(simulate(&c), Err(NetError::Unsupported(_))));
    }
}
