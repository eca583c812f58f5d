//! Scripted studies built on the passivity check and the simulator: gain
//! sweeps, passivity-constrained tuning, and the controller comparisons.

mod reproduce;
mod tune;

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lti::LtiError;
use crate::model::{ModelError, ParamPath, SeaConfig};
use crate::passivity::{analyze_config, PassivityVerdict};
use crate::sim::{simulate_metrics, Metrics, SimError, SimScenario, DEFAULT_BAND, DEFAULT_DT};

pub use reproduce::{
    reproduce_fig3, reproduce_fig4, reproduce_stiffness_study, Assertion, ControllerRun,
    Fig3Report, Fig4Report, StiffnessStudy, FIG3_HORIZON,
};
pub use tune::{tune_gains, TracePoint, Tunable, TuneOptions, TuneResult};

/// Per-run time cap for sweeps.
pub const SWEEP_CAP: f64 = 2.0;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum ExperimentError {
    #[error("invalid experiment spec: {0}")]
    InvalidSpec(String),
    #[error("no grid point is passive and settles with small steady-state error")]
    NoFeasiblePoint,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Lti(#[from] LtiError),
}

/// One parameter swept over values and load masses, each run released
/// from `x0` with zero setpoints.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub base: SeaConfig,
    pub parameter: ParamPath,
    pub values: Vec<f64>,
    pub load_masses: Vec<f64>,
    pub x0: f64,
    pub duration: f64,
    pub dt: f64,
    pub band: f64,
}

impl SweepSpec {
    pub fn new(
        base: SeaConfig,
        parameter: ParamPath,
        values: Vec<f64>,
        load_masses: Vec<f64>,
    ) -> Self {
        Self {
            base,
            parameter,
            values,
            load_masses,
            x0: 0.5,
            duration: SWEEP_CAP,
            dt: DEFAULT_DT,
            band: DEFAULT_BAND,
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |s: &str| Err(ExperimentError::InvalidSpec(s.into()));
        if self.values.is_empty() {
            return bad("values must not be empty");
        }
        if self.load_masses.is_empty() {
            return bad("load masses must not be empty");
        }
        if !self.values.iter().all(|v| v.is_finite()) {
            return bad("values must be finite");
        }
        if !self.load_masses.iter().all(|m| m.is_finite() && *m > 0.0) {
            return bad("load masses must be positive");
        }
        if !(self.x0.is_finite() && self.x0 != 0.0) {
            return bad("initial displacement must be finite and nonzero");
        }
        if !(self.band > 0.0 && self.band < 1.0) {
            return bad("band must lie in (0, 1)");
        }
        self.base.validate()?;
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Settled,
    DidNotSettle,
    Diverged,
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub param: f64,
    pub mass: f64,
    pub status: RunStatus,
    /// Absent when the run diverged or the config was invalid.
    pub metrics: Option<Metrics>,
    pub verdict: Option<PassivityVerdict>,
    pub error: Option<String>,
}

impl SweepRow {
    pub fn passive(&self) -> Option<bool> {
        self.verdict.as_ref().map(|v| v.passive)
    }

    pub fn settling_time(&self) -> Option<f64> {
        self.metrics.and_then(|m| m.settling_time)
    }

    pub fn steady_state_error(&self) -> Option<f64> {
        self.metrics.and_then(|m| m.steady_state_error)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Provenance {
    pub version: &'static str,
    /// Seconds since the epoch, only when `SOURCE_DATE_EPOCH` is set, so
    /// outputs stay reproducible by default.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

impl Provenance {
    pub fn current() -> Self {
        Self {
            version: crate::VERSION,
            timestamp: std::env::var("SOURCE_DATE_EPOCH")
                .ok()
                .and_then(|s| s.trim().parse().ok()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepReport {
    pub spec: SweepSpec,
    pub rows: Vec<SweepRow>,
    pub provenance: Provenance,
}

impl SweepReport {
    pub const CSV_HEADER: &'static str =
        "param,mass,settling_time,sse,overshoot,oscillations,passive";

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(Self::CSV_HEADER);
        out.push('\n');
        let opt = |x: Option<f64>| x.map_or(String::new(), |v| v.to_string());
        for r in &self.rows {
            let ts = match (r.status, r.settling_time()) {
                (RunStatus::Error, _) => "error".to_string(),
                (_, Some(t)) => t.to_string(),
                (_, None) => "did not settle".to_string(),
            };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.param,
                r.mass,
                ts,
                opt(r.steady_state_error()),
                opt(r.metrics.map(|m| m.overshoot)),
                r.metrics
                    .map_or(String::new(), |m| m.oscillation_count.to_string()),
                r.passive().map_or(String::new(), |p| p.to_string()),
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Rows for one load mass, in parameter order.
    pub fn rows_for_mass(&self, mass: f64) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(move |r| r.mass == mass)
    }
}

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut v = v.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    v.dedup();
    v
}

fn run_row(spec: &SweepSpec, value: f64, mass: f64) -> SweepRow {
    let mut row = SweepRow {
        param: value,
        mass,
        status: RunStatus::Error,
        metrics: None,
        verdict: None,
        error: None,
    };
    let config = match spec.base.with(spec.parameter, value) {
        Ok(c) => c,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    row.verdict = analyze_config(&config).ok();
    let sc = SimScenario::displaced_load(config, mass, spec.x0).with_timing(spec.duration, spec.dt);
    match simulate_metrics(&sc, 0.0, spec.band, None) {
        Ok(m) => {
            row.status = if m.settled() {
                RunStatus::Settled
            } else {
                RunStatus::DidNotSettle
            };
            row.metrics = Some(m);
        }
        Err(SimError::Diverged { .. }) | Err(SimError::NonFiniteState { .. }) => {
            row.status = RunStatus::Diverged;
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

/// Evaluate passivity and a load-release run for every (mass, value)
/// pair. Failing rows are recorded, never fatal; rows are ordered by mass
/// then value.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepReport, ExperimentError> {
    spec.validate()?;
    let masses = sorted(&spec.load_masses);
    let values = sorted(&spec.values);
    let pairs: Vec<(f64, f64)> = masses
        .iter()
        .flat_map(|&m| values.iter().map(move |&v| (m, v)))
        .collect();
    let rows = pairs
        .par_iter()
        .map(|&(m, v)| run_row(spec, v, m))
        .collect();
    Ok(SweepReport {
        spec: spec.clone(),
        rows,
        provenance: Provenance::current(),
    })
}
