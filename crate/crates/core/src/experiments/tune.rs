use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::model::{ParamPath, SeaConfig};
use crate::passivity::{analyze_config, closed_form_condition, max_passive_gain, MaxGain};
use crate::sim::{simulate_metrics, Metrics, SimError, SimScenario, DEFAULT_BAND, DEFAULT_DT};

/// Candidates evaluated between updates of the pruning bound. Fixed so the
/// trace does not depend on the thread count.
const BATCH: usize = 32;

/// A tunable gain and its search interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tunable {
    pub path: ParamPath,
    pub lo: f64,
    pub hi: f64,
    /// Log-spaced grid (requires `lo > 0`).
    pub log: bool,
}

impl Tunable {
    pub fn log(path: ParamPath, lo: f64, hi: f64) -> Self {
        Self {
            path,
            lo,
            hi,
            log: true,
        }
    }

    fn grid(&self, n: usize) -> Vec<f64> {
        if n == 1 {
            return vec![self.lo];
        }
        (0..n)
            .map(|i| {
                let f = i as f64 / (n - 1) as f64;
                if i == n - 1 {
                    self.hi
                } else if self.log {
                    (self.lo.ln() + f * (self.hi.ln() - self.lo.ln())).exp()
                } else {
                    self.lo + f * (self.hi - self.lo)
                }
            })
            .collect()
    }

    /// Point `k` half-steps from `x`, clamped to the interval.
    fn offset(&self, x: f64, half_steps: i32, n: usize) -> f64 {
        let k = half_steps as f64 * 0.5 / (n.max(2) - 1) as f64;
        let y = if self.log {
            x * (self.hi / self.lo).powf(k)
        } else {
            x + k * (self.hi - self.lo)
        };
        y.clamp(self.lo, self.hi)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TuneOptions {
    pub points_per_axis: usize,
    pub x0: f64,
    pub duration: f64,
    pub dt: f64,
    pub band: f64,
    /// Feasible points must end with a steady-state error below this, m.
    pub max_sse: f64,
}

impl Default for TuneOptions {
    fn default() -> Self {
        Self {
            points_per_axis: 20,
            x0: 0.5,
            duration: 10.0,
            dt: DEFAULT_DT,
            band: DEFAULT_BAND,
            max_sse: 1e-3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TracePoint {
    pub gains: Vec<f64>,
    pub passive: bool,
    pub settling_time: Option<f64>,
    pub steady_state_error: Option<f64>,
    /// Stopped early because it could no longer beat the incumbent.
    pub pruned: bool,
    pub feasible: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TuneResult {
    pub best_gains: BTreeMap<String, f64>,
    pub best_config: SeaConfig,
    /// Settling time at the tuning load, s.
    pub objective_value: f64,
    pub best_metrics: Metrics,
    pub passivity_margin: String,
    pub search_trace: Vec<TracePoint>,
}

struct Search<'a> {
    template: &'a SeaConfig,
    tunables: &'a [Tunable],
    load_mass: f64,
    opts: TuneOptions,
    trace: Vec<TracePoint>,
    best: Option<(f64, Vec<f64>)>,
}

impl Search<'_> {
    fn config(&self, gains: &[f64]) -> Result<SeaConfig, ExperimentError> {
        let mut c = self.template.clone();
        for (t, g) in self.tunables.iter().zip(gains) {
            t.path.set(&mut c, *g);
        }
        c.validate()?;
        Ok(c)
    }

    fn evaluate(&self, gains: &[f64], cutoff: Option<f64>) -> Result<TracePoint, ExperimentError> {
        let config = self.config(gains)?;
        let verdict = analyze_config(&config)?;
        let mut point = TracePoint {
            gains: gains.to_vec(),
            passive: verdict.passive && !verdict.marginal,
            settling_time: None,
            steady_state_error: None,
            pruned: false,
            feasible: false,
        };
        if !point.passive {
            return Ok(point);
        }
        let sc = SimScenario::displaced_load(config, self.load_mass, self.opts.x0)
            .with_timing(self.opts.duration, self.opts.dt);
        match simulate_metrics(&sc, 0.0, self.opts.band, cutoff) {
            Ok(m) => {
                point.settling_time = m.settling_time;
                point.steady_state_error = m.steady_state_error;
                point.pruned = cutoff.is_some() && m.settling_time.is_none();
                point.feasible = m.settling_time.is_some()
                    && m.steady_state_error.is_some_and(|e| e < self.opts.max_sse);
            }
            Err(SimError::Diverged { .. }) | Err(SimError::NonFiniteState { .. }) => {}
            Err(e) => return Err(e.into()),
        }
        Ok(point)
    }

    fn run(&mut self, candidates: Vec<Vec<f64>>) -> Result<(), ExperimentError> {
        for chunk in candidates.chunks(BATCH) {
            let cutoff = self.best.as_ref().map(|b| b.0);
            let points: Vec<TracePoint> = chunk
                .par_iter()
                .map(|g| self.evaluate(g, cutoff))
                .collect::<Result<_, _>>()?;
            for p in points {
                if p.feasible {
                    let ts = p.settling_time.expect("feasible implies settled");
                    let better = match &self.best {
                        None => true,
                        Some((bt, bg)) => ts < *bt || (ts == *bt && p.gains < *bg),
                    };
                    if better {
                        self.best = Some((ts, p.gains.clone()));
                    }
                }
                self.trace.push(p);
            }
        }
        Ok(())
    }
}

fn cartesian(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new()];
    for axis in axes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                axis.iter().map(move |&x| {
                    let mut p = prefix.clone();
                    p.push(x);
                    p
                })
            })
            .collect();
    }
    out
}

/// Grid search for the fastest-settling passive gains at one load mass.
///
/// Every grid point must pass the numeric passivity check with margin and
/// settle with a small steady-state error; among those the shortest
/// settling time wins, ties going to the lexicographically smaller gains.
/// The incumbent is then refined on a grid with half the spacing spanning
/// one coarse step either side.
pub fn tune_gains(
    template: &SeaConfig,
    tunables: &[Tunable],
    load_mass: f64,
    opts: TuneOptions,
) -> Result<TuneResult, ExperimentError> {
    if tunables.is_empty() {
        return Err(ExperimentError::InvalidSpec("no tunable gains".into()));
    }
    for t in tunables {
        let ok = t.lo.is_finite()
            && t.hi.is_finite()
            && t.lo <= t.hi
            && t.lo >= 0.0
            && (!t.log || t.lo > 0.0);
        if !ok {
            return Err(ExperimentError::InvalidSpec(format!(
                "bad bounds for {}: [{}, {}]",
                t.path, t.lo, t.hi
            )));
        }
    }
    if opts.points_per_axis == 0 {
        return Err(ExperimentError::InvalidSpec(
            "points_per_axis must be positive".into(),
        ));
    }
    let n = opts.points_per_axis;
    let mut search = Search {
        template,
        tunables,
        load_mass,
        opts,
        trace: Vec::new(),
        best: None,
    };
    let axes: Vec<Vec<f64>> = tunables.iter().map(|t| t.grid(n)).collect();
    search.run(cartesian(&axes))?;

    let Some((_, incumbent)) = search.best.clone() else {
        return Err(ExperimentError::NoFeasiblePoint);
    };
    let local: Vec<Vec<f64>> = tunables
        .iter()
        .zip(&incumbent)
        .map(|(t, &x)| {
            let mut v: Vec<f64> = (-2..=2).map(|k| t.offset(x, k, n)).collect();
            v.sort_by(|a, b| a.total_cmp(b));
            v.dedup();
            v
        })
        .collect();
    let refine: Vec<Vec<f64>> = cartesian(&local)
        .into_iter()
        .filter(|g| *g != incumbent)
        .collect();
    search.run(refine)?;

    let (ts, gains) = search.best.clone().expect("incumbent kept");
    let best_config = search.config(&gains)?;
    // full metrics of the winner, without pruning
    let sc = SimScenario::displaced_load(best_config.clone(), load_mass, opts.x0)
        .with_timing(opts.duration, opts.dt);
    let best_metrics = simulate_metrics(&sc, 0.0, opts.band, None)?;

    Ok(TuneResult {
        best_gains: tunables
            .iter()
            .zip(&gains)
            .map(|(t, g)| (t.path.to_string(), *g))
            .collect(),
        passivity_margin: margin_description(&best_config, tunables[0]),
        best_config,
        objective_value: ts,
        best_metrics,
        search_trace: search.trace,
    })
}

fn margin_description(config: &SeaConfig, first: Tunable) -> String {
    let current = first.path.get(config);
    let numeric = match max_passive_gain(config, first.path, (0.0, first.hi.max(current) * 10.0)) {
        Ok(MaxGain::Bounded(g)) => format!(
            "{} passive up to {:.6} (tuned {:.6})",
            first.path, g, current
        ),
        Ok(MaxGain::Unbounded) => format!("{} passive over the whole search range", first.path),
        Err(e) => format!("margin search failed: {e}"),
    };
    let cf = closed_form_condition(config);
    match cf.numeric_bound {
        Some(b) if cf.applicable => format!(
            "{numeric}; closed-form bound {} <= {:.6}",
            b.parameter, b.value
        ),
        _ => numeric,
    }
}
