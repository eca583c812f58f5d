//! Fixed-step simulation of the actuator coupled to a pure load mass.

mod metrics;
mod stiffness;

use std::io::{self, Write};
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ModelError, SeaConfig};

pub use metrics::{metrics, Metrics, MetricsAccumulator, DEFAULT_BAND};
pub use stiffness::{rendered_stiffness_step, StiffnessEstimate};

/// Any state component beyond this magnitude aborts the run.
pub const DIVERGENCE_LIMIT: f64 = 1e6;
pub const DEFAULT_DT: f64 = 1e-4;
pub const DEFAULT_DURATION: f64 = 10.0;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PlantState {
    #[serde(rename = "x_A")]
    pub x_a: f64,
    #[serde(rename = "v_A")]
    pub v_a: f64,
    #[serde(rename = "x_L")]
    pub x_l: f64,
    #[serde(rename = "v_L")]
    pub v_l: f64,
    /// Integral of the actuator position error, m·s.
    #[serde(rename = "e_int_A")]
    pub int_a: f64,
    /// Integral of the load position error, m·s.
    #[serde(rename = "e_int_L")]
    pub int_l: f64,
}

impl PlantState {
    pub fn at_load(x_l: f64) -> Self {
        Self {
            x_l,
            ..Self::default()
        }
    }

    /// `[x_A, v_A, x_L, v_L, e_int_A, e_int_L]`.
    pub fn to_array(self) -> [f64; 6] {
        [
            self.x_a, self.v_a, self.x_l, self.v_l, self.int_a, self.int_l,
        ]
    }

    fn from_array(a: [f64; 6]) -> Self {
        Self {
            x_a: a[0],
            v_a: a[1],
            x_l: a[2],
            v_l: a[3],
            int_a: a[4],
            int_l: a[5],
        }
    }
}

/// Piecewise-constant external force on the load: each `(t, f)` holds
/// from `t` until the next breakpoint. Zero before the first.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ForceProfile {
    breakpoints: Vec<(f64, f64)>,
}

impl ForceProfile {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn step(at: f64, value: f64) -> Self {
        Self {
            breakpoints: vec![(at, value)],
        }
    }

    pub fn new(mut breakpoints: Vec<(f64, f64)>) -> Self {
        breakpoints.sort_by(|a, b| a.0.total_cmp(&b.0));
        Self { breakpoints }
    }

    pub fn at(&self, t: f64) -> f64 {
        self.breakpoints
            .iter()
            .rev()
            .find(|(t0, _)| *t0 <= t)
            .map_or(0.0, |(_, f)| *f)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimScenario {
    pub config: SeaConfig,
    /// Load mass, kg.
    pub load_mass: f64,
    /// Actuator setpoint, m.
    pub theta_a: f64,
    /// Load setpoint, m.
    pub theta_l: f64,
    pub initial: PlantState,
    pub external_force: ForceProfile,
    pub duration: f64,
    pub dt: f64,
}

impl SimScenario {
    /// Release the load from `x0` with zero setpoints and no external force.
    pub fn displaced_load(config: SeaConfig, load_mass: f64, x0: f64) -> Self {
        Self {
            config,
            load_mass,
            theta_a: 0.0,
            theta_l: 0.0,
            initial: PlantState::at_load(x0),
            external_force: ForceProfile::zero(),
            duration: DEFAULT_DURATION,
            dt: DEFAULT_DT,
        }
    }

    pub fn with_timing(mut self, duration: f64, dt: f64) -> Self {
        self.duration = duration;
        self.dt = dt;
        self
    }

    /// Number of integration steps; the trajectory has one more sample.
    pub fn steps(&self) -> usize {
        (self.duration / self.dt).round() as usize
    }

    pub fn validate(&self) -> Result<(), SimError> {
        self.config.validate()?;
        let bad = |what: &str| Err(SimError::InvalidScenario(what.to_string()));
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return bad("duration must be positive");
        }
        if !(self.dt.is_finite() && self.dt > 0.0 && self.dt <= self.duration) {
            return bad("dt must lie in (0, duration]");
        }
        if !(self.load_mass.is_finite() && self.load_mass >= 0.0) {
            return bad("load mass must be nonnegative");
        }
        if !self.initial.to_array().iter().all(|x| x.is_finite())
            || !self.theta_a.is_finite()
            || !self.theta_l.is_finite()
        {
            return bad("initial state and setpoints must be finite");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum SimError {
    #[error("load mass is zero; the two-mass ODE needs m_L > 0")]
    MasslessLoad,
    #[error("state exceeded {DIVERGENCE_LIMIT:e} at t = {t} s")]
    Diverged { t: f64 },
    #[error("non-finite state at t = {t} s")]
    NonFiniteState { t: f64 },
    #[error("trajectory is empty")]
    EmptyTrajectory,
    #[error("response did not settle within {horizon} s")]
    DidNotSettle { horizon: f64 },
    #[error("force must be finite and nonzero")]
    ZeroForce,
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Forces at one instant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Forces {
    /// Combined controller output applied to the actuator, N.
    pub actuator: f64,
    /// Force carried by the transmission `D1`, positive when stretched, N.
    pub transmission: f64,
}

fn forces(s: &PlantState, sc: &SimScenario) -> (Forces, f64) {
    let c = &sc.config;
    let e_a = sc.theta_a - s.x_a;
    let e_l = sc.theta_l - s.x_l;
    let f_a = c.ca.kp * e_a - c.ca.kv * s.v_a + c.ca.ki * s.int_a + c.cl.kp * e_l - c.cl.kv * s.v_l
        + c.cl.ki * s.int_l;
    let f_spring = c.d1.k * (s.x_l - s.x_a) + c.d1.c * (s.v_l - s.v_a);
    let f_ground = c.d2.k * s.x_l + c.d2.c * s.v_l;
    (
        Forces {
            actuator: f_a,
            transmission: f_spring,
        },
        f_ground,
    )
}

/// Time derivative of the plant state.
///
/// The actuator sees its own controller output, viscous damping, and the
/// full port force `D1·(x_L − x_A) + D2·x_L`; the load sees the external
/// force minus the transmission and grounding forces. Controllers use the
/// exact state velocities for their derivative terms.
pub fn derivative(s: &PlantState, t: f64, sc: &SimScenario) -> Result<PlantState, SimError> {
    if sc.load_mass == 0.0 {
        return Err(SimError::MasslessLoad);
    }
    let c = &sc.config;
    let (f, f_ground) = forces(s, sc);
    let f_ext = sc.external_force.at(t);
    Ok(PlantState {
        x_a: s.v_a,
        v_a: (f.actuator - c.b * s.v_a + f.transmission + f_ground) / c.m,
        x_l: s.v_l,
        v_l: (f_ext - f.transmission - f_ground) / sc.load_mass,
        int_a: sc.theta_a - s.x_a,
        int_l: sc.theta_l - s.x_l,
    })
}

fn axpy(y: &[f64; 6], a: f64, x: &[f64; 6]) -> [f64; 6] {
    std::array::from_fn(|i| y[i] + a * x[i])
}

/// Run the RK4 integrator, handing every sample (including `t = 0`) to
/// `observe`. Returning `Break` stops early without error.
pub fn integrate<F>(sc: &SimScenario, mut observe: F) -> Result<(), SimError>
where
    F: FnMut(f64, &PlantState, Forces) -> ControlFlow<()>,
{
    sc.validate()?;
    if sc.load_mass == 0.0 {
        return Err(SimError::MasslessLoad);
    }
    let n = sc.steps();
    let h = sc.dt;
    let mut y = sc.initial;
    let f = |y: &[f64; 6], t: f64| {
        derivative(&PlantState::from_array(*y), t, sc).map(PlantState::to_array)
    };
    for i in 0..=n {
        let t = i as f64 * h;
        if observe(t, &y, forces(&y, sc).0).is_break() || i == n {
            break;
        }
        let y0 = y.to_array();
        let k1 = f(&y0, t)?;
        let k2 = f(&axpy(&y0, 0.5 * h, &k1), t + 0.5 * h)?;
        let k3 = f(&axpy(&y0, 0.5 * h, &k2), t + 0.5 * h)?;
        let k4 = f(&axpy(&y0, h, &k3), t + h)?;
        let next: [f64; 6] =
            std::array::from_fn(|j| y0[j] + h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]));
        let t_next = t + h;
        if next.iter().any(|x| !x.is_finite()) {
            return Err(SimError::NonFiniteState { t: t_next });
        }
        if next.iter().any(|x| x.abs() > DIVERGENCE_LIMIT) {
            return Err(SimError::Diverged { t: t_next });
        }
        y = PlantState::from_array(next);
    }
    Ok(())
}

/// Recorded simulation output, one entry per sample.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<PlantState>,
    pub actuator_force: Vec<f64>,
    pub transmission_force: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub const CSV_HEADER: &'static str = "t,x_A,v_A,x_L,v_L,f_actuator,f_transmission";

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{}", Self::CSV_HEADER)?;
        for i in 0..self.len() {
            let s = &self.states[i];
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                self.times[i],
                s.x_a,
                s.v_a,
                s.x_l,
                s.v_l,
                self.actuator_force[i],
                self.transmission_force[i]
            )?;
        }
        Ok(())
    }
}

/// Simulate from `t = 0` to `duration` and record every sample.
pub fn simulate(sc: &SimScenario) -> Result<Trajectory, SimError> {
    let cap = sc.steps().saturating_add(1).min(1 << 24);
    let mut tr = Trajectory {
        times: Vec::with_capacity(cap),
        states: Vec::with_capacity(cap),
        actuator_force: Vec::with_capacity(cap),
        transmission_force: Vec::with_capacity(cap),
    };
    integrate(sc, |t, s, f| {
        tr.times.push(t);
        tr.states.push(*s);
        tr.actuator_force.push(f.actuator);
        tr.transmission_force.push(f.transmission);
        ControlFlow::Continue(())
    })?;
    Ok(tr)
}

/// Metrics of a load-release run without storing the trajectory.
///
/// With `cutoff = Some(tc)` the run stops as soon as `t > tc` while the
/// load is outside the band; the result then reports no settling time.
/// Any run that would settle no later than `tc` is unaffected.
pub fn simulate_metrics(
    sc: &SimScenario,
    reference: f64,
    band_fraction: f64,
    cutoff: Option<f64>,
) -> Result<Metrics, SimError> {
    let mut acc = MetricsAccumulator::new(reference, band_fraction, sc.initial.x_l, sc.steps() + 1);
    let mut pruned = false;
    integrate(sc, |t, s, _| {
        let inside = acc.push(t, s.x_l);
        if let Some(tc) = cutoff {
            if t > tc && !inside {
                pruned = true;
                return ControlFlow::Break(());
            }
        }
        ControlFlow::Continue(())
    })?;
    let mut m = acc.finish()?;
    if pruned {
        m.settling_time = None;
        m.steady_state_error = None;
    }
    Ok(m)
}
