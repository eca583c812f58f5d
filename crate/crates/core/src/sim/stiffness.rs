use std::ops::ControlFlow;

use serde::Serialize;

use super::{integrate, ForceProfile, PlantState, SimError, SimScenario, DEFAULT_DT};
use crate::model::SeaConfig;
use crate::passivity::analyze_config;

const FIRST_HORIZON: f64 = 10.0;
const MAX_HORIZON: f64 = 160.0;
/// Over the last part of the run the displacement must stay this close
/// (relative) to its final mean.
const FLAT_REL_TOL: f64 = 1e-4;
const FLAT_FRACTION: f64 = 0.2;
const MEAN_FRACTION: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StiffnessEstimate {
    /// Applied force over steady load displacement, N/m.
    pub stiffness: f64,
    pub displacement: f64,
    /// Horizon at which the displacement was judged steady, s.
    pub horizon: f64,
    /// The configuration passed the numeric passivity check with margin;
    /// otherwise the estimate may describe a transient regime.
    pub reliable: bool,
}

/// Push the load with a constant `force` from rest and report
/// `force / x_L` once the displacement stops changing.
///
/// The horizon starts at 10 s and doubles up to 160 s.
pub fn rendered_stiffness_step(
    config: &SeaConfig,
    load_mass: f64,
    force: f64,
) -> Result<StiffnessEstimate, SimError> {
    if force == 0.0 || !force.is_finite() {
        return Err(SimError::ZeroForce);
    }
    let reliable = analyze_config(config).is_ok_and(|v| v.passive && !v.marginal);
    let mut horizon = FIRST_HORIZON;
    loop {
        let sc = SimScenario {
            config: config.clone(),
            load_mass,
            theta_a: 0.0,
            theta_l: 0.0,
            initial: PlantState::default(),
            external_force: ForceProfile::step(0.0, force),
            duration: horizon,
            dt: DEFAULT_DT,
        };
        let mut xs = Vec::with_capacity(sc.steps() + 1);
        integrate(&sc, |_, s, _| {
            xs.push(s.x_l);
            ControlFlow::Continue(())
        })?;
        if let Some(x) = steady_value(&xs) {
            return Ok(StiffnessEstimate {
                stiffness: force / x,
                displacement: x,
                horizon,
                reliable,
            });
        }
        if horizon >= MAX_HORIZON {
            return Err(SimError::DidNotSettle { horizon });
        }
        horizon *= 2.0;
    }
}

fn steady_value(xs: &[f64]) -> Option<f64> {
    let n = xs.len();
    let mean_from = n - ((n as f64 * MEAN_FRACTION).ceil() as usize).clamp(1, n);
    let tail = &xs[mean_from..];
    let mean = tail.iter().sum::<f64>() / tail.len() as f64;
    if mean == 0.0 || !mean.is_finite() {
        return None;
    }
    let flat_from = n - ((n as f64 * FLAT_FRACTION).ceil() as usize).clamp(1, n);
    xs[flat_from..]
        .iter()
        .all(|x| (x - mean).abs() <= FLAT_REL_TOL * mean.abs())
        .then_some(mean)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ComplianceElement, LinearController};

    fn spring(ca: LinearController, cl: LinearController, b1: f64) -> SeaConfig {
        SeaConfig {
            m: 1.0,
            b: 10.0,
            d1: ComplianceElement::new(1000.0, b1),
            d2: ComplianceElement::ZERO,
            ca,
            cl,
            label: None,
        }
    }

    #[test]
    fn load_side_p_renders_kd() {
        let c = spring(LinearController::ZERO, LinearController::p(500.0), 0.0);
        let est = rendered_stiffness_step(&c, 1.0, 10.0).unwrap();
        assert!((est.stiffness - 500.0).abs() < 5.0, "{est:?}");
        assert!(est.reliable);
    }

    #[test]
    fn combined_renders_series_stiffness() {
        let c = spring(
            LinearController::pd(1000.0, 25.0),
            LinearController::ZERO,
            50.0,
        );
        let est = rendered_stiffness_step(&c, 1.0, 10.0).unwrap();
        assert!((est.stiffness - 500.0).abs() < 5.0, "{est:?}");
    }

    #[test]
    fn free_load_does_not_settle() {
        let c = spring(LinearController::ZERO, LinearController::ZERO, 0.0);
        assert!(matches!(
            rendered_stiffness_step(&c, 1.0, 1.0),
            Err(SimError::DidNotSettle { .. })
        ));
    }

    #[test]
    fn zero_force_rejected() {
        let c = spring(LinearController::ZERO, LinearController::p(500.0), 0.0);
        assert_eq!(
            rendered_stiffness_step(&c, 1.0, 0.0),
            Err(SimError::ZeroForce)
        );
    }
}
