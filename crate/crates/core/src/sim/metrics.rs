use serde::{Deserialize, Serialize};

use super::{SimError, Trajectory};

/// Settling band as a fraction of the initial displacement.
pub const DEFAULT_BAND: f64 = 0.02;
/// Fraction of the horizon averaged for the steady-state error.
const TAIL_FRACTION: f64 = 0.05;
/// Errors smaller than this fraction of the initial one do not count
/// towards sign changes.
const SIGN_DEADBAND: f64 = 1e-9;

/// Step-response figures of merit for the load position.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    /// Time after which the load stays in band; `None` if it never does
    /// within the horizon.
    pub settling_time: Option<f64>,
    /// Mean absolute error over the final 5% of the horizon; reported only
    /// for settled runs.
    pub steady_state_error: Option<f64>,
    /// Largest excursion past the reference, relative to the initial
    /// displacement.
    pub overshoot: f64,
    pub oscillation_count: usize,
}

impl Metrics {
    pub fn settled(&self) -> bool {
        self.settling_time.is_some()
    }
}

/// Streaming computation of [`Metrics`] over a known number of samples.
#[derive(Clone, Debug)]
pub struct MetricsAccumulator {
    reference: f64,
    band: f64,
    e0: f64,
    total: usize,
    tail_start: usize,
    seen: usize,
    /// Time of the sample following the last out-of-band one.
    settle_candidate: Option<f64>,
    last_out: bool,
    tail_sum: f64,
    tail_n: usize,
    max_beyond: f64,
    last_sign: f64,
    sign_changes: usize,
}

impl MetricsAccumulator {
    /// `x0` is the initial load position; `total` the number of samples
    /// that will be pushed for a full run.
    pub fn new(reference: f64, band_fraction: f64, x0: f64, total: usize) -> Self {
        let e0 = x0 - reference;
        let tail = ((total as f64) * TAIL_FRACTION).ceil().max(1.0) as usize;
        Self {
            reference,
            band: band_fraction * e0.abs(),
            e0,
            total,
            tail_start: total.saturating_sub(tail),
            seen: 0,
            settle_candidate: Some(0.0),
            last_out: false,
            tail_sum: 0.0,
            tail_n: 0,
            max_beyond: 0.0,
            last_sign: 0.0,
            sign_changes: 0,
        }
    }

    /// Feed one sample; returns whether it lies inside the band.
    pub fn push(&mut self, t: f64, x: f64) -> bool {
        let e = x - self.reference;
        let inside = e.abs() <= self.band;
        if !inside {
            self.settle_candidate = None;
        } else if self.last_out || self.settle_candidate.is_none() {
            self.settle_candidate = Some(t);
        }
        self.last_out = !inside;

        if self.seen >= self.tail_start {
            self.tail_sum += e.abs();
            self.tail_n += 1;
        }
        if self.e0 != 0.0 {
            let beyond = -e * self.e0.signum();
            self.max_beyond = self.max_beyond.max(beyond);
        }
        if e.abs() > SIGN_DEADBAND * self.e0.abs() {
            let sgn = e.signum();
            if self.last_sign != 0.0 && sgn != self.last_sign {
                self.sign_changes += 1;
            }
            self.last_sign = sgn;
        }
        self.seen += 1;
        inside
    }

    pub fn finish(&self) -> Result<Metrics, SimError> {
        if self.seen == 0 {
            return Err(SimError::EmptyTrajectory);
        }
        let complete = self.seen >= self.total;
        let settling_time = if complete {
            self.settle_candidate
        } else {
            None
        };
        let sse = if settling_time.is_some() && self.tail_n > 0 {
            Some(self.tail_sum / self.tail_n as f64)
        } else {
            None
        };
        Ok(Metrics {
            settling_time,
            steady_state_error: sse,
            overshoot: if self.e0 == 0.0 {
                0.0
            } else {
                self.max_beyond / self.e0.abs()
            },
            oscillation_count: self.sign_changes,
        })
    }
}

/// Metrics of the load position in a recorded trajectory.
pub fn metrics(traj: &Trajectory, reference: f64, band_fraction: f64) -> Result<Metrics, SimError> {
    let Some(first) = traj.states.first() else {
        return Err(SimError::EmptyTrajectory);
    };
    let mut acc = MetricsAccumulator::new(reference, band_fraction, first.x_l, traj.len());
    for (t, s) in traj.times.iter().zip(&traj.states) {
        acc.push(*t, s.x_l);
    }
    acc.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::PlantState;

    fn traj(dt: f64, xs: impl IntoIterator<Item = f64>) -> Trajectory {
        let mut tr = Trajectory::default();
        for (i, x) in xs.into_iter().enumerate() {
            tr.times.push(i as f64 * dt);
            tr.states.push(PlantState::at_load(x));
            tr.actuator_force.push(0.0);
            tr.transmission_force.push(0.0);
        }
        tr
    }

    #[test]
    fn at_reference_everywhere() {
        let m = metrics(&traj(0.1, [0.0; 50]), 0.0, DEFAULT_BAND).unwrap();
        assert_eq!(m.settling_time, Some(0.0));
        assert_eq!(m.steady_state_error, Some(0.0));
        assert_eq!(m.oscillation_count, 0);
    }

    #[test]
    fn empty_trajectory() {
        assert_eq!(
            metrics(&Trajectory::default(), 0.0, DEFAULT_BAND),
            Err(SimError::EmptyTrajectory)
        );
    }

    #[test]
    fn critically_damped_settling_time() {
        // x(t) = 0.5 (1 + t) e^{-t}; band 2% of 0.5
        let dt = 1e-3;
        let xs = (0..=20_000).map(|i| {
            let t = i as f64 * dt;
            0.5 * (1.0 + t) * (-t).exp()
        });
        let m = metrics(&traj(dt, xs), 0.0, 0.02).unwrap();
        // oracle: bisection on (1 + t) e^{-t} = 0.02
        let (mut a, mut b) = (1.0f64, 20.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if (1.0 + mid) * (-mid).exp() > 0.02 {
                a = mid;
            } else {
                b = mid;
            }
        }
        let ts = m.settling_time.unwrap();
        assert!((ts - a).abs() <= dt, "{ts} vs {a}");
        assert_eq!(m.oscillation_count, 0);
        assert_eq!(m.overshoot, 0.0);
    }

    #[test]
    fn never_settles() {
        let xs = (0..100).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 });
        let m = metrics(&traj(0.1, xs), 0.0, 0.02).unwrap();
        assert_eq!(m.settling_time, None);
        assert_eq!(m.steady_state_error, None);
        assert_eq!(m.oscillation_count, 99);
        assert_eq!(m.overshoot, 1.0);
    }

    #[test]
    fn leaving_the_band_resets_settling() {
        let xs = [1.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0];
        let m = metrics(&traj(1.0, xs), 0.0, 0.02).unwrap();
        assert_eq!(m.settling_time, Some(4.0));
    }
}
