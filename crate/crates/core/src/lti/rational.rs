use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use super::polynomial::Polynomial;
use super::roots::complex_roots;
use super::LtiError;

/// `|den(jω)|` at or below this fraction of `Σ|d_k| ω^k` counts as a pole
/// on the sample grid.
const POLE_REL_TOL: f64 = 1e-12;
/// Relative distance within which a root is considered to lie on the
/// imaginary axis, and within which two roots are merged.
pub const AXIS_REL_TOL: f64 = 1e-6;

/// Ratio of two real polynomials. Common factors are kept unless
/// [`RationalTF::normalize`] is called explicitly.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RationalTF {
    num: Polynomial,
    den: Polynomial,
}

/// A pole on the imaginary axis at `s = j·omega`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AxisPole {
    pub omega: f64,
    pub multiplicity: usize,
}

impl RationalTF {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self, LtiError> {
        if den.is_zero() {
            return Err(LtiError::ZeroDenominator);
        }
        if !num.is_finite() || !den.is_finite() {
            return Err(LtiError::NonFinite);
        }
        Ok(Self { num, den })
    }

    pub fn constant(k: f64) -> Self {
        Self {
            num: Polynomial::constant(k),
            den: Polynomial::one(),
        }
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    /// Multiply both numerator and denominator by the same polynomial.
    pub fn scale_both(&self, k: &Polynomial) -> Result<Self, LtiError> {
        Self::new(&self.num * k, &self.den * k)
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        self.num.eval_complex(s) / self.den.eval_complex(s)
    }

    /// Value at `s = jω`, or `PoleOnAxis` when the denominator vanishes
    /// there to within rounding.
    pub fn eval_jw(&self, omega: f64) -> Result<Complex64, LtiError> {
        let s = Complex64::new(0.0, omega);
        let d = self.den.eval_complex(s);
        let scale = self.den.abs_coeffs().eval(omega.abs());
        if d.norm() <= POLE_REL_TOL * scale {
            return Err(LtiError::PoleOnAxis { omega });
        }
        Ok(self.num.eval_complex(s) / d)
    }

    /// `tf(jω)` for each angular frequency, in input order.
    pub fn freq_response(&self, omegas: &[f64]) -> Result<Vec<Complex64>, LtiError> {
        omegas.iter().map(|&w| self.eval_jw(w)).collect()
    }

    /// Poles on the imaginary axis after cancelling numerator roots at the
    /// same location, ordered by frequency. A conjugate pair `±jω` is
    /// reported as two entries.
    pub fn imaginary_axis_poles(&self) -> Vec<AxisPole> {
        self.axis_pole_analysis()
            .into_iter()
            .filter(|p| p.net > 0)
            .map(|p| AxisPole {
                omega: p.omega,
                multiplicity: p.net,
            })
            .collect()
    }

    /// Denominator with every imaginary-axis root divided out (before any
    /// cancellation against the numerator).
    pub fn den_without_axis_roots(&self) -> Polynomial {
        let analysis = self.axis_pole_analysis();
        let mut d = self.den.clone();
        for p in analysis.iter().filter(|p| p.omega >= 0.0) {
            let factor = if p.omega == 0.0 {
                Polynomial::s()
            } else {
                Polynomial::new(vec![p.omega * p.omega, 0.0, 1.0])
            };
            for _ in 0..p.raw {
                d = d.div_rem(&factor).0;
            }
        }
        d
    }

    fn axis_pole_analysis(&self) -> Vec<AxisCluster> {
        let mut out = Vec::new();
        let den_origin = self.den.origin_multiplicity();
        let num_origin = if self.num.is_zero() {
            usize::MAX
        } else {
            self.num.origin_multiplicity()
        };
        if den_origin > 0 {
            out.push(AxisCluster {
                omega: 0.0,
                raw: den_origin,
                net: den_origin.saturating_sub(num_origin),
            });
        }

        let den_roots = complex_roots(&self.den.unshift(den_origin));
        let mut axis: Vec<f64> = den_roots
            .iter()
            .filter(|z| z.norm() > 0.0 && z.re.abs() <= AXIS_REL_TOL * z.norm())
            .map(|z| z.im)
            .collect();
        axis.sort_by(|a, b| a.total_cmp(b));

        let num_roots = if self.num.is_zero() {
            Vec::new()
        } else {
            complex_roots(&self.num.unshift(num_origin.min(self.num.coeffs().len())))
        };

        let mut i = 0;
        while i < axis.len() {
            let w = axis[i];
            let mut j = i + 1;
            while j < axis.len() && (axis[j] - w).abs() <= AXIS_REL_TOL * w.abs() {
                j += 1;
            }
            let raw = j - i;
            let omega = axis[i..j].iter().sum::<f64>() / raw as f64;
            let target = Complex64::new(0.0, omega);
            let cancelled = if self.num.is_zero() {
                raw
            } else {
                num_roots
                    .iter()
                    .filter(|z| (**z - target).norm() <= AXIS_REL_TOL * omega.abs())
                    .count()
            };
            out.push(AxisCluster {
                omega,
                raw,
                net: raw.saturating_sub(cancelled),
            });
            i = j;
        }
        out.sort_by(|a, b| a.omega.total_cmp(&b.omega));
        out
    }

    /// Cancel common factors (within [`AXIS_REL_TOL`]) and scale the
    /// denominator to be monic.
    pub fn normalize(&self) -> RationalTF {
        if self.num.is_zero() {
            return RationalTF::new(Polynomial::zero(), Polynomial::one()).expect("unit den");
        }
        let k = self
            .num
            .origin_multiplicity()
            .min(self.den.origin_multiplicity());
        let num = self.num.unshift(k);
        let den = self.den.unshift(k);
        let mut nr = complex_roots(&num);
        let mut dr = complex_roots(&den);
        let mut i = 0;
        while i < dr.len() {
            let target = dr[i];
            let tol = AXIS_REL_TOL * target.norm().max(1.0);
            if let Some(pos) = nr.iter().position(|z| (*z - target).norm() <= tol) {
                nr.swap_remove(pos);
                dr.swap_remove(i);
            } else {
                i += 1;
            }
        }
        let lead = den.leading();
        let num = Polynomial::from_roots(&nr, num.leading() / lead);
        let den = Polynomial::from_roots(&dr, 1.0);
        RationalTF { num, den }
    }
}

struct AxisCluster {
    omega: f64,
    raw: usize,
    net: usize,
}

impl fmt::Display for RationalTF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[f64]) -> Polynomial {
        Polynomial::new(c.to_vec())
    }

    fn tf(n: &[f64], d: &[f64]) -> RationalTF {
        RationalTF::new(p(n), p(d)).unwrap()
    }

    #[test]
    fn zero_denominator_rejected() {
        assert_eq!(
            RationalTF::new(p(&[1.0]), Polynomial::zero()),
            Err(LtiError::ZeroDenominator)
        );
    }

    #[test]
    fn pure_spring_stiffness_limits() {
        // k1 (s^2 + 10 s + kd) / (s^2 + 10 s + k1), kd = 500, k1 = 1000
        let g = tf(&[500000.0, 10000.0, 1000.0], &[1000.0, 10.0, 1.0]);
        let low = g.eval_jw(1e-9).unwrap();
        assert!((low.re - 500.0).abs() < 1e-6);
        let high = g.eval_jw(1e7).unwrap();
        assert!((high.norm() - 1000.0).abs() < 1e-6 * 1000.0);
    }

    #[test]
    fn identity_tf_is_one() {
        let g = tf(&[3.0, 2.0, 1.0], &[3.0, 2.0, 1.0]);
        for v in g.freq_response(&[0.1, 1.0, 10.0, 1e3]).unwrap() {
            assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn pole_on_axis_detected() {
        let g = tf(&[1.0], &[4.0, 0.0, 1.0]);
        assert_eq!(g.eval_jw(2.0), Err(LtiError::PoleOnAxis { omega: 2.0 }));
        let g = tf(&[1.0], &[0.0, 1.0]);
        assert!(matches!(
            g.freq_response(&[1.0, 0.0]),
            Err(LtiError::PoleOnAxis { .. })
        ));
    }

    #[test]
    fn axis_poles_examples() {
        let g = tf(&[1.0], &[0.0, 1000.0, 10.0, 1.0]);
        assert_eq!(
            g.imaginary_axis_poles(),
            vec![AxisPole {
                omega: 0.0,
                multiplicity: 1
            }]
        );
        assert!(tf(&[1.0], &[1000.0, 10.0, 1.0])
            .imaginary_axis_poles()
            .is_empty());
        assert_eq!(
            tf(&[1.0], &[0.0, 0.0, 1.0]).imaginary_axis_poles(),
            vec![AxisPole {
                omega: 0.0,
                multiplicity: 2
            }]
        );
    }

    #[test]
    fn axis_pole_pair_and_cancellation() {
        // (s^2 + 4)(s + 1)
        let g = tf(&[1.0], &[4.0, 4.0, 1.0, 1.0]);
        let poles = g.imaginary_axis_poles();
        assert_eq!(poles.len(), 2);
        assert!((poles[0].omega + 2.0).abs() < 1e-9);
        assert!((poles[1].omega - 2.0).abs() < 1e-9);
        assert!(poles.iter().all(|p| p.multiplicity == 1));
        // s (s^2 + 4) / (s (s^2 + 4)(s + 1)) cancels everything on the axis
        let g = tf(&[0.0, 4.0, 0.0, 1.0], &[0.0, 4.0, 4.0, 1.0, 1.0]);
        assert!(g.imaginary_axis_poles().is_empty());
        // s / s^2 leaves a simple pole
        let g = tf(&[0.0, 1.0], &[0.0, 0.0, 1.0]);
        assert_eq!(
            g.imaginary_axis_poles(),
            vec![AxisPole {
                omega: 0.0,
                multiplicity: 1
            }]
        );
    }

    #[test]
    fn double_imaginary_pair() {
        // (s^2 + 9)^2
        let g = tf(&[1.0], &[81.0, 0.0, 18.0, 0.0, 1.0]);
        let poles = g.imaginary_axis_poles();
        assert_eq!(poles.len(), 2, "{poles:?}");
        assert!(poles.iter().all(|p| p.multiplicity == 2));
    }

    #[test]
    fn strip_axis_roots() {
        let g = tf(&[1.0], &[0.0, 4.0, 4.0, 1.0, 1.0]);
        let d = g.den_without_axis_roots();
        assert_eq!(d.degree(), Some(1));
        assert!((d.coeff(0) - 1.0).abs() < 1e-9 && (d.coeff(1) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn normalize_cancels_common_factor() {
        // (s + 2)(s + 3) / ((s + 2) s)
        let g = tf(&[6.0, 5.0, 1.0], &[0.0, 2.0, 1.0]);
        let n = g.normalize();
        assert_eq!(n.den().degree(), Some(1));
        assert!((n.num().coeff(0) - 3.0).abs() < 1e-9);
        assert!(n.den().coeff(0).abs() < 1e-12);
        // never applied implicitly
        assert_eq!(g.den().degree(), Some(2));
    }
}
