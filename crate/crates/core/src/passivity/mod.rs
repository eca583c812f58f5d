//! Positive-real certification of the interaction impedance.
//!
//! `Z_L` is passive when (1) its imaginary-axis poles are simple, (2) it
//! has no other poles outside the open left half-plane, and (3)
//! `Re(Num(jω)·Den(−jω)) ≥ 0` for every real `ω`. The last condition is a
//! polynomial inequality in `u = ω²`, decided here exactly by isolating the
//! positive real roots of that polynomial and checking the sign between
//! them.

mod catalog;
mod search;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::lti::{
    positive_real_roots, routh_hurwitz, AxisPole, LtiError, Polynomial, RationalTF, RouthResult,
};
use crate::model::{impedance_tf, stiffness_tf, SeaConfig};

pub use catalog::{catalog_realpart, closed_form_condition, ClosedFormVerdict, NumericBound};
pub use search::{max_passive_gain, MaxGain, SearchError};

/// Coefficients of the real-part polynomial below this fraction of the
/// magnitude of the terms that formed them are cancellation noise.
const ZERO_REL_TOL: f64 = 1e-12;
/// Sign decisions within this fraction of the term envelope are marginal.
const BOUNDARY_REL_TOL: f64 = 1e-9;

/// `Re(Num(jω)·Den(−jω))` written as a polynomial in `u = ω²`.
#[derive(Clone, Debug, PartialEq)]
pub struct RealPartPolynomial {
    pub poly_in_u: Polynomial,
    /// Same construction with every term replaced by its magnitude; used
    /// to judge which values are indistinguishable from zero.
    pub envelope_in_u: Polynomial,
    pub source_tf: RationalTF,
}

/// Build the real-part polynomial of `tf` from the even part of
/// `Num(s)·Den(−s)`: the `s^{2i}` coefficient contributes `(−1)^i u^i`.
pub fn realpart_poly(tf: &RationalTF) -> RealPartPolynomial {
    let q = tf.num() * &tf.den().conjugate_flip();
    let env = &tf.num().abs_coeffs() * &tf.den().abs_coeffs();
    let even = |p: &Polynomial, signed: bool| {
        let c: Vec<f64> = p
            .coeffs()
            .iter()
            .step_by(2)
            .enumerate()
            .map(|(i, &x)| if signed && i % 2 == 1 { -x } else { x })
            .collect();
        Polynomial::new(c)
    };
    RealPartPolynomial {
        poly_in_u: even(&q, true),
        envelope_in_u: even(&env, false),
        source_tf: tf.clone(),
    }
}

impl RealPartPolynomial {
    /// Copy of `poly_in_u` with noise-level coefficients set to zero.
    pub fn cleaned(&self) -> Polynomial {
        let c: Vec<f64> = self
            .poly_in_u
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                if p.abs() <= ZERO_REL_TOL * self.envelope_in_u.coeff(i) {
                    0.0
                } else {
                    p
                }
            })
            .collect();
        Polynomial::new(c)
    }

    /// Absolute tolerance for a sign decision at `u`.
    pub fn tolerance_at(&self, u: f64) -> f64 {
        BOUNDARY_REL_TOL * self.envelope_in_u.eval(u)
    }
}

/// Outcome of the three positive-real conditions.
#[derive(Clone, Debug, PartialEq)]
pub struct PassivityVerdict {
    pub passive: bool,
    pub condition1_simple_imaginary_poles: bool,
    pub condition2_stable: bool,
    pub condition3_nonnegative_real_part: bool,
    /// Envelope `(ω_low, ω_high)` of the frequencies where the real part is
    /// negative; `ω_high` may be infinite.
    pub violation_band: Option<(f64, f64)>,
    pub realpart: RealPartPolynomial,
    /// Some decision sat within tolerance of its boundary.
    pub marginal: bool,
    pub axis_poles: Vec<AxisPole>,
    /// Routh table of the denominator with its imaginary-axis roots
    /// removed; `None` when nothing is left to test.
    pub routh: Option<RouthResult>,
}

impl Serialize for PassivityVerdict {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Conditions {
            simple_poles: bool,
            stable: bool,
            nonneg_real: bool,
        }
        let band = self
            .violation_band
            .map(|(lo, hi)| [Some(lo), hi.is_finite().then_some(hi)]);
        let mut st = s.serialize_struct("PassivityVerdict", 5)?;
        st.serialize_field("passive", &self.passive)?;
        st.serialize_field(
            "conditions",
            &Conditions {
                simple_poles: self.condition1_simple_imaginary_poles,
                stable: self.condition2_stable,
                nonneg_real: self.condition3_nonnegative_real_part,
            },
        )?;
        st.serialize_field("violation_band", &band)?;
        st.serialize_field("marginal", &self.marginal)?;
        st.serialize_field("realpart_coeffs_u", self.realpart.poly_in_u.coeffs())?;
        st.end()
    }
}

/// Decide whether `tf`, read as an impedance, is positive real.
pub fn check_positive_real(tf: &RationalTF) -> Result<PassivityVerdict, LtiError> {
    if !tf.num().is_finite() || !tf.den().is_finite() {
        return Err(LtiError::NonFinite);
    }
    let axis_poles = tf.imaginary_axis_poles();
    let cond1 = axis_poles.iter().all(|p| p.multiplicity == 1);

    let reduced = tf.den_without_axis_roots();
    let routh = match reduced.degree() {
        Some(d) if d >= 1 => Some(routh_hurwitz(&reduced)?),
        _ => None,
    };
    let cond2 = routh.as_ref().is_none_or(|r| r.stable);
    let mut marginal = routh.as_ref().is_some_and(|r| r.marginal);

    let realpart = realpart_poly(tf);
    let sign = sign_analysis(&realpart);
    marginal |= sign.marginal;
    let cond3 = sign.band.is_none();

    Ok(PassivityVerdict {
        passive: cond1 && cond2 && cond3,
        condition1_simple_imaginary_poles: cond1,
        condition2_stable: cond2,
        condition3_nonnegative_real_part: cond3,
        violation_band: sign.band,
        realpart,
        marginal,
        axis_poles,
        routh,
    })
}

/// Numeric verdict for the impedance port of `config`.
pub fn analyze_config(config: &SeaConfig) -> Result<PassivityVerdict, LtiError> {
    check_positive_real(&impedance_tf(&stiffness_tf(config)))
}

struct SignAnalysis {
    band: Option<(f64, f64)>,
    marginal: bool,
}

fn sign_analysis(rp: &RealPartPolynomial) -> SignAnalysis {
    let p = rp.cleaned();
    if p.is_zero() {
        return SignAnalysis {
            band: None,
            marginal: true,
        };
    }
    let roots = positive_real_roots(&p);

    // one probe inside every interval (0, r1), (r1, r2), ..., (r_n, ∞)
    let mut edges = Vec::with_capacity(roots.len() + 2);
    edges.push(0.0);
    edges.extend(roots.iter().copied());
    let mut probes = Vec::with_capacity(roots.len() + 1);
    for w in edges.windows(2) {
        probes.push((0.5 * (w[0] + w[1]), w[0], w[1]));
    }
    let last = *edges.last().expect("nonempty");
    let beyond = if last > 0.0 { 2.0 * last } else { 1.0 };
    probes.push((beyond, last, f64::INFINITY));

    let mut marginal = false;
    let mut band: Option<(f64, f64)> = None;
    for (u, lo, hi) in probes {
        let v = p.eval(u);
        let eps = rp.tolerance_at(u);
        if v.abs() <= eps {
            marginal = true;
        } else if v < 0.0 {
            let (wl, wh) = (lo.sqrt(), hi.sqrt());
            band = Some(match band {
                None => (wl, wh),
                Some((a, b)) => (a.min(wl), b.max(wh)),
            });
        }
    }
    SignAnalysis { band, marginal }
}

/// Result of evaluating the real part directly on a frequency grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridCheck {
    /// Smallest value of `Re(Num(jω)Den(−jω))`, divided by the term
    /// envelope at that frequency.
    pub min_normalized: f64,
    pub at_omega: f64,
}

/// Log-spaced sampling of the real part; a diagnostic, not a decision
/// procedure, since a grid can miss narrow negative bands.
pub fn grid_check(tf: &RationalTF, omega_min: f64, omega_max: f64, points: usize) -> GridCheck {
    let rp = realpart_poly(tf);
    let n = points.max(2);
    let (a, b) = (omega_min.ln(), omega_max.ln());
    let mut best = GridCheck {
        min_normalized: f64::INFINITY,
        at_omega: omega_min,
    };
    for i in 0..n {
        let w = (a + (b - a) * i as f64 / (n - 1) as f64).exp();
        let jw = num_complex::Complex64::new(0.0, w);
        let v = (tf.num().eval_complex(jw) * tf.den().eval_complex(-jw)).re;
        let env = rp.envelope_in_u.eval(w * w).max(f64::MIN_POSITIVE);
        let x = v / env;
        if x < best.min_normalized {
            best = GridCheck {
                min_normalized: x,
                at_omega: w,
            };
        }
    }
    best
}
