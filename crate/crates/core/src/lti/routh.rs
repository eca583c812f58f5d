use serde::Serialize;

use super::polynomial::Polynomial;
use super::LtiError;

/// Relative size below which a Routh pivot is treated as zero.
const PIVOT_REL_TOL: f64 = 1e-12;
/// Replacement pivot, relative to the largest first-column entry so far.
const EPSILON_REL: f64 = 1e-9;

/// Outcome of a Routh–Hurwitz test.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RouthResult {
    /// All roots strictly in the open left half-plane.
    pub stable: bool,
    /// First column of the table, highest power first. Zero pivots appear
    /// as their epsilon replacement.
    pub first_column: Vec<f64>,
    /// Sign changes in the first column (number of right-half-plane roots
    /// when the table is regular).
    pub sign_changes: usize,
    /// A zero pivot or zero row was hit and replaced by epsilon; roots sit
    /// on or near the imaginary axis.
    pub marginal: bool,
}

/// Routh–Hurwitz stability test.
///
/// A zero pivot (or an all-zero row) is replaced by a small epsilon so the
/// table can be completed for diagnostics. Any such event means at least
/// one root has a nonnegative real part, so the result is then never
/// `stable`.
pub fn routh_hurwitz(p: &Polynomial) -> Result<RouthResult, LtiError> {
    let n = match p.degree() {
        Some(n) if n >= 1 => n,
        _ => return Err(LtiError::DegenerateInput),
    };
    if !p.is_finite() {
        return Err(LtiError::NonFinite);
    }
    // normalize so the leading coefficient is positive
    let sign = p.leading().signum();
    let c: Vec<f64> = p.coeffs().iter().map(|x| x * sign).collect();

    let width = n / 2 + 1;
    let mut prev: Vec<f64> = (0..width)
        .map(|k| n.checked_sub(2 * k).map_or(0.0, |i| c[i]))
        .collect();
    let mut cur: Vec<f64> = (0..width)
        .map(|k| n.checked_sub(2 * k + 1).map_or(0.0, |i| c[i]))
        .collect();

    let mut first = vec![prev[0]];
    let mut marginal = false;
    let mut max_first = prev[0].abs();

    for row in 1..=n {
        let scale = cur
            .iter()
            .chain(prev.iter())
            .fold(0.0f64, |m, x| m.max(x.abs()));
        if cur[0].abs() <= PIVOT_REL_TOL * scale {
            marginal = true;
            let eps = EPSILON_REL * max_first.max(f64::MIN_POSITIVE);
            cur[0] = eps;
        }
        first.push(cur[0]);
        max_first = max_first.max(cur[0].abs());
        if row == n {
            break;
        }
        let next: Vec<f64> = (0..width)
            .map(|k| {
                let a = prev.get(k + 1).copied().unwrap_or(0.0);
                let b = cur.get(k + 1).copied().unwrap_or(0.0);
                (cur[0] * a - prev[0] * b) / cur[0]
            })
            .collect();
        prev = std::mem::replace(&mut cur, next);
    }

    let sign_changes = first
        .windows(2)
        .filter(|w| (w[0] > 0.0) != (w[1] > 0.0))
        .count();
    let all_positive = first.iter().all(|&x| x > 0.0);
    Ok(RouthResult {
        stable: all_positive && !marginal,
        first_column: first,
        sign_changes,
        marginal,
    })
}
