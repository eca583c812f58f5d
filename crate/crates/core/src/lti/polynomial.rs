use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Relative threshold below which a coefficient counts as zero when
/// canonicalizing.
pub const CANONICAL_REL_TOL: f64 = 1e-12;

/// Dense real polynomial in the Laplace variable, ascending degree.
///
/// Always stored in canonical form: the highest-degree coefficient is
/// nonzero, and the zero polynomial has no coefficients at all.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<f64>", into = "Vec<f64>")]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: impl Into<Vec<f64>>) -> Self {
        let mut coeffs = coeffs.into();
        canonicalize(&mut coeffs);
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// `c * s^degree`
    pub fn monomial(c: f64, degree: usize) -> Self {
        let mut coeffs = vec![0.0; degree + 1];
        coeffs[degree] = c;
        Self::new(coeffs)
    }

    /// The identity polynomial `s`.
    pub fn s() -> Self {
        Self::monomial(1.0, 1)
    }

    /// Coefficients in ascending degree. Empty for the zero polynomial.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of `s^i`, zero beyond the degree.
    pub fn coeff(&self, i: usize) -> f64 {
        self.coeffs.get(i).copied().unwrap_or(0.0)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Horner evaluation at a complex point.
    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Polynomial whose coefficients are the absolute values of these.
    /// Evaluated at `|z|` it bounds `|p(z)|`, which makes it a natural
    /// magnitude scale for rounding tolerances.
    pub fn abs_coeffs(&self) -> Polynomial {
        Polynomial {
            coeffs: self.coeffs.iter().map(|c| c.abs()).collect(),
        }
    }

    /// `q(s) = p(-s)`: odd-degree coefficients negated.
    pub fn conjugate_flip(&self) -> Polynomial {
        Polynomial {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| if i % 2 == 1 { -c } else { c })
                .collect(),
        }
    }

    pub fn derivative(&self) -> Polynomial {
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * i as f64)
                .collect::<Vec<_>>(),
        )
    }

    pub fn scale(&self, k: f64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| c * k).collect::<Vec<_>>())
    }

    /// Multiply by `s^k`.
    pub fn shift(&self, k: usize) -> Polynomial {
        if self.is_zero() {
            return Polynomial::zero();
        }
        let mut coeffs = vec![0.0; k];
        coeffs.extend_from_slice(&self.coeffs);
        Polynomial { coeffs }
    }

    /// Number of low-order coefficients that are zero relative to the
    /// largest coefficient: the multiplicity of the root at `s = 0`.
    pub fn origin_multiplicity(&self) -> usize {
        let tol = CANONICAL_REL_TOL * self.max_abs_coeff();
        self.coeffs.iter().take_while(|c| c.abs() <= tol).count()
    }

    /// Divide out `s^k` (dropping the `k` lowest coefficients).
    pub fn unshift(&self, k: usize) -> Polynomial {
        Polynomial::new(self.coeffs.iter().skip(k).copied().collect::<Vec<_>>())
    }

    /// Euclidean division, `self = q * divisor + r` with `deg r < deg divisor`.
    ///
    /// Panics if `divisor` is the zero polynomial.
    pub fn div_rem(&self, divisor: &Polynomial) -> (Polynomial, Polynomial) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let Some(nd) = self.degree() else {
            return (Polynomial::zero(), Polynomial::zero());
        };
        if nd < dd {
            return (Polynomial::zero(), self.clone());
        }
        let lead = divisor.leading();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0.0; nd - dd + 1];
        for k in (0..=nd - dd).rev() {
            let q = rem[k + dd] / lead;
            quot[k] = q;
            for (j, &dc) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= q * dc;
            }
            rem[k + dd] = 0.0;
        }
        rem.truncate(dd);
        (Polynomial::new(quot), Polynomial::new(rem))
    }

    /// Rebuild a monic real polynomial from roots that come in conjugate
    /// pairs, then scale by `lead`. Imaginary round-off is discarded.
    pub fn from_roots(roots: &[Complex64], lead: f64) -> Polynomial {
        let mut acc = vec![Complex64::new(1.0, 0.0)];
        for &r in roots {
            let mut next = vec![Complex64::new(0.0, 0.0); acc.len() + 1];
            for (i, &a) in acc.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= a * r;
            }
            acc = next;
        }
        Polynomial::new(acc.iter().map(|c| c.re * lead).collect::<Vec<_>>())
    }
}

fn canonicalize(coeffs: &mut Vec<f64>) {
    let max = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let tol = CANONICAL_REL_TOL * max;
    while let Some(&last) = coeffs.last() {
        if last.abs() <= tol {
            coeffs.pop();
        } else {
            break;
        }
    }
}

impl From<Vec<f64>> for Polynomial {
    fn from(coeffs: Vec<f64>) -> Self {
        Polynomial::new(coeffs)
    }
}

impl From<Polynomial> for Vec<f64> {
    fn from(p: Polynomial) -> Self {
        p.coeffs
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new(
            (0..n)
                .map(|i| self.coeff(i) + rhs.coeff(i))
                .collect::<Vec<_>>(),
        )
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new(
            (0..n)
                .map(|i| self.coeff(i) - rhs.coeff(i))
                .collect::<Vec<_>>(),
        )
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        Polynomial {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: &Polynomial) -> Polynomial {
                (&self).$m(rhs)
            }
        }
        impl $tr<Polynomial> for &Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        -&self
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0.0 {
                continue;
            }
            let mag = c.abs();
            if first {
                if c < 0.0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c < 0.0 { '-' } else { '+' })?;
            }
            first = false;
            match i {
                0 => write!(f, "{mag}")?,
                _ if mag == 1.0 => {}
                _ => write!(f, "{mag}")?,
            }
            match i {
                0 => {}
                1 => write!(f, "s")?,
                _ => write!(f, "s^{i}")?,
            }
        }
        Ok(())
    }
}
