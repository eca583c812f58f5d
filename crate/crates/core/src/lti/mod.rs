//! Polynomial and rational transfer-function algebra in the Laplace
//! variable, frequency evaluation, and classical stability tests.

mod polynomial;
mod rational;
mod roots;
mod routh;

use thiserror::Error;

pub use polynomial::{Polynomial, CANONICAL_REL_TOL};
pub use rational::{AxisPole, RationalTF, AXIS_REL_TOL};
pub use roots::{complex_roots, positive_real_roots};
pub use routh::{routh_hurwitz, RouthResult};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum LtiError {
    #[error("denominator is identically zero")]
    ZeroDenominator,
    #[error("polynomial is constant or zero")]
    DegenerateInput,
    #[error("non-finite coefficient")]
    NonFinite,
    #[error("sample frequency {omega} rad/s hits a pole on the imaginary axis")]
    PoleOnAxis { omega: f64 },
}
