//! Physical model of a single-axis SEA: actuator mass and damping, the
//! transmission and grounding compliances, and actuator-/load-side linear
//! controllers, plus the rendered-stiffness and impedance transfer
//! functions they produce.

mod json;
mod preset;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lti::{Polynomial, RationalTF};

pub use json::{parse_config, serialize_config, ConfigError};
pub use preset::{classify, make_preset, PresetId, PresetParams, Slot};

/// Spring-damper pair `D(s) = k + c·s`. The zero element means "absent".
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ComplianceElement {
    /// Stiffness, N/m.
    pub k: f64,
    /// Damping, N·s/m.
    pub c: f64,
}

impl ComplianceElement {
    pub const ZERO: Self = Self { k: 0.0, c: 0.0 };

    pub fn spring(k: f64) -> Self {
        Self { k, c: 0.0 }
    }

    pub fn new(k: f64, c: f64) -> Self {
        Self { k, c }
    }

    pub fn is_zero(&self) -> bool {
        self.k == 0.0 && self.c == 0.0
    }

    pub fn poly(&self) -> Polynomial {
        Polynomial::new(vec![self.k, self.c])
    }
}

/// PID law `C(s) = kp + kv·s + ki/s`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LinearController {
    /// Proportional gain, N/m.
    pub kp: f64,
    /// Derivative gain, N·s/m.
    pub kv: f64,
    /// Integral gain, N/(m·s).
    pub ki: f64,
}

impl LinearController {
    pub const ZERO: Self = Self {
        kp: 0.0,
        kv: 0.0,
        ki: 0.0,
    };

    pub fn new(kp: f64, kv: f64, ki: f64) -> Self {
        Self { kp, kv, ki }
    }

    pub fn p(kp: f64) -> Self {
        Self::new(kp, 0.0, 0.0)
    }

    pub fn pd(kp: f64, kv: f64) -> Self {
        Self::new(kp, kv, 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.kp == 0.0 && self.kv == 0.0 && self.ki == 0.0
    }

    /// `s·C(s) = ki + kp·s + kv·s²`, always polynomial.
    pub fn times_s(&self) -> Polynomial {
        Polynomial::new(vec![self.ki, self.kp, self.kv])
    }

    /// `C(s)` without the integral term.
    pub fn proper_part(&self) -> Polynomial {
        Polynomial::new(vec![self.kp, self.kv])
    }
}

/// Full parameterization of the actuator, transmission, grounding and
/// control loops.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeaConfig {
    /// Actuator mass, kg.
    pub m: f64,
    /// Actuator viscous damping, N·s/m.
    pub b: f64,
    /// Transmission between actuator and load.
    pub d1: ComplianceElement,
    /// Load-to-ground element.
    pub d2: ComplianceElement,
    /// Actuator-side controller, acting on the actuator position error.
    pub ca: LinearController,
    /// Load-side controller, acting on the load position error.
    pub cl: LinearController,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("{preset} requires parameter `{slot}`")]
    MissingParameter { preset: PresetId, slot: String },
    #[error("{preset} does not take parameter `{slot}`")]
    ExtraParameter { preset: PresetId, slot: String },
    #[error("parameter `{slot}` must be nonnegative, got {value}")]
    NegativeParameter { slot: String, value: f64 },
    #[error("invalid value at `{path}`: {reason}")]
    Invariant { path: String, reason: String },
    #[error("unknown parameter path `{0}`")]
    UnknownPath(String),
}

impl SeaConfig {
    /// Check every invariant; the error names the first offending field.
    pub fn validate(&self) -> Result<(), ModelError> {
        for path in ParamPath::ALL {
            let v = path.get(self);
            if !v.is_finite() {
                return Err(invariant(path, "must be finite"));
            }
            if v < 0.0 {
                return Err(invariant(path, "must be nonnegative"));
            }
        }
        if self.m <= 0.0 {
            return Err(invariant(ParamPath::M, "actuator mass must be positive"));
        }
        if self.d1.is_zero() {
            return Err(ModelError::Invariant {
                path: "d1".into(),
                reason: "transmission must not be the zero element".into(),
            });
        }
        Ok(())
    }

    pub fn get(&self, path: ParamPath) -> f64 {
        path.get(self)
    }

    /// Copy with one field replaced and the result re-validated.
    pub fn with(&self, path: ParamPath, value: f64) -> Result<Self, ModelError> {
        let mut out = self.clone();
        path.set(&mut out, value);
        out.validate()?;
        Ok(out)
    }

    pub fn has_integral(&self) -> bool {
        self.ca.ki != 0.0 || self.cl.ki != 0.0
    }

    /// `α(s) = m·s² + b·s`.
    pub fn alpha(&self) -> Polynomial {
        Polynomial::new(vec![0.0, self.b, self.m])
    }
}

fn invariant(path: ParamPath, reason: &str) -> ModelError {
    ModelError::Invariant {
        path: path.to_string(),
        reason: reason.into(),
    }
}

/// Rendered stiffness `F_L/X_L` seen at the load port:
///
/// ```text
/// ((D1 + D2)(α + C_A) + D1·C_L) / (α + C_A + D1)
/// ```
///
/// When either controller has an integral gain, numerator and denominator
/// are both multiplied by `s` once so that they stay polynomial.
pub fn stiffness_tf(config: &SeaConfig) -> RationalTF {
    let d1 = config.d1.poly();
    let d12 = &d1 + &config.d2.poly();
    let (alpha, ca, cl) = if config.has_integral() {
        (
            config.alpha().shift(1),
            config.ca.times_s(),
            config.cl.times_s(),
        )
    } else {
        (
            config.alpha(),
            config.ca.proper_part(),
            config.cl.proper_part(),
        )
    };
    let d1_den = if config.has_integral() {
        d1.shift(1)
    } else {
        d1.clone()
    };
    let a_plus_ca = &alpha + &ca;
    let num = &(&d12 * &a_plus_ca) + &(&d1 * &cl);
    let den = &a_plus_ca + &d1_den;
    RationalTF::new(num, den).expect("m > 0 keeps the denominator nonzero")
}

/// Interaction impedance `Z_L = (1/s)·F_L/X_L`; no cancellation is done.
pub fn impedance_tf(stiffness: &RationalTF) -> RationalTF {
    RationalTF::new(stiffness.num().clone(), stiffness.den().shift(1))
        .expect("shifted nonzero denominator")
}

/// Address of a scalar field inside [`SeaConfig`], written as in the JSON
/// schema (`m`, `d1.k`, `ca.kp`, ...).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ParamPath {
    M,
    B,
    D1K,
    D1C,
    D2K,
    D2C,
    CaKp,
    CaKv,
    CaKi,
    ClKp,
    ClKv,
    ClKi,
}

impl ParamPath {
    pub const ALL: [ParamPath; 12] = [
        ParamPath::M,
        ParamPath::B,
        ParamPath::D1K,
        ParamPath::D1C,
        ParamPath::D2K,
        ParamPath::D2C,
        ParamPath::CaKp,
        ParamPath::CaKv,
        ParamPath::CaKi,
        ParamPath::ClKp,
        ParamPath::ClKv,
        ParamPath::ClKi,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ParamPath::M => "m",
            ParamPath::B => "b",
            ParamPath::D1K => "d1.k",
            ParamPath::D1C => "d1.c",
            ParamPath::D2K => "d2.k",
            ParamPath::D2C => "d2.c",
            ParamPath::CaKp => "ca.kp",
            ParamPath::CaKv => "ca.kv",
            ParamPath::CaKi => "ca.ki",
            ParamPath::ClKp => "cl.kp",
            ParamPath::ClKv => "cl.kv",
            ParamPath::ClKi => "cl.ki",
        }
    }

    pub fn get(self, c: &SeaConfig) -> f64 {
        match self {
            ParamPath::M => c.m,
            ParamPath::B => c.b,
            ParamPath::D1K => c.d1.k,
            ParamPath::D1C => c.d1.c,
            ParamPath::D2K => c.d2.k,
            ParamPath::D2C => c.d2.c,
            ParamPath::CaKp => c.ca.kp,
            ParamPath::CaKv => c.ca.kv,
            ParamPath::CaKi => c.ca.ki,
            ParamPath::ClKp => c.cl.kp,
            ParamPath::ClKv => c.cl.kv,
            ParamPath::ClKi => c.cl.ki,
        }
    }

    pub fn set(self, c: &mut SeaConfig, v: f64) {
        let slot = match self {
            ParamPath::M => &mut c.m,
            ParamPath::B => &mut c.b,
            ParamPath::D1K => &mut c.d1.k,
            ParamPath::D1C => &mut c.d1.c,
            ParamPath::D2K => &mut c.d2.k,
            ParamPath::D2C => &mut c.d2.c,
            ParamPath::CaKp => &mut c.ca.kp,
            ParamPath::CaKv => &mut c.ca.kv,
            ParamPath::CaKi => &mut c.ca.ki,
            ParamPath::ClKp => &mut c.cl.kp,
            ParamPath::ClKv => &mut c.cl.kv,
            ParamPath::ClKi => &mut c.cl.ki,
        };
        *slot = v;
    }
}

impl fmt::Display for ParamPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ParamPath {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ParamPath::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| ModelError::UnknownPath(s.to_string()))
    }
}

impl Serialize for ParamPath {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for ParamPath {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
