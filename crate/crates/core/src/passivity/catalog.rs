//! Per-configuration real-part polynomials and the parameter bounds that
//! make them nonnegative.

use serde::Serialize;

use crate::lti::Polynomial;
use crate::model::{classify, PresetId, PresetParams, SeaConfig};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NumericBound {
    pub parameter: String,
    pub value: f64,
    pub units: String,
}

/// Closed-form passivity condition of a cataloged configuration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClosedFormVerdict {
    pub applicable: bool,
    pub preset: Option<PresetId>,
    /// Present iff `applicable`.
    pub satisfied: Option<bool>,
    pub bound_description: String,
    pub numeric_bound: Option<NumericBound>,
}

impl ClosedFormVerdict {
    fn not_applicable() -> Self {
        Self {
            applicable: false,
            preset: None,
            satisfied: None,
            bound_description: "configuration is not in the catalog".into(),
            numeric_bound: None,
        }
    }
}

fn get(p: &PresetParams, key: &str) -> f64 {
    p.get(key).copied().unwrap_or(0.0)
}

/// `Re(Num(jω)Den(−jω))` of the impedance port of a cataloged row, as a
/// polynomial in `u = ω²`, written out term by term.
///
/// Rows with an integral gain carry one extra factor of `u` from clearing
/// `1/s` in both numerator and denominator.
pub fn catalog_realpart(id: PresetId, p: &PresetParams) -> Polynomial {
    let [m, b, k1, b1, k2, b2, kd, bd, id_] =
        ["m", "b", "k1", "b1", "k2", "b2", "kd", "bd", "id"].map(|k| get(p, k));
    let c = match id {
        PresetId::PureSpringLp => vec![0.0, b * k1 * (k1 - kd)],
        PresetId::SpringSpringLp => vec![0.0, b * k1 * (k1 + k2 - kd)],
        PresetId::ParallelSpringDamperLp => vec![
            0.0,
            b * k1 * (k1 - kd),
            b1 * (b * b + b * b1 - m * kd),
            m * m * b1,
        ],
        PresetId::DisjointedSpringDamperLp => {
            vec![0.0, b * k1 * (k1 - kd), b2 * (b * b - m * k1), m * m * b2]
        }
        PresetId::PureSpringLpd => vec![0.0, k1 * (b * k1 + bd * k1 - b * kd), -bd * k1 * m],
        PresetId::PureSpringLpi => vec![0.0, -id_ * k1 * k1, k1 * (b * k1 - b * kd + id_ * m)],
        PresetId::PureSpringAp => vec![0.0, b * k1 * k1],
        PresetId::PureSpringApd => vec![0.0, k1 * k1 * (b + bd)],
        PresetId::PureSpringApi => vec![0.0, -id_ * k1 * k1, b * k1 * k1],
        PresetId::CombinedApd => vec![
            0.0,
            b1 * kd * kd + b * k1 * k1 + bd * k1 * k1,
            b1 * ((b + bd) * (b + bd) + b * b1 + b1 * bd - 2.0 * m * kd),
            m * m * b1,
        ],
    };
    Polynomial::new(c)
}

/// Evaluate the closed-form condition of the catalog row `config`
/// structurally matches, if any.
pub fn closed_form_condition(config: &SeaConfig) -> ClosedFormVerdict {
    let Some((id, p)) = classify(config) else {
        return ClosedFormVerdict::not_applicable();
    };
    let [m, b, k1, b1, k2, _b2, kd, bd, id_] =
        ["m", "b", "k1", "b1", "k2", "b2", "kd", "bd", "id"].map(|k| get(&p, k));
    let kd_bound = |value: f64| {
        Some(NumericBound {
            parameter: "kd".into(),
            value,
            units: "N/m".into(),
        })
    };
    let (satisfied, text, bound) = match id {
        PresetId::PureSpringLp => (kd <= k1, "kd <= k1".to_string(), kd_bound(k1)),
        PresetId::SpringSpringLp => (kd <= k1 + k2, "kd <= k1 + k2".into(), kd_bound(k1 + k2)),
        PresetId::ParallelSpringDamperLp => {
            let limit = k1.min((b * b + b * b1) / m);
            (
                kd <= limit,
                "kd <= k1 and kd <= (b^2 + b*b1)/m".into(),
                kd_bound(limit),
            )
        }
        PresetId::DisjointedSpringDamperLp => (
            kd <= k1 && m * k1 <= b * b,
            "kd <= k1 and k1 <= b^2/m".into(),
            kd_bound(k1),
        ),
        PresetId::PureSpringLpd => (
            bd == 0.0 && kd <= k1,
            "requires -bd*k1*m >= 0: no passive gains with bd > 0".into(),
            None,
        ),
        PresetId::PureSpringLpi => (
            id_ == 0.0 && kd <= k1,
            "requires -id*k1^2 >= 0: no passive gains with id > 0".into(),
            None,
        ),
        PresetId::PureSpringAp => (true, "passive for every kd >= 0".into(), None),
        PresetId::PureSpringApd => (true, "passive for every kd, bd >= 0".into(), None),
        PresetId::PureSpringApi => (
            id_ == 0.0,
            "requires -id*k1^2 >= 0: no passive gains with id > 0".into(),
            None,
        ),
        PresetId::CombinedApd => {
            let limit = ((b + bd) * (b + bd) + b * b1 + b1 * bd) / (2.0 * m);
            (
                kd <= limit,
                "kd <= ((b + bd)^2 + b*b1 + b1*bd) / (2m)".into(),
                kd_bound(limit),
            )
        }
    };
    ClosedFormVerdict {
        applicable: true,
        preset: Some(id),
        satisfied: Some(satisfied),
        bound_description: text,
        numeric_bound: bound,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{make_preset, ComplianceElement, LinearController};
    use crate::passivity::{analyze_config, realpart_poly};
    use crate::{impedance_tf, stiffness_tf};

    fn params(kv: &[(&str, f64)]) -> PresetParams {
        kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn boundary_gain_satisfies_row_one() {
        let c = make_preset(
            PresetId::PureSpringLp,
            &params(&[("m", 1.0), ("b", 10.0), ("k1", 1000.0), ("kd", 1000.0)]),
        )
        .unwrap();
        let v = closed_form_condition(&c);
        assert!(v.applicable);
        assert_eq!(v.satisfied, Some(true));
        assert_eq!(v.numeric_bound.unwrap().value, 1000.0);
    }

    #[test]
    fn combined_bound_value() {
        let c = make_preset(
            PresetId::CombinedApd,
            &params(&[
                ("m", 1.0),
                ("b", 10.0),
                ("k1", 1000.0),
                ("b1", 50.0),
                ("kd", 1000.0),
                ("bd", 25.0),
            ]),
        )
        .unwrap();
        let v = closed_form_condition(&c);
        assert_eq!(v.preset, Some(PresetId::CombinedApd));
        assert_eq!(v.numeric_bound.unwrap().value, 1487.5);
        assert_eq!(v.satisfied, Some(true));
    }

    #[test]
    fn uncataloged_is_not_applicable() {
        let c = SeaConfig {
            m: 1.0,
            b: 10.0,
            d1: ComplianceElement::spring(1000.0),
            d2: ComplianceElement::new(200.0, 3.0),
            ca: LinearController::new(100.0, 0.0, 5.0),
            cl: LinearController::ZERO,
            label: None,
        };
        let v = closed_form_condition(&c);
        assert!(!v.applicable);
        assert_eq!(v.satisfied, None);
    }

    #[test]
    fn catalog_matches_construction_for_every_row() {
        let values = [1.3, 9.0, 800.0, 40.0, 150.0, 20.0, 450.0, 12.0, 30.0];
        for id in PresetId::ALL {
            let p: PresetParams = id
                .slots()
                .map(|s| {
                    let i = crate::model::Slot::ALL
                        .iter()
                        .position(|x| *x == s)
                        .unwrap();
                    (s.as_str().to_string(), values[i])
                })
                .collect();
            let c = make_preset(id, &p).unwrap();
            let got = realpart_poly(&impedance_tf(&stiffness_tf(&c))).poly_in_u;
            let want = catalog_realpart(id, &p);
            assert_eq!(got.degree(), want.degree(), "{id}");
            for i in 0..got.coeffs().len() {
                let scale = want.max_abs_coeff();
                assert!(
                    (got.coeff(i) - want.coeff(i)).abs() <= 1e-12 * scale,
                    "{id} u^{i}"
                );
            }
            // closed form, when satisfied, is backed by the numeric test
            if closed_form_condition(&c).satisfied == Some(true) {
                assert!(analyze_config(&c).unwrap().passive, "{id}");
            }
        }
    }
}
