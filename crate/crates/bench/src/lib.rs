//! Benchmark fixtures shared by the criterion harnesses: the canonical
//! configurations used throughout the comparisons.

use sea_core::model::{make_preset, PresetParams};
use sea_core::{PresetId, SeaConfig};

fn preset(id: PresetId, kv: &[(&str, f64)]) -> SeaConfig {
    let p: PresetParams = kv.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    make_preset(id, &p).expect("fixture parameters are valid")
}

/// Pure spring under load-side P, inside its passive range.
pub fn pure_spring_lp() -> SeaConfig {
    preset(
        PresetId::PureSpringLp,
        &[("m", 1.0), ("b", 10.0), ("k1", 1000.0), ("kd", 500.0)],
    )
}

/// Damped transmission under actuator-side PD.
pub fn combined_apd() -> SeaConfig {
    preset(
        PresetId::CombinedApd,
        &[
            ("m", 1.0),
            ("b", 10.0),
            ("k1", 1000.0),
            ("b1", 50.0),
            ("kd", 1000.0),
            ("bd", 25.0),
        ],
    )
}

/// Pure spring under actuator-side PI; exercises the integral path (and is
/// not passive for any positive integral gain).
pub fn pure_spring_api() -> SeaConfig {
    preset(
        PresetId::PureSpringApi,
        &[
            ("m", 1.0),
            ("b", 10.0),
            ("k1", 1000.0),
            ("kd", 500.0),
            ("id", 100.0),
        ],
    )
}

pub fn all() -> [(&'static str, SeaConfig); 3] {
    [
        ("pure_spring_lp", pure_spring_lp()),
        ("combined_apd", combined_apd()),
        ("pure_spring_api", pure_spring_api()),
    ]
}
