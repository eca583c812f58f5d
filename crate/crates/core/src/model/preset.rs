use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{ComplianceElement, LinearController, ModelError, ParamPath, SeaConfig};

/// Named parameter of a preset row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    M,
    B,
    K1,
    B1,
    K2,
    B2,
    Kd,
    Bd,
    Id,
}

impl Slot {
    pub const ALL: [Slot; 9] = [
        Slot::M,
        Slot::B,
        Slot::K1,
        Slot::B1,
        Slot::K2,
        Slot::B2,
        Slot::Kd,
        Slot::Bd,
        Slot::Id,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Slot::M => "m",
            Slot::B => "b",
            Slot::K1 => "k1",
            Slot::B1 => "b1",
            Slot::K2 => "k2",
            Slot::B2 => "b2",
            Slot::Kd => "kd",
            Slot::Bd => "bd",
            Slot::Id => "id",
        }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Slot {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Slot::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| s.to_string())
    }
}

/// Parameter values keyed by slot name.
pub type PresetParams = BTreeMap<String, f64>;

/// The cataloged transmission/controller structures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PresetId {
    #[serde(rename = "PureSpring-LP")]
    PureSpringLp,
    #[serde(rename = "SpringSpring-LP")]
    SpringSpringLp,
    #[serde(rename = "ParallelSpringDamper-LP")]
    ParallelSpringDamperLp,
    #[serde(rename = "DisjointedSpringDamper-LP")]
    DisjointedSpringDamperLp,
    #[serde(rename = "PureSpring-LPD")]
    PureSpringLpd,
    #[serde(rename = "PureSpring-LPI")]
    PureSpringLpi,
    #[serde(rename = "PureSpring-AP")]
    PureSpringAp,
    #[serde(rename = "PureSpring-APD")]
    PureSpringApd,
    #[serde(rename = "PureSpring-API")]
    PureSpringApi,
    #[serde(rename = "Combined-APD")]
    CombinedApd,
}

impl PresetId {
    /// Catalog order; [`classify`] returns the first structural match.
    pub const ALL: [PresetId; 10] = [
        PresetId::PureSpringLp,
        PresetId::SpringSpringLp,
        PresetId::ParallelSpringDamperLp,
        PresetId::DisjointedSpringDamperLp,
        PresetId::PureSpringLpd,
        PresetId::PureSpringLpi,
        PresetId::PureSpringAp,
        PresetId::PureSpringApd,
        PresetId::PureSpringApi,
        PresetId::CombinedApd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PresetId::PureSpringLp => "PureSpring-LP",
            PresetId::SpringSpringLp => "SpringSpring-LP",
            PresetId::ParallelSpringDamperLp => "ParallelSpringDamper-LP",
            PresetId::DisjointedSpringDamperLp => "DisjointedSpringDamper-LP",
            PresetId::PureSpringLpd => "PureSpring-LPD",
            PresetId::PureSpringLpi => "PureSpring-LPI",
            PresetId::PureSpringAp => "PureSpring-AP",
            PresetId::PureSpringApd => "PureSpring-APD",
            PresetId::PureSpringApi => "PureSpring-API",
            PresetId::CombinedApd => "Combined-APD",
        }
    }

    /// Each slot of the row and the config field it drives.
    pub fn mapping(self) -> &'static [(Slot, ParamPath)] {
        use ParamPath as P;
        use Slot as S;
        match self {
            PresetId::PureSpringLp => &[
                (S::M, P::M),
                (S::B, P::B),
                (S::K1, P::D1K),
                (S::Kd, P::ClKp),
            ],
            PresetId::SpringSpringLp => &[
                (S::M, P::M),
                (S::B, P::B),
                (S::K1, P::D1K),
                (S::K2, P::D2K),
                (S::Kd, P::ClKp),
            ],
            PresetId::ParallelSpringDamperLp => &[
                (S::M, P::M),
                (S::B, P::B),
                (S::K1, P::D1K),
                (S::B1, P::D1C),
                (S::Kd, P::ClKp),
            ],
            PresetId::DisjointedSpringDamperLp => &[
                (S::M, P::M),
                (S::B, P::B),
                (S::K1, P::D1K),
                (S::B2, P::D2C),
                (S::Kd, P::ClKp),
            ],
            PresetId::PureSpringLpd => &[
                (S::M, P::M),
                (S::B, P::B),
                (S::K1, P::D1K),
                (S::Kd, P::ClKp),
                (S::Bd, P::ClKv),
            ],
            PresetId::PureSpringLpi => &[
                (S::M, P::M),
                (S::B, P::B),
                (S::K1, P::D1K),
                (S::Kd, P::ClKp),
                (S::Id, P::ClKi),
            ],
            PresetId::PureSpringAp => &[
                (S::M, P::M),
                (S::B, P::B),
                (S::K1, P::D1K),
                (S::Kd, P::CaKp),
            ],
            PresetId::PureSpringApd => &[
                (S::M, P::M),
                (S::B, P::B),
                (S::K1, P::D1K),
                (S::Kd, P::CaKp),
                (S::Bd, P::CaKv),
            ],
            PresetId::PureSpringApi => &[
                (S::M, P::M),
                (S::B, P::B),
                (S::K1, P::D1K),
                (S::Kd, P::CaKp),
                (S::Id, P::CaKi),
            ],
            PresetId::CombinedApd => &[
                (S::M, P::M),
                (S::B, P::B),
                (S::K1, P::D1K),
                (S::B1, P::D1C),
                (S::Kd, P::CaKp),
                (S::Bd, P::CaKv),
            ],
        }
    }

    pub fn slots(self) -> impl Iterator<Item = Slot> {
        self.mapping().iter().map(|(s, _)| *s)
    }

    pub fn path_of(self, slot: Slot) -> Option<ParamPath> {
        self.mapping()
            .iter()
            .find(|(s, _)| *s == slot)
            .map(|(_, p)| *p)
    }
}

impl fmt::Display for PresetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PresetId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PresetId::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown preset `{s}`"))
    }
}

/// Build a validated config for a cataloged row from exactly its slots.
pub fn make_preset(id: PresetId, params: &PresetParams) -> Result<SeaConfig, ModelError> {
    for key in params.keys() {
        let known = key.parse::<Slot>().ok().and_then(|s| id.path_of(s));
        if known.is_none() {
            return Err(ModelError::ExtraParameter {
                preset: id,
                slot: key.clone(),
            });
        }
    }
    let mut config = SeaConfig {
        m: 0.0,
        b: 0.0,
        d1: ComplianceElement::ZERO,
        d2: ComplianceElement::ZERO,
        ca: LinearController::ZERO,
        cl: LinearController::ZERO,
        label: Some(id.name().to_string()),
    };
    for &(slot, path) in id.mapping() {
        let value = *params
            .get(slot.as_str())
            .ok_or_else(|| ModelError::MissingParameter {
                preset: id,
                slot: slot.as_str().into(),
            })?;
        if value < 0.0 {
            return Err(ModelError::NegativeParameter {
                slot: slot.as_str().into(),
                value,
            });
        }
        path.set(&mut config, value);
    }
    config.validate()?;
    Ok(config)
}

/// First catalog row whose slots cover every nonzero field of `config`,
/// with the slot values read back.
pub fn classify(config: &SeaConfig) -> Option<(PresetId, PresetParams)> {
    PresetId::ALL.into_iter().find_map(|id| {
        let covered = ParamPath::ALL
            .into_iter()
            .filter(|p| p.get(config) != 0.0)
            .all(|p| id.mapping().iter().any(|(_, q)| *q == p));
        covered.then(|| {
            let params = id
                .mapping()
                .iter()
                .map(|(s, p)| (s.as_str().to_string(), p.get(config)))
                .collect();
            (id, params)
        })
    })
}
