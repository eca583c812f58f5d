use serde::Serialize;
use thiserror::Error;

use super::analyze_config;
use crate::lti::LtiError;
use crate::model::{ModelError, ParamPath, SeaConfig};

const SCAN_POINTS: usize = 128;
const BISECT_REL_TOL: f64 = 1e-4;

/// Largest passive value of a gain inside a search range.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum MaxGain {
    Bounded(f64),
    /// Still passive at the top of the range.
    Unbounded,
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum SearchError {
    #[error("not passive at the low end of the range ({path} = {value})")]
    NotPassiveAtLow { path: ParamPath, value: f64 },
    #[error("invalid search range [{lo}, {hi}]")]
    InvalidRange { lo: f64, hi: f64 },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Lti(#[from] LtiError),
}

fn passive_at(config: &SeaConfig, path: ParamPath, value: f64) -> Result<bool, SearchError> {
    let c = config.with(path, value)?;
    Ok(analyze_config(&c)?.passive)
}

/// Scan `range` on a uniform grid, then bisect the first passive →
/// non-passive transition to relative precision 1e-4.
///
/// Monotonicity is not assumed: passive islands above the first failure
/// are not reported.
pub fn max_passive_gain(
    config: &SeaConfig,
    path: ParamPath,
    (lo, hi): (f64, f64),
) -> Result<MaxGain, SearchError> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi && lo >= 0.0) {
        return Err(SearchError::InvalidRange { lo, hi });
    }
    if !passive_at(config, path, lo)? {
        return Err(SearchError::NotPassiveAtLow { path, value: lo });
    }
    let step = (hi - lo) / (SCAN_POINTS - 1) as f64;
    let mut good = lo;
    let mut bad = None;
    for i in 1..SCAN_POINTS {
        let x = if i == SCAN_POINTS - 1 {
            hi
        } else {
            lo + step * i as f64
        };
        if passive_at(config, path, x)? {
            good = x;
        } else {
            bad = Some(x);
            break;
        }
    }
    let Some(mut bad) = bad else {
        return Ok(MaxGain::Unbounded);
    };
    while bad - good > BISECT_REL_TOL * good.abs().max(f64::MIN_POSITIVE) {
        let mid = 0.5 * (good + bad);
        if mid <= good || mid >= bad {
            break;
        }
        if passive_at(config, path, mid)? {
            good = mid;
        } else {
            bad = mid;
        }
    }
    Ok(MaxGain::Bounded(good))
}
