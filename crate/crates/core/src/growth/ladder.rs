//! The threshold ladder `M^n(R)` and the choice of `R`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::function::EntireFunction;
use crate::growth::modulus::{max_modulus, max_modulus_magnitude};
use crate::magnitude::Magnitude;

/// Default circle samples for sampled maximum modulus.
pub const DEFAULT_SAMPLES: usize = 256;
/// Ratio of the geometric grid used by [`find_min_R`].
pub const R_GRID_RATIO: f64 = 1.05;

#[derive(Clone, Debug, Serialize)]
pub struct ThresholdLadder {
    #[serde(rename = "R")]
    pub r: f64,
    pub rungs: Vec<Magnitude>,
    pub function: String,
    pub samples_used: usize,
    /// Rung index that could not be computed, if any.
    pub truncated_at: Option<usize>,
    /// Some rung came from circle sampling rather than an exact rule.
    pub sampled: bool,
}

impl ThresholdLadder {
    pub fn len(&self) -> usize {
        self.rungs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rungs.is_empty()
    }

    pub fn rung(&self, n: usize) -> Option<Magnitude> {
        self.rungs.get(n).copied()
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated_at.is_some()
    }

    /// Whether rungs `0..=n` are present or the ladder honestly stops earlier.
    pub fn covers(&self, n: usize) -> bool {
        n < self.rungs.len() || self.is_truncated()
    }
}

/// Log-spaced points in `[a, b]`.
pub fn log_space(a: f64, b: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![a];
    }
    let (la, lb) = (a.ln(), b.ln());
    (0..count)
        .map(|i| {
            if i == count - 1 {
                b
            } else {
                (la + (lb - la) * i as f64 / (count - 1) as f64).exp()
            }
        })
        .collect()
}

/// Upper end of the range on which `M(r) > r` is spot-checked.
pub fn spot_check_limit(r: f64) -> f64 {
    (r * 1e3).max(1e6)
}

/// Checks `M(r) > r` at 64 log-spaced radii in `[R, R_big]`.
pub fn check_r_valid(f: &EntireFunction, r: f64, samples: usize) -> Result<()> {
    for x in log_space(r, spot_check_limit(r), 64) {
        let m = max_modulus(f, x, samples)?;
        if m.value <= Magnitude::from_f64(x)? {
            return Err(Error::InvalidR { radius: x });
        }
    }
    Ok(())
}

/// `M^n(R)` for `n = 0..=depth`.
pub fn build_ladder(f: &EntireFunction, r: f64, depth: usize, samples: usize) -> Result<ThresholdLadder> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidRadius(r));
    }
    check_r_valid(f, r, samples)?;
    let mut rungs = vec![Magnitude::from_f64(r)?];
    let mut truncated_at = None;
    let mut sampled = false;
    for n in 1..=depth {
        let prev = rungs[n - 1];
        match max_modulus_magnitude(f, prev, samples) {
            Ok(m) if m.value > prev => {
                sampled |= m.sampled;
                rungs.push(m.value);
            }
            Ok(_) => {
                // only reachable past float precision; the ladder stops honestly
                truncated_at = Some(n);
                break;
            }
            Err(Error::UnrepresentableRadius) => {
                truncated_at = Some(n);
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(ThresholdLadder {
        r,
        rungs,
        function: f.name().to_string(),
        samples_used: samples,
        truncated_at,
        sampled,
    })
}

/// Smallest point `R*` of the grid `1.05^i` in `[1, search_max]` such that
/// `M(r) > r` at every grid point from `R*` on.
#[allow(non_snake_case)]
pub fn find_min_R(f: &EntireFunction, search_max: f64, samples: usize) -> Result<f64> {
    if !(search_max > 1.0) || !search_max.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "search_max = {search_max} must exceed 1"
        )));
    }
    let count = (search_max.ln() / R_GRID_RATIO.ln()).floor() as i32;
    let grid: Vec<f64> = (0..=count).map(|i| R_GRID_RATIO.powi(i)).collect();
    let mut best = None;
    for &x in grid.iter().rev() {
        let m = max_modulus(f, x, samples)?;
        if m.value > Magnitude::from_f64(x)? {
            best = Some(x);
        } else {
            break;
        }
    }
    best.ok_or(Error::NoValidR(search_max))
}
