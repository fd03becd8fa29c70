//! Orbits and depth-bounded membership in the levels `A_R^L(f)`.
//!
//! A point belongs to the depth-N approximation of level `L` when
//! `|f^n(z)| >= M^{n+L}(R)` for every `0 <= n <= N` with `n + L >= 0`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, EvalError, Result};
use crate::function::EntireFunction;
use crate::growth::ladder::{log_space, spot_check_limit, ThresholdLadder};
use crate::growth::modulus::{exact_max_modulus, max_modulus, max_modulus_magnitude};
use crate::growth::scan::COMPARE_REL;
use crate::magnitude::Magnitude;

pub const DEFAULT_L_RANGE: (i32, i32) = (-8, 8);

#[derive(Clone, Debug, Serialize)]
pub struct OrbitRecord {
    pub start: Complex64,
    /// `f^n(z)` while representable.
    pub values: Vec<Complex64>,
    /// `|f^n(z)|`; shorter than `N + 1` only when truncated.
    pub moduli: Vec<Magnitude>,
    /// `false` where the modulus is the assumed `M(previous)` rather than a
    /// computed value.
    pub exact: Vec<bool>,
    pub overflow_step: Option<usize>,
    pub truncated_at: Option<usize>,
}

fn on_positive_axis(z: Complex64) -> bool {
    z.re > 0.0 && z.im.abs() <= 1e-12 * z.re
}

fn raw_orbit(f: &EntireFunction, z: Complex64, steps: usize) -> OrbitRecord {
    let mut values = vec![z];
    let mut moduli = vec![Magnitude::from_f64(z.norm()).unwrap_or(Magnitude::ZERO)];
    let mut exact = vec![true];
    let mut overflow_step = None;
    let mut truncated_at = None;
    // after an overflow: whether the escaping value is known to lie on the
    // positive axis, where |f| = M for positive coefficients
    let mut real_escape = false;
    for n in 1..=steps {
        if overflow_step.is_none() {
            let cur = values[n - 1];
            match f.evaluate(cur) {
                Ok(v) => match Magnitude::from_f64(v.norm()) {
                    Ok(m) => {
                        values.push(v);
                        moduli.push(m);
                        exact.push(true);
                    }
                    Err(_) => {
                        truncated_at = Some(n);
                        break;
                    }
                },
                Err(EvalError::Overflow { ln_abs: Some(l) }) => match Magnitude::from_ln(l) {
                    Ok(m) => {
                        overflow_step = Some(n);
                        real_escape = f.has_positive_coefficients() && on_positive_axis(cur);
                        moduli.push(m);
                        exact.push(true);
                    }
                    Err(_) => {
                        truncated_at = Some(n);
                        break;
                    }
                },
                Err(_) => {
                    truncated_at = Some(n);
                    break;
                }
            }
        } else {
            let prev = moduli[n - 1];
            match exact_max_modulus(f, prev) {
                Some(m) => {
                    let was_exact = exact[n - 1];
                    moduli.push(m);
                    exact.push(real_escape && was_exact);
                }
                None => {
                    truncated_at = Some(n);
                    break;
                }
            }
        }
    }
    OrbitRecord {
        start: z,
        values,
        moduli,
        exact,
        overflow_step,
        truncated_at,
    }
}

/// `f^n(z)` for `n = 0..=N`. Moduli continue past overflow through the
/// maximum-modulus rule when one exists; otherwise the record is truncated.
pub fn compute_orbit(f: &EntireFunction, z: Complex64, depth: usize) -> OrbitRecord {
    let (base, m) = f.iterate_parts();
    if m == 1 {
        return raw_orbit(f, z, depth);
    }
    let m = m as usize;
    let raw = raw_orbit(base, z, depth * m);
    let pick = |n: usize| n * m;
    let count = raw.moduli.len().div_ceil(m).min(depth + 1);
    let stride_step = |s: Option<usize>| s.map(|s| s.div_ceil(m));
    OrbitRecord {
        start: z,
        values: (0..=depth)
            .map(pick)
            .take_while(|&i| i < raw.values.len())
            .map(|i| raw.values[i])
            .collect(),
        moduli: (0..count).map(|n| raw.moduli[pick(n)]).collect(),
        exact: (0..count).map(|n| raw.exact[pick(n)]).collect(),
        overflow_step: stride_step(raw.overflow_step),
        truncated_at: stride_step(raw.truncated_at),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Membership {
    pub member: bool,
    /// Some condition was counted as satisfied without being decidable.
    pub indeterminate: bool,
}

/// Compares `value >= threshold` where either side may be assumed.
fn compare(value: Option<(Magnitude, bool)>, threshold: Option<Magnitude>) -> Option<bool> {
    let (v, exact) = value?;
    let t = threshold?;
    if !exact && t.tower_depth() >= 1 {
        return None;
    }
    Some(v.ge_within(&t, COMPARE_REL))
}

/// Depth-`N` membership at level `L` from a precomputed orbit.
pub fn membership_from_orbit(
    orbit: &OrbitRecord,
    ladder: &ThresholdLadder,
    level: i32,
    depth: usize,
) -> Result<Membership> {
    let mut indeterminate = false;
    for n in 0..=depth {
        let k = n as i64 + level as i64;
        if k < 0 {
            continue;
        }
        let k = k as usize;
        let rung = ladder.rung(k);
        if rung.is_none() && !ladder.is_truncated() {
            return Err(Error::LadderTooShort {
                needed: k,
                available: ladder.len(),
            });
        }
        let value = orbit.moduli.get(n).map(|&m| (m, orbit.exact[n]));
        match compare(value, rung) {
            Some(true) => {}
            Some(false) => {
                return Ok(Membership {
                    member: false,
                    indeterminate: false,
                })
            }
            None => indeterminate = true,
        }
    }
    Ok(Membership {
        member: true,
        indeterminate,
    })
}

pub fn level_membership(
    f: &EntireFunction,
    ladder: &ThresholdLadder,
    level: i32,
    z: Complex64,
    depth: usize,
) -> Result<Membership> {
    if depth < 1 {
        return Err(Error::InvalidParameter("depth must be at least 1".into()));
    }
    let orbit = compute_orbit(f, z, depth);
    membership_from_orbit(&orbit, ladder, level, depth)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LevelVerdict {
    /// Largest level in range with membership, `None` when even the lowest
    /// fails.
    pub level: Option<i32>,
    pub depth: usize,
    pub indeterminate: bool,
    pub ladder_r: f64,
}

/// Checks that the ladder reaches rung `depth + l_max` or stops honestly.
pub fn check_coverage(ladder: &ThresholdLadder, depth: usize, l_max: i32) -> Result<()> {
    let need = depth as i64 + l_max as i64;
    if need >= 0 && !ladder.covers(need as usize) {
        return Err(Error::LadderTooShort {
            needed: need as usize,
            available: ladder.len(),
        });
    }
    Ok(())
}

/// Largest level from an orbit; scans from the top so the level above the
/// answer is known to fail.
pub fn level_from_orbit(
    orbit: &OrbitRecord,
    ladder: &ThresholdLadder,
    depth: usize,
    l_range: (i32, i32),
) -> Result<LevelVerdict> {
    let (lo, hi) = l_range;
    for l in (lo..=hi).rev() {
        let m = membership_from_orbit(orbit, ladder, l, depth)?;
        if m.member {
            return Ok(LevelVerdict {
                level: Some(l),
                depth,
                indeterminate: m.indeterminate,
                ladder_r: ladder.r,
            });
        }
    }
    Ok(LevelVerdict {
        level: None,
        depth,
        indeterminate: false,
        ladder_r: ladder.r,
    })
}

pub fn max_level(
    f: &EntireFunction,
    ladder: &ThresholdLadder,
    z: Complex64,
    depth: usize,
    l_range: (i32, i32),
) -> Result<LevelVerdict> {
    if l_range.0 > l_range.1 {
        return Err(Error::InvalidParameter("empty level range".into()));
    }
    if depth < 1 {
        return Err(Error::InvalidParameter("depth must be at least 1".into()));
    }
    check_coverage(ladder, depth, l_range.1)?;
    let orbit = compute_orbit(f, z, depth);
    level_from_orbit(&orbit, ladder, depth, l_range)
}

/// `max_level` over many points, in input order.
pub fn classify_points(
    f: &EntireFunction,
    ladder: &ThresholdLadder,
    points: &[Complex64],
    depth: usize,
    l_range: (i32, i32),
) -> Result<Vec<LevelVerdict>> {
    check_coverage(ladder, depth, l_range.1)?;
    points
        .par_iter()
        .map(|&z| max_level(f, ladder, z, depth, l_range))
        .collect()
}

/// The ladder of `mu(r) = eps M(r)` from `R`, `None` past representable range.
pub fn mu_ladder(f: &EntireFunction, eps: f64, r: f64, len: usize, samples: usize) -> Result<Vec<Magnitude>> {
    let mut out = vec![Magnitude::from_f64(r)?];
    while out.len() < len {
        let prev = *out.last().expect("nonempty");
        let Ok(m) = max_modulus_magnitude(f, prev, samples) else {
            break;
        };
        let Some(next) = m.value.scale(eps) else { break };
        out.push(next);
    }
    Ok(out)
}

/// Whether `|f^{n+L}(z)| >= mu^n(R)` for `0 <= n <= N - L`, with
/// `mu(r) = eps M(r)`.
pub fn mu_criterion(
    f: &EntireFunction,
    z: Complex64,
    eps: f64,
    r: f64,
    level: i32,
    depth: usize,
    samples: usize,
) -> Result<bool> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("eps = {eps} must lie in (0, 1)")));
    }
    for x in log_space(r, spot_check_limit(r), 64) {
        let mu = max_modulus(f, x, samples)?
            .value
            .scale(eps)
            .ok_or(Error::UnrepresentableMagnitude)?;
        if mu <= Magnitude::from_f64(x)? {
            return Err(Error::InvalidMuR { radius: x });
        }
    }
    let last = depth as i64 - level as i64;
    if last < 0 {
        return Ok(true);
    }
    let mus = mu_ladder(f, eps, r, last as usize + 1, samples)?;
    let orbit = compute_orbit(f, z, depth);
    for n in 0..=last as usize {
        let k = n as i64 + level as i64;
        if k < 0 {
            continue;
        }
        let k = k as usize;
        let value = orbit.moduli.get(k).map(|&m| (m, orbit.exact[k]));
        if compare(value, mus.get(n).copied()) == Some(false) {
            return Ok(false);
        }
    }
    Ok(true)
}
