//! Growth inequalities checked on log-spaced radii, and regular sequences.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::function::EntireFunction;
use crate::growth::ladder::{build_ladder, log_space};
use crate::growth::modulus::{max_modulus, max_modulus_magnitude, min_modulus};
use crate::growth::order::Verdict;
use crate::magnitude::Magnitude;

/// Relative slack in magnitude comparisons, covering rounding at equality.
pub const COMPARE_REL: f64 = 1e-12;
/// Finite-difference step in `x = log r` for the (AHr) test.
pub const AHR_STEP: f64 = 1e-3;
/// Radii tried per `r` in the minimum-modulus condition.
pub const MIN_CONDITION_TRIES: usize = 64;
/// Grid ratio of the regular-sequence search.
pub const REGULAR_GRID_RATIO: f64 = 1.02;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "test", rename_all = "snake_case")]
pub enum GrowthTest {
    /// `log M(r^c) >= c log M(r)`
    Convexity { c: f64 },
    /// `phi'(x)/phi(x) >= (1+c)/x` with `phi(x) = log M(e^x)`
    Ahr { c: f64 },
    /// `log log M(r) < log r / log^m r` with `log^m` the m-fold logarithm
    SmallGrowth { m: u32 },
    /// some `rho` in `(r, r^m)` has `m(rho) >= M(r)`
    MinCondition { m: f64 },
}

/// A radius with the two sides of the tested inequality.
#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub r: f64,
    pub lhs: String,
    pub rhs: String,
    /// For the minimum-modulus condition, the best radius found.
    pub rho: Option<f64>,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanResult {
    pub test: GrowthTest,
    pub verdict: Verdict,
    pub points: usize,
    pub violations: usize,
    /// Every violating radius; for the minimum-modulus condition also the
    /// best triple at satisfied radii.
    pub witnesses: Vec<Witness>,
}

fn ln_max(f: &EntireFunction, r: f64, samples: usize) -> Result<Magnitude> {
    Ok(max_modulus(f, r, samples)?.value)
}

fn iterated_log(x: f64, m: u32) -> f64 {
    let mut v = x;
    for _ in 0..m {
        if v <= 0.0 {
            return f64::NAN;
        }
        v = v.ln();
    }
    v
}

/// `phi(x) = ln M(e^x)` as a float.
fn phi(f: &EntireFunction, x: f64, samples: usize) -> Result<f64> {
    let r = Magnitude::from_ln(x)?;
    let m = max_modulus_magnitude(f, r, samples)?.value;
    m.ln_f64().ok_or(Error::OutOfRange(x.exp()))
}

pub fn growth_inequality_scan(
    f: &EntireFunction,
    test: GrowthTest,
    r_range: (f64, f64),
    points: usize,
    samples: usize,
) -> Result<ScanResult> {
    let (a, b) = r_range;
    if !(a > 0.0 && b >= a && b.is_finite()) {
        return Err(Error::InvalidParameter(format!("radius range [{a}, {b}] is invalid")));
    }
    if points < 16 {
        return Err(Error::InvalidParameter(format!(
            "points = {points} must be at least 16"
        )));
    }
    let mut witnesses = Vec::new();
    let mut violations = 0;
    for r in log_space(a, b, points) {
        let w = match test {
            GrowthTest::Convexity { c } => {
                let rc = Magnitude::from_f64(r)?.powf(c).ok_or(Error::OutOfRange(r))?;
                let lhs = max_modulus_magnitude(f, rc, samples)?.value;
                let mr = ln_max(f, r, samples)?;
                let rhs = mr.powf(c).ok_or(Error::UnrepresentableMagnitude)?;
                Witness {
                    r,
                    lhs: lhs.to_string(),
                    rhs: rhs.to_string(),
                    rho: None,
                    holds: lhs.ge_within(&rhs, COMPARE_REL),
                }
            }
            GrowthTest::Ahr { c } => {
                let x = r.ln();
                let p = phi(f, x, samples)?;
                let d = (phi(f, x + AHR_STEP, samples)? - phi(f, x - AHR_STEP, samples)?) / (2.0 * AHR_STEP);
                let lhs = d / p;
                let rhs = (1.0 + c) / x;
                Witness {
                    r,
                    lhs: crate::fmt::sig9(lhs),
                    rhs: crate::fmt::sig9(rhs),
                    rho: None,
                    holds: p > 0.0 && lhs >= rhs,
                }
            }
            GrowthTest::SmallGrowth { m } => {
                let mr = ln_max(f, r, samples)?;
                let lhs = match mr.tower_depth() {
                    0 => mr.mantissa().ln().ln(),
                    1 => mr.mantissa().ln(),
                    2 => mr.mantissa(),
                    _ => f64::INFINITY,
                };
                let rhs = r.ln() / iterated_log(r, m);
                Witness {
                    r,
                    lhs: crate::fmt::sig9(lhs),
                    rhs: crate::fmt::sig9(rhs),
                    rho: None,
                    holds: rhs.is_finite() && rhs > 0.0 && lhs < rhs,
                }
            }
            GrowthTest::MinCondition { m } => {
                let upper = r.powf(m);
                if !upper.is_finite() || upper >= crate::magnitude::THRESHOLD {
                    return Err(Error::OutOfRange(r));
                }
                let target = ln_max(f, r, samples)?;
                let mut best: Option<(f64, Magnitude)> = None;
                for rho in open_log_space(r, upper, MIN_CONDITION_TRIES) {
                    if let Ok(v) = min_modulus(f, rho, samples) {
                        if best.is_none_or(|(_, b)| v.value > b) {
                            best = Some((rho, v.value));
                        }
                    }
                }
                let (rho, v) = best.ok_or(Error::UnrepresentableRadius)?;
                Witness {
                    r,
                    lhs: v.to_string(),
                    rhs: target.to_string(),
                    rho: Some(rho),
                    holds: v >= target,
                }
            }
        };
        if !w.holds {
            violations += 1;
            witnesses.push(w);
        } else if matches!(test, GrowthTest::MinCondition { .. }) {
            witnesses.push(w);
        }
    }
    let verdict = if violations == 0 {
        Verdict::HoldsEmpirically
    } else {
        Verdict::Fails
    };
    Ok(ScanResult {
        test,
        verdict,
        points,
        violations,
        witnesses,
    })
}

/// `count` log-spaced points strictly inside `(a, b)`.
pub fn open_log_space(a: f64, b: f64, count: usize) -> Vec<f64> {
    let (la, lb) = (a.ln(), b.ln());
    (1..=count)
        .map(|i| (la + (lb - la) * i as f64 / (count + 1) as f64).exp())
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct RegularSequence {
    pub radii: Vec<f64>,
    /// `M(r_n)` for each radius.
    pub max_values: Vec<Magnitude>,
    /// `r_{n+1}^m`, the value each `M(r_n)` must reach.
    pub targets: Vec<Magnitude>,
    pub m: f64,
    pub delta: f64,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RegularOutcome {
    Found(RegularSequence),
    /// No grid radius within float range works at `level`.
    Failed {
        level: usize,
    },
}

/// Radii `r_n > M^n(R)` with `M(r_n) >= r_{n+1}^m` for `n < depth`.
///
/// Each `r_n` is the smallest point above `M^n(R)(1 + delta)` of a 1.02
/// geometric grid anchored there. The search runs from the top rung down so
/// every inequality is checked against the radius actually chosen next.
pub fn find_regular_sequence(
    f: &EntireFunction,
    r: f64,
    m: f64,
    depth: usize,
    delta: f64,
    samples: usize,
) -> Result<RegularOutcome> {
    if !f.is_transcendental() {
        return Err(Error::NonTranscendental(f.name().to_string()));
    }
    if !(m > 1.0) {
        return Err(Error::InvalidParameter(format!("m = {m} must exceed 1")));
    }
    let ladder = build_ladder(f, r, depth, samples)?;
    if ladder.len() <= depth {
        return Err(Error::LadderTruncated(ladder.len()));
    }
    let mut radii = vec![0.0; depth + 1];
    let mut max_values = vec![Magnitude::ZERO; depth + 1];
    for n in (0..=depth).rev() {
        let Some(base) = ladder.rungs[n].to_f64() else {
            return Ok(RegularOutcome::Failed { level: n });
        };
        let anchor = base * (1.0 + delta);
        let target = if n == depth {
            None
        } else {
            Some(
                Magnitude::from_f64(radii[n + 1])?
                    .powf(m)
                    .ok_or(Error::UnrepresentableMagnitude)?,
            )
        };
        let ok = |i: u32| -> Option<bool> {
            let x = anchor * REGULAR_GRID_RATIO.powi(i as i32);
            if !(x < crate::magnitude::THRESHOLD) {
                return None;
            }
            let v = max_modulus(f, x, samples).ok()?.value;
            Some(target.is_none_or(|t| v >= t))
        };
        // exponential then binary search over the grid index
        let mut hi = 0u32;
        loop {
            match ok(hi) {
                Some(true) => break,
                Some(false) => hi = if hi == 0 { 1 } else { hi * 2 },
                None => return Ok(RegularOutcome::Failed { level: n }),
            }
        }
        let mut lo = hi / 2;
        if hi == 0 || ok(lo) == Some(true) {
            lo = hi;
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if ok(mid) == Some(true) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let x = anchor * REGULAR_GRID_RATIO.powi(hi as i32);
        radii[n] = x;
        max_values[n] = max_modulus(f, x, samples)?.value;
    }
    let targets = radii[1..]
        .iter()
        .map(|&x| {
            Magnitude::from_f64(x)
                .ok()
                .and_then(|v| v.powf(m))
                .unwrap_or(Magnitude::ZERO)
        })
        .collect();
    Ok(RegularOutcome::Found(RegularSequence {
        radii,
        max_values,
        targets,
        m,
        delta,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::make_builtin;
    use std::collections::BTreeMap;

    fn builtin(name: &str) -> EntireFunction {
        make_builtin(name, &BTreeMap::new()).unwrap()
    }

    #[test]
    fn exp_inequalities() {
        let e = builtin("exp");
        let c = growth_inequality_scan(&e, GrowthTest::Convexity { c: 2.0 }, (2.0, 50.0), 32, 64).unwrap();
        assert_eq!(c.verdict, Verdict::HoldsEmpirically);
        let a = growth_inequality_scan(&e, GrowthTest::Ahr { c: 0.5 }, (2f64.exp(), 20f64.exp()), 32, 64).unwrap();
        assert_eq!(a.verdict, Verdict::HoldsEmpirically);
        let s = growth_inequality_scan(&e, GrowthTest::SmallGrowth { m: 2 }, (100.0, 1e6), 16, 64).unwrap();
        assert_eq!(s.verdict, Verdict::Fails);
    }

    #[test]
    fn exp_regular_sequence() {
        let out = find_regular_sequence(&builtin("exp"), 1.0, 2.0, 2, 0.01, 64).unwrap();
        let RegularOutcome::Found(seq) = out else {
            panic!("{out:?}")
        };
        let ladder = build_ladder(&builtin("exp"), 1.0, 2, 64).unwrap();
        for n in 0..=2 {
            assert!(Magnitude::from_f64(seq.radii[n]).unwrap() > ladder.rungs[n]);
        }
        for n in 0..2 {
            assert!(seq.max_values[n] >= seq.targets[n]);
        }
    }

    #[test]
    fn polynomial_is_refused() {
        let p = crate::function::make_table_series("poly", vec![(0, 1.0.into()), (3, 2.0.into())]);
        assert!(matches!(
            find_regular_sequence(&p, 2.0, 2.0, 2, 0.01, 64),
            Err(Error::NonTranscendental(_))
        ));
    }
}
