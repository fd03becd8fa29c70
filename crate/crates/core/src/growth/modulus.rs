//! Maximum and minimum modulus on circles, and the maximal term.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, EvalError, Result};
use crate::function::EntireFunction;
use crate::magnitude::Magnitude;
use crate::series;

/// Angular tolerance of the golden-section refinement.
pub const ANGLE_TOL: f64 = 1e-10;

/// A modulus value, `sampled` when it came from circle sampling rather than
/// an exact rule (a lower bound for `M`, an upper bound for `m`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModulusEstimate {
    pub value: Magnitude,
    pub sampled: bool,
}

fn check_radius(r: f64, samples: usize) -> Result<()> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidRadius(r));
    }
    if samples < 16 {
        return Err(Error::InvalidParameter(format!(
            "samples = {samples} must be at least 16"
        )));
    }
    Ok(())
}

/// `|f(r e^{i theta})|`; `None` when the value cannot be represented.
fn abs_on_circle(f: &EntireFunction, r: f64, theta: f64) -> Option<Magnitude> {
    f.abs_magnitude(Complex64::from_polar(r, theta)).ok()
}

/// `M(r)` at a float radius.
pub fn max_modulus(f: &EntireFunction, r: f64, samples: usize) -> Result<ModulusEstimate> {
    check_radius(r, samples)?;
    if f.has_positive_coefficients() {
        return match f.abs_magnitude(Complex64::new(r, 0.0)) {
            Ok(v) => Ok(ModulusEstimate {
                value: v,
                sampled: false,
            }),
            Err(_) => {
                let v = exact_max_modulus(f, Magnitude::from_f64(r)?).ok_or(Error::UnrepresentableRadius)?;
                Ok(ModulusEstimate {
                    value: v,
                    sampled: false,
                })
            }
        };
    }
    if let Some(v) = f.tower_max_modulus(Magnitude::from_f64(r)?) {
        return Ok(ModulusEstimate {
            value: v,
            sampled: false,
        });
    }
    let value = circle_extremum(f, r, samples, Extremum::Max)?;
    Ok(ModulusEstimate { value, sampled: true })
}

/// `M(r)` for a radius given as a magnitude. Beyond float range this needs a
/// closed-form rule or a positive series that can be summed at `ln r`.
pub fn max_modulus_magnitude(f: &EntireFunction, r: Magnitude, samples: usize) -> Result<ModulusEstimate> {
    if let Some(x) = r.to_f64() {
        return max_modulus(f, x, samples);
    }
    exact_max_modulus(f, r)
        .map(|value| ModulusEstimate { value, sampled: false })
        .ok_or(Error::UnrepresentableRadius)
}

/// Exact `M(r)` for functions where it equals `f(r)` or has a closed form.
pub fn exact_max_modulus(f: &EntireFunction, r: Magnitude) -> Option<Magnitude> {
    if let Some(v) = f.tower_max_modulus(r) {
        return Some(v);
    }
    if !f.has_positive_coefficients() {
        return None;
    }
    let (base, m) = f.iterate_parts();
    let mut x = r;
    for _ in 0..m {
        x = positive_series_value(base, x)?;
    }
    Some(x)
}

/// `f(r)` for a positive series, summed in log space when `r` is huge.
fn positive_series_value(f: &EntireFunction, r: Magnitude) -> Option<Magnitude> {
    if let Some(x) = r.to_f64() {
        return match f.evaluate(Complex64::new(x, 0.0)) {
            Ok(v) => Magnitude::from_f64(v.norm()).ok(),
            Err(EvalError::Overflow { ln_abs: Some(l) }) => Magnitude::from_ln(l).ok(),
            Err(_) => None,
        };
    }
    let lr = r.ln_f64()?;
    let l = series::ln_positive_sum(f.series()?, lr).ok()?;
    Magnitude::from_ln(l).ok()
}

/// `m(r) = min |f|` on the circle, an upper estimate from sampling.
pub fn min_modulus(f: &EntireFunction, r: f64, samples: usize) -> Result<ModulusEstimate> {
    check_radius(r, samples)?;
    let value = circle_extremum(f, r, samples, Extremum::Min)?;
    Ok(ModulusEstimate { value, sampled: true })
}

#[derive(Clone, Copy, PartialEq)]
enum Extremum {
    Max,
    Min,
}

fn better(kind: Extremum, a: Magnitude, b: Magnitude) -> bool {
    match kind {
        Extremum::Max => a > b,
        Extremum::Min => a < b,
    }
}

/// Extremum of `|f|` over equally spaced angles, refined by golden-section
/// search on the bracket around the best sample.
fn circle_extremum(f: &EntireFunction, r: f64, samples: usize, kind: Extremum) -> Result<Magnitude> {
    let step = 2.0 * PI / samples as f64;
    let values: Vec<Option<Magnitude>> = (0..samples)
        .into_par_iter()
        .map(|j| abs_on_circle(f, r, j as f64 * step))
        .collect();
    if values.iter().any(|v| v.is_none()) {
        return Err(Error::UnrepresentableRadius);
    }
    let values: Vec<Magnitude> = values.into_iter().map(|v| v.expect("checked")).collect();
    let mut best_j = 0;
    for (j, v) in values.iter().enumerate() {
        if better(kind, *v, values[best_j]) {
            best_j = j;
        }
    }
    let centre = best_j as f64 * step;
    let refined = golden(f, r, centre - step, centre + step, kind);
    Ok(match refined {
        Some(v) if better(kind, v, values[best_j]) => v,
        _ => values[best_j],
    })
}

fn golden(f: &EntireFunction, r: f64, mut a: f64, mut b: f64, kind: Extremum) -> Option<Magnitude> {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let g = |t: f64| abs_on_circle(f, r, t);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = g(x1)?;
    let mut f2 = g(x2)?;
    while b - a > ANGLE_TOL {
        if better(kind, f1, f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = g(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = g(x2)?;
        }
    }
    let mid = g(0.5 * (a + b))?;
    let best = if better(kind, f1, f2) { f1 } else { f2 };
    Some(if better(kind, mid, best) { mid } else { best })
}

/// `mu(r) = sup_n |a_n| r^n` and the central index `N(r)`.
pub fn series_sup_term(f: &EntireFunction, r: f64) -> Result<(Magnitude, u64)> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidRadius(r));
    }
    let s = f
        .series()
        .ok_or_else(|| Error::CoefficientsUnavailable(f.name().to_string()))?;
    let (l, n) = series::sup_term(s, r.ln())?;
    Ok((Magnitude::from_ln(l)?, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::make_builtin;
    use std::collections::BTreeMap;

    fn builtin(name: &str) -> EntireFunction {
        make_builtin(name, &BTreeMap::new()).unwrap()
    }

    fn val(m: ModulusEstimate) -> f64 {
        m.value.to_f64().unwrap()
    }

    #[test]
    fn max_modulus_examples() {
        let e = max_modulus(&builtin("exp"), 1.0, 64).unwrap();
        assert!(!e.sampled);
        assert!((val(e) - std::f64::consts::E).abs() < 1e-15);
        assert!((val(max_modulus(&builtin("cosh_sq"), 1.0, 64).unwrap()) - 2.381_097_845_541_815_7).abs() < 1e-14);
        assert!(
            (val(max_modulus(&builtin("quarter_order"), 1.0, 64).unwrap()) - 1.041_691_470_341_691_7).abs() < 1e-14
        );
        assert!(max_modulus(&builtin("exp"), 0.0, 64).is_err());
        assert!(max_modulus(&builtin("exp"), 1.0, 8).is_err());
    }

    #[test]
    fn min_modulus_examples() {
        let m = min_modulus(&builtin("exp"), 2.0, 64).unwrap();
        assert!(m.sampled);
        assert!((val(m) - (-2f64).exp()).abs() < 1e-12);
        assert!(val(min_modulus(&builtin("cosh_sq"), PI / 2.0, 64).unwrap()) < 1e-9);
        assert!(val(min_modulus(&builtin("cosh_sq"), 2.0, 64).unwrap()) <= 1.0);
    }

    #[test]
    fn sampled_max_for_signed_series() {
        let f = crate::function::make_random_signs(&builtin("exp"), 3).unwrap();
        let m = max_modulus(&f, 5.0, 256).unwrap();
        assert!(m.sampled);
        // a sign-perturbed exponential is bounded by the positive series
        assert!(val(m) <= 5f64.exp() * (1.0 + 1e-12));
        let (mu, _) = series_sup_term(&f, 5.0).unwrap();
        assert!(mu.to_f64().unwrap() <= val(m) * (1.0 + 1e-9));
    }

    #[test]
    fn huge_radii_use_rules() {
        let r = Magnitude::from_ln(800.0).unwrap();
        let m = max_modulus_magnitude(&builtin("exp"), r, 64).unwrap();
        assert_eq!(m.value.tower_depth(), 2);
        let g = make_builtin("gap_series", &BTreeMap::new()).unwrap();
        let m = max_modulus(&g, 1e6, 64).unwrap();
        assert_eq!(m.value.tower_depth(), 1);
        // the central index near r = e^800 is far beyond any scan
        assert!(max_modulus_magnitude(&g, Magnitude::from_ln(800.0).unwrap(), 64).is_err());
    }
}
