//! Overflow-safe nonnegative reals in iterated-exponential ("tower") form.
//!
//! A [`Magnitude`] with depth `k` and mantissa `v` denotes `exp^k(v)`, the
//! k-fold exponential of `v`. Canonical forms keep `v` in `[0, T)` at depth 0
//! and in `[ln T, T)` above it, with `T = 1e300`, so the lexicographic order on
//! `(depth, mantissa)` is the order of the denoted reals.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Promotion threshold `T`.
pub const THRESHOLD: f64 = 1e300;
/// `ln T`.
pub const LN_THRESHOLD: f64 = 690.775_527_898_213_7;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Magnitude {
    tower_depth: u32,
    mantissa: f64,
}

impl Magnitude {
    pub const ZERO: Magnitude = Magnitude {
        tower_depth: 0,
        mantissa: 0.0,
    };
    pub const ONE: Magnitude = Magnitude {
        tower_depth: 0,
        mantissa: 1.0,
    };

    /// Brings `exp^depth(value)` to canonical form.
    pub fn normalize(depth: u32, value: f64) -> Result<Self> {
        if value.is_nan() {
            return Err(Error::UnrepresentableMagnitude);
        }
        if depth == 0 && value < 0.0 {
            return Err(Error::NegativeMagnitude(value));
        }
        if value == f64::INFINITY {
            return Err(Error::UnrepresentableMagnitude);
        }
        let (mut k, mut v) = (depth, value);
        while k > 0 && v < LN_THRESHOLD {
            v = v.exp();
            k -= 1;
        }
        while v >= THRESHOLD {
            v = v.ln();
            k += 1;
        }
        Ok(Magnitude {
            tower_depth: k,
            mantissa: v,
        })
    }

    pub fn from_f64(x: f64) -> Result<Self> {
        Self::normalize(0, x)
    }

    /// The magnitude `e^l`; `l = -inf` gives zero.
    pub fn from_ln(l: f64) -> Result<Self> {
        if l == f64::NEG_INFINITY {
            return Ok(Self::ZERO);
        }
        Self::normalize(1, l)
    }

    pub fn tower_depth(&self) -> u32 {
        self.tower_depth
    }

    pub fn mantissa(&self) -> f64 {
        self.mantissa
    }

    pub fn is_depth_zero(&self) -> bool {
        self.tower_depth == 0
    }

    /// The denoted value when it fits in the depth-0 range.
    pub fn to_f64(&self) -> Option<f64> {
        (self.tower_depth == 0).then_some(self.mantissa)
    }

    /// `ln x` as a float, available for depth 0 and 1.
    pub fn ln_f64(&self) -> Option<f64> {
        match self.tower_depth {
            0 => Some(self.mantissa.ln()),
            1 => Some(self.mantissa),
            _ => None,
        }
    }

    /// `ln x` as a magnitude; requires `x >= 1`.
    pub fn ln(&self) -> Option<Magnitude> {
        match self.tower_depth {
            0 if self.mantissa < 1.0 => None,
            0 => Some(Magnitude {
                tower_depth: 0,
                mantissa: self.mantissa.ln(),
            }),
            k => Some(Magnitude {
                tower_depth: k - 1,
                mantissa: self.mantissa,
            }),
        }
    }

    pub fn exp(&self) -> Magnitude {
        match self.tower_depth {
            0 => Self::normalize(1, self.mantissa).expect("finite mantissa"),
            k => Magnitude {
                tower_depth: k + 1,
                mantissa: self.mantissa,
            },
        }
    }

    /// `x + c` for a real shift `c`; `None` when the result would be negative.
    pub fn add_f64(&self, c: f64) -> Option<Magnitude> {
        match self.tower_depth {
            0 => {
                let s = self.mantissa + c;
                if s < 0.0 {
                    None
                } else {
                    Self::normalize(0, s).ok()
                }
            }
            // e^v + c = e^(v + ln(1 + c e^-v))
            1 => {
                let corr = (c * (-self.mantissa).exp()).ln_1p();
                Self::normalize(1, self.mantissa + corr).ok()
            }
            _ => Some(*self),
        }
    }

    /// `c * x` for `c > 0`.
    pub fn scale(&self, c: f64) -> Option<Magnitude> {
        if !(c > 0.0) || !c.is_finite() {
            return None;
        }
        if self.tower_depth == 0 {
            let p = self.mantissa * c;
            if p.is_finite() {
                return Self::normalize(0, p).ok();
            }
            return Self::normalize(1, self.mantissa.ln() + c.ln()).ok();
        }
        let inner = self.ln()?.add_f64(c.ln())?;
        Some(inner.exp())
    }

    /// `x^p` for `p > 0`.
    pub fn powf(&self, p: f64) -> Option<Magnitude> {
        if !(p > 0.0) {
            return None;
        }
        if self.tower_depth == 0 && self.mantissa < 1.0 {
            return Self::normalize(0, self.mantissa.powf(p)).ok();
        }
        Some(self.ln()?.scale(p)?.exp())
    }

    /// `self >= other`, allowing a relative shortfall `rel` in the top mantissa
    /// when both sit at the same tower depth.
    pub fn ge_within(&self, other: &Magnitude, rel: f64) -> bool {
        if self >= other {
            return true;
        }
        self.tower_depth == other.tower_depth && self.mantissa >= other.mantissa * (1.0 - rel)
    }

    /// Relative difference of the top mantissas at equal depth, `inf` otherwise.
    pub fn rel_diff(&self, other: &Magnitude) -> f64 {
        if self.tower_depth != other.tower_depth {
            return f64::INFINITY;
        }
        let scale = self.mantissa.abs().max(other.mantissa.abs());
        if scale == 0.0 {
            0.0
        } else {
            (self.mantissa - other.mantissa).abs() / scale
        }
    }

    /// `log10` of the value when it fits in a float.
    pub fn log10(&self) -> Option<f64> {
        match self.tower_depth {
            0 => Some(self.mantissa.log10()),
            1 => Some(self.mantissa / std::f64::consts::LN_10),
            _ => None,
        }
    }
}

impl Eq for Magnitude {}

impl PartialOrd for Magnitude {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Magnitude {
    fn cmp(&self, other: &Self) -> Ordering {
        self.tower_depth
            .cmp(&other.tower_depth)
            .then_with(|| self.mantissa.total_cmp(&other.mantissa))
    }
}

impl fmt::Display for Magnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.tower_depth {
            0 => write!(f, "{}", crate::fmt::sig9(self.mantissa)),
            k => write!(f, "exp^{}({})", k, crate::fmt::sig9(self.mantissa)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_examples() {
        let m = Magnitude::normalize(0, 5.0).unwrap();
        assert_eq!((m.tower_depth(), m.mantissa()), (0, 5.0));

        let m = Magnitude::normalize(1, 2.0).unwrap();
        assert_eq!(m.tower_depth(), 0);
        assert!((m.mantissa() - 7.389_056_098_930_65).abs() < 1e-12);

        // 800 >= ln(1e300) = 690.77..., so e^800 stays at depth 1
        let m = Magnitude::normalize(1, 800.0).unwrap();
        assert_eq!((m.tower_depth(), m.mantissa()), (1, 800.0));
        assert!((LN_THRESHOLD - THRESHOLD.ln()).abs() < 1e-12);
    }

    #[test]
    fn normalize_rejects_negative_and_nan() {
        assert!(matches!(
            Magnitude::normalize(0, -1.0),
            Err(Error::NegativeMagnitude(_))
        ));
        assert!(Magnitude::normalize(0, f64::NAN).is_err());
        // exp of a negative number is fine
        let m = Magnitude::normalize(1, -3.0).unwrap();
        assert!((m.mantissa() - (-3.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn promotes_large_values() {
        let m = Magnitude::from_f64(f64::MAX).unwrap();
        assert_eq!(m.tower_depth(), 1);
        assert!((m.mantissa() - f64::MAX.ln()).abs() < 1e-9);
        let m = Magnitude::from_ln(1e305).unwrap();
        assert_eq!(m.tower_depth(), 2);
    }

    #[test]
    fn scale_and_powers() {
        let x = Magnitude::from_ln(1000.0).unwrap();
        let y = x.scale(2.0).unwrap();
        assert!((y.mantissa() - (1000.0 + 2f64.ln())).abs() < 1e-9);
        let z = Magnitude::from_ln(2000.0).unwrap().powf(0.5).unwrap();
        assert_eq!(z.tower_depth(), 1);
        assert!((z.mantissa() - 1000.0).abs() < 1e-9);
        let w = x.powf(0.5).unwrap();
        assert_eq!(w.tower_depth(), 0);
        assert!((w.mantissa().ln() - 500.0).abs() < 1e-9);
        let small = Magnitude::from_f64(4.0).unwrap().powf(0.5).unwrap();
        assert!((small.mantissa() - 2.0).abs() < 1e-12);
        // depth-2 scaling leaves the mantissa alone up to rounding
        let t = Magnitude::normalize(2, 800.0).unwrap();
        assert_eq!(t.scale(0.5).unwrap(), t);
    }

    #[test]
    fn ordering_follows_depth_then_mantissa() {
        let a = Magnitude::from_f64(1e299).unwrap();
        let b = Magnitude::from_ln(700.0).unwrap();
        let c = Magnitude::normalize(2, 700.0).unwrap();
        assert!(a < b && b < c);
        assert!(Magnitude::from_f64(2.0)
            .unwrap()
            .ge_within(&Magnitude::from_f64(2.0 + 1e-15).unwrap(), 1e-12));
    }
}
