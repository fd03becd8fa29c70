//! Power series stored as term rules, summed in log space.
//!
//! Coefficients are kept as `(ln|a|, unit phase)` so rules like `1/(k^2)!`
//! stay usable long after `a` underflows, and sums can report `ln|f(z)|` past
//! the point where the value itself overflows.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::EvalError;
use crate::magnitude::LN_THRESHOLD;
use crate::signs;

/// `ln(1e-18)`, the negligible-term ratio.
pub const LN_NEGLIGIBLE: f64 = -41.446_531_673_892_82;
/// Terms scanned before a series is declared not entire.
pub const TERM_CAP: u64 = 1 << 22;
/// Run of zero coefficients past the central index that ends a scan.
const ZERO_RUN: u64 = 4096;

/// One nonzero (or explicitly zero) term `a z^exponent`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Term {
    pub exponent: u64,
    pub ln_abs: f64,
    /// `a / |a|`; irrelevant when `ln_abs = -inf`.
    pub unit: Complex64,
}

impl Term {
    fn real(exponent: u64, ln_abs: f64) -> Self {
        Term {
            exponent,
            ln_abs,
            unit: Complex64::new(1.0, 0.0),
        }
    }

    pub fn from_value(exponent: u64, a: Complex64) -> Self {
        let m = a.norm();
        if m == 0.0 {
            Term::real(exponent, f64::NEG_INFINITY)
        } else {
            Term {
                exponent,
                ln_abs: m.ln(),
                unit: a / m,
            }
        }
    }

    pub fn value(&self) -> Complex64 {
        self.unit * self.ln_abs.exp()
    }

    /// `ln|a z^e|` for `ln|z| = lr`.
    #[inline]
    fn ln_at(&self, lr: f64) -> f64 {
        if self.ln_abs == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        if self.exponent == 0 {
            self.ln_abs
        } else {
            self.ln_abs + self.exponent as f64 * lr
        }
    }
}

pub type CoeffFn = dyn Fn(u64) -> Complex64 + Send + Sync;

/// Term rule of a power series.
#[derive(Clone)]
pub enum Series {
    /// `sum z^n / n!`
    Exp,
    /// `cosh^2 z = 1 + sum_{j>=1} 2^(2j-1) z^(2j) / (2j)!`
    CoshSq,
    /// `sinh z + z^2`
    SinhPlusSq,
    /// `sum z^(pn) / (qn)!`
    PowerGap { p: u32, q: u32 },
    /// `sum z^(floor(ck)^2) / (k^2)!`
    GapSeries { c: f64 },
    /// `a_n` supplied by a closure, one term per index.
    Custom(Arc<CoeffFn>),
    /// Finitely many `(n, a_n)` pairs, sorted by `n`, indices distinct.
    Table(Arc<Vec<(u64, Complex64)>>),
    /// `eps_n a_n` with the seeded signs.
    Signed { base: Box<Series>, seed: u64 },
}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Series::Exp => write!(f, "Exp"),
            Series::CoshSq => write!(f, "CoshSq"),
            Series::SinhPlusSq => write!(f, "SinhPlusSq"),
            Series::PowerGap { p, q } => write!(f, "PowerGap({p}, {q})"),
            Series::GapSeries { c } => write!(f, "GapSeries({c})"),
            Series::Custom(_) => write!(f, "Custom"),
            Series::Table(t) => write!(f, "Table({} entries)", t.len()),
            Series::Signed { base, seed } => write!(f, "Signed({base:?}, {seed})"),
        }
    }
}

#[inline]
fn ln_factorial(n: u64) -> f64 {
    if n < 2 {
        0.0
    } else {
        libm::lgamma(n as f64 + 1.0)
    }
}

impl Series {
    /// The `k`-th term; exponents are nondecreasing in `k`. `None` ends a
    /// finite series.
    pub fn term(&self, k: u64) -> Option<Term> {
        Some(match self {
            Series::Exp => Term::real(k, -ln_factorial(k)),
            Series::CoshSq => {
                if k == 0 {
                    Term::real(0, 0.0)
                } else {
                    let n = 2 * k;
                    Term::real(n, (n - 1) as f64 * std::f64::consts::LN_2 - ln_factorial(n))
                }
            }
            Series::SinhPlusSq => match k {
                0 => Term::real(1, 0.0),
                1 => Term::real(2, 0.0),
                _ => {
                    let n = 2 * k - 1;
                    Term::real(n, -ln_factorial(n))
                }
            },
            Series::PowerGap { p, q } => Term::real(*p as u64 * k, -ln_factorial(*q as u64 * k)),
            Series::GapSeries { c } => {
                let b = (c * k as f64).floor() as u64;
                Term::real(b * b, -ln_factorial(k * k))
            }
            Series::Custom(rule) => Term::from_value(k, rule(k)),
            Series::Table(t) => {
                let &(n, a) = t.get(k as usize)?;
                Term::from_value(n, a)
            }
            Series::Signed { base, seed } => {
                let mut t = base.term(k)?;
                if signs::sign(*seed, t.exponent) < 0 {
                    t.unit = -t.unit;
                }
                t
            }
        })
    }

    /// Whether `k -> ln|a_k| + e_k ln r` rises then falls for every `r`, so
    /// the peak can be found by bisection.
    pub fn unimodal(&self) -> bool {
        match self {
            Series::Exp | Series::CoshSq | Series::PowerGap { .. } => true,
            Series::GapSeries { c } => *c >= 1.0,
            Series::Signed { base, .. } => base.unimodal(),
            _ => false,
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Series::Table(_) => true,
            Series::Signed { base, .. } => base.is_finite(),
            _ => false,
        }
    }

    /// Coefficient of `z^n`, summing duplicate exponents.
    pub fn coefficient(&self, n: u64) -> Complex64 {
        match self {
            Series::Exp => Complex64::new((-ln_factorial(n)).exp(), 0.0),
            Series::CoshSq | Series::SinhPlusSq | Series::PowerGap { .. } => {
                let k = match self {
                    Series::CoshSq if n.is_multiple_of(2) => Some(n / 2),
                    Series::SinhPlusSq => match n {
                        0 => None,
                        1 => Some(0),
                        2 => Some(1),
                        _ if n % 2 == 1 => Some(n.div_ceil(2)),
                        _ => None,
                    },
                    Series::PowerGap { p, .. } if n.is_multiple_of(*p as u64) => Some(n / *p as u64),
                    _ => None,
                };
                k.and_then(|k| self.term(k))
                    .filter(|t| t.exponent == n)
                    .map(|t| t.value())
                    .unwrap_or_default()
            }
            Series::GapSeries { c } => {
                let b = (n as f64).sqrt().round() as u64;
                if b * b != n {
                    return Complex64::default();
                }
                // floor(c k) = b  <=>  b/c <= k < (b+1)/c
                let lo = (b as f64 / c).ceil() as u64;
                let hi = ((b + 1) as f64 / c).ceil() as u64;
                let mut sum = Complex64::default();
                for k in lo.saturating_sub(1)..=hi {
                    if let Some(t) = self.term(k) {
                        if t.exponent == n {
                            sum += t.value();
                        }
                    }
                }
                sum
            }
            Series::Custom(rule) => rule(n),
            Series::Table(t) => t.binary_search_by_key(&n, |e| e.0).map(|i| t[i].1).unwrap_or_default(),
            Series::Signed { base, seed } => base.coefficient(n) * signs::sign(*seed, n) as f64,
        }
    }

    /// Nonzero `(n, ln|a_n|, unit)` with `n <= n_max`, duplicates merged.
    pub fn merged_terms(&self, n_max: u64) -> Vec<Term> {
        let mut out: Vec<Term> = Vec::new();
        let mut k = 0u64;
        while let Some(t) = self.term(k) {
            if t.exponent > n_max {
                break;
            }
            k += 1;
            if t.ln_abs == f64::NEG_INFINITY {
                continue;
            }
            match out.last_mut() {
                Some(last) if last.exponent == t.exponent => {
                    let mut acc = LogSum::new();
                    acc.add(last.ln_abs, last.unit);
                    acc.add(t.ln_abs, t.unit);
                    let l = acc.ln_abs();
                    last.ln_abs = l;
                    last.unit = acc.unit();
                }
                _ => out.push(t),
            }
            if k > TERM_CAP {
                break;
            }
        }
        out.retain(|t| t.ln_abs > f64::NEG_INFINITY);
        out
    }
}

/// Running sum `e^reference * acc` of terms given by log-modulus and phase.
#[derive(Clone, Copy, Debug)]
pub struct LogSum {
    reference: f64,
    acc: Complex64,
}

impl Default for LogSum {
    fn default() -> Self {
        Self::new()
    }
}

impl LogSum {
    pub fn new() -> Self {
        LogSum {
            reference: f64::NEG_INFINITY,
            acc: Complex64::default(),
        }
    }

    pub fn add(&mut self, ln_abs: f64, unit: Complex64) {
        if ln_abs == f64::NEG_INFINITY {
            return;
        }
        if ln_abs > self.reference {
            if self.reference > f64::NEG_INFINITY {
                self.acc *= (self.reference - ln_abs).exp();
            }
            self.reference = ln_abs;
        }
        self.acc += unit * (ln_abs - self.reference).exp();
    }

    /// Adds `e^w` for complex `w`.
    pub fn add_log(&mut self, w: Complex64) {
        self.add(w.re, Complex64::from_polar(1.0, w.im));
    }

    pub fn ln_abs(&self) -> f64 {
        if self.reference == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        self.reference + self.acc.norm().ln()
    }

    pub fn unit(&self) -> Complex64 {
        let n = self.acc.norm();
        if n == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            self.acc / n
        }
    }

    /// `ln` of the sum as a complex number (principal argument).
    pub fn ln(&self) -> Complex64 {
        Complex64::new(self.ln_abs(), self.acc.arg())
    }

    /// The sum itself, or the overflow signal carrying `ln|sum|`.
    pub fn value(&self) -> Result<Complex64, EvalError> {
        let l = self.ln_abs();
        if l == f64::NEG_INFINITY {
            return Ok(Complex64::default());
        }
        if l.is_nan() {
            return Err(EvalError::Overflow { ln_abs: None });
        }
        if l >= LN_THRESHOLD {
            return Err(EvalError::Overflow { ln_abs: Some(l) });
        }
        let scale = self.reference.exp();
        if scale.is_finite() {
            Ok(self.acc * scale)
        } else {
            Ok(self.acc * (self.reference / 2.0).exp() * (self.reference / 2.0).exp())
        }
    }

    fn negligible(&self, ln_term: f64) -> bool {
        ln_term < self.ln_abs() + LN_NEGLIGIBLE
    }
}

/// Sums the series at `ln|z| = lr`, `arg z = theta`.
pub fn log_sum(series: &Series, lr: f64, theta: f64) -> Result<LogSum, EvalError> {
    if lr == f64::NEG_INFINITY {
        let mut s = LogSum::new();
        let mut k = 0;
        while let Some(t) = series.term(k) {
            if t.exponent > 0 {
                break;
            }
            s.add(t.ln_abs, t.unit);
            k += 1;
        }
        return Ok(s);
    }
    if series.is_finite() {
        let mut s = LogSum::new();
        let mut k = 0;
        while let Some(t) = series.term(k) {
            s.add(t.ln_at(lr), phase(&t, theta));
            k += 1;
        }
        return Ok(s);
    }
    if series.unimodal() {
        unimodal_sum(series, lr, theta)
    } else {
        scan_sum(series, lr, theta)
    }
}

#[inline]
fn phase(t: &Term, theta: f64) -> Complex64 {
    if theta == 0.0 || t.exponent == 0 {
        t.unit
    } else {
        let a = t.exponent as f64 * theta;
        t.unit * Complex64::new(a.cos(), a.sin())
    }
}

fn ln_term(series: &Series, k: u64, lr: f64) -> f64 {
    series.term(k).map(|t| t.ln_at(lr)).unwrap_or(f64::NEG_INFINITY)
}

/// Index of the largest term of a unimodal rule.
pub fn peak_index(series: &Series, lr: f64) -> Result<u64, EvalError> {
    let rising = |k: u64| ln_term(series, k + 1, lr) >= ln_term(series, k, lr);
    let mut hi = 1u64;
    while rising(hi) {
        hi *= 2;
        if hi > TERM_CAP {
            return Err(EvalError::NotEntire);
        }
    }
    // rising(lo) true or lo == 0, rising(hi) false
    let mut lo = 0u64;
    if !rising(0) {
        return Ok(0);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if rising(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

fn unimodal_sum(series: &Series, lr: f64, theta: f64) -> Result<LogSum, EvalError> {
    let peak = peak_index(series, lr)?;
    let mut s = LogSum::new();
    let t = series.term(peak).ok_or(EvalError::NotEntire)?;
    s.add(t.ln_at(lr), phase(&t, theta));

    let mut small = 0;
    let mut k = peak + 1;
    while small < 3 {
        let Some(t) = series.term(k) else { break };
        let l = t.ln_at(lr);
        if s.negligible(l) {
            small += 1;
        } else {
            small = 0;
        }
        s.add(l, phase(&t, theta));
        k += 1;
        if k - peak > TERM_CAP {
            return Err(EvalError::NotEntire);
        }
    }
    small = 0;
    let mut k = peak;
    while k > 0 && small < 3 {
        k -= 1;
        let Some(t) = series.term(k) else { break };
        let l = t.ln_at(lr);
        if s.negligible(l) {
            small += 1;
        } else {
            small = 0;
        }
        s.add(l, phase(&t, theta));
    }
    Ok(s)
}

fn scan_sum(series: &Series, lr: f64, theta: f64) -> Result<LogSum, EvalError> {
    let mut s = LogSum::new();
    let mut best = f64::NEG_INFINITY;
    let mut best_k = 0u64;
    let mut small = 0;
    let mut zeros = 0u64;
    let mut k = 0u64;
    loop {
        let Some(t) = series.term(k) else { return Ok(s) };
        let l = t.ln_at(lr);
        if l == f64::NEG_INFINITY {
            zeros += 1;
            if k > best_k && zeros >= ZERO_RUN {
                return Ok(s);
            }
        } else {
            zeros = 0;
            if l >= best {
                best = l;
                best_k = k;
            }
            if k > best_k && s.negligible(l) {
                small += 1;
            } else {
                small = 0;
            }
            s.add(l, phase(&t, theta));
            if small >= 3 {
                return Ok(s);
            }
        }
        k += 1;
        if k > TERM_CAP {
            return Err(EvalError::NotEntire);
        }
    }
}

/// Evaluates the series at `z`.
pub fn evaluate(series: &Series, z: Complex64) -> Result<Complex64, EvalError> {
    let r = z.norm();
    let lr = if r == 0.0 { f64::NEG_INFINITY } else { r.ln() };
    log_sum(series, lr, z.arg())?.value()
}

/// `ln f(r)` for a positive series at `ln r = lr`; works beyond float radii.
pub fn ln_positive_sum(series: &Series, lr: f64) -> Result<f64, EvalError> {
    Ok(log_sum(series, lr, 0.0)?.ln_abs())
}

/// `mu(r) = sup |a_n| r^n` (as `ln mu`) and the largest maximizing exponent.
/// The scan stops 50 terms past the running maximum once terms decay.
pub fn sup_term(series: &Series, lr: f64) -> Result<(f64, u64), EvalError> {
    let start = if series.unimodal() {
        peak_index(series, lr)?.saturating_sub(64)
    } else {
        0
    };
    let mut best = f64::NEG_INFINITY;
    let mut best_n = 0u64;
    let mut below = 0u64;
    let mut k = start;
    while let Some(t) = series.term(k) {
        let l = t.ln_at(lr);
        if l > f64::NEG_INFINITY && l >= best {
            best = l;
            best_n = t.exponent;
            below = 0;
        } else {
            below += 1;
            if below >= 50 && best > f64::NEG_INFINITY {
                break;
            }
        }
        k += 1;
        if k > TERM_CAP {
            return Err(EvalError::NotEntire);
        }
    }
    Ok((best, best_n))
}
