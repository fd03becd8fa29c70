//! Entire functions: built-in examples, user series, random-sign
//! perturbations and iterates.

use std::collections::BTreeMap;
use std::f64::consts::{LN_2, PI};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, EvalError, Result};
use crate::magnitude::{Magnitude, LN_THRESHOLD};
use crate::series::{self, LogSum, Series};

/// Closed forms with a known maximum-modulus rule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Builtin {
    Exp,
    CoshSq,
    SinhPlusSq,
    /// `sum z^(pn)/(qn)!`; the quarter-order function is `(1, 4)`.
    PowerGap {
        p: u32,
        q: u32,
    },
    GapSeries {
        c: f64,
    },
}

#[derive(Clone, Debug)]
enum Kind {
    Builtin(Builtin),
    Series,
    Iterate { base: EntireFunction, m: u32 },
}

#[derive(Debug)]
struct Inner {
    name: String,
    kind: Kind,
    series: Option<Series>,
    positive: bool,
    transcendental: bool,
    iterate_power: u32,
    params: BTreeMap<String, f64>,
}

/// An entire function `f`; cheap to clone and safe to share across threads.
#[derive(Clone, Debug)]
pub struct EntireFunction(Arc<Inner>);

/// Builds a built-in by name.
pub fn make_builtin(name: &str, params: &BTreeMap<String, f64>) -> Result<EntireFunction> {
    let get = |key: &str| params.get(key).copied();
    let int_param = |key: &str, default: u32| -> Result<u32> {
        match get(key) {
            None => Ok(default),
            Some(v) if v >= 1.0 && v.fract() == 0.0 && v <= 64.0 => Ok(v as u32),
            Some(v) => Err(Error::InvalidParameter(format!(
                "{key} = {v} must be an integer in [1, 64]"
            ))),
        }
    };
    let allowed: &[&str] = match name {
        "gap_series" => &["c"],
        "power_gap" => &["p", "q"],
        _ => &[],
    };
    if let Some(k) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(Error::InvalidParameter(format!("`{name}` takes no parameter `{k}`")));
    }
    let builtin = match name {
        "exp" => Builtin::Exp,
        "cosh_sq" => Builtin::CoshSq,
        "sinh_plus_sq" => Builtin::SinhPlusSq,
        "quarter_order" => Builtin::PowerGap { p: 1, q: 4 },
        "power_gap" => Builtin::PowerGap {
            p: int_param("p", 1)?,
            q: int_param("q", 1)?,
        },
        "gap_series" => {
            let c = get("c").unwrap_or(1.0);
            if !(c > 0.0) || !c.is_finite() {
                return Err(Error::InvalidParameter(format!("c = {c} must be positive")));
            }
            Builtin::GapSeries { c }
        }
        _ => return Err(Error::UnknownFunction(name.to_string())),
    };
    let mut f = EntireFunction::from_builtin(builtin);
    let inner = Arc::get_mut(&mut f.0).expect("fresh function");
    inner.name = name.to_string();
    inner.params = params.clone();
    Ok(f)
}

/// A function given by its coefficient rule `n -> a_n`.
pub fn make_series<F>(name: &str, rule: F, positive: bool) -> EntireFunction
where
    F: Fn(u64) -> Complex64 + Send + Sync + 'static,
{
    from_series(name, Series::Custom(Arc::new(rule)), positive)
}

/// A polynomial or truncated series from explicit `(n, a_n)` pairs.
pub fn make_table_series(name: &str, mut entries: Vec<(u64, Complex64)>) -> EntireFunction {
    entries.sort_by_key(|e| e.0);
    entries.dedup_by(|b, a| {
        if a.0 == b.0 {
            a.1 += b.1;
            true
        } else {
            false
        }
    });
    let positive = entries.iter().all(|(_, a)| a.im == 0.0 && a.re >= 0.0);
    from_series(name, Series::Table(Arc::new(entries)), positive)
}

fn from_series(name: &str, series: Series, positive: bool) -> EntireFunction {
    let transcendental = !series.is_finite() && has_tail(&series);
    EntireFunction(Arc::new(Inner {
        name: name.to_string(),
        kind: Kind::Series,
        series: Some(series),
        positive,
        transcendental,
        iterate_power: 1,
        params: BTreeMap::new(),
    }))
}

/// Some nonzero coefficient with index in (2048, 4096], or coefficients that
/// only stop by underflow (e.g. `1/n!` vanishes in doubles past n = 170).
fn has_tail(series: &Series) -> bool {
    if series.merged_terms(4096).iter().any(|t| t.exponent > 2048) {
        return true;
    }
    let last = (0..=4096u64).rev().find_map(|n| {
        let a = series.coefficient(n);
        (a != Complex64::default()).then_some(a)
    });
    last.is_some_and(|a| a.norm() < 1e-290)
}

/// Coefficients `eps_n a_n` with the seeded sign sequence.
pub fn make_random_signs(base: &EntireFunction, seed: u64) -> Result<EntireFunction> {
    let s = base
        .series()
        .ok_or_else(|| Error::CoefficientsUnavailable(base.name().to_string()))?
        .clone();
    let signed = Series::Signed {
        base: Box::new(s),
        seed,
    };
    let mut f = from_series(&format!("{}~signs({seed})", base.name()), signed, false);
    let inner = Arc::get_mut(&mut f.0).expect("fresh function");
    inner.transcendental = base.is_transcendental();
    inner.params = base.params().clone();
    Ok(f)
}

/// The `m`-fold composition `f^m`.
pub fn iterate_function(f: &EntireFunction, m: u32) -> Result<EntireFunction> {
    if m == 0 {
        return Err(Error::InvalidParameter("iterate power must be at least 1".into()));
    }
    if m == 1 {
        return Ok(f.clone());
    }
    // composing an iterate again flattens to the base
    let (base, base_m) = match &f.0.kind {
        Kind::Iterate { base, m } => (base.clone(), *m),
        _ => (f.clone(), 1),
    };
    let total = base_m * m;
    Ok(EntireFunction(Arc::new(Inner {
        name: format!("{}^{}", base.name(), total),
        kind: Kind::Iterate {
            base: base.clone(),
            m: total,
        },
        series: None,
        positive: base.has_positive_coefficients(),
        transcendental: base.is_transcendental(),
        iterate_power: total * base.iterate_power(),
        params: base.params().clone(),
    })))
}

impl EntireFunction {
    fn from_builtin(b: Builtin) -> Self {
        let (name, series) = match b {
            Builtin::Exp => ("exp".to_string(), Series::Exp),
            Builtin::CoshSq => ("cosh_sq".to_string(), Series::CoshSq),
            Builtin::SinhPlusSq => ("sinh_plus_sq".to_string(), Series::SinhPlusSq),
            Builtin::PowerGap { p, q } => (format!("power_gap({p},{q})"), Series::PowerGap { p, q }),
            Builtin::GapSeries { c } => (format!("gap_series({c})"), Series::GapSeries { c }),
        };
        EntireFunction(Arc::new(Inner {
            name,
            kind: Kind::Builtin(b),
            series: Some(series),
            positive: true,
            transcendental: true,
            iterate_power: 1,
            params: BTreeMap::new(),
        }))
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.0.params
    }

    pub fn builtin(&self) -> Option<Builtin> {
        match self.0.kind {
            Kind::Builtin(b) => Some(b),
            _ => None,
        }
    }

    pub fn series(&self) -> Option<&Series> {
        self.0.series.as_ref()
    }

    pub fn has_coefficients(&self) -> bool {
        self.0.series.is_some()
    }

    pub fn has_positive_coefficients(&self) -> bool {
        self.0.positive
    }

    pub fn is_transcendental(&self) -> bool {
        self.0.transcendental
    }

    pub fn iterate_power(&self) -> u32 {
        self.0.iterate_power
    }

    /// For an iterate, the base function and the number of compositions.
    pub fn iterate_parts(&self) -> (&EntireFunction, u32) {
        match &self.0.kind {
            Kind::Iterate { base, m } => (base, *m),
            _ => (self, 1),
        }
    }

    /// Whether a closed-form rule gives `M(r)` for radii beyond float range.
    pub fn has_tower_rule(&self) -> bool {
        let (base, _) = self.iterate_parts();
        matches!(
            base.builtin(),
            Some(Builtin::Exp | Builtin::CoshSq | Builtin::SinhPlusSq | Builtin::PowerGap { .. })
        )
    }

    pub fn coefficient(&self, n: u64) -> Result<Complex64> {
        self.series()
            .map(|s| s.coefficient(n))
            .ok_or_else(|| Error::CoefficientsUnavailable(self.name().to_string()))
    }

    /// `f(z)`, or the overflow signal when `|f(z)| >= 1e300`.
    pub fn evaluate(&self, z: Complex64) -> Result<Complex64, EvalError> {
        match &self.0.kind {
            Kind::Builtin(b) => eval_builtin(*b, z),
            Kind::Series => series::evaluate(self.0.series.as_ref().expect("series kind"), z),
            Kind::Iterate { base, m } => {
                let mut w = z;
                for i in 0..*m {
                    w = match base.evaluate(w) {
                        Ok(v) => v,
                        Err(EvalError::Overflow { ln_abs }) if i + 1 == *m => {
                            return Err(EvalError::Overflow { ln_abs })
                        }
                        Err(EvalError::Overflow { .. }) => return Err(EvalError::Overflow { ln_abs: None }),
                        Err(e) => return Err(e),
                    };
                }
                Ok(w)
            }
        }
    }

    /// `|f(z)|` as a magnitude; overflow is promoted through `ln|f(z)|`.
    pub fn abs_magnitude(&self, z: Complex64) -> Result<Magnitude, EvalError> {
        match self.evaluate(z) {
            Ok(v) => Ok(Magnitude::from_f64(v.norm()).map_err(|_| EvalError::Overflow { ln_abs: None })?),
            Err(EvalError::Overflow { ln_abs: Some(l) }) => {
                Magnitude::from_ln(l).map_err(|_| EvalError::Overflow { ln_abs: None })
            }
            Err(e) => Err(e),
        }
    }

    /// `M(r)` from the closed-form rule of a built-in base, for any magnitude
    /// `r`. `None` when the base has no such rule.
    pub fn tower_max_modulus(&self, r: Magnitude) -> Option<Magnitude> {
        let (base, m) = self.iterate_parts();
        let b = base.builtin()?;
        let mut x = r;
        for _ in 0..m {
            x = builtin_max_modulus(b, x)?;
        }
        Some(x)
    }
}

/// `ln M(r)` of a built-in as a magnitude-valued rule.
fn builtin_max_modulus(b: Builtin, r: Magnitude) -> Option<Magnitude> {
    if let Some(x) = r.to_f64() {
        return match eval_builtin(b, Complex64::new(x, 0.0)) {
            Ok(v) => Magnitude::from_f64(v.norm()).ok(),
            Err(EvalError::Overflow { ln_abs: Some(l) }) => Magnitude::from_ln(l).ok(),
            Err(_) => None,
        };
    }
    let ln_m = match b {
        Builtin::Exp => r,
        // cosh^2 r = e^(2r)/4 (1 + e^(-2r))^2
        Builtin::CoshSq => r.scale(2.0)?.add_f64(-2.0 * LN_2)?,
        // sinh r + r^2 = e^r / 2 to working precision here
        Builtin::SinhPlusSq => r.add_f64(-LN_2)?,
        Builtin::PowerGap { p, q } => r.powf(p as f64 / q as f64)?.add_f64(-(q as f64).ln())?,
        Builtin::GapSeries { .. } => return None,
    };
    Some(ln_m.exp())
}

fn overflow_or(l: Complex64) -> Result<Complex64, EvalError> {
    if l.re.is_nan() {
        return Err(EvalError::Overflow { ln_abs: None });
    }
    if l.re >= LN_THRESHOLD {
        Err(EvalError::Overflow { ln_abs: Some(l.re) })
    } else {
        Ok(l.exp())
    }
}

fn finite_small(v: Complex64) -> bool {
    v.re.is_finite() && v.im.is_finite() && v.norm() < crate::magnitude::THRESHOLD
}

/// `ln cosh w`.
fn ln_cosh(w: Complex64) -> Complex64 {
    let mut s = LogSum::new();
    s.add_log(w);
    s.add_log(-w);
    s.ln() - LN_2
}

fn eval_builtin(b: Builtin, z: Complex64) -> Result<Complex64, EvalError> {
    match b {
        Builtin::Exp => {
            if z.re >= LN_THRESHOLD {
                return Err(EvalError::Overflow { ln_abs: Some(z.re) });
            }
            Ok(z.exp())
        }
        Builtin::CoshSq => {
            if z.re.abs() < 300.0 {
                let c = z.cosh();
                let v = c * c;
                if finite_small(v) {
                    return Ok(v);
                }
            }
            overflow_or(ln_cosh(z) * 2.0)
        }
        Builtin::SinhPlusSq => {
            if z.re.abs() < 600.0 {
                let v = z.sinh() + z * z;
                if finite_small(v) {
                    return Ok(v);
                }
            }
            let mut s = LogSum::new();
            s.add_log(z - LN_2);
            s.add_log(-z - LN_2 + Complex64::new(0.0, PI));
            if z != Complex64::default() {
                s.add_log(z.ln() * 2.0);
            }
            match s.value() {
                Ok(v) => Ok(v),
                Err(e) => Err(e),
            }
        }
        Builtin::PowerGap { p, q } => {
            if z.norm() < 1.0 {
                return series::evaluate(&Series::PowerGap { p, q }, z);
            }
            let u = (z.ln() * (p as f64 / q as f64)).exp();
            power_gap_closed_form(u, q)
        }
        Builtin::GapSeries { c } => series::evaluate(&Series::GapSeries { c }, z),
    }
}

/// `(1/q) sum_j exp(omega^j u)` over the q-th roots of unity `omega`, where
/// `u^q = z^p`. Any choice of the root `u` gives the same value.
pub fn power_gap_closed_form(u: Complex64, q: u32) -> Result<Complex64, EvalError> {
    let mut s = LogSum::new();
    for j in 0..q {
        let w = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / q as f64);
        s.add_log(w * u);
    }
    let l = s.ln() - (q as f64).ln();
    overflow_or(l)
}

/// The quarter-order function `(cos w + cosh w) / 2` at a fourth root `w`.
pub fn quarter_closed_form(w: Complex64) -> Result<Complex64, EvalError> {
    power_gap_closed_form(w, 4)
}
