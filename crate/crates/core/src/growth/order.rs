//! Order, lower order and gap structure from power-series coefficients.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::function::EntireFunction;
use crate::growth::modulus::exact_max_modulus;
use crate::magnitude::Magnitude;
use crate::series::Series;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    HoldsEmpirically,
    Fails,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::HoldsEmpirically => "holds-empirically",
            Verdict::Fails => "fails",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OrderEstimate {
    pub order: f64,
    pub lower_order: f64,
    /// `max n ln n / ln(1/|a_n|)` over the tail, without the linear correction.
    pub naive_order: f64,
    pub naive_lower_order: f64,
    pub window: (u64, u64),
    /// Hull vertices inside the window.
    pub vertices_used: usize,
}

fn series_of(f: &EntireFunction) -> Result<&Series> {
    f.series()
        .ok_or_else(|| Error::CoefficientsUnavailable(f.name().to_string()))
}

/// Lower convex hull of points sorted by `x`.
fn lower_hull(points: &[(f64, f64)]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::new();
    for i in 0..points.len() {
        while hull.len() >= 2 {
            let (a, b) = (points[hull[hull.len() - 2]], points[hull[hull.len() - 1]]);
            let c = points[i];
            let cross = (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    hull
}

/// Order and lower order from `n ln n / ln(1/|a_n|)` over the tail window
/// `[n_max/2, n_max]`.
///
/// The raw ratio converges like `1 + O(1/ln n)`, so the tail vertices of the
/// convex minorant of `(n, ln 1/|a_n|)` are fitted by `y/n = s ln n + b` and
/// the ratios use `y - b n`, which has the same limit.
pub fn order_estimate(f: &EntireFunction, n_max: u64) -> Result<OrderEstimate> {
    let series = series_of(f)?;
    if n_max < 100 {
        return Err(Error::InvalidParameter(format!("n_max = {n_max} must be at least 100")));
    }
    let terms = series.merged_terms(n_max);
    let points: Vec<(f64, f64)> = terms
        .iter()
        .filter(|t| t.exponent >= 2)
        .map(|t| (t.exponent as f64, -t.ln_abs))
        .collect();
    if terms.len() < 10 {
        return Err(Error::TooFewCoefficients(n_max));
    }
    let lo = n_max / 2;
    let hull = lower_hull(&points);
    let tail: Vec<usize> = (0..hull.len())
        .filter(|&i| points[hull[i]].0 >= lo as f64 && i > 0)
        .collect();
    if tail.len() < 2 {
        return Err(Error::TooFewCoefficients(n_max));
    }

    // least squares for y/n = s ln n + b
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &i in &tail {
        let (n, y) = points[hull[i]];
        let (x, v) = (n.ln(), y / n);
        sx += x;
        sy += v;
        sxx += x * x;
        sxy += x * v;
    }
    let k = tail.len() as f64;
    let denom = k * sxx - sx * sx;
    let b = if denom.abs() > 1e-300 {
        let s = (k * sxy - sx * sy) / denom;
        (sy - s * sx) / k
    } else {
        0.0
    };

    let ratio = |n: f64, log_n: f64, y: f64, shift: f64| {
        let d = y - shift * n;
        if d > 0.0 {
            n * log_n / d
        } else {
            f64::INFINITY
        }
    };
    let mut order = 0.0f64;
    let mut naive_order = 0.0f64;
    for p in points.iter().filter(|p| p.0 >= lo as f64) {
        if p.1 <= 0.0 {
            continue;
        }
        order = order.max(ratio(p.0, p.0.ln(), p.1, b));
        naive_order = naive_order.max(ratio(p.0, p.0.ln(), p.1, 0.0));
    }
    let mut lower = f64::INFINITY;
    let mut naive_lower = f64::INFINITY;
    for &i in &tail {
        let (n, y) = points[hull[i]];
        let prev = points[hull[i - 1]].0;
        lower = lower.min(ratio(n, prev.ln(), y, b));
        naive_lower = naive_lower.min(ratio(n, prev.ln(), y, 0.0));
    }
    let lower = lower.clamp(0.0, order);
    let naive_lower = naive_lower.clamp(0.0, naive_order);
    Ok(OrderEstimate {
        order,
        lower_order: lower,
        naive_order,
        naive_lower_order: naive_lower,
        window: (lo, n_max),
        vertices_used: tail.len(),
    })
}

/// `max log log M(r) / log r` over `r = 2^31 .. 2^60`.
pub fn max_modulus_order(f: &EntireFunction) -> Result<f64> {
    let mut best = 0.0f64;
    for e in 31..=60 {
        let r = 2f64.powi(e);
        let m = exact_max_modulus(f, Magnitude::from_f64(r)?).ok_or(Error::UnrepresentableRadius)?;
        let ln_ln = match m.tower_depth() {
            0 => m.mantissa().ln().ln(),
            1 => m.mantissa().ln(),
            2 => m.mantissa(),
            _ => f64::INFINITY,
        };
        best = best.max(ln_ln / r.ln());
    }
    Ok(best)
}

#[derive(Clone, Debug, Serialize)]
pub struct GapAnalysis {
    pub fabry: Verdict,
    pub hayman: Verdict,
    pub alpha: f64,
    /// `(k, n_k, n_k / k)` for `k >= 1`.
    pub ratio_trace: Vec<(u64, u64, f64)>,
}

/// Exponents `n_k` of the nonzero coefficients, `k = 0..=k_max`.
pub fn gap_exponents(f: &EntireFunction, k_max: u64) -> Result<Vec<u64>> {
    let series = series_of(f)?;
    let mut out = Vec::new();
    let mut k = 0u64;
    let mut last = None;
    while out.len() as u64 <= k_max {
        let Some(t) = series.term(k) else { break };
        k += 1;
        if t.ln_abs == f64::NEG_INFINITY || last == Some(t.exponent) {
            continue;
        }
        last = Some(t.exponent);
        out.push(t.exponent);
        if k > crate::series::TERM_CAP {
            break;
        }
    }
    Ok(out)
}

/// Fabry (`n_k / k -> inf`) and Hayman (`n_k > k log k (log log k)^alpha`)
/// gap verdicts on the first `k_max` nonzero coefficients.
pub fn gap_analysis(f: &EntireFunction, k_max: u64, alpha: f64) -> Result<GapAnalysis> {
    if !(alpha > 2.0) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} must exceed 2")));
    }
    let n = gap_exponents(f, k_max)?;
    let trace: Vec<(u64, u64, f64)> = n
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &nk)| (k as u64, nk, nk as f64 / k as f64))
        .collect();

    let fabry = if trace.len() < 4 {
        Verdict::Inconclusive
    } else {
        let half = &trace[trace.len() / 2..];
        let first = half[0].2;
        let last = half[half.len() - 1].2;
        let monotone = half.windows(2).all(|w| w[1].2 >= w[0].2);
        if monotone && last > first && last > 10.0 {
            Verdict::HoldsEmpirically
        } else if half.iter().all(|t| t.2 <= 10.0) && last <= 1.1 * first {
            Verdict::Fails
        } else {
            Verdict::Inconclusive
        }
    };

    let checks: Vec<bool> = trace
        .iter()
        .filter(|t| t.0 >= 10)
        .map(|&(k, nk, _)| {
            let k = k as f64;
            nk as f64 > k * k.ln() * k.ln().ln().powf(alpha)
        })
        .collect();
    let hayman = if checks.is_empty() {
        Verdict::Inconclusive
    } else if checks.iter().all(|&c| c) {
        Verdict::HoldsEmpirically
    } else if checks.iter().all(|&c| !c) {
        Verdict::Fails
    } else {
        Verdict::Inconclusive
    };
    Ok(GapAnalysis {
        fabry,
        hayman,
        alpha,
        ratio_trace: trace,
    })
}
