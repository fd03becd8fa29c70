//! Numerical spider's-web certificates.
//!
//! A certificate is a chain `rho_0 < rho_1 < ... < rho_d` with
//! `rho_n > M^n(R)` and sampled `m(rho_n) >= rho_{n+1} (1 + delta)`. The
//! sampled minimum is an upper estimate of the true `m`, so a certified status
//! is numerical evidence with a safety margin, not a proof.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::function::{Builtin, EntireFunction};
use crate::growth::ladder::{build_ladder, ThresholdLadder};
use crate::growth::modulus::{max_modulus, min_modulus};
use crate::growth::scan::{find_regular_sequence, open_log_space, RegularOutcome};
use crate::magnitude::{Magnitude, THRESHOLD};

pub const CERT_SCHEMA: &str = "fastescape.certificate/1";
/// Candidate radii per rung in the disc-sequence search.
pub const DISC_CANDIDATES: usize = 128;
/// Candidate radii per rung for the minimum-modulus clause.
pub const CLAUSE_A_CANDIDATES: usize = 64;
/// Rung windows are `(X (1 + delta), X^M_CAP)`.
pub const M_CAP: f64 = 4.0;
pub const DEFAULT_DELTA: f64 = 0.01;
pub const DEFAULT_CERT_SAMPLES: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureReason {
    /// The best sampled `m(rho)` on the rung never exceeds the next threshold.
    MinModulusCeiling,
    /// Some `m(rho)` exceeds the threshold but no next radius fits the chain.
    NoFeasibleRadius,
    /// No `rho` in `(r_n, r_n^m)` has `m(rho) >= M(r_n)`.
    ClauseA,
    /// No regular sequence `M(r_n) >= r_{n+1}^m` within float range.
    ClauseB,
}

impl std::fmt::Display for FailureReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FailureReason::MinModulusCeiling => "min-modulus ceiling",
            FailureReason::NoFeasibleRadius => "no feasible radius",
            FailureReason::ClauseA => "clause (a): minimum modulus never reaches M(r)",
            FailureReason::ClauseB => "clause (b): no regular sequence",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CertStatus {
    Certified,
    Failed { reason: FailureReason, level: usize },
    Truncated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertMethod {
    DiscSequence,
    RegularGrowth,
}

#[derive(Clone, Debug, Serialize)]
pub struct WebCertificate {
    pub schema: &'static str,
    pub function: String,
    pub method: CertMethod,
    #[serde(rename = "R")]
    pub r: f64,
    pub rho: Vec<f64>,
    /// Sampled `m(rho_n)`.
    pub m_values: Vec<Magnitude>,
    /// `M^n(R)` for the rungs used.
    pub ladder: Vec<Magnitude>,
    pub samples: usize,
    pub delta: f64,
    pub requested_depth: usize,
    /// Number of verified links `m(rho_n) >= rho_{n+1} (1 + delta)`.
    pub depth: usize,
    /// The chain stopped because the next radius left float range.
    pub range_limited: bool,
    pub status: CertStatus,
}

impl WebCertificate {
    pub fn is_certified(&self) -> bool {
        self.status == CertStatus::Certified
    }

    pub fn summary(&self) -> String {
        let status = match &self.status {
            CertStatus::Certified => "certified".to_string(),
            CertStatus::Failed { reason, level } => format!("failed ({reason}) at n = {level}"),
            CertStatus::Truncated => "truncated".to_string(),
        };
        let mut s = format!(
            "function: {}\nmethod: {:?}\nR: {}\nstatus: {}\ndepth: {}\n",
            self.function,
            self.method,
            crate::fmt::sig9(self.r),
            status,
            self.depth
        );
        if self.range_limited {
            s.push_str("range_limited: true\n");
        }
        for (n, (rho, m)) in self.rho.iter().zip(&self.m_values).enumerate() {
            s.push_str(&format!("rho_{n}: {}  m: {}\n", crate::fmt::sig9(*rho), m));
        }
        s
    }
}

/// Largest radius at which evaluation phases stay meaningful in doubles.
pub fn reliable_radius(f: &EntireFunction) -> f64 {
    let (base, _) = f.iterate_parts();
    match base.builtin() {
        Some(Builtin::Exp | Builtin::CoshSq | Builtin::SinhPlusSq) => 1e12,
        Some(Builtin::PowerGap { p, q }) => 1e12f64.powf(q as f64 / p as f64).min(1e250),
        _ => 1e250,
    }
}

fn sampled_min(f: &EntireFunction, rho: f64, samples: usize) -> Option<Magnitude> {
    min_modulus(f, rho, samples).ok().map(|m| m.value)
}

fn refuse(f: &EntireFunction) -> Result<()> {
    if !f.is_transcendental() {
        return Err(Error::NonTranscendental(f.name().to_string()));
    }
    Ok(())
}

fn base_certificate(
    f: &EntireFunction,
    method: CertMethod,
    r: f64,
    ladder: &ThresholdLadder,
    depth: usize,
    samples: usize,
    delta: f64,
) -> WebCertificate {
    WebCertificate {
        schema: CERT_SCHEMA,
        function: f.name().to_string(),
        method,
        r,
        rho: Vec::new(),
        m_values: Vec::new(),
        ladder: ladder.rungs.clone(),
        samples,
        delta,
        requested_depth: depth,
        depth: 0,
        range_limited: false,
        status: CertStatus::Truncated,
    }
}

/// Window `(X (1 + delta), max(X^4, 16 X))` clipped to the reliable range.
fn rung_window(x: f64, delta: f64, limit: f64) -> Option<(f64, f64)> {
    let lo = x * (1.0 + delta);
    let hi = x.powf(M_CAP).max(16.0 * x).min(limit);
    (lo < hi).then_some((lo, hi))
}

/// Disc-sequence search on 128 log-spaced radii per rung. Each `rho_n` is
/// the largest sampled minimum among candidates from which the longest
/// achievable chain still continues.
pub fn certify_disc_sequence(
    f: &EntireFunction,
    r: f64,
    depth: usize,
    samples: usize,
    delta: f64,
) -> Result<WebCertificate> {
    refuse(f)?;
    if !(delta >= 0.0) {
        return Err(Error::InvalidParameter(format!("delta = {delta} must be nonnegative")));
    }
    let ladder = build_ladder(f, r, depth + 1, samples)?;
    let mut cert = base_certificate(f, CertMethod::DiscSequence, r, &ladder, depth, samples, delta);
    let limit = reliable_radius(f);

    let window = |n: usize| -> Option<(f64, f64)> {
        let x = ladder.rung(n)?.to_f64()?;
        rung_window(x, delta, limit)
    };
    let candidates = |n: usize| -> Option<Vec<(f64, Magnitude)>> {
        let (lo, hi) = window(n)?;
        let pts = open_log_space(lo, hi, DISC_CANDIDATES);
        let vals: Vec<Option<Magnitude>> = pts.par_iter().map(|&p| sampled_min(f, p, samples)).collect();
        Some(
            pts.into_iter()
                .zip(vals)
                .filter_map(|(p, v)| v.map(|v| (p, v)))
                .collect(),
        )
    };

    // candidate grids for every rung still inside the reliable range
    let mut grids: Vec<Vec<(f64, Magnitude)>> = Vec::new();
    for n in 0..=depth {
        match candidates(n).filter(|c| !c.is_empty()) {
            Some(c) => grids.push(c),
            None => break,
        }
    }
    if grids.is_empty() {
        return Ok(cert);
    }
    let feasible = |from: (f64, Magnitude), to: (f64, Magnitude)| {
        to.0 > from.0
            && Magnitude::from_f64(to.0 * (1.0 + delta))
                .map(|need| from.1 >= need)
                .unwrap_or(false)
    };
    // reach[n][i]: longest chain of links starting at candidate i of rung n
    let mut reach: Vec<Vec<usize>> = vec![Vec::new(); grids.len()];
    reach[grids.len() - 1] = vec![0; grids[grids.len() - 1].len()];
    for n in (0..grids.len() - 1).rev() {
        reach[n] = grids[n]
            .iter()
            .map(|&a| {
                grids[n + 1]
                    .iter()
                    .zip(&reach[n + 1])
                    .filter(|(&b, _)| feasible(a, b))
                    .map(|(_, &r)| (r + 1).min(depth))
                    .max()
                    .unwrap_or(0)
            })
            .collect();
    }
    // largest sampled minimum among candidates that still reach `need` links
    let pick = |n: usize, need: usize, prev: Option<(f64, Magnitude)>| -> Option<(f64, Magnitude)> {
        let mut best: Option<(f64, Magnitude)> = None;
        for (&c, &r) in grids[n].iter().zip(&reach[n]) {
            if r >= need && prev.is_none_or(|p| feasible(p, c)) && best.is_none_or(|b| c.1 > b.1) {
                best = Some(c);
            }
        }
        best
    };
    let achieved = reach[0].iter().copied().max().unwrap_or(0).min(depth);
    let mut prev = None;
    for n in 0..=achieved {
        let c = pick(n, achieved - n, prev).expect("reach guarantees a successor");
        cert.rho.push(c.0);
        cert.m_values.push(c.1);
        prev = Some(c);
    }
    cert.depth = achieved;
    if achieved < depth {
        if achieved + 1 == grids.len() && grids.len() <= depth {
            cert.range_limited = true;
        } else {
            let n = achieved;
            let rung_best = grids[n].iter().map(|c| c.1).max().expect("nonempty grid");
            let threshold = ladder
                .rung(n + 1)
                .and_then(|t| t.scale(1.0 + delta))
                .unwrap_or(Magnitude::ZERO);
            cert.status = CertStatus::Failed {
                reason: if rung_best <= threshold {
                    FailureReason::MinModulusCeiling
                } else {
                    FailureReason::NoFeasibleRadius
                },
                level: n,
            };
            return Ok(cert);
        }
    }
    cert.status = finish_status(&cert);
    Ok(cert)
}

fn finish_status(cert: &WebCertificate) -> CertStatus {
    if cert.depth >= cert.requested_depth || (cert.range_limited && cert.depth >= 2) {
        CertStatus::Certified
    } else {
        CertStatus::Truncated
    }
}

/// Certificate through a regular sequence and the minimum-modulus clause:
/// `m(rho_n) >= M(r_n) >= r_{n+1}^m > rho_{n+1}`.
pub fn certify_regular_growth(
    f: &EntireFunction,
    r: f64,
    m: f64,
    depth: usize,
    samples: usize,
    delta: f64,
) -> Result<WebCertificate> {
    refuse(f)?;
    let ladder = build_ladder(f, r, depth, samples)?;
    let mut cert = base_certificate(f, CertMethod::RegularGrowth, r, &ladder, depth, samples, delta);
    if ladder.len() <= depth {
        return Ok(cert);
    }
    let seq = match find_regular_sequence(f, r, m, depth, delta, samples)? {
        RegularOutcome::Found(s) => s,
        RegularOutcome::Failed { level } => {
            cert.status = CertStatus::Failed {
                reason: FailureReason::ClauseB,
                level,
            };
            return Ok(cert);
        }
    };
    for (n, &rn) in seq.radii.iter().enumerate() {
        let upper = rn.powf(m) / (1.0 + delta);
        if !(upper < THRESHOLD) || upper <= rn {
            cert.range_limited = true;
            break;
        }
        let target = max_modulus(f, rn, samples)?
            .value
            .scale(1.0 + delta)
            .ok_or(Error::UnrepresentableMagnitude)?;
        let pts = open_log_space(rn, upper, CLAUSE_A_CANDIDATES);
        let vals: Vec<Option<Magnitude>> = pts.par_iter().map(|&p| sampled_min(f, p, samples)).collect();
        // smallest admissible radius above the previous one keeps the chain increasing
        let prev = cert.rho.last().copied().unwrap_or(0.0);
        let pick = pts
            .into_iter()
            .zip(vals)
            .find_map(|(p, v)| v.filter(|v| p > prev && *v >= target).map(|v| (p, v)));
        match pick {
            Some((p, v)) => {
                cert.rho.push(p);
                cert.m_values.push(v);
            }
            None => {
                cert.status = CertStatus::Failed {
                    reason: FailureReason::ClauseA,
                    level: n,
                };
                return Ok(cert);
            }
        }
    }
    // the chain itself is what the certificate asserts; check it directly
    let mut links = 0;
    for n in 0..cert.rho.len().saturating_sub(1) {
        if link_holds(&cert, n, &cert.m_values) {
            links += 1;
        } else {
            cert.status = CertStatus::Failed {
                reason: FailureReason::NoFeasibleRadius,
                level: n,
            };
            cert.depth = links;
            return Ok(cert);
        }
    }
    cert.depth = links;
    cert.status = finish_status(&cert);
    Ok(cert)
}

fn link_holds(cert: &WebCertificate, n: usize, m_values: &[Magnitude]) -> bool {
    let (a, b) = (cert.rho[n], cert.rho[n + 1]);
    if !(b > a) {
        return false;
    }
    match Magnitude::from_f64(b * (1.0 + cert.delta)) {
        Ok(need) => m_values[n] >= need,
        Err(_) => false,
    }
}

/// Recomputes every `m(rho_n)` with `oversample` times the samples and
/// re-checks `rho_n > M^n(R)`, monotonicity and every link.
pub fn verify_certificate(f: &EntireFunction, cert: &WebCertificate, oversample: usize) -> bool {
    if !cert.is_certified() || cert.rho.len() < 2 || oversample == 0 {
        return false;
    }
    let samples = cert.samples.saturating_mul(oversample);
    let fresh: Vec<Option<Magnitude>> = cert.rho.par_iter().map(|&p| sampled_min(f, p, samples)).collect();
    let Some(fresh) = fresh.into_iter().collect::<Option<Vec<_>>>() else {
        return false;
    };
    for (n, &rho) in cert.rho.iter().enumerate() {
        let Some(rung) = cert.ladder.get(n) else { return false };
        match Magnitude::from_f64(rho) {
            Ok(v) if v > *rung => {}
            _ => return false,
        }
    }
    (0..cert.rho.len() - 1).all(|n| link_holds(cert, n, &fresh))
}
