//! Aggregate growth report for one function.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fmt::sig9;
use crate::function::EntireFunction;
use crate::growth::ladder::{build_ladder, find_min_R};
use crate::growth::order::{gap_analysis, max_modulus_order, order_estimate, Verdict};
use crate::growth::scan::{growth_inequality_scan, GrowthTest, ScanResult, Witness};

pub const REPORT_SCHEMA: &str = "fastescape.growth/1";

#[derive(Clone, Debug)]
pub struct AnalysisOptions {
    pub r: Option<f64>,
    pub search_max: f64,
    pub ladder_depth: usize,
    pub n_max: u64,
    pub k_max: u64,
    pub alpha: f64,
    pub ahr_c: f64,
    pub small_m: u32,
    pub convexity_c: Vec<f64>,
    pub scan_max: f64,
    pub points: usize,
    pub samples: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            r: None,
            search_max: 1e6,
            ladder_depth: 6,
            n_max: 2000,
            k_max: 200,
            alpha: 3.0,
            ahr_c: 0.5,
            small_m: 2,
            convexity_c: vec![1.5, 2.0, 3.0],
            scan_max: 1e6,
            points: 32,
            samples: 256,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthReport {
    pub schema: &'static str,
    pub function: String,
    #[serde(rename = "R")]
    pub r: f64,
    pub ladder: Vec<String>,
    pub ladder_truncated_at: Option<usize>,
    pub order_estimate: Option<f64>,
    pub lower_order_estimate: Option<f64>,
    pub naive_order: Option<f64>,
    pub order_window: Option<(u64, u64)>,
    pub max_modulus_order: Option<f64>,
    pub fabry_verdict: Verdict,
    pub hayman_verdict: Verdict,
    pub alpha: f64,
    pub ahr_verdict: Verdict,
    pub ahr_c: f64,
    pub small_growth_verdict: Verdict,
    pub small_growth_m: u32,
    pub convexity_violations: usize,
    pub scan_range: (f64, f64),
    pub witnesses: Vec<Witness>,
    pub notes: Vec<String>,
}

fn verdict_of(r: &Result<ScanResult>) -> Verdict {
    r.as_ref().map(|s| s.verdict).unwrap_or(Verdict::Inconclusive)
}

pub fn analyze(f: &EntireFunction, opts: &AnalysisOptions) -> Result<GrowthReport> {
    let r = match opts.r {
        Some(r) => r,
        None => find_min_R(f, opts.search_max, opts.samples)?,
    };
    let ladder = build_ladder(f, r, opts.ladder_depth, opts.samples)?;
    let mut notes = vec!["verdicts are empirical: finite windows cannot see exceptional sets or limits".to_string()];

    let (order, gaps) = if f.has_coefficients() {
        let o = match order_estimate(f, opts.n_max) {
            Ok(o) => Some(o),
            Err(Error::TooFewCoefficients(_)) => {
                notes.push("too few nonzero coefficients for an order estimate".into());
                None
            }
            Err(e) => return Err(e),
        };
        (o, Some(gap_analysis(f, opts.k_max, opts.alpha)?))
    } else {
        notes.push("no coefficients: order and gap analysis skipped".into());
        (None, None)
    };
    let mm_order = max_modulus_order(f).ok();

    // log M(r^c) >= c log M(r) fails trivially at r = 1, so scans start at 3
    let lo = r.max(3.0);
    let hi = opts.scan_max.max(lo * 10.0);
    let mut witnesses = Vec::new();
    let mut convexity_violations = 0;
    for &c in &opts.convexity_c {
        match growth_inequality_scan(f, GrowthTest::Convexity { c }, (lo, hi), opts.points, opts.samples) {
            Ok(s) => {
                convexity_violations += s.violations;
                witnesses.extend(s.witnesses);
            }
            Err(e) => notes.push(format!("convexity c = {c}: {e}")),
        }
    }
    let ahr = growth_inequality_scan(
        f,
        GrowthTest::Ahr { c: opts.ahr_c },
        (lo, hi),
        opts.points,
        opts.samples,
    );
    let small = growth_inequality_scan(
        f,
        GrowthTest::SmallGrowth { m: opts.small_m },
        (lo.max(100.0), hi.max(1000.0)),
        opts.points,
        opts.samples,
    );
    for s in [&ahr, &small] {
        match s {
            Ok(s) => witnesses.extend(s.witnesses.iter().cloned()),
            Err(e) => notes.push(format!("scan skipped: {e}")),
        }
    }

    Ok(GrowthReport {
        schema: REPORT_SCHEMA,
        function: f.name().to_string(),
        r,
        ladder: ladder.rungs.iter().map(|m| m.to_string()).collect(),
        ladder_truncated_at: ladder.truncated_at,
        order_estimate: order.as_ref().map(|o| o.order),
        lower_order_estimate: order.as_ref().map(|o| o.lower_order),
        naive_order: order.as_ref().map(|o| o.naive_order),
        order_window: order.as_ref().map(|o| o.window),
        max_modulus_order: mm_order,
        fabry_verdict: gaps.as_ref().map_or(Verdict::Inconclusive, |g| g.fabry),
        hayman_verdict: gaps.as_ref().map_or(Verdict::Inconclusive, |g| g.hayman),
        alpha: opts.alpha,
        ahr_verdict: verdict_of(&ahr),
        ahr_c: opts.ahr_c,
        small_growth_verdict: verdict_of(&small),
        small_growth_m: opts.small_m,
        convexity_violations,
        scan_range: (lo, hi),
        witnesses,
        notes,
    })
}

impl GrowthReport {
    /// `key: value` lines.
    pub fn to_text(&self) -> String {
        let opt = |v: Option<f64>| v.map_or("n/a".to_string(), sig9);
        let mut s = String::new();
        let mut line = |k: &str, v: String| {
            s.push_str(k);
            s.push_str(": ");
            s.push_str(&v);
            s.push('\n');
        };
        line("function", self.function.clone());
        line("R", sig9(self.r));
        line("ladder", self.ladder.join(", "));
        if let Some(t) = self.ladder_truncated_at {
            line("ladder_truncated_at", t.to_string());
        }
        line("order_estimate", opt(self.order_estimate));
        line("lower_order_estimate", opt(self.lower_order_estimate));
        line("naive_order", opt(self.naive_order));
        if let Some((a, b)) = self.order_window {
            line("order_window", format!("{a}..{b}"));
        }
        line("max_modulus_order", opt(self.max_modulus_order));
        line("fabry_verdict", self.fabry_verdict.to_string());
        line(
            "hayman_verdict",
            format!("{} (alpha = {})", self.hayman_verdict, sig9(self.alpha)),
        );
        line(
            "ahr_verdict",
            format!("{} (c = {})", self.ahr_verdict, sig9(self.ahr_c)),
        );
        line(
            "small_growth_verdict",
            format!("{} (m = {})", self.small_growth_verdict, self.small_growth_m),
        );
        line("convexity_violations", self.convexity_violations.to_string());
        line(
            "scan_range",
            format!("{} .. {}", sig9(self.scan_range.0), sig9(self.scan_range.1)),
        );
        line("witnesses", self.witnesses.len().to_string());
        for n in &self.notes {
            line("note", n.clone());
        }
        s
    }
}
