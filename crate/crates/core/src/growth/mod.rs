//! Magnitude-valued growth quantities: `M(r)`, `m(r)`, ladders, order and
//! the regularity scans.

pub mod ladder;
pub mod modulus;
pub mod order;
pub mod report;
pub mod scan;

pub use ladder::{build_ladder, find_min_R, ThresholdLadder};
pub use modulus::{max_modulus, max_modulus_magnitude, min_modulus, series_sup_term, ModulusEstimate};
pub use order::{gap_analysis, order_estimate, Verdict};
pub use report::{analyze, AnalysisOptions, GrowthReport};
pub use scan::{find_regular_sequence, growth_inequality_scan, GrowthTest, RegularOutcome};
