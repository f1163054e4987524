//! Metric–human correlation: system aggregation, hybrid super sampling,
//! Pearson/Kendall correlation and best-variant selection.

pub mod correlation;
pub mod hybrid;
pub mod segment;
pub mod system;
pub mod table;
pub mod variant;

pub use correlation::{kendall_tau_b, pearson, CorrelationKind, CorrelationResult};
pub use hybrid::{
    draw_selectors, hybrid_supersample, score_with_selectors, CorpusKind, CorpusMetric, HybridOutput, HybridSelector,
    MetricSource,
};
pub use segment::segment_correlation;
pub use system::{system_scores, SystemScoreVector};
pub use table::{CellKey, Cells, ScoreLevel, ScoreTable};
pub use variant::{select_best_variant, select_from_correlations, Level, VariantScore, VariantSelection};
