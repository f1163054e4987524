//! Human direct-assessment ratings: trap generation, quality control,
//! z-normalization, aggregation and inter-annotator agreement.

pub mod agreement;
pub mod normalize;
pub mod qc;
pub mod traps;

pub use crate::corpus::RatingRecord;
pub use agreement::{agreement, krippendorff_alpha, one_vs_rest, AgreementResult, AgreementScale, RatingMatrix};
pub use normalize::{aggregate_segment_human, znormalize, HumanScores, NormalizedRating};
pub use qc::{timing_report, trap_report, TimingReport, TrapBuckets};
pub use traps::{generate_traps, schedule_traps, TrapAssignment, TrapPair};
