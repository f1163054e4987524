//! Campaign data: configuration, corpus, system outputs, human ratings and
//! external metric scores.

pub mod campaign;
pub mod config;
pub mod records;
pub mod scores;
pub mod validate;

pub use campaign::Campaign;
pub use config::{CampaignConfig, DataPaths, LengthUnit};
pub use records::{HypothesisRecord, RatingRecord, SegmentRecord};
pub use scores::{load_external_scores, write_external_scores};
pub use validate::{expected_rating_count, validate_campaign, ValidationReport};
