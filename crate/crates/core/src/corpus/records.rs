use serde::{Deserialize, Serialize};

use crate::task::{LengthRatio, Task};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentRecord {
    pub seg_id: String,
    pub direction: String,
    pub source_text: String,
    pub reference_text: String,
    /// Reference length in externally counted units (e.g. subwords).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_length: Option<usize>,
}

/// One system output for one segment at one target length.
///
/// `direction` may be omitted on disk when the segment id is unique across
/// directions; it is always filled in after loading.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisRecord {
    pub system_id: String,
    pub seg_id: String,
    #[serde(default)]
    pub direction: String,
    pub length_ratio: LengthRatio,
    pub text: String,
    /// Output length in externally counted units, used with provided counts.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_length: Option<usize>,
}

impl HypothesisRecord {
    pub fn task(&self) -> Task {
        Task::new(self.direction.clone(), self.length_ratio)
    }
}

/// One annotator's direct-assessment judgment.
#[derive(Debug, Clone, PartialEq)]
pub struct RatingRecord {
    pub annotator_id: String,
    pub task: Task,
    pub seg_id: String,
    pub system_id: String,
    pub raw_score: u8,
    pub duration_s: f64,
    pub is_trap: bool,
}

impl RatingRecord {
    /// Item identity used by agreement statistics: the same segment/system
    /// pair rated as a trap is a different item from the real output.
    pub fn item_key(&self) -> (String, String, bool) {
        (self.seg_id.clone(), self.system_id.clone(), self.is_trap)
    }
}
