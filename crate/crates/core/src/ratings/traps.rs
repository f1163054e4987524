//! Trap samples: references truncated to a prefix, which careful annotators
//! should score low.

use rand::seq::index;
use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use crate::corpus::{CampaignConfig, SegmentRecord};
use crate::error::{Error, Result};
use crate::lexical::tokenize::{prefix_end, tokenize, Scheme};
use crate::seed::{derive_seed, rng_for};
use crate::task::{target_language, LengthRatio};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrapPair {
    pub seg_id: String,
    pub truncated_text: String,
    pub original_reference: String,
    pub ratio: LengthRatio,
}

/// A trap assigned to one annotator slot of one task.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrapAssignment {
    pub direction: String,
    pub annotator_slot: usize,
    #[serde(flatten)]
    pub pair: TrapPair,
}

/// Keeps the first `floor(ratio * n)` tokens of `reference`.
pub fn truncate_reference(reference: &str, ratio: LengthRatio, scheme: Scheme) -> String {
    let normalized: String = reference.nfc().collect();
    let n = tokenize(&normalized, scheme).len();
    let keep = ratio.scale_floor(n);
    normalized[..prefix_end(&normalized, scheme, keep)].to_string()
}

/// Samples `count` distinct segments and truncates each reference.
/// Segments are ordered by id before sampling, so the result depends only on
/// the segment set and the seed.
pub fn generate_traps(
    segments: &[SegmentRecord],
    ratio: LengthRatio,
    count: usize,
    scheme: Scheme,
    seed: u64,
) -> Result<Vec<TrapPair>> {
    if ratio.is_full_length() {
        return Err(Error::InvalidRatio(format!("{ratio} (traps need a ratio below 1)")));
    }
    if count > segments.len() {
        return Err(Error::NotEnoughSegments {
            requested: count,
            available: segments.len(),
        });
    }
    let mut sorted: Vec<&SegmentRecord> = segments.iter().collect();
    sorted.sort_by(|a, b| a.seg_id.cmp(&b.seg_id));
    let mut rng = rng_for(seed, "traps", 0);
    let mut picked: Vec<usize> = index::sample(&mut rng, sorted.len(), count).into_vec();
    picked.sort_unstable();
    Ok(picked
        .into_iter()
        .map(|i| {
            let seg = sorted[i];
            TrapPair {
                seg_id: seg.seg_id.clone(),
                truncated_text: truncate_reference(&seg.reference_text, ratio, scheme),
                original_reference: seg.reference_text.clone(),
                ratio,
            }
        })
        .collect())
}

/// Scheme used to count trap lengths: the configured unit, or the target
/// language's scheme when lengths are provided externally.
pub fn trap_scheme(config: &CampaignConfig, direction: &str) -> Scheme {
    config
        .length_unit
        .scheme()
        .unwrap_or_else(|| Scheme::for_language(target_language(direction)))
}

/// Draws `per_annotator` traps for every direction, ratio and annotator slot.
pub fn schedule_traps(
    config: &CampaignConfig,
    segments: &[SegmentRecord],
    per_annotator: usize,
    seed: u64,
) -> Result<Vec<TrapAssignment>> {
    let mut out = Vec::new();
    for direction in &config.directions {
        let pool: Vec<SegmentRecord> = segments.iter().filter(|s| &s.direction == direction).cloned().collect();
        let scheme = trap_scheme(config, direction);
        for &ratio in &config.length_ratios {
            for slot in 0..config.annotators_per_task {
                let slot_seed = derive_seed(seed, &format!("traps:{direction}@{ratio}"), slot as u64);
                for pair in generate_traps(&pool, ratio, per_annotator, scheme, slot_seed)? {
                    out.push(TrapAssignment {
                        direction: direction.clone(),
                        annotator_slot: slot,
                        pair,
                    });
                }
            }
        }
    }
    Ok(out)
}
