//! Native lexical metrics over a campaign task.

use std::collections::BTreeMap;

use crate::corpus::{Campaign, LengthUnit};
use crate::error::{Error, Result};
use crate::lexical::{rouge_l, rouge_n, tokenize, BleuStats, LengthRecord, RougeScore, Scheme, DEFAULT_MAX_N};
use crate::meta_eval::{CellKey, CorpusKind, CorpusMetric, ScoreTable};
use crate::task::Task;

pub const NATIVE_VARIANT: &str = "native";
pub const LENGTH_METRIC: &str = "LengthDev";
pub const ROUGE_METRICS: [&str; 9] = [
    "ROUGE1-P", "ROUGE1-R", "ROUGE1-F1", "ROUGE2-P", "ROUGE2-R", "ROUGE2-F1", "ROUGEL-P", "ROUGEL-R", "ROUGEL-F1",
];

#[derive(Debug, Clone, PartialEq)]
pub struct NativeScores {
    pub task: Task,
    /// ROUGE tables in [`ROUGE_METRICS`] order.
    pub rouge: Vec<ScoreTable>,
    /// BLEU and BLEU*, recomputable over any selection of cells.
    pub corpus: Vec<CorpusMetric>,
    /// Per-cell relative length deviation.
    pub length: ScoreTable,
    /// Output and expected lengths per system, in segment order.
    pub length_records: BTreeMap<String, Vec<LengthRecord>>,
}

impl NativeScores {
    pub fn bleu_tables(&self) -> Result<Vec<ScoreTable>> {
        self.corpus.iter().map(CorpusMetric::system_table).collect()
    }
}

fn prf(s: RougeScore) -> [f64; 3] {
    [s.precision, s.recall, s.f1]
}

/// Target length for a ratio: `round(ratio * reference length)`, halves up,
/// at least 1.
pub fn expected_length(task: &Task, reference_len: usize) -> usize {
    task.ratio.scale_round_half_up(reference_len).max(1)
}

/// Scores every configured system on every segment of the task's direction.
/// Metrics tokenize by the target language; lengths use the configured unit.
pub fn score_command(campaign: &Campaign, task: &Task) -> Result<NativeScores> {
    if !campaign.config.has_task(task) {
        return Err(Error::InvalidConfig(format!("task {task} is not part of the campaign")));
    }
    let metric_scheme = Scheme::for_language(task.target_language());
    let unit = campaign.config.length_unit;
    let hyps = campaign.hypotheses_for(task);
    let segments = campaign.segment_map(&task.direction);
    if segments.is_empty() {
        return Err(Error::EmptySet("segments for task"));
    }

    let mut rouge: Vec<BTreeMap<CellKey, f64>> = vec![BTreeMap::new(); ROUGE_METRICS.len()];
    let mut bleu: BTreeMap<CellKey, BleuStats> = BTreeMap::new();
    let mut length = BTreeMap::new();
    let mut length_records: BTreeMap<String, Vec<LengthRecord>> = BTreeMap::new();
    for (seg_id, seg) in &segments {
        let reference = tokenize(&seg.reference_text, metric_scheme);
        let reference_len = match unit.scheme() {
            Some(s) if s == metric_scheme => reference.len(),
            Some(s) => tokenize(&seg.reference_text, s).len(),
            None => seg.reference_length.ok_or_else(|| {
                Error::MissingKey(format!("segment {seg_id} has no reference_length for provided counts"))
            })?,
        };
        for system in &campaign.config.systems {
            let key = (system.clone(), seg_id.to_string());
            let hyp = hyps.get(&key).ok_or_else(|| Error::IncompleteTable {
                table: format!("hypotheses {task}"),
                system: system.clone(),
                seg_id: seg_id.to_string(),
            })?;
            let tokens = tokenize(&hyp.text, metric_scheme);
            let values = [
                prf(rouge_n(&tokens, &reference, 1)),
                prf(rouge_n(&tokens, &reference, 2)),
                prf(rouge_l(&tokens, &reference)),
            ];
            for (slot, v) in rouge.iter_mut().zip(values.iter().flatten()) {
                slot.insert(key.clone(), *v);
            }
            bleu.insert(key.clone(), BleuStats::for_pair(&tokens, &reference, DEFAULT_MAX_N));
            let output_len = match unit {
                LengthUnit::ProvidedCounts => hyp.output_length.ok_or_else(|| {
                    Error::MissingKey(format!("{system} {seg_id} has no output_length for provided counts"))
                })?,
                _ => match unit.scheme() {
                    Some(s) if s == metric_scheme => tokens.len(),
                    Some(s) => tokenize(&hyp.text, s).len(),
                    None => unreachable!("provided counts handled above"),
                },
            };
            let record = LengthRecord::new(output_len, expected_length(task, reference_len))?;
            length.insert(key, record.relative_deviation());
            length_records.entry(system.clone()).or_default().push(record);
        }
    }

    let rouge = ROUGE_METRICS
        .iter()
        .zip(rouge)
        .map(|(id, cells)| ScoreTable::segment(*id, NATIVE_VARIANT, task.clone(), cells))
        .collect();
    let corpus = [("BLEU", CorpusKind::Bleu), ("BLEU*", CorpusKind::BleuStar)]
        .into_iter()
        .map(|(id, kind)| CorpusMetric {
            metric_id: id.to_string(),
            variant_id: NATIVE_VARIANT.to_string(),
            task: task.clone(),
            kind,
            stats: bleu.clone(),
        })
        .collect();
    Ok(NativeScores {
        task: task.clone(),
        rouge,
        corpus,
        length: ScoreTable::segment(LENGTH_METRIC, NATIVE_VARIANT, task.clone(), length),
        length_records,
    })
}
