//! Hybrid super sampling.
//!
//! With only a handful of real systems, a system-level correlation is
//! computed over very few points. Hybrid systems are synthesized by picking,
//! independently for every segment, the output of one real system chosen
//! uniformly at random. A hybrid's segment-level score is the mean over
//! segments of the picked system's scores; a corpus-level metric is
//! recomputed over the picked outputs.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lexical::BleuStats;
use crate::meta_eval::system::SystemScoreVector;
use crate::meta_eval::table::{CellKey, ScoreTable};
use crate::seed::rng_for;
use crate::task::Task;

pub const DEFAULT_HYBRIDS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CorpusKind {
    Bleu,
    BleuStar,
}

/// A corpus-level metric, kept as per-segment sufficient statistics so that
/// any selection of outputs can be rescored.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusMetric {
    pub metric_id: String,
    pub variant_id: String,
    pub task: Task,
    pub kind: CorpusKind,
    pub stats: BTreeMap<CellKey, BleuStats>,
}

impl CorpusMetric {
    pub fn name(&self) -> String {
        format!("{}/{}", self.metric_id, self.variant_id)
    }

    fn finish(&self, stats: &BleuStats) -> Result<f64> {
        let s = stats.score()?;
        Ok(match self.kind {
            CorpusKind::Bleu => s.bleu,
            CorpusKind::BleuStar => s.bleu_star,
        })
    }

    /// System-only table of the real systems.
    pub fn system_table(&self) -> Result<ScoreTable> {
        let mut per_system: BTreeMap<String, BleuStats> = BTreeMap::new();
        for ((system, _), stats) in &self.stats {
            *per_system
                .entry(system.clone())
                .or_insert_with(|| BleuStats::zero(stats.max_n())) += stats;
        }
        let scores = per_system
            .into_iter()
            .map(|(s, st)| Ok((s, self.finish(&st)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(ScoreTable::system_only(
            self.metric_id.clone(),
            self.variant_id.clone(),
            self.task.clone(),
            scores,
        ))
    }
}

/// Anything that can score a selection of one output per segment.
#[derive(Debug, Clone, Copy)]
pub enum MetricSource<'a> {
    Segment(&'a ScoreTable),
    Corpus(&'a CorpusMetric),
}

impl MetricSource<'_> {
    pub fn name(&self) -> String {
        match self {
            MetricSource::Segment(t) => t.name(),
            MetricSource::Corpus(c) => c.name(),
        }
    }

    fn check_dense(&self, systems: &[String], segments: &[String]) -> Result<()> {
        match self {
            MetricSource::Segment(t) => t.check_dense(systems, segments),
            MetricSource::Corpus(c) => {
                for s in systems {
                    for g in segments {
                        if !c.stats.contains_key(&(s.clone(), g.clone())) {
                            return Err(Error::IncompleteTable {
                                table: c.name(),
                                system: s.clone(),
                                seg_id: g.clone(),
                            });
                        }
                    }
                }
                Ok(())
            }
        }
    }

    /// Score of the pseudo-system that outputs `picks[i]`'s hypothesis for
    /// `segments[i]`. Cells must have been checked with `check_dense`.
    fn score_selection(&self, segments: &[String], picks: &[&str]) -> Result<f64> {
        match self {
            MetricSource::Segment(t) => {
                let cells = t.segment_cells()?;
                let mut sum = 0.0;
                for (seg, sys) in segments.iter().zip(picks) {
                    sum += cells[&(sys.to_string(), seg.clone())];
                }
                Ok(sum / segments.len() as f64)
            }
            MetricSource::Corpus(c) => {
                let mut total: Option<BleuStats> = None;
                for (seg, sys) in segments.iter().zip(picks) {
                    let st = &c.stats[&(sys.to_string(), seg.clone())];
                    match total.as_mut() {
                        Some(t) => *t += st,
                        None => total = Some(st.clone()),
                    }
                }
                c.finish(&total.ok_or(Error::EmptyCorpus)?)
            }
        }
    }
}

/// Per-segment system choice defining one hybrid system.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HybridSelector {
    pub hybrid_id: String,
    /// seg_id -> system_id
    pub choices: BTreeMap<String, String>,
    pub master_seed: u64,
    pub index: u64,
}

impl HybridSelector {
    /// Selector that picks `system` for every segment.
    pub fn constant(hybrid_id: impl Into<String>, system: &str, segments: &[String]) -> Self {
        HybridSelector {
            hybrid_id: hybrid_id.into(),
            choices: segments.iter().map(|g| (g.clone(), system.to_string())).collect(),
            master_seed: 0,
            index: 0,
        }
    }

    fn picks<'a>(&'a self, segments: &[String]) -> Result<Vec<&'a str>> {
        segments
            .iter()
            .map(|g| {
                self.choices
                    .get(g)
                    .map(String::as_str)
                    .ok_or_else(|| Error::MissingKey(format!("selector {} has no choice for {g}", self.hybrid_id)))
            })
            .collect()
    }
}

pub fn hybrid_id(index: usize) -> String {
    format!("hybrid-{index:05}")
}

/// Draws `k` selectors. Selector `i` depends only on `(seed, i)`, so the
/// result is identical for any thread count.
pub fn draw_selectors(systems: &[String], segments: &[String], k: usize, seed: u64) -> Vec<HybridSelector> {
    (0..k)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, "hybrid", i as u64);
            let choices = segments
                .iter()
                .map(|g| (g.clone(), systems[rng.random_range(0..systems.len())].clone()))
                .collect();
            HybridSelector {
                hybrid_id: hybrid_id(i),
                choices,
                master_seed: seed,
                index: i as u64,
            }
        })
        .collect()
}

/// Real systems followed by hybrids, with one aligned score vector per
/// metric and one for the human scores.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HybridOutput {
    pub task: Task,
    pub ids: Vec<String>,
    pub real_systems: usize,
    pub selectors: Vec<HybridSelector>,
    pub human: Vec<f64>,
    /// `(metric/variant, scores aligned with ids)`
    pub metrics: Vec<(String, Vec<f64>)>,
}

impl HybridOutput {
    pub fn metric(&self, name: &str) -> Option<&[f64]> {
        self.metrics.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    pub fn to_vector(&self, values: &[f64]) -> SystemScoreVector {
        SystemScoreVector {
            task: self.task.clone(),
            scores: self.ids.iter().cloned().zip(values.iter().copied()).collect(),
        }
    }
}

fn score_all(source: MetricSource<'_>, segments: &[String], systems: &[String], selectors: &[HybridSelector]) -> Result<Vec<f64>> {
    let mut values = Vec::with_capacity(systems.len() + selectors.len());
    for s in systems {
        let picks = vec![s.as_str(); segments.len()];
        values.push(source.score_selection(segments, &picks)?);
    }
    let hybrids: Vec<f64> = selectors
        .par_iter()
        .map(|sel| source.score_selection(segments, &sel.picks(segments)?))
        .collect::<Result<_>>()?;
    values.extend(hybrids);
    Ok(values)
}

/// Scores the real systems and the given selectors for every source and for
/// the human segment scores.
pub fn score_with_selectors(
    task: &Task,
    sources: &[MetricSource<'_>],
    human_cells: &BTreeMap<CellKey, f64>,
    systems: &[String],
    segments: &[String],
    selectors: Vec<HybridSelector>,
) -> Result<HybridOutput> {
    if systems.len() < 2 {
        return Err(Error::TooFewSystems(systems.len()));
    }
    if segments.is_empty() {
        return Err(Error::EmptySet("segments for hybrid super sampling"));
    }
    let human_table = ScoreTable::segment("human", "z", task.clone(), human_cells.clone());
    let human_source = MetricSource::Segment(&human_table);
    human_source.check_dense(systems, segments)?;
    for s in sources {
        s.check_dense(systems, segments)?;
    }
    if selectors.is_empty() && systems.len() < 3 {
        log::warn!(
            "{task}: system-level correlation over {} real systems and no hybrids is degenerate",
            systems.len()
        );
    }
    let human = score_all(human_source, segments, systems, &selectors)?;
    let metrics = sources
        .iter()
        .map(|s| Ok((s.name(), score_all(*s, segments, systems, &selectors)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut ids: Vec<String> = systems.to_vec();
    ids.extend(selectors.iter().map(|s| s.hybrid_id.clone()));
    Ok(HybridOutput {
        task: task.clone(),
        ids,
        real_systems: systems.len(),
        selectors,
        human,
        metrics,
    })
}

/// Draws `k` hybrids over the systems and segments of the human scores and
/// scores them with every source.
pub fn hybrid_supersample(
    task: &Task,
    sources: &[MetricSource<'_>],
    human_cells: &BTreeMap<CellKey, f64>,
    k: usize,
    seed: u64,
) -> Result<HybridOutput> {
    let (systems, segments) = axes(human_cells);
    if systems.len() < 2 {
        return Err(Error::TooFewSystems(systems.len()));
    }
    let selectors = draw_selectors(&systems, &segments, k, seed);
    score_with_selectors(task, sources, human_cells, &systems, &segments, selectors)
}

/// Sorted systems and segments present in a cell map.
pub fn axes<V>(cells: &BTreeMap<CellKey, V>) -> (Vec<String>, Vec<String>) {
    let mut systems: Vec<String> = cells.keys().map(|(s, _)| s.clone()).collect();
    systems.dedup();
    let mut segments: Vec<String> = cells.keys().map(|(_, g)| g.clone()).collect();
    segments.sort();
    segments.dedup();
    (systems, segments)
}
