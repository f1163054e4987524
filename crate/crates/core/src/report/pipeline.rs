//! End-to-end pipeline: QC, normalization, native metrics, correlations,
//! significance and system comparison, written as report files.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::corpus::{Campaign, LengthUnit};
use crate::error::{Error, Result};
use crate::lexical::length_deviation;
use crate::meta_eval::variant::task_hybrid_seed;
use crate::meta_eval::{
    hybrid_supersample, pearson, segment_correlation, select_best_variant, system_scores, HybridOutput, Level,
    MetricSource, ScoreTable, VariantSelection,
};
use crate::ratings::qc::DEFAULT_TIMING_CUTOFF_S;
use crate::ratings::{
    agreement, aggregate_segment_human, timing_report, trap_report, znormalize, AgreementScale, HumanScores,
};
use crate::report::score::{score_command, NativeScores};
use crate::report::sigmatrix::{emit_sig_matrix, SigFormat};
use crate::report::table::{Cell, Kind, ReportTable};
use crate::seed::derive_seed;
use crate::significance::{
    dagger, paired_bootstrap_keyed, segment_sig_matrix, system_sig_matrix, SigMatrix, DEFAULT_ALPHA, DEFAULT_BOOTSTRAP,
    DEFAULT_LEVEL, DEFAULT_PERMUTATIONS,
};
use crate::meta_eval::hybrid::DEFAULT_HYBRIDS;
use crate::task::Task;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunOptions {
    /// Overrides the campaign seed.
    pub seed: Option<u64>,
    pub hybrids: usize,
    pub permutations: usize,
    pub bootstrap: usize,
    pub alpha: f64,
    pub ci_level: f64,
    pub timing_cutoff: f64,
    /// Include trap ratings in the z-normalization statistics.
    pub include_traps: bool,
    pub agreement_scale: AgreementScale,
    /// Overrides the campaign length unit.
    pub length_unit: Option<LengthUnit>,
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            seed: None,
            hybrids: DEFAULT_HYBRIDS,
            permutations: DEFAULT_PERMUTATIONS,
            bootstrap: DEFAULT_BOOTSTRAP,
            alpha: DEFAULT_ALPHA,
            ci_level: DEFAULT_LEVEL,
            timing_cutoff: DEFAULT_TIMING_CUTOFF_S,
            include_traps: false,
            agreement_scale: AgreementScale::Raw,
            length_unit: None,
            threads: None,
        }
    }
}

/// Runs `f` on a rayon pool of `threads` workers, or on the global pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn task_columns(tasks: &[Task]) -> Vec<String> {
    tasks.iter().map(Task::to_string).collect()
}

pub fn qc_timing_table(campaign: &Campaign, timing_cutoff: f64) -> Result<ReportTable> {
    let mut t = ReportTable::new(&[
        ("direction", Kind::Text),
        ("ratio", Kind::Text),
        ("all_ave", Kind::Real),
        ("cut_ave", Kind::Real),
        ("annotations", Kind::Count),
    ]);
    for task in &campaign.config.tasks() {
        let ratings = campaign.ratings_for(task);
        if ratings.is_empty() {
            continue;
        }
        let r = timing_report(ratings.iter().copied(), timing_cutoff)?;
        t.push(vec![
            Cell::text(&task.direction),
            Cell::text(task.ratio.to_string()),
            Cell::Real(r.all_ave),
            Cell::real_opt(r.cut_ave),
            Cell::Count(ratings.len() as u64),
        ]);
    }
    Ok(t)
}

pub fn qc_traps_table(campaign: &Campaign) -> ReportTable {
    let mut t = ReportTable::new(&[
        ("direction", Kind::Text),
        ("ratio", Kind::Text),
        ("zero", Kind::Count),
        ("low", Kind::Count),
        ("high", Kind::Count),
        ("total", Kind::Count),
    ]);
    for task in &campaign.config.tasks() {
        let b = trap_report(campaign.ratings_for(task).into_iter().filter(|r| r.is_trap));
        t.push(vec![
            Cell::text(&task.direction),
            Cell::text(task.ratio.to_string()),
            Cell::Count(b.zero as u64),
            Cell::Count(b.low as u64),
            Cell::Count(b.high as u64),
            Cell::Count(b.total() as u64),
        ]);
    }
    t
}

pub fn agreement_table(campaign: &Campaign, scale: AgreementScale) -> Result<ReportTable> {
    let mut t = ReportTable::new(&[
        ("direction", Kind::Text),
        ("ratio", Kind::Text),
        ("scale", Kind::Text),
        ("pearson_with_traps", Kind::Real),
        ("pearson_without_traps", Kind::Real),
        ("alpha_with_traps", Kind::Real),
        ("alpha_without_traps", Kind::Real),
        ("items_with_traps", Kind::Count),
        ("items_without_traps", Kind::Count),
    ]);
    for task in &campaign.config.tasks() {
        let ratings: Vec<_> = campaign.ratings_for(task).into_iter().cloned().collect();
        if ratings.is_empty() {
            continue;
        }
        let with = agreement(&ratings, true, scale)?;
        let without = agreement(&ratings, false, scale)?;
        t.push(vec![
            Cell::text(&task.direction),
            Cell::text(task.ratio.to_string()),
            Cell::text(match scale {
                AgreementScale::Raw => "raw",
                AgreementScale::Z => "z",
            }),
            Cell::Real(with.one_vs_rest_r),
            Cell::Real(without.one_vs_rest_r),
            Cell::Real(with.krippendorff_alpha),
            Cell::Real(without.krippendorff_alpha),
            Cell::Count(with.n_items as u64),
            Cell::Count(without.n_items as u64),
        ]);
    }
    Ok(t)
}

/// Metric labels, `(metric, variant)` ids and their sources for one task.
type SystemSources<'a> = (Vec<String>, Vec<(String, String)>, Vec<MetricSource<'a>>);

/// Metric labels, `(metric, variant)` ids and the hybrid scores of one task.
pub type TaskHybrids = (Vec<String>, Vec<(String, String)>, HybridOutput);

/// The system correlation table and, per task, labels and hybrid scores.
pub type SystemCorrelations = (ReportTable, BTreeMap<Task, (Vec<String>, HybridOutput)>);

/// Loaded campaign plus everything derived once and shared by the reports.
pub struct Analysis {
    pub campaign: Campaign,
    pub options: RunOptions,
    pub seed: u64,
    pub tasks: Vec<Task>,
    pub human: HumanScores,
    pub native: BTreeMap<Task, NativeScores>,
    pub selections: Vec<VariantSelection>,
}

impl Analysis {
    pub fn new(mut campaign: Campaign, options: RunOptions) -> Result<Self> {
        if let Some(unit) = options.length_unit {
            campaign.config.length_unit = unit;
        }
        let seed = options.seed.unwrap_or(campaign.config.seed);
        let tasks = campaign.config.tasks();
        let normalized = znormalize(&campaign.ratings, options.include_traps)?;
        let human = aggregate_segment_human(&normalized, campaign.config.annotators_per_task);
        for w in &human.warnings {
            log::warn!("{w}");
        }
        let native = tasks
            .iter()
            .map(|t| Ok((t.clone(), score_command(&campaign, t)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        let mut analysis = Analysis {
            campaign,
            options,
            seed,
            tasks,
            human,
            native,
            selections: Vec::new(),
        };
        analysis.check_metric_ids()?;
        analysis.selections = analysis.variant_selections()?;
        Ok(analysis)
    }

    pub fn load(config_path: &Path, options: RunOptions) -> Result<Self> {
        Analysis::new(Campaign::load(config_path)?, options)
    }

    fn check_metric_ids(&self) -> Result<()> {
        let native: BTreeSet<String> = self
            .native
            .values()
            .flat_map(|n| {
                n.rouge
                    .iter()
                    .map(|t| t.metric_id.clone())
                    .chain(n.corpus.iter().map(|c| c.metric_id.clone()))
            })
            .collect();
        for tables in self.campaign.external_scores.values() {
            if let Some(t) = tables.iter().find(|t| native.contains(&t.metric_id)) {
                return Err(Error::InvalidConfig(format!(
                    "external metric `{}` has the same id as a native metric",
                    t.metric_id
                )));
            }
        }
        Ok(())
    }

    fn external_by_metric(&self) -> BTreeMap<&str, Vec<&ScoreTable>> {
        let mut out: BTreeMap<&str, Vec<&ScoreTable>> = BTreeMap::new();
        for task in &self.tasks {
            for t in self.campaign.external_tables(task) {
                out.entry(t.metric_id.as_str()).or_default().push(t);
            }
        }
        out
    }

    fn system_level(&self) -> Level {
        Level::System {
            hybrids: self.options.hybrids,
            seed: self.seed,
        }
    }

    /// Best variant for every external metric that comes in more than one
    /// variant, chosen by average system-level correlation.
    pub fn variant_selections(&self) -> Result<Vec<VariantSelection>> {
        self.external_by_metric()
            .into_values()
            .filter(|tables| tables.iter().map(|t| &t.variant_id).collect::<BTreeSet<_>>().len() > 1)
            .map(|tables| select_best_variant(&tables, &self.human, &self.tasks, self.system_level()))
            .collect()
    }

    fn chosen_variant(&self, metric_id: &str) -> Option<&str> {
        self.selections
            .iter()
            .find(|s| s.metric_id == metric_id)
            .map(|s| s.chosen.variant_id.as_str())
    }

    /// Segment-level metric tables of a task: native ROUGE followed by the
    /// external metrics (selected variant only), ordered by metric id.
    pub fn segment_tables(&self, task: &Task) -> Result<Vec<&ScoreTable>> {
        let native = self
            .native
            .get(task)
            .ok_or_else(|| Error::MissingKey(format!("no native scores for {task}")))?;
        let mut external: Vec<&ScoreTable> = self
            .campaign
            .external_tables(task)
            .iter()
            .filter(|t| self.chosen_variant(&t.metric_id).is_none_or(|v| v == t.variant_id))
            .collect();
        external.sort_by(|a, b| (&a.metric_id, &a.variant_id).cmp(&(&b.metric_id, &b.variant_id)));
        Ok(native.rouge.iter().chain(external).collect())
    }

    /// Every metric of a task as hybrid sources, with display labels.
    fn system_sources(&self, task: &Task) -> Result<SystemSources<'_>> {
        let mut labels = Vec::new();
        let mut ids = Vec::new();
        let mut sources = Vec::new();
        for t in self.segment_tables(task)? {
            labels.push(t.metric_id.clone());
            ids.push((t.metric_id.clone(), t.variant_id.clone()));
            sources.push(MetricSource::Segment(t));
        }
        for c in &self.native[task].corpus {
            labels.push(c.metric_id.clone());
            ids.push((c.metric_id.clone(), c.variant_id.clone()));
            sources.push(MetricSource::Corpus(c));
        }
        Ok((labels, ids, sources))
    }

    /// Real plus hybrid systems of a task, scored by every metric.
    pub fn hybrids(&self, task: &Task) -> Result<TaskHybrids> {
        let (labels, ids, sources) = self.system_sources(task)?;
        let out = hybrid_supersample(
            task,
            &sources,
            self.human.task(task)?,
            self.options.hybrids,
            task_hybrid_seed(self.seed, task),
        )?;
        Ok((labels, ids, out))
    }

    pub fn qc_timing_table(&self) -> Result<ReportTable> {
        qc_timing_table(&self.campaign, self.options.timing_cutoff)
    }

    pub fn qc_traps_table(&self) -> ReportTable {
        qc_traps_table(&self.campaign)
    }

    pub fn agreement_table(&self) -> Result<ReportTable> {
        agreement_table(&self.campaign, self.options.agreement_scale)
    }

    fn correlation_table(&self, rows: Vec<((String, String), Vec<f64>)>) -> ReportTable {
        let mut header = vec!["metric".to_string(), "variant".to_string()];
        header.extend(task_columns(&self.tasks));
        header.push("average".into());
        let mut kinds = vec![Kind::Text, Kind::Text];
        kinds.extend(std::iter::repeat_n(Kind::Real, self.tasks.len() + 1));
        let mut t = ReportTable::with_columns(header, kinds);
        for ((metric, variant), values) in rows {
            let average = values.iter().sum::<f64>() / values.len() as f64;
            let mut row = vec![Cell::Text(metric), Cell::Text(variant)];
            row.extend(values.into_iter().map(Cell::Real));
            row.push(Cell::Real(average));
            t.push(row);
        }
        t
    }

    /// Pearson r with the human scores over real and hybrid systems, plus the
    /// per-task hybrid outputs it was computed from.
    pub fn system_correlations(&self) -> Result<SystemCorrelations> {
        let mut rows: Vec<((String, String), Vec<f64>)> = Vec::new();
        let mut outputs = BTreeMap::new();
        for (ti, task) in self.tasks.iter().enumerate() {
            let (labels, ids, out) = self.hybrids(task)?;
            for (i, (id, (_, values))) in ids.into_iter().zip(&out.metrics).enumerate() {
                let r = pearson(values, &out.human)?.value;
                if ti == 0 {
                    rows.push((id, vec![r]));
                } else if rows.get(i).is_some_and(|row| row.0 == id) {
                    rows[i].1.push(r);
                } else {
                    return Err(Error::MissingKey(format!("metric {}/{} missing for {task}", id.0, id.1)));
                }
            }
            outputs.insert(task.clone(), (labels, out));
        }
        Ok((self.correlation_table(rows), outputs))
    }

    /// Kendall tau-b with the human scores over pooled segment cells.
    pub fn segment_correlations(&self) -> Result<ReportTable> {
        let mut rows: Vec<((String, String), Vec<f64>)> = Vec::new();
        for (ti, task) in self.tasks.iter().enumerate() {
            let human = self.human.task(task)?;
            for (i, table) in self.segment_tables(task)?.into_iter().enumerate() {
                let id = (table.metric_id.clone(), table.variant_id.clone());
                let tau = segment_correlation(table, human)?.value;
                if ti == 0 {
                    rows.push((id, vec![tau]));
                } else if rows.get(i).is_some_and(|row| row.0 == id) {
                    rows[i].1.push(tau);
                } else {
                    return Err(Error::MissingKey(format!("metric {}/{} missing for {task}", id.0, id.1)));
                }
            }
        }
        Ok(self.correlation_table(rows))
    }

    pub fn variant_table(&self) -> ReportTable {
        let mut header: Vec<String> = ["metric", "variant", "level", "chosen"].map(String::from).to_vec();
        header.extend(task_columns(&self.tasks));
        header.push("average".into());
        let mut kinds = vec![Kind::Text, Kind::Text, Kind::Text, Kind::Flag];
        kinds.extend(std::iter::repeat_n(Kind::Real, self.tasks.len() + 1));
        let mut t = ReportTable::with_columns(header, kinds);
        for s in &self.selections {
            for c in &s.candidates {
                let mut row = vec![
                    Cell::text(&s.metric_id),
                    Cell::text(&c.variant_id),
                    Cell::text("system"),
                    Cell::Flag(c.variant_id == s.chosen.variant_id),
                ];
                row.extend(c.per_task.iter().map(|(_, r)| Cell::Real(*r)));
                row.push(Cell::Real(c.average));
                t.push(row);
            }
        }
        t
    }

    pub fn system_sig(&self, task: &Task, labels: &[String], out: &HybridOutput) -> Result<SigMatrix> {
        let metrics: Vec<(String, Vec<f64>)> = labels
            .iter()
            .cloned()
            .zip(out.metrics.iter().map(|(_, v)| v.clone()))
            .collect();
        system_sig_matrix(task, &metrics, &out.human, self.options.ci_level)
    }

    pub fn segment_sig(&self, task: &Task) -> Result<SigMatrix> {
        segment_sig_matrix(
            &self.segment_tables(task)?,
            self.human.task(task)?,
            self.options.permutations,
            self.seed,
            self.options.alpha,
        )
    }

    /// Mean segment score of every system under every segment-level metric.
    /// The best system of each (metric, task) is tested against every other
    /// system with the paired bootstrap; its p-value is the largest of
    /// those comparisons.
    pub fn system_eval_table(&self) -> Result<ReportTable> {
        let mut t = ReportTable::new(&[
            ("metric", Kind::Text),
            ("variant", Kind::Text),
            ("task", Kind::Text),
            ("system", Kind::Text),
            ("score", Kind::Real),
            ("p_value", Kind::Real),
            ("mark", Kind::Text),
        ]);
        for task in &self.tasks {
            for table in self.segment_tables(task)? {
                let scores = system_scores(table)?.scores;
                let best = scores
                    .iter()
                    .fold(None::<(&String, f64)>, |acc, (s, &v)| match acc {
                        Some((_, bv)) if bv >= v => acc,
                        _ => Some((s, v)),
                    })
                    .map(|(s, _)| s.clone())
                    .ok_or(Error::EmptySet("systems"))?;
                let per_system = |system: &str| -> BTreeMap<String, f64> {
                    table
                        .segment_cells()
                        .into_iter()
                        .flatten()
                        .filter(|((s, _), _)| s == system)
                        .map(|((_, g), v)| (g.clone(), *v))
                        .collect()
                };
                let best_cells = per_system(&best);
                let mut p_best: Option<f64> = None;
                for rival in scores.keys().filter(|s| **s != best) {
                    let tag = format!("bootstrap:{task}:{}:{best}:{rival}", table.name());
                    let p = paired_bootstrap_keyed(
                        &best_cells,
                        &per_system(rival),
                        self.options.bootstrap,
                        derive_seed(self.seed, &tag, 0),
                    )?;
                    p_best = Some(p_best.map_or(p, |q| q.max(p)));
                }
                for (system, score) in &scores {
                    let p = if *system == best { p_best } else { None };
                    t.push(vec![
                        Cell::text(&table.metric_id),
                        Cell::text(&table.variant_id),
                        Cell::text(task.to_string()),
                        Cell::text(system),
                        Cell::Real(*score),
                        Cell::real_opt(p),
                        Cell::text(p.map_or("", dagger)),
                    ]);
                }
            }
        }
        Ok(t)
    }

    pub fn length_deviation_table(&self) -> Result<ReportTable> {
        let mut header = vec!["system".to_string()];
        header.extend(task_columns(&self.tasks));
        let mut kinds = vec![Kind::Text];
        kinds.extend(std::iter::repeat_n(Kind::Real, self.tasks.len()));
        let mut t = ReportTable::with_columns(header, kinds);
        for system in &self.campaign.config.systems {
            let mut row = vec![Cell::text(system)];
            for task in &self.tasks {
                let records = self.native[task]
                    .length_records
                    .get(system)
                    .ok_or_else(|| Error::MissingKey(format!("no lengths for {system} in {task}")))?;
                row.push(Cell::Real(length_deviation(records)?));
            }
            t.push(row);
        }
        Ok(t)
    }

    /// Every report file as `(file name, contents)`, in a fixed order.
    pub fn render_all(&self) -> Result<Vec<(String, String)>> {
        let mut files = vec![
            ("qc_timing.csv".to_string(), self.qc_timing_table()?.to_csv()),
            ("qc_traps.csv".to_string(), self.qc_traps_table().to_csv()),
            ("agreement.csv".to_string(), self.agreement_table()?.to_csv()),
        ];
        let (system_corr, outputs) = self.system_correlations()?;
        files.push(("correlations_system.csv".into(), system_corr.to_csv()));
        files.push(("correlations_segment.csv".into(), self.segment_correlations()?.to_csv()));
        files.push(("variant_selection.csv".into(), self.variant_table().to_csv()));
        for (task, (labels, out)) in &outputs {
            let system = self.system_sig(task, labels, out)?;
            let segment = self.segment_sig(task)?;
            for (kind, m) in [("system", &system), ("segment", &segment)] {
                for f in SigFormat::ALL {
                    files.push((
                        format!("sig_{kind}_{}.{}", task.file_label(), f.extension()),
                        emit_sig_matrix(m, f),
                    ));
                }
            }
        }
        files.push(("system_eval.csv".into(), self.system_eval_table()?.to_csv()));
        files.push(("length_deviation.csv".into(), self.length_deviation_table()?.to_csv()));
        Ok(files)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileDigest {
    pub name: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineArtifacts {
    pub tool_version: String,
    pub master_seed: u64,
    pub config_sha256: String,
    pub options: RunOptions,
    pub files: Vec<FileDigest>,
}

/// Writes named files into `dir`, creating it if needed.
pub fn write_files(dir: &Path, files: &[(String, String)]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    files
        .iter()
        .map(|(name, body)| {
            let path = dir.join(name);
            fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
            Ok(path)
        })
        .collect()
}

/// Loads the campaign, writes every report into `out_dir` and a manifest of
/// their digests.
pub fn run_pipeline(config_path: &Path, out_dir: &Path, options: &RunOptions) -> Result<PipelineArtifacts> {
    let config_bytes = fs::read(config_path).map_err(|e| Error::io(config_path, e))?;
    let options = options.clone();
    with_threads(options.threads, move || {
        let analysis = Analysis::load(config_path, options.clone())?;
        let files = analysis.render_all()?;
        write_files(out_dir, &files)?;
        let artifacts = PipelineArtifacts {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            master_seed: analysis.seed,
            config_sha256: sha256_hex(&config_bytes),
            options,
            files: files
                .iter()
                .map(|(name, body)| FileDigest {
                    name: name.clone(),
                    sha256: sha256_hex(body.as_bytes()),
                })
                .collect(),
        };
        let mut manifest = serde_json::to_string_pretty(&artifacts).expect("manifest serializes");
        manifest.push('\n');
        write_files(out_dir, &[(MANIFEST_FILE.to_string(), manifest)])?;
        Ok(artifacts)
    })?
}

/// Aggregated human segment scores, one row per `(task, system, segment)`.
pub fn human_scores_table(human: &HumanScores) -> ReportTable {
    let mut t = ReportTable::new(&[
        ("task", Kind::Text),
        ("system", Kind::Text),
        ("seg_id", Kind::Text),
        ("z", Kind::Real),
        ("ratings", Kind::Count),
    ]);
    for (task, cells) in &human.scores {
        for ((system, seg), z) in cells {
            let count = human
                .rating_counts
                .get(task)
                .and_then(|c| c.get(&(system.clone(), seg.clone())))
                .copied()
                .unwrap_or(0);
            t.push(vec![
                Cell::text(task.to_string()),
                Cell::text(system),
                Cell::text(seg),
                Cell::Real(*z),
                Cell::Count(count as u64),
            ]);
        }
    }
    t
}

/// System-level native scores: per-system means of the segment tables and
/// corpus BLEU/BLEU*.
pub fn native_system_table(native: &[&NativeScores]) -> Result<ReportTable> {
    let mut t = ReportTable::new(&[
        ("metric", Kind::Text),
        ("variant", Kind::Text),
        ("task", Kind::Text),
        ("system", Kind::Text),
        ("score", Kind::Real),
    ]);
    for n in native {
        let mut tables: Vec<ScoreTable> = n.rouge.clone();
        tables.push(n.length.clone());
        tables.extend(n.bleu_tables()?);
        for table in &tables {
            for (system, score) in system_scores(table)?.scores {
                t.push(vec![
                    Cell::text(&table.metric_id),
                    Cell::text(&table.variant_id),
                    Cell::text(n.task.to_string()),
                    Cell::Text(system),
                    Cell::Real(score),
                ]);
            }
        }
    }
    Ok(t)
}
