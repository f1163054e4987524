use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use crate::corpus::config::CampaignConfig;
use crate::corpus::records::{HypothesisRecord, RatingRecord, SegmentRecord};
use crate::corpus::scores::{load_external_scores, write_external_scores};
use crate::error::{Error, Result};
use crate::meta_eval::table::ScoreTable;
use crate::task::{LengthRatio, Task};

pub const RATINGS_HEADER: [&str; 7] = ["annotator", "seg_id", "system", "ratio", "score", "duration_s", "is_trap"];

/// A fully loaded, cross-checked evaluation campaign. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Campaign {
    pub config: CampaignConfig,
    pub segments: Vec<SegmentRecord>,
    pub hypotheses: Vec<HypothesisRecord>,
    pub ratings: Vec<RatingRecord>,
    pub external_scores: BTreeMap<Task, Vec<ScoreTable>>,
}

/// seg_id -> directions it occurs in
struct SegmentIndex(BTreeMap<String, Vec<String>>);

impl SegmentIndex {
    fn new(segments: &[SegmentRecord]) -> Self {
        let mut map: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for s in segments {
            map.entry(s.seg_id.clone()).or_default().push(s.direction.clone());
        }
        SegmentIndex(map)
    }

    fn resolve(&self, seg_id: &str, direction: Option<&str>) -> Option<String> {
        let dirs = self.0.get(seg_id)?;
        match direction {
            Some(d) => dirs.iter().find(|x| x.as_str() == d).cloned(),
            None if dirs.len() == 1 => Some(dirs[0].clone()),
            None => None,
        }
    }
}

impl Campaign {
    pub fn load(config_path: &Path) -> Result<Campaign> {
        let config = CampaignConfig::load(config_path)?;
        let base = config_path.parent().unwrap_or(Path::new("."));
        let resolve = |p: &Path| -> PathBuf {
            if p.is_absolute() {
                p.to_path_buf()
            } else {
                base.join(p)
            }
        };

        let segments = read_segments(&resolve(&config.paths.segments), &config)?;
        let index = SegmentIndex::new(&segments);
        let hypotheses = read_hypotheses(&resolve(&config.paths.hypotheses), &config, &index)?;
        let ratings = read_ratings(&resolve(&config.paths.ratings), &config, &index)?;

        let mut external_scores = BTreeMap::new();
        for (task, path) in &config.paths.scores {
            let segs: BTreeSet<String> = segments
                .iter()
                .filter(|s| s.direction == task.direction)
                .map(|s| s.seg_id.clone())
                .collect();
            let tables = load_external_scores(&resolve(path), task, &segs, &config.systems)?;
            external_scores.insert(task.clone(), tables);
        }

        Ok(Campaign {
            config,
            segments,
            hypotheses,
            ratings,
            external_scores,
        })
    }

    /// Writes the campaign under `dir` using the config's relative data paths
    /// (absolute paths are replaced by their file names).
    pub fn save(&self, dir: &Path) -> Result<PathBuf> {
        let mut config = self.config.clone();
        let relative = |p: &Path| -> PathBuf {
            if p.is_absolute() {
                PathBuf::from(p.file_name().unwrap_or_default())
            } else {
                p.to_path_buf()
            }
        };
        config.paths.segments = relative(&config.paths.segments);
        config.paths.hypotheses = relative(&config.paths.hypotheses);
        config.paths.ratings = relative(&config.paths.ratings);
        for task in self.external_scores.keys() {
            let path = config
                .paths
                .scores
                .get(task)
                .map(|p| relative(p))
                .unwrap_or_else(|| PathBuf::from(format!("scores_{}.tsv", task.file_label())));
            config.paths.scores.insert(task.clone(), path);
        }

        let write = |rel: &Path, contents: &str| -> Result<()> {
            let path = dir.join(rel);
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
            }
            std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))
        };

        write(&config.paths.segments, &to_jsonl(&self.segments)?)?;
        write(&config.paths.hypotheses, &to_jsonl(&self.hypotheses)?)?;
        write(&config.paths.ratings, &write_ratings(&self.ratings))?;
        for (task, tables) in &self.external_scores {
            write(&config.paths.scores[task], &write_external_scores(tables)?)?;
        }
        let conf_path = dir.join("campaign.conf");
        write(Path::new("campaign.conf"), &config.to_conf_string())?;
        Ok(conf_path)
    }

    /// Segment ids of a direction in lexicographic order.
    pub fn segment_ids(&self, direction: &str) -> Vec<String> {
        let mut ids: Vec<String> = self
            .segments
            .iter()
            .filter(|s| s.direction == direction)
            .map(|s| s.seg_id.clone())
            .collect();
        ids.sort();
        ids
    }

    pub fn segment(&self, direction: &str, seg_id: &str) -> Option<&SegmentRecord> {
        self.segments
            .iter()
            .find(|s| s.direction == direction && s.seg_id == seg_id)
    }

    pub fn segment_map(&self, direction: &str) -> BTreeMap<&str, &SegmentRecord> {
        self.segments
            .iter()
            .filter(|s| s.direction == direction)
            .map(|s| (s.seg_id.as_str(), s))
            .collect()
    }

    /// Hypotheses of one task keyed by `(system, seg_id)`.
    pub fn hypotheses_for(&self, task: &Task) -> BTreeMap<(String, String), &HypothesisRecord> {
        self.hypotheses
            .iter()
            .filter(|h| h.direction == task.direction && h.length_ratio == task.ratio)
            .map(|h| ((h.system_id.clone(), h.seg_id.clone()), h))
            .collect()
    }

    pub fn ratings_for(&self, task: &Task) -> Vec<&RatingRecord> {
        self.ratings.iter().filter(|r| &r.task == task).collect()
    }

    pub fn external_tables(&self, task: &Task) -> &[ScoreTable] {
        self.external_scores.get(task).map(Vec::as_slice).unwrap_or(&[])
    }
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn jsonl_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty())
}

fn to_jsonl<T: serde::Serialize>(items: &[T]) -> Result<String> {
    let mut out = String::new();
    for item in items {
        out.push_str(&serde_json::to_string(item).map_err(|e| Error::InvalidConfig(e.to_string()))?);
        out.push('\n');
    }
    Ok(out)
}

fn read_segments(path: &Path, config: &CampaignConfig) -> Result<Vec<SegmentRecord>> {
    let text = read_text(path)?;
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for (line, raw) in jsonl_lines(&text) {
        let seg: SegmentRecord = serde_json::from_str(raw).map_err(|e| Error::parse(path, line, e.to_string()))?;
        if !config.directions.contains(&seg.direction) {
            return Err(Error::UnresolvedReference {
                file: path.into(),
                line,
                kind: "direction",
                id: seg.direction,
            });
        }
        if seg.source_text.is_empty() || seg.reference_text.is_empty() {
            return Err(Error::parse(path, line, format!("segment `{}` has empty text", seg.seg_id)));
        }
        if !seen.insert((seg.direction.clone(), seg.seg_id.clone())) {
            return Err(Error::parse(
                path,
                line,
                format!("duplicate segment `{}` in {}", seg.seg_id, seg.direction),
            ));
        }
        out.push(seg);
    }
    Ok(out)
}

fn read_hypotheses(path: &Path, config: &CampaignConfig, index: &SegmentIndex) -> Result<Vec<HypothesisRecord>> {
    let text = read_text(path)?;
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for (line, raw) in jsonl_lines(&text) {
        let mut hyp: HypothesisRecord =
            serde_json::from_str(raw).map_err(|e| Error::parse(path, line, e.to_string()))?;
        let given = (!hyp.direction.is_empty()).then_some(hyp.direction.as_str());
        hyp.direction = index
            .resolve(&hyp.seg_id, given)
            .ok_or_else(|| Error::UnresolvedReference {
                file: path.into(),
                line,
                kind: "seg_id",
                id: hyp.seg_id.clone(),
            })?;
        if !config.has_system(&hyp.system_id) {
            return Err(Error::UnresolvedReference {
                file: path.into(),
                line,
                kind: "system_id",
                id: hyp.system_id,
            });
        }
        if !config.length_ratios.contains(&hyp.length_ratio) {
            return Err(Error::parse(
                path,
                line,
                format!("length ratio {} is not listed in the config", hyp.length_ratio),
            ));
        }
        let key = (hyp.system_id.clone(), hyp.direction.clone(), hyp.seg_id.clone(), hyp.length_ratio);
        if !seen.insert(key) {
            return Err(Error::parse(
                path,
                line,
                format!(
                    "duplicate hypothesis ({}, {}, {})",
                    hyp.system_id, hyp.seg_id, hyp.length_ratio
                ),
            ));
        }
        out.push(hyp);
    }
    Ok(out)
}

fn parse_bool(s: &str) -> Option<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "true" | "1" | "yes" => Some(true),
        "false" | "0" | "no" => Some(false),
        _ => None,
    }
}

/// Reads `ratings.csv`. An optional `direction` column disambiguates segment
/// ids shared between directions.
fn read_ratings(path: &Path, config: &CampaignConfig, index: &SegmentIndex) -> Result<Vec<RatingRecord>> {
    let text = read_text(path)?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::parse(path, 1, e.to_string()))?
        .clone();
    let col = |name: &str| headers.iter().position(|h| h.trim() == name);
    let mut cols = [0usize; 7];
    for (slot, name) in cols.iter_mut().zip(RATINGS_HEADER) {
        *slot = col(name).ok_or_else(|| Error::parse(path, 1, format!("missing column `{name}`")))?;
    }
    let direction_col = col("direction");

    let mut out = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
            Error::parse(path, line, e.to_string())
        })?;
        let line = row.position().map(|p| p.line() as usize).unwrap_or(0);
        let field = |i: usize| row.get(cols[i]).unwrap_or("").trim();
        let annotator_id = field(0).to_string();
        let seg_id = field(1).to_string();
        let system_id = field(2).to_string();
        if annotator_id.is_empty() {
            return Err(Error::parse(path, line, "empty annotator id"));
        }
        let ratio: LengthRatio = field(3)
            .parse()
            .map_err(|e: Error| Error::parse(path, line, e.to_string()))?;
        if !config.length_ratios.contains(&ratio) {
            return Err(Error::parse(
                path,
                line,
                format!("length ratio {ratio} is not listed in the config"),
            ));
        }
        let raw_score: u8 = field(4)
            .parse()
            .ok()
            .filter(|s| *s <= 100)
            .ok_or_else(|| Error::parse(path, line, format!("score `{}` is not an integer in 0..=100", field(4))))?;
        let duration_s: f64 = field(5)
            .parse()
            .ok()
            .filter(|d: &f64| d.is_finite() && *d >= 0.0)
            .ok_or_else(|| Error::parse(path, line, format!("bad duration `{}`", field(5))))?;
        let is_trap =
            parse_bool(field(6)).ok_or_else(|| Error::parse(path, line, format!("bad is_trap `{}`", field(6))))?;
        let given = direction_col.map(|c| row.get(c).unwrap_or("").trim()).filter(|d| !d.is_empty());
        let direction = index.resolve(&seg_id, given).ok_or_else(|| Error::UnresolvedReference {
            file: path.into(),
            line,
            kind: "seg_id",
            id: seg_id.clone(),
        })?;
        if !is_trap && !config.has_system(&system_id) {
            return Err(Error::UnresolvedReference {
                file: path.into(),
                line,
                kind: "system_id",
                id: system_id,
            });
        }
        out.push(RatingRecord {
            annotator_id,
            task: Task::new(direction, ratio),
            seg_id,
            system_id,
            raw_score,
            duration_s,
            is_trap,
        });
    }
    Ok(out)
}

fn write_ratings(ratings: &[RatingRecord]) -> String {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let mut header: Vec<&str> = RATINGS_HEADER.to_vec();
    header.push("direction");
    writer.write_record(&header).expect("in-memory write");
    for r in ratings {
        writer
            .write_record([
                r.annotator_id.as_str(),
                r.seg_id.as_str(),
                r.system_id.as_str(),
                &r.task.ratio.to_string(),
                &r.raw_score.to_string(),
                &r.duration_s.to_string(),
                if r.is_trap { "true" } else { "false" },
                r.task.direction.as_str(),
            ])
            .expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 input")
}
