//! `campaign.conf`: flat `key = value` configuration.
//!
//! ```text
//! directions = en-zh, zh-en
//! ratios = 0.8, 0.5
//! systems = target-emb, length-emb
//! annotators_per_task = 3
//! length_unit = characters
//! seed = 42
//! segments = segments.jsonl
//! hypotheses = hypotheses.jsonl
//! ratings = ratings.csv
//! scores.en-zh.0.8 = scores/en-zh_0.8.tsv
//! ```
//!
//! Lists are comma separated. `#` starts a comment line. Data paths are
//! relative to the directory holding the config file.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lexical::Scheme;
use crate::task::{LengthRatio, Task};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LengthUnit {
    Characters,
    WhitespaceTokens,
    ProvidedCounts,
}

impl LengthUnit {
    pub fn as_str(self) -> &'static str {
        match self {
            LengthUnit::Characters => "characters",
            LengthUnit::WhitespaceTokens => "whitespace-tokens",
            LengthUnit::ProvidedCounts => "provided-counts",
        }
    }

    /// Tokenization scheme used to count lengths in this unit. Provided counts
    /// have no scheme of their own; callers fall back to the target language.
    pub fn scheme(self) -> Option<Scheme> {
        match self {
            LengthUnit::Characters => Some(Scheme::Character),
            LengthUnit::WhitespaceTokens => Some(Scheme::Whitespace),
            LengthUnit::ProvidedCounts => None,
        }
    }
}

impl FromStr for LengthUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "characters" => Ok(LengthUnit::Characters),
            "whitespace-tokens" => Ok(LengthUnit::WhitespaceTokens),
            "provided-counts" => Ok(LengthUnit::ProvidedCounts),
            other => Err(Error::InvalidConfig(format!("unknown length unit `{other}`"))),
        }
    }
}

/// Locations of the campaign's data files, as written in the config.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataPaths {
    pub segments: PathBuf,
    pub hypotheses: PathBuf,
    pub ratings: PathBuf,
    pub scores: BTreeMap<Task, PathBuf>,
}

impl Default for DataPaths {
    fn default() -> Self {
        DataPaths {
            segments: "segments.jsonl".into(),
            hypotheses: "hypotheses.jsonl".into(),
            ratings: "ratings.csv".into(),
            scores: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CampaignConfig {
    pub directions: Vec<String>,
    pub length_ratios: Vec<LengthRatio>,
    pub systems: Vec<String>,
    pub annotators_per_task: usize,
    pub length_unit: LengthUnit,
    pub seed: u64,
    pub paths: DataPaths,
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<()> {
        if self.directions.is_empty() {
            return Err(Error::InvalidConfig("no directions".into()));
        }
        if self.length_ratios.is_empty() {
            return Err(Error::InvalidConfig("no length ratios".into()));
        }
        if self.systems.is_empty() {
            return Err(Error::InvalidConfig("no systems".into()));
        }
        if self.annotators_per_task == 0 {
            return Err(Error::InvalidConfig("annotators_per_task must be at least 1".into()));
        }
        check_unique("direction", self.directions.iter().map(String::as_str))?;
        check_unique("system", self.systems.iter().map(String::as_str))?;
        let ratios: Vec<String> = self.length_ratios.iter().map(ToString::to_string).collect();
        check_unique("ratio", ratios.iter().map(String::as_str))?;
        for task in self.paths.scores.keys() {
            if !self.has_task(task) {
                return Err(Error::InvalidConfig(format!("scores given for unknown task {task}")));
            }
        }
        Ok(())
    }

    /// Tasks in config order: directions outer, ratios inner.
    pub fn tasks(&self) -> Vec<Task> {
        self.directions
            .iter()
            .flat_map(|d| self.length_ratios.iter().map(move |&r| Task::new(d.clone(), r)))
            .collect()
    }

    pub fn has_task(&self, task: &Task) -> bool {
        self.directions.contains(&task.direction) && self.length_ratios.contains(&task.ratio)
    }

    pub fn has_system(&self, system: &str) -> bool {
        self.systems.iter().any(|s| s == system)
    }

    pub fn parse(text: &str, file: &Path) -> Result<Self> {
        let mut values: BTreeMap<String, (usize, String)> = BTreeMap::new();
        let mut scores = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(file, line_no, "expected key = value"))?;
            let key = key.trim();
            let value = value.trim().to_string();
            if let Some(rest) = key.strip_prefix("scores.") {
                let (direction, ratio) = rest
                    .split_once('.')
                    .ok_or_else(|| Error::parse(file, line_no, format!("bad scores key `{key}`")))?;
                let ratio: LengthRatio = ratio
                    .parse()
                    .map_err(|e| Error::parse(file, line_no, format!("{e}")))?;
                let task = Task::new(direction, ratio);
                if scores.insert(task, PathBuf::from(value)).is_some() {
                    return Err(Error::parse(file, line_no, format!("duplicate key `{key}`")));
                }
                continue;
            }
            match key {
                "directions" | "ratios" | "systems" | "annotators_per_task" | "length_unit" | "seed"
                | "segments" | "hypotheses" | "ratings" => {}
                _ => return Err(Error::parse(file, line_no, format!("unknown key `{key}`"))),
            }
            if values.insert(key.to_string(), (line_no, value)).is_some() {
                return Err(Error::parse(file, line_no, format!("duplicate key `{key}`")));
            }
        }

        let required = |k: &str| -> Result<(usize, &str)> {
            values
                .get(k)
                .map(|(l, v)| (*l, v.as_str()))
                .ok_or_else(|| Error::parse(file, 0, format!("missing key `{k}`")))
        };
        let list = |v: &str| -> Vec<String> {
            v.split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(String::from)
                .collect()
        };

        let directions = list(required("directions")?.1);
        let (ratio_line, ratio_text) = required("ratios")?;
        let length_ratios = list(ratio_text)
            .iter()
            .map(|r| r.parse::<LengthRatio>())
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::parse(file, ratio_line, e.to_string()))?;
        let systems = list(required("systems")?.1);
        let (l, v) = required("annotators_per_task")?;
        let annotators_per_task = v
            .parse()
            .map_err(|_| Error::parse(file, l, format!("bad annotators_per_task `{v}`")))?;
        let length_unit = match values.get("length_unit") {
            Some((l, v)) => v.parse().map_err(|e: Error| Error::parse(file, *l, e.to_string()))?,
            None => LengthUnit::Characters,
        };
        let seed = match values.get("seed") {
            Some((l, v)) => v
                .parse()
                .map_err(|_| Error::parse(file, *l, format!("bad seed `{v}`")))?,
            None => 0,
        };
        let mut paths = DataPaths::default();
        if let Some((_, v)) = values.get("segments") {
            paths.segments = v.into();
        }
        if let Some((_, v)) = values.get("hypotheses") {
            paths.hypotheses = v.into();
        }
        if let Some((_, v)) = values.get("ratings") {
            paths.ratings = v.into();
        }
        paths.scores = scores;

        let config = CampaignConfig {
            directions,
            length_ratios,
            systems,
            annotators_per_task,
            length_unit,
            seed,
            paths,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn to_conf_string(&self) -> String {
        let ratios: Vec<String> = self.length_ratios.iter().map(ToString::to_string).collect();
        let mut out = String::new();
        let _ = writeln!(out, "directions = {}", self.directions.join(", "));
        let _ = writeln!(out, "ratios = {}", ratios.join(", "));
        let _ = writeln!(out, "systems = {}", self.systems.join(", "));
        let _ = writeln!(out, "annotators_per_task = {}", self.annotators_per_task);
        let _ = writeln!(out, "length_unit = {}", self.length_unit.as_str());
        let _ = writeln!(out, "seed = {}", self.seed);
        let _ = writeln!(out, "segments = {}", self.paths.segments.display());
        let _ = writeln!(out, "hypotheses = {}", self.paths.hypotheses.display());
        let _ = writeln!(out, "ratings = {}", self.paths.ratings.display());
        for (task, path) in &self.paths.scores {
            let _ = writeln!(out, "scores.{}.{} = {}", task.direction, task.ratio, path.display());
        }
        out
    }
}

fn check_unique<'a>(what: &str, items: impl Iterator<Item = &'a str>) -> Result<()> {
    let mut seen = BTreeSet::new();
    for item in items {
        if !seen.insert(item) {
            return Err(Error::InvalidConfig(format!("duplicate {what} `{item}`")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# sample
directions = en-zh, zh-en
ratios = 0.8, 0.5
systems = a, b
annotators_per_task = 3
length_unit = whitespace-tokens
seed = 7
scores.en-zh.0.8 = s.tsv
";

    #[test]
    fn parses_sample() {
        let c = CampaignConfig::parse(SAMPLE, Path::new("c.conf")).unwrap();
        assert_eq!(c.directions, ["en-zh", "zh-en"]);
        assert_eq!(c.length_ratios.len(), 2);
        assert_eq!(c.annotators_per_task, 3);
        assert_eq!(c.length_unit, LengthUnit::WhitespaceTokens);
        assert_eq!(c.seed, 7);
        assert_eq!(c.tasks().len(), 4);
        assert_eq!(c.tasks()[1].to_string(), "en-zh@0.5");
        let task: Task = "en-zh@0.8".parse().unwrap();
        assert_eq!(c.paths.scores[&task], PathBuf::from("s.tsv"));
    }

    #[test]
    fn conf_string_round_trip() {
        let c = CampaignConfig::parse(SAMPLE, Path::new("c.conf")).unwrap();
        let again = CampaignConfig::parse(&c.to_conf_string(), Path::new("c.conf")).unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn rejects_bad_values() {
        let bad_ratio = SAMPLE.replace("0.8, 0.5", "0.8, 1.5");
        match CampaignConfig::parse(&bad_ratio, Path::new("c.conf")) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        let dup = SAMPLE.replace("systems = a, b", "systems = a, a");
        assert!(matches!(
            CampaignConfig::parse(&dup, Path::new("c.conf")),
            Err(Error::InvalidConfig(_))
        ));
        let zero = SAMPLE.replace("annotators_per_task = 3", "annotators_per_task = 0");
        assert!(CampaignConfig::parse(&zero, Path::new("c.conf")).is_err());
        let unknown = format!("{SAMPLE}colour = blue\n");
        assert!(matches!(
            CampaignConfig::parse(&unknown, Path::new("c.conf")),
            Err(Error::Parse { line: 9, .. })
        ));
        let bad_task = format!("{SAMPLE}scores.de-en.0.8 = x.tsv\n");
        assert!(CampaignConfig::parse(&bad_task, Path::new("c.conf")).is_err());
    }
}
