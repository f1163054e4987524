//! Writes the bundled synthetic campaign.
//!
//! ```text
//! cargo run --example make_fixture -- crates/core/fixtures/synthetic
//! ```

use std::collections::BTreeMap;
use std::path::PathBuf;

use lcmeval::corpus::{Campaign, CampaignConfig, DataPaths, HypothesisRecord, LengthUnit, RatingRecord, SegmentRecord};
use lcmeval::meta_eval::ScoreTable;
use lcmeval::ratings::schedule_traps;
use lcmeval::seed::rng_for;
use lcmeval::{LengthRatio, Task};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

const SEGMENTS: usize = 12;
const ANNOTATORS: usize = 3;
const TRAPS_PER_ANNOTATOR: usize = 2;
const SEED: u64 = 20221;

const EN: &[&str] = &[
    "the", "a", "report", "city", "council", "said", "new", "plan", "will", "open", "school", "next", "year", "people",
    "water", "river", "bridge", "market", "price", "rose", "fell", "team", "won", "game", "after", "long", "week",
    "rain", "road", "closed", "children", "park", "music", "night", "train", "late", "morning", "doctor", "health",
    "workers",
];
const ZH: &[char] = &[
    '明', '天', '是', '个', '人', '表', '演', '不', '一', '样', '城', '市', '议', '会', '新', '计', '划', '学', '校',
    '年', '水', '河', '桥', '场', '价', '格', '上', '涨', '下', '队', '赢', '比', '赛', '雨', '路', '关', '闭', '孩',
    '子', '公',
];

fn words(rng: &mut ChaCha8Rng, zh: bool, n: usize) -> Vec<String> {
    (0..n)
        .map(|_| {
            if zh {
                ZH[rng.random_range(0..ZH.len())].to_string()
            } else {
                EN[rng.random_range(0..EN.len())].to_string()
            }
        })
        .collect()
}

fn join(tokens: &[String], zh: bool) -> String {
    if zh {
        tokens.concat()
    } else {
        tokens.join(" ")
    }
}

fn main() {
    let out: PathBuf = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "crates/core/fixtures/synthetic".into())
        .into();
    let directions = ["en-zh", "zh-en"];
    let ratios: Vec<LengthRatio> = ["0.8", "0.5"].iter().map(|r| r.parse().unwrap()).collect();
    let systems = ["length-embed", "target-embed"];
    let mut rng = rng_for(SEED, "fixture", 0);
    let noise = Normal::new(0.0, 1.0).unwrap();

    let mut segments = Vec::new();
    for dir in directions {
        let target_zh = dir.ends_with("zh");
        for i in 0..SEGMENTS {
            let len = rng.random_range(10..22);
            let reference = words(&mut rng, target_zh, len);
            let source = words(&mut rng, !target_zh, len);
            segments.push(SegmentRecord {
                seg_id: format!("{}-{:03}", dir.replace('-', ""), i + 1),
                direction: dir.to_string(),
                source_text: join(&source, !target_zh),
                reference_text: join(&reference, target_zh),
                reference_length: Some(len),
            });
        }
    }

    let mut hypotheses = Vec::new();
    let mut quality: BTreeMap<(Task, String, String), f64> = BTreeMap::new();
    for seg in &segments {
        let target_zh = seg.direction.ends_with("zh");
        let reference: Vec<String> = if target_zh {
            seg.reference_text.chars().map(String::from).collect()
        } else {
            seg.reference_text.split(' ').map(String::from).collect()
        };
        for &ratio in &ratios {
            for (s, system) in systems.iter().enumerate() {
                let error_rate = rng.random_range(0.05..0.45) + 0.05 * s as f64;
                let target = ratio.scale_round_half_up(reference.len()).max(1);
                let jitter: i64 = if s == 0 { rng.random_range(-1..=1) } else { 0 };
                let len = (target as i64 + jitter).max(1) as usize;
                let mut kept = 0usize;
                let mut tokens = Vec::with_capacity(len);
                for i in 0..len {
                    if i < reference.len() && !rng.random_bool(error_rate) {
                        tokens.push(reference[i].clone());
                        kept += 1;
                    } else {
                        tokens.extend(words(&mut rng, target_zh, 1));
                    }
                }
                let task = Task::new(seg.direction.clone(), ratio);
                quality.insert(
                    (task, system.to_string(), seg.seg_id.clone()),
                    kept as f64 / len as f64,
                );
                hypotheses.push(HypothesisRecord {
                    system_id: system.to_string(),
                    seg_id: seg.seg_id.clone(),
                    direction: seg.direction.clone(),
                    length_ratio: ratio,
                    text: join(&tokens, target_zh),
                    output_length: Some(len),
                });
            }
        }
    }

    let mut paths = DataPaths::default();
    let config = {
        let mut c = CampaignConfig {
            directions: directions.iter().map(|d| d.to_string()).collect(),
            length_ratios: ratios.clone(),
            systems: systems.iter().map(|s| s.to_string()).collect(),
            annotators_per_task: ANNOTATORS,
            length_unit: LengthUnit::ProvidedCounts,
            seed: SEED,
            paths: DataPaths::default(),
        };
        for t in c.tasks() {
            paths
                .scores
                .insert(t.clone(), format!("scores_{}.tsv", t.file_label()).into());
        }
        c.paths = paths;
        c
    };

    let annotator = |task: &Task, slot: usize| format!("{}-{}-a{}", task.direction, task.ratio, slot + 1);
    let mut ratings = Vec::new();
    let bias: Vec<(f64, f64)> = (0..ANNOTATORS)
        .map(|_| (rng.random_range(-10.0..10.0), rng.random_range(0.7..1.2)))
        .collect();
    for ((task, system, seg_id), q) in &quality {
        for (slot, (b, scale)) in bias.iter().enumerate() {
            let raw = (b + scale * 100.0 * q + 8.0 * noise.sample(&mut rng)).round().clamp(0.0, 100.0);
            let duration = if rng.random_bool(0.05) {
                rng.random_range(600.0..1500.0)
            } else {
                rng.random_range(20.0..160.0)
            };
            ratings.push(RatingRecord {
                annotator_id: annotator(task, slot),
                task: task.clone(),
                seg_id: seg_id.clone(),
                system_id: system.clone(),
                raw_score: raw as u8,
                duration_s: (duration * 100.0_f64).round() / 100.0,
                is_trap: false,
            });
        }
    }
    let traps = schedule_traps(&config, &segments, TRAPS_PER_ANNOTATOR, SEED).expect("traps");
    for t in traps {
        let task = Task::new(t.direction.clone(), t.pair.ratio);
        let score = match rng.random_range(0..10) {
            0..=6 => 0,
            7 | 8 => rng.random_range(1..=20),
            _ => rng.random_range(21..=60),
        };
        ratings.push(RatingRecord {
            annotator_id: annotator(&task, t.annotator_slot),
            task,
            seg_id: t.pair.seg_id.clone(),
            system_id: "trap".into(),
            raw_score: score,
            duration_s: rng.random_range(10.0..60.0_f64).round(),
            is_trap: true,
        });
    }

    let variants = [("L4-F1", 0.25), ("L8-R", 0.08), ("L12-P", 0.18)];
    let mut external_scores = BTreeMap::new();
    for task in config.tasks() {
        let mut tables = Vec::new();
        for (variant, sd) in variants {
            let cells = quality
                .iter()
                .filter(|((t, _, _), _)| *t == task)
                .map(|((_, s, g), q)| ((s.clone(), g.clone()), q + sd * noise.sample(&mut rng)))
                .collect();
            tables.push(ScoreTable::segment("SimBERTScore", variant, task.clone(), cells));
        }
        let cells = quality
            .iter()
            .filter(|((t, _, _), _)| *t == task)
            .map(|((_, s, g), q)| ((s.clone(), g.clone()), 2.0 * q - 1.0 + 0.12 * noise.sample(&mut rng)))
            .collect();
        tables.push(ScoreTable::segment("SimCOMET", "default", task.clone(), cells));
        external_scores.insert(task, tables);
    }

    let campaign = Campaign {
        config,
        segments,
        hypotheses,
        ratings,
        external_scores,
    };
    let path = campaign.save(&out).expect("save fixture");
    println!("{}", path.display());
}
