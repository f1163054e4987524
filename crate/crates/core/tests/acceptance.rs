//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use lcmeval::corpus::{validate_campaign, Campaign, CampaignConfig, DataPaths, LengthUnit, SegmentRecord};
use lcmeval::lexical::{corpus_bleu, length_deviation, rouge_l, rouge_n, LengthRecord, Scheme, TokenSeq};
use lcmeval::meta_eval::{
    draw_selectors, hybrid_supersample, kendall_tau_b, pearson, score_with_selectors, select_best_variant,
    system_scores, CellKey, CorpusKind, CorpusMetric, HybridSelector, Level, MetricSource, ScoreTable,
};
use lcmeval::ratings::{krippendorff_alpha, schedule_traps, HumanScores, RatingMatrix};
use lcmeval::report::{load_report_table, load_sig_matrix_csv, run_pipeline, RunOptions, MANIFEST_FILE};
use lcmeval::significance::{dagger, paired_bootstrap, perm_both, zou_ci};
use lcmeval::lexical::BleuStats;
use lcmeval::Task;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn rng(tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0xacce_0000 + tag)
}

fn fixture_config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/synthetic/campaign.conf")
}

fn task(s: &str) -> Task {
    s.parse().unwrap()
}

// 1. Campaign arithmetic

fn campaign_arithmetic() -> Outcome {
    let directions = ["en-zh", "zh-en"];
    let segments: Vec<SegmentRecord> = directions
        .iter()
        .flat_map(|d| {
            (0..270).map(move |i| SegmentRecord {
                seg_id: format!("{d}-{i:03}"),
                direction: d.to_string(),
                source_text: "source sentence".into(),
                reference_text: "a reference sentence with eight words in it".into(),
                reference_length: None,
            })
        })
        .collect();
    let config = CampaignConfig {
        directions: directions.iter().map(|d| d.to_string()).collect(),
        length_ratios: vec!["0.8".parse().unwrap(), "0.5".parse().unwrap()],
        systems: vec!["length-embedding".into(), "target-embedding".into()],
        annotators_per_task: 3,
        length_unit: LengthUnit::WhitespaceTokens,
        seed: 7,
        paths: DataPaths::default(),
    };
    let traps = schedule_traps(&config, &segments, 60, config.seed).map_err(err)?;
    let campaign = Campaign {
        config,
        segments,
        hypotheses: Vec::new(),
        ratings: Vec::new(),
        external_scores: BTreeMap::new(),
    };
    let report = validate_campaign(&campaign);
    check(report.expected_rating_count == 6480, || {
        format!("expected_rating_count = {}", report.expected_rating_count)
    })?;
    check(traps.len() == 720, || format!("{} traps scheduled", traps.len()))?;
    Ok("expected_rating_count = 6480, traps = 720".into())
}

// 2. Lexical-metric oracles

fn random_tokens(rng: &mut ChaCha8Rng, max_len: usize, vocab: usize) -> TokenSeq {
    let n = rng.random_range(0..=max_len);
    TokenSeq::from_tokens(
        (0..n).map(|_| format!("w{}", rng.random_range(0..vocab))),
        Scheme::Whitespace,
    )
}

fn lcs_oracle(a: &[String], b: &[String]) -> usize {
    let mut table = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            table[i][j] = if a[i - 1] == b[j - 1] {
                table[i - 1][j - 1] + 1
            } else {
                table[i - 1][j].max(table[i][j - 1])
            };
        }
    }
    table[a.len()][b.len()]
}

fn clipped_overlap_oracle(h: &[String], r: &[String], n: usize) -> (usize, usize, usize) {
    let grams = |s: &[String]| -> Vec<Vec<String>> {
        if s.len() < n {
            Vec::new()
        } else {
            (0..=s.len() - n).map(|i| s[i..i + n].to_vec()).collect()
        }
    };
    let (hg, rg) = (grams(h), grams(r));
    let mut seen: Vec<&Vec<String>> = Vec::new();
    let mut overlap = 0;
    for g in &hg {
        if seen.contains(&g) {
            continue;
        }
        seen.push(g);
        let in_h = hg.iter().filter(|x| *x == g).count();
        let in_r = rg.iter().filter(|x| *x == g).count();
        overlap += in_h.min(in_r);
    }
    (overlap, hg.len(), rg.len())
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn lexical_oracles() -> Outcome {
    let mut rng = rng(2);
    let mut bleu_cases = 0;
    for case in 0..1000 {
        let h = random_tokens(&mut rng, 20, 6);
        let r = random_tokens(&mut rng, 20, 6);
        let l = lcs_oracle(&h.tokens, &r.tokens);
        let got = rouge_l(&h, &r);
        check(got.precision == ratio(l, h.len()) && got.recall == ratio(l, r.len()), || {
            format!("rouge_l mismatch on case {case}")
        })?;
        for n in 1..=4 {
            let (overlap, hc, rc) = clipped_overlap_oracle(&h.tokens, &r.tokens, n);
            let got = rouge_n(&h, &r, n);
            check(got.precision == ratio(overlap, hc) && got.recall == ratio(overlap, rc), || {
                format!("rouge_{n} mismatch on case {case}")
            })?;
        }

        let pairs = rng.random_range(1..=4);
        let mut hyps = Vec::new();
        let mut refs = Vec::new();
        for _ in 0..pairs {
            hyps.push(random_tokens(&mut rng, 20, 6));
            refs.push(random_tokens(&mut rng, 20, 6));
        }
        if hyps.iter().all(|h| h.is_empty()) {
            continue;
        }
        bleu_cases += 1;
        let s = corpus_bleu(&hyps, &refs, 4).map_err(err)?;
        check(s.bleu_star >= s.bleu, || format!("bleu* < bleu on case {case}"))?;
        if s.bleu > 0.0 {
            check((s.bleu_star == s.bleu) == (s.brevity_penalty == 1.0), || {
                format!("equality/BP mismatch on case {case}: {s:?}")
            })?;
        } else {
            check(s.bleu_star == 0.0, || format!("bleu = 0 but bleu* = {} on case {case}", s.bleu_star))?;
        }
    }
    Ok(format!("1000 rouge cases exact, {bleu_cases} bleu corpora"))
}

// 3. Correlation oracles

fn pearson_oracle(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let syy: f64 = y.iter().map(|v| v * v).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let vx = n * sxx - sx * sx;
    let vy = n * syy - sy * sy;
    (vx > 0.0 && vy > 0.0).then(|| (n * sxy - sx * sy) / (vx * vy).sqrt())
}

fn kendall_oracle(x: &[f64], y: &[f64]) -> Option<f64> {
    let (mut c, mut d, mut tx, mut ty) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let dx = (x[i] - x[j]).signum() as i64 * (x[i] != x[j]) as i64;
            let dy = (y[i] - y[j]).signum() as i64 * (y[i] != y[j]) as i64;
            match (dx, dy) {
                (0, 0) => {}
                (0, _) => tx += 1,
                (_, 0) => ty += 1,
                _ if dx == dy => c += 1,
                _ => d += 1,
            }
        }
    }
    let den = (((c + d + tx) * (c + d + ty)) as f64).sqrt();
    (den > 0.0).then(|| (c - d) as f64 / den)
}

fn correlation_oracles() -> Outcome {
    let mut rng = rng(3);
    let mut worst = 0.0f64;
    let mut checked = 0;
    for case in 0..500 {
        let n = rng.random_range(2..=50);
        let levels = rng.random_range(2..=12);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(0..levels) as f64).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(0..levels) as f64 * 0.5).collect();
        match (pearson_oracle(&x, &y), pearson(&x, &y)) {
            (Some(o), Ok(r)) => worst = worst.max((o - r.value).abs()),
            (None, Err(_)) => {}
            (o, r) => return Err(format!("pearson case {case}: oracle {o:?}, got {r:?}")),
        }
        match (kendall_oracle(&x, &y), kendall_tau_b(&x, &y)) {
            (Some(o), Ok(t)) => {
                worst = worst.max((o - t.value).abs());
                checked += 1;
            }
            (None, Err(_)) => {}
            (o, t) => return Err(format!("kendall case {case}: oracle {o:?}, got {t:?}")),
        }
    }
    check(worst <= 1e-12, || format!("max deviation {worst:e}"))?;
    Ok(format!("500 vector pairs ({checked} with defined tau), max deviation {worst:.1e}"))
}

// 4. Krippendorff's alpha

fn alpha_oracle(units: &[Vec<f64>]) -> f64 {
    let mut values: Vec<f64> = units.iter().flatten().copied().collect();
    values.sort_by(f64::total_cmp);
    values.dedup();
    let idx = |v: f64| values.iter().position(|&x| x == v).unwrap();
    let k = values.len();
    let mut o = vec![vec![0.0; k]; k];
    for u in units.iter().filter(|u| u.len() >= 2) {
        let m = u.len() as f64;
        for i in 0..u.len() {
            for j in 0..u.len() {
                if i != j {
                    o[idx(u[i])][idx(u[j])] += 1.0 / (m - 1.0);
                }
            }
        }
    }
    let nc: Vec<f64> = o.iter().map(|row| row.iter().sum()).collect();
    let n: f64 = nc.iter().sum();
    let delta = |c: usize, k: usize| (values[c] - values[k]).powi(2);
    let mut d_o = 0.0;
    let mut d_e = 0.0;
    for c in 0..k {
        for kk in 0..k {
            d_o += o[c][kk] * delta(c, kk);
            d_e += nc[c] * nc[kk] * delta(c, kk);
        }
    }
    1.0 - (d_o / n) / (d_e / (n * (n - 1.0)))
}

fn matrix_of(units: &[Vec<Option<f64>>]) -> RatingMatrix {
    RatingMatrix::from_values(units.iter().enumerate().flat_map(|(u, row)| {
        row.iter().enumerate().filter_map(move |(a, v)| {
            v.map(|v| (format!("a{a}"), (format!("u{u:04}"), "sys".to_string(), false), v))
        })
    }))
}

fn krippendorff() -> Outcome {
    let mut rng = rng(4);
    for _ in 0..20 {
        let units: Vec<Vec<Option<f64>>> = (0..15)
            .map(|_| {
                let v = rng.random_range(0..=100) as f64;
                vec![Some(v); 3]
            })
            .collect();
        let a = krippendorff_alpha(&matrix_of(&units)).map_err(err)?;
        check(a == 1.0, || format!("perfect agreement gave {a}"))?;
    }
    let random: Vec<Vec<Option<f64>>> = (0..500)
        .map(|_| (0..3).map(|_| Some(rng.random_range(0..=100) as f64)).collect())
        .collect();
    let a_random = krippendorff_alpha(&matrix_of(&random)).map_err(err)?;
    check(a_random.abs() < 0.05, || format!("independent ratings gave alpha {a_random}"))?;
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let n_units = rng.random_range(2..=6);
        let units: Vec<Vec<Option<f64>>> = (0..n_units)
            .map(|_| {
                (0..3)
                    .map(|_| rng.random_bool(0.8).then(|| rng.random_range(0..=5) as f64))
                    .collect()
            })
            .collect();
        let present: Vec<Vec<f64>> = units.iter().map(|u| u.iter().flatten().copied().collect()).collect();
        let pairable: Vec<&Vec<f64>> = present.iter().filter(|u| u.len() >= 2).collect();
        let distinct: BTreeSet<u64> = pairable.iter().flat_map(|u| u.iter().map(|v| v.to_bits())).collect();
        if pairable.is_empty() || distinct.len() < 2 {
            continue;
        }
        let got = krippendorff_alpha(&matrix_of(&units)).map_err(err)?;
        worst = worst.max((got - alpha_oracle(&present)).abs());
    }
    check(worst <= 1e-12, || format!("coincidence oracle deviation {worst:e}"))?;
    Ok(format!("perfect = 1, random |alpha| = {:.4}, oracle deviation {worst:.1e}", a_random.abs()))
}

// 5. Zou CI calibration

fn zou_coverage() -> Outcome {
    let (r12, r13, r23) = (0.6f64, 0.4f64, 0.5f64);
    // Cholesky factor of [[1, r12, r13], [r12, 1, r23], [r13, r23, 1]]
    let l21 = r12;
    let l22 = (1.0 - l21 * l21).sqrt();
    let l31 = r13;
    let l32 = (r23 - l31 * l21) / l22;
    let l33 = (1.0 - l31 * l31 - l32 * l32).sqrt();
    let n = 100;
    let reps = 2000;
    let truth = r12 - r13;
    let covered: usize = (0..reps)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(0x20c0_0000 + i as u64);
            let mut h = Vec::with_capacity(n);
            let mut a = Vec::with_capacity(n);
            let mut b = Vec::with_capacity(n);
            for _ in 0..n {
                let z: [f64; 3] = std::array::from_fn(|_| StandardNormal.sample(&mut rng));
                h.push(z[0]);
                a.push(l21 * z[0] + l22 * z[1]);
                b.push(l31 * z[0] + l32 * z[1] + l33 * z[2]);
            }
            let s12 = pearson(&h, &a).unwrap().value;
            let s13 = pearson(&h, &b).unwrap().value;
            let s23 = pearson(&a, &b).unwrap().value;
            let ci = zou_ci(s12, s13, s23, n, 0.95).unwrap();
            usize::from(ci.lower <= truth && truth <= ci.upper)
        })
        .sum();
    let coverage = covered as f64 / reps as f64;
    check((0.93..=0.97).contains(&coverage), || format!("coverage {coverage}"))?;
    Ok(format!("coverage {coverage:.4} over {reps} replicates (n = {n})"))
}

// 6. PERM-BOTH calibration

fn cells_from(values: &[f64], systems: usize) -> BTreeMap<CellKey, f64> {
    values
        .iter()
        .enumerate()
        .map(|(i, v)| ((format!("sys{}", i % systems), format!("seg{:03}", i / systems)), *v))
        .collect()
}

fn perm_calibration() -> Outcome {
    let t = task("en-zh@0.8");
    let pairs = 200;
    let n = 100;
    let ps: Vec<f64> = (0..pairs)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(0x9e12_0000 + i as u64);
            let mut draw = || -> f64 { StandardNormal.sample(&mut rng) };
            let h: Vec<f64> = (0..n).map(|_| draw()).collect();
            let a: Vec<f64> = h.iter().map(|x| x + draw()).collect();
            let b: Vec<f64> = h.iter().map(|x| x + draw()).collect();
            let human = cells_from(&h, 2);
            let ta = ScoreTable::segment("A", "v", t.clone(), cells_from(&a, 2));
            let tb = ScoreTable::segment("B", "v", t.clone(), cells_from(&b, 2));
            perm_both(&ta, &tb, &human, 500, 1000 + i as u64).unwrap()
        })
        .collect();
    check(ps.iter().all(|&p| p > 0.0 && p <= 1.0), || "p outside (0, 1]".into())?;
    let rejected = ps.iter().filter(|&&p| p <= 0.05).count() as f64 / pairs as f64;
    check((0.02..=0.09).contains(&rejected), || format!("null rejection rate {rejected}"))?;

    let mut rng = rng(6);
    let h: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let x: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let a = ScoreTable::segment("A", "v", t.clone(), cells_from(&x, 2));
    let p_same = perm_both(&a, &a.clone(), &cells_from(&h, 2), 500, 3).map_err(err)?;
    check(p_same == 1.0, || format!("identical tables gave p = {p_same}"))?;
    Ok(format!("null rate p <= 0.05: {rejected:.3} over {pairs} pairs; identical p = 1"))
}

// 7. Paired bootstrap

fn bootstrap() -> Outcome {
    let mut rng = rng(7);
    let b: Vec<f64> = (0..200).map(|_| rng.random_range(0.0..1.0)).collect();
    let p_same = paired_bootstrap(&b, &b, 1000, 11).map_err(err)?;
    check((0.3..=0.7).contains(&p_same), || format!("A = B gave p = {p_same}"))?;
    let a: Vec<f64> = b.iter().map(|v| v + 1.0).collect();
    let p_dom = paired_bootstrap(&a, &b, 1000, 11).map_err(err)?;
    check(p_dom == 0.0, || format!("A = B + 1 gave p = {p_dom}"))?;
    let marks = [(0.004, "††"), (0.0099, "††"), (0.01, "†"), (0.049, "†"), (0.05, ""), (0.3, "")];
    for (p, want) in marks {
        check(dagger(p) == want, || format!("dagger({p}) = {:?}", dagger(p)))?;
    }
    Ok(format!("A = B p = {p_same}, A = B + 1 p = {p_dom}, dagger rule ok"))
}

// 8. Hybrid super sampling

fn hybrid_fixture() -> (Task, Vec<ScoreTable>, CorpusMetric, BTreeMap<CellKey, f64>) {
    let t = task("zh-en@0.5");
    let mut rng = rng(8);
    let systems = ["s1", "s2", "s3"];
    let segments: Vec<String> = (0..25).map(|i| format!("g{i:02}")).collect();
    let mut cells = |scale: f64| -> BTreeMap<CellKey, f64> {
        systems
            .iter()
            .flat_map(|s| segments.iter().map(move |g| (s.to_string(), g.clone())))
            .map(|k| (k, scale * rng.random_range(0.0..1.0)))
            .collect()
    };
    let human = cells(1.0);
    let tables = vec![
        ScoreTable::segment("M1", "v", t.clone(), cells(1.0)),
        ScoreTable::segment("M2", "v", t.clone(), cells(3.0)),
    ];
    let stats = human
        .keys()
        .map(|k| {
            let len = rng.random_range(5..15);
            let hyp = TokenSeq::from_tokens((0..len).map(|_| format!("w{}", rng.random_range(0..8))), Scheme::Whitespace);
            let rl = rng.random_range(8..18);
            let r = TokenSeq::from_tokens((0..rl).map(|_| format!("w{}", rng.random_range(0..8))), Scheme::Whitespace);
            (k.clone(), BleuStats::for_pair(&hyp, &r, 4))
        })
        .collect();
    let bleu = CorpusMetric {
        metric_id: "BLEU*".into(),
        variant_id: "native".into(),
        task: t.clone(),
        kind: CorpusKind::BleuStar,
        stats,
    };
    (t, tables, bleu, human)
}

fn hybrids() -> Outcome {
    let (t, tables, bleu, human) = hybrid_fixture();
    let mut sources: Vec<MetricSource> = tables.iter().map(MetricSource::Segment).collect();
    sources.push(MetricSource::Corpus(&bleu));
    let systems: Vec<String> = ["s1", "s2", "s3"].map(String::from).to_vec();
    let segments: Vec<String> = (0..25).map(|i| format!("g{i:02}")).collect();

    let constant: Vec<HybridSelector> = systems
        .iter()
        .map(|s| HybridSelector::constant(format!("const-{s}"), s, &segments))
        .collect();
    let out = score_with_selectors(&t, &sources, &human, &systems, &segments, constant).map_err(err)?;
    let bleu_table = bleu.system_table().map_err(err)?;
    for (i, (_, values)) in out.metrics.iter().enumerate() {
        let expected = if i < tables.len() {
            system_scores(&tables[i]).map_err(err)?.scores
        } else {
            system_scores(&bleu_table).map_err(err)?.scores
        };
        for (j, s) in systems.iter().enumerate() {
            check(values[j] == expected[s] && values[3 + j] == expected[s], || {
                format!("metric {i} system {s}: {} / {} vs {}", values[j], values[3 + j], expected[s])
            })?;
        }
    }

    let k0 = hybrid_supersample(&t, &sources, &human, 0, 5).map_err(err)?;
    check(k0.ids == systems, || format!("K = 0 ids {:?}", k0.ids))?;
    for (i, table) in tables.iter().enumerate() {
        let expected: Vec<f64> = system_scores(table).map_err(err)?.scores.into_values().collect();
        check(k0.metrics[i].1 == expected, || format!("K = 0 metric {i} differs"))?;
    }

    let mut runs = Vec::new();
    for threads in [1, 2, 8] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(err)?;
        let (sel, out) = pool.install(|| {
            let sel = draw_selectors(&systems, &segments, 300, 99);
            let out = hybrid_supersample(&t, &sources, &human, 300, 99).unwrap();
            (serde_json::to_vec(&sel).unwrap(), serde_json::to_vec(&out).unwrap())
        });
        runs.push((sel, out));
    }
    check(runs.windows(2).all(|w| w[0] == w[1]), || "selectors differ across thread counts".into())?;
    Ok("constant selectors exact, K = 0 equals system scores, 1/2/8 threads byte-identical".into())
}

// 9. Length deviation

fn length() -> Outcome {
    let rec = |o, e| LengthRecord::new(o, e).unwrap();
    let perfect: Vec<LengthRecord> = (1..20).map(|e| rec(e, e)).collect();
    check(length_deviation(&perfect).map_err(err)? == 0.0, || "perfect lengths not 0".into())?;
    let d = length_deviation(&[rec(8, 10), rec(12, 10)]).map_err(err)?;
    check(d == 0.2, || format!("(8,10),(12,10) gave {d}"))?;
    let mut rng = rng(9);
    for _ in 0..200 {
        let mut records: Vec<LengthRecord> = (0..10)
            .map(|_| rec(rng.random_range(0..40), rng.random_range(1..40)))
            .collect();
        let before = length_deviation(&records).map_err(err)?;
        let i = rng.random_range(0..records.len());
        let r = records[i];
        let output = match r.output_len.checked_sub(1) {
            Some(shorter) if r.output_len < r.expect_len => shorter,
            _ if r.output_len < r.expect_len => continue,
            _ => r.output_len + 1,
        };
        records[i] = rec(output, r.expect_len);
        let after = length_deviation(&records).map_err(err)?;
        check(after > before, || format!("not monotone: {before} -> {after}"))?;
    }
    Ok(format!("perfect = 0, (8,10),(12,10) = {d}, monotone on 200 cases"))
}

// 10. End-to-end determinism

fn read_dir_sorted(dir: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .map_err(err)?
        .map(|e| {
            let e = e.map_err(err)?;
            let name = e.file_name().to_string_lossy().into_owned();
            Ok((name, std::fs::read(e.path()).map_err(err)?))
        })
        .collect::<Result<_, String>>()?;
    files.sort();
    Ok(files)
}

fn end_to_end() -> Outcome {
    let tmp = tempfile::tempdir().map_err(err)?;
    let mut outputs = Vec::new();
    for (run, threads) in [(0, Some(1)), (1, Some(8)), (2, None)] {
        let dir = tmp.path().join(format!("run{run}"));
        let options = RunOptions {
            threads,
            ..RunOptions::default()
        };
        run_pipeline(&fixture_config(), &dir, &options).map_err(err)?;
        outputs.push(read_dir_sorted(&dir)?);
    }
    check(outputs.windows(2).all(|w| w[0] == w[1]), || "artifacts differ between runs".into())?;
    let files = &outputs[0];
    let mut tables = 0;
    for (name, bytes) in files {
        if !name.ends_with(".csv") {
            continue;
        }
        let text = std::str::from_utf8(bytes).map_err(err)?;
        let again = if name.starts_with("sig_") {
            let m = load_sig_matrix_csv(text, name, 0.95).map_err(err)?;
            lcmeval::report::emit_sig_matrix(&m, lcmeval::report::SigFormat::Csv)
        } else {
            load_report_table(name, text).map_err(err)?.to_csv()
        };
        check(again == text, || format!("{name} does not round-trip"))?;
        tables += 1;
    }
    check(files.iter().any(|(n, _)| n == MANIFEST_FILE), || "no manifest".into())?;
    Ok(format!("{} files identical over 3 runs (1, 8, default threads); {tables} tables round-trip", files.len()))
}

// 11. Variant selection

fn variant_selection() -> Outcome {
    let tasks: Vec<Task> = ["en-zh@0.8", "en-zh@0.5", "zh-en@0.8", "zh-en@0.5"].iter().map(|t| task(t)).collect();
    let mut rng = rng(11);
    let mut human = HumanScores::default();
    let mut tables = Vec::new();
    for t in &tasks {
        let cells: BTreeMap<CellKey, f64> = ["a", "b"]
            .iter()
            .flat_map(|s| (0..30).map(move |g| (s.to_string(), format!("g{g:02}"))))
            .map(|k| (k, StandardNormal.sample(&mut rng)))
            .collect();
        let noisy = |rng: &mut ChaCha8Rng, sd: f64| -> BTreeMap<CellKey, f64> {
            cells
                .iter()
                .map(|(k, v)| {
                    let e: f64 = StandardNormal.sample(rng);
                    (k.clone(), v + sd * e)
                })
                .collect()
        };
        tables.push(ScoreTable::segment("Sweep", "layer-03", t.clone(), noisy(&mut rng, 1.0)));
        tables.push(ScoreTable::segment("Sweep", "layer-07", t.clone(), cells.clone()));
        tables.push(ScoreTable::segment("Sweep", "layer-11", t.clone(), noisy(&mut rng, 0.5)));
        human.scores.insert(t.clone(), cells);
    }
    let refs: Vec<&ScoreTable> = tables.iter().collect();
    let mut summary = Vec::new();
    for level in [Level::System { hybrids: 200, seed: 4 }, Level::Segment] {
        let sel = select_best_variant(&refs, &human, &tasks, level).map_err(err)?;
        check(sel.chosen.variant_id == "layer-07", || format!("{level:?} chose {}", sel.chosen.variant_id))?;
        check((sel.chosen.average - 1.0).abs() <= 1e-12, || format!("average {}", sel.chosen.average))?;
        for c in &sel.candidates {
            let mean = c.per_task.iter().map(|(_, r)| r).sum::<f64>() / c.per_task.len() as f64;
            check((mean - c.average).abs() <= 1e-12, || format!("{} average mismatch", c.variant_id))?;
        }
        summary.push(format!("{:.4}", sel.chosen.average));
    }
    Ok(format!("layer-07 chosen at system and segment level, averages {}", summary.join(" / ")))
}

type Criterion = (&'static str, fn() -> Outcome, Duration);

fn main() {
    let criteria: [Criterion; 11] = [
        ("campaign arithmetic", campaign_arithmetic, Duration::from_secs(1)),
        ("lexical-metric oracles", lexical_oracles, Duration::from_secs(10)),
        ("correlation oracles", correlation_oracles, Duration::from_secs(10)),
        ("krippendorff alpha", krippendorff, Duration::from_secs(10)),
        ("zou ci calibration", zou_coverage, Duration::from_secs(60)),
        ("perm-both calibration", perm_calibration, Duration::from_secs(60)),
        ("paired bootstrap", bootstrap, Duration::from_secs(10)),
        ("hybrid super sampling", hybrids, Duration::from_secs(10)),
        ("length deviation", length, Duration::from_secs(1)),
        ("end-to-end determinism", end_to_end, Duration::from_secs(60)),
        ("variant selection", variant_selection, Duration::from_secs(5)),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let (status, detail) = match result {
            Ok(detail) if elapsed <= *budget => ("PASS", detail),
            Ok(detail) => ("FAIL", format!("{detail}; took longer than {budget:?}")),
            Err(e) => ("FAIL", e),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("[{status}] {:>2}. {name}: {detail} ({:.2}s)", i + 1, elapsed.as_secs_f64());
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
