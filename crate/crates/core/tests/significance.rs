use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use lcmeval::meta_eval::{CellKey, ScoreTable};
use lcmeval::report::{emit_sig_matrix, SigFormat};
use lcmeval::significance::{perm_both, segment_sig_matrix, system_sig_matrix};
use lcmeval::Task;

fn task() -> Task {
    "en-zh@0.8".parse().unwrap()
}

fn normals(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

fn cells(values: &[f64]) -> BTreeMap<CellKey, f64> {
    values
        .iter()
        .enumerate()
        .map(|(i, v)| ((format!("sys{}", i % 2), format!("seg{:03}", i / 2)), *v))
        .collect()
}

#[test]
fn perm_both_detects_a_perfect_metric() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let human = normals(&mut rng, 200);
    let noise = normals(&mut rng, 200);
    let a = ScoreTable::segment("A", "v", task(), cells(&human));
    let b = ScoreTable::segment("B", "v", task(), cells(&noise));
    let p = perm_both(&a, &b, &cells(&human), 500, 9).unwrap();
    assert!(p < 0.01, "p = {p}");
    let reverse = perm_both(&b, &a, &cells(&human), 500, 9).unwrap();
    assert!(reverse > 0.5, "p = {reverse}");
}

#[test]
fn system_matrix_wins_for_a_correlated_metric() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let human = normals(&mut rng, 500);
    let good: Vec<f64> = human.iter().zip(normals(&mut rng, 500)).map(|(h, e)| h + 0.3 * e).collect();
    let noise = normals(&mut rng, 500);
    let m = system_sig_matrix(&task(), &[("Good".into(), good), ("Noise".into(), noise)], &human, 0.95).unwrap();
    assert!(m.is_complete());
    assert!(m.cell(0, 1).unwrap().significant);
    assert!(!m.cell(1, 0).unwrap().significant);
    assert_eq!(m.win_count(), 1);
}

#[test]
fn segment_matrix_renders_in_every_format() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let human = normals(&mut rng, 60);
    let tables: Vec<ScoreTable> = (0..4)
        .map(|i| {
            let noisy: Vec<f64> = human
                .iter()
                .zip(normals(&mut rng, 60))
                .map(|(h, e)| h + i as f64 * e)
                .collect();
            ScoreTable::segment(format!("M{i}"), "v", task(), cells(&noisy))
        })
        .collect();
    let refs: Vec<&ScoreTable> = tables.iter().collect();
    let m = segment_sig_matrix(&refs, &cells(&human), 200, 5, 0.05).unwrap();
    assert_eq!(m.cells.len(), 12);
    let csv = emit_sig_matrix(&m, SigFormat::Csv);
    assert_eq!(csv.lines().count(), 13);
    let grid = emit_sig_matrix(&m, SigFormat::Textgrid);
    assert_eq!(grid.lines().count(), 1 + 1 + 4);
    let svg = emit_sig_matrix(&m, SigFormat::Svg);
    assert_eq!(svg.matches(r#"class="cell""#).count(), 12);
    assert_eq!(svg.matches(r#"class="diagonal""#).count(), 4);
}
