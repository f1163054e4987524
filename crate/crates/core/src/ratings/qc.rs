//! Annotation quality control: trap-score buckets and annotation timing.

use serde::Serialize;

use crate::corpus::RatingRecord;
use crate::error::{Error, Result};

pub const DEFAULT_TIMING_CUTOFF_S: f64 = 600.0;

/// Upper bound (inclusive) of the "low" trap bucket.
pub const LOW_TRAP_MAX: u8 = 20;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct TrapBuckets {
    pub zero: usize,
    pub low: usize,
    pub high: usize,
}

impl TrapBuckets {
    pub fn total(&self) -> usize {
        self.zero + self.low + self.high
    }
}

/// Buckets trap ratings: 0, (0, 20], above 20.
pub fn trap_report<'a>(ratings: impl IntoIterator<Item = &'a RatingRecord>) -> TrapBuckets {
    let mut b = TrapBuckets::default();
    for r in ratings {
        debug_assert!(r.is_trap, "trap_report expects trap ratings");
        match r.raw_score {
            0 => b.zero += 1,
            s if s <= LOW_TRAP_MAX => b.low += 1,
            _ => b.high += 1,
        }
    }
    b
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimingReport {
    pub all_ave: f64,
    /// Mean over durations strictly below the cutoff; `None` when every
    /// annotation took longer.
    pub cut_ave: Option<f64>,
}

pub fn timing_report<'a>(ratings: impl IntoIterator<Item = &'a RatingRecord>, cutoff_s: f64) -> Result<TimingReport> {
    let durations: Vec<f64> = ratings.into_iter().map(|r| r.duration_s).collect();
    timing_of(&durations, cutoff_s)
}

pub fn timing_of(durations: &[f64], cutoff_s: f64) -> Result<TimingReport> {
    if durations.is_empty() {
        return Err(Error::EmptySet("ratings for timing"));
    }
    let all_ave = durations.iter().sum::<f64>() / durations.len() as f64;
    let kept: Vec<f64> = durations.iter().copied().filter(|&d| d < cutoff_s).collect();
    let cut_ave = (!kept.is_empty()).then(|| kept.iter().sum::<f64>() / kept.len() as f64);
    Ok(TimingReport { all_ave, cut_ave })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::task::Task;

    fn trap(score: u8) -> RatingRecord {
        RatingRecord {
            annotator_id: "a".into(),
            task: Task::new("en-zh", "0.8".parse().unwrap()),
            seg_id: "s".into(),
            system_id: "trap".into(),
            raw_score: score,
            duration_s: 1.0,
            is_trap: true,
        }
    }

    #[test]
    fn buckets() {
        let all_zero: Vec<_> = [0, 0, 0].into_iter().map(trap).collect();
        assert_eq!(trap_report(&all_zero), TrapBuckets { zero: 3, low: 0, high: 0 });
        let spread: Vec<_> = [0, 15, 30].into_iter().map(trap).collect();
        assert_eq!(trap_report(&spread), TrapBuckets { zero: 1, low: 1, high: 1 });
        let edges: Vec<_> = [1, 20, 21, 100].into_iter().map(trap).collect();
        assert_eq!(trap_report(&edges), TrapBuckets { zero: 0, low: 2, high: 2 });
    }

    #[test]
    fn timing() {
        let t = timing_of(&[50.0, 70.0], 600.0).unwrap();
        assert_eq!((t.all_ave, t.cut_ave), (60.0, Some(60.0)));
        let t = timing_of(&[50.0, 70.0, 1000.0], 600.0).unwrap();
        assert!((t.all_ave - 373.333_333_333_333_3).abs() < 1e-9);
        assert_eq!(t.cut_ave, Some(60.0));
        let t = timing_of(&[700.0, 600.0], 600.0).unwrap();
        assert_eq!(t.cut_ave, None);
        assert!(matches!(timing_of(&[], 600.0), Err(Error::EmptySet(_))));
    }
}
