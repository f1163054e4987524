use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthRecord {
    pub output_len: usize,
    pub expect_len: usize,
}

impl LengthRecord {
    pub fn new(output_len: usize, expect_len: usize) -> Result<Self> {
        if expect_len == 0 {
            return Err(Error::InvalidConfig("expected length must be positive".into()));
        }
        Ok(LengthRecord {
            output_len,
            expect_len,
        })
    }

    pub fn relative_deviation(&self) -> f64 {
        self.output_len.abs_diff(self.expect_len) as f64 / self.expect_len as f64
    }
}

/// Mean relative deviation `|output - expected| / expected` over the records.
pub fn length_deviation(records: &[LengthRecord]) -> Result<f64> {
    if records.is_empty() {
        return Err(Error::EmptySet("length records"));
    }
    let total: f64 = records.iter().map(LengthRecord::relative_deviation).sum();
    Ok(total / records.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(o: usize, e: usize) -> LengthRecord {
        LengthRecord::new(o, e).unwrap()
    }

    #[test]
    fn exact_lengths() {
        assert_eq!(length_deviation(&[rec(5, 5), rec(10, 10)]).unwrap(), 0.0);
    }

    #[test]
    fn symmetric_deviation() {
        let d = length_deviation(&[rec(8, 10), rec(12, 10)]).unwrap();
        assert!((d - 0.2).abs() < 1e-15);
    }

    #[test]
    fn empty_and_zero_expectation() {
        assert!(matches!(length_deviation(&[]), Err(Error::EmptySet(_))));
        assert!(LengthRecord::new(3, 0).is_err());
    }
}
