//! Annotation tasks: a translation direction paired with a target length ratio.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

const SCALE: u32 = 10_000;

/// A target length as a fraction of the reference length, stored exactly in
/// units of 1/10000 so that it can be used as a map key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LengthRatio(u32);

impl LengthRatio {
    pub fn from_basis_points(bp: u32) -> Result<Self, Error> {
        if bp == 0 || bp > SCALE {
            return Err(Error::InvalidRatio(format!("{bp}/10000")));
        }
        Ok(LengthRatio(bp))
    }

    pub fn basis_points(self) -> u32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.0) / f64::from(SCALE)
    }

    pub fn is_full_length(self) -> bool {
        self.0 == SCALE
    }

    /// `round(ratio * len)` with halves rounded up.
    pub fn scale_round_half_up(self, len: usize) -> usize {
        (self.0 as usize * len + (SCALE as usize) / 2) / SCALE as usize
    }

    /// `floor(ratio * len)`.
    pub fn scale_floor(self, len: usize) -> usize {
        self.0 as usize * len / SCALE as usize
    }

    /// Percent label as used in report headers, e.g. `80%`.
    pub fn percent_label(self) -> String {
        let whole = self.0 / 100;
        let frac = self.0 % 100;
        if frac == 0 {
            format!("{whole}%")
        } else {
            let s = format!("{whole}.{frac:02}");
            format!("{}%", s.trim_end_matches('0'))
        }
    }
}

impl fmt::Display for LengthRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let whole = self.0 / SCALE;
        let frac = self.0 % SCALE;
        if frac == 0 {
            write!(f, "{whole}")
        } else {
            let digits = format!("{frac:04}");
            write!(f, "{whole}.{}", digits.trim_end_matches('0'))
        }
    }
}

impl FromStr for LengthRatio {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let bad = || Error::InvalidRatio(s.to_string());
        let (whole, frac) = match s.split_once('.') {
            Some((w, f)) => (w, f),
            None => (s, ""),
        };
        if whole.is_empty() && frac.is_empty() {
            return Err(bad());
        }
        if frac.len() > 4
            || !whole.chars().all(|c| c.is_ascii_digit())
            || !frac.chars().all(|c| c.is_ascii_digit())
        {
            return Err(bad());
        }
        let whole: u32 = if whole.is_empty() {
            0
        } else {
            whole.parse().map_err(|_| bad())?
        };
        let mut frac_bp = 0u32;
        for (i, c) in frac.chars().enumerate() {
            frac_bp += c.to_digit(10).unwrap() * 10u32.pow(3 - i as u32);
        }
        let bp = whole
            .checked_mul(SCALE)
            .and_then(|w| w.checked_add(frac_bp))
            .ok_or_else(bad)?;
        LengthRatio::from_basis_points(bp).map_err(|_| bad())
    }
}

impl Serialize for LengthRatio {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.as_f64())
    }
}

impl<'de> Deserialize<'de> for LengthRatio {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(serde_json::Number),
            Str(String),
        }
        let text = match Raw::deserialize(deserializer)? {
            Raw::Num(n) => n.to_string(),
            Raw::Str(s) => s,
        };
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// One annotation task: translation direction (e.g. `en-zh`) and length ratio.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Task {
    pub direction: String,
    pub ratio: LengthRatio,
}

impl Task {
    pub fn new(direction: impl Into<String>, ratio: LengthRatio) -> Self {
        Task {
            direction: direction.into(),
            ratio,
        }
    }

    /// File-name friendly label, e.g. `en-zh_0.8`.
    pub fn file_label(&self) -> String {
        format!("{}_{}", self.direction, self.ratio)
    }

    /// Target language of the direction tag (`en-zh` -> `zh`).
    pub fn target_language(&self) -> &str {
        target_language(&self.direction)
    }
}

pub fn target_language(direction: &str) -> &str {
    direction
        .rsplit_once('-')
        .map(|(_, t)| t)
        .unwrap_or(direction)
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.direction, self.ratio)
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let (direction, ratio) = s
            .rsplit_once('@')
            .ok_or_else(|| Error::InvalidConfig(format!("task `{s}` is not direction@ratio")))?;
        if direction.is_empty() {
            return Err(Error::InvalidConfig(format!("task `{s}` has no direction")));
        }
        Ok(Task::new(direction, ratio.parse()?))
    }
}

impl Serialize for Task {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Task {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        String::deserialize(deserializer)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_parse_and_display() {
        let r: LengthRatio = "0.8".parse().unwrap();
        assert_eq!(r.basis_points(), 8000);
        assert_eq!(r.to_string(), "0.8");
        assert_eq!(r.percent_label(), "80%");
        assert_eq!("1".parse::<LengthRatio>().unwrap().to_string(), "1");
        assert_eq!("0.125".parse::<LengthRatio>().unwrap().percent_label(), "12.5%");
        assert!("0".parse::<LengthRatio>().is_err());
        assert!("1.2".parse::<LengthRatio>().is_err());
        assert!("0.12345".parse::<LengthRatio>().is_err());
        assert!("abc".parse::<LengthRatio>().is_err());
    }

    #[test]
    fn ratio_rounding() {
        let half: LengthRatio = "0.5".parse().unwrap();
        assert_eq!(half.scale_floor(7), 3);
        assert_eq!(half.scale_round_half_up(7), 4);
        assert_eq!(half.scale_floor(10), 5);
        let r: LengthRatio = "0.8".parse().unwrap();
        assert_eq!(r.scale_round_half_up(13), 10);
    }

    #[test]
    fn task_round_trip() {
        let t: Task = "en-zh@0.5".parse().unwrap();
        assert_eq!(t.direction, "en-zh");
        assert_eq!(t.target_language(), "zh");
        assert_eq!(t.to_string(), "en-zh@0.5");
        assert_eq!(t.file_label(), "en-zh_0.5");
    }

    #[test]
    fn ratio_serde_accepts_numbers_and_strings() {
        let a: LengthRatio = serde_json::from_str("0.8").unwrap();
        let b: LengthRatio = serde_json::from_str("\"0.8\"").unwrap();
        assert_eq!(a, b);
        assert_eq!(serde_json::to_string(&a).unwrap(), "0.8");
    }
}
