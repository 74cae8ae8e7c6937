//! Augmentation rates stored as integer parts per million.
//!
//! Record counts are derived with integer arithmetic so that `⌊p·N⌋` never
//! suffers from binary floating point (`0.3 * 5865` must give 1759, and
//! `0.1 * 2100` must give exactly 210).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

const SCALE: u64 = 1_000_000;

/// A fraction in `[0, 1]` with micro-unit resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rate(u32);

impl Rate {
    pub const ZERO: Rate = Rate(0);
    pub const ONE: Rate = Rate(SCALE as u32);

    pub fn from_fraction(p: f64) -> Result<Self> {
        if !p.is_finite() || !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidRate(p));
        }
        Ok(Rate((p * SCALE as f64).round() as u32))
    }

    pub fn from_percent(pct: u32) -> Result<Self> {
        if pct > 100 {
            return Err(Error::InvalidRate(pct as f64 / 100.0));
        }
        Ok(Rate(pct * 10_000))
    }

    pub fn fraction(self) -> f64 {
        self.0 as f64 / SCALE as f64
    }

    pub fn parts_per_million(self) -> u32 {
        self.0
    }

    /// `⌊p·n⌋`, exact.
    pub fn floor_of(self, n: usize) -> usize {
        ((n as u128 * self.0 as u128) / SCALE as u128) as usize
    }

    /// Percentage rendering without trailing zeros, e.g. `10`, `12.5`.
    pub fn percent_label(self) -> String {
        let whole = self.0 / 10_000;
        let frac = self.0 % 10_000;
        if frac == 0 {
            whole.to_string()
        } else {
            let digits = format!("{frac:04}");
            format!("{whole}.{}", digits.trim_end_matches('0'))
        }
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fraction())
    }
}

/// Accepts `0.3`, `.3` or `30%`.
impl FromStr for Rate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidSpec(format!("cannot parse rate {s:?}"));
        match s.strip_suffix('%') {
            Some(pct) => {
                let v: f64 = pct.trim().parse().map_err(|_| bad())?;
                Rate::from_fraction(v / 100.0)
            }
            None => Rate::from_fraction(s.parse().map_err(|_| bad())?),
        }
    }
}

impl Serialize for Rate {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.fraction())
    }
}

impl<'de> Deserialize<'de> for Rate {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let p = f64::deserialize(deserializer)?;
        Rate::from_fraction(p).map_err(serde::de::Error::custom)
    }
}
