//! Exact rational fractions for train/test splits and data prefixes.
//!
//! Split boundaries are computed with integer arithmetic so that, for example,
//! `floor(0.7 * 1_569_264)` is exactly `1_098_484` regardless of how `0.7`
//! would round as a binary float.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A rational number in `(0, 1]`, kept in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fraction {
    num: u64,
    den: u64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Fraction {
    pub const ONE: Fraction = Fraction { num: 1, den: 1 };

    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 || num == 0 || num > den {
            return Err(Error::Range(format!(
                "fraction {num}/{den} is not in (0, 1]"
            )));
        }
        let g = gcd(num, den);
        Ok(Fraction {
            num: num / g,
            den: den / g,
        })
    }

    /// `percent / 100`.
    pub fn from_percent(percent: u64) -> Result<Self> {
        Fraction::new(percent, 100)
    }

    pub fn numerator(self) -> u64 {
        self.num
    }

    pub fn denominator(self) -> u64 {
        self.den
    }

    pub fn is_one(self) -> bool {
        self.num == self.den
    }

    /// `floor(self * n)`.
    pub fn floor_mul(self, n: usize) -> usize {
        (n as u128 * self.num as u128 / self.den as u128) as usize
    }

    /// `ceil(self * n)`.
    pub fn ceil_mul(self, n: usize) -> usize {
        let p = n as u128 * self.num as u128;
        p.div_ceil(self.den as u128) as usize
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// The fraction as a percentage, when that is a whole number.
    pub fn as_whole_percent(self) -> Option<u64> {
        let p = self.num as u128 * 100;
        p.is_multiple_of(self.den as u128).then(|| (p / self.den as u128) as u64)
    }

    fn decimal_digits(self) -> Option<String> {
        // Terminating decimal iff the denominator only has factors 2 and 5.
        let mut d = self.den;
        let (mut twos, mut fives) = (0u32, 0u32);
        while d.is_multiple_of(2) {
            d /= 2;
            twos += 1;
        }
        while d.is_multiple_of(5) {
            d /= 5;
            fives += 1;
        }
        if d != 1 {
            return None;
        }
        if self.is_one() {
            return Some("1".to_string());
        }
        let places = twos.max(fives);
        let scale = 10u128.pow(places);
        let digits = self.num as u128 * scale / self.den as u128;
        Some(format!("0.{:0width$}", digits, width = places as usize))
    }
}

impl Ord for Fraction {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl PartialOrd for Fraction {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.decimal_digits() {
            Some(s) => f.write_str(&s),
            None => write!(f, "{}/{}", self.num, self.den),
        }
    }
}

impl FromStr for Fraction {
    type Err = Error;

    /// Accepts decimals (`0.7`, `1`, `.25`) and ratios (`7/10`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Range(format!("cannot parse fraction {s:?}"));
        if let Some((n, d)) = s.split_once('/') {
            let n: u64 = n.trim().parse().map_err(|_| bad())?;
            let d: u64 = d.trim().parse().map_err(|_| bad())?;
            return Fraction::new(n, d);
        }
        let (int_part, frac_part) = s.split_once('.').unwrap_or((s, ""));
        if (int_part.is_empty() && frac_part.is_empty())
            || !int_part.bytes().all(|b| b.is_ascii_digit())
            || !frac_part.bytes().all(|b| b.is_ascii_digit())
            || frac_part.len() > 18
        {
            return Err(bad());
        }
        let den = 10u64.pow(frac_part.len() as u32);
        let int: u64 = if int_part.is_empty() {
            0
        } else {
            int_part.parse().map_err(|_| bad())?
        };
        let frac: u64 = if frac_part.is_empty() {
            0
        } else {
            frac_part.parse().map_err(|_| bad())?
        };
        let num = int
            .checked_mul(den)
            .and_then(|v| v.checked_add(frac))
            .ok_or_else(bad)?;
        Fraction::new(num, den)
    }
}

impl Serialize for Fraction {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Fraction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_and_ratios() {
        assert_eq!("0.7".parse::<Fraction>().unwrap(), Fraction::new(7, 10).unwrap());
        assert_eq!(".25".parse::<Fraction>().unwrap(), Fraction::new(1, 4).unwrap());
        assert_eq!("1".parse::<Fraction>().unwrap(), Fraction::ONE);
        assert_eq!("1.0".parse::<Fraction>().unwrap(), Fraction::ONE);
        assert_eq!("2/3".parse::<Fraction>().unwrap(), Fraction::new(2, 3).unwrap());
        for bad in ["0", "1.5", "-0.3", "", ".", "abc", "3/0", "0.7.1"] {
            assert!(bad.parse::<Fraction>().is_err(), "{bad}");
        }
    }

    #[test]
    fn exact_floor_and_ceil() {
        let f: Fraction = "0.7".parse().unwrap();
        assert_eq!(f.floor_mul(1_569_264), 1_098_484);
        assert_eq!(f.floor_mul(10), 7);
        assert_eq!(f.floor_mul(3), 2);
        let f: Fraction = "0.3".parse().unwrap();
        assert_eq!(f.ceil_mul(10), 3);
        let f: Fraction = "0.29".parse().unwrap();
        assert_eq!(f.floor_mul(100), 29);
    }

    #[test]
    fn display_round_trips() {
        for s in ["0.7", "1", "0.125", "2/3", "0.05"] {
            let f: Fraction = s.parse().unwrap();
            assert_eq!(f.to_string(), s);
            assert_eq!(f.to_string().parse::<Fraction>().unwrap(), f);
        }
        assert_eq!(Fraction::from_percent(30).unwrap().as_whole_percent(), Some(30));
        assert_eq!(Fraction::new(1, 3).unwrap().as_whole_percent(), None);
    }
}
