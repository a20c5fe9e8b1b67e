use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

const UNROLLED_QUOTIENTS: usize = 64;

/// Eventually periodic continued fraction `[0; a_1, a_2, …]` and its multiplier `e^{2πiθ}`.
#[derive(Clone, Debug, PartialEq)]
pub struct RotationNumber {
    preperiod: Vec<u32>,
    period: Vec<u32>,
    value: f64,
    multiplier: Complex64,
}

impl RotationNumber {
    /// The golden mean `[0; 1, 1, 1, …] = (√5 − 1)/2`.
    pub fn golden() -> Self {
        Self::from_quotients(Vec::new(), vec![1]).expect("golden mean is valid")
    }

    pub fn from_quotients(preperiod: Vec<u32>, period: Vec<u32>) -> Result<Self> {
        let text = format_cf(&preperiod, &period);
        if period.is_empty() {
            return Err(invalid(&text, "periodic block must be nonempty"));
        }
        if preperiod.iter().chain(&period).any(|&q| q == 0) {
            return Err(invalid(&text, "partial quotients must be positive"));
        }
        let quotients: Vec<u32> = (1..=UNROLLED_QUOTIENTS)
            .map(|k| quotient(&preperiod, &period, k))
            .collect();
        let value = quotients.iter().rev().fold(0.0, |x, &q| 1.0 / (q as f64 + x));
        let angle = std::f64::consts::TAU * value;
        Ok(Self { preperiod, period, value, multiplier: Complex64::new(angle.cos(), angle.sin()) })
    }

    /// Parses `"golden"` or `"[0;d1,...,dk,(p1,...,pm)]"`.
    pub fn parse(spec: &str) -> Result<Self> {
        let text: String = spec.chars().filter(|c| !c.is_whitespace()).collect();
        if text.eq_ignore_ascii_case("golden") {
            return Ok(Self::golden());
        }
        let body = text
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| invalid(spec, "expected \"golden\" or a continued fraction \"[0;...,(...)]\""))?;
        let (integer, rest) = body
            .split_once(';')
            .ok_or_else(|| invalid(spec, "missing ';' after the integer part"))?;
        if integer != "0" {
            return Err(invalid(spec, "integer part must be 0 so that θ lies in (0,1)"));
        }
        let open = rest.find('(').ok_or_else(|| invalid(spec, "missing periodic block \"(...)\""))?;
        let block = rest[open + 1..]
            .strip_suffix(')')
            .ok_or_else(|| invalid(spec, "periodic block must close the literal"))?;
        let head = rest[..open].trim_end_matches(',');
        let parse_list = |s: &str| -> Result<Vec<u32>> {
            if s.is_empty() {
                return Ok(Vec::new());
            }
            s.split(',')
                .map(|t| {
                    let q: i64 = t.parse().map_err(|_| invalid(spec, &format!("bad quotient {t:?}")))?;
                    if q <= 0 {
                        return Err(invalid(spec, &format!("quotient {q} is not positive")));
                    }
                    u32::try_from(q).map_err(|_| invalid(spec, "quotient too large"))
                })
                .collect()
        };
        Self::from_quotients(parse_list(head)?, parse_list(block)?)
    }

    /// θ in (0, 1).
    pub fn value(&self) -> f64 {
        self.value
    }

    /// λ = e^{2πiθ}.
    pub fn multiplier(&self) -> Complex64 {
        self.multiplier
    }

    pub fn preperiod(&self) -> &[u32] {
        &self.preperiod
    }

    pub fn period(&self) -> &[u32] {
        &self.period
    }

    /// Partial quotient `a_k`, `k ≥ 1`.
    pub fn partial_quotient(&self, k: usize) -> u32 {
        quotient(&self.preperiod, &self.period, k)
    }

    /// Supremum of the partial quotients (finite for eventually periodic expansions).
    pub fn bound(&self) -> u32 {
        self.preperiod.iter().chain(&self.period).copied().max().unwrap_or(1)
    }

    /// Strictly increasing convergent denominators `q_k ≤ limit`.
    pub fn convergent_denominators(&self, limit: u64) -> Vec<u64> {
        let (mut prev, mut cur) = (1u64, self.partial_quotient(1) as u64);
        let mut out = vec![1];
        let mut k = 1;
        while cur <= limit {
            if cur > *out.last().unwrap() {
                out.push(cur);
            }
            k += 1;
            let next = self.partial_quotient(k) as u64 * cur + prev;
            prev = cur;
            cur = next;
        }
        out
    }
}

fn quotient(preperiod: &[u32], period: &[u32], k: usize) -> u32 {
    assert!(k >= 1, "partial quotients are indexed from 1");
    if k <= preperiod.len() {
        preperiod[k - 1]
    } else {
        period[(k - 1 - preperiod.len()) % period.len()]
    }
}

fn invalid(input: &str, reason: &str) -> Error {
    Error::InvalidRotation { input: input.to_string(), reason: reason.to_string() }
}

fn format_cf(preperiod: &[u32], period: &[u32]) -> String {
    let join = |v: &[u32]| v.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
    if preperiod.is_empty() {
        format!("[0;({})]", join(period))
    } else {
        format!("[0;{},({})]", join(preperiod), join(period))
    }
}

impl fmt::Display for RotationNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_cf(&self.preperiod, &self.period))
    }
}

impl FromStr for RotationNumber {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl Serialize for RotationNumber {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for RotationNumber {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Self::parse(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn golden_mean() {
        let t = RotationNumber::parse("golden").unwrap();
        assert!((t.value() - 0.6180339887).abs() < 1e-10);
        assert!((t.value() - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-15);
        assert_eq!(t.period(), &[1]);
        assert_eq!(t.to_string(), "[0;(1)]");
    }

    #[test]
    fn silver_mean() {
        let t = RotationNumber::parse("[0;(2)]").unwrap();
        assert!((t.value() - (2f64.sqrt() - 1.0)).abs() < 1e-10);
    }

    #[test]
    fn preperiodic_literal() {
        let t = RotationNumber::parse("[0; 3, 1, (2, 5)]").unwrap();
        assert_eq!(t.preperiod(), &[3, 1]);
        assert_eq!(t.period(), &[2, 5]);
        assert_eq!(t.partial_quotient(5), 2);
        assert_eq!(t.partial_quotient(6), 5);
        assert_eq!(t.bound(), 5);
        assert_eq!(RotationNumber::parse(&t.to_string()).unwrap(), t);
    }

    #[test]
    fn rejects_invalid_input() {
        for bad in ["[0;1,0]", "[0;(0)]", "[0;1,2]", "0.618", "[1;(1)]", "[0;(-1)]", "[0;()]", "silver"] {
            assert!(RotationNumber::parse(bad).is_err(), "{bad} accepted");
        }
    }

    #[test]
    fn fibonacci_denominators() {
        let t = RotationNumber::golden();
        assert_eq!(t.convergent_denominators(100), vec![1, 2, 3, 5, 8, 13, 21, 34, 55, 89]);
    }

    #[test]
    fn serde_uses_literal() {
        let t = RotationNumber::golden();
        let s = serde_json::to_string(&t).unwrap();
        assert_eq!(s, "\"[0;(1)]\"");
        assert_eq!(serde_json::from_str::<RotationNumber>(&s).unwrap(), t);
    }

    proptest! {
        #[test]
        fn multiplier_is_unimodular(pre in prop::collection::vec(1u32..20, 0..4), per in prop::collection::vec(1u32..20, 1..4)) {
            let t = RotationNumber::from_quotients(pre, per).unwrap();
            prop_assert!((t.multiplier().norm() - 1.0).abs() < 1e-15);
            prop_assert!(t.value() > 0.0 && t.value() < 1.0);
        }
    }
}
