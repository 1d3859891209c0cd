//! Transfer rates `a1..a12` of the trophic network and the sufficient
//! conditions under which the operator maps the simplex into itself.
//!
//! Compartment flows, by rate:
//!
//! | rate | flow                                   |
//! |------|----------------------------------------|
//! | a1   | phytoplankton uptake of DIM            |
//! | a2   | zooplankton grazing on phytoplankton   |
//! | a3   | mixoplankton grazing on phytoplankton  |
//! | a4   | phytoplankton death into DOM           |
//! | a5   | zooplankton death into DOM             |
//! | a6   | zooplankton death into DIM             |
//! | a7   | mixoplankton uptake of DIM             |
//! | a8   | mixoplankton death into DIM            |
//! | a9   | mixoplankton death into DOM            |
//! | a10  | bacterial consumption of DOM           |
//! | a11  | bacterial consumption of DIM           |
//! | a12  | bacterial death into DIM               |

use std::fmt;

use serde::de::{self, Deserializer};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const RATE_COUNT: usize = 12;

/// The twelve transfer rates. Construction only checks finiteness; use
/// [`Parameters::validate`] (or [`crate::Qso::new`]) for the model conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Parameters {
    rates: [f64; RATE_COUNT],
}

impl Parameters {
    pub fn new(rates: [f64; RATE_COUNT]) -> Result<Self> {
        for (i, &value) in rates.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFiniteRate {
                    index: i + 1,
                    value,
                });
            }
        }
        Ok(Self { rates })
    }

    /// All rates equal to `value`.
    pub fn uniform(value: f64) -> Result<Self> {
        Self::new([value; RATE_COUNT])
    }

    /// Returns a copy with rate `a{index}` (1-based) replaced.
    pub fn with(mut self, index: usize, value: f64) -> Result<Self> {
        assert!(
            (1..=RATE_COUNT).contains(&index),
            "rate index {index} out of 1..=12"
        );
        self.rates[index - 1] = value;
        Self::new(self.rates)
    }

    /// Rate `a{index}`, 1-based.
    #[inline]
    pub fn a(&self, index: usize) -> f64 {
        self.rates[index - 1]
    }

    #[inline]
    pub fn rates(&self) -> &[f64; RATE_COUNT] {
        &self.rates
    }

    pub fn validate(&self) -> ValidityReport {
        let mut violations = Vec::new();
        for (i, &value) in self.rates.iter().enumerate() {
            if value <= 0.0 {
                violations.push(Constraint::Positive(i + 1));
            }
        }
        violations.extend(
            Constraint::SIMPLEX_CONDITIONS
                .iter()
                .copied()
                .filter(|c| !c.holds(self)),
        );
        ValidityReport { violations }
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_valid()
    }
}

/// One inequality of the validity conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constraint {
    /// `a{k} > 0`
    Positive(usize),
    /// `a{k} ≤ 1`
    AtMostOne(usize),
    /// `a{i} + a{j} ≤ 1`
    SumAtMostOne(usize, usize),
    /// `|a{i} − a{j}| ≤ 1`
    GapAtMostOne(usize, usize),
}

impl Constraint {
    pub const SIMPLEX_CONDITIONS: [Constraint; 10] = [
        Constraint::AtMostOne(1),
        Constraint::AtMostOne(6),
        Constraint::AtMostOne(10),
        Constraint::AtMostOne(12),
        Constraint::SumAtMostOne(2, 4),
        Constraint::SumAtMostOne(3, 4),
        Constraint::SumAtMostOne(5, 6),
        Constraint::SumAtMostOne(8, 9),
        Constraint::GapAtMostOne(7, 8),
        Constraint::GapAtMostOne(11, 12),
    ];

    pub fn holds(&self, p: &Parameters) -> bool {
        match *self {
            Constraint::Positive(k) => p.a(k) > 0.0,
            Constraint::AtMostOne(k) => p.a(k) <= 1.0,
            Constraint::SumAtMostOne(i, j) => p.a(i) + p.a(j) <= 1.0,
            Constraint::GapAtMostOne(i, j) => (p.a(i) - p.a(j)).abs() <= 1.0,
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Constraint::Positive(k) => write!(f, "a{k}>0"),
            Constraint::AtMostOne(k) => write!(f, "a{k}≤1"),
            Constraint::SumAtMostOne(i, j) => write!(f, "a{i}+a{j}≤1"),
            Constraint::GapAtMostOne(i, j) => write!(f, "|a{i}−a{j}|≤1"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidityReport {
    pub violations: Vec<Constraint>,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violation_names(&self) -> Vec<String> {
        self.violations.iter().map(ToString::to_string).collect()
    }
}

impl fmt::Display for ValidityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return f.write_str("valid");
        }
        f.write_str(&self.violation_names().join(", "))
    }
}

impl Serialize for ValidityReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(2))?;
        map.serialize_entry("valid", &self.is_valid())?;
        map.serialize_entry("violations", &self.violation_names())?;
        map.end()
    }
}

const KEYS: [&str; RATE_COUNT] = [
    "a1", "a2", "a3", "a4", "a5", "a6", "a7", "a8", "a9", "a10", "a11", "a12",
];

impl Serialize for Parameters {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(RATE_COUNT))?;
        for (key, value) in KEYS.iter().zip(self.rates.iter()) {
            map.serialize_entry(key, value)?;
        }
        map.end()
    }
}

/// A rate written either as a JSON number or as a decimal string.
#[derive(Deserialize)]
#[serde(untagged)]
pub(crate) enum RateText {
    Number(f64),
    Text(String),
}

impl RateText {
    pub(crate) fn parse(self) -> std::result::Result<f64, String> {
        match self {
            RateText::Number(v) => Ok(v),
            RateText::Text(s) => s
                .trim()
                .parse::<f64>()
                .map_err(|e| format!("cannot parse {s:?} as a number: {e}")),
        }
    }
}

impl<'de> Deserialize<'de> for Parameters {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            a1: RateText,
            a2: RateText,
            a3: RateText,
            a4: RateText,
            a5: RateText,
            a6: RateText,
            a7: RateText,
            a8: RateText,
            a9: RateText,
            a10: RateText,
            a11: RateText,
            a12: RateText,
        }
        let raw = Raw::deserialize(deserializer)?;
        let fields = [
            raw.a1, raw.a2, raw.a3, raw.a4, raw.a5, raw.a6, raw.a7, raw.a8, raw.a9, raw.a10,
            raw.a11, raw.a12,
        ];
        let mut rates = [0.0; RATE_COUNT];
        for (slot, field) in rates.iter_mut().zip(fields) {
            *slot = field.parse().map_err(de::Error::custom)?;
        }
        Parameters::new(rates).map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_tenths_are_valid() {
        let p = Parameters::uniform(0.1).unwrap();
        assert!(p.validate().is_valid());
    }

    #[test]
    fn sum_violation_is_named() {
        let p = Parameters::uniform(0.1)
            .unwrap()
            .with(2, 0.6)
            .unwrap()
            .with(4, 0.5)
            .unwrap();
        let report = p.validate();
        assert_eq!(report.violations, vec![Constraint::SumAtMostOne(2, 4)]);
        assert_eq!(report.violation_names(), vec!["a2+a4≤1".to_string()]);
    }

    #[test]
    fn gap_violation_is_named() {
        let p = Parameters::uniform(0.1)
            .unwrap()
            .with(7, 1.5)
            .unwrap()
            .with(8, 0.3)
            .unwrap();
        assert_eq!(
            p.validate().violation_names(),
            vec!["|a7−a8|≤1".to_string()]
        );
    }

    #[test]
    fn zero_rate_is_invalid() {
        let p = Parameters::uniform(0.1).unwrap().with(5, 0.0).unwrap();
        assert_eq!(p.validate().violations, vec![Constraint::Positive(5)]);
    }

    #[test]
    fn boundary_equalities_are_accepted() {
        // a2 + a4 = 1 and |a11 - a12| = 1 exactly
        let p = Parameters::new([
            0.5, 0.75, 0.25, 0.25, 0.5, 0.5, 0.5, 0.5, 0.5, 1.0, 1.0, 1.0,
        ])
        .unwrap();
        assert!(p.is_valid(), "{}", p.validate());
    }

    #[test]
    fn non_finite_is_rejected() {
        let mut rates = [0.1; RATE_COUNT];
        rates[6] = f64::NAN;
        assert!(matches!(
            Parameters::new(rates),
            Err(Error::NonFiniteRate { index: 7, .. })
        ));
    }

    #[test]
    fn json_accepts_numbers_and_strings() {
        let text = r#"{"a1":0.1,"a2":"0.2","a3":0.3,"a4":0.1,"a5":0.1,"a6":0.1,
                       "a7":0.1,"a8":0.1,"a9":0.1,"a10":0.1,"a11":0.4,"a12":"2e-1"}"#;
        let p: Parameters = serde_json::from_str(text).unwrap();
        assert_eq!(p.a(2), 0.2);
        assert_eq!(p.a(12), 0.2);
        let back: Parameters = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn json_missing_key_fails() {
        let text = r#"{"a1":0.1,"a2":0.1,"a3":0.1,"a4":0.1,"a5":0.1,"a6":0.1,
                       "a8":0.1,"a9":0.1,"a10":0.1,"a11":0.1,"a12":0.1}"#;
        let err = serde_json::from_str::<Parameters>(text).unwrap_err();
        assert!(err.to_string().contains("a7"), "{err}");
    }
}
