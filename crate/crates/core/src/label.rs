//! Symbol and outcome labels.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// A symbol or function outcome. Integers compare numerically and sort
/// before strings.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    Int(i64),
    Str(String),
}

impl Label {
    pub fn as_int(&self) -> Option<i64> {
        match self {
            Label::Int(v) => Some(*v),
            Label::Str(_) => None,
        }
    }

    /// Parses a token: integers become `Int`, anything else `Str`.
    pub fn parse(token: &str) -> Label {
        match token.parse::<i64>() {
            Ok(v) => Label::Int(v),
            Err(_) => Label::Str(token.to_string()),
        }
    }
}

impl Ord for Label {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Label::Int(a), Label::Int(b)) => a.cmp(b),
            (Label::Int(_), Label::Str(_)) => Ordering::Less,
            (Label::Str(_), Label::Int(_)) => Ordering::Greater,
            (Label::Str(a), Label::Str(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for Label {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Int(v) => write!(f, "{v}"),
            Label::Str(s) => write!(f, "{s}"),
        }
    }
}

impl From<i64> for Label {
    fn from(v: i64) -> Self {
        Label::Int(v)
    }
}

impl From<&str> for Label {
    fn from(v: &str) -> Self {
        Label::Str(v.to_string())
    }
}

/// Ordered list of distinct labels for one source.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Alphabet(Vec<Label>);

impl Alphabet {
    pub fn new(symbols: Vec<Label>) -> Result<Self> {
        if symbols.is_empty() {
            return invalid("alphabet must be nonempty");
        }
        let mut sorted = symbols.clone();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return invalid("alphabet labels must be distinct");
        }
        Ok(Alphabet(symbols))
    }

    /// Integer alphabet `lo..=hi`.
    pub fn range(lo: i64, hi: i64) -> Self {
        Alphabet((lo..=hi).map(Label::Int).collect())
    }

    pub fn from_ints(values: &[i64]) -> Result<Self> {
        Self::new(values.iter().copied().map(Label::Int).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[Label] {
        &self.0
    }

    pub fn get(&self, i: usize) -> &Label {
        &self.0[i]
    }

    pub fn index_of(&self, label: &Label) -> Option<usize> {
        self.0.iter().position(|l| l == label)
    }
}

impl<'de> Deserialize<'de> for Alphabet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let symbols = Vec::<Label>::deserialize(d)?;
        Alphabet::new(symbols).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ints_sort_numerically_before_strings() {
        let mut v = vec![Label::from("a"), Label::Int(10), Label::Int(-2), Label::Int(3)];
        v.sort();
        assert_eq!(v, vec![Label::Int(-2), Label::Int(3), Label::Int(10), Label::from("a")]);
    }

    #[test]
    fn rejects_duplicates_and_empty() {
        assert!(Alphabet::from_ints(&[1, 2, 1]).is_err());
        assert!(Alphabet::new(vec![]).is_err());
    }

    #[test]
    fn json_untagged() {
        let a: Alphabet = serde_json::from_str(r#"[0, "x", -3]"#).unwrap();
        assert_eq!(a.get(1), &Label::from("x"));
        assert_eq!(serde_json::to_string(&a).unwrap(), r#"[0,"x",-3]"#);
    }
}
