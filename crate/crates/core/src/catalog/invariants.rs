use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational, Rational};

/// Whose one-point invariant a row records.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum InvariantKind {
    X,
    D,
}

impl fmt::Display for InvariantKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InvariantKind::X => "X",
            InvariantKind::D => "D",
        })
    }
}

impl FromStr for InvariantKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "X" | "x" => Ok(InvariantKind::X),
            "D" | "d" => Ok(InvariantKind::D),
            other => Err(Error::Table(format!("unknown invariant kind `{other}` (expected X or D)"))),
        }
    }
}

/// Insertion label of the plain point class.
pub const POINT: &str = "pt";
/// Insertion label of point invariants already deformed by the mirror map in D.
pub const POINT_TAU_D: &str = "pt;tauD";

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InvariantKey {
    pub kind: InvariantKind,
    pub class: Vec<u32>,
    pub psi_power: u32,
    pub insertion: String,
}

/// One-point descendant invariants `<[pt] psi^a>_beta` of X or D.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct InvariantTable {
    entries: BTreeMap<InvariantKey, Rational>,
}

/// Serialized row, shared by the CSV and JSON forms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantRow {
    pub kind: String,
    pub class: String,
    pub psi_power: u32,
    pub insertion: String,
    pub value: String,
}

impl InvariantTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &BTreeMap<InvariantKey, Rational> {
        &self.entries
    }

    /// Inserts a row; a repeated key is an error.
    pub fn insert(&mut self, key: InvariantKey, value: Rational) -> Result<()> {
        if self.entries.contains_key(&key) {
            return Err(Error::Table(format!(
                "duplicate row kind={} class={} psi_power={} insertion={}",
                key.kind,
                format_class(&key.class),
                key.psi_power,
                key.insertion
            )));
        }
        self.entries.insert(key, value);
        Ok(())
    }

    pub fn get(&self, key: &InvariantKey) -> Option<&Rational> {
        self.entries.get(key)
    }

    /// Rows of one kind and insertion, as `(class, psi_power, value)`.
    pub fn rows<'a>(
        &'a self,
        kind: InvariantKind,
        insertion: &'a str,
    ) -> impl Iterator<Item = (&'a [u32], u32, &'a Rational)> + 'a {
        self.entries
            .iter()
            .filter(move |(k, _)| k.kind == kind && k.insertion == insertion)
            .map(|(k, v)| (k.class.as_slice(), k.psi_power, v))
    }

    pub fn has_rows(&self, kind: InvariantKind, insertion: &str) -> bool {
        self.rows(kind, insertion).next().is_some()
    }

    /// Checks that every class has the expected number of coordinates.
    pub fn check_arity(&self, nvars: usize) -> Result<()> {
        for key in self.entries.keys() {
            if key.class.len() != nvars {
                return Err(Error::Table(format!(
                    "class {} has {} coordinates, geometry has {nvars} Novikov variables",
                    format_class(&key.class),
                    key.class.len()
                )));
            }
        }
        Ok(())
    }

    pub fn from_rows(rows: impl IntoIterator<Item = InvariantRow>) -> Result<Self> {
        let mut table = Self::new();
        for (i, row) in rows.into_iter().enumerate() {
            let kind = row.kind.parse()?;
            let class = parse_class(&row.class).map_err(|e| Error::Table(format!("row {}: {e}", i + 1)))?;
            let value = parse_rational(&row.value).map_err(|e| Error::Table(format!("row {}: {e}", i + 1)))?;
            let insertion = row.insertion.trim().to_string();
            if insertion.is_empty() {
                return Err(Error::Table(format!("row {}: empty insertion", i + 1)));
            }
            table.insert(
                InvariantKey {
                    kind,
                    class,
                    psi_power: row.psi_power,
                    insertion,
                },
                value,
            )?;
        }
        Ok(table)
    }

    pub fn to_rows(&self) -> Vec<InvariantRow> {
        self.entries
            .iter()
            .map(|(k, v)| InvariantRow {
                kind: k.kind.to_string(),
                class: format_class(&k.class),
                psi_power: k.psi_power,
                insertion: k.insertion.clone(),
                value: format_rational(v),
            })
            .collect()
    }

    /// Parses the delimited form with header `kind,class,psi_power,insertion,value`.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let rows = reader
            .deserialize::<InvariantRow>()
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Table(e.to_string()))?;
        Self::from_rows(rows)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        for row in self.to_rows() {
            writer.serialize(row).map_err(|e| Error::Table(e.to_string()))?;
        }
        let bytes = writer.into_inner().map_err(|e| Error::Table(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Table(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let rows: Vec<InvariantRow> = serde_json::from_str(text).map_err(|e| Error::Table(e.to_string()))?;
        Self::from_rows(rows)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(&self.to_rows()).map_err(|e| Error::Table(e.to_string()))
    }

    /// Picks JSON or CSV by the first non-blank character.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('[') {
            Self::from_json(text)
        } else if text.trim().is_empty() {
            Ok(Self::new())
        } else {
            Self::from_csv(text)
        }
    }

    /// Copy with 1 added to the X point invariant of least class weight.
    pub fn perturbed(&self, weight: impl Fn(&[u32]) -> u64) -> Result<(Self, InvariantKey)> {
        let key = self
            .entries
            .keys()
            .filter(|k| k.kind == InvariantKind::X && k.insertion == POINT)
            .min_by_key(|k| (weight(&k.class), k.class.clone()))
            .cloned()
            .ok_or_else(|| Error::Table("no X point invariant to perturb".into()))?;
        let mut out = self.clone();
        let v = out.entries.get_mut(&key).expect("key taken from the table");
        *v += Rational::one();
        Ok((out, key))
    }
}

/// Space-separated exponent vector, e.g. `2 1`.
pub fn parse_class(text: &str) -> Result<Vec<u32>> {
    let parts: Vec<&str> = text.split_whitespace().collect();
    if parts.is_empty() {
        return Err(Error::Table("empty curve class".into()));
    }
    parts
        .iter()
        .map(|p| {
            p.parse::<u32>()
                .map_err(|_| Error::Table(format!("curve class entry `{p}` is not a non-negative integer")))
        })
        .collect()
}

pub fn format_class(class: &[u32]) -> String {
    class.iter().map(u32::to_string).collect::<Vec<_>>().join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{factorial_q, rat, ratio};

    const HEADER: &str = "kind,class,psi_power,insertion,value\n";

    #[test]
    fn stores_projective_point_invariant() {
        // P^3, d = 1: 1/(1!)^4
        let want = factorial_q(1).recip().pow(4);
        let t = InvariantTable::from_csv(&format!("{HEADER}X,1,2,pt,1\n")).unwrap();
        let key = InvariantKey {
            kind: InvariantKind::X,
            class: vec![1],
            psi_power: 2,
            insertion: POINT.into(),
        };
        assert_eq!(t.get(&key), Some(&want));
    }

    #[test]
    fn empty_inputs() {
        assert!(InvariantTable::parse("").unwrap().is_empty());
        assert!(InvariantTable::from_csv(HEADER).unwrap().is_empty());
        assert!(InvariantTable::parse("[]").unwrap().is_empty());
    }

    #[test]
    fn duplicates_and_bad_values_rejected() {
        let dup = format!("{HEADER}X,2,6,pt,1/16\nX,2,6,pt,1/16\n");
        assert!(matches!(InvariantTable::from_csv(&dup), Err(Error::Table(m)) if m.contains("duplicate")));
        let bad = format!("{HEADER}X,2,6,pt,0.0625\n");
        assert!(InvariantTable::from_csv(&bad).is_err());
        let kind = format!("{HEADER}Z,2,6,pt,1\n");
        assert!(InvariantTable::from_csv(&kind).is_err());
    }

    #[test]
    fn csv_and_json_round_trip() {
        let t = InvariantTable::from_csv(&format!("{HEADER}X,1 0,2,pt,1/16\nD,0 2,0,pt,-3\n")).unwrap();
        assert_eq!(InvariantTable::from_csv(&t.to_csv().unwrap()).unwrap(), t);
        assert_eq!(InvariantTable::parse(&t.to_json().unwrap()).unwrap(), t);
        assert!(t.check_arity(2).is_ok());
        assert!(t.check_arity(1).is_err());
    }

    #[test]
    fn perturbation_hits_lowest_class() {
        let t = InvariantTable::from_csv(&format!("{HEADER}X,2,6,pt,1/16\nX,1,2,pt,1\n")).unwrap();
        let (p, key) = t.perturbed(|c| c[0] as u64).unwrap();
        assert_eq!(key.class, vec![1]);
        assert_eq!(p.get(&key), Some(&rat(2)));
        let k2 = InvariantKey {
            class: vec![2],
            psi_power: 6,
            ..key
        };
        assert_eq!(p.get(&k2), Some(&ratio(1, 16)));
    }
}
