//! Cells of a 2x2x2x2 table and the orbit types of cell pairs.
//!
//! Cell `T_ijkl` sits in generator column `(i-1) + 2(k-1) + 4(j-1) + 8(l-1)`
//! (0-based) of the `t2222` fixture: `i` varies fastest, then `k`, `j`, `l`.
//! The symmetry group flips either value of each index independently and
//! permutes `j, k, l`; `i` stays apart. A pair of distinct cells is typed by
//! whether it agrees in `i` and by how many of `j, k, l` agree.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellIndex {
    pub i: u8,
    pub j: u8,
    pub k: u8,
    pub l: u8,
}

impl CellIndex {
    pub fn new(i: u8, j: u8, k: u8, l: u8) -> Result<Self> {
        if [i, j, k, l].iter().all(|v| (1..=2).contains(v)) {
            Ok(CellIndex { i, j, k, l })
        } else {
            Err(Error::InvalidInput(format!(
                "cell indices must be 1 or 2, got {i}{j}{k}{l}"
            )))
        }
    }

    /// Parses `"1122"` style labels.
    pub fn parse(text: &str) -> Result<Self> {
        let digits: Vec<u8> = text.bytes().map(|b| b.wrapping_sub(b'0')).collect();
        match digits[..] {
            [i, j, k, l] => CellIndex::new(i, j, k, l),
            _ => Err(Error::InvalidInput(format!("expected four digits, got {text:?}"))),
        }
    }

    /// 0-based generator column.
    pub fn column(self) -> usize {
        usize::from(self.i - 1) + 2 * usize::from(self.k - 1) + 4 * usize::from(self.j - 1) + 8 * usize::from(self.l - 1)
    }

    pub fn from_column(col: usize) -> Result<Self> {
        if col >= 16 {
            return Err(Error::InvalidInput(format!("column {col} is out of range 0..16")));
        }
        let bit = |b: usize| ((col >> b) & 1) as u8 + 1;
        Ok(CellIndex {
            i: bit(0),
            k: bit(1),
            j: bit(2),
            l: bit(3),
        })
    }

    pub fn all() -> impl Iterator<Item = CellIndex> {
        (0..16).map(|c| CellIndex::from_column(c).expect("in range"))
    }
}

impl fmt::Display for CellIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}{}", self.i, self.j, self.k, self.l)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum PairType {
    #[serde(rename = "1a")]
    T1a,
    #[serde(rename = "1b")]
    T1b,
    #[serde(rename = "1c")]
    T1c,
    #[serde(rename = "2a")]
    T2a,
    #[serde(rename = "2b")]
    T2b,
    #[serde(rename = "2c")]
    T2c,
    #[serde(rename = "2d")]
    T2d,
}

impl PairType {
    pub const ALL: [PairType; 7] = [
        PairType::T1a,
        PairType::T1b,
        PairType::T1c,
        PairType::T2a,
        PairType::T2b,
        PairType::T2c,
        PairType::T2d,
    ];

    pub fn label(self) -> &'static str {
        match self {
            PairType::T1a => "1a",
            PairType::T1b => "1b",
            PairType::T1c => "1c",
            PairType::T2a => "2a",
            PairType::T2b => "2b",
            PairType::T2c => "2c",
            PairType::T2d => "2d",
        }
    }
}

impl fmt::Display for PairType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

pub fn pair_type(a: CellIndex, b: CellIndex) -> Result<PairType> {
    if a == b {
        return Err(Error::SameCell);
    }
    let common = [(a.j, b.j), (a.k, b.k), (a.l, b.l)]
        .iter()
        .filter(|(x, y)| x == y)
        .count();
    Ok(match (a.i == b.i, common) {
        (true, 0) => PairType::T1a,
        (true, 1) => PairType::T1b,
        // two cells agreeing everywhere would be equal
        (true, _) => PairType::T1c,
        (false, 0) => PairType::T2a,
        (false, 1) => PairType::T2b,
        (false, 2) => PairType::T2c,
        (false, _) => PairType::T2d,
    })
}

/// Type of the pair of cells in two 0-based generator columns.
pub fn pair_type_of_columns(a: usize, b: usize) -> Result<PairType> {
    pair_type(CellIndex::from_column(a)?, CellIndex::from_column(b)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: &str) -> CellIndex {
        CellIndex::parse(s).unwrap()
    }

    #[test]
    fn layout_matches_table_picture() {
        let expected = [
            "1111", "2111", "1121", "2121", "1211", "2211", "1221", "2221", "1112", "2112", "1122",
            "2122", "1212", "2212", "1222", "2222",
        ];
        for (col, label) in expected.iter().enumerate() {
            assert_eq!(CellIndex::from_column(col).unwrap().to_string(), *label);
            assert_eq!(c(label).column(), col);
        }
    }

    #[test]
    fn worked_pairs() {
        assert_eq!(pair_type(c("1122"), c("2112")).unwrap(), PairType::T2c);
        assert_eq!(pair_type(c("1122"), c("2121")).unwrap(), PairType::T2c);
        assert_eq!(pair_type(c("1111"), c("1222")).unwrap(), PairType::T1a);
        assert!(matches!(pair_type(c("1111"), c("1111")), Err(Error::SameCell)));
    }

    #[test]
    fn bad_cells_rejected() {
        assert!(CellIndex::parse("1131").is_err());
        assert!(CellIndex::parse("111").is_err());
        assert!(CellIndex::from_column(16).is_err());
    }

    #[test]
    fn orbit_sizes() {
        // 120 unordered pairs split by type
        let mut counts = std::collections::BTreeMap::new();
        let cells: Vec<_> = CellIndex::all().collect();
        for (x, a) in cells.iter().enumerate() {
            for b in &cells[x + 1..] {
                *counts.entry(pair_type(*a, *b).unwrap()).or_insert(0) += 1;
            }
        }
        let got: Vec<_> = PairType::ALL.iter().map(|t| counts[t]).collect();
        assert_eq!(got, vec![8, 24, 24, 8, 24, 24, 8]);
    }
}
