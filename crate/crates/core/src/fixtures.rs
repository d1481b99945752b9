//! Bundled generator matrices.
//!
//! `ex21`, `ex22` and `ex23` are three semigroups in the plane with the same
//! saturation `{0 <= x_2 <= 4 x_1}` but different holes. `t2222` is the
//! design matrix of 2x2x2x2 contingency tables with three 2-marginals
//! `[12][13][14]` and the 3-marginal `[234]`, redundant rows removed.

use crate::exactla::IntMat;

pub const NAMES: [&str; 4] = ["ex21", "ex22", "ex23", "t2222"];

const T2222: [[i64; 16]; 12] = [
    [1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0],
    [0, 1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0],
    [0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1, 0],
    [0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1],
    [1, 0, 1, 0, 0, 0, 0, 0, 1, 0, 1, 0, 0, 0, 0, 0],
    [0, 1, 0, 1, 0, 0, 0, 0, 0, 1, 0, 1, 0, 0, 0, 0],
    [1, 0, 1, 0, 1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 1, 0, 1, 0, 1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0],
    [1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, 0, 0],
];

pub fn ex21() -> IntMat {
    IntMat::from_rows_i64(&[&[1, 1, 1, 1], &[0, 1, 3, 4]])
}

pub fn ex22() -> IntMat {
    IntMat::from_rows_i64(&[&[1, 1, 1, 1], &[0, 2, 3, 4]])
}

pub fn ex23() -> IntMat {
    IntMat::from_rows_i64(&[&[1, 1, 2, 1], &[0, 2, 5, 4]])
}

pub fn t2222() -> IntMat {
    let rows: Vec<&[i64]> = T2222.iter().map(|r| &r[..]).collect();
    IntMat::from_rows_i64(&rows)
}

/// Looks a fixture up by name.
pub fn by_name(name: &str) -> Option<IntMat> {
    match name {
        "ex21" => Some(ex21()),
        "ex22" => Some(ex22()),
        "ex23" => Some(ex23()),
        "t2222" => Some(t2222()),
        _ => None,
    }
}
