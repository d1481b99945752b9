//! Face saturation analysis for affine semigroups.
//!
//! Given integer generators `a_1, …, a_n` of a pointed rational polyhedral
//! cone `K`, this crate decides for every face of `K` whether it carries a
//! saturation point of the semigroup `Q` they generate (almost saturated)
//! or not (nowhere saturated). It also computes the Hilbert basis, the
//! fundamental holes and windowed saturation data of `Q`, and builds
//! generator sets whose minimal almost saturated faces form a prescribed
//! antichain.
//!
//! All arithmetic is exact.

pub mod classify;
pub mod cone;
pub mod construct;
pub mod error;
pub mod exactla;
pub mod fixtures;
pub mod hilbert;
pub mod matrix_file;
pub mod pairtype;
pub mod report;
pub mod semigroup;

pub use error::{Error, Result};
pub use exactla::{IntMat, IntVec};
