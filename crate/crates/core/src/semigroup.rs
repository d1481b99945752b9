//! The semigroup `Q(A)` generated by the columns of `A`.
//!
//! Points are in the cone's internal coordinates (see
//! [`crate::cone::LatticeTransform`]), where the saturation of `Q` is
//! `K ∩ Z^d`.
//!
//! Two facts keep the fundamental holes finite and cheap to recognise:
//!
//! * `x ∈ K ∩ Z^d`, `x ≠ 0`, is a fundamental hole iff `x - a_i ∉ K` for
//!   every generator. If `x - q ∈ K` for some nonzero `q ∈ Q` then
//!   `x - a_i = (x - q) + (q - a_i) ∈ K` for any generator `a_i` used in `q`.
//! * if a real nonnegative representation `x = Σ λ_i a_i` has some
//!   `λ_i >= 1` then `x - a_i ∈ K`. Fundamental holes therefore lie in the
//!   half-open zonotope `{Σ λ_i a_i : 0 <= λ_i < 1}`, whose coordinate
//!   bounding box is scanned.

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::exactla::{IntMat, IntVec};

/// Default cap on the number of lattice points a window scan may visit.
pub const DEFAULT_POINT_BUDGET: u64 = 2_000_000;

/// A finite region of lattice points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Window {
    /// Inclusive per-coordinate bounds.
    Box(Vec<(BigInt, BigInt)>),
    /// Points of `K` with grading at most the cap.
    GradingCap(BigInt),
}

impl Window {
    pub fn boxed(bounds: &[(i64, i64)]) -> Window {
        Window::Box(
            bounds
                .iter()
                .map(|&(lo, hi)| (BigInt::from(lo), BigInt::from(hi)))
                .collect(),
        )
    }

    /// Parses `"x1..y1,x2..y2,…"`.
    pub fn parse_box(text: &str) -> Result<Window> {
        let mut bounds = Vec::new();
        for (i, part) in text.split(',').enumerate() {
            let (lo, hi) = part
                .split_once("..")
                .ok_or_else(|| Error::InvalidInput(format!("window range {} lacks '..'", i + 1)))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<BigInt>()
                    .map_err(|_| Error::InvalidInput(format!("bad window bound {s:?}")))
            };
            let (lo, hi) = (parse(lo)?, parse(hi)?);
            if lo > hi {
                return Err(Error::InvalidInput(format!("empty window range {}", i + 1)));
            }
            bounds.push((lo, hi));
        }
        Ok(Window::Box(bounds))
    }
}

/// The finite set `H₀` of fundamental holes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FundamentalHoleSet {
    pub holes: Vec<IntVec>,
}

impl FundamentalHoleSet {
    pub fn is_empty(&self) -> bool {
        self.holes.is_empty()
    }

    pub fn len(&self) -> usize {
        self.holes.len()
    }
}

/// Windowed saturation data. Minimality is only certified against the
/// points of the window, never globally.
#[derive(Clone, Debug, Serialize)]
pub struct WindowedSets {
    pub q_points: Vec<IntVec>,
    pub holes: Vec<IntVec>,
    pub saturation_points: Vec<IntVec>,
    pub sbar: Vec<IntVec>,
    pub min_ss: Vec<IntVec>,
    pub min_sq: Vec<IntVec>,
    pub note: &'static str,
}

pub const WINDOWED_NOTE: &str =
    "windowed: minimality certified only against in-window points below s in grading";

#[derive(Clone, Debug)]
pub struct Semigroup {
    cone: Cone,
    grading: IntVec,
    /// facet values of each generator, `[gen][facet]`
    gen_values: Vec<Vec<BigInt>>,
}

impl Semigroup {
    pub fn new(cone: Cone) -> Self {
        let d = cone.dim();
        let grading = cone
            .facet_normals()
            .iter()
            .fold(IntVec::zeros(d), |acc, f| &acc + f);
        let gen_values = cone
            .generators()
            .columns()
            .iter()
            .map(|a| cone.facet_normals().iter().map(|f| f.dot(a)).collect())
            .collect();
        Semigroup {
            cone,
            grading,
            gen_values,
        }
    }

    pub fn from_generators(a: &IntMat) -> Result<Self> {
        Ok(Self::new(Cone::ingest(a)?))
    }

    pub fn cone(&self) -> &Cone {
        &self.cone
    }

    pub fn generators(&self) -> &IntMat {
        self.cone.generators()
    }

    /// Sum of all facet normals; strictly positive on `K \ {0}`.
    pub fn grading(&self) -> &IntVec {
        &self.grading
    }

    fn facet_values(&self, x: &IntVec) -> Vec<BigInt> {
        self.cone.facet_normals().iter().map(|f| f.dot(x)).collect()
    }

    /// A nonnegative integer combination of the generators equal to `b`, or
    /// `None` when `b ∉ Q`.
    ///
    /// Depth-first over the generators in column order, largest multiplicity
    /// first. The residual is tracked through its facet values, which
    /// determine it since the normals span; a branch dies as soon as the
    /// residual leaves `K`, and dead `(generator, residual)` states are
    /// remembered.
    pub fn member_q(&self, b: &IntVec) -> Option<IntVec> {
        let n = self.cone.num_generators();
        let mut levels = self.facet_values(b);
        if levels.iter().any(Signed::is_negative) {
            return None;
        }
        let mut x = vec![BigInt::zero(); n];
        let mut dead = HashSet::new();
        self.member_search(0, &mut levels, &mut x, &mut dead)
            .then(|| IntVec::new(x))
    }

    fn member_search(
        &self,
        i: usize,
        levels: &mut [BigInt],
        x: &mut [BigInt],
        dead: &mut HashSet<(usize, Vec<BigInt>)>,
    ) -> bool {
        if levels.iter().all(Zero::is_zero) {
            return true;
        }
        if i == x.len() || dead.contains(&(i, levels.to_vec())) {
            return false;
        }
        let vals = &self.gen_values[i];
        let bound = vals
            .iter()
            .zip(levels.iter())
            .filter(|(v, _)| v.is_positive())
            .map(|(v, l)| l.div_floor(v))
            .min()
            .expect("nonzero generator of a pointed cone");
        let mut k = bound;
        for (l, v) in levels.iter_mut().zip(vals) {
            *l -= v * &k;
        }
        loop {
            x[i] = k.clone();
            if self.member_search(i + 1, levels, x, dead) {
                return true;
            }
            if k.is_zero() {
                break;
            }
            k -= 1;
            for (l, v) in levels.iter_mut().zip(vals) {
                *l += v;
            }
        }
        x[i] = BigInt::zero();
        dead.insert((i, levels.to_vec()));
        false
    }

    /// Lattice points of `K` inside the window, sorted.
    pub fn lattice_points(&self, window: &Window, budget: u64) -> Result<Vec<IntVec>> {
        let d = self.cone.dim();
        let bounds = match window {
            Window::Box(b) => {
                if b.len() != d {
                    return Err(Error::InvalidInput(format!(
                        "window has {} ranges, the cone lives in dimension {d}",
                        b.len()
                    )));
                }
                b.clone()
            }
            Window::GradingCap(cap) => self.grading_box(cap),
        };
        let mut points = Vec::new();
        scan_box(&bounds, budget, |x| {
            if !self.cone.contains(x) {
                return;
            }
            if let Window::GradingCap(cap) = window {
                if &self.grading.dot(x) > cap {
                    return;
                }
            }
            points.push(x.clone());
        })?;
        points.sort();
        Ok(points)
    }

    /// Coordinate box around `{x ∈ K : w·x <= cap}`, whose vertices are the
    /// origin and the rays scaled to grading `cap`.
    fn grading_box(&self, cap: &BigInt) -> Vec<(BigInt, BigInt)> {
        let d = self.cone.dim();
        let mut bounds = vec![(BigInt::zero(), BigInt::zero()); d];
        if cap.is_negative() {
            return bounds;
        }
        for r in self.cone.extreme_rays() {
            let g = self.grading.dot(r);
            for (k, (lo, hi)) in bounds.iter_mut().enumerate() {
                let num = &r[k] * cap;
                let low = num.div_floor(&g);
                let high = num.div_ceil(&g);
                if low < *lo {
                    *lo = low;
                }
                if high > *hi {
                    *hi = high;
                }
            }
        }
        bounds
    }

    /// Points of `K ∩ Z^d` in the window that are not in `Q`.
    pub fn holes_in_window(&self, window: &Window, budget: u64) -> Result<Vec<IntVec>> {
        Ok(self
            .lattice_points(window, budget)?
            .into_iter()
            .filter(|x| self.member_q(x).is_none())
            .collect())
    }

    /// Coordinate bounding box of the half-open zonotope of the generators.
    pub fn zonotope_box(&self) -> Vec<(BigInt, BigInt)> {
        let a = self.cone.generators();
        (0..a.rows())
            .map(|k| {
                let mut lo = BigInt::zero();
                let mut hi = BigInt::zero();
                for j in 0..a.cols() {
                    let x = &a[(k, j)];
                    if x.is_negative() {
                        lo += x;
                    } else {
                        hi += x;
                    }
                }
                (lo, hi)
            })
            .collect()
    }

    /// All fundamental holes, by scanning the zonotope box.
    pub fn fundamental_holes(&self, budget: u64) -> Result<FundamentalHoleSet> {
        let bounds = self.zonotope_box();
        let mut holes = Vec::new();
        scan_box(&bounds, budget, |x| {
            if x.is_zero() {
                return;
            }
            let vals = self.facet_values(x);
            if vals.iter().any(Signed::is_negative) {
                return;
            }
            let reducible = self
                .gen_values
                .iter()
                .any(|g| vals.iter().zip(g).all(|(v, gv)| v >= gv));
            if !reducible {
                holes.push(x.clone());
            }
        })?;
        holes.sort();
        Ok(FundamentalHoleSet { holes })
    }

    /// Whether `a ∈ Q` is a saturation point: `a + y ∈ Q` for every
    /// fundamental hole `y`.
    pub fn is_saturation_point(&self, h0: &FundamentalHoleSet, a: &IntVec) -> Result<bool> {
        if self.member_q(a).is_none() {
            return Err(Error::NotInSemigroup(a.to_string()));
        }
        Ok(h0.holes.iter().all(|y| self.member_q(&(a + y)).is_some()))
    }

    /// Windowed `S̄`, `min(S;S)` and `min(S;Q)`.
    pub fn windowed_min_sets(
        &self,
        h0: &FundamentalHoleSet,
        window: &Window,
        budget: u64,
    ) -> Result<WindowedSets> {
        let points = self.lattice_points(window, budget)?;
        let mut q_points = Vec::new();
        let mut holes = Vec::new();
        for p in points {
            if self.member_q(&p).is_some() {
                q_points.push(p);
            } else {
                holes.push(p);
            }
        }
        let mut saturation_points = Vec::new();
        let mut sbar = Vec::new();
        for p in &q_points {
            if self.is_saturation_point(h0, p)? {
                saturation_points.push(p.clone());
            } else {
                sbar.push(p.clone());
            }
        }

        let mut sat_cache: HashMap<IntVec, bool> = HashMap::new();
        let mut is_sat = |x: &IntVec| -> bool {
            if let Some(&v) = sat_cache.get(x) {
                return v;
            }
            let v = self.cone.contains(x)
                && self.member_q(x).is_some()
                && h0.holes.iter().all(|y| self.member_q(&(x + y)).is_some());
            sat_cache.insert(x.clone(), v);
            v
        };
        let mut min_ss = Vec::new();
        let mut min_sq = Vec::new();
        for s in &saturation_points {
            let ws = self.grading.dot(s);
            let below: Vec<&IntVec> = saturation_points
                .iter()
                .filter(|t| *t != s && self.grading.dot(t) <= ws)
                .collect();
            let diffs: Vec<IntVec> = below
                .iter()
                .map(|t| s - t)
                .filter(|d| self.cone.contains(d))
                .collect();
            if !diffs.iter().any(&mut is_sat) {
                min_ss.push(s.clone());
            }
            if !diffs.iter().any(|d| self.member_q(d).is_some()) {
                min_sq.push(s.clone());
            }
        }
        Ok(WindowedSets {
            q_points,
            holes,
            saturation_points,
            sbar,
            min_ss,
            min_sq,
            note: WINDOWED_NOTE,
        })
    }
}

/// Number of lattice points in a box, as an exact integer.
pub fn box_volume(bounds: &[(BigInt, BigInt)]) -> BigInt {
    bounds
        .iter()
        .map(|(lo, hi)| if hi < lo { BigInt::zero() } else { hi - lo + 1 })
        .product()
}

/// Calls `visit` on every lattice point of the box, after checking the
/// volume against the budget.
pub(crate) fn scan_box(
    bounds: &[(BigInt, BigInt)],
    budget: u64,
    mut visit: impl FnMut(&IntVec),
) -> Result<()> {
    let volume = box_volume(bounds);
    if volume.to_u64().is_none_or(|v| v > budget) {
        return Err(Error::WindowTooLarge {
            points: volume.to_string(),
            budget,
        });
    }
    if volume.is_zero() {
        return Ok(());
    }
    let mut x = IntVec::new(bounds.iter().map(|(lo, _)| lo.clone()).collect());
    loop {
        visit(&x);
        let mut k = 0;
        loop {
            if k == bounds.len() {
                return Ok(());
            }
            x[k] += BigInt::one();
            if x[k] <= bounds[k].1 {
                break;
            }
            x[k] = bounds[k].0.clone();
            k += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[i64]) -> IntVec {
        IntVec::from_i64s(x)
    }

    fn sg(rows: &[&[i64]]) -> Semigroup {
        Semigroup::from_generators(&IntMat::from_rows_i64(rows)).unwrap()
    }

    fn ex21() -> Semigroup {
        sg(&[&[1, 1, 1, 1], &[0, 1, 3, 4]])
    }

    fn ex22() -> Semigroup {
        sg(&[&[1, 1, 1, 1], &[0, 2, 3, 4]])
    }

    #[test]
    fn membership_examples() {
        let s = ex22();
        assert_eq!(s.member_q(&v(&[1, 1])), None);
        assert_eq!(s.member_q(&v(&[1, 2])), Some(v(&[0, 1, 0, 0])));
        assert_eq!(s.member_q(&v(&[0, 0])), Some(v(&[0, 0, 0, 0])));
        let w = s.member_q(&v(&[7, 19])).unwrap();
        assert_eq!(s.generators().mul_vec(&w), v(&[7, 19]));
    }

    #[test]
    fn holes_in_boxes() {
        let s = ex21();
        let h = s.holes_in_window(&Window::boxed(&[(0, 3), (0, 3)]), DEFAULT_POINT_BUDGET).unwrap();
        assert_eq!(h, vec![v(&[1, 2])]);
        let s = ex22();
        let h = s.holes_in_window(&Window::boxed(&[(0, 3), (0, 12)]), DEFAULT_POINT_BUDGET).unwrap();
        assert_eq!(h, vec![v(&[1, 1]), v(&[2, 1]), v(&[3, 1])]);
        let s = sg(&[&[1, 0], &[0, 1]]);
        let h = s.holes_in_window(&Window::boxed(&[(0, 5), (0, 5)]), DEFAULT_POINT_BUDGET).unwrap();
        assert!(h.is_empty());
    }

    #[test]
    fn fundamental_holes_examples() {
        assert_eq!(ex22().fundamental_holes(DEFAULT_POINT_BUDGET).unwrap().holes, vec![v(&[1, 1])]);
        assert!(sg(&[&[1, 0], &[0, 1]]).fundamental_holes(DEFAULT_POINT_BUDGET).unwrap().is_empty());
    }

    #[test]
    fn zonotope_budget() {
        let err = ex22().fundamental_holes(10).unwrap_err();
        assert!(matches!(err, Error::WindowTooLarge { .. }));
    }

    #[test]
    fn saturation_examples() {
        let s = ex22();
        let h0 = s.fundamental_holes(DEFAULT_POINT_BUDGET).unwrap();
        assert!(s.is_saturation_point(&h0, &v(&[1, 2])).unwrap());
        assert!(!s.is_saturation_point(&h0, &v(&[1, 0])).unwrap());
        assert!(matches!(
            s.is_saturation_point(&h0, &v(&[1, 1])),
            Err(Error::NotInSemigroup(_))
        ));
        let s = ex21();
        let h0 = s.fundamental_holes(DEFAULT_POINT_BUDGET).unwrap();
        assert!(s.is_saturation_point(&h0, &v(&[2, 0])).unwrap());
    }

    #[test]
    fn grading_cap_window() {
        let s = ex21();
        // grading (4,0): points with x1 <= 2
        let pts = s.lattice_points(&Window::GradingCap(BigInt::from(8)), DEFAULT_POINT_BUDGET).unwrap();
        assert_eq!(pts.len(), 1 + 5 + 9);
        assert!(pts.iter().all(|p| p[0] <= BigInt::from(2)));
    }

    #[test]
    fn parse_window() {
        assert_eq!(Window::parse_box("0..4, 0..16").unwrap(), Window::boxed(&[(0, 4), (0, 16)]));
        assert!(Window::parse_box("0..4,3").is_err());
        assert!(Window::parse_box("5..4").is_err());
    }
}
