//! Exact integer linear algebra.
//!
//! Everything here works over arbitrary-precision integers: dense vectors and
//! matrices, column-style Hermite normal form, Smith normal form, rank,
//! lattice membership and a bounded solver for linear Diophantine systems
//! with sign constraints on a subset of the variables.

use std::collections::HashSet;
use std::fmt;
use std::ops::{Add, Index, IndexMut, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// An integer vector of fixed dimension.
///
/// `Ord` is lexicographic on the entries, which is the canonical order used
/// for rays, facet normals and Hilbert basis elements throughout the crate.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntVec(Vec<BigInt>);

impl IntVec {
    pub fn new(entries: Vec<BigInt>) -> Self {
        IntVec(entries)
    }

    pub fn zeros(dim: usize) -> Self {
        IntVec(vec![BigInt::zero(); dim])
    }

    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[i] = BigInt::one();
        v
    }

    pub fn from_i64s(entries: &[i64]) -> Self {
        IntVec(entries.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<BigInt> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, BigInt> {
        self.0.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn dot(&self, other: &IntVec) -> BigInt {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn scale(&self, k: &BigInt) -> IntVec {
        IntVec(self.0.iter().map(|x| x * k).collect())
    }

    /// Gcd of the entries (0 for the zero vector).
    pub fn content(&self) -> BigInt {
        self.0.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
    }

    /// Divides out the content; the zero vector is returned unchanged.
    pub fn primitive(&self) -> IntVec {
        let g = self.content();
        if g.is_zero() || g.is_one() {
            return self.clone();
        }
        IntVec(self.0.iter().map(|x| x / &g).collect())
    }

    /// Entries as `i64` when every entry fits.
    pub fn to_i64s(&self) -> Option<Vec<i64>> {
        self.0.iter().map(ToPrimitive::to_i64).collect()
    }

    pub(crate) fn add_scaled(&mut self, other: &IntVec, k: &BigInt) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += b * k;
        }
    }
}

impl Index<usize> for IntVec {
    type Output = BigInt;
    fn index(&self, i: usize) -> &BigInt {
        &self.0[i]
    }
}

impl IndexMut<usize> for IntVec {
    fn index_mut(&mut self, i: usize) -> &mut BigInt {
        &mut self.0[i]
    }
}

impl Add for &IntVec {
    type Output = IntVec;
    fn add(self, rhs: &IntVec) -> IntVec {
        IntVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &IntVec {
    type Output = IntVec;
    fn sub(self, rhs: &IntVec) -> IntVec {
        IntVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &IntVec {
    type Output = IntVec;
    fn neg(self) -> IntVec {
        IntVec(self.0.iter().map(|a| -a).collect())
    }
}

impl fmt::Display for IntVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// Entries that fit in an `i64` are written as JSON numbers, larger ones as
/// decimal strings.
impl Serialize for IntVec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = serializer.serialize_seq(Some(self.0.len()))?;
        for x in &self.0 {
            match x.to_i64() {
                Some(v) => seq.serialize_element(&v)?,
                None => seq.serialize_element(&x.to_string())?,
            }
        }
        seq.end()
    }
}

/// Dense row-major integer matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMat {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMat {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows_i64(rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &x) in row.iter().enumerate() {
                m[(i, j)] = BigInt::from(x);
            }
        }
        m
    }

    /// Builds a `dim × cols.len()` matrix whose columns are `cols`.
    pub fn from_columns(dim: usize, cols: &[IntVec]) -> Self {
        let mut m = Self::zeros(dim, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.dim(), dim);
            for i in 0..dim {
                m[(i, j)] = c[i].clone();
            }
        }
        m
    }

    pub fn from_row_vecs(cols: usize, rows: &[IntVec]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.dim(), cols);
            for j in 0..cols {
                m[(i, j)] = r[j].clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> IntVec {
        IntVec((0..self.rows).map(|i| self[(i, j)].clone()).collect())
    }

    pub fn columns(&self) -> Vec<IntVec> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn row(&self, i: usize) -> IntVec {
        IntVec(self.data[i * self.cols..(i + 1) * self.cols].to_vec())
    }

    pub fn select_columns(&self, idx: &[usize]) -> IntMat {
        let cols: Vec<IntVec> = idx.iter().map(|&j| self.column(j)).collect();
        Self::from_columns(self.rows, &cols)
    }

    pub fn transpose(&self) -> IntMat {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * &other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &IntVec) -> IntVec {
        assert_eq!(self.cols, v.dim());
        IntVec(
            (0..self.rows)
                .map(|i| (0..self.cols).map(|j| &self[(i, j)] * &v[j]).sum())
                .collect(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// col[dst] += k * col[src]
    fn add_col_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        for i in 0..self.rows {
            let v = &self[(i, src)] * k;
            self[(i, dst)] += v;
        }
    }

    /// row[dst] += k * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        for j in 0..self.cols {
            let v = &self[(src, j)] * k;
            self[(dst, j)] += v;
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = -&self[(i, j)];
            self[(i, j)] = v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -&self[(i, j)];
            self[(i, j)] = v;
        }
    }

    /// Replaces columns (a, b) by (p·a + q·b, r·a + s·b).
    fn combine_cols(&mut self, a: usize, b: usize, p: &BigInt, q: &BigInt, r: &BigInt, s: &BigInt) {
        for i in 0..self.rows {
            let x = self[(i, a)].clone();
            let y = self[(i, b)].clone();
            self[(i, a)] = p * &x + q * &y;
            self[(i, b)] = r * &x + s * &y;
        }
    }

    fn combine_rows(&mut self, a: usize, b: usize, p: &BigInt, q: &BigInt, r: &BigInt, s: &BigInt) {
        for j in 0..self.cols {
            let x = self[(a, j)].clone();
            let y = self[(b, j)].clone();
            self[(a, j)] = p * &x + q * &y;
            self[(b, j)] = r * &x + s * &y;
        }
    }
}

impl Index<(usize, usize)> for IntMat {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

/// Extended gcd with `g >= 0` and `s·a + t·b = g`. When `a` divides `b`
/// the coefficients are `(±1, 0)`, so eliminating against `a` leaves the
/// row or column of `a` untouched.
fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    if !a.is_zero() && b.is_multiple_of(a) {
        return (a.abs(), a.signum(), BigInt::zero());
    }
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

/// Result of a column-style Hermite normal form `m·u = h`.
#[derive(Clone, Debug)]
pub struct HnfResult {
    pub h: IntMat,
    pub u: IntMat,
    pub rank: usize,
    /// Row index of the pivot in each of the first `rank` columns.
    pub pivot_rows: Vec<usize>,
}

impl HnfResult {
    pub fn pivots(&self) -> impl Iterator<Item = &BigInt> + '_ {
        self.pivot_rows
            .iter()
            .enumerate()
            .map(move |(k, &r)| &self.h[(r, k)])
    }

    /// Product of the pivots: the index of the column lattice in the lattice
    /// of its span, when the span is full-dimensional.
    pub fn pivot_product(&self) -> BigInt {
        self.pivots().product()
    }

    /// Solves `h·y = target` by forward substitution over the pivot rows and
    /// maps the solution back through `u`.
    pub fn solve(&self, target: &IntVec) -> Option<IntVec> {
        assert_eq!(target.dim(), self.h.rows());
        let mut y = Vec::with_capacity(self.rank);
        for (k, &p) in self.pivot_rows.iter().enumerate() {
            let mut acc = target[p].clone();
            for (l, yl) in y.iter().enumerate() {
                acc -= &self.h[(p, l)] * yl;
            }
            let (q, r) = acc.div_rem(&self.h[(p, k)]);
            if !r.is_zero() {
                return None;
            }
            y.push(q);
        }
        for i in 0..self.h.rows() {
            let v: BigInt = y.iter().enumerate().map(|(l, yl)| &self.h[(i, l)] * yl).sum();
            if v != target[i] {
                return None;
            }
        }
        let n = self.u.rows();
        let mut c = IntVec::zeros(n);
        for (l, yl) in y.iter().enumerate() {
            if yl.is_zero() {
                continue;
            }
            for i in 0..n {
                c[i] += &self.u[(i, l)] * yl;
            }
        }
        Some(c)
    }
}

/// Column-style Hermite normal form by gcd column elimination.
///
/// The first `rank` columns of `h` are in column echelon form with positive
/// pivots, every entry left of a pivot lies in `[0, pivot)`, and the remaining
/// columns are zero. `u` is unimodular with `m·u = h`.
pub fn hnf(m: &IntMat) -> HnfResult {
    let (rows, cols) = (m.rows(), m.cols());
    let mut h = m.clone();
    let mut u = IntMat::identity(cols);
    let mut k = 0;
    let mut pivot_rows = Vec::new();
    for r in 0..rows {
        if k == cols {
            break;
        }
        for j in k + 1..cols {
            if h[(r, j)].is_zero() {
                continue;
            }
            let a = h[(r, k)].clone();
            let b = h[(r, j)].clone();
            let (g, s, t) = ext_gcd(&a, &b);
            let p = -(&b / &g);
            let q = &a / &g;
            // (col_k, col_j) <- (s·col_k + t·col_j, p·col_k + q·col_j), det 1
            h.combine_cols(k, j, &s, &t, &p, &q);
            u.combine_cols(k, j, &s, &t, &p, &q);
        }
        if h[(r, k)].is_zero() {
            continue;
        }
        if h[(r, k)].is_negative() {
            h.negate_col(k);
            u.negate_col(k);
        }
        let piv = h[(r, k)].clone();
        for l in 0..k {
            let q = h[(r, l)].div_floor(&piv);
            if !q.is_zero() {
                let nq = -q;
                h.add_col_multiple(l, k, &nq);
                u.add_col_multiple(l, k, &nq);
            }
        }
        pivot_rows.push(r);
        k += 1;
    }
    HnfResult {
        h,
        u,
        rank: k,
        pivot_rows,
    }
}

/// Smith normal form: `left·m·right = s` with `s` diagonal, nonnegative and
/// each diagonal entry dividing the next.
#[derive(Clone, Debug)]
pub struct SnfResult {
    pub s: IntMat,
    pub left: IntMat,
    pub right: IntMat,
}

impl SnfResult {
    /// The nonzero diagonal entries, in order.
    pub fn divisors(&self) -> Vec<BigInt> {
        (0..self.s.rows().min(self.s.cols()))
            .map(|i| self.s[(i, i)].clone())
            .take_while(|x| !x.is_zero())
            .collect()
    }
}

pub fn snf(m: &IntMat) -> SnfResult {
    let (rows, cols) = (m.rows(), m.cols());
    let mut s = m.clone();
    let mut left = IntMat::identity(rows);
    let mut right = IntMat::identity(cols);
    for t in 0..rows.min(cols) {
        loop {
            // smallest nonzero entry of the trailing block becomes the pivot
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if s[(i, j)].is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| s[(i, j)].abs() < s[(bi, bj)].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish_snf(s, left, right);
            };
            s.swap_rows(t, pi);
            left.swap_rows(t, pi);
            s.swap_cols(t, pj);
            right.swap_cols(t, pj);

            let mut clean = true;
            for i in t + 1..rows {
                if s[(i, t)].is_zero() {
                    continue;
                }
                let (g, x, y) = ext_gcd(&s[(t, t)], &s[(i, t)]);
                let p = -(&s[(i, t)] / &g);
                let q = &s[(t, t)] / &g;
                s.combine_rows(t, i, &x, &y, &p, &q);
                left.combine_rows(t, i, &x, &y, &p, &q);
                clean = false;
            }
            for j in t + 1..cols {
                if s[(t, j)].is_zero() {
                    continue;
                }
                let (g, x, y) = ext_gcd(&s[(t, t)], &s[(t, j)]);
                let p = -(&s[(t, j)] / &g);
                let q = &s[(t, t)] / &g;
                s.combine_cols(t, j, &x, &y, &p, &q);
                right.combine_cols(t, j, &x, &y, &p, &q);
                clean = false;
            }
            if !clean {
                continue;
            }
            // row and column t are clear; enforce divisibility of the rest
            let piv = s[(t, t)].clone();
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !s[(i, j)].is_multiple_of(&piv)));
            match bad {
                Some(i) => {
                    let one = BigInt::one();
                    s.add_row_multiple(t, i, &one);
                    left.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }
        if s[(t, t)].is_negative() {
            s.negate_row(t);
            left.negate_row(t);
        }
    }
    finish_snf(s, left, right)
}

fn finish_snf(mut s: IntMat, mut left: IntMat, right: IntMat) -> SnfResult {
    for t in 0..s.rows().min(s.cols()) {
        if s[(t, t)].is_negative() {
            s.negate_row(t);
            left.negate_row(t);
        }
    }
    SnfResult { s, left, right }
}

/// Exact rank over the rationals (fraction-free elimination).
pub fn rank(m: &IntMat) -> usize {
    rank_of_rows(&(0..m.rows()).map(|i| m.row(i)).collect::<Vec<_>>())
}

/// Rank of a set of vectors.
pub fn rank_of_rows(rows: &[IntVec]) -> usize {
    let mut work: Vec<Vec<BigInt>> = rows.iter().map(|r| r.entries().to_vec()).collect();
    let Some(width) = work.first().map(Vec::len) else {
        return 0;
    };
    let mut r = 0;
    for c in 0..width {
        let Some(p) = (r..work.len()).find(|&i| !work[i][c].is_zero()) else {
            continue;
        };
        work.swap(r, p);
        let pivot_row = work[r].clone();
        for row in work.iter_mut().skip(r + 1) {
            if row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, pv) in row.iter_mut().zip(&pivot_row) {
                *x = &*x * &pivot_row[c] - &f * pv;
            }
            let g = row.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
            if !g.is_zero() && !g.is_one() {
                row.iter_mut().for_each(|x| *x /= &g);
            }
        }
        r += 1;
        if r == work.len() {
            break;
        }
    }
    r
}

/// Integer basis of the kernel `{x : m·x = 0}` (columns of `u` past the rank).
pub fn kernel_basis(m: &IntMat) -> Vec<IntVec> {
    let res = hnf(m);
    (res.rank..m.cols()).map(|j| res.u.column(j)).collect()
}

/// Integer coefficients `c` with `basis·c = target`, or `None` when the target
/// is outside the column lattice of `basis`.
pub fn lattice_member(basis: &IntMat, target: &IntVec) -> Option<IntVec> {
    if basis.cols() == 0 {
        return target.is_zero().then(|| IntVec::zeros(0));
    }
    hnf(basis).solve(target)
}

/// A linear Diophantine system `m·x = rhs` in which the variables listed as
/// constrained must be nonnegative and the rest are free integers.
///
/// The search over the constrained variables is made finite by a family of
/// linear functionals, each vanishing on the free columns and nonnegative on
/// the constrained ones, such that every constrained column is strictly
/// positive under at least one of them. Applying the functionals to
/// `m·x = rhs` bounds every constrained variable; the leftover vector is then
/// tested for membership in the lattice of the free columns.
#[derive(Clone, Debug)]
pub struct DiophantineSystem {
    m: IntMat,
    constrained: Vec<usize>,
    free: Vec<usize>,
    functionals: Vec<IntVec>,
    /// functional values on each constrained column, `[pos][functional]`
    values: Vec<Vec<BigInt>>,
    columns: Vec<IntVec>,
    free_hnf: Option<HnfResult>,
}

impl DiophantineSystem {
    pub fn new(m: &IntMat, constrained: &[usize], functionals: &[IntVec]) -> Result<Self> {
        let mut constrained = constrained.to_vec();
        constrained.sort_unstable();
        constrained.dedup();
        if let Some(&j) = constrained.iter().find(|&&j| j >= m.cols()) {
            return Err(Error::InvalidInput(format!("constrained index {j} out of range")));
        }
        let free: Vec<usize> = (0..m.cols()).filter(|j| constrained.binary_search(j).is_err()).collect();
        let columns = m.columns();
        for f in functionals {
            if f.dim() != m.rows() {
                return Err(Error::InvalidInput("functional dimension mismatch".into()));
            }
        }
        for &j in &free {
            if functionals.iter().any(|f| !f.dot(&columns[j]).is_zero()) {
                return Err(Error::UnboundedSearch);
            }
        }
        let mut values = Vec::with_capacity(constrained.len());
        for &j in &constrained {
            let v: Vec<BigInt> = functionals.iter().map(|f| f.dot(&columns[j])).collect();
            if v.iter().any(Signed::is_negative) || v.iter().all(Zero::is_zero) {
                return Err(Error::UnboundedSearch);
            }
            values.push(v);
        }
        let free_hnf = (!free.is_empty()).then(|| hnf(&m.select_columns(&free)));
        Ok(DiophantineSystem {
            m: m.clone(),
            constrained,
            free,
            functionals: functionals.to_vec(),
            values,
            columns,
            free_hnf,
        })
    }

    pub fn matrix(&self) -> &IntMat {
        &self.m
    }

    /// A solution `x`, or `None` when the system is infeasible.
    pub fn solve(&self, rhs: &IntVec) -> Option<IntVec> {
        let n = self.m.cols();
        if rhs.is_zero() {
            return Some(IntVec::zeros(n));
        }
        let levels: Vec<BigInt> = self.functionals.iter().map(|f| f.dot(rhs)).collect();
        if levels.iter().any(Signed::is_negative) {
            return None;
        }
        let mut x = vec![BigInt::zero(); self.constrained.len()];
        let mut failed = HashSet::new();
        let mut residual = rhs.clone();
        let mut levels = levels;
        let free_part = self.search(0, &mut residual, &mut levels, &mut x, &mut failed)?;
        let mut out = IntVec::zeros(n);
        for (pos, &j) in self.constrained.iter().enumerate() {
            out[j] = x[pos].clone();
        }
        for (pos, &j) in self.free.iter().enumerate() {
            out[j] = free_part[pos].clone();
        }
        Some(out)
    }

    fn search(
        &self,
        pos: usize,
        residual: &mut IntVec,
        levels: &mut [BigInt],
        x: &mut [BigInt],
        failed: &mut HashSet<(usize, IntVec)>,
    ) -> Option<IntVec> {
        if pos == self.constrained.len() {
            if levels.iter().any(|l| !l.is_zero()) {
                return None;
            }
            return match &self.free_hnf {
                Some(h) => h.solve(residual),
                None => residual.is_zero().then(|| IntVec::zeros(0)),
            };
        }
        if failed.contains(&(pos, residual.clone())) {
            return None;
        }
        let vals = &self.values[pos];
        let bound = vals
            .iter()
            .zip(levels.iter())
            .filter(|(v, _)| v.is_positive())
            .map(|(v, l)| l.div_floor(v))
            .min()
            .expect("constrained column has a positive functional");
        let col = &self.columns[self.constrained[pos]];
        // largest multiplicity first
        let mut k = bound.clone();
        residual.add_scaled(col, &-&k);
        for (l, v) in levels.iter_mut().zip(vals) {
            *l -= v * &k;
        }
        loop {
            x[pos] = k.clone();
            if let Some(found) = self.search(pos + 1, residual, levels, x, failed) {
                return Some(found);
            }
            if k.is_zero() {
                break;
            }
            k -= 1;
            residual.add_scaled(col, &BigInt::one());
            for (l, v) in levels.iter_mut().zip(vals) {
                *l += v;
            }
        }
        x[pos] = BigInt::zero();
        failed.insert((pos, residual.clone()));
        None
    }
}

/// Finds integral `x` with `m·x = rhs` and `x_j >= 0` for `j` in
/// `sign_constrained`, bounded by the supplied functionals (see
/// [`DiophantineSystem`]). A zero right-hand side always yields the zero
/// vector.
pub fn solve_diophantine(
    m: &IntMat,
    rhs: &IntVec,
    sign_constrained: &[usize],
    functionals: &[IntVec],
) -> Result<Option<IntVec>> {
    if rhs.is_zero() {
        return Ok(Some(IntVec::zeros(m.cols())));
    }
    Ok(DiophantineSystem::new(m, sign_constrained, functionals)?.solve(rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[i64]]) -> IntMat {
        IntMat::from_rows_i64(rows)
    }

    fn v(x: &[i64]) -> IntVec {
        IntVec::from_i64s(x)
    }

    fn check_hnf_shape(m: &IntMat, res: &HnfResult) {
        assert_eq!(&m.mul(&res.u), &res.h);
        let det = det_small(&res.u);
        assert!(det == BigInt::one() || det == -BigInt::one());
        for (k, &p) in res.pivot_rows.iter().enumerate() {
            let piv = &res.h[(p, k)];
            assert!(piv.is_positive());
            for i in 0..p {
                assert!(res.h[(i, k)].is_zero());
            }
            for l in 0..k {
                assert!(!res.h[(p, l)].is_negative() && &res.h[(p, l)] < piv);
            }
        }
        for j in res.rank..m.cols() {
            assert!(res.h.column(j).is_zero());
        }
    }

    // cofactor expansion, fine for the small transforms used here
    fn det_small(m: &IntMat) -> BigInt {
        let n = m.rows();
        if n == 0 {
            return BigInt::one();
        }
        if n == 1 {
            return m[(0, 0)].clone();
        }
        let mut total = BigInt::zero();
        for j in 0..n {
            if m[(0, j)].is_zero() {
                continue;
            }
            let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
            let minor_rows: Vec<IntVec> = (1..n)
                .map(|i| IntVec::new(cols.iter().map(|&c| m[(i, c)].clone()).collect()))
                .collect();
            let minor = IntMat::from_row_vecs(n - 1, &minor_rows);
            let term = &m[(0, j)] * det_small(&minor);
            if j % 2 == 0 {
                total += term;
            } else {
                total -= term;
            }
        }
        total
    }

    #[test]
    fn hnf_identity() {
        let res = hnf(&IntMat::identity(2));
        assert_eq!(res.h, IntMat::identity(2));
        assert_eq!(res.rank, 2);
    }

    #[test]
    fn hnf_full_lattice() {
        let m = mat(&[&[1, 1, 1, 1], &[0, 2, 3, 4]]);
        let res = hnf(&m);
        check_hnf_shape(&m, &res);
        assert_eq!(res.rank, 2);
        assert_eq!(res.pivot_product(), BigInt::one());
    }

    #[test]
    fn hnf_index_four() {
        let m = mat(&[&[2, 0], &[0, 2]]);
        let res = hnf(&m);
        check_hnf_shape(&m, &res);
        let pivots: Vec<_> = res.pivots().cloned().collect();
        assert_eq!(pivots, vec![BigInt::from(2), BigInt::from(2)]);
        // brute force: of the 4 points of [0,2)^2 only the origin is in 2Z^2
        let mut hits = 0;
        for a in 0..2 {
            for b in 0..2 {
                if lattice_member(&m, &v(&[a, b])).is_some() {
                    hits += 1;
                }
            }
        }
        assert_eq!(hits, 1);
    }

    #[test]
    fn hnf_rank_deficient() {
        let m = mat(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
        let res = hnf(&m);
        check_hnf_shape(&m, &res);
        assert_eq!(res.rank, 2);
    }

    #[test]
    fn snf_examples() {
        let r = snf(&IntMat::identity(3));
        assert_eq!(r.s, IntMat::identity(3));

        let m = mat(&[&[2, 0], &[0, 3]]);
        let r = snf(&m);
        assert_eq!(r.left.mul(&m).mul(&r.right), r.s);
        assert_eq!(r.divisors(), vec![BigInt::from(1), BigInt::from(6)]);

        let z = IntMat::zeros(2, 3);
        let r = snf(&z);
        assert!(r.s.is_zero());
        assert!(r.divisors().is_empty());
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&IntMat::identity(3)), 3);
        assert_eq!(rank(&IntMat::zeros(2, 1)), 0);
        assert_eq!(rank(&mat(&[&[1, 2], &[0, 0]])), 1);
    }

    #[test]
    fn lattice_member_examples() {
        assert_eq!(lattice_member(&mat(&[&[1], &[0]]), &v(&[3, 0])), Some(v(&[3])));
        let b = mat(&[&[1, 1], &[0, 2]]);
        assert_eq!(lattice_member(&b, &v(&[1, 1])), None);
        assert_eq!(lattice_member(&b, &v(&[0, 2])), Some(v(&[-1, 1])));
    }

    #[test]
    fn kernel_of_line() {
        let k = kernel_basis(&mat(&[&[1, 1]]));
        assert_eq!(k.len(), 1);
        assert!(mat(&[&[1, 1]]).mul_vec(&k[0]).is_zero());
    }

    fn ex22() -> IntMat {
        mat(&[&[1, 1, 1, 1], &[0, 2, 3, 4]])
    }

    #[test]
    fn diophantine_worked_systems() {
        let a = ex22();
        let rhs = v(&[1, 1]);
        // free variable on (1,4); the functional (4,-1) vanishes there
        let x = solve_diophantine(&a, &rhs, &[0, 1, 2], &[v(&[4, -1])]).unwrap().unwrap();
        assert_eq!(a.mul_vec(&x), rhs);
        assert!(x.iter().take(3).all(|c| !c.is_negative()));
        // free variable on (1,0); the functional (0,1) vanishes there
        let none = solve_diophantine(&a, &rhs, &[1, 2, 3], &[v(&[0, 1])]).unwrap();
        assert_eq!(none, None);
    }

    #[test]
    fn diophantine_zero_rhs() {
        let a = ex22();
        let x = solve_diophantine(&a, &v(&[0, 0]), &[0, 1, 2, 3], &[]).unwrap();
        assert_eq!(x, Some(IntVec::zeros(4)));
    }

    #[test]
    fn diophantine_needs_a_bounding_functional() {
        let a = ex22();
        let err = solve_diophantine(&a, &v(&[1, 1]), &[0, 1, 2], &[]).unwrap_err();
        assert!(matches!(err, Error::UnboundedSearch));
        // a functional that does not vanish on the free column is rejected too
        let err = solve_diophantine(&a, &v(&[1, 1]), &[0, 1, 2], &[v(&[1, 0])]).unwrap_err();
        assert!(matches!(err, Error::UnboundedSearch));
    }
}
