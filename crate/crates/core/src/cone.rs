//! Pointed rational polyhedral cones and their face posets.
//!
//! A [`Cone`] is built from integer generators. Ingestion moves the
//! generators into coordinates in which they span the full lattice `Z^r`
//! (`r` the rank), computes the irredundant facet normals by double
//! description and keeps the ray-facet incidence. [`FacePoset`] enumerates
//! every face, from the apex up to the cone itself, by closing ray sets
//! under the incidence.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactla::{kernel_basis, lattice_member, rank_of_rows, snf, IntMat, IntVec};

/// Default cap on the number of faces enumerated.
pub const DEFAULT_FACE_BUDGET: usize = 1_000_000;

/// Coordinate change from the input lattice to `Z^r`.
///
/// When the columns of the input already span `Z^d` this is the identity.
/// Otherwise with `left·A·right = diag(s_1, …, s_r)` the internal coordinates
/// of `x` are `(left·x)_i / s_i` for `i < r`.
#[derive(Clone, Debug)]
pub struct LatticeTransform {
    ambient: usize,
    forward: IntMat,
    divisors: Vec<BigInt>,
    back: IntMat,
    identity: bool,
}

impl LatticeTransform {
    fn identity(d: usize) -> Self {
        LatticeTransform {
            ambient: d,
            forward: IntMat::identity(d),
            divisors: vec![BigInt::one(); d],
            back: IntMat::identity(d),
            identity: true,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.identity
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn internal_dim(&self) -> usize {
        self.divisors.len()
    }

    pub fn divisors(&self) -> &[BigInt] {
        &self.divisors
    }

    /// Internal coordinates of `x`, or `None` when `x` is outside the lattice
    /// spanned by the generators.
    pub fn to_internal(&self, x: &IntVec) -> Option<IntVec> {
        if self.identity {
            return Some(x.clone());
        }
        let y = self.forward.mul_vec(x);
        let mut out = Vec::with_capacity(self.divisors.len());
        for (yi, s) in y.iter().zip(&self.divisors) {
            let (q, r) = yi.div_rem(s);
            if !r.is_zero() {
                return None;
            }
            out.push(q);
        }
        let out = IntVec::new(out);
        (self.back.mul_vec(&out) == *x).then_some(out)
    }

    pub fn to_original(&self, y: &IntVec) -> IntVec {
        if self.identity {
            return y.clone();
        }
        self.back.mul_vec(y)
    }

    /// A primitive functional on the input space that is a positive multiple
    /// of the internal functional `f` on the generated lattice.
    pub fn functional_to_original(&self, f: &IntVec) -> IntVec {
        if self.identity {
            return f.clone();
        }
        let l = self.divisors.iter().fold(BigInt::one(), |acc, s| acc.lcm(s));
        let mut g = IntVec::zeros(self.ambient);
        for (i, s) in self.divisors.iter().enumerate() {
            let c = &f[i] * (&l / s);
            for k in 0..self.ambient {
                g[k] += &c * &self.forward[(i, k)];
            }
        }
        g.primitive()
    }
}

/// A pointed, full-dimensional cone in internal coordinates.
#[derive(Clone, Debug)]
pub struct Cone {
    original: IntMat,
    generators: IntMat,
    transform: LatticeTransform,
    extreme_rays: Vec<IntVec>,
    facet_normals: Vec<IntVec>,
    /// rays lying on each facet
    incidence: Vec<FixedBitSet>,
    /// generators lying on each facet
    facet_generators: Vec<FixedBitSet>,
}

impl Cone {
    /// Builds the cone generated by the columns of `generators`.
    pub fn ingest(generators: &IntMat) -> Result<Cone> {
        if generators.cols() == 0 || generators.rows() == 0 {
            return Err(Error::NoGenerators);
        }
        if let Some(j) = (0..generators.cols()).find(|&j| generators.column(j).is_zero()) {
            return Err(Error::ZeroGenerator(j));
        }
        let d = generators.rows();
        let snf = snf(generators);
        let divisors = snf.divisors();
        let r = divisors.len();
        let (internal, transform) = if r == d && divisors.iter().all(One::is_one) {
            (generators.clone(), LatticeTransform::identity(d))
        } else {
            let projected = snf.left.mul(generators);
            let mut internal = IntMat::zeros(r, generators.cols());
            for i in 0..r {
                for j in 0..generators.cols() {
                    internal[(i, j)] = &projected[(i, j)] / &divisors[i];
                }
            }
            let forward_rows: Vec<IntVec> = (0..r).map(|i| snf.left.row(i)).collect();
            let forward = IntMat::from_row_vecs(d, &forward_rows);
            // columns of left^{-1} scaled by the divisors
            let mut back = IntMat::zeros(d, r);
            for (i, s) in divisors.iter().enumerate() {
                let col = lattice_member(&snf.left, &IntVec::unit(d, i))
                    .expect("unimodular left factor");
                for k in 0..d {
                    back[(k, i)] = &col[k] * s;
                }
            }
            let t = LatticeTransform {
                ambient: d,
                forward,
                divisors,
                back,
                identity: false,
            };
            (internal, t)
        };

        let facet_normals = double_description(&internal)?;
        if facet_normals.is_empty() || rank_of_rows(&facet_normals) < r {
            return Err(Error::NotPointed);
        }
        let cols = internal.columns();
        let mut rays: Vec<IntVec> = Vec::new();
        for a in &cols {
            let tight: Vec<IntVec> = facet_normals
                .iter()
                .filter(|f| f.dot(a).is_zero())
                .cloned()
                .collect();
            if rank_of_rows(&tight) + 1 == r {
                rays.push(a.primitive());
            }
        }
        rays.sort();
        rays.dedup();

        let incidence = facet_normals
            .iter()
            .map(|f| {
                let mut bits = FixedBitSet::with_capacity(rays.len());
                for (i, ray) in rays.iter().enumerate() {
                    if f.dot(ray).is_zero() {
                        bits.insert(i);
                    }
                }
                bits
            })
            .collect();
        let facet_generators = facet_normals
            .iter()
            .map(|f| {
                let mut bits = FixedBitSet::with_capacity(cols.len());
                for (j, a) in cols.iter().enumerate() {
                    if f.dot(a).is_zero() {
                        bits.insert(j);
                    }
                }
                bits
            })
            .collect();

        Ok(Cone {
            original: generators.clone(),
            generators: internal,
            transform,
            extreme_rays: rays,
            facet_normals,
            incidence,
            facet_generators,
        })
    }

    /// Generators as given, in original coordinates.
    pub fn original_generators(&self) -> &IntMat {
        &self.original
    }

    /// Generators in internal coordinates.
    pub fn generators(&self) -> &IntMat {
        &self.generators
    }

    pub fn transform(&self) -> &LatticeTransform {
        &self.transform
    }

    pub fn dim(&self) -> usize {
        self.generators.rows()
    }

    pub fn num_generators(&self) -> usize {
        self.generators.cols()
    }

    pub fn extreme_rays(&self) -> &[IntVec] {
        &self.extreme_rays
    }

    pub fn facet_normals(&self) -> &[IntVec] {
        &self.facet_normals
    }

    /// Rays on facet `f`.
    pub fn facet_rays(&self, f: usize) -> &FixedBitSet {
        &self.incidence[f]
    }

    /// Generators on facet `f`.
    pub fn facet_generators(&self, f: usize) -> &FixedBitSet {
        &self.facet_generators[f]
    }

    pub fn contains(&self, x: &IntVec) -> bool {
        self.facet_normals.iter().all(|f| !f.dot(x).is_negative())
    }

    /// Facet indices `f` with `f·x = 0`.
    pub fn tight_facets(&self, x: &IntVec) -> Vec<usize> {
        (0..self.facet_normals.len())
            .filter(|&f| self.facet_normals[f].dot(x).is_zero())
            .collect()
    }

    /// Extreme rays of the cone, mapped back to original coordinates.
    pub fn extreme_rays_original(&self) -> Vec<IntVec> {
        self.extreme_rays
            .iter()
            .map(|r| self.transform.to_original(r).primitive())
            .collect()
    }

    /// Facet normals as functionals on the input coordinates.
    pub fn facet_normals_original(&self) -> Vec<IntVec> {
        self.facet_normals
            .iter()
            .map(|f| self.transform.functional_to_original(f))
            .collect()
    }

    /// Generator columns on each extreme ray.
    pub fn ray_generators(&self) -> Vec<Vec<usize>> {
        let cols = self.generators.columns();
        self.extreme_rays
            .iter()
            .map(|r| (0..cols.len()).filter(|&j| cols[j].primitive() == *r).collect())
            .collect()
    }
}

/// Irredundant facet normals of the full-dimensional cone generated by the
/// columns of `generators`.
///
/// Incremental double description on the dual cone: the constraints
/// `f·a_j >= 0` are inserted in lexicographic order of the columns, starting
/// from a simplicial cone on the first independent columns. Adjacent pairs
/// are detected combinatorially from their zero sets. The output normals are
/// primitive and sorted lexicographically. A cone that is not pointed yields
/// normals of rank below the dimension.
pub fn double_description(generators: &IntMat) -> Result<Vec<IntVec>> {
    let d = generators.rows();
    let n = generators.cols();
    let cols = generators.columns();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| cols[a].cmp(&cols[b]).then(a.cmp(&b)));

    let mut basis: Vec<usize> = Vec::new();
    let mut basis_vecs: Vec<IntVec> = Vec::new();
    for &j in &order {
        if basis.len() == d {
            break;
        }
        basis_vecs.push(cols[j].clone());
        if rank_of_rows(&basis_vecs) == basis_vecs.len() {
            basis.push(j);
        } else {
            basis_vecs.pop();
        }
    }
    if basis.len() < d {
        return Err(Error::InvalidInput(
            "double description needs a full-dimensional cone".into(),
        ));
    }

    struct Ray {
        normal: IntVec,
        zeros: FixedBitSet,
    }

    let mut rays: Vec<Ray> = Vec::with_capacity(d);
    for k in 0..d {
        let others: Vec<IntVec> = (0..d).filter(|&i| i != k).map(|i| basis_vecs[i].clone()).collect();
        let m = IntMat::from_row_vecs(d, &others);
        let mut f = kernel_basis(&m)
            .into_iter()
            .next()
            .expect("independent rows leave a one-dimensional kernel")
            .primitive();
        if f.dot(&basis_vecs[k]).is_negative() {
            f = -&f;
        }
        let mut zeros = FixedBitSet::with_capacity(n);
        for (i, &j) in basis.iter().enumerate() {
            if i != k {
                zeros.insert(j);
            }
        }
        rays.push(Ray { normal: f, zeros });
    }

    for &j in order.iter().filter(|j| !basis.contains(j)) {
        let a = &cols[j];
        let vals: Vec<BigInt> = rays.iter().map(|r| r.normal.dot(a)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_negative()).collect();
        if neg.is_empty() {
            for (r, v) in rays.iter_mut().zip(&vals) {
                if v.is_zero() {
                    r.zeros.insert(j);
                }
            }
            continue;
        }
        let mut created: Vec<Ray> = Vec::new();
        for &p in &pos {
            for &q in &neg {
                let mut common = rays[p].zeros.clone();
                common.intersect_with(&rays[q].zeros);
                if common.count_ones(..) + 2 < d {
                    continue;
                }
                let adjacent = (0..rays.len())
                    .filter(|&r| r != p && r != q)
                    .all(|r| !common.is_subset(&rays[r].zeros));
                if !adjacent {
                    continue;
                }
                let mut normal = rays[q].normal.scale(&vals[p]);
                normal.add_scaled(&rays[p].normal, &-&vals[q]);
                let mut zeros = common;
                zeros.insert(j);
                created.push(Ray {
                    normal: normal.primitive(),
                    zeros,
                });
            }
        }
        let mut next: Vec<Ray> = Vec::with_capacity(rays.len() + created.len());
        for (mut r, v) in rays.into_iter().zip(vals) {
            if v.is_negative() {
                continue;
            }
            if v.is_zero() {
                r.zeros.insert(j);
            }
            next.push(r);
        }
        next.extend(created);
        rays = next;
    }

    let mut normals: Vec<IntVec> = rays.into_iter().map(|r| r.normal).collect();
    normals.sort();
    normals.dedup();
    Ok(normals)
}

/// A face of the cone.
#[derive(Clone, Debug)]
pub struct Face {
    pub id: usize,
    /// Indices into [`Cone::extreme_rays`], sorted.
    pub ray_set: Vec<usize>,
    /// Indices of all facets containing the face, sorted.
    pub facet_set: Vec<usize>,
    pub dim: usize,
    /// Sum of the primitive normals of the facets containing the face.
    pub normal_cf: IntVec,
    /// Generator columns lying on the face.
    pub gen_idx: Vec<usize>,
    rays: FixedBitSet,
}

impl Face {
    pub fn ray_bits(&self) -> &FixedBitSet {
        &self.rays
    }

    pub fn is_subface_of(&self, other: &Face) -> bool {
        self.rays.is_subset(&other.rays)
    }

    pub fn contains_generator(&self, j: usize) -> bool {
        self.gen_idx.binary_search(&j).is_ok()
    }
}

/// Per-dimension face count.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct DimCount {
    pub dim: usize,
    pub faces: usize,
}

/// All faces of a cone ordered by `(dim, ray_set)` together with the cover
/// relation.
#[derive(Clone, Debug)]
pub struct FacePoset {
    faces: Vec<Face>,
    covers: Vec<(usize, usize)>,
    below: Vec<Vec<usize>>,
    above: Vec<Vec<usize>>,
    lookup: HashMap<FixedBitSet, usize>,
}

fn closure(cone: &Cone, rays: &FixedBitSet) -> (FixedBitSet, FixedBitSet) {
    let nf = cone.facet_normals.len();
    let nr = cone.extreme_rays.len();
    let mut facets = FixedBitSet::with_capacity(nf);
    let mut closed = FixedBitSet::with_capacity(nr);
    closed.insert_range(..);
    for f in 0..nf {
        if rays.is_subset(&cone.incidence[f]) {
            facets.insert(f);
            closed.intersect_with(&cone.incidence[f]);
        }
    }
    (closed, facets)
}

/// Facets of the face with ray set `rays`: the inclusion-maximal proper
/// intersections with the facets of the cone, which are faces themselves.
fn codim_one_subfaces(cone: &Cone, rays: &FixedBitSet, facets: &FixedBitSet) -> Vec<(FixedBitSet, FixedBitSet)> {
    let mut meets: Vec<FixedBitSet> = Vec::new();
    for f in 0..cone.facet_normals.len() {
        if facets.contains(f) {
            continue;
        }
        let mut meet = rays.clone();
        meet.intersect_with(&cone.incidence[f]);
        if !meets.contains(&meet) {
            meets.push(meet);
        }
    }
    meets
        .iter()
        .filter(|m| !meets.iter().any(|o| o != *m && m.is_subset(o)))
        .map(|m| closure(cone, m))
        .collect()
}

/// Enumerates every face of `cone` by descending from the cone itself: the
/// subfaces of codimension one of a face are the inclusion-maximal closures
/// of its intersections with the facets not containing it.
pub fn enumerate_faces(cone: &Cone, budget: usize) -> Result<FacePoset> {
    let nf = cone.facet_normals.len();
    let nr = cone.extreme_rays.len();
    let d = cone.dim();

    let mut top = FixedBitSet::with_capacity(nr);
    top.insert_range(..);
    let mut found: HashMap<FixedBitSet, (FixedBitSet, usize)> = HashMap::new();
    found.insert(top.clone(), (FixedBitSet::with_capacity(nf), d));
    let mut raw_covers: Vec<(FixedBitSet, FixedBitSet)> = Vec::new();

    let mut level = vec![top];
    while !level.is_empty() {
        // the subfaces of each face are independent; merge in level order
        let children: Vec<Vec<(FixedBitSet, FixedBitSet)>> = level
            .par_iter()
            .map(|rays| codim_one_subfaces(cone, rays, &found[rays].0))
            .collect();
        let mut next: Vec<FixedBitSet> = Vec::new();
        for (rays, subs) in level.iter().zip(children) {
            let dim = found[rays].1;
            for (sub_rays, sub_facets) in subs {
                raw_covers.push((sub_rays.clone(), rays.clone()));
                if !found.contains_key(&sub_rays) {
                    if found.len() >= budget {
                        return Err(Error::FaceBudgetExceeded { budget });
                    }
                    found.insert(sub_rays.clone(), (sub_facets, dim - 1));
                    next.push(sub_rays);
                }
            }
        }
        level = next;
    }

    let mut keyed: Vec<(usize, Vec<usize>, FixedBitSet, FixedBitSet)> = found
        .into_iter()
        .map(|(rays, (facets, dim))| (dim, rays.ones().collect(), rays, facets))
        .collect();
    keyed.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));

    let ng = cone.num_generators();
    let mut lookup = HashMap::with_capacity(keyed.len());
    let mut faces = Vec::with_capacity(keyed.len());
    for (id, (dim, ray_set, rays, facets)) in keyed.into_iter().enumerate() {
        let facet_set: Vec<usize> = facets.ones().collect();
        let mut normal_cf = IntVec::zeros(d);
        let mut on_face = FixedBitSet::with_capacity(ng);
        on_face.insert_range(..);
        for &f in &facet_set {
            normal_cf = &normal_cf + &cone.facet_normals[f];
            on_face.intersect_with(&cone.facet_generators[f]);
        }
        lookup.insert(rays.clone(), id);
        faces.push(Face {
            id,
            ray_set,
            facet_set,
            dim,
            normal_cf,
            gen_idx: on_face.ones().collect(),
            rays,
        });
    }

    let mut covers: Vec<(usize, usize)> = raw_covers
        .iter()
        .map(|(s, t)| (lookup[s], lookup[t]))
        .collect();
    covers.sort_unstable();
    covers.dedup();
    let mut below = vec![Vec::new(); faces.len()];
    let mut above = vec![Vec::new(); faces.len()];
    for &(s, t) in &covers {
        below[t].push(s);
        above[s].push(t);
    }
    Ok(FacePoset {
        faces,
        covers,
        below,
        above,
        lookup,
    })
}

impl FacePoset {
    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face(&self, id: usize) -> &Face {
        &self.faces[id]
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    /// Cover pairs `(sub, super)`, sorted.
    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    /// Faces covered by `id` (one dimension lower).
    pub fn subfaces(&self, id: usize) -> &[usize] {
        &self.below[id]
    }

    /// Faces covering `id` (one dimension higher).
    pub fn superfaces(&self, id: usize) -> &[usize] {
        &self.above[id]
    }

    pub fn apex(&self) -> usize {
        0
    }

    pub fn top(&self) -> usize {
        self.faces.len() - 1
    }

    /// Looks a face up by its ray set (any order).
    pub fn find(&self, ray_set: &[usize]) -> Option<usize> {
        let n = self.faces[self.top()].rays.len();
        if ray_set.iter().any(|&r| r >= n) {
            return None;
        }
        let mut bits = FixedBitSet::with_capacity(n);
        for &r in ray_set {
            bits.insert(r);
        }
        self.lookup.get(&bits).copied()
    }

    pub fn counts_by_dim(&self) -> Vec<DimCount> {
        let top_dim = self.faces[self.top()].dim;
        (0..=top_dim)
            .map(|dim| DimCount {
                dim,
                faces: self.faces.iter().filter(|f| f.dim == dim).count(),
            })
            .collect()
    }

    /// Alternating sum (odd dimensions positive) of the counts of faces other
    /// than the apex and the cone. For a pointed full-dimensional cone in
    /// dimension d this is `1 + (-1)^d`, the Euler characteristic of a
    /// (d-2)-sphere.
    pub fn euler_sum(&self) -> i64 {
        let top_dim = self.faces[self.top()].dim;
        self.faces
            .iter()
            .filter(|f| f.dim >= 1 && f.dim < top_dim)
            .map(|f| if f.dim % 2 == 1 { 1 } else { -1 })
            .sum()
    }
}

/// Sum of the primitive normals of the facets containing `face`; zero for
/// the cone itself.
pub fn face_normal(cone: &Cone, face: &Face) -> IntVec {
    face.facet_set
        .iter()
        .fold(IntVec::zeros(cone.dim()), |acc, &f| &acc + &cone.facet_normals[f])
}
