//! Semigroups with a prescribed antichain of minimal almost saturated faces.
//!
//! For faces `F_1, …, F_M` of `K` forming an antichain put
//! `b*_i = Σ_{b ∈ B ∩ F_i} b` and
//!
//! ```text
//! A' = {2b : b ∈ B} ∪ ({2b*_1, …, 2b*_M} + (B ∪ {0}))
//! ```
//!
//! Then `cone(A') = K`, `A'` spans `Z^d` (as `b = (2b*_1 + b) - 2b*_1`), the
//! faces containing no `F_i` are nowhere saturated and `2|B| b*_i` is a
//! saturation point on `F_i`. The apex has `b* = 0`, in which case `A'`
//! contains `B` itself and the semigroup is saturated.
//!
//! Faces are named by their sets of extreme ray indices. Everything here
//! works in the internal coordinates of the cone.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::classify::{classify_all, DimStatusCount};
use crate::cone::{enumerate_faces, Cone, Face, FacePoset, DEFAULT_FACE_BUDGET};
use crate::error::{Error, Result};
use crate::exactla::{hnf, IntMat, IntVec};
use crate::hilbert::{hilbert_basis, HilbertBasis};
use crate::semigroup::Semigroup;

/// Faces given by sorted extreme ray index sets.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AntichainSpec {
    pub faces: Vec<Vec<usize>>,
}

impl AntichainSpec {
    pub fn new(faces: Vec<Vec<usize>>) -> Self {
        let mut faces: Vec<Vec<usize>> = faces
            .into_iter()
            .map(|mut f| {
                f.sort_unstable();
                f.dedup();
                f
            })
            .collect();
        faces.sort();
        AntichainSpec { faces }
    }

    /// Parses a JSON array of ray index arrays, e.g. `[[0],[1,2]]`.
    pub fn from_json(text: &str) -> Result<Self> {
        let faces: Vec<Vec<usize>> = serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("antichain JSON: {e}")))?;
        Ok(AntichainSpec::new(faces))
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }
}

/// Where a column of `A'` comes from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Provenance {
    /// `2b` for a Hilbert basis element `b`.
    Doubled(IntVec),
    /// `2b*_{F_i} + b` with `b ∈ B ∪ {0}`; `i` indexes the antichain.
    Shifted(usize, IntVec),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructionOutput {
    /// Columns sorted lexicographically, internal coordinates.
    pub a_prime: IntMat,
    pub provenance: Vec<Provenance>,
    /// `b*` of each antichain face.
    pub b_stars: Vec<IntVec>,
}

/// Inclusion pairs `(sub, sup)` among the given ray sets.
pub fn validate_antichain(faces: &[Vec<usize>]) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut out = Vec::new();
    for (x, a) in faces.iter().enumerate() {
        for (y, b) in faces.iter().enumerate() {
            if x != y && a.iter().all(|r| b.contains(r)) && (a != b || x < y) {
                out.push((a.clone(), b.clone()));
            }
        }
    }
    out
}

/// `Σ_{b ∈ B ∩ F} b`. Fails for the apex, where the sum is empty.
pub fn b_star(cone: &Cone, basis: &HilbertBasis, face: &Face) -> Result<IntVec> {
    let on = basis.restrict(cone, face);
    if on.is_empty() {
        return Err(Error::EmptyFaceBasis(format!("{:?}", face.ray_set)));
    }
    let sum = on.iter().fold(IntVec::zeros(cone.dim()), |acc, b| &acc + b);
    debug_assert!(
        (0..cone.facet_normals().len())
            .filter(|f| !face.facet_set.contains(f))
            .all(|f| cone.facet_normals()[f].dot(&sum) > BigInt::zero()),
        "b* must lie in the relative interior"
    );
    Ok(sum)
}

fn resolve<'p>(poset: &'p FacePoset, spec: &AntichainSpec) -> Result<Vec<&'p Face>> {
    if let Some((sub, sup)) = validate_antichain(&spec.faces).into_iter().next() {
        return Err(Error::NotAnAntichain { sub, sup });
    }
    spec.faces
        .iter()
        .map(|f| {
            poset
                .find(f)
                .map(|id| poset.face(id))
                .ok_or_else(|| Error::UnknownFace(f.clone()))
        })
        .collect()
}

/// Builds `A'` for the antichain.
pub fn construct_from_antichain(
    cone: &Cone,
    poset: &FacePoset,
    basis: &HilbertBasis,
    spec: &AntichainSpec,
) -> Result<ConstructionOutput> {
    let faces = resolve(poset, spec)?;
    let two = BigInt::from(2);
    let b_stars = face_b_stars(cone, basis, &faces)?;

    let mut columns: Vec<(IntVec, Provenance)> = basis
        .elements()
        .iter()
        .map(|b| (b.scale(&two), Provenance::Doubled(b.clone())))
        .collect();
    let zero = IntVec::zeros(cone.dim());
    for (i, bs) in b_stars.iter().enumerate() {
        let base = bs.scale(&two);
        for b in std::iter::once(&zero).chain(basis.elements()) {
            columns.push((&base + b, Provenance::Shifted(i, b.clone())));
        }
    }
    // stable sort keeps the first provenance of a repeated column
    columns.sort_by(|a, b| a.0.cmp(&b.0));
    columns.dedup_by(|a, b| a.0 == b.0);
    columns.retain(|(c, _)| !c.is_zero());

    let (cols, provenance): (Vec<IntVec>, Vec<Provenance>) = columns.into_iter().unzip();
    Ok(ConstructionOutput {
        a_prime: IntMat::from_columns(cone.dim(), &cols),
        provenance,
        b_stars,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificateCheck {
    pub face: Vec<usize>,
    /// `2|B| b*`
    pub point: IntVec,
    /// `point + Σ_{b ∈ T} b ∈ Q` for every subset `T ⊆ B`; `None` when `B`
    /// is too large to enumerate its subsets.
    pub subset_sums: Option<bool>,
    /// `point + h ∈ Q` for every fundamental hole; `None` when the zonotope
    /// box exceeds the point budget.
    pub fundamental_holes: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub cone_equal: bool,
    /// Index of the lattice spanned by `A'` (1 means `Z^d`).
    pub lattice_index: String,
    pub expected_minimal: Vec<Vec<usize>>,
    pub minimal_almost: Vec<Vec<usize>>,
    pub maximal_nowhere: Vec<Vec<usize>>,
    pub per_dim: Vec<DimStatusCount>,
    /// Faces containing no antichain face, all found nowhere saturated.
    pub outside_nowhere: bool,
    pub certificates: Vec<CertificateCheck>,
    /// Empty antichains fall outside the construction's guarantees; the
    /// classification is then reported but not checked.
    pub empty_antichain: bool,
}

/// Largest `|B|` for which the subset certificate is enumerated.
pub const SUBSET_CERTIFICATE_LIMIT: usize = 16;

/// Checks the three properties of `A'` (given in internal coordinates of
/// `cone`) and the saturation certificates.
pub fn verify_construction(
    cone: &Cone,
    poset: &FacePoset,
    basis: &HilbertBasis,
    spec: &AntichainSpec,
    a_prime: &IntMat,
    point_budget: u64,
) -> Result<VerificationReport> {
    let faces = resolve(poset, spec)?;
    let fail = |msg: String| Err(Error::VerificationFailed(msg));
    let d = cone.dim();
    if a_prime.rows() != d {
        return fail(format!("A' has {} rows, expected {d}", a_prime.rows()));
    }

    // (ii) first: with a full lattice the internal coordinates of A' agree
    // with those of the cone
    let h = hnf(a_prime);
    let lattice_index = if h.rank == d { h.pivot_product() } else { BigInt::zero() };
    if !lattice_index.is_one() {
        return fail(format!(
            "lattice: columns of A' span a lattice of index {lattice_index} (0 = rank deficient)"
        ));
    }

    // (i)
    let sg = Semigroup::from_generators(a_prime)?;
    let cone_equal = sg.cone().facet_normals() == cone.facet_normals()
        && sg.cone().extreme_rays() == cone.extreme_rays();
    if !cone_equal {
        return fail("cone: cone(A') differs from K".into());
    }

    // (iii)
    let poset2 = enumerate_faces(sg.cone(), DEFAULT_FACE_BUDGET.max(poset.len()))?;
    let basis2 = hilbert_basis(sg.cone());
    if basis2.elements() != basis.elements() {
        return fail("cone: Hilbert basis of cone(A') differs from B".into());
    }
    let report = classify_all(&sg, &poset2, &basis2);
    let ray_sets = |ids: &[usize]| -> Vec<Vec<usize>> {
        let mut v: Vec<Vec<usize>> = ids.iter().map(|&i| poset2.face(i).ray_set.clone()).collect();
        v.sort();
        v
    };
    let minimal_almost = ray_sets(&report.minimal_almost);
    let maximal_nowhere = ray_sets(&report.maximal_nowhere);
    let empty_antichain = spec.is_empty();
    if !empty_antichain && minimal_almost != spec.faces {
        return fail(format!(
            "faces: minimal almost saturated faces are {minimal_almost:?}, expected {:?}",
            spec.faces
        ));
    }

    let outside_nowhere = poset2.faces().iter().all(|g| {
        let contains_some = faces.iter().any(|f| f.ray_set.iter().all(|r| g.ray_set.contains(r)));
        contains_some || !report.status[g.id].is_almost()
    });
    if !empty_antichain && !outside_nowhere {
        return fail("faces: a face containing no antichain face is almost saturated".into());
    }

    let h0 = sg.fundamental_holes(point_budget).ok();
    let c = BigInt::from(2 * basis.len());
    let mut certificates = Vec::new();
    let columns: std::collections::HashSet<IntVec> = a_prime.columns().into_iter().collect();
    // x = 2|B| b* plus any subset sum of B equals a sum of the columns
    // 2b* + b (b in T) and |B| - |T| copies of 2b*, so finding these columns
    // settles every subset at once; otherwise enumerate the subsets
    let decomposes = |bs: &IntVec| -> bool {
        let two = bs.scale(&BigInt::from(2));
        (two.is_zero() || columns.contains(&two)) && basis.elements().iter().all(|b| columns.contains(&(&two + b)))
    };
    let subsets_ok = |x: &IntVec| -> bool {
        let elems = basis.elements();
        (0u64..1 << elems.len()).all(|mask| {
            let mut y = x.clone();
            for (k, b) in elems.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    y = &y + b;
                }
            }
            sg.member_q(&y).is_some()
        })
    };
    for (f, bs) in faces.iter().zip(face_b_stars(cone, basis, &faces)?) {
        let point = bs.scale(&c);
        let subset_sums = if decomposes(&bs) {
            Some(true)
        } else {
            (basis.len() <= SUBSET_CERTIFICATE_LIMIT).then(|| subsets_ok(&point))
        };
        let fundamental_holes = match &h0 {
            Some(h0) => Some(sg.is_saturation_point(h0, &point)?),
            None => None,
        };
        if subset_sums == Some(false) || fundamental_holes == Some(false) {
            return fail(format!("certificate: {point} is not a saturation point"));
        }
        certificates.push(CertificateCheck {
            face: f.ray_set.clone(),
            point,
            subset_sums,
            fundamental_holes,
        });
    }

    Ok(VerificationReport {
        cone_equal,
        lattice_index: lattice_index.to_string(),
        expected_minimal: spec.faces.clone(),
        minimal_almost,
        maximal_nowhere,
        per_dim: report.per_dim,
        outside_nowhere,
        certificates,
        empty_antichain,
    })
}

/// `b*` per face, with `0` for the apex.
fn face_b_stars(cone: &Cone, basis: &HilbertBasis, faces: &[&Face]) -> Result<Vec<IntVec>> {
    faces
        .iter()
        .map(|f| {
            if f.ray_set.is_empty() {
                Ok(IntVec::zeros(cone.dim()))
            } else {
                b_star(cone, basis, f)
            }
        })
        .collect()
}

/// All nonempty antichains of proper faces, plus `{K}`; for small posets.
pub fn all_antichains(poset: &FacePoset) -> Vec<AntichainSpec> {
    let ids: Vec<usize> = (0..poset.len()).collect();
    let mut out = BTreeSet::new();
    let n = ids.len();
    assert!(n <= 20, "too many faces to list antichains");
    for mask in 1u32..1 << n {
        let chosen: Vec<&Face> = (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| poset.face(i)).collect();
        let ok = chosen.iter().enumerate().all(|(x, a)| {
            chosen
                .iter()
                .enumerate()
                .all(|(y, b)| x == y || !a.is_subface_of(b))
        });
        if ok {
            out.insert(AntichainSpec::new(chosen.iter().map(|f| f.ray_set.clone()).collect()).faces);
        }
    }
    out.into_iter().map(|faces| AntichainSpec { faces }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn v(x: &[i64]) -> IntVec {
        IntVec::from_i64s(x)
    }

    fn setup() -> (Cone, FacePoset, HilbertBasis) {
        let cone = Cone::ingest(&fixtures::ex22()).unwrap();
        let poset = enumerate_faces(&cone, 100).unwrap();
        let basis = hilbert_basis(&cone);
        (cone, poset, basis)
    }

    #[test]
    fn b_star_examples() {
        let (cone, poset, basis) = setup();
        let ray0 = poset.face(poset.find(&[0]).unwrap());
        assert_eq!(b_star(&cone, &basis, ray0).unwrap(), v(&[1, 0]));
        let top = poset.face(poset.top());
        assert_eq!(b_star(&cone, &basis, top).unwrap(), v(&[5, 10]));
        let apex = poset.face(poset.apex());
        assert!(matches!(b_star(&cone, &basis, apex), Err(Error::EmptyFaceBasis(_))));
    }

    #[test]
    fn construction_for_first_ray() {
        let (cone, poset, basis) = setup();
        let spec = AntichainSpec::new(vec![vec![0]]);
        let out = construct_from_antichain(&cone, &poset, &basis, &spec).unwrap();
        let expected: Vec<IntVec> = [[2, 0], [2, 2], [2, 4], [2, 6], [2, 8], [3, 0], [3, 1], [3, 2], [3, 3], [3, 4]]
            .iter()
            .map(|p| v(p))
            .collect();
        assert_eq!(out.a_prime.columns(), expected);
        assert_eq!(out.provenance[0], Provenance::Doubled(v(&[1, 0])));
        let r = verify_construction(&cone, &poset, &basis, &spec, &out.a_prime, 2_000_000).unwrap();
        assert_eq!(r.minimal_almost, vec![vec![0]]);
        assert_eq!(r.certificates[0].point, v(&[10, 0]));
        assert_eq!(r.certificates[0].subset_sums, Some(true));
    }

    #[test]
    fn every_antichain_round_trips() {
        let (cone, poset, basis) = setup();
        let all = all_antichains(&poset);
        // {apex}, {F1}, {F2}, {F1, F2}, {K}
        assert_eq!(all.len(), 5);
        for spec in all {
            let out = construct_from_antichain(&cone, &poset, &basis, &spec).unwrap();
            let r = verify_construction(&cone, &poset, &basis, &spec, &out.a_prime, 2_000_000).unwrap();
            assert_eq!(r.minimal_almost, spec.faces);
        }
    }

    #[test]
    fn rejects_chains_and_unknown_faces() {
        let (cone, poset, basis) = setup();
        let spec = AntichainSpec::new(vec![vec![0], vec![0, 1]]);
        assert!(matches!(
            construct_from_antichain(&cone, &poset, &basis, &spec),
            Err(Error::NotAnAntichain { .. })
        ));
        let spec = AntichainSpec::new(vec![vec![5]]);
        assert!(matches!(
            construct_from_antichain(&cone, &poset, &basis, &spec),
            Err(Error::UnknownFace(_))
        ));
        assert!(validate_antichain(&[vec![0], vec![1]]).is_empty());
        assert!(validate_antichain(&[]).is_empty());
        assert_eq!(validate_antichain(&[vec![0], vec![0, 1]]), vec![(vec![0], vec![0, 1])]);
    }

    #[test]
    fn empty_antichain_doubles_the_basis() {
        let (cone, poset, basis) = setup();
        let spec = AntichainSpec::default();
        let out = construct_from_antichain(&cone, &poset, &basis, &spec).unwrap();
        assert_eq!(out.a_prime.cols(), basis.len());
        // 2B spans an index-4 lattice, so the lattice check fails
        assert!(matches!(
            verify_construction(&cone, &poset, &basis, &spec, &out.a_prime, 1000),
            Err(Error::VerificationFailed(_))
        ));
    }

    #[test]
    fn antichain_json() {
        assert_eq!(AntichainSpec::from_json(" [[1,0], [2]] ").unwrap().faces, vec![vec![0, 1], vec![2]]);
        assert_eq!(AntichainSpec::from_json("[[]]").unwrap().faces, vec![Vec::<usize>::new()]);
        assert!(AntichainSpec::from_json("[]").unwrap().is_empty());
        assert!(AntichainSpec::from_json("[[1],]").is_err());
        assert!(AntichainSpec::from_json("[1]").is_err());
    }
}
