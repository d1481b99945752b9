//! Almost saturated versus nowhere saturated faces.
//!
//! A face `F` is nowhere saturated iff for some Hilbert basis element `b`
//! the system
//!
//! ```text
//! b = Σ x_j a_j,   x_j ∈ Z,   x_j >= 0 whenever a_j ∉ F
//! ```
//!
//! has no solution; the same holds with the fundamental holes in place of
//! the Hilbert basis. Every facet normal `f` containing `F` vanishes on the
//! generators of `F` and is nonnegative on the others, so applying these
//! normals to the system bounds all sign-constrained variables. The
//! enumeration is done by [`DiophantineSystem`]; the part of `b` left over
//! after the sign-constrained generators must lie in the lattice spanned by
//! `A ∩ F`.

use std::collections::HashSet;

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::cone::{Face, FacePoset};
use crate::error::{Error, Result};
use crate::exactla::{DiophantineSystem, IntVec};
use crate::hilbert::HilbertBasis;
use crate::semigroup::{FundamentalHoleSet, Semigroup, Window, WindowedSets};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum FaceStatus {
    AlmostSaturated,
    NowhereSaturated,
}

impl FaceStatus {
    pub fn is_almost(self) -> bool {
        self == FaceStatus::AlmostSaturated
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Feasibility {
    Feasible,
    Infeasible,
}

#[derive(Clone, Debug, Serialize)]
pub struct FeasibilityResult {
    pub status: Feasibility,
    /// Coefficients over all generators when feasible.
    pub witness: Option<IntVec>,
    pub target: IntVec,
    pub face: usize,
}

/// The sign-constrained system of one face, prepared once and solved for
/// many right-hand sides.
pub struct FaceSystem<'a> {
    sg: &'a Semigroup,
    face: &'a Face,
    system: Option<DiophantineSystem>,
}

impl<'a> FaceSystem<'a> {
    pub fn new(sg: &'a Semigroup, face: &'a Face) -> Self {
        let system = (face.dim > 0).then(|| {
            let normals = sg.cone().facet_normals();
            let functionals: Vec<IntVec> = face.facet_set.iter().map(|&f| normals[f].clone()).collect();
            let constrained: Vec<usize> = (0..sg.cone().num_generators())
                .filter(|&j| !face.contains_generator(j))
                .collect();
            DiophantineSystem::new(sg.generators(), &constrained, &functionals)
                .expect("facet normals containing a face bound the generators off it")
        });
        FaceSystem { sg, face, system }
    }

    pub fn solve(&self, target: &IntVec) -> Option<IntVec> {
        match &self.system {
            Some(sys) => sys.solve(target),
            // the apex: every variable is sign-constrained
            None => self.sg.member_q(target),
        }
    }

    pub fn check(&self, target: &IntVec) -> FeasibilityResult {
        let witness = self.solve(target);
        FeasibilityResult {
            status: if witness.is_some() {
                Feasibility::Feasible
            } else {
                Feasibility::Infeasible
            },
            witness,
            target: target.clone(),
            face: self.face.id,
        }
    }

    /// First target (in the given order) without a solution.
    pub fn first_infeasible<'t>(&self, targets: &'t [IntVec]) -> Option<&'t IntVec> {
        targets.iter().find(|b| self.solve(b).is_none())
    }
}

/// Whether `target` is a signed combination of the generators with
/// nonnegative coefficients off `face`.
pub fn face_feasible(sg: &Semigroup, face: &Face, target: &IntVec) -> FeasibilityResult {
    FaceSystem::new(sg, face).check(target)
}

/// Checks a proposed solution of the face system exactly.
pub fn verify_face_witness(sg: &Semigroup, face: &Face, target: &IntVec, x: &IntVec) -> bool {
    x.dim() == sg.cone().num_generators()
        && sg.generators().mul_vec(x) == *target
        && (0..x.dim()).all(|j| face.contains_generator(j) || !x[j].is_negative())
}

/// Classifies a face by the Hilbert basis criterion. For a nowhere
/// saturated face the first basis element without a solution is returned.
pub fn classify_face(sg: &Semigroup, basis: &HilbertBasis, face: &Face) -> (FaceStatus, Option<IntVec>) {
    match FaceSystem::new(sg, face).first_infeasible(basis.elements()) {
        Some(b) => (FaceStatus::NowhereSaturated, Some(b.clone())),
        None => (FaceStatus::AlmostSaturated, None),
    }
}

/// Classifies a face by the fundamental-hole criterion.
pub fn classify_via_h0(sg: &Semigroup, h0: &FundamentalHoleSet, face: &Face) -> FaceStatus {
    classify_via_targets(sg, &h0.holes, face)
}

/// Fundamental-hole criterion over an arbitrary target list (for instance
/// the Hilbert basis elements outside `Q`, all of which are fundamental
/// holes).
pub fn classify_via_targets(sg: &Semigroup, targets: &[IntVec], face: &Face) -> FaceStatus {
    match FaceSystem::new(sg, face).first_infeasible(targets) {
        Some(_) => FaceStatus::NowhereSaturated,
        None => FaceStatus::AlmostSaturated,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DimStatusCount {
    pub dim: usize,
    pub total: usize,
    pub nowhere: usize,
    pub almost: usize,
}

#[derive(Clone, Debug)]
pub struct SaturationReport {
    pub status: Vec<FaceStatus>,
    /// Failing Hilbert basis element of each tested nowhere saturated face.
    pub certificate: Vec<Option<IntVec>>,
    /// Whether the face was decided by the feasibility test (as opposed to
    /// inherited from an almost saturated subface).
    pub tested: Vec<bool>,
    pub minimal_almost: Vec<usize>,
    pub maximal_nowhere: Vec<usize>,
    pub per_dim: Vec<DimStatusCount>,
}

/// Classifies every face of the poset.
///
/// Faces are processed in increasing dimension. A face covering an almost
/// saturated face is almost saturated; only faces all of whose subfaces are
/// nowhere saturated are tested. Faces of one dimension are tested in
/// parallel on the current rayon pool and merged in face order.
pub fn classify_all(sg: &Semigroup, poset: &FacePoset, basis: &HilbertBasis) -> SaturationReport {
    let n = poset.len();
    let mut status = vec![FaceStatus::NowhereSaturated; n];
    let mut certificate = vec![None; n];
    let mut tested = vec![false; n];
    let top_dim = poset.face(poset.top()).dim;
    for dim in 0..=top_dim {
        let ids: Vec<usize> = poset.faces().iter().filter(|f| f.dim == dim).map(|f| f.id).collect();
        let decided: Vec<(usize, FaceStatus, Option<IntVec>, bool)> = ids
            .par_iter()
            .map(|&id| {
                if poset.subfaces(id).iter().any(|&s| status[s].is_almost()) {
                    (id, FaceStatus::AlmostSaturated, None, false)
                } else {
                    let (st, cert) = classify_face(sg, basis, poset.face(id));
                    (id, st, cert, true)
                }
            })
            .collect();
        for (id, st, cert, t) in decided {
            status[id] = st;
            certificate[id] = cert;
            tested[id] = t;
        }
    }

    let minimal_almost = (0..n)
        .filter(|&id| status[id].is_almost() && poset.subfaces(id).iter().all(|&s| !status[s].is_almost()))
        .collect();
    let maximal_nowhere = (0..n)
        .filter(|&id| !status[id].is_almost() && poset.superfaces(id).iter().all(|&s| status[s].is_almost()))
        .collect();
    let per_dim = (0..=top_dim)
        .map(|dim| {
            let of_dim: Vec<usize> = (0..n).filter(|&id| poset.face(id).dim == dim).collect();
            let almost = of_dim.iter().filter(|&&id| status[id].is_almost()).count();
            DimStatusCount {
                dim,
                total: of_dim.len(),
                nowhere: of_dim.len() - almost,
                almost,
            }
        })
        .collect();
    SaturationReport {
        status,
        certificate,
        tested,
        minimal_almost,
        maximal_nowhere,
        per_dim,
    }
}

/// Points of the window of the form `y + q` with `q ∈ Q ∩ F`.
fn coset_points<'p>(sg: &Semigroup, face: &Face, y: &IntVec, points: &'p [IntVec]) -> Vec<&'p IntVec> {
    let normals = sg.cone().facet_normals();
    points
        .iter()
        .filter(|p| {
            let q = *p - y;
            sg.cone().contains(&q)
                && face.facet_set.iter().all(|&f| normals[f].dot(&q).is_zero())
                && sg.member_q(&q).is_some()
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NowhereWitness {
    /// Fundamental hole whose coset `y + Q_F` is all holes in the window.
    pub y: IntVec,
    /// Number of coset points inside the window that were checked.
    pub checked: usize,
}

/// Windowed evidence that a nowhere saturated face has a fundamental hole
/// `y` with `y + Q_F` made of holes.
pub fn nowhere_witness(
    sg: &Semigroup,
    h0: &FundamentalHoleSet,
    face: &Face,
    window: &Window,
    budget: u64,
) -> Result<NowhereWitness> {
    if classify_via_h0(sg, h0, face).is_almost() {
        return Err(Error::NotNowhereSaturated(face.ray_set.clone()));
    }
    let points = sg.lattice_points(window, budget)?;
    for y in &h0.holes {
        let coset = coset_points(sg, face, y, &points);
        if coset.is_empty() {
            continue;
        }
        if coset.iter().all(|p| sg.member_q(p).is_none()) {
            return Ok(NowhereWitness {
                y: y.clone(),
                checked: coset.len(),
            });
        }
    }
    Err(Error::NoWitnessInWindow(face.ray_set.clone()))
}

#[derive(Clone, Debug, Serialize)]
pub struct FaceCrossCheck {
    pub face: usize,
    pub ray_set: Vec<usize>,
    pub status: FaceStatus,
    /// A windowed `Q`-minimal saturation point `y` whose coset
    /// `y + Q_F` lies inside the windowed `min(S;S)`.
    pub containing_y: Option<IntVec>,
    pub consistent: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossCheckReport {
    /// `Q` is saturated; nothing to check.
    pub vacuous: bool,
    pub faces: Vec<FaceCrossCheck>,
    pub note: &'static str,
}

impl CrossCheckReport {
    pub fn all_consistent(&self) -> bool {
        self.faces.iter().all(|f| f.consistent)
    }
}

/// Windowed comparison with the minimal-saturation-point criterion: a face
/// is nowhere saturated iff some `Q`-minimal saturation point `y` has
/// `y + Q_F ⊆ min(S;S)`.
///
/// A containment only counts when the window holds a coset point other than
/// `y` itself (for the apex `y` alone suffices).
pub fn minimal_q_crosscheck(
    sg: &Semigroup,
    poset: &FacePoset,
    report: &SaturationReport,
    h0: &FundamentalHoleSet,
    sets: &WindowedSets,
) -> CrossCheckReport {
    let note = "windowed evidence";
    if h0.is_empty() {
        return CrossCheckReport {
            vacuous: true,
            faces: Vec::new(),
            note,
        };
    }
    let min_ss: HashSet<&IntVec> = sets.min_ss.iter().collect();
    let faces = poset
        .faces()
        .iter()
        .map(|face| {
            let status = report.status[face.id];
            let needed = if face.dim == 0 { 1 } else { 2 };
            let containing_y = sets
                .min_sq
                .iter()
                .find(|y| {
                    let coset = coset_points(sg, face, y, &sets.q_points);
                    coset.len() >= needed && coset.iter().all(|p| min_ss.contains(*p))
                })
                .cloned();
            let consistent = containing_y.is_some() != status.is_almost();
            FaceCrossCheck {
                face: face.id,
                ray_set: face.ray_set.clone(),
                status,
                containing_y,
                consistent,
            }
        })
        .collect();
    CrossCheckReport {
        vacuous: false,
        faces,
        note,
    }
}
