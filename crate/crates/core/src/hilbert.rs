//! Minimal Hilbert basis of `K ∩ Z^d`.
//!
//! The cone is cut into simplicial cones by a placing triangulation. Every
//! irreducible lattice point of `K` is either a primitive extreme ray or a
//! nonzero lattice point of the half-open fundamental parallelepiped of one
//! of the simplicial cones, so these candidates contain the basis. The basis
//! is what is left after removing every candidate `x` for which another
//! candidate `c` has `x - c ∈ K`.
//!
//! The reduction is complete: if `x = u + v` with `u, v` nonzero lattice
//! points of `K`, write `u` as a sum of basis elements (all of which are
//! candidates) and let `c` be one of them. Then `x - c = (u - c) + v` is a
//! nonzero lattice point of `K`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::cone::{double_description, Cone, Face};
use crate::exactla::{rank_of_rows, snf, IntMat, IntVec};

/// The unique minimal generating set of `K ∩ Z^d`, sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HilbertBasis {
    elements: Vec<IntVec>,
}

impl HilbertBasis {
    pub fn elements(&self) -> &[IntVec] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Indices of the elements lying on `face`.
    pub fn on_face(&self, cone: &Cone, face: &Face) -> Vec<usize> {
        (0..self.elements.len())
            .filter(|&i| {
                face.facet_set
                    .iter()
                    .all(|&f| cone.facet_normals()[f].dot(&self.elements[i]).is_zero())
            })
            .collect()
    }

    /// `B_F = B ∩ F`.
    pub fn restrict(&self, cone: &Cone, face: &Face) -> Vec<IntVec> {
        self.on_face(cone, face)
            .into_iter()
            .map(|i| self.elements[i].clone())
            .collect()
    }
}

/// Placing triangulation of the cone over `rays`.
///
/// The lexicographically first independent rays form the initial simplex;
/// the remaining rays are placed in order, each one coned over the boundary
/// facets of the current triangulation that it sees. Returns sorted index
/// sets of full-dimensional simplicial cones.
pub fn triangulate(rays: &[IntVec]) -> Vec<Vec<usize>> {
    let Some(d) = rays.first().map(IntVec::dim) else {
        return Vec::new();
    };
    let mut order: Vec<usize> = (0..rays.len()).collect();
    order.sort_by(|&a, &b| rays[a].cmp(&rays[b]).then(a.cmp(&b)));

    let mut initial: Vec<usize> = Vec::new();
    let mut vecs: Vec<IntVec> = Vec::new();
    for &i in &order {
        if initial.len() == d {
            break;
        }
        vecs.push(rays[i].clone());
        if rank_of_rows(&vecs) == vecs.len() {
            initial.push(i);
        } else {
            vecs.pop();
        }
    }
    if initial.len() < d {
        return Vec::new();
    }
    initial.sort_unstable();
    let mut placed = initial.clone();
    let mut simplices = vec![initial];

    for &v in order.iter().filter(|i| !placed.contains(i)).collect::<Vec<_>>() {
        let current = IntMat::from_columns(d, &placed.iter().map(|&i| rays[i].clone()).collect::<Vec<_>>());
        let facets = double_description(&current).expect("placed rays are full-dimensional");
        let mut added = Vec::new();
        for simplex in &simplices {
            for skip in 0..simplex.len() {
                let ridge: Vec<usize> = simplex
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != skip)
                    .map(|(_, &r)| r)
                    .collect();
                let sees = facets.iter().any(|f| {
                    ridge.iter().all(|&r| f.dot(&rays[r]).is_zero()) && f.dot(&rays[v]).is_negative()
                });
                if sees {
                    let mut s = ridge;
                    s.push(v);
                    s.sort_unstable();
                    added.push(s);
                }
            }
        }
        simplices.extend(added);
        placed.push(v);
    }
    simplices.sort();
    simplices
}

/// Lattice points of the half-open parallelepiped `{Σ λ_i r_i : 0 <= λ_i < 1}`
/// for linearly independent rays, counted within the lattice of their span.
///
/// With `U·R·V = S` in Smith form the residues `t` with `0 <= t_i < s_i`
/// enumerate `span ∩ Z^d` modulo the lattice of the rays, and each residue
/// has parallelepiped coordinates `frac(V·(t/s))`.
pub fn parallelepiped_points(rays: &[IntVec]) -> Vec<IntVec> {
    let Some(d) = rays.first().map(IntVec::dim) else {
        return Vec::new();
    };
    let k = rays.len();
    let r = IntMat::from_columns(d, rays);
    let form = snf(&r);
    let divisors = form.divisors();
    assert_eq!(divisors.len(), k, "rays must be linearly independent");
    let big = divisors.last().cloned().expect("at least one ray");

    let mut points = Vec::new();
    let mut t = vec![BigInt::zero(); k];
    loop {
        // λ·big = V·(t_i·big/s_i), reduced mod big
        let scaled: Vec<BigInt> = t
            .iter()
            .zip(&divisors)
            .map(|(ti, si)| ti * (&big / si))
            .collect();
        let mut mu = IntVec::zeros(k);
        for i in 0..k {
            let mut acc = BigInt::zero();
            for (j, sj) in scaled.iter().enumerate() {
                acc += &form.right[(i, j)] * sj;
            }
            mu[i] = acc.mod_floor(&big);
        }
        let p = r.mul_vec(&mu);
        points.push(IntVec::new(p.iter().map(|x| x / &big).collect()));

        // odometer over the residues
        let mut pos = 0;
        loop {
            if pos == k {
                points.sort();
                return points;
            }
            t[pos] += 1;
            if t[pos] < divisors[pos] {
                break;
            }
            t[pos] = BigInt::zero();
            pos += 1;
        }
    }
}

/// Computes the minimal Hilbert basis of the cone.
pub fn hilbert_basis(cone: &Cone) -> HilbertBasis {
    let rays = cone.extreme_rays();
    let simplices = triangulate(rays);
    let mut candidates: Vec<IntVec> = simplices
        .par_iter()
        .map(|s| {
            let vecs: Vec<IntVec> = s.iter().map(|&i| rays[i].clone()).collect();
            parallelepiped_points(&vecs)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .filter(|p| !p.is_zero())
        .collect();
    candidates.extend(rays.iter().cloned());
    candidates.sort();
    candidates.dedup();

    let normals = cone.facet_normals();
    let values: Vec<Vec<BigInt>> = candidates
        .iter()
        .map(|c| normals.iter().map(|f| f.dot(c)).collect())
        .collect();
    let elements = (0..candidates.len())
        .filter(|&x| {
            !(0..candidates.len()).any(|c| {
                c != x
                    && values[x]
                        .iter()
                        .zip(&values[c])
                        .all(|(vx, vc)| !(vx - vc).is_negative())
            })
        })
        .map(|x| candidates[x].clone())
        .collect();
    HilbertBasis { elements }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[i64]) -> IntVec {
        IntVec::from_i64s(x)
    }

    // lattice points of the parallelepiped found by scanning its bounding
    // box and testing the λ-coordinates directly (2-D only)
    fn box_scan_2d(r1: &IntVec, r2: &IntVec) -> Vec<IntVec> {
        let det = &r1[0] * &r2[1] - &r1[1] * &r2[0];
        let mut out = Vec::new();
        let corners = |i: usize| [BigInt::zero(), r1[i].clone(), r2[i].clone(), &r1[i] + &r2[i]];
        let lo0 = corners(0).into_iter().min().unwrap();
        let hi0 = corners(0).into_iter().max().unwrap();
        let lo1 = corners(1).into_iter().min().unwrap();
        let hi1 = corners(1).into_iter().max().unwrap();
        let mut x = lo0.clone();
        while x <= hi0 {
            let mut y = lo1.clone();
            while y <= hi1 {
                // Cramer: λ1 = (x r2y - y r2x)/det, λ2 = (r1x y - r1y x)/det
                let n1 = &x * &r2[1] - &y * &r2[0];
                let n2 = &r1[0] * &y - &r1[1] * &x;
                let inside = |n: &BigInt| {
                    if det.is_positive() {
                        !n.is_negative() && n < &det
                    } else {
                        !n.is_positive() && n > &det
                    }
                };
                if inside(&n1) && inside(&n2) {
                    out.push(IntVec::new(vec![x.clone(), y.clone()]));
                }
                y += 1;
            }
            x += 1;
        }
        out.sort();
        out
    }

    #[test]
    fn parallelepiped_matches_box_scan() {
        let pts = parallelepiped_points(&[v(&[1, 0]), v(&[1, 2])]);
        assert_eq!(pts, vec![v(&[0, 0]), v(&[1, 1])]);
        assert_eq!(pts, box_scan_2d(&v(&[1, 0]), &v(&[1, 2])));

        let pts = parallelepiped_points(&[v(&[1, 0]), v(&[1, 4])]);
        assert_eq!(pts, vec![v(&[0, 0]), v(&[1, 1]), v(&[1, 2]), v(&[1, 3])]);
        assert_eq!(pts, box_scan_2d(&v(&[1, 0]), &v(&[1, 4])));

        for (a, b) in [((2, 1), (1, 3)), ((3, -1), (1, 2)), ((1, 5), (4, 1))] {
            let (r1, r2) = (v(&[a.0, a.1]), v(&[b.0, b.1]));
            assert_eq!(parallelepiped_points(&[r1.clone(), r2.clone()]), box_scan_2d(&r1, &r2));
        }
    }

    #[test]
    fn unimodular_parallelepiped_is_origin() {
        let pts = parallelepiped_points(&[v(&[1, 0, 0]), v(&[1, 1, 0]), v(&[0, 1, 1])]);
        assert_eq!(pts, vec![v(&[0, 0, 0])]);
    }

    #[test]
    fn parallelepiped_in_a_subspace() {
        // rays span the plane z = 0; the span lattice is Z^2 x {0}
        let pts = parallelepiped_points(&[v(&[1, 0, 0]), v(&[1, 2, 0])]);
        assert_eq!(pts, vec![v(&[0, 0, 0]), v(&[1, 1, 0])]);
    }

    #[test]
    fn triangulation_examples() {
        assert_eq!(triangulate(&[v(&[1, 0]), v(&[1, 4])]), vec![vec![0, 1]]);
        let unit = [v(&[1, 0, 0]), v(&[0, 1, 0]), v(&[0, 0, 1])];
        assert_eq!(triangulate(&unit), vec![vec![0, 1, 2]]);
        let square = [v(&[0, 1, 0]), v(&[0, 1, 1]), v(&[1, 0, 0]), v(&[1, 0, 1])];
        assert_eq!(triangulate(&square).len(), 2);
    }

    #[test]
    fn hilbert_basis_of_worked_cone() {
        let cone = Cone::ingest(&IntMat::from_rows_i64(&[&[1, 1, 1, 1], &[0, 2, 3, 4]])).unwrap();
        let b = hilbert_basis(&cone);
        assert_eq!(
            b.elements(),
            &[v(&[1, 0]), v(&[1, 1]), v(&[1, 2]), v(&[1, 3]), v(&[1, 4])]
        );
    }

    #[test]
    fn unimodular_cone_basis_is_its_rays() {
        let cone = Cone::ingest(&IntMat::from_rows_i64(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]])).unwrap();
        assert_eq!(hilbert_basis(&cone).elements(), cone.extreme_rays());
    }
}
