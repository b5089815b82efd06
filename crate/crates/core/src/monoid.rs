//! Affine monoids `A ⊆ M`, their unit groups and Hilbert bases.

use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::cone::{hull, Cone, MAX_RANK};
use crate::group_ring::AlgebraError;
use crate::lattice::{
    dot, is_zero_vec, kernel, row_basis, solve, vec_neg, vec_sub, IntMatrix, IntVec, QuotientLattice,
};

/// Largest pointed dimension accepted by [`hilbert_basis`].
pub const HILBERT_MAX_DIM: usize = MAX_RANK;

/// A finitely generated submonoid of `ℤⁿ`.
///
/// Cosets of the unit group `U(A)` are identified with normal-form coordinates
/// of `M/U(A)`; these coordinates play the role of the representatives `S(A)`.
#[derive(Debug, Clone)]
pub struct AffineMonoid {
    rank: usize,
    generators: Vec<IntVec>,
    unit_generators: IntMatrix,
    coset_quotient: Arc<QuotientLattice>,
    // inequality description of cone(A)
    facets: Vec<IntVec>,
    perp: IntMatrix,
    saturated: bool,
}

impl PartialEq for AffineMonoid {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank
            && self.unit_generators == other.unit_generators
            && self.generators.iter().all(|g| other.contains(g))
            && other.generators.iter().all(|g| self.contains(g))
    }
}

impl AffineMonoid {
    /// The monoid generated by `generators`.
    pub fn from_generators(rank: usize, generators: &[IntVec]) -> Result<Self, AlgebraError> {
        if rank > MAX_RANK {
            return Err(crate::cone::ConeError::RankTooLarge(rank).into());
        }
        for g in generators {
            if g.len() != rank {
                return Err(AlgebraError::DimensionMismatch {
                    expected: rank,
                    got: g.len(),
                });
            }
        }
        let gens: Vec<IntVec> = generators
            .iter()
            .filter(|g| !is_zero_vec(g))
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let h = hull(rank, &gens);
        // generators on the minimal face of cone(A) generate U(A)
        let units: Vec<IntVec> = gens
            .iter()
            .filter(|g| h.facets.iter().all(|u| dot(u, g).is_zero()))
            .cloned()
            .collect();
        let unit_generators = row_basis(&IntMatrix::from_rows(rank, &units));
        let coset_quotient = QuotientLattice::new(rank, &unit_generators).expect("width matches");
        Ok(AffineMonoid {
            rank,
            generators: gens,
            unit_generators,
            coset_quotient: Arc::new(coset_quotient),
            facets: h.facets,
            perp: h.perp,
            saturated: false,
        })
    }

    /// `σ∨ ∩ M`, generated by a Hilbert basis; `U(A) = σ⊥ ∩ M`.
    pub fn from_cone(sigma: &Cone) -> Result<Self, AlgebraError> {
        let dual = sigma.dual();
        let generators = hilbert_basis(&dual)?;
        let unit_generators = sigma.perp_lattice().clone();
        Ok(AffineMonoid {
            rank: sigma.rank(),
            generators,
            coset_quotient: Arc::new(sigma.m_sigma()),
            unit_generators,
            facets: dual.facets().to_vec(),
            perp: dual.perp_lattice().clone(),
            saturated: true,
        })
    }

    /// The whole lattice `M` viewed as a monoid.
    pub fn group(rank: usize) -> Result<Self, AlgebraError> {
        let mut gens = Vec::new();
        for r in IntMatrix::identity(rank).row_vecs() {
            gens.push(vec_neg(&r));
            gens.push(r);
        }
        let mut m = Self::from_generators(rank, &gens)?;
        m.saturated = true;
        Ok(m)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn generators(&self) -> &[IntVec] {
        &self.generators
    }

    /// Generators of `U(A)`, in Hermite normal form.
    pub fn unit_generators(&self) -> &IntMatrix {
        &self.unit_generators
    }

    /// `M/U(A)`.
    pub fn coset_quotient(&self) -> &Arc<QuotientLattice> {
        &self.coset_quotient
    }

    /// Whether the monoid equals `cone(A) ∩ M`, as is the case for `σ∨ ∩ M`.
    pub fn is_saturated(&self) -> bool {
        self.saturated
    }

    pub fn is_group(&self) -> bool {
        self.generators.iter().all(|g| self.is_unit_direction(g))
    }

    fn is_unit_direction(&self, v: &[BigInt]) -> bool {
        self.facets.iter().all(|u| dot(u, v).is_zero())
    }

    /// Generators that are not units.
    pub fn non_unit_generators(&self) -> Vec<IntVec> {
        self.generators
            .iter()
            .filter(|g| !self.is_unit_direction(g))
            .cloned()
            .collect()
    }

    /// The coset of `m` in `M/U(A)`.
    pub fn coset_of(&self, m: &[BigInt]) -> IntVec {
        self.coset_quotient.project(m)
    }

    /// Whether `v ∈ cone(A)`.
    pub fn in_cone(&self, v: &[BigInt]) -> bool {
        v.len() == self.rank
            && self.perp.mul_vec(v).iter().all(Zero::is_zero)
            && self.facets.iter().all(|u| !dot(u, v).is_negative())
    }

    /// Exact membership test.
    ///
    /// After the cone test, the problem is reduced modulo `U(A)` and decided by
    /// enumerating the finitely many ways to spend the weight `w(v)` of a
    /// functional `w` that is positive on every non-unit generator.
    pub fn contains(&self, v: &[BigInt]) -> bool {
        if !self.in_cone(v) {
            return false;
        }
        if self.saturated {
            return true;
        }
        let weight: IntVec = (0..self.rank)
            .map(|i| self.facets.iter().map(|u| &u[i]).sum())
            .collect();
        let mut gens: Vec<(IntVec, BigInt)> = self
            .non_unit_generators()
            .iter()
            .map(|g| (self.coset_of(g), dot(&weight, g)))
            .collect();
        gens.sort_by(|a, b| b.1.cmp(&a.1));
        let target = self.coset_of(v);
        let budget = dot(&weight, v);
        let mut failed = HashSet::new();
        self.reach(&target, &budget, &gens, 0, &mut failed)
    }

    fn reach(
        &self,
        target: &IntVec,
        budget: &BigInt,
        gens: &[(IntVec, BigInt)],
        idx: usize,
        failed: &mut HashSet<(usize, IntVec, BigInt)>,
    ) -> bool {
        if budget.is_zero() {
            return is_zero_vec(target);
        }
        if idx == gens.len() {
            return false;
        }
        let key = (idx, target.clone(), budget.clone());
        if failed.contains(&key) {
            return false;
        }
        let (g, w) = &gens[idx];
        let mut t = target.clone();
        let mut b = budget.clone();
        loop {
            if self.reach(&t, &b, gens, idx + 1, failed) {
                return true;
            }
            if &b < w {
                break;
            }
            t = self.coset_quotient.add(&t, &self.coset_quotient.neg(g));
            b -= w;
        }
        failed.insert(key);
        false
    }

    /// Whether every generator of `self` lies in `other`.
    pub fn is_submonoid_of(&self, other: &AffineMonoid) -> bool {
        self.rank == other.rank && self.generators.iter().all(|g| other.contains(g))
    }
}

/// Hilbert basis of `c ∩ ℤⁿ`: the irreducible elements of the pointed part,
/// sorted, followed by `±` a basis of the lineality lattice.
pub fn hilbert_basis(c: &Cone) -> Result<Vec<IntVec>, AlgebraError> {
    let n = c.rank();
    let lin = c.lineality();
    let q = QuotientLattice::new(n, lin).expect("width matches");
    let images: Vec<IntVec> = c.rays().iter().map(|r| q.project(r)).collect();
    let d = q.dim();
    let image = Cone::from_rays(d, &images)?;
    if image.dim() > HILBERT_MAX_DIM {
        return Err(AlgebraError::UnsupportedRank {
            max: HILBERT_MAX_DIM,
            got: image.dim(),
        });
    }
    // coordinates on span(image) ∩ ℤ^d
    let span = kernel(image.perp_lattice());
    let span_t = span.transpose();
    let k = span.rows();
    let coords: Vec<IntVec> = image
        .rays()
        .iter()
        .map(|r| solve(&span_t, r).expect("ray lies in its span"))
        .collect();
    let basis = hilbert_basis_full(k, &coords)?;
    let mut pointed: Vec<IntVec> = basis
        .iter()
        .map(|y| c.reduce_mod_lineality(&q.lift(&span_t.mul_vec(y))))
        .collect();
    pointed.sort();
    for l in lin.row_vecs() {
        pointed.push(l.clone());
        pointed.push(vec_neg(&l));
    }
    Ok(pointed)
}

/// Hilbert basis of a full-dimensional pointed cone in `ℤ^k`.
fn hilbert_basis_full(k: usize, rays: &[IntVec]) -> Result<Vec<IntVec>, AlgebraError> {
    let cone = Cone::from_rays(k, rays)?;
    let mut candidates: BTreeSet<IntVec> = BTreeSet::new();
    for simplex in triangulate(&cone) {
        candidates.extend(simplex.iter().cloned());
        candidates.extend(parallelepiped_points(k, &simplex));
    }
    candidates.retain(|x| !is_zero_vec(x));
    let basis = candidates
        .iter()
        .filter(|x| !candidates.iter().any(|y| y != *x && cone.contains(&vec_sub(x, y))))
        .cloned()
        .collect();
    Ok(basis)
}

/// Pulling triangulation using the first ray as apex, recursively on facets
/// not containing it. Returns ray sets of the maximal simplicial cones.
pub(crate) fn triangulate(cone: &Cone) -> Vec<Vec<IntVec>> {
    let rays = cone.rays();
    if rays.len() == cone.dim() {
        return vec![rays.to_vec()];
    }
    let apex = &rays[0];
    let mut out = Vec::new();
    for u in cone.facets() {
        if dot(u, apex).is_zero() {
            continue;
        }
        let facet_rays: Vec<IntVec> = rays.iter().filter(|r| dot(u, r).is_zero()).cloned().collect();
        let facet = Cone::from_rays(cone.rank(), &facet_rays).expect("faces are cones");
        for mut s in triangulate(&facet) {
            s.insert(0, apex.clone());
            out.push(s);
        }
    }
    out
}

/// Lattice points of the half-open parallelepiped `{Σ λᵢ rᵢ : 0 ≤ λᵢ < 1}`
/// of a full-dimensional simplicial cone.
pub(crate) fn parallelepiped_points(k: usize, rays: &[IntVec]) -> Vec<IntVec> {
    if rays.is_empty() {
        return vec![vec![]];
    }
    let r = IntMatrix::from_rows(k, rays);
    let det = r.determinant();
    let adj = r.adjugate();
    let cosets = QuotientLattice::new(k, &r).expect("width matches");
    let mut reps: Vec<IntVec> = vec![Vec::new()];
    for t in cosets.invariant_factors() {
        let mut next = Vec::new();
        for prefix in &reps {
            let mut i = BigInt::zero();
            while &i < t {
                let mut p = prefix.clone();
                p.push(i.clone());
                next.push(p);
                i += 1;
            }
        }
        reps = next;
    }
    reps.into_iter()
        .map(|c| {
            let mut x = cosets.lift(&c);
            // λ = x · R⁻¹ = x · adj / det
            let lambda_num = adj.transpose().mul_vec(&x);
            for (j, num) in lambda_num.iter().enumerate() {
                let fl = num.div_floor(&det);
                for (xi, ri) in x.iter_mut().zip(r.row(j)) {
                    *xi -= &fl * ri;
                }
            }
            x
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::int_vec;

    fn vecs(v: &[&[i64]]) -> Vec<IntVec> {
        v.iter().map(|r| int_vec(r)).collect()
    }

    fn cone(rank: usize, rays: &[&[i64]]) -> Cone {
        Cone::from_rays(rank, &vecs(rays)).unwrap()
    }

    #[test]
    fn quadrant_monoid() {
        let a = AffineMonoid::from_cone(&cone(2, &[&[1, 0], &[0, 1]])).unwrap();
        assert_eq!(a.generators(), vecs(&[&[0, 1], &[1, 0]]).as_slice());
        assert_eq!(a.unit_generators().rows(), 0);
        assert_eq!(a.coset_quotient().free_rank(), 2);
    }

    #[test]
    fn halfplane_monoid() {
        let a = AffineMonoid::from_cone(&cone(2, &[&[1, 0]])).unwrap();
        assert_eq!(a.unit_generators().row_vecs(), vecs(&[&[0, 1]]));
        assert_eq!(a.coset_quotient().free_rank(), 1);
        assert_eq!(a.generators(), vecs(&[&[1, 0], &[0, 1], &[0, -1]]).as_slice());
        assert!(a.contains(&int_vec(&[0, -5])));
        assert!(!a.contains(&int_vec(&[-1, 0])));
    }

    #[test]
    fn zero_cone_monoid_is_the_lattice() {
        let a = AffineMonoid::from_cone(&Cone::zero(2).unwrap()).unwrap();
        assert_eq!(a.unit_generators(), &IntMatrix::identity(2));
        assert_eq!(a.coset_quotient().dim(), 0);
        assert!(a.is_group());
    }

    #[test]
    fn hilbert_basis_of_singular_dual() {
        let dual = cone(2, &[&[1, 0], &[1, 2]]).dual();
        let hb = hilbert_basis(&dual).unwrap();
        assert_eq!(hb, vecs(&[&[0, 1], &[1, 0], &[2, -1]]));
    }

    #[test]
    fn hilbert_basis_of_quadrant() {
        let q = cone(2, &[&[1, 0], &[0, 1]]);
        assert_eq!(hilbert_basis(&q).unwrap(), vecs(&[&[0, 1], &[1, 0]]));
    }

    #[test]
    fn hilbert_basis_of_square_cone_dual() {
        let sq = cone(3, &[&[0, 0, 1], &[1, 0, 1], &[0, 1, 1], &[1, 1, 1]]);
        let hb = hilbert_basis(&sq.dual()).unwrap();
        // the dual of the cone over the unit square is smooth-generated by its four rays
        assert_eq!(hb.len(), 4);
        assert_eq!(hb, sq.dual().rays().to_vec());
    }

    #[test]
    fn numerical_semigroup_membership() {
        let a = AffineMonoid::from_generators(2, &vecs(&[&[2, 0], &[3, 0]])).unwrap();
        assert!(a.contains(&int_vec(&[0, 0])));
        assert!(!a.contains(&int_vec(&[1, 0])));
        assert!(a.contains(&int_vec(&[5, 0])));
        assert!(!a.contains(&int_vec(&[5, 1])));
        // brute force over n·2 + m·3
        for t in 0..20i64 {
            let brute = (0..=10).any(|n| (0..=10).any(|m| 2 * n + 3 * m == t));
            assert_eq!(a.contains(&int_vec(&[t, 0])), brute, "t = {t}");
        }
    }

    #[test]
    fn units_with_torsion_quotient() {
        let a = AffineMonoid::from_generators(2, &vecs(&[&[2, 0], &[-2, 0], &[0, 1]])).unwrap();
        assert_eq!(a.coset_quotient().describe(), "ℤ/2 ⊕ ℤ");
        assert!(a.contains(&int_vec(&[-4, 3])));
        assert!(!a.contains(&int_vec(&[1, 3])));
        assert!(!a.contains(&int_vec(&[0, -1])));
    }

    #[test]
    fn parallelepiped_of_multiplicity_two_cone() {
        let pts = parallelepiped_points(2, &vecs(&[&[0, 1], &[2, -1]]));
        let set: BTreeSet<IntVec> = pts.into_iter().collect();
        assert_eq!(set, vecs(&[&[0, 0], &[1, 0]]).into_iter().collect());
    }
}
