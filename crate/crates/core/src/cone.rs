//! Rational polyhedral cones in `ℤⁿ ⊗ ℝ`, `n ≤ 4`.
//!
//! A cone is stored with both descriptions: primitive generators of its
//! extreme rays (plus a lineality lattice for non-pointed cones) and primitive
//! inward facet normals. Facet normals are chosen inside the linear span of the
//! cone, i.e. Euclidean-orthogonal to `σ⊥`, which makes them unique even for
//! cones that are not full-dimensional.

use std::collections::{BTreeSet, VecDeque};

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::lattice::{
    dot, is_zero_vec, kernel, primitive, row_basis, snf_full, vec_neg, IntMatrix, IntVec, QuotientLattice,
};

/// Largest ambient rank the polyhedral routines accept.
pub const MAX_RANK: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConeError {
    #[error("cone contains a line")]
    NotStronglyConvex,
    #[error("ambient rank {0} exceeds the supported maximum of {MAX_RANK}")]
    RankTooLarge(usize),
    #[error("vector of length {got} in a rank-{expected} lattice")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("generator and inequality descriptions disagree: {0}")]
    Inconsistent(String),
    #[error("cones live in different lattices")]
    LatticeMismatch,
}

/// Which lattice a cone is meant to live in. Dual-side cones (`σ∨ ⊂ M⊗ℝ`)
/// may contain lines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConeSide {
    Primal,
    Dual,
}

impl ConeSide {
    fn flip(self) -> Self {
        match self {
            ConeSide::Primal => ConeSide::Dual,
            ConeSide::Dual => ConeSide::Primal,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cone {
    rank: usize,
    rays: Vec<IntVec>,
    lineality: IntMatrix,
    facets: Vec<IntVec>,
    perp: IntMatrix,
    dim: usize,
    side: ConeSide,
}

/// Dimension, orthogonal lattice and facet normals of `cone(gens)`.
#[derive(Debug, Clone)]
pub(crate) struct Hull {
    pub dim: usize,
    pub perp: IntMatrix,
    pub facets: Vec<IntVec>,
}

/// Computes the inequality description of the cone generated by `gens` by
/// enumerating hyperplanes through `dim − 1` independent generators.
pub(crate) fn hull(rank: usize, gens: &[IntVec]) -> Hull {
    let g = IntMatrix::from_rows(rank, gens);
    let dim = g.rank();
    let perp = kernel(&g);
    let mut facets = BTreeSet::new();
    if dim > 0 {
        for subset in (0..gens.len()).combinations(dim - 1) {
            let s = g.select_rows(&subset);
            if s.rank() != dim - 1 {
                continue;
            }
            let k = kernel(&s.stack(&perp));
            if k.rows() != 1 {
                continue;
            }
            let u = k.row(0).to_vec();
            let vals: Vec<BigInt> = gens.iter().map(|x| dot(x, &u)).collect();
            if vals.iter().all(|v| !v.is_negative()) {
                facets.insert(u);
            } else if vals.iter().all(|v| !v.is_positive()) {
                facets.insert(vec_neg(&u));
            }
        }
    }
    Hull {
        dim,
        perp,
        facets: facets.into_iter().collect(),
    }
}

fn check_rank(rank: usize) -> Result<(), ConeError> {
    if rank > MAX_RANK {
        Err(ConeError::RankTooLarge(rank))
    } else {
        Ok(())
    }
}

fn rank_of(vectors: &[IntVec], rank: usize) -> usize {
    IntMatrix::from_rows(rank, vectors).rank()
}

impl Cone {
    /// The cone generated by `rays`, which must be strongly convex.
    ///
    /// Generators are reduced to the primitive generators of the extreme rays.
    pub fn from_rays(rank: usize, rays: &[IntVec]) -> Result<Cone, ConeError> {
        check_rank(rank)?;
        for r in rays {
            if r.len() != rank {
                return Err(ConeError::DimensionMismatch {
                    expected: rank,
                    got: r.len(),
                });
            }
        }
        let gens: Vec<IntVec> = rays
            .iter()
            .filter(|r| !is_zero_vec(r))
            .map(|r| primitive(r))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        Self::build(rank, gens, IntMatrix::zeros(0, rank), ConeSide::Primal)
    }

    /// The zero cone of a rank-`rank` lattice.
    pub fn zero(rank: usize) -> Result<Cone, ConeError> {
        Self::from_rays(rank, &[])
    }

    /// Assembles a cone from pointed generators and a lineality lattice. Only
    /// cones without lineality are required to be strongly convex; cones with
    /// lineality are accepted as dual-side cones.
    fn build(rank: usize, gens: Vec<IntVec>, lineality: IntMatrix, side: ConeSide) -> Result<Cone, ConeError> {
        let lineality = row_basis(&lineality);
        let mut all = gens.clone();
        for l in lineality.row_vecs() {
            all.push(vec_neg(&l));
            all.push(l);
        }
        let h = hull(rank, &all);
        let pointed_dim = h.dim - lineality.rows();
        if lineality.rows() == 0 && rank_of(&h.facets, rank) != h.dim {
            return Err(ConeError::NotStronglyConvex);
        }
        // extreme rays of the pointed part: tight facets cut out a ray
        let rays: Vec<IntVec> = gens
            .into_iter()
            .filter(|g| {
                let tight: Vec<IntVec> = h.facets.iter().filter(|u| dot(u, g).is_zero()).cloned().collect();
                pointed_dim > 0 && rank_of(&tight, rank) + 1 + lineality.rows() == h.dim
            })
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let cone = Cone {
            rank,
            rays,
            lineality,
            facets: h.facets,
            perp: h.perp,
            dim: h.dim,
            side,
        };
        cone.validate()?;
        Ok(cone)
    }

    /// Cross-checks the two descriptions.
    pub fn validate(&self) -> Result<(), ConeError> {
        for r in self.rays.iter().chain(&self.lineality.row_vecs()) {
            if !self.perp.mul_vec(r).iter().all(Zero::is_zero) {
                return Err(ConeError::Inconsistent("generator outside the span".into()));
            }
            if self.facets.iter().any(|u| dot(u, r).is_negative()) {
                return Err(ConeError::Inconsistent("generator violates a facet".into()));
            }
        }
        for u in &self.facets {
            let mut tight: Vec<IntVec> = self.rays.iter().filter(|r| dot(u, r).is_zero()).cloned().collect();
            tight.extend(self.lineality.row_vecs());
            if rank_of(&tight, self.rank) + 1 != self.dim {
                return Err(ConeError::Inconsistent(
                    "facet is not tight on a codimension-one face".into(),
                ));
            }
        }
        if self.perp.rows() + self.dim != self.rank {
            return Err(ConeError::Inconsistent("dim σ + rank σ⊥ ≠ n".into()));
        }
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Primitive generators of the extreme rays, sorted.
    pub fn rays(&self) -> &[IntVec] {
        &self.rays
    }

    /// Primitive inward facet normals, sorted.
    pub fn facets(&self) -> &[IntVec] {
        &self.facets
    }

    /// Basis of the largest lattice contained in the cone.
    pub fn lineality(&self) -> &IntMatrix {
        &self.lineality
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn side(&self) -> ConeSide {
        self.side
    }

    pub fn is_pointed(&self) -> bool {
        self.lineality.rows() == 0
    }

    pub fn is_zero(&self) -> bool {
        self.dim == 0
    }

    /// Generators of `σ⊥ ∩ M`, in Hermite normal form.
    pub fn perp_lattice(&self) -> &IntMatrix {
        &self.perp
    }

    /// `M_σ = M / (σ⊥ ∩ M)`, free of rank `dim σ`.
    pub fn m_sigma(&self) -> QuotientLattice {
        QuotientLattice::new(self.rank, &self.perp).expect("perp has ambient width")
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        v.len() == self.rank
            && self.perp.mul_vec(v).iter().all(Zero::is_zero)
            && self.facets.iter().all(|u| !dot(u, v).is_negative())
    }

    /// Whether `v` lies in the relative interior.
    pub fn contains_in_interior(&self, v: &[BigInt]) -> bool {
        self.contains(v) && self.facets.iter().all(|u| dot(u, v).is_positive())
    }

    pub fn is_simplicial(&self) -> bool {
        self.is_pointed() && self.rays.len() == self.dim
    }

    /// Smooth iff the rays are part of a ℤ-basis.
    pub fn is_smooth(&self) -> bool {
        if !self.is_simplicial() {
            return false;
        }
        let s = snf_full(&IntMatrix::from_rows(self.rank, &self.rays));
        s.diagonal().iter().all(One::is_one)
    }

    /// `{u : u(v) ≥ 0 for all v ∈ σ}` in the dual lattice.
    pub fn dual(&self) -> Cone {
        let mut all = self.facets.clone();
        for p in self.perp.row_vecs() {
            all.push(vec_neg(&p));
            all.push(p);
        }
        let h = hull(self.rank, &all);
        let cone = Cone {
            rank: self.rank,
            rays: self.facets.clone(),
            lineality: self.perp.clone(),
            facets: h.facets,
            perp: h.perp,
            dim: h.dim,
            side: self.side.flip(),
        };
        debug_assert!(cone.validate().is_ok());
        cone
    }

    /// Rays of `self` tight on every normal in `normals`.
    fn tight_rays(&self, normals: &[IntVec]) -> Vec<IntVec> {
        self.rays
            .iter()
            .filter(|r| normals.iter().all(|u| dot(u, r).is_zero()))
            .cloned()
            .collect()
    }

    fn face_from_rays(&self, rays: Vec<IntVec>) -> Cone {
        Self::build(self.rank, rays, self.lineality.clone(), self.side).expect("faces of a valid cone are valid")
    }

    /// All faces, including the cone itself and its minimal face, ordered by
    /// dimension and then by ray list.
    pub fn faces(&self) -> Vec<Cone> {
        let mut seen: BTreeSet<Vec<IntVec>> = BTreeSet::new();
        let mut queue = VecDeque::from([self.rays.clone()]);
        while let Some(rays) = queue.pop_front() {
            if !seen.insert(rays.clone()) {
                continue;
            }
            for u in &self.facets {
                let next: Vec<IntVec> = rays.iter().filter(|r| dot(u, r).is_zero()).cloned().collect();
                if !seen.contains(&next) {
                    queue.push_back(next);
                }
            }
        }
        let mut faces: Vec<Cone> = seen.into_iter().map(|r| self.face_from_rays(r)).collect();
        faces.sort_by(|a, b| (a.dim, &a.rays).cmp(&(b.dim, &b.rays)));
        faces
    }

    /// Whether `self` is a face of `other`.
    pub fn is_face_of(&self, other: &Cone) -> bool {
        if self.rank != other.rank || self.lineality != other.lineality {
            return false;
        }
        if !self.rays.iter().all(|r| other.rays.contains(r)) {
            return false;
        }
        let supporting: Vec<IntVec> = other
            .facets
            .iter()
            .filter(|u| self.rays.iter().all(|r| dot(u, r).is_zero()))
            .cloned()
            .collect();
        other.tight_rays(&supporting) == self.rays
    }

    /// The cone `self ∩ other`, computed from the inequality descriptions.
    pub fn intersection(&self, other: &Cone) -> Result<Cone, ConeError> {
        if self.rank != other.rank {
            return Err(ConeError::LatticeMismatch);
        }
        if !self.is_pointed() || !other.is_pointed() {
            return Err(ConeError::NotStronglyConvex);
        }
        let n = self.rank;
        let ineqs: Vec<IntVec> = self.facets.iter().chain(&other.facets).cloned().collect();
        let eqs = self.perp.stack(&other.perp);
        let mut rays = BTreeSet::new();
        for size in 0..n {
            for subset in (0..ineqs.len()).combinations(size) {
                let tight: Vec<IntVec> = subset.iter().map(|&i| ineqs[i].clone()).collect();
                let k = kernel(&eqs.stack(&IntMatrix::from_rows(n, &tight)));
                if k.rows() != 1 {
                    continue;
                }
                let g = k.row(0).to_vec();
                for cand in [g.clone(), vec_neg(&g)] {
                    if ineqs.iter().all(|u| !dot(u, &cand).is_negative()) {
                        rays.insert(cand);
                    }
                }
            }
        }
        let rays: Vec<IntVec> = rays.into_iter().collect();
        Cone::from_rays(n, &rays)
    }

    /// Absolute value of the determinant of the ray lattice index for a
    /// simplicial cone (its multiplicity); `None` otherwise.
    pub fn multiplicity(&self) -> Option<BigInt> {
        if !self.is_simplicial() {
            return None;
        }
        let s = snf_full(&IntMatrix::from_rows(self.rank, &self.rays));
        Some(s.diagonal().iter().fold(BigInt::one(), |acc, d| acc * d).abs())
    }

    /// Canonical representative of `v` modulo the lineality lattice.
    pub(crate) fn reduce_mod_lineality(&self, v: &[BigInt]) -> IntVec {
        let mut x = v.to_vec();
        for r in 0..self.lineality.rows() {
            let row = self.lineality.row(r);
            let Some(p) = row.iter().position(|c| !c.is_zero()) else {
                continue;
            };
            let q = x[p].div_floor(&row[p]);
            for (xi, ri) in x.iter_mut().zip(row) {
                *xi -= &q * ri;
            }
        }
        x
    }
}
