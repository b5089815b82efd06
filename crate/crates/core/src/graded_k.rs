//! K₀ of `M`-graded projective modules over `R[A]`, represented by degree data.
//!
//! A graded free module `⊕ R[A][mᵢ]` has class `Σ χ^{[mᵢ]}` in `ℤ[M/U(A)]`.
//! Higher `K_q` are carried only as the formal tensor `K_q(R) ⊗ ℤ[M/U(A)]`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::One;
use thiserror::Error;

use crate::cone::Cone;
use crate::group_ring::{AlgebraError, GroupRingElement};
use crate::lattice::{canonical_surjection, vec_sub, IntVec, QuotientLattice};
use crate::monoid::AffineMonoid;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KTheoryError {
    #[error("coefficient ring {0} does not have K₀ ≅ ℤ via rank")]
    CoefficientNotRankOne(String),
    #[error("source monoid is not contained in the target monoid")]
    NotASubmonoid,
    #[error("classes are over different monoids")]
    MonoidMismatch,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// The coefficient ring `R`, known only by name.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CoefficientSpec {
    pub name: String,
    /// Whether `K₀(R) ≅ ℤ` via rank (fields, PIDs, local rings).
    pub k0_rank_one: bool,
}

impl CoefficientSpec {
    pub fn rank_one(name: impl Into<String>) -> Self {
        CoefficientSpec {
            name: name.into(),
            k0_rank_one: true,
        }
    }

    pub fn symbolic(name: impl Into<String>) -> Self {
        CoefficientSpec {
            name: name.into(),
            k0_rank_one: false,
        }
    }
}

impl Default for CoefficientSpec {
    fn default() -> Self {
        Self::rank_one("k")
    }
}

/// The formal group `K_q(R) ⊗ ℤ[Q]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorStatement {
    pub q: usize,
    pub coeff: CoefficientSpec,
    pub group: Arc<QuotientLattice>,
}

impl fmt::Display for TensorStatement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "K_{}({}) ⊗ {}",
            self.q,
            self.coeff.name,
            group_ring_name(&self.group)
        )
    }
}

/// `ℤ[Q]` written out, with `ℤ[0] = ℤ`.
pub fn group_ring_name(q: &QuotientLattice) -> String {
    if q.dim() == 0 {
        "ℤ".to_string()
    } else {
        format!("ℤ[{}]", q.describe())
    }
}

/// Shifts `m` of summands `R[A][m]` of a graded free module.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedFreeData {
    monoid: Arc<AffineMonoid>,
    shifts: Vec<IntVec>,
}

impl GradedFreeData {
    pub fn new(monoid: &Arc<AffineMonoid>, shifts: Vec<IntVec>) -> Result<Self, KTheoryError> {
        for s in &shifts {
            if s.len() != monoid.rank() {
                return Err(AlgebraError::DimensionMismatch {
                    expected: monoid.rank(),
                    got: s.len(),
                }
                .into());
            }
        }
        Ok(GradedFreeData {
            monoid: Arc::clone(monoid),
            shifts,
        })
    }

    pub fn monoid(&self) -> &Arc<AffineMonoid> {
        &self.monoid
    }

    pub fn shifts(&self) -> &[IntVec] {
        &self.shifts
    }

    pub fn direct_sum(&self, other: &GradedFreeData) -> Result<Self, KTheoryError> {
        if self.monoid != other.monoid {
            return Err(KTheoryError::MonoidMismatch);
        }
        let mut shifts = self.shifts.clone();
        shifts.extend(other.shifts.iter().cloned());
        Ok(GradedFreeData {
            monoid: Arc::clone(&self.monoid),
            shifts,
        })
    }
}

/// A class in `K₀(R) ⊗ ℤ[M/U(A)] ≅ ℤ[M/U(A)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct KClass {
    coeff: CoefficientSpec,
    monoid: Arc<AffineMonoid>,
    value: GroupRingElement,
}

impl KClass {
    pub fn coeff(&self) -> &CoefficientSpec {
        &self.coeff
    }

    pub fn monoid(&self) -> &Arc<AffineMonoid> {
        &self.monoid
    }

    pub fn value(&self) -> &GroupRingElement {
        &self.value
    }

    /// Virtual classes have a negative coefficient and come from no module.
    pub fn is_virtual(&self) -> bool {
        !self.value.is_effective()
    }

    pub fn checked_add(&self, other: &KClass) -> Result<KClass, KTheoryError> {
        if self.monoid != other.monoid || self.coeff != other.coeff {
            return Err(KTheoryError::MonoidMismatch);
        }
        Ok(KClass {
            coeff: self.coeff.clone(),
            monoid: Arc::clone(&self.monoid),
            value: self.value.checked_add(&other.value)?,
        })
    }

    pub fn checked_sub(&self, other: &KClass) -> Result<KClass, KTheoryError> {
        self.checked_add(&KClass {
            value: other.value.neg(),
            ..other.clone()
        })
    }

    /// The group `K_q(R) ⊗ ℤ[M/U(A)]` this class lives in at `q = 0`.
    pub fn statement(&self, q: usize) -> TensorStatement {
        TensorStatement {
            q,
            coeff: self.coeff.clone(),
            group: Arc::clone(self.value.group()),
        }
    }
}

impl fmt::Display for KClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Groups shifts by their coset in `M/U(A)`, keeping input order within a part.
pub fn coset_decomposition(shifts: &[IntVec], monoid: &AffineMonoid) -> BTreeMap<IntVec, Vec<IntVec>> {
    let mut parts: BTreeMap<IntVec, Vec<IntVec>> = BTreeMap::new();
    for s in shifts {
        parts.entry(monoid.coset_of(s)).or_default().push(s.clone());
    }
    parts
}

/// `[⊕ R[A][mᵢ]] = Σ χ^{[mᵢ]}`.
pub fn k0_class(data: &GradedFreeData, coeff: &CoefficientSpec) -> Result<KClass, KTheoryError> {
    if !coeff.k0_rank_one {
        return Err(KTheoryError::CoefficientNotRankOne(coeff.name.clone()));
    }
    let group = data.monoid.coset_quotient();
    let mut value = GroupRingElement::zero(group);
    for s in &data.shifts {
        value.add_term(group.project(s), BigInt::one());
    }
    Ok(KClass {
        coeff: coeff.clone(),
        monoid: Arc::clone(&data.monoid),
        value,
    })
}

/// Rank of `Hom(P ⊗ R[A][s], P' ⊗ R[A][s'])` in degree zero: `rank P · rank P'`
/// when `s' − s ∈ A`, and `0` otherwise.
pub fn hom_rank(p_rank: u64, s: &[BigInt], p2_rank: u64, s2: &[BigInt], monoid: &AffineMonoid) -> BigInt {
    if monoid.contains(&vec_sub(s2, s)) {
        BigInt::from(p_rank) * BigInt::from(p2_rank)
    } else {
        BigInt::from(0)
    }
}

/// Extension of scalars `R[A] → R[A']`, i.e. pushforward along `M/U(A) ↠ M/U(A')`.
pub fn extend_scalars_class(x: &KClass, target: &Arc<AffineMonoid>) -> Result<KClass, KTheoryError> {
    if !x.monoid.is_submonoid_of(target) {
        return Err(KTheoryError::NotASubmonoid);
    }
    let phi = canonical_surjection(x.monoid.coset_quotient(), target.coset_quotient())
        .map_err(|_| KTheoryError::NotASubmonoid)?;
    Ok(KClass {
        coeff: x.coeff.clone(),
        monoid: Arc::clone(target),
        value: x.value.pushforward_into(&phi, target.coset_quotient()),
    })
}

/// `K^T_q(U_σ) ≅ K_q(R) ⊗ ℤ[M_σ]`, with no smoothness assumption on `σ`.
#[derive(Debug, Clone)]
pub struct AffineK0 {
    pub cone: Cone,
    pub m_sigma: Arc<QuotientLattice>,
    pub coeff: CoefficientSpec,
}

impl AffineK0 {
    pub fn rank(&self) -> usize {
        self.m_sigma.dim()
    }

    pub fn statement(&self, q: usize) -> TensorStatement {
        TensorStatement {
            q,
            coeff: self.coeff.clone(),
            group: Arc::clone(&self.m_sigma),
        }
    }

    /// `χ^{eᵢ}` for the basis `eᵢ` of `M_σ`.
    pub fn basis_characters(&self) -> Vec<GroupRingElement> {
        (0..self.m_sigma.dim())
            .map(|i| {
                let mut e = vec![BigInt::from(0); self.m_sigma.dim()];
                e[i] = BigInt::one();
                GroupRingElement::monomial(&self.m_sigma, &e, BigInt::one()).expect("valid coordinates")
            })
            .collect()
    }

    /// The class of the structure sheaf twisted by the character `m ∈ M`.
    pub fn character(&self, m: &[BigInt]) -> Result<GroupRingElement, AlgebraError> {
        GroupRingElement::character(&self.m_sigma, m)
    }
}

pub fn k0_affine_toric(sigma: &Cone, coeff: &CoefficientSpec) -> AffineK0 {
    AffineK0 {
        cone: sigma.clone(),
        m_sigma: Arc::new(sigma.m_sigma()),
        coeff: coeff.clone(),
    }
}
