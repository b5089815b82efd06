//! Finitely supported elements of the group ring `ℤ[Q]` of a quotient lattice.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::cone::ConeError;
use crate::lattice::{IntVec, QuotientLattice, QuotientSurjection};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("elements live in different group rings")]
    GroupMismatch,
    #[error("coordinates {0:?} are not normal-form coordinates of the group")]
    InvalidCoordinates(Vec<String>),
    #[error("vector of length {got} in a rank-{expected} lattice")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("Hilbert basis computation supports pointed dimension ≤ {max}, got {got}")]
    UnsupportedRank { max: usize, got: usize },
    #[error(transparent)]
    Cone(#[from] ConeError),
}

/// `Σ cᵢ χ^{qᵢ}` with `qᵢ` in normal-form coordinates and no zero coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct GroupRingElement {
    group: Arc<QuotientLattice>,
    terms: BTreeMap<IntVec, BigInt>,
}

impl GroupRingElement {
    pub fn zero(group: &Arc<QuotientLattice>) -> Self {
        GroupRingElement {
            group: Arc::clone(group),
            terms: BTreeMap::new(),
        }
    }

    /// `χ⁰`.
    pub fn one(group: &Arc<QuotientLattice>) -> Self {
        Self::constant(group, BigInt::one())
    }

    pub fn constant(group: &Arc<QuotientLattice>, n: BigInt) -> Self {
        let mut x = Self::zero(group);
        x.add_term(group.identity_element(), n);
        x
    }

    /// `coeff · χ^coords`; coordinates are reduced into normal form.
    pub fn monomial(group: &Arc<QuotientLattice>, coords: &[BigInt], coeff: BigInt) -> Result<Self, AlgebraError> {
        let mut x = Self::zero(group);
        x.add_term(x.checked_key(coords)?, coeff);
        Ok(x)
    }

    /// `χ^{[m]}` for an ambient lattice vector `m`.
    pub fn character(group: &Arc<QuotientLattice>, m: &[BigInt]) -> Result<Self, AlgebraError> {
        if m.len() != group.ambient_rank() {
            return Err(AlgebraError::DimensionMismatch {
                expected: group.ambient_rank(),
                got: m.len(),
            });
        }
        let mut x = Self::zero(group);
        x.add_term(group.project(m), BigInt::one());
        Ok(x)
    }

    pub fn from_terms(
        group: &Arc<QuotientLattice>,
        terms: impl IntoIterator<Item = (IntVec, BigInt)>,
    ) -> Result<Self, AlgebraError> {
        let mut x = Self::zero(group);
        for (k, c) in terms {
            let k = x.checked_key(&k)?;
            x.add_term(k, c);
        }
        Ok(x)
    }

    fn checked_key(&self, coords: &[BigInt]) -> Result<IntVec, AlgebraError> {
        if coords.len() != self.group.dim() {
            return Err(AlgebraError::InvalidCoordinates(
                coords.iter().map(ToString::to_string).collect(),
            ));
        }
        let mut k = coords.to_vec();
        self.group.normalize(&mut k);
        Ok(k)
    }

    /// Adds `coeff · χ^key`; `key` must already be normalized.
    pub(crate) fn add_term(&mut self, key: IntVec, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(key);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn group(&self) -> &Arc<QuotientLattice> {
        &self.group
    }

    pub fn terms(&self) -> &BTreeMap<IntVec, BigInt> {
        &self.terms
    }

    pub fn coeff(&self, key: &[BigInt]) -> BigInt {
        self.terms.get(key).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Whether all coefficients are nonnegative.
    pub fn is_effective(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }

    fn same_group(&self, other: &Self) -> Result<(), AlgebraError> {
        if Arc::ptr_eq(&self.group, &other.group) || self.group == other.group {
            Ok(())
        } else {
            Err(AlgebraError::GroupMismatch)
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.same_group(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.checked_add(&other.neg())
    }

    /// Convolution: `χ^a · χ^b = χ^{a+b}`.
    pub fn checked_mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.same_group(other)?;
        let mut out = Self::zero(&self.group);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_term(self.group.add(a, b), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        self.scale(&-BigInt::one())
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return Self::zero(&self.group);
        }
        GroupRingElement {
            group: Arc::clone(&self.group),
            terms: self.terms.iter().map(|(key, c)| (key.clone(), c * k)).collect(),
        }
    }

    /// The ring map `ℤ[Q] → ℤ` summing coefficients.
    pub fn augmentation(&self) -> BigInt {
        self.terms.values().sum()
    }

    /// Linear extension of `χ^q ↦ χ^{φ(q)}`.
    pub fn pushforward(&self, phi: &QuotientSurjection) -> Result<Self, AlgebraError> {
        if phi.source() != self.group.as_ref() {
            return Err(AlgebraError::GroupMismatch);
        }
        let target = Arc::new(phi.target().clone());
        Ok(self.pushforward_into(phi, &target))
    }

    /// Pushforward reusing an already shared target group.
    pub(crate) fn pushforward_into(&self, phi: &QuotientSurjection, target: &Arc<QuotientLattice>) -> Self {
        let mut out = Self::zero(target);
        for (k, c) in &self.terms {
            out.add_term(phi.apply(k), c.clone());
        }
        out
    }
}

fn fmt_monomial(key: &[BigInt]) -> String {
    match key.len() {
        0 => String::new(),
        1 => format!("χ^{}", key[0]),
        _ => {
            let parts: Vec<String> = key.iter().map(ToString::to_string).collect();
            format!("χ^({})", parts.join(","))
        }
    }
}

impl fmt::Display for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, c)) in self.terms.iter().enumerate() {
            let mono = fmt_monomial(k);
            let mag = c.abs();
            let body = match (mono.is_empty(), mag.is_one()) {
                (true, _) => mag.to_string(),
                (false, true) => mono,
                (false, false) => format!("{mag}{mono}"),
            };
            match (i, c.is_negative()) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in ℤ[{}]", self, self.group.describe())
    }
}
