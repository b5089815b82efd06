//! Exact computations with equivariant K₀ of affine and smooth toric varieties.
//!
//! The building blocks are integer lattices and their quotients
//! ([`lattice`]), cones and fans ([`cone`], [`fan`]), affine monoids and group
//! rings ([`monoid`], [`group_ring`]), K-classes of graded free modules
//! ([`graded_k`]), the sheaf `σ ↦ ℤ[M_σ]` on a fan ([`sheaf`]) and its Čech
//! complex ([`cech`]).

pub mod cech;
pub mod cone;
pub mod corpus;
pub mod fan;
pub mod graded_k;
pub mod group_ring;
pub mod lattice;
pub mod monoid;
pub mod sheaf;

pub use cech::{CechComplex, CechError, Cochain, ExactnessOutcome, ExactnessReport, H0};
pub use cone::{Cone, ConeError, ConeSide};
pub use fan::{Fan, FanCone, FanError, Subfan};
pub use graded_k::{
    coset_decomposition, extend_scalars_class, hom_rank, k0_affine_toric, k0_class, AffineK0, CoefficientSpec,
    GradedFreeData, KClass, KTheoryError, TensorStatement,
};
pub use group_ring::{AlgebraError, GroupRingElement};
pub use lattice::{
    canonical_surjection, hnf, kernel, snf, solve, IntMatrix, IntVec, LatticeError, QuotientLattice, QuotientSurjection,
};
pub use monoid::{hilbert_basis, AffineMonoid};
pub use sheaf::{FanSheaf, FlasqueOutcome, FlasqueReport, Section, SheafError};
