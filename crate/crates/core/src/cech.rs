//! The Čech complex of `𝒜₀` for the cover of a fan by its maximal cones.
//!
//! Level `p` has one slot per strictly increasing `(p+1)`-tuple of positions
//! in the fixed order of maximal cones; the slot carries `ℤ[M_τ]` for the
//! intersection cone `τ`. The differential uses alternating signs:
//! `(dc)_T = Σ_j (−1)^j res(c_{T∖i_j})`.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::fan::{Fan, Subfan};
use crate::group_ring::GroupRingElement;
use crate::lattice::{kernel, IntVec, SparseSystem};
use crate::sheaf::{FanSheaf, Section, Supports};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CechError {
    #[error("level {level} has no differential; the top level is {top}")]
    LevelOverflow { level: usize, top: usize },
    #[error("level {0} does not exist")]
    NoSuchLevel(usize),
    #[error("{0:?} is not a slot of the requested level")]
    UnknownSlot(Vec<usize>),
    #[error("component at {0:?} is not over the stalk of its intersection cone")]
    WrongStalk(Vec<usize>),
    #[error("cochain is not a cocycle")]
    NotACocycle,
    #[error("the fan has a non-smooth cone")]
    NotSmoothFan,
    #[error("no preimage found on supports of sizes {support_sizes:?}")]
    SolverGaveUp { support_sizes: Vec<usize> },
}

/// A `(p+1)`-fold intersection of maximal cones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slot {
    /// Strictly increasing positions in `Fan::max_cones`.
    pub tuple: Vec<usize>,
    /// Fan index of the intersection cone.
    pub cone: usize,
}

#[derive(Debug, Clone)]
pub struct CechComplex {
    sheaf: FanSheaf,
    levels: Vec<Vec<Slot>>,
    index: Vec<BTreeMap<Vec<usize>, usize>>,
    /// `cofaces[p][s]` lists `(t, sign)` for slots `t` of level `p+1` containing slot `s`.
    cofaces: Vec<Vec<Vec<(usize, bool)>>>,
}

/// A finitely supported cochain; zero components are not stored.
#[derive(Debug, Clone, PartialEq)]
pub struct Cochain {
    level: usize,
    components: BTreeMap<Vec<usize>, GroupRingElement>,
}

impl Cochain {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn components(&self) -> &BTreeMap<Vec<usize>, GroupRingElement> {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    /// Total number of monomials.
    pub fn support_size(&self) -> usize {
        self.components.values().map(GroupRingElement::len).sum()
    }
}

impl CechComplex {
    pub fn build(fan: &Arc<Fan>) -> CechComplex {
        let sheaf = FanSheaf::a0(fan);
        let maxes = fan.max_cones();
        let n = maxes.len();
        let mut levels: Vec<Vec<Slot>> = Vec::new();
        let mut index: Vec<BTreeMap<Vec<usize>, usize>> = Vec::new();
        for p in 0..n {
            let slots: Vec<Slot> = (0..n)
                .combinations(p + 1)
                .map(|tuple| {
                    let ids: Vec<usize> = tuple.iter().map(|&i| maxes[i]).collect();
                    Slot {
                        cone: fan.meet_all(&ids),
                        tuple,
                    }
                })
                .collect();
            index.push(slots.iter().enumerate().map(|(i, s)| (s.tuple.clone(), i)).collect());
            levels.push(slots);
        }
        let mut cofaces: Vec<Vec<Vec<(usize, bool)>>> = levels.iter().map(|l| vec![Vec::new(); l.len()]).collect();
        for p in 1..levels.len() {
            for (t, slot) in levels[p].iter().enumerate() {
                for j in 0..slot.tuple.len() {
                    let mut face = slot.tuple.clone();
                    face.remove(j);
                    let s: usize = index[p - 1][&face];
                    cofaces[p - 1][s].push((t, j % 2 == 1));
                }
            }
        }
        CechComplex {
            sheaf,
            levels,
            index,
            cofaces,
        }
    }

    pub fn sheaf(&self) -> &FanSheaf {
        &self.sheaf
    }

    pub fn fan(&self) -> &Arc<Fan> {
        self.sheaf.fan()
    }

    /// Highest level, `#Max − 1`.
    pub fn top_level(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn slots(&self, level: usize) -> &[Slot] {
        self.levels.get(level).map_or(&[], Vec::as_slice)
    }

    /// Stalk group over a slot of the given level.
    pub fn stalk_of(&self, level: usize, tuple: &[usize]) -> Option<&Arc<crate::lattice::QuotientLattice>> {
        let s = self.index.get(level)?.get(tuple)?;
        Some(self.sheaf.stalk(self.levels[level][*s].cone))
    }

    pub fn zero(&self, level: usize) -> Cochain {
        Cochain {
            level,
            components: BTreeMap::new(),
        }
    }

    pub fn cochain(
        &self,
        level: usize,
        components: BTreeMap<Vec<usize>, GroupRingElement>,
    ) -> Result<Cochain, CechError> {
        if level >= self.levels.len() {
            return Err(CechError::NoSuchLevel(level));
        }
        let mut out = BTreeMap::new();
        for (t, x) in components {
            let Some(&s) = self.index[level].get(&t) else {
                return Err(CechError::UnknownSlot(t));
            };
            if **x.group() != **self.sheaf.stalk(self.levels[level][s].cone) {
                return Err(CechError::WrongStalk(t));
            }
            if !x.is_zero() {
                out.insert(t, x);
            }
        }
        Ok(Cochain { level, components: out })
    }

    /// The Čech differential.
    pub fn d(&self, c: &Cochain) -> Result<Cochain, CechError> {
        let p = c.level;
        if p >= self.top_level() {
            return Err(CechError::LevelOverflow {
                level: p,
                top: self.top_level(),
            });
        }
        let mut acc: BTreeMap<usize, GroupRingElement> = BTreeMap::new();
        for (tuple, x) in &c.components {
            let s = self.index[p][tuple];
            let src = self.levels[p][s].cone;
            for &(t, negative) in &self.cofaces[p][s] {
                let dst = self.levels[p + 1][t].cone;
                let mut img = self.sheaf.restrict_element(x, dst, src);
                if negative {
                    img = img.neg();
                }
                let entry = acc
                    .entry(t)
                    .or_insert_with(|| GroupRingElement::zero(self.sheaf.stalk(dst)));
                *entry = entry.checked_add(&img).expect("same stalk");
            }
        }
        let components = acc
            .into_iter()
            .filter(|(_, x)| !x.is_zero())
            .map(|(t, x)| (self.levels[p + 1][t].tuple.clone(), x))
            .collect();
        Ok(Cochain {
            level: p + 1,
            components,
        })
    }

    pub fn is_cocycle(&self, c: &Cochain) -> bool {
        c.level >= self.top_level() || self.d(c).is_ok_and(|dc| dc.is_zero())
    }

    /// Finds `b` with `d(b) = z` for a cocycle `z` of level `≥ 1`.
    ///
    /// Candidate supports start from the monomials of `z` and are closed under
    /// restriction and splitting for up to `depth` rounds, with one exact
    /// integer solve per round. The result is re-verified.
    pub fn solve_coboundary(&self, z: &Cochain, depth: usize, allow_nonsmooth: bool) -> Result<Cochain, CechError> {
        if z.level == 0 || z.level > self.top_level() {
            return Err(CechError::NoSuchLevel(z.level));
        }
        if !allow_nonsmooth && !self.fan().is_smooth() {
            return Err(CechError::NotSmoothFan);
        }
        if !self.is_cocycle(z) {
            return Err(CechError::NotACocycle);
        }
        if z.is_zero() {
            return Ok(self.zero(z.level - 1));
        }
        let mut supports = self.sheaf.empty_supports();
        for (t, x) in &z.components {
            let cone = self.levels[z.level][self.index[z.level][t]].cone;
            supports[cone].extend(x.terms().keys().cloned());
        }
        let mut sizes = Vec::new();
        for _ in 0..depth.max(1) {
            self.sheaf.close_supports(&mut supports);
            sizes.push(supports.iter().map(BTreeSet::len).sum());
            if let Some(b) = self.try_preimage(z, &supports) {
                return Ok(b);
            }
        }
        Err(CechError::SolverGaveUp { support_sizes: sizes })
    }

    fn try_preimage(&self, z: &Cochain, supports: &Supports) -> Option<Cochain> {
        let p = z.level - 1;
        let mut sys: SparseSystem<(usize, IntVec)> = SparseSystem::new();
        let mut cols: Vec<(usize, IntVec)> = Vec::new();
        for (s, slot) in self.levels[p].iter().enumerate() {
            for key in &supports[slot.cone] {
                let entries: Vec<((usize, IntVec), BigInt)> = self.cofaces[p][s]
                    .iter()
                    .map(|&(t, negative)| {
                        let dst = self.levels[p + 1][t].cone;
                        let img = self.sheaf.restriction(dst, slot.cone).expect("face").apply(key);
                        let sign = if negative { -BigInt::one() } else { BigInt::one() };
                        ((t, img), sign)
                    })
                    .collect();
                sys.push_column(entries);
                cols.push((s, key.clone()));
            }
        }
        let target: Vec<((usize, IntVec), BigInt)> = z
            .components
            .iter()
            .flat_map(|(t, x)| {
                let ti = self.index[z.level][t];
                x.terms().iter().map(move |(k, c)| ((ti, k.clone()), c.clone()))
            })
            .collect();
        let sol = sys.solve(target).ok()?;
        let b = self.assemble(p, cols, sol);
        (self.d(&b).ok()? == *z).then_some(b)
    }

    fn assemble(&self, level: usize, cols: Vec<(usize, IntVec)>, coeffs: Vec<BigInt>) -> Cochain {
        let mut comps: BTreeMap<Vec<usize>, GroupRingElement> = BTreeMap::new();
        for ((s, key), c) in cols.into_iter().zip(coeffs) {
            if c.is_zero() {
                continue;
            }
            let slot = &self.levels[level][s];
            comps
                .entry(slot.tuple.clone())
                .or_insert_with(|| GroupRingElement::zero(self.sheaf.stalk(slot.cone)))
                .add_term(key, c);
        }
        comps.retain(|_, x| !x.is_zero());
        Cochain {
            level,
            components: comps,
        }
    }

    fn random_supports(&self, level: usize, rng: &mut ChaCha8Rng) -> Supports {
        let mut supports = self.sheaf.empty_supports();
        let slots = &self.levels[level];
        let forced = rng.random_range(0..slots.len());
        for (i, slot) in slots.iter().enumerate() {
            if i != forced && !rng.random_bool(0.5) {
                continue;
            }
            let dim = self.sheaf.stalk(slot.cone).dim();
            for _ in 0..rng.random_range(1..=3) {
                supports[slot.cone].insert((0..dim).map(|_| BigInt::from(rng.random_range(-3..=3))).collect());
            }
        }
        supports
    }

    /// A cochain with random coefficients in `[−5, 5]` on random monomials.
    pub fn random_cochain(&self, level: usize, rng: &mut ChaCha8Rng) -> Cochain {
        let supports = self.random_supports(level, rng);
        let mut cols = Vec::new();
        let mut coeffs = Vec::new();
        for (s, slot) in self.levels[level].iter().enumerate() {
            for key in &supports[slot.cone] {
                cols.push((s, key.clone()));
                coeffs.push(BigInt::from(rng.random_range(-5..=5)));
            }
        }
        self.assemble(level, cols, coeffs)
    }

    /// A random cocycle: random supports are closed under the sheaf maps, the
    /// kernel of `d` on cochains supported there is computed exactly, and a
    /// combination with coefficients in `[−5, 5]` is returned.
    pub fn random_cocycle(&self, level: usize, rng: &mut ChaCha8Rng) -> Cochain {
        let mut supports = self.random_supports(level, rng);
        self.sheaf.close_supports(&mut supports);
        let mut sys: SparseSystem<(usize, IntVec)> = SparseSystem::new();
        let mut cols = Vec::new();
        for (s, slot) in self.levels[level].iter().enumerate() {
            for key in &supports[slot.cone] {
                let entries: Vec<((usize, IntVec), BigInt)> = if level < self.top_level() {
                    self.cofaces[level][s]
                        .iter()
                        .map(|&(t, negative)| {
                            let dst = self.levels[level + 1][t].cone;
                            let img = self.sheaf.restriction(dst, slot.cone).expect("face").apply(key);
                            ((t, img), if negative { -BigInt::one() } else { BigInt::one() })
                        })
                        .collect()
                } else {
                    Vec::new()
                };
                sys.push_column(entries);
                cols.push((s, key.clone()));
            }
        }
        let (_, a) = sys.matrix();
        let basis = kernel(&a);
        let mut coeffs = vec![BigInt::zero(); cols.len()];
        for b in basis.row_vecs() {
            let t = BigInt::from(rng.random_range(-5..=5));
            for (c, bi) in coeffs.iter_mut().zip(&b) {
                *c += &t * bi;
            }
        }
        self.assemble(level, cols, coeffs)
    }

    /// Solves `trials` random level-`level` cocycles and re-verifies every witness.
    pub fn verify_exactness(
        &self,
        level: usize,
        trials: usize,
        depth: usize,
        seed: u64,
        allow_nonsmooth: bool,
    ) -> Result<ExactnessReport, CechError> {
        if !allow_nonsmooth && !self.fan().is_smooth() {
            return Err(CechError::NotSmoothFan);
        }
        if level == 0 || level > self.top_level() {
            return Err(CechError::NoSuchLevel(level));
        }
        let mut report = ExactnessReport {
            level,
            d_squared_zero: true,
            ..ExactnessReport::default()
        };
        for trial in 0..trials {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(((level as u64) << 32) | trial as u64);
            let z = self.random_cocycle(level, &mut rng);
            if level < self.top_level() && !self.d(&z).is_ok_and(|dz| dz.is_zero()) {
                report.d_squared_zero = false;
            }
            let outcome = match self.solve_coboundary(&z, depth, allow_nonsmooth) {
                Ok(b) => {
                    let verified = self.d(&b).as_ref() == Ok(&z);
                    if verified {
                        report.solved += 1;
                    } else {
                        report.failed += 1;
                    }
                    if level < self.top_level() && !self.d(&b).and_then(|db| self.d(&db)).is_ok_and(|x| x.is_zero()) {
                        report.d_squared_zero = false;
                    }
                    ExactnessOutcome::Solved { preimage: b, verified }
                }
                Err(CechError::SolverGaveUp { support_sizes }) => {
                    report.gave_up += 1;
                    ExactnessOutcome::GaveUp { support_sizes }
                }
                Err(e) => return Err(e),
            };
            report.trials.push(ExactnessTrial { cocycle: z, outcome });
        }
        Ok(report)
    }

    /// `Ȟ⁰`, realised as the level-0 cocycles.
    pub fn h0(&self) -> H0<'_> {
        H0 { complex: self }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExactnessOutcome {
    Solved { preimage: Cochain, verified: bool },
    GaveUp { support_sizes: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactnessTrial {
    pub cocycle: Cochain,
    pub outcome: ExactnessOutcome,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExactnessReport {
    pub level: usize,
    pub solved: usize,
    pub gave_up: usize,
    pub failed: usize,
    pub d_squared_zero: bool,
    pub trials: Vec<ExactnessTrial>,
}

/// Membership and ring operations on `Ȟ⁰ = ker(d₀)`, which is `K₀ᵀ(X)` for smooth fans.
#[derive(Debug, Clone, Copy)]
pub struct H0<'a> {
    complex: &'a CechComplex,
}

impl H0<'_> {
    fn stalk(&self, i: usize) -> &Arc<crate::lattice::QuotientLattice> {
        self.complex.stalk_of(0, &[i]).expect("level 0 slot")
    }

    fn count(&self) -> usize {
        self.complex.slots(0).len()
    }

    /// Assembles a 0-cochain from one element per maximal cone, in order.
    pub fn tuple(&self, parts: Vec<GroupRingElement>) -> Result<Cochain, CechError> {
        let comps = parts.into_iter().enumerate().map(|(i, x)| (vec![i], x)).collect();
        self.complex.cochain(0, comps)
    }

    /// The component on the `i`-th maximal cone.
    pub fn component(&self, c: &Cochain, i: usize) -> GroupRingElement {
        c.components
            .get(&vec![i])
            .cloned()
            .unwrap_or_else(|| GroupRingElement::zero(self.stalk(i)))
    }

    pub fn contains(&self, c: &Cochain) -> bool {
        c.level == 0 && self.complex.is_cocycle(c)
    }

    /// First pair of maximal-cone positions whose components disagree.
    pub fn witness(&self, c: &Cochain) -> Option<(usize, usize)> {
        let dc = self.complex.d(c).ok()?;
        dc.components.keys().next().map(|t| (t[0], t[1]))
    }

    pub fn unit(&self) -> Cochain {
        let parts = (0..self.count())
            .map(|i| GroupRingElement::one(self.stalk(i)))
            .collect();
        self.tuple(parts).expect("valid slots")
    }

    /// `(χ^{[m]_σ})_σ` for `m ∈ M`.
    pub fn character_tuple(&self, m: &[BigInt]) -> Result<Cochain, CechError> {
        let mut parts = Vec::new();
        for i in 0..self.count() {
            parts.push(GroupRingElement::character(self.stalk(i), m).map_err(|_| CechError::WrongStalk(vec![i]))?);
        }
        self.tuple(parts)
    }

    pub fn add(&self, a: &Cochain, b: &Cochain) -> Cochain {
        self.combine(a, b, |x, y| x.checked_add(y))
    }

    pub fn mul(&self, a: &Cochain, b: &Cochain) -> Cochain {
        self.combine(a, b, |x, y| x.checked_mul(y))
    }

    fn combine(
        &self,
        a: &Cochain,
        b: &Cochain,
        op: impl Fn(&GroupRingElement, &GroupRingElement) -> Result<GroupRingElement, crate::group_ring::AlgebraError>,
    ) -> Cochain {
        let parts = (0..self.count())
            .map(|i| op(&self.component(a, i), &self.component(b, i)).expect("same stalk"))
            .collect();
        self.tuple(parts).expect("valid slots")
    }

    /// Restriction `Ȟ⁰ → ℤ[M_σ]` to the `i`-th affine piece.
    pub fn restrict(&self, c: &Cochain, i: usize) -> GroupRingElement {
        self.component(c, i)
    }

    /// The same data as a global section of the sheaf.
    pub fn to_section(&self, c: &Cochain) -> Section {
        let fan = self.complex.fan();
        let comps = (0..self.count())
            .map(|i| (fan.max_cones()[i], self.component(c, i)))
            .collect();
        self.complex
            .sheaf
            .section(&Subfan::whole(fan), comps)
            .expect("components on every maximal cone")
    }
}
