//! The sheaf `𝒜₀ : σ ↦ ℤ[M_σ]` on the poset topology of a fan, its sections
//! and the extension solver.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::fan::{Fan, FanError, Subfan};
use crate::group_ring::GroupRingElement;
use crate::lattice::{
    canonical_surjection, kernel, solve, IntMatrix, IntVec, QuotientLattice, QuotientSurjection, SparseSystem,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SheafError {
    #[error("domain is not a subfan")]
    DomainNotOpen,
    #[error("cone {0} is not in the fan")]
    ConeNotInFan(usize),
    #[error("no component given for maximal cone {0} of the domain")]
    MissingComponent(usize),
    #[error("component given for cone {0}, which is not a maximal cone of the domain")]
    UnexpectedComponent(usize),
    #[error("component on cone {0} is not an element of ℤ[M_σ]")]
    WrongStalk(usize),
    #[error("target domain is not contained in the section's domain")]
    NotASubdomain,
    #[error("section is not compatible on the common face of cones {0} and {1}")]
    Incompatible(usize, usize),
    #[error("the fan has a non-smooth cone")]
    NotSmoothFan,
    #[error("no solution found on supports of sizes {support_sizes:?}")]
    SolverGaveUp { support_sizes: Vec<usize> },
}

impl From<FanError> for SheafError {
    fn from(e: FanError) -> Self {
        match e {
            FanError::ConeNotInFan => SheafError::ConeNotInFan(usize::MAX),
            _ => SheafError::DomainNotOpen,
        }
    }
}

/// Finite subsets of each stalk group, indexed by cone.
pub type Supports = Vec<BTreeSet<IntVec>>;

/// The sheaf associated to the functor `σ ↦ ℤ[M_σ]` with the canonical
/// surjections as restriction maps.
///
/// On smooth cones the splittings of `M_σ ↠ M_τ` are the ray-adapted ones:
/// a character of `τ` is extended by pairing to zero with the rays of `σ`
/// outside `τ`. These splittings compose, which keeps the solver supports small.
#[derive(Debug, Clone)]
pub struct FanSheaf {
    fan: Arc<Fan>,
    stalks: Vec<Arc<QuotientLattice>>,
    restrictions: BTreeMap<(usize, usize), QuotientSurjection>,
}

impl FanSheaf {
    pub fn a0(fan: &Arc<Fan>) -> FanSheaf {
        let stalks: Vec<Arc<QuotientLattice>> = fan.cones().iter().map(|c| Arc::new(c.cone.m_sigma())).collect();
        // ray functionals in M_σ coordinates
        let pairings: Vec<IntMatrix> = fan
            .cones()
            .iter()
            .zip(&stalks)
            .map(|(c, q)| {
                let rays: Vec<IntVec> = c.ray_ids.iter().map(|&r| fan.rays()[r].clone()).collect();
                IntMatrix::from_rows(fan.rank(), &rays).mul(q.lift_matrix())
            })
            .collect();
        let mut restrictions = BTreeMap::new();
        for sigma in 0..fan.len() {
            for &tau in fan.faces_of(sigma) {
                let phi = canonical_surjection(&stalks[sigma], &stalks[tau]).expect("faces have larger perp");
                let phi = if fan.cone(sigma).is_smooth() {
                    let s = ray_adapted_splitting(fan, sigma, tau, &pairings);
                    phi.with_splitting(s).expect("ray-adapted splitting is a right inverse")
                } else {
                    phi
                };
                restrictions.insert((tau, sigma), phi);
            }
        }
        FanSheaf {
            fan: Arc::clone(fan),
            stalks,
            restrictions,
        }
    }

    pub fn fan(&self) -> &Arc<Fan> {
        &self.fan
    }

    pub fn stalk(&self, cone: usize) -> &Arc<QuotientLattice> {
        &self.stalks[cone]
    }

    /// The restriction `ℤ[M_σ] → ℤ[M_τ]` for `τ ≺ σ`.
    pub fn restriction(&self, tau: usize, sigma: usize) -> Option<&QuotientSurjection> {
        self.restrictions.get(&(tau, sigma))
    }

    fn res(&self, tau: usize, sigma: usize) -> &QuotientSurjection {
        &self.restrictions[&(tau, sigma)]
    }

    pub fn restrict_element(&self, x: &GroupRingElement, tau: usize, sigma: usize) -> GroupRingElement {
        x.pushforward_into(self.res(tau, sigma), &self.stalks[tau])
    }

    /// Checks `res(ρ≺σ) = res(ρ≺τ)∘res(τ≺σ)` on every chain, and the same for
    /// splittings when all three are present. Returns the first failing chain.
    pub fn check_functoriality(&self) -> Result<(), (usize, usize, usize)> {
        for sigma in 0..self.fan.len() {
            if !self
                .res(sigma, sigma)
                .matrix()
                .eq(&IntMatrix::identity(self.stalks[sigma].dim()))
            {
                return Err((sigma, sigma, sigma));
            }
            for &tau in self.fan.faces_of(sigma) {
                for &rho in self.fan.faces_of(tau) {
                    let outer = self.res(rho, sigma);
                    let (a, b) = (self.res(tau, sigma), self.res(rho, tau));
                    if &b.matrix().mul(a.matrix()) != outer.matrix() {
                        return Err((rho, tau, sigma));
                    }
                    if let (Some(s1), Some(s2), Some(s)) = (a.splitting(), b.splitting(), outer.splitting()) {
                        if &s1.mul(s2) != s {
                            return Err((rho, tau, sigma));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Grows `supports` by restricting every point to all faces and lifting
    /// the results along the splittings to all cofaces. Returns whether
    /// anything was added.
    pub fn close_supports(&self, supports: &mut Supports) -> bool {
        let before: usize = supports.iter().map(BTreeSet::len).sum();
        for sigma in (0..self.fan.len()).rev() {
            let pts: Vec<IntVec> = supports[sigma].iter().cloned().collect();
            for &tau in self.fan.faces_of(sigma) {
                if tau == sigma {
                    continue;
                }
                let phi = self.res(tau, sigma);
                for p in &pts {
                    supports[tau].insert(phi.apply(p));
                }
            }
        }
        for tau in 0..self.fan.len() {
            let pts: Vec<IntVec> = supports[tau].iter().cloned().collect();
            for &sigma in self.fan.cofaces_of(tau) {
                if sigma == tau {
                    continue;
                }
                if let Some(s) = self.res(tau, sigma).splitting() {
                    let src = &self.stalks[sigma];
                    for p in &pts {
                        let mut x = s.mul_vec(p);
                        src.normalize(&mut x);
                        supports[sigma].insert(x);
                    }
                }
            }
        }
        supports.iter().map(BTreeSet::len).sum::<usize>() > before
    }

    pub fn empty_supports(&self) -> Supports {
        vec![BTreeSet::new(); self.fan.len()]
    }

    /// Builds a section from components on the maximal cones of `domain`.
    pub fn section(
        &self,
        domain: &Subfan,
        components: BTreeMap<usize, GroupRingElement>,
    ) -> Result<Section, SheafError> {
        if Subfan::new(&self.fan, domain.members().iter().copied()).is_err() {
            return Err(SheafError::DomainNotOpen);
        }
        let maxes = domain.max_cones(&self.fan);
        for &m in &maxes {
            match components.get(&m) {
                None => return Err(SheafError::MissingComponent(m)),
                Some(x) if x.group() != &self.stalks[m] && **x.group() != *self.stalks[m] => {
                    return Err(SheafError::WrongStalk(m))
                }
                Some(_) => {}
            }
        }
        if let Some(&extra) = components.keys().find(|k| !maxes.contains(k)) {
            return Err(SheafError::UnexpectedComponent(extra));
        }
        Ok(Section {
            domain: domain.clone(),
            components,
        })
    }

    /// First pair of maximal cones of the domain whose components disagree on
    /// their common face.
    pub fn first_incompatibility(&self, s: &Section) -> Option<(usize, usize)> {
        let maxes: Vec<usize> = s.components.keys().copied().collect();
        for (i, &a) in maxes.iter().enumerate() {
            for &b in &maxes[i + 1..] {
                let meet = self.fan.meet(a, b);
                let fa = self.restrict_element(&s.components[&a], meet, a);
                let fb = self.restrict_element(&s.components[&b], meet, b);
                if fa != fb {
                    return Some((a, b));
                }
            }
        }
        None
    }

    pub fn section_check(&self, s: &Section) -> bool {
        self.first_incompatibility(s).is_none()
    }

    /// The value of a section on any cone of its domain.
    pub fn value_at(&self, s: &Section, cone: usize) -> Result<GroupRingElement, SheafError> {
        if !s.domain.contains(cone) {
            return Err(SheafError::NotASubdomain);
        }
        let (&m, x) = s
            .components
            .iter()
            .find(|(&m, _)| self.fan.is_face(cone, m))
            .expect("every cone of an open set lies in a maximal one");
        Ok(self.restrict_element(x, cone, m))
    }

    pub fn restrict_section(&self, s: &Section, to: &Subfan) -> Result<Section, SheafError> {
        if !to.is_subfan_of(&s.domain) {
            return Err(SheafError::NotASubdomain);
        }
        let mut components = BTreeMap::new();
        for m in to.max_cones(&self.fan) {
            components.insert(m, self.value_at(s, m)?);
        }
        Ok(Section {
            domain: to.clone(),
            components,
        })
    }

    /// Extends a compatible section to the whole fan.
    ///
    /// Unknowns are the components on all maximal cones, supported on the
    /// closure of the input's supports; each closure round is followed by one
    /// exact integer solve. Gives up after `depth` rounds.
    pub fn extend_section(&self, s: &Section, depth: usize, allow_nonsmooth: bool) -> Result<Section, SheafError> {
        if !allow_nonsmooth && !self.fan.is_smooth() {
            return Err(SheafError::NotSmoothFan);
        }
        if let Some((a, b)) = self.first_incompatibility(s) {
            return Err(SheafError::Incompatible(a, b));
        }
        let whole = Subfan::whole(&self.fan);
        if s.domain == whole {
            return Ok(s.clone());
        }
        let mut supports = self.empty_supports();
        for (&m, x) in &s.components {
            supports[m].extend(x.terms().keys().cloned());
        }
        let mut sizes = Vec::new();
        for _ in 0..depth.max(1) {
            self.close_supports(&mut supports);
            sizes.push(supports.iter().map(BTreeSet::len).sum());
            if let Some(ext) = self.try_extend(s, &supports) {
                return Ok(ext);
            }
        }
        Err(SheafError::SolverGaveUp { support_sizes: sizes })
    }

    fn try_extend(&self, s: &Section, supports: &Supports) -> Option<Section> {
        let maxes = self.fan.max_cones().to_vec();
        // rows: (kind, cone pair, key); kind 0 compatibility, 1 agreement with s
        type Row = (u8, usize, usize, IntVec);
        let mut sys: SparseSystem<Row> = SparseSystem::new();
        let mut cols: Vec<(usize, IntVec)> = Vec::new();
        let anchors: Vec<(usize, usize)> = s
            .components
            .keys()
            .map(|&t| {
                (
                    t,
                    *maxes.iter().find(|&&m| self.fan.is_face(t, m)).expect("max cone above"),
                )
            })
            .collect();
        for &sigma in &maxes {
            for key in &supports[sigma] {
                let mut entries: Vec<(Row, BigInt)> = Vec::new();
                for &other in &maxes {
                    if other == sigma {
                        continue;
                    }
                    let meet = self.fan.meet(sigma, other);
                    let img = self.res(meet, sigma).apply(key);
                    let sign = if sigma < other { BigInt::one() } else { -BigInt::one() };
                    entries.push(((0, sigma.min(other), sigma.max(other), img), sign));
                }
                for &(t, m) in &anchors {
                    if m == sigma {
                        entries.push(((1, t, t, self.res(t, sigma).apply(key)), BigInt::one()));
                    }
                }
                sys.push_column(entries);
                cols.push((sigma, key.clone()));
            }
        }
        let target: Vec<(Row, BigInt)> = s
            .components
            .iter()
            .flat_map(|(&t, x)| x.terms().iter().map(move |(k, c)| ((1, t, t, k.clone()), c.clone())))
            .collect();
        let sol = sys.solve(target).ok()?;
        let mut components: BTreeMap<usize, GroupRingElement> = maxes
            .iter()
            .map(|&m| (m, GroupRingElement::zero(&self.stalks[m])))
            .collect();
        for ((sigma, key), c) in cols.into_iter().zip(sol) {
            components.get_mut(&sigma).expect("max cone").add_term(key, c);
        }
        let ext = Section {
            domain: Subfan::whole(&self.fan),
            components,
        };
        let back = self.restrict_section(&ext, &s.domain).ok()?;
        (self.section_check(&ext) && back == *s).then_some(ext)
    }

    /// A random compatible section on `domain`: random points on its maximal
    /// cones are closed under the sheaf maps, and the section is an integer
    /// combination of a kernel basis of the compatibility conditions.
    pub fn random_section(&self, domain: &Subfan, rng: &mut ChaCha8Rng) -> Section {
        let maxes = domain.max_cones(&self.fan);
        let mut supports = self.empty_supports();
        for &m in &maxes {
            let dim = self.stalks[m].dim();
            for _ in 0..rng.random_range(1..=3) {
                supports[m].insert((0..dim).map(|_| BigInt::from(rng.random_range(-3..=3))).collect());
            }
        }
        self.close_supports(&mut supports);
        let mut sys: SparseSystem<(usize, usize, IntVec)> = SparseSystem::new();
        let mut cols: Vec<(usize, IntVec)> = Vec::new();
        for &sigma in &maxes {
            for key in &supports[sigma] {
                let mut entries = Vec::new();
                for &other in &maxes {
                    if other != sigma {
                        let meet = self.fan.meet(sigma, other);
                        let sign = if sigma < other { BigInt::one() } else { -BigInt::one() };
                        let img = self.res(meet, sigma).apply(key);
                        entries.push(((sigma.min(other), sigma.max(other), img), sign));
                    }
                }
                sys.push_column(entries);
                cols.push((sigma, key.clone()));
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
        let mut components: BTreeMap<usize, GroupRingElement> = maxes
            .iter()
            .map(|&m| (m, GroupRingElement::zero(&self.stalks[m])))
            .collect();
        for ((sigma, key), c) in cols.into_iter().zip(coeffs) {
            components.get_mut(&sigma).expect("max cone").add_term(key, c);
        }
        Section {
            domain: domain.clone(),
            components,
        }
    }

    /// Random extension problems on random subfans.
    pub fn verify_flasque(
        &self,
        trials: usize,
        depth: usize,
        seed: u64,
        allow_nonsmooth: bool,
    ) -> Result<FlasqueReport, SheafError> {
        if !allow_nonsmooth && !self.fan.is_smooth() {
            return Err(SheafError::NotSmoothFan);
        }
        let mut report = FlasqueReport::default();
        for trial in 0..trials {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial as u64);
            let mut picked: Vec<usize> = (0..self.fan.len()).filter(|_| rng.random_bool(0.4)).collect();
            if picked.is_empty() {
                picked.push(rng.random_range(0..self.fan.len()));
            }
            let domain = Subfan::closure(&self.fan, picked).expect("indices in range");
            let section = self.random_section(&domain, &mut rng);
            let outcome = match self.extend_section(&section, depth, allow_nonsmooth) {
                Ok(ext) => {
                    let verified = self.section_check(&ext)
                        && self.restrict_section(&ext, &section.domain).as_ref() == Ok(&section);
                    if verified {
                        report.extended += 1;
                    } else {
                        report.failed += 1;
                    }
                    FlasqueOutcome::Extended {
                        extension: ext,
                        verified,
                    }
                }
                Err(SheafError::SolverGaveUp { support_sizes }) => {
                    report.gave_up += 1;
                    FlasqueOutcome::GaveUp { support_sizes }
                }
                Err(e) => return Err(e),
            };
            report.trials.push(FlasqueTrial { section, outcome });
        }
        Ok(report)
    }
}

fn ray_adapted_splitting(fan: &Fan, sigma: usize, tau: usize, pairings: &[IntMatrix]) -> IntMatrix {
    let (s_ids, t_ids) = (&fan.cones()[sigma].ray_ids, &fan.cones()[tau].ray_ids);
    let f_sigma = &pairings[sigma];
    let f_tau = &pairings[tau];
    let cols: Vec<IntVec> = (0..f_tau.cols())
        .map(|j| {
            let b: IntVec = s_ids
                .iter()
                .map(|r| match t_ids.iter().position(|t| t == r) {
                    Some(i) => f_tau.get(i, j).clone(),
                    None => BigInt::zero(),
                })
                .collect();
            solve(f_sigma, &b).expect("smooth cones have unimodular pairings")
        })
        .collect();
    IntMatrix::from_cols(f_sigma.cols(), &cols)
}

/// A compatible family on the maximal cones of an open set.
#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    domain: Subfan,
    components: BTreeMap<usize, GroupRingElement>,
}

impl Section {
    pub fn domain(&self) -> &Subfan {
        &self.domain
    }

    pub fn components(&self) -> &BTreeMap<usize, GroupRingElement> {
        &self.components
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FlasqueOutcome {
    Extended { extension: Section, verified: bool },
    GaveUp { support_sizes: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlasqueTrial {
    pub section: Section,
    pub outcome: FlasqueOutcome,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FlasqueReport {
    pub extended: usize,
    pub gave_up: usize,
    pub failed: usize,
    pub trials: Vec<FlasqueTrial>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{dot, int_vec};
    use num_traits::Signed;

    fn fan(rank: usize, rays: &[&[i64]], max: &[&[usize]]) -> Arc<Fan> {
        let rays: Vec<IntVec> = rays.iter().map(|r| int_vec(r)).collect();
        let max: Vec<Vec<usize>> = max.iter().map(|m| m.to_vec()).collect();
        Arc::new(Fan::from_max_cones(rank, &rays, &max).unwrap())
    }

    fn p1() -> Arc<Fan> {
        fan(1, &[&[1], &[-1]], &[&[0], &[1]])
    }

    fn p2() -> Arc<Fan> {
        fan(2, &[&[1, 0], &[0, 1], &[-1, -1]], &[&[0, 1], &[1, 2], &[2, 0]])
    }

    fn mono(sheaf: &FanSheaf, cone: usize, terms: &[(&[i64], i64)]) -> GroupRingElement {
        GroupRingElement::from_terms(
            sheaf.stalk(cone),
            terms.iter().map(|(k, c)| (int_vec(k), BigInt::from(*c))),
        )
        .unwrap()
    }

    #[test]
    fn p1_stalks() {
        let sh = FanSheaf::a0(&p1());
        let dims: Vec<usize> = (0..3).map(|c| sh.stalk(c).dim()).collect();
        assert_eq!(dims, vec![0, 1, 1]);
        assert!(sh.check_functoriality().is_ok());
    }

    #[test]
    fn functorial_on_p2_and_singular() {
        assert!(FanSheaf::a0(&p2()).check_functoriality().is_ok());
        let sing = fan(2, &[&[1, 0], &[1, 2]], &[&[0, 1]]);
        assert!(FanSheaf::a0(&sing).check_functoriality().is_ok());
    }

    #[test]
    fn ray_adapted_splitting_zero_fills() {
        let f = p2();
        let sh = FanSheaf::a0(&f);
        let sigma = f.find(&[1, 2]).unwrap();
        let tau = f.find(&[2]).unwrap();
        let phi = sh.restriction(tau, sigma).unwrap();
        let lifted = phi.split(&int_vec(&[4])).unwrap();
        let m = sh.stalk(sigma).lift(&lifted);
        let y = sh.stalk(tau).lift(&int_vec(&[4]));
        let (v1, v2) = (int_vec(&[0, 1]), int_vec(&[-1, -1]));
        assert_eq!(dot(&m, &v1), BigInt::zero());
        assert_eq!(dot(&m, &v2), dot(&y, &v2));
        assert_eq!(dot(&y, &v2).abs(), BigInt::from(4));
    }

    #[test]
    fn p1_sections_match_augmentations() {
        let f = p1();
        let sh = FanSheaf::a0(&f);
        let whole = Subfan::whole(&f);
        let good = sh
            .section(
                &whole,
                BTreeMap::from([
                    (1, mono(&sh, 1, &[(&[2], 1)])),
                    (2, mono(&sh, 2, &[(&[0], 2), (&[3], -1)])),
                ]),
            )
            .unwrap();
        assert!(sh.section_check(&good));
        let bad = sh
            .section(
                &whole,
                BTreeMap::from([
                    (1, mono(&sh, 1, &[(&[2], 1)])),
                    (2, mono(&sh, 2, &[(&[0], 1), (&[3], -1)])),
                ]),
            )
            .unwrap();
        assert_eq!(sh.first_incompatibility(&bad), Some((1, 2)));
        let zero = Subfan::star(&f, 0).unwrap();
        let r = sh.restrict_section(&good, &zero).unwrap();
        assert_eq!(r.components()[&0].to_string(), "1");
    }

    #[test]
    fn section_construction_errors() {
        let f = p1();
        let sh = FanSheaf::a0(&f);
        let star = Subfan::star(&f, 1).unwrap();
        assert_eq!(
            sh.section(&star, BTreeMap::new()).unwrap_err(),
            SheafError::MissingComponent(1)
        );
        let extra = BTreeMap::from([(1, mono(&sh, 1, &[])), (2, mono(&sh, 2, &[]))]);
        assert_eq!(
            sh.section(&star, extra).unwrap_err(),
            SheafError::UnexpectedComponent(2)
        );
    }

    #[test]
    fn extend_from_one_ray_of_p1() {
        let f = p1();
        let sh = FanSheaf::a0(&f);
        let star = Subfan::star(&f, 1).unwrap();
        let s = sh
            .section(&star, BTreeMap::from([(1, mono(&sh, 1, &[(&[3], 1)]))]))
            .unwrap();
        let ext = sh.extend_section(&s, 1, false).unwrap();
        assert!(sh.section_check(&ext));
        assert_eq!(ext.components()[&2].augmentation(), BigInt::one());
        assert_eq!(sh.restrict_section(&ext, &star).unwrap(), s);
    }

    #[test]
    fn extend_on_p2_from_two_stars() {
        let f = p2();
        let sh = FanSheaf::a0(&f);
        let (a, b) = (f.max_cones()[0], f.max_cones()[1]);
        let dom = Subfan::closure(&f, [a, b]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let s = sh.random_section(&dom, &mut rng);
            assert!(sh.section_check(&s));
            let ext = sh.extend_section(&s, 3, false).unwrap();
            assert_eq!(sh.restrict_section(&ext, &dom).unwrap(), s);
        }
    }

    #[test]
    fn singular_fans_are_refused() {
        let f = fan(2, &[&[1, 0], &[1, 2]], &[&[0, 1]]);
        let sh = FanSheaf::a0(&f);
        let s = sh.section(&Subfan::empty(), BTreeMap::new()).unwrap();
        assert_eq!(sh.extend_section(&s, 1, false).unwrap_err(), SheafError::NotSmoothFan);
    }

    #[test]
    fn flasque_trials_on_p2() {
        let sh = FanSheaf::a0(&p2());
        let r = sh.verify_flasque(10, 3, 42, false).unwrap();
        assert_eq!(r.extended, 10, "{r:?}");
    }
}
