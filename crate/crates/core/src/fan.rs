//! Fans as finite posets of cones, and their subfans (the open sets of the
//! poset topology).

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::cone::{Cone, ConeError, MAX_RANK};
use crate::lattice::{is_zero_vec, primitive, IntVec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FanError {
    #[error("maximal cone {index}: {source}")]
    BadCone { index: usize, source: ConeError },
    #[error("ray {0} is zero")]
    ZeroRay(usize),
    #[error("rays {0} and {1} are positive multiples of each other")]
    DuplicateRay(usize, usize),
    #[error("ray index {0} out of range")]
    RayOutOfRange(usize),
    #[error("ray {ray} is not an extreme ray of maximal cone {cone}")]
    RayNotExtreme { cone: usize, ray: usize },
    #[error("maximal cones {0} and {1} do not meet in a common face")]
    NotAFan(usize, usize),
    #[error("maximal cone {0} is a face of maximal cone {1}")]
    RedundantMaxCone(usize, usize),
    #[error("vector of length {got} in a rank-{expected} lattice")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("ambient rank {0} exceeds the supported maximum of {MAX_RANK}")]
    RankTooLarge(usize),
    #[error("completeness test supports rank ≤ 3, got {0}")]
    UnsupportedRank(usize),
    #[error("cone is not in the fan")]
    ConeNotInFan,
    #[error("subset is not downward closed under the face relation")]
    NotOpen,
}

/// A cone of a fan together with the fan-global indices of its rays.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FanCone {
    pub ray_ids: Vec<usize>,
    pub cone: Cone,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fan {
    name: Option<String>,
    rank: usize,
    rays: Vec<IntVec>,
    normalized: Vec<usize>,
    cones: Vec<FanCone>,
    max_cones: Vec<usize>,
    faces: Vec<BTreeSet<usize>>,
    cofaces: Vec<BTreeSet<usize>>,
    lookup: BTreeMap<Vec<usize>, usize>,
}

impl Fan {
    /// Builds the fan generated by the given maximal cones, each listed by ray
    /// indices. The order of `max_cones` is kept as the fixed total order on
    /// maximal cones. An empty list yields the fan consisting of the zero cone.
    pub fn from_max_cones(rank: usize, rays: &[IntVec], max_cones: &[Vec<usize>]) -> Result<Fan, FanError> {
        if rank > MAX_RANK {
            return Err(FanError::RankTooLarge(rank));
        }
        let mut prim = Vec::with_capacity(rays.len());
        let mut normalized = Vec::new();
        for (i, r) in rays.iter().enumerate() {
            if r.len() != rank {
                return Err(FanError::DimensionMismatch {
                    expected: rank,
                    got: r.len(),
                });
            }
            if is_zero_vec(r) {
                return Err(FanError::ZeroRay(i));
            }
            let p = primitive(r);
            if &p != r {
                normalized.push(i);
            }
            if let Some(j) = prim.iter().position(|q| q == &p) {
                return Err(FanError::DuplicateRay(j, i));
            }
            prim.push(p);
        }
        let id_of: BTreeMap<&IntVec, usize> = prim.iter().enumerate().map(|(i, r)| (r, i)).collect();
        let to_ids = |c: &Cone| -> Vec<usize> {
            let mut ids: Vec<usize> = c.rays().iter().map(|r| id_of[r]).collect();
            ids.sort_unstable();
            ids
        };

        let mut maxes: Vec<(Vec<usize>, Cone)> = Vec::new();
        if max_cones.is_empty() {
            maxes.push((Vec::new(), Cone::zero(rank).expect("rank checked")));
        }
        for (index, ids) in max_cones.iter().enumerate() {
            let ids: BTreeSet<usize> = ids.iter().copied().collect();
            if let Some(&bad) = ids.iter().find(|&&i| i >= prim.len()) {
                return Err(FanError::RayOutOfRange(bad));
            }
            let gens: Vec<IntVec> = ids.iter().map(|&i| prim[i].clone()).collect();
            let cone = Cone::from_rays(rank, &gens).map_err(|source| FanError::BadCone { index, source })?;
            let extreme = to_ids(&cone);
            if let Some(&ray) = ids.iter().find(|i| !extreme.contains(i)) {
                return Err(FanError::RayNotExtreme { cone: index, ray });
            }
            maxes.push((extreme, cone));
        }

        for i in 0..maxes.len() {
            for j in i + 1..maxes.len() {
                let (a, b) = (&maxes[i].1, &maxes[j].1);
                if a.is_face_of(b) {
                    return Err(FanError::RedundantMaxCone(i, j));
                }
                if b.is_face_of(a) {
                    return Err(FanError::RedundantMaxCone(j, i));
                }
                let meet = a
                    .intersection(b)
                    .map_err(|source| FanError::BadCone { index: i, source })?;
                if !(meet.is_face_of(a) && meet.is_face_of(b)) {
                    return Err(FanError::NotAFan(i, j));
                }
            }
        }

        let mut all: BTreeMap<(usize, Vec<usize>), Cone> = BTreeMap::new();
        for (_, c) in &maxes {
            for f in c.faces() {
                all.entry((f.dim(), to_ids(&f))).or_insert(f);
            }
        }
        let cones: Vec<FanCone> = all
            .into_iter()
            .map(|((_, ray_ids), cone)| FanCone { ray_ids, cone })
            .collect();
        let lookup: BTreeMap<Vec<usize>, usize> =
            cones.iter().enumerate().map(|(i, c)| (c.ray_ids.clone(), i)).collect();

        let mut faces = vec![BTreeSet::new(); cones.len()];
        let mut cofaces = vec![BTreeSet::new(); cones.len()];
        for (i, c) in cones.iter().enumerate() {
            for f in c.cone.faces() {
                let j = lookup[&to_ids(&f)];
                faces[i].insert(j);
                cofaces[j].insert(i);
            }
        }
        let max_ids = maxes.iter().map(|(ids, _)| lookup[ids]).collect();
        Ok(Fan {
            name: None,
            rank,
            rays: prim,
            normalized,
            cones,
            max_cones: max_ids,
            faces,
            cofaces,
            lookup,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Primitive ray generators, indexed as in the input.
    pub fn rays(&self) -> &[IntVec] {
        &self.rays
    }

    /// Input rays that had to be divided by their content.
    pub fn normalized_rays(&self) -> &[usize] {
        &self.normalized
    }

    /// All cones, ordered by dimension and then ray indices. Index 0 is the
    /// zero cone.
    pub fn cones(&self) -> &[FanCone] {
        &self.cones
    }

    pub fn cone(&self, i: usize) -> &Cone {
        &self.cones[i].cone
    }

    pub fn len(&self) -> usize {
        self.cones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cones.is_empty()
    }

    /// Maximal cones in their fixed order.
    pub fn max_cones(&self) -> &[usize] {
        &self.max_cones
    }

    pub fn zero_cone(&self) -> usize {
        0
    }

    /// Index of the cone spanned by the given fan rays, if it is in the fan.
    pub fn find(&self, ray_ids: &[usize]) -> Option<usize> {
        let mut key = ray_ids.to_vec();
        key.sort_unstable();
        key.dedup();
        self.lookup.get(&key).copied()
    }

    /// `tau ≺ sigma` (reflexive).
    pub fn is_face(&self, tau: usize, sigma: usize) -> bool {
        self.faces[sigma].contains(&tau)
    }

    pub fn faces_of(&self, sigma: usize) -> &BTreeSet<usize> {
        &self.faces[sigma]
    }

    pub fn cofaces_of(&self, tau: usize) -> &BTreeSet<usize> {
        &self.cofaces[tau]
    }

    /// `σ ∩ τ`, which is a cone of the fan spanned by the common rays.
    pub fn meet(&self, a: usize, b: usize) -> usize {
        let common: Vec<usize> = self.cones[a]
            .ray_ids
            .iter()
            .filter(|r| self.cones[b].ray_ids.contains(r))
            .copied()
            .collect();
        self.lookup[&common]
    }

    pub fn meet_all(&self, cones: &[usize]) -> usize {
        cones
            .iter()
            .copied()
            .reduce(|a, b| self.meet(a, b))
            .unwrap_or(self.zero_cone())
    }

    pub fn is_smooth(&self) -> bool {
        self.cones.iter().all(|c| c.cone.is_smooth())
    }

    pub fn is_simplicial(&self) -> bool {
        self.cones.iter().all(|c| c.cone.is_simplicial())
    }

    /// Every maximal cone is full-dimensional and every codimension-one face
    /// of a maximal cone lies in exactly two maximal cones.
    pub fn is_complete(&self) -> Result<bool, FanError> {
        if self.rank > 3 {
            return Err(FanError::UnsupportedRank(self.rank));
        }
        for &m in &self.max_cones {
            if self.cone(m).dim() != self.rank {
                return Ok(false);
            }
            for &f in &self.faces[m] {
                if self.cone(f).dim() + 1 != self.rank {
                    continue;
                }
                let sharing = self.max_cones.iter().filter(|&&o| self.is_face(f, o)).count();
                if sharing != 2 {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// A downward-closed set of cones of a fan.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subfan {
    members: BTreeSet<usize>,
}

impl Subfan {
    pub fn new(fan: &Fan, members: impl IntoIterator<Item = usize>) -> Result<Subfan, FanError> {
        let members: BTreeSet<usize> = members.into_iter().collect();
        for &m in &members {
            if m >= fan.len() {
                return Err(FanError::ConeNotInFan);
            }
            if !fan.faces_of(m).is_subset(&members) {
                return Err(FanError::NotOpen);
            }
        }
        Ok(Subfan { members })
    }

    /// Smallest subfan containing the given cones.
    pub fn closure(fan: &Fan, cones: impl IntoIterator<Item = usize>) -> Result<Subfan, FanError> {
        let mut members = BTreeSet::new();
        for c in cones {
            if c >= fan.len() {
                return Err(FanError::ConeNotInFan);
            }
            members.extend(fan.faces_of(c).iter().copied());
        }
        Ok(Subfan { members })
    }

    /// `⟨σ⟩`: the cone and all its faces.
    pub fn star(fan: &Fan, sigma: usize) -> Result<Subfan, FanError> {
        Self::closure(fan, [sigma])
    }

    pub fn whole(fan: &Fan) -> Subfan {
        Subfan {
            members: (0..fan.len()).collect(),
        }
    }

    pub fn empty() -> Subfan {
        Subfan {
            members: BTreeSet::new(),
        }
    }

    pub fn members(&self) -> &BTreeSet<usize> {
        &self.members
    }

    pub fn contains(&self, cone: usize) -> bool {
        self.members.contains(&cone)
    }

    pub fn is_subfan_of(&self, other: &Subfan) -> bool {
        self.members.is_subset(&other.members)
    }

    pub fn union(&self, other: &Subfan) -> Subfan {
        Subfan {
            members: self.members.union(&other.members).copied().collect(),
        }
    }

    pub fn intersection(&self, other: &Subfan) -> Subfan {
        Subfan {
            members: self.members.intersection(&other.members).copied().collect(),
        }
    }

    /// Members that are not proper faces of other members, in index order.
    pub fn max_cones(&self, fan: &Fan) -> Vec<usize> {
        self.members
            .iter()
            .copied()
            .filter(|&m| fan.cofaces_of(m).iter().all(|&c| c == m || !self.members.contains(&c)))
            .collect()
    }
}
