//! Named fans and cones used by the tests, benches and the CLI.

use std::sync::Arc;

use crate::cone::Cone;
use crate::fan::Fan;
use crate::lattice::{int_vec, IntVec};

fn vecs(rows: &[&[i64]]) -> Vec<IntVec> {
    rows.iter().map(|r| int_vec(r)).collect()
}

fn build(name: &str, rank: usize, rays: &[&[i64]], max: &[&[usize]]) -> Arc<Fan> {
    let max: Vec<Vec<usize>> = max.iter().map(|m| m.to_vec()).collect();
    let fan = Fan::from_max_cones(rank, &vecs(rays), &max).expect("corpus fans are valid");
    Arc::new(fan.with_name(name))
}

pub fn p1() -> Arc<Fan> {
    build("P1", 1, &[&[1], &[-1]], &[&[0], &[1]])
}

pub fn p2() -> Arc<Fan> {
    build("P2", 2, &[&[1, 0], &[0, 1], &[-1, -1]], &[&[0, 1], &[1, 2], &[2, 0]])
}

pub fn p1xp1() -> Arc<Fan> {
    hirzebruch_named("P1xP1", 0)
}

/// The Hirzebruch surface `F_a`.
pub fn hirzebruch(a: i64) -> Arc<Fan> {
    hirzebruch_named(&format!("F{a}"), a)
}

fn hirzebruch_named(name: &str, a: i64) -> Arc<Fan> {
    build(
        name,
        2,
        &[&[1, 0], &[0, 1], &[-1, a], &[0, -1]],
        &[&[0, 1], &[1, 2], &[2, 3], &[3, 0]],
    )
}

/// `P²` blown up at one torus-fixed point.
pub fn bl1_p2() -> Arc<Fan> {
    build(
        "Bl1P2",
        2,
        &[&[1, 0], &[1, 1], &[0, 1], &[-1, -1]],
        &[&[0, 1], &[1, 2], &[2, 3], &[3, 0]],
    )
}

/// The affine plane, a single quadrant.
pub fn a2() -> Arc<Fan> {
    build("A2", 2, &[&[1, 0], &[0, 1]], &[&[0, 1]])
}

/// The quadric cone `⟨(1,0),(1,2)⟩` as a one-cone fan.
pub fn quadric_cone() -> Arc<Fan> {
    build("quadric", 2, &[&[1, 0], &[1, 2]], &[&[0, 1]])
}

/// The smooth fans on which the exactness and flasqueness checks run.
pub fn smooth_fans() -> Vec<Arc<Fan>> {
    vec![p1(), p2(), p1xp1(), hirzebruch(1), hirzebruch(2), bl1_p2(), a2()]
}

/// Looks up a corpus fan by name (case-insensitive).
pub fn fan_by_name(name: &str) -> Option<Arc<Fan>> {
    match name.to_ascii_lowercase().as_str() {
        "p1" => Some(p1()),
        "p2" => Some(p2()),
        "p1xp1" => Some(p1xp1()),
        "f1" => Some(hirzebruch(1)),
        "f2" => Some(hirzebruch(2)),
        "bl1p2" => Some(bl1_p2()),
        "a2" => Some(a2()),
        "quadric" => Some(quadric_cone()),
        _ => None,
    }
}

/// Named cones: quadrant, a ray in `ℤ²`, two singular 2-cones, the cone over
/// the unit square and the zero cone.
pub fn cones() -> Vec<(&'static str, Cone)> {
    let c = |rank: usize, rays: &[&[i64]]| Cone::from_rays(rank, &vecs(rays)).expect("corpus cones are valid");
    vec![
        ("quadrant", c(2, &[&[1, 0], &[0, 1]])),
        ("ray", c(2, &[&[1, 0]])),
        ("A1 singularity", c(2, &[&[1, 0], &[1, 2]])),
        ("A2 singularity", c(2, &[&[1, 0], &[1, 3]])),
        ("square cone", c(3, &[&[0, 0, 1], &[1, 0, 1], &[0, 1, 1], &[1, 1, 1]])),
        ("zero", Cone::zero(2).expect("rank 2")),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_builds() {
        for f in smooth_fans() {
            assert!(f.is_smooth(), "{:?}", f.name());
        }
        assert!(!quadric_cone().is_smooth());
        assert_eq!(p1xp1().len(), 9);
        assert_eq!(hirzebruch(2).max_cones().len(), 4);
        assert!(bl1_p2().is_complete().unwrap());
        assert_eq!(cones().len(), 6);
    }
}
