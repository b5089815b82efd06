use std::collections::BTreeSet;

use itertools::Itertools;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use toric_k::lattice::{dot, int_vec, IntVec};
use toric_k::{corpus, Cone, Fan, FanError, Subfan};

fn vecs(rows: &[&[i64]]) -> Vec<IntVec> {
    rows.iter().map(|r| int_vec(r)).collect()
}

#[test]
fn double_dual_on_corpus() {
    for (name, c) in corpus::cones() {
        let dd = c.dual().dual();
        assert_eq!(dd.rays(), c.rays(), "{name}");
        assert_eq!(dd.dim(), c.dim(), "{name}");
        assert_eq!(c.dim() + c.perp_lattice().rows(), c.rank(), "{name}");
    }
}

#[test]
fn facets_match_a_box_oracle() {
    // a point of the box lies in the cone iff it is a nonnegative rational
    // combination of the rays; for these 2-cones that is a sign test on 2×2 determinants
    let c = Cone::from_rays(2, &vecs(&[&[1, 0], &[1, 2]])).unwrap();
    assert_eq!(c.facets(), vecs(&[&[0, 1], &[2, -1]]).as_slice());
    for (x, y) in (-6i64..=6).cartesian_product(-6i64..=6) {
        let inside = y >= 0 && 2 * x - y >= 0;
        let p = int_vec(&[x, y]);
        let det = |a: &[i64], b: &[i64]| a[0] * b[1] - a[1] * b[0];
        let oracle = det(&[1, 0], &[x, y]) >= 0 && det(&[x, y], &[1, 2]) >= 0;
        assert_eq!(inside, oracle);
        assert_eq!(c.contains(&p), oracle, "({x},{y})");
    }
}

#[test]
fn square_cone_faces_by_tight_subsets() {
    let (_, sq) = corpus::cones().into_iter().find(|(n, _)| *n == "square cone").unwrap();
    // oracle: a face is cut out by a subset of facets; distinct faces give distinct ray sets
    let mut ray_sets = BTreeSet::new();
    for k in 0..=sq.facets().len() {
        for fs in sq.facets().iter().combinations(k) {
            let rays: Vec<IntVec> = sq
                .rays()
                .iter()
                .filter(|r| fs.iter().all(|u| dot(u, r).is_zero()))
                .cloned()
                .collect();
            ray_sets.insert(rays);
        }
    }
    assert_eq!(ray_sets.len(), 10);
    assert_eq!(sq.faces().len(), 10);
    assert!(!sq.is_simplicial());
}

#[test]
fn face_relation_is_transitive_on_corpus() {
    let mut fans = corpus::smooth_fans();
    fans.push(corpus::quadric_cone());
    for f in fans {
        for s in 0..f.len() {
            assert!(f.is_face(f.zero_cone(), s));
            for &t in f.faces_of(s) {
                for &r in f.faces_of(t) {
                    assert!(f.is_face(r, s));
                }
            }
        }
    }
}

#[test]
fn fan_examples() {
    assert_eq!(corpus::p1().len(), 3);
    assert_eq!(corpus::p2().len(), 7);
    assert!(corpus::p1().is_complete().unwrap());
    assert!(corpus::p2().is_complete().unwrap());
    assert!(!corpus::a2().is_complete().unwrap());
    let bad = Fan::from_max_cones(
        2,
        &vecs(&[&[1, 0], &[0, 1], &[1, 1], &[1, -1]]),
        &[vec![0, 1], vec![2, 3]],
    );
    assert_eq!(bad.unwrap_err(), FanError::NotAFan(0, 1));
    // (3,1) is interior to both cones, so their overlap is 2-dimensional
    let a = Cone::from_rays(2, &vecs(&[&[1, 0], &[0, 1]])).unwrap();
    let b = Cone::from_rays(2, &vecs(&[&[1, 1], &[1, -1]])).unwrap();
    let p = int_vec(&[3, 1]);
    assert!(a.contains_in_interior(&p) && b.contains_in_interior(&p));
}

#[test]
fn stars_are_faces() {
    let f = corpus::p2();
    for &m in f.max_cones() {
        let star = Subfan::star(&f, m).unwrap();
        assert_eq!(star.members().len(), f.cone(m).faces().len());
    }
}

fn closure_of(f: &Fan, pick: &[bool]) -> Subfan {
    Subfan::closure(f, (0..f.len()).filter(|&i| pick[i % pick.len()])).unwrap()
}

proptest! {
    #[test]
    fn subfans_form_a_topology(
        which in 0usize..7,
        a in prop::collection::vec(any::<bool>(), 9),
        b in prop::collection::vec(any::<bool>(), 9),
    ) {
        let f = &corpus::smooth_fans()[which];
        let (a, b) = (closure_of(f, &a), closure_of(f, &b));
        prop_assert!(Subfan::new(f, a.union(&b).members().iter().copied()).is_ok());
        prop_assert!(Subfan::new(f, a.intersection(&b).members().iter().copied()).is_ok());
        prop_assert!(a.intersection(&b).is_subfan_of(&a));
    }

    #[test]
    fn random_cones_validate(rays in prop::collection::vec(prop::collection::vec(-4i64..=4, 3), 1..5)) {
        let rays: Vec<IntVec> = rays.iter().map(|r| int_vec(r)).collect();
        if let Ok(c) = Cone::from_rays(3, &rays) {
            prop_assert!(c.validate().is_ok());
            prop_assert_eq!(c.dim() + c.perp_lattice().rows(), 3);
            for r in &rays {
                prop_assert!(c.contains(r));
            }
            let d = c.dual();
            let d_rays = d.rays().to_vec();
            for u in &d_rays {
                for r in &rays {
                    prop_assert!(!dot(u, r).is_negative());
                }
            }
            let dd = d.dual();
            prop_assert_eq!(dd.rays(), c.rays());
        }
    }
}
