use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use toric_k::lattice::{
    canonical_surjection, int_vec, kernel, snf, solve, vec_sub, IntMatrix, LatticeError, QuotientLattice,
};

fn matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = IntMatrix> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec(-20i64..=20, c), r)
            .prop_map(move |rows| IntMatrix::from_i64_rows(c, &rows))
    })
}

/// gcd of all k×k minors, computed by cofactor expansion.
fn minor_gcd(a: &IntMatrix, k: usize) -> BigInt {
    let mut g = BigInt::zero();
    for rows in (0..a.rows()).combinations(k) {
        for cols in (0..a.cols()).combinations(k) {
            g = g.gcd(&det(a, &rows, &cols));
        }
    }
    g
}

fn det(a: &IntMatrix, rows: &[usize], cols: &[usize]) -> BigInt {
    if rows.is_empty() {
        return BigInt::one();
    }
    let mut total = BigInt::zero();
    for (j, &c) in cols.iter().enumerate() {
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let term = a.get(rows[0], c) * det(a, &rows[1..], &rest);
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn snf_is_a_unimodular_diagonalisation(a in matrix(5, 5)) {
        let (u, d, v) = snf(&a);
        prop_assert_eq!(u.mul(&a).mul(&v), d.clone());
        prop_assert_eq!(u.determinant().abs(), BigInt::one());
        prop_assert_eq!(v.determinant().abs(), BigInt::one());
        let n = a.rows().min(a.cols());
        let diag: Vec<BigInt> = (0..n).map(|i| d.get(i, i).clone()).collect();
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                if i != j {
                    prop_assert!(d.get(i, j).is_zero());
                }
            }
        }
        for w in diag.windows(2) {
            prop_assert!(!w[0].is_negative());
            prop_assert!(w[1].is_zero() || (!w[0].is_zero() && w[1].is_multiple_of(&w[0])));
        }
        let mut prod = BigInt::one();
        for k in 1..=n.min(4) {
            prod *= &diag[k - 1];
            prop_assert_eq!(&prod, &minor_gcd(&a, k));
        }
    }

    #[test]
    fn quotient_coordinates_detect_the_subgroup(
        rel in matrix(3, 3),
        v in prop::collection::vec(-30i64..=30, 3),
        w in prop::collection::vec(-30i64..=30, 3),
        k in prop::collection::vec(-4i64..=4, 3),
    ) {
        let n = rel.cols();
        let q = QuotientLattice::new(n, &rel).unwrap();
        let v = int_vec(&v[..n]);
        let w = int_vec(&w[..n]);
        // v + (integer combination of relations) has the same coordinates
        let mut shifted = v.clone();
        for (i, c) in k.iter().take(rel.rows()).enumerate() {
            for (s, r) in shifted.iter_mut().zip(rel.row(i)) {
                *s += BigInt::from(*c) * r;
            }
        }
        prop_assert_eq!(q.project(&v), q.project(&shifted));
        let same = q.project(&v) == q.project(&w);
        let in_span = solve(&rel.transpose(), &vec_sub(&v, &w)).is_ok();
        prop_assert_eq!(same, in_span);
        prop_assert!(q.is_normalized(&q.project(&v)));
        prop_assert_eq!(q.project(&q.lift(&q.project(&v))), q.project(&v));
    }

    #[test]
    fn canonical_surjections_compose(
        a in prop::collection::vec(prop::collection::vec(-6i64..=6, 3), 0..2),
        b in prop::collection::vec(prop::collection::vec(-6i64..=6, 3), 0..2),
        x in prop::collection::vec(-20i64..=20, 3),
    ) {
        let s1 = IntMatrix::from_i64_rows(3, &a);
        let s2 = s1.stack(&IntMatrix::from_i64_rows(3, &b));
        let q0 = QuotientLattice::free(3);
        let q1 = QuotientLattice::new(3, &s1).unwrap();
        let q2 = QuotientLattice::new(3, &s2).unwrap();
        let f01 = canonical_surjection(&q0, &q1).unwrap();
        let f12 = canonical_surjection(&q1, &q2).unwrap();
        let f02 = canonical_surjection(&q0, &q2).unwrap();
        let x = int_vec(&x);
        prop_assert_eq!(f12.apply(&f01.apply(&x)), f02.apply(&x));
        prop_assert_eq!(&f01.then(&f12).unwrap(), &f02);
        prop_assert_eq!(f02.apply(&x), q2.project(&x));
        if let Some(s) = f12.splitting() {
            let id = f12.matrix().mul(s);
            prop_assert_eq!(id, IntMatrix::identity(q2.dim()));
        }
    }

    #[test]
    fn kernel_rows_span_the_solutions(a in matrix(2, 3)) {
        let k = kernel(&a);
        for r in k.row_vecs() {
            prop_assert!(a.mul_vec(&r).iter().all(Zero::is_zero));
        }
        // every small solution is an integer combination of kernel rows
        let n = a.cols();
        for x in (0..n).map(|_| -3i64..=3).multi_cartesian_product() {
            let x = int_vec(&x);
            if a.mul_vec(&x).iter().all(Zero::is_zero) {
                prop_assert!(solve(&k.transpose(), &x).is_ok());
            }
        }
    }
}

#[test]
fn quotient_examples() {
    let free = QuotientLattice::new(2, &IntMatrix::zeros(0, 2)).unwrap();
    assert_eq!(free.projection(), &IntMatrix::identity(2));
    let q = QuotientLattice::new(2, &IntMatrix::from_i64_rows(2, &[vec![0, 1]])).unwrap();
    assert_eq!((q.free_rank(), q.invariant_factors().len()), (1, 0));
    let z2 = QuotientLattice::new(2, &IntMatrix::from_i64_rows(2, &[vec![2, 0], vec![0, 1]])).unwrap();
    assert_eq!(z2.describe(), "ℤ/2");
    // coset enumeration oracle: the box [0,3]² meets exactly two classes
    let classes: std::collections::BTreeSet<_> = (0..4)
        .cartesian_product(0..4)
        .map(|(x, y)| z2.project(&int_vec(&[x, y])))
        .collect();
    assert_eq!(classes.len(), 2);
}

#[test]
fn surjection_examples() {
    let q = QuotientLattice::free(2);
    let id = canonical_surjection(&q, &q).unwrap();
    assert_eq!(id.matrix(), &IntMatrix::identity(2));
    let t = QuotientLattice::new(2, &IntMatrix::from_i64_rows(2, &[vec![0, 1]])).unwrap();
    let phi = canonical_surjection(&q, &t).unwrap();
    assert_eq!(phi.apply(&int_vec(&[5, 9])), int_vec(&[5]));
    assert_eq!(phi.split(&int_vec(&[5])).unwrap(), int_vec(&[5, 0]));
    let zero = QuotientLattice::new(2, &IntMatrix::identity(2)).unwrap();
    let to_zero = canonical_surjection(&q, &zero).unwrap();
    assert_eq!(to_zero.matrix().rows(), 0);
    assert_eq!(canonical_surjection(&t, &q).unwrap_err(), LatticeError::NotASubquotient);
}

#[test]
fn solver_examples() {
    let b = int_vec(&[3, -4]);
    assert_eq!(solve(&IntMatrix::identity(2), &b).unwrap(), b);
    assert_eq!(
        solve(&IntMatrix::from_i64_rows(1, &[vec![2]]), &int_vec(&[1])).unwrap_err(),
        LatticeError::NoSolution
    );
    let k = kernel(&IntMatrix::from_i64_rows(2, &[vec![1, 1]]));
    assert_eq!(k.rows(), 1);
    assert_eq!(k.row(0).iter().map(|x| x.abs()).collect::<Vec<_>>(), int_vec(&[1, 1]));
}
