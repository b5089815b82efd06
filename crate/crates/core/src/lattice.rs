//! Exact integer linear algebra.
//!
//! Everything here works over arbitrary-precision integers: Smith and Hermite
//! normal forms, integer kernels, integer linear systems, and finitely
//! generated quotients `ℤⁿ / S` together with the induced maps between them.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// A vector of arbitrary-precision integers.
pub type IntVec = Vec<BigInt>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("linear system has no integer solution")]
    NoSolution,
    #[error("source relations do not lie in the target subgroup")]
    NotASubquotient,
    #[error("quotients live over different ambient lattices")]
    AmbientMismatch,
}

/// Converts a slice of machine integers into an [`IntVec`].
pub fn int_vec(values: &[i64]) -> IntVec {
    values.iter().map(|&x| BigInt::from(x)).collect()
}

pub fn zero_vec(len: usize) -> IntVec {
    vec![BigInt::zero(); len]
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn vec_add(a: &[BigInt], b: &[BigInt]) -> IntVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_sub(a: &[BigInt], b: &[BigInt]) -> IntVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_neg(a: &[BigInt]) -> IntVec {
    a.iter().map(|x| -x).collect()
}

pub fn vec_scale(a: &[BigInt], k: &BigInt) -> IntVec {
    a.iter().map(|x| x * k).collect()
}

pub fn is_zero_vec(a: &[BigInt]) -> bool {
    a.iter().all(Zero::is_zero)
}

/// Gcd of all entries (zero for the zero vector).
pub fn content(a: &[BigInt]) -> BigInt {
    a.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

/// Divides out the content. The zero vector is returned unchanged.
pub fn primitive(a: &[BigInt]) -> IntVec {
    let g = content(a);
    if g.is_zero() || g.is_one() {
        return a.to_vec();
    }
    a.iter().map(|x| x / &g).collect()
}

/// Dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix{}x{}[", self.rows, self.cols)?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(r).iter().map(ToString::to_string).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from rows of machine integers. All rows must share a length.
    pub fn from_i64_rows(cols: usize, rows: &[Vec<i64>]) -> Self {
        let rows: Vec<IntVec> = rows.iter().map(|r| int_vec(r)).collect();
        Self::from_rows(cols, &rows)
    }

    /// Builds a matrix from rows. `cols` is needed so that the empty matrix
    /// still knows its width.
    pub fn from_rows(cols: usize, rows: &[IntVec]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "row length must equal column count");
            data.extend(r.iter().cloned());
        }
        IntMatrix {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn from_cols(rows: usize, cols: &[IntVec]) -> Self {
        Self::from_rows(rows, cols).transpose()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: BigInt) {
        self.data[r * self.cols + c] = value;
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> IntVec {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn row_vecs(&self) -> Vec<IntVec> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    /// Matrix product. Panics on shape mismatch, which is always a caller bug.
    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if !b.is_zero() {
                        out.data[r * other.cols + c] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> IntVec {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows).map(|r| dot(self.row(r), v)).collect()
    }

    pub fn select_rows(&self, which: &[usize]) -> IntMatrix {
        let rows: Vec<IntVec> = which.iter().map(|&r| self.row(r).to_vec()).collect();
        Self::from_rows(self.cols, &rows)
    }

    /// Stacks `other` below `self`.
    pub fn stack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        IntMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    /// row[dst] += k * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for c in 0..self.cols {
            let v = &self.data[src * self.cols + c] * k;
            if !v.is_zero() {
                self.data[dst * self.cols + c] += v;
            }
        }
    }

    /// col[dst] += k * col[src]
    fn add_col_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for r in 0..self.rows {
            let v = &self.data[r * self.cols + src] * k;
            if !v.is_zero() {
                self.data[r * self.cols + dst] += v;
            }
        }
    }

    fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let v = &mut self.data[r * self.cols + c];
            *v = -std::mem::take(v);
        }
    }

    /// Rank over ℚ.
    pub fn rank(&self) -> usize {
        let h = hnf(self);
        (0..h.rows).take_while(|&r| !is_zero_vec(h.row(r))).count()
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut m = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if m.get(k, k).is_zero() {
                match (k + 1..n).find(|&r| !m.get(r, k).is_zero()) {
                    Some(r) => {
                        m.swap_rows(k, r);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (m.get(i, j) * m.get(k, k) - m.get(i, k) * m.get(k, j)) / &prev;
                    m.set(i, j, v);
                }
            }
            prev = m.get(k, k).clone();
        }
        sign * m.get(n - 1, n - 1)
    }

    /// Classical adjugate, so that `self * adj = det * I`.
    pub fn adjugate(&self) -> IntMatrix {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut adj = Self::zeros(n, n);
        if n == 1 {
            adj.set(0, 0, BigInt::one());
            return adj;
        }
        for i in 0..n {
            for j in 0..n {
                let minor_rows: Vec<IntVec> = (0..n)
                    .filter(|&r| r != i)
                    .map(|r| (0..n).filter(|&c| c != j).map(|c| self.get(r, c).clone()).collect())
                    .collect();
                let minor = IntMatrix::from_rows(n - 1, &minor_rows).determinant();
                let cof = if (i + j) % 2 == 0 { minor } else { -minor };
                adj.set(j, i, cof);
            }
        }
        adj
    }
}

/// Result of a Smith normal form computation: `u · a · v = d`.
#[derive(Debug, Clone)]
pub struct Snf {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    /// Inverse of `v`, maintained alongside it.
    pub v_inv: IntMatrix,
}

impl Snf {
    /// Diagonal entries `d₁ | d₂ | …` including trailing zeros.
    pub fn diagonal(&self) -> IntVec {
        (0..self.d.rows.min(self.d.cols))
            .map(|i| self.d.get(i, i).clone())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().take_while(|x| !x.is_zero()).count()
    }
}

/// Smith normal form `(U, D, V)` with `U·A·V = D`.
pub fn snf(a: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    let s = snf_full(a);
    (s.u, s.d, s.v)
}

pub fn snf_full(a: &IntMatrix) -> Snf {
    let (m, n) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);
    let mut v_inv = IntMatrix::identity(n);

    'diag: for t in 0..m.min(n) {
        loop {
            // smallest nonzero entry of the trailing block becomes the pivot
            let mut best: Option<(usize, usize)> = None;
            for r in t..m {
                for c in t..n {
                    let x = d.get(r, c);
                    if x.is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(br, bc)| x.abs() < d.get(br, bc).abs()) {
                        best = Some((r, c));
                    }
                }
            }
            let Some((pr, pc)) = best else { break 'diag };
            d.swap_rows(t, pr);
            u.swap_rows(t, pr);
            d.swap_cols(t, pc);
            v.swap_cols(t, pc);
            v_inv.swap_rows(t, pc);

            let mut dirty = false;
            for r in t + 1..m {
                if d.get(r, t).is_zero() {
                    continue;
                }
                let q = -(d.get(r, t) / d.get(t, t));
                d.add_row_multiple(r, t, &q);
                u.add_row_multiple(r, t, &q);
                dirty |= !d.get(r, t).is_zero();
            }
            for c in t + 1..n {
                if d.get(t, c).is_zero() {
                    continue;
                }
                let q = d.get(t, c) / d.get(t, t);
                let neg_q = -&q;
                d.add_col_multiple(c, t, &neg_q);
                v.add_col_multiple(c, t, &neg_q);
                v_inv.add_row_multiple(t, c, &q);
                dirty |= !d.get(t, c).is_zero();
            }
            if dirty {
                continue;
            }
            let pivot = d.get(t, t).clone();
            let offender = (t + 1..m).find(|&r| (t + 1..n).any(|c| !d.get(r, c).is_multiple_of(&pivot)));
            match offender {
                Some(r) => {
                    let one = BigInt::one();
                    d.add_row_multiple(t, r, &one);
                    u.add_row_multiple(t, r, &one);
                }
                None => break,
            }
        }
        if d.get(t, t).is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    Snf { u, d, v, v_inv }
}

/// Row-style Hermite normal form: echelon, positive pivots, entries above each
/// pivot reduced into `[0, pivot)`. Zero rows sink to the bottom.
pub fn hnf(a: &IntMatrix) -> IntMatrix {
    let (m, n) = (a.rows, a.cols);
    let mut h = a.clone();
    let mut row = 0;
    for col in 0..n {
        if row == m {
            break;
        }
        loop {
            let mut best: Option<usize> = None;
            for r in row..m {
                let x = h.get(r, col);
                if !x.is_zero() && best.is_none_or(|b| x.abs() < h.get(b, col).abs()) {
                    best = Some(r);
                }
            }
            let Some(b) = best else { break };
            h.swap_rows(row, b);
            let mut done = true;
            for r in row + 1..m {
                if h.get(r, col).is_zero() {
                    continue;
                }
                let q = -(h.get(r, col) / h.get(row, col));
                h.add_row_multiple(r, row, &q);
                done &= h.get(r, col).is_zero();
            }
            if done {
                break;
            }
        }
        if h.get(row, col).is_zero() {
            continue;
        }
        if h.get(row, col).is_negative() {
            h.negate_row(row);
        }
        for r in 0..row {
            let q = -h.get(r, col).div_floor(h.get(row, col));
            h.add_row_multiple(r, row, &q);
        }
        row += 1;
    }
    h
}

/// Nonzero rows of the Hermite normal form: a canonical basis of the row span.
pub fn row_basis(a: &IntMatrix) -> IntMatrix {
    let h = hnf(a);
    let keep: Vec<usize> = (0..h.rows).filter(|&r| !is_zero_vec(h.row(r))).collect();
    h.select_rows(&keep)
}

/// Rows generating `{x : A·x = 0}`, in Hermite normal form.
pub fn kernel(a: &IntMatrix) -> IntMatrix {
    let s = snf_full(a);
    let r = s.rank();
    let gens: Vec<IntVec> = (r..a.cols).map(|c| s.v.col(c)).collect();
    row_basis(&IntMatrix::from_rows(a.cols, &gens))
}

/// Some integer solution of `A·x = b`, or [`LatticeError::NoSolution`].
pub fn solve(a: &IntMatrix, b: &[BigInt]) -> Result<IntVec, LatticeError> {
    if b.len() != a.rows {
        return Err(LatticeError::DimensionMismatch {
            expected: a.rows,
            got: b.len(),
        });
    }
    let s = snf_full(a);
    solve_with(&s, b)
}

/// Solves against a precomputed factorisation, so one Smith form can serve many
/// right-hand sides.
pub fn solve_with(s: &Snf, b: &[BigInt]) -> Result<IntVec, LatticeError> {
    let c = s.u.mul_vec(b);
    let diag = s.diagonal();
    let mut y = zero_vec(s.v.rows);
    for (i, ci) in c.iter().enumerate() {
        let di = diag.get(i).cloned().unwrap_or_else(BigInt::zero);
        if di.is_zero() {
            if !ci.is_zero() {
                return Err(LatticeError::NoSolution);
            }
        } else {
            let (q, r) = ci.div_rem(&di);
            if !r.is_zero() {
                return Err(LatticeError::NoSolution);
            }
            y[i] = q;
        }
    }
    Ok(s.v.mul_vec(&y))
}

/// `ℤⁿ / S` for a subgroup `S` generated by the rows of a relation matrix.
///
/// Elements are written in normal-form coordinates: one coordinate per
/// nontrivial invariant factor `dᵢ > 1`, reduced into `[0, dᵢ)`, followed by
/// `free_rank` free coordinates. Two ambient vectors have equal coordinates iff
/// their difference lies in `S`.
#[derive(Clone)]
pub struct QuotientLattice {
    ambient: usize,
    /// Hermite basis of `S`; the canonical description of the quotient.
    relations: IntMatrix,
    torsion: IntVec,
    free_rank: usize,
    /// `dim × ambient`; coordinates before reduction are `projection · x`.
    projection: IntMatrix,
    /// `ambient × dim`; column `j` is an ambient representative of basis element `j`.
    lift: IntMatrix,
}

impl PartialEq for QuotientLattice {
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.relations == other.relations
    }
}

impl Eq for QuotientLattice {}

impl fmt::Debug for QuotientLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ℤ^{}/{:?} ≅ {}", self.ambient, self.relations, self.describe())
    }
}

impl QuotientLattice {
    /// Quotient of `ℤ^ambient` by the row span of `relations`.
    pub fn new(ambient: usize, relations: &IntMatrix) -> Result<Self, LatticeError> {
        if relations.cols != ambient {
            return Err(LatticeError::DimensionMismatch {
                expected: ambient,
                got: relations.cols,
            });
        }
        // Canonicalising first makes the coordinates depend only on S.
        let rel = row_basis(relations);
        let s = snf_full(&rel);
        let diag = s.diagonal();
        let r = rel.rows;

        let mut torsion = Vec::new();
        let mut picked = Vec::new();
        for (i, di) in diag.iter().enumerate().take(r) {
            if !di.is_one() {
                torsion.push(di.clone());
                picked.push(i);
            }
        }
        picked.extend(r..ambient);
        let proj_rows: Vec<IntVec> = picked.iter().map(|&i| s.v.col(i)).collect();
        let lift_cols: Vec<IntVec> = picked.iter().map(|&i| s.v_inv.row(i).to_vec()).collect();
        Ok(QuotientLattice {
            ambient,
            relations: rel,
            torsion,
            free_rank: ambient - r,
            projection: IntMatrix::from_rows(ambient, &proj_rows),
            lift: IntMatrix::from_cols(ambient, &lift_cols),
        })
    }

    /// The free quotient `ℤⁿ / 0`.
    pub fn free(ambient: usize) -> Self {
        Self::new(ambient, &IntMatrix::zeros(0, ambient)).expect("shape is consistent")
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient
    }

    pub fn relations(&self) -> &IntMatrix {
        &self.relations
    }

    /// Nontrivial invariant factors `d₁ | d₂ | …`, all `> 1`.
    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn is_free(&self) -> bool {
        self.torsion.is_empty()
    }

    /// Number of normal-form coordinates.
    pub fn dim(&self) -> usize {
        self.torsion.len() + self.free_rank
    }

    pub fn projection(&self) -> &IntMatrix {
        &self.projection
    }

    pub fn lift_matrix(&self) -> &IntMatrix {
        &self.lift
    }

    /// Reduces raw coordinates into normal form.
    pub fn normalize(&self, coords: &mut [BigInt]) {
        for (c, d) in coords.iter_mut().zip(&self.torsion) {
            *c = c.mod_floor(d);
        }
    }

    pub fn is_normalized(&self, coords: &[BigInt]) -> bool {
        coords.len() == self.dim() && coords.iter().zip(&self.torsion).all(|(c, d)| !c.is_negative() && c < d)
    }

    /// Normal-form coordinates of an ambient vector.
    pub fn project(&self, x: &[BigInt]) -> IntVec {
        let mut c = self.projection.mul_vec(x);
        self.normalize(&mut c);
        c
    }

    /// An ambient representative of the class with the given coordinates.
    pub fn lift(&self, coords: &[BigInt]) -> IntVec {
        self.lift.mul_vec(coords)
    }

    pub fn add(&self, a: &[BigInt], b: &[BigInt]) -> IntVec {
        let mut c = vec_add(a, b);
        self.normalize(&mut c);
        c
    }

    pub fn neg(&self, a: &[BigInt]) -> IntVec {
        let mut c = vec_neg(a);
        self.normalize(&mut c);
        c
    }

    pub fn identity_element(&self) -> IntVec {
        zero_vec(self.dim())
    }

    /// Whether an ambient vector lies in the relation subgroup.
    pub fn contains_relation(&self, x: &[BigInt]) -> bool {
        is_zero_vec(&self.project(x))
    }

    /// Human-readable isomorphism type, e.g. `ℤ/2 ⊕ ℤ^3`, `0`.
    pub fn describe(&self) -> String {
        let mut parts: Vec<String> = self.torsion.iter().map(|d| format!("ℤ/{d}")).collect();
        match self.free_rank {
            0 => {}
            1 => parts.push("ℤ".to_string()),
            r => parts.push(format!("ℤ^{r}")),
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" ⊕ ")
        }
    }
}

/// The map `ℤⁿ/S → ℤⁿ/S'` induced by the identity when `S ⊆ S'`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientSurjection {
    source: QuotientLattice,
    target: QuotientLattice,
    /// `target.dim × source.dim`, acting on normal-form coordinates.
    matrix: IntMatrix,
    /// Right inverse `source.dim × target.dim`, present when the target is free.
    splitting: Option<IntMatrix>,
}

impl QuotientSurjection {
    pub fn source(&self) -> &QuotientLattice {
        &self.source
    }

    pub fn target(&self) -> &QuotientLattice {
        &self.target
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn splitting(&self) -> Option<&IntMatrix> {
        self.splitting.as_ref()
    }

    pub fn apply(&self, coords: &[BigInt]) -> IntVec {
        let mut c = self.matrix.mul_vec(coords);
        self.target.normalize(&mut c);
        c
    }

    /// Image of a target element under the splitting.
    pub fn split(&self, coords: &[BigInt]) -> Option<IntVec> {
        self.splitting.as_ref().map(|s| {
            let mut c = s.mul_vec(coords);
            self.source.normalize(&mut c);
            c
        })
    }

    /// Replaces the splitting with another right inverse.
    pub fn with_splitting(mut self, splitting: IntMatrix) -> Result<Self, LatticeError> {
        if splitting.rows != self.source.dim() || splitting.cols != self.target.dim() {
            return Err(LatticeError::DimensionMismatch {
                expected: self.source.dim(),
                got: splitting.rows,
            });
        }
        let composite = self.matrix.mul(&splitting);
        for j in 0..self.target.dim() {
            let mut col = composite.col(j);
            self.target.normalize(&mut col);
            let mut e = zero_vec(self.target.dim());
            e[j] = BigInt::one();
            if col != e {
                return Err(LatticeError::NoSolution);
            }
        }
        self.splitting = Some(splitting);
        Ok(self)
    }

    /// Composite `other ∘ self`.
    pub fn then(&self, other: &QuotientSurjection) -> Result<QuotientSurjection, LatticeError> {
        if self.target != other.source {
            return Err(LatticeError::NotASubquotient);
        }
        canonical_surjection(&self.source, &other.target)
    }
}

/// The canonical map `source → target`, defined when the source relations lie
/// in the target's relation subgroup.
pub fn canonical_surjection(
    source: &QuotientLattice,
    target: &QuotientLattice,
) -> Result<QuotientSurjection, LatticeError> {
    if source.ambient != target.ambient {
        return Err(LatticeError::AmbientMismatch);
    }
    for r in 0..source.relations.rows {
        if !target.contains_relation(source.relations.row(r)) {
            return Err(LatticeError::NotASubquotient);
        }
    }
    let mut matrix = target.projection.mul(&source.lift);
    for c in 0..matrix.cols {
        for (r, d) in target.torsion.iter().enumerate() {
            let v = matrix.get(r, c).mod_floor(d);
            matrix.set(r, c, v);
        }
    }
    let splitting = target.is_free().then(|| {
        let mut s = source.projection.mul(&target.lift);
        for c in 0..s.cols {
            for (r, d) in source.torsion.iter().enumerate() {
                let v = s.get(r, c).mod_floor(d);
                s.set(r, c, v);
            }
        }
        s
    });
    Ok(QuotientSurjection {
        source: source.clone(),
        target: target.clone(),
        matrix,
        splitting,
    })
}

/// Sparse integer system keyed by arbitrary ordered row labels.
///
/// Columns are added one at a time; rows are created on first mention.
#[derive(Debug, Clone)]
pub struct SparseSystem<K: Ord + Clone> {
    rows: BTreeMap<K, usize>,
    columns: Vec<Vec<(usize, BigInt)>>,
}

impl<K: Ord + Clone> Default for SparseSystem<K> {
    fn default() -> Self {
        SparseSystem {
            rows: BTreeMap::new(),
            columns: Vec::new(),
        }
    }
}

impl<K: Ord + Clone> SparseSystem<K> {
    pub fn new() -> Self {
        Self::default()
    }

    fn row_index(&mut self, key: K) -> usize {
        let next = self.rows.len();
        *self.rows.entry(key).or_insert(next)
    }

    /// Adds a column with the given entries; returns its index.
    pub fn push_column(&mut self, entries: impl IntoIterator<Item = (K, BigInt)>) -> usize {
        let mut col = Vec::new();
        for (k, v) in entries {
            if !v.is_zero() {
                let r = self.row_index(k);
                col.push((r, v));
            }
        }
        self.columns.push(col);
        self.columns.len() - 1
    }

    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    fn dense(&self, extra_rows: usize) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.rows.len() + extra_rows, self.columns.len());
        for (c, col) in self.columns.iter().enumerate() {
            for (r, v) in col {
                let cur = m.get(*r, c) + v;
                m.set(*r, c, cur);
            }
        }
        m
    }

    /// The dense matrix over the rows mentioned so far, rows ordered by key.
    pub fn matrix(&self) -> (Vec<K>, IntMatrix) {
        let raw = self.dense(0);
        let order: Vec<(K, usize)> = self.rows.iter().map(|(k, &i)| (k.clone(), i)).collect();
        let idx: Vec<usize> = order.iter().map(|(_, i)| *i).collect();
        (order.into_iter().map(|(k, _)| k).collect(), raw.select_rows(&idx))
    }

    /// Solves `A·x = target`. Target keys never touched by a column make the
    /// system unsolvable unless their value is zero.
    pub fn solve(&self, target: impl IntoIterator<Item = (K, BigInt)>) -> Result<IntVec, LatticeError> {
        let mut b = zero_vec(self.rows.len());
        for (k, v) in target {
            match self.rows.get(&k) {
                Some(&r) => b[r] += v,
                None if v.is_zero() => {}
                None => return Err(LatticeError::NoSolution),
            }
        }
        solve(&self.dense(0), &b)
    }
}
