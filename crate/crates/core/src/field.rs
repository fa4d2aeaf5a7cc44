//! Prime-field arithmetic and dense rank over GF(p).

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not a prime in [2, 2^31)")]
    NotPrime(u64),
    #[error("{value} is not invertible modulo {modulus}")]
    NotInvertible { value: u64, modulus: u64 },
    #[error("matrix entry {value} at ({row}, {col}) is not reduced modulo {modulus}")]
    UnreducedEntry {
        row: usize,
        col: usize,
        value: u64,
        modulus: u64,
    },
    #[error("expected {expected} entries, got {actual}")]
    ShapeMismatch { expected: usize, actual: usize },
}

/// A prime `p` with `2 <= p < 2^31`.
///
/// Residues are kept as least nonnegative representatives in a `u64`, so the
/// product of two residues fits in 62 bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeModulus(u64);

impl PrimeModulus {
    pub const MAX: u64 = 1 << 31;

    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p < Self::MAX && is_prime(p) {
            Ok(Self(p))
        } else {
            Err(FieldError::NotPrime(p))
        }
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn reduce(self, a: u64) -> u64 {
        a % self.0
    }

    pub fn reduce_i64(self, a: i64) -> u64 {
        a.rem_euclid(self.0 as i64) as u64
    }

    #[inline]
    pub fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.0 {
            s - self.0
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.0 - b
        }
    }

    #[inline]
    pub fn neg(self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    #[inline]
    pub fn mul(self, a: u64, b: u64) -> u64 {
        a * b % self.0
    }

    pub fn pow(self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.0;
        base %= self.0;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    pub fn inverse(self, a: u64) -> Result<u64, FieldError> {
        field_inverse(a, self)
    }
}

impl fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Deterministic trial division; adequate for `n < 2^31`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Multiplicative inverse of `a` modulo `p`, via the extended Euclidean algorithm.
pub fn field_inverse(a: u64, p: PrimeModulus) -> Result<u64, FieldError> {
    let a = p.reduce(a);
    if a == 0 {
        return Err(FieldError::NotInvertible {
            value: a,
            modulus: p.get(),
        });
    }
    let (mut old_r, mut r) = (a as i64, p.get() as i64);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let quot = old_r / r;
        (old_r, r) = (r, old_r - quot * r);
        (old_s, s) = (s, old_s - quot * s);
    }
    debug_assert_eq!(old_r, 1);
    Ok(p.reduce_i64(old_s))
}

/// Dense row-major matrix over GF(p).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixModP {
    rows: usize,
    cols: usize,
    data: Vec<u64>,
    modulus: PrimeModulus,
}

impl MatrixModP {
    pub fn zeros(rows: usize, cols: usize, modulus: PrimeModulus) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
            modulus,
        }
    }

    pub fn new(
        rows: usize,
        cols: usize,
        data: Vec<u64>,
        modulus: PrimeModulus,
    ) -> Result<Self, FieldError> {
        if data.len() != rows * cols {
            return Err(FieldError::ShapeMismatch {
                expected: rows * cols,
                actual: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|&v| v >= modulus.get()) {
            return Err(FieldError::UnreducedEntry {
                row: pos / cols.max(1),
                col: pos % cols.max(1),
                value: data[pos],
                modulus: modulus.get(),
            });
        }
        Ok(Self {
            rows,
            cols,
            data,
            modulus,
        })
    }

    /// Builds a matrix from rows of arbitrary signed integers, reducing each entry.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R], modulus: PrimeModulus) -> Result<Self, FieldError> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(FieldError::ShapeMismatch {
                    expected: cols,
                    actual: row.len(),
                });
            }
            data.extend(row.iter().map(|&v| modulus.reduce_i64(v)));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
            modulus,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    pub fn get(&self, row: usize, col: usize) -> u64 {
        self.data[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: u64) {
        self.data[row * self.cols + col] = self.modulus.reduce(value);
    }

    pub fn row(&self, row: usize) -> &[u64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    /// Appends a row; entries are reduced modulo p.
    pub fn push_row(&mut self, row: &[u64]) -> Result<(), FieldError> {
        if row.len() != self.cols {
            return Err(FieldError::ShapeMismatch {
                expected: self.cols,
                actual: row.len(),
            });
        }
        let p = self.modulus;
        self.data.extend(row.iter().map(|&v| p.reduce(v)));
        self.rows += 1;
        Ok(())
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        swap_rows(&mut self.data, self.cols, a, b);
    }

    pub fn scale_row(&mut self, row: usize, factor: u64) {
        let p = self.modulus;
        let factor = p.reduce(factor);
        for v in &mut self.data[row * self.cols..(row + 1) * self.cols] {
            *v = p.mul(*v, factor);
        }
    }

    pub fn transpose(&self) -> Self {
        let mut data = vec![0; self.data.len()];
        for r in 0..self.rows {
            for c in 0..self.cols {
                data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            data,
            modulus: self.modulus,
        }
    }

    pub fn rank(&self) -> usize {
        rank_mod_p(self)
    }

    /// Rank computed by eliminating in place; consumes the matrix.
    pub fn into_rank(mut self) -> usize {
        eliminate(&mut self.data, self.rows, self.cols, self.modulus)
    }
}

/// Rank of `m` over GF(p).
pub fn rank_mod_p(m: &MatrixModP) -> usize {
    m.clone().into_rank()
}

fn swap_rows(data: &mut [u64], cols: usize, a: usize, b: usize) {
    if a == b {
        return;
    }
    let (lo, hi) = (a.min(b), a.max(b));
    let (head, tail) = data.split_at_mut(hi * cols);
    head[lo * cols..(lo + 1) * cols].swap_with_slice(&mut tail[..cols]);
}

/// Gaussian elimination with first-nonzero pivoting and lazy reduction.
///
/// Non-pivot rows accumulate `(p - e) * pivot` without reducing; a row is
/// reduced only when its entry is inspected as a pivot candidate or when
/// the number of pending updates could overflow a `u64`.
pub(crate) fn eliminate(data: &mut [u64], rows: usize, cols: usize, p: PrimeModulus) -> usize {
    let pm = p.get();
    let max_term = (pm - 1) * (pm - 1);
    let budget = if max_term == 0 {
        u64::MAX
    } else {
        (u64::MAX - (pm - 1)) / max_term
    };
    let mut pending = vec![0u64; rows];
    let mut pivot_tail: Vec<u32> = Vec::with_capacity(cols);
    let mut rank = 0;

    for col in 0..cols {
        if rank == rows {
            break;
        }
        let mut pivot = None;
        for r in rank..rows {
            let cell = &mut data[r * cols + col];
            *cell %= pm;
            if *cell != 0 && pivot.is_none() {
                pivot = Some(r);
            }
        }
        let Some(pr) = pivot else { continue };
        swap_rows(data, cols, pr, rank);
        pending.swap(pr, rank);

        let inv = field_inverse(data[rank * cols + col], p).expect("pivot is nonzero");
        pivot_tail.clear();
        for v in &mut data[rank * cols + col..(rank + 1) * cols] {
            *v = (*v % pm) * inv % pm;
            pivot_tail.push(*v as u32);
        }
        let tail = &pivot_tail[1..];

        for r in rank + 1..rows {
            let lead = data[r * cols + col];
            if lead == 0 {
                continue;
            }
            let factor = (pm - lead) as u32 as u64;
            let row = &mut data[r * cols + col + 1..(r + 1) * cols];
            for (a, &b) in row.iter_mut().zip(tail) {
                *a = a.wrapping_add(factor * b as u64);
            }
            data[r * cols + col] = 0;
            pending[r] += 1;
            if pending[r] >= budget {
                for v in &mut data[r * cols..(r + 1) * cols] {
                    *v %= pm;
                }
                pending[r] = 0;
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gf(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    #[test]
    fn primality_at_construction() {
        assert!(PrimeModulus::new(2).is_ok());
        assert!(PrimeModulus::new(2_147_483_647).is_ok());
        assert!(PrimeModulus::new(1).is_err());
        assert!(PrimeModulus::new(9).is_err());
        assert!(PrimeModulus::new(1 << 31).is_err());
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(field_inverse(1, gf(7)).unwrap(), 1);
        assert_eq!(field_inverse(3, gf(7)).unwrap(), 5);
        assert!(matches!(
            field_inverse(2, gf(2)),
            Err(FieldError::NotInvertible { .. })
        ));
        let big = gf(2_147_483_647);
        let inv = field_inverse(123_456_789, big).unwrap();
        assert_eq!(big.mul(inv, 123_456_789), 1);
    }

    #[test]
    fn rank_examples() {
        let id = MatrixModP::from_rows(&[[1, 0, 0], [0, 1, 0], [0, 0, 1]], gf(5)).unwrap();
        assert_eq!(id.rank(), 3);
        assert_eq!(MatrixModP::zeros(2, 2, gf(7)).rank(), 0);
        let dep = MatrixModP::from_rows(&[[1, 2], [2, 4]], gf(5)).unwrap();
        assert_eq!(dep.rank(), 1);
        assert_eq!(MatrixModP::zeros(0, 0, gf(3)).rank(), 0);
        assert_eq!(MatrixModP::zeros(0, 4, gf(3)).rank(), 0);
    }

    #[test]
    fn rank_depends_on_characteristic() {
        // det = 3, singular only mod 3
        let m = [[1, 1], [-1, 2]];
        assert_eq!(MatrixModP::from_rows(&m, gf(3)).unwrap().rank(), 1);
        assert_eq!(MatrixModP::from_rows(&m, gf(5)).unwrap().rank(), 2);
    }

    #[test]
    fn lazy_reduction_survives_many_updates_at_large_p() {
        // Lower-triangular all-(p-1) matrix forces repeated accumulation.
        let p = gf(2_147_483_629);
        let n = 40;
        let mut m = MatrixModP::zeros(n, n, p);
        for r in 0..n {
            for c in 0..=r {
                m.set(r, c, p.get() - 1 - c as u64);
            }
        }
        assert_eq!(m.rank(), n);
        let mut dup = m.clone();
        let row = m.row(5).to_vec();
        dup.push_row(&row).unwrap();
        assert_eq!(dup.rank(), n);
    }

    #[test]
    fn rejects_unreduced_entries() {
        assert!(MatrixModP::new(1, 2, vec![1, 5], gf(5)).is_err());
        assert!(MatrixModP::new(1, 2, vec![1], gf(5)).is_err());
    }

    fn det(m: &[Vec<u64>], p: PrimeModulus) -> u64 {
        match m.len() {
            0 => 1,
            1 => m[0][0],
            n => {
                let mut acc = 0;
                for c in 0..n {
                    let minor: Vec<Vec<u64>> = m[1..]
                        .iter()
                        .map(|row| row.iter().enumerate().filter(|&(j, _)| j != c).map(|(_, &v)| v).collect())
                        .collect();
                    let term = p.mul(m[0][c], det(&minor, p));
                    acc = if c % 2 == 0 { p.add(acc, term) } else { p.sub(acc, term) };
                }
                acc
            }
        }
    }

    fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
        (0u32..1 << n)
            .filter(|mask| mask.count_ones() as usize == k)
            .map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).collect())
            .collect()
    }

    /// Largest k with a nonzero k x k minor.
    fn minor_rank(m: &MatrixModP) -> usize {
        let p = m.modulus();
        for k in (1..=m.rows().min(m.cols())).rev() {
            for rs in subsets(m.rows(), k) {
                for cs in subsets(m.cols(), k) {
                    let sub: Vec<Vec<u64>> =
                        rs.iter().map(|&r| cs.iter().map(|&c| m.get(r, c)).collect()).collect();
                    if det(&sub, p) != 0 {
                        return k;
                    }
                }
            }
        }
        0
    }

    fn small_matrix(max_dim: usize) -> impl Strategy<Value = MatrixModP> {
        (prop::sample::select(vec![2u64, 3, 5, 7, 31]), 0..=max_dim, 0..=max_dim).prop_flat_map(
            |(p, r, c)| {
                prop::collection::vec(0..p, r * c)
                    .prop_map(move |data| MatrixModP::new(r, c, data, gf(p)).unwrap())
            },
        )
    }

    #[test]
    fn exhaustive_binary_2x3_against_minors() {
        let p = gf(2);
        for bits in 0u32..1 << 6 {
            let data = (0..6).map(|i| (bits >> i & 1) as u64).collect();
            let m = MatrixModP::new(2, 3, data, p).unwrap();
            assert_eq!(m.rank(), minor_rank(&m), "{m:?}");
        }
    }

    proptest! {
        #[test]
        fn agrees_with_minor_oracle(m in small_matrix(3)) {
            prop_assert_eq!(m.rank(), minor_rank(&m));
        }

        #[test]
        fn transpose_preserves_rank(m in small_matrix(7)) {
            prop_assert_eq!(m.rank(), m.transpose().rank());
        }

        #[test]
        fn row_operations_preserve_rank(m in small_matrix(6), a in 0usize..6, b in 0usize..6, s in 1u64..1000) {
            prop_assume!(m.rows() > 0);
            let (a, b) = (a % m.rows(), b % m.rows());
            let mut moved = m.clone();
            moved.swap_rows(a, b);
            prop_assert_eq!(moved.rank(), m.rank());
            let s = s % m.modulus().get();
            prop_assume!(s != 0);
            moved.scale_row(a, s);
            prop_assert_eq!(moved.rank(), m.rank());
        }

        #[test]
        fn stacking_a_combination_keeps_rank(m in small_matrix(6), coeffs in prop::collection::vec(0u64..100, 6)) {
            prop_assume!(m.rows() > 0 && m.cols() > 0);
            let p = m.modulus();
            let mut combo = vec![0u64; m.cols()];
            for (r, c) in (0..m.rows()).zip(&coeffs) {
                for (j, v) in combo.iter_mut().enumerate() {
                    *v = p.add(*v, p.mul(p.reduce(*c), m.get(r, j)));
                }
            }
            let mut stacked = m.clone();
            stacked.push_row(&combo).unwrap();
            prop_assert_eq!(stacked.rank(), m.rank());
        }
    }
}
