//! Exact arithmetic over a prime field F_q and the small dense-matrix kit the
//! protocol is built on.
//!
//! Everything here is deterministic and exact: elements are canonical residues
//! in `[0, q)` held in `u64`, products widen through `u128`, and the matrix
//! routines (Gaussian elimination, Vandermonde construction) never approximate.
//! The modulus is checked for primality at construction so that every nonzero
//! element is invertible.

use rand::RngCore;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("duplicate evaluation point {0}")]
    DuplicatePoint(u64),
    #[error("matrix is singular")]
    Singular,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("evaluation point {0} is not a field element")]
    PointOutOfRange(u64),
}

/// Deterministic Miller-Rabin over the witness set that decides primality for
/// every `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime `p >= n`. Panics if no such prime fits in `u64`.
pub fn next_prime_at_least(n: u64) -> u64 {
    let mut c = n.max(2);
    loop {
        if is_prime(c) {
            return c;
        }
        c = c.checked_add(1).expect("prime search overflowed u64");
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// A prime field F_q, carried by value everywhere an element context is
/// needed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Field {
    modulus: u64,
}

impl Field {
    /// Builds the field, verifying primality of the modulus.
    pub fn new(modulus: u64) -> Result<Self, FieldError> {
        if !is_prime(modulus) {
            return Err(FieldError::NotPrime(modulus));
        }
        Ok(Field { modulus })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn reduce(&self, a: u64) -> u64 {
        a % self.modulus
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        debug_assert!(a < self.modulus && b < self.modulus);
        let s = a + b;
        if s >= self.modulus {
            s - self.modulus
        } else {
            s
        }
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        debug_assert!(a < self.modulus && b < self.modulus);
        if a >= b {
            a - b
        } else {
            a + self.modulus - b
        }
    }

    pub fn neg(&self, a: u64) -> u64 {
        debug_assert!(a < self.modulus);
        if a == 0 {
            0
        } else {
            self.modulus - a
        }
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        debug_assert!(a < self.modulus && b < self.modulus);
        mul_mod(a, b, self.modulus)
    }

    pub fn pow(&self, base: u64, exp: u64) -> u64 {
        debug_assert!(base < self.modulus);
        pow_mod(base, exp, self.modulus)
    }

    /// Multiplicative inverse by Fermat's little theorem.
    ///
    /// # Panics
    ///
    /// Panics on zero input.
    pub fn inv(&self, a: u64) -> u64 {
        assert!(a != 0, "zero has no inverse");
        self.pow(a, self.modulus - 2)
    }

    pub fn div(&self, a: u64, b: u64) -> u64 {
        self.mul(a, self.inv(b))
    }

    /// Uniform element via rejection sampling on `next_u64`. The acceptance
    /// threshold is the largest multiple of q below 2^64, so every residue is
    /// hit with equal probability. This exact loop is part of the documented
    /// reproducibility contract.
    pub fn sample(&self, rng: &mut dyn RngCore) -> u64 {
        let q = self.modulus;
        let cutoff = u64::MAX - (u64::MAX % q + 1) % q;
        loop {
            let x = rng.next_u64();
            if x <= cutoff || cutoff == u64::MAX {
                return x % q;
            }
        }
    }

    /// Uniform nonzero element: a uniform draw from `[0, q-1)` shifted by one.
    pub fn sample_nonzero(&self, rng: &mut dyn RngCore) -> u64 {
        let q = self.modulus;
        let cutoff_mod = q - 1;
        let cutoff = u64::MAX - (u64::MAX % cutoff_mod + 1) % cutoff_mod;
        loop {
            let x = rng.next_u64();
            if x <= cutoff || cutoff == u64::MAX {
                return 1 + x % cutoff_mod;
            }
        }
    }
}

/// Dense row-major matrix over a fixed prime field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldMatrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl FieldMatrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        FieldMatrix {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from row-major entries, reducing each into `[0, q)`.
    pub fn from_rows(field: Field, rows: &[Vec<u64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        let data = rows
            .iter()
            .flat_map(|r| r.iter().map(|&v| field.reduce(v)))
            .collect();
        FieldMatrix {
            field,
            rows: rows.len(),
            cols,
            data,
        }
    }

    /// Vandermonde matrix on `points` with `cols` columns: entry (i, j) is
    /// `points[i]^j` for j in `0..cols`.
    pub fn vandermonde(field: Field, points: &[u64], cols: usize) -> Result<Self, FieldError> {
        for (i, &p) in points.iter().enumerate() {
            if p >= field.modulus() {
                return Err(FieldError::PointOutOfRange(p));
            }
            if points[..i].contains(&p) {
                return Err(FieldError::DuplicatePoint(p));
            }
        }
        let mut m = Self::zeros(field, points.len(), cols);
        for (i, &p) in points.iter().enumerate() {
            let mut acc = 1u64;
            for j in 0..cols {
                m.set(i, j, acc);
                acc = field.mul(acc, p);
            }
        }
        Ok(m)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        debug_assert!(v < self.field.modulus());
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u64] {
        assert!(r < self.rows, "row out of bounds");
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn set_row(&mut self, r: usize, values: &[u64]) {
        assert!(values.len() == self.cols, "row length mismatch");
        debug_assert!(values.iter().all(|&v| v < self.field.modulus()));
        self.data[r * self.cols..(r + 1) * self.cols].copy_from_slice(values);
    }

    pub fn column(&self, c: usize) -> Vec<u64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    /// New matrix keeping `rows` in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut out = Self::zeros(self.field, rows.len(), self.cols);
        for (i, &r) in rows.iter().enumerate() {
            out.set_row(i, self.row(r));
        }
        out
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &Self) -> Self {
        assert!(self.field == other.field, "field mismatch");
        assert!(self.rows == other.rows, "row count mismatch");
        let mut out = Self::zeros(self.field, self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            out.data[r * out.cols..r * out.cols + self.cols].copy_from_slice(self.row(r));
            out.data[r * out.cols + self.cols..(r + 1) * out.cols].copy_from_slice(other.row(r));
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert!(self.field == other.field, "field mismatch");
        assert!(
            self.cols == other.rows,
            "matmul shape mismatch: {}x{} * {}x{}",
            self.rows,
            self.cols,
            other.rows,
            other.cols
        );
        let f = self.field;
        let q = f.modulus() as u128;
        let mut out = Self::zeros(f, self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc: u128 = 0;
                for k in 0..self.cols {
                    acc += self.get(r, k) as u128 * other.get(k, c) as u128;
                    if acc >= u128::MAX / 2 {
                        acc %= q;
                    }
                }
                out.set(r, c, (acc % q) as u64);
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert!(self.field == other.field, "field mismatch");
        assert!(
            self.rows == other.rows && self.cols == other.cols,
            "add shape mismatch"
        );
        let mut out = self.clone();
        for (a, &b) in out.data.iter_mut().zip(&other.data) {
            *a = self.field.add(*a, b);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert!(self.field == other.field, "field mismatch");
        assert!(
            self.rows == other.rows && self.cols == other.cols,
            "sub shape mismatch"
        );
        let mut out = self.clone();
        for (a, &b) in out.data.iter_mut().zip(&other.data) {
            *a = self.field.sub(*a, b);
        }
        out
    }

    pub fn scale(&self, s: u64) -> Self {
        let mut out = self.clone();
        for a in &mut out.data {
            *a = self.field.mul(*a, s);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    /// Inverse by Gauss-Jordan elimination with first-nonzero pivoting.
    pub fn invert(&self) -> Result<Self, FieldError> {
        if self.rows != self.cols {
            return Err(FieldError::ShapeMismatch(format!(
                "cannot invert {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let f = self.field;
        let mut a = self.clone();
        let mut inv = Self::identity(f, n);
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| a.get(r, col) != 0)
                .ok_or(FieldError::Singular)?;
            if pivot != col {
                a.swap_rows(pivot, col);
                inv.swap_rows(pivot, col);
            }
            let scale = f.inv(a.get(col, col));
            a.scale_row(col, scale);
            inv.scale_row(col, scale);
            for r in 0..n {
                if r != col {
                    let factor = a.get(r, col);
                    if factor != 0 {
                        a.sub_scaled_row(r, col, factor);
                        inv.sub_scaled_row(r, col, factor);
                    }
                }
            }
        }
        Ok(inv)
    }

    /// Solves `self * X = rhs` for a square system with a multi-column right
    /// hand side.
    pub fn solve(&self, rhs: &Self) -> Result<Self, FieldError> {
        if self.rows != self.cols {
            return Err(FieldError::ShapeMismatch(format!(
                "solve needs a square system, got {}x{}",
                self.rows, self.cols
            )));
        }
        if rhs.rows != self.rows {
            return Err(FieldError::ShapeMismatch(format!(
                "rhs has {} rows, system has {}",
                rhs.rows, self.rows
            )));
        }
        assert!(self.field == rhs.field, "field mismatch");
        let n = self.rows;
        let f = self.field;
        let mut a = self.clone();
        let mut b = rhs.clone();
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| a.get(r, col) != 0)
                .ok_or(FieldError::Singular)?;
            if pivot != col {
                a.swap_rows(pivot, col);
                b.swap_rows(pivot, col);
            }
            let scale = f.inv(a.get(col, col));
            a.scale_row(col, scale);
            b.scale_row(col, scale);
            for r in col + 1..n {
                let factor = a.get(r, col);
                if factor != 0 {
                    a.sub_scaled_row(r, col, factor);
                    b.sub_scaled_row(r, col, factor);
                }
            }
        }
        for col in (0..n).rev() {
            for r in 0..col {
                let factor = a.get(r, col);
                if factor != 0 {
                    a.sub_scaled_row(r, col, factor);
                    b.sub_scaled_row(r, col, factor);
                }
            }
        }
        Ok(b)
    }

    fn swap_rows(&mut self, r1: usize, r2: usize) {
        if r1 == r2 {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(r1 * self.cols + c, r2 * self.cols + c);
        }
    }

    fn scale_row(&mut self, r: usize, s: u64) {
        for c in 0..self.cols {
            let v = self.field.mul(self.get(r, c), s);
            self.set(r, c, v);
        }
    }

    /// row r -= factor * row src
    fn sub_scaled_row(&mut self, r: usize, src: usize, factor: u64) {
        for c in 0..self.cols {
            let v = self
                .field
                .sub(self.get(r, c), self.field.mul(self.get(src, c), factor));
            self.set(r, c, v);
        }
    }
}

/// Dot product of two equal-length vectors of residues.
pub fn dot(field: Field, a: &[u64], b: &[u64]) -> u64 {
    assert!(a.len() == b.len(), "dot length mismatch");
    let q = field.modulus() as u128;
    let mut acc: u128 = 0;
    for (&x, &y) in a.iter().zip(b) {
        acc += x as u128 * y as u128;
        if acc >= u128::MAX / 2 {
            acc %= q;
        }
    }
    (acc % q) as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn primality_small_and_frozen() {
        let primes: Vec<u64> = (0..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(
            primes,
            vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]
        );
        assert!(is_prime(1031));
        assert!(is_prime(1_000_003));
        assert!(!is_prime(1_000_001));
        assert!(is_prime(67));
        assert!(is_prime(257));
        assert!(is_prime(4099));
    }

    #[test]
    fn next_prime_matches_trial_division_oracle() {
        // Oracle: naive trial division, checked well past the moduli the
        // protocol tests use.
        fn naive_prime(n: u64) -> bool {
            if n < 2 {
                return false;
            }
            let mut d = 2;
            while d * d <= n {
                if n % d == 0 {
                    return false;
                }
                d += 1;
            }
            true
        }
        for n in [2u64, 64, 256, 1024, 4096, 10000, 999_983, 1_000_000] {
            let mut expect = n;
            while !naive_prime(expect) {
                expect += 1;
            }
            assert_eq!(next_prime_at_least(n), expect, "n = {n}");
        }
        assert_eq!(next_prime_at_least(64), 67);
        assert_eq!(next_prime_at_least(256), 257);
        assert_eq!(next_prime_at_least(1024), 1031);
        assert_eq!(next_prime_at_least(4096), 4099);
    }

    #[test]
    fn rejects_composite_modulus() {
        assert_eq!(Field::new(1024).unwrap_err(), FieldError::NotPrime(1024));
        assert_eq!(Field::new(1).unwrap_err(), FieldError::NotPrime(1));
    }

    #[test]
    fn element_ops_frozen_cases() {
        let f = Field::new(1031).unwrap();
        assert_eq!(f.add(1000, 100), 69);
        assert_eq!(f.sub(3, 5), 1029);
        assert_eq!(f.mul(999, 999), f.reduce(999 * 999));
        assert_eq!(f.pow(7, 0), 1);
        assert_eq!(f.mul(f.inv(457), 457), 1);
        let f5 = Field::new(5).unwrap();
        assert_eq!(f5.inv(2), 3);
        assert_eq!(f5.inv(4), 4);
        assert_eq!(f5.neg(0), 0);
        assert_eq!(f5.neg(2), 3);
    }

    proptest! {
        #[test]
        fn field_axioms_hold(a in 0u64..1031, b in 0u64..1031, c in 0u64..1031) {
            let f = Field::new(1031).unwrap();
            prop_assert_eq!(f.add(a, b), f.add(b, a));
            prop_assert_eq!(f.mul(a, b), f.mul(b, a));
            prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            prop_assert_eq!(f.add(a, f.neg(a)), 0);
            prop_assert_eq!(f.sub(a, b), f.add(a, f.neg(b)));
            if a != 0 {
                prop_assert_eq!(f.mul(a, f.inv(a)), 1);
                prop_assert_eq!(f.div(b, a), f.mul(b, f.inv(a)));
            }
        }

        #[test]
        fn pow_matches_repeated_multiplication(base in 0u64..101, exp in 0u64..32) {
            let f = Field::new(101).unwrap();
            let mut acc = 1u64;
            for _ in 0..exp {
                acc = f.mul(acc, base);
            }
            prop_assert_eq!(f.pow(base, exp), acc);
        }
    }

    #[test]
    fn sampling_is_uniform_within_tolerance() {
        let f = Field::new(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut counts = [0u64; 5];
        let trials = 50_000;
        for _ in 0..trials {
            counts[f.sample(&mut rng) as usize] += 1;
        }
        // Expected 10_000 per bucket; 5 sigma is about 447.
        for (v, &c) in counts.iter().enumerate() {
            assert!(
                (c as i64 - 10_000).unsigned_abs() < 450,
                "residue {v} count {c}"
            );
        }
        for _ in 0..1000 {
            assert!(f.sample_nonzero(&mut rng) != 0);
        }
    }

    #[test]
    fn vandermonde_frozen_values() {
        let f = Field::new(7).unwrap();
        let m = FieldMatrix::vandermonde(f, &[1, 2, 3], 2).unwrap();
        assert_eq!(m.row(0), &[1, 1]);
        assert_eq!(m.row(1), &[1, 2]);
        assert_eq!(m.row(2), &[1, 3]);

        // A zero point contributes the row (1, 0, 0, ...).
        let f5 = Field::new(5).unwrap();
        let m = FieldMatrix::vandermonde(f5, &[1, 2, 0], 2).unwrap();
        assert_eq!(m.row(0), &[1, 1]);
        assert_eq!(m.row(1), &[1, 2]);
        assert_eq!(m.row(2), &[1, 0]);
    }

    #[test]
    fn vandermonde_entries_match_power_oracle() {
        let f = Field::new(101).unwrap();
        let points = [3u64, 10, 44, 97];
        let m = FieldMatrix::vandermonde(f, &points, 5).unwrap();
        for (i, &p) in points.iter().enumerate() {
            for j in 0..5 {
                // Oracle: independent powering, not the constructor's loop.
                let mut expect = 1u64;
                for _ in 0..j {
                    expect = f.mul(expect, p);
                }
                assert_eq!(m.get(i, j), expect);
            }
        }
    }

    #[test]
    fn vandermonde_rejects_duplicates_and_out_of_range() {
        let f = Field::new(7).unwrap();
        assert_eq!(
            FieldMatrix::vandermonde(f, &[1, 2, 2], 3).unwrap_err(),
            FieldError::DuplicatePoint(2)
        );
        assert_eq!(
            FieldMatrix::vandermonde(f, &[1, 9], 2).unwrap_err(),
            FieldError::PointOutOfRange(9)
        );
    }

    #[test]
    fn vandermonde_with_distinct_points_is_invertible() {
        let f = Field::new(1031).unwrap();
        for n in 1..=6 {
            let points: Vec<u64> = (1..=n as u64).collect();
            let v = FieldMatrix::vandermonde(f, &points, n).unwrap();
            let vi = v.invert().unwrap();
            assert_eq!(v.matmul(&vi), FieldMatrix::identity(f, n));
        }
    }

    #[test]
    fn invert_round_trips_random_matrices() {
        let f = Field::new(1031).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut inverted = 0;
        for _ in 0..200 {
            let mut m = FieldMatrix::zeros(f, 4, 4);
            for r in 0..4 {
                for c in 0..4 {
                    m.set(r, c, f.sample(&mut rng));
                }
            }
            if let Ok(mi) = m.invert() {
                inverted += 1;
                assert_eq!(m.matmul(&mi), FieldMatrix::identity(f, 4));
                assert_eq!(mi.matmul(&m), FieldMatrix::identity(f, 4));
            }
        }
        // Random 4x4 matrices over F_1031 are almost always invertible.
        assert!(inverted > 190);
    }

    #[test]
    fn invert_reports_singular() {
        let f = Field::new(7).unwrap();
        let m = FieldMatrix::from_rows(f, &[vec![1, 2], vec![2, 4]]);
        assert_eq!(m.invert().unwrap_err(), FieldError::Singular);
        let z = FieldMatrix::zeros(f, 3, 3);
        assert_eq!(z.invert().unwrap_err(), FieldError::Singular);
    }

    #[test]
    fn solve_recovers_planted_solution() {
        let f = Field::new(101).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let mut a = FieldMatrix::zeros(f, 5, 5);
            for r in 0..5 {
                for c in 0..5 {
                    a.set(r, c, f.sample(&mut rng));
                }
            }
            let mut x = FieldMatrix::zeros(f, 5, 3);
            for r in 0..5 {
                for c in 0..3 {
                    x.set(r, c, f.sample(&mut rng));
                }
            }
            let b = a.matmul(&x);
            match a.solve(&b) {
                Ok(got) => assert_eq!(got, x),
                Err(FieldError::Singular) => {}
                Err(e) => panic!("unexpected error {e}"),
            }
        }
    }

    #[test]
    fn solve_shape_errors() {
        let f = Field::new(7).unwrap();
        let a = FieldMatrix::zeros(f, 2, 3);
        let b = FieldMatrix::zeros(f, 2, 1);
        assert!(matches!(
            a.solve(&b).unwrap_err(),
            FieldError::ShapeMismatch(_)
        ));
        let a = FieldMatrix::identity(f, 3);
        let b = FieldMatrix::zeros(f, 2, 1);
        assert!(matches!(
            a.solve(&b).unwrap_err(),
            FieldError::ShapeMismatch(_)
        ));
    }

    #[test]
    fn matmul_identity_and_associativity() {
        let f = Field::new(31).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rand_matrix = |rng: &mut ChaCha8Rng, r, c| {
            let mut m = FieldMatrix::zeros(f, r, c);
            for i in 0..r {
                for j in 0..c {
                    m.set(i, j, f.sample(rng));
                }
            }
            m
        };
        let a = rand_matrix(&mut rng, 3, 4);
        let b = rand_matrix(&mut rng, 4, 2);
        let c = rand_matrix(&mut rng, 2, 5);
        assert_eq!(FieldMatrix::identity(f, 3).matmul(&a), a);
        assert_eq!(a.matmul(&b).matmul(&c), a.matmul(&b.matmul(&c)));
    }

    #[test]
    fn empty_matrices_compose() {
        let f = Field::new(7).unwrap();
        let a = FieldMatrix::zeros(f, 3, 0);
        let b = FieldMatrix::zeros(f, 0, 4);
        let prod = a.matmul(&b);
        assert_eq!((prod.rows(), prod.cols()), (3, 4));
        assert!(prod.is_zero());
    }

    #[test]
    fn hstack_and_select_rows() {
        let f = Field::new(7).unwrap();
        let a = FieldMatrix::from_rows(f, &[vec![1, 2], vec![3, 4]]);
        let b = FieldMatrix::from_rows(f, &[vec![5], vec![6]]);
        let s = a.hstack(&b);
        assert_eq!(s.row(0), &[1, 2, 5]);
        assert_eq!(s.row(1), &[3, 4, 6]);
        let picked = s.select_rows(&[1]);
        assert_eq!(picked.row(0), &[3, 4, 6]);
    }

    #[test]
    fn dot_matches_matmul() {
        let f = Field::new(101).unwrap();
        let a = [3u64, 7, 11];
        let b = [5u64, 2, 100];
        let expect = f.add(f.add(f.mul(3, 5), f.mul(7, 2)), f.mul(11, 100));
        assert_eq!(dot(f, &a, &b), expect);
    }
}
