//! Dense exact arithmetic over Z_q, plus the integer vectors/matrices that
//! carry Gaussian samples before reduction.
//!
//! Residues are stored as `u64` in `[0, q)`, row-major. The modulus is capped
//! at 2^62 so that any product of two residues fits in a 128-bit intermediate.

use crate::error::{Error, Result};
use rand::Rng;

/// Largest supported modulus.
pub const MAX_MODULUS: u64 = 1 << 62;

#[inline]
fn check_modulus(q: u64) -> Result<()> {
    if q < 2 || q > MAX_MODULUS {
        return Err(Error::InvalidParams(format!(
            "modulus {q} outside [2, 2^62]"
        )));
    }
    Ok(())
}

#[inline]
pub(crate) fn add_mod(a: u64, b: u64, q: u64) -> u64 {
    let s = a + b;
    if s >= q {
        s - q
    } else {
        s
    }
}

#[inline]
pub(crate) fn sub_mod(a: u64, b: u64, q: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + q - b
    }
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

/// Balanced representative of a residue, in (-q/2, q/2].
#[inline]
pub fn lift_balanced(e: u64, q: u64) -> i64 {
    debug_assert!(e < q);
    if 2 * (e as u128) > q as u128 {
        e as i64 - q as i64
    } else {
        e as i64
    }
}

/// Reduce a signed integer into [0, q).
#[inline]
pub fn reduce_signed(x: i64, q: u64) -> u64 {
    let r = x.rem_euclid(q as i64);
    r as u64
}

/// Modular inverse via extended Euclid; `None` when gcd(a, q) != 1.
pub fn inv_mod(a: u64, q: u64) -> Option<u64> {
    let (mut r0, mut r1) = (q as i128, (a % q) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let d = r0 / r1;
        (r0, r1) = (r1, r0 - d * r1);
        (t0, t1) = (t1, t0 - d * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(q as i128) as u64)
}

/// Dense matrix over Z_q, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZqMatrix {
    rows: usize,
    cols: usize,
    q: u64,
    entries: Vec<u64>,
}

impl ZqMatrix {
    /// All-zero matrix.
    pub fn zeros(rows: usize, cols: usize, q: u64) -> Result<Self> {
        check_modulus(q)?;
        Ok(Self {
            rows,
            cols,
            q,
            entries: vec![0; rows * cols],
        })
    }

    /// Identity matrix of size n.
    pub fn identity(n: usize, q: u64) -> Result<Self> {
        let mut m = Self::zeros(n, n, q)?;
        for i in 0..n {
            m.set(i, i, 1);
        }
        Ok(m)
    }

    /// Build from a row-major entry list; entries are reduced mod q.
    pub fn from_entries(rows: usize, cols: usize, q: u64, entries: &[u64]) -> Result<Self> {
        check_modulus(q)?;
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(Self {
            rows,
            cols,
            q,
            entries: entries.iter().map(|&e| e % q).collect(),
        })
    }

    /// Uniformly random matrix.
    pub fn uniform<R: Rng + ?Sized>(rows: usize, cols: usize, q: u64, rng: &mut R) -> Result<Self> {
        check_modulus(q)?;
        Ok(Self {
            rows,
            cols,
            q,
            entries: (0..rows * cols).map(|_| rng.gen_range(0..q)).collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    /// Row-major entry slice.
    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.entries[i * self.cols + j] = v % self.q;
    }

    fn check_same_modulus(&self, other: &Self) -> Result<()> {
        if self.q != other.q {
            return Err(Error::ModulusMismatch(self.q, other.q));
        }
        Ok(())
    }

    /// Exact product mod q.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_modulus(other)?;
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "mul: {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let q = self.q as u128;
        let mut out = Self::zeros(self.rows, other.cols, self.q)?;
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = 0u128;
                for l in 0..self.cols {
                    acc += self.get(i, l) as u128 * other.get(l, j) as u128;
                    // Keep the accumulator well below overflow; q^2 < 2^124.
                    if acc >= 1 << 126 {
                        acc %= q;
                    }
                }
                out.set(i, j, (acc % q) as u64);
            }
        }
        Ok(out)
    }

    /// Entry-wise sum mod q.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_modulus(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch("add: shape mismatch".into()));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| add_mod(a, b, self.q))
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            q: self.q,
            entries,
        })
    }

    /// Entry-wise difference mod q.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_modulus(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch("sub: shape mismatch".into()));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| sub_mod(a, b, self.q))
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            q: self.q,
            entries,
        })
    }

    /// Scalar multiple mod q.
    pub fn scalar_mul(&self, c: u64) -> Self {
        let c = c % self.q;
        Self {
            rows: self.rows,
            cols: self.cols,
            q: self.q,
            entries: self
                .entries
                .iter()
                .map(|&e| mul_mod(e, c, self.q))
                .collect(),
        }
    }

    /// Transpose.
    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows, self.q).expect("modulus already checked");
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    /// Matrix-vector product A·v.
    pub fn mul_vec(&self, v: &ZqVector) -> Result<ZqVector> {
        if self.q != v.q {
            return Err(Error::ModulusMismatch(self.q, v.q));
        }
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch(format!(
                "mul_vec: {}x{} by {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let q = self.q as u128;
        let mut out = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut acc = 0u128;
            for j in 0..self.cols {
                acc += self.get(i, j) as u128 * v.entries[j] as u128;
                if acc >= 1 << 126 {
                    acc %= q;
                }
            }
            out.push((acc % q) as u64);
        }
        ZqVector::from_entries(self.q, &out)
    }

    /// Row-vector product vᵗ·A.
    pub fn left_vec_mul(&self, v: &ZqVector) -> Result<ZqVector> {
        if self.q != v.q {
            return Err(Error::ModulusMismatch(self.q, v.q));
        }
        if self.rows != v.len() {
            return Err(Error::DimensionMismatch(format!(
                "left_vec_mul: {} by {}x{}",
                v.len(),
                self.rows,
                self.cols
            )));
        }
        let q = self.q as u128;
        let mut out = Vec::with_capacity(self.cols);
        for j in 0..self.cols {
            let mut acc = 0u128;
            for i in 0..self.rows {
                acc += v.entries[i] as u128 * self.get(i, j) as u128;
                if acc >= 1 << 126 {
                    acc %= q;
                }
            }
            out.push((acc % q) as u64);
        }
        ZqVector::from_entries(self.q, &out)
    }

    /// Product A·R with a signed integer matrix, reduced mod q.
    pub fn mul_int(&self, r: &IntMatrix) -> Result<Self> {
        if self.cols != r.rows() {
            return Err(Error::DimensionMismatch(format!(
                "mul_int: {}x{} by {}x{}",
                self.rows,
                self.cols,
                r.rows(),
                r.cols()
            )));
        }
        let q = self.q as i128;
        let mut out = Self::zeros(self.rows, r.cols(), self.q)?;
        for i in 0..self.rows {
            for j in 0..r.cols() {
                let mut acc = 0i128;
                for l in 0..self.cols {
                    acc += self.get(i, l) as i128 * r.get(l, j) as i128;
                    if acc.unsigned_abs() >= 1 << 126 {
                        acc = acc.rem_euclid(q);
                    }
                }
                out.set(i, j, acc.rem_euclid(q) as u64);
            }
        }
        Ok(out)
    }

    /// Horizontal concatenation [self | other].
    pub fn hstack(&self, other: &Self) -> Result<Self> {
        self.check_same_modulus(other)?;
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch("hstack: row mismatch".into()));
        }
        let mut out = Self::zeros(self.rows, self.cols + other.cols, self.q)?;
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j));
            }
            for j in 0..other.cols {
                out.set(i, self.cols + j, other.get(i, j));
            }
        }
        Ok(out)
    }

    /// Copy of columns [start, end).
    pub fn col_range(&self, start: usize, end: usize) -> Result<Self> {
        if start > end || end > self.cols {
            return Err(Error::DimensionMismatch("col_range out of bounds".into()));
        }
        let mut out = Self::zeros(self.rows, end - start, self.q)?;
        for i in 0..self.rows {
            for j in start..end {
                out.set(i, j - start, self.get(i, j));
            }
        }
        Ok(out)
    }

    /// Add `other` into the block of columns starting at `col_offset`.
    pub fn add_into_cols(&self, col_offset: usize, other: &Self) -> Result<Self> {
        self.check_same_modulus(other)?;
        if self.rows != other.rows || col_offset + other.cols > self.cols {
            return Err(Error::DimensionMismatch("add_into_cols: bad block".into()));
        }
        let mut out = self.clone();
        for i in 0..self.rows {
            for j in 0..other.cols {
                let v = add_mod(out.get(i, col_offset + j), other.get(i, j), self.q);
                out.set(i, col_offset + j, v);
            }
        }
        Ok(out)
    }

    /// Inverse mod q by Gauss-Jordan elimination; `None` when not invertible.
    pub fn inverse(&self) -> Option<Self> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let q = self.q;
        let mut a = self.clone();
        let mut inv = Self::identity(n, q).ok()?;
        for col in 0..n {
            // Find a row at or below the diagonal whose pivot is invertible.
            let pivot_row = (col..n).find(|&r| inv_mod(a.get(r, col), q).is_some())?;
            if pivot_row != col {
                for j in 0..n {
                    let (x, y) = (a.get(col, j), a.get(pivot_row, j));
                    a.set(col, j, y);
                    a.set(pivot_row, j, x);
                    let (x, y) = (inv.get(col, j), inv.get(pivot_row, j));
                    inv.set(col, j, y);
                    inv.set(pivot_row, j, x);
                }
            }
            let piv_inv = inv_mod(a.get(col, col), q)?;
            for j in 0..n {
                a.set(col, j, mul_mod(a.get(col, j), piv_inv, q));
                inv.set(col, j, mul_mod(inv.get(col, j), piv_inv, q));
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a.get(r, col);
                if f == 0 {
                    continue;
                }
                for j in 0..n {
                    let v = sub_mod(a.get(r, j), mul_mod(f, a.get(col, j), q), q);
                    a.set(r, j, v);
                    let v = sub_mod(inv.get(r, j), mul_mod(f, inv.get(col, j), q), q);
                    inv.set(r, j, v);
                }
            }
        }
        Some(inv)
    }
}

/// Dense vector over Z_q.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZqVector {
    q: u64,
    entries: Vec<u64>,
}

impl ZqVector {
    pub fn zeros(len: usize, q: u64) -> Result<Self> {
        check_modulus(q)?;
        Ok(Self {
            q,
            entries: vec![0; len],
        })
    }

    pub fn from_entries(q: u64, entries: &[u64]) -> Result<Self> {
        check_modulus(q)?;
        Ok(Self {
            q,
            entries: entries.iter().map(|&e| e % q).collect(),
        })
    }

    pub fn uniform<R: Rng + ?Sized>(len: usize, q: u64, rng: &mut R) -> Result<Self> {
        check_modulus(q)?;
        Ok(Self {
            q,
            entries: (0..len).map(|_| rng.gen_range(0..q)).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize) -> u64 {
        self.entries[i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: u64) {
        self.entries[i] = v % self.q;
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.q != other.q {
            return Err(Error::ModulusMismatch(self.q, other.q));
        }
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch("vector add: length".into()));
        }
        Ok(Self {
            q: self.q,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| add_mod(a, b, self.q))
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.q != other.q {
            return Err(Error::ModulusMismatch(self.q, other.q));
        }
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch("vector sub: length".into()));
        }
        Ok(Self {
            q: self.q,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| sub_mod(a, b, self.q))
                .collect(),
        })
    }

    pub fn scalar_mul(&self, c: u64) -> Self {
        let c = c % self.q;
        Self {
            q: self.q,
            entries: self
                .entries
                .iter()
                .map(|&e| mul_mod(e, c, self.q))
                .collect(),
        }
    }

    /// Inner product mod q.
    pub fn dot(&self, other: &Self) -> Result<u64> {
        if self.q != other.q {
            return Err(Error::ModulusMismatch(self.q, other.q));
        }
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch("dot: length".into()));
        }
        let q = self.q as u128;
        let mut acc = 0u128;
        for (a, b) in self.entries.iter().zip(&other.entries) {
            acc += *a as u128 * *b as u128;
            if acc >= 1 << 126 {
                acc %= q;
            }
        }
        Ok((acc % q) as u64)
    }

    /// Sub-vector [start, end).
    pub fn slice(&self, start: usize, end: usize) -> Result<Self> {
        if start > end || end > self.len() {
            return Err(Error::DimensionMismatch("slice out of bounds".into()));
        }
        Ok(Self {
            q: self.q,
            entries: self.entries[start..end].to_vec(),
        })
    }

    /// Concatenation [self ; other].
    pub fn concat(&self, other: &Self) -> Result<Self> {
        if self.q != other.q {
            return Err(Error::ModulusMismatch(self.q, other.q));
        }
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        Ok(Self {
            q: self.q,
            entries,
        })
    }
}

/// Balanced lift of every entry into (-q/2, q/2].
pub fn balanced_lift(v: &ZqVector) -> IntVector {
    IntVector::new(
        v.entries
            .iter()
            .map(|&e| lift_balanced(e, v.q))
            .collect::<Vec<_>>(),
    )
}

/// The lattice hash f_W(x) := W·x mod q; x is reduced mod q before the product.
pub fn f_hash(w: &ZqMatrix, x: &IntVector) -> Result<ZqVector> {
    if w.cols() != x.len() {
        return Err(Error::DimensionMismatch(format!(
            "f_hash: {}x{} by {}",
            w.rows(),
            w.cols(),
            x.len()
        )));
    }
    let reduced = x.reduce_mod(w.modulus())?;
    w.mul_vec(&reduced)
}

/// Signed integer vector (Gaussian samples, lifted residues).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntVector {
    entries: Vec<i64>,
}

impl IntVector {
    pub fn new(entries: Vec<i64>) -> Self {
        Self { entries }
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            entries: vec![0; len],
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize) -> i64 {
        self.entries[i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: i64) {
        self.entries[i] = v;
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch("int add: length".into()));
        }
        Ok(Self::new(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        ))
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|&e| (e as f64) * (e as f64))
            .sum::<f64>()
            .sqrt()
    }

    /// Max absolute entry.
    pub fn inf_norm(&self) -> i64 {
        self.entries.iter().map(|e| e.abs()).max().unwrap_or(0)
    }

    /// Reduce entries into [0, q).
    pub fn reduce_mod(&self, q: u64) -> Result<ZqVector> {
        check_modulus(q)?;
        Ok(ZqVector {
            q,
            entries: self.entries.iter().map(|&e| reduce_signed(e, q)).collect(),
        })
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        Self::new(entries)
    }

    pub fn slice(&self, start: usize, end: usize) -> Self {
        Self::new(self.entries[start..end].to_vec())
    }
}

/// Signed integer matrix, row-major (trapdoors, Gaussian sample blocks).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![0; rows * cols],
        }
    }

    pub fn from_entries(rows: usize, cols: usize, entries: Vec<i64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch("int matrix entry count".into()));
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.entries[i * self.cols + j] = v;
    }

    /// Column j as an IntVector.
    pub fn col(&self, j: usize) -> IntVector {
        IntVector::new((0..self.rows).map(|i| self.get(i, j)).collect())
    }

    /// Sum of scalar multiples: Σ cᵢ·Mᵢ.
    pub fn linear_combination(mats: &[&IntMatrix], coeffs: &[i64]) -> Result<IntMatrix> {
        if mats.is_empty() || mats.len() != coeffs.len() {
            return Err(Error::DimensionMismatch(
                "linear_combination: operand count".into(),
            ));
        }
        let (rows, cols) = (mats[0].rows, mats[0].cols);
        let mut out = IntMatrix::zeros(rows, cols);
        for (m, &c) in mats.iter().zip(coeffs) {
            if m.rows != rows || m.cols != cols {
                return Err(Error::DimensionMismatch("linear_combination: shape".into()));
            }
            for (o, e) in out.entries.iter_mut().zip(&m.entries) {
                *o += c * e;
            }
        }
        Ok(out)
    }
}
