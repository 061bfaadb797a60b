//! Exact linear algebra over the prime field `Z_q`.
//!
//! Entries are canonical representatives in `[0, q)`; the centered
//! representative convention is `(-q/2, q/2]` throughout.

use crate::error::{Error, Result};
use crate::rng;

/// Dense vector over `Z_q`, entries reduced to `[0, q)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ZqVector {
    pub q: u64,
    entries: Vec<u64>,
}

/// Dense row-major matrix over `Z_q`, entries reduced to `[0, q)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZqMatrix {
    pub q: u64,
    pub rows: usize,
    pub cols: usize,
    entries: Vec<u64>,
}

/// Centered representative of `v mod q` in `(-q/2, q/2]`.
pub fn centered(v: u64, q: u64) -> i64 {
    let r = v % q;
    if 2 * r > q {
        r as i64 - q as i64
    } else {
        r as i64
    }
}

/// Reduce a signed integer into `[0, q)`.
pub fn reduce_i64(v: i64, q: u64) -> u64 {
    v.rem_euclid(q as i64) as u64
}

impl ZqVector {
    pub fn zero(len: usize, q: u64) -> Self {
        ZqVector { q, entries: vec![0; len] }
    }

    pub fn from_entries(entries: Vec<u64>, q: u64) -> Self {
        let entries = entries.into_iter().map(|e| e % q).collect();
        ZqVector { q, entries }
    }

    pub fn from_i64(entries: &[i64], q: u64) -> Self {
        ZqVector { q, entries: entries.iter().map(|&e| reduce_i64(e, q)).collect() }
    }

    pub fn uniform(len: usize, q: u64, rng: &mut rng::Rng) -> Self {
        ZqVector { q, entries: (0..len).map(|_| rng::uniform_u64(rng, q)).collect() }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> u64 {
        self.entries[i]
    }

    pub fn set(&mut self, i: usize, v: u64) {
        self.entries[i] = v % self.q;
    }

    /// Centered representatives of all entries.
    pub fn centered(&self) -> Vec<i64> {
        self.entries.iter().map(|&e| centered(e, self.q)).collect()
    }

    /// Euclidean norm of the centered representative.
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn norm_sq(&self) -> f64 {
        self.entries
            .iter()
            .map(|&e| {
                let c = centered(e, self.q) as f64;
                c * c
            })
            .sum()
    }

    pub fn inf_norm(&self) -> u64 {
        self.entries
            .iter()
            .map(|&e| centered(e, self.q).unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }

    pub fn dot(&self, other: &ZqVector) -> u64 {
        assert_eq!(self.len(), other.len());
        assert_eq!(self.q, other.q);
        let q = self.q as u128;
        let mut acc: u128 = 0;
        for (a, b) in self.entries.iter().zip(&other.entries) {
            acc = (acc + (*a as u128) * (*b as u128)) % q;
        }
        acc as u64
    }

    pub fn add(&self, other: &ZqVector) -> ZqVector {
        assert_eq!(self.len(), other.len());
        assert_eq!(self.q, other.q);
        ZqVector {
            q: self.q,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| (a + b) % self.q)
                .collect(),
        }
    }

    pub fn sub(&self, other: &ZqVector) -> ZqVector {
        assert_eq!(self.len(), other.len());
        assert_eq!(self.q, other.q);
        ZqVector {
            q: self.q,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| (a + self.q - b) % self.q)
                .collect(),
        }
    }

    pub fn neg(&self) -> ZqVector {
        ZqVector {
            q: self.q,
            entries: self.entries.iter().map(|&a| (self.q - a) % self.q).collect(),
        }
    }

    pub fn scale(&self, c: u64) -> ZqVector {
        let c = (c % self.q) as u128;
        ZqVector {
            q: self.q,
            entries: self
                .entries
                .iter()
                .map(|&a| ((a as u128 * c) % self.q as u128) as u64)
                .collect(),
        }
    }
}

impl ZqMatrix {
    pub fn zero(rows: usize, cols: usize, q: u64) -> Self {
        ZqMatrix { q, rows, cols, entries: vec![0; rows * cols] }
    }

    pub fn identity(n: usize, q: u64) -> Self {
        let mut m = Self::zero(n, n, q);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<u64>], q: u64) -> Self {
        let nrows = rows.len();
        let ncols = if nrows > 0 { rows[0].len() } else { 0 };
        let mut entries = Vec::with_capacity(nrows * ncols);
        for r in rows {
            assert_eq!(r.len(), ncols);
            entries.extend(r.iter().map(|&e| e % q));
        }
        ZqMatrix { q, rows: nrows, cols: ncols, entries }
    }

    pub fn from_entries(rows: usize, cols: usize, entries: Vec<u64>, q: u64) -> Self {
        assert_eq!(entries.len(), rows * cols);
        ZqMatrix { q, rows, cols, entries: entries.into_iter().map(|e| e % q).collect() }
    }

    pub fn uniform(rows: usize, cols: usize, q: u64, rng: &mut rng::Rng) -> Self {
        ZqMatrix {
            q,
            rows,
            cols,
            entries: (0..rows * cols).map(|_| rng::uniform_u64(rng, q)).collect(),
        }
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.entries[r * self.cols + c] = v % self.q;
    }

    pub fn row(&self, r: usize) -> ZqVector {
        ZqVector {
            q: self.q,
            entries: self.entries[r * self.cols..(r + 1) * self.cols].to_vec(),
        }
    }

    pub fn col(&self, c: usize) -> ZqVector {
        ZqVector {
            q: self.q,
            entries: (0..self.rows).map(|r| self.get(r, c)).collect(),
        }
    }

    pub fn transpose(&self) -> ZqMatrix {
        let mut t = ZqMatrix::zero(self.cols, self.rows, self.q);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn add(&self, other: &ZqMatrix) -> ZqMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        assert_eq!(self.q, other.q);
        ZqMatrix {
            q: self.q,
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| (a + b) % self.q)
                .collect(),
        }
    }

    pub fn sub(&self, other: &ZqMatrix) -> ZqMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        assert_eq!(self.q, other.q);
        ZqMatrix {
            q: self.q,
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| (a + self.q - b) % self.q)
                .collect(),
        }
    }

    pub fn scale(&self, c: u64) -> ZqMatrix {
        let c = (c % self.q) as u128;
        ZqMatrix {
            q: self.q,
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .map(|&a| ((a as u128 * c) % self.q as u128) as u64)
                .collect(),
        }
    }

    pub fn mul(&self, other: &ZqMatrix) -> ZqMatrix {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.q, other.q);
        let q = self.q as u128;
        let mut out = ZqMatrix::zero(self.rows, other.cols, self.q);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k) as u128;
                if a == 0 {
                    continue;
                }
                for c in 0..other.cols {
                    let cur = out.get(r, c) as u128;
                    out.entries[r * out.cols + c] =
                        ((cur + a * other.get(k, c) as u128) % q) as u64;
                }
            }
        }
        out
    }

    /// `A * v` (column-vector convention).
    pub fn mul_vec(&self, v: &ZqVector) -> ZqVector {
        assert_eq!(self.cols, v.len());
        assert_eq!(self.q, v.q);
        let q = self.q as u128;
        let entries = (0..self.rows)
            .map(|r| {
                let mut acc: u128 = 0;
                for c in 0..self.cols {
                    acc = (acc + self.get(r, c) as u128 * v.get(c) as u128) % q;
                }
                acc as u64
            })
            .collect();
        ZqVector { q: self.q, entries }
    }

    /// `v^T * A` (row-vector convention).
    pub fn vec_mul(&self, v: &ZqVector) -> ZqVector {
        assert_eq!(self.rows, v.len());
        assert_eq!(self.q, v.q);
        let q = self.q as u128;
        let entries = (0..self.cols)
            .map(|c| {
                let mut acc: u128 = 0;
                for r in 0..self.rows {
                    acc = (acc + v.get(r) as u128 * self.get(r, c) as u128) % q;
                }
                acc as u64
            })
            .collect();
        ZqVector { q: self.q, entries }
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hconcat(&self, other: &ZqMatrix) -> ZqMatrix {
        assert_eq!(self.rows, other.rows);
        assert_eq!(self.q, other.q);
        let mut out = ZqMatrix::zero(self.rows, self.cols + other.cols, self.q);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, c));
            }
            for c in 0..other.cols {
                out.set(r, self.cols + c, other.get(r, c));
            }
        }
        out
    }

    /// Vertical concatenation `[self ; other]`.
    pub fn vconcat(&self, other: &ZqMatrix) -> ZqMatrix {
        assert_eq!(self.cols, other.cols);
        assert_eq!(self.q, other.q);
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        ZqMatrix { q: self.q, rows: self.rows + other.rows, cols: self.cols, entries }
    }

    pub fn inf_norm(&self) -> u64 {
        self.entries
            .iter()
            .map(|&e| centered(e, self.q).unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }

    /// Rank over the field `Z_q` (q prime) by Gaussian elimination.
    pub fn rank(&self) -> usize {
        reduced_row_echelon(self).1
    }
}

fn inv_mod(a: u64, q: u64) -> u64 {
    // q prime: a^(q-2) mod q
    let mut base = a as u128 % q as u128;
    let mut exp = q - 2;
    let mut acc: u128 = 1;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % q as u128;
        }
        base = base * base % q as u128;
        exp >>= 1;
    }
    acc as u64
}

/// Row-reduce a copy of `a`; returns (echelon form, rank, pivot columns).
fn reduced_row_echelon(a: &ZqMatrix) -> (ZqMatrix, usize, Vec<usize>) {
    let q = a.q;
    let mut m = a.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m.cols {
        if r >= m.rows {
            break;
        }
        let mut pivot = None;
        for rr in r..m.rows {
            if m.get(rr, c) != 0 {
                pivot = Some(rr);
                break;
            }
        }
        let Some(pr) = pivot else { continue };
        for cc in 0..m.cols {
            let tmp = m.get(r, cc);
            m.set(r, cc, m.get(pr, cc));
            m.set(pr, cc, tmp);
        }
        let inv = inv_mod(m.get(r, c), q);
        for cc in 0..m.cols {
            m.set(r, cc, (m.get(r, cc) as u128 * inv as u128 % q as u128) as u64);
        }
        for rr in 0..m.rows {
            if rr != r && m.get(rr, c) != 0 {
                let f = m.get(rr, c);
                for cc in 0..m.cols {
                    let v = (m.get(rr, cc) as u128 + q as u128 * q as u128
                        - f as u128 * m.get(r, cc) as u128)
                        % q as u128;
                    m.set(rr, cc, v as u64);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (m, r, pivots)
}

/// Basis of the right null space `{x : A x = 0 mod q}` over the field `Z_q`.
/// Returns `cols - rank(A)` vectors.
pub fn kernel_basis(a: &ZqMatrix) -> Vec<ZqVector> {
    let (ech, rank, pivots) = reduced_row_echelon(a);
    let q = a.q;
    let free: Vec<usize> = (0..a.cols).filter(|c| !pivots.contains(c)).collect();
    let mut basis = Vec::with_capacity(a.cols - rank);
    for &f in &free {
        let mut v = ZqVector::zero(a.cols, q);
        v.set(f, 1);
        for (row, &pc) in pivots.iter().enumerate() {
            // pivot row: x_pc + sum over free cols of ech[row][c] * x_c = 0
            let coeff = ech.get(row, f);
            v.set(pc, (q - coeff) % q);
        }
        basis.push(v);
    }
    basis
}

/// Solve `A x = y mod q` for one particular solution, or None if `y` is
/// outside the column span.
pub fn solve(a: &ZqMatrix, y: &ZqVector) -> Option<ZqVector> {
    assert_eq!(a.rows, y.len());
    let aug = a.hconcat(&ZqMatrix::from_rows(
        &y.entries().iter().map(|&e| vec![e]).collect::<Vec<_>>(),
        a.q,
    ));
    let (ech, _, pivots) = reduced_row_echelon(&aug);
    if pivots.contains(&a.cols) {
        return None; // inconsistent
    }
    let mut x = ZqVector::zero(a.cols, a.q);
    for (row, &pc) in pivots.iter().enumerate() {
        x.set(pc, ech.get(row, a.cols));
    }
    Some(x)
}

/// Component-wise rounding `Z_q -> Z_p`: `round((p/q) * v) mod p`, ties
/// rounded half-up on the exact rational, i.e. `(p*v + floor(q/2)) div q`.
pub fn round_to_p(v: &ZqVector, p: u64) -> Result<Vec<u64>> {
    let q = v.q;
    if p < 2 || p >= q {
        return Err(Error::Parameter(format!(
            "rounding requires 2 <= p < q, got p = {p}, q = {q}"
        )));
    }
    Ok(v.entries()
        .iter()
        .map(|&e| round_entry_to_p(e, q, p))
        .collect())
}

/// Scalar rounding `Z_q -> Z_p` with the same tie rule.
pub fn round_entry_to_p(v: u64, q: u64, p: u64) -> u64 {
    ((v as u128 * p as u128 + (q / 2) as u128) / q as u128) as u64 % p
}
