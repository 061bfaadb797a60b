//! Gadget matrix `G` and binary decompositions.
//!
//! Bit layout is entry-major, little-endian: the bits of entry `i` occupy
//! positions `i*k .. (i+1)*k` with `k = ceil(log2 q)`, least significant
//! first. `G` maps such a bit vector of length `(m+1)*k` back to `Z_q^{m+1}`
//! and is linear over `Z_q`; `G^{-1}` is its (non-linear) right inverse.

use crate::error::{Error, Result};
use crate::params::log2_ceil;
use crate::zq::{ZqMatrix, ZqVector};

/// `G(a)`: collapse a bit vector of length `rows * ceil(log2 q)` into
/// `Z_q^rows` by little-endian binary recomposition per entry.
pub fn gadget_apply(bits: &[u64], rows: usize, q: u64) -> Result<ZqVector> {
    let k = log2_ceil(q);
    if bits.len() != rows * k {
        return Err(Error::Dimension(format!(
            "gadget input must have length {} = rows * ceil(log2 q), got {}",
            rows * k,
            bits.len()
        )));
    }
    let mut out = ZqVector::zero(rows, q);
    for i in 0..rows {
        let mut acc: u128 = 0;
        for j in 0..k {
            acc += (bits[i * k + j] as u128 % q as u128) << j;
        }
        out.set(i, (acc % q as u128) as u64);
    }
    Ok(out)
}

/// `G^{-1}(v)`: little-endian binary decomposition of each entry, producing
/// a bit vector of length `len(v) * ceil(log2 q)`.
pub fn gadget_inv_vec(v: &ZqVector) -> Vec<u64> {
    let k = log2_ceil(v.q);
    let mut bits = Vec::with_capacity(v.len() * k);
    for i in 0..v.len() {
        let e = v.get(i);
        for j in 0..k {
            bits.push((e >> j) & 1);
        }
    }
    bits
}

/// Column-wise `G^{-1}` of a matrix with `m+1` rows: each column is
/// decomposed independently, giving a `{0,1}`-matrix with `(m+1)*k` rows.
pub fn gadget_inv(m: &ZqMatrix) -> ZqMatrix {
    let k = log2_ceil(m.q);
    let mut out = ZqMatrix::zero(m.rows * k, m.cols, m.q);
    for c in 0..m.cols {
        for r in 0..m.rows {
            let e = m.get(r, c);
            for j in 0..k {
                out.set(r * k + j, c, (e >> j) & 1);
            }
        }
    }
    out
}

/// The gadget matrix `G` itself, shape `rows x (rows * k)`, satisfying
/// `G * gadget_inv(M) = M`.
pub fn gadget_matrix(rows: usize, q: u64) -> ZqMatrix {
    let k = log2_ceil(q);
    let mut g = ZqMatrix::zero(rows, rows * k, q);
    for i in 0..rows {
        for j in 0..k {
            g.set(i, i * k + j, (1u64 << j) % q);
        }
    }
    g
}

/// Bit string of length `n * m * ceil(log2 q)` from a matrix: row-major
/// entries, little-endian bits per entry. Invertible on its image.
pub fn bindecomp(m: &ZqMatrix) -> Vec<u8> {
    let k = log2_ceil(m.q);
    let mut bits = Vec::with_capacity(m.rows * m.cols * k);
    for &e in m.entries() {
        for j in 0..k {
            bits.push(((e >> j) & 1) as u8);
        }
    }
    bits
}

/// Inverse of `bindecomp` for bit strings in its image.
pub fn bindecomp_inv(bits: &[u8], rows: usize, cols: usize, q: u64) -> Result<ZqMatrix> {
    let k = log2_ceil(q);
    if bits.len() != rows * cols * k {
        return Err(Error::Dimension(format!(
            "expected {} bits, got {}",
            rows * cols * k,
            bits.len()
        )));
    }
    let mut entries = Vec::with_capacity(rows * cols);
    for chunk in bits.chunks(k) {
        let mut acc = 0u64;
        for (j, &b) in chunk.iter().enumerate() {
            if b > 1 {
                return Err(Error::Parameter("bindecomp input must be bits".into()));
            }
            acc |= (b as u64) << j;
        }
        if acc >= q {
            return Err(Error::Parameter(format!(
                "bit chunk decodes to {acc} >= q = {q}, not in the image"
            )));
        }
        entries.push(acc);
    }
    Ok(ZqMatrix::from_entries(rows, cols, entries, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn apply_zero_is_zero() {
        let out = gadget_apply(&[0; 12], 4, 7).unwrap();
        assert!(out.is_zero());
    }

    #[test]
    fn apply_expansion_example() {
        // q=5 (k=3), one row, a=(1,0,1) -> 1 + 4 = 5 = 0 mod 5
        let out = gadget_apply(&[1, 0, 1], 1, 5).unwrap();
        assert_eq!(out.get(0), 0);
    }

    #[test]
    fn apply_rejects_length_mismatch() {
        assert!(gadget_apply(&[1, 0], 1, 5).is_err());
    }

    #[test]
    fn inverse_pair_on_random_vectors() {
        let mut r = rng::derive(21, "gadget", 0);
        for _ in 0..100 {
            let v = crate::zq::ZqVector::uniform(5, 7, &mut r);
            let bits = gadget_inv_vec(&v);
            let back = gadget_apply(&bits, 5, 7).unwrap();
            assert_eq!(back, v);
        }
    }

    #[test]
    fn matrix_identity_g_times_ginv() {
        let mut r = rng::derive(22, "gadget-mat", 0);
        let m = ZqMatrix::uniform(4, 6, 7, &mut r);
        let g = gadget_matrix(4, 7);
        let decomp = gadget_inv(&m);
        assert_eq!(g.mul(&decomp), m);
        assert!(gadget_inv(&ZqMatrix::zero(3, 3, 7)).is_zero());
    }

    #[test]
    fn gadget_apply_is_linear() {
        let mut r = rng::derive(23, "gadget-lin", 0);
        let q = 11u64;
        let k = log2_ceil(q);
        for _ in 0..50 {
            // random integer (not just bit) inputs: linearity over Z_q
            let a: Vec<u64> = (0..3 * k).map(|_| rng::uniform_u64(&mut r, q)).collect();
            let b: Vec<u64> = (0..3 * k).map(|_| rng::uniform_u64(&mut r, q)).collect();
            let sum: Vec<u64> = a.iter().zip(&b).map(|(x, y)| (x + y) % q).collect();
            let ga = gadget_apply(&a, 3, q).unwrap();
            let gb = gadget_apply(&b, 3, q).unwrap();
            let gsum = gadget_apply(&sum, 3, q).unwrap();
            assert_eq!(ga.add(&gb), gsum);
        }
    }

    #[test]
    fn bindecomp_examples() {
        // zero matrix -> all-zero string
        let z = ZqMatrix::zero(2, 2, 5);
        assert!(bindecomp(&z).iter().all(|&b| b == 0));
        // q=5, single entry 3 -> bits (1,1,0) little-endian
        let m = ZqMatrix::from_entries(1, 1, vec![3], 5);
        assert_eq!(bindecomp(&m), vec![1, 1, 0]);
    }

    #[test]
    fn bindecomp_round_trip() {
        let mut r = rng::derive(24, "bindecomp", 0);
        for _ in 0..100 {
            let m = ZqMatrix::uniform(2, 3, 7, &mut r);
            let bits = bindecomp(&m);
            assert_eq!(bits.len(), 2 * 3 * 3);
            let back = bindecomp_inv(&bits, 2, 3, 7).unwrap();
            assert_eq!(back, m);
        }
    }

    #[test]
    fn bindecomp_inv_rejects_out_of_image() {
        // chunk (1,1,1) decodes to 7 >= q = 5
        assert!(bindecomp_inv(&[1, 1, 1], 1, 1, 5).is_err());
    }
}
