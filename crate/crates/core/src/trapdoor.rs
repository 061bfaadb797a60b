//! Gadget-based lattice trapdoors: `GenTrap` and `Invert`.
//!
//! `A = [Abar | G_n - Abar * R]` with `Abar` uniform `n x mbar` and `R`
//! uniform over `{-1, 0, 1}`. The gadget block uses `k_eff` powers of two
//! per row, where `k_eff = ceil(log2 q)` whenever `m` is large enough and is
//! truncated otherwise so that tiny simulation dimensions still carry a
//! trapdoor (the inversion radius degrades accordingly).

use crate::error::{Error, Result};
use crate::params::log2_ceil;
use crate::rng::{self, Rng};
use crate::zq::{centered, reduce_i64, ZqMatrix, ZqVector};

/// Declared constant of the inversion contract: `Invert` is guaranteed to
/// recover `(s, e)` from `s^T A + e^T` whenever
/// `||e|| <= q / (C_T * sqrt(n * ceil(log2 q)))`.
pub const C_T: f64 = 2.0;

/// Candidate count above which exhaustive syndrome decoding is abandoned in
/// favor of per-block gadget decoding.
const EXHAUSTIVE_BUDGET: u64 = 100_000;

/// Matrix `A` together with the structured data used for LWE inversion.
#[derive(Clone, Debug)]
pub struct TrapdoorPair {
    pub a: ZqMatrix,
    trapdoor: Trapdoor,
}

#[derive(Clone, Debug)]
struct Trapdoor {
    /// `R` over `{-1, 0, 1}`, shape `mbar x (n * k_eff)`.
    r: ZqMatrix,
    mbar: usize,
    k_eff: usize,
}

impl TrapdoorPair {
    pub fn n(&self) -> usize {
        self.a.rows
    }

    pub fn m(&self) -> usize {
        self.a.cols
    }

    pub fn q(&self) -> u64 {
        self.a.q
    }

    /// Default acceptance radius `q / (C_T * sqrt(n * ceil(log2 q)))`.
    pub fn decoding_radius(&self) -> f64 {
        let k = log2_ceil(self.q()) as f64;
        self.q() as f64 / (C_T * (self.n() as f64 * k).sqrt())
    }
}

/// Sample `(A, td_A)` with `A` statistically close to uniform.
///
/// Requires `m >= n + 1`; the full gadget needs `m >= n * ceil(log2 q) + 1`
/// and is truncated below that.
pub fn gen_trap(n: usize, m: usize, q: u64, rng: &mut Rng) -> Result<TrapdoorPair> {
    if n == 0 {
        return Err(Error::Parameter("n must be positive".into()));
    }
    if m < n + 1 {
        return Err(Error::Parameter(format!(
            "gadget trapdoor needs m >= n + 1, got n = {n}, m = {m}"
        )));
    }
    let k = log2_ceil(q);
    let k_eff = ((m - 1) / n).min(k);
    let mbar = m - n * k_eff;

    let a_bar = ZqMatrix::uniform(n, mbar, q, rng);
    // R entries uniform in {-1, 0, 1}
    let mut r = ZqMatrix::zero(mbar, n * k_eff, q);
    for i in 0..mbar {
        for j in 0..n * k_eff {
            let v = rng::uniform_u64(rng, 3) as i64 - 1;
            r.set(i, j, reduce_i64(v, q));
        }
    }
    // G_n truncated to k_eff powers per row
    let mut g = ZqMatrix::zero(n, n * k_eff, q);
    for i in 0..n {
        for j in 0..k_eff {
            g.set(i, i * k_eff + j, (1u64 << j) % q);
        }
    }
    let a = a_bar.hconcat(&g.sub(&a_bar.mul(&r)));
    Ok(TrapdoorPair { a, trapdoor: Trapdoor { r, mbar, k_eff } })
}

/// Invert `b = s^T A + e^T` with the default acceptance radius.
pub fn invert(pair: &TrapdoorPair, b: &ZqVector) -> Result<(ZqVector, ZqVector)> {
    invert_with_radius(pair, b, pair.decoding_radius())
}

/// Invert with an explicit acceptance radius: decode a candidate `s`, then
/// accept iff `||b - s^T A|| <= radius`.
pub fn invert_with_radius(
    pair: &TrapdoorPair,
    b: &ZqVector,
    radius: f64,
) -> Result<(ZqVector, ZqVector)> {
    if b.len() != pair.m() {
        return Err(Error::Dimension(format!(
            "syndrome length {} != m = {}",
            b.len(),
            pair.m()
        )));
    }
    let s = decode_s(pair, b)?;
    let e = b.sub(&pair.a.vec_mul(&s));
    if e.norm() <= radius + 1e-9 {
        Ok((s, e))
    } else {
        Err(Error::DecodeFailure(format!(
            "no decoding within radius {radius:.3} (best residual {:.3})",
            e.norm()
        )))
    }
}

fn decode_s(pair: &TrapdoorPair, b: &ZqVector) -> Result<ZqVector> {
    let n = pair.n();
    let q = pair.q();
    let candidates = (q as u128).checked_pow(n as u32);
    match candidates {
        Some(c) if c <= EXHAUSTIVE_BUDGET as u128 => exhaustive_decode(pair, b),
        _ => gadget_decode(pair, b),
    }
}

/// Minimum-distance decoding by scanning all q^n secrets. Ties on the best
/// residual norm are ambiguous and reported as failures.
fn exhaustive_decode(pair: &TrapdoorPair, b: &ZqVector) -> Result<ZqVector> {
    let n = pair.n();
    let q = pair.q();
    let mut best: Option<(f64, ZqVector)> = None;
    let mut tie = false;
    let total = q.pow(n as u32);
    let mut s = ZqVector::zero(n, q);
    for idx in 0..total {
        let mut v = idx;
        for i in 0..n {
            s.set(i, v % q);
            v /= q;
        }
        let resid = b.sub(&pair.a.vec_mul(&s)).norm_sq();
        match &best {
            Some((bn, _)) if (resid - bn).abs() < 1e-9 => tie = true,
            Some((bn, _)) if resid < *bn => {
                best = Some((resid, s.clone()));
                tie = false;
            }
            None => best = Some((resid, s.clone())),
            _ => {}
        }
    }
    let (_, s) = best.ok_or_else(|| Error::DecodeFailure("empty secret space".into()))?;
    if tie {
        return Err(Error::DecodeFailure("ambiguous minimum-distance decode".into()));
    }
    Ok(s)
}

/// Per-block gadget decoding: fold the syndrome through `R` to obtain noisy
/// multiples `s_i * 2^j`, then recover each `s_i` by scanning `Z_q`.
fn gadget_decode(pair: &TrapdoorPair, b: &ZqVector) -> Result<ZqVector> {
    let td = &pair.trapdoor;
    let n = pair.n();
    let q = pair.q();
    let k = td.k_eff;
    // c^T = bbar^T R + bg^T = s^T G + (ebar^T R + eg^T)
    let bbar = ZqVector::from_entries(b.entries()[..td.mbar].to_vec(), q);
    let bg = ZqVector::from_entries(b.entries()[td.mbar..].to_vec(), q);
    let c = td.r.vec_mul(&bbar).add(&bg);
    let mut s = ZqVector::zero(n, q);
    for i in 0..n {
        let block: Vec<u64> = (0..k).map(|j| c.get(i * k + j)).collect();
        let mut best: Option<(i64, u64)> = None;
        for v in 0..q {
            let mut worst: i64 = 0;
            for (j, &cj) in block.iter().enumerate() {
                let shift = ((1u128 << j) % q as u128) as u64;
                let pred = (v as u128 * shift as u128 % q as u128) as u64;
                let err = centered(cj + q - pred, q).abs();
                worst = worst.max(err);
            }
            match best {
                Some((bw, _)) if worst < bw => best = Some((worst, v)),
                None => best = Some((worst, v)),
                _ => {}
            }
        }
        s.set(i, best.unwrap().1);
    }
    Ok(s)
}
