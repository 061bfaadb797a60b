//! Discrete Gaussian machinery: the Gaussian measure and exact sampling from
//! the truncated discrete Gaussian `D_{Z_q^m, sigma}`.

use crate::error::{Error, Result};
use crate::rng::{self, Rng};
use crate::zq::{reduce_i64, ZqMatrix, ZqVector};

/// Gaussian measure `rho_sigma(x) = exp(-pi * ||x||^2 / sigma^2)` of a
/// centered integer vector.
pub fn gaussian_mass_centered(x: &[i64], sigma: f64) -> Result<f64> {
    if sigma <= 0.0 {
        return Err(Error::Parameter("sigma must be positive".into()));
    }
    let norm_sq: f64 = x.iter().map(|&v| (v * v) as f64).sum();
    Ok((-std::f64::consts::PI * norm_sq / (sigma * sigma)).exp())
}

/// Gaussian measure of a `Z_q` vector via its centered representative.
pub fn gaussian_mass(x: &ZqVector, sigma: f64) -> Result<f64> {
    gaussian_mass_centered(&x.centered(), sigma)
}

/// Exact sampler for the truncated discrete Gaussian `D_{Z_q^m, sigma}`:
/// per-coordinate inverse-CDF over the truncated support, then whole-vector
/// rejection to `||c(x)|| <= radius` (default `sigma * sqrt(m)`).
///
/// `sigma = 0` is the degenerate width and always yields the zero vector.
pub struct DiscreteGaussian {
    q: u64,
    dim: usize,
    radius: f64,
    /// Support values `-cut..=cut` for one coordinate.
    support: Vec<i64>,
    /// Cumulative masses over `support`, normalized to end at 1.
    cdf: Vec<f64>,
}

impl DiscreteGaussian {
    pub fn new(dim: usize, sigma: f64, q: u64) -> Result<Self> {
        Self::with_radius(dim, sigma, q, sigma * (dim as f64).sqrt())
    }

    pub fn with_radius(dim: usize, sigma: f64, q: u64, radius: f64) -> Result<Self> {
        if sigma < 0.0 {
            return Err(Error::Parameter("sigma must be nonnegative".into()));
        }
        if dim == 0 {
            return Err(Error::Parameter("dimension must be positive".into()));
        }
        if sigma == 0.0 {
            return Ok(DiscreteGaussian { q, dim, radius, support: vec![0], cdf: vec![1.0] });
        }
        // Per-coordinate cutoff: ceil(radius), clipped to the centered box.
        let box_max = centered_max(q);
        let cut = (radius.ceil() as i64).clamp(0, box_max);
        let support: Vec<i64> = (-cut..=cut).collect();
        let mut cdf = Vec::with_capacity(support.len());
        let mut acc = 0.0;
        for &v in &support {
            acc += (-std::f64::consts::PI * (v * v) as f64 / (sigma * sigma)).exp();
            cdf.push(acc);
        }
        let total = acc;
        for c in cdf.iter_mut() {
            *c /= total;
        }
        Ok(DiscreteGaussian { q, dim, radius, support, cdf })
    }

    fn sample_coord(&self, rng: &mut Rng) -> i64 {
        let u = rng::uniform_f64(rng);
        // binary search for the first cdf entry >= u
        let mut lo = 0usize;
        let mut hi = self.cdf.len() - 1;
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.cdf[mid] < u {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        self.support[lo]
    }

    /// One sample with `||c(x)|| <= radius`, exact on the truncated support.
    pub fn sample(&self, rng: &mut Rng) -> ZqVector {
        loop {
            let coords: Vec<i64> = (0..self.dim).map(|_| self.sample_coord(rng)).collect();
            let norm_sq: f64 = coords.iter().map(|&v| (v * v) as f64).sum();
            if norm_sq.sqrt() <= self.radius + 1e-12 {
                return ZqVector::from_i64(&coords, self.q);
            }
        }
    }
}

/// Largest centered representative, `floor(q/2)`.
fn centered_max(q: u64) -> i64 {
    (q / 2) as i64
}

/// Sample an m-dimensional vector from `D_{Z_q^m, sigma}`.
pub fn sample_discrete_gaussian(m: usize, sigma: f64, q: u64, rng: &mut Rng) -> Result<ZqVector> {
    Ok(DiscreteGaussian::new(m, sigma, q)?.sample(rng))
}

/// Sample a single scalar from `D_{Z_q, sigma}` (support `|x| <= sigma`).
pub fn sample_scalar(sigma: f64, q: u64, rng: &mut Rng) -> Result<u64> {
    Ok(sample_discrete_gaussian(1, sigma, q, rng)?.get(0))
}

/// Matrix with independent `D_{Z, sigma}` entries (1-dimensional truncation
/// per entry), as used by the shift-hiding key tables.
pub fn sample_matrix_entrywise(
    rows: usize,
    cols: usize,
    sigma: f64,
    q: u64,
    rng: &mut Rng,
) -> Result<ZqMatrix> {
    let dg = DiscreteGaussian::new(1, sigma, q)?;
    let entries: Vec<u64> = (0..rows * cols)
        .map(|_| reduce_i64(dg.sample(rng).centered()[0], q))
        .collect();
    Ok(ZqMatrix::from_entries(rows, cols, entries, q))
}

/// Matrix whose columns are independent `D_{Z^rows, sigma}` samples, as used
/// for the DualGSW noise block (one Dual-Regev noise vector per column).
pub fn sample_matrix_colwise(
    rows: usize,
    cols: usize,
    sigma: f64,
    q: u64,
    rng: &mut Rng,
) -> Result<ZqMatrix> {
    let dg = DiscreteGaussian::new(rows, sigma, q)?;
    let mut m = ZqMatrix::zero(rows, cols, q);
    for c in 0..cols {
        let v = dg.sample(rng);
        for r in 0..rows {
            m.set(r, c, v.get(r));
        }
    }
    Ok(m)
}
