//! Public parameters shared by every scheme.

use crate::error::{Error, Result};

/// All public parameters of the schemes, with validity checks.
///
/// `sigma` is the Gaussian width of the coset states, `alpha`/`beta` the
/// encryption noise ratios (noise widths `alpha*q` and `beta*q`), `p` the
/// rounding modulus of the PRF, and `big_l` the NAND-depth bound of the
/// leveled FHE. `strict_mode` additionally enforces the constraints the
/// security theorems assume; the simulation presets run with it off since
/// their values are chosen for enumerability.
#[derive(Clone, Debug, PartialEq)]
pub struct SchemeParams {
    pub n: usize,
    pub m: usize,
    pub q: u64,
    pub sigma: f64,
    pub alpha: f64,
    pub beta: f64,
    pub p: u64,
    /// PRF input length, always `n * m * ceil(log2 q)`.
    pub ell: usize,
    /// Gadget width, always `(m + 1) * ceil(log2 q)`.
    pub n_gadget: usize,
    /// NAND-depth bound for DualGSW evaluation.
    pub big_l: usize,
    pub strict_mode: bool,
}

/// `ceil(log2 q)`, the number of bits per `Z_q` entry.
pub fn log2_ceil(q: u64) -> usize {
    assert!(q >= 2);
    64 - (q - 1).leading_zeros() as usize
}

fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    if q % 2 == 0 {
        return q == 2;
    }
    let mut d = 3u64;
    while d * d <= q {
        if q % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

impl SchemeParams {
    pub fn new(
        n: usize,
        m: usize,
        q: u64,
        sigma: f64,
        alpha: f64,
        beta: f64,
        p: u64,
        big_l: usize,
        strict_mode: bool,
    ) -> Result<Self> {
        let k = log2_ceil(q);
        let params = SchemeParams {
            n,
            m,
            q,
            sigma,
            alpha,
            beta,
            p,
            ell: n * m * k,
            n_gadget: (m + 1) * k,
            big_l,
            strict_mode,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m == 0 {
            return Err(Error::Parameter("n and m must be positive".into()));
        }
        if !is_prime(self.q) {
            return Err(Error::Parameter(format!("q = {} is not prime", self.q)));
        }
        if self.p < 2 || self.p >= self.q {
            return Err(Error::Parameter(format!(
                "rounding modulus must satisfy 2 <= p < q, got p = {}, q = {}",
                self.p, self.q
            )));
        }
        if self.sigma <= 0.0 {
            return Err(Error::Parameter("sigma must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.alpha) || !(0.0..1.0).contains(&self.beta) {
            return Err(Error::Parameter("alpha and beta must lie in [0, 1)".into()));
        }
        let k = self.log_q();
        if self.ell != self.n * self.m * k {
            return Err(Error::Parameter(format!(
                "ell must equal n*m*ceil(log2 q) = {}, got {}",
                self.n * self.m * k,
                self.ell
            )));
        }
        if self.n_gadget != (self.m + 1) * k {
            return Err(Error::Parameter(format!(
                "N must equal (m+1)*ceil(log2 q) = {}, got {}",
                (self.m + 1) * k,
                self.n_gadget
            )));
        }
        if self.strict_mode {
            if self.m < 2 * self.n * k {
                return Err(Error::Parameter(format!(
                    "strict mode requires m >= 2*n*ceil(log2 q) = {}, got m = {}",
                    2 * self.n * k,
                    self.m
                )));
            }
            let lo = (2.0 * self.m as f64).sqrt();
            let hi = self.q as f64 / lo;
            if !(self.sigma > lo && self.sigma < hi) {
                return Err(Error::Parameter(format!(
                    "strict mode requires sigma in (sqrt(2m), q/sqrt(2m)) = ({lo:.3}, {hi:.3}), got {}",
                    self.sigma
                )));
            }
        }
        Ok(())
    }

    /// `ceil(log2 q)`.
    pub fn log_q(&self) -> usize {
        log2_ceil(self.q)
    }

    /// Coset-state truncation radius `sigma * sqrt(m/2)`.
    pub fn coset_radius(&self) -> f64 {
        self.sigma * (self.m as f64 / 2.0).sqrt()
    }

    /// PRF output length in bits, `n * ceil(log2 p)`.
    pub fn prf_out_bits(&self) -> usize {
        self.n * log2_ceil(self.p)
    }

    /// Tiny fully-enumerable simulation preset. Values are chosen for
    /// feasibility of exact state simulation, not for security.
    pub fn sim_tiny() -> Self {
        SchemeParams::new(1, 3, 7, 2.0, 0.0, 0.0, 2, 3, false).unwrap()
    }

    /// Small simulation preset with a rank-2 lattice.
    pub fn sim_small() -> Self {
        SchemeParams::new(2, 5, 5, 2.5, 0.0, 0.0, 2, 3, false).unwrap()
    }

    /// Classical-mode preset for correctness statistics at non-toy dimensions.
    /// Noise widths alpha*q = beta*q = 3.
    pub fn classical_medium() -> Self {
        SchemeParams::new(8, 144, 257, 3.2, 3.0 / 257.0, 3.0 / 257.0, 4, 3, false).unwrap()
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "sim-tiny" => Ok(Self::sim_tiny()),
            "sim-small" => Ok(Self::sim_small()),
            "classical-medium" => Ok(Self::classical_medium()),
            other => Err(Error::Parameter(format!("unknown preset '{other}'"))),
        }
    }
}
