//! The q-ary quantum Fourier transform on all m qudits.
//!
//! The forward transform here uses the kernel
//! `q^{-m/2} * exp(-2*pi*i*<x,z>/q)`, the root choice under which the
//! Fourier transform of a Gaussian coset state lands (up to truncation
//! error) on the dual state with phases `omega^{-<s,y>}` exactly as the
//! duality lemma displays it; `qft_inv` uses the conjugate kernel.

use crate::error::{Error, Result};
use crate::sim::state::PureState;
use crate::zq::ZqVector;
use num_complex::Complex64;

/// Transform size limit: the output of a QFT is dense over `q^m`.
pub const QFT_BUDGET: u64 = 1 << 20;

fn phase_table(q: u64, sign: f64) -> Vec<Complex64> {
    (0..q)
        .map(|j| {
            let theta = sign * 2.0 * std::f64::consts::PI * j as f64 / q as f64;
            Complex64::new(theta.cos(), theta.sin())
        })
        .collect()
}

fn transform(state: &PureState, sign: f64) -> Result<PureState> {
    let q = state.q;
    let m = state.m;
    let dim = (q as u128).checked_pow(m as u32);
    match dim {
        Some(d) if d <= QFT_BUDGET as u128 => {}
        _ => {
            return Err(Error::Budget(format!(
                "qft output would be dense over q^m = {q}^{m}"
            )))
        }
    }
    let phases = phase_table(q, sign);
    let scale = (q as f64).powf(-(m as f64) / 2.0);
    let support: Vec<(ZqVector, Complex64)> = state.iter().collect();
    let mut out = PureState::new(q, m);
    let total = q.pow(m as u32);
    let mut z_entries = vec![0u64; m];
    for idx in 0..total {
        let mut v = idx;
        for e in z_entries.iter_mut() {
            *e = v % q;
            v /= q;
        }
        let mut acc = Complex64::default();
        for (x, a) in &support {
            let mut dot: u64 = 0;
            for (i, &ze) in z_entries.iter().enumerate() {
                dot = (dot + x.get(i) * ze) % q;
            }
            acc += a * phases[dot as usize];
        }
        acc *= scale;
        if acc.norm() >= crate::sim::state::AMP_EPS {
            out.set_amplitude(&ZqVector::from_entries(z_entries.clone(), q), acc);
        }
    }
    Ok(out)
}

/// Forward q-ary Fourier transform of all m qudits.
pub fn qft(state: &PureState) -> Result<PureState> {
    transform(state, -1.0)
}

/// Inverse transform; `qft_inv(qft(s)) = s` within 1e-9.
pub fn qft_inv(state: &PureState) -> Result<PureState> {
    transform(state, 1.0)
}
