//! Sparse pure states over the qudit register `(Z_q)^m`.
//!
//! Amplitudes are keyed by the basis vector in canonical form (entries in
//! `[0, q)`); a `BTreeMap` keeps iteration order deterministic so that every
//! downstream sample and report is reproducible bit for bit.

use crate::error::{Error, Result};
use crate::rng::{self, Rng};
use crate::zq::ZqVector;
use num_complex::Complex64;
use std::collections::BTreeMap;

/// Amplitudes smaller than this are pruned after every transform.
pub const AMP_EPS: f64 = 1e-15;

/// Tolerance on the squared norm of a normalized state.
pub const NORM_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct PureState {
    pub q: u64,
    pub m: usize,
    amps: BTreeMap<Vec<u16>, Complex64>,
}

fn key_of(v: &ZqVector) -> Vec<u16> {
    v.entries().iter().map(|&e| e as u16).collect()
}

impl PureState {
    pub fn new(q: u64, m: usize) -> Self {
        assert!(q <= u16::MAX as u64, "qudit dimension exceeds key width");
        PureState { q, m, amps: BTreeMap::new() }
    }

    /// The computational basis state `|x>`.
    pub fn basis(x: &ZqVector) -> Self {
        let mut s = PureState::new(x.q, x.len());
        s.amps.insert(key_of(x), Complex64::new(1.0, 0.0));
        s
    }

    pub fn support_len(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitude(&self, x: &ZqVector) -> Complex64 {
        self.amps.get(&key_of(x)).copied().unwrap_or_default()
    }

    pub fn set_amplitude(&mut self, x: &ZqVector, a: Complex64) {
        if a.norm() < AMP_EPS {
            self.amps.remove(&key_of(x));
        } else {
            self.amps.insert(key_of(x), a);
        }
    }

    pub fn add_amplitude(&mut self, x: &ZqVector, a: Complex64) {
        let e = self.amps.entry(key_of(x)).or_default();
        *e += a;
    }

    /// Iterate deterministically over (basis vector, amplitude).
    pub fn iter(&self) -> impl Iterator<Item = (ZqVector, Complex64)> + '_ {
        self.amps.iter().map(|(k, &a)| {
            (ZqVector::from_entries(k.iter().map(|&e| e as u64).collect(), self.q), a)
        })
    }

    pub fn norm(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() < NORM_TOL
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if n < AMP_EPS {
            return Err(Error::EmptySupport("cannot normalize the zero state".into()));
        }
        for a in self.amps.values_mut() {
            *a /= n;
        }
        self.prune();
        Ok(())
    }

    /// Drop amplitudes below `AMP_EPS`.
    pub fn prune(&mut self) {
        self.amps.retain(|_, a| a.norm() >= AMP_EPS);
    }

    pub fn inner(&self, other: &PureState) -> Complex64 {
        assert_eq!((self.q, self.m), (other.q, other.m), "state dimensions differ");
        // <self|other> = sum conj(a_x) b_x over the smaller support
        let (small, big, conj_small) = if self.amps.len() <= other.amps.len() {
            (&self.amps, &other.amps, true)
        } else {
            (&other.amps, &self.amps, false)
        };
        let mut acc = Complex64::default();
        for (k, &a) in small {
            if let Some(&b) = big.get(k) {
                acc += if conj_small { a.conj() * b } else { b.conj() * a };
            }
        }
        acc
    }

    /// `sqrt(1 - |<a|b>|^2)` for normalized pure states.
    pub fn trace_distance(&self, other: &PureState) -> f64 {
        let ov = self.inner(other).norm_sqr();
        (1.0 - ov.min(1.0)).max(0.0).sqrt()
    }

    pub fn scale(&mut self, c: Complex64) {
        for a in self.amps.values_mut() {
            *a *= c;
        }
    }

    pub fn sub(&self, other: &PureState) -> PureState {
        let mut out = self.clone();
        for (x, a) in other.iter() {
            out.add_amplitude(&x, -a);
        }
        out.prune();
        out
    }

    /// Sample a basis vector with probability `|amplitude|^2`.
    pub fn sample_basis(&self, rng: &mut Rng) -> ZqVector {
        let u = rng::uniform_f64(rng) * self.norm().powi(2);
        let mut acc = 0.0;
        let mut last = None;
        for (k, a) in &self.amps {
            acc += a.norm_sqr();
            last = Some(k);
            if u < acc {
                break;
            }
        }
        let k = last.expect("sampling from the zero state");
        ZqVector::from_entries(k.iter().map(|&e| e as u64).collect(), self.q)
    }

    /// Conditional state given that a basis-measurement of `f(x)` returned
    /// `value`; also returns the outcome probability.
    pub fn condition_on<F>(&self, f: F, value: u64) -> (f64, Option<PureState>)
    where
        F: Fn(&ZqVector) -> u64,
    {
        let mut out = PureState::new(self.q, self.m);
        let mut mass = 0.0;
        for (x, a) in self.iter() {
            if f(&x) == value {
                mass += a.norm_sqr();
                out.amps.insert(key_of(&x), a);
            }
        }
        if mass < AMP_EPS * AMP_EPS {
            return (0.0, None);
        }
        out.scale(Complex64::new(1.0 / mass.sqrt(), 0.0));
        out.prune();
        (mass, Some(out))
    }

    /// Debug dump: one line `x_1,...,x_m : re im` per basis vector, sorted.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (k, a) in &self.amps {
            let coords: Vec<String> = k.iter().map(|e| e.to_string()).collect();
            out.push_str(&format!("{} : {:.12e} {:.12e}\n", coords.join(","), a.re, a.im));
        }
        out
    }
}

/// Mixed states as ensembles of weighted pure components. Density matrices
/// are never materialized; this is sufficient for every experiment in scope.
#[derive(Clone, Debug, Default)]
pub struct Ensemble {
    pub components: Vec<(f64, PureState)>,
}

impl Ensemble {
    pub fn pure(state: PureState) -> Self {
        Ensemble { components: vec![(1.0, state)] }
    }

    pub fn total_weight(&self) -> f64 {
        self.components.iter().map(|(w, _)| w).sum()
    }

    /// Fidelity `<psi| rho |psi>` against a pure reference.
    pub fn fidelity_to(&self, psi: &PureState) -> f64 {
        self.components
            .iter()
            .map(|(w, s)| w * s.inner(psi).norm_sqr())
            .sum()
    }

    /// Sample one component by weight.
    pub fn sample_component(&self, rng: &mut Rng) -> &PureState {
        let u = rng::uniform_f64(rng) * self.total_weight();
        let mut acc = 0.0;
        for (w, s) in &self.components {
            acc += w;
            if u < acc {
                return s;
            }
        }
        &self.components.last().expect("empty ensemble").1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn basis_state_is_normalized() {
        let x = ZqVector::from_entries(vec![1, 2, 3], 7);
        let s = PureState::basis(&x);
        assert!(s.is_normalized());
        assert_eq!(s.amplitude(&x), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn normalize_and_prune() {
        let mut s = PureState::new(7, 1);
        s.set_amplitude(&ZqVector::from_entries(vec![0], 7), Complex64::new(3.0, 0.0));
        s.set_amplitude(&ZqVector::from_entries(vec![1], 7), Complex64::new(4.0, 0.0));
        s.set_amplitude(&ZqVector::from_entries(vec![2], 7), Complex64::new(1e-20, 0.0));
        s.normalize().unwrap();
        assert!(s.is_normalized());
        assert_eq!(s.support_len(), 2);
        let a = s.amplitude(&ZqVector::from_entries(vec![0], 7));
        assert!((a.re - 0.6).abs() < 1e-12);
    }

    #[test]
    fn inner_product_and_distance() {
        let a = PureState::basis(&ZqVector::from_entries(vec![0], 5));
        let b = PureState::basis(&ZqVector::from_entries(vec![1], 5));
        assert_eq!(a.inner(&b), Complex64::default());
        assert!((a.trace_distance(&b) - 1.0).abs() < 1e-12);
        assert!(a.trace_distance(&a) < 1e-12);
    }

    #[test]
    fn sampling_follows_amplitudes() {
        let mut s = PureState::new(5, 1);
        s.set_amplitude(&ZqVector::from_entries(vec![0], 5), Complex64::new(0.6, 0.0));
        s.set_amplitude(&ZqVector::from_entries(vec![1], 5), Complex64::new(0.8, 0.0));
        let mut r = rng::derive(41, "state-sample", 0);
        let trials = 20_000;
        let mut zero = 0;
        for _ in 0..trials {
            if s.sample_basis(&mut r).get(0) == 0 {
                zero += 1;
            }
        }
        let p = zero as f64 / trials as f64;
        assert!((p - 0.36).abs() < 0.012, "p = {p}");
    }

    #[test]
    fn conditioning_renormalizes() {
        let mut s = PureState::new(5, 1);
        s.set_amplitude(&ZqVector::from_entries(vec![0], 5), Complex64::new(0.6, 0.0));
        s.set_amplitude(&ZqVector::from_entries(vec![1], 5), Complex64::new(0.8, 0.0));
        let (p, post) = s.condition_on(|x| x.get(0), 1);
        assert!((p - 0.64).abs() < 1e-12);
        assert!(post.unwrap().is_normalized());
        let (p0, none) = s.condition_on(|x| x.get(0), 3);
        assert_eq!(p0, 0.0);
        assert!(none.is_none());
    }

    #[test]
    fn dump_format() {
        let s = PureState::basis(&ZqVector::from_entries(vec![2, 0], 7));
        let d = s.dump();
        assert!(d.starts_with("2,0 : "));
    }
}
