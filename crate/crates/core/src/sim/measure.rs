//! Measurements: the revocation projector, the weak computational-basis
//! revocation, and outcome distributions of classically-computed registers.

use crate::error::{Error, Result};
use crate::rng::{self, Rng};
use crate::sim::coset::{within_radius, CosetState};
use crate::sim::state::PureState;
use crate::zq::{ZqMatrix, ZqVector};
use std::collections::BTreeMap;

/// Outcome of the projective revocation measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RevocationOutcome {
    Valid,
    Invalid,
}

/// Apply the projective measurement `{|psi><psi|, I - |psi><psi|}` of the
/// reference coset state to `state`. Returns the outcome together with the
/// renormalized post-measurement state on the measured branch.
pub fn revoke_project(
    state: &PureState,
    reference: &CosetState,
    rng: &mut Rng,
) -> Result<(RevocationOutcome, PureState)> {
    let psi = &reference.state;
    if (state.q, state.m) != (psi.q, psi.m) {
        return Err(Error::Dimension(format!(
            "state is over Z_{}^{}, reference over Z_{}^{}",
            state.q, state.m, psi.q, psi.m
        )));
    }
    let overlap = psi.inner(state);
    let p_valid = overlap.norm_sqr().min(1.0);
    if rng::uniform_f64(rng) < p_valid {
        // projected branch: (<psi|state>) |psi>, renormalized keeps the phase
        let mut post = psi.clone();
        let phase = overlap / overlap.norm();
        post.scale(phase);
        Ok((RevocationOutcome::Valid, post))
    } else {
        let mut proj = psi.clone();
        proj.scale(overlap);
        let mut post = state.sub(&proj);
        if post.norm() < 1e-12 {
            // state was (numerically) the eigenstate; keep it
            post = state.clone();
        } else {
            post.normalize()?;
        }
        Ok((RevocationOutcome::Invalid, post))
    }
}

/// `WeakRevoke`: measure in the computational basis and accept iff the
/// outcome is a short coset vector. Returns the measured vector or None.
pub fn weak_revoke(
    state: &PureState,
    a: &ZqMatrix,
    y: &ZqVector,
    radius: f64,
    rng: &mut Rng,
) -> Option<ZqVector> {
    let x0 = state.sample_basis(rng);
    if a.mul_vec(&x0) == *y && within_radius(&x0, radius) {
        Some(x0)
    } else {
        None
    }
}

/// Distribution of the measurement outcome of a register computed as
/// `f(x)` over the state's basis vectors: `Pr[v] = sum_{x : f(x)=v} |amp|^2`.
pub fn value_distribution<F>(state: &PureState, f: F) -> BTreeMap<u64, f64>
where
    F: Fn(&ZqVector) -> u64,
{
    let mut dist = BTreeMap::new();
    for (x, amp) in state.iter() {
        *dist.entry(f(&x)).or_default() += amp.norm_sqr();
    }
    dist
}

/// Sample an outcome `v` of the `f`-register measurement and return it with
/// the exact conditional post-state.
pub fn measure_value<F>(state: &PureState, f: F, rng: &mut Rng) -> (u64, PureState)
where
    F: Fn(&ZqVector) -> u64 + Copy,
{
    let dist = value_distribution(state, f);
    let total: f64 = dist.values().sum();
    let u = rng::uniform_f64(rng) * total;
    let mut acc = 0.0;
    let mut picked = *dist.keys().next().expect("measuring the zero state");
    for (&v, &p) in &dist {
        acc += p;
        picked = v;
        if u < acc {
            break;
        }
    }
    let (_, post) = state.condition_on(f, picked);
    (picked, post.expect("conditioning on a sampled outcome"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use crate::sim::coset::build_coset_state;

    fn tiny_coset(seed: u64) -> CosetState {
        let mut r = rng::derive(seed, "measure-setup", 0);
        let a = ZqMatrix::uniform(1, 3, 7, &mut r);
        let y = ZqVector::from_entries(vec![2], 7);
        build_coset_state(&a, &y, 2.0, 2.0 * (1.5f64).sqrt()).unwrap()
    }

    #[test]
    fn eigenstate_always_valid() {
        let cs = tiny_coset(71);
        let mut r = rng::derive(71, "measure", 1);
        for _ in 0..200 {
            let (out, post) = revoke_project(&cs.state, &cs, &mut r).unwrap();
            assert_eq!(out, RevocationOutcome::Valid);
            assert!(post.trace_distance(&cs.state) < 1e-9);
        }
    }

    #[test]
    fn orthogonal_state_always_invalid() {
        let cs = tiny_coset(72);
        let mut r = rng::derive(72, "measure", 1);
        // a basis state outside the coset support is orthogonal
        let mut probe = None;
        for idx in 0..343u64 {
            let x = ZqVector::from_entries(
                vec![idx % 7, (idx / 7) % 7, (idx / 49) % 7],
                7,
            );
            if cs.a.mul_vec(&x) != cs.y {
                probe = Some(PureState::basis(&x));
                break;
            }
        }
        let probe = probe.unwrap();
        for _ in 0..200 {
            let (out, _) = revoke_project(&probe, &cs, &mut r).unwrap();
            assert_eq!(out, RevocationOutcome::Invalid);
        }
    }

    #[test]
    fn basis_state_passes_with_amplitude_squared() {
        let cs = tiny_coset(73);
        let mut r = rng::derive(73, "measure", 1);
        let (x0, amp) = cs.state.iter().next().unwrap();
        let probe = PureState::basis(&x0);
        let p = amp.norm_sqr();
        let trials = 20_000;
        let mut valid = 0;
        for _ in 0..trials {
            if revoke_project(&probe, &cs, &mut r).unwrap().0 == RevocationOutcome::Valid {
                valid += 1;
            }
        }
        let emp = valid as f64 / trials as f64;
        let se = (p * (1.0 - p) / trials as f64).sqrt();
        assert!((emp - p).abs() < 4.0 * se, "emp {emp} vs {p}");
    }

    #[test]
    fn measure_then_return_acceptance_is_collision_probability() {
        // measure the key, hand back the collapsed ket: acceptance rate is
        // sum |alpha|^4 over the support
        let cs = tiny_coset(74);
        let mut r = rng::derive(74, "measure", 1);
        let kappa: f64 = cs.state.iter().map(|(_, a)| a.norm_sqr().powi(2)).sum();
        let trials = 20_000;
        let mut valid = 0;
        for _ in 0..trials {
            let x0 = cs.state.sample_basis(&mut r);
            let collapsed = PureState::basis(&x0);
            if revoke_project(&collapsed, &cs, &mut r).unwrap().0 == RevocationOutcome::Valid {
                valid += 1;
            }
        }
        let emp = valid as f64 / trials as f64;
        let se = (kappa * (1.0 - kappa) / trials as f64).sqrt();
        assert!((emp - kappa).abs() < 4.0 * se, "emp {emp} vs kappa {kappa}");
    }

    #[test]
    fn weak_revoke_on_fresh_state_accepts() {
        let cs = tiny_coset(75);
        let mut r = rng::derive(75, "measure", 1);
        for _ in 0..100 {
            let x0 = weak_revoke(&cs.state, &cs.a, &cs.y, cs.radius, &mut r).unwrap();
            assert_eq!(cs.a.mul_vec(&x0), cs.y);
        }
    }

    #[test]
    fn weak_revoke_on_uniform_state_matches_count_ratio() {
        let cs = tiny_coset(76);
        let mut r = rng::derive(76, "measure", 1);
        // uniform superposition over the whole register
        let mut uni = PureState::new(7, 3);
        for idx in 0..343u64 {
            let x = ZqVector::from_entries(
                vec![idx % 7, (idx / 7) % 7, (idx / 49) % 7],
                7,
            );
            uni.set_amplitude(&x, num_complex::Complex64::new(1.0, 0.0));
        }
        uni.normalize().unwrap();
        let good = crate::sim::coset::enumerate_coset(&cs.a, &cs.y, cs.radius, 1_000_000)
            .unwrap()
            .len() as f64;
        let p = good / 343.0;
        let trials = 20_000;
        let mut acc = 0;
        for _ in 0..trials {
            if weak_revoke(&uni, &cs.a, &cs.y, cs.radius, &mut r).is_some() {
                acc += 1;
            }
        }
        let emp = acc as f64 / trials as f64;
        let se = (p * (1.0 - p) / trials as f64).sqrt();
        assert!((emp - p).abs() < 4.0 * se, "emp {emp} vs {p}");
    }

    #[test]
    fn value_distribution_sums_to_one() {
        let cs = tiny_coset(77);
        let dist = value_distribution(&cs.state, |x| x.get(0));
        let total: f64 = dist.values().sum();
        assert!((total - 1.0).abs() < 1e-9);
    }
}
