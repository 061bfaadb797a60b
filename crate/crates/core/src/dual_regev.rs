//! Key-revocable Dual-Regev public-key encryption, its multi-bit extension,
//! and the 1-bit unpredictability experiment with pluggable adversaries.

use crate::error::{Error, Result};
use crate::experiment::{ExperimentStats, TrialRecord};
use crate::gauss::DiscreteGaussian;
use crate::params::SchemeParams;
use crate::rng::{self, Rng};
use crate::sim::coset::{build_coset_state, gen_gauss, within_radius, CosetState, ENUM_BUDGET};
use crate::sim::measure::{self, revoke_project, RevocationOutcome};
use crate::sim::state::PureState;
use crate::trapdoor::{gen_trap, TrapdoorPair};
use crate::zq::{centered, ZqVector};
use rayon::prelude::*;

#[derive(Clone, Debug)]
pub struct DrPublicKey {
    pub a: crate::zq::ZqMatrix,
    pub y: ZqVector,
}

#[derive(Clone, Debug)]
pub struct DrMasterSecret {
    pub pair: TrapdoorPair,
}

/// The decryption key: a simulated Gaussian coset state, or in classical
/// mode a single short preimage `x0` with `A x0 = y`. The classical mode
/// carries the same correctness math without requiring enumeration, so the
/// large-parameter presets stay testable.
#[derive(Clone, Debug)]
pub enum DrDecKey {
    Quantum(CosetState),
    Classical(ZqVector),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KeyMode {
    Quantum,
    Classical,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualRegevCiphertext {
    pub c0: ZqVector,
    pub c1: u64,
}

/// `KeyGen`: trapdoored `A`, image `y`, and the decryption key.
pub fn keygen(
    params: &SchemeParams,
    mode: KeyMode,
    rng: &mut Rng,
) -> Result<(DrPublicKey, DrDecKey, DrMasterSecret)> {
    params.validate()?;
    let pair = gen_trap(params.n, params.m, params.q, rng)?;
    let radius = params.coset_radius();
    match mode {
        KeyMode::Quantum => {
            let (state, y) = gen_gauss(&pair.a, params.sigma, radius, ENUM_BUDGET, rng)?;
            let pk = DrPublicKey { a: pair.a.clone(), y };
            Ok((pk, DrDecKey::Quantum(state), DrMasterSecret { pair }))
        }
        KeyMode::Classical => {
            // x0 follows the measured-key distribution |amplitude|^2, i.e.
            // the truncated discrete Gaussian of width sigma / sqrt(2).
            let dg = DiscreteGaussian::with_radius(
                params.m,
                params.sigma / std::f64::consts::SQRT_2,
                params.q,
                radius,
            )?;
            let x0 = dg.sample(rng);
            let y = pair.a.mul_vec(&x0);
            let pk = DrPublicKey { a: pair.a.clone(), y };
            Ok((pk, DrDecKey::Classical(x0), DrMasterSecret { pair }))
        }
    }
}

/// `Enc`: `(s^T A + e^T, s^T y + e' + bit * floor(q/2))`.
pub fn encrypt(
    pk: &DrPublicKey,
    bit: u8,
    params: &SchemeParams,
    rng: &mut Rng,
) -> Result<DualRegevCiphertext> {
    if bit > 1 {
        return Err(Error::Parameter("plaintext must be a bit".into()));
    }
    let q = params.q;
    let s = ZqVector::uniform(params.n, q, rng);
    let e = DiscreteGaussian::new(params.m, params.alpha * q as f64, q)?.sample(rng);
    let e1 = DiscreteGaussian::new(1, params.beta * q as f64, q)?.sample(rng).get(0);
    let c0 = pk.a.vec_mul(&s).add(&e);
    let c1 = (s.dot(&pk.y) + e1 + bit as u64 * (q / 2)) % q;
    Ok(DualRegevCiphertext { c0, c1 })
}

/// The scalar each decryption decodes: `ct . (-x, 1) = c1 - <c0, x>`.
pub fn decrypt_value(ct: &DualRegevCiphertext, x: &ZqVector) -> u64 {
    let q = x.q;
    (ct.c1 + q - ct.c0.dot(x) % q) % q
}

/// Decode rule: 0 iff the centered value is strictly closer to 0 than to
/// `floor(q/2)`, i.e. `|c(v)| < q/4`.
pub fn decode_bit(v: u64, q: u64) -> u8 {
    if (centered(v, q).abs() as f64) < q as f64 / 4.0 {
        0
    } else {
        1
    }
}

/// Classical decryption with a short preimage.
pub fn decrypt_classical(x0: &ZqVector, ct: &DualRegevCiphertext) -> u8 {
    decode_bit(decrypt_value(ct, x0), x0.q)
}

/// One quantum decryption: measure the value register, decode the bit, and
/// return the exact conditional post-state as the new key.
pub struct QuantumDecryption {
    pub bit: u8,
    pub outcome: u64,
    pub post_key: CosetState,
}

pub fn decrypt_quantum(
    key: &CosetState,
    ct: &DualRegevCiphertext,
    rng: &mut Rng,
) -> QuantumDecryption {
    let (outcome, post) = measure::measure_value(&key.state, |x| decrypt_value(ct, x), rng);
    QuantumDecryption {
        bit: decode_bit(outcome, key.state.q),
        outcome,
        post_key: CosetState { state: post, ..key.clone() },
    }
}

/// Distribution of the decryption measurement outcome.
pub fn decrypt_distribution(
    key: &CosetState,
    ct: &DualRegevCiphertext,
) -> std::collections::BTreeMap<u64, f64> {
    measure::value_distribution(&key.state, |x| decrypt_value(ct, x))
}

/// `Revoke`: project the returned state onto `|psi_y>`. The master secret is
/// required at the interface (it is what licenses reconstructing the
/// reference); the simulator itself rebuilds the state by enumeration.
pub fn revoke(
    msk: &DrMasterSecret,
    pk: &DrPublicKey,
    returned: &PureState,
    params: &SchemeParams,
    rng: &mut Rng,
) -> Result<RevocationOutcome> {
    debug_assert_eq!(msk.pair.a, pk.a);
    let reference = build_coset_state(&pk.a, &pk.y, params.sigma, params.coset_radius())?;
    let (outcome, _) = revoke_project(returned, &reference, rng)?;
    Ok(outcome)
}

/// Classical-mode revocation: accept a returned preimage iff it is short
/// and maps `A` to `y` (the `WeakRevoke` acceptance rule).
pub fn revoke_classical(pk: &DrPublicKey, x0: &ZqVector, params: &SchemeParams) -> RevocationOutcome {
    if pk.a.mul_vec(x0) == pk.y && within_radius(x0, params.coset_radius()) {
        RevocationOutcome::Valid
    } else {
        RevocationOutcome::Invalid
    }
}

/// Multi-bit transformation: k independent single-bit ciphertexts.
pub fn encrypt_multi(
    pk: &DrPublicKey,
    bits: &[u8],
    params: &SchemeParams,
    rng: &mut Rng,
) -> Result<Vec<DualRegevCiphertext>> {
    bits.iter().map(|&b| encrypt(pk, b, params, rng)).collect()
}

/// Decrypt k ciphertexts sequentially, re-using (and collapsing) the key.
pub fn decrypt_multi_quantum(
    key: CosetState,
    cts: &[DualRegevCiphertext],
    rng: &mut Rng,
) -> (Vec<u8>, CosetState) {
    let mut bits = Vec::with_capacity(cts.len());
    let mut key = key;
    for ct in cts {
        let dec = decrypt_quantum(&key, ct, rng);
        bits.push(dec.bit);
        key = dec.post_key;
    }
    (bits, key)
}

pub fn decrypt_multi_classical(x0: &ZqVector, cts: &[DualRegevCiphertext]) -> Vec<u8> {
    cts.iter().map(|ct| decrypt_classical(x0, ct)).collect()
}

/// When the adversary commits to its plaintext relative to revocation.
/// Both figures in scope have it after; the flag keeps the other ordering
/// testable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PlaintextOrdering {
    #[default]
    AfterRevocation,
    BeforeRevocation,
}

/// Adversary interface of the 1-bit unpredictability game.
pub trait PkeAdversary {
    fn receive(&mut self, pk: &DrPublicKey, key: &CosetState, rng: &mut Rng);
    /// The state handed back for revocation (system R).
    fn return_state(&mut self) -> Result<PureState>;
    fn choose_plaintext(&mut self) -> u8 {
        0
    }
    /// Guess: 0 = "real encryption", 1 = "uniform".
    fn guess(&mut self, challenge: &DualRegevCiphertext, rng: &mut Rng) -> u8;
}

/// Returns the key untouched and guesses a coin.
pub struct HonestRandom {
    key: Option<PureState>,
}

/// Measures the key, returns the collapsed ket, keeps the measured preimage
/// and decrypts the challenge with it.
pub struct MeasureAndKeep {
    collapsed: Option<PureState>,
    kept: Option<ZqVector>,
    mu: u8,
}

/// Returns orthogonal junk (a basis state outside the coset) and guesses a
/// coin.
pub struct Discard {
    junk: Option<PureState>,
}

impl PkeAdversary for HonestRandom {
    fn receive(&mut self, _pk: &DrPublicKey, key: &CosetState, _rng: &mut Rng) {
        self.key = Some(key.state.clone());
    }
    fn return_state(&mut self) -> Result<PureState> {
        self.key
            .take()
            .ok_or_else(|| Error::AdversaryContract("return_state before receive".into()))
    }
    fn guess(&mut self, _challenge: &DualRegevCiphertext, rng: &mut Rng) -> u8 {
        (rng::uniform_u64(rng, 2)) as u8
    }
}

impl PkeAdversary for MeasureAndKeep {
    fn receive(&mut self, _pk: &DrPublicKey, key: &CosetState, rng: &mut Rng) {
        let x0 = key.state.sample_basis(rng);
        self.collapsed = Some(PureState::basis(&x0));
        self.kept = Some(x0);
    }
    fn return_state(&mut self) -> Result<PureState> {
        self.collapsed
            .take()
            .ok_or_else(|| Error::AdversaryContract("return_state before receive".into()))
    }
    fn choose_plaintext(&mut self) -> u8 {
        self.mu
    }
    fn guess(&mut self, challenge: &DualRegevCiphertext, _rng: &mut Rng) -> u8 {
        let x0 = self.kept.as_ref().expect("guess before receive");
        let decoded = decrypt_classical(x0, challenge);
        u8::from(decoded != self.mu)
    }
}

impl PkeAdversary for Discard {
    fn receive(&mut self, pk: &DrPublicKey, key: &CosetState, _rng: &mut Rng) {
        // any basis vector outside the coset is orthogonal to |psi_y>
        let q = key.state.q;
        let m = key.state.m;
        let mut probe = ZqVector::zero(m, q);
        loop {
            if pk.a.mul_vec(&probe) != pk.y {
                break;
            }
            // increment lexicographically
            for i in 0..m {
                let v = (probe.get(i) + 1) % q;
                probe.set(i, v);
                if v != 0 {
                    break;
                }
            }
        }
        self.junk = Some(PureState::basis(&probe));
    }
    fn return_state(&mut self) -> Result<PureState> {
        self.junk
            .take()
            .ok_or_else(|| Error::AdversaryContract("return_state before receive".into()))
    }
    fn guess(&mut self, _challenge: &DualRegevCiphertext, rng: &mut Rng) -> u8 {
        (rng::uniform_u64(rng, 2)) as u8
    }
}

/// Instantiate a built-in adversary by name.
pub fn pke_adversary(name: &str) -> Result<Box<dyn PkeAdversary>> {
    match name {
        "honest-random" => Ok(Box::new(HonestRandom { key: None })),
        "measure-and-keep" => Ok(Box::new(MeasureAndKeep {
            collapsed: None,
            kept: None,
            mu: 0,
        })),
        "discard" => Ok(Box::new(Discard { junk: None })),
        other => Err(Error::Parameter(format!("unknown pke adversary '{other}'"))),
    }
}

/// Run the key-revocable PKE security experiment. A trial's winning event
/// requires revocation to pass *and* the guess to be correct; an abort
/// (Invalid revocation) never contributes a win.
pub fn run_pke_experiment(
    adversary_name: &str,
    ordering: PlaintextOrdering,
    params: &SchemeParams,
    trials: usize,
    seed: u64,
) -> Result<ExperimentStats> {
    pke_adversary(adversary_name)?; // validate the name up front
    let records: Result<Vec<TrialRecord>> = (0..trials as u64)
        .into_par_iter()
        .map(|i| -> Result<TrialRecord> {
            let mut rng = rng::derive(seed, "pke-trial", i);
            let mut adv = pke_adversary(adversary_name)?;
            let (pk, key, msk) = keygen(params, KeyMode::Quantum, &mut rng)?;
            let DrDecKey::Quantum(key) = key else { unreachable!() };
            adv.receive(&pk, &key, &mut rng);
            let mu_before = match ordering {
                PlaintextOrdering::BeforeRevocation => Some(adv.choose_plaintext()),
                PlaintextOrdering::AfterRevocation => None,
            };
            let returned = adv.return_state()?;
            if returned.m != params.m || returned.q != params.q {
                return Err(Error::AdversaryContract(
                    "returned state has wrong register shape".into(),
                ));
            }
            let outcome = revoke(&msk, &pk, &returned, params, &mut rng)?;
            if outcome == RevocationOutcome::Invalid {
                // challenger aborts: no correct-guess event is possible
                return Ok(TrialRecord { index: i, revoked: false, success: false });
            }
            let mu = mu_before.unwrap_or_else(|| adv.choose_plaintext());
            let b = rng::uniform_u64(&mut rng, 2) as u8;
            let challenge = if b == 0 {
                encrypt(&pk, mu, params, &mut rng)?
            } else {
                DualRegevCiphertext {
                    c0: ZqVector::uniform(params.m, params.q, &mut rng),
                    c1: rng::uniform_u64(&mut rng, params.q),
                }
            };
            let g = adv.guess(&challenge, &mut rng);
            Ok(TrialRecord { index: i, revoked: true, success: g == b })
        })
        .collect();
    let mut records = records?;
    records.sort_by_key(|r| r.index);
    Ok(ExperimentStats::from_records(records))
}
