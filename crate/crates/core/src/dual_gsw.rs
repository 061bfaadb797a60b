//! Key-revocable DualGSW leveled FHE: matrix ciphertexts, the NAND
//! homomorphism, circuit evaluation and decryption. Key generation and
//! revocation are shared with the Dual-Regev scheme (same key object).

use crate::dual_regev::{decode_bit, DrPublicKey};
use crate::error::{Error, Result};
use crate::gadget::{gadget_inv, gadget_matrix};
use crate::gauss::{sample_matrix_colwise, DiscreteGaussian};
use crate::params::SchemeParams;
use crate::rng::Rng;
use crate::sim::coset::CosetState;
use crate::sim::measure;
use crate::zq::{ZqMatrix, ZqVector};
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq)]
pub struct GswCiphertext {
    /// `(m+1) x N` ciphertext matrix.
    pub c: ZqMatrix,
    /// NAND depth consumed so far.
    pub level: usize,
}

/// Encryption randomness, retained on request so noise invariants are
/// checkable exactly.
#[derive(Clone, Debug)]
pub struct GswRandomness {
    pub s: ZqMatrix,
    pub e_mat: ZqMatrix,
    pub e_row: ZqVector,
}

/// `Enc`: `[A^T S + E ; y^T S + e] + bit * G`.
pub fn gsw_encrypt(
    pk: &DrPublicKey,
    bit: u8,
    params: &SchemeParams,
    rng: &mut Rng,
) -> Result<GswCiphertext> {
    Ok(gsw_encrypt_traced(pk, bit, params, rng)?.0)
}

pub fn gsw_encrypt_traced(
    pk: &DrPublicKey,
    bit: u8,
    params: &SchemeParams,
    rng: &mut Rng,
) -> Result<(GswCiphertext, GswRandomness)> {
    if bit > 1 {
        return Err(Error::Parameter("plaintext must be a bit".into()));
    }
    let q = params.q;
    let n_g = params.n_gadget;
    let s = ZqMatrix::uniform(params.n, n_g, q, rng);
    let e_mat = sample_matrix_colwise(params.m, n_g, params.alpha * q as f64, q, rng)?;
    let dg = DiscreteGaussian::new(1, params.beta * q as f64, q)?;
    let e_row = ZqVector::from_entries((0..n_g).map(|_| dg.sample(rng).get(0)).collect(), q);

    let top = pk.a.transpose().mul(&s).add(&e_mat);
    let bottom_entries = s.vec_mul(&pk.y).add(&e_row);
    let bottom = ZqMatrix::from_entries(1, n_g, bottom_entries.entries().to_vec(), q);
    let mut c = top.vconcat(&bottom);
    if bit == 1 {
        c = c.add(&gadget_matrix(params.m + 1, q));
    }
    Ok((GswCiphertext { c, level: 0 }, GswRandomness { s, e_mat, e_row }))
}

/// The secret row `(-x0, 1)` of length m+1.
pub fn secret_row(x0: &ZqVector) -> ZqVector {
    let mut entries: Vec<u64> = x0.neg().entries().to_vec();
    entries.push(1);
    ZqVector::from_entries(entries, x0.q)
}

/// Exact GSW invariant error: `(-x0, 1) * CT - bit * (-x0, 1) * G`, a row
/// N-vector that stays short while the invariant holds.
pub fn secret_side_error(ct: &GswCiphertext, x0: &ZqVector, bit: u8) -> ZqVector {
    let q = x0.q;
    let row = secret_row(x0);
    let lhs = ct.c.vec_mul(&row);
    let g_row = gadget_matrix(x0.len() + 1, q).vec_mul(&row);
    lhs.sub(&g_row.scale(bit as u64))
}

/// Error of a fresh ciphertext from its randomness: `e - x0^T E`.
pub fn fresh_error(rand: &GswRandomness, x0: &ZqVector) -> ZqVector {
    rand.e_row.sub(&rand.e_mat.vec_mul(x0))
}

/// `Eval` of one NAND: `G - CT0 * G^{-1}(CT1)`.
pub fn eval_nand(
    ct0: &GswCiphertext,
    ct1: &GswCiphertext,
    params: &SchemeParams,
) -> Result<GswCiphertext> {
    if ct0.level >= params.big_l || ct1.level >= params.big_l {
        return Err(Error::Circuit(format!(
            "NAND would exceed the depth bound L = {}",
            params.big_l
        )));
    }
    let g = gadget_matrix(params.m + 1, params.q);
    let c = g.sub(&ct0.c.mul(&gadget_inv(&ct1.c)));
    Ok(GswCiphertext { c, level: ct0.level.max(ct1.level) + 1 })
}

/// Ciphertext with its exact tracked plaintext and noise (relative to a
/// fixed secret `x0`); the debug channel of the noise invariants.
#[derive(Clone, Debug)]
pub struct TracedGsw {
    pub ct: GswCiphertext,
    pub plaintext: u8,
    pub err: ZqVector,
}

impl TracedGsw {
    pub fn fresh(
        ct: GswCiphertext,
        rand: &GswRandomness,
        bit: u8,
        x0: &ZqVector,
    ) -> Self {
        let err = fresh_error(rand, x0);
        TracedGsw { ct, plaintext: bit, err }
    }

    /// Check the tracked error against the secret-side recomputation.
    pub fn check_invariant(&self, x0: &ZqVector) -> bool {
        secret_side_error(&self.ct, x0, self.plaintext) == self.err
    }
}

/// Traced NAND: propagates plaintext and the exact error recurrence
/// `err = -mu0 * err1 - err0 * G^{-1}(CT1)`.
pub fn eval_nand_traced(
    t0: &TracedGsw,
    t1: &TracedGsw,
    params: &SchemeParams,
) -> Result<TracedGsw> {
    let ct = eval_nand(&t0.ct, &t1.ct, params)?;
    let decomp = gadget_inv(&t1.ct.c);
    let via_decomp = decomp.vec_mul(&t0.err);
    let err = t1.err.scale(t0.plaintext as u64).add(&via_decomp).neg();
    let plaintext = 1 - (t0.plaintext & t1.plaintext);
    Ok(TracedGsw { ct, plaintext, err })
}

/// `Dec` (classical): decode the last ciphertext column against `(-x0, 1)`.
pub fn gsw_decrypt_classical(x0: &ZqVector, ct: &GswCiphertext) -> u8 {
    let v = gsw_decrypt_value(ct, x0);
    decode_bit(v, x0.q)
}

/// The decryption scalar `(-x, 1) . CT_N` for a given preimage.
pub fn gsw_decrypt_value(ct: &GswCiphertext, x: &ZqVector) -> u64 {
    let last = ct.c.col(ct.c.cols - 1);
    let q = x.q;
    // (-x, 1) . last = last[m] - <x, last[0..m]>
    let head = ZqVector::from_entries(last.entries()[..x.len()].to_vec(), q);
    (last.get(x.len()) + q - head.dot(x) % q) % q
}

/// `Dec` (quantum): measure the value register over the coset state; the
/// exact conditional post-state becomes the new key, as in Dual-Regev.
pub struct GswQuantumDecryption {
    pub bit: u8,
    pub outcome: u64,
    pub post_key: CosetState,
}

pub fn gsw_decrypt_quantum(
    key: &CosetState,
    ct: &GswCiphertext,
    rng: &mut Rng,
) -> GswQuantumDecryption {
    let (outcome, post) = measure::measure_value(&key.state, |x| gsw_decrypt_value(ct, x), rng);
    GswQuantumDecryption {
        bit: decode_bit(outcome, key.state.q),
        outcome,
        post_key: CosetState { state: post, ..key.clone() },
    }
}

/// A DAG of NAND gates over named wires, with a single output.
#[derive(Clone, Debug, PartialEq)]
pub struct NandCircuit {
    pub inputs: Vec<String>,
    /// `(gate id, left wire, right wire)` in definition order; inputs of a
    /// gate must already be defined.
    pub gates: Vec<(String, String, String)>,
    pub output: String,
}

impl NandCircuit {
    /// Parse the textual netlist: lines `in <id>`, `gate <id> = NAND(<a>,<b>)`
    /// and a single `out <id>`. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut inputs = Vec::new();
        let mut gates: Vec<(String, String, String)> = Vec::new();
        let mut output = None;
        let mut defined: Vec<String> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: &str| {
                Error::Circuit(format!("line {}: {msg}: '{raw}'", lineno + 1))
            };
            if let Some(rest) = line.strip_prefix("in ") {
                let id = rest.trim().to_string();
                if id.is_empty() || defined.contains(&id) {
                    return Err(err("bad or duplicate input id"));
                }
                defined.push(id.clone());
                inputs.push(id);
            } else if let Some(rest) = line.strip_prefix("gate ") {
                let (id, expr) = rest
                    .split_once('=')
                    .ok_or_else(|| err("expected 'gate <id> = NAND(<a>,<b>)'"))?;
                let id = id.trim().to_string();
                let expr = expr.trim();
                let body = expr
                    .strip_prefix("NAND(")
                    .and_then(|s| s.strip_suffix(')'))
                    .ok_or_else(|| err("expected NAND(<a>,<b>)"))?;
                let (a, b) = body
                    .split_once(',')
                    .ok_or_else(|| err("expected two gate arguments"))?;
                let (a, b) = (a.trim().to_string(), b.trim().to_string());
                if defined.contains(&id) {
                    return Err(err("duplicate wire id"));
                }
                if !defined.contains(&a) || !defined.contains(&b) {
                    return Err(err("gate argument not yet defined"));
                }
                defined.push(id.clone());
                gates.push((id, a, b));
            } else if let Some(rest) = line.strip_prefix("out ") {
                if output.is_some() {
                    return Err(err("multiple outputs"));
                }
                let id = rest.trim().to_string();
                if !defined.contains(&id) {
                    return Err(err("output wire not defined"));
                }
                output = Some(id);
            } else {
                return Err(err("unrecognized line"));
            }
        }
        let output = output.ok_or_else(|| Error::Circuit("missing 'out' line".into()))?;
        Ok(NandCircuit { inputs, gates, output })
    }

    pub fn to_netlist(&self) -> String {
        let mut out = String::new();
        for i in &self.inputs {
            out.push_str(&format!("in {i}\n"));
        }
        for (id, a, b) in &self.gates {
            out.push_str(&format!("gate {id} = NAND({a},{b})\n"));
        }
        out.push_str(&format!("out {}\n", self.output));
        out
    }

    /// NAND depth of the output wire.
    pub fn depth(&self) -> usize {
        let mut depth: BTreeMap<&str, usize> = BTreeMap::new();
        for i in &self.inputs {
            depth.insert(i, 0);
        }
        for (id, a, b) in &self.gates {
            let d = 1 + depth[a.as_str()].max(depth[b.as_str()]);
            depth.insert(id, d);
        }
        depth[self.output.as_str()]
    }

    /// Plaintext evaluation, the oracle for homomorphic runs.
    pub fn eval_plain(&self, bits: &[u8]) -> Result<u8> {
        if bits.len() != self.inputs.len() {
            return Err(Error::Circuit(format!(
                "expected {} input bits, got {}",
                self.inputs.len(),
                bits.len()
            )));
        }
        let mut values: BTreeMap<&str, u8> = BTreeMap::new();
        for (i, id) in self.inputs.iter().enumerate() {
            values.insert(id, bits[i] & 1);
        }
        for (id, a, b) in &self.gates {
            let v = 1 - (values[a.as_str()] & values[b.as_str()]);
            values.insert(id, v);
        }
        Ok(values[self.output.as_str()])
    }
}

/// Evaluate a circuit gate by gate in definition (topological) order.
pub fn eval_circuit(
    cts: &[GswCiphertext],
    circuit: &NandCircuit,
    params: &SchemeParams,
) -> Result<GswCiphertext> {
    if circuit.depth() > params.big_l {
        return Err(Error::Circuit(format!(
            "circuit depth {} exceeds the bound L = {}",
            circuit.depth(),
            params.big_l
        )));
    }
    if cts.len() != circuit.inputs.len() {
        return Err(Error::Circuit(format!(
            "expected {} input ciphertexts, got {}",
            circuit.inputs.len(),
            cts.len()
        )));
    }
    let mut wires: BTreeMap<&str, GswCiphertext> = BTreeMap::new();
    for (i, id) in circuit.inputs.iter().enumerate() {
        wires.insert(id, cts[i].clone());
    }
    for (id, a, b) in &circuit.gates {
        let out = eval_nand(&wires[a.as_str()], &wires[b.as_str()], params)?;
        wires.insert(id, out);
    }
    Ok(wires[circuit.output.as_str()].clone())
}

/// Traced variant used by the noise-invariant checks: every intermediate
/// gate's tracked error is validated against the secret-side recomputation.
pub fn eval_circuit_traced(
    cts: &[TracedGsw],
    circuit: &NandCircuit,
    params: &SchemeParams,
    x0: &ZqVector,
) -> Result<TracedGsw> {
    if cts.len() != circuit.inputs.len() {
        return Err(Error::Circuit("input count mismatch".into()));
    }
    let mut wires: BTreeMap<&str, TracedGsw> = BTreeMap::new();
    for (i, id) in circuit.inputs.iter().enumerate() {
        wires.insert(id, cts[i].clone());
    }
    for (id, a, b) in &circuit.gates {
        let out = eval_nand_traced(&wires[a.as_str()], &wires[b.as_str()], params)?;
        if !out.check_invariant(x0) {
            return Err(Error::Circuit(format!(
                "tracked noise diverged from the secret-side recomputation at gate {id}"
            )));
        }
        wires.insert(id, out);
    }
    Ok(wires[circuit.output.as_str()].clone())
}

/// All NAND circuits over two inputs with at most `max_gates` gates, where
/// gate i may read any earlier wire; used to sweep every depth-<=3 shape.
pub fn all_two_input_circuits(max_gates: usize) -> Vec<NandCircuit> {
    let mut out = Vec::new();
    let base = vec!["a".to_string(), "b".to_string()];
    for gates in 1..=max_gates {
        // choices[i] = (left, right) indices into wires 0..2+i
        let mut choice = vec![(0usize, 0usize); gates];
        loop {
            let mut circuit_gates = Vec::new();
            for (i, &(l, r)) in choice.iter().enumerate() {
                let name = |idx: usize| {
                    if idx < 2 {
                        base[idx].clone()
                    } else {
                        format!("g{}", idx - 2)
                    }
                };
                circuit_gates.push((format!("g{i}"), name(l), name(r)));
            }
            out.push(NandCircuit {
                inputs: base.clone(),
                gates: circuit_gates,
                output: format!("g{}", gates - 1),
            });
            // odometer over choice
            let mut done = true;
            for i in 0..gates {
                let bound = 2 + i;
                let (mut l, mut r) = choice[i];
                r += 1;
                if r >= bound {
                    r = 0;
                    l += 1;
                    if l >= bound {
                        l = 0;
                        choice[i] = (l, r);
                        continue;
                    }
                }
                choice[i] = (l, r);
                done = false;
                break;
            }
            if done {
                break;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dual_regev::{keygen, DrDecKey, KeyMode};
    use crate::rng;

    fn noiseless_params() -> SchemeParams {
        SchemeParams::new(1, 4, 7, 2.0, 0.0, 0.0, 2, 4, false).unwrap()
    }

    fn noisy_params() -> SchemeParams {
        // q large enough that a single NAND keeps noise under q/4
        SchemeParams::new(1, 12, 521, 3.0, 1.0 / 521.0, 1.0 / 521.0, 2, 4, false).unwrap()
    }

    #[test]
    fn noiseless_encrypt_decrypt() {
        let params = noiseless_params();
        let mut r = rng::derive(101, "gsw", 0);
        let (pk, key, _) = keygen(&params, KeyMode::Classical, &mut r).unwrap();
        let DrDecKey::Classical(x0) = key else { panic!() };
        for bit in [0u8, 1] {
            let ct = gsw_encrypt(&pk, bit, &params, &mut r).unwrap();
            assert_eq!(ct.c.rows, params.m + 1);
            assert_eq!(ct.c.cols, params.n_gadget);
            assert_eq!(gsw_decrypt_classical(&x0, &ct), bit);
        }
    }

    #[test]
    fn zero_noise_zero_plaintext_is_annihilated() {
        let params = noiseless_params();
        let mut r = rng::derive(102, "gsw-zero", 0);
        let (pk, key, _) = keygen(&params, KeyMode::Classical, &mut r).unwrap();
        let DrDecKey::Classical(x0) = key else { panic!() };
        let ct = gsw_encrypt(&pk, 0, &params, &mut r).unwrap();
        assert!(secret_side_error(&ct, &x0, 0).is_zero());
    }

    #[test]
    fn secret_side_identity_with_noise() {
        // (-x0,1) CT = mu (-x0,1) G + err with err = e - x0^T E exactly
        let params = noisy_params();
        let mut r = rng::derive(103, "gsw-noise", 0);
        let (pk, key, _) = keygen(&params, KeyMode::Classical, &mut r).unwrap();
        let DrDecKey::Classical(x0) = key else { panic!() };
        for bit in [0u8, 1] {
            let (ct, rand) = gsw_encrypt_traced(&pk, bit, &params, &mut r).unwrap();
            let err = secret_side_error(&ct, &x0, bit);
            assert_eq!(err, fresh_error(&rand, &x0));
            // noise bound from the actual randomness
            let bound = rand.e_row.inf_norm()
                + x0.inf_norm() * rand.e_mat.inf_norm() * params.m as u64;
            assert!(err.inf_norm() <= bound);
        }
    }

    #[test]
    fn nand_truth_table_noiseless() {
        let params = noiseless_params();
        let mut r = rng::derive(104, "gsw-nand", 0);
        let (pk, key, _) = keygen(&params, KeyMode::Classical, &mut r).unwrap();
        let DrDecKey::Classical(x0) = key else { panic!() };
        for a in [0u8, 1] {
            for b in [0u8, 1] {
                let ct_a = gsw_encrypt(&pk, a, &params, &mut r).unwrap();
                let ct_b = gsw_encrypt(&pk, b, &params, &mut r).unwrap();
                let ct = eval_nand(&ct_a, &ct_b, &params).unwrap();
                assert_eq!(ct.level, 1);
                assert_eq!(gsw_decrypt_classical(&x0, &ct), 1 - (a & b));
            }
        }
    }

    #[test]
    fn nand_with_noise_and_exact_tracking() {
        let params = noisy_params();
        for seed in 0..100u64 {
            let mut r = rng::derive(105, "gsw-nand-noise", seed);
            let (pk, key, _) = keygen(&params, KeyMode::Classical, &mut r).unwrap();
            let DrDecKey::Classical(x0) = key else { panic!() };
            for (a, b) in [(0u8, 0u8), (0, 1), (1, 0), (1, 1)] {
                let (ct_a, ra) = gsw_encrypt_traced(&pk, a, &params, &mut r).unwrap();
                let (ct_b, rb) = gsw_encrypt_traced(&pk, b, &params, &mut r).unwrap();
                let ta = TracedGsw::fresh(ct_a, &ra, a, &x0);
                let tb = TracedGsw::fresh(ct_b, &rb, b, &x0);
                assert!(ta.check_invariant(&x0));
                assert!(tb.check_invariant(&x0));
                let t = eval_nand_traced(&ta, &tb, &params).unwrap();
                assert!(t.check_invariant(&x0), "seed {seed} inputs ({a},{b})");
                assert_eq!(t.plaintext, 1 - (a & b));
                // decoding stays correct while tracked noise < q/4
                assert!((t.err.inf_norm() as f64) < params.q as f64 / 4.0);
                assert_eq!(gsw_decrypt_classical(&x0, &t.ct), t.plaintext);
                // one-NAND growth bound: |err| <= (N+1) * max input noise
                let in_max = ta.err.inf_norm().max(tb.err.inf_norm());
                assert!(t.err.inf_norm() <= (params.n_gadget as u64 + 1) * in_max.max(1));
            }
        }
    }

    #[test]
    fn not_and_and_via_nand() {
        let params = noiseless_params();
        let mut r = rng::derive(106, "gsw-circuits", 0);
        let (pk, key, _) = keygen(&params, KeyMode::Classical, &mut r).unwrap();
        let DrDecKey::Classical(x0) = key else { panic!() };
        // NOT via NAND(a, a)
        for a in [0u8, 1] {
            let ct = gsw_encrypt(&pk, a, &params, &mut r).unwrap();
            let not = eval_nand(&ct, &ct, &params).unwrap();
            assert_eq!(gsw_decrypt_classical(&x0, &not), 1 - a);
        }
        // AND via NAND(NAND(a,b), NAND(a,b))
        for a in [0u8, 1] {
            for b in [0u8, 1] {
                let ca = gsw_encrypt(&pk, a, &params, &mut r).unwrap();
                let cb = gsw_encrypt(&pk, b, &params, &mut r).unwrap();
                let nand = eval_nand(&ca, &cb, &params).unwrap();
                let and = eval_nand(&nand, &nand, &params).unwrap();
                assert_eq!(gsw_decrypt_classical(&x0, &and), a & b);
            }
        }
    }

    #[test]
    fn depth_bound_enforced() {
        let params = SchemeParams::new(1, 4, 7, 2.0, 0.0, 0.0, 2, 1, false).unwrap();
        let mut r = rng::derive(107, "gsw-depth", 0);
        let (pk, _, _) = keygen(&params, KeyMode::Classical, &mut r).unwrap();
        let ct = gsw_encrypt(&pk, 1, &params, &mut r).unwrap();
        let lvl1 = eval_nand(&ct, &ct, &params).unwrap();
        assert!(eval_nand(&lvl1, &lvl1, &params).is_err());
    }

    #[test]
    fn netlist_round_trip_and_eval() {
        let text = "in a\nin b\ngate g0 = NAND(a,b)\ngate g1 = NAND(g0,g0)\nout g1\n";
        let c = NandCircuit::parse(text).unwrap();
        assert_eq!(c.depth(), 2);
        assert_eq!(c.to_netlist(), text);
        // g1 computes AND(a,b)
        for (a, b) in [(0u8, 0u8), (0, 1), (1, 0), (1, 1)] {
            assert_eq!(c.eval_plain(&[a, b]).unwrap(), a & b);
        }
    }

    #[test]
    fn netlist_errors() {
        assert!(NandCircuit::parse("in a\nout a\nout a\n").is_err());
        assert!(NandCircuit::parse("gate g = NAND(a,b)\nout g\n").is_err());
        assert!(NandCircuit::parse("in a\nbogus\nout a\n").is_err());
        assert!(NandCircuit::parse("in a\n").is_err());
    }

    #[test]
    fn random_depth3_circuits_match_plaintext_oracle() {
        let params = noiseless_params();
        let circuits = all_two_input_circuits(3);
        assert_eq!(circuits.len(), 4 + 4 * 9 + 4 * 9 * 16);
        let mut r = rng::derive(108, "gsw-d3", 0);
        let (pk, key, _) = keygen(&params, KeyMode::Classical, &mut r).unwrap();
        let DrDecKey::Classical(x0) = key else { panic!() };
        for (a, b) in [(0u8, 0u8), (1, 0), (1, 1)] {
            let ca = gsw_encrypt(&pk, a, &params, &mut r).unwrap();
            let cb = gsw_encrypt(&pk, b, &params, &mut r).unwrap();
            for circuit in circuits.iter().take(60) {
                let out = eval_circuit(&[ca.clone(), cb.clone()], circuit, &params).unwrap();
                let expected = circuit.eval_plain(&[a, b]).unwrap();
                assert_eq!(gsw_decrypt_classical(&x0, &out), expected);
            }
        }
    }

    #[test]
    fn quantum_decrypt_and_revoke() {
        let params = noiseless_params();
        let mut r = rng::derive(109, "gsw-quantum", 0);
        let (pk, key, msk) = keygen(&params, KeyMode::Quantum, &mut r).unwrap();
        let DrDecKey::Quantum(key) = key else { panic!() };
        let ct = gsw_encrypt(&pk, 1, &params, &mut r).unwrap();
        let dec = gsw_decrypt_quantum(&key, &ct, &mut r);
        assert_eq!(dec.bit, 1);
        let out =
            crate::dual_regev::revoke(&msk, &pk, &dec.post_key.state, &params, &mut r).unwrap();
        assert_eq!(out, crate::sim::measure::RevocationOutcome::Valid);
    }
}
