//! Key-revocable lattice cryptography at desk scale.
//!
//! The crate implements key-revocable Dual-Regev public-key encryption, the
//! key-revocable DualGSW leveled FHE, and revocable PRFs, together with an
//! exact sparse simulator of the Gaussian coset states that serve as quantum
//! decryption keys, and executable versions of the supporting reduction
//! lemmas. Everything is sized for exact verification at tiny parameters:
//! brute-force oracles, not asymptotics, are the ground truth here.

pub mod dual_gsw;
pub mod dual_regev;
pub mod error;
pub mod experiment;
pub mod gadget;
pub mod gauss;
pub mod params;
pub mod prf;
pub mod reductions;
pub mod rng;
pub mod serialize;
pub mod shift_hiding;
pub mod sim;
pub mod trapdoor;
pub mod zq;

pub use error::{Error, Result};
pub use params::SchemeParams;
pub use sim::{CosetState, PureState};
pub use zq::{ZqMatrix, ZqVector};
