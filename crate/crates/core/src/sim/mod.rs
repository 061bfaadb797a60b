//! Exact sparse simulation of the Gaussian coset states, the q-ary Fourier
//! transform, and the revocation measurements.

pub mod coset;
pub mod dual;
pub mod measure;
pub mod qft;
pub mod state;

pub use coset::{build_coset_state, enumerate_coset, gen_gauss, CosetState, ENUM_BUDGET};
pub use dual::{dual_state, qsamp_gauss, QSampResult};
pub use measure::{revoke_project, weak_revoke, RevocationOutcome};
pub use qft::{qft, qft_inv};
pub use state::{Ensemble, PureState};
