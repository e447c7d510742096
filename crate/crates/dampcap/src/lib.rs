//! # dampcap
//!
//! Certified lower bounds on the classical capacity of multilevel damping
//! channels.
//!
//! A damping channel on a `d`-level system moves population only downwards:
//! level `n` can decay to any `m <= n`, never upwards. Such a channel is
//! fixed by a nonnegative amplitude matrix `c[m][n]` whose squared columns
//! are the decay probabilities. This crate
//!
//! - builds the Kraus operators of the channel and simulates its action on
//!   density matrices ([`channel`]),
//! - computes the transition matrices seen when coding on the computational
//!   basis and on the Fourier basis ([`channel`]),
//! - maximizes the mutual information of a transition matrix over input
//!   priors with the Blahut-Arimoto recursion, evaluates both Holevo
//!   quantities, and reports the detected capacity `C_DET` — the better of
//!   the two single-basis mutual informations ([`capacity`]),
//! - provides nine parametric damping families (binomial, hypergeometric,
//!   negative hypergeometric, beta-binomial, geometric, constant-ratio,
//!   two-jump, Lambda, V) with closed-form moment diagnostics
//!   ([`families`]),
//! - runs parameter sweeps from JSON configs or built-in figure presets and
//!   emits CSV/JSON result tables ([`sweep`], [`emit`]).
//!
//! Everything is plain dense `f64`/`Complex64` arithmetic, dimension-capped
//! at 64; all entropies and informations are in bits.

#![forbid(unsafe_code)]

pub mod capacity;
pub mod channel;
pub mod emit;
pub mod families;
pub mod numerics;
pub mod sweep;

pub use capacity::{
    blahut_arimoto, detected_capacity, holevo_direct, holevo_fourier, mutual_information,
    symmetric_capacity, BAResult, Basis, CapacityReport,
};
pub use channel::{
    amplitudes_from_transition, apply_channel, direct_transition, fourier_output_state,
    fourier_transition, fourier_transition_oracle, kraus_operators, level_populations,
    AmplitudeMatrix, KrausSet, TransitionMatrix,
};
pub use families::{ChannelSpec, Family, ParamValue, Params};
pub use numerics::{
    hermitian_eigenvalues, log_beta, log_binomial, shannon_entropy, von_neumann_entropy, xlogx,
    HermitianMatrix, ProbVector,
};
pub use sweep::{figure_preset, parse_config, run_sweep, SweepRow, SweepSpec};

/// Largest supported system dimension. Dense complex algebra and the
/// quartic Fourier sum stay cheap up to here.
pub const MAX_DIM: usize = 64;
