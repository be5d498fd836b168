//! Capacity bounds for symmetric multi-relay, single-receiver C-RAN downlinks.
//!
//! A central encoder feeds `M` relays over fronthaul links of `C` bits per
//! channel use; the relays share a multiple-access channel to one receiver.
//! This crate evaluates lower bounds achieved by Marton-style coding with
//! correlated relay inputs, upper bounds built from an auxiliary noisy copy
//! of the channel output, and the fronthaul regimes where the two coincide.
//! It also simulates the random-coding scheme on tiny discrete channels.
//!
//! All rates are in bits per channel use.

pub mod discrete;
pub mod error;
pub mod gaussian;
pub mod gaussian_bounds;
pub mod info;
pub mod mac;
pub mod random;
pub mod sim;
pub mod solve;
pub mod thm2;
pub mod verify;

pub use discrete::{
    marton_region_feasible, marton_violations, optimize_thm1, symmetric_full_set_feasible,
    thm1_rate, AuxChannels, DiscreteBoundResult, MartonRates, SearchConfig, SearchStatus,
    Violation,
};
pub use error::{CoreError, Result};
pub use gaussian::{
    gaussian_conditional_multi_information, gaussian_det, gaussian_multi_information, GaussianCov,
};
pub use gaussian_bounds::{
    lb_constraints, lower_bound, lower_bound_with, n_choice, regimes, sweep, tightness_check,
    ub_fixed_point, ub_rhs, upper_bound, upper_bound_with, GaussianNetwork, LbBinding,
    LowerBoundResult, Regime, RegimeReport, SolverConfig, SweepRow, TightnessReport,
    UpperBoundResult,
};
pub use info::{
    conditional_multi_information, multi_information, symmetrize, JointPmf, Orbits, SymmetricPmf,
};
pub use mac::DiscreteMac;
pub use thm2::{thm2_branches, thm2_upper, AuxConfig};
pub use sim::{
    build_codebooks, decode, encode, run_trials, Codebooks, Decoded, Encoded, SimConfig, TrialOutcome,
};
pub use verify::{run_suite, Suite, SuiteReport};
