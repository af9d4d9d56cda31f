//! Deterministic Monte-Carlo simulator for over-the-air time synchronization
//! between a 5G gNB acting as boundary clock for TSN grandmaster time and
//! the UEs it serves.
//!
//! The crate quantifies the cumulative UE-gNB time difference under clock
//! drift, TA-quantized path-delay estimation, transmit time-alignment error,
//! reference-time-granularity error and time-of-arrival error, and budgets
//! how many TSN domains fit into one SIB broadcast.
//!
//! Modules:
//!
//! * [`nr_timing`] — NR numerology constants and TA lattice arithmetic.
//! * [`error_models`] — per-sync-event error samplers.
//! * [`clock_sim`] — drift-and-reset simulation of the time difference.
//! * [`stats`] — summary statistics, percentiles, empirical CDFs.
//! * [`capacity`] — SIB payload budgeting.
//! * [`experiments`] — preset scenario runners with CSV/JSON emission.
//!
//! The math is generic over the scalar type (`f32`/`f64` via [`scalar::Scalar`]);
//! the aliases below fix `f64`, which everything user-facing uses. Every
//! stochastic path takes an explicit seed and is bit-reproducible.

pub mod capacity;
pub mod clock_sim;
pub mod error_models;
pub mod experiments;
pub mod nr_timing;
pub mod scalar;
pub mod stats;

/// Scalar type used by the shipped binaries and presets.
pub type TimeNs = f64;

pub type Numerology = nr_timing::Numerology<TimeNs>;
pub type ErrorConfig = error_models::ErrorConfig<TimeNs>;
pub type SyncErrorSample = error_models::SyncErrorSample<TimeNs>;
pub type SimConfig = clock_sim::SimConfig<TimeNs>;
pub type Trace = clock_sim::Trace<TimeNs>;
pub type SummaryStats = stats::SummaryStats<TimeNs>;

pub use capacity::{sib_domain_capacity, GptpPayloadLayout, SIB_MAX_BITS};
pub use clock_sim::{advance, apply_sync, simulate, SimError};
pub use error_models::{
    compose_sync_error, pd_estimation_residual, sample_rtge, sample_tae, sample_toa,
    toa_bound_3gpp, toa_sigma, Correction, ModelError, PdMode, RtgeGranularity, ToaModel,
};
pub use nr_timing::{
    basic_time_unit, pd_compensation_connected, ta_index_for_rtt, path_delay_estimate,
    PathDelayInput, TaCommand, TaMode, TimingError,
};
pub use scalar::Scalar;
pub use stats::{empirical_cdf, percentile, summarize, summarize_with_percentiles, StatsError};
