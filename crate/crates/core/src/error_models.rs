//! Per-sync-event error sampling.
//!
//! Each delivery of reference time to the UE is touched by three air-interface
//! error sources plus the path-delay estimation residual:
//!
//! * **TAE** — transmit frame-timing misalignment at the gNB antenna
//!   connectors, a requirement bound of +/-65 ns, modeled uniform.
//! * **RTGE** — finite resolution `G_R` of the broadcast reference time,
//!   contributing uniform +/-`G_R/2`. `G_R` itself is either fixed or drawn
//!   per event from a configured interval.
//! * **ToA** — downlink detection and processing jitter at the receiver,
//!   either bounded per sub-carrier spacing (3GPP table) or zero-mean
//!   Gaussian with `sigma = U(mu) / kappa`.
//!
//! How ToA reaches the total depends on how path delay is estimated. With
//! TA-based estimation the gNB quantizes a noisy round-trip measurement onto
//! the TA lattice, so the ToA draw is absorbed into the quantization decision
//! and only surfaces through the path-delay residual. With cell-radius
//! estimation there is no exchange to absorb it, so the detection error lands
//! additively on the delivered time.
//!
//! The floor quantizer systematically under-estimates the path delay by half
//! a TA step on average; the optional correction adds that half step back,
//! centering the residual without touching its spread.
//!
//! All samplers take an explicit RNG so a run is a pure function of its seed.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::nr_timing::{
    ta_index_for_rtt, Numerology, TaMode, TimingError, SPEED_OF_LIGHT_M_PER_S,
    TA_RANDOM_ACCESS_MAX,
};
use crate::scalar::{cast, Scalar};

/// Gaussian ToA draws beyond this many sigma are rejected and redrawn,
/// bounding the seed sensitivity of max-error statistics.
pub const GAUSSIAN_TRUNCATION_SIGMA: f64 = 6.0;

/// Default ground-truth path delay, in TA time units: deliberately off the
/// quantization lattice so floor residuals are exercised.
pub const DEFAULT_TRUE_PD_TA_UNITS: f64 = 10.37;

/// Configuration errors for the error models.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("{name} must be >= 0, got {value}")]
    Negative { name: &'static str, value: f64 },
    #[error("kappa must be > 0, got {value}")]
    InvalidKappa { value: f64 },
    #[error("granularity range lo {lo} > hi {hi}")]
    InvertedRange { lo: f64, hi: f64 },
}

/// Reference time granularity `G_R`: fixed, or drawn uniformly per event.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RtgeGranularity<R> {
    Fixed(R),
    Range { lo: R, hi: R },
}

/// Time-of-arrival error model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ToaModel<R> {
    /// Uniform within the per-SCS 3GPP bound.
    Table3gpp,
    /// Zero-mean Gaussian with `sigma = U(mu) / kappa`, truncated at
    /// [`GAUSSIAN_TRUNCATION_SIGMA`].
    Gaussian { kappa: R },
}

/// Bias correction added to the TA-based path-delay estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Correction<R> {
    /// No correction.
    None,
    /// Add half a quantization step, cancelling the floor under-estimate.
    HalfGranularity,
    /// Fixed signed offset in ns.
    Custom(R),
}

/// How the path delay is estimated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PdMode<R> {
    /// Quantize a noisy round-trip measurement onto the TA lattice.
    TaBased,
    /// Assume a cell radius; `None` means the radius matches the true
    /// distance exactly.
    CellRadius { radius_m: Option<R> },
}

/// Distributions and bounds for one simulation scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorConfig<R> {
    /// Half-width of the TAE interval in ns.
    pub tae_bound_ns: R,
    /// Reference time granularity.
    pub rtge: RtgeGranularity<R>,
    /// ToA error model.
    pub toa: ToaModel<R>,
    /// Path-delay bias correction (TA-based mode only).
    pub correction: Correction<R>,
    /// Ground-truth one-way path delay in ns; `None` picks the default
    /// off-lattice point [`DEFAULT_TRUE_PD_TA_UNITS`] * U(mu).
    pub true_pd_ns: Option<R>,
    /// Path-delay estimation mode.
    pub pd_mode: PdMode<R>,
}

impl<R: Scalar> Default for ErrorConfig<R> {
    fn default() -> Self {
        Self {
            tae_bound_ns: cast(65.0),
            rtge: RtgeGranularity::Range {
                lo: cast(10.0),
                hi: cast(300.0),
            },
            toa: ToaModel::Gaussian { kappa: cast(2.0) },
            correction: Correction::None,
            true_pd_ns: None,
            pd_mode: PdMode::TaBased,
        }
    }
}

impl<R: Scalar> ErrorConfig<R> {
    /// A configuration in which every sync event lands with zero error.
    pub fn zeroed() -> Self {
        Self {
            tae_bound_ns: R::zero(),
            rtge: RtgeGranularity::Fixed(R::zero()),
            toa: ToaModel::Gaussian {
                kappa: R::infinity(),
            },
            correction: Correction::None,
            true_pd_ns: Some(R::zero()),
            pd_mode: PdMode::TaBased,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let non_negative = |name: &'static str, v: R| {
            if v < R::zero() {
                Err(ModelError::Negative {
                    name,
                    value: v.to_f64().unwrap_or(f64::NAN),
                })
            } else {
                Ok(())
            }
        };
        non_negative("tae_bound_ns", self.tae_bound_ns)?;
        match self.rtge {
            RtgeGranularity::Fixed(g) => non_negative("rtge_granularity_ns", g)?,
            RtgeGranularity::Range { lo, hi } => {
                non_negative("rtge_granularity_lo", lo)?;
                non_negative("rtge_granularity_hi", hi)?;
                if lo > hi {
                    return Err(ModelError::InvertedRange {
                        lo: lo.to_f64().unwrap_or(f64::NAN),
                        hi: hi.to_f64().unwrap_or(f64::NAN),
                    });
                }
            }
        }
        if let ToaModel::Gaussian { kappa } = self.toa {
            if kappa <= R::zero() || kappa.is_nan() {
                return Err(ModelError::InvalidKappa {
                    value: kappa.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        if let Some(pd) = self.true_pd_ns {
            non_negative("true_pd_ns", pd)?;
        }
        if let PdMode::CellRadius { radius_m: Some(r) } = self.pd_mode {
            non_negative("radius_m", r)?;
        }
        Ok(())
    }

    /// Ground-truth one-way path delay for the given numerology.
    pub fn true_pd(&self, num: &Numerology<R>) -> R {
        self.true_pd_ns
            .unwrap_or_else(|| cast::<R>(DEFAULT_TRUE_PD_TA_UNITS) * num.ta_time_unit_ns())
    }
}

/// One sampled sync-event error, component by component.
///
/// In TA-based mode `total_ns == tae_ns + rtge_ns + pd_residual_ns`; the ToA
/// draw is recorded but reaches the total only through the TA selection. In
/// cell-radius mode the ToA term is additive:
/// `total_ns == tae_ns + rtge_ns + toa_ns + pd_residual_ns`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyncErrorSample<R> {
    pub tae_ns: R,
    pub rtge_ns: R,
    pub toa_ns: R,
    pub pd_residual_ns: R,
    pub total_ns: R,
    pub ta_saturated: bool,
}

/// Uniform draw in [-bound, +bound].
pub fn sample_tae<R: Scalar, G: Rng + ?Sized>(bound_ns: R, rng: &mut G) -> R {
    if bound_ns <= R::zero() {
        return R::zero();
    }
    rng.random_range(-bound_ns..=bound_ns)
}

/// Uniform draw in [-G_R/2, +G_R/2].
pub fn sample_rtge<R: Scalar, G: Rng + ?Sized>(g_r_ns: R, rng: &mut G) -> R {
    if g_r_ns <= R::zero() {
        return R::zero();
    }
    let half = g_r_ns / cast::<R>(2.0);
    rng.random_range(-half..=half)
}

/// Per-SCS half-width of the UE timing-error bound, in ns.
pub fn toa_bound_3gpp<R: Scalar>(num: &Numerology<R>) -> R {
    let coefficient = match num.mu() {
        0 => 12.0,
        1 => 10.0,
        2 => 7.0,
        _ => 3.5,
    };
    cast::<R>(coefficient * 64.0) * num.t_c_ns()
}

/// Gaussian ToA standard deviation `U(mu) / kappa`.
pub fn toa_sigma<R: Scalar>(num: &Numerology<R>, kappa: R) -> Result<R, ModelError> {
    if kappa <= R::zero() || kappa.is_nan() {
        return Err(ModelError::InvalidKappa {
            value: kappa.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(num.ta_time_unit_ns() / kappa)
}

/// One ToA error draw under the given model.
pub fn sample_toa<R: Scalar, G: Rng + ?Sized>(
    model: &ToaModel<R>,
    num: &Numerology<R>,
    rng: &mut G,
) -> R {
    match model {
        ToaModel::Table3gpp => {
            let bound = toa_bound_3gpp(num);
            rng.random_range(-bound..=bound)
        }
        ToaModel::Gaussian { kappa } => {
            let sigma = num.ta_time_unit_ns() / *kappa;
            if sigma <= R::zero() {
                return R::zero();
            }
            let limit = cast::<R>(GAUSSIAN_TRUNCATION_SIGMA);
            let mut z = R::standard_normal(rng);
            while z.abs() > limit {
                z = R::standard_normal(rng);
            }
            sigma * z
        }
    }
}

/// Outcome of one TA-based path-delay estimation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdEstimation<R> {
    /// Estimate minus ground truth, correction included, in ns.
    pub residual_ns: R,
    /// The ToA draw that perturbed the round-trip measurement.
    pub toa_ns: R,
    /// Selected TA index (clamped on saturation).
    pub ta_index: u16,
    /// Whether the index had to be clamped to the command range.
    pub saturated: bool,
}

fn correction_offset<R: Scalar>(correction: &Correction<R>, num: &Numerology<R>) -> R {
    match correction {
        Correction::None => R::zero(),
        // Floor quantization under-estimates; half a step recenters it.
        Correction::HalfGranularity => num.ta_granularity_ns() / cast::<R>(2.0),
        Correction::Custom(c) => *c,
    }
}

/// TA-based path-delay estimation residual.
///
/// The gNB measures the round trip `2 * true_pd` perturbed by one ToA draw,
/// floors it onto the TA lattice, and the UE compensates with half the
/// quantized round trip. The returned residual is estimate minus truth.
pub fn pd_estimation_residual<R: Scalar, G: Rng + ?Sized>(
    true_pd_ns: R,
    num: &Numerology<R>,
    toa: &ToaModel<R>,
    correction: &Correction<R>,
    rng: &mut G,
) -> PdEstimation<R> {
    let toa_ns = sample_toa(toa, num, rng);
    let mut measured_rtt = cast::<R>(2.0) * true_pd_ns + toa_ns;
    if measured_rtt < R::zero() {
        measured_rtt = R::zero();
    }
    let (ta_index, saturated) = match ta_index_for_rtt(measured_rtt, num, TaMode::RandomAccess) {
        Ok(ta) => (ta.index(), false),
        Err(TimingError::TaSaturation { .. }) => (TA_RANDOM_ACCESS_MAX, true),
        Err(err) => unreachable!("non-negative rtt cannot fail quantization: {err}"),
    };
    let pd_estimate = cast::<R>(f64::from(ta_index)) * num.ta_granularity_ns();
    let residual_ns = pd_estimate - true_pd_ns + correction_offset(correction, num);
    PdEstimation {
        residual_ns,
        toa_ns,
        ta_index,
        saturated,
    }
}

/// Draw one full sync-event error.
///
/// Draw order is fixed (TAE, granularity, RTGE, ToA/path-delay) so equal
/// seeds give bit-identical sequences.
pub fn compose_sync_error<R: Scalar, G: Rng + ?Sized>(
    cfg: &ErrorConfig<R>,
    num: &Numerology<R>,
    rng: &mut G,
) -> SyncErrorSample<R> {
    let tae_ns = sample_tae(cfg.tae_bound_ns, rng);
    let g_r = match cfg.rtge {
        RtgeGranularity::Fixed(g) => g,
        RtgeGranularity::Range { lo, hi } => {
            if lo < hi {
                rng.random_range(lo..=hi)
            } else {
                lo
            }
        }
    };
    let rtge_ns = sample_rtge(g_r, rng);
    let true_pd = cfg.true_pd(num);
    match cfg.pd_mode {
        PdMode::TaBased => {
            let pd = pd_estimation_residual(true_pd, num, &cfg.toa, &cfg.correction, rng);
            SyncErrorSample {
                tae_ns,
                rtge_ns,
                toa_ns: pd.toa_ns,
                pd_residual_ns: pd.residual_ns,
                total_ns: tae_ns + rtge_ns + pd.residual_ns,
                ta_saturated: pd.saturated,
            }
        }
        PdMode::CellRadius { radius_m } => {
            // No exchange absorbs the arrival-detection error here, so it
            // contributes directly to the delivered time.
            let toa_ns = sample_toa(&cfg.toa, num, rng);
            let radius = radius_m
                .unwrap_or_else(|| true_pd * cast::<R>(SPEED_OF_LIGHT_M_PER_S * 1e-9));
            let pd_estimate = radius / cast::<R>(SPEED_OF_LIGHT_M_PER_S * 1e-9);
            let pd_residual_ns = pd_estimate - true_pd;
            SyncErrorSample {
                tae_ns,
                rtge_ns,
                toa_ns,
                pd_residual_ns,
                total_ns: tae_ns + rtge_ns + toa_ns + pd_residual_ns,
                ta_saturated: false,
            }
        }
    }
}
