//! Preset scenario runners.
//!
//! Each runner is a pure function of its effective configuration (defaults
//! overlaid with [`Overrides`]) and reproduces one published-style readout:
//!
//! * `table1` — path-delay estimation residual statistics per sub-carrier
//!   spacing, noise factor and bias correction.
//! * `fig4` — empirical CDF of the absolute sync-event error per SCS,
//!   sampled at delivery instants.
//! * `fig5` — max cumulative error versus reference-time granularity,
//!   bounded-table ToA model, granularity expressed as a slot fraction.
//! * `fig6` — drift sawtooth traces for 60 ms and 120 ms sync periods with
//!   a 1000 ns threshold verdict.
//! * `fig7` — mean over repetitions of the per-run max cumulative error,
//!   swept over the sync period, one curve per SCS.
//! * `capacity` — SIB payload budget and the TSN domain count.
//!
//! Independent cells may be fanned out over a small worker pool; results
//! are always assembled in cell order so output bytes do not depend on
//! scheduling.

pub mod output;

use serde::Serialize;
use thiserror::Error;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::capacity::{sib_domain_capacity, CapacityError, GptpPayloadLayout, SIB_MAX_BITS};
use crate::clock_sim::{simulate, SimConfig, SimError, Trace};
use crate::error_models::{
    compose_sync_error, pd_estimation_residual, Correction, ErrorConfig, ModelError, PdMode,
    RtgeGranularity, ToaModel, DEFAULT_TRUE_PD_TA_UNITS,
};
use crate::nr_timing::{Numerology, TimingError};
use crate::stats::{empirical_cdf, summarize_with_percentiles, StatsError};
use crate::{SummaryStats, TimeNs};

pub use output::{config_hash, write_outputs, OutputFormat, RunMeta};

/// Version of the output schema embedded in every meta block.
pub const SCHEMA_VERSION: u32 = 1;

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 1;

/// Minimum sample count for stochastic experiments.
pub const STOCHASTIC_SAMPLE_FLOOR: u64 = 10_000;

/// All supported sub-carrier spacings, ascending.
pub const ALL_SCS_KHZ: [u32; 4] = [15, 30, 60, 120];

/// Quantiles attached to fig4 curves.
pub const FIG4_QUANTILES: [f64; 5] = [0.5, 0.9, 0.99, 0.999, 0.99999];

/// Sync periods swept by fig7, in ms.
pub const FIG7_PERIODS_MS: [f64; 11] =
    [1.0, 2.0, 5.0, 10.0, 20.0, 40.0, 60.0, 80.0, 100.0, 120.0, 150.0];

/// Sync periods per fig7 trace; duration scales with the period so every
/// period sees the same number of error draws.
pub const FIG7_SYNCS_PER_TRACE: u64 = 10;

/// Threshold used by the fig6 verdicts, in ns.
pub const ERROR_BUDGET_NS: f64 = 1000.0;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Timing(#[from] TimingError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Capacity(#[from] CapacityError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

/// Experiment identifiers; also the output file stems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentId {
    Table1,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Capacity,
}

impl ExperimentId {
    pub fn name(self) -> &'static str {
        match self {
            Self::Table1 => "table1",
            Self::Fig4 => "fig4",
            Self::Fig5 => "fig5",
            Self::Fig6 => "fig6",
            Self::Fig7 => "fig7",
            Self::Capacity => "capacity",
        }
    }

    pub fn all() -> [Self; 6] {
        [
            Self::Table1,
            Self::Fig4,
            Self::Fig5,
            Self::Fig6,
            Self::Fig7,
            Self::Capacity,
        ]
    }
}

/// ToA model choice without its parameter; the noise factor rides in
/// [`Overrides::kappa`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ToaKind {
    Table,
    Gaussian,
}

/// Partial configuration: unset fields fall back to per-experiment defaults.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub scs: Option<Vec<u32>>,
    pub kappa: Option<f64>,
    pub period_ms: Option<f64>,
    pub duration_ms: Option<f64>,
    pub tick_ms: Option<f64>,
    pub theta_ppm: Option<f64>,
    pub granularity: Option<RtgeGranularity<f64>>,
    pub toa: Option<ToaKind>,
    pub correction: Option<Correction<f64>>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
}

impl Overrides {
    fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    fn scs_list(&self) -> Result<Vec<u32>, ExperimentError> {
        let list = self.scs.clone().unwrap_or_else(|| ALL_SCS_KHZ.to_vec());
        if list.is_empty() {
            return Err(ExperimentError::Invalid("empty SCS list".into()));
        }
        for &scs in &list {
            Numerology::<TimeNs>::from_scs_khz(scs)?;
        }
        Ok(list)
    }

    fn samples(&self, default: u64) -> Result<u64, ExperimentError> {
        let n = self.samples.unwrap_or(default);
        if n < STOCHASTIC_SAMPLE_FLOOR {
            return Err(ExperimentError::Invalid(format!(
                "sample count {n} below statistical floor {STOCHASTIC_SAMPLE_FLOOR}"
            )));
        }
        Ok(n)
    }

    fn toa_model(&self, default_kappa: f64) -> ToaModel<f64> {
        let kappa = self.kappa.unwrap_or(default_kappa);
        match self.toa {
            Some(ToaKind::Table) => ToaModel::Table3gpp,
            Some(ToaKind::Gaussian) | None => ToaModel::Gaussian { kappa },
        }
    }
}

/// Deterministic per-cell seed derivation (splitmix64 mixing).
pub fn derive_seed(base: u64, salt: u64) -> u64 {
    fn splitmix64(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    splitmix64(base ^ splitmix64(salt))
}

/// Run independent cells, optionally on `jobs` worker threads. Results come
/// back in cell order regardless of scheduling.
fn run_cells<T, F>(jobs: usize, cells: Vec<F>) -> Vec<T>
where
    T: Send,
    F: FnOnce() -> T + Send,
{
    let jobs = jobs.max(1);
    if jobs == 1 || cells.len() <= 1 {
        return cells.into_iter().map(|cell| cell()).collect();
    }
    let mut buckets: Vec<Vec<(usize, F)>> = (0..jobs).map(|_| Vec::new()).collect();
    for (idx, cell) in cells.into_iter().enumerate() {
        buckets[idx % jobs].push((idx, cell));
    }
    let mut indexed: Vec<(usize, T)> = std::thread::scope(|scope| {
        let handles: Vec<_> = buckets
            .into_iter()
            .map(|bucket| {
                scope.spawn(move || {
                    bucket
                        .into_iter()
                        .map(|(idx, cell)| (idx, cell()))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("experiment worker panicked"))
            .collect()
    });
    indexed.sort_by_key(|(idx, _)| *idx);
    indexed.into_iter().map(|(_, value)| value).collect()
}

fn push_csv_row(out: &mut String, fields: &[String]) {
    out.push_str(&fields.join(","));
    out.push('\n');
}

// ---------------------------------------------------------------------------
// table1
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct Table1Config {
    pub seed: u64,
    pub samples: u64,
    pub scs_khz: Vec<u32>,
    pub kappas: Vec<f64>,
    pub true_pd_ta_units: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Table1Row {
    pub scs_khz: u32,
    pub kappa: f64,
    pub corrected: bool,
    pub count: u64,
    pub saturated: u64,
    pub abs_mean_ns: f64,
    pub mean_ns: f64,
    pub max_abs_ns: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Table1Result {
    pub config: Table1Config,
    pub rows: Vec<Table1Row>,
}

impl Table1Result {
    pub fn row(&self, scs_khz: u32, kappa: f64, corrected: bool) -> Option<&Table1Row> {
        self.rows
            .iter()
            .find(|r| r.scs_khz == scs_khz && r.kappa == kappa && r.corrected == corrected)
    }

    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("scs_khz,kappa,corrected,count,saturated,abs_mean_ns,mean_ns,max_abs_ns\n");
        for r in &self.rows {
            push_csv_row(
                &mut out,
                &[
                    r.scs_khz.to_string(),
                    r.kappa.to_string(),
                    u8::from(r.corrected).to_string(),
                    r.count.to_string(),
                    r.saturated.to_string(),
                    r.abs_mean_ns.to_string(),
                    r.mean_ns.to_string(),
                    r.max_abs_ns.to_string(),
                ],
            );
        }
        out
    }
}

/// Path-delay residual statistics per (correction, kappa, SCS) cell.
///
/// Every cell replays the same seed, so the underlying noise draws are
/// matched across cells and differences between rows isolate the knob that
/// changed.
pub fn run_table1(ovr: &Overrides, jobs: usize) -> Result<Table1Result, ExperimentError> {
    let seed = ovr.seed();
    let samples = ovr.samples(1_000_000)?;
    let scs_list = ovr.scs_list()?;
    let kappas = match ovr.kappa {
        Some(k) if k > 0.0 => vec![k],
        Some(k) => {
            return Err(ExperimentError::Invalid(format!(
                "kappa must be > 0, got {k}"
            )))
        }
        None => vec![2.0, 1.0],
    };

    let mut cells = Vec::new();
    for corrected in [false, true] {
        for &kappa in &kappas {
            for &scs in &scs_list {
                cells.push(move || -> Result<Table1Row, ExperimentError> {
                    let num = Numerology::<TimeNs>::from_scs_khz(scs)?;
                    let toa = ToaModel::Gaussian { kappa };
                    let correction = if corrected {
                        Correction::HalfGranularity
                    } else {
                        Correction::None
                    };
                    let true_pd = DEFAULT_TRUE_PD_TA_UNITS * num.ta_time_unit_ns();
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    let mut residuals = Vec::with_capacity(samples as usize);
                    let mut saturated = 0u64;
                    for _ in 0..samples {
                        let pd =
                            pd_estimation_residual(true_pd, &num, &toa, &correction, &mut rng);
                        if pd.saturated {
                            saturated += 1;
                        }
                        residuals.push(pd.residual_ns);
                    }
                    let stats: SummaryStats = summarize_with_percentiles(&residuals, &[])?;
                    Ok(Table1Row {
                        scs_khz: scs,
                        kappa,
                        corrected,
                        count: stats.count,
                        saturated,
                        abs_mean_ns: stats.abs_mean_ns,
                        mean_ns: stats.mean_ns,
                        max_abs_ns: stats.max_abs_ns,
                    })
                });
            }
        }
    }

    let rows = run_cells(jobs, cells)
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Table1Result {
        config: Table1Config {
            seed,
            samples,
            scs_khz: scs_list,
            kappas,
            true_pd_ta_units: DEFAULT_TRUE_PD_TA_UNITS,
        },
        rows,
    })
}

// ---------------------------------------------------------------------------
// fig4
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct Fig4Config {
    pub seed: u64,
    pub samples: u64,
    pub scs_khz: Vec<u32>,
    pub sync_period_ms: f64,
    pub errors: ErrorConfig<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Fig4Curve {
    pub scs_khz: u32,
    pub saturated: u64,
    /// Quantile -> |error| ns.
    pub percentiles: Vec<(f64, f64)>,
    /// (|error| ns, P) pairs on a shared grid.
    pub cdf: Vec<(f64, f64)>,
}

impl Fig4Curve {
    pub fn percentile(&self, q: f64) -> Option<f64> {
        self.percentiles
            .iter()
            .find(|(quantile, _)| (quantile - q).abs() < 1e-12)
            .map(|(_, v)| *v)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Fig4Result {
    pub config: Fig4Config,
    pub curves: Vec<Fig4Curve>,
}

impl Fig4Result {
    pub fn curve(&self, scs_khz: u32) -> Option<&Fig4Curve> {
        self.curves.iter().find(|c| c.scs_khz == scs_khz)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("scs_khz,error_ns,cdf\n");
        for c in &self.curves {
            for (v, p) in &c.cdf {
                push_csv_row(
                    &mut out,
                    &[c.scs_khz.to_string(), v.to_string(), p.to_string()],
                );
            }
        }
        out
    }
}

/// Empirical CDF of |sync error| per SCS.
///
/// The error is the one delivered at each sync instant (drift between syncs
/// is the fig6/fig7 subject, not this one). Matched seeds across SCS cells.
pub fn run_fig4(ovr: &Overrides, jobs: usize) -> Result<Fig4Result, ExperimentError> {
    let seed = ovr.seed();
    let samples = ovr.samples(1_000_000)?;
    let scs_list = ovr.scs_list()?;
    let errors = ErrorConfig {
        tae_bound_ns: 65.0,
        rtge: ovr.granularity.unwrap_or(RtgeGranularity::Range {
            lo: 10.0,
            hi: 300.0,
        }),
        toa: ovr.toa_model(2.0),
        correction: ovr.correction.unwrap_or(Correction::None),
        true_pd_ns: None,
        pd_mode: PdMode::TaBased,
    };
    errors.validate()?;

    let grid: Vec<f64> = (0..=300).map(|i| f64::from(i) * 5.0).collect();
    let mut cells = Vec::new();
    for &scs in &scs_list {
        let grid = grid.clone();
        cells.push(move || -> Result<Fig4Curve, ExperimentError> {
            let num = Numerology::<TimeNs>::from_scs_khz(scs)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut magnitudes = Vec::with_capacity(samples as usize);
            let mut saturated = 0u64;
            for _ in 0..samples {
                let s = compose_sync_error(&errors, &num, &mut rng);
                if s.ta_saturated {
                    saturated += 1;
                }
                magnitudes.push(s.total_ns.abs());
            }
            let stats = summarize_with_percentiles(&magnitudes, &FIG4_QUANTILES)?;
            let cdf = empirical_cdf(&magnitudes, &grid)?;
            Ok(Fig4Curve {
                scs_khz: scs,
                saturated,
                percentiles: stats.percentiles,
                cdf,
            })
        });
    }

    let curves = run_cells(jobs, cells)
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Fig4Result {
        config: Fig4Config {
            seed,
            samples,
            scs_khz: scs_list,
            sync_period_ms: ovr.period_ms.unwrap_or(60.0),
            errors,
        },
        curves,
    })
}

// ---------------------------------------------------------------------------
// fig5
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct Fig5Config {
    pub seed: u64,
    /// Sync events simulated per sweep point.
    pub syncs_per_point: u64,
    pub scs_khz: Vec<u32>,
    pub sync_period_ms: f64,
    pub theta_ppm: f64,
    /// Granularity sweep as fractions of the slot duration: a value of 100
    /// means `G_R = slot / 100`.
    pub slot_fractions: Vec<f64>,
    /// ToA is the bounded per-SCS table; path delay is compensated exactly
    /// (cell-radius mode), so detection error lands additively.
    pub errors_note: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct Fig5Point {
    pub fraction_of_slot: f64,
    pub granularity_ns: f64,
    pub max_abs_ns: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Fig5Curve {
    pub scs_khz: u32,
    /// Ascending in granularity.
    pub points: Vec<Fig5Point>,
    /// Interpolated granularity at which the curve reaches the 1000 ns
    /// budget, if it does within the sweep.
    pub crossing_budget_ns: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Fig5Result {
    pub config: Fig5Config,
    pub curves: Vec<Fig5Curve>,
}

impl Fig5Result {
    pub fn curve(&self, scs_khz: u32) -> Option<&Fig5Curve> {
        self.curves.iter().find(|c| c.scs_khz == scs_khz)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("scs_khz,fraction_of_slot,granularity_ns,max_abs_ns\n");
        for c in &self.curves {
            for p in &c.points {
                push_csv_row(
                    &mut out,
                    &[
                        c.scs_khz.to_string(),
                        p.fraction_of_slot.to_string(),
                        p.granularity_ns.to_string(),
                        p.max_abs_ns.to_string(),
                    ],
                );
            }
        }
        out
    }
}

fn crossing_between(points: &[Fig5Point], budget: f64) -> Option<f64> {
    let idx = points.iter().position(|p| p.max_abs_ns >= budget)?;
    if idx == 0 {
        return Some(points[0].granularity_ns);
    }
    let (lo, hi) = (&points[idx - 1], &points[idx]);
    let span = hi.max_abs_ns - lo.max_abs_ns;
    if span <= 0.0 {
        return Some(hi.granularity_ns);
    }
    let t = (budget - lo.max_abs_ns) / span;
    Some(lo.granularity_ns + t * (hi.granularity_ns - lo.granularity_ns))
}

/// Max cumulative error versus reference-time granularity.
///
/// Path delay is compensated exactly here, which leaves granularity and
/// downlink detection (bounded table model) as the reference-time-indication
/// errors riding on the drift sawtooth; TAE is a transmit-chain property and
/// is left out of this sweep.
pub fn run_fig5(ovr: &Overrides, jobs: usize) -> Result<Fig5Result, ExperimentError> {
    let seed = ovr.seed();
    let syncs = ovr.samples(10_000)?;
    let scs_list = ovr.scs_list()?;
    let period_ms = ovr.period_ms.unwrap_or(60.0);
    let theta_ppm = ovr.theta_ppm.unwrap_or(10.0);
    // log-spaced slot fractions 10^1 .. 10^5, three points per decade
    let fractions: Vec<f64> = (0..=12).map(|k| 10f64.powf(1.0 + f64::from(k) / 3.0)).collect();

    let mut cells = Vec::new();
    for &scs in &scs_list {
        let fractions = fractions.clone();
        cells.push(move || -> Result<Fig5Curve, ExperimentError> {
            let num = Numerology::<TimeNs>::from_scs_khz(scs)?;
            let slot_ns = num.slot_duration_ms() * 1e6;
            let mut points = Vec::with_capacity(fractions.len());
            for &fraction in &fractions {
                let granularity_ns = slot_ns / fraction;
                let cfg = SimConfig {
                    theta_ppm,
                    sync_period_ms: period_ms,
                    duration_ms: period_ms * syncs as f64,
                    tick_ms: None,
                    seed,
                    numerology: num,
                    errors: ErrorConfig {
                        tae_bound_ns: 0.0,
                        rtge: RtgeGranularity::Fixed(granularity_ns),
                        toa: ToaModel::Table3gpp,
                        correction: Correction::None,
                        true_pd_ns: None,
                        pd_mode: PdMode::CellRadius { radius_m: None },
                    },
                };
                let trace = simulate(&cfg)?;
                points.push(Fig5Point {
                    fraction_of_slot: fraction,
                    granularity_ns,
                    max_abs_ns: trace.path_max_abs_ns(),
                });
            }
            points.sort_by(|a, b| a.granularity_ns.partial_cmp(&b.granularity_ns).unwrap());
            let crossing = crossing_between(&points, ERROR_BUDGET_NS);
            Ok(Fig5Curve {
                scs_khz: scs,
                points,
                crossing_budget_ns: crossing,
            })
        });
    }

    let curves = run_cells(jobs, cells)
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Fig5Result {
        config: Fig5Config {
            seed,
            syncs_per_point: syncs,
            scs_khz: scs_list,
            sync_period_ms: period_ms,
            theta_ppm,
            slot_fractions: fractions,
            errors_note: "table ToA additive, exact path-delay compensation, no TAE",
        },
        curves,
    })
}

// ---------------------------------------------------------------------------
// fig6
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct Fig6Config {
    pub seed: u64,
    pub periods_ms: Vec<f64>,
    pub duration_ms: f64,
    pub theta_ppm: f64,
    pub threshold_ns: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Fig6Run {
    pub period_ms: f64,
    pub max_abs_ns: f64,
    pub below_threshold: bool,
    pub trace: Trace<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Fig6Result {
    pub config: Fig6Config,
    pub runs: Vec<Fig6Run>,
}

impl Fig6Result {
    pub fn run(&self, period_ms: f64) -> Option<&Fig6Run> {
        self.runs.iter().find(|r| r.period_ms == period_ms)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("period_ms,t_ms,x_td_ns,is_sync\n");
        for r in &self.runs {
            for s in &r.trace.samples {
                push_csv_row(
                    &mut out,
                    &[
                        r.period_ms.to_string(),
                        s.t_ms.to_string(),
                        s.x_td_ns.to_string(),
                        u8::from(s.is_sync).to_string(),
                    ],
                );
            }
        }
        out
    }
}

/// Drift sawtooth traces at 60 ms and 120 ms sync periods.
///
/// Air-interface errors are zeroed: the sweep shows the pure drift budget,
/// each delivery resetting the difference to zero.
pub fn run_fig6(ovr: &Overrides, jobs: usize) -> Result<Fig6Result, ExperimentError> {
    let seed = ovr.seed();
    let theta_ppm = ovr.theta_ppm.unwrap_or(10.0);
    let duration_ms = ovr.duration_ms.unwrap_or(600.0);
    let periods = vec![60.0, 120.0];

    let mut cells = Vec::new();
    for &period_ms in &periods {
        cells.push(move || -> Result<Fig6Run, ExperimentError> {
            let cfg = SimConfig {
                theta_ppm,
                sync_period_ms: period_ms,
                duration_ms,
                tick_ms: Some(1.0),
                seed,
                numerology: Numerology::new(0)?,
                errors: ErrorConfig::zeroed(),
            };
            let trace = simulate(&cfg)?;
            let max_abs_ns = trace.path_max_abs_ns();
            Ok(Fig6Run {
                period_ms,
                max_abs_ns,
                below_threshold: max_abs_ns < ERROR_BUDGET_NS,
                trace,
            })
        });
    }

    let runs = run_cells(jobs, cells)
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Fig6Result {
        config: Fig6Config {
            seed,
            periods_ms: periods,
            duration_ms,
            theta_ppm,
            threshold_ns: ERROR_BUDGET_NS,
        },
        runs,
    })
}

// ---------------------------------------------------------------------------
// fig7
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct Fig7Config {
    pub seed: u64,
    pub repetitions: u64,
    pub periods_ms: Vec<f64>,
    pub scs_khz: Vec<u32>,
    pub theta_ppm: f64,
    pub syncs_per_trace: u64,
    pub errors: ErrorConfig<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Fig7Point {
    pub period_ms: f64,
    /// Mean over repetitions of the per-run max |x_td|.
    pub mean_max_abs_ns: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Fig7Curve {
    pub scs_khz: u32,
    pub points: Vec<Fig7Point>,
}

impl Fig7Curve {
    pub fn value_at(&self, period_ms: f64) -> Option<f64> {
        self.points
            .iter()
            .find(|p| p.period_ms == period_ms)
            .map(|p| p.mean_max_abs_ns)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Fig7Result {
    pub config: Fig7Config,
    pub curves: Vec<Fig7Curve>,
}

impl Fig7Result {
    pub fn curve(&self, scs_khz: u32) -> Option<&Fig7Curve> {
        self.curves.iter().find(|c| c.scs_khz == scs_khz)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("scs_khz,period_ms,mean_max_abs_ns\n");
        for c in &self.curves {
            for p in &c.points {
                push_csv_row(
                    &mut out,
                    &[
                        c.scs_khz.to_string(),
                        p.period_ms.to_string(),
                        p.mean_max_abs_ns.to_string(),
                    ],
                );
            }
        }
        out
    }
}

/// Max cumulative error versus sync period, one curve per SCS.
///
/// Each repetition re-seeds deterministically from the repetition index, and
/// the same repetition seed is reused across all (SCS, period) cells: every
/// cell sees the same error draws, so period and SCS effects are isolated
/// from sampling noise. Trace duration is a fixed number of sync periods.
pub fn run_fig7(ovr: &Overrides, jobs: usize) -> Result<Fig7Result, ExperimentError> {
    let seed = ovr.seed();
    let repetitions = ovr.samples(10_000)?;
    let scs_list = ovr.scs_list()?;
    let theta_ppm = ovr.theta_ppm.unwrap_or(10.0);
    let periods: Vec<f64> = FIG7_PERIODS_MS.to_vec();
    // The centered estimator: the constant floor bias would otherwise mask
    // the per-SCS spread this sweep is about.
    let errors = ErrorConfig {
        tae_bound_ns: 65.0,
        rtge: ovr.granularity.unwrap_or(RtgeGranularity::Range {
            lo: 10.0,
            hi: 300.0,
        }),
        toa: ovr.toa_model(2.0),
        correction: ovr.correction.unwrap_or(Correction::HalfGranularity),
        true_pd_ns: None,
        pd_mode: PdMode::TaBased,
    };
    errors.validate()?;

    let mut cells = Vec::new();
    for &scs in &scs_list {
        for &period_ms in &periods {
            cells.push(move || -> Result<(u32, Fig7Point), ExperimentError> {
                let num = Numerology::<TimeNs>::from_scs_khz(scs)?;
                let mut sum = 0.0;
                for rep in 0..repetitions {
                    let cfg = SimConfig {
                        theta_ppm,
                        sync_period_ms: period_ms,
                        duration_ms: period_ms * FIG7_SYNCS_PER_TRACE as f64,
                        tick_ms: None,
                        seed: derive_seed(seed, rep),
                        numerology: num,
                        errors,
                    };
                    sum += simulate(&cfg)?.path_max_abs_ns();
                }
                Ok((
                    scs,
                    Fig7Point {
                        period_ms,
                        mean_max_abs_ns: sum / repetitions as f64,
                    },
                ))
            });
        }
    }

    let flat = run_cells(jobs, cells)
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let mut curves: Vec<Fig7Curve> = scs_list
        .iter()
        .map(|&scs| Fig7Curve {
            scs_khz: scs,
            points: Vec::new(),
        })
        .collect();
    for (scs, point) in flat {
        curves
            .iter_mut()
            .find(|c| c.scs_khz == scs)
            .expect("curve exists for every cell")
            .points
            .push(point);
    }
    Ok(Fig7Result {
        config: Fig7Config {
            seed,
            repetitions,
            periods_ms: periods,
            scs_khz: scs_list,
            theta_ppm,
            syncs_per_trace: FIG7_SYNCS_PER_TRACE,
            errors,
        },
        curves,
    })
}

// ---------------------------------------------------------------------------
// capacity
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct CapacityConfig {
    pub layout: GptpPayloadLayout,
    pub sib_max_bits: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct CapacityResult {
    pub config: CapacityConfig,
    pub payload_bits: u32,
    pub domains: u32,
}

impl CapacityResult {
    pub fn to_csv(&self) -> String {
        let layout = &self.config.layout;
        let mut out = String::from("field,bits\n");
        for (name, bits) in [
            ("header", layout.header_bits),
            ("origin_timestamp", layout.origin_timestamp_bits),
            ("other", layout.other_field_bits),
            ("payload_total", self.payload_bits),
            ("sib_max", self.config.sib_max_bits),
            ("domains", self.domains),
        ] {
            push_csv_row(&mut out, &[name.to_string(), bits.to_string()]);
        }
        out
    }
}

/// SIB payload budget: how many TSN domains one broadcast can serve.
pub fn run_capacity(_ovr: &Overrides) -> Result<CapacityResult, ExperimentError> {
    let layout = GptpPayloadLayout::default();
    let payload_bits = layout.total_bits();
    let domains = sib_domain_capacity(payload_bits, SIB_MAX_BITS)?;
    Ok(CapacityResult {
        config: CapacityConfig {
            layout,
            sib_max_bits: SIB_MAX_BITS,
        },
        payload_bits,
        domains,
    })
}

// ---------------------------------------------------------------------------
// dispatch
// ---------------------------------------------------------------------------

/// Result of any experiment, for uniform emission.
#[derive(Debug, Clone)]
pub enum ExperimentResult {
    Table1(Table1Result),
    Fig4(Fig4Result),
    Fig5(Fig5Result),
    Fig6(Fig6Result),
    Fig7(Fig7Result),
    Capacity(CapacityResult),
}

impl ExperimentResult {
    pub fn id(&self) -> ExperimentId {
        match self {
            Self::Table1(_) => ExperimentId::Table1,
            Self::Fig4(_) => ExperimentId::Fig4,
            Self::Fig5(_) => ExperimentId::Fig5,
            Self::Fig6(_) => ExperimentId::Fig6,
            Self::Fig7(_) => ExperimentId::Fig7,
            Self::Capacity(_) => ExperimentId::Capacity,
        }
    }

    pub fn to_csv(&self) -> String {
        match self {
            Self::Table1(r) => r.to_csv(),
            Self::Fig4(r) => r.to_csv(),
            Self::Fig5(r) => r.to_csv(),
            Self::Fig6(r) => r.to_csv(),
            Self::Fig7(r) => r.to_csv(),
            Self::Capacity(r) => r.to_csv(),
        }
    }

    fn config_value(&self) -> serde_json::Value {
        let value = match self {
            Self::Table1(r) => serde_json::to_value(&r.config),
            Self::Fig4(r) => serde_json::to_value(&r.config),
            Self::Fig5(r) => serde_json::to_value(&r.config),
            Self::Fig6(r) => serde_json::to_value(&r.config),
            Self::Fig7(r) => serde_json::to_value(&r.config),
            Self::Capacity(r) => serde_json::to_value(&r.config),
        };
        value.expect("config serializes")
    }

    fn data_value(&self) -> serde_json::Value {
        let value = match self {
            Self::Table1(r) => serde_json::to_value(r),
            Self::Fig4(r) => serde_json::to_value(r),
            Self::Fig5(r) => serde_json::to_value(r),
            Self::Fig6(r) => serde_json::to_value(r),
            Self::Fig7(r) => serde_json::to_value(r),
            Self::Capacity(r) => serde_json::to_value(r),
        };
        value.expect("result serializes")
    }

    fn seed(&self) -> u64 {
        match self {
            Self::Table1(r) => r.config.seed,
            Self::Fig4(r) => r.config.seed,
            Self::Fig5(r) => r.config.seed,
            Self::Fig6(r) => r.config.seed,
            Self::Fig7(r) => r.config.seed,
            Self::Capacity(_) => 0,
        }
    }

    fn sample_count(&self) -> Option<u64> {
        match self {
            Self::Table1(r) => Some(r.config.samples),
            Self::Fig4(r) => Some(r.config.samples),
            Self::Fig5(r) => Some(r.config.syncs_per_point),
            Self::Fig6(_) => None,
            Self::Fig7(r) => Some(r.config.repetitions),
            Self::Capacity(_) => None,
        }
    }

    pub fn meta(&self) -> RunMeta {
        RunMeta::new(
            self.id().name(),
            self.seed(),
            self.sample_count(),
            self.config_value(),
        )
    }

    /// Write `<id>.csv` / `<id>.json` under `dir`.
    pub fn write(
        &self,
        dir: &std::path::Path,
        format: OutputFormat,
    ) -> std::io::Result<Vec<std::path::PathBuf>> {
        write_outputs(
            dir,
            self.id().name(),
            &self.meta(),
            &self.to_csv(),
            &self.data_value(),
            format,
        )
    }

    /// Short human-readable report for stdout.
    pub fn summary_lines(&self) -> Vec<String> {
        match self {
            Self::Table1(r) => {
                let mut lines = vec![format!(
                    "table1: {} rows, {} draws each",
                    r.rows.len(),
                    r.config.samples
                )];
                for row in &r.rows {
                    lines.push(format!(
                        "  {:>3} kHz kappa={} corrected={}: abs_mean={:.1} ns |mean|={:.1} ns max={:.1} ns",
                        row.scs_khz,
                        row.kappa,
                        u8::from(row.corrected),
                        row.abs_mean_ns,
                        row.mean_ns.abs(),
                        row.max_abs_ns,
                    ));
                }
                lines
            }
            Self::Fig4(r) => {
                let mut lines = vec![format!("fig4: {} draws per curve", r.config.samples)];
                for c in &r.curves {
                    lines.push(format!(
                        "  {:>3} kHz: p99.9={:.1} ns p99.999={:.1} ns",
                        c.scs_khz,
                        c.percentile(0.999).unwrap_or(f64::NAN),
                        c.percentile(0.99999).unwrap_or(f64::NAN),
                    ));
                }
                lines
            }
            Self::Fig5(r) => {
                let mut lines = vec![format!(
                    "fig5: {} syncs per point, period {} ms",
                    r.config.syncs_per_point, r.config.sync_period_ms
                )];
                for c in &r.curves {
                    match c.crossing_budget_ns {
                        Some(g) => lines.push(format!(
                            "  {:>3} kHz: reaches {} ns at granularity {:.1} ns",
                            c.scs_khz, ERROR_BUDGET_NS, g
                        )),
                        None => lines.push(format!(
                            "  {:>3} kHz: stays below {} ns over the sweep",
                            c.scs_khz, ERROR_BUDGET_NS
                        )),
                    }
                }
                lines
            }
            Self::Fig6(r) => {
                let mut lines = vec![format!(
                    "fig6: drift {} ppm over {} ms",
                    r.config.theta_ppm, r.config.duration_ms
                )];
                for run in &r.runs {
                    lines.push(format!(
                        "  period {:>3} ms: max |x_td| = {:.0} ns ({} {} ns budget)",
                        run.period_ms,
                        run.max_abs_ns,
                        if run.below_threshold { "within" } else { "exceeds" },
                        r.config.threshold_ns,
                    ));
                }
                lines
            }
            Self::Fig7(r) => {
                let mut lines = vec![format!(
                    "fig7: {} repetitions, periods {:?} ms",
                    r.config.repetitions, r.config.periods_ms
                )];
                for c in &r.curves {
                    let first = c.points.first().map(|p| p.mean_max_abs_ns).unwrap_or(f64::NAN);
                    let last = c.points.last().map(|p| p.mean_max_abs_ns).unwrap_or(f64::NAN);
                    lines.push(format!(
                        "  {:>3} kHz: mean max {:.0} ns at {} ms up to {:.0} ns at {} ms",
                        c.scs_khz,
                        first,
                        c.points.first().map(|p| p.period_ms).unwrap_or(f64::NAN),
                        last,
                        c.points.last().map(|p| p.period_ms).unwrap_or(f64::NAN),
                    ));
                }
                lines
            }
            Self::Capacity(r) => vec![
                format!(
                    "capacity: header {} + originTimestamp {} + other {} = {} bits per domain",
                    r.config.layout.header_bits,
                    r.config.layout.origin_timestamp_bits,
                    r.config.layout.other_field_bits,
                    r.payload_bits
                ),
                format!(
                    "  SIB budget {} bits -> {} domains",
                    r.config.sib_max_bits, r.domains
                ),
            ],
        }
    }
}

/// Run one experiment by id.
pub fn run_experiment(
    id: ExperimentId,
    ovr: &Overrides,
    jobs: usize,
) -> Result<ExperimentResult, ExperimentError> {
    Ok(match id {
        ExperimentId::Table1 => ExperimentResult::Table1(run_table1(ovr, jobs)?),
        ExperimentId::Fig4 => ExperimentResult::Fig4(run_fig4(ovr, jobs)?),
        ExperimentId::Fig5 => ExperimentResult::Fig5(run_fig5(ovr, jobs)?),
        ExperimentId::Fig6 => ExperimentResult::Fig6(run_fig6(ovr, jobs)?),
        ExperimentId::Fig7 => ExperimentResult::Fig7(run_fig7(ovr, jobs)?),
        ExperimentId::Capacity => ExperimentResult::Capacity(run_capacity(ovr)?),
    })
}
