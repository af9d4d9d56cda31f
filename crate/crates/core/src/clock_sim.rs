//! Time-stepped simulation of the UE clock against the gNB reference.
//!
//! Between reference-time deliveries the tracked difference `x_td` grows
//! linearly with the configured drift rate (ppm, i.e. ns per ms). At each
//! delivery the difference is replaced by a fresh sync-error draw; the model
//! is memoryless across syncs.
//!
//! Samples are recorded once per tick. At a sync tick the recorded value is
//! the pre-reset peak, so with all error sources zeroed the trace maximum is
//! exactly `theta * sync_period`. The reset value itself becomes the base of
//! the next segment; [`Trace::path_max_abs_ns`] additionally folds those
//! reset values in, bounding the full discontinuous path.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error_models::{compose_sync_error, ErrorConfig, ModelError, SyncErrorSample};
use crate::nr_timing::Numerology;
use crate::scalar::{cast, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("{name} must be > 0, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("tick_ms {tick_ms} exceeds sync_period_ms {period_ms}")]
    TickExceedsPeriod { tick_ms: f64, period_ms: f64 },
    #[error("duration_ms {duration_ms} shorter than sync_period_ms {period_ms}")]
    DurationTooShort { duration_ms: f64, period_ms: f64 },
    #[error("{name} {value} is not an integer multiple of tick_ms {tick_ms}")]
    OffTickGrid {
        name: &'static str,
        value: f64,
        tick_ms: f64,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Full description of one simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig<R> {
    /// UE clock drift in ppm; 10 ppm means +10 ns of offset per ms.
    pub theta_ppm: R,
    /// Interval between reference-time deliveries.
    pub sync_period_ms: R,
    /// Total simulated span.
    pub duration_ms: R,
    /// Simulation granularity; `None` picks `min(1 ms, sync_period / 10)`.
    pub tick_ms: Option<R>,
    pub seed: u64,
    pub numerology: Numerology<R>,
    pub errors: ErrorConfig<R>,
}

impl<R: Scalar> SimConfig<R> {
    pub fn effective_tick_ms(&self) -> R {
        self.tick_ms.unwrap_or_else(|| {
            let tenth = self.sync_period_ms / cast::<R>(10.0);
            tenth.min(R::one())
        })
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let positive = |name: &'static str, v: R| {
            if v > R::zero() {
                Ok(())
            } else {
                Err(SimError::NonPositive {
                    name,
                    value: v.to_f64().unwrap_or(f64::NAN),
                })
            }
        };
        positive("sync_period_ms", self.sync_period_ms)?;
        positive("duration_ms", self.duration_ms)?;
        let tick = self.effective_tick_ms();
        positive("tick_ms", tick)?;
        if self.theta_ppm < R::zero() {
            return Err(SimError::NonPositive {
                name: "theta_ppm",
                value: self.theta_ppm.to_f64().unwrap_or(f64::NAN),
            });
        }
        if tick > self.sync_period_ms {
            return Err(SimError::TickExceedsPeriod {
                tick_ms: tick.to_f64().unwrap_or(f64::NAN),
                period_ms: self.sync_period_ms.to_f64().unwrap_or(f64::NAN),
            });
        }
        if self.duration_ms < self.sync_period_ms {
            return Err(SimError::DurationTooShort {
                duration_ms: self.duration_ms.to_f64().unwrap_or(f64::NAN),
                period_ms: self.sync_period_ms.to_f64().unwrap_or(f64::NAN),
            });
        }
        ticks_in("sync_period_ms", self.sync_period_ms, tick)?;
        ticks_in("duration_ms", self.duration_ms, tick)?;
        self.errors.validate()?;
        Ok(())
    }
}

fn ticks_in<R: Scalar>(name: &'static str, span: R, tick: R) -> Result<u64, SimError> {
    let ratio = (span / tick).to_f64().unwrap_or(f64::NAN);
    let rounded = ratio.round();
    if !(rounded.is_finite() && (ratio - rounded).abs() < 1e-9 * ratio.max(1.0)) {
        return Err(SimError::OffTickGrid {
            name,
            value: span.to_f64().unwrap_or(f64::NAN),
            tick_ms: tick.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(rounded as u64)
}

/// One recorded point of the time-difference process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceSample<R> {
    pub t_ms: R,
    pub x_td_ns: R,
    pub is_sync: bool,
}

/// Time series of the UE-gNB time difference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace<R> {
    pub samples: Vec<TraceSample<R>>,
    /// Number of sync events whose TA index had to be clamped.
    pub saturation_events: u64,
    /// Max |x_td| including post-reset values between ticks.
    path_max_abs_ns: R,
}

impl<R: Scalar> Trace<R> {
    /// Max |x_td| over the recorded samples.
    pub fn max_abs_ns(&self) -> R {
        self.samples
            .iter()
            .map(|s| s.x_td_ns.abs())
            .fold(R::zero(), |a, b| if b > a { b } else { a })
    }

    /// Max |x_td| over the full path, reset values included.
    pub fn path_max_abs_ns(&self) -> R {
        self.path_max_abs_ns
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// CSV rendering, one row per tick: `t_ms,x_td_ns,is_sync` (0/1).
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.samples.len() * 16 + 24);
        out.push_str("t_ms,x_td_ns,is_sync\n");
        for s in &self.samples {
            out.push_str(&format!(
                "{},{},{}\n",
                s.t_ms,
                s.x_td_ns,
                u8::from(s.is_sync)
            ));
        }
        out
    }
}

/// One drift step: `x_td + theta_ppm * tick_ms` ns.
pub fn advance<R: Scalar>(x_td_ns: R, theta_ppm: R, tick_ms: R) -> R {
    x_td_ns + theta_ppm * tick_ms
}

/// Reference-time delivery: the time difference is replaced by the fresh
/// error sample, drift history discarded.
pub fn apply_sync<R: Scalar>(sync_error: &SyncErrorSample<R>) -> R {
    sync_error.total_ns
}

/// Run the simulation described by `cfg`. Deterministic in `cfg.seed`.
pub fn simulate<R: Scalar>(cfg: &SimConfig<R>) -> Result<Trace<R>, SimError> {
    cfg.validate()?;
    let tick = cfg.effective_tick_ms();
    let total_ticks = ticks_in("duration_ms", cfg.duration_ms, tick)?;
    let sync_every = ticks_in("sync_period_ms", cfg.sync_period_ms, tick)?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut samples = Vec::with_capacity(total_ticks as usize + 1);
    samples.push(TraceSample {
        t_ms: R::zero(),
        x_td_ns: R::zero(),
        is_sync: false,
    });

    let mut segment_base = R::zero();
    let mut segment_start_tick = 0u64;
    let mut saturation_events = 0u64;
    let mut path_max = R::zero();

    for k in 1..=total_ticks {
        // Affine within the segment: no per-tick accumulation error.
        let dt = cast::<R>((k - segment_start_tick) as f64) * tick;
        let x = segment_base + cfg.theta_ppm * dt;
        let is_sync = k % sync_every == 0;
        samples.push(TraceSample {
            t_ms: cast::<R>(k as f64) * tick,
            x_td_ns: x,
            is_sync,
        });
        if x.abs() > path_max {
            path_max = x.abs();
        }
        if is_sync {
            let sample = compose_sync_error(&cfg.errors, &cfg.numerology, &mut rng);
            if sample.ta_saturated {
                saturation_events += 1;
            }
            segment_base = apply_sync(&sample);
            segment_start_tick = k;
            if segment_base.abs() > path_max {
                path_max = segment_base.abs();
            }
        }
    }

    Ok(Trace {
        samples,
        saturation_events,
        path_max_abs_ns: path_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error_models::{Correction, PdMode, RtgeGranularity, ToaModel};
    use approx::assert_relative_eq;

    fn zero_error_cfg(period_ms: f64, duration_ms: f64) -> SimConfig<f64> {
        SimConfig {
            theta_ppm: 10.0,
            sync_period_ms: period_ms,
            duration_ms,
            tick_ms: Some(1.0),
            seed: 7,
            numerology: Numerology::new(0).unwrap(),
            errors: ErrorConfig::zeroed(),
        }
    }

    #[test]
    fn advance_accumulates_drift() {
        assert_eq!(advance(0.0, 10.0, 1.0), 10.0);
        assert_eq!(advance(123.0, 0.0, 5.0), 123.0);
        let mut x = 0.0;
        for _ in 0..60 {
            x = advance(x, 10.0, 1.0);
        }
        assert_eq!(x, 600.0);
    }

    #[test]
    fn apply_sync_is_memoryless() {
        let zero = SyncErrorSample {
            tae_ns: 0.0,
            rtge_ns: 0.0,
            toa_ns: 0.0,
            pd_residual_ns: 0.0,
            total_ns: 0.0,
            ta_saturated: false,
        };
        assert_eq!(apply_sync(&zero), 0.0);
        let tae_only = SyncErrorSample {
            tae_ns: 40.0,
            total_ns: 40.0,
            ..zero
        };
        assert_eq!(apply_sync(&tae_only), 40.0);
    }

    #[test]
    fn zero_error_max_is_exactly_drift_times_period() {
        let trace = simulate(&zero_error_cfg(60.0, 600.0)).unwrap();
        assert_eq!(trace.max_abs_ns(), 600.0);
        assert_eq!(trace.path_max_abs_ns(), 600.0);
        assert_eq!(trace.len(), 601);
        assert_eq!(trace.saturation_events, 0);

        let slow = simulate(&zero_error_cfg(120.0, 600.0)).unwrap();
        assert_eq!(slow.max_abs_ns(), 1200.0);
        assert!(slow.max_abs_ns() > 1000.0);
    }

    #[test]
    fn one_ms_period_peaks_at_ten_ns() {
        let mut cfg = zero_error_cfg(1.0, 10.0);
        cfg.tick_ms = None; // default tick = period / 10
        let trace = simulate(&cfg).unwrap();
        assert_eq!(trace.max_abs_ns(), 10.0);
    }

    #[test]
    fn sync_markers_on_period_grid() {
        let trace = simulate(&zero_error_cfg(60.0, 600.0)).unwrap();
        for (k, s) in trace.samples.iter().enumerate() {
            assert_eq!(s.is_sync, k > 0 && k % 60 == 0, "tick {k}");
        }
    }

    #[test]
    fn segments_are_affine_with_drift_slope() {
        let cfg = SimConfig {
            errors: ErrorConfig::default(),
            ..zero_error_cfg(60.0, 600.0)
        };
        let trace = simulate(&cfg).unwrap();
        for w in trace.samples.windows(2) {
            if w[0].is_sync {
                continue;
            }
            assert_relative_eq!(
                w[1].x_td_ns - w[0].x_td_ns,
                10.0,
                max_relative = 1e-9
            );
        }
    }

    #[test]
    fn zero_drift_gives_flat_segments() {
        let cfg = SimConfig {
            theta_ppm: 0.0,
            errors: ErrorConfig::default(),
            ..zero_error_cfg(60.0, 600.0)
        };
        let trace = simulate(&cfg).unwrap();
        for w in trace.samples.windows(2) {
            if w[0].is_sync {
                continue;
            }
            assert_eq!(w[1].x_td_ns, w[0].x_td_ns);
        }
    }

    #[test]
    fn same_seed_reproduces_trace() {
        let cfg = SimConfig {
            errors: ErrorConfig::default(),
            ..zero_error_cfg(60.0, 600.0)
        };
        let a = simulate(&cfg).unwrap();
        let b = simulate(&cfg).unwrap();
        assert_eq!(a, b);
        let c = simulate(&SimConfig { seed: 8, ..cfg }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn reset_level_equals_error_sample_stream() {
        // The value right after each sync is the fresh draw plus one tick of
        // drift; replaying the same seed through the composer must match.
        use rand::SeedableRng;
        let cfg = SimConfig {
            errors: ErrorConfig::default(),
            ..zero_error_cfg(60.0, 600.0)
        };
        let trace = simulate(&cfg).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cfg.seed);
        for (k, s) in trace.samples.iter().enumerate() {
            if s.is_sync && k + 1 < trace.samples.len() {
                let draw = compose_sync_error(&cfg.errors, &cfg.numerology, &mut rng);
                assert_relative_eq!(
                    trace.samples[k + 1].x_td_ns,
                    draw.total_ns + 10.0,
                    max_relative = 1e-12
                );
            }
        }
    }

    #[test]
    fn max_monotone_in_period_for_matched_streams() {
        // Equal tick and seed: larger periods see the same error draws with
        // more drift stacked on top.
        let mut prev = 0.0;
        for period in [10.0, 20.0, 40.0, 60.0, 120.0] {
            let cfg = SimConfig {
                errors: ErrorConfig::default(),
                ..zero_error_cfg(period, 10.0 * period)
            };
            let max = simulate(&cfg).unwrap().path_max_abs_ns();
            assert!(
                max >= prev,
                "period {period}: {max} < previous {prev}"
            );
            prev = max;
        }
    }

    #[test]
    fn saturation_events_counted() {
        let errors = ErrorConfig {
            tae_bound_ns: 0.0,
            rtge: RtgeGranularity::Fixed(0.0),
            toa: ToaModel::Gaussian { kappa: f64::INFINITY },
            correction: Correction::None,
            // Past the absolute TA range.
            true_pd_ns: Some(4000.0 * Numerology::<f64>::new(0).unwrap().ta_time_unit_ns()),
            pd_mode: PdMode::TaBased,
        };
        let cfg = SimConfig {
            errors,
            ..zero_error_cfg(60.0, 600.0)
        };
        let trace = simulate(&cfg).unwrap();
        assert_eq!(trace.saturation_events, 10);
    }

    #[test]
    fn validation_rejects_bad_grids() {
        let mut cfg = zero_error_cfg(60.0, 600.0);
        cfg.tick_ms = Some(70.0);
        assert!(matches!(cfg.validate(), Err(SimError::TickExceedsPeriod { .. })));

        let mut cfg = zero_error_cfg(60.0, 30.0);
        cfg.tick_ms = Some(1.0);
        assert!(matches!(cfg.validate(), Err(SimError::DurationTooShort { .. })));

        let mut cfg = zero_error_cfg(60.0, 600.0);
        cfg.tick_ms = Some(0.7);
        assert!(matches!(cfg.validate(), Err(SimError::OffTickGrid { .. })));

        let mut cfg = zero_error_cfg(60.0, 600.0);
        cfg.sync_period_ms = 0.0;
        assert!(matches!(cfg.validate(), Err(SimError::NonPositive { .. })));
    }

    #[test]
    fn default_tick_caps_at_one_ms() {
        let mut cfg = zero_error_cfg(60.0, 600.0);
        cfg.tick_ms = None;
        assert_eq!(cfg.effective_tick_ms(), 1.0);
        cfg.sync_period_ms = 5.0;
        assert_eq!(cfg.effective_tick_ms(), 0.5);
    }

    #[test]
    fn csv_round_numbers() {
        let trace = simulate(&zero_error_cfg(60.0, 60.0)).unwrap();
        let csv = trace.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("t_ms,x_td_ns,is_sync"));
        assert_eq!(lines.next(), Some("0,0,0"));
        assert_eq!(lines.next(), Some("1,10,0"));
        assert_eq!(csv.lines().last(), Some("60,600,1"));
    }
}
