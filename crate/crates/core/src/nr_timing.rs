//! 5G NR numerology timing constants and timing-advance (TA) arithmetic.
//!
//! The air interface quantizes every timing exchange onto a lattice derived
//! from the basic time unit `T_c = 1 / (dF_max * N_f)`. A TA command moves
//! uplink timing in steps of one *TA time unit* `U(mu) = 16 * 64 * T_c / 2^mu`,
//! so a TA-based path-delay estimate is only ever known to a granularity of
//! `U(mu) / 2` (the round trip covers the path twice).
//!
//! Two TA command formats exist:
//!
//! * **connected** — the 6-bit MAC-CE adjustment, indices 0..=63 centered at
//!   31 (index 31 means "no change").
//! * **random access** — the absolute index 0..=3846 granted in the random
//!   access response.
//!
//! All functions here are pure and cheap; they are the timing vocabulary the
//! error models and the clock simulation are written in.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{cast, Scalar};

/// Speed of light in m/s, exact by SI definition.
pub const SPEED_OF_LIGHT_M_PER_S: f64 = 299_792_458.0;

/// Highest supported numerology index (sub-carrier spacing 15 * 2^mu kHz).
pub const MAX_MU: u8 = 3;

/// Largest index a connected-mode (6-bit) TA command can carry.
pub const TA_CONNECTED_MAX: u16 = 63;

/// Connected-mode index meaning "no timing change".
pub const TA_CONNECTED_CENTER: u16 = 31;

/// Largest index a random-access TA command can carry.
pub const TA_RANDOM_ACCESS_MAX: u16 = 3846;

/// Errors from the timing arithmetic.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum TimingError {
    #[error("{name} must be > 0, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("{name} must be >= 0, got {value}")]
    Negative { name: &'static str, value: f64 },
    #[error("TA index {index} outside {mode:?} range 0..={max}")]
    TaSaturation { index: i64, mode: TaMode, max: u16 },
    #[error("TA command is {found:?} mode, expected {expected:?}")]
    WrongTaMode { expected: TaMode, found: TaMode },
    #[error("numerology index {mu} unsupported, expected 0..={MAX_MU}")]
    UnsupportedNumerology { mu: u8 },
    #[error("sub-carrier spacing {scs_khz} kHz unsupported, expected 15/30/60/120")]
    UnsupportedScs { scs_khz: u32 },
}

/// Basic time unit `1 / (delta_f_max * n_f)` expressed in nanoseconds.
///
/// With the NR defaults (480 kHz, 4096) this is about 0.509 ns.
pub fn basic_time_unit<R: Scalar>(delta_f_max_khz: R, n_f: R) -> Result<R, TimingError> {
    if delta_f_max_khz <= R::zero() {
        return Err(TimingError::NonPositive {
            name: "delta_f_max_khz",
            value: delta_f_max_khz.to_f64().unwrap_or(f64::NAN),
        });
    }
    if n_f <= R::zero() {
        return Err(TimingError::NonPositive {
            name: "n_f",
            value: n_f.to_f64().unwrap_or(f64::NAN),
        });
    }
    // 1 / (kHz * n_f) in ms, times 1e6 to land in ns.
    Ok(cast::<R>(1e6) / (delta_f_max_khz * n_f))
}

/// NR numerology: the sub-carrier spacing index plus the timing constants
/// derived from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Numerology<R> {
    mu: u8,
    delta_f_max_khz: R,
    n_f: R,
    n_tafo: R,
    legacy_nta_scaling: bool,
}

impl<R: Scalar> Numerology<R> {
    /// Build from the numerology index `mu` (0..=3).
    pub fn new(mu: u8) -> Result<Self, TimingError> {
        if mu > MAX_MU {
            return Err(TimingError::UnsupportedNumerology { mu });
        }
        Ok(Self {
            mu,
            delta_f_max_khz: cast(480.0),
            n_f: cast(4096.0),
            n_tafo: R::zero(),
            legacy_nta_scaling: false,
        })
    }

    /// Build from a sub-carrier spacing in kHz (15, 30, 60 or 120).
    pub fn from_scs_khz(scs_khz: u32) -> Result<Self, TimingError> {
        match scs_khz {
            15 => Self::new(0),
            30 => Self::new(1),
            60 => Self::new(2),
            120 => Self::new(3),
            _ => Err(TimingError::UnsupportedScs { scs_khz }),
        }
    }

    /// Override the frequency-offset constant added to the TA sample count.
    pub fn with_n_tafo(mut self, n_tafo: R) -> Self {
        self.n_tafo = n_tafo;
        self
    }

    /// Scale the TA unit *up* with `mu` instead of down.
    ///
    /// This reading makes the TA step grow with sub-carrier spacing; it is
    /// kept selectable for auditing but contradicts both the published
    /// per-SCS error halving and 3GPP timing tables, so it is off by default.
    pub fn with_legacy_nta_scaling(mut self, enabled: bool) -> Self {
        self.legacy_nta_scaling = enabled;
        self
    }

    pub fn mu(&self) -> u8 {
        self.mu
    }

    /// Sub-carrier spacing `15 * 2^mu` in kHz.
    pub fn scs_khz(&self) -> u32 {
        15 << self.mu
    }

    /// Basic time unit `T_c` in ns.
    pub fn t_c_ns(&self) -> R {
        basic_time_unit(self.delta_f_max_khz, self.n_f).expect("validated at construction")
    }

    /// Slot duration `1 ms / 2^mu`.
    pub fn slot_duration_ms(&self) -> R {
        cast::<R>(1.0) / cast::<R>(f64::from(1u32 << self.mu))
    }

    /// Duration of one TA index step, in ns.
    ///
    /// Default scaling: `U(mu) = (16 * 64 + n_tafo) * T_c / 2^mu`, which
    /// halves exactly for each numerology step when `n_tafo == 0`.
    pub fn ta_time_unit_ns(&self) -> R {
        let pow2 = cast::<R>(f64::from(1u32 << self.mu));
        let samples = cast::<R>(16.0 * 64.0);
        if self.legacy_nta_scaling {
            (samples * pow2 + self.n_tafo) * self.t_c_ns()
        } else {
            (samples + self.n_tafo) * self.t_c_ns() / pow2
        }
    }

    /// Path-delay quantization step `U(mu) / 2`, in ns.
    pub fn ta_granularity_ns(&self) -> R {
        self.ta_time_unit_ns() / cast::<R>(2.0)
    }
}

/// TA command addressing mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaMode {
    /// 6-bit adjustment relative to the current timing, centered at 31.
    Connected,
    /// Absolute index from the random access response.
    RandomAccess,
}

impl TaMode {
    fn max_index(self) -> u16 {
        match self {
            TaMode::Connected => TA_CONNECTED_MAX,
            TaMode::RandomAccess => TA_RANDOM_ACCESS_MAX,
        }
    }
}

/// A validated TA command.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaCommand {
    index: u16,
    mode: TaMode,
}

impl TaCommand {
    pub fn new(index: u16, mode: TaMode) -> Result<Self, TimingError> {
        if index > mode.max_index() {
            return Err(TimingError::TaSaturation {
                index: i64::from(index),
                mode,
                max: mode.max_index(),
            });
        }
        Ok(Self { index, mode })
    }

    pub fn connected(index: u16) -> Result<Self, TimingError> {
        Self::new(index, TaMode::Connected)
    }

    pub fn random_access(index: u16) -> Result<Self, TimingError> {
        Self::new(index, TaMode::RandomAccess)
    }

    pub fn index(&self) -> u16 {
        self.index
    }

    pub fn mode(&self) -> TaMode {
        self.mode
    }
}

/// Quantize a measured delay onto the TA index lattice.
///
/// Random-access mode floors a non-negative round-trip time to an absolute
/// index. Connected mode maps a *signed* delay adjustment to
/// `31 + floor(delta / U)`.
///
/// An index outside the mode's range is reported as
/// [`TimingError::TaSaturation`] carrying the raw index so the caller can
/// decide to clamp.
pub fn ta_index_for_rtt<R: Scalar>(
    value_ns: R,
    num: &Numerology<R>,
    mode: TaMode,
) -> Result<TaCommand, TimingError> {
    let unit = num.ta_time_unit_ns();
    let steps = (value_ns / unit).floor();
    let raw = match mode {
        TaMode::RandomAccess => {
            if value_ns < R::zero() {
                return Err(TimingError::Negative {
                    name: "rtt_ns",
                    value: value_ns.to_f64().unwrap_or(f64::NAN),
                });
            }
            steps.to_i64().unwrap_or(i64::MAX)
        }
        TaMode::Connected => i64::from(TA_CONNECTED_CENTER) + steps.to_i64().unwrap_or(i64::MAX),
    };
    if raw < 0 || raw > i64::from(mode.max_index()) {
        return Err(TimingError::TaSaturation {
            index: raw,
            mode,
            max: mode.max_index(),
        });
    }
    // Range-checked above.
    Ok(TaCommand {
        index: raw as u16,
        mode,
    })
}

/// Signed timing compensation carried by a connected-mode TA command:
/// `(index - 31) * U(mu)`.
pub fn pd_compensation_connected<R: Scalar>(
    ta: &TaCommand,
    num: &Numerology<R>,
) -> Result<R, TimingError> {
    if ta.mode != TaMode::Connected {
        return Err(TimingError::WrongTaMode {
            expected: TaMode::Connected,
            found: ta.mode,
        });
    }
    let offset = f64::from(ta.index) - f64::from(TA_CONNECTED_CENTER);
    Ok(cast::<R>(offset) * num.ta_time_unit_ns())
}

/// Input for [`path_delay_estimate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathDelayInput<R> {
    /// Estimate from an assumed cell radius in metres: `R / c`.
    CellRadius { radius_m: R },
    /// Estimate from a TA index: `index * U(mu) / 2`.
    TaBased { ta: TaCommand },
}

/// One-way path delay estimate in ns.
pub fn path_delay_estimate<R: Scalar>(
    input: PathDelayInput<R>,
    num: &Numerology<R>,
) -> Result<R, TimingError> {
    match input {
        PathDelayInput::CellRadius { radius_m } => {
            if radius_m < R::zero() {
                return Err(TimingError::Negative {
                    name: "radius_m",
                    value: radius_m.to_f64().unwrap_or(f64::NAN),
                });
            }
            // metres / (m per ns)
            Ok(radius_m / cast::<R>(SPEED_OF_LIGHT_M_PER_S * 1e-9))
        }
        PathDelayInput::TaBased { ta } => {
            Ok(cast::<R>(f64::from(ta.index())) * num.ta_granularity_ns())
        }
    }
}
