//! SIB payload budgeting for multi-domain timing delivery.
//!
//! One broadcast carries the gPTP message header plus the origin timestamp
//! per TSN domain; the SIB container size caps how many domains fit.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest SIB message size in bits.
pub const SIB_MAX_BITS: u32 = 2976;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CapacityError {
    #[error("payload_bits must be > 0, got {value}")]
    NonPositivePayload { value: i64 },
}

/// Bit budget of one per-domain timing payload.
///
/// Defaults: 34-byte gPTP common header plus 10-byte originTimestamp,
/// 352 bits total. Individual widths are kept so the budget can be
/// re-split without touching the arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GptpPayloadLayout {
    pub header_bits: u32,
    pub origin_timestamp_bits: u32,
    pub other_field_bits: u32,
}

impl Default for GptpPayloadLayout {
    fn default() -> Self {
        Self {
            header_bits: 34 * 8,
            origin_timestamp_bits: 10 * 8,
            other_field_bits: 0,
        }
    }
}

impl GptpPayloadLayout {
    pub fn total_bits(&self) -> u32 {
        self.header_bits + self.origin_timestamp_bits + self.other_field_bits
    }
}

/// How many per-domain payloads fit into one SIB: `floor(sib / payload)`.
pub fn sib_domain_capacity(payload_bits: u32, sib_max_bits: u32) -> Result<u32, CapacityError> {
    if payload_bits == 0 {
        return Err(CapacityError::NonPositivePayload { value: 0 });
    }
    Ok(sib_max_bits / payload_bits)
}
