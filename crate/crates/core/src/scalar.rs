//! Scalar abstraction for the simulation math.
//!
//! All timing quantities are plain scalars in engineering units (ns, ms,
//! kHz, ppm). The core is generic over the scalar type so the same code
//! runs in `f32` or `f64`; the crate root exports `f64` aliases, which is
//! what the CLI and the experiment presets use.

use rand::distr::uniform::SampleUniform;
use rand::Rng;

/// Floating-point scalar usable throughout the simulator.
///
/// Everything required here is satisfied by `f32` and `f64`. The one
/// non-obvious member is [`Scalar::standard_normal`]: sampling lives on
/// the trait so generic code does not have to thread `rand_distr` bounds
/// through every signature.
pub trait Scalar:
    num_traits::Float
    + num_traits::FromPrimitive
    + num_traits::NumAssign
    + SampleUniform
    + std::fmt::Debug
    + std::fmt::Display
    + serde::Serialize
    + serde::de::DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// One draw from the standard normal distribution N(0, 1).
    fn standard_normal<G: Rng + ?Sized>(rng: &mut G) -> Self;
}

impl Scalar for f64 {
    fn standard_normal<G: Rng + ?Sized>(rng: &mut G) -> Self {
        rng.sample(rand_distr::StandardNormal)
    }
}

impl Scalar for f32 {
    fn standard_normal<G: Rng + ?Sized>(rng: &mut G) -> Self {
        rng.sample(rand_distr::StandardNormal)
    }
}

/// Shorthand for converting literal constants into the scalar type.
#[inline]
pub(crate) fn cast<R: Scalar>(x: f64) -> R {
    R::from_f64(x).expect("constant representable in scalar type")
}
