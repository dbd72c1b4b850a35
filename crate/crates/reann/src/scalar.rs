//! Scalar abstraction for the numeric core.
//!
//! The network, trainer, pruner, and discretizer are generic over the
//! floating-point type; `f64` is the default used by the CLI and the
//! crate-root aliases.

use num_traits::{Float, FromPrimitive, ToPrimitive};
use rand::distr::uniform::SampleUniform;
use serde::{de::DeserializeOwned, Serialize};
use std::fmt::{Debug, Display};

/// Floating-point scalar: f32 or f64.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + SampleUniform
    + Serialize
    + DeserializeOwned
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
}

impl<T> Scalar for T where
    T: Float
        + FromPrimitive
        + ToPrimitive
        + SampleUniform
        + Serialize
        + DeserializeOwned
        + Debug
        + Display
        + Default
        + Send
        + Sync
        + 'static
{
}

/// Converts an `f64` literal into the working scalar type.
pub fn lit<F: Scalar>(x: f64) -> F {
    F::from_f64(x).expect("literal must be representable in the scalar type")
}

/// Converts a scalar back to `f64` for reporting.
pub fn to_f64<F: Scalar>(x: F) -> f64 {
    x.to_f64().expect("scalar must convert to f64")
}
