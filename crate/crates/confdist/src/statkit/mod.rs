//! Distribution kernels, special functions, RNG streams, and numeric utilities.
//! Everything here is self-contained and generic over the scalar type.

pub mod laws;
pub mod numeric;
pub mod real;
pub mod rng;
pub mod solve;
pub mod special;
pub mod stats;

pub use laws::ScalarLaw;
pub use real::Real;
pub use rng::RngStream;
