//! Dense state-vector quantum simulation: states, gates, measurement,
//! circuits, and the textbook algorithms built on them (Shor, Grover, Hogg's
//! lattice search, BB84, dense coding, teleportation, the 3-qubit bit-flip code).
//!
//! The numeric core is generic over [`scalar::Real`] (`f64` and `f32`); the
//! aliases below fix the scalar for everyday use.

pub mod circuit;
pub mod error;
pub mod grover;
pub mod hogg;
pub mod measure;
pub mod ops;
pub mod protocols;
pub mod qec;
pub mod qstate;
pub mod scalar;
pub mod shor;

pub use error::{QsimError, Result};
pub use measure::RngStream;

pub type StateVec64 = qstate::StateVector<f64>;
pub type StateVec32 = qstate::StateVector<f32>;
pub type Op64 = ops::UnitaryOp<f64>;
pub type Op32 = ops::UnitaryOp<f32>;
pub type Matrix64 = ops::Matrix<f64>;
pub type Matrix32 = ops::Matrix<f32>;
pub type Distribution64 = measure::Distribution<f64>;
pub type Amplitude64 = scalar::Amplitude<f64>;
