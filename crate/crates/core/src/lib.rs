//! One-dimensional two-state discrete-time quantum walk with operator-valued
//! path calculus.
//!
//! The walk moves left with `P_minus` (top row of the coin) and right with
//! `P_plus` (bottom row). Every path `w` carries the ordered product of its
//! step matrices, and weighted sums of those products obey exact matrix
//! identities: a discrete Ito formula, its Tanaka specialisation and a
//! decomposition of `U(xi)^n`. The crate evaluates each side independently,
//! alongside three routes to the position distribution, the decoherence
//! matrix with its min-kernel integral, and the commutative random-walk
//! reduction.
//!
//! Types are generic over the floating point scalar ([`Real`], implemented
//! for `f32` and `f64`); the `*F64` and `*F32` aliases below fix it.

pub mod acceptance;
pub mod classical;
pub mod coin;
pub mod decoherence;
pub mod error;
pub mod evolution;
pub mod ito;
pub mod mat2;
pub mod pathspace;
pub mod scalar;

pub use classical::StepWeights;
pub use coin::{Coin, QubitState};
pub use decoherence::DecoherenceMatrix;
pub use error::{Error, Result};
pub use evolution::{AmplitudeField, Distribution, Method};
pub use ito::{CharDecomposition, FunctionTable, ItoDecomposition, Tanaka};
pub use mat2::{Mat2, Spinor, StepOperator};
pub use pathspace::{Path, PathFn, PathFunctional, PathSum, Strategy, Walk};
pub use scalar::{Cx, Real};

pub type Mat2F64 = Mat2<f64>;
pub type Mat2F32 = Mat2<f32>;
pub type SpinorF64 = Spinor<f64>;
pub type SpinorF32 = Spinor<f32>;
pub type CoinF64 = Coin<f64>;
pub type CoinF32 = Coin<f32>;
pub type QubitStateF64 = QubitState<f64>;
pub type QubitStateF32 = QubitState<f32>;
pub type FunctionTableF64 = FunctionTable<f64>;
pub type FunctionTableF32 = FunctionTable<f32>;
pub type PathFunctionalF64 = PathFunctional<f64>;
pub type AmplitudeFieldF64 = AmplitudeField<f64>;
pub type DistributionF64 = Distribution<f64>;
pub type DecoherenceMatrixF64 = DecoherenceMatrix<f64>;
pub type StepWeightsF64 = StepWeights<f64>;
