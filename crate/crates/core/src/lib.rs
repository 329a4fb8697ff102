//! Exact simulation and closed-form logical channels for repetition codes and
//! sign-modified Shor codes subjected to correlated coherent Z-rotations.
//!
//! The quantum-facing modules ([`quantum`], [`codes`], [`channels`], [`oracle`])
//! are generic over the real scalar type through [`Real`]; the aliases below fix
//! them to `f64`, which is what the experiment and fitting layers use.
//!
//! Qubit-index convention: qubit `x` is the `x`-th letter (from the left) of a
//! basis-state label and bit `x` (from the least significant end) of the basis
//! index. `|0101⟩` is therefore basis index `0b1010`.

pub mod channels;
pub mod codes;
pub mod error;
pub mod experiments;
pub mod fitting;
pub mod format;
pub mod noise;
pub mod oracle;
pub mod quantum;
pub mod real;

pub use error::{Error, Result};
pub use real::Real;

pub type StateVector64 = quantum::StateVector<f64>;
pub type StateVector32 = quantum::StateVector<f32>;
pub type CodeSpec64 = codes::CodeSpec<f64>;
pub type CodeSpec32 = codes::CodeSpec<f32>;
pub type LogicalChannel64 = channels::LogicalChannel<f64>;
pub type LogicalChannel32 = channels::LogicalChannel<f32>;
pub type SyndromeBranch64 = oracle::SyndromeBranch<f64>;
