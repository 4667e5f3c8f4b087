//! Exact arithmetic in the divided-power ring `S` at finite p-adic precision,
//! together with strongly divisible modules, certified torsion quotients and
//! the duality functor on both.
//!
//! The coefficient ring is `S_N = S / p^N` where `S` is the p-adic completion
//! of the divided-power envelope of `W[u]` along the ideal generated by an
//! Eisenstein polynomial `E(u)`. Elements are stored on the free basis
//! `u^i / (i div e)!` with coefficients in `Z/p^m`; every value carries its own
//! precision `m` and operations never fabricate precision (dividing by `p`
//! consumes one unit, the divided Frobenius consumes one unit).

pub mod io;
pub mod matrix;
pub mod module;
pub mod padic;
pub mod ring;
pub mod suites;
pub mod torsion;

pub use matrix::SMat;
pub use module::{SDivModule, SDivMorphism};
pub use padic::{PadicConfig, PadicInt};
pub use ring::{OKElem, SElem};
pub use torsion::{ExtensionData, SInfElem, TorsionDualElem, TorsionElem, TorsionPresentation};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("value is not divisible by p")]
    NotDivisible,
    #[error("precision exhausted (would drop below 1)")]
    PrecisionExhausted,
    #[error("value is not a unit")]
    NotAUnit,
    #[error("operands belong to different arithmetic contexts")]
    ConfigMismatch,
    #[error("internal precision exceeded: {0}")]
    InternalPrecisionExceeded(String),
    #[error("element does not lie in Fil1")]
    NotInFil1,
    #[error("unit inversion exceeded its safety cap (internal error)")]
    NonTermination,
    #[error("certificate failure: {0}")]
    CertificateFailure(String),
    #[error("torsion element carries no Fil1 witness")]
    MissingWitness,
    #[error("no admissible lift at available precision: {0}")]
    LiftFailure(String),
    #[error("invalid extension data: {0}")]
    InvalidExtensionData(String),
    #[error("matrix is not invertible over S")]
    NotInvertible,
    #[error("dimension mismatch: {0}")]
    Shape(String),
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("semantic error: {0}")]
    Semantic(String),
}

pub type Result<T> = std::result::Result<T, Error>;
