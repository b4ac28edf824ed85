//! Noiseless amplification of coherent-state sets.
//!
//! The library decides when a finite set of coherent states can be mapped to
//! an amplified set by a trace-preserving (or probabilistic) quantum channel,
//! constructs the Kraus operators of such a channel in a truncated Fock basis,
//! and explores how amplification interacts with pure-loss noise and on/off
//! photodetection.
//!
//! All numerics are generic over the scalar type through [`Real`]; concrete
//! `f64`/`f32` aliases for the main types live at the crate root.

pub mod amplifier;
pub mod channel;
pub mod cli;
pub mod error;
pub mod fock;
pub mod geometry;
pub mod kraus;
pub mod real;
pub mod transform;

pub use error::{Error, Result};
pub use real::Real;

pub use amplifier::{AmplifierInstance, Axis, MaxGain, SweepRow, SweepSpec};
pub use channel::{DetectorModel, LossChannel};
pub use fock::{CoherentLabel, FockVector, TruncationConfig};
pub use geometry::{GramMatrix, PsdVerdict, WignerGrid};
pub use kraus::{DualBasis, KrausSet, VerificationReport};
pub use transform::{
    Binding, CoefficientMatrix, FeasibilityReport, PiMatrix, ResidualGram, Verdict,
};

/// Double-precision coherent-state label.
pub type CoherentLabel64 = fock::CoherentLabel<f64>;
/// Single-precision coherent-state label.
pub type CoherentLabel32 = fock::CoherentLabel<f32>;
/// Double-precision truncated Fock-basis state vector.
pub type FockVector64 = fock::FockVector<f64>;
/// Single-precision truncated Fock-basis state vector.
pub type FockVector32 = fock::FockVector<f32>;
/// Double-precision Gram matrix of pairwise overlaps.
pub type GramMatrix64 = geometry::GramMatrix<f64>;
/// Single-precision Gram matrix of pairwise overlaps.
pub type GramMatrix32 = geometry::GramMatrix<f32>;
/// Double-precision transformation witness matrix.
pub type PiMatrix64 = transform::PiMatrix<f64>;
/// Single-precision transformation witness matrix.
pub type PiMatrix32 = transform::PiMatrix<f32>;
/// Double-precision two-state amplification instance.
pub type AmplifierInstance64 = amplifier::AmplifierInstance<f64>;
/// Single-precision two-state amplification instance.
pub type AmplifierInstance32 = amplifier::AmplifierInstance<f32>;
/// Double-precision Kraus operator set.
pub type KrausSet64 = kraus::KrausSet<f64>;
/// Single-precision Kraus operator set.
pub type KrausSet32 = kraus::KrausSet<f32>;
/// Double-precision pure-loss channel.
pub type LossChannel64 = channel::LossChannel<f64>;
/// Single-precision pure-loss channel.
pub type LossChannel32 = channel::LossChannel<f32>;
