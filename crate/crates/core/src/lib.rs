//! Two-use classical capacity of correlated Pauli ("memory") channels.
//!
//! The channel applies `σ_i ⊗ σ_j` with probability
//! `p_ij = (1 − μ) q_i q_j + μ q_i δ_ij`. Its capacity over two uses is
//! `C = 2 − min_ρ S(ℰ(ρ))`, minimized over pure inputs. This crate
//!
//! * builds the output in the Bell basis from ten coefficients `A_0..A_9`
//!   ([`channel`], [`bell`]) and checks it against a direct Kraus sum,
//! * diagonalizes 4×4 Hermitian outputs and compares spectra by majorization
//!   ([`spectral`]),
//! * evaluates the closed-form spectra and thresholds on `μ` above which a
//!   Bell input is optimal ([`conditions`]),
//! * minimizes the output entropy numerically ([`optimizer`]),
//! * checks first-order perturbation formulas around the two candidate
//!   optima ([`perturbation`]),
//! * bundles the property suites behind `paulicap verify` ([`verify`]).

#![allow(clippy::needless_range_loop)]

pub mod bell;
pub mod channel;
pub mod conditions;
pub mod error;
pub mod linalg;
pub mod optimizer;
pub mod par;
pub mod perturbation;
pub mod sampling;
pub mod spectral;
pub mod verify;

pub use bell::{BellVector, HermitianOutput};
pub use channel::{ACoefficients, ChannelParams, JointDistribution, RegularizationRecord};
pub use conditions::{ConditionReport, Regime, SufficientReport};
pub use error::{Error, Result};
pub use optimizer::{CapacityResult, Enhancement, ExtremalClass, OptimizerConfig};
pub use perturbation::{BasePoint, PerturbationConditions, PerturbationReport};
pub use spectral::Spectrum;
