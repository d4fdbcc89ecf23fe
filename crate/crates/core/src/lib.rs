//! Planar spin squeezing toolkit.
//!
//! Computes the planar uncertainty bound C_J (the minimum of ΔJ_X² + ΔJ_Y²
//! over spin-J states), builds and characterizes the states that reach it,
//! finds them as ground states of a double-well condensate, evaluates
//! single-shot interferometric phase noise, and evaluates planar-variance
//! entanglement witnesses for several spins.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bec;
pub mod bound;
pub mod entanglement;
pub mod error;
pub mod interferometer;
pub mod optimize;
pub mod spin;
pub mod tridiag;

pub use bec::{BecParams, BecScanPoint};
pub use bound::{cj_asymptotic, cj_direct, cj_exact, BoundResult, ExactBound};
pub use entanglement::{MultiSiteState, SignConfig, Verdict, WernerParams};
pub use error::{Error, Result};
pub use interferometer::{OutputDistribution, PhaseSetting};
pub use spin::{moments, rotate_about_z, SpinMoments, SpinOperatorSet, SpinQuantumNumber, SpinState};
