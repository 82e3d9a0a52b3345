//! Simulation of split spin-squeezed states and the heralded states they leave behind.
//!
//! A one-axis-twisted (OAT) ensemble of `N` two-level particles is split
//! beam-splitter-like into two modes `A` and `B`. Measuring the particle
//! number and a collective spin component on `A` projects `B` onto a
//! conditional state whose metrological usefulness is quantified by the
//! quantum Fisher information (QFI), and whose non-classicality is quantified
//! by the negativity of its spin Wigner function.
//!
//! Everything is expressed in the symmetric (Dicke) basis: index `k` counts
//! excitations, runs from `0` (all spins down) to `n` (all up), and
//! `S_z |k> = (k - n/2) |k>`.
//!
//! Modules:
//!
//! - [`dicke`]: Dicke states, collective spin operators, binomial bookkeeping.
//! - [`rotation`]: Wigner d-matrices and rotated Dicke bases.
//! - [`oat`]: OAT states, the squeezing frame and the split two-mode state.
//! - [`conditioning`]: collective measurements on `A` and heralded states on `B`.
//! - [`metrology`]: QFI of pure, mixed and block-diagonal states.
//! - [`noise`]: particle-number fluctuations and detection noise averages.
//! - [`wigner`]: Clebsch-Gordan coefficients, spin Wigner functions, negativity.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod conditioning;
pub mod dicke;
mod error;
pub mod metrology;
pub mod noise;
pub mod oat;
pub mod rotation;
pub mod wigner;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use conditioning::{condition, outcome_table, sz_conditional_closed_form, ConditionalOutcome, OutcomeTable};
pub use dicke::{collective_spin_ops, log_binomial, DickeState, SpinOperators, StateFile};
pub use metrology::{
    covariance_matrix, cramer_rao, qfi_block_mixture, qfi_mixed, qfi_pure, BlockMixture, BlockQfi, QfiResult,
    SpinDensity,
};
pub use noise::{
    avg_qfi_detection, avg_qfi_full, avg_qfi_joint_block, avg_qfi_number_fluct, detection_weights,
    noisy_conditional_state, DetectionNoise, HeraldRule, NumberReadout,
};
pub use oat::{oat_state, split_state, splitting_distribution, theta_star, Axis, MeasurementFrame, OatParams, SplitState};
pub use rotation::{rotated_dicke_bra, wigner_d_matrix, RotationSpec};
pub use wigner::{
    clebsch_gordan, rho_lm, wigner_function, wigner_negativity, MultipoleExpansion, SphereGrid, WignerField,
};
