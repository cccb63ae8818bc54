//! Thermodynamics of a pair of entangled qubits coupled to thermal baths.
//!
//! The crate simulates a two-qubit system prepared in the singlet state and
//! relaxing under local thermal Lindblad channels, in three configurations:
//! a bath on each qubit, a bath on qubit A only, or a bath on qubit B only.
//! On top of the dynamics it provides the operational first-law bookkeeping
//! (ergotropy, passive states, adiabatic work, operational heat), the
//! locality analysis of the ergotropy gap `W - W_A - W_B`, and a two-stage
//! work-extraction / thermalization protocol.
//!
//! Conventions used throughout:
//!
//! * `hbar = 1`; energies and frequencies are in `1/s`. The single physical
//!   constant is `hbar / k_B` ([`constants::HBAR_OVER_KB`]), used to convert
//!   bath temperatures in kelvin.
//! * The two-qubit product basis is ordered `(|++>, |+->, |-+>, |-->)` with
//!   qubit A as the first tensor factor and `|+>` the excited state of
//!   `sigma_z`. All 4x4 matrices use this layout.
//! * Dynamics are propagated in the interaction picture: the closed-form
//!   states carry no free phase rotation, and the numerical integrator
//!   integrates the dissipative generator only, so the two routes are
//!   directly comparable.

// Domain guards use negated comparisons (`!(x > 0.0)`) so NaN inputs fail them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod dynamics;
pub mod error;
pub mod protocol;
pub mod qstate;
pub mod thermo;

pub use error::{Error, Result};
pub use qstate::{
    ComplexSquareMatrix, DensityMatrix, HamiltonianOperator, SpectralDecomposition,
};
pub use dynamics::{BathSpec, EtaFactors, RateSet, Setup, SetupParams};
pub use thermo::{GapReport, PassiveState, SetupTriple, ThermoLedger};
