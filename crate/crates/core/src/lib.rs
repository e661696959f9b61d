//! Exact combinatorics, dense simulation and certified bounds for telling
//! quantum cause-effect hypotheses apart.
//!
//! The crate is organised bottom-up:
//!
//! * [`combinatorics`] - Young diagrams, hook formulas, groupings, cause plans.
//! * [`linalg`] - kets, density matrices, unitaries, norms and fidelities.
//! * [`states`] - probe states, hypothesis channels, Choi operators, noise.
//! * [`discrimination`] - Helstrom, square-root and Gram–Schmidt measurements,
//!   classical strategies and the closed-form error formulas.
//! * [`certificates`] - fidelity divergence, sequential bounds and dual
//!   certificates for indefinite-order strategies.
//! * [`rates`] - discrimination rates, query planning and noisy exponents.

// Range checks are written `!(x >= lo)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certificates;
pub mod combinatorics;
pub mod discrimination;
pub mod error;
pub mod linalg;
pub mod rates;
pub mod states;

pub use certificates::{DivergenceEstimate, DualCertificate, PairLayout, SequentialBound, YklReport};
pub use combinatorics::{CausePlan, GroupingCatalog, SchurWeylRecord, YoungDiagram};
pub use discrimination::{
    BinaryResult, ClassicalAssignment, ComplementarityBound, ComplementarityInput, EnsembleResult,
    SuperposedError,
};
pub use error::{Error, Result};
pub use linalg::{DensityMatrix, Ket, UnitaryMatrix, C64, CMatrix, CVector};
pub use rates::{NoisyRateReport, PlanResult, RateReport, Scenario};
pub use states::{CausalChannel, ChoiOperator, NoiseModel, ProbeKind, ProbeState, Symmetry};
