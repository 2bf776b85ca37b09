//! Finite-dimensional POVM toolkit: validation and Born statistics, minimal
//! Naimark dilations and generalized coherent states, extremality tests with
//! explicit convex decompositions, truncated-Fock-space phase-space
//! observables, and covariant POVMs for cyclic groups.

pub mod covariant;
pub mod dilation;
pub mod error;
pub mod extremality;
pub mod families;
pub mod io;
pub mod linalg;
pub mod phase_space;
pub mod povm;

pub mod cli;

pub use dilation::{
    coherent_family, constant_rank, is_spectral_measure, minimal_dilation, multiplicity, CoherentFamily,
    NaimarkDilation,
};
pub use error::{Error, Result};
pub use extremality::{
    convex_decompose, extremality_test, informational_completeness, quick_reject, ConvexDecomposition,
    ExtremalityVerdict,
};
pub use linalg::{ComplexMatrix, ComplexVector};
pub use povm::{
    born_probabilities, mix, sample_outcomes, validate_povm, DensityState, DiscretePovm, ToleranceConfig,
    ValidationReport,
};
