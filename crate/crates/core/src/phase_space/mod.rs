//! Covariant phase-space observables on a truncated Fock space.
//!
//! Coordinates follow `z = (q + ip)/√2`, `D(z) = exp(z a† − z̄ a)` and
//! `η_z = D(z) h_0`.

pub mod decomposition;
pub mod discretize;
pub mod displacement;
pub mod fock;
pub mod grid;
pub mod husimi;
pub mod scan;
pub mod special;

pub use decomposition::{verify_h1_decomposition, H1DecompositionReport, H1Residual};
pub use discretize::{discretize_covariant_povm, DiscretizationSummary, DiscretizedObservable};
pub use displacement::{char_function, displacement_entries, displacement_matrix, TruncatedDisplacement};
pub use fock::{coherent_state, number_state, squeezed_state, FockVector, NamedState, StatePreparation};
pub use grid::PhaseGrid;
pub use husimi::{q_fourier, q_fourier_number_analytic, q_function, QSamples};
pub use scan::{extremality_scan, ic_indicator, IcReport, ScanConfig, ScanVerdict, ZeroSetKind};
pub use special::laguerre;
