//! Phase-space simulation laboratory: co-evolves the nonlinear
//! Wigner-Hartree equation and its classical Vlasov limit from matched
//! initial data on a shared periodic grid, with spectral transforms,
//! Husimi smoothing diagnostics, and a Schrodinger-picture cross-check.

pub mod error;
pub mod field;
pub mod grid;
pub mod harness;
pub mod husimi;
pub mod initial_data;
pub mod potential;
pub mod schrodinger;
pub mod spectral;
pub mod vlasov;
pub mod wigner;

pub use error::{LabError, Result};
pub use field::PhaseField;
pub use grid::PhaseGrid;
pub use potential::{hartree_field, MeanField, Potential};
