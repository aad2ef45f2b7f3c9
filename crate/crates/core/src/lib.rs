//! Generalized Dirac-Kronig-Penney chains.
//!
//! A one-dimensional massive Dirac particle on a lattice of point interactions,
//! each described by a coupling matrix `U ∈ U(2)`. The crate computes band
//! structures, Zak phases, zero modes, edge states of the half-infinite chain
//! and bulk-boundary-correspondence checks.
//!
//! Every routine is generic over [`Real`] (`f32` or `f64`); the aliases at the
//! crate root fix the scalar to `f64`.

// Negated comparisons are used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bloch;
pub mod boundary;
pub mod coupling;
pub mod error;
pub mod kurasov;
pub mod linalg;
pub mod real;
pub mod spectral;
pub mod zak;

pub use coupling::{
    classify_symmetry, family_aiii, family_bdi, family_d, from_family, make_coupling, permeability, ClassLabel, Family,
    Permeability, SymmetryClass,
};
pub use error::{Error, Result};
pub use real::Real;

pub type Complex = num_complex::Complex<f64>;
pub type Coupling = coupling::Coupling<f64>;
pub type Strengths = kurasov::Strengths<f64>;
pub type Mat2 = linalg::Mat2<f64>;
pub type BandStructure = spectral::BandStructure<f64>;
pub type ZeroModeReport = spectral::ZeroModeReport<f64>;
pub type BlochState = bloch::BlochState<f64>;
pub type Overlap = bloch::Overlap<f64>;
pub type ZakResult = zak::ZakResult<f64>;
pub type TransferMatrix = boundary::TransferMatrix<f64>;
pub type EigenSplit = boundary::EigenSplit<f64>;
pub type EdgeSpectrum = boundary::EdgeSpectrum<f64>;
