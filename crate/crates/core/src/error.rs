use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("coupling is impermeable (m1 = m2 = 0); the transfer matrix is undefined")]
    ImpermeableCoupling,
    #[error("strength vector falls outside every branch of the inverse mapping")]
    NumericalDegeneracy,
    #[error("energy {0} sits on a band edge (ε = ±m)")]
    BandEdge(f64),
    #[error("window holds fewer than two complete bands")]
    WindowTooSmall,
    #[error("spectral function not finite near ε = {0}")]
    DegenerateBracketing(f64),
    #[error("k grid is not symmetric under k -> -k")]
    GridNotSymmetric,
    #[error("eigenspinor coefficients vanish at k = {k}, ε = {eps}")]
    GaugeSingular { k: f64, eps: f64 },
    #[error("momentum step {found} differs from the expected {expected}")]
    MomentumMismatch { expected: f64, found: f64 },
    #[error("band {0} is not isolated")]
    BandNotIsolated(i32),
    #[error("band {0} is not present in the window")]
    BandMissing(i32),
    #[error("transfer matrix has two unimodular eigenvalues at ε = {0} (energy lies in a band)")]
    Unimodular(f64),
    #[error("gap adjacent to band {0} is not resolved")]
    GapUnresolved(i32),
}

impl Error {
    /// Variant name, for machine-readable error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "InvalidInput",
            Error::ImpermeableCoupling => "ImpermeableCoupling",
            Error::NumericalDegeneracy => "NumericalDegeneracy",
            Error::BandEdge(_) => "BandEdge",
            Error::WindowTooSmall => "WindowTooSmall",
            Error::DegenerateBracketing(_) => "DegenerateBracketing",
            Error::GridNotSymmetric => "GridNotSymmetric",
            Error::GaugeSingular { .. } => "GaugeSingular",
            Error::MomentumMismatch { .. } => "MomentumMismatch",
            Error::BandNotIsolated(_) => "BandNotIsolated",
            Error::BandMissing(_) => "BandMissing",
            Error::Unimodular(_) => "Unimodular",
            Error::GapUnresolved(_) => "GapUnresolved",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
