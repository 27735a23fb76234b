use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid periods {0:?}: need at least one axis and every period >= 1")]
    InvalidPeriods(Vec<usize>),
    #[error("axis {axis} out of range for dimension {dim}")]
    InvalidAxis { axis: usize, dim: usize },
    #[error("cell {coords:?} is outside the fundamental domain of periods {periods:?}")]
    CellOutOfRange {
        coords: Vec<usize>,
        periods: Vec<usize>,
    },
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("lattice mismatch: periods {left:?} vs {right:?}")]
    ConfigMismatch { left: Vec<usize>, right: Vec<usize> },
    #[error("multiplier component z_{axis} is zero")]
    ZeroMultiplier { axis: usize },
    #[error("potential is not real (max |Im V| = {max_imag:e})")]
    NonReal { max_imag: f64 },
    #[error("grid resolution must be >= 1 on every axis, got {0:?}")]
    InvalidResolution(Vec<usize>),
    #[error("eigenvalue iteration did not converge for a {dim}x{dim} matrix (norm {norm:e})")]
    NoConvergence { dim: usize, norm: f64 },
    #[error("point lies outside the asymptotic domain: {0}")]
    OutsideOmega(String),
    #[error("eigenvalue matching is not a bijection ({0}); the domain constant is too small")]
    MatchingNotBijective(String),
    #[error("certificate does not hold")]
    CertificateDoesNotHold,
    #[error("no solution found after {attempts} Newton starts")]
    NoSolution { attempts: usize },
    #[error("verification failed: {0}")]
    VerificationFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
