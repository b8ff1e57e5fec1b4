use crate::model::Branch;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{op}: dimension mismatch ({left} vs {right})")]
    DimensionMismatch {
        op: &'static str,
        left: usize,
        right: usize,
    },
    #[error("matrix dimension must be at least 1")]
    EmptyMatrix,
    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("eigensolver did not converge: achieved residual {residual:e} (bound {bound:e})")]
    NonConvergence { residual: f64, bound: f64 },
    #[error("oscillator length undefined at critical field (omega_tilde = 0)")]
    CriticalField,
    #[error("branch collapse: 1 + 4*lambda*n = {radicand} < 0 at n = {n}")]
    BranchCollapse { n: usize, radicand: f64 },
    #[error("level n = {n} has no {branch} branch state at omega_tilde = {omega_tilde}")]
    LevelAbsent {
        n: usize,
        branch: Branch,
        omega_tilde: f64,
    },
    #[error("state {descriptor} lies outside the interior projection of cutoff {cutoff}; increase the cutoff")]
    OutsideInterior { descriptor: String, cutoff: usize },
    #[error("level {label} is degenerate with coupled states (max coupling {coupling:e}); use degenerate_shift")]
    DegenerateLevel { label: String, coupling: f64 },
    #[error("cluster states do not share an unperturbed energy: spread {spread:e} exceeds {tolerance:e}")]
    NotDegenerate { spread: f64, tolerance: f64 },
    #[error("operation requires a spinful Fock space")]
    SpinRequired,
    #[error("usage: {0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;
