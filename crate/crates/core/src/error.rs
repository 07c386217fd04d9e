use thiserror::Error;

/// Failure modes shared by the numerical and physical layers.
///
/// Everything here is a *rejection*: bad input, a quantity outside its
/// validity domain, or a numerical certificate that failed. No variant is
/// used for ordinary control flow.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error(
        "matrix is not Hermitian: max |a_ij - conj(a_ji)| = {violation:.3e} exceeds {tol:.3e}"
    )]
    NotHermitian { violation: f64, tol: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off:.3e})")]
    NoConvergence { sweeps: usize, off: f64 },

    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("gapless point at k = {k:?}: gap {gap:.3e} below floor {floor:.3e}")]
    GaplessPoint { k: Vec<f64>, gap: f64, floor: f64 },

    #[error("Chern sum is not integer: residue {residue:.3e} exceeds {tol:.3e}")]
    ChernResidue { residue: f64, tol: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
