use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("Möbius parameter must have positive real part, got kappa0 = {re} + {im}i")]
    InvalidKappa0 { re: f64, im: f64 },

    #[error("Möbius transform has a pole at z = 1")]
    MoebiusPole,

    #[error("polynomial is not in the image of T-: reconstruction residual {residual:e} exceeds {tol:e}")]
    NotInImage { residual: f64, tol: f64 },

    #[error("matrix is singular to working precision (pivot {pivot}, condition estimate {condition:e})")]
    Singular { pivot: usize, condition: f64 },

    #[error("shift {re} + {im}i coincides with an eigenvalue (pivot {pivot})")]
    ShiftOnEigenvalue { re: f64, im: f64, pivot: usize },

    #[error("dimension mismatch: {0}")]
    Shape(&'static str),

    #[error("degenerate segment geometry: |det J| = {det:e} below {threshold:e}")]
    DegenerateGeometry { det: f64, threshold: f64 },

    #[error("invalid input: {0}")]
    Invalid(&'static str),
}
