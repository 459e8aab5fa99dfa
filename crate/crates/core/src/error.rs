//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Hypergeometric series called outside its disk of convergence.
    #[error("hypergeometric series diverges: |z| = {abs_z} > 1")]
    Divergence { abs_z: f64 },

    /// Series or quadrature failed to reach the requested tolerance.
    #[error("did not converge: {context} (error estimate {estimate:.3e}, tolerance {tol:.3e})")]
    NonConvergence {
        context: &'static str,
        estimate: f64,
        tol: f64,
    },

    /// Square-root branch tracking lost continuity along a path.
    #[error("branch tracking failed near {at}")]
    BranchTracking { at: f64 },

    /// Implicit-curve root tracking lost the branch.
    #[error("root tracking failed at x = {x}")]
    RootTracking { x: f64 },

    /// Curve table line did not match the expected schema.
    #[error("curve table schema violation at line {line}: {reason}")]
    Schema { line: usize, reason: String },

    /// Weierstrass data describes a singular curve.
    #[error("singular curve: discriminant is zero for {label}")]
    SingularCurve { label: String },

    /// Neither functional-equation sign fits the coefficient data.
    #[error("root number ambiguous: residuals {plus:.3e} (+1) and {minus:.3e} (-1)")]
    AmbiguousSign { plus: f64, minus: f64 },

    /// L-series truncation could not meet the tolerance under the term cap.
    #[error("L-series tail bound {bound:.3e} exceeds tolerance {tol:.3e} at n_max = {n_max}")]
    TailBound { bound: f64, tol: f64, n_max: usize },

    /// Continued-fraction reconstruction found no fraction within tolerance.
    #[error("no rational with denominator <= {max_den} within {tol:.3e} (best residual {residual:.3e})")]
    NoRationalCandidate {
        max_den: i64,
        tol: f64,
        residual: f64,
    },

    /// PSLQ exhausted double precision without finding a relation.
    #[error("integer relation precision exhausted: norm bound {bound:.3e} after {iterations} iterations")]
    PrecisionExhausted { bound: f64, iterations: usize },

    /// The eta-quotient inverse search found no root on the search line.
    #[error("no tau with u(tau) = {target} on the search line")]
    NoRoot { target: f64 },

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
