//! Error types shared across the crate.

use thiserror::Error;

/// Grid construction rejected the requested lattice.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("cells per axis must be positive")]
    EmptyAxis,
    #[error("grid spacing must be positive (axis {axis}: {h})")]
    NonPositiveSpacing { axis: usize, h: f64 },
    #[error("anisotropic grid rejected: spacings {h:?} differ beyond tolerance")]
    Anisotropic { h: Vec<f64> },
}

/// No direction/pair/subset combination is fully available under the mask.
///
/// Callers that can degrade (see the embedded-boundary assembly) catch this;
/// everyone else treats it as a hard failure.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("no admissible stencil under the availability mask")]
pub struct NoStencil;

/// Polynomial fitting failures.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum InterpError {
    /// The pivoted factorization detected rank deficiency. Unreachable for
    /// selections produced by the `stencil` module; reachable for arbitrary
    /// node sets (e.g. the superseded algorithm enumerated by `oracle`).
    #[error("singular interpolation system (relative pivot {pivot:.3e})")]
    SingularSystem { pivot: f64 },
    #[error("node count {nodes} does not match basis length {basis}")]
    SizeMismatch { nodes: usize, basis: usize },
    #[error("normal vector must have unit length (got |n| = {norm})")]
    NotUnitNormal { norm: f64 },
}

/// Sparse/dense linear-solver failures.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("solver diverged after {iterations} iterations (residual {residual:.3e})")]
    Diverged { iterations: usize, residual: f64 },
    #[error("zero diagonal at row {row}: Jacobi preconditioner impossible (assembly bug)")]
    ZeroDiagonal { row: usize },
    #[error("singular dense system")]
    Singular,
    #[error("system of {n} unknowns exceeds the dense-solve limit of {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("matrix shape error: {0}")]
    Shape(String),
}

/// Embedded-boundary discretization failures.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum EbmError {
    /// The reconstructed interface plane misses the cell entirely; the caller
    /// reclassifies the cell by majority corner sign.
    #[error("degenerate cut in cell {cell:?}: reconstructed plane misses the cell")]
    DegenerateCut { cell: [i64; 3] },
    #[error("cell {cell:?} component {component}: no stencil and no affinely independent degree-1 fallback")]
    NoFallback {
        cell: [i64; 3],
        component: &'static str,
    },
    #[error(transparent)]
    Interp(#[from] InterpError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// Text-format parsing failures (mask files, config files, system dumps).
#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl FormatError {
    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        FormatError::Parse {
            line,
            msg: msg.into(),
        }
    }
}
