//! Cartesian-grid stencil selection and multivariate polynomial
//! interpolation, with an embedded-boundary elliptic-interface solver built
//! on top of them.
//!
//! The crate is organized around the pipeline:
//!
//! * [`grid`] — lattice geometry and the neighbor-layer topology
//!   (Chebyshev shells, ring order, directional subsets).
//! * [`stencil`] — the selection algorithms: 2D quadratic, 3D quadratic,
//!   and the 2D cubic extension, under arbitrary availability masks.
//! * [`interp`] — monomial-basis fitting on a stencil: Vandermonde
//!   assembly, evaluation, gradients, and normal-flux functionals.
//! * [`oracle`] — exhaustive enumeration of every configuration the
//!   algorithms can emit, classified by exact integer determinants; also
//!   enumerates the superseded ring-consecutive algorithm and rediscovers
//!   its singular configuration class.
//! * [`ebm`] — embedded-boundary discretization of the elliptic interface
//!   problem ∇·(∇p/ρ) = f with jump conditions \[p\] = J₁ and
//!   [(1/ρ)∂p/∂n] = J₂: cell classification, cut-cell geometry,
//!   four-unknown partial cells, and a manufactured-solution study.
//! * [`linsolve`] — CSR storage, BiCGStab with Jacobi preconditioning, and
//!   a dense fallback.
//! * [`formats`] — the plain-text file formats used by the CLI.

// index-heavy numerical loops read better with explicit indices
#![allow(clippy::needless_range_loop)]

pub mod dense;
pub mod ebm;
pub mod error;
pub mod formats;
pub mod grid;
pub mod interp;
pub mod linsolve;
pub mod oracle;
pub mod stencil;

pub use error::{EbmError, FormatError, GridError, InterpError, NoStencil, SolveError};
