//! Monomial-basis polynomial fitting on a stencil: Vandermonde assembly,
//! dense solve, evaluation, gradients, and linear flux functionals.
//!
//! All coordinates are expressed in a [`LocalFrame`] before assembly:
//! `u = (x − origin) / scale`. With `scale` equal to the grid spacing the
//! Vandermonde entries stay O(1) across mesh refinement, which is what keeps
//! the fits well conditioned. Fitting is exact interpolation on a square
//! system — never least squares — so a successful fit certifies unisolvence
//! of the node set.

use crate::dense::{self, DenseMatrix};
use crate::error::InterpError;

/// Physical point. 2D problems use the first two components and leave z = 0.
pub type Point = [f64; 3];

/// Monomial basis in graded-lexicographic order (total degree ascending,
/// ties broken by descending exponent tuple), matching the coefficient
/// conventions a₀, a₁₀, a₀₁, a₂₀, a₁₁, a₀₂, … in 2D and
/// a₀, a₁₀₀, a₀₁₀, a₀₀₁, a₂₀₀, a₁₁₀, a₁₀₁, a₀₂₀, a₀₁₁, a₀₀₂ in 3D.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialBasis {
    pub dim: usize,
    pub degree: u32,
    pub exponents: Vec<[u32; 3]>,
}

impl MonomialBasis {
    pub fn new(dim: usize, degree: u32) -> Self {
        assert!(dim == 2 || dim == 3);
        assert!(degree <= 3);
        let mut exponents = Vec::new();
        for total in 0..=degree {
            let mut of_degree = Vec::new();
            collect_exponents(dim, total, &mut [0u32; 3], 0, &mut of_degree);
            // descending lexicographic within a total degree
            of_degree.sort_unstable_by(|a, b| b.cmp(a));
            exponents.extend(of_degree);
        }
        MonomialBasis {
            dim,
            degree,
            exponents,
        }
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    /// Monomial values at a (frame-scaled) point.
    pub fn row(&self, u: Point) -> Vec<f64> {
        self.exponents
            .iter()
            .map(|e| powi(u[0], e[0]) * powi(u[1], e[1]) * powi(u[2], e[2]))
            .collect()
    }

    /// Partial derivative of monomial `j` along `axis`, at a scaled point.
    fn derivative(&self, j: usize, axis: usize, u: Point) -> f64 {
        let e = self.exponents[j];
        if e[axis] == 0 {
            return 0.0;
        }
        let mut v = e[axis] as f64 * powi(u[axis], e[axis] - 1);
        for a in 0..3 {
            if a != axis {
                v *= powi(u[a], e[a]);
            }
        }
        v
    }
}

fn collect_exponents(
    dim: usize,
    remaining: u32,
    cur: &mut [u32; 3],
    axis: usize,
    out: &mut Vec<[u32; 3]>,
) {
    if axis == dim - 1 {
        cur[axis] = remaining;
        out.push(*cur);
        cur[axis] = 0;
        return;
    }
    for e in 0..=remaining {
        cur[axis] = e;
        collect_exponents(dim, remaining - e, cur, axis + 1, out);
        cur[axis] = 0;
    }
}

#[inline]
fn powi(x: f64, e: u32) -> f64 {
    match e {
        0 => 1.0,
        1 => x,
        2 => x * x,
        3 => x * x * x,
        _ => x.powi(e as i32),
    }
}

/// Local coordinate frame used for conditioning: `u = (x − origin) / scale`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalFrame {
    pub origin: Point,
    pub scale: f64,
}

impl LocalFrame {
    pub fn new(origin: Point, scale: f64) -> Self {
        assert!(scale > 0.0);
        LocalFrame { origin, scale }
    }

    #[inline]
    pub fn to_local(&self, x: Point) -> Point {
        [
            (x[0] - self.origin[0]) / self.scale,
            (x[1] - self.origin[1]) / self.scale,
            (x[2] - self.origin[2]) / self.scale,
        ]
    }
}

/// A fitted polynomial: basis + frame + coefficients, with the estimated
/// condition number of the Vandermonde matrix it was solved from.
#[derive(Clone, Debug)]
pub struct PolyFit {
    pub basis: MonomialBasis,
    pub frame: LocalFrame,
    pub coeffs: Vec<f64>,
    pub condition: f64,
}

/// Node-by-monomial evaluation matrix: entry (r, c) is monomial `c` at the
/// frame-scaled node `r`. Nonsingularity of this matrix is unisolvence.
pub fn assemble_vandermonde(
    nodes: &[Point],
    basis: &MonomialBasis,
    frame: &LocalFrame,
) -> DenseMatrix {
    let rows: Vec<Vec<f64>> = nodes
        .iter()
        .map(|&x| basis.row(frame.to_local(x)))
        .collect();
    DenseMatrix::from_rows(&rows)
}

/// Exact interpolation through all nodes (square system, row-pivoted LU).
pub fn fit(
    nodes: &[Point],
    values: &[f64],
    basis: &MonomialBasis,
    frame: &LocalFrame,
) -> Result<PolyFit, InterpError> {
    if nodes.len() != basis.len() {
        return Err(InterpError::SizeMismatch {
            nodes: nodes.len(),
            basis: basis.len(),
        });
    }
    assert_eq!(values.len(), nodes.len());
    let v = assemble_vandermonde(nodes, basis, frame);
    let lu = dense::lu_factor(&v)?;
    let coeffs = lu.solve(values);
    let condition = v.norm_1() * lu.inverse().norm_1();
    Ok(PolyFit {
        basis: basis.clone(),
        frame: *frame,
        coeffs,
        condition,
    })
}

/// Polynomial value at a physical point.
pub fn evaluate(fit: &PolyFit, p: Point) -> f64 {
    let u = fit.frame.to_local(p);
    fit.basis
        .row(u)
        .iter()
        .zip(&fit.coeffs)
        .map(|(m, c)| m * c)
        .sum()
}

/// Analytic gradient in physical units (chain rule through the frame scale).
pub fn gradient(fit: &PolyFit, p: Point) -> [f64; 3] {
    let u = fit.frame.to_local(p);
    let mut g = [0.0; 3];
    for axis in 0..fit.basis.dim {
        let mut s = 0.0;
        for (j, c) in fit.coeffs.iter().enumerate() {
            s += c * fit.basis.derivative(j, axis, u);
        }
        g[axis] = s / fit.frame.scale;
    }
    g
}

/// Weights `w` such that for any nodal values `v`,
/// `(1/ρ)·n·∇(fit(v))` at `at` equals `Σ wᵢ vᵢ` — the normal flux as a
/// linear functional of nodal values, ready to be inserted as matrix-row
/// entries. Weight count equals node count, so a 3D quadratic stencil
/// contributes at most 10 row entries.
pub fn normal_flux_functional(
    nodes: &[Point],
    basis: &MonomialBasis,
    frame: &LocalFrame,
    at: Point,
    normal: [f64; 3],
    rho: f64,
) -> Result<Vec<f64>, InterpError> {
    assert!(rho > 0.0);
    let norm = (normal[0] * normal[0] + normal[1] * normal[1] + normal[2] * normal[2]).sqrt();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(InterpError::NotUnitNormal { norm });
    }
    let u = frame.to_local(at);
    let t: Vec<f64> = (0..basis.len())
        .map(|j| {
            let mut s = 0.0;
            for axis in 0..basis.dim {
                s += normal[axis] * basis.derivative(j, axis, u);
            }
            s / (rho * frame.scale)
        })
        .collect();
    functional_weights(nodes, basis, frame, &t)
}

/// Weights `w` such that `fit(v)` evaluated at `at` equals `Σ wᵢ vᵢ`.
/// Used to slave small-cut-cell center unknowns to their stencil.
pub fn point_value_functional(
    nodes: &[Point],
    basis: &MonomialBasis,
    frame: &LocalFrame,
    at: Point,
) -> Result<Vec<f64>, InterpError> {
    let t = basis.row(frame.to_local(at));
    functional_weights(nodes, basis, frame, &t)
}

/// Solves Vᵀ w = t so that t·(V⁻¹ v) = w·v for all nodal values v.
fn functional_weights(
    nodes: &[Point],
    basis: &MonomialBasis,
    frame: &LocalFrame,
    t: &[f64],
) -> Result<Vec<f64>, InterpError> {
    if nodes.len() != basis.len() {
        return Err(InterpError::SizeMismatch {
            nodes: nodes.len(),
            basis: basis.len(),
        });
    }
    let vt = assemble_vandermonde(nodes, basis, frame).transpose();
    let lu = dense::lu_factor(&vt)?;
    Ok(lu.solve(t))
}
