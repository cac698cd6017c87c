//! Brute-force reference solvers for `f − κT₁f = g`.
//!
//! [`assemble_full`] materializes the whole discretized `T₁` on the tensor
//! grid and [`solve_full`] solves it as one dense system. [`neumann_solve`]
//! sums the Neumann series. Neither goes through the slice code in
//! [`crate::fredholm`]; only kernel evaluation is shared.

use crate::kernel::{Kernel, KernelError, RightHandSide};
use crate::quadrature::QuadratureRule;
use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

/// Largest `n·m` accepted by [`assemble_full`].
pub const MAX_GRID: usize = 4096;
/// Pivot ratio below which the dense system counts as singular.
const SINGULAR_RATIO: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("grid {n}x{m} exceeds the dense limit of {MAX_GRID} unknowns")]
    TooLarge { n: usize, m: usize },
    #[error("I - kappa*T1 is singular at kappa = {kappa} (pivot ratio {ratio:e})")]
    Singular { kappa: Complex64, ratio: f64 },
    #[error("grid function has shape {got_rows}x{got_cols}, expected {rows}x{cols}")]
    Shape {
        rows: usize,
        cols: usize,
        got_rows: usize,
        got_cols: usize,
    },
    #[error("Neumann series needs spectral radius < 1, slice y = {y} has {radius}")]
    SpectralRadius { y: f64, radius: f64 },
    #[error("Neumann series diverging after {iterations} terms")]
    Diverging { iterations: usize },
    #[error("Neumann series did not reach tol {tol:e} in {max_iter} terms")]
    NotConverged { max_iter: usize, tol: f64 },
}

/// The discretized `T₁` on the tensor grid, ordered y-major: unknown
/// `j·n + i` is `f(xᵢ, yⱼ)`.
#[derive(Debug, Clone)]
pub struct FullOperator {
    pub matrix: DMatrix<f64>,
    pub x_rule: QuadratureRule,
    pub y_rule: QuadratureRule,
}

impl FullOperator {
    pub fn n(&self) -> usize {
        self.x_rule.len()
    }

    pub fn m(&self) -> usize {
        self.y_rule.len()
    }
}

pub fn assemble_full(
    k: &Kernel,
    x_rule: &QuadratureRule,
    y_rule: &QuadratureRule,
) -> Result<FullOperator, OracleError> {
    let (n, m) = (x_rule.len(), y_rule.len());
    if n * m > MAX_GRID {
        return Err(OracleError::TooLarge { n, m });
    }
    let x = x_rule.nodes();
    let w = x_rule.weights();
    let mut matrix = DMatrix::zeros(n * m, n * m);
    for (j, &y) in y_rule.nodes().iter().enumerate() {
        for i in 0..n {
            for l in 0..n {
                matrix[(j * n + i, j * n + l)] = k.eval(x[i], x[l], y)? * w[l];
            }
        }
    }
    Ok(FullOperator {
        matrix,
        x_rule: x_rule.clone(),
        y_rule: y_rule.clone(),
    })
}

/// Samples `g` on the grid, `out[(i, j)] = g(xᵢ, yⱼ)`.
pub fn sample_rhs(
    g: &RightHandSide,
    x_rule: &QuadratureRule,
    y_rule: &QuadratureRule,
) -> Result<DMatrix<Complex64>, OracleError> {
    let mut out = DMatrix::zeros(x_rule.len(), y_rule.len());
    for (j, &y) in y_rule.nodes().iter().enumerate() {
        for (i, &x) in x_rule.nodes().iter().enumerate() {
            out[(i, j)] = Complex64::new(g.eval(x, y)?, 0.0);
        }
    }
    Ok(out)
}

fn check_shape(g: &DMatrix<Complex64>, n: usize, m: usize) -> Result<(), OracleError> {
    if g.nrows() != n || g.ncols() != m {
        return Err(OracleError::Shape {
            rows: n,
            cols: m,
            got_rows: g.nrows(),
            got_cols: g.ncols(),
        });
    }
    Ok(())
}

/// Dense solve of `(I − κ·op) f = g` with complete pivoting.
pub fn solve_full(
    op: &FullOperator,
    kappa: Complex64,
    g_grid: &DMatrix<Complex64>,
) -> Result<DMatrix<Complex64>, OracleError> {
    let (n, m) = (op.n(), op.m());
    check_shape(g_grid, n, m)?;
    let size = n * m;
    let system = DMatrix::<Complex64>::from_fn(size, size, |r, c| {
        let id = if r == c { 1.0 } else { 0.0 };
        Complex64::new(id, 0.0) - kappa * op.matrix[(r, c)]
    });
    let lu = system.full_piv_lu();
    let diag: Vec<f64> = (0..size).map(|i| lu.u()[(i, i)].norm()).collect();
    let largest = diag.iter().copied().fold(0.0, f64::max);
    let smallest = diag.iter().copied().fold(f64::INFINITY, f64::min);
    let ratio = if largest > 0.0 {
        smallest / largest
    } else {
        0.0
    };
    if ratio < SINGULAR_RATIO {
        return Err(OracleError::Singular { kappa, ratio });
    }
    let rhs = nalgebra::DVector::from_iterator(size, g_grid.iter().copied());
    let f = lu
        .solve(&rhs)
        .ok_or(OracleError::Singular { kappa, ratio })?;
    Ok(DMatrix::from_iterator(n, m, f.iter().copied()))
}

/// Sums `Σ κᵏ T₁ᵏ g` until an increment's max-norm drops below `tol`.
///
/// Fails up front when any slice has `ρ(κ·A·W) ≥ 1`, and during iteration
/// when the increment grows three times in a row.
pub fn neumann_solve(
    k: &Kernel,
    g: &RightHandSide,
    kappa: Complex64,
    x_rule: &QuadratureRule,
    y_rule: &QuadratureRule,
    max_iter: usize,
    tol: f64,
) -> Result<DMatrix<Complex64>, OracleError> {
    let (n, m) = (x_rule.len(), y_rule.len());
    let x = x_rule.nodes();
    let w = x_rule.weights();
    let mut blocks = Vec::with_capacity(m);
    for &y in y_rule.nodes() {
        let mut block = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for l in 0..n {
                block[(i, l)] = k.eval(x[i], x[l], y)? * w[l];
            }
        }
        let radius = block
            .complex_eigenvalues()
            .iter()
            .map(|e| e.norm())
            .fold(0.0, f64::max)
            * kappa.norm();
        if radius >= 1.0 {
            return Err(OracleError::SpectralRadius { y, radius });
        }
        blocks.push(block);
    }

    let mut sum = sample_rhs(g, x_rule, y_rule)?;
    let mut term = sum.clone();
    let mut previous = f64::INFINITY;
    let mut growth = 0;
    for iteration in 1..=max_iter {
        let mut next = DMatrix::zeros(n, m);
        for (j, block) in blocks.iter().enumerate() {
            for i in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for l in 0..n {
                    acc += term[(l, j)] * block[(i, l)];
                }
                next[(i, j)] = kappa * acc;
            }
        }
        let size = next.iter().map(|v| v.norm()).fold(0.0, f64::max);
        sum += &next;
        term = next;
        if size < tol {
            return Ok(sum);
        }
        if size > previous {
            growth += 1;
            if growth >= 3 {
                return Err(OracleError::Diverging {
                    iterations: iteration,
                });
            }
        } else {
            growth = 0;
        }
        previous = size;
    }
    if term.iter().all(|v| v.norm() < tol) {
        return Ok(sum);
    }
    Err(OracleError::NotConverged { max_iter, tol })
}
