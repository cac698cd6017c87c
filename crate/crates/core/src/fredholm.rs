//! Nyström discretization of the slice operators
//! `K_y φ(x) = ∫ k(x, s, y) φ(s) ds` for a fixed `y`.
//!
//! With nodes `xᵢ`, weights `wᵢ` and `Aᵢⱼ = k(xᵢ, xⱼ, y)`, the slice acts on
//! samples as `A·W` (`W = diag(w)`), the Fredholm determinant of `E − κK_y`
//! is approximated by `det(I − κAW)` and the minor by `adj(I − κAW)·A`.

use crate::kernel::{Kernel, KernelError};
use crate::linalg::{adjugate, spectral_radius_estimate, CMatrix, CVector, Lu};
use crate::quadrature::QuadratureRule;
use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use thiserror::Error;

/// Relative size of `|det|` below which a slice counts as degenerate.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-12;

/// Squarings used by the series method's convergence check (`‖B^256‖^(1/256)`).
const RADIUS_SQUARINGS: u32 = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FredholmError {
    #[error("slice y = {y} is outside the kernel domain")]
    OutsideDomain { y: f64 },
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("series needs spectral radius of κ·A·W below 1, estimated {radius}")]
    ConvergenceDomain { radius: f64 },
    #[error("series needs at least one term")]
    NoTerms,
    #[error("slice y = {y} is near-singular: |det| = {abs_det:e}")]
    NearSingular { y: f64, abs_det: f64 },
    #[error("right-hand side has {got} samples, slice has {expected} nodes")]
    LengthMismatch { expected: usize, got: usize },
    #[error("eigenvalue iteration did not converge for slice y = {y}")]
    EigenFailure { y: f64 },
}

/// Kernel values `Aᵢⱼ = k(xᵢ, xⱼ, y)` at one slice.
#[derive(Debug, Clone)]
pub struct SliceMatrix {
    y: f64,
    entries: DMatrix<f64>,
    rule: QuadratureRule,
}

impl SliceMatrix {
    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    /// `A·W`, the matrix acting on node samples.
    pub fn operator(&self) -> DMatrix<f64> {
        let mut m = self.entries.clone();
        for (j, &w) in self.rule.weights().iter().enumerate() {
            m.column_mut(j).scale_mut(w);
        }
        m
    }

    /// `I − κ·A·W` in complex arithmetic.
    fn shifted(&self, kappa: Complex64) -> CMatrix {
        let aw = self.operator();
        let n = self.n();
        CMatrix::from_fn(n, n, |i, j| {
            let id = if i == j { 1.0 } else { 0.0 };
            Complex64::new(id, 0.0) - kappa * aw[(i, j)]
        })
    }

    fn complex_entries(&self) -> CMatrix {
        self.entries.map(|v| Complex64::new(v, 0.0))
    }
}

pub fn assemble_slice(
    k: &Kernel,
    rule: &QuadratureRule,
    y: f64,
) -> Result<SliceMatrix, FredholmError> {
    if !k.domain().contains(y) {
        return Err(FredholmError::OutsideDomain { y });
    }
    let n = rule.len();
    let x = rule.nodes();
    let mut entries = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            entries[(i, j)] = k.eval(x[i], x[j], y)?;
        }
    }
    Ok(SliceMatrix {
        y,
        entries,
        rule: rule.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeterminantMethod {
    Direct,
    Series,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceDeterminant {
    pub value: Complex64,
    pub kappa: Complex64,
    pub method: DeterminantMethod,
    pub y: f64,
}

/// `det(I − κAW)` by LU with partial pivoting.
pub fn determinant_direct(slice: &SliceMatrix, kappa: Complex64) -> SliceDeterminant {
    let value = if kappa == Complex64::new(0.0, 0.0) {
        Complex64::new(1.0, 0.0)
    } else {
        Lu::new(slice.shifted(kappa)).determinant()
    };
    SliceDeterminant {
        value,
        kappa,
        method: DeterminantMethod::Direct,
        y: slice.y,
    }
}

/// Spectral radius estimate of `κ·A·W`.
pub fn scaled_spectral_radius(slice: &SliceMatrix, kappa: Complex64) -> f64 {
    let b = slice.operator().map(|v| kappa * v);
    spectral_radius_estimate(&b, RADIUS_SQUARINGS)
}

/// `exp(−Σ_{m=1}^{M} tr((κAW)^m)/m)`, the trace form of the Fredholm
/// series. Only defined where the spectral radius of `κAW` is below one.
pub fn determinant_series(
    slice: &SliceMatrix,
    kappa: Complex64,
    max_terms: usize,
) -> Result<SliceDeterminant, FredholmError> {
    if max_terms == 0 {
        return Err(FredholmError::NoTerms);
    }
    let b = slice.operator().map(|v| kappa * v);
    let radius = spectral_radius_estimate(&b, RADIUS_SQUARINGS);
    if radius >= 1.0 {
        return Err(FredholmError::ConvergenceDomain { radius });
    }
    let mut log_det = Complex64::new(0.0, 0.0);
    let mut power = b.clone();
    for m in 1..=max_terms {
        let term = power.trace() / m as f64;
        log_det -= term;
        if power.norm() == 0.0 {
            break;
        }
        power = &power * &b;
    }
    Ok(SliceDeterminant {
        value: log_det.exp(),
        kappa,
        method: DeterminantMethod::Series,
        y: slice.y,
    })
}

/// Discrete slice solution `u` of `(I − κAW)·u = g`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolventSolve {
    pub solution: Vec<Complex64>,
    /// `‖(I − κAW)u − g‖_∞`.
    pub residual_norm: f64,
    pub determinant: Complex64,
}

pub fn resolvent_solve(
    slice: &SliceMatrix,
    kappa: Complex64,
    g_samples: &[Complex64],
) -> Result<ResolventSolve, FredholmError> {
    resolvent_solve_with_tol(slice, kappa, g_samples, DEFAULT_DEGENERACY_TOL)
}

/// As [`resolvent_solve`], declaring the slice near-singular when
/// `|det| < degeneracy_tol` (the determinant at `κ = 0` is 1).
pub fn resolvent_solve_with_tol(
    slice: &SliceMatrix,
    kappa: Complex64,
    g_samples: &[Complex64],
    degeneracy_tol: f64,
) -> Result<ResolventSolve, FredholmError> {
    let n = slice.n();
    if g_samples.len() != n {
        return Err(FredholmError::LengthMismatch {
            expected: n,
            got: g_samples.len(),
        });
    }
    if kappa == Complex64::new(0.0, 0.0) {
        return Ok(ResolventSolve {
            solution: g_samples.to_vec(),
            residual_norm: 0.0,
            determinant: Complex64::new(1.0, 0.0),
        });
    }
    let system = slice.shifted(kappa);
    let lu = Lu::new(system.clone());
    let det = lu.determinant();
    if det.norm() < degeneracy_tol {
        return Err(FredholmError::NearSingular {
            y: slice.y,
            abs_det: det.norm(),
        });
    }
    let g = CVector::from_column_slice(g_samples);
    let u = lu.solve_vec(&g);
    let residual = &system * &u - &g;
    let residual_norm = residual.iter().map(|v| v.norm()).fold(0.0, f64::max);
    Ok(ResolventSolve {
        solution: u.iter().copied().collect(),
        residual_norm,
        determinant: det,
    })
}

/// Discrete Fredholm minor `M ≈ M_y(xᵢ, xⱼ; κ)`.
#[derive(Debug, Clone)]
pub struct MinorMatrix {
    pub entries: CMatrix,
    pub kappa: Complex64,
    pub determinant: Complex64,
}

impl MinorMatrix {
    /// Resolvent kernel matrix `R = M/Δ`; `None` when `Δ = 0`.
    pub fn resolvent(&self) -> Option<CMatrix> {
        if self.determinant == Complex64::new(0.0, 0.0) {
            return None;
        }
        Some(self.entries.map(|v| v / self.determinant))
    }
}

/// `M = Δ·R` with `R = (I − κAW)⁻¹·A = A·(I − κWA)⁻¹`, so that the slice
/// solution is `u = g + κ·(M/Δ)·W·g`.
///
/// Away from zeros of `Δ` this reuses the LU factorization; near them it
/// switches to `M = adj(I − κAW)·A`, which stays finite as `Δ → 0`.
pub fn minor_matrix(slice: &SliceMatrix, kappa: Complex64) -> MinorMatrix {
    let a = slice.complex_entries();
    if kappa == Complex64::new(0.0, 0.0) {
        return MinorMatrix {
            entries: a,
            kappa,
            determinant: Complex64::new(1.0, 0.0),
        };
    }
    let system = slice.shifted(kappa);
    let lu = Lu::new(system.clone());
    let det = lu.determinant();
    let entries = if det.norm() >= DEFAULT_DEGENERACY_TOL {
        lu.solve(&a) * det
    } else {
        adjugate(&system) * a
    };
    MinorMatrix {
        entries,
        kappa,
        determinant: det,
    }
}

/// Eigenvalues of `W^{1/2}·A·W^{1/2}` (similar to `A·W`), largest modulus first.
pub fn slice_eigenvalues(slice: &SliceMatrix) -> Result<Vec<Complex64>, FredholmError> {
    let n = slice.n();
    let sqrt_w: Vec<f64> = slice.rule.weights().iter().map(|w| w.sqrt()).collect();
    let sym = DMatrix::from_fn(n, n, |i, j| sqrt_w[i] * slice.entries[(i, j)] * sqrt_w[j]);
    if sym.iter().all(|&v| v == 0.0) {
        return Ok(vec![Complex64::new(0.0, 0.0); n]);
    }
    let schur = Schur::try_new(sym, f64::EPSILON, 10_000)
        .ok_or(FredholmError::EigenFailure { y: slice.y })?;
    let mut eig: Vec<Complex64> = schur.complex_eigenvalues().iter().copied().collect();
    eig.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
    Ok(eig)
}
