//! Dense complex helpers for the slice systems.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// `P·C = L·U` with partial (row) pivoting, stored in place.
#[derive(Debug, Clone)]
pub struct Lu {
    factors: CMatrix,
    perm: Vec<usize>,
    det: Complex64,
}

impl Lu {
    /// Factorizes a square matrix. Exact zero pivots are kept (the
    /// determinant is then zero); [`Lu::solve`] is only meaningful when
    /// the determinant is nonzero.
    pub fn new(mut a: CMatrix) -> Self {
        let n = a.nrows();
        assert_eq!(n, a.ncols(), "LU needs a square matrix");
        let mut perm: Vec<usize> = (0..n).collect();
        let mut det = Complex64::new(1.0, 0.0);
        for k in 0..n {
            let mut p = k;
            let mut best = a[(k, k)].norm();
            for i in k + 1..n {
                let v = a[(i, k)].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if p != k {
                a.swap_rows(p, k);
                perm.swap(p, k);
                det = -det;
            }
            let pivot = a[(k, k)];
            det *= pivot;
            if pivot == Complex64::new(0.0, 0.0) {
                continue;
            }
            for i in k + 1..n {
                let factor = a[(i, k)] / pivot;
                a[(i, k)] = factor;
                if factor != Complex64::new(0.0, 0.0) {
                    for j in k + 1..n {
                        let u = a[(k, j)];
                        a[(i, j)] -= factor * u;
                    }
                }
            }
        }
        Self {
            factors: a,
            perm,
            det,
        }
    }

    pub fn determinant(&self) -> Complex64 {
        self.det
    }

    /// Solves `C·x = b` for each column of `b`.
    pub fn solve(&self, b: &CMatrix) -> CMatrix {
        let n = self.factors.nrows();
        let mut x = CMatrix::zeros(n, b.ncols());
        for c in 0..b.ncols() {
            for i in 0..n {
                x[(i, c)] = b[(self.perm[i], c)];
            }
            for i in 0..n {
                let mut acc = x[(i, c)];
                for j in 0..i {
                    acc -= self.factors[(i, j)] * x[(j, c)];
                }
                x[(i, c)] = acc;
            }
            for i in (0..n).rev() {
                let mut acc = x[(i, c)];
                for j in i + 1..n {
                    acc -= self.factors[(i, j)] * x[(j, c)];
                }
                x[(i, c)] = acc / self.factors[(i, i)];
            }
        }
        x
    }

    pub fn solve_vec(&self, b: &CVector) -> CVector {
        let m = CMatrix::from_column_slice(b.len(), 1, b.as_slice());
        let x = self.solve(&m);
        CVector::from_column_slice(x.as_slice())
    }
}

/// `P·C·Q = L·U` with complete pivoting; the smallest pivots end up last.
#[derive(Debug, Clone)]
struct FullPivLu {
    factors: CMatrix,
    rows: Vec<usize>,
    cols: Vec<usize>,
    sign: f64,
}

impl FullPivLu {
    fn new(mut a: CMatrix) -> Self {
        let n = a.nrows();
        let mut rows: Vec<usize> = (0..n).collect();
        let mut cols: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let (mut pi, mut pj, mut best) = (k, k, -1.0);
            for i in k..n {
                for j in k..n {
                    let v = a[(i, j)].norm();
                    if v > best {
                        best = v;
                        pi = i;
                        pj = j;
                    }
                }
            }
            if pi != k {
                a.swap_rows(pi, k);
                rows.swap(pi, k);
                sign = -sign;
            }
            if pj != k {
                a.swap_columns(pj, k);
                cols.swap(pj, k);
                sign = -sign;
            }
            let pivot = a[(k, k)];
            if pivot == Complex64::new(0.0, 0.0) {
                break;
            }
            for i in k + 1..n {
                let factor = a[(i, k)] / pivot;
                a[(i, k)] = factor;
                for j in k + 1..n {
                    let u = a[(k, j)];
                    a[(i, j)] -= factor * u;
                }
            }
        }
        Self {
            factors: a,
            rows,
            cols,
            sign,
        }
    }
}

/// Adjugate `adj(C) = det(C)·C⁻¹`, finite also when `C` is singular.
///
/// With `P·C·Q = L·U`, `adj(C) = ±Q·adj(U)·L⁻¹·P`. Complete pivoting leaves
/// any tiny pivot `μ` in the last position, and for `U = [[U₁, u], [0, μ]]`
/// `adj(U) = det(U₁)·[[μ·U₁⁻¹, −U₁⁻¹·u], [0, 1]]`, which has no division by `μ`.
pub fn adjugate(c: &CMatrix) -> CMatrix {
    let n = c.nrows();
    assert_eq!(n, c.ncols(), "adjugate needs a square matrix");
    let one = Complex64::new(1.0, 0.0);
    if n == 0 {
        return CMatrix::zeros(0, 0);
    }
    if n == 1 {
        return CMatrix::from_element(1, 1, one);
    }
    let lu = FullPivLu::new(c.clone());
    let f = &lu.factors;
    let m = n - 1;
    let mu = f[(m, m)];
    let det_lead = (0..m).fold(one, |acc, i| acc * f[(i, i)]);

    // Columns of U₁⁻¹ and U₁⁻¹·u by back substitution.
    let back = |rhs: &mut Vec<Complex64>| {
        for i in (0..m).rev() {
            let mut acc = rhs[i];
            for j in i + 1..m {
                acc -= f[(i, j)] * rhs[j];
            }
            rhs[i] = acc / f[(i, i)];
        }
    };
    let mut adj_u = CMatrix::zeros(n, n);
    if det_lead != Complex64::new(0.0, 0.0) {
        for col in 0..m {
            let mut e = vec![Complex64::new(0.0, 0.0); m];
            e[col] = one;
            back(&mut e);
            for i in 0..m {
                adj_u[(i, col)] = det_lead * mu * e[i];
            }
        }
        let mut u_col: Vec<Complex64> = (0..m).map(|i| f[(i, m)]).collect();
        back(&mut u_col);
        for i in 0..m {
            adj_u[(i, m)] = -det_lead * u_col[i];
        }
        adj_u[(m, m)] = det_lead;
    }

    // adj(LU) = adj(U)·L⁻¹: solve X·L = adj(U) row by row.
    let mut adj_lu = adj_u;
    for r in 0..n {
        for j in (0..n).rev() {
            let mut acc = adj_lu[(r, j)];
            for k in j + 1..n {
                acc -= adj_lu[(r, k)] * f[(k, j)];
            }
            adj_lu[(r, j)] = acc;
        }
    }

    let mut out = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(lu.cols[i], lu.rows[j])] = adj_lu[(i, j)] * lu.sign;
        }
    }
    out
}

/// Upper estimate of the spectral radius from `‖B^(2^k)‖_F^(2^-k)` by
/// repeated squaring, with rescaling to stay clear of overflow.
pub fn spectral_radius_estimate(b: &CMatrix, squarings: u32) -> f64 {
    let mut log_scale = 0.0f64;
    let mut m = b.clone();
    let mut power = 1.0f64;
    for _ in 0..squarings {
        let norm = m.norm();
        if norm == 0.0 {
            return 0.0;
        }
        m /= Complex64::new(norm, 0.0);
        log_scale += norm.ln();
        // m now holds B^power / exp(log_scale)
        m = &m * &m;
        log_scale *= 2.0;
        power *= 2.0;
    }
    let norm = m.norm();
    if norm == 0.0 {
        return 0.0;
    }
    ((norm.ln() + log_scale) / power).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn determinant_of_small_matrices() {
        let a =
            CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)]);
        assert!((Lu::new(a).determinant() - c(-2.0, 0.0)).norm() < 1e-14);
        let b =
            CMatrix::from_row_slice(2, 2, &[c(0.0, 1.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)]);
        // i·i − 1·1 = −2
        assert!((Lu::new(b).determinant() - c(-2.0, 0.0)).norm() < 1e-14);
        assert_eq!(Lu::new(CMatrix::identity(5, 5)).determinant(), c(1.0, 0.0));
        let singular =
            CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)]);
        assert_eq!(Lu::new(singular).determinant(), c(0.0, 0.0));
    }

    #[test]
    fn solve_agrees_with_nalgebra() {
        let n = 6;
        let a = CMatrix::from_fn(n, n, |i, j| {
            c(
                ((i * 7 + j * 3) % 5) as f64 - 1.5 + if i == j { 4.0 } else { 0.0 },
                (i as f64 - j as f64) * 0.1,
            )
        });
        let b = CMatrix::from_fn(n, 2, |i, j| c(i as f64 + 1.0, j as f64));
        let ours = Lu::new(a.clone()).solve(&b);
        let reference = a.clone().lu().solve(&b).unwrap();
        assert!((ours - reference).norm() < 1e-12);
        assert!(
            (Lu::new(a.clone()).determinant() - a.determinant()).norm()
                < 1e-10 * a.determinant().norm()
        );
    }

    #[test]
    fn adjugate_matches_det_times_inverse() {
        let a = CMatrix::from_row_slice(
            3,
            3,
            &[
                c(2.0, 0.5),
                c(1.0, 0.0),
                c(0.0, -1.0),
                c(0.3, 0.0),
                c(3.0, 0.0),
                c(1.0, 1.0),
                c(-1.0, 0.0),
                c(0.5, 0.2),
                c(4.0, 0.0),
            ],
        );
        let expected = a.clone().try_inverse().unwrap() * a.determinant();
        assert!((adjugate(&a) - expected).norm() < 1e-12);
    }

    #[test]
    fn adjugate_of_singular_matrix() {
        // adj([[1,2],[2,4]]) = [[4,-2],[-2,1]]
        let a =
            CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)]);
        let expected = CMatrix::from_row_slice(
            2,
            2,
            &[c(4.0, 0.0), c(-2.0, 0.0), c(-2.0, 0.0), c(1.0, 0.0)],
        );
        assert!((adjugate(&a) - expected).norm() < 1e-12);
    }

    #[test]
    fn adjugate_of_rank_one_update() {
        // adj(I − B) = (1 − tr B)·I + B when B has rank one
        let n = 9;
        let p: Vec<f64> = (0..n).map(|i| (0.37 * i as f64).exp()).collect();
        let w: Vec<f64> = (0..n).map(|i| 0.05 + 0.01 * i as f64).collect();
        let trace: f64 = (0..n).map(|i| w[i]).sum();
        let b = CMatrix::from_fn(n, n, |i, j| c(p[i] / p[j] * w[j] / trace, 0.0));
        let sys = CMatrix::identity(n, n) - &b;
        let expected = CMatrix::identity(n, n) * (c(1.0, 0.0) - b.trace()) + &b;
        assert!((adjugate(&sys) - expected).norm() < 1e-13);
    }

    #[test]
    fn adjugate_of_zero_and_scalar() {
        assert_eq!(adjugate(&CMatrix::zeros(3, 3)), CMatrix::zeros(3, 3));
        assert_eq!(
            adjugate(&CMatrix::from_element(1, 1, c(0.0, 0.0)))[(0, 0)],
            c(1.0, 0.0)
        );
    }

    #[test]
    fn spectral_radius_of_diagonal_and_nilpotent() {
        let d = CMatrix::from_diagonal(&CVector::from_vec(vec![
            c(0.3, 0.0),
            c(0.0, -0.7),
            c(0.1, 0.1),
        ]));
        assert!((spectral_radius_estimate(&d, 8) - 0.7).abs() < 0.01);
        let mut n = CMatrix::zeros(3, 3);
        n[(0, 1)] = c(5.0, 0.0);
        n[(1, 2)] = c(5.0, 0.0);
        assert_eq!(spectral_radius_estimate(&n, 6), 0.0);
        assert_eq!(spectral_radius_estimate(&CMatrix::zeros(4, 4), 6), 0.0);
    }
}
