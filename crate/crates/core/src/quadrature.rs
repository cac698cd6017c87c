//! Gauss–Legendre rules on `[a, b]` and their tensor products.
//!
//! A [`QuadratureRule`] is the only discretization of the Lebesgue measure
//! used anywhere in the crate: slice matrices, right-hand side norms and the
//! boundedness diagnostic all sample at its nodes and sum with its weights.

use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

/// Errors raised while building or applying a quadrature rule.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("invalid interval [{a}, {b}]: need finite a < b")]
    InvalidInterval { a: f64, b: f64 },
    #[error("unsupported dimension {0}: only 1 and 2 are available")]
    UnsupportedDimension(usize),
    #[error("a Gauss rule needs at least one node")]
    ZeroNodes,
    #[error("sample count {got} does not match rule size {expected}")]
    LengthMismatch { expected: usize, got: usize },
}

/// The box `[a, b]^nu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    a: f64,
    b: f64,
    nu: usize,
}

impl Domain {
    pub fn new(a: f64, b: f64, nu: usize) -> Result<Self, QuadratureError> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(QuadratureError::InvalidInterval { a, b });
        }
        if nu == 0 || nu > 2 {
            return Err(QuadratureError::UnsupportedDimension(nu));
        }
        Ok(Self { a, b, nu })
    }

    /// One-dimensional interval `[a, b]`.
    pub fn interval(a: f64, b: f64) -> Result<Self, QuadratureError> {
        Self::new(a, b, 1)
    }

    /// `[0, 1]`, the domain of both built-in kernels.
    pub fn unit() -> Self {
        Self {
            a: 0.0,
            b: 1.0,
            nu: 1,
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    /// Length of the interval, `b - a`.
    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.a && t <= self.b
    }
}

/// Nodes and positive weights on a [`Domain`].
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    domain: Domain,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ wᵢ·samplesᵢ`, summed left to right with Neumaier compensation.
    pub fn integrate(&self, samples: &[Complex64]) -> Result<Complex64, QuadratureError> {
        if samples.len() != self.len() {
            return Err(QuadratureError::LengthMismatch {
                expected: self.len(),
                got: samples.len(),
            });
        }
        let mut re = CompensatedSum::default();
        let mut im = CompensatedSum::default();
        for (w, v) in self.weights.iter().zip(samples) {
            re.add(w * v.re);
            im.add(w * v.im);
        }
        Ok(Complex64::new(re.total(), im.total()))
    }

    /// Real-valued counterpart of [`QuadratureRule::integrate`].
    pub fn integrate_real(&self, samples: &[f64]) -> Result<f64, QuadratureError> {
        if samples.len() != self.len() {
            return Err(QuadratureError::LengthMismatch {
                expected: self.len(),
                got: samples.len(),
            });
        }
        let mut acc = CompensatedSum::default();
        for (w, v) in self.weights.iter().zip(samples) {
            acc.add(w * v);
        }
        Ok(acc.total())
    }

    /// Integrates a closure sampled at the nodes.
    pub fn integrate_fn<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        let mut acc = CompensatedSum::default();
        for (w, &x) in self.weights.iter().zip(&self.nodes) {
            acc.add(w * f(x));
        }
        acc.total()
    }
}

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn total(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Evaluates `(P_n(t), P_n'(t))` by the three-term recurrence.
fn legendre_with_derivative(n: usize, t: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = t;
    for k in 2..=n {
        let k = k as f64;
        let p_next = ((2.0 * k - 1.0) * t * p - (k - 1.0) * p_prev) / k;
        p_prev = p;
        p = p_next;
    }
    let n_f = n as f64;
    let dp = n_f * (t * p - p_prev) / (t * t - 1.0);
    (p, dp)
}

/// The `n`-point Gauss–Legendre rule mapped onto `domain`.
///
/// Roots of `P_n` are found by Newton iteration from Chebyshev-like initial
/// guesses; only the upper half is computed and the rest mirrored, so the
/// rule is exactly symmetric.
pub fn gauss_legendre(n: usize, domain: Domain) -> Result<QuadratureRule, QuadratureError> {
    if n == 0 {
        return Err(QuadratureError::ZeroNodes);
    }
    let mut ref_nodes = vec![0.0; n];
    let mut ref_weights = vec![0.0; n];
    if n == 1 {
        ref_weights[0] = 2.0;
    } else {
        let n_f = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut t = (PI * (i as f64 + 0.75) / (n_f + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, t);
                dp = d;
                let step = p / d;
                t -= step;
                if step.abs() <= 1e-16 * t.abs().max(1.0) {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, t);
            if d.is_finite() {
                dp = d;
            }
            let w = 2.0 / ((1.0 - t * t) * dp * dp);
            // i-th largest root goes to the upper end.
            ref_nodes[n - 1 - i] = t;
            ref_nodes[i] = -t;
            ref_weights[n - 1 - i] = w;
            ref_weights[i] = w;
        }
        if n % 2 == 1 {
            ref_nodes[n / 2] = 0.0;
        }
    }

    let half = 0.5 * domain.length();
    let mid = 0.5 * (domain.a() + domain.b());
    let nodes = ref_nodes.iter().map(|t| mid + half * t).collect();
    let weights = ref_weights.iter().map(|w| half * w).collect();
    Ok(QuadratureRule {
        domain,
        nodes,
        weights,
    })
}

/// Product rule on `Ω × Ω` with row-major node order: the second rule's
/// index varies fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorRule {
    nodes: Vec<(f64, f64)>,
    weights: Vec<f64>,
}

impl TensorRule {
    pub fn nodes(&self) -> &[(f64, f64)] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, samples: &[Complex64]) -> Result<Complex64, QuadratureError> {
        if samples.len() != self.len() {
            return Err(QuadratureError::LengthMismatch {
                expected: self.len(),
                got: samples.len(),
            });
        }
        let mut re = CompensatedSum::default();
        let mut im = CompensatedSum::default();
        for (w, v) in self.weights.iter().zip(samples) {
            re.add(w * v.re);
            im.add(w * v.im);
        }
        Ok(Complex64::new(re.total(), im.total()))
    }

    pub fn integrate_fn<F: FnMut(f64, f64) -> f64>(&self, mut f: F) -> f64 {
        let mut acc = CompensatedSum::default();
        for (w, &(x, y)) in self.weights.iter().zip(&self.nodes) {
            acc.add(w * f(x, y));
        }
        acc.total()
    }
}

pub fn tensor_rule(first: &QuadratureRule, second: &QuadratureRule) -> TensorRule {
    let mut nodes = Vec::with_capacity(first.len() * second.len());
    let mut weights = Vec::with_capacity(first.len() * second.len());
    for (&x, &wx) in first.nodes.iter().zip(&first.weights) {
        for (&y, &wy) in second.nodes.iter().zip(&second.weights) {
            nodes.push((x, y));
            weights.push(wx * wy);
        }
    }
    TensorRule { nodes, weights }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym() -> Domain {
        Domain::interval(-1.0, 1.0).unwrap()
    }

    #[test]
    fn one_point_rule() {
        let r = gauss_legendre(1, sym()).unwrap();
        assert_eq!(r.nodes(), &[0.0]);
        assert_eq!(r.weights(), &[2.0]);
    }

    #[test]
    fn two_point_rule_matches_hand_solution() {
        let r = gauss_legendre(2, sym()).unwrap();
        let t = 1.0 / 3f64.sqrt();
        assert!((r.nodes()[0] + t).abs() < 1e-15);
        assert!((r.nodes()[1] - t).abs() < 1e-15);
        assert!((r.weights()[0] - 1.0).abs() < 1e-15);
        assert!((r.weights()[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_nodes_rejected() {
        assert_eq!(gauss_legendre(0, sym()), Err(QuadratureError::ZeroNodes));
    }

    #[test]
    fn bad_domains_rejected() {
        assert!(Domain::interval(1.0, 1.0).is_err());
        assert!(Domain::interval(2.0, 1.0).is_err());
        assert!(Domain::interval(f64::NAN, 1.0).is_err());
        assert!(Domain::new(0.0, 1.0, 3).is_err());
        assert!(Domain::new(0.0, 1.0, 0).is_err());
    }

    #[test]
    fn exp_on_unit_interval() {
        let r = gauss_legendre(16, Domain::unit()).unwrap();
        let v = r.integrate_fn(f64::exp);
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn integrate_examples() {
        let r = gauss_legendre(16, Domain::unit()).unwrap();
        let zeros = vec![Complex64::new(0.0, 0.0); 16];
        assert_eq!(r.integrate(&zeros).unwrap(), Complex64::new(0.0, 0.0));
        let ones = vec![Complex64::new(1.0, 0.0); 16];
        assert!((r.integrate(&ones).unwrap().re - 1.0).abs() < 1e-15);

        let r = gauss_legendre(16, Domain::interval(0.0, PI).unwrap()).unwrap();
        let s: Vec<_> = r
            .nodes()
            .iter()
            .map(|x| Complex64::new(x.sin(), 0.0))
            .collect();
        assert!((r.integrate(&s).unwrap().re - 2.0).abs() < 1e-12);
    }

    #[test]
    fn length_mismatch() {
        let r = gauss_legendre(4, Domain::unit()).unwrap();
        assert_eq!(
            r.integrate(&[Complex64::new(1.0, 0.0)]),
            Err(QuadratureError::LengthMismatch {
                expected: 4,
                got: 1
            })
        );
    }

    #[test]
    fn monomial_exactness_up_to_twenty_nodes() {
        let d = Domain::interval(-0.5, 2.0).unwrap();
        for n in 1..=20 {
            let r = gauss_legendre(n, d).unwrap();
            for k in 0..2 * n {
                let exact =
                    (2f64.powi(k as i32 + 1) - (-0.5f64).powi(k as i32 + 1)) / (k as f64 + 1.0);
                let got = r.integrate_fn(|x| x.powi(k as i32));
                assert!(
                    (got - exact).abs() <= 1e-12 * exact.abs().max(1.0),
                    "n={n} k={k} got={got} exact={exact}"
                );
            }
        }
    }

    #[test]
    fn weights_positive_and_sum_to_length() {
        for n in [1, 2, 3, 7, 24, 64, 129, 512] {
            let d = Domain::interval(-3.0, 4.5).unwrap();
            let r = gauss_legendre(n, d).unwrap();
            assert!(r.weights().iter().all(|&w| w > 0.0));
            assert!(r.nodes().windows(2).all(|p| p[0] < p[1]));
            assert!(r.nodes().iter().all(|&x| x > -3.0 && x < 4.5));
            let total: f64 = r.weights().iter().sum();
            assert!((total - 7.5).abs() <= 1e-12 * 7.5, "n={n} total={total}");
        }
    }

    #[test]
    fn tensor_examples() {
        let one = gauss_legendre(1, Domain::unit()).unwrap();
        let t = tensor_rule(&one, &one);
        assert_eq!(t.nodes(), &[(0.5, 0.5)]);
        assert_eq!(t.weights(), &[1.0]);

        let two = gauss_legendre(2, Domain::unit()).unwrap();
        let t = tensor_rule(&two, &two);
        let ones = vec![Complex64::new(1.0, 0.0); 4];
        assert!((t.integrate(&ones).unwrap().re - 1.0).abs() < 1e-15);
        assert_eq!(t.nodes()[1], (two.nodes()[0], two.nodes()[1]));

        let eight = gauss_legendre(8, Domain::unit()).unwrap();
        let t = tensor_rule(&eight, &eight);
        let e1 = 1f64.exp() - 1.0;
        assert!((t.integrate_fn(|x, y| (x + y).exp()) - e1 * e1).abs() < 1e-12);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::default();
        s.add(1.0);
        for _ in 0..10 {
            s.add(1e-17);
        }
        s.add(-1.0);
        assert!((s.total() - 1e-16).abs() < 1e-30);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn integrate_is_linear(
                alpha in -10.0f64..10.0,
                beta in -10.0f64..10.0,
                f in proptest::collection::vec(-5.0f64..5.0, 12),
                g in proptest::collection::vec(-5.0f64..5.0, 12),
            ) {
                let r = gauss_legendre(12, Domain::unit()).unwrap();
                let fc: Vec<_> = f.iter().map(|&v| Complex64::new(v, 0.0)).collect();
                let gc: Vec<_> = g.iter().map(|&v| Complex64::new(v, 0.0)).collect();
                let mix: Vec<_> = fc.iter().zip(&gc).map(|(a, b)| a * alpha + b * beta).collect();
                let lhs = r.integrate(&mix).unwrap();
                let rhs = r.integrate(&fc).unwrap() * alpha + r.integrate(&gc).unwrap() * beta;
                let scale = 1.0 + alpha.abs() * 5.0 + beta.abs() * 5.0;
                prop_assert!((lhs - rhs).norm() <= 1e-14 * scale);
            }
        }
    }
}
