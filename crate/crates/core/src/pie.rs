//! The partial integral equation `f − κT₁f = g` on `L₂(Ω×Ω)`.
//!
//! `T₁` integrates over the first variable only, so for each `y` the
//! equation is an ordinary second-kind Fredholm equation with operator
//! `K_y`. Its determinant `D₁(y; κ)` as a function of `y` decides
//! solvability:
//!
//! * no zero on `Ω`: `κ` is *regular* and the slice-wise resolvent gives the
//!   unique solution `f = g + κBg`;
//! * zeros on a set of positive measure: `κ` is *characteristic* and `1/κ`
//!   is an eigenvalue of `T₁` (of infinite multiplicity);
//! * zeros on a null set only: `κ` is *essential*, and the same formula
//!   gives an `L₂` solution iff `∫ (∫|g(s,y)|²ds) / |D₁(y;κ)|² dy < ∞`.
//!
//! "Positive measure" and "zero" are decided numerically on a sampled
//! profile, with explicit tolerances.

use crate::expr::{Expression, Var};
use crate::fredholm::{
    assemble_slice, determinant_direct, resolvent_solve_with_tol, slice_eigenvalues, FredholmError,
    DEFAULT_DEGENERACY_TOL,
};
use crate::kernel::{adjoint_kernel, Kernel, KernelError, RightHandSide};
use crate::quadrature::{Domain, QuadratureRule};
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::fmt;
use thiserror::Error;

/// Relative size of `|D₁|` below which a node counts as a zero.
pub const DEFAULT_ZERO_TOL: f64 = 1e-8;
/// Minimum relative length of a zero set treated as positive measure.
pub const DEFAULT_MEASURE_TOL: f64 = 0.02;
/// Refinement levels used by [`solve`] for its classification profile.
pub const DEFAULT_Y_DEPTH: usize = 12;
/// Uniform intervals of the depth-0 profile grid.
pub const BASE_INTERVALS: usize = 64;
/// Finest bracket (relative to `b − a`) that counts as a resolved zero:
/// four bisections below the base grid.
const RESOLVED_BRACKET: f64 = 1.0 / (BASE_INTERVALS as f64 * 16.0);
/// Leading eigenvalues kept per slice by [`detect_eigenvalues`].
const TRACKED_EIGENVALUES: usize = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PieError {
    #[error(transparent)]
    Slice(#[from] FredholmError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(
        "profile too coarse to resolve a zero near y = {y} (bracket {width:e}); increase y_depth"
    )]
    Indeterminate { y: f64, width: f64 },
    #[error("kappa = {kappa} is a characteristic number (D1 vanishes on {intervals:?}); no solvability theory applies")]
    Characteristic {
        kappa: Complex64,
        intervals: Vec<(f64, f64)>,
    },
    #[error("condition (II) fails: the formal solution is not square integrable")]
    ConditionIIDivergent {
        class: Box<ParameterClass>,
        report: Box<ConditionIIReport>,
    },
    #[error("slice y = {y} has |D1| = {abs_det:e} below the zero threshold {threshold:e} at a regular kappa")]
    InconsistentSlice {
        y: f64,
        abs_det: f64,
        threshold: f64,
    },
    #[error(
        "eigenvalue {lambda} detected on [{lo}, {hi}] but kappa = 1/lambda classifies as {verdict}"
    )]
    Consistency {
        lambda: Complex64,
        lo: f64,
        hi: f64,
        verdict: Verdict,
    },
    #[error("verdict {original} for (k, kappa) but {adjoint} for (adjoint k, conj kappa)")]
    AdjointMismatch { original: Verdict, adjoint: Verdict },
    #[error("witness {index} has zero norm")]
    InvalidWitness { index: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileOptions {
    pub base_intervals: usize,
    /// Threshold that triggers refinement around shallow minima of `|D₁|`.
    pub zero_tol: f64,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        Self {
            base_intervals: BASE_INTERVALS,
            zero_tol: DEFAULT_ZERO_TOL,
        }
    }
}

/// `D₁(y; κ)` sampled along `y`.
#[derive(Debug, Clone)]
pub struct DeterminantProfile {
    pub kappa: Complex64,
    pub y_nodes: Vec<f64>,
    pub values: Vec<Complex64>,
    pub x_rule: QuadratureRule,
    pub refinement_depth: usize,
    pub domain: Domain,
}

impl DeterminantProfile {
    /// `max(1, max_y |D₁|)`. `D₁(y; 0) = 1`, so the floor keeps the
    /// relative tolerance meaningful when `D₁` vanishes identically.
    pub fn scale(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(1.0, f64::max)
    }

    pub fn min_abs(&self) -> f64 {
        self.values
            .iter()
            .map(|v| v.norm())
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn determinant_profile(
    k: &Kernel,
    kappa: Complex64,
    x_rule: &QuadratureRule,
    y_depth: usize,
) -> Result<DeterminantProfile, PieError> {
    determinant_profile_with(k, kappa, x_rule, y_depth, &ProfileOptions::default())
}

fn slice_det(
    k: &Kernel,
    kappa: Complex64,
    x_rule: &QuadratureRule,
    y: f64,
) -> Result<Complex64, PieError> {
    Ok(determinant_direct(&assemble_slice(k, x_rule, y)?, kappa).value)
}

/// Samples `D₁` on a uniform grid, then bisects for `y_depth` rounds every
/// interval where `Re D₁` changes sign or where a parabola through `|D₁|²`
/// at a local minimum dips below `(10·zero_tol)²`.
pub fn determinant_profile_with(
    k: &Kernel,
    kappa: Complex64,
    x_rule: &QuadratureRule,
    y_depth: usize,
    opts: &ProfileOptions,
) -> Result<DeterminantProfile, PieError> {
    if opts.base_intervals < 2 {
        return Err(PieError::InvalidArgument(
            "profile needs at least two intervals".into(),
        ));
    }
    let domain = *k.domain();
    let (a, b) = (domain.a(), domain.b());
    let m = opts.base_intervals;
    let mut y_nodes: Vec<f64> = (0..=m)
        .map(|i| {
            if i == m {
                b
            } else {
                a + (b - a) * i as f64 / m as f64
            }
        })
        .collect();
    let mut values = y_nodes
        .iter()
        .map(|&y| slice_det(k, kappa, x_rule, y))
        .collect::<Result<Vec<_>, _>>()?;

    for _ in 0..y_depth {
        let flagged = refinement_flags(&y_nodes, &values, opts.zero_tol);
        if flagged.iter().all(|f| !f) {
            break;
        }
        let mut new_nodes = Vec::with_capacity(y_nodes.len() * 2);
        let mut new_values = Vec::with_capacity(y_nodes.len() * 2);
        for j in 0..y_nodes.len() {
            new_nodes.push(y_nodes[j]);
            new_values.push(values[j]);
            if j + 1 < y_nodes.len() && flagged[j] {
                let mid = 0.5 * (y_nodes[j] + y_nodes[j + 1]);
                if mid > y_nodes[j] && mid < y_nodes[j + 1] {
                    new_nodes.push(mid);
                    new_values.push(slice_det(k, kappa, x_rule, mid)?);
                }
            }
        }
        y_nodes = new_nodes;
        values = new_values;
    }

    Ok(DeterminantProfile {
        kappa,
        y_nodes,
        values,
        x_rule: x_rule.clone(),
        refinement_depth: y_depth,
        domain,
    })
}

/// Vertex `(t, value)` of the parabola through three points.
fn parabola_vertex(t: [f64; 3], v: [f64; 3]) -> Option<(f64, f64)> {
    let (h1, h2) = (t[1] - t[0], t[2] - t[1]);
    let d1 = (v[1] - v[0]) / h1;
    let d2 = (v[2] - v[1]) / h2;
    let curvature = (d2 - d1) / (t[2] - t[0]);
    if curvature <= 0.0 {
        return None;
    }
    // p(t) = v1 + slope·(t − t1) + curvature·(t − t1)²
    let slope = d1 + curvature * h1;
    let shift = -slope / (2.0 * curvature);
    let at = t[1] + shift;
    let value = v[1] - slope * slope / (4.0 * curvature);
    Some((at, value))
}

/// For each interior local minimum of `|D₁|`, the vertex of the parabola
/// through `|D₁|²` at it and its two neighbours.
fn shallow_minima(y: &[f64], d: &[Complex64]) -> Vec<(usize, f64, f64)> {
    let mut out = Vec::new();
    for j in 1..y.len().saturating_sub(1) {
        let (l, c, r) = (d[j - 1].norm(), d[j].norm(), d[j + 1].norm());
        if c <= l && c <= r && (c < l || c < r) {
            let sq = [l * l, c * c, r * r];
            if let Some((at, value)) = parabola_vertex([y[j - 1], y[j], y[j + 1]], sq) {
                if at >= y[j - 1] && at <= y[j + 1] {
                    out.push((j, at, value.max(0.0)));
                }
            }
        }
    }
    out
}

fn refinement_flags(y: &[f64], d: &[Complex64], zero_tol: f64) -> Vec<bool> {
    let scale = d.iter().map(|v| v.norm()).fold(1.0, f64::max);
    let thr = zero_tol * scale;
    let is_zero = |j: usize| d[j].norm() <= thr;
    let intervals = y.len() - 1;
    let mut flags = vec![false; intervals];
    for j in 0..intervals {
        if is_zero(j) && is_zero(j + 1) {
            continue;
        }
        if d[j].re * d[j + 1].re < 0.0 {
            flags[j] = true;
        }
    }
    let shallow = (10.0 * thr).powi(2);
    for (j, _, value) in shallow_minima(y, d) {
        if value <= shallow {
            if !(is_zero(j - 1) && is_zero(j)) {
                flags[j - 1] = true;
            }
            if !(is_zero(j) && is_zero(j + 1)) {
                flags[j] = true;
            }
        }
    }
    flags
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Regular,
    Essential,
    Characteristic,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Regular => "regular",
            Verdict::Essential => "essential",
            Verdict::Characteristic => "characteristic",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An isolated zero `y₀` of `D₁(·; κ)` and the estimated order of vanishing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroEstimate {
    pub y0: f64,
    pub order_estimate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParameterClass {
    pub verdict: Verdict,
    /// Essential zeros; empty unless the verdict is essential.
    pub zeros: Vec<ZeroEstimate>,
    /// Zero sets of positive measure; empty unless characteristic.
    pub intervals: Vec<(f64, f64)>,
    pub min_abs_det: f64,
}

/// Least-squares slope of `ln v` against `ln t`.
fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(t, v)| *t > 0.0 && *v > 0.0)
        .map(|(t, v)| (t.ln(), v.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

fn zero_order(profile: &DeterminantProfile, y0: f64, noise: f64) -> f64 {
    let window = profile.domain.length() / 16.0;
    let pts: Vec<(f64, f64)> = profile
        .y_nodes
        .iter()
        .zip(&profile.values)
        .map(|(&y, v)| ((y - y0).abs(), v.norm()))
        .filter(|&(t, v)| t > 0.0 && t <= window && v > noise)
        .collect();
    log_log_slope(&pts).unwrap_or(f64::NAN)
}

/// Sorts `κ` into regular, essential or characteristic from a profile.
///
/// Nodes with `|D₁| ≤ zero_tol·max(1, max|D₁|)` are zero candidates. Runs of
/// consecutive candidates spanning at least `measure_tol·(b − a)` are
/// zero sets of positive measure. Other candidates, sign changes of
/// `Re D₁` whose interpolated `|D₁|` is below the threshold, and
/// parabola-fit minima of `|D₁|²` below its square are isolated zeros.
pub fn classify(
    profile: &DeterminantProfile,
    zero_tol: f64,
    measure_tol: f64,
) -> Result<ParameterClass, PieError> {
    if !(zero_tol > 0.0 && zero_tol < 1.0) {
        return Err(PieError::InvalidArgument(format!(
            "zero_tol must lie in (0, 1), got {zero_tol}"
        )));
    }
    if !(measure_tol > 0.0 && measure_tol < 1.0) {
        return Err(PieError::InvalidArgument(format!(
            "measure_tol must lie in (0, 1), got {measure_tol}"
        )));
    }
    let y = &profile.y_nodes;
    let d = &profile.values;
    let len = profile.domain.length();
    let thr = zero_tol * profile.scale();
    let min_abs_det = profile.min_abs();
    let candidate: Vec<bool> = d.iter().map(|v| v.norm() <= thr).collect();

    // maximal runs of consecutive candidates
    let mut runs = Vec::new();
    let mut j = 0;
    while j < y.len() {
        if candidate[j] {
            let start = j;
            while j + 1 < y.len() && candidate[j + 1] {
                j += 1;
            }
            runs.push((start, j));
        }
        j += 1;
    }
    let intervals: Vec<(f64, f64)> = runs
        .iter()
        .filter(|&&(s, e)| y[e] - y[s] >= measure_tol * len)
        .map(|&(s, e)| (y[s], y[e]))
        .collect();
    if !intervals.is_empty() {
        return Ok(ParameterClass {
            verdict: Verdict::Characteristic,
            zeros: Vec::new(),
            intervals,
            min_abs_det,
        });
    }

    // (location, width of the bracket that resolved it)
    let mut found: Vec<(f64, f64)> = Vec::new();
    for &(s, e) in &runs {
        let best = (s..=e)
            .min_by(|&p, &q| d[p].norm().total_cmp(&d[q].norm()))
            .unwrap_or(s);
        found.push((y[best], 0.0));
    }
    let near_known = |found: &[(f64, f64)], at: f64, lo: f64, hi: f64| {
        found.iter().any(|&(z, _)| z >= lo && z <= hi)
            || found.iter().any(|&(z, _)| (z - at).abs() == 0.0)
    };
    for j in 0..y.len().saturating_sub(1) {
        if candidate[j] || candidate[j + 1] {
            continue;
        }
        if d[j].re * d[j + 1].re < 0.0 {
            let t = d[j].re / (d[j].re - d[j + 1].re);
            let at = y[j] + t * (y[j + 1] - y[j]);
            let value = d[j] + (d[j + 1] - d[j]) * t;
            if value.norm() <= thr && !near_known(&found, at, y[j], y[j + 1]) {
                found.push((at, y[j + 1] - y[j]));
            }
        }
    }
    for (j, at, value) in shallow_minima(y, d) {
        if value <= thr * thr && !near_known(&found, at, y[j - 1], y[j + 1]) {
            found.push((at, y[j + 1] - y[j - 1]));
        }
    }
    found.sort_by(|p, q| p.0.total_cmp(&q.0));

    if let Some(&(at, width)) = found.iter().find(|&&(_, w)| w > RESOLVED_BRACKET * len) {
        return Err(PieError::Indeterminate { y: at, width });
    }

    let noise = 1e3 * f64::EPSILON * profile.scale();
    let zeros: Vec<ZeroEstimate> = found
        .iter()
        .map(|&(y0, _)| ZeroEstimate {
            y0,
            order_estimate: zero_order(profile, y0, noise),
        })
        .collect();
    let verdict = if zeros.is_empty() {
        Verdict::Regular
    } else {
        Verdict::Essential
    };
    Ok(ParameterClass {
        verdict,
        zeros,
        intervals: Vec::new(),
        min_abs_det,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionIIVerdict {
    Finite,
    Divergent,
    Indeterminate,
}

impl ConditionIIVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            ConditionIIVerdict::Finite => "finite",
            ConditionIIVerdict::Divergent => "divergent",
            ConditionIIVerdict::Indeterminate => "indeterminate",
        }
    }
}

impl fmt::Display for ConditionIIVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Local behaviour at one zero: `|D₁| ~ |y − y₀|^m`, `G ~ |y − y₀|^p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroDiagnostic {
    pub y0: f64,
    pub det_order: f64,
    pub numerator_order: f64,
}

impl ZeroDiagnostic {
    /// Exponent of `G/|D₁|²` near `y₀`; integrable iff it exceeds −1.
    pub fn integrand_exponent(&self) -> f64 {
        self.numerator_order - 2.0 * self.det_order
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionIIReport {
    pub verdict: ConditionIIVerdict,
    /// `∫ G/|D₁|²` over `Ω` minus balls of the matching radius around each zero.
    pub integral_estimates: Vec<f64>,
    pub exclusion_radii: Vec<f64>,
    pub zero_diagnostics: Vec<ZeroDiagnostic>,
}

/// Margin around the critical exponent −1 for the order test.
const ORDER_MARGIN: f64 = 0.1;
/// Largest relative change between successive estimates for a finite verdict.
const CAUCHY_TOL: f64 = 0.05;

/// `G(y) = ∫ |g(s, y)|² ds` on the rule.
fn rhs_slice_norm2(g: &RightHandSide, rule: &QuadratureRule, y: f64) -> Result<f64, PieError> {
    let mut acc = 0.0;
    for (&s, &w) in rule.nodes().iter().zip(rule.weights()) {
        let v = g.eval(s, y)?;
        acc += w * v * v;
    }
    Ok(acc)
}

/// Trapezoid integral of the sampled `f` over the part of `[y₀, y_last]`
/// farther than `radius` from every point in `centers`.
fn trapezoid_excluding(y: &[f64], f: &[f64], centers: &[f64], radius: f64) -> f64 {
    let allowed = |t: f64| centers.iter().all(|&c| (t - c).abs() >= radius);
    let mut total = 0.0;
    for j in 0..y.len() - 1 {
        let (lo, hi) = (y[j], y[j + 1]);
        let lerp = |t: f64| f[j] + (f[j + 1] - f[j]) * (t - lo) / (hi - lo);
        let mut cuts = vec![lo, hi];
        for &c in centers {
            for edge in [c - radius, c + radius] {
                if edge > lo && edge < hi {
                    cuts.push(edge);
                }
            }
        }
        cuts.sort_by(f64::total_cmp);
        for w in cuts.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            if w[1] > w[0] && allowed(mid) {
                total += 0.5 * (lerp(w[0]) + lerp(w[1])) * (w[1] - w[0]);
            }
        }
    }
    total
}

/// Tests `∫ (∫|g(s,y)|²ds) / |D₁(y;κ)|² dy < ∞` at an essential `κ`.
///
/// Two tests are combined. The order test compares the local exponent
/// `p − 2m` of the integrand at each zero with −1, where `m` comes from the
/// classification and `p` from a log-log fit of `G` on `[y₀+δ, y₀+8δ]`,
/// `δ = 10⁻³(b − a)`. The Cauchy test watches the integral over `Ω`
/// minus balls of radius `ε, ε/2, ε/4` around the zeros, `ε = 10⁻²(b − a)`.
pub fn check_condition_ii(
    g: &RightHandSide,
    profile: &DeterminantProfile,
    class: &ParameterClass,
) -> Result<ConditionIIReport, PieError> {
    if class.verdict == Verdict::Characteristic {
        return Err(PieError::InvalidArgument(
            "condition (II) applies only to essential parameters".into(),
        ));
    }
    let rule = &profile.x_rule;
    let (a, b) = (profile.domain.a(), profile.domain.b());
    let len = b - a;
    let y = &profile.y_nodes;
    let integrand = y
        .iter()
        .zip(&profile.values)
        .map(|(&t, d)| Ok(rhs_slice_norm2(g, rule, t)? / d.norm_sqr()))
        .collect::<Result<Vec<f64>, PieError>>()?;

    let centers: Vec<f64> = class.zeros.iter().map(|z| z.y0).collect();
    if centers.is_empty() {
        let whole = trapezoid_excluding(y, &integrand, &[], 0.0);
        let verdict = if whole.is_finite() {
            ConditionIIVerdict::Finite
        } else {
            ConditionIIVerdict::Divergent
        };
        return Ok(ConditionIIReport {
            verdict,
            integral_estimates: vec![whole],
            exclusion_radii: vec![0.0],
            zero_diagnostics: Vec::new(),
        });
    }

    let delta = 1e-3 * len;
    let mut diagnostics = Vec::with_capacity(centers.len());
    let mut boundary = false;
    for z in &class.zeros {
        if z.y0 - a < delta || b - z.y0 < delta {
            boundary = true;
        }
        let side = if z.y0 + 8.0 * delta <= b { 1.0 } else { -1.0 };
        let mut pts = Vec::with_capacity(8);
        for i in 0..8 {
            let t = delta * 8f64.powf(i as f64 / 7.0);
            let at = (z.y0 + side * t).clamp(a, b);
            pts.push((t, rhs_slice_norm2(g, rule, at)?));
        }
        let numerator_order = if pts.iter().all(|&(_, v)| v == 0.0) {
            f64::INFINITY
        } else {
            log_log_slope(&pts).unwrap_or(f64::NAN)
        };
        diagnostics.push(ZeroDiagnostic {
            y0: z.y0,
            det_order: z.order_estimate,
            numerator_order,
        });
    }

    let eps = 1e-2 * len;
    let radii = vec![eps, eps / 2.0, eps / 4.0];
    let estimates: Vec<f64> = radii
        .iter()
        .map(|&r| trapezoid_excluding(y, &integrand, &centers, r))
        .collect();

    let orders_ok = diagnostics
        .iter()
        .all(|d| d.integrand_exponent() > -1.0 + ORDER_MARGIN);
    let orders_bad = diagnostics
        .iter()
        .any(|d| d.integrand_exponent() <= -1.0 - ORDER_MARGIN);
    let rel = |p: f64, q: f64| {
        if q == 0.0 {
            (q - p).abs()
        } else {
            (q - p).abs() / q.abs()
        }
    };
    let cauchy = estimates.windows(2).all(|w| rel(w[0], w[1]) < CAUCHY_TOL);
    let growing = estimates.windows(2).all(|w| w[1] >= 2.0 * w[0]);

    let verdict = if boundary {
        ConditionIIVerdict::Indeterminate
    } else if orders_ok && cauchy {
        ConditionIIVerdict::Finite
    } else if growing || orders_bad {
        ConditionIIVerdict::Divergent
    } else {
        ConditionIIVerdict::Indeterminate
    };
    Ok(ConditionIIReport {
        verdict,
        integral_estimates: estimates,
        exclusion_radii: radii,
        zero_diagnostics: diagnostics,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub y_depth: usize,
    pub zero_tol: f64,
    pub measure_tol: f64,
    pub degeneracy_tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            y_depth: DEFAULT_Y_DEPTH,
            zero_tol: DEFAULT_ZERO_TOL,
            measure_tol: DEFAULT_MEASURE_TOL,
            degeneracy_tol: DEFAULT_DEGENERACY_TOL,
        }
    }
}

/// Grid solution of the partial integral equation.
#[derive(Debug, Clone)]
pub struct PieSolution {
    /// `f_values[(i, j)] ≈ f(xᵢ, yⱼ)`; excluded slices hold NaN.
    pub f_values: DMatrix<Complex64>,
    pub x_nodes: Vec<f64>,
    pub y_nodes: Vec<f64>,
    /// Largest slice residual `‖(I − κAW)u − g‖_∞`.
    pub residual_max: f64,
    pub class_used: ParameterClass,
    pub condition_ii: Option<ConditionIIReport>,
    /// y-nodes skipped because `|D₁|` fell inside the degeneracy band.
    pub excluded_slices: Vec<f64>,
}

pub fn solve(
    k: &Kernel,
    g: &RightHandSide,
    kappa: Complex64,
    x_rule: &QuadratureRule,
    y_rule: &QuadratureRule,
) -> Result<PieSolution, PieError> {
    solve_with(k, g, kappa, x_rule, y_rule, &SolveOptions::default())
}

/// Classifies `κ`, then solves slice by slice with `f = g + κBg`.
///
/// Characteristic `κ` and essential `κ` with a divergent condition (II)
/// are errors. At essential `κ` the slices whose determinant falls inside
/// the degeneracy band are left out and listed.
pub fn solve_with(
    k: &Kernel,
    g: &RightHandSide,
    kappa: Complex64,
    x_rule: &QuadratureRule,
    y_rule: &QuadratureRule,
    opts: &SolveOptions,
) -> Result<PieSolution, PieError> {
    let profile_opts = ProfileOptions {
        zero_tol: opts.zero_tol,
        ..ProfileOptions::default()
    };
    let profile = determinant_profile_with(k, kappa, x_rule, opts.y_depth, &profile_opts)?;
    let class = classify(&profile, opts.zero_tol, opts.measure_tol)?;
    let condition_ii = match class.verdict {
        Verdict::Characteristic => {
            return Err(PieError::Characteristic {
                kappa,
                intervals: class.intervals,
            })
        }
        Verdict::Essential => {
            let report = check_condition_ii(g, &profile, &class)?;
            if report.verdict == ConditionIIVerdict::Divergent {
                return Err(PieError::ConditionIIDivergent {
                    class: Box::new(class),
                    report: Box::new(report),
                });
            }
            Some(report)
        }
        Verdict::Regular => None,
    };
    let threshold = opts.zero_tol * profile.scale();

    let n = x_rule.len();
    let mut f_values = DMatrix::from_element(n, y_rule.len(), Complex64::new(f64::NAN, f64::NAN));
    let mut residual_max: f64 = 0.0;
    let mut excluded = Vec::new();
    for (j, &y) in y_rule.nodes().iter().enumerate() {
        let slice = assemble_slice(k, x_rule, y)?;
        let rhs = x_rule
            .nodes()
            .iter()
            .map(|&x| Ok(Complex64::new(g.eval(x, y)?, 0.0)))
            .collect::<Result<Vec<_>, PieError>>()?;
        match resolvent_solve_with_tol(&slice, kappa, &rhs, opts.degeneracy_tol) {
            Ok(sol) => {
                if class.verdict == Verdict::Regular && sol.determinant.norm() <= threshold {
                    return Err(PieError::InconsistentSlice {
                        y,
                        abs_det: sol.determinant.norm(),
                        threshold,
                    });
                }
                residual_max = residual_max.max(sol.residual_norm);
                for (i, u) in sol.solution.into_iter().enumerate() {
                    f_values[(i, j)] = u;
                }
            }
            Err(FredholmError::NearSingular { abs_det, .. }) => {
                if class.verdict == Verdict::Regular {
                    return Err(PieError::InconsistentSlice {
                        y,
                        abs_det,
                        threshold,
                    });
                }
                excluded.push(y);
            }
            Err(e) => return Err(e.into()),
        }
    }

    Ok(PieSolution {
        f_values,
        x_nodes: x_rule.nodes().to_vec(),
        y_nodes: y_rule.nodes().to_vec(),
        residual_max,
        class_used: class,
        condition_ii,
        excluded_slices: excluded,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectedEigenvalue {
    pub lambda: Complex64,
    pub support: (f64, f64),
}

#[derive(Debug, Clone)]
pub struct EigenReport {
    pub y_nodes: Vec<f64>,
    /// `curves[j][c]`: value of tracked curve `c` at `y_nodes[j]`.
    pub curves: Vec<Vec<Complex64>>,
    pub detected: Vec<DetectedEigenvalue>,
}

/// Finds eigenvalues of `T₁`: values `λ ≠ 0` that some slice eigenvalue
/// curve holds (within `eig_tol`) on a `y`-interval of relative length at
/// least `measure_tol`. Every detection is checked by classifying
/// `κ = 1/λ`, which must come out characteristic.
///
/// The `y` grid is uniform with `64·(y_depth + 1)` intervals; curves are
/// continued between neighbouring nodes by nearest-neighbour matching.
pub fn detect_eigenvalues(
    k: &Kernel,
    x_rule: &QuadratureRule,
    y_depth: usize,
    eig_tol: f64,
    measure_tol: f64,
) -> Result<EigenReport, PieError> {
    let valid = eig_tol > 0.0 && measure_tol > 0.0 && measure_tol < 1.0;
    if !valid {
        return Err(PieError::InvalidArgument(format!(
            "tolerances must be positive (eig_tol = {eig_tol}, measure_tol = {measure_tol})"
        )));
    }
    let domain = *k.domain();
    let (a, b) = (domain.a(), domain.b());
    let m = BASE_INTERVALS * (y_depth + 1);
    let y_nodes: Vec<f64> = (0..=m)
        .map(|i| {
            if i == m {
                b
            } else {
                a + (b - a) * i as f64 / m as f64
            }
        })
        .collect();

    let mut per_node = Vec::with_capacity(y_nodes.len());
    for &y in &y_nodes {
        let mut eig = slice_eigenvalues(&assemble_slice(k, x_rule, y)?)?;
        eig.truncate(TRACKED_EIGENVALUES);
        per_node.push(eig);
    }

    // nearest-neighbour continuation
    let mut curves: Vec<Vec<Complex64>> = Vec::with_capacity(per_node.len());
    curves.push(per_node[0].clone());
    for next in per_node.iter().skip(1) {
        let prev = curves.last().expect("first node pushed");
        let mut used = vec![false; next.len()];
        let mut row = Vec::with_capacity(prev.len());
        for p in prev {
            let pick = (0..next.len())
                .filter(|&i| !used[i])
                .min_by(|&i, &j| (next[i] - p).norm().total_cmp(&(next[j] - p).norm()));
            match pick {
                Some(i) => {
                    used[i] = true;
                    row.push(next[i]);
                }
                None => row.push(Complex64::new(0.0, 0.0)),
            }
        }
        curves.push(row);
    }

    let largest = curves
        .iter()
        .flatten()
        .map(|v| v.norm())
        .fold(0.0, f64::max);
    let floor = eig_tol.max(1e-9 * largest);
    let min_len = measure_tol * domain.length();
    let tracked = curves[0].len();
    let mut detected: Vec<DetectedEigenvalue> = Vec::new();
    for c in 0..tracked {
        let curve: Vec<Complex64> = curves.iter().map(|row| row[c]).collect();
        let mut start = 0;
        while start < y_nodes.len() {
            let anchor = curve[start];
            let mut end = start;
            while end + 1 < y_nodes.len() && (curve[end + 1] - anchor).norm() <= eig_tol {
                end += 1;
            }
            if anchor.norm() > floor && y_nodes[end] - y_nodes[start] >= min_len {
                let count = (end - start + 1) as f64;
                let lambda = curve[start..=end].iter().sum::<Complex64>() / count;
                let support = (y_nodes[start], y_nodes[end]);
                let duplicate = detected.iter().any(|d| {
                    (d.lambda - lambda).norm() <= eig_tol
                        && d.support.0 <= support.1
                        && support.0 <= d.support.1
                });
                if !duplicate {
                    detected.push(DetectedEigenvalue { lambda, support });
                }
            }
            start = end + 1;
        }
    }

    for det in &detected {
        let kappa = Complex64::new(1.0, 0.0) / det.lambda;
        let zero_tol = (10.0 * eig_tol / det.lambda.norm()).clamp(DEFAULT_ZERO_TOL, 0.5);
        let opts = ProfileOptions {
            zero_tol,
            ..ProfileOptions::default()
        };
        let profile = determinant_profile_with(k, kappa, x_rule, y_depth, &opts)?;
        let verdict = match classify(&profile, zero_tol, measure_tol) {
            Ok(class) => class.verdict,
            Err(PieError::Indeterminate { .. }) => Verdict::Essential,
            Err(e) => return Err(e),
        };
        if verdict != Verdict::Characteristic {
            return Err(PieError::Consistency {
                lambda: det.lambda,
                lo: det.support.0,
                hi: det.support.1,
                verdict,
            });
        }
    }

    Ok(EigenReport {
        y_nodes,
        curves,
        detected,
    })
}

/// For `f(x, y) = b(y)·φ(x)` with each `b` in `b_functions`, returns
/// `‖T₁f − λf‖ / ‖f‖` in the discrete `L₂(Ω×Ω)` norm. When `(λ, φ)` is an
/// eigenpair of the slices, every such `f` is an eigenfunction of `T₁`.
pub fn multiplicity_witnesses(
    k: &Kernel,
    lambda: Complex64,
    phi: &[Complex64],
    b_functions: &[Expression],
    x_rule: &QuadratureRule,
    y_rule: &QuadratureRule,
) -> Result<Vec<f64>, PieError> {
    if phi.len() != x_rule.len() {
        return Err(PieError::InvalidArgument(format!(
            "phi has {} samples, rule has {} nodes",
            phi.len(),
            x_rule.len()
        )));
    }
    let x = x_rule.nodes();
    let wx = x_rule.weights();
    let mut out = Vec::with_capacity(b_functions.len());
    for (index, b) in b_functions.iter().enumerate() {
        if b.free_variables().iter().any(|&v| v != Var::Y) {
            return Err(PieError::InvalidArgument(format!(
                "witness `{}` must depend on y only",
                b.source()
            )));
        }
        let mut num = 0.0;
        let mut den = 0.0;
        for (&y, &wy) in y_rule.nodes().iter().zip(y_rule.weights()) {
            let by = b
                .evaluate(0.0, 0.0, y)
                .map_err(|e| PieError::InvalidArgument(format!("witness `{}`: {e}", b.source())))?;
            for i in 0..x.len() {
                let f_i = phi[i] * by;
                let mut t1f = Complex64::new(0.0, 0.0);
                for l in 0..x.len() {
                    t1f += phi[l] * by * (wx[l] * k.eval(x[i], x[l], y)?);
                }
                num += wy * wx[i] * (t1f - lambda * f_i).norm_sqr();
                den += wy * wx[i] * f_i.norm_sqr();
            }
        }
        if den == 0.0 {
            return Err(PieError::InvalidWitness { index });
        }
        out.push((num / den).sqrt());
    }
    Ok(out)
}

/// Checks `conj D₁(y; κ) = D̃₁(y; conj κ)`, where `D̃₁` belongs to the
/// adjoint kernel, on the nodes of the profile of `k` at `κ`. Returns the
/// largest discrepancy; the two verdicts must also agree.
pub fn adjoint_class_check(
    k: &Kernel,
    kappa: Complex64,
    x_rule: &QuadratureRule,
    y_depth: usize,
    zero_tol: f64,
    measure_tol: f64,
) -> Result<f64, PieError> {
    let adj = adjoint_kernel(k);
    let opts = ProfileOptions {
        zero_tol,
        ..ProfileOptions::default()
    };
    let original = determinant_profile_with(k, kappa, x_rule, y_depth, &opts)?;
    let mut discrepancy: f64 = 0.0;
    for (&y, d) in original.y_nodes.iter().zip(&original.values) {
        let d_adj = slice_det(&adj, kappa.conj(), x_rule, y)?;
        discrepancy = discrepancy.max((d.conj() - d_adj).norm());
    }
    let adjoint_profile = determinant_profile_with(&adj, kappa.conj(), x_rule, y_depth, &opts)?;
    let v1 = classify(&original, zero_tol, measure_tol)?.verdict;
    let v2 = classify(&adjoint_profile, zero_tol, measure_tol)?.verdict;
    if v1 != v2 {
        return Err(PieError::AdjointMismatch {
            original: v1,
            adjoint: v2,
        });
    }
    Ok(discrepancy)
}
