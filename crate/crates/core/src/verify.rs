//! Self-check suite on the built-in kernels and closed-form cases.
//!
//! Each criterion runs a fixed computation with known answer and reports
//! pass or fail with a one-line detail. `pie-solve verify` and the
//! `acceptance` test target both call [`run_all`].

use crate::expr::{parse, BinOp, Expression, Func, Node, Var};
use crate::fredholm::{assemble_slice, determinant_direct, determinant_series, slice_eigenvalues};
use crate::kernel::{builtin_kernel, Builtin, Factor, Kernel, RightHandSide};
use crate::oracle::{assemble_full, neumann_solve, sample_rhs, solve_full};
use crate::pie::{
    adjoint_class_check, classify, detect_eigenvalues, determinant_profile_with,
    multiplicity_witnesses, solve_with, ConditionIIVerdict, PieError, ProfileOptions, SolveOptions,
    Verdict, DEFAULT_Y_DEPTH,
};
use crate::quadrature::{gauss_legendre, Domain, QuadratureRule};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;
use std::time::{Duration, Instant};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifySettings {
    pub zero_tol: f64,
    pub measure_tol: f64,
    pub seed: u64,
}

impl Default for VerifySettings {
    fn default() -> Self {
        Self {
            zero_tol: crate::pie::DEFAULT_ZERO_TOL,
            measure_tol: crate::pie::DEFAULT_MEASURE_TOL,
            seed: 20_240_611,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CriterionOutcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:>2} {:<32} {} ({:.2}s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.elapsed.as_secs_f64()
        )
    }
}

type Check = fn(&VerifySettings) -> Result<String, String>;

pub const CRITERIA: [(&str, Check); 12] = [
    ("determinant closed form", determinant_closed_form),
    ("singular set of example 1", singular_set),
    ("explicit solution", explicit_solution),
    ("condition (II) sharpness", condition_ii_sharpness),
    ("oracle equivalence", oracle_equivalence),
    ("determinant cross-method", determinant_cross_method),
    ("adjoint conjugation", adjoint_conjugation),
    ("eigenvalue duality", eigenvalue_duality),
    ("multiplicity witnesses", multiplicity),
    ("homogeneous uniqueness", homogeneous_uniqueness),
    ("refinement stability", refinement_stability),
    ("expression parser", parser_round_trip),
];

/// Runs criterion `id` (1-based).
pub fn run_criterion(id: usize, settings: &VerifySettings) -> Option<CriterionOutcome> {
    let (name, check) = *CRITERIA.get(id.checked_sub(1)?)?;
    let start = Instant::now();
    let result = check(settings);
    let elapsed = start.elapsed();
    let (passed, detail) = match result {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    Some(CriterionOutcome {
        id,
        name,
        passed,
        detail,
        elapsed,
    })
}

pub fn run_all(settings: &VerifySettings) -> Vec<CriterionOutcome> {
    (1..=CRITERIA.len())
        .filter_map(|id| run_criterion(id, settings))
        .collect()
}

fn c(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

fn unit_rule(n: usize) -> QuadratureRule {
    gauss_legendre(n, Domain::unit()).expect("positive node count")
}

fn err<E: fmt::Display>(e: E) -> String {
    e.to_string()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn sqrt_rhs() -> RightHandSide {
    RightHandSide::from_expression(parse("exp(x)*sqrt(y)").expect("valid"), Domain::unit())
        .expect("x and y only")
}

fn classify_kernel(
    k: &Kernel,
    kappa: Complex64,
    n: usize,
    y_depth: usize,
    s: &VerifySettings,
) -> Result<crate::pie::ParameterClass, PieError> {
    let opts = ProfileOptions {
        zero_tol: s.zero_tol,
        ..ProfileOptions::default()
    };
    let profile = determinant_profile_with(k, kappa, &unit_rule(n), y_depth, &opts)?;
    classify(&profile, s.zero_tol, s.measure_tol)
}

fn solve_options(s: &VerifySettings) -> SolveOptions {
    SolveOptions {
        zero_tol: s.zero_tol,
        measure_tol: s.measure_tol,
        ..SolveOptions::default()
    }
}

fn determinant_closed_form(_: &VerifySettings) -> Result<String, String> {
    let k = builtin_kernel(Builtin::Example1);
    let rule = unit_rule(24);
    let mut worst: f64 = 0.0;
    for i in 0..=64 {
        let y = i as f64 / 64.0;
        let d = determinant_direct(&assemble_slice(&k, &rule, y).map_err(err)?, c(0.5)).value;
        worst = worst.max((d - c(1.0 - 0.5 * y.exp())).norm());
    }
    ensure(worst <= 1e-9, || format!("max error {worst:e} > 1e-9"))?;
    Ok(format!("max |D1 - (1 - 0.5 e^y)| = {worst:.1e}"))
}

fn singular_set_at(n: usize, y_depth: usize, s: &VerifySettings) -> Result<String, String> {
    let k = builtin_kernel(Builtin::Example1);
    for kappa in [0.2, 1.5, 2.0] {
        let class = classify_kernel(&k, c(kappa), n, y_depth, s).map_err(err)?;
        ensure(class.verdict == Verdict::Regular, || {
            format!("kappa = {kappa}: expected regular, got {}", class.verdict)
        })?;
    }
    let mut located = f64::NAN;
    for kappa in [0.4, 0.5, 0.9] {
        let class = classify_kernel(&k, c(kappa), n, y_depth, s).map_err(err)?;
        ensure(class.verdict == Verdict::Essential, || {
            format!("kappa = {kappa}: expected essential, got {}", class.verdict)
        })?;
        if kappa == 0.5 {
            ensure(class.zeros.len() == 1, || {
                format!("kappa = 0.5: {} zeros", class.zeros.len())
            })?;
            located = class.zeros[0].y0;
        }
    }
    let gap = (located - 2f64.ln()).abs();
    ensure(gap <= 1e-6, || {
        format!("zero at {located}, |y0 - ln 2| = {gap:e}")
    })?;
    Ok(format!("verdicts match, |y0 - ln 2| = {gap:.1e}"))
}

fn singular_set(s: &VerifySettings) -> Result<String, String> {
    singular_set_at(24, DEFAULT_Y_DEPTH, s)
}

fn explicit_solution(s: &VerifySettings) -> Result<String, String> {
    let k = builtin_kernel(Builtin::Example2);
    let rule = unit_rule(24);
    let sol = solve_with(&k, &sqrt_rhs(), c(0.5), &rule, &rule, &solve_options(s)).map_err(err)?;
    let mut worst: f64 = 0.0;
    for (i, &x) in rule.nodes().iter().enumerate() {
        for (j, &y) in rule.nodes().iter().enumerate() {
            let want = x.exp() * y.sqrt() / (1.0 - 0.5 * y);
            worst = worst.max((sol.f_values[(i, j)] - c(want)).norm());
        }
    }
    ensure(worst <= 1e-8, || format!("max error {worst:e} > 1e-8"))?;
    ensure(sol.residual_max <= 1e-9, || {
        format!("residual {:e} > 1e-9", sol.residual_max)
    })?;
    Ok(format!(
        "max error {worst:.1e}, residual {:.1e}",
        sol.residual_max
    ))
}

fn condition_ii_sharpness(s: &VerifySettings) -> Result<String, String> {
    let k = builtin_kernel(Builtin::Example2);
    let rule = unit_rule(24);
    let opts = solve_options(s);
    let zero = match solve_with(&k, &sqrt_rhs(), c(2.0), &rule, &rule, &opts) {
        Err(PieError::ConditionIIDivergent { class, report }) => {
            ensure(
                class.verdict == Verdict::Essential && class.zeros.len() == 1,
                || format!("unexpected class {:?}", class),
            )?;
            ensure(report.verdict == ConditionIIVerdict::Divergent, || {
                format!("condition (II) {}", report.verdict)
            })?;
            class.zeros[0].y0
        }
        Err(e) => return Err(format!("original rhs: {e}")),
        Ok(sol) => {
            return Err(format!(
                "original rhs solved with condition (II) {:?}",
                sol.condition_ii.map(|r| r.verdict)
            ))
        }
    };
    ensure((zero - 0.5).abs() <= 1e-6, || format!("zero at {zero}"))?;

    let g = RightHandSide::from_expression(
        parse("(1-2*y)*exp(x)*sqrt(y)").map_err(err)?,
        Domain::unit(),
    )
    .map_err(err)?;
    let sol = solve_with(&k, &g, c(2.0), &rule, &rule, &opts).map_err(err)?;
    let verdict = sol.condition_ii.as_ref().map(|r| r.verdict);
    ensure(verdict == Some(ConditionIIVerdict::Finite), || {
        format!("modified rhs: condition (II) {verdict:?}")
    })?;
    let mut worst: f64 = 0.0;
    for (i, &x) in rule.nodes().iter().enumerate() {
        for (j, &y) in rule.nodes().iter().enumerate() {
            if (1.0 - 2.0 * y).abs() > 0.05 {
                worst = worst.max((sol.f_values[(i, j)] - c(x.exp() * y.sqrt())).norm());
            }
        }
    }
    ensure(worst <= 1e-7, || {
        format!("modified rhs error {worst:e} > 1e-7")
    })?;
    Ok(format!(
        "divergent at y0 = {zero:.9}; cancelled rhs finite, error {worst:.1e}"
    ))
}

/// Draws `c₁·φ₁(t) + c₂·φ₂(t) + c₃·φ₃(t)` with `|cᵢ| ≤ 0.3` and basis
/// functions bounded by 1 on `[0, 1]`.
fn random_factor(rng: &mut ChaCha8Rng, var: &str) -> String {
    const BASIS: [&str; 5] = ["1", "t", "t^2", "cos(t)", "exp(-t)"];
    (0..3)
        .map(|_| {
            let coeff: f64 = rng.gen_range(-0.3..0.3);
            let basis = BASIS[rng.gen_range(0..BASIS.len())].replace('t', var);
            format!("({coeff})*{basis}")
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

/// A separable kernel `p(x)q(s)r(y)` built from random expressions. Its
/// slice operators have norm below 0.73, so `κ = 0.25` is regular and
/// inside the Neumann disc.
pub fn random_separable_kernel(rng: &mut ChaCha8Rng) -> Result<Kernel, String> {
    let factor = |text: String| -> Result<Factor, String> {
        Factor::from_expression(parse(&text).map_err(err)?).map_err(err)
    };
    let p = factor(random_factor(rng, "x"))?;
    let q = factor(random_factor(rng, "s"))?;
    let r = factor(random_factor(rng, "y"))?;
    Ok(Kernel::separable(p, q, r, Domain::unit()))
}

fn max_gap(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(p, q)| (p - q).norm())
        .fold(0.0, f64::max)
}

fn oracle_equivalence(s: &VerifySettings) -> Result<String, String> {
    let rule = unit_rule(12);
    let opts = solve_options(s);
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let mut cases: Vec<(String, Kernel, RightHandSide, f64)> = vec![(
        "example2".into(),
        builtin_kernel(Builtin::Example2),
        sqrt_rhs(),
        0.5,
    )];
    for i in 0..5 {
        let k = random_separable_kernel(&mut rng)?;
        let g = RightHandSide::from_expression(
            parse("exp(x)*sqrt(y) + cos(3*x*y)").map_err(err)?,
            Domain::unit(),
        )
        .map_err(err)?;
        cases.push((format!("random #{}", i + 1), k, g, 0.25));
    }
    for b in [Builtin::Example1, Builtin::Example2] {
        cases.push((
            format!("{b:?} at 0.25").to_lowercase(),
            builtin_kernel(b),
            sqrt_rhs(),
            0.25,
        ));
    }

    let (mut worst_direct, mut worst_neumann): (f64, f64) = (0.0, 0.0);
    let mut neumann_runs = 0;
    for (label, k, g, kappa) in &cases {
        let kappa = c(*kappa);
        let sliced =
            solve_with(k, g, kappa, &rule, &rule, &opts).map_err(|e| format!("{label}: {e}"))?;
        let op = assemble_full(k, &rule, &rule).map_err(err)?;
        let dense = solve_full(&op, kappa, &sample_rhs(g, &rule, &rule).map_err(err)?)
            .map_err(|e| format!("{label}: {e}"))?;
        let gap = max_gap(&sliced.f_values, &dense);
        ensure(gap <= 1e-12, || {
            format!("{label}: slice vs dense {gap:e} > 1e-12")
        })?;
        worst_direct = worst_direct.max(gap);
        match neumann_solve(k, g, kappa, &rule, &rule, 2000, 1e-10) {
            Ok(series) => {
                let gap = max_gap(&series, &dense);
                ensure(gap <= 1e-8, || {
                    format!("{label}: Neumann vs dense {gap:e} > 1e-8")
                })?;
                worst_neumann = worst_neumann.max(gap);
                neumann_runs += 1;
            }
            Err(crate::oracle::OracleError::SpectralRadius { .. }) => {}
            Err(e) => return Err(format!("{label}: {e}")),
        }
    }
    Ok(format!(
        "{} cases, slice vs dense {worst_direct:.1e}, Neumann ({neumann_runs} cases) {worst_neumann:.1e}",
        cases.len()
    ))
}

fn determinant_cross_method(s: &VerifySettings) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed ^ 0x5eed);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let coeffs: Vec<f64> = (0..9).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let tilt: f64 = rng.gen_range(-1.0..1.0);
        let k = Kernel::from_fn("random smooth", Domain::unit(), move |x, s, y| {
            let bx = [1.0, x, (3.0 * x).cos()];
            let bs = [1.0, s * s, (2.0 * s).sin()];
            let mut acc = 0.0;
            for a in 0..3 {
                for b in 0..3 {
                    acc += coeffs[3 * a + b] * bx[a] * bs[b];
                }
            }
            acc * (1.0 + tilt * y) + 0.1 * (x * s * y).exp()
        });
        let n = rng.gen_range(4..=32);
        let y = rng.gen_range(0.0..1.0);
        let slice = assemble_slice(&k, &unit_rule(n), y).map_err(err)?;
        let rho = slice_eigenvalues(&slice)
            .map_err(err)?
            .first()
            .map_or(0.0, |v| v.norm());
        let phase: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let scale: f64 = rng.gen_range(0.1..0.5);
        let kappa = Complex64::from_polar(if rho > 0.0 { scale / rho } else { 1.0 }, phase);
        let direct = determinant_direct(&slice, kappa).value;
        let series = determinant_series(&slice, kappa, 400).map_err(err)?.value;
        worst = worst.max((direct - series).norm());
    }
    ensure(worst <= 1e-8, || format!("max gap {worst:e} > 1e-8"))?;
    Ok(format!("20 slices, max |direct - series| = {worst:.1e}"))
}

fn adjoint_conjugation(s: &VerifySettings) -> Result<String, String> {
    let rule = unit_rule(24);
    let kappa = Complex64::new(0.3, 0.4);
    let mut worst: f64 = 0.0;
    for b in [Builtin::Example1, Builtin::Example2] {
        let gap = adjoint_class_check(
            &builtin_kernel(b),
            kappa,
            &rule,
            DEFAULT_Y_DEPTH,
            s.zero_tol,
            s.measure_tol,
        )
        .map_err(err)?;
        worst = worst.max(gap);
    }
    ensure(worst <= 1e-12, || format!("discrepancy {worst:e} > 1e-12"))?;
    Ok(format!("max discrepancy {worst:.1e}, verdicts agree"))
}

fn constant_kernel() -> Kernel {
    Kernel::from_expression(parse("1").expect("valid"), Domain::unit())
}

fn eigenvalue_duality_at(n: usize, y_depth: usize, s: &VerifySettings) -> Result<String, String> {
    let rule = unit_rule(n);
    let one = constant_kernel();
    let rep = detect_eigenvalues(&one, &rule, y_depth, 1e-8, s.measure_tol).map_err(err)?;
    let hit = rep
        .detected
        .iter()
        .find(|d| (d.lambda - c(1.0)).norm() <= 1e-8)
        .ok_or_else(|| {
            format!(
                "lambda = 1 not detected ({} detections)",
                rep.detected.len()
            )
        })?;
    let support = hit.support.1 - hit.support.0;
    ensure(support >= 0.98, || format!("support length {support}"))?;

    let class = classify_kernel(&one, c(1.0), n, y_depth, s).map_err(err)?;
    ensure(class.verdict == Verdict::Characteristic, || {
        format!("kappa = 1 classified {}", class.verdict)
    })?;
    let covered: f64 = class.intervals.iter().map(|(lo, hi)| hi - lo).sum();
    ensure(covered >= 0.98, || {
        format!("characteristic intervals cover {covered}")
    })?;

    let rep = detect_eigenvalues(
        &builtin_kernel(Builtin::Example2),
        &rule,
        y_depth,
        1e-8,
        s.measure_tol,
    )
    .map_err(err)?;
    ensure(rep.detected.is_empty(), || {
        format!("example2: spurious detections {:?}", rep.detected)
    })?;
    Ok(format!(
        "lambda = 1 on length {support:.3}, kappa = 1 covers {covered:.3}; example2 none"
    ))
}

fn eigenvalue_duality(s: &VerifySettings) -> Result<String, String> {
    eigenvalue_duality_at(16, 2, s)
}

fn multiplicity(_: &VerifySettings) -> Result<String, String> {
    let rule = unit_rule(16);
    let phi = vec![c(1.0); rule.len()];
    let bs = ["1", "y", "sin(y)", "y^2"]
        .iter()
        .map(|t| parse(t).map_err(err))
        .collect::<Result<Vec<Expression>, String>>()?;
    let res =
        multiplicity_witnesses(&constant_kernel(), c(1.0), &phi, &bs, &rule, &rule).map_err(err)?;
    let worst = res.iter().copied().fold(0.0, f64::max);
    ensure(worst <= 1e-10, || format!("residuals {res:?}"))?;
    Ok(format!("4 witnesses, max residual {worst:.1e}"))
}

fn homogeneous_uniqueness(s: &VerifySettings) -> Result<String, String> {
    let rule = unit_rule(24);
    let zero =
        RightHandSide::from_expression(parse("0").map_err(err)?, Domain::unit()).map_err(err)?;
    let mut worst: f64 = 0.0;
    for kappa in [0.2, 2.0] {
        let sol = solve_with(
            &builtin_kernel(Builtin::Example1),
            &zero,
            c(kappa),
            &rule,
            &rule,
            &solve_options(s),
        )
        .map_err(err)?;
        ensure(sol.class_used.verdict == Verdict::Regular, || {
            format!("kappa = {kappa} classified {}", sol.class_used.verdict)
        })?;
        let mut norm2 = 0.0;
        for (i, &wx) in rule.weights().iter().enumerate() {
            for (j, &wy) in rule.weights().iter().enumerate() {
                norm2 += wx * wy * sol.f_values[(i, j)].norm_sqr();
            }
        }
        worst = worst.max(norm2.sqrt());
    }
    ensure(worst <= 1e-12, || format!("|f| = {worst:e}"))?;
    Ok(format!("|f| = {worst:.1e}"))
}

fn refinement_stability(s: &VerifySettings) -> Result<String, String> {
    singular_set_at(48, 2 * DEFAULT_Y_DEPTH, s).map_err(|e| format!("singular set: {e}"))?;
    eigenvalue_duality_at(32, 4, s).map_err(|e| format!("eigenvalues: {e}"))?;
    Ok("verdicts unchanged at doubled resolution".into())
}

/// A random expression tree of at most `depth` levels. Constants are
/// non-negative, as the parser never produces negative literals.
pub fn random_expression(rng: &mut ChaCha8Rng, depth: usize) -> Node {
    let leaf = depth == 0 || rng.gen_bool(0.25);
    if leaf {
        return if rng.gen_bool(0.5) {
            let v = match rng.gen_range(0..4) {
                0 => rng.gen_range(0..10) as f64,
                1 => rng.gen_range(0.0..10.0),
                2 => 10f64.powi(rng.gen_range(-12..12)) * rng.gen_range(1.0..10.0),
                _ => 0.5,
            };
            Node::Const(v)
        } else {
            Node::Var([Var::X, Var::S, Var::Y][rng.gen_range(0..3)])
        };
    }
    let sub = |rng: &mut ChaCha8Rng| Box::new(random_expression(rng, depth - 1));
    match rng.gen_range(0..8) {
        0 => Node::Neg(sub(rng)),
        1 => Node::Call(Func::ALL[rng.gen_range(0..Func::ALL.len())], sub(rng)),
        k => {
            let op = [
                BinOp::Add,
                BinOp::Sub,
                BinOp::Mul,
                BinOp::Div,
                BinOp::Pow,
                BinOp::Add,
            ][k - 2];
            Node::Binary(op, sub(rng), sub(rng))
        }
    }
}

fn parser_round_trip(s: &VerifySettings) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed ^ 0xe4);
    for i in 0..1000 {
        let e = Expression::from_ast(random_expression(&mut rng, 6));
        let text = e.pretty();
        let back =
            parse(&text).map_err(|err| format!("case {i}: `{text}` fails to parse: {err}"))?;
        ensure(back == e, || {
            format!("case {i}: `{text}` reparses as `{}`", back.pretty())
        })?;
        ensure(back.pretty() == text, || {
            format!("case {i}: printing not stable for `{text}`")
        })?;
    }

    let eval = |t: &str| -> Result<f64, String> {
        parse(t).map_err(err)?.evaluate(0.0, 0.0, 0.0).map_err(err)
    };
    for (text, want) in [
        ("1 + 2 * 3", 7.0),
        ("(1 + 2) * 3", 9.0),
        ("2 ^ 3 ^ 2", 512.0),
        ("-2 ^ 2", -4.0),
        ("8 / 4 / 2", 1.0),
        ("2 - 3 - 4", -5.0),
        ("2 * -3", -6.0),
        ("1 − 3", -2.0),
    ] {
        let got = eval(text)?;
        ensure(got == want, || format!("`{text}` = {got}, expected {want}"))?;
    }

    let kernel = parse("exp(x−s)*y").map_err(err)?;
    let vars = kernel.free_variables();
    ensure(vars.len() == 3, || {
        format!("`exp(x−s)*y` has variables {vars:?}")
    })?;
    let v = kernel.evaluate(0.3, 0.1, 0.5).map_err(err)?;
    ensure((v - 0.2f64.exp() * 0.5).abs() <= 1e-15, || {
        format!("`exp(x−s)*y` evaluates to {v}")
    })?;
    Ok("1000 random round trips, precedence table, 3-variable kernel".into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn criteria_are_named_and_numbered() {
        assert!(CRITERIA.len() >= 10);
        assert!(run_criterion(0, &VerifySettings::default()).is_none());
        assert!(run_criterion(13, &VerifySettings::default()).is_none());
    }

    #[test]
    fn misconfigured_zero_tol_fails_classification() {
        let s = VerifySettings {
            zero_tol: 10.0,
            ..VerifySettings::default()
        };
        assert!(!run_criterion(2, &s).unwrap().passed);
        assert!(!run_criterion(8, &s).unwrap().passed);
    }

    #[test]
    fn parser_criterion_passes() {
        let out = run_criterion(12, &VerifySettings::default()).unwrap();
        assert!(out.passed, "{}", out.detail);
    }
}
