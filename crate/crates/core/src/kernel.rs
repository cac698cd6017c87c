//! Kernels `k(x, s, y)` of the partial integral operator, right-hand sides
//! `g(x, y)`, and the boundedness diagnostic `b(t) = ∫∫ |k(x, s, t)|² dx ds`.

use crate::expr::{self, EvalError, Expression, ParseError, Var};
use crate::quadrature::{Domain, QuadratureError, QuadratureRule};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("kernel evaluation failed at (x={x}, s={s}, y={y}): {source}")]
    Eval {
        x: f64,
        s: f64,
        y: f64,
        source: EvalError,
    },
    #[error("kernel is not finite at (x={x}, s={s}, y={y}): {value}")]
    NonFinite { x: f64, s: f64, y: f64, value: f64 },
    #[error("right-hand side evaluation failed at (x={x}, y={y}): {source}")]
    RhsEval { x: f64, y: f64, source: EvalError },
    #[error("right-hand side is not finite at (x={x}, y={y}): {value}")]
    RhsNonFinite { x: f64, y: f64, value: f64 },
    #[error("unknown built-in kernel `{0}`")]
    UnknownBuiltin(String),
    #[error("expression `{expr}` may only use {allowed}, found `{found}`")]
    Variables {
        expr: String,
        allowed: String,
        found: &'static str,
    },
    #[error("invalid expression in {field}: {source}")]
    Parse {
        field: &'static str,
        source: ParseError,
    },
    #[error(transparent)]
    Domain(#[from] QuadratureError),
}

type KernelFn = dyn Fn(f64, f64, f64) -> Result<f64, EvalError> + Send + Sync;
type FactorFn = dyn Fn(f64) -> Result<f64, EvalError> + Send + Sync;
type RhsFn = dyn Fn(f64, f64) -> Result<f64, EvalError> + Send + Sync;

/// A function of one variable, used as a factor of a separable kernel.
#[derive(Clone)]
pub struct Factor {
    f: Arc<FactorFn>,
    label: String,
}

impl Factor {
    pub fn from_fn<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            f: Arc::new(move |t| Ok(f(t))),
            label: label.into(),
        }
    }

    /// The expression may use at most one of `x`, `s`, `y`; it is evaluated
    /// with that variable bound to the argument.
    pub fn from_expression(e: Expression) -> Result<Self, KernelError> {
        let vars = e.free_variables();
        if vars.len() > 1 {
            let extra = vars.iter().nth(1).copied().unwrap_or(Var::X);
            return Err(KernelError::Variables {
                expr: e.source().to_string(),
                allowed: "a single variable".into(),
                found: extra.name(),
            });
        }
        let label = e.pretty();
        Ok(Self {
            f: Arc::new(move |t| e.evaluate(t, t, t)),
            label,
        })
    }

    pub fn eval(&self, t: f64) -> Result<f64, EvalError> {
        (self.f)(t)
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl fmt::Debug for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Factor({})", self.label)
    }
}

/// Declared factorization `k(x, s, y) = p(x)·q(s)·r(y)`.
#[derive(Debug, Clone)]
pub struct Separable {
    pub p: Factor,
    pub q: Factor,
    pub r: Factor,
}

impl Separable {
    /// `∫ p(t) q(t) dt` by the given rule: for fixed `y` the slice operator
    /// has the single nonzero eigenvalue `r(y)` times this number.
    pub fn inner_product(&self, rule: &QuadratureRule) -> Result<f64, EvalError> {
        let mut samples = Vec::with_capacity(rule.len());
        for &t in rule.nodes() {
            samples.push(self.p.eval(t)? * self.q.eval(t)?);
        }
        Ok(rule.integrate_real(&samples).expect("one sample per node"))
    }
}

#[derive(Debug, Clone)]
pub enum Structure {
    General,
    Separable(Separable),
}

/// Continuous kernel `k(x, s, y)` on `Ω³`.
#[derive(Clone)]
pub struct Kernel {
    f: Arc<KernelFn>,
    structure: Structure,
    domain: Domain,
    label: String,
}

impl fmt::Debug for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Kernel")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .field(
                "separable",
                &matches!(self.structure, Structure::Separable(_)),
            )
            .finish()
    }
}

impl Kernel {
    pub fn from_expression(e: Expression, domain: Domain) -> Self {
        let label = e.pretty();
        Self {
            f: Arc::new(move |x, s, y| e.evaluate(x, s, y)),
            structure: Structure::General,
            domain,
            label,
        }
    }

    pub fn from_fn<F>(label: impl Into<String>, domain: Domain, f: F) -> Self
    where
        F: Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            f: Arc::new(move |x, s, y| Ok(f(x, s, y))),
            structure: Structure::General,
            domain,
            label: label.into(),
        }
    }

    pub fn separable(p: Factor, q: Factor, r: Factor, domain: Domain) -> Self {
        let label = format!("({}) * ({}) * ({})", p.label, q.label, r.label);
        let (fp, fq, fr) = (p.f.clone(), q.f.clone(), r.f.clone());
        Self {
            f: Arc::new(move |x, s, y| Ok(fp(x)? * fq(s)? * fr(y)?)),
            structure: Structure::Separable(Separable { p, q, r }),
            domain,
            label,
        }
    }

    /// `k ≡ 0`.
    pub fn zero(domain: Domain) -> Self {
        Self::from_fn("0", domain, |_, _, _| 0.0)
    }

    pub fn eval(&self, x: f64, s: f64, y: f64) -> Result<f64, KernelError> {
        let value = (self.f)(x, s, y).map_err(|source| KernelError::Eval { x, s, y, source })?;
        if value.is_finite() {
            Ok(value)
        } else {
            Err(KernelError::NonFinite { x, s, y, value })
        }
    }

    pub fn structure(&self) -> &Structure {
        &self.structure
    }

    pub fn separable_factors(&self) -> Option<&Separable> {
        match &self.structure {
            Structure::Separable(sep) => Some(sep),
            Structure::General => None,
        }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `c·k`, keeping a declared factorization (the constant joins `p`).
    pub fn scaled(&self, c: f64) -> Kernel {
        if let Structure::Separable(sep) = &self.structure {
            let p = sep.p.clone();
            let scaled_p = Factor {
                f: Arc::new(move |t| Ok(c * p.eval(t)?)),
                label: format!("{c} * ({})", sep.p.label),
            };
            return Kernel::separable(scaled_p, sep.q.clone(), sep.r.clone(), self.domain);
        }
        let inner = self.f.clone();
        Kernel {
            f: Arc::new(move |x, s, y| Ok(c * inner(x, s, y)?)),
            structure: Structure::General,
            domain: self.domain,
            label: format!("{c} * ({})", self.label),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Builtin {
    /// `e^{x−s}·e^y` on `[0,1]`, with `D₁(y;κ) = 1 − κe^y`.
    Example1,
    /// `e^{x−s}·y` on `[0,1]`, with `D₁(y;κ) = 1 − κy`.
    Example2,
}

impl FromStr for Builtin {
    type Err = KernelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "example1" => Ok(Builtin::Example1),
            "example2" => Ok(Builtin::Example2),
            other => Err(KernelError::UnknownBuiltin(other.to_string())),
        }
    }
}

pub fn builtin_kernel(name: Builtin) -> Kernel {
    let d = Domain::unit();
    match name {
        Builtin::Example1 => Kernel::separable(
            Factor::from_fn("exp(x)", f64::exp),
            Factor::from_fn("exp(-s)", |s| (-s).exp()),
            Factor::from_fn("exp(y)", f64::exp),
            d,
        ),
        Builtin::Example2 => Kernel::separable(
            Factor::from_fn("exp(x)", f64::exp),
            Factor::from_fn("exp(-s)", |s| (-s).exp()),
            Factor::from_fn("y", |y| y),
            d,
        ),
    }
    .with_label(match name {
        Builtin::Example1 => "example1",
        Builtin::Example2 => "example2",
    })
}

impl Kernel {
    fn with_label(mut self, label: &str) -> Self {
        self.label = label.to_string();
        self
    }
}

/// Kernel of the adjoint operator, `k*(x, s, y) = k(s, x, y)`. Kernels are
/// real, so conjugation is the identity here.
pub fn adjoint_kernel(k: &Kernel) -> Kernel {
    let label = match k.label.strip_prefix("adjoint of ") {
        Some(inner) => inner.to_string(),
        None => format!("adjoint of {}", k.label),
    };
    if let Structure::Separable(sep) = &k.structure {
        let mut adj = Kernel::separable(sep.q.clone(), sep.p.clone(), sep.r.clone(), k.domain);
        adj.label = label;
        return adj;
    }
    let inner = k.f.clone();
    Kernel {
        f: Arc::new(move |x, s, y| inner(s, x, y)),
        structure: Structure::General,
        domain: k.domain,
        label,
    }
}

/// Known function `g(x, y)`.
#[derive(Clone)]
pub struct RightHandSide {
    f: Arc<RhsFn>,
    domain: Domain,
    label: String,
}

impl fmt::Debug for RightHandSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RightHandSide({})", self.label)
    }
}

impl RightHandSide {
    /// The expression may use `x` and `y` but not `s`.
    pub fn from_expression(e: Expression, domain: Domain) -> Result<Self, KernelError> {
        if e.free_variables().contains(&Var::S) {
            return Err(KernelError::Variables {
                expr: e.source().to_string(),
                allowed: "x and y".into(),
                found: "s",
            });
        }
        let label = e.pretty();
        Ok(Self {
            f: Arc::new(move |x, y| e.evaluate(x, 0.0, y)),
            domain,
            label,
        })
    }

    pub fn from_fn<F>(label: impl Into<String>, domain: Domain, f: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            f: Arc::new(move |x, y| Ok(f(x, y))),
            domain,
            label: label.into(),
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<f64, KernelError> {
        let value = (self.f)(x, y).map_err(|source| KernelError::RhsEval { x, y, source })?;
        if value.is_finite() {
            Ok(value)
        } else {
            Err(KernelError::RhsNonFinite { x, y, value })
        }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// Sampled `b(t)` over a grid of `t` values.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub sup_b: f64,
    pub t_grid: QuadratureRule,
    pub per_t: Vec<f64>,
}

/// Samples `b(t) = ∫∫ |k(x, s, t)|² dx ds` at each node of `t_rule`, with
/// the double integral taken on `rule × rule`.
pub fn check_condition_i(
    k: &Kernel,
    rule: &QuadratureRule,
    t_rule: &QuadratureRule,
) -> Result<BoundReport, KernelError> {
    let mut per_t = Vec::with_capacity(t_rule.len());
    for &t in t_rule.nodes() {
        let mut acc = 0.0;
        for (&x, &wx) in rule.nodes().iter().zip(rule.weights()) {
            let mut inner = 0.0;
            for (&s, &ws) in rule.nodes().iter().zip(rule.weights()) {
                let v = k.eval(x, s, t)?;
                inner += ws * v * v;
            }
            acc += wx * inner;
        }
        per_t.push(acc);
    }
    let sup_b = per_t.iter().copied().fold(0.0, f64::max);
    Ok(BoundReport {
        sup_b,
        t_grid: t_rule.clone(),
        per_t,
    })
}

/// JSON kernel description.
///
/// ```json
/// {"type":"expr","k":"exp(x-s)*y","a":0,"b":1}
/// {"type":"separable","p":"exp(x)","q":"exp(-s)","r":"y","a":0,"b":1}
/// {"type":"builtin","name":"example2"}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum KernelConfig {
    Expr {
        k: String,
        #[serde(default)]
        a: Option<f64>,
        #[serde(default)]
        b: Option<f64>,
    },
    Separable {
        p: String,
        q: String,
        r: String,
        #[serde(default)]
        a: Option<f64>,
        #[serde(default)]
        b: Option<f64>,
    },
    Builtin {
        name: String,
    },
}

fn parse_field(field: &'static str, text: &str) -> Result<Expression, KernelError> {
    expr::parse(text).map_err(|source| KernelError::Parse { field, source })
}

fn require_vars(field: &'static str, e: &Expression, allowed: &[Var]) -> Result<(), KernelError> {
    let vars: BTreeSet<Var> = e.free_variables();
    if let Some(bad) = vars.iter().find(|v| !allowed.contains(v)) {
        let names: Vec<_> = allowed.iter().map(|v| v.name()).collect();
        return Err(KernelError::Variables {
            expr: format!("{field} = {}", e.source()),
            allowed: if names.is_empty() {
                "no variables".into()
            } else {
                names.join(", ")
            },
            found: bad.name(),
        });
    }
    Ok(())
}

impl KernelConfig {
    /// Domain `[a, b]`, defaulting to `[0, 1]`.
    pub fn domain(&self) -> Result<Domain, KernelError> {
        match self {
            KernelConfig::Expr { a, b, .. } | KernelConfig::Separable { a, b, .. } => {
                Ok(Domain::interval(a.unwrap_or(0.0), b.unwrap_or(1.0))?)
            }
            KernelConfig::Builtin { .. } => Ok(Domain::unit()),
        }
    }

    pub fn build(&self) -> Result<Kernel, KernelError> {
        let domain = self.domain()?;
        match self {
            KernelConfig::Expr { k, .. } => {
                Ok(Kernel::from_expression(parse_field("k", k)?, domain))
            }
            KernelConfig::Separable { p, q, r, .. } => {
                let p = parse_field("p", p)?;
                let q = parse_field("q", q)?;
                let r = parse_field("r", r)?;
                require_vars("p", &p, &[Var::X])?;
                require_vars("q", &q, &[Var::S])?;
                require_vars("r", &r, &[Var::Y])?;
                Ok(Kernel::separable(
                    Factor::from_expression(p)?,
                    Factor::from_expression(q)?,
                    Factor::from_expression(r)?,
                    domain,
                ))
            }
            KernelConfig::Builtin { name } => Ok(builtin_kernel(name.parse()?)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::gauss_legendre;

    const E: f64 = std::f64::consts::E;

    fn grid10() -> Vec<f64> {
        (0..10).map(|i| i as f64 / 9.0).collect()
    }

    #[test]
    fn builtin_values() {
        let k1 = builtin_kernel(Builtin::Example1);
        let k2 = builtin_kernel(Builtin::Example2);
        assert_eq!(k1.eval(0.0, 0.0, 0.0).unwrap(), 1.0);
        for x in grid10() {
            for s in grid10() {
                assert_eq!(k2.eval(x, s, 0.0).unwrap(), 0.0);
            }
        }
        assert!((k1.eval(1.0, 0.0, 1.0).unwrap() - E * E).abs() < 1e-12);
        assert!((k1.eval(1.0, 0.0, 1.0).unwrap() - 7.389056).abs() < 1e-6);
    }

    #[test]
    fn unknown_builtin() {
        assert!(matches!(
            "example3".parse::<Builtin>(),
            Err(KernelError::UnknownBuiltin(_))
        ));
    }

    #[test]
    fn separable_product_matches_eval() {
        for name in [Builtin::Example1, Builtin::Example2] {
            let k = builtin_kernel(name);
            let sep = k.separable_factors().unwrap();
            for x in grid10() {
                for s in grid10() {
                    for y in grid10() {
                        let prod = sep.p.eval(x).unwrap()
                            * sep.q.eval(s).unwrap()
                            * sep.r.eval(y).unwrap();
                        assert!((k.eval(x, s, y).unwrap() - prod).abs() <= 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn adjoint_examples() {
        let sym = Kernel::from_fn("cos(x-s)y", Domain::unit(), |x, s, y| (x - s).cos() * y);
        let adj = adjoint_kernel(&sym);
        let k2 = builtin_kernel(Builtin::Example2);
        let adj2 = adjoint_kernel(&k2);
        let back = adjoint_kernel(&adj2);
        let general = Kernel::from_expression(expr::parse("x*s^2 + y").unwrap(), Domain::unit());
        let general_back = adjoint_kernel(&adjoint_kernel(&general));
        for x in grid10() {
            for s in grid10() {
                for y in grid10() {
                    assert_eq!(adj.eval(x, s, y).unwrap(), sym.eval(x, s, y).unwrap());
                    let want = (s - x).exp() * y;
                    assert!(
                        (adj2.eval(x, s, y).unwrap() - want).abs() <= 1e-14 * want.abs().max(1.0)
                    );
                    assert_eq!(back.eval(x, s, y).unwrap(), k2.eval(x, s, y).unwrap());
                    assert_eq!(
                        general_back.eval(x, s, y).unwrap(),
                        general.eval(x, s, y).unwrap()
                    );
                }
            }
        }
        assert_eq!(back.label(), "example2");
        assert!(adj2.separable_factors().is_some());
    }

    #[test]
    fn condition_i_zero_kernel() {
        let r = gauss_legendre(8, Domain::unit()).unwrap();
        let rep = check_condition_i(&Kernel::zero(Domain::unit()), &r, &r).unwrap();
        assert_eq!(rep.sup_b, 0.0);
        assert!(rep.per_t.iter().all(|&b| b == 0.0));
    }

    #[test]
    fn condition_i_matches_closed_form() {
        let r = gauss_legendre(16, Domain::unit()).unwrap();
        let t_rule = gauss_legendre(8, Domain::unit()).unwrap();
        let c = (E * E - 1.0) / 2.0 * (1.0 - (-2f64).exp()) / 2.0;
        let rep2 = check_condition_i(&builtin_kernel(Builtin::Example2), &r, &t_rule).unwrap();
        let rep1 = check_condition_i(&builtin_kernel(Builtin::Example1), &r, &t_rule).unwrap();
        for (i, &t) in t_rule.nodes().iter().enumerate() {
            assert!((rep2.per_t[i] - t * t * c).abs() < 1e-12);
            assert!((rep1.per_t[i] - (2.0 * t).exp() * c).abs() < 1e-11);
        }
        assert_eq!(rep2.sup_b, rep2.per_t.iter().copied().fold(0.0, f64::max));
        // the supremum over [0,1] sits at t = 1; a one-node rule centred there samples it
        let at_one = gauss_legendre(1, Domain::interval(1.0 - 1e-9, 1.0 + 1e-9).unwrap()).unwrap();
        assert_eq!(at_one.nodes(), &[1.0]);
        let rep = check_condition_i(&builtin_kernel(Builtin::Example2), &r, &at_one).unwrap();
        assert!((rep.sup_b - 1.381097).abs() < 1e-6);
        assert!((rep.sup_b - c).abs() < 1e-12);
    }

    #[test]
    fn condition_i_refinement_invariance() {
        let t_rule = gauss_legendre(6, Domain::unit()).unwrap();
        for name in [Builtin::Example1, Builtin::Example2] {
            let k = builtin_kernel(name);
            let a = check_condition_i(&k, &gauss_legendre(12, Domain::unit()).unwrap(), &t_rule)
                .unwrap();
            let b = check_condition_i(&k, &gauss_legendre(24, Domain::unit()).unwrap(), &t_rule)
                .unwrap();
            for (u, v) in a.per_t.iter().zip(&b.per_t) {
                assert!((u - v).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn condition_i_names_failing_point() {
        let k = Kernel::from_expression(expr::parse("1/(x-s)").unwrap(), Domain::unit());
        let r = gauss_legendre(3, Domain::unit()).unwrap();
        let err = check_condition_i(&k, &r, &r).unwrap_err();
        assert!(matches!(err, KernelError::Eval { .. }));
        assert!(err.to_string().contains("x="));
    }

    #[test]
    fn config_variants() {
        let cfg: KernelConfig =
            serde_json::from_str(r#"{"type":"expr","k":"exp(x−s)*y","a":0,"b":1}"#).unwrap();
        let k = cfg.build().unwrap();
        assert!((k.eval(0.5, 0.5, 0.25).unwrap() - 0.25).abs() < 1e-15);

        let cfg: KernelConfig = serde_json::from_str(
            r#"{"type":"separable","p":"exp(x)","q":"exp(−s)","r":"y","a":0,"b":1}"#,
        )
        .unwrap();
        let k = cfg.build().unwrap();
        assert!(k.separable_factors().is_some());
        assert!((k.eval(1.0, 1.0, 0.5).unwrap() - 0.5).abs() < 1e-15);

        let cfg: KernelConfig =
            serde_json::from_str(r#"{"type":"builtin","name":"example2"}"#).unwrap();
        assert_eq!(cfg.build().unwrap().label(), "example2");

        let cfg: KernelConfig =
            serde_json::from_str(r#"{"type":"expr","k":"x","a":-1,"b":2}"#).unwrap();
        assert_eq!(cfg.build().unwrap().domain().length(), 3.0);
    }

    #[test]
    fn config_errors() {
        let bad: KernelConfig = serde_json::from_str(r#"{"type":"expr","k":"exp(x - )"}"#).unwrap();
        match bad.build() {
            Err(KernelError::Parse { field: "k", source }) => assert_eq!(source.offset(), Some(8)),
            other => panic!("unexpected {other:?}"),
        }
        let wrong_var: KernelConfig =
            serde_json::from_str(r#"{"type":"separable","p":"exp(s)","q":"1","r":"y"}"#).unwrap();
        assert!(matches!(
            wrong_var.build(),
            Err(KernelError::Variables { found: "s", .. })
        ));
        let bad_dom: KernelConfig =
            serde_json::from_str(r#"{"type":"expr","k":"x","a":1,"b":0}"#).unwrap();
        assert!(matches!(bad_dom.build(), Err(KernelError::Domain(_))));
        assert!(serde_json::from_str::<KernelConfig>(r#"{"type":"expr","k":"x","c":3}"#).is_err());
        let unknown: KernelConfig =
            serde_json::from_str(r#"{"type":"builtin","name":"nope"}"#).unwrap();
        assert!(matches!(
            unknown.build(),
            Err(KernelError::UnknownBuiltin(_))
        ));
    }

    #[test]
    fn rhs_rejects_s() {
        let e = expr::parse("x + s").unwrap();
        assert!(RightHandSide::from_expression(e, Domain::unit()).is_err());
        let g =
            RightHandSide::from_expression(expr::parse("exp(x)*sqrt(y)").unwrap(), Domain::unit())
                .unwrap();
        assert!((g.eval(0.0, 0.25).unwrap() - 0.5).abs() < 1e-15);
        let bad =
            RightHandSide::from_expression(expr::parse("sqrt(y - 2)").unwrap(), Domain::unit())
                .unwrap();
        assert!(matches!(
            bad.eval(0.0, 0.0),
            Err(KernelError::RhsEval { .. })
        ));
    }

    #[test]
    fn scaled_kernel() {
        let k = builtin_kernel(Builtin::Example1).scaled(3.0);
        assert!(k.separable_factors().is_some());
        assert!((k.eval(0.0, 0.0, 0.0).unwrap() - 3.0).abs() < 1e-15);
        let g = Kernel::from_fn("xsy", Domain::unit(), |x, s, y| x * s * y).scaled(-2.0);
        assert_eq!(g.eval(1.0, 1.0, 0.5).unwrap(), -1.0);
    }
}
