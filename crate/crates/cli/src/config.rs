//! Job configuration files.
//!
//! ```json
//! {
//!   "kernel": {"type": "builtin", "name": "example2"},
//!   "rhs": "exp(x)*sqrt(y)",
//!   "kappa": 0.5,
//!   "discretization": {"nx": 24, "ny": 24, "y_depth": 12},
//!   "tolerances": {"zero_tol": 1e-8, "measure_tol": 0.02, "eig_tol": 1e-8},
//!   "output": {"path": "solution.csv", "format": "csv"}
//! }
//! ```
//!
//! Only `kernel` is required. `kappa` may be a number or `{"re": .., "im": ..}`.

use num_complex::Complex64;
use pie_core::expr::parse;
use pie_core::kernel::{Kernel, KernelConfig, KernelError, RightHandSide};
use pie_core::quadrature::{gauss_legendre, QuadratureRule};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use thiserror::Error;

pub const MIN_NODES: usize = 4;
pub const MAX_NODES: usize = 2048;
pub const MAX_Y_DEPTH: usize = 40;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Kernel(#[from] KernelError),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KappaSpec {
    Real(f64),
    Complex {
        re: f64,
        #[serde(default)]
        im: f64,
    },
}

impl KappaSpec {
    pub fn value(self) -> Complex64 {
        match self {
            KappaSpec::Real(re) => Complex64::new(re, 0.0),
            KappaSpec::Complex { re, im } => Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Discretization {
    pub nx: usize,
    pub ny: usize,
    pub y_depth: usize,
}

impl Default for Discretization {
    fn default() -> Self {
        Self {
            nx: 24,
            ny: 24,
            y_depth: pie_core::pie::DEFAULT_Y_DEPTH,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub zero_tol: f64,
    pub measure_tol: f64,
    pub eig_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            zero_tol: pie_core::pie::DEFAULT_ZERO_TOL,
            measure_tol: pie_core::pie::DEFAULT_MEASURE_TOL,
            eig_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Output {
    pub path: Option<PathBuf>,
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub kernel: KernelConfig,
    #[serde(default)]
    pub rhs: Option<String>,
    #[serde(default)]
    pub kappa: Option<KappaSpec>,
    #[serde(default)]
    pub discretization: Discretization,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: Output,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub kappa: Option<Complex64>,
    pub nx: Option<usize>,
    pub ny: Option<usize>,
}

impl JobConfig {
    /// Parses and validates a config document.
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let config: JobConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<(), ConfigError> {
        if let Some(k) = o.kappa {
            self.kappa = Some(KappaSpec::Complex { re: k.re, im: k.im });
        }
        if let Some(nx) = o.nx {
            self.discretization.nx = nx;
        }
        if let Some(ny) = o.ny {
            self.discretization.ny = ny;
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let d = &self.discretization;
        for (name, n) in [("nx", d.nx), ("ny", d.ny)] {
            if !(MIN_NODES..=MAX_NODES).contains(&n) {
                return Err(ConfigError::Invalid(format!(
                    "{name} = {n} outside [{MIN_NODES}, {MAX_NODES}]"
                )));
            }
        }
        if d.y_depth > MAX_Y_DEPTH {
            return Err(ConfigError::Invalid(format!(
                "y_depth = {} exceeds {MAX_Y_DEPTH}",
                d.y_depth
            )));
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("zero_tol", t.zero_tol),
            ("measure_tol", t.measure_tol),
            ("eig_tol", t.eig_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ConfigError::Invalid(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if let Some(k) = self.kappa {
            let v = k.value();
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(ConfigError::Invalid("kappa must be finite".into()));
            }
        }
        self.kernel.domain()?;
        Ok(())
    }

    pub fn kappa(&self) -> Result<Complex64, ConfigError> {
        self.kappa.map(KappaSpec::value).ok_or_else(|| {
            ConfigError::Invalid("kappa missing (set it in the config or pass --kappa)".into())
        })
    }

    pub fn kernel(&self) -> Result<Kernel, ConfigError> {
        Ok(self.kernel.build()?)
    }

    pub fn rhs(&self, kernel: &Kernel) -> Result<RightHandSide, ConfigError> {
        let text = self
            .rhs
            .as_deref()
            .ok_or_else(|| ConfigError::Invalid("solve needs an `rhs` expression".into()))?;
        let e = parse(text).map_err(|source| KernelError::Parse {
            field: "rhs",
            source,
        })?;
        Ok(RightHandSide::from_expression(e, *kernel.domain())?)
    }

    pub fn x_rule(&self, kernel: &Kernel) -> QuadratureRule {
        gauss_legendre(self.discretization.nx, *kernel.domain()).expect("node count validated")
    }

    pub fn y_rule(&self, kernel: &Kernel) -> QuadratureRule {
        gauss_legendre(self.discretization.ny, *kernel.domain()).expect("node count validated")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_takes_defaults() {
        let c = JobConfig::from_json(r#"{"kernel":{"type":"builtin","name":"example1"}}"#).unwrap();
        assert_eq!(c.discretization, Discretization::default());
        assert_eq!(c.tolerances, Tolerances::default());
        assert_eq!(c.output.format, Format::Csv);
        assert!(c.kappa().is_err());
    }

    #[test]
    fn kappa_forms() {
        let real: JobConfig =
            serde_json::from_str(r#"{"kernel":{"type":"builtin","name":"example1"},"kappa":0.5}"#)
                .unwrap();
        assert_eq!(real.kappa().unwrap(), Complex64::new(0.5, 0.0));
        let cplx: JobConfig = serde_json::from_str(
            r#"{"kernel":{"type":"builtin","name":"example1"},"kappa":{"re":0.3,"im":0.4}}"#,
        )
        .unwrap();
        assert_eq!(cplx.kappa().unwrap(), Complex64::new(0.3, 0.4));
    }

    #[test]
    fn rejects_bad_values() {
        for text in [
            r#"{"kernel":{"type":"builtin","name":"example1"},"discretization":{"nx":3}}"#,
            r#"{"kernel":{"type":"builtin","name":"example1"},"tolerances":{"zero_tol":0}}"#,
            r#"{"kernel":{"type":"builtin","name":"example1"},"tolerances":{"eig_tol":-1}}"#,
            r#"{"kernel":{"type":"builtin","name":"example1"},"discretization":{"y_depth":99}}"#,
            r#"{"kernel":{"type":"expr","k":"x","a":1,"b":0}}"#,
            r#"{"kernel":{"type":"builtin","name":"example1"},"extra":1}"#,
            r#"{"kernel":{"type":"builtin","name":"example1"},"output":{"format":"xml"}}"#,
            r#"{"kernel":{"type":"builtin","name":"example1"},"kappa":"half"}"#,
        ] {
            assert!(JobConfig::from_json(text).is_err(), "{text}");
        }
    }

    #[test]
    fn overrides_take_precedence() {
        let mut c =
            JobConfig::from_json(r#"{"kernel":{"type":"builtin","name":"example1"},"kappa":1}"#)
                .unwrap();
        c.apply(&Overrides {
            kappa: Some(Complex64::new(0.2, 0.1)),
            nx: Some(8),
            ny: None,
        })
        .unwrap();
        assert_eq!(c.kappa().unwrap(), Complex64::new(0.2, 0.1));
        assert_eq!(c.discretization.nx, 8);
        assert!(c
            .apply(&Overrides {
                nx: Some(2),
                ..Overrides::default()
            })
            .is_err());
    }

    #[test]
    fn rhs_must_avoid_s() {
        let c =
            JobConfig::from_json(r#"{"kernel":{"type":"builtin","name":"example1"},"rhs":"x*s"}"#)
                .unwrap();
        let k = c.kernel().unwrap();
        assert!(c.rhs(&k).is_err());
    }
}
