use crate::config::{ConfigError, Format, JobConfig, Overrides};
use crate::output::{cplx, csv_float, num, write_file};
use num_complex::Complex64;
use pie_core::pie::{
    classify, detect_eigenvalues, determinant_profile_with, solve_with, ConditionIIReport,
    DeterminantProfile, ParameterClass, PieError, PieSolution, ProfileOptions, SolveOptions,
    BASE_INTERVALS,
};
use pie_core::verify::{run_all, VerifySettings};
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Failure of a command, carrying its process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{message}")]
    Solver {
        code: i32,
        message: String,
        /// Explanation printed on stdout.
        report: Option<Value>,
    },
    #[error("{failed} of {total} criteria failed")]
    VerifyFailed { failed: usize, total: usize },
}

pub mod exit {
    pub const OK: i32 = 0;
    pub const VERIFY_FAILED: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const NUMERIC: i32 = 3;
    pub const INDETERMINATE: i32 = 4;
    pub const CHARACTERISTIC: i32 = 5;
    pub const CONDITION_II: i32 = 6;
    pub const CONSISTENCY: i32 = 7;
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Write { .. } => exit::CONFIG,
            CliError::Solver { code, .. } => *code,
            CliError::VerifyFailed { .. } => exit::VERIFY_FAILED,
        }
    }

    pub fn report(&self) -> Option<&Value> {
        match self {
            CliError::Solver { report, .. } => report.as_ref(),
            _ => None,
        }
    }
}

fn zeros_json(class: &ParameterClass) -> Value {
    Value::Array(
        class
            .zeros
            .iter()
            .map(|z| json!({"y0": num(z.y0), "order": num(z.order_estimate)}))
            .collect(),
    )
}

fn intervals_json(class: &ParameterClass) -> Value {
    Value::Array(
        class
            .intervals
            .iter()
            .map(|&(lo, hi)| json!([num(lo), num(hi)]))
            .collect(),
    )
}

pub fn class_json(class: &ParameterClass) -> Value {
    json!({
        "verdict": class.verdict.as_str(),
        "zeros": zeros_json(class),
        "intervals": intervals_json(class),
        "min_abs_det": num(class.min_abs_det),
    })
}

pub fn condition_ii_json(report: &ConditionIIReport) -> Value {
    json!({
        "verdict": report.verdict.as_str(),
        "integral_estimates": report.integral_estimates.iter().map(|&v| num(v)).collect::<Vec<_>>(),
        "exclusion_radii": report.exclusion_radii.iter().map(|&v| num(v)).collect::<Vec<_>>(),
        "zeros": report.zero_diagnostics.iter().map(|d| json!({
            "y0": num(d.y0),
            "det_order": num(d.det_order),
            "numerator_order": num(d.numerator_order),
        })).collect::<Vec<_>>(),
    })
}

impl From<PieError> for CliError {
    fn from(e: PieError) -> Self {
        let message = e.to_string();
        let (code, report) = match &e {
            PieError::InvalidArgument(_) => (exit::CONFIG, None),
            PieError::Indeterminate { y, width } => (
                exit::INDETERMINATE,
                Some(json!({
                    "error": "indeterminate",
                    "near_y": num(*y),
                    "bracket": num(*width),
                    "hint": "increase discretization.y_depth",
                })),
            ),
            PieError::Characteristic { kappa, intervals } => (
                exit::CHARACTERISTIC,
                Some(json!({
                    "error": "characteristic",
                    "kappa": cplx(*kappa),
                    "intervals": intervals.iter().map(|&(lo, hi)| json!([num(lo), num(hi)])).collect::<Vec<_>>(),
                })),
            ),
            PieError::ConditionIIDivergent { class, report } => (
                exit::CONDITION_II,
                Some(json!({
                    "error": "condition_II_divergent",
                    "verdict": class.verdict.as_str(),
                    "zeros": zeros_json(class),
                    "condition_II": condition_ii_json(report),
                })),
            ),
            PieError::Consistency { .. } | PieError::AdjointMismatch { .. } => (
                exit::CONSISTENCY,
                Some(json!({"error": "consistency", "message": message})),
            ),
            _ => (exit::NUMERIC, None),
        };
        CliError::Solver {
            code,
            message,
            report,
        }
    }
}

/// Where a command sends its results.
pub struct Sink<'a> {
    pub stdout: &'a mut dyn Write,
}

impl Sink<'_> {
    fn print(&mut self, text: &str) -> Result<(), CliError> {
        self.stdout
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Write {
                path: PathBuf::from("<stdout>"),
                source,
            })
    }

    /// Bulk output goes to `path` when set, otherwise to stdout.
    fn emit(&mut self, path: Option<&Path>, body: &str) -> Result<bool, CliError> {
        match path {
            Some(p) => {
                write_file(p, body)?;
                Ok(true)
            }
            None => {
                self.print(body)?;
                Ok(false)
            }
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values are serializable");
    s.push('\n');
    s
}

pub fn load(config: &Path, overrides: &Overrides) -> Result<JobConfig, CliError> {
    let mut job = JobConfig::load(config)?;
    job.apply(overrides)?;
    Ok(job)
}

fn profile_for(job: &JobConfig) -> Result<DeterminantProfile, CliError> {
    let kernel = job.kernel()?;
    let kappa = job.kappa()?;
    let opts = ProfileOptions {
        base_intervals: (job.discretization.ny - 1).max(BASE_INTERVALS),
        zero_tol: job.tolerances.zero_tol,
    };
    Ok(determinant_profile_with(
        &kernel,
        kappa,
        &job.x_rule(&kernel),
        job.discretization.y_depth,
        &opts,
    )?)
}

pub fn profile_csv(p: &DeterminantProfile) -> String {
    let mut out = String::from("y,re_D1,im_D1,abs_D1\n");
    for (&y, d) in p.y_nodes.iter().zip(&p.values) {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            csv_float(y),
            csv_float(d.re),
            csv_float(d.im),
            csv_float(d.norm())
        );
    }
    out
}

fn profile_json(p: &DeterminantProfile) -> Value {
    json!({
        "kappa": cplx(p.kappa),
        "y": p.y_nodes.iter().map(|&v| num(v)).collect::<Vec<_>>(),
        "re_D1": p.values.iter().map(|v| num(v.re)).collect::<Vec<_>>(),
        "im_D1": p.values.iter().map(|v| num(v.im)).collect::<Vec<_>>(),
        "abs_D1": p.values.iter().map(|v| num(v.norm())).collect::<Vec<_>>(),
    })
}

pub fn cmd_profile(job: &JobConfig, sink: &mut Sink) -> Result<(), CliError> {
    let p = profile_for(job)?;
    let body = match job.output.format {
        Format::Csv => profile_csv(&p),
        Format::Json => pretty(&profile_json(&p)),
    };
    if sink.emit(job.output.path.as_deref(), &body)? {
        let min = p.min_abs();
        sink.print(&pretty(
            &json!({"rows": p.y_nodes.len(), "min_abs_D1": num(min)}),
        ))?;
    }
    Ok(())
}

pub fn cmd_classify(job: &JobConfig, sink: &mut Sink) -> Result<(), CliError> {
    let p = profile_for(job)?;
    let class = classify(&p, job.tolerances.zero_tol, job.tolerances.measure_tol)?;
    let body = pretty(&class_json(&class));
    if sink.emit(job.output.path.as_deref(), &body)? {
        sink.print(&body)?;
    }
    Ok(())
}

pub fn solution_csv(sol: &PieSolution) -> String {
    let mut out = String::from("x,y,re_f,im_f\n");
    for (j, &y) in sol.y_nodes.iter().enumerate() {
        for (i, &x) in sol.x_nodes.iter().enumerate() {
            let f: Complex64 = sol.f_values[(i, j)];
            let _ = writeln!(
                out,
                "{},{},{},{}",
                csv_float(x),
                csv_float(y),
                csv_float(f.re),
                csv_float(f.im)
            );
        }
    }
    out
}

fn solution_json(sol: &PieSolution) -> Value {
    let mut rows = Vec::with_capacity(sol.x_nodes.len() * sol.y_nodes.len());
    for (j, &y) in sol.y_nodes.iter().enumerate() {
        for (i, &x) in sol.x_nodes.iter().enumerate() {
            let f = sol.f_values[(i, j)];
            rows.push(json!([num(x), num(y), num(f.re), num(f.im)]));
        }
    }
    json!({"columns": ["x", "y", "re_f", "im_f"], "rows": rows})
}

fn sidecar(sol: &PieSolution) -> Value {
    json!({
        "residual_max": num(sol.residual_max),
        "verdict": sol.class_used.verdict.as_str(),
        "condition_II": sol.condition_ii.as_ref().map(condition_ii_json),
        "excluded_slices": sol.excluded_slices.iter().map(|&y| num(y)).collect::<Vec<_>>(),
    })
}

/// `out/solution.csv` → `out/solution.sidecar.json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}.sidecar.json"))
}

pub fn cmd_solve(job: &JobConfig, sink: &mut Sink) -> Result<(), CliError> {
    let kernel = job.kernel()?;
    let g = job.rhs(&kernel)?;
    let kappa = job.kappa()?;
    let opts = SolveOptions {
        y_depth: job.discretization.y_depth,
        zero_tol: job.tolerances.zero_tol,
        measure_tol: job.tolerances.measure_tol,
        ..SolveOptions::default()
    };
    let path = job.output.path.as_deref();
    let result = solve_with(
        &kernel,
        &g,
        kappa,
        &job.x_rule(&kernel),
        &job.y_rule(&kernel),
        &opts,
    );
    let sol = match result {
        Ok(sol) => sol,
        Err(e) => {
            let err = CliError::from(e);
            if let (Some(p), Some(report)) = (path, err.report()) {
                write_file(&sidecar_path(p), &pretty(report))?;
            }
            return Err(err);
        }
    };
    let body = match job.output.format {
        Format::Csv => solution_csv(&sol),
        Format::Json => pretty(&solution_json(&sol)),
    };
    let summary = pretty(&sidecar(&sol));
    if sink.emit(path, &body)? {
        write_file(&sidecar_path(path.expect("emitted to a file")), &summary)?;
        sink.print(&summary)?;
    }
    Ok(())
}

pub fn cmd_eigen(job: &JobConfig, sink: &mut Sink) -> Result<(), CliError> {
    let kernel = job.kernel()?;
    let rep = detect_eigenvalues(
        &kernel,
        &job.x_rule(&kernel),
        job.discretization.y_depth,
        job.tolerances.eig_tol,
        job.tolerances.measure_tol,
    )?;
    let curves: Vec<Value> = rep
        .y_nodes
        .iter()
        .zip(&rep.curves)
        .map(|(&y, vals)| json!({"y": num(y), "eigenvalues": vals.iter().map(|&v| cplx(v)).collect::<Vec<_>>()}))
        .collect();
    let detected: Vec<Value> = rep
        .detected
        .iter()
        .map(|d| json!({"lambda": cplx(d.lambda), "support": [num(d.support.0), num(d.support.1)]}))
        .collect();
    let body = pretty(&json!({"curves": curves, "detected": detected}));
    if sink.emit(job.output.path.as_deref(), &body)? {
        sink.print(&pretty(&json!({"detected": detected})))?;
    }
    Ok(())
}

pub fn cmd_verify(settings: &VerifySettings, sink: &mut Sink) -> Result<(), CliError> {
    let outcomes = run_all(settings);
    let mut table = String::new();
    for o in &outcomes {
        let _ = writeln!(table, "{o}");
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    let _ = writeln!(
        table,
        "{} of {} criteria passed",
        outcomes.len() - failed,
        outcomes.len()
    );
    sink.print(&table)?;
    if failed > 0 {
        return Err(CliError::VerifyFailed {
            failed,
            total: outcomes.len(),
        });
    }
    Ok(())
}
