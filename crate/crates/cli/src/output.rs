use crate::commands::CliError;
use num_complex::Complex64;
use serde_json::{json, Value};
use std::path::Path;

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn csv_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

/// JSON number, or `null` for NaN and infinities.
pub fn num(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

pub fn cplx(v: Complex64) -> Value {
    json!({"re": num(v.re), "im": num(v.im)})
}

pub fn write_file(path: &Path, body: &str) -> Result<(), CliError> {
    std::fs::write(path, body).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_floats_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02e23, 0.0, f64::MIN_POSITIVE] {
            let s = csv_float(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
        assert_eq!(csv_float(f64::NAN), "NaN");
        assert_eq!(csv_float(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn non_finite_json_is_null() {
        assert_eq!(num(f64::INFINITY), Value::Null);
        assert_eq!(
            cplx(Complex64::new(1.0, 0.0)),
            json!({"re": 1.0, "im": 0.0})
        );
    }
}
