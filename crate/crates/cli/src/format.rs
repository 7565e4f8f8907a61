//! Number formatting shared by the text and JSON reports.
//!
//! Every reported number is first rounded to six significant digits, so
//! the JSON value and the text rendering carry the same decimal and
//! parsing the JSON recovers exactly what was printed.

use serde_json::Value;

/// Rounds to six significant digits.
pub fn sig6(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.5e}").parse().expect("formatted float parses")
}

/// Text rendering of [`sig6`].
pub fn fmt6(x: f64) -> String {
    let v = sig6(x);
    let a = v.abs();
    if v == 0.0 || (1e-4..1e15).contains(&a) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:.5e}")
    }
}

/// JSON number of [`sig6`], or `null` when not finite.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(sig6(x)).map_or(Value::Null, Value::Number)
}
