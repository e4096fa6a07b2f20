//! Analysis reports and the shared number formatting.

use bloch_wco::holo::SelfMapReport;
use bloch_wco::wco::DirectNorm;
use bloch_wco::{Classification, HinfReport, NormBounds, Point, PointwiseFields, SupConfig, SupEstimate};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::AnalysisConfig;

/// Significant digits of every number written by the tool.
pub const SIG_DIGITS: usize = 9;

/// `x` rounded to [`SIG_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIG_DIGITS - 1, x).parse().unwrap_or(x)
}

/// Short decimal text for `x` after [`round_sig`].
pub fn fmt_num(x: f64) -> String {
    let r = round_sig(x);
    if r == 0.0 {
        "0".into()
    } else if !r.is_finite() || (1e-4..1e9).contains(&r.abs()) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64().map(round_sig).and_then(serde_json::Number::from_f64) {
                *n = x;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Pretty JSON with every float rounded to [`SIG_DIGITS`] digits.
pub fn to_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut v = serde_json::to_value(value)?;
    round_value(&mut v);
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub point: Point,
    pub fields: PointwiseFields,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Results {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounded: Option<Classification>,
    /// `sup |psi|`, reported with the boundedness check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi_hinf: Option<SupEstimate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compact: Option<Classification>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm_bounds: Option<NormBounds>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direct_norm: Option<DirectNorm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hinf: Option<HinfReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fields: Option<Vec<FieldSample>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: AnalysisConfig,
    pub seed: u64,
    pub engine: SupConfig,
    pub self_map: SelfMapReport,
    pub results: Results,
    pub timing: Timing,
}

impl Report {
    pub fn to_json(&self) -> String {
        to_json(self).expect("reports serialize")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(round_sig(1.4722194895358138), 1.47221949);
        assert_eq!(round_sig(-2.0 / 3.0), -0.666666667);
        assert_eq!(round_sig(1.0000000002343252), 1.0);
        assert_eq!(round_sig(0.0), 0.0);
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(1e-7), "1e-7");
        assert_eq!(fmt_num(0.25), "0.25");
    }

    #[test]
    fn rounding_is_idempotent() {
        for x in [std::f64::consts::PI, 1e-300, 123456789.123, -7.5e12, 0.1 + 0.2] {
            assert_eq!(round_sig(round_sig(x)), round_sig(x));
        }
    }

    #[test]
    fn json_rounds_nested_floats() {
        let v = serde_json::json!({"a": [0.1 + 0.2, 3], "b": {"c": 2.0f64.sqrt()}});
        let s = to_json(&v).unwrap();
        assert!(s.contains("0.3"), "{s}");
        assert!(s.contains("1.41421356"), "{s}");
        assert!(s.contains("3"), "{s}");
    }
}
