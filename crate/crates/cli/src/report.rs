//! The verification report written by `fpe verify` and `fpe report`.
//! `schemas/report.schema.json` describes the same shape.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::catalog::Entry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Pde,
    Mc,
    Residual,
    All,
}

/// Measured values, or the thresholds they are held to. The first five keys
/// are always present (possibly `null`); the rest only when computed.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub l1: Option<f64>,
    pub linf: Option<f64>,
    pub ks: Option<f64>,
    pub mass_drift: Option<f64>,
    pub residual_max: Option<f64>,
    /// `max |∫W dx − 1|` by quadrature over several times.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalization: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_integral_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary_flux: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub self_similarity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed_form_rel: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moment_z_max: Option<f64>,
}

impl Metrics {
    fn pairs(&self) -> [(&'static str, Option<f64>); 11] {
        [
            ("l1", self.l1),
            ("linf", self.linf),
            ("ks", self.ks),
            ("mass_drift", self.mass_drift),
            ("residual_max", self.residual_max),
            ("normalization", self.normalization),
            ("first_integral_max", self.first_integral_max),
            ("boundary_flux", self.boundary_flux),
            ("self_similarity", self.self_similarity),
            ("closed_form_rel", self.closed_form_rel),
            ("moment_z_max", self.moment_z_max),
        ]
    }

    /// Keys whose threshold is set and whose value is missing, non-finite
    /// or above it.
    pub fn failures(&self, thresholds: &Metrics) -> Vec<&'static str> {
        self.pairs()
            .into_iter()
            .zip(thresholds.pairs())
            .filter_map(|((key, v), (_, limit))| {
                let limit = limit?;
                match v {
                    Some(v) if v.is_finite() && v <= limit => None,
                    _ => Some(key),
                }
            })
            .collect()
    }

    /// Takes every value set in `other`.
    pub fn absorb(&mut self, other: &Metrics) {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(l1, linf, ks, mass_drift, residual_max, normalization, first_integral_max, boundary_flux, self_similarity, closed_form_rel, moment_z_max);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorInfo {
    pub kind: String,
    pub message: String,
    pub stage: Suite,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub family: String,
    pub params: BTreeMap<String, Value>,
    pub suite: Suite,
    pub metrics: Metrics,
    pub thresholds: Metrics,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorInfo>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub details: Option<Value>,
}

/// Numeric parameters as JSON numbers, the rest as strings.
pub fn json_params(entry: &Entry) -> BTreeMap<String, Value> {
    entry
        .params
        .iter()
        .map(|(k, v)| {
            let value = match v.parse::<f64>() {
                Ok(x) if x.is_finite() => serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::String(v.clone())),
                _ => Value::String(v.clone()),
            };
            (k.clone(), value)
        })
        .collect()
}

impl Report {
    /// Single-line JSON.
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }
}

/// A JSON array with one report per line.
pub fn array_lines(reports: &[Report]) -> String {
    let body: Vec<String> = reports.iter().map(Report::to_line).collect();
    format!("[\n{}\n]\n", body.join(",\n"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failures_respect_thresholds() {
        let m = Metrics {
            l1: Some(1e-4),
            ks: Some(f64::NAN),
            ..Default::default()
        };
        let t = Metrics {
            l1: Some(5e-4),
            ks: Some(0.01),
            mass_drift: Some(1e-10),
            ..Default::default()
        };
        assert_eq!(m.failures(&t), vec!["ks", "mass_drift"]);
        assert!(m.failures(&Metrics::default()).is_empty());
    }

    #[test]
    fn required_keys_serialize_as_null() {
        let v: Value = serde_json::to_value(Metrics::default()).unwrap();
        let obj = v.as_object().unwrap();
        assert_eq!(obj.len(), 5);
        assert!(obj["l1"].is_null());
    }

    #[test]
    fn array_has_one_line_per_report() {
        let r = Report {
            family: "diffusion".into(),
            params: BTreeMap::new(),
            suite: Suite::All,
            metrics: Metrics::default(),
            thresholds: Metrics::default(),
            pass: true,
            error: None,
            details: None,
        };
        let text = array_lines(&[r.clone(), r]);
        assert_eq!(text.lines().count(), 4);
        let back: Vec<Report> = serde_json::from_str(&text).unwrap();
        assert_eq!(back.len(), 2);
    }
}
