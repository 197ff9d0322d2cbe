//! Family names, their parameters and constraints, and the mapping from a
//! parameter map to a solved system.

use std::collections::BTreeMap;

use fpe_core::exceptional::{build_fpe, ExceptionalParams, Rho2Choice, Variant};
use fpe_core::families::{
    diffusion, gamma_deformed_exponential, linear_drift_family, moment_closed_form, moment_deformed_diffusion,
    GammaParams, LinearDriftParams,
};
use fpe_core::similarity::{DomainKind, SimilaritySolution};
use serde::Serialize;

use crate::error::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct ParamInfo {
    pub name: &'static str,
    pub default: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyInfo {
    pub name: &'static str,
    pub group: &'static str,
    pub summary: &'static str,
    pub constraints: &'static str,
    pub domain: &'static str,
    pub params: Vec<ParamInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<&'static str>,
}

fn params(list: &[(&'static str, &'static str)]) -> Vec<ParamInfo> {
    list.iter().map(|&(name, default)| ParamInfo { name, default }).collect()
}

const EXC_NOTE: &str = "rho2 is one of 1, z, sin, cos, xi, xi1 (xi uses the sign-adjusted deforming polynomial)";
const MOVING_NOTE: &str =
    "moving boundary: z in [0, pi/2], the right wall moves as x(t)=πt^α/2; verified in the similarity frame";

pub fn families() -> Vec<FamilyInfo> {
    vec![
        FamilyInfo {
            name: "diffusion",
            group: "linear-drift",
            summary: "heat kernel, rho1=0, rho2=1, alpha=1/2",
            constraints: "none",
            domain: "real line",
            params: vec![],
            note: None,
        },
        FamilyInfo {
            name: "exponential",
            group: "linear-drift",
            summary: "branch lambda=alpha: rho1=alpha z - mu, rho2=sigma, W=|mu/(sigma t^α)| exp(-mu x/(sigma t^α))",
            constraints: "mu/sigma != 0, alpha != 0",
            domain: "x>=0 for mu/sigma>0, x<=0 for mu/sigma<0",
            params: params(&[("mu", "1"), ("sigma", "1"), ("alpha", "1")]),
            note: None,
        },
        FamilyInfo {
            name: "gaussian",
            group: "linear-drift",
            summary: "branch lambda!=alpha: rho1=lambda z - mu, rho2=sigma, Gaussian in z with mean -mu/(alpha-lambda)",
            constraints: "(sigma>0, lambda<alpha) or (sigma<0, lambda>alpha)",
            domain: "real line",
            params: params(&[("lambda", "0"), ("mu", "1"), ("sigma", "1"), ("alpha", "1")]),
            note: None,
        },
        FamilyInfo {
            name: "gamma",
            group: "gamma-deformed",
            summary: "exponential branch deformed by Q=z^(nu-1): gamma density with shape nu, rate mu/sigma",
            constraints: "nu>0, mu/sigma>0, alpha != 0",
            domain: "x>=0",
            params: params(&[("nu", "2"), ("mu", "1"), ("sigma", "1"), ("alpha", "1")]),
            note: None,
        },
        FamilyInfo {
            name: "moment",
            group: "moment-deformed",
            summary: "half-line diffusion deformed by Q=z^k, drift D1=k/x, alpha=1/2",
            constraints: "integer k>=0",
            domain: "x>=0",
            params: params(&[("k", "2")]),
            note: None,
        },
        FamilyInfo {
            name: "L1",
            group: "exceptional",
            summary: "deformed radial oscillator, type L1",
            constraints: "1<=ell<=10, g>0",
            domain: "x>=0",
            params: params(&[("ell", "1"), ("g", "1"), ("alpha", "0.5"), ("rho2", "1")]),
            note: Some(EXC_NOTE),
        },
        FamilyInfo {
            name: "L2",
            group: "exceptional",
            summary: "deformed radial oscillator, type L2",
            constraints: "1<=ell<=10, g>0, deforming polynomial free of zeros on eta>=0 (checked)",
            domain: "x>=0",
            params: params(&[("ell", "1"), ("g", "1"), ("alpha", "0.5"), ("rho2", "1")]),
            note: Some(EXC_NOTE),
        },
        FamilyInfo {
            name: "J1",
            group: "exceptional",
            summary: "deformed Pöschl-Teller potential, type J1",
            constraints: "1<=ell<=10, g>h>0",
            domain: "0<=x<=πt^α/2",
            params: params(&[("ell", "1"), ("g", "2"), ("h", "1"), ("alpha", "0.5"), ("rho2", "1")]),
            note: Some(MOVING_NOTE),
        },
        FamilyInfo {
            name: "J2",
            group: "exceptional",
            summary: "deformed Pöschl-Teller potential, type J2",
            constraints: "1<=ell<=10, h>g>0",
            domain: "0<=x<=πt^α/2",
            params: params(&[("ell", "1"), ("g", "1"), ("h", "2"), ("alpha", "0.5"), ("rho2", "1")]),
            note: Some(MOVING_NOTE),
        },
    ]
}

pub fn family_info(name: &str) -> Result<FamilyInfo, CliError> {
    families()
        .into_iter()
        .find(|f| f.name == name)
        .ok_or_else(|| CliError::Usage(format!("unknown family {name:?}; see `fpe list`")))
}

/// How the Monte Carlo and PDE suites should treat an entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regularity {
    /// Smooth coefficients, no walls.
    Smooth,
    /// A reflecting wall with regular coefficients.
    Wall,
    /// Drift singular at a wall.
    SingularDrift,
}

/// A resolved catalog entry.
#[derive(Clone)]
pub struct Entry {
    pub family: &'static str,
    pub params: BTreeMap<String, String>,
    pub solution: SimilaritySolution,
    pub regularity: Regularity,
    closed: Option<ClosedForm>,
}

#[derive(Clone, Copy)]
enum ClosedForm {
    Linear(LinearDriftParams),
    Gamma(GammaParams),
    Moment(u32),
}

impl Entry {
    /// The hand-coded density, where one exists.
    pub fn closed_form(&self, x: f64, t: f64) -> Option<f64> {
        match self.closed? {
            ClosedForm::Linear(p) => p.closed_form(x, t).ok(),
            ClosedForm::Gamma(p) => p.closed_form(x, t).ok(),
            ClosedForm::Moment(k) => Some(moment_closed_form(k, x, t)),
        }
    }

    pub fn has_closed_form(&self) -> bool {
        self.closed.is_some()
    }

    pub fn is_moving(&self) -> bool {
        self.solution.support().kind == DomainKind::ScaledInterval
    }

    /// `family k=v ...` for messages and logs.
    pub fn label(&self) -> String {
        let mut s = self.family.to_string();
        for (k, v) in &self.params {
            s.push_str(&format!(" {k}={v}"));
        }
        s
    }
}

fn number(map: &BTreeMap<String, String>, key: &str) -> Result<f64, CliError> {
    let raw = &map[key];
    raw.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| CliError::Usage(format!("parameter {key}={raw:?} is not a finite number")))
}

fn integer(map: &BTreeMap<String, String>, key: &str) -> Result<u32, CliError> {
    let raw = &map[key];
    raw.parse::<u32>()
        .map_err(|_| CliError::Usage(format!("parameter {key}={raw:?} is not a non-negative integer")))
}

/// Fills defaults, rejects unknown keys and solves the family.
pub fn build(name: &str, given: &BTreeMap<String, String>) -> Result<Entry, CliError> {
    let info = family_info(name)?;
    let mut map: BTreeMap<String, String> =
        info.params.iter().map(|p| (p.name.to_string(), p.default.to_string())).collect();
    for (k, v) in given {
        if !map.contains_key(k) {
            let known: Vec<&str> = info.params.iter().map(|p| p.name).collect();
            return Err(CliError::Usage(format!(
                "family {name} has no parameter {k:?} (known: {})",
                if known.is_empty() { "none".to_string() } else { known.join(", ") }
            )));
        }
        map.insert(k.clone(), v.clone());
    }
    let (solution, regularity, closed) = match info.name {
        "diffusion" => (diffusion(), Regularity::Smooth, Some(ClosedForm::Linear(LinearDriftParams::new(0.0, 0.0, 1.0, 0.5)))),
        "exponential" => {
            let alpha = number(&map, "alpha")?;
            let p = LinearDriftParams::new(alpha, number(&map, "mu")?, number(&map, "sigma")?, alpha);
            (linear_drift_family(p)?, Regularity::Wall, Some(ClosedForm::Linear(p)))
        }
        "gaussian" => {
            let p = LinearDriftParams::new(
                number(&map, "lambda")?,
                number(&map, "mu")?,
                number(&map, "sigma")?,
                number(&map, "alpha")?,
            );
            if p.lambda == p.alpha {
                return Err(CliError::Usage("gaussian needs lambda != alpha; use the exponential family".into()));
            }
            (linear_drift_family(p)?, Regularity::Smooth, Some(ClosedForm::Linear(p)))
        }
        "gamma" => {
            let p = GammaParams {
                nu: number(&map, "nu")?,
                mu: number(&map, "mu")?,
                sigma: number(&map, "sigma")?,
                alpha: number(&map, "alpha")?,
            };
            let regularity = if p.nu == 1.0 { Regularity::Wall } else { Regularity::SingularDrift };
            (gamma_deformed_exponential(p)?, regularity, Some(ClosedForm::Gamma(p)))
        }
        "moment" => {
            let k = integer(&map, "k")?;
            let regularity = if k == 0 { Regularity::Wall } else { Regularity::SingularDrift };
            (moment_deformed_diffusion(k)?, regularity, Some(ClosedForm::Moment(k)))
        }
        _ => {
            let variant: Variant = info.name.parse()?;
            let ell = integer(&map, "ell")?;
            if ell == 0 {
                return Err(CliError::Usage("ell must be at least 1".into()));
            }
            let g = number(&map, "g")?;
            let h = if variant.is_laguerre() { 0.0 } else { number(&map, "h")? };
            let rho2: Rho2Choice = map["rho2"].parse()?;
            let p = ExceptionalParams::new(variant, ell, g, h)?;
            (build_fpe(&p, rho2, number(&map, "alpha")?)?, Regularity::SingularDrift, None)
        }
    };
    Ok(Entry {
        family: info.name,
        params: map,
        solution,
        regularity,
        closed,
    })
}

fn kv(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

/// The parameter sets the normalization, equivalence and self-similarity
/// checks sweep over.
pub fn standard_entries() -> Result<Vec<Entry>, CliError> {
    let mut out = vec![
        build("exponential", &BTreeMap::new())?,
        build("gaussian", &BTreeMap::new())?,
    ];
    for nu in ["2", "3"] {
        out.push(build("gamma", &kv(&[("nu", nu.into())]))?);
    }
    for k in 1..=4 {
        out.push(build("moment", &kv(&[("k", k.to_string())]))?);
    }
    for name in ["L1", "L2"] {
        for ell in ["1", "2"] {
            for g in ["1", "2.5"] {
                out.push(build(name, &kv(&[("ell", ell.into()), ("g", g.into())]))?);
            }
        }
    }
    for ell in ["1", "2"] {
        for (g, h) in [("2", "1"), ("3", "1.5")] {
            out.push(build("J1", &kv(&[("ell", ell.into()), ("g", g.into()), ("h", h.into())]))?);
            out.push(build("J2", &kv(&[("ell", ell.into()), ("g", h.into()), ("h", g.into())]))?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_family_builds_with_defaults() {
        for f in families() {
            let e = build(f.name, &BTreeMap::new()).unwrap_or_else(|e| panic!("{}: {e}", f.name));
            assert_eq!(e.params.len(), f.params.len());
        }
    }

    #[test]
    fn standard_sweep_has_24_entries() {
        assert_eq!(standard_entries().unwrap().len(), 24);
    }

    #[test]
    fn rejects_unknown_and_invalid() {
        assert!(matches!(build("nope", &BTreeMap::new()), Err(CliError::Usage(_))));
        let bad = kv(&[("g", "1".into()), ("h", "2".into())]);
        let err = build("J1", &bad).err().unwrap();
        assert!(err.to_string().contains("g>h>0"), "{err}");
        assert!(build("diffusion", &kv(&[("mu", "1".into())])).is_err());
        assert!(build("exponential", &kv(&[("mu", "abc".into())])).is_err());
    }

    #[test]
    fn closed_forms_where_expected() {
        assert!(build("gamma", &BTreeMap::new()).unwrap().has_closed_form());
        assert!(!build("L1", &BTreeMap::new()).unwrap().has_closed_form());
        assert!(build("J2", &BTreeMap::new()).unwrap().is_moving());
    }
}
