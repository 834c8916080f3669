//! JSON instance files.
//!
//! ```json
//! {"problem": "trs", "n": 1, "Q": [[-1]], "c": [-0.75], "radius": 1}
//! {"problem": "prs", "n": 1, "Q": [[-1]], "c": [-0.75], "sigma": 1, "p": 3}
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::prs::PrsInstance;
use crate::trs::TrsInstance;

/// Relative symmetry tolerance accepted in files.
pub const FILE_SYMMETRY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Trs,
    Prs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub problem: ProblemKind,
    pub n: usize,
    #[serde(rename = "Q")]
    pub q: Vec<Vec<f64>>,
    pub c: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub radius: Option<f64>,
}

/// A validated instance. Trust-region instances are stored already scaled
/// to the unit ball; `radius` undoes the scaling.
#[derive(Debug, Clone, PartialEq)]
pub enum Instance {
    Trs { unit: TrsInstance, radius: f64 },
    Prs(PrsInstance),
}

fn parse_err(field: &str, message: impl Into<String>) -> Error {
    Error::Parse { field: field.to_string(), message: message.into() }
}

fn number(v: &Value, field: &str) -> Result<f64> {
    let x = v.as_f64().ok_or_else(|| parse_err(field, format!("expected a number, got {v}")))?;
    if !x.is_finite() {
        return Err(parse_err(field, "not finite"));
    }
    Ok(x)
}

fn vector(v: &Value, field: &str) -> Result<Vec<f64>> {
    let arr = v.as_array().ok_or_else(|| parse_err(field, "expected an array"))?;
    arr.iter().enumerate().map(|(i, x)| number(x, &format!("{field}[{i}]"))).collect()
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self> {
        let root: Value = serde_json::from_str(text).map_err(|e| parse_err("<document>", e.to_string()))?;
        let obj = root.as_object().ok_or_else(|| parse_err("<document>", "expected a JSON object"))?;
        for key in obj.keys() {
            if !matches!(key.as_str(), "problem" | "n" | "Q" | "c" | "sigma" | "p" | "radius") {
                return Err(parse_err(key, "unknown field"));
            }
        }
        let get = |k: &str| obj.get(k).ok_or_else(|| parse_err(k, "missing"));
        let problem = match get("problem")?.as_str() {
            Some("trs") => ProblemKind::Trs,
            Some("prs") => ProblemKind::Prs,
            _ => return Err(parse_err("problem", "expected \"trs\" or \"prs\"")),
        };
        let n = get("n")?.as_u64().ok_or_else(|| parse_err("n", "expected a nonnegative integer"))? as usize;
        if n == 0 {
            return Err(parse_err("n", "must be at least 1"));
        }
        let rows = get("Q")?.as_array().ok_or_else(|| parse_err("Q", "expected an array of rows"))?;
        let q: Vec<Vec<f64>> =
            rows.iter().enumerate().map(|(i, r)| vector(r, &format!("Q[{i}]"))).collect::<Result<_>>()?;
        let c = vector(get("c")?, "c")?;
        let opt = |k: &str| obj.get(k).filter(|v| !v.is_null()).map(|v| number(v, k)).transpose();
        let file = InstanceFile { problem, n, q, c, sigma: opt("sigma")?, p: opt("p")?, radius: opt("radius")? };
        file.validate_fields()?;
        Ok(file)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    fn validate_fields(&self) -> Result<()> {
        let n = self.n;
        if self.q.len() != n {
            return Err(parse_err("Q", format!("expected {n} rows, got {}", self.q.len())));
        }
        if let Some((i, r)) = self.q.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(parse_err(&format!("Q[{i}]"), format!("expected {n} entries, got {}", r.len())));
        }
        if self.c.len() != n {
            return Err(parse_err("c", format!("expected {n} entries, got {}", self.c.len())));
        }
        let q = self.matrix()?;
        if q.asymmetry() > FILE_SYMMETRY_TOL * q.frobenius_norm() {
            return Err(parse_err("Q", format!("not symmetric (max |Q_ij − Q_ji| = {:e})", q.asymmetry())));
        }
        match self.problem {
            ProblemKind::Trs => {
                if self.sigma.is_some() {
                    return Err(parse_err("sigma", "only valid for problem \"prs\""));
                }
                if self.p.is_some() {
                    return Err(parse_err("p", "only valid for problem \"prs\""));
                }
                if let Some(r) = self.radius {
                    if !(r > 0.0) {
                        return Err(parse_err("radius", format!("must be positive, got {r}")));
                    }
                }
            }
            ProblemKind::Prs => {
                if self.radius.is_some() {
                    return Err(parse_err("radius", "only valid for problem \"trs\""));
                }
                let sigma = self.sigma.ok_or_else(|| parse_err("sigma", "missing"))?;
                if !(sigma > 0.0) {
                    return Err(parse_err("sigma", format!("must be positive, got {sigma}")));
                }
                let p = self.p.ok_or_else(|| parse_err("p", "missing"))?;
                if !(p > 2.0) {
                    return Err(parse_err("p", format!("must exceed 2, got {p}")));
                }
            }
        }
        Ok(())
    }

    pub fn matrix(&self) -> Result<Matrix> {
        Matrix::from_rows(&self.q)
    }

    /// Symmetrizes `Q` (files may be off by up to `1e-9·‖Q‖`) and applies
    /// the radius scaling `Q ← Δ²Q`, `c ← Δc`.
    pub fn to_instance(&self) -> Result<Instance> {
        self.validate_fields()?;
        let q = self.matrix()?;
        let q = q.add_scaled(1.0, &q.transpose()).scaled(0.5);
        match self.problem {
            ProblemKind::Trs => {
                let radius = self.radius.unwrap_or(1.0);
                let c: Vec<f64> = self.c.iter().map(|v| radius * v).collect();
                Ok(Instance::Trs { unit: TrsInstance::new(q.scaled(radius * radius), c)?, radius })
            }
            ProblemKind::Prs => Ok(Instance::Prs(PrsInstance::new(
                q,
                self.c.clone(),
                self.sigma.expect("validated"),
                self.p.expect("validated"),
            )?)),
        }
    }

    pub fn from_trs(inst: &TrsInstance) -> Self {
        InstanceFile {
            problem: ProblemKind::Trs,
            n: inst.dim(),
            q: inst.q().to_rows(),
            c: inst.c().to_vec(),
            sigma: None,
            p: None,
            radius: None,
        }
    }

    pub fn from_prs(inst: &PrsInstance) -> Self {
        InstanceFile {
            problem: ProblemKind::Prs,
            n: inst.dim(),
            q: inst.q().to_rows(),
            c: inst.c().to_vec(),
            sigma: Some(inst.sigma()),
            p: Some(inst.p()),
            radius: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field_of(e: Error) -> String {
        match e {
            Error::Parse { field, .. } => field,
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parses_trs() {
        let f = InstanceFile::parse(r#"{"problem":"trs","n":1,"Q":[[-1]],"c":[-0.75]}"#).unwrap();
        match f.to_instance().unwrap() {
            Instance::Trs { unit, radius } => {
                assert_eq!(radius, 1.0);
                assert_eq!(unit.c(), &[-0.75]);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn names_bad_fields() {
        let p = InstanceFile::parse(r#"{"problem":"prs","n":1,"Q":[[-1]],"c":[0],"sigma":1,"p":2}"#).unwrap_err();
        assert_eq!(field_of(p), "p");
        let s = InstanceFile::parse(r#"{"problem":"prs","n":1,"Q":[[-1]],"c":[0],"sigma":0,"p":3}"#).unwrap_err();
        assert_eq!(field_of(s), "sigma");
        let q = InstanceFile::parse(r#"{"problem":"trs","n":2,"Q":[[0,1],[0,0]],"c":[0,0]}"#).unwrap_err();
        assert_eq!(field_of(q), "Q");
        let c = InstanceFile::parse(r#"{"problem":"trs","n":2,"Q":[[0,1],[1,0]],"c":[0,"x"]}"#).unwrap_err();
        assert_eq!(field_of(c), "c[1]");
        let m = InstanceFile::parse(r#"{"problem":"trs","n":1,"Q":[[1]]}"#).unwrap_err();
        assert_eq!(field_of(m), "c");
    }

    #[test]
    fn radius_scales_instance() {
        let f = InstanceFile::parse(r#"{"problem":"trs","n":1,"Q":[[-1]],"c":[-0.75],"radius":2}"#).unwrap();
        let Instance::Trs { unit, radius } = f.to_instance().unwrap() else { panic!() };
        assert_eq!(radius, 2.0);
        assert_eq!(unit.q()[(0, 0)], -4.0);
        assert_eq!(unit.c(), &[-1.5]);
    }

    #[test]
    fn round_trip_is_exact() {
        let f = InstanceFile {
            problem: ProblemKind::Prs,
            n: 2,
            q: vec![vec![0.1, 1.0 / 3.0], vec![1.0 / 3.0, -std::f64::consts::E]],
            c: vec![std::f64::consts::PI, -1e-300],
            sigma: Some(0.7),
            p: Some(2.5),
            radius: None,
        };
        assert_eq!(InstanceFile::parse(&f.to_json()).unwrap(), f);
    }
}
