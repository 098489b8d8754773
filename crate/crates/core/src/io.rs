//! Problem and report files.
//!
//! Both are JSON documents. Complex matrices are stored as two equal-shaped
//! real arrays `re` and `im`. The canonical writer sorts object keys and
//! prints every float with 17 significant digits, so parsing and writing a
//! canonical document reproduces it byte for byte and floats round-trip
//! exactly.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::consistency::ConsistencyReport;
use crate::error::{Error, Result};
use crate::histories::{make_resolution, HistoryFamily, HistoryId};
use crate::matcore::{
    validate_density, validate_projection, DensityOperator, Projection, SquareComplexMatrix,
    ToleranceConfig,
};
use crate::mirror::SelfDecoherenceReport;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixEntry {
    pub re: Vec<Vec<f64>>,
    /// Omitted means a real matrix.
    #[serde(default)]
    pub im: Vec<Vec<f64>>,
}

impl MatrixEntry {
    pub fn from_matrix(m: &SquareComplexMatrix) -> Self {
        let (re, im) = m.to_parts();
        Self { re, im }
    }

    pub fn to_matrix(&self) -> Result<SquareComplexMatrix> {
        if self.im.is_empty() {
            let zeros: Vec<Vec<f64>> = self.re.iter().map(|r| vec![0.0; r.len()]).collect();
            return SquareComplexMatrix::from_parts(&self.re, &zeros);
        }
        SquareComplexMatrix::from_parts(&self.re, &self.im)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    Named(String),
    Mixture { components: Vec<(String, f64)> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub dim: usize,
    pub operators: BTreeMap<String, MatrixEntry>,
    pub resolutions: Vec<Vec<String>>,
    pub state: StateSpec,
    /// Keys are 1-based elementary history indices such as `"1,2"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mirrors: Option<BTreeMap<String, String>>,
}

/// A problem file resolved into validated objects.
#[derive(Debug, Clone)]
pub struct Problem {
    pub family: HistoryFamily,
    pub state: DensityOperator,
    pub mirrors: Option<BTreeMap<HistoryId, Projection>>,
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

fn history_key(id: &HistoryId) -> String {
    id.0.iter()
        .map(|k| k.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self> {
        parse_json(text)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&read_file(path)?)
    }

    /// Exports a family, a state and optional mirrors. Event `i` of
    /// resolution `k` is named `E{k}_{i}`, the state `rho`, and the mirror
    /// of history `(i, j)` is named `T{i}_{j}`.
    pub fn from_instance(
        family: &HistoryFamily,
        state: &DensityOperator,
        mirrors: Option<&BTreeMap<HistoryId, Projection>>,
    ) -> Self {
        let mut operators = BTreeMap::new();
        let mut resolutions = Vec::new();
        for (k, res) in family.resolutions().iter().enumerate() {
            let mut names = Vec::new();
            for (i, e) in res.events().iter().enumerate() {
                let name = format!("E{}_{}", k + 1, i + 1);
                operators.insert(name.clone(), MatrixEntry::from_matrix(e.matrix()));
                names.push(name);
            }
            resolutions.push(names);
        }
        operators.insert("rho".into(), MatrixEntry::from_matrix(state.matrix()));
        let mirrors = mirrors.map(|m| {
            m.iter()
                .map(|(id, t)| {
                    let name = format!(
                        "T{}",
                        id.0.iter()
                            .map(|k| k.to_string())
                            .collect::<Vec<_>>()
                            .join("_")
                    );
                    operators.insert(name.clone(), MatrixEntry::from_matrix(t.matrix()));
                    (history_key(id), name)
                })
                .collect()
        });
        Self {
            dim: family.dim(),
            operators,
            resolutions,
            state: StateSpec::Named("rho".into()),
            mirrors,
        }
    }

    /// Same content with mirror keys written as `i,j`.
    pub fn canonical(&self) -> Result<Self> {
        let mut out = self.clone();
        if let Some(m) = &self.mirrors {
            let mut keyed = BTreeMap::new();
            for (key, name) in m {
                let id: HistoryId = key
                    .parse()
                    .map_err(|e| Error::named(format!("mirror key {key:?}"), e))?;
                keyed.insert(history_key(&id), name.clone());
            }
            out.mirrors = Some(keyed);
        }
        Ok(out)
    }

    pub fn to_canonical_string(&self) -> Result<String> {
        canonical_json(&self.canonical()?)
    }

    fn operator(&self, name: &str) -> Result<SquareComplexMatrix> {
        let entry = self.operators.get(name).ok_or_else(|| {
            Error::named(
                format!("operator {name:?}"),
                Error::BadParameters("referenced but not defined".into()),
            )
        })?;
        let m = entry
            .to_matrix()
            .map_err(|e| Error::named(format!("operator {name:?}"), e))?;
        if m.dim() != self.dim {
            return Err(Error::named(
                format!("operator {name:?}"),
                Error::DimensionMismatch(self.dim, m.dim()),
            ));
        }
        Ok(m)
    }

    fn projection(&self, name: &str, tol: &ToleranceConfig) -> Result<Projection> {
        validate_projection(&self.operator(name)?, tol)
            .map_err(|e| Error::named(format!("operator {name:?}"), e))
    }

    fn density(&self, name: &str, tol: &ToleranceConfig) -> Result<DensityOperator> {
        validate_density(&self.operator(name)?, tol)
            .map_err(|e| Error::named(format!("operator {name:?}"), e))
    }

    pub fn resolve(&self, tol: &ToleranceConfig) -> Result<Problem> {
        if self.dim == 0 {
            return Err(Error::named("dim", Error::EmptyMatrix));
        }
        // Every operator must at least be a well-formed matrix.
        for name in self.operators.keys() {
            self.operator(name)?;
        }
        let mut resolutions = Vec::new();
        for (k, names) in self.resolutions.iter().enumerate() {
            let events = names
                .iter()
                .map(|n| self.projection(n, tol))
                .collect::<Result<Vec<_>>>()?;
            let label = format!("resolution {} [{}]", k + 1, names.join(", "));
            resolutions.push(make_resolution(events, tol).map_err(|e| Error::named(label, e))?);
        }
        let family = HistoryFamily::new(resolutions).map_err(|e| Error::named("resolutions", e))?;

        let state = match &self.state {
            StateSpec::Named(name) => self.density(name, tol)?,
            StateSpec::Mixture { components } => {
                if components.is_empty() {
                    return Err(Error::named("state", Error::Empty("mixture components")));
                }
                let mut m = crate::matcore::CMatrix::zeros(self.dim, self.dim);
                let mut total = 0.0;
                for (name, w) in components {
                    if !(w.is_finite() && *w > 0.0) {
                        return Err(Error::named(
                            format!("state component {name:?}"),
                            Error::BadParameters(format!("weight {w} is not positive")),
                        ));
                    }
                    total += w;
                    m += self
                        .density(name, tol)?
                        .matrix()
                        .as_matrix()
                        .map(|z| z * *w);
                }
                if (total - 1.0).abs() > tol.eps_prob {
                    return Err(Error::named(
                        "state",
                        Error::BadParameters(format!("weights sum to {total}, not 1")),
                    ));
                }
                DensityOperator::from_trusted(m)
            }
        };

        let mirrors = match &self.mirrors {
            None => None,
            Some(map) => {
                let mut out = BTreeMap::new();
                for (key, name) in map {
                    let label = format!("mirror key {key:?}");
                    let id: HistoryId = key.parse().map_err(|e| Error::named(label.clone(), e))?;
                    family.elementary(&id).map_err(|e| Error::named(label, e))?;
                    out.insert(id, self.projection(name, tol)?);
                }
                Some(out)
            }
        };
        Ok(Problem {
            family,
            state,
            mirrors,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MirrorSummary {
    pub history: String,
    pub found: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mirror: Option<MatrixEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoarseSummary {
    pub first: String,
    pub second: String,
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfDecoherenceSummary {
    pub verdict: bool,
    /// Shown but excluded from [`ReportFile::all_pass`].
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub informational: bool,
    pub histories: Vec<MirrorSummary>,
    /// Informational checks of summed mirrors on coarse-grained histories.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub coarse: Vec<CoarseSummary>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl SelfDecoherenceSummary {
    pub fn from_report(report: &SelfDecoherenceReport) -> Self {
        Self {
            verdict: report.verdict,
            informational: false,
            histories: report
                .per_history
                .iter()
                .map(|(id, cert)| MirrorSummary {
                    history: id.to_string(),
                    found: cert.is_some(),
                    max_residual: cert.as_ref().map(|c| c.max_residual()),
                    mirror: cert
                        .as_ref()
                        .map(|c| MatrixEntry::from_matrix(c.t.matrix())),
                })
                .collect(),
            coarse: report
                .coarse
                .iter()
                .map(|c| CoarseSummary {
                    first: c.first.to_string(),
                    second: c.second.to_string(),
                    verified: c.verified,
                })
                .collect(),
            notes: report.notes.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub tool: String,
    pub version: String,
    pub tolerances: ToleranceConfig,
    pub seed: u64,
    #[serde(default)]
    pub reports: Vec<ConsistencyReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub self_decoherence: Option<SelfDecoherenceSummary>,
    /// Named scalar results, e.g. probabilities and residuals.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, f64>,
    /// Named pass/fail results beyond the consistency notions.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub checks: BTreeMap<String, bool>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl ReportFile {
    pub fn new(tolerances: ToleranceConfig, seed: u64) -> Self {
        Self {
            tool: "chist".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            tolerances,
            seed,
            reports: Vec::new(),
            self_decoherence: None,
            values: BTreeMap::new(),
            checks: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        parse_json(text)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&read_file(path)?)
    }

    pub fn to_canonical_string(&self) -> Result<String> {
        canonical_json(self)
    }

    /// Every verdict and named check passed.
    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(|r| r.verdict)
            && self
                .self_decoherence
                .as_ref()
                .is_none_or(|s| s.verdict || s.informational)
            && self.checks.values().all(|&ok| ok)
    }
}

/// Canonical JSON: sorted keys, two-space indentation, arrays of scalars on
/// one line, floats as `{:.16e}`.
pub fn canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::Parse(e.to_string()))?;
    let mut out = String::new();
    write_value(&v, 0, &mut out)?;
    out.push('\n');
    Ok(out)
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn write_scalar(v: &Value, out: &mut String) -> Result<()> {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(f64::NAN);
            if !x.is_finite() {
                return Err(Error::Parse(format!("non-finite number {x}")));
            }
            write!(out, "{x:.16e}").expect("writing to a String");
        }
        other => out.push_str(&other.to_string()),
    }
    Ok(())
}

fn write_value(v: &Value, indent: usize, out: &mut String) -> Result<()> {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) if items.iter().all(is_scalar) => {
            out.push('[');
            for (k, item) in items.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                write_scalar(item, out)?;
            }
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (k, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(item, indent + 1, out)?;
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (k, key) in keys.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&Value::String((*key).clone()).to_string());
                out.push_str(": ");
                write_value(&map[*key], indent + 1, out)?;
                out.push_str(if k + 1 < keys.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
        scalar => write_scalar(scalar, out)?,
    }
    Ok(())
}
