//! Individuality of consistency notions under mixing.
//!
//! A property is individual when it can hold for a mixture
//! `lambda rho1 + (1 - lambda) rho2` only if it holds for one of the
//! components. Searches here look for the opposite: the property holds for
//! the mixture and fails for both components. A grid cannot cover every
//! `lambda`, so an empty result is evidence, not proof; one witness is
//! enough to refute individuality.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::consistency::{
    check_linear_positivity, check_medium_decoherence, check_weak_decoherence,
};
use crate::error::{Error, Result};
use crate::histories::{History, HistoryFamily, HistoryId};
use crate::matcore::{
    commutator_norm, inner, CVector, DensityOperator, Projection, ToleranceConfig,
};
use crate::mirror::{check_self_decoherence, search_mirror, SearchOptions};

type Evaluator = dyn Fn(&HistoryFamily, &DensityOperator) -> Result<bool> + Send + Sync;

/// A named yes/no property of a family under a state.
#[derive(Clone)]
pub struct PropertyPredicate {
    pub name: String,
    evaluator: Arc<Evaluator>,
}

impl fmt::Debug for PropertyPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PropertyPredicate")
            .field("name", &self.name)
            .finish()
    }
}

impl PropertyPredicate {
    pub fn new(
        name: impl Into<String>,
        evaluator: impl Fn(&HistoryFamily, &DensityOperator) -> Result<bool> + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            evaluator: Arc::new(evaluator),
        }
    }

    pub fn evaluate(&self, family: &HistoryFamily, rho: &DensityOperator) -> Result<bool> {
        (self.evaluator)(family, rho)
    }

    pub fn weak(tol: ToleranceConfig) -> Self {
        Self::new("weak", move |f, r| {
            Ok(check_weak_decoherence(f, r, &tol)?.verdict)
        })
    }

    pub fn medium(tol: ToleranceConfig) -> Self {
        Self::new("medium", move |f, r| {
            Ok(check_medium_decoherence(f, r, &tol)?.verdict)
        })
    }

    pub fn linear_positive(tol: ToleranceConfig) -> Self {
        Self::new("linear-positive", move |f, r| {
            Ok(check_linear_positivity(f, r, &tol)?.verdict)
        })
    }

    /// Self-decoherence, trying `mirrors` first and searching otherwise.
    pub fn self_decoherence(
        mirrors: Option<BTreeMap<HistoryId, Projection>>,
        options: SearchOptions,
        tol: ToleranceConfig,
    ) -> Self {
        Self::new("self-decoherence", move |f, r| {
            Ok(check_self_decoherence(f, r, mirrors.as_ref(), &options, &tol)?.verdict)
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndividualityWitness {
    pub lambda: f64,
    pub holds_on_mixture: bool,
    pub holds_on_rho1: bool,
    pub holds_on_rho2: bool,
}

impl IndividualityWitness {
    pub fn is_violation(&self) -> bool {
        self.holds_on_mixture && !self.holds_on_rho1 && !self.holds_on_rho2
    }
}

/// `lambda rho1 + (1 - lambda) rho2` for `0 < lambda < 1`.
pub fn mixture(
    rho1: &DensityOperator,
    rho2: &DensityOperator,
    lambda: f64,
) -> Result<DensityOperator> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::LambdaOutOfRange(lambda));
    }
    if rho1.dim() != rho2.dim() {
        return Err(Error::DimensionMismatch(rho1.dim(), rho2.dim()));
    }
    let m = rho1.matrix().as_matrix().map(|z| z * lambda)
        + rho2.matrix().as_matrix().map(|z| z * (1.0 - lambda));
    Ok(DensityOperator::from_trusted(m))
}

/// `0.1, 0.2, ..., 0.9`.
pub fn default_lambda_grid() -> Vec<f64> {
    (1..=9).map(|k| k as f64 / 10.0).collect()
}

/// Witnesses where the property holds for the mixture but for neither
/// component. Components are evaluated once.
pub fn individuality_violation_search(
    property: &PropertyPredicate,
    family: &HistoryFamily,
    rho1: &DensityOperator,
    rho2: &DensityOperator,
    lambda_grid: &[f64],
    _tol: &ToleranceConfig,
) -> Result<Vec<IndividualityWitness>> {
    let holds_on_rho1 = property.evaluate(family, rho1)?;
    let holds_on_rho2 = property.evaluate(family, rho2)?;
    let mut out = Vec::new();
    if holds_on_rho1 || holds_on_rho2 {
        return Ok(out);
    }
    for &lambda in lambda_grid {
        let rho = mixture(rho1, rho2, lambda)?;
        let witness = IndividualityWitness {
            lambda,
            holds_on_mixture: property.evaluate(family, &rho)?,
            holds_on_rho1,
            holds_on_rho2,
        };
        if witness.is_violation() {
            out.push(witness);
        }
    }
    Ok(out)
}

/// Componentwise form of M2 for a mirror of a mixture.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComponentDecomposition {
    /// `Tr[(T - E1 T) rho1]`, `Tr[(E1 - E1 T) rho1]`, then the same for `rho2`.
    pub residuals: [f64; 4],
    /// Smallest of the four traces; nonnegative up to rounding since
    /// `E1 T <= T` and `E1 T <= E1`.
    pub min_trace: f64,
    pub passed: bool,
}

pub fn mirror_component_decomposition(
    t: &Projection,
    e1: &Projection,
    rho1: &DensityOperator,
    rho2: &DensityOperator,
    lambda: f64,
    tol: &ToleranceConfig,
) -> Result<ComponentDecomposition> {
    let rho = mixture(rho1, rho2, lambda)?;
    if t.dim() != e1.dim() || t.dim() != rho.dim() {
        return Err(Error::DimensionMismatch(t.dim(), rho.dim()));
    }
    let tm = t.matrix().as_matrix();
    let em = e1.matrix().as_matrix();
    let residual = commutator_norm(tm, em);
    if residual > tol.eps_op {
        return Err(Error::PreconditionFailed(format!(
            "T and E1 do not commute (residual {residual:.3e})"
        )));
    }
    let et = em * tm;
    let a = tm - &et;
    let b = em - &et;
    let tr =
        |x: &crate::matcore::CMatrix, r: &DensityOperator| (x * r.matrix().as_matrix()).trace().re;
    let m2 = tr(&a, &rho).abs().max(tr(&b, &rho).abs());
    if m2 > tol.eps_prob {
        return Err(Error::PreconditionFailed(format!(
            "T does not satisfy M2 for the mixture (residual {m2:.3e})"
        )));
    }
    let residuals = [tr(&a, rho1), tr(&b, rho1), tr(&a, rho2), tr(&b, rho2)];
    let bound = 10.0 * tol.eps_prob;
    let min_trace = residuals.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(ComponentDecomposition {
        residuals,
        min_trace,
        passed: residuals.iter().all(|r| r.abs() <= bound) && min_trace >= -bound,
    })
}

/// Mirror search results for two pure states and their superposition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionCProbe {
    pub found_psi1: bool,
    pub found_psi2: bool,
    pub found_superposition: bool,
    /// Mirrors exist for both components but none was found for the
    /// superposition. The search is incomplete under finite tolerances, so
    /// this is a candidate only.
    pub flagged: bool,
    pub note: String,
}

pub fn condition_c_probe(
    h: &History,
    psi1: &CVector,
    psi2: &CVector,
    options: &SearchOptions,
    tol: &ToleranceConfig,
) -> Result<ConditionCProbe> {
    if psi1.len() != psi2.len() {
        return Err(Error::DimensionMismatch(psi1.len(), psi2.len()));
    }
    let (n1, n2) = (psi1.norm(), psi2.norm());
    let overlap = inner(psi1, psi2).norm() / (n1 * n2);
    if (1.0 - overlap).abs() <= tol.eps_eig {
        return Err(Error::PreconditionFailed("states are parallel".into()));
    }
    let sum = psi1.map(|z| z / n1) + psi2.map(|z| z / n2);
    let found = |psi: &CVector| -> Result<bool> {
        let rho = DensityOperator::pure(psi)?;
        Ok(search_mirror(h, &rho, options, tol)?.is_some())
    };
    let found_psi1 = found(psi1)?;
    let found_psi2 = found(psi2)?;
    let found_superposition = found(&sum)?;
    let flagged = found_psi1 && found_psi2 && !found_superposition;
    let note = if flagged {
        "mirrors found for both states but not for the superposition; non-conclusive, the search does not certify nonexistence".into()
    } else {
        "no condition (C) failure candidate".into()
    };
    Ok(ConditionCProbe {
        found_psi1,
        found_psi2,
        found_superposition,
        flagged,
        note,
    })
}
