//! The decoherence functional and the consistency notions built on it.
//!
//! All checkers except [`check_sum_rule`] and [`check_ordered_consistency`]
//! work on elementary histories only and reach coarse-grained members
//! through multilinearity of chain operators. [`check_sum_rule`] enumerates
//! coarse-grained members and compares probabilities directly; it is the
//! brute-force counterpart of [`check_weak_decoherence`].

use std::collections::HashMap;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::histories::{
    chain_operator, coarse_members, commutation_residual, elementary_histories, history_leq,
    History, HistoryFamily, HistoryId, MemberId, DEFAULT_MEMBER_CAP,
};
use crate::matcore::{
    basis_vector, inner, CMatrix, CVector, DensityOperator, Projection, ToleranceConfig, ONE,
};
use crate::sampling;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Notion {
    Weak,
    Medium,
    LinearPositive,
    Ordered,
    SumRule,
    C1Compat,
}

impl Notion {
    pub const ALL: [Notion; 6] = [
        Notion::Weak,
        Notion::Medium,
        Notion::LinearPositive,
        Notion::Ordered,
        Notion::SumRule,
        Notion::C1Compat,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Notion::Weak => "weak",
            Notion::Medium => "medium",
            Notion::LinearPositive => "linear-positive",
            Notion::Ordered => "ordered",
            Notion::SumRule => "sum-rule",
            Notion::C1Compat => "c1-compat",
        }
    }
}

impl std::str::FromStr for Notion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Notion::ALL
            .into_iter()
            .find(|n| n.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::BadParameters(format!("unknown notion {s:?}")))
    }
}

/// Verdict of one consistency notion with its worst offending pair.
///
/// `worst_residual` is the quantity compared against `eps_prob`; for
/// inequality notions it is the size of the worst violation (zero when
/// none). `worst_value` is the signed quantity at the worst pair. For
/// single-history notions both entries of `worst_pair` name the same
/// history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub notion: Notion,
    pub verdict: bool,
    pub worst_pair: Option<(String, String)>,
    pub worst_residual: f64,
    pub worst_value: f64,
    pub pair_count: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl ConsistencyReport {
    fn new(notion: Notion) -> Self {
        Self {
            notion,
            verdict: true,
            worst_pair: None,
            worst_residual: 0.0,
            worst_value: 0.0,
            pair_count: 0,
            notes: Vec::new(),
        }
    }

    /// Records a candidate; keeps it if its residual is the largest so far.
    fn observe(&mut self, residual: f64, value: f64, pair: impl FnOnce() -> (String, String)) {
        self.pair_count += 1;
        if self.worst_pair.is_none() || residual > self.worst_residual {
            self.worst_residual = residual;
            self.worst_value = value;
            self.worst_pair = Some(pair());
        }
    }

    fn finish(mut self, tol: &ToleranceConfig) -> Self {
        self.verdict = self.worst_residual <= tol.eps_prob;
        self
    }
}

fn check_same_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch(a, b));
    }
    Ok(())
}

/// `Tr(A B^dag)` without forming the product.
fn trace_with_adjoint(a: &CMatrix, b: &CMatrix) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y.conj()).sum()
}

/// `D(h1, h2) = Tr(C_h1 rho C_h2^dag)`.
pub fn decoherence_functional(
    h1: &History,
    h2: &History,
    rho: &DensityOperator,
) -> Result<Complex64> {
    check_same_dim(h1.dim(), rho.dim())?;
    check_same_dim(h2.dim(), rho.dim())?;
    check_same_dim(h1.len(), h2.len())?;
    let c1 = chain_operator(h1);
    let c2 = chain_operator(h2);
    Ok(trace_with_adjoint(
        &(c1.as_matrix() * rho.matrix().as_matrix()),
        c2.as_matrix(),
    ))
}

/// `p(h) = Tr(C_h rho C_h^dag)`, unclamped.
pub fn probability(h: &History, rho: &DensityOperator) -> Result<f64> {
    Ok(decoherence_functional(h, h, rho)?.re)
}

/// Clamp used when probabilities are shown in reports.
pub fn clamp_probability(raw: f64) -> f64 {
    raw.clamp(0.0, 1.0)
}

/// Chain operators of every elementary history, indexed by the flattened
/// multi-index (last slot fastest).
struct ElementaryTable {
    ids: Vec<HistoryId>,
    sizes: Vec<usize>,
    chains: Vec<CMatrix>,
    chain_rho: Vec<CMatrix>,
}

impl ElementaryTable {
    fn new(family: &HistoryFamily, rho: &DensityOperator) -> Result<Self> {
        check_same_dim(family.dim(), rho.dim())?;
        let elem = elementary_histories(family);
        let chains: Vec<CMatrix> = elem
            .iter()
            .map(|e| chain_operator(&e.history).into_inner())
            .collect();
        let chain_rho = chains
            .iter()
            .map(|c| c * rho.matrix().as_matrix())
            .collect();
        Ok(Self {
            ids: elem.into_iter().map(|e| e.id).collect(),
            sizes: family.resolutions().iter().map(|r| r.len()).collect(),
            chains,
            chain_rho,
        })
    }

    fn flat(&self, index: &[usize]) -> usize {
        index
            .iter()
            .zip(&self.sizes)
            .fold(0, |acc, (&i, &n)| acc * n + i)
    }

    fn functional(&self, x: usize, y: usize) -> Complex64 {
        trace_with_adjoint(&self.chain_rho[x], &self.chains[y])
    }

    fn len(&self) -> usize {
        self.chains.len()
    }
}

/// Cartesian product of option lists.
fn product<T: Clone>(options: &[Vec<T>]) -> Vec<Vec<T>> {
    options.iter().fold(vec![Vec::new()], |acc, opts| {
        acc.into_iter()
            .flat_map(|prefix| {
                opts.iter().map(move |o| {
                    let mut next = prefix.clone();
                    next.push(o.clone());
                    next
                })
            })
            .collect()
    })
}

/// Weak decoherence: `Re D(h1, h2) = 0` for every summable pair of family
/// members.
///
/// Summable members differ in one slot `k` (events `i`, `i'`) and share
/// coarse sets `A_j` elsewhere. Expanding `D` over elementary histories and
/// inverting the sum over subsets, the condition for all `A_j` is
/// equivalent to vanishing of
///
/// ```text
/// H = sum over x_j, y_j with {x_j, y_j} = B_j of Re D(x with i, y with i')
/// ```
///
/// for every choice of one- or two-element sets `B_j`. In the last slot two
/// distinct events give `D = 0` identically (cyclicity of the trace), so
/// only singletons are used there. For two-event families the conditions
/// reduce to the summable elementary pairs.
pub fn check_weak_decoherence(
    family: &HistoryFamily,
    rho: &DensityOperator,
    tol: &ToleranceConfig,
) -> Result<ConsistencyReport> {
    let table = ElementaryTable::new(family, rho)?;
    let n = family.len();
    let mut report = ConsistencyReport::new(Notion::Weak);
    for k in 0..n {
        let m = table.sizes[k];
        // Per other slot: the admissible sets B_j (0-based event indices).
        let options: Vec<Vec<Vec<usize>>> = (0..n)
            .filter(|&j| j != k)
            .map(|j| {
                let size = table.sizes[j];
                let mut sets: Vec<Vec<usize>> = (0..size).map(|a| vec![a]).collect();
                if j != n - 1 {
                    for a in 0..size {
                        for b in (a + 1)..size {
                            sets.push(vec![a, b]);
                        }
                    }
                }
                sets
            })
            .collect();
        let patterns = product(&options);
        for i in 0..m {
            for i2 in (i + 1)..m {
                for pattern in &patterns {
                    let value = symmetrized_sum(&table, k, i, i2, pattern);
                    report.observe(value.abs(), value, || {
                        let label = |event: usize| {
                            let mut sets: Vec<Vec<usize>> = pattern
                                .iter()
                                .map(|s| s.iter().map(|a| a + 1).collect())
                                .collect();
                            sets.insert(k, vec![event + 1]);
                            MemberId(sets).to_string()
                        };
                        (label(i), label(i2))
                    });
                }
            }
        }
    }
    Ok(report.finish(tol))
}

/// The `H` term of [`check_weak_decoherence`] for one pattern.
fn symmetrized_sum(
    table: &ElementaryTable,
    k: usize,
    i: usize,
    i2: usize,
    pattern: &[Vec<usize>],
) -> f64 {
    let pair_slots: Vec<usize> = pattern
        .iter()
        .enumerate()
        .filter(|(_, s)| s.len() == 2)
        .map(|(p, _)| p)
        .collect();
    let mut total = 0.0;
    for flips in 0u32..(1 << pair_slots.len()) {
        let mut x: Vec<usize> = pattern.iter().map(|s| s[0]).collect();
        let mut y = x.clone();
        for (bit, &p) in pair_slots.iter().enumerate() {
            if flips & (1 << bit) != 0 {
                x[p] = pattern[p][1];
            } else {
                y[p] = pattern[p][1];
            }
        }
        x.insert(k, i);
        y.insert(k, i2);
        total += table.functional(table.flat(&x), table.flat(&y)).re;
    }
    total
}

/// Medium decoherence: `D(h1, h2) = 0` for every pair of distinct
/// elementary histories (equivalently, every alternative pair of members).
pub fn check_medium_decoherence(
    family: &HistoryFamily,
    rho: &DensityOperator,
    tol: &ToleranceConfig,
) -> Result<ConsistencyReport> {
    let table = ElementaryTable::new(family, rho)?;
    let mut report = ConsistencyReport::new(Notion::Medium);
    for x in 0..table.len() {
        for y in (x + 1)..table.len() {
            let d = table.functional(x, y);
            report.observe(d.norm(), d.norm(), || {
                (table.ids[x].to_string(), table.ids[y].to_string())
            });
        }
    }
    Ok(report.finish(tol))
}

/// Linear positivity: `Re Tr(C_h rho) >= 0` for every elementary history.
pub fn check_linear_positivity(
    family: &HistoryFamily,
    rho: &DensityOperator,
    tol: &ToleranceConfig,
) -> Result<ConsistencyReport> {
    let table = ElementaryTable::new(family, rho)?;
    let mut report = ConsistencyReport::new(Notion::LinearPositive);
    let mut min_value = f64::INFINITY;
    let mut worst = 0;
    for x in 0..table.len() {
        let v = table.chain_rho[x].trace().re;
        report.pair_count += 1;
        if v < min_value {
            min_value = v;
            worst = x;
        }
    }
    report.worst_value = min_value;
    report.worst_residual = (-min_value).max(0.0);
    let id = table.ids[worst].to_string();
    report.worst_pair = Some((id.clone(), id));
    Ok(report.finish(tol))
}

/// Probability sum rule by brute force over every coarse-grained member:
/// `p(h1 + h2) = p(h1) + p(h2)` for all summable members, and the
/// elementary probabilities add up to one.
pub fn check_sum_rule(
    family: &HistoryFamily,
    rho: &DensityOperator,
    tol: &ToleranceConfig,
) -> Result<ConsistencyReport> {
    check_sum_rule_capped(family, rho, tol, DEFAULT_MEMBER_CAP)
}

pub fn check_sum_rule_capped(
    family: &HistoryFamily,
    rho: &DensityOperator,
    tol: &ToleranceConfig,
    cap: usize,
) -> Result<ConsistencyReport> {
    check_same_dim(family.dim(), rho.dim())?;
    let members = coarse_members(family, cap)?;
    let probs = members
        .iter()
        .map(|m| probability(&m.history, rho))
        .collect::<Result<Vec<_>>>()?;
    let index: HashMap<&MemberId, usize> = members
        .iter()
        .enumerate()
        .map(|(k, m)| (&m.id, k))
        .collect();
    let mut report = ConsistencyReport::new(Notion::SumRule);

    for a in 0..members.len() {
        for b in (a + 1)..members.len() {
            let Some(sum_id) = summed_id(&members[a].id, &members[b].id) else {
                continue;
            };
            let s = index[&sum_id];
            let defect = probs[s] - probs[a] - probs[b];
            report.observe(defect.abs(), defect, || {
                (members[a].id.to_string(), members[b].id.to_string())
            });
        }
    }

    let total: f64 = members
        .iter()
        .zip(&probs)
        .filter(|(m, _)| m.id.0.iter().all(|s| s.len() == 1))
        .map(|(_, p)| p)
        .sum();
    let defect = total - 1.0;
    report.observe(defect.abs(), defect, || {
        ("elementary".into(), "total".into())
    });
    Ok(report.finish(tol))
}

/// Identifier of `h1 + h2` when the members differ in exactly one slot with
/// disjoint event sets.
fn summed_id(a: &MemberId, b: &MemberId) -> Option<MemberId> {
    let mut differing =
        a.0.iter()
            .zip(&b.0)
            .enumerate()
            .filter(|(_, (x, y))| x != y);
    let (k, (x, y)) = differing.next()?;
    if differing.next().is_some() || x.iter().any(|e| y.contains(e)) {
        return None;
    }
    let mut merged: Vec<usize> = x.iter().chain(y).copied().collect();
    merged.sort_unstable();
    let mut sets = a.0.clone();
    sets[k] = merged;
    Some(MemberId(sets))
}

/// `|Tr(C_h rho C_h^dag) - Tr(E_n ... E_1 rho)|` for a commutative history.
pub fn c1_residual(h: &History, rho: &DensityOperator, tol: &ToleranceConfig) -> Result<f64> {
    check_same_dim(h.dim(), rho.dim())?;
    let residual = commutation_residual(h);
    if residual > tol.eps_op {
        return Err(Error::NotCommutative { residual });
    }
    let p = probability(h, rho)?;
    let product_trace = (chain_operator(h).as_matrix() * rho.matrix().as_matrix()).trace();
    Ok((Complex64::new(p, 0.0) - product_trace).norm())
}

/// For commuting events the chain probability equals the trace of the
/// product event against `rho`.
pub fn check_c1_compatibility(
    h: &History,
    rho: &DensityOperator,
    tol: &ToleranceConfig,
) -> Result<bool> {
    Ok(c1_residual(h, rho, tol)? <= tol.eps_prob)
}

/// [`check_c1_compatibility`] over every commutative elementary history;
/// non-commutative ones are skipped and counted in the notes.
pub fn check_c1_family(
    family: &HistoryFamily,
    rho: &DensityOperator,
    tol: &ToleranceConfig,
) -> Result<ConsistencyReport> {
    check_same_dim(family.dim(), rho.dim())?;
    let mut report = ConsistencyReport::new(Notion::C1Compat);
    let mut skipped = 0;
    for e in elementary_histories(family) {
        match c1_residual(&e.history, rho, tol) {
            Ok(r) => report.observe(r, r, || (e.id.to_string(), e.id.to_string())),
            Err(Error::NotCommutative { .. }) => skipped += 1,
            Err(other) => return Err(other),
        }
    }
    if skipped > 0 {
        report.notes.push(format!(
            "{skipped} non-commutative elementary histories skipped"
        ));
    }
    Ok(report.finish(tol))
}

/// Ordered consistency of `family` against itself and the context
/// families: whenever `h1 <= h2` (slot-wise), `p(h1) <= p(h2)`.
///
/// Every supplied family must be medium decohering with respect to `rho`.
/// Coarse-grained members are enumerated, so each family is subject to the
/// default member cap.
pub fn check_ordered_consistency(
    family: &HistoryFamily,
    rho: &DensityOperator,
    context: &[HistoryFamily],
    tol: &ToleranceConfig,
) -> Result<ConsistencyReport> {
    let all: Vec<&HistoryFamily> = std::iter::once(family).chain(context).collect();
    for (k, f) in all.iter().enumerate() {
        let medium = check_medium_decoherence(f, rho, tol)?;
        if !medium.verdict {
            let which = if k == 0 {
                "family".to_string()
            } else {
                format!("context family {k}")
            };
            return Err(Error::PreconditionFailed(format!(
                "{which} is not medium decohering (residual {:.3e})",
                medium.worst_residual
            )));
        }
    }
    let tagged: Vec<Vec<(String, History, f64)>> = all
        .iter()
        .enumerate()
        .map(|(k, f)| {
            coarse_members(f, DEFAULT_MEMBER_CAP)?
                .into_iter()
                .map(|m| {
                    let p = probability(&m.history, rho)?;
                    let label = if k == 0 {
                        m.id.to_string()
                    } else {
                        format!("C{k}:{}", m.id)
                    };
                    Ok((label, m.history, p))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = ConsistencyReport::new(Notion::Ordered);
    for (l1, h1, p1) in &tagged[0] {
        for (l2, h2, p2) in tagged.iter().flatten() {
            if h1.len() != h2.len() || !history_leq(h1, h2, tol) {
                continue;
            }
            let excess = p1 - p2;
            report.observe(excess.max(0.0), excess, || (l1.clone(), l2.clone()));
        }
    }
    Ok(report.finish(tol))
}

/// `p(h | E_last) = p(h) / Tr(E_last rho)`.
pub fn conditional_probability(
    h: &History,
    rho: &DensityOperator,
    tol: &ToleranceConfig,
) -> Result<f64> {
    check_same_dim(h.dim(), rho.dim())?;
    let condition = event_probability(h.last(), rho);
    if condition <= tol.eps_prob {
        return Err(Error::ConditionHasZeroProbability {
            probability: condition,
        });
    }
    Ok(probability(h, rho)? / condition)
}

/// `Tr(E rho)`.
pub fn event_probability(e: &Projection, rho: &DensityOperator) -> f64 {
    (e.matrix().as_matrix() * rho.matrix().as_matrix())
        .trace()
        .re
}

/// How a contrary-inference candidate was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CandidateSource {
    /// The three-box construction in the first three basis directions.
    Seed,
    /// Three-box-type construction in a random basis with random amplitudes.
    Constructed,
    /// Unstructured random sample.
    Random,
}

/// Two weakly decohering families retrodicting orthogonal events, each with
/// conditional probability one.
#[derive(Debug, Clone)]
pub struct ContraryInstance {
    pub source: CandidateSource,
    pub trial: usize,
    pub psi: CVector,
    pub e1: Projection,
    pub f1: Projection,
    pub e2: Projection,
    pub p_h1: f64,
    pub p_h2: f64,
    pub p_e2: f64,
    pub conditional_h1: f64,
    pub conditional_h2: f64,
    pub weak_residual_1: f64,
    pub weak_residual_2: f64,
}

/// Evaluates one `(psi, E1, F1, E2)` candidate; `None` unless it is a
/// contrary inference.
pub fn evaluate_contrary_candidate(
    psi: &CVector,
    e1: &Projection,
    f1: &Projection,
    e2: &Projection,
    tol: &ToleranceConfig,
) -> Result<Option<ContraryInstance>> {
    let rho = DensityOperator::pure(psi)?;
    let p_e2 = event_probability(e2, &rho);
    if p_e2 <= tol.eps_prob {
        return Ok(None);
    }
    let h1 = History::new(vec![e1.clone(), e2.clone()])?;
    let h2 = History::new(vec![f1.clone(), e2.clone()])?;
    let c1 = HistoryFamily::generated_by(&h1, tol)?;
    let c2 = HistoryFamily::generated_by(&h2, tol)?;
    let w1 = check_weak_decoherence(&c1, &rho, tol)?;
    let w2 = check_weak_decoherence(&c2, &rho, tol)?;
    if !(w1.verdict && w2.verdict) {
        return Ok(None);
    }
    let p_h1 = probability(&h1, &rho)?;
    let p_h2 = probability(&h2, &rho)?;
    let (q1, q2) = (p_h1 / p_e2, p_h2 / p_e2);
    if q1 <= 1.0 - tol.eps_prob || q2 <= 1.0 - tol.eps_prob {
        return Ok(None);
    }
    Ok(Some(ContraryInstance {
        source: CandidateSource::Random,
        trial: 0,
        psi: psi.clone(),
        e1: e1.clone(),
        f1: f1.clone(),
        e2: e2.clone(),
        p_h1,
        p_h2,
        p_e2,
        conditional_h1: q1,
        conditional_h2: q2,
        weak_residual_1: w1.worst_residual,
        weak_residual_2: w2.worst_residual,
    }))
}

/// The three-box candidate embedded in `dim >= 3`: `psi ~ (1,1,1)`,
/// `E1 = |e1><e1|`, `F1 = |e2><e2|`, `E2` the projector onto `(1,1,-1)`.
pub fn three_box_candidate(dim: usize) -> Result<(CVector, Projection, Projection, Projection)> {
    if dim < 3 {
        return Err(Error::BadParameters(
            "the three-box construction needs dim >= 3".into(),
        ));
    }
    let mut psi = CVector::zeros(dim);
    let mut phi = CVector::zeros(dim);
    for k in 0..3 {
        psi[k] = ONE;
        phi[k] = if k == 2 { -ONE } else { ONE };
    }
    Ok((
        psi.map(|z| z / 3f64.sqrt()),
        Projection::onto_vector(&basis_vector(dim, 0)),
        Projection::onto_vector(&basis_vector(dim, 1)),
        Projection::onto_vector(&phi),
    ))
}

/// Three-box-type candidate in a random basis: `E2 = |phi><phi|` with
/// `<phi|E1 psi> = <phi|F1 psi> = <phi|psi>`.
fn constructed_candidate(
    rng: &mut impl Rng,
    dim: usize,
) -> (CVector, Projection, Projection, Projection) {
    let u = sampling::random_unitary(rng, dim);
    let a = sampling::random_state(rng, dim);
    let psi = &u * &a;
    let rest: f64 = a.iter().skip(2).map(|z| z.norm_sqr()).sum();
    // Coefficients of <phi| in the rotated basis.
    let mut bra = CVector::zeros(dim);
    bra[0] = ONE / a[0];
    bra[1] = ONE / a[1];
    for k in 2..dim {
        bra[k] = -a[k].conj() / rest;
    }
    let phi = &u * bra.map(|z| z.conj());
    (
        psi,
        Projection::onto_vector(&u.column(0).into_owned()),
        Projection::onto_vector(&u.column(1).into_owned()),
        Projection::onto_vector(&phi),
    )
}

fn random_candidate(
    rng: &mut impl Rng,
    dim: usize,
) -> (CVector, Projection, Projection, Projection) {
    let psi = sampling::random_state(rng, dim);
    let u = sampling::random_unitary(rng, dim);
    let r1 = rng.random_range(1..dim);
    let r2 = rng.random_range(1..=dim - r1);
    let e1 = Projection::from_orthonormal_columns(&u.columns(0, r1).into_owned());
    let f1 = Projection::from_orthonormal_columns(&u.columns(r1, r2).into_owned());
    let rank = rng.random_range(1..dim);
    let e2 = sampling::random_projection(rng, dim, rank);
    (psi, e1, f1, e2)
}

/// Randomized hunt for contrary inferences.
///
/// Trial 0 is the three-box seed (when `dim >= 3`); odd trials are
/// three-box-type constructions in random bases, even trials unstructured
/// random samples. Every returned instance has been re-evaluated from
/// scratch, so the recorded values are its certificate.
pub fn contrary_inference_search(
    dim: usize,
    trials: usize,
    seed: u64,
    tol: &ToleranceConfig,
) -> Result<Vec<ContraryInstance>> {
    let mut rng = sampling::seeded(seed);
    let mut hits = Vec::new();
    if dim < 2 {
        return Ok(hits);
    }
    for trial in 0..trials {
        let (source, (psi, e1, f1, e2)) = if dim >= 3 && trial == 0 {
            (CandidateSource::Seed, three_box_candidate(dim)?)
        } else if dim >= 3 && trial % 2 == 1 {
            (
                CandidateSource::Constructed,
                constructed_candidate(&mut rng, dim),
            )
        } else {
            (CandidateSource::Random, random_candidate(&mut rng, dim))
        };
        if let Some(mut hit) = evaluate_contrary_candidate(&psi, &e1, &f1, &e2, tol)? {
            hit.source = source;
            hit.trial = trial;
            hits.push(hit);
        }
    }
    Ok(hits)
}

/// `<v|A w>`.
pub(crate) fn matrix_element(v: &CVector, a: &CMatrix, w: &CVector) -> Complex64 {
    inner(v, &(a * w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::histories::make_resolution;
    use crate::matcore::SquareComplexMatrix;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn diag_family(dim: usize) -> HistoryFamily {
        let t = tol();
        let r1 = make_resolution(
            vec![
                Projection::basis_subset(dim, &[0]).unwrap(),
                Projection::basis_subset(dim, &(1..dim).collect::<Vec<_>>()).unwrap(),
            ],
            &t,
        )
        .unwrap();
        let r2 = make_resolution(
            (0..dim)
                .map(|k| Projection::basis_subset(dim, &[k]).unwrap())
                .collect(),
            &t,
        )
        .unwrap();
        HistoryFamily::new(vec![r1, r2]).unwrap()
    }

    #[test]
    fn identity_history_has_unit_functional() {
        let rho = DensityOperator::maximally_mixed(3);
        let h = History::new(vec![Projection::identity(3)]).unwrap();
        let d = decoherence_functional(&h, &h, &rho).unwrap();
        assert!((d - ONE).norm() < 1e-15);
        let h2 = History::new(vec![Projection::identity(3), Projection::identity(3)]).unwrap();
        assert!((probability(&h2, &rho).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_resolution_family_is_weakly_decohering() {
        let t = tol();
        let mut rng = sampling::seeded(3);
        for d in 2..5 {
            let res = make_resolution(sampling::random_resolution(&mut rng, d, d), &t).unwrap();
            let fam = HistoryFamily::new(vec![res]).unwrap();
            let rho = sampling::random_density(&mut rng, d, d);
            assert!(check_weak_decoherence(&fam, &rho, &t).unwrap().verdict);
            let s = check_sum_rule(&fam, &rho, &t).unwrap();
            assert!(s.verdict, "{s:?}");
        }
    }

    #[test]
    fn diagonal_family_is_classical() {
        let t = tol();
        let rho = DensityOperator::from_trusted(
            SquareComplexMatrix::from_diagonal(&[0.5, 0.3, 0.2]).into_inner(),
        );
        let fam = diag_family(3);
        for report in [
            check_weak_decoherence(&fam, &rho, &t).unwrap(),
            check_medium_decoherence(&fam, &rho, &t).unwrap(),
            check_linear_positivity(&fam, &rho, &t).unwrap(),
            check_sum_rule(&fam, &rho, &t).unwrap(),
            check_c1_family(&fam, &rho, &t).unwrap(),
            check_ordered_consistency(&fam, &rho, &[], &t).unwrap(),
        ] {
            assert!(report.verdict, "{report:?}");
        }
    }

    #[test]
    fn c1_examples() {
        let t = tol();
        let mut rng = sampling::seeded(4);
        let rho = sampling::random_density(&mut rng, 3, 3);
        let e = sampling::random_projection(&mut rng, 3, 1);
        let h = History::new(vec![e.clone(), e.complement()]).unwrap();
        assert!(c1_residual(&h, &rho, &t).unwrap() < 1e-15);
        let h = History::new(vec![e.clone(), e.clone()]).unwrap();
        assert!(check_c1_compatibility(&h, &rho, &t).unwrap());
        let f = sampling::random_projection(&mut rng, 3, 1);
        let h = History::new(vec![e, f]).unwrap();
        assert!(matches!(
            check_c1_compatibility(&h, &rho, &t),
            Err(Error::NotCommutative { .. })
        ));
    }

    #[test]
    fn conditional_on_null_event_fails() {
        let t = tol();
        let rho = DensityOperator::pure(&basis_vector(3, 0)).unwrap();
        let h = History::new(vec![
            Projection::identity(3),
            Projection::basis_subset(3, &[1]).unwrap(),
        ])
        .unwrap();
        assert!(matches!(
            conditional_probability(&h, &rho, &t),
            Err(Error::ConditionHasZeroProbability { .. })
        ));
        let sure = History::new(vec![
            Projection::identity(3),
            Projection::basis_subset(3, &[0, 2]).unwrap(),
        ])
        .unwrap();
        assert!((conditional_probability(&sure, &rho, &t).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn three_box_is_a_contrary_inference() {
        let t = tol();
        let (psi, e1, f1, e2) = three_box_candidate(3).unwrap();
        let hit = evaluate_contrary_candidate(&psi, &e1, &f1, &e2, &t)
            .unwrap()
            .expect("three-box is a hit");
        // <phi|psi> = (1 + 1 - 1) / 3 = 1/3, and E2 E1 psi = E2 F1 psi = phi / 3.
        assert!((hit.p_e2 - 1.0 / 9.0).abs() < 1e-15);
        assert!((hit.p_h1 - 1.0 / 9.0).abs() < 1e-15);
        assert!((hit.p_h2 - 1.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn notion_names_round_trip() {
        for n in Notion::ALL {
            assert_eq!(n.name().parse::<Notion>().unwrap(), n);
            let json = serde_json::to_string(&n).unwrap();
            assert_eq!(json, format!("\"{}\"", n.name()));
        }
    }
}
