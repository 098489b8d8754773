//! Mirror projections for 2-event histories and the self-decoherence test.
//!
//! `T` is a mirror for `(h, rho)`, `h = (E1, E2)`, when
//!
//! * M1: `[T, E1] = [T, E2] = 0`, and
//! * M2: `Tr(T E1 rho) = Tr(T rho) = Tr(E1 rho)`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;

use crate::consistency::matrix_element;
use crate::error::{Error, Result};
use crate::histories::{chain_operator, elementary_histories, History, HistoryFamily, HistoryId};
use crate::matcore::{
    commutant_basis, commutator_norm, cyclic_projection, inner, is_orthogonal, join, max_norm,
    spectral_decomposition, CMatrix, CVector, DensityOperator, Projection, SquareComplexMatrix,
    ToleranceConfig,
};
use crate::sampling;

#[derive(Clone, Debug)]
pub struct MirrorCertificate {
    pub t: Projection,
    pub history: History,
    pub state: DensityOperator,
    /// `(||[T, E1]||, ||[T, E2]||)` in the max norm.
    pub residual_m1: (f64, f64),
    /// `(|Tr(T E1 rho) - Tr(T rho)|, |Tr(T E1 rho) - Tr(E1 rho)|)`.
    pub residual_m2: (f64, f64),
    pub verified: bool,
}

impl MirrorCertificate {
    pub fn max_residual(&self) -> f64 {
        self.residual_m1
            .0
            .max(self.residual_m1.1)
            .max(self.residual_m2.0)
            .max(self.residual_m2.1)
    }
}

/// `Tr(A B)` without forming the product.
fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let d = a.nrows();
    let mut sum = Complex64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            sum += a[(i, j)] * b[(j, i)];
        }
    }
    sum
}

fn check_two_event(h: &History) -> Result<()> {
    if h.len() != 2 {
        return Err(Error::WrongHistoryLength {
            expected: 2,
            actual: h.len(),
        });
    }
    Ok(())
}

fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch(expected, actual));
    }
    Ok(())
}

pub fn verify_mirror(
    t: &Projection,
    h: &History,
    rho: &DensityOperator,
    tol: &ToleranceConfig,
) -> Result<MirrorCertificate> {
    check_two_event(h)?;
    check_dim(h.dim(), t.dim())?;
    check_dim(h.dim(), rho.dim())?;
    let tm = t.matrix().as_matrix();
    let e1 = h.first().matrix().as_matrix();
    let e2 = h.last().matrix().as_matrix();
    let r = rho.matrix().as_matrix();
    let residual_m1 = (commutator_norm(tm, e1), commutator_norm(tm, e2));
    let e1_rho = e1 * r;
    let t_e1 = trace_product(tm, &e1_rho);
    let t_only = trace_product(tm, r);
    let e1_only = e1_rho.trace();
    let residual_m2 = ((t_e1 - t_only).norm(), (t_e1 - e1_only).norm());
    let verified = [residual_m1.0, residual_m1.1, residual_m2.0, residual_m2.1]
        .iter()
        .all(|&x| x <= tol.eps_prob);
    Ok(MirrorCertificate {
        t: t.clone(),
        history: h.clone(),
        state: rho.clone(),
        residual_m1,
        residual_m2,
        verified,
    })
}

/// `(p(T|E1), p(E1|T))`.
pub fn mirror_correlation(
    t: &Projection,
    e1: &Projection,
    rho: &DensityOperator,
    tol: &ToleranceConfig,
) -> Result<(f64, f64)> {
    check_dim(t.dim(), e1.dim())?;
    check_dim(t.dim(), rho.dim())?;
    let tm = t.matrix().as_matrix();
    let em = e1.matrix().as_matrix();
    let residual = commutator_norm(tm, em);
    if residual > tol.eps_op {
        return Err(Error::NotCommuting { residual });
    }
    let r = rho.matrix().as_matrix();
    let p_e1 = trace_product(em, r).re;
    let p_t = trace_product(tm, r).re;
    for probability in [p_e1, p_t] {
        if probability <= tol.eps_prob {
            return Err(Error::ZeroConditioningEvent { probability });
        }
    }
    let joint = trace_product(tm, &(em * r)).re;
    Ok((joint / p_e1, joint / p_t))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    pub seed: u64,
    /// Budget for the randomized rounding stage.
    pub max_candidates: usize,
    /// Subsets of eigenvalue clusters tried per commutant basis element.
    pub cluster_subset_cap: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            max_candidates: 256,
            cluster_subset_cap: 1 << 10,
        }
    }
}

/// Cheap M2 screen before the full verification.
struct M2Screen {
    e1_rho: CMatrix,
    rho: CMatrix,
    p_e1: Complex64,
}

impl M2Screen {
    fn passes(&self, t: &CMatrix, tol: &ToleranceConfig) -> bool {
        let joint = trace_product(t, &self.e1_rho);
        (joint - self.p_e1).norm() <= tol.eps_prob
            && (joint - trace_product(t, &self.rho)).norm() <= tol.eps_prob
    }
}

/// Searches the commutant of `{E1, E2}` for a mirror.
///
/// Candidates, in order: `E1` when the events commute; the zero and identity
/// projections; sums of eigenvalue clusters of each commutant basis element;
/// the smallest commutant projection whose range contains `E1 Ran(rho)`;
/// and spectral roundings of random commutant elements. `None` means no
/// candidate verified, not that no mirror exists.
pub fn search_mirror(
    h: &History,
    rho: &DensityOperator,
    options: &SearchOptions,
    tol: &ToleranceConfig,
) -> Result<Option<MirrorCertificate>> {
    check_two_event(h)?;
    check_dim(h.dim(), rho.dim())?;
    let d = h.dim();
    let e1 = h.first();
    let e2 = h.last();
    let e1m = e1.matrix().as_matrix();
    let e2m = e2.matrix().as_matrix();
    let screen = M2Screen {
        e1_rho: e1m * rho.matrix().as_matrix(),
        rho: rho.matrix().as_matrix().clone(),
        p_e1: trace_product(e1m, rho.matrix().as_matrix()),
    };
    let attempt = |t: &Projection| -> Result<Option<MirrorCertificate>> {
        if !screen.passes(t.matrix().as_matrix(), tol) {
            return Ok(None);
        }
        let cert = verify_mirror(t, h, rho, tol)?;
        Ok(cert.verified.then_some(cert))
    };

    if commutator_norm(e1m, e2m) <= tol.eps_op {
        if let Some(cert) = attempt(e1)? {
            return Ok(Some(cert));
        }
    }
    for t in [Projection::zero(d), Projection::identity(d)] {
        if let Some(cert) = attempt(&t)? {
            return Ok(Some(cert));
        }
    }

    let generators = [e1.matrix().clone(), e2.matrix().clone()];
    let basis = commutant_basis(&generators, tol)?;
    for element in &basis {
        let clusters = spectral_decomposition(element, tol)?;
        let n = clusters.len();
        if n < 2 {
            continue;
        }
        let total = if n >= usize::BITS as usize {
            usize::MAX
        } else {
            (1usize << n) - 1
        };
        let limit = total.min(options.cluster_subset_cap);
        for mask in 1..=limit {
            let mut m = CMatrix::zeros(d, d);
            let mut rank = 0;
            for (k, c) in clusters.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    m += c.projection.matrix().as_matrix();
                    rank += c.projection.rank();
                }
            }
            if let Some(cert) = attempt(&Projection::from_trusted(m, rank))? {
                return Ok(Some(cert));
            }
        }
    }

    let seeds = e1m * rho.support(tol);
    let minimal = cyclic_projection(&seeds, &[e1m, e2m], tol)?;
    if let Some(cert) = attempt(&minimal)? {
        return Ok(Some(cert));
    }

    if basis.is_empty() {
        return Ok(None);
    }
    let mut rng = sampling::seeded(options.seed);
    for _ in 0..options.max_candidates {
        let t = random_rounding(&mut rng, &basis, tol)?;
        if let Some(cert) = attempt(&t)? {
            return Ok(Some(cert));
        }
    }
    Ok(None)
}

/// Projection onto the eigenvalues `>= 1/2` of a random commutant element
/// rescaled to spectrum `[0, 1]`.
fn random_rounding(
    rng: &mut impl Rng,
    basis: &[SquareComplexMatrix],
    tol: &ToleranceConfig,
) -> Result<Projection> {
    let d = basis[0].dim();
    let mut x = CMatrix::zeros(d, d);
    for b in basis {
        let c: f64 = rng.sample(rand_distr::StandardNormal);
        x += b.as_matrix().map(|z| z * c);
    }
    let spaces = spectral_decomposition(&SquareComplexMatrix::new(x)?, tol)?;
    let lo = spaces.first().map_or(0.0, |s| s.value);
    let hi = spaces.last().map_or(0.0, |s| s.value);
    let span = (hi - lo).max(f64::MIN_POSITIVE);
    let mut m = CMatrix::zeros(d, d);
    let mut rank = 0;
    for s in &spaces {
        if (s.value - lo) / span >= 0.5 {
            m += s.projection.matrix().as_matrix();
            rank += s.projection.rank();
        }
    }
    Ok(Projection::from_trusted(m, rank))
}

/// Whether `T1 + T2` mirrors the coarse history `(E1 + E1', E2)`.
#[derive(Clone, Debug)]
pub struct CoarseMirrorCheck {
    pub first: HistoryId,
    pub second: HistoryId,
    pub verified: bool,
}

#[derive(Clone, Debug)]
pub struct SelfDecoherenceReport {
    pub family: HistoryFamily,
    pub per_history: BTreeMap<HistoryId, Option<MirrorCertificate>>,
    pub verdict: bool,
    /// Informational; not part of the verdict.
    pub coarse: Vec<CoarseMirrorCheck>,
    pub notes: Vec<String>,
}

impl SelfDecoherenceReport {
    pub fn certificates(&self) -> impl Iterator<Item = &MirrorCertificate> {
        self.per_history.values().flatten()
    }
}

/// Self-decoherence of a 2-event family: every elementary history has a
/// mirror. Provided mirrors are tried first; a provided projection that
/// fails verification falls back to the search.
pub fn check_self_decoherence(
    family: &HistoryFamily,
    rho: &DensityOperator,
    provided: Option<&BTreeMap<HistoryId, Projection>>,
    options: &SearchOptions,
    tol: &ToleranceConfig,
) -> Result<SelfDecoherenceReport> {
    if family.len() != 2 {
        return Err(Error::WrongHistoryLength {
            expected: 2,
            actual: family.len(),
        });
    }
    check_dim(family.dim(), rho.dim())?;
    let mut per_history = BTreeMap::new();
    let mut notes = Vec::new();
    for elem in elementary_histories(family) {
        let given = provided.and_then(|m| m.get(&elem.id));
        let mut cert = None;
        if let Some(t) = given {
            let c = verify_mirror(t, &elem.history, rho, tol)?;
            if c.verified {
                cert = Some(c);
            } else {
                notes.push(format!(
                    "provided mirror for {} failed verification (max residual {:.3e}); searched instead",
                    elem.id,
                    c.max_residual()
                ));
            }
        }
        if cert.is_none() {
            cert = search_mirror(&elem.history, rho, options, tol)?;
        }
        per_history.insert(elem.id, cert);
    }
    let verdict = per_history.values().all(Option::is_some);

    let mut coarse = Vec::new();
    let certified: Vec<(&HistoryId, &MirrorCertificate)> = per_history
        .iter()
        .filter_map(|(id, c)| c.as_ref().map(|c| (id, c)))
        .collect();
    for (a, (id1, c1)) in certified.iter().enumerate() {
        for (id2, c2) in certified.iter().skip(a + 1) {
            if id1.0[1] != id2.0[1] || !is_orthogonal(&c1.t, &c2.t, tol)? {
                continue;
            }
            let t = c1.t.orthogonal_sum(&c2.t);
            let first = c1.history.first().orthogonal_sum(c2.history.first());
            let h = History::new(vec![first, c1.history.last().clone()])?;
            let verified = verify_mirror(&t, &h, rho, tol)?.verified;
            coarse.push(CoarseMirrorCheck {
                first: (*id1).clone(),
                second: (*id2).clone(),
                verified,
            });
        }
    }
    Ok(SelfDecoherenceReport {
        family: family.clone(),
        per_history,
        verdict,
        coarse,
        notes,
    })
}

/// The three expressions for `p(h)` under a verified mirror.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OccurrenceProbability {
    /// `Tr(E2 T rho)`, the returned value.
    pub probability: f64,
    pub via_first_event: Complex64,
    pub via_chain: f64,
    pub via_mirror: Complex64,
}

pub fn occurrence_probability(
    h: &History,
    t: &Projection,
    rho: &DensityOperator,
    tol: &ToleranceConfig,
) -> Result<OccurrenceProbability> {
    let cert = verify_mirror(t, h, rho, tol)?;
    if !cert.verified {
        return Err(Error::MirrorNotVerified);
    }
    let r = rho.matrix().as_matrix();
    let e1 = h.first().matrix().as_matrix();
    let e2 = h.last().matrix().as_matrix();
    let via_mirror = trace_product(&(e2 * t.matrix().as_matrix()), r);
    let via_first_event = trace_product(&(e2 * e1), r);
    let c = chain_operator(h);
    let via_chain = (c.as_matrix() * r * c.as_matrix().adjoint()).trace().re;
    let chain = Complex64::new(via_chain, 0.0);
    let worst = (via_mirror - via_first_event)
        .norm()
        .max((via_mirror - chain).norm())
        .max((via_first_event - chain).norm());
    if worst > tol.eps_prob {
        return Err(Error::IdentityChainMismatch(
            via_mirror.re,
            via_first_event.re,
            via_chain,
        ));
    }
    Ok(OccurrenceProbability {
        probability: via_mirror.re,
        via_first_event,
        via_chain,
        via_mirror,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Proposition1Report {
    /// `|<T psi|U psi>|`.
    pub overlap: f64,
    /// `||(T v U) psi - T psi - U psi||`.
    pub join_residual: f64,
    /// `|<psi|E1 E2 F1 psi>|`.
    pub interference: f64,
    pub passed: bool,
}

fn shares_second_event(h1: &History, h2: &History, tol: &ToleranceConfig) -> Result<()> {
    check_two_event(h1)?;
    check_two_event(h2)?;
    check_dim(h1.dim(), h2.dim())?;
    if !h1.last().approx_eq(h2.last(), tol) {
        return Err(Error::PreconditionFailed(
            "histories must share their second event".into(),
        ));
    }
    if !is_orthogonal(h1.first(), h2.first(), tol)? {
        return Err(Error::PreconditionFailed(
            "first events must be orthogonal".into(),
        ));
    }
    Ok(())
}

/// Orthogonality of the mirrored components of a pure state and the
/// vanishing interference term between `h1 = (E1, E2)` and `h2 = (F1, E2)`.
pub fn proposition1_check(
    t: &Projection,
    u: &Projection,
    h1: &History,
    h2: &History,
    psi: &CVector,
    tol: &ToleranceConfig,
) -> Result<Proposition1Report> {
    shares_second_event(h1, h2, tol)?;
    check_dim(h1.dim(), psi.len())?;
    let rho = DensityOperator::pure(psi)?;
    let psi = psi.map(|z| z / psi.norm());
    for (mirror, h, name) in [(t, h1, "T"), (u, h2, "U")] {
        if !verify_mirror(mirror, h, &rho, tol)?.verified {
            return Err(Error::PreconditionFailed(format!(
                "{name} is not a mirror for its history"
            )));
        }
    }
    let t_psi = t.matrix().as_matrix() * &psi;
    let u_psi = u.matrix().as_matrix() * &psi;
    let overlap = inner(&t_psi, &u_psi).norm();
    let tu = join(t, u, tol)?;
    let join_residual = (tu.matrix().as_matrix() * &psi - &t_psi - &u_psi).norm();
    let e1e2 = h1.first().matrix().as_matrix() * h1.last().matrix().as_matrix();
    let interference = matrix_element(&psi, &(e1e2 * h2.first().matrix().as_matrix()), &psi).norm();
    let bound = 10.0 * tol.eps_prob;
    Ok(Proposition1Report {
        overlap,
        join_residual,
        interference,
        passed: overlap <= bound && join_residual <= bound && interference <= bound,
    })
}

/// Experimental mixed-state form: [`proposition1_check`] on each spectral
/// component of `rho`, reported as `(weight, report)`.
pub fn proposition1_check_mixed(
    t: &Projection,
    u: &Projection,
    h1: &History,
    h2: &History,
    rho: &DensityOperator,
    tol: &ToleranceConfig,
) -> Result<Vec<(f64, Proposition1Report)>> {
    rho.components(tol)
        .into_iter()
        .map(|(w, v)| Ok((w, proposition1_check(t, u, h1, h2, &v, tol)?)))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContraryBoundReport {
    pub p_h1: f64,
    pub p_h2: f64,
    pub p_e2: f64,
    /// `p(h1|E2) + p(h2|E2)`, absent when `Tr(E2 rho)` vanishes.
    pub conditional_sum: Option<f64>,
    pub passed: bool,
}

/// `p(h1) + p(h2) <= Tr(E2 rho)` for mirrored histories with orthogonal
/// first events, hence conditional probabilities given `E2` sum to at most 1.
pub fn contrary_bound_check(
    h1: &History,
    h2: &History,
    cert1: &MirrorCertificate,
    cert2: &MirrorCertificate,
    rho: &DensityOperator,
    tol: &ToleranceConfig,
) -> Result<ContraryBoundReport> {
    shares_second_event(h1, h2, tol)?;
    check_dim(h1.dim(), rho.dim())?;
    if !rho.is_pure(tol) {
        return Err(Error::PreconditionFailed("state must be pure".into()));
    }
    for (cert, h) in [(cert1, h1), (cert2, h2)] {
        let same_history = cert.history.len() == 2
            && cert.history.first().approx_eq(h.first(), tol)
            && cert.history.last().approx_eq(h.last(), tol);
        let same_state = cert.state.dim() == rho.dim()
            && max_norm(&(cert.state.matrix().as_matrix() - rho.matrix().as_matrix()))
                <= tol.eps_op;
        if !cert.verified || !same_history || !same_state {
            return Err(Error::PreconditionFailed(
                "certificates must be verified for the given histories and state".into(),
            ));
        }
    }
    let p_h1 = occurrence_probability(h1, &cert1.t, rho, tol)?.probability;
    let p_h2 = occurrence_probability(h2, &cert2.t, rho, tol)?.probability;
    let p_e2 = trace_product(h1.last().matrix().as_matrix(), rho.matrix().as_matrix()).re;
    let conditional_sum = (p_e2 > tol.eps_prob).then(|| (p_h1 + p_h2) / p_e2);
    let passed = p_h1 + p_h2 <= p_e2 + tol.eps_prob
        && conditional_sum.is_none_or(|s| s <= 1.0 + tol.eps_prob);
    Ok(ContraryBoundReport {
        p_h1,
        p_h2,
        p_e2,
        conditional_sum,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::consistency::check_medium_decoherence;
    use crate::histories::make_resolution;
    use crate::matcore::basis_vector;
    use crate::scenarios::{build_example1, build_example2, random_pointer_instance};
    use std::f64::consts::FRAC_PI_3;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn commuting_first_event_mirrors_itself() {
        let t = tol();
        let e1 = Projection::basis_subset(3, &[0, 1]).unwrap();
        let e2 = Projection::basis_subset(3, &[1]).unwrap();
        let h = History::new(vec![e1.clone(), e2]).unwrap();
        let rho =
            DensityOperator::pure(&CVector::from_element(3, Complex64::new(1.0, 0.0))).unwrap();
        assert!(verify_mirror(&e1, &h, &rho, &t).unwrap().verified);
        let found = search_mirror(&h, &rho, &SearchOptions::default(), &t)
            .unwrap()
            .unwrap();
        assert!(found.t.approx_eq(&e1, &t));
    }

    #[test]
    fn example2_mirrors() {
        let t = tol();
        let ex = build_example2(3, &[1, 3]).unwrap();
        let cert = verify_mirror(&ex.t, &ex.h1, &ex.rho, &t).unwrap();
        assert!(cert.verified);
        assert!(cert.max_residual() <= 1e-12);
        assert!(verify_mirror(&ex.u, &ex.h2, &ex.rho, &t).unwrap().verified);

        let wrong = verify_mirror(&ex.u, &ex.h1, &ex.rho, &t).unwrap();
        assert!(!wrong.verified);
        assert!((wrong.residual_m2.0 - 0.5).abs() < 1e-12);
        assert!((wrong.residual_m2.1 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn correlation_examples() {
        let t = tol();
        let ex = build_example2(3, &[1]).unwrap();
        let (a, b) = mirror_correlation(&ex.t, &ex.e1, &ex.rho, &t).unwrap();
        assert!((a - 1.0).abs() < 1e-12 && (b - 1.0).abs() < 1e-12);
        let (a, b) = mirror_correlation(&Projection::identity(6), &ex.e1, &ex.rho, &t).unwrap();
        assert!((a - 1.0).abs() < 1e-12 && (b - 0.5).abs() < 1e-12);

        // Product state: T on the second factor, E1 on the first.
        let e1 = Projection::basis_subset(2, &[0])
            .unwrap()
            .kron(&Projection::identity(2));
        let tp = Projection::identity(2).kron(&Projection::basis_subset(2, &[0]).unwrap());
        let a = CVector::from_vec(vec![Complex64::new(0.6, 0.0), Complex64::new(0.8, 0.0)]);
        let b = CVector::from_vec(vec![Complex64::new(0.8, 0.0), Complex64::new(0.0, 0.6)]);
        let rho = DensityOperator::pure(&a.kronecker(&b)).unwrap();
        let (x, y) = mirror_correlation(&tp, &e1, &rho, &t).unwrap();
        assert!((x - 0.64).abs() < 1e-12 && (y - 0.36).abs() < 1e-12);

        let zero = Projection::zero(6);
        assert!(matches!(
            mirror_correlation(&zero, &ex.e1, &ex.rho, &t),
            Err(Error::ZeroConditioningEvent { .. })
        ));
    }

    #[test]
    fn correlation_rejects_noncommuting() {
        let t = tol();
        let ex = build_example1(2, FRAC_PI_3, None).unwrap();
        assert!(matches!(
            mirror_correlation(&ex.e2, &ex.e1, &ex.rho1, &t),
            Err(Error::NotCommuting { .. })
        ));
    }

    #[test]
    fn wrong_length_is_rejected() {
        let p = Projection::identity(2);
        let h = History::new(vec![p.clone(), p.clone(), p.clone()]).unwrap();
        let rho = DensityOperator::maximally_mixed(2);
        assert!(matches!(
            verify_mirror(&p, &h, &rho, &tol()),
            Err(Error::WrongHistoryLength {
                expected: 2,
                actual: 3
            })
        ));
    }

    #[test]
    fn example1_has_no_mirror() {
        let t = tol();
        for dim in [2, 3] {
            let ex = build_example1(dim, FRAC_PI_3, None).unwrap();
            let found = search_mirror(&ex.h1, &ex.rho1, &SearchOptions::default(), &t).unwrap();
            assert!(found.is_none());
            let report =
                check_self_decoherence(&ex.family, &ex.rho1, None, &SearchOptions::default(), &t)
                    .unwrap();
            assert!(!report.verdict);
            assert!(
                !check_medium_decoherence(&ex.family, &ex.rho1, &t)
                    .unwrap()
                    .verdict
            );
        }
    }

    #[test]
    fn example2_self_decoherence() {
        let t = tol();
        let ex = build_example2(4, &[1, 2, 4]).unwrap();
        let mirrors = ex.mirrors();
        let report = check_self_decoherence(
            &ex.family,
            &ex.rho,
            Some(&mirrors),
            &SearchOptions::default(),
            &t,
        )
        .unwrap();
        assert!(report.verdict);
        assert!(report.notes.is_empty());
        assert!(report.coarse.iter().all(|c| c.verified));
        let searched =
            check_self_decoherence(&ex.family, &ex.rho, None, &SearchOptions::default(), &t)
                .unwrap();
        assert!(searched.verdict);
    }

    #[test]
    fn commuting_family_self_decoheres() {
        let t = tol();
        let family = HistoryFamily::new(vec![
            make_resolution(
                vec![
                    Projection::basis_subset(3, &[0]).unwrap(),
                    Projection::basis_subset(3, &[1, 2]).unwrap(),
                ],
                &t,
            )
            .unwrap(),
            make_resolution(
                vec![
                    Projection::basis_subset(3, &[0, 1]).unwrap(),
                    Projection::basis_subset(3, &[2]).unwrap(),
                ],
                &t,
            )
            .unwrap(),
        ])
        .unwrap();
        let mut rng = sampling::seeded(3);
        let rho = sampling::random_density(&mut rng, 3, 2);
        let report =
            check_self_decoherence(&family, &rho, None, &SearchOptions::default(), &t).unwrap();
        assert!(report.verdict);
    }

    #[test]
    fn occurrence_examples() {
        let t = tol();
        let ex = build_example2(3, &[1]).unwrap();
        let occ = occurrence_probability(&ex.h1, &ex.t, &ex.rho, &t).unwrap();
        assert!((occ.probability - 0.5).abs() < 1e-12);

        let id = Projection::identity(3);
        let h = History::new(vec![id.clone(), id.clone()]).unwrap();
        let rho = DensityOperator::maximally_mixed(3);
        assert!((occ_value(&h, &id, &rho) - 1.0).abs() < 1e-12);

        let ex1 = build_example1(2, FRAC_PI_3, None).unwrap();
        assert!(matches!(
            occurrence_probability(&ex1.h1, &ex1.e1, &ex1.rho1, &t),
            Err(Error::MirrorNotVerified)
        ));
    }

    fn occ_value(h: &History, t: &Projection, rho: &DensityOperator) -> f64 {
        occurrence_probability(h, t, rho, &tol())
            .unwrap()
            .probability
    }

    #[test]
    fn proposition1_on_example2() {
        let t = tol();
        let ex = build_example2(3, &[2, 3]).unwrap();
        let r = proposition1_check(&ex.t, &ex.u, &ex.h1, &ex.h2, &ex.big_psi, &t).unwrap();
        assert!(r.passed);
        assert!(r.overlap <= 1e-9 && r.join_residual <= 1e-9 && r.interference <= 1e-9);

        // Swapped mirrors fail the precondition.
        assert!(matches!(
            proposition1_check(&ex.u, &ex.t, &ex.h1, &ex.h2, &ex.big_psi, &t),
            Err(Error::PreconditionFailed(_))
        ));

        let zero = Projection::zero(2);
        let h = History::new(vec![zero.clone(), Projection::identity(2)]).unwrap();
        let psi = basis_vector(2, 0);
        let r = proposition1_check(&zero, &zero, &h, &h, &psi, &t).unwrap();
        assert!(r.passed && r.overlap == 0.0 && r.interference == 0.0);
    }

    #[test]
    fn contrary_bound_examples() {
        let t = tol();
        let ex = build_example2(4, &[1, 2]).unwrap();
        let c1 = verify_mirror(&ex.t, &ex.h1, &ex.rho, &t).unwrap();
        let c2 = verify_mirror(&ex.u, &ex.h2, &ex.rho, &t).unwrap();
        let r = contrary_bound_check(&ex.h1, &ex.h2, &c1, &c2, &ex.rho, &t).unwrap();
        assert!(r.passed);
        assert!((r.p_h1 + r.p_h2 - r.p_e2).abs() < 1e-12);
        assert!((r.conditional_sum.unwrap() - 1.0).abs() < 1e-12);

        let mixed = DensityOperator::maximally_mixed(8);
        assert!(contrary_bound_check(&ex.h1, &ex.h2, &c1, &c2, &mixed, &t).is_err());
    }

    #[test]
    fn pointer_instances() {
        let t = tol();
        let mut rng = sampling::seeded(5);
        for dim in 4..=8 {
            let inst = random_pointer_instance(&mut rng, dim).unwrap();
            let r =
                proposition1_check(&inst.t, &inst.u, &inst.h1, &inst.h2, &inst.psi, &t).unwrap();
            assert!(r.passed, "{r:?}");
            let found = search_mirror(&inst.h1, &inst.rho, &SearchOptions::default(), &t).unwrap();
            let cert = found.expect("pointer instances have mirrors");
            assert!(
                verify_mirror(&cert.t, &inst.h1, &inst.rho, &t)
                    .unwrap()
                    .verified
            );
        }
    }
}
