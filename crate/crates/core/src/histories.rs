//! Histories, resolutions of the identity and the families they generate.
//!
//! Slot and event indices in identifiers ([`HistoryId`], [`MemberId`]) are
//! 1-based; the Rust accessors on [`History`] are 0-based.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{
    commutator_norm, is_orthogonal, max_norm, projection_leq, CMatrix, Projection,
    SquareComplexMatrix, ToleranceConfig,
};

/// Cap on the number of coarse-grained members enumerated by default.
pub const DEFAULT_MEMBER_CAP: usize = 64;

/// A finite ordered sequence of events sharing one dimension.
#[derive(Clone, Debug)]
pub struct History {
    events: Vec<Projection>,
}

impl History {
    pub fn new(events: Vec<Projection>) -> Result<Self> {
        let first = events.first().ok_or(Error::Empty("history events"))?;
        let d = first.dim();
        if let Some(bad) = events.iter().find(|e| e.dim() != d) {
            return Err(Error::DimensionMismatch(d, bad.dim()));
        }
        Ok(Self { events })
    }

    pub fn events(&self) -> &[Projection] {
        &self.events
    }

    /// Event at the 0-based slot.
    pub fn event(&self, slot: usize) -> &Projection {
        &self.events[slot]
    }

    pub fn first(&self) -> &Projection {
        &self.events[0]
    }

    pub fn last(&self) -> &Projection {
        self.events.last().expect("histories are nonempty")
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> usize {
        self.events[0].dim()
    }

    /// Two-event histories are the ones mirror projections are defined for.
    pub fn is_two_event(&self) -> bool {
        self.events.len() == 2
    }

    /// Copy with the 0-based slot replaced.
    pub fn with_event(&self, slot: usize, event: Projection) -> Self {
        let mut events = self.events.clone();
        events[slot] = event;
        Self { events }
    }
}

/// Identifier of an elementary history: 1-based event index per slot.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HistoryId(pub Vec<usize>);

impl fmt::Display for HistoryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|k| k.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl std::str::FromStr for HistoryId {
    type Err = Error;

    /// Parses `"1,2"` or `"(1,2)"`.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let ids = inner
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .ok()
                    .filter(|&k| k >= 1)
                    .ok_or_else(|| Error::BadParameters(format!("bad history identifier {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self(ids))
    }
}

/// Identifier of a coarse-grained member: the 1-based resolution events
/// summed in each slot.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MemberId(pub Vec<Vec<usize>>);

impl fmt::Display for MemberId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|set| match set.as_slice() {
                [k] => k.to_string(),
                _ => {
                    let inner: Vec<String> = set.iter().map(|k| k.to_string()).collect();
                    format!("{{{}}}", inner.join(","))
                }
            })
            .collect();
        write!(f, "({})", parts.join(","))
    }
}

impl From<&HistoryId> for MemberId {
    fn from(id: &HistoryId) -> Self {
        MemberId(id.0.iter().map(|&k| vec![k]).collect())
    }
}

/// Pairwise orthogonal projections summing to the identity.
#[derive(Clone, Debug)]
pub struct ResolutionOfIdentity {
    events: Vec<Projection>,
    orthogonality_residual: f64,
    completeness_residual: f64,
}

impl ResolutionOfIdentity {
    pub fn events(&self) -> &[Projection] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.events[0].dim()
    }

    pub fn orthogonality_residual(&self) -> f64 {
        self.orthogonality_residual
    }

    pub fn completeness_residual(&self) -> f64 {
        self.completeness_residual
    }
}

/// Validates orthogonality and completeness. Error indices are 1-based.
pub fn make_resolution(
    projections: Vec<Projection>,
    tol: &ToleranceConfig,
) -> Result<ResolutionOfIdentity> {
    let d = projections
        .first()
        .ok_or(Error::Empty("resolution events"))?
        .dim();
    let mut orthogonality_residual: f64 = 0.0;
    let mut sum = CMatrix::zeros(d, d);
    for (i, p) in projections.iter().enumerate() {
        if p.dim() != d {
            return Err(Error::DimensionMismatch(d, p.dim()));
        }
        for (j, q) in projections.iter().enumerate().skip(i + 1) {
            let r = max_norm(&(p.matrix().as_matrix() * q.matrix().as_matrix()));
            if r > tol.eps_op {
                return Err(Error::NotOrthogonal(i + 1, j + 1, r));
            }
            orthogonality_residual = orthogonality_residual.max(r);
        }
        sum += p.matrix().as_matrix();
    }
    let completeness_residual = max_norm(&(sum - CMatrix::identity(d, d)));
    if completeness_residual > tol.eps_op {
        return Err(Error::NotComplete {
            residual: completeness_residual,
        });
    }
    Ok(ResolutionOfIdentity {
        events: projections,
        orthogonality_residual,
        completeness_residual,
    })
}

/// All slot-wise coarse-grainings of a fixed sequence of resolutions.
#[derive(Clone, Debug)]
pub struct HistoryFamily {
    resolutions: Vec<ResolutionOfIdentity>,
}

impl HistoryFamily {
    pub fn new(resolutions: Vec<ResolutionOfIdentity>) -> Result<Self> {
        let d = resolutions
            .first()
            .ok_or(Error::Empty("family resolutions"))?
            .dim();
        if let Some(bad) = resolutions.iter().find(|r| r.dim() != d) {
            return Err(Error::DimensionMismatch(d, bad.dim()));
        }
        Ok(Self { resolutions })
    }

    /// The family whose k-th resolution is `{E_k, 1 - E_k}`; zero members
    /// are dropped, so an identity event yields the trivial resolution.
    pub fn generated_by(h: &History, tol: &ToleranceConfig) -> Result<Self> {
        let resolutions = h
            .events()
            .iter()
            .map(|e| {
                let events: Vec<Projection> = [e.clone(), e.complement()]
                    .into_iter()
                    .filter(|p| !p.is_zero(tol))
                    .collect();
                make_resolution(events, tol)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(resolutions)
    }

    pub fn resolutions(&self) -> &[ResolutionOfIdentity] {
        &self.resolutions
    }

    /// Number of slots.
    pub fn len(&self) -> usize {
        self.resolutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.resolutions.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.resolutions[0].dim()
    }

    pub fn elementary_count(&self) -> usize {
        self.resolutions.iter().map(|r| r.len()).product()
    }

    /// Number of coarse-grained members (nonempty subset per slot),
    /// saturating at `usize::MAX`.
    pub fn member_count(&self) -> usize {
        self.resolutions.iter().fold(1usize, |acc, r| {
            let per_slot = 1usize
                .checked_shl(r.len() as u32)
                .map(|x| x - 1)
                .unwrap_or(usize::MAX);
            acc.saturating_mul(per_slot)
        })
    }

    /// Elementary history with the given 1-based indices.
    pub fn elementary(&self, id: &HistoryId) -> Result<History> {
        if id.0.len() != self.len() {
            return Err(Error::BadParameters(format!(
                "history identifier {id} has {} slots, family has {}",
                id.0.len(),
                self.len()
            )));
        }
        let events =
            id.0.iter()
                .zip(&self.resolutions)
                .map(|(&k, r)| {
                    r.events().get(k.wrapping_sub(1)).cloned().ok_or_else(|| {
                        Error::BadParameters(format!("history identifier {id} out of range"))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
        History::new(events)
    }
}

#[derive(Clone, Debug)]
pub struct ElementaryHistory {
    pub id: HistoryId,
    pub history: History,
}

/// Cartesian product of the resolutions, in lexicographic index order.
pub fn elementary_histories(family: &HistoryFamily) -> Vec<ElementaryHistory> {
    let mut out: Vec<ElementaryHistory> = Vec::with_capacity(family.elementary_count());
    let mut index = vec![0usize; family.len()];
    loop {
        let events = index
            .iter()
            .zip(family.resolutions())
            .map(|(&k, r)| r.events()[k].clone())
            .collect();
        out.push(ElementaryHistory {
            id: HistoryId(index.iter().map(|k| k + 1).collect()),
            history: History { events },
        });
        // Odometer increment, last slot fastest.
        let mut slot = family.len();
        loop {
            if slot == 0 {
                return out;
            }
            slot -= 1;
            index[slot] += 1;
            if index[slot] < family.resolutions()[slot].len() {
                break;
            }
            index[slot] = 0;
        }
    }
}

#[derive(Clone, Debug)]
pub struct Member {
    pub id: MemberId,
    pub history: History,
}

/// Every coarse-grained member of the family. Fails when the count exceeds
/// `cap`.
pub fn coarse_members(family: &HistoryFamily, cap: usize) -> Result<Vec<Member>> {
    let count = family.member_count();
    if count > cap {
        return Err(Error::FamilyTooLarge {
            members: count,
            cap,
        });
    }
    // Per slot: every nonempty subset of the resolution, as (ids, projection).
    let per_slot: Vec<Vec<(Vec<usize>, Projection)>> = family
        .resolutions()
        .iter()
        .map(|r| {
            (1u64..(1u64 << r.len()))
                .map(|mask| {
                    let ids: Vec<usize> = (0..r.len())
                        .filter(|k| mask & (1 << k) != 0)
                        .map(|k| k + 1)
                        .collect();
                    let proj = ids[1..]
                        .iter()
                        .fold(r.events()[ids[0] - 1].clone(), |acc, &k| {
                            acc.orthogonal_sum(&r.events()[k - 1])
                        });
                    (ids, proj)
                })
                .collect()
        })
        .collect();
    let mut out = Vec::with_capacity(count);
    let mut index = vec![0usize; family.len()];
    loop {
        out.push(Member {
            id: MemberId(
                index
                    .iter()
                    .zip(&per_slot)
                    .map(|(&k, s)| s[k].0.clone())
                    .collect(),
            ),
            history: History {
                events: index
                    .iter()
                    .zip(&per_slot)
                    .map(|(&k, s)| s[k].1.clone())
                    .collect(),
            },
        });
        let mut slot = family.len();
        loop {
            if slot == 0 {
                return Ok(out);
            }
            slot -= 1;
            index[slot] += 1;
            if index[slot] < per_slot[slot].len() {
                break;
            }
            index[slot] = 0;
        }
    }
}

/// Whether each event of `h` is a sum of events of the matching resolution.
///
/// Every resolution event must be either below or orthogonal to the slot
/// event, and those below must add up to it.
pub fn is_member(h: &History, family: &HistoryFamily, tol: &ToleranceConfig) -> bool {
    if h.len() != family.len() || h.dim() != family.dim() {
        return false;
    }
    h.events()
        .iter()
        .zip(family.resolutions())
        .all(|(event, res)| {
            let d = event.dim();
            let mut covered = CMatrix::zeros(d, d);
            for r in res.events() {
                if projection_leq(r, event, tol).unwrap_or(false) {
                    covered += r.matrix().as_matrix();
                } else if !is_orthogonal(r, event, tol).unwrap_or(false) {
                    return false;
                }
            }
            max_norm(&(covered - event.matrix().as_matrix())) <= tol.eps_op
        })
}

fn same_shape(h1: &History, h2: &History) -> bool {
    h1.len() == h2.len() && h1.dim() == h2.dim()
}

/// The unique 1-based slot where two histories differ, provided the events
/// there are orthogonal and all other slots agree.
pub fn summable(h1: &History, h2: &History, tol: &ToleranceConfig) -> Option<usize> {
    if !same_shape(h1, h2) {
        return None;
    }
    let mut differing = h1
        .events()
        .iter()
        .zip(h2.events())
        .enumerate()
        .filter(|(_, (a, b))| !a.approx_eq(b, tol));
    let (k, (a, b)) = differing.next()?;
    if differing.next().is_some() {
        return None;
    }
    is_orthogonal(a, b, tol).ok()?.then_some(k + 1)
}

/// `h1 + h2`: slot-wise identical except the differing slot, which holds the
/// sum of the two (orthogonal) events.
pub fn history_sum(h1: &History, h2: &History, tol: &ToleranceConfig) -> Result<History> {
    let k = summable(h1, h2, tol).ok_or(Error::NotSummable)?;
    let sum = h1.event(k - 1).orthogonal_sum(h2.event(k - 1));
    Ok(h1.with_event(k - 1, sum))
}

/// Some slot holds orthogonal events.
pub fn alternative(h1: &History, h2: &History, tol: &ToleranceConfig) -> bool {
    same_shape(h1, h2)
        && h1
            .events()
            .iter()
            .zip(h2.events())
            .any(|(a, b)| is_orthogonal(a, b, tol).unwrap_or(false))
}

/// `C_h = E_n ... E_2 E_1`.
pub fn chain_operator(h: &History) -> SquareComplexMatrix {
    let mut c = h.first().matrix().as_matrix().clone();
    for e in &h.events()[1..] {
        c = e.matrix().as_matrix() * c;
    }
    SquareComplexMatrix::new(c).expect("square by construction")
}

/// Slot-wise projection order: `E_k <= F_k` for every `k`.
pub fn history_leq(h1: &History, h2: &History, tol: &ToleranceConfig) -> bool {
    same_shape(h1, h2)
        && h1
            .events()
            .iter()
            .zip(h2.events())
            .all(|(a, b)| projection_leq(a, b, tol).unwrap_or(false))
}

/// Largest pairwise commutator (max-norm) among the events.
pub fn commutation_residual(h: &History) -> f64 {
    let ev = h.events();
    let mut worst: f64 = 0.0;
    for i in 0..ev.len() {
        for j in (i + 1)..ev.len() {
            worst = worst.max(commutator_norm(
                ev[i].matrix().as_matrix(),
                ev[j].matrix().as_matrix(),
            ));
        }
    }
    worst
}

/// All events commute pairwise within `eps_op`.
pub fn is_commutative(h: &History, tol: &ToleranceConfig) -> bool {
    commutation_residual(h) <= tol.eps_op
}
