#![allow(dead_code)]

use chist::histories::{make_resolution, HistoryFamily};
use chist::matcore::CMatrix;
use chist::sampling::{self, SeededRng};
use chist::{DensityOperator, ToleranceConfig};
use rand::Rng;

pub fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

/// Random family with `slots` resolutions of at most `max_parts` events each.
pub fn random_family(
    rng: &mut SeededRng,
    dim: usize,
    slots: usize,
    max_parts: usize,
) -> HistoryFamily {
    let resolutions = (0..slots)
        .map(|_| {
            let parts = rng.random_range(1..=dim.min(max_parts));
            make_resolution(sampling::random_resolution(rng, dim, parts), &tol()).unwrap()
        })
        .collect();
    HistoryFamily::new(resolutions).unwrap()
}

/// Random family whose resolutions are all diagonal in one random basis.
pub fn random_commuting_family(
    rng: &mut SeededRng,
    dim: usize,
    slots: usize,
    max_parts: usize,
) -> HistoryFamily {
    let u = sampling::random_unitary(rng, dim);
    let resolutions = (0..slots)
        .map(|_| {
            let mut perm: Vec<usize> = (0..dim).collect();
            for k in (1..dim).rev() {
                perm.swap(k, rng.random_range(0..=k));
            }
            let mut basis = CMatrix::zeros(dim, dim);
            for (col, &k) in perm.iter().enumerate() {
                basis.set_column(col, &u.column(k));
            }
            let parts = rng.random_range(1..=dim.min(max_parts));
            make_resolution(sampling::split_basis(rng, &basis, parts), &tol()).unwrap()
        })
        .collect();
    HistoryFamily::new(resolutions).unwrap()
}

pub fn random_state(rng: &mut SeededRng, dim: usize) -> DensityOperator {
    let rank = rng.random_range(1..=dim);
    sampling::random_density(rng, dim, rank)
}
