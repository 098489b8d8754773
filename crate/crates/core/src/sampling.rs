//! Seeded random operators for property tests, searches and sweeps.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matcore::{CMatrix, CVector, DensityOperator, Projection, SquareComplexMatrix};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn gaussian_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
    DMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Random unit vector, uniformly distributed on the sphere.
pub fn random_state(rng: &mut impl Rng, dim: usize) -> CVector {
    let v = CVector::from_fn(dim, |_, _| gaussian(rng));
    let n = v.norm();
    v.map(|z| z / n)
}

/// Random unitary from the QR factorization of a Gaussian matrix.
pub fn random_unitary(rng: &mut impl Rng, dim: usize) -> CMatrix {
    gaussian_matrix(rng, dim, dim).qr().q()
}

/// Random projection of the given rank.
pub fn random_projection(rng: &mut impl Rng, dim: usize, rank: usize) -> Projection {
    let u = random_unitary(rng, dim);
    Projection::from_orthonormal_columns(&u.columns(0, rank).into_owned())
}

pub fn random_hermitian(rng: &mut impl Rng, dim: usize) -> SquareComplexMatrix {
    let g = gaussian_matrix(rng, dim, dim);
    SquareComplexMatrix::new((&g + g.adjoint()).map(|z| z * 0.5)).expect("square")
}

/// Random density operator of the given rank.
pub fn random_density(rng: &mut impl Rng, dim: usize, rank: usize) -> DensityOperator {
    let g = gaussian_matrix(rng, dim, rank.max(1));
    let m = &g * g.adjoint();
    let t = m.trace();
    DensityOperator::from_trusted(m.map(|z| z / t))
}

/// Splits the columns of `basis` into `parts` nonempty consecutive groups of
/// random sizes and returns the projections onto each group.
pub fn split_basis(rng: &mut impl Rng, basis: &CMatrix, parts: usize) -> Vec<Projection> {
    let d = basis.ncols();
    assert!(
        parts >= 1 && parts <= d,
        "cannot split {d} columns into {parts} parts"
    );
    // Choose parts-1 distinct cut points in 1..d.
    let mut cuts: Vec<usize> = (1..d).collect();
    for k in 0..cuts.len() {
        let j = rng.random_range(k..cuts.len());
        cuts.swap(k, j);
    }
    let mut cuts: Vec<usize> = cuts.into_iter().take(parts - 1).collect();
    cuts.sort_unstable();
    let mut bounds = vec![0];
    bounds.extend(cuts);
    bounds.push(d);
    bounds
        .windows(2)
        .map(|w| {
            Projection::from_orthonormal_columns(&basis.columns(w[0], w[1] - w[0]).into_owned())
        })
        .collect()
}

/// Random resolution of the identity with `parts` elements.
pub fn random_resolution(rng: &mut impl Rng, dim: usize, parts: usize) -> Vec<Projection> {
    let u = random_unitary(rng, dim);
    split_basis(rng, &u, parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{max_norm, ToleranceConfig};

    #[test]
    fn unitary_is_unitary() {
        let mut rng = seeded(1);
        for d in 1..7 {
            let u = random_unitary(&mut rng, d);
            let e = &u * u.adjoint() - CMatrix::identity(d, d);
            assert!(max_norm(&e) < 1e-13);
        }
    }

    #[test]
    fn resolutions_sum_to_identity() {
        let mut rng = seeded(2);
        let tol = ToleranceConfig::default();
        for d in 2..7 {
            for parts in 1..=d {
                let res = random_resolution(&mut rng, d, parts);
                assert_eq!(res.len(), parts);
                let mut sum = CMatrix::zeros(d, d);
                for p in &res {
                    assert!(p.rank() >= 1);
                    assert!(p.idempotent_residual() < tol.eps_op);
                    sum += p.matrix().as_matrix();
                }
                assert!(max_norm(&(sum - CMatrix::identity(d, d))) < 1e-12);
            }
        }
    }

    #[test]
    fn seeding_is_reproducible() {
        let a = random_state(&mut seeded(7), 4);
        let b = random_state(&mut seeded(7), 4);
        assert_eq!(a, b);
    }
}
