//! Builders for the two reference scenarios and for random pointer models.
//!
//! *Example 1* lives in `C^dim` (`dim >= 2`, zero padded beyond the first
//! two basis vectors). `psi1`, `psi2` are the first two basis vectors,
//! `E1` projects onto `(psi1 + psi2)/sqrt2`, and `E2` is the rank-one
//! projector onto `(cos(theta/2), e^{i alpha} sin(theta/2))`. Without an
//! explicit `alpha` the off-diagonal entry is `-(i/2) sin theta`, which is
//! the `alpha = pi/2` member of the same family.
//!
//! *Example 2* is a truncated two-slit model on `C^m (x) C^2`: spatial basis
//! vectors 1 and 2 are the slit states, the screen region `Delta` is a set
//! of 1-based spatial basis indices, and the internal two-level factor is
//! the which-path marker with basis `|0>`, `|1>`.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use num_complex::Complex64;
use rand::Rng;

use crate::consistency::{check_linear_positivity, ConsistencyReport};
use crate::error::{Error, Result};
use crate::histories::{make_resolution, History, HistoryFamily, HistoryId};
use crate::matcore::{
    basis_vector, validate_projection, CMatrix, CVector, DensityOperator, Projection,
    SquareComplexMatrix, ToleranceConfig, ZERO,
};
use crate::sampling;

/// The `2 x 2` block of `E2` for the given angles.
pub fn example1_e2_block(theta: f64, alpha: Option<f64>) -> [[Complex64; 2]; 2] {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let half_sin = 0.5 * theta.sin();
    let upper = match alpha {
        Some(a) => Complex64::from_polar(half_sin, -a),
        None => Complex64::new(0.0, -half_sin),
    };
    [
        [Complex64::new(c * c, 0.0), upper],
        [upper.conj(), Complex64::new(s * s, 0.0)],
    ]
}

#[derive(Clone, Debug)]
pub struct Example1Instance {
    pub dim: usize,
    pub theta: f64,
    pub alpha: Option<f64>,
    pub psi1: CVector,
    pub psi2: CVector,
    pub phi: CVector,
    pub e1: Projection,
    pub e2: Projection,
    pub rho1: DensityOperator,
    pub rho2: DensityOperator,
    pub rho: DensityOperator,
    pub family: HistoryFamily,
    /// `(E1, E2)`.
    pub h1: History,
    /// `(1 - E1, E2)`.
    pub h2: History,
    /// `h1 + h2 = (1, E2)`.
    pub h_coarse: History,
}

pub fn build_example1(dim: usize, theta: f64, alpha: Option<f64>) -> Result<Example1Instance> {
    let tol = ToleranceConfig::default();
    if dim < 2 {
        return Err(Error::BadParameters(format!(
            "dim must be at least 2, got {dim}"
        )));
    }
    if !(theta > 0.0 && theta < std::f64::consts::PI) {
        return Err(Error::BadParameters(format!(
            "theta must lie in (0, pi), got {theta}"
        )));
    }
    if let Some(a) = alpha {
        if !a.is_finite() {
            return Err(Error::BadParameters("alpha must be finite".into()));
        }
    }
    let psi1 = basis_vector(dim, 0);
    let psi2 = basis_vector(dim, 1);
    let phi = (&psi1 + &psi2).map(|z| z * FRAC_1_SQRT_2);
    let e1 = Projection::onto_vector(&phi);

    let block = example1_e2_block(theta, alpha);
    let mut m = CMatrix::zeros(dim, dim);
    for a in 0..2 {
        for b in 0..2 {
            m[(a, b)] = block[a][b];
        }
    }
    let e2 = validate_projection(&SquareComplexMatrix::new(m)?, &tol)?;

    let rho1 = DensityOperator::pure(&psi1)?;
    let rho2 = DensityOperator::pure(&psi2)?;
    let rho = DensityOperator::from_trusted(
        (rho1.matrix().as_matrix() + rho2.matrix().as_matrix()).map(|z| z * 0.5),
    );

    let h1 = History::new(vec![e1.clone(), e2.clone()])?;
    let h2 = History::new(vec![e1.complement(), e2.clone()])?;
    let h_coarse = History::new(vec![Projection::identity(dim), e2.clone()])?;
    let family = HistoryFamily::generated_by(&h1, &tol)?;
    Ok(Example1Instance {
        dim,
        theta,
        alpha,
        psi1,
        psi2,
        phi,
        e1,
        e2,
        rho1,
        rho2,
        rho,
        family,
        h1,
        h2,
        h_coarse,
    })
}

/// Closed-form values for Example 1 with respect to `rho1` (no `alpha`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Example1Expected {
    /// `p(1, E2) = cos^2(theta/2)`.
    pub p_coarse: f64,
    pub p_h1: f64,
    pub p_h2: f64,
    /// `Re D(h1, h2) = (p_coarse - p_h1 - p_h2) / 2`.
    pub weak_residual_rho1: f64,
}

pub fn example1_expected(theta: f64) -> Example1Expected {
    let p_coarse = (theta / 2.0).cos().powi(2);
    Example1Expected {
        p_coarse,
        p_h1: 0.25,
        p_h2: 0.25,
        weak_residual_rho1: (p_coarse - 0.5) / 2.0,
    }
}

/// `Tr(C_h1 rho1) = <psi1|E2 E1 psi1> = (cos^2(theta/2) + e^{-i alpha} sin(theta/2) cos(theta/2)) / 2`.
pub fn linear_positivity_closed_form(theta: f64, alpha: f64) -> Complex64 {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    (Complex64::new(c * c, 0.0) + Complex64::from_polar(s * c, -alpha)) * 0.5
}

/// Note attached to linear-positivity reports on Example 1.
///
/// `cos(theta/2) + cos(alpha) sin(theta/2) > 0` for every `alpha` whenever
/// `theta < pi/2`, so a violation needs `theta > pi/2` and
/// `cos(alpha) < -cot(theta/2)`.
pub fn linear_positivity_range_note(theta: f64) -> String {
    let region = if theta < FRAC_PI_2 {
        "theta is below pi/2, where no alpha can violate linear positivity"
    } else {
        "theta is above pi/2, where alpha with cos(alpha) < -cot(theta/2) violates linear positivity"
    };
    format!(
        "range check: for 0 < theta < pi/2 the value cos(theta/2)(cos(theta/2) + cos(alpha) sin(theta/2))/2 \
         is strictly positive, so violations need theta in (pi/2, pi); here {region}"
    )
}

impl Example1Instance {
    /// The state selected by name: `rho`, `rho1` or `rho2`.
    pub fn state(&self, name: &str) -> Result<&DensityOperator> {
        match name {
            "rho" | "mixture" => Ok(&self.rho),
            "rho1" => Ok(&self.rho1),
            "rho2" => Ok(&self.rho2),
            other => Err(Error::BadParameters(format!(
                "unknown state {other:?}; expected rho, rho1 or rho2"
            ))),
        }
    }

    /// Linear positivity with the range note attached.
    pub fn linear_positivity_report(
        &self,
        rho: &DensityOperator,
        tol: &ToleranceConfig,
    ) -> Result<ConsistencyReport> {
        let mut report = check_linear_positivity(&self.family, rho, tol)?;
        report.notes.push(linear_positivity_range_note(self.theta));
        Ok(report)
    }
}

#[derive(Clone, Debug)]
pub struct Example2Instance {
    pub spatial_dim: usize,
    /// 1-based spatial basis indices forming the screen region.
    pub delta: Vec<usize>,
    pub psi1: CVector,
    pub psi2: CVector,
    /// `(psi1 (x) |1> + psi2 (x) |0>) / sqrt2`.
    pub big_psi: CVector,
    pub rho: DensityOperator,
    pub e1: Projection,
    pub f1: Projection,
    pub e2: Projection,
    /// `1 (x) |1><1|`.
    pub t: Projection,
    /// `1 (x) |0><0|`.
    pub u: Projection,
    pub family: HistoryFamily,
    /// `(E1, E2)`.
    pub h1: History,
    /// `(F1, E2)`.
    pub h2: History,
}

pub fn build_example2(spatial_dim: usize, delta: &[usize]) -> Result<Example2Instance> {
    let tol = ToleranceConfig::default();
    if spatial_dim < 2 {
        return Err(Error::BadParameters(format!(
            "spatial_dim must be at least 2, got {spatial_dim}"
        )));
    }
    if delta.is_empty() {
        return Err(Error::BadParameters("Delta must be nonempty".into()));
    }
    if let Some(&bad) = delta.iter().find(|&&k| k == 0 || k > spatial_dim) {
        return Err(Error::BadParameters(format!(
            "Delta index {bad} outside 1..={spatial_dim}"
        )));
    }
    let mut delta: Vec<usize> = delta.to_vec();
    delta.sort_unstable();
    delta.dedup();

    let m = spatial_dim;
    let psi1 = basis_vector(m, 0);
    let psi2 = basis_vector(m, 1);
    let up = basis_vector(2, 1);
    let down = basis_vector(2, 0);
    let big_psi = (psi1.kronecker(&up) + psi2.kronecker(&down)).map(|z| z * FRAC_1_SQRT_2);
    let rho = DensityOperator::pure(&big_psi)?;

    let id2 = Projection::identity(2);
    let e1 = Projection::basis_subset(m, &[0])?.kron(&id2);
    let f1 = Projection::basis_subset(m, &[1])?.kron(&id2);
    let zero_based: Vec<usize> = delta.iter().map(|k| k - 1).collect();
    let e2 = Projection::basis_subset(m, &zero_based)?.kron(&id2);
    let t = Projection::identity(m).kron(&Projection::onto_vector(&up));
    let u = Projection::identity(m).kron(&Projection::onto_vector(&down));

    let rest = Projection::basis_subset(m, &(2..m).collect::<Vec<_>>())?.kron(&id2);
    let slits: Vec<Projection> = [e1.clone(), f1.clone(), rest]
        .into_iter()
        .filter(|p| !p.is_zero(&tol))
        .collect();
    let screen: Vec<Projection> = [e2.clone(), e2.complement()]
        .into_iter()
        .filter(|p| !p.is_zero(&tol))
        .collect();
    let family = HistoryFamily::new(vec![
        make_resolution(slits, &tol)?,
        make_resolution(screen, &tol)?,
    ])?;
    let h1 = History::new(vec![e1.clone(), e2.clone()])?;
    let h2 = History::new(vec![f1.clone(), e2.clone()])?;
    Ok(Example2Instance {
        spatial_dim,
        delta,
        psi1,
        psi2,
        big_psi,
        rho,
        e1,
        f1,
        e2,
        t,
        u,
        family,
        h1,
        h2,
    })
}

/// Mirrors keyed by elementary history: slit 1 gets the first marker
/// projection, slit 2 the second, and the remaining (unpopulated) region
/// the zero projection.
fn slot_mirrors(
    family: &HistoryFamily,
    first: &Projection,
    second: &Projection,
) -> BTreeMap<HistoryId, Projection> {
    let d = family.dim();
    let mut out = BTreeMap::new();
    for i in 1..=family.resolutions()[0].len() {
        for j in 1..=family.resolutions()[1].len() {
            let t = match i {
                1 => first.clone(),
                2 => second.clone(),
                _ => Projection::zero(d),
            };
            out.insert(HistoryId(vec![i, j]), t);
        }
    }
    out
}

impl Example2Instance {
    pub fn mirrors(&self) -> BTreeMap<HistoryId, Projection> {
        slot_mirrors(&self.family, &self.t, &self.u)
    }
}

/// A random self-decohering tensor-pointer instance.
///
/// The space is `(C^m (x) C^2) (+) C^pad`. Spatial projections `E1`, `F1`
/// (orthogonal) and `E2` (generic, so the histories do not commute) act as
/// `X (x) 1` on the first summand. The state correlates the slit states with
/// the marker, so `T = 1 (x) |1><1|` and `U = 1 (x) |0><0|` are mirrors.
#[derive(Clone, Debug)]
pub struct PointerInstance {
    pub spatial_dim: usize,
    pub pad: usize,
    pub e1: Projection,
    pub f1: Projection,
    pub e2: Projection,
    pub t: Projection,
    pub u: Projection,
    pub psi: CVector,
    pub rho: DensityOperator,
    pub family: HistoryFamily,
    pub h1: History,
    pub h2: History,
    spatial_e1: CMatrix,
    spatial_f1: CMatrix,
}

impl PointerInstance {
    pub fn dim(&self) -> usize {
        2 * self.spatial_dim + self.pad
    }

    pub fn mirrors(&self) -> BTreeMap<HistoryId, Projection> {
        slot_mirrors(&self.family, &self.t, &self.u)
    }

    /// Another pure state with the same slit/marker correlation, so the same
    /// `T` and `U` remain mirrors.
    pub fn random_compatible_state(&self, rng: &mut impl Rng) -> Result<DensityOperator> {
        let psi = correlated_state(rng, &self.spatial_e1, &self.spatial_f1, self.pad);
        DensityOperator::pure(&psi)
    }
}

fn random_in_range(rng: &mut impl Rng, basis: &CMatrix) -> CVector {
    let c = sampling::random_state(rng, basis.ncols());
    basis * c
}

/// `a psi1 (x) |1> + b psi2 (x) |0>` with `psi1` in the range of `E1`,
/// `psi2` in the range of `F1` (bases given as columns), zero padded.
fn correlated_state(
    rng: &mut impl Rng,
    e1_basis: &CMatrix,
    f1_basis: &CMatrix,
    pad: usize,
) -> CVector {
    let psi1 = random_in_range(rng, e1_basis);
    let psi2 = random_in_range(rng, f1_basis);
    let angle: f64 = rng.random_range(0.1..1.47);
    let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let a = Complex64::new(angle.cos(), 0.0);
    let b = Complex64::from_polar(angle.sin(), phase);
    let joint = psi1.kronecker(&basis_vector(2, 1)).map(|z| z * a)
        + psi2.kronecker(&basis_vector(2, 0)).map(|z| z * b);
    let mut out = CVector::from_element(joint.len() + pad, ZERO);
    out.rows_mut(0, joint.len()).copy_from(&joint);
    out
}

/// Random pointer instance in total dimension `dim >= 4`.
pub fn random_pointer_instance(rng: &mut impl Rng, dim: usize) -> Result<PointerInstance> {
    if dim < 4 {
        return Err(Error::BadParameters(format!(
            "pointer instances need dim >= 4, got {dim}"
        )));
    }
    let tol = ToleranceConfig::default();
    let m = dim / 2;
    let pad = dim % 2;
    let v = sampling::random_unitary(rng, m);
    let r1 = rng.random_range(1..m);
    let r2 = rng.random_range(1..=m - r1);
    let spatial_e1 = v.columns(0, r1).into_owned();
    let spatial_f1 = v.columns(r1, r2).into_owned();
    let e2_rank = rng.random_range(1..m.max(2));
    let spatial_e2 = sampling::random_projection(rng, m, e2_rank.min(m));

    let id2 = Projection::identity(2);
    let lift = |p: &Projection| p.kron(&id2).pad_to(dim);
    let e1 = lift(&Projection::from_orthonormal_columns(&spatial_e1))?;
    let f1 = lift(&Projection::from_orthonormal_columns(&spatial_f1))?;
    let e2 = lift(&spatial_e2)?;
    let t = Projection::identity(m)
        .kron(&Projection::onto_vector(&basis_vector(2, 1)))
        .pad_to(dim)?;
    let u = Projection::identity(m)
        .kron(&Projection::onto_vector(&basis_vector(2, 0)))
        .pad_to(dim)?;

    let psi = correlated_state(rng, &spatial_e1, &spatial_f1, pad);
    let rho = DensityOperator::pure(&psi)?;

    let rest = Projection::from_trusted(
        CMatrix::identity(dim, dim) - e1.matrix().as_matrix() - f1.matrix().as_matrix(),
        dim - e1.rank() - f1.rank(),
    );
    let slits: Vec<Projection> = [e1.clone(), f1.clone(), rest]
        .into_iter()
        .filter(|p| !p.is_zero(&tol))
        .collect();
    let family = HistoryFamily::new(vec![
        make_resolution(slits, &tol)?,
        make_resolution(vec![e2.clone(), e2.complement()], &tol)?,
    ])?;
    let h1 = History::new(vec![e1.clone(), e2.clone()])?;
    let h2 = History::new(vec![f1.clone(), e2.clone()])?;
    Ok(PointerInstance {
        spatial_dim: m,
        pad,
        e1,
        f1,
        e2,
        t,
        u,
        psi,
        rho,
        family,
        h1,
        h2,
        spatial_e1,
        spatial_f1,
    })
}

/// A random two-event family whose resolutions are diagonal in one random
/// basis, so every history commutes.
pub fn random_commuting_family(rng: &mut impl Rng, dim: usize) -> Result<HistoryFamily> {
    let tol = ToleranceConfig::default();
    let u = sampling::random_unitary(rng, dim);
    let parts1 = rng.random_range(1..=dim.min(3));
    let parts2 = rng.random_range(1..=dim.min(3));
    // Shuffle the basis between slots so the resolutions differ.
    let mut perm: Vec<usize> = (0..dim).collect();
    for k in (1..dim).rev() {
        let j = rng.random_range(0..=k);
        perm.swap(k, j);
    }
    let mut shuffled = CMatrix::zeros(dim, dim);
    for (col, &k) in perm.iter().enumerate() {
        shuffled.set_column(col, &u.column(k));
    }
    HistoryFamily::new(vec![
        make_resolution(sampling::split_basis(rng, &u, parts1), &tol)?,
        make_resolution(sampling::split_basis(rng, &shuffled, parts2), &tol)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::consistency::probability;
    use crate::matcore::max_norm;
    use std::f64::consts::{FRAC_PI_3, PI};

    #[test]
    fn example1_e2_at_pi_over_3() {
        let inst = build_example1(3, FRAC_PI_3, None).unwrap();
        let o = 3f64.sqrt() / 4.0;
        let m = inst.e2.matrix();
        assert!((m[(0, 0)] - Complex64::new(0.75, 0.0)).norm() < 1e-15);
        assert!((m[(0, 1)] - Complex64::new(0.0, -o)).norm() < 1e-15);
        assert!((m[(1, 0)] - Complex64::new(0.0, o)).norm() < 1e-15);
        assert!((m[(1, 1)] - Complex64::new(0.25, 0.0)).norm() < 1e-15);
        assert_eq!(inst.e2.rank(), 1);
    }

    #[test]
    fn example1_e1_fixes_phi() {
        for theta in [0.1, 1.0, 2.5] {
            let inst = build_example1(4, theta, None).unwrap();
            let image = inst.e1.matrix().as_matrix() * &inst.phi;
            assert!((image - &inst.phi).norm() < 1e-15);
        }
    }

    #[test]
    fn example1_alpha_variant_is_real_at_pi() {
        let inst = build_example1(3, 2.0, Some(PI)).unwrap();
        let off = inst.e2.matrix()[(0, 1)];
        assert!((off.re + 0.5 * 2f64.sin()).abs() < 1e-15);
        assert!(off.im.abs() < 1e-15);
    }

    #[test]
    fn theta_matrix_is_alpha_half_pi() {
        let a = example1_e2_block(0.7, None);
        let b = example1_e2_block(0.7, Some(FRAC_PI_2));
        for r in 0..2 {
            for c in 0..2 {
                assert!((a[r][c] - b[r][c]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn example1_rejects_bad_parameters() {
        assert!(build_example1(1, 1.0, None).is_err());
        assert!(build_example1(3, 0.0, None).is_err());
        assert!(build_example1(3, PI, None).is_err());
    }

    #[test]
    fn expected_values() {
        let e = example1_expected(FRAC_PI_3);
        assert!((e.p_coarse - 0.75).abs() < 1e-15);
        assert!((e.weak_residual_rho1 - 0.125).abs() < 1e-15);
        let e = example1_expected(FRAC_PI_2);
        assert!((e.p_coarse - 0.5).abs() < 1e-15);
        assert!(e.weak_residual_rho1.abs() < 1e-15);
        assert!((example1_expected(1e-9).p_coarse - 1.0).abs() < 1e-15);
    }

    #[test]
    fn example2_probabilities() {
        let inst = build_example2(2, &[1]).unwrap();
        assert_eq!(inst.rho.dim(), 4);
        assert!((probability(&inst.h1, &inst.rho).unwrap() - 0.5).abs() < 1e-15);
        assert!(probability(&inst.h2, &inst.rho).unwrap().abs() < 1e-15);

        let inst = build_example2(3, &[1, 2, 3]).unwrap();
        assert!(max_norm(&(inst.e2.matrix().as_matrix() - CMatrix::identity(6, 6))) < 1e-15);
        assert!((probability(&inst.h1, &inst.rho).unwrap() - 0.5).abs() < 1e-15);
        assert!((probability(&inst.h2, &inst.rho).unwrap() - 0.5).abs() < 1e-15);

        let inst = build_example2(4, &[3, 4]).unwrap();
        assert!(probability(&inst.h1, &inst.rho).unwrap().abs() < 1e-15);
        assert!(probability(&inst.h2, &inst.rho).unwrap().abs() < 1e-15);
    }

    #[test]
    fn example2_slit_relations() {
        let inst = build_example2(3, &[2]).unwrap();
        let id2 = CMatrix::identity(2, 2);
        let e1s = inst.e1.matrix().as_matrix();
        let f1s = inst.f1.matrix().as_matrix();
        for marker in 0..2 {
            let p1 = inst.psi1.kronecker(&id2.column(marker).into_owned());
            let p2 = inst.psi2.kronecker(&id2.column(marker).into_owned());
            assert!((e1s * &p1 - &p1).norm() < 1e-15);
            assert!((f1s * &p2 - &p2).norm() < 1e-15);
            assert!((e1s * &p2).norm() < 1e-15);
            assert!((f1s * &p1).norm() < 1e-15);
        }
    }

    #[test]
    fn example2_rejects_bad_parameters() {
        assert!(build_example2(1, &[1]).is_err());
        assert!(build_example2(3, &[]).is_err());
        assert!(build_example2(3, &[0]).is_err());
        assert!(build_example2(3, &[4]).is_err());
    }

    #[test]
    fn pointer_instances_are_noncommuting() {
        let mut rng = sampling::seeded(11);
        for dim in 4..=8 {
            let inst = random_pointer_instance(&mut rng, dim).unwrap();
            assert_eq!(inst.dim(), dim);
            assert!((inst.psi.norm() - 1.0).abs() < 1e-14);
        }
        assert!(random_pointer_instance(&mut rng, 3).is_err());
    }
}
