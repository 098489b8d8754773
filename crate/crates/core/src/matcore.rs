//! Dense complex matrix algebra at small dimension.
//!
//! Everything here works on `d x d` complex matrices with `d` in the low
//! tens at most. Three validated wrappers carry the operator types used
//! throughout the crate:
//!
//! - [`SquareComplexMatrix`]: any square complex matrix,
//! - [`Projection`]: Hermitian and idempotent within `eps_op`,
//! - [`DensityOperator`]: Hermitian, positive semidefinite, unit trace.
//!
//! The lattice and spectral helpers ([`join`], [`spectral_decomposition`],
//! [`commutant_basis`], [`cyclic_projection`]) all make a single rank
//! decision against `eps_eig` and otherwise stay in floating point.

use std::ops::{Add, Deref, Mul, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Numerical tolerances shared by every checker.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Bound on operator-identity residuals (max-norm).
    pub eps_op: f64,
    /// Bound used to classify eigenvalues and singular values.
    pub eps_eig: f64,
    /// Bound on probability and trace equalities.
    pub eps_prob: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            eps_op: 1e-10,
            eps_eig: 1e-8,
            eps_prob: 1e-9,
        }
    }
}

impl ToleranceConfig {
    pub fn new(eps_op: f64, eps_eig: f64, eps_prob: f64) -> Result<Self> {
        let tol = Self {
            eps_op,
            eps_eig,
            eps_prob,
        };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<()> {
        let all_positive = [self.eps_op, self.eps_eig, self.eps_prob]
            .iter()
            .all(|e| e.is_finite() && *e > 0.0);
        if !all_positive {
            return Err(Error::BadParameters(
                "tolerances must be finite and strictly positive".into(),
            ));
        }
        if self.eps_prob < self.eps_op {
            return Err(Error::BadParameters(format!(
                "eps_prob ({}) must not be smaller than eps_op ({})",
                self.eps_prob, self.eps_op
            )));
        }
        Ok(())
    }
}

/// Largest absolute entry.
pub fn max_norm(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// A dense `dim x dim` complex matrix with `dim >= 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareComplexMatrix(CMatrix);

impl SquareComplexMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::EmptyMatrix);
        }
        Ok(Self(m))
    }

    /// Builds a matrix from separate real and imaginary row arrays.
    pub fn from_parts(re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<Self> {
        let rows = re.len();
        if im.len() != rows {
            return Err(Error::DimensionMismatch(rows, im.len()));
        }
        for (r, i) in re.iter().zip(im) {
            if r.len() != rows {
                return Err(Error::NotSquare {
                    rows,
                    cols: r.len(),
                });
            }
            if i.len() != rows {
                return Err(Error::NotSquare {
                    rows,
                    cols: i.len(),
                });
            }
        }
        let m = CMatrix::from_fn(rows, rows, |a, b| Complex64::new(re[a][b], im[a][b]));
        Self::new(m)
    }

    /// Splits into real and imaginary row arrays.
    pub fn to_parts(&self) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let d = self.dim();
        let re = (0..d)
            .map(|a| (0..d).map(|b| self.0[(a, b)].re).collect())
            .collect();
        let im = (0..d)
            .map(|a| (0..d).map(|b| self.0[(a, b)].im).collect())
            .collect();
        (re, im)
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::NotSquare {
                rows: d,
                cols: rows.iter().map(|r| r.len()).max().unwrap_or(0),
            });
        }
        Self::new(CMatrix::from_fn(d, d, |a, b| {
            Complex64::new(rows[a][b], 0.0)
        }))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(CMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(CMatrix::identity(dim, dim))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let d = diag.len();
        Self(CMatrix::from_fn(d, d, |a, b| {
            if a == b {
                Complex64::new(diag[a], 0.0)
            } else {
                ZERO
            }
        }))
    }

    /// `|v><w|`.
    pub fn outer(v: &CVector, w: &CVector) -> Self {
        Self(v * w.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_inner(self) -> CMatrix {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn max_norm(&self) -> f64 {
        max_norm(&self.0)
    }

    pub fn hermitian_residual(&self) -> f64 {
        max_norm(&(&self.0 - self.0.adjoint()))
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self(self.0.map(|z| z * factor))
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self(self.0.kronecker(&other.0))
    }

    /// Block-diagonal embedding into a larger space, zero padded.
    pub fn pad_to(&self, dim: usize) -> Result<Self> {
        if dim < self.dim() {
            return Err(Error::DimensionMismatch(self.dim(), dim));
        }
        let mut m = CMatrix::zeros(dim, dim);
        m.view_mut((0, 0), (self.dim(), self.dim()))
            .copy_from(&self.0);
        Ok(Self(m))
    }
}

impl Deref for SquareComplexMatrix {
    type Target = CMatrix;

    fn deref(&self) -> &CMatrix {
        &self.0
    }
}

impl<'a> Mul<&'a SquareComplexMatrix> for &'a SquareComplexMatrix {
    type Output = SquareComplexMatrix;

    fn mul(self, rhs: &'a SquareComplexMatrix) -> SquareComplexMatrix {
        SquareComplexMatrix(&self.0 * &rhs.0)
    }
}

impl<'a> Add<&'a SquareComplexMatrix> for &'a SquareComplexMatrix {
    type Output = SquareComplexMatrix;

    fn add(self, rhs: &'a SquareComplexMatrix) -> SquareComplexMatrix {
        SquareComplexMatrix(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a SquareComplexMatrix> for &'a SquareComplexMatrix {
    type Output = SquareComplexMatrix;

    fn sub(self, rhs: &'a SquareComplexMatrix) -> SquareComplexMatrix {
        SquareComplexMatrix(&self.0 - &rhs.0)
    }
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch(a, b));
    }
    Ok(())
}

/// Eigenvalues in ascending order with matching eigenvector columns.
///
/// The input is symmetrized first, so only its Hermitian part matters.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let h = (m + m.adjoint()).map(|z| z * 0.5);
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = CMatrix::zeros(m.nrows(), m.nrows());
    for (col, &k) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(k));
    }
    (values, vectors)
}

/// Orthonormal basis (as columns) of the column space of `m`, keeping
/// directions whose pivoted-QR diagonal exceeds `cutoff`.
///
/// Column-pivoted QR rather than SVD: nalgebra's SVD occasionally returns
/// inaccurate singular vectors for rank-deficient input.
pub fn range_basis(m: &CMatrix, cutoff: f64) -> CMatrix {
    let rows = m.nrows();
    if m.ncols() == 0 || rows == 0 {
        return CMatrix::zeros(rows, 0);
    }
    let qr = m.clone().col_piv_qr();
    let rank = pivoted_rank(&qr.r(), cutoff);
    qr.q().columns(0, rank).into_owned()
}

/// Leading diagonal entries of a pivoted `R` above `cutoff`.
fn pivoted_rank<T: nalgebra::ComplexField<RealField = f64>>(r: &DMatrix<T>, cutoff: f64) -> usize {
    (0..r.nrows().min(r.ncols()))
        .take_while(|&k| r[(k, k)].clone().modulus() > cutoff)
        .count()
}

/// A validated orthogonal projection.
#[derive(Clone, Debug)]
pub struct Projection {
    matrix: SquareComplexMatrix,
    rank: usize,
    hermitian_residual: f64,
    idempotent_residual: f64,
}

impl Projection {
    /// Wraps a matrix that is a projection by construction. Residuals are
    /// still measured so they can be reported.
    pub(crate) fn from_trusted(matrix: CMatrix, rank: usize) -> Self {
        let hermitian_residual = max_norm(&(&matrix - matrix.adjoint()));
        let idempotent_residual = max_norm(&(&matrix * &matrix - &matrix));
        Self {
            matrix: SquareComplexMatrix(matrix),
            rank,
            hermitian_residual,
            idempotent_residual,
        }
    }

    /// Projection onto the span of the given orthonormal columns.
    pub(crate) fn from_orthonormal_columns(basis: &CMatrix) -> Self {
        let matrix = basis * basis.adjoint();
        Self::from_trusted(matrix, basis.ncols())
    }

    pub fn zero(dim: usize) -> Self {
        Self::from_trusted(CMatrix::zeros(dim, dim), 0)
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_trusted(CMatrix::identity(dim, dim), dim)
    }

    /// Projection onto the span of the columns of `vectors`; directions with
    /// singular value below `eps_eig` are discarded.
    pub fn onto_span(vectors: &CMatrix, tol: &ToleranceConfig) -> Self {
        let basis = range_basis(vectors, tol.eps_eig);
        Self::from_orthonormal_columns(&basis)
    }

    /// `|v><v| / <v|v>`.
    pub fn onto_vector(v: &CVector) -> Self {
        let n = v.norm();
        let u = v.map(|z| z / n);
        Self::from_trusted(&u * u.adjoint(), 1)
    }

    /// Diagonal projection selecting the given (0-based) basis indices.
    pub fn basis_subset(dim: usize, indices: &[usize]) -> Result<Self> {
        let mut diag = vec![0.0; dim];
        for &k in indices {
            if k >= dim {
                return Err(Error::BadParameters(format!(
                    "basis index {k} out of range for dimension {dim}"
                )));
            }
            diag[k] = 1.0;
        }
        let rank = diag.iter().filter(|&&x| x == 1.0).count();
        Ok(Self::from_trusted(
            SquareComplexMatrix::from_diagonal(&diag).into_inner(),
            rank,
        ))
    }

    pub fn matrix(&self) -> &SquareComplexMatrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn hermitian_residual(&self) -> f64 {
        self.hermitian_residual
    }

    pub fn idempotent_residual(&self) -> f64 {
        self.idempotent_residual
    }

    /// `1 - P`.
    pub fn complement(&self) -> Self {
        let d = self.dim();
        Self::from_trusted(
            CMatrix::identity(d, d) - self.matrix.as_matrix(),
            d - self.rank,
        )
    }

    /// Sum of two projections the caller knows to be orthogonal.
    pub(crate) fn orthogonal_sum(&self, other: &Self) -> Self {
        Self::from_trusted(
            self.matrix.as_matrix() + other.matrix.as_matrix(),
            self.rank + other.rank,
        )
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self::from_trusted(
            self.matrix.as_matrix().kronecker(other.matrix.as_matrix()),
            self.rank * other.rank,
        )
    }

    /// Zero-padded embedding into a larger space.
    pub fn pad_to(&self, dim: usize) -> Result<Self> {
        Ok(Self::from_trusted(
            self.matrix.pad_to(dim)?.into_inner(),
            self.rank,
        ))
    }

    /// Orthonormal basis of the range.
    pub fn range(&self, tol: &ToleranceConfig) -> CMatrix {
        range_basis(self.matrix.as_matrix(), tol.eps_eig)
    }

    pub fn is_zero(&self, tol: &ToleranceConfig) -> bool {
        self.matrix.max_norm() <= tol.eps_op
    }

    /// Max-norm distance between the two projection matrices.
    pub fn distance(&self, other: &Self) -> f64 {
        max_norm(&(self.matrix.as_matrix() - other.matrix.as_matrix()))
    }

    pub fn approx_eq(&self, other: &Self, tol: &ToleranceConfig) -> bool {
        self.dim() == other.dim() && self.distance(other) <= tol.eps_op
    }
}

/// Checks Hermiticity and idempotency within `eps_op` and counts the rank.
pub fn validate_projection(m: &SquareComplexMatrix, tol: &ToleranceConfig) -> Result<Projection> {
    let hermitian_residual = m.hermitian_residual();
    if hermitian_residual > tol.eps_op {
        return Err(Error::NotHermitian {
            residual: hermitian_residual,
        });
    }
    let idempotent_residual = max_norm(&(m.as_matrix() * m.as_matrix() - m.as_matrix()));
    if idempotent_residual > tol.eps_op {
        return Err(Error::NotIdempotent {
            residual: idempotent_residual,
        });
    }
    let (values, _) = hermitian_eigen(m.as_matrix());
    let rank = values
        .iter()
        .filter(|&&v| (v - 1.0).abs() <= tol.eps_eig)
        .count();
    Ok(Projection {
        matrix: m.clone(),
        rank,
        hermitian_residual,
        idempotent_residual,
    })
}

/// A validated density operator.
#[derive(Clone, Debug)]
pub struct DensityOperator {
    matrix: SquareComplexMatrix,
    purity: f64,
    min_eigenvalue: f64,
    trace_residual: f64,
}

impl DensityOperator {
    /// `|psi><psi|` for the normalized `psi`.
    pub fn pure(psi: &CVector) -> Result<Self> {
        let n = psi.norm();
        if n == 0.0 || psi.is_empty() {
            return Err(Error::BadParameters("state vector must be nonzero".into()));
        }
        let u = psi.map(|z| z / n);
        Ok(Self::from_trusted(&u * u.adjoint()))
    }

    pub(crate) fn from_trusted(matrix: CMatrix) -> Self {
        let (values, _) = hermitian_eigen(&matrix);
        let min_eigenvalue = values.first().copied().unwrap_or(0.0);
        let trace_residual = (matrix.trace() - ONE).norm();
        let purity = (&matrix * &matrix).trace().re;
        Self {
            matrix: SquareComplexMatrix(matrix),
            purity,
            min_eigenvalue,
            trace_residual,
        }
    }

    /// The maximally mixed state `1/d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self::from_trusted(CMatrix::identity(dim, dim).map(|z| z / dim as f64))
    }

    pub fn matrix(&self) -> &SquareComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn purity(&self) -> f64 {
        self.purity
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    pub fn trace_residual(&self) -> f64 {
        self.trace_residual
    }

    pub fn is_pure(&self, tol: &ToleranceConfig) -> bool {
        (self.purity - 1.0).abs() <= tol.eps_prob
    }

    /// Spectral components `(weight, unit vector)` with weight above `eps_eig`.
    pub fn components(&self, tol: &ToleranceConfig) -> Vec<(f64, CVector)> {
        let (values, vectors) = hermitian_eigen(self.matrix.as_matrix());
        values
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &w)| w > tol.eps_eig)
            .map(|(k, &w)| (w, vectors.column(k).into_owned()))
            .collect()
    }

    /// Orthonormal basis of the support.
    pub fn support(&self, tol: &ToleranceConfig) -> CMatrix {
        let comps = self.components(tol);
        let mut basis = CMatrix::zeros(self.dim(), comps.len());
        for (col, (_, v)) in comps.iter().enumerate() {
            basis.set_column(col, v);
        }
        basis
    }

    /// The state vector of a pure state, if the state is pure.
    pub fn state_vector(&self, tol: &ToleranceConfig) -> Option<CVector> {
        if !self.is_pure(tol) {
            return None;
        }
        self.components(tol).into_iter().next().map(|(_, v)| v)
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self::from_trusted(self.matrix.as_matrix().kronecker(other.matrix.as_matrix()))
    }

    /// Zero-padded embedding into a larger space.
    pub fn pad_to(&self, dim: usize) -> Result<Self> {
        Ok(Self::from_trusted(self.matrix.pad_to(dim)?.into_inner()))
    }
}

/// Checks Hermiticity, positivity and unit trace.
pub fn validate_density(m: &SquareComplexMatrix, tol: &ToleranceConfig) -> Result<DensityOperator> {
    let hermitian_residual = m.hermitian_residual();
    if hermitian_residual > tol.eps_op {
        return Err(Error::NotHermitian {
            residual: hermitian_residual,
        });
    }
    let rho = DensityOperator::from_trusted(m.as_matrix().clone());
    if rho.min_eigenvalue < -tol.eps_eig {
        return Err(Error::NotPositive {
            min_eigenvalue: rho.min_eigenvalue,
        });
    }
    if rho.trace_residual > tol.eps_op {
        return Err(Error::TraceNotOne {
            trace: m.trace().re,
        });
    }
    Ok(rho)
}

/// `AB - BA`.
pub fn commutator(a: &SquareComplexMatrix, b: &SquareComplexMatrix) -> Result<SquareComplexMatrix> {
    check_dims(a.dim(), b.dim())?;
    Ok(&(a * b) - &(b * a))
}

pub(crate) fn commutator_norm(a: &CMatrix, b: &CMatrix) -> f64 {
    max_norm(&(a * b - b * a))
}

/// `PQ = 0` within `eps_op`.
pub fn is_orthogonal(p: &Projection, q: &Projection, tol: &ToleranceConfig) -> Result<bool> {
    check_dims(p.dim(), q.dim())?;
    Ok(max_norm(&(p.matrix.as_matrix() * q.matrix.as_matrix())) <= tol.eps_op)
}

/// `P <= Q`, i.e. `QP = P` within `eps_op`.
pub fn projection_leq(p: &Projection, q: &Projection, tol: &ToleranceConfig) -> Result<bool> {
    check_dims(p.dim(), q.dim())?;
    let qp = q.matrix.as_matrix() * p.matrix.as_matrix();
    Ok(max_norm(&(qp - p.matrix.as_matrix())) <= tol.eps_op)
}

/// Least upper bound: the projection onto `range(P) + range(Q)`.
pub fn join(p: &Projection, q: &Projection, tol: &ToleranceConfig) -> Result<Projection> {
    check_dims(p.dim(), q.dim())?;
    let d = p.dim();
    let mut stacked = CMatrix::zeros(d, 2 * d);
    stacked
        .view_mut((0, 0), (d, d))
        .copy_from(p.matrix.as_matrix());
    stacked
        .view_mut((0, d), (d, d))
        .copy_from(q.matrix.as_matrix());
    Ok(Projection::onto_span(&stacked, tol))
}

/// One eigenvalue cluster of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct Eigenspace {
    pub value: f64,
    pub projection: Projection,
}

/// Eigenvalues clustered with gap `eps_eig`, ascending, with their
/// eigenprojections.
pub fn spectral_decomposition(
    h: &SquareComplexMatrix,
    tol: &ToleranceConfig,
) -> Result<Vec<Eigenspace>> {
    let residual = h.hermitian_residual();
    if residual > tol.eps_op {
        return Err(Error::NotHermitian { residual });
    }
    let (values, vectors) = hermitian_eigen(h.as_matrix());
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for k in 0..values.len() {
        match clusters.last_mut() {
            Some(c) if values[k] - values[*c.last().unwrap()] <= tol.eps_eig => c.push(k),
            _ => clusters.push(vec![k]),
        }
    }
    Ok(clusters
        .into_iter()
        .map(|members| {
            let value = members.iter().map(|&k| values[k]).sum::<f64>() / members.len() as f64;
            let mut basis = CMatrix::zeros(h.dim(), members.len());
            for (col, &k) in members.iter().enumerate() {
                basis.set_column(col, &vectors.column(k));
            }
            Eigenspace {
                value,
                projection: Projection::from_orthonormal_columns(&basis),
            }
        })
        .collect())
}

/// Hilbert-Schmidt orthonormal real basis of the Hermitian `d x d` matrices.
fn hermitian_basis(d: usize) -> Vec<CMatrix> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut basis = Vec::with_capacity(d * d);
    for a in 0..d {
        let mut m = CMatrix::zeros(d, d);
        m[(a, a)] = ONE;
        basis.push(m);
    }
    for a in 0..d {
        for b in (a + 1)..d {
            let mut re = CMatrix::zeros(d, d);
            re[(a, b)] = Complex64::new(s, 0.0);
            re[(b, a)] = Complex64::new(s, 0.0);
            basis.push(re);
            let mut im = CMatrix::zeros(d, d);
            im[(a, b)] = Complex64::new(0.0, s);
            im[(b, a)] = Complex64::new(0.0, -s);
            basis.push(im);
        }
    }
    basis
}

/// Real-linear basis of the Hermitian matrices commuting with every
/// generator. Elements are Hilbert-Schmidt normalized.
pub fn commutant_basis(
    generators: &[SquareComplexMatrix],
    tol: &ToleranceConfig,
) -> Result<Vec<SquareComplexMatrix>> {
    let d = match generators.first() {
        Some(g) => g.dim(),
        None => return Err(Error::Empty("commutant generators")),
    };
    for g in generators {
        check_dims(d, g.dim())?;
    }
    let basis = hermitian_basis(d);
    let n = basis.len();
    // Columns: real and imaginary parts of [B_p, G_k] stacked over generators.
    let rows = 2 * d * d * generators.len();
    let mut system = DMatrix::<f64>::zeros(rows, n);
    for (p, b) in basis.iter().enumerate() {
        let mut r = 0;
        for g in generators {
            let c = b * g.as_matrix() - g.as_matrix() * b;
            for z in c.iter() {
                system[(r, p)] = z.re;
                system[(r + 1, p)] = z.im;
                r += 2;
            }
        }
    }
    // Null space: complement of the row space, from a pivoted QR of the
    // transpose (full Q since rows >= n).
    let qr = system.transpose().col_piv_qr();
    let rank = pivoted_rank(&qr.r(), tol.eps_eig);
    let q = qr.q();
    let mut out = Vec::new();
    for k in rank..n {
        let coeffs = q.column(k);
        let mut x = CMatrix::zeros(d, d);
        for (p, b) in basis.iter().enumerate() {
            x += b.map(|z| z * coeffs[p]);
        }
        // Symmetrize away rounding.
        let x = (&x + x.adjoint()).map(|z| z * 0.5);
        out.push(SquareComplexMatrix(x));
    }
    Ok(out)
}

/// Smallest projection that commutes with every (Hermitian) generator and
/// whose range contains the columns of `seeds`: the projection onto the
/// span of all words in the generators applied to the seeds.
pub fn cyclic_projection(
    seeds: &CMatrix,
    generators: &[&CMatrix],
    tol: &ToleranceConfig,
) -> Result<Projection> {
    let d = seeds.nrows();
    for g in generators {
        check_dims(d, g.nrows())?;
    }
    let mut basis = range_basis(seeds, tol.eps_eig);
    loop {
        let rank = basis.ncols();
        if rank == 0 || rank == d {
            break;
        }
        let mut stacked = CMatrix::zeros(d, rank * (generators.len() + 1));
        stacked.view_mut((0, 0), (d, rank)).copy_from(&basis);
        for (k, g) in generators.iter().enumerate() {
            let image = *g * &basis;
            stacked
                .view_mut((0, rank * (k + 1)), (d, rank))
                .copy_from(&image);
        }
        let grown = range_basis(&stacked, tol.eps_eig);
        if grown.ncols() == rank {
            basis = grown;
            break;
        }
        basis = grown;
    }
    Ok(Projection::from_orthonormal_columns(&basis))
}

/// Inner product `<v|w>`.
pub fn inner(v: &CVector, w: &CVector) -> Complex64 {
    v.dotc(w)
}

/// The `k`-th (0-based) standard basis vector.
pub fn basis_vector(dim: usize, k: usize) -> CVector {
    let mut v = CVector::zeros(dim);
    v[k] = ONE;
    v
}
