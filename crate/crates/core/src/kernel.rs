//! Dense symmetric matrix primitives: eigendecomposition, inertia, psd square
//! roots, positive/negative parts and the three unitarily invariant norms used
//! by the perturbation bounds.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};

use crate::error::{Error, Result};

/// Residual contract of [`eigh`], relative to `max(1, ‖A‖_F)`.
pub const EIGH_RESIDUAL_TOL: f64 = 1e-10;

const EIGH_MAX_ITER: usize = 10_000;

/// Dense real symmetric matrix of even dimension `2n`.
///
/// The input is symmetrized as `(X + X^T)/2` on construction; the largest
/// entrywise asymmetry that was removed is kept for diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    data: DMatrix<f64>,
    asymmetry: f64,
}

impl SymMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = m.shape();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if rows == 0 || rows % 2 != 0 {
            return Err(Error::OddDimension(rows));
        }
        check_finite(&m)?;
        let mut asymmetry = 0.0f64;
        for i in 0..rows {
            for j in 0..i {
                asymmetry = asymmetry.max((m[(i, j)] - m[(j, i)]).abs());
            }
        }
        Ok(Self {
            data: symmetrize(&m),
            asymmetry,
        })
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::new(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(DMatrix::zeros(dim, dim))
    }

    /// `2n`.
    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    /// `n`.
    pub fn half_dim(&self) -> usize {
        self.data.nrows() / 2
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.data
    }

    /// Largest `|x_ij - x_ji|` of the matrix passed to [`SymMatrix::new`].
    pub fn asymmetry(&self) -> f64 {
        self.asymmetry
    }

    pub fn frobenius(&self) -> f64 {
        self.data.norm()
    }

    /// `max(1, ‖A‖_F)`, the scale used by decomposition residuals.
    pub fn scale(&self) -> f64 {
        self.frobenius().max(1.0)
    }
}

/// Spectral decomposition with ascending eigenvalues.
#[derive(Clone, Debug)]
pub struct EigDecomposition {
    pub eigenvalues: DVector<f64>,
    /// Column `i` is the unit eigenvector for `eigenvalues[i]`.
    pub vectors: DMatrix<f64>,
}

impl EigDecomposition {
    /// `max(1, max_i |λ_i|)`.
    pub fn spectral_scale(&self) -> f64 {
        self.eigenvalues.iter().fold(1.0f64, |s, l| s.max(l.abs()))
    }

    /// Reassemble `V diag(f(λ)) V^T`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let mut scaled = self.vectors.clone();
        for (j, &l) in self.eigenvalues.iter().enumerate() {
            let w = f(l);
            scaled.column_mut(j).scale_mut(w);
        }
        symmetrize(&(scaled * self.vectors.transpose()))
    }

    /// Columns of `vectors` whose eigenvalue satisfies `pred`.
    pub fn select(&self, pred: impl Fn(f64) -> bool) -> DMatrix<f64> {
        let idx: Vec<usize> = (0..self.eigenvalues.len())
            .filter(|&i| pred(self.eigenvalues[i]))
            .collect();
        self.vectors.select_columns(&idx)
    }
}

/// Symmetric eigendecomposition, eigenvalues ascending.
///
/// Only symmetric input is meaningful; the matrix is symmetrized first.
pub fn eigh(a: &DMatrix<f64>) -> Result<EigDecomposition> {
    let (rows, cols) = a.shape();
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    if rows == 0 {
        return Ok(EigDecomposition {
            eigenvalues: DVector::zeros(0),
            vectors: DMatrix::zeros(0, 0),
        });
    }
    let sym = symmetrize(a);
    let eig = SymmetricEigen::try_new(sym.clone(), f64::EPSILON, EIGH_MAX_ITER).ok_or(
        Error::EigenNoConvergence {
            residual: f64::INFINITY,
        },
    )?;

    let mut order: Vec<usize> = (0..rows).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let eigenvalues = DVector::from_iterator(rows, order.iter().map(|&i| eig.eigenvalues[i]));
    let vectors = eig.eigenvectors.select_columns(&order);

    let mut resid = &sym * &vectors;
    for (j, &l) in eigenvalues.iter().enumerate() {
        resid.column_mut(j).axpy(-l, &vectors.column(j), 1.0);
    }
    let residual = resid.norm();
    if !(residual <= EIGH_RESIDUAL_TOL * sym.norm().max(1.0)) {
        return Err(Error::EigenNoConvergence { residual });
    }
    Ok(EigDecomposition {
        eigenvalues,
        vectors,
    })
}

/// Counts of negative, zero and positive eigenvalues.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct InertiaSignature {
    pub nu: usize,
    pub xi: usize,
    pub pi: usize,
}

impl InertiaSignature {
    pub fn new(nu: usize, xi: usize, pi: usize) -> Self {
        Self { nu, xi, pi }
    }

    pub fn dim(&self) -> usize {
        self.nu + self.xi + self.pi
    }

    pub fn all_even(&self) -> bool {
        self.nu.is_multiple_of(2) && self.xi.is_multiple_of(2) && self.pi.is_multiple_of(2)
    }
}

impl std::fmt::Display for InertiaSignature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}, {})", self.nu, self.xi, self.pi)
    }
}

/// Sign class of an eigenvalue under the shared rank tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

/// Classify `lambda` against the threshold `rank_tol * scale`.
pub fn sign_of(lambda: f64, rank_tol: f64, scale: f64) -> Sign {
    let t = rank_tol * scale;
    if lambda < -t {
        Sign::Negative
    } else if lambda > t {
        Sign::Positive
    } else {
        Sign::Zero
    }
}

pub fn inertia_of(eig: &EigDecomposition, rank_tol: f64) -> InertiaSignature {
    let s = eig.spectral_scale();
    let mut sig = InertiaSignature::new(0, 0, 0);
    for &l in eig.eigenvalues.iter() {
        match sign_of(l, rank_tol, s) {
            Sign::Negative => sig.nu += 1,
            Sign::Zero => sig.xi += 1,
            Sign::Positive => sig.pi += 1,
        }
    }
    sig
}

pub fn inertia(a: &DMatrix<f64>, rank_tol: f64) -> Result<InertiaSignature> {
    Ok(inertia_of(&eigh(a)?, rank_tol))
}

/// Principal square root of a positive semidefinite matrix.
///
/// Eigenvalues with `|λ| <= rank_tol * s` are treated as exact zeros so the
/// root has the same range as `B` at the rank tolerance. Anything below
/// `-rank_tol * s` is rejected.
pub fn psd_sqrt(b: &DMatrix<f64>, rank_tol: f64) -> Result<DMatrix<f64>> {
    let eig = eigh(b)?;
    let s = eig.spectral_scale();
    if let Some(&lmin) = eig.eigenvalues.iter().next() {
        if sign_of(lmin, rank_tol, s) == Sign::Negative {
            return Err(Error::NotPsd {
                eigenvalue: lmin,
                threshold: rank_tol * s,
            });
        }
    }
    Ok(eig.reconstruct_with(|l| {
        if sign_of(l, rank_tol, s) == Sign::Positive {
            l.sqrt()
        } else {
            0.0
        }
    }))
}

/// `C = C_+ - C_-` with `C_± = (|C| ± C)/2`.
#[derive(Clone, Debug)]
pub struct SpectralSplit {
    pub neg_part: DMatrix<f64>,
    pub pos_part: DMatrix<f64>,
    pub abs_part: DMatrix<f64>,
    /// The decomposition both parts were assembled from.
    pub eig: EigDecomposition,
}

/// Positive and negative parts of `C` from a single eigendecomposition.
pub fn spectral_split(c: &DMatrix<f64>, rank_tol: f64) -> Result<SpectralSplit> {
    let eig = eigh(c)?;
    let s = eig.spectral_scale();
    let pos_part = eig.reconstruct_with(|l| match sign_of(l, rank_tol, s) {
        Sign::Positive => l,
        _ => 0.0,
    });
    let neg_part = eig.reconstruct_with(|l| match sign_of(l, rank_tol, s) {
        Sign::Negative => -l,
        _ => 0.0,
    });
    let abs_part = &pos_part + &neg_part;
    Ok(SpectralSplit {
        neg_part,
        pos_part,
        abs_part,
        eig,
    })
}

/// The unitarily invariant norms used throughout.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NormKind {
    /// Largest singular value.
    Operator,
    /// Root of the sum of squared entries.
    Frobenius,
    /// Sum of singular values.
    Trace,
}

impl NormKind {
    pub const ALL: [NormKind; 3] = [NormKind::Operator, NormKind::Frobenius, NormKind::Trace];

    /// Short name used on the command line and in CSV output.
    pub fn name(self) -> &'static str {
        match self {
            NormKind::Operator => "op",
            NormKind::Frobenius => "fro",
            NormKind::Trace => "trace",
        }
    }

    /// Norm of a vector of singular values (absolute values are taken).
    pub fn of_singular_values<I: IntoIterator<Item = f64>>(self, values: I) -> f64 {
        let it = values.into_iter().map(f64::abs);
        match self {
            NormKind::Operator => it.fold(0.0, f64::max),
            NormKind::Frobenius => it.map(|x| x * x).sum::<f64>().sqrt(),
            NormKind::Trace => it.sum(),
        }
    }
}

impl std::str::FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "op" | "operator" => Ok(NormKind::Operator),
            "fro" | "frobenius" => Ok(NormKind::Frobenius),
            "trace" | "nuclear" => Ok(NormKind::Trace),
            other => Err(Error::InvalidSpec(format!("unknown norm kind '{other}'"))),
        }
    }
}

impl std::fmt::Display for NormKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

pub fn singular_values(x: &DMatrix<f64>) -> Vec<f64> {
    if x.nrows() == 0 || x.ncols() == 0 {
        return Vec::new();
    }
    let svd = SVD::new(x.clone(), false, false);
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn norm(x: &DMatrix<f64>, kind: NormKind) -> f64 {
    match kind {
        NormKind::Frobenius => x.norm(),
        _ => kind.of_singular_values(singular_values(x)),
    }
}

/// Operator norm of a symmetric matrix, from its eigenvalues.
pub fn sym_operator_norm(x: &DMatrix<f64>) -> Result<f64> {
    Ok(eigh(x)?
        .eigenvalues
        .iter()
        .fold(0.0f64, |m, l| m.max(l.abs())))
}

pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

pub fn check_finite(m: &DMatrix<f64>) -> Result<()> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if !m[(i, j)].is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    Ok(())
}

/// Orthonormal basis of the column space of `b`, keeping singular values
/// above `rank_tol * σ_max`.
pub fn column_space(b: &DMatrix<f64>, rank_tol: f64) -> DMatrix<f64> {
    let rows = b.nrows();
    if b.ncols() == 0 || rows == 0 {
        return DMatrix::zeros(rows, 0);
    }
    let svd = SVD::new(b.clone(), true, false);
    let u = svd.u.expect("u requested");
    let smax = svd.singular_values.iter().fold(0.0f64, |m, &s| m.max(s));
    if smax == 0.0 {
        return DMatrix::zeros(rows, 0);
    }
    let mut keep: Vec<(usize, f64)> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > rank_tol * smax)
        .map(|(i, &s)| (i, s))
        .collect();
    keep.sort_by(|a, b| b.1.total_cmp(&a.1));
    let idx: Vec<usize> = keep.into_iter().map(|(i, _)| i).collect();
    u.select_columns(&idx)
}

/// Orthonormal basis of the orthogonal complement of `ran(q)` for `q` with
/// orthonormal columns.
pub fn orthogonal_complement(q: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let m = q.nrows();
    let d = q.ncols();
    if d == 0 {
        return Ok(DMatrix::identity(m, m));
    }
    if d >= m {
        return Ok(DMatrix::zeros(m, 0));
    }
    // I - QQ^T has eigenvalues 0 (d times) and 1 (m - d times).
    let proj = DMatrix::identity(m, m) - q * q.transpose();
    let eig = eigh(&proj)?;
    let idx: Vec<usize> = (d..m).collect();
    Ok(eig.vectors.select_columns(&idx))
}

/// Orthonormal basis of `ker(x)`.
pub fn null_space(x: &DMatrix<f64>, rank_tol: f64) -> Result<DMatrix<f64>> {
    orthogonal_complement(&column_space(&x.transpose(), rank_tol))
}

/// Sine of the largest principal angle between `ran(q1)` and `ran(q2)`, both
/// given by orthonormal bases. Returns 1 when the dimensions differ.
pub fn principal_angle_sin(q1: &DMatrix<f64>, q2: &DMatrix<f64>) -> f64 {
    if q1.ncols() != q2.ncols() || q1.nrows() != q2.nrows() {
        return 1.0;
    }
    if q1.ncols() == 0 {
        return 0.0;
    }
    let resid = q2 - q1 * (q1.transpose() * q2);
    let s = singular_values(&resid);
    s.first().copied().unwrap_or(0.0).min(1.0)
}
