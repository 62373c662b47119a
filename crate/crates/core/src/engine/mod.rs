//! Williamson decompositions and symplectic spectra.
//!
//! Four routes produce `M^T A M = D ⊕ D`:
//!
//! * [`williamson_pd`] for positive definite `A`,
//! * [`williamson_eigsps`] when the sign-grouped eigenspaces of `A` already
//!   satisfy the existence conditions,
//! * [`williamson_via_subspaces`] from a caller-supplied certificate,
//! * [`williamson_sppsd`] for psd `A` with symplectic kernel, using the kernel
//!   and its symplectic complement as the certificate.
//!
//! The first two share one construction. With `R± = A±^{1/2}` and
//! `K± = R± J R±`, an orthogonal `U` brings `K-` and `K+` to canonical form
//! at once. A block `(x, y)` with `x^T K y = β` yields the symplectic pair
//! `u = J R y / √β`, `v = -J R x / √β`, and `u^T A u = v^T A v = ∓β`.

pub mod skew;

use std::cmp::Ordering;

use nalgebra::{Complex, DMatrix, DVector, Schur};

use crate::classify::{check_eigsps_membership, check_sppsd, eigenspace_split, verify_certificate};
use crate::error::{Error, Result};
use crate::kernel::{eigh, psd_sqrt, singular_values};
use crate::symplectic::{
    j_mul, symplectic_complement, symplectic_defect, symplectic_gram_schmidt, Subspace,
    SymplecticFrame,
};
use crate::{SymMatrix, Tolerances};

pub use skew::{
    simultaneous_skew_canonical, skew_canonical, AttributedBlock, BlockSource,
    SimultaneousCanonical, SkewCanonicalForm,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    PositiveDefinite,
    EigenspaceConstruction,
    Certificate,
    KernelCertificate,
}

#[derive(Clone, Debug)]
pub struct WilliamsonDecomposition {
    pub m: SymplecticFrame,
    /// Ascending.
    pub d: Vec<f64>,
    pub route: Route,
    /// `‖M^T A M - D ⊕ D‖_F`.
    pub residual: f64,
    /// `‖M^T J M - J‖_F`.
    pub defect: f64,
}

impl WilliamsonDecomposition {
    /// `diag(D) ⊕ diag(D)`.
    pub fn d_matrix(&self) -> DMatrix<f64> {
        let n = self.d.len();
        let mut out = DMatrix::zeros(2 * n, 2 * n);
        for (i, &d) in self.d.iter().enumerate() {
            out[(i, i)] = d;
            out[(n + i, n + i)] = d;
        }
        out
    }

    pub fn residual_for(&self, a: &SymMatrix) -> f64 {
        let m = self.m.matrix();
        (m.transpose() * a.as_matrix() * m - self.d_matrix()).norm()
    }

    /// 2-norm condition number of `M`. Reported only; no threshold applies.
    pub fn condition_number(&self) -> f64 {
        let s = singular_values(self.m.matrix());
        match (s.first(), s.last()) {
            (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
            _ => f64::INFINITY,
        }
    }

    pub fn spectrum(&self) -> SymplecticSpectrum {
        SymplecticSpectrum {
            values: self.d.clone(),
        }
    }
}

/// Symplectic eigenvalues, ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticSpectrum {
    pub values: Vec<f64>,
}

impl SymplecticSpectrum {
    pub fn from_unsorted(mut values: Vec<f64>) -> Self {
        values.sort_by(f64::total_cmp);
        Self { values }
    }
}

/// One symplectic pair `(u, v)` with `u^T A u = v^T A v = d`.
struct Pair {
    d: f64,
    u: DVector<f64>,
    v: DVector<f64>,
}

fn frame_pairs(frame: &DMatrix<f64>, ds: &[f64]) -> Vec<Pair> {
    let k = frame.ncols() / 2;
    (0..k)
        .map(|i| Pair {
            d: ds[i],
            u: frame.column(i).into_owned(),
            v: frame.column(k + i).into_owned(),
        })
        .collect()
}

/// Sort the pairs by `d`, lay out `[u.., v..]`, and check both residuals.
fn assemble(
    a: &SymMatrix,
    mut pairs: Vec<Pair>,
    route: Route,
    tol: &Tolerances,
) -> Result<WilliamsonDecomposition> {
    let n = a.half_dim();
    if pairs.len() != n {
        return Err(Error::Numerical {
            stage: "assembly (pair count)",
            residual: pairs.len().abs_diff(n) as f64,
            threshold: 0.0,
        });
    }
    pairs.sort_by(|p, q| p.d.partial_cmp(&q.d).unwrap_or(Ordering::Equal));
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for (i, p) in pairs.iter().enumerate() {
        m.set_column(i, &p.u);
        m.set_column(n + i, &p.v);
    }
    let d: Vec<f64> = pairs.iter().map(|p| p.d).collect();

    let defect = symplectic_defect(&m);
    if !(defect <= tol.decomp_tol) {
        return Err(Error::Numerical {
            stage: "assembly (symplectic defect)",
            residual: defect,
            threshold: tol.decomp_tol,
        });
    }
    let m = SymplecticFrame::new(m, tol.decomp_tol)?;
    let mut out = WilliamsonDecomposition {
        m,
        d,
        route,
        residual: 0.0,
        defect,
    };
    out.residual = out.residual_for(a);
    let limit = tol.decomp_tol * a.scale();
    if !(out.residual <= limit) {
        return Err(Error::Numerical {
            stage: "assembly (congruence residual)",
            residual: out.residual,
            threshold: limit,
        });
    }
    Ok(out)
}

fn j_vec(x: &DVector<f64>) -> DVector<f64> {
    let n = x.len() / 2;
    DVector::from_fn(2 * n, |i, _| if i < n { x[n + i] } else { -x[i - n] })
}

/// The pair `u = J R y / √β`, `v = -J R x / √β` of a canonical block of `R J R`.
pub(crate) fn block_pair(
    root: &DMatrix<f64>,
    x: &DVector<f64>,
    y: &DVector<f64>,
    beta: f64,
) -> (DVector<f64>, DVector<f64>) {
    let s = beta.sqrt();
    (j_vec(&(root * y)) / s, j_vec(&(root * x)) / (-s))
}

/// `(u^T A u + v^T A v) / (2 u^T J v)`.
///
/// Stationary at symplectic eigenpairs, so it recovers `d` to second order
/// in the error of `(u, v)`.
pub fn symplectic_rayleigh(a: &DMatrix<f64>, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
    let num = u.dot(&(a * u)) + v.dot(&(a * v));
    num / (2.0 * u.dot(&j_vec(v)))
}

/// Shared construction from `R- = A-^{1/2}`, `R+ = A+^{1/2}` and a basis of
/// `ker A`.
fn decompose_from_roots(
    a: &SymMatrix,
    root_neg: &DMatrix<f64>,
    root_pos: &DMatrix<f64>,
    kernel: &Subspace,
    expected_blocks: (usize, usize),
    route: Route,
    tol: &Tolerances,
) -> Result<WilliamsonDecomposition> {
    let k_neg = root_neg * j_mul(root_neg);
    let k_pos = root_pos * j_mul(root_pos);
    let sim = simultaneous_skew_canonical(&k_neg, &k_pos, tol)?;

    let counts = (
        sim.blocks_from(BlockSource::Negative).count(),
        sim.blocks_from(BlockSource::Positive).count(),
    );
    if counts != expected_blocks {
        return Err(Error::Numerical {
            stage: "skew canonical form (block count disagrees with inertia)",
            residual: (counts.0.abs_diff(expected_blocks.0) + counts.1.abs_diff(expected_blocks.1))
                as f64,
            threshold: 0.0,
        });
    }

    let mut pairs = Vec::with_capacity(a.half_dim());
    for b in &sim.blocks {
        let root = match b.source {
            BlockSource::Negative => root_neg,
            BlockSource::Positive => root_pos,
        };
        let x = sim.u.column(b.col).into_owned();
        let y = sim.u.column(b.col + 1).into_owned();
        let (u, v) = block_pair(root, &x, &y, b.beta);
        pairs.push(Pair {
            d: symplectic_rayleigh(a.as_matrix(), &u, &v),
            u,
            v,
        });
    }
    if kernel.dim() > 0 {
        let f0 = symplectic_gram_schmidt(kernel, tol)?;
        let zeros = vec![0.0; f0.frame_k()];
        pairs.extend(frame_pairs(f0.matrix(), &zeros));
    }
    assemble(a, pairs, route, tol)
}

/// Classical Williamson decomposition of a positive definite matrix.
pub fn williamson_pd(a: &SymMatrix, tol: &Tolerances) -> Result<WilliamsonDecomposition> {
    let eig = eigh(a.as_matrix())?;
    let threshold = tol.rank_tol * eig.spectral_scale();
    let lmin = eig.eigenvalues[0];
    if !(lmin > threshold) {
        return Err(Error::NotPositiveDefinite {
            eigenvalue: lmin,
            threshold,
        });
    }
    let root = eig.reconstruct_with(f64::sqrt);
    let dim = a.dim();
    decompose_from_roots(
        a,
        &DMatrix::zeros(dim, dim),
        &root,
        &Subspace::zero(dim),
        (0, a.half_dim()),
        Route::PositiveDefinite,
        tol,
    )
}

struct Roots {
    neg: DMatrix<f64>,
    pos: DMatrix<f64>,
}

fn roots_of(a: &SymMatrix, tol: &Tolerances) -> Result<Roots> {
    let split = crate::kernel::spectral_split(a.as_matrix(), tol.rank_tol)?;
    Ok(Roots {
        neg: psd_sqrt(&split.neg_part, tol.rank_tol)?,
        pos: psd_sqrt(&split.pos_part, tol.rank_tol)?,
    })
}

/// Decomposition of a matrix whose eigenspaces satisfy the existence
/// conditions. Runs the membership check first and rejects with the first
/// violated condition.
pub fn williamson_eigsps(a: &SymMatrix, tol: &Tolerances) -> Result<WilliamsonDecomposition> {
    check_eigsps_membership(a, tol)?.into_result()?;
    let triple = eigenspace_split(a, tol.rank_tol)?;
    let roots = roots_of(a, tol)?;
    decompose_from_roots(
        a,
        &roots.neg,
        &roots.pos,
        &triple.zero,
        (triple.inertia.nu / 2, triple.inertia.pi / 2),
        Route::EigenspaceConstruction,
        tol,
    )
}

/// Symplectic spectrum from the two skew canonical forms, without building `M`.
pub fn symplectic_spectrum_eigsps(a: &SymMatrix, tol: &Tolerances) -> Result<SymplecticSpectrum> {
    check_eigsps_membership(a, tol)?.into_result()?;
    let triple = eigenspace_split(a, tol.rank_tol)?;
    let roots = roots_of(a, tol)?;
    let neg = skew_canonical(&(&roots.neg * j_mul(&roots.neg)), tol)?;
    let pos = skew_canonical(&(&roots.pos * j_mul(&roots.pos)), tol)?;
    let inertia = triple.inertia;
    if neg.rank_pairs() != inertia.nu / 2 || pos.rank_pairs() != inertia.pi / 2 {
        return Err(Error::Numerical {
            stage: "symplectic spectrum (block count disagrees with inertia)",
            residual: (neg.rank_pairs().abs_diff(inertia.nu / 2)
                + pos.rank_pairs().abs_diff(inertia.pi / 2)) as f64,
            threshold: 0.0,
        });
    }
    let mut values = Vec::with_capacity(a.half_dim());
    for (form, root) in [(&neg, &roots.neg), (&pos, &roots.pos)] {
        for i in 0..form.rank_pairs() {
            let (x, y) = form.block_vectors(i);
            let (u, v) = block_pair(root, &x, &y, form.betas[i]);
            values.push(symplectic_rayleigh(a.as_matrix(), &u, &v));
        }
    }
    values.extend(std::iter::repeat_n(0.0, inertia.xi / 2));
    Ok(SymplecticSpectrum::from_unsorted(values))
}

/// Decomposition from a certificate `(W-, W0, W+)`: a symplectic basis of
/// each piece, then classical decompositions of `-M-^T A M-` and `M+^T A M+`.
pub fn williamson_via_subspaces(
    a: &SymMatrix,
    w_neg: &Subspace,
    w_zero: &Subspace,
    w_pos: &Subspace,
    tol: &Tolerances,
) -> Result<WilliamsonDecomposition> {
    verify_certificate(a, w_neg, w_zero, w_pos, tol)?.into_result()?;
    let am = a.as_matrix();
    let mut pairs = Vec::with_capacity(a.half_dim());
    for (w, sign) in [(w_neg, -1.0), (w_pos, 1.0)] {
        if w.dim() == 0 {
            continue;
        }
        let f = symplectic_gram_schmidt(w, tol)?;
        let fm = f.matrix();
        let inner = SymMatrix::new((fm.transpose() * am * fm) * sign)?;
        let dec = williamson_pd(&inner, tol)?;
        let mq = fm * dec.m.matrix();
        let ds: Vec<f64> = dec.d.iter().map(|d| sign * d).collect();
        pairs.extend(frame_pairs(&mq, &ds));
    }
    if w_zero.dim() > 0 {
        let f0 = symplectic_gram_schmidt(w_zero, tol)?;
        let zeros = vec![0.0; f0.frame_k()];
        pairs.extend(frame_pairs(f0.matrix(), &zeros));
    }
    assemble(a, pairs, Route::Certificate, tol)
}

/// Positive definite route when it applies, eigenspace construction otherwise.
pub fn decompose(a: &SymMatrix, tol: &Tolerances) -> Result<WilliamsonDecomposition> {
    let eig = eigh(a.as_matrix())?;
    if eig.eigenvalues[0] > tol.rank_tol * eig.spectral_scale() {
        return williamson_pd(a, tol);
    }
    let report = check_eigsps_membership(a, tol)?;
    if report.verdict {
        return williamson_eigsps(a, tol);
    }
    if check_sppsd(a, tol)?.verdict {
        return williamson_sppsd(a, tol);
    }
    Err(report
        .rejection()
        .expect("failed report has a failing record"))
}

/// Psd `A` with symplectic kernel through the certificate
/// `(0, ker A, (ker A)^{⊥s})`. Reaches matrices whose range is not the
/// symplectic complement of the kernel, which the eigenspace test rejects.
pub fn williamson_sppsd(a: &SymMatrix, tol: &Tolerances) -> Result<WilliamsonDecomposition> {
    check_sppsd(a, tol)?.into_result()?;
    let kernel = eigenspace_split(a, tol.rank_tol)?.zero;
    let range = symplectic_complement(&kernel)?;
    let mut w = williamson_via_subspaces(a, &Subspace::zero(a.dim()), &kernel, &range, tol)?;
    w.route = Route::KernelCertificate;
    Ok(w)
}

/// Symplectic spectrum of any matrix with a known decomposition route:
/// eigenspace formula on EigSpSm, kernel certificate on the rest of SpPsd.
pub fn symplectic_spectrum(a: &SymMatrix, tol: &Tolerances) -> Result<SymplecticSpectrum> {
    let report = check_eigsps_membership(a, tol)?;
    if report.verdict {
        return symplectic_spectrum_eigsps(a, tol);
    }
    if check_sppsd(a, tol)?.verdict {
        return Ok(williamson_sppsd(a, tol)?.spectrum());
    }
    Err(report
        .rejection()
        .expect("failed report has a failing record"))
}

/// Eigenvalues of the real matrix `JA`.
pub fn ja_eigenvalues(a: &SymMatrix) -> Result<Vec<Complex<f64>>> {
    let ja = j_mul(a.as_matrix());
    let schur = Schur::try_new(ja, f64::EPSILON, 100_000).ok_or(Error::EigenNoConvergence {
        residual: f64::INFINITY,
    })?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

/// Distance between `{±d_i}` and the eigenvalues of `ιJA`.
///
/// The eigenvalues of `JA` should be `±ι d_i`, so this is the larger of the
/// sorted mismatch of imaginary parts and the largest real part.
pub fn eigen_ija_check(a: &SymMatrix, spectrum: &SymplecticSpectrum) -> Result<f64> {
    if spectrum.values.len() != a.half_dim() {
        return Err(Error::Dimension(format!(
            "spectrum has {} values for a {}x{} matrix",
            spectrum.values.len(),
            a.dim(),
            a.dim()
        )));
    }
    let eigs = ja_eigenvalues(a)?;
    let mut imag: Vec<f64> = eigs.iter().map(|z| z.im).collect();
    imag.sort_by(f64::total_cmp);
    let mut expected: Vec<f64> = spectrum.values.iter().flat_map(|&d| [d, -d]).collect();
    expected.sort_by(f64::total_cmp);
    let spread = imag
        .iter()
        .zip(&expected)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0f64, f64::max);
    let real = eigs.iter().map(|z| z.re.abs()).fold(0.0f64, f64::max);
    Ok(spread.max(real))
}
