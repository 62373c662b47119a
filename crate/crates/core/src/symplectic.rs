//! The standard symplectic structure on `R^{2n}`.
//!
//! `J = [[0, I], [-I, 0]]` is never stored: multiplying by `J` or `J^T` is a
//! block swap with a sign flip, which is exact in floating point.

use nalgebra::{DMatrix, DVector, SVD};

use crate::error::{Error, Result};
use crate::kernel::{self, column_space, null_space, orthogonal_complement, principal_angle_sin};
use crate::Tolerances;

fn half_rows(rows: usize) -> Result<usize> {
    if !rows.is_multiple_of(2) {
        return Err(Error::OddDimension(rows));
    }
    Ok(rows / 2)
}

/// `J X`: rows `[top; bottom]` become `[bottom; -top]`.
pub fn j_mul(x: &DMatrix<f64>) -> DMatrix<f64> {
    let n = x.nrows() / 2;
    let mut out = DMatrix::zeros(x.nrows(), x.ncols());
    out.rows_mut(0, n).copy_from(&x.rows(n, n));
    out.rows_mut(n, n).copy_from(&(-x.rows(0, n)));
    out
}

/// `J^T X`: rows `[top; bottom]` become `[-bottom; top]`.
pub fn jt_mul(x: &DMatrix<f64>) -> DMatrix<f64> {
    let n = x.nrows() / 2;
    let mut out = DMatrix::zeros(x.nrows(), x.ncols());
    out.rows_mut(0, n).copy_from(&(-x.rows(n, n)));
    out.rows_mut(n, n).copy_from(&x.rows(0, n));
    out
}

/// `X J`: columns `[left, right]` become `[-right, left]`.
pub fn mul_j(x: &DMatrix<f64>) -> DMatrix<f64> {
    let n = x.ncols() / 2;
    let mut out = DMatrix::zeros(x.nrows(), x.ncols());
    out.columns_mut(0, n).copy_from(&(-x.columns(n, n)));
    out.columns_mut(n, n).copy_from(&x.columns(0, n));
    out
}

/// `X J^T`: columns `[left, right]` become `[right, -left]`.
pub fn mul_jt(x: &DMatrix<f64>) -> DMatrix<f64> {
    let n = x.ncols() / 2;
    let mut out = DMatrix::zeros(x.nrows(), x.ncols());
    out.columns_mut(0, n).copy_from(&x.columns(n, n));
    out.columns_mut(n, n).copy_from(&(-x.columns(0, n)));
    out
}

/// The symplectic form `u^T J v = u_top·v_bottom - u_bottom·v_top`.
pub fn form(u: &DVector<f64>, v: &DVector<f64>) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::Dimension(format!(
            "form: {} vs {}",
            u.len(),
            v.len()
        )));
    }
    let n = half_rows(u.len())?;
    Ok(form_unchecked(u.as_slice(), v.as_slice(), n))
}

fn form_unchecked(u: &[f64], v: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        s += u[i] * v[n + i] - u[n + i] * v[i];
    }
    s
}

/// `B^T J C` for two column blocks of the same ambient dimension.
pub fn form_matrix(b: &DMatrix<f64>, c: &DMatrix<f64>) -> DMatrix<f64> {
    b.transpose() * j_mul(c)
}

/// `‖M^T J_{2n} M - J_{2k}‖_F` for a `2n x 2k` matrix.
pub fn symplectic_defect(m: &DMatrix<f64>) -> f64 {
    let k = m.ncols() / 2;
    let mut g = form_matrix(m, m);
    for i in 0..k {
        g[(i, k + i)] -= 1.0;
        g[(k + i, i)] += 1.0;
    }
    g.norm()
}

/// A linear subspace of `R^{2n}` with a basis of independent columns.
#[derive(Clone, Debug)]
pub struct Subspace {
    basis: DMatrix<f64>,
    orthonormal: DMatrix<f64>,
}

impl Subspace {
    /// `basis` must have linearly independent columns at the rank tolerance.
    pub fn new(basis: DMatrix<f64>, rank_tol: f64) -> Result<Self> {
        half_rows(basis.nrows())?;
        kernel::check_finite(&basis)?;
        let orthonormal = column_space(&basis, rank_tol);
        if orthonormal.ncols() != basis.ncols() {
            let s = kernel::singular_values(&basis);
            let ratio = match (s.first(), s.last()) {
                (Some(&hi), Some(&lo)) if hi > 0.0 => lo / hi,
                _ => 0.0,
            };
            return Err(Error::RankDeficient { ratio });
        }
        Ok(Self { basis, orthonormal })
    }

    /// Subspace spanned by an arbitrary (possibly dependent) set of vectors.
    /// The stored basis is orthonormal.
    pub fn from_spanning(vectors: &DMatrix<f64>, rank_tol: f64) -> Result<Self> {
        half_rows(vectors.nrows())?;
        let q = column_space(vectors, rank_tol);
        Ok(Self::from_orthonormal(q))
    }

    pub(crate) fn from_orthonormal(q: DMatrix<f64>) -> Self {
        Self {
            basis: q.clone(),
            orthonormal: q,
        }
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Self::from_orthonormal(DMatrix::zeros(ambient_dim, 0))
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self::from_orthonormal(DMatrix::identity(ambient_dim, ambient_dim))
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn orthonormal_basis(&self) -> &DMatrix<f64> {
        &self.orthonormal
    }

    /// Sine of the largest principal angle to `other` (1 if dimensions differ).
    pub fn distance(&self, other: &Subspace) -> f64 {
        principal_angle_sin(&self.orthonormal, &other.orthonormal)
    }

    pub fn same_as(&self, other: &Subspace, angle_tol: f64) -> bool {
        self.dim() == other.dim() && self.distance(other) <= angle_tol
    }

    /// The image `J W`.
    pub fn apply_j(&self) -> Subspace {
        Self {
            basis: j_mul(&self.basis),
            orthonormal: j_mul(&self.orthonormal),
        }
    }

    /// Euclidean orthogonal projector onto the subspace.
    pub fn projector(&self) -> DMatrix<f64> {
        &self.orthonormal * self.orthonormal.transpose()
    }
}

/// `W^{⊥s} = { u : u^T J w = 0 for all w in W } = (J W)^⊥`.
pub fn symplectic_complement(w: &Subspace) -> Result<Subspace> {
    let jq = j_mul(w.orthonormal_basis());
    Ok(Subspace::from_orthonormal(orthogonal_complement(&jq)?))
}

/// `σ_min(G)` for `G = Q^T J Q` on an orthonormal basis `Q`.
///
/// 1 for the zero subspace, 0 for odd dimension or a totally isotropic space.
pub fn symplectic_margin(w: &Subspace) -> f64 {
    let d = w.dim();
    if d == 0 {
        return 1.0;
    }
    if !d.is_multiple_of(2) {
        return 0.0;
    }
    let q = w.orthonormal_basis();
    // Orthonormal columns bound every singular value by 1, so the smallest
    // one is already scale free. A ratio against the largest would turn
    // rounding noise on an isotropic subspace into an O(1) margin.
    kernel::singular_values(&form_matrix(q, q))
        .last()
        .copied()
        .unwrap_or(0.0)
}

/// `W ∩ W^{⊥s} = {0}`, judged by the smallest singular value of the form's
/// Gram matrix relative to the largest.
pub fn is_symplectic_subspace(w: &Subspace, tol: f64) -> bool {
    w.dim() == 0 || symplectic_margin(w) > tol
}

/// A `2n x 2k` matrix `M = [u_1..u_k, v_1..v_k]` with `M^T J M = J_{2k}`.
#[derive(Clone, Debug)]
pub struct SymplecticFrame {
    cols: DMatrix<f64>,
}

impl SymplecticFrame {
    pub fn new(cols: DMatrix<f64>, symp_tol: f64) -> Result<Self> {
        half_rows(cols.nrows())?;
        if !cols.ncols().is_multiple_of(2) {
            return Err(Error::OddDimension(cols.ncols()));
        }
        kernel::check_finite(&cols)?;
        let defect = symplectic_defect(&cols);
        if !(defect <= symp_tol) {
            return Err(Error::NotSymplectic { defect });
        }
        Ok(Self { cols })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            cols: DMatrix::identity(2 * n, 2 * n),
        }
    }

    pub fn empty(n: usize) -> Self {
        Self {
            cols: DMatrix::zeros(2 * n, 0),
        }
    }

    /// `n`.
    pub fn ambient_n(&self) -> usize {
        self.cols.nrows() / 2
    }

    /// `k`.
    pub fn frame_k(&self) -> usize {
        self.cols.ncols() / 2
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.cols
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.cols
    }

    pub fn u_block(&self) -> DMatrix<f64> {
        self.cols.columns(0, self.frame_k()).into_owned()
    }

    pub fn v_block(&self) -> DMatrix<f64> {
        self.cols
            .columns(self.frame_k(), self.frame_k())
            .into_owned()
    }

    pub fn defect(&self) -> f64 {
        symplectic_defect(&self.cols)
    }

    pub fn range(&self) -> Subspace {
        Subspace::from_orthonormal(column_space(&self.cols, 1e-12))
    }
}

/// `x + ω(v,x) u - ω(u,x) v`, which is symplectically orthogonal to `u` and
/// `v` when `ω(u,v) = 1`.
fn deflate(x: &mut DVector<f64>, u: &DVector<f64>, v: &DVector<f64>, n: usize) {
    let a = form_unchecked(v.as_slice(), x.as_slice(), n);
    let b = form_unchecked(u.as_slice(), x.as_slice(), n);
    x.axpy(a, u, 1.0);
    x.axpy(-b, v, 1.0);
}

/// Symplectic basis of a symplectic subspace.
///
/// Repeatedly takes the remaining pair with the largest normalized
/// `|u^T J w|`, scales it to `ω(u, v) = 1`, and deflates the rest against it.
pub fn symplectic_gram_schmidt(w: &Subspace, tol: &Tolerances) -> Result<SymplecticFrame> {
    let n = half_rows(w.ambient_dim())?;
    if !w.dim().is_multiple_of(2) {
        return Err(Error::NotSymplecticSubspace(format!(
            "odd dimension {}",
            w.dim()
        )));
    }
    let mut remaining: Vec<DVector<f64>> =
        w.basis().column_iter().map(|c| c.into_owned()).collect();
    let mut pairs: Vec<(DVector<f64>, DVector<f64>)> = Vec::with_capacity(w.dim() / 2);

    while !remaining.is_empty() {
        let mut best = (0usize, 0usize, 0.0f64);
        for i in 0..remaining.len() {
            for j in (i + 1)..remaining.len() {
                let denom = remaining[i].norm() * remaining[j].norm();
                if denom == 0.0 {
                    continue;
                }
                let val = form_unchecked(remaining[i].as_slice(), remaining[j].as_slice(), n).abs()
                    / denom;
                if val > best.2 {
                    best = (i, j, val);
                }
            }
        }
        let (i, j, pivot) = best;
        if !(pivot > tol.symp_tol) {
            return Err(Error::NotSymplecticSubspace(format!(
                "near-zero pivot {pivot:e} in the symplectic form after {} pairs",
                pairs.len()
            )));
        }
        let mut wv = remaining.remove(j);
        let mut u = remaining.remove(i);
        // Second deflation pass against the accepted pairs.
        for (p, q) in &pairs {
            deflate(&mut u, p, q, n);
            deflate(&mut wv, p, q, n);
        }
        u.unscale_mut(u.norm());
        let omega = form_unchecked(u.as_slice(), wv.as_slice(), n);
        let v = wv / omega;
        for x in remaining.iter_mut() {
            deflate(x, &u, &v, n);
        }
        pairs.push((u, v));
    }

    let k = pairs.len();
    let mut cols = DMatrix::zeros(2 * n, 2 * k);
    for (idx, (u, v)) in pairs.iter().enumerate() {
        cols.set_column(idx, u);
        cols.set_column(k + idx, v);
    }
    SymplecticFrame::new(cols, tol.symp_tol)
}

/// Symplectic concatenation `M ⋄ N = [u.., x.., v.., y..]`.
pub fn concat(m: &DMatrix<f64>, other: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if m.nrows() != other.nrows() {
        return Err(Error::Dimension(format!(
            "concat: ambient {} vs {}",
            m.nrows(),
            other.nrows()
        )));
    }
    if !m.ncols().is_multiple_of(2) || !other.ncols().is_multiple_of(2) {
        return Err(Error::OddDimension(if !m.ncols().is_multiple_of(2) {
            m.ncols()
        } else {
            other.ncols()
        }));
    }
    let (k, l) = (m.ncols() / 2, other.ncols() / 2);
    let mut out = DMatrix::zeros(m.nrows(), 2 * (k + l));
    out.columns_mut(0, k).copy_from(&m.columns(0, k));
    out.columns_mut(k, l).copy_from(&other.columns(0, l));
    out.columns_mut(k + l, k).copy_from(&m.columns(k, k));
    out.columns_mut(2 * k + l, l)
        .copy_from(&other.columns(l, l));
    Ok(out)
}

/// Fold [`concat`] over a list of frames.
pub fn concat_all(frames: &[&DMatrix<f64>], ambient_dim: usize) -> Result<DMatrix<f64>> {
    frames
        .iter()
        .try_fold(DMatrix::zeros(ambient_dim, 0), |acc, f| concat(&acc, f))
}

/// s-direct sum: each quadrant of the result is the ordinary direct sum of
/// the corresponding quadrants of the blocks.
pub fn s_direct_sum(blocks: &[DMatrix<f64>]) -> Result<DMatrix<f64>> {
    let mut total = 0;
    for b in blocks {
        if b.nrows() != b.ncols() {
            return Err(Error::NotSquare {
                rows: b.nrows(),
                cols: b.ncols(),
            });
        }
        total += half_rows(b.nrows())?;
    }
    let mut out = DMatrix::zeros(2 * total, 2 * total);
    let mut off = 0;
    for b in blocks {
        let h = b.nrows() / 2;
        for (qr, qc) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            out.view_mut((qr * total + off, qc * total + off), (h, h))
                .copy_from(&b.view((qr * h, qc * h), (h, h)));
        }
        off += h;
    }
    Ok(out)
}

/// `P_M = J M M^T J^T`, positive semidefinite with kernel `ran(M)^{⊥s}`.
#[derive(Clone, Debug)]
pub struct SymplecticProjection {
    pub matrix: DMatrix<f64>,
}

pub fn symplectic_projection(m: &SymplecticFrame) -> SymplecticProjection {
    let jm = j_mul(m.matrix());
    SymplecticProjection {
        matrix: &jm * jm.transpose(),
    }
}

/// The idempotent acting as the identity on a symplectic subspace `W` and as
/// zero on `W^{⊥s}`: `Π = J^T P_M J P_M` for any frame `M` of `W`.
#[derive(Clone, Debug)]
pub struct SymplecticOrthogonalProjection {
    matrix: DMatrix<f64>,
    range: Subspace,
    kernel: Subspace,
}

impl SymplecticOrthogonalProjection {
    /// Accept an arbitrary matrix that has symplectic kernel, range equal to
    /// the symplectic complement of its kernel, and is idempotent.
    pub fn from_matrix(pi: DMatrix<f64>, tol: &Tolerances) -> Result<Self> {
        let (rows, cols) = pi.shape();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        half_rows(rows)?;
        kernel::check_finite(&pi)?;
        let ker = Subspace::from_orthonormal(null_space(&pi, tol.rank_tol)?);
        if !is_symplectic_subspace(&ker, tol.symp_tol) {
            return Err(Error::NotProjection(
                "kernel is not a symplectic subspace".into(),
            ));
        }
        let range = Subspace::from_orthonormal(column_space(&pi, tol.rank_tol));
        let expected = symplectic_complement(&ker)?;
        let angle = range.distance(&expected);
        if range.dim() != expected.dim() || angle > tol.check_tol {
            return Err(Error::NotProjection(format!(
                "range differs from the symplectic complement of the kernel (sin angle {angle:e})"
            )));
        }
        let idem = (&pi * &pi - &pi).norm();
        if idem > tol.check_tol * (1.0 + pi.norm()) {
            return Err(Error::NotProjection(format!(
                "not idempotent (‖Π²-Π‖_F = {idem:e})"
            )));
        }
        Ok(Self {
            matrix: pi,
            range,
            kernel: ker,
        })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn range(&self) -> &Subspace {
        &self.range
    }

    pub fn kernel(&self) -> &Subspace {
        &self.kernel
    }

    /// The zero projection (onto `{0}`).
    pub fn zero(ambient_dim: usize) -> Self {
        Self {
            matrix: DMatrix::zeros(ambient_dim, ambient_dim),
            range: Subspace::zero(ambient_dim),
            kernel: Subspace::full(ambient_dim),
        }
    }
}

pub fn symplectic_orthogonal_projection(
    m: &SymplecticFrame,
) -> Result<SymplecticOrthogonalProjection> {
    let p = symplectic_projection(m).matrix;
    let matrix = jt_mul(&(&p * j_mul(&p)));
    let range = m.range();
    let kernel = symplectic_complement(&range)?;
    Ok(SymplecticOrthogonalProjection {
        matrix,
        range,
        kernel,
    })
}

/// `ran(Π^T)`, which is `J ran(Π)`.
pub fn transpose_projection_range(pi: &SymplecticOrthogonalProjection) -> Subspace {
    let d = pi.range().dim();
    let mt = pi.matrix().transpose();
    if d == 0 {
        return Subspace::zero(mt.nrows());
    }
    let svd = SVD::new(mt, true, false);
    let u = svd.u.expect("u requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    order.truncate(d);
    Subspace::from_orthonormal(u.select_columns(&order))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(i: usize, dim: usize) -> DVector<f64> {
        let mut v = DVector::zeros(dim);
        v[i] = 1.0;
        v
    }

    fn cols(vs: &[DVector<f64>]) -> DMatrix<f64> {
        DMatrix::from_columns(vs)
    }

    #[test]
    fn rotated_lagrangian_has_zero_margin() {
        let u = crate::generate::random_orthosymplectic(3, 11);
        let w = Subspace::from_orthonormal(u.matrix().columns(0, 3).into_owned());
        assert!(symplectic_margin(&w) < 1e-12);
        assert!(!is_symplectic_subspace(&w, 1e-8));
    }

    fn j_dense(n: usize) -> DMatrix<f64> {
        j_mul(&DMatrix::identity(2 * n, 2 * n))
    }

    #[test]
    fn j_primitives_match_dense_j() {
        let x = DMatrix::from_fn(4, 4, |i, j| (i * 4 + j) as f64 - 3.5);
        let j = j_dense(2);
        assert_eq!(j_mul(&x), &j * &x);
        assert_eq!(jt_mul(&x), j.transpose() * &x);
        assert_eq!(mul_j(&x), &x * &j);
        assert_eq!(mul_jt(&x), &x * j.transpose());
        assert_eq!(&j * &j, -DMatrix::identity(4, 4));
    }

    #[test]
    fn form_examples() {
        assert_eq!(form(&e(0, 4), &e(2, 4)).unwrap(), 1.0);
        assert_eq!(form(&e(0, 4), &e(0, 4)).unwrap(), 0.0);
        let u = DVector::from_vec(vec![0.3, -1.0, 2.0, 0.5]);
        let v = DVector::from_vec(vec![1.5, 0.25, -0.75, 4.0]);
        assert_eq!(form(&u, &v).unwrap(), -form(&v, &u).unwrap());
        assert!(form(&e(0, 4), &e(0, 2)).is_err());
    }

    #[test]
    fn complement_examples() {
        let full = Subspace::full(4);
        assert_eq!(symplectic_complement(&full).unwrap().dim(), 0);

        let w = Subspace::new(cols(&[e(0, 4)]), 1e-9).unwrap();
        let c = symplectic_complement(&w).unwrap();
        let expected = Subspace::new(cols(&[e(0, 4), e(1, 4), e(3, 4)]), 1e-9).unwrap();
        assert!(c.same_as(&expected, 1e-12));
        let cc = symplectic_complement(&c).unwrap();
        assert!(cc.same_as(&w, 1e-12));
    }

    #[test]
    fn symplectic_subspace_examples() {
        let t = 1e-8;
        let w = Subspace::new(cols(&[e(0, 4), e(2, 4)]), 1e-9).unwrap();
        assert!(is_symplectic_subspace(&w, t));
        let w = Subspace::new(cols(&[e(0, 4), e(1, 4)]), 1e-9).unwrap();
        assert!(!is_symplectic_subspace(&w, t));
        let w = Subspace::new(cols(&[e(0, 4), e(1, 4), e(2, 4)]), 1e-9).unwrap();
        assert!(!is_symplectic_subspace(&w, t));
    }

    #[test]
    fn gram_schmidt_examples() {
        let tol = Tolerances::default();
        let w = Subspace::new(cols(&[e(0, 4), e(2, 4)]), 1e-9).unwrap();
        let f = symplectic_gram_schmidt(&w, &tol).unwrap();
        assert_eq!(f.matrix(), &cols(&[e(0, 4), e(2, 4)]));

        let f = symplectic_gram_schmidt(&Subspace::full(6), &tol).unwrap();
        assert_eq!(f.defect(), 0.0);
        assert!(f.range().same_as(&Subspace::full(6), 1e-12));

        let w = Subspace::new(cols(&[e(0, 4) * 2.0, e(2, 4)]), 1e-9).unwrap();
        let f = symplectic_gram_schmidt(&w, &tol).unwrap();
        assert!(f.defect() < 1e-15);
        assert!(f.range().same_as(&w, 1e-12));

        let w = Subspace::new(cols(&[e(0, 4), e(1, 4)]), 1e-9).unwrap();
        assert!(matches!(
            symplectic_gram_schmidt(&w, &tol),
            Err(Error::NotSymplecticSubspace(_))
        ));
    }

    #[test]
    fn concat_examples() {
        let m = cols(&[e(0, 4), e(2, 4)]);
        let nn = cols(&[e(1, 4), e(3, 4)]);
        let c = concat(&m, &nn).unwrap();
        assert_eq!(c, DMatrix::identity(4, 4));
        assert_eq!(concat(&m, &DMatrix::zeros(4, 0)).unwrap(), m);
        assert!(concat(&m, &DMatrix::zeros(6, 0)).is_err());
    }

    #[test]
    fn s_direct_sum_examples() {
        let j2 = j_dense(1);
        assert_eq!(s_direct_sum(std::slice::from_ref(&j2)).unwrap(), j2);
        assert_eq!(s_direct_sum(&[j2.clone(), j2.clone()]).unwrap(), j_dense(2));

        let d1 = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 2.0]));
        let d2 = DMatrix::from_diagonal(&DVector::from_vec(vec![5.0, 5.0]));
        let got = s_direct_sum(&[d1, d2]).unwrap();
        let want = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 5.0, 2.0, 5.0]));
        assert_eq!(got, want);
        assert!(s_direct_sum(&[DMatrix::identity(3, 3)]).is_err());
    }

    #[test]
    fn projection_examples() {
        let id = SymplecticFrame::identity(2);
        assert_eq!(symplectic_projection(&id).matrix, DMatrix::identity(4, 4));
        let pi = symplectic_orthogonal_projection(&id).unwrap();
        assert_eq!(pi.matrix(), &DMatrix::identity(4, 4));

        let f = SymplecticFrame::new(cols(&[e(0, 4), e(2, 4)]), 1e-8).unwrap();
        let diag = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 0.0, 1.0, 0.0]));
        assert_eq!(symplectic_projection(&f).matrix, diag);
        let pi = symplectic_orthogonal_projection(&f).unwrap();
        assert_eq!(pi.matrix(), &diag);
        let tr = transpose_projection_range(&pi);
        assert!(tr.same_as(&pi.range().apply_j(), 1e-12));
    }

    #[test]
    fn from_matrix_rejects_non_idempotent() {
        let tol = Tolerances::default();
        let diag = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 0.0, 1.0, 0.0]));
        assert!(SymplecticOrthogonalProjection::from_matrix(diag.clone(), &tol).is_ok());
        assert!(SymplecticOrthogonalProjection::from_matrix(diag * 2.0, &tol).is_err());
        // Orthogonal projection onto a Lagrangian plane: kernel not symplectic.
        let lag = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, 0.0, 0.0]));
        assert!(SymplecticOrthogonalProjection::from_matrix(lag, &tol).is_err());
    }

    #[test]
    fn frame_rejects_non_symplectic() {
        assert!(matches!(
            SymplecticFrame::new(cols(&[e(0, 4), e(1, 4)]), 1e-8),
            Err(Error::NotSymplectic { .. })
        ));
    }
}
