//! Real canonical forms of skew-symmetric matrices.
//!
//! For skew `K`, an orthogonal `U` brings `U^T K U` to
//! `0_z ⊕ [[0, β_1], [-β_1, 0]] ⊕ ... ⊕ [[0, β_r], [-β_r, 0]]` with `β_i > 0`.
//! The `β` are read off the psd matrix `-K² = K^T K`, whose eigenvalues are
//! the `β_i²`, each twice.

use nalgebra::{DMatrix, DVector};

use crate::classify::{ExistenceCondition, MatrixClass};
use crate::error::{Error, Result};
use crate::kernel::{eigh, orthogonal_complement};
use crate::Tolerances;

/// Allowed `‖K + K^T‖_F` relative to `max(1, ‖K‖_F)`.
pub const SKEW_TOL: f64 = 1e-10;
/// Allowed `‖U^T K U - canonical‖_F` relative to `max(1, ‖K‖_F)`.
pub const CANONICAL_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct SkewCanonicalForm {
    /// Orthogonal; columns ordered as the zero block, then `(x_i, y_i)` pairs.
    pub u: DMatrix<f64>,
    /// Descending.
    pub betas: Vec<f64>,
    /// First column of the 2x2 block carrying `betas[i]`.
    pub block_index: Vec<usize>,
    pub zero_dim: usize,
}

impl SkewCanonicalForm {
    /// Number of 2x2 blocks (`rank(K) / 2`).
    pub fn rank_pairs(&self) -> usize {
        self.betas.len()
    }

    /// `0_z ⊕ [[0, β], [-β, 0]] ⊕ ...`
    pub fn canonical_matrix(&self) -> DMatrix<f64> {
        let m = self.u.nrows();
        let mut c = DMatrix::zeros(m, m);
        for (&b, &col) in self.betas.iter().zip(&self.block_index) {
            c[(col, col + 1)] = b;
            c[(col + 1, col)] = -b;
        }
        c
    }

    pub fn block_vectors(&self, i: usize) -> (DVector<f64>, DVector<f64>) {
        let col = self.block_index[i];
        (
            self.u.column(col).into_owned(),
            self.u.column(col + 1).into_owned(),
        )
    }
}

fn project_out(x: &mut DVector<f64>, basis: &[DVector<f64>]) {
    // Two passes of classical Gram-Schmidt.
    for _ in 0..2 {
        for q in basis {
            let c = q.dot(x);
            x.axpy(-c, q, 1.0);
        }
    }
}

/// Orthogonal canonical form of a skew-symmetric matrix.
pub fn skew_canonical(k: &DMatrix<f64>, tol: &Tolerances) -> Result<SkewCanonicalForm> {
    let (rows, cols) = k.shape();
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    let kf = k.norm();
    let residual = (k + k.transpose()).norm();
    if residual > SKEW_TOL * kf.max(1.0) {
        return Err(Error::NotSkew { residual });
    }
    let k = (k - k.transpose()) * 0.5;
    let m = rows;

    let s = k.transpose() * &k;
    let eig = eigh(&s)?;
    let beta_max = eig.eigenvalues.iter().fold(0.0f64, |a, &l| a.max(l)).sqrt();
    let threshold = tol.rank_tol * beta_max.max(1.0);
    let candidates: Vec<DVector<f64>> = (0..m)
        .rev()
        .map(|j| eig.vectors.column(j).into_owned())
        .collect();

    let mut used = vec![false; m];
    let mut accepted: Vec<DVector<f64>> = Vec::with_capacity(m);
    let mut zero_vecs: Vec<DVector<f64>> = Vec::new();
    let mut blocks: Vec<(f64, DVector<f64>, DVector<f64>)> = Vec::new();

    while accepted.len() < m {
        // Candidate least explained by what has been accepted so far.
        let mut best: Option<(usize, DVector<f64>, f64)> = None;
        for (idx, c) in candidates.iter().enumerate() {
            if used[idx] {
                continue;
            }
            let mut r = c.clone();
            project_out(&mut r, &accepted);
            let nr = r.norm();
            if best.as_ref().is_none_or(|b| nr > b.2) {
                best = Some((idx, r, nr));
            }
        }
        let Some((idx, mut x, nr)) = best else { break };
        if nr < 1e-6 {
            return Err(Error::Numerical {
                stage: "skew canonical form (basis exhausted)",
                residual: nr,
                threshold: 1e-6,
            });
        }
        used[idx] = true;
        x.unscale_mut(nr);
        project_out(&mut x, &accepted);
        x.unscale_mut(x.norm());

        let kx = &k * &x;
        let beta = kx.norm();
        if beta <= threshold || accepted.len() + 2 > m {
            accepted.push(x.clone());
            zero_vecs.push(x);
            continue;
        }
        // x^T K y = β for y = -Kx/β.
        let mut y = kx / (-beta);
        project_out(&mut y, &accepted);
        let xy = x.dot(&y);
        y.axpy(-xy, &x, 1.0);
        y.unscale_mut(y.norm());
        let beta = x.dot(&(&k * &y));
        accepted.push(x.clone());
        accepted.push(y.clone());
        blocks.push((beta, x, y));
    }

    blocks.sort_by(|a, b| b.0.total_cmp(&a.0));
    let zero_dim = zero_vecs.len();
    let mut u = DMatrix::zeros(m, m);
    for (j, z) in zero_vecs.iter().enumerate() {
        u.set_column(j, z);
    }
    let mut betas = Vec::with_capacity(blocks.len());
    let mut block_index = Vec::with_capacity(blocks.len());
    for (i, (b, x, y)) in blocks.iter().enumerate() {
        let col = zero_dim + 2 * i;
        u.set_column(col, x);
        u.set_column(col + 1, y);
        betas.push(*b);
        block_index.push(col);
    }

    let form = SkewCanonicalForm {
        u,
        betas,
        block_index,
        zero_dim,
    };
    let residual = (form.u.transpose() * &k * &form.u - form.canonical_matrix()).norm();
    let limit = CANONICAL_TOL * kf.max(1.0);
    if residual > limit {
        return Err(Error::Numerical {
            stage: "skew canonical form",
            residual,
            threshold: limit,
        });
    }
    Ok(form)
}

/// Which input a 2x2 block of a simultaneous canonical form belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockSource {
    Negative,
    Positive,
}

#[derive(Clone, Debug)]
pub struct AttributedBlock {
    pub beta: f64,
    pub source: BlockSource,
    /// First column of the block in `u`.
    pub col: usize,
}

#[derive(Clone, Debug)]
pub struct SimultaneousCanonical {
    pub u: DMatrix<f64>,
    pub zero_dim: usize,
    pub blocks: Vec<AttributedBlock>,
}

impl SimultaneousCanonical {
    pub fn blocks_from(&self, source: BlockSource) -> impl Iterator<Item = &AttributedBlock> {
        self.blocks.iter().filter(move |b| b.source == source)
    }

    /// The canonical form of the `source` input under the shared `u`.
    pub fn canonical_matrix(&self, source: BlockSource) -> DMatrix<f64> {
        let m = self.u.nrows();
        let mut c = DMatrix::zeros(m, m);
        for b in self.blocks_from(source) {
            c[(b.col, b.col + 1)] = b.beta;
            c[(b.col + 1, b.col)] = -b.beta;
        }
        c
    }
}

/// One orthogonal `U` that brings two commuting skew matrices with zero
/// product to canonical form at once, with disjoint block supports.
pub fn simultaneous_skew_canonical(
    k_neg: &DMatrix<f64>,
    k_pos: &DMatrix<f64>,
    tol: &Tolerances,
) -> Result<SimultaneousCanonical> {
    if k_neg.shape() != k_pos.shape() {
        return Err(Error::Dimension(format!(
            "simultaneous canonical form: {:?} vs {:?}",
            k_neg.shape(),
            k_pos.shape()
        )));
    }
    let (nf, pf) = (k_neg.norm(), k_pos.norm());
    let scale = (nf * pf).max(1.0);
    let product = (k_neg * k_pos).norm();
    let commutator = (k_neg * k_pos - k_pos * k_neg).norm();
    let worst = product.max(commutator);
    if worst > tol.check_tol * scale {
        return Err(Error::Rejected {
            class: MatrixClass::EigSpSm,
            condition: "skew parts commute with zero product".into(),
            existence_condition: ExistenceCondition::II,
            residual: worst / scale,
            threshold: tol.check_tol,
        });
    }

    // K-K+ = K+K- = 0 forces ran(K-) ⊥ ran(K+), so the two canonical forms
    // can be computed separately and their blocks merged. Going through the
    // sum instead would mix planes whenever a β of K- equals one of K+.
    let m = k_neg.nrows();
    let neg = skew_canonical(k_neg, tol)?;
    let pos = skew_canonical(k_pos, tol)?;
    let r = neg.rank_pairs() + pos.rank_pairs();
    if 2 * r > m {
        return Err(Error::Numerical {
            stage: "simultaneous canonical form (ranks exceed dimension)",
            residual: (2 * r - m) as f64,
            threshold: 0.0,
        });
    }
    let mut planes = DMatrix::zeros(m, 2 * r);
    let mut sources = Vec::with_capacity(r);
    let mut c = 0;
    for (form, source) in [(&neg, BlockSource::Negative), (&pos, BlockSource::Positive)] {
        for i in 0..form.rank_pairs() {
            let (x, y) = form.block_vectors(i);
            planes.set_column(c, &x);
            planes.set_column(c + 1, &y);
            sources.push((form.betas[i], source));
            c += 2;
        }
    }
    let zero_dim = m - 2 * r;
    let complement = orthogonal_complement(&planes)?;
    if complement.ncols() != zero_dim {
        return Err(Error::Numerical {
            stage: "simultaneous canonical form (block planes not orthogonal)",
            residual: complement.ncols().abs_diff(zero_dim) as f64,
            threshold: 0.0,
        });
    }
    let mut u = DMatrix::zeros(m, m);
    u.columns_mut(0, zero_dim).copy_from(&complement);
    u.columns_mut(zero_dim, 2 * r).copy_from(&planes);
    let blocks: Vec<AttributedBlock> = sources
        .into_iter()
        .enumerate()
        .map(|(i, (beta, source))| AttributedBlock {
            beta,
            source,
            col: zero_dim + 2 * i,
        })
        .collect();
    let out = SimultaneousCanonical {
        u,
        zero_dim,
        blocks,
    };

    let orth = (out.u.transpose() * &out.u - DMatrix::<f64>::identity(m, m)).norm();
    if orth > CANONICAL_TOL {
        return Err(Error::Numerical {
            stage: "simultaneous canonical form (orthogonality)",
            residual: orth,
            threshold: CANONICAL_TOL,
        });
    }
    for (source, k, kf) in [
        (BlockSource::Negative, k_neg, nf),
        (BlockSource::Positive, k_pos, pf),
    ] {
        let residual = (out.u.transpose() * k * &out.u - out.canonical_matrix(source)).norm();
        let limit = CANONICAL_TOL * kf.max(1.0);
        if residual > limit {
            return Err(Error::Numerical {
                stage: "simultaneous canonical form (conjugation)",
                residual,
                threshold: limit,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::j_mul;

    fn block(beta: f64) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[0.0, beta, -beta, 0.0])
    }

    fn direct_sum(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
        out.view_mut((0, 0), a.shape()).copy_from(a);
        out.view_mut(a.shape(), b.shape()).copy_from(b);
        out
    }

    fn check(k: &DMatrix<f64>, f: &SkewCanonicalForm) {
        let m = k.nrows();
        assert!((f.u.transpose() * &f.u - DMatrix::identity(m, m)).norm() < 1e-12);
        assert!(
            (f.u.transpose() * k * &f.u - f.canonical_matrix()).norm() < 1e-12 * k.norm().max(1.0)
        );
    }

    #[test]
    fn canonical_of_j2() {
        let tol = Tolerances::default();
        let k = j_mul(&DMatrix::identity(2, 2));
        let f = skew_canonical(&k, &tol).unwrap();
        assert_eq!(f.zero_dim, 0);
        assert_eq!(f.betas.len(), 1);
        assert!((f.betas[0] - 1.0).abs() < 1e-14);
        check(&k, &f);
    }

    #[test]
    fn canonical_of_zero() {
        let f = skew_canonical(&DMatrix::zeros(4, 4), &Tolerances::default()).unwrap();
        assert_eq!(f.zero_dim, 4);
        assert!(f.betas.is_empty());
    }

    #[test]
    fn canonical_of_partial_block() {
        let k = direct_sum(&block(5.0), &DMatrix::zeros(2, 2));
        let f = skew_canonical(&k, &Tolerances::default()).unwrap();
        assert_eq!(f.zero_dim, 2);
        assert_eq!(f.betas.len(), 1);
        assert!((f.betas[0] - 5.0).abs() < 1e-13);
        check(&k, &f);
    }

    #[test]
    fn canonical_with_repeated_betas() {
        // J_6 has β = 1 three times.
        let k = j_mul(&DMatrix::identity(6, 6));
        let f = skew_canonical(&k, &Tolerances::default()).unwrap();
        assert_eq!(f.betas.len(), 3);
        check(&k, &f);
    }

    #[test]
    fn rejects_non_skew() {
        assert!(matches!(
            skew_canonical(&DMatrix::identity(2, 2), &Tolerances::default()),
            Err(Error::NotSkew { .. })
        ));
    }

    #[test]
    fn simultaneous_examples() {
        let tol = Tolerances::default();
        let j4 = j_mul(&DMatrix::identity(4, 4));
        let s = simultaneous_skew_canonical(&DMatrix::zeros(4, 4), &j4, &tol).unwrap();
        assert_eq!(s.blocks.len(), 2);
        assert!(s.blocks.iter().all(|b| b.source == BlockSource::Positive));
        assert!(s.blocks.iter().all(|b| (b.beta - 1.0).abs() < 1e-14));

        let kn = direct_sum(&block(2.0), &DMatrix::zeros(2, 2));
        let kp = direct_sum(&DMatrix::zeros(2, 2), &block(3.0));
        let s = simultaneous_skew_canonical(&kn, &kp, &tol).unwrap();
        let neg: Vec<f64> = s
            .blocks_from(BlockSource::Negative)
            .map(|b| b.beta)
            .collect();
        let pos: Vec<f64> = s
            .blocks_from(BlockSource::Positive)
            .map(|b| b.beta)
            .collect();
        assert_eq!(neg.len(), 1);
        assert_eq!(pos.len(), 1);
        assert!((neg[0] - 2.0).abs() < 1e-13);
        assert!((pos[0] - 3.0).abs() < 1e-13);
        for (src, k) in [(BlockSource::Negative, &kn), (BlockSource::Positive, &kp)] {
            let r = s.u.transpose() * k * &s.u - s.canonical_matrix(src);
            assert!(r.norm() < 1e-12);
        }
    }

    #[test]
    fn simultaneous_rejects_overlapping_inputs() {
        let j4 = j_mul(&DMatrix::identity(4, 4));
        let err = simultaneous_skew_canonical(&j4, &j4, &Tolerances::default()).unwrap_err();
        assert!(matches!(err, Error::Rejected { .. }));
    }
}
