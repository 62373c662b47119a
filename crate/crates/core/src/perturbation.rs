//! The diagonal `D̂(A)` and perturbation bounds for it.
//!
//! For symmetric `A = A+ - A-`,
//! `D̂(A) = Eig(|A+^{1/2} J A+^{1/2}|) + Eig(-|A-^{1/2} J A-^{1/2}|)`
//! with `Eig` listing eigenvalues in decreasing order. The absolute value of
//! the Hermitian matrix `ιK` for skew `K` has eigenvalues `β_i` (each twice)
//! and zeros, so everything stays real. The entries come in equal pairs
//! `d_1, d_1, ..., d_n, d_n`, and for every unitarily invariant norm
//!
//! ```text
//! |||D̂(A) - D̂(B)||| <= (‖A+^{1/2}‖ + ‖B+^{1/2}‖) ||| |A+ - B+|^{1/2} |||
//!                     + (‖A-^{1/2}‖ + ‖B-^{1/2}‖) ||| |A- - B-|^{1/2} |||
//! ```
//!
//! Parts and roots here are exact (`max(±λ, 0)`), not truncated at the rank
//! tolerance: truncation would move `d_i` by `O(rank_tol^{1/2})`.

use nalgebra::DMatrix;

use crate::engine::{block_pair, skew_canonical, symplectic_rayleigh};
use crate::error::{Error, Result};
use crate::io::format_g17;
use crate::kernel::{eigh, EigDecomposition, NormKind};
use crate::symplectic::j_mul;
use crate::{SymMatrix, Tolerances};

#[derive(Clone, Debug, PartialEq)]
pub struct DHat {
    /// Length `2n`, descending, in equal adjacent pairs.
    pub values: Vec<f64>,
}

impl DHat {
    /// `d_1, ..., d_n`: one entry per pair, descending.
    pub fn pairs(&self) -> Vec<f64> {
        self.values.iter().step_by(2).copied().collect()
    }

    /// Largest gap inside an adjacent pair.
    pub fn pairing_defect(&self) -> f64 {
        self.values
            .chunks(2)
            .map(|c| {
                if c.len() == 2 {
                    (c[0] - c[1]).abs()
                } else {
                    f64::INFINITY
                }
            })
            .fold(0.0, f64::max)
    }
}

/// Exact `A+`, `A-` and their square roots from one eigendecomposition.
struct Parts {
    pos: DMatrix<f64>,
    neg: DMatrix<f64>,
    root_pos: DMatrix<f64>,
    root_neg: DMatrix<f64>,
    /// `max(λ_max, 0)` and `max(-λ_min, 0)`.
    top_pos: f64,
    top_neg: f64,
}

fn parts(a: &SymMatrix) -> Result<Parts> {
    let eig: EigDecomposition = eigh(a.as_matrix())?;
    let k = eig.eigenvalues.len();
    Ok(Parts {
        pos: eig.reconstruct_with(|l| l.max(0.0)),
        neg: eig.reconstruct_with(|l| (-l).max(0.0)),
        root_pos: eig.reconstruct_with(|l| l.max(0.0).sqrt()),
        root_neg: eig.reconstruct_with(|l| (-l).max(0.0).sqrt()),
        top_pos: eig.eigenvalues[k - 1].max(0.0),
        top_neg: (-eig.eigenvalues[0]).max(0.0),
    })
}

/// `β` list of `R J R`, descending, each refined by the symplectic Rayleigh
/// quotient of `part = R²`.
fn betas(part: &DMatrix<f64>, root: &DMatrix<f64>, tol: &Tolerances) -> Result<Vec<f64>> {
    let form = skew_canonical(&(root * j_mul(root)), tol)?;
    let mut out: Vec<f64> = (0..form.rank_pairs())
        .map(|i| {
            let (x, y) = form.block_vectors(i);
            let (u, v) = block_pair(root, &x, &y, form.betas[i]);
            symplectic_rayleigh(part, &u, &v)
        })
        .collect();
    out.sort_by(|a, b| b.total_cmp(a));
    Ok(out)
}

fn d_hat_from_parts(p: &Parts, dim: usize, tol: &Tolerances) -> Result<DHat> {
    let bp = betas(&p.pos, &p.root_pos, tol)?;
    let bn = betas(&p.neg, &p.root_neg, tol)?;
    // Eig(|K+|): each β twice, then zeros.
    let mut pos = vec![0.0; dim];
    for (i, &b) in bp.iter().enumerate() {
        pos[2 * i] = b;
        pos[2 * i + 1] = b;
    }
    // Eig(-|K-|): zeros, then -β from the smallest β to the largest.
    let mut neg = vec![0.0; dim];
    for (i, &b) in bn.iter().enumerate() {
        neg[dim - 1 - 2 * i] = -b;
        neg[dim - 2 - 2 * i] = -b;
    }
    Ok(DHat {
        values: pos.iter().zip(&neg).map(|(x, y)| x + y).collect(),
    })
}

/// `D̂(A)`, defined for every symmetric `A`. Its pairs are the symplectic
/// eigenvalues only when `A` admits a decomposition from its eigenspaces.
pub fn d_hat(a: &SymMatrix, tol: &Tolerances) -> Result<DHat> {
    d_hat_from_parts(&parts(a)?, a.dim(), tol)
}

#[derive(Clone, Debug)]
pub struct PerturbationReport {
    pub kind: NormKind,
    /// `|||D̂(A) - D̂(B)|||`.
    pub lhs: f64,
    /// `term_pos + term_neg`.
    pub rhs: f64,
    pub term_pos: f64,
    pub term_neg: f64,
    /// `1e-9 max(1, ‖A‖_F, ‖B‖_F)`.
    pub slack: f64,
    pub pass: bool,
}

impl PerturbationReport {
    /// `lhs / max(rhs, 1e-300)`.
    pub fn ratio(&self) -> f64 {
        self.lhs / self.rhs.max(1e-300)
    }
}

pub const BOUND_SLACK: f64 = 1e-9;

/// `||| |X|^{1/2} |||` for symmetric `X`: the singular values are `|λ_i|^{1/2}`.
fn abs_sqrt_norm(x: &DMatrix<f64>, kind: NormKind) -> Result<f64> {
    let eig = eigh(x)?;
    Ok(kind.of_singular_values(eig.eigenvalues.iter().map(|l| l.abs().sqrt())))
}

fn check_same_dim(a: &SymMatrix, b: &SymMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension(format!(
            "{}x{} vs {}x{}",
            a.dim(),
            a.dim(),
            b.dim(),
            b.dim()
        )));
    }
    Ok(())
}

/// Both sides of the bound in the chosen norm.
pub fn bound_main(
    a: &SymMatrix,
    b: &SymMatrix,
    kind: NormKind,
    tol: &Tolerances,
) -> Result<PerturbationReport> {
    check_same_dim(a, b)?;
    let (pa, pb) = (parts(a)?, parts(b)?);
    let dim = a.dim();
    let (da, db) = (
        d_hat_from_parts(&pa, dim, tol)?,
        d_hat_from_parts(&pb, dim, tol)?,
    );
    let lhs = kind.of_singular_values(da.values.iter().zip(&db.values).map(|(x, y)| x - y));

    let term_pos =
        (pa.top_pos.sqrt() + pb.top_pos.sqrt()) * abs_sqrt_norm(&(&pa.pos - &pb.pos), kind)?;
    let term_neg =
        (pa.top_neg.sqrt() + pb.top_neg.sqrt()) * abs_sqrt_norm(&(&pa.neg - &pb.neg), kind)?;
    let rhs = term_pos + term_neg;
    let slack = BOUND_SLACK * a.frobenius().max(b.frobenius()).max(1.0);
    Ok(PerturbationReport {
        kind,
        lhs,
        rhs,
        term_pos,
        term_neg,
        slack,
        pass: lhs <= rhs + slack,
    })
}

/// Operator norm: `max_i |d_i(A) - d_i(B)|` against `‖A± - B±‖^{1/2}`.
pub fn bound_operator(
    a: &SymMatrix,
    b: &SymMatrix,
    tol: &Tolerances,
) -> Result<PerturbationReport> {
    bound_main(a, b, NormKind::Operator, tol)
}

/// Frobenius norm: `√2 (Σ_i |d_i(A) - d_i(B)|²)^{1/2}` against
/// `Tr(|A± - B±|)^{1/2}`.
pub fn bound_frobenius(
    a: &SymMatrix,
    b: &SymMatrix,
    tol: &Tolerances,
) -> Result<PerturbationReport> {
    bound_main(a, b, NormKind::Frobenius, tol)
}

/// `|||A^{1/2} - B^{1/2}|||` and `||| |A - B|^{1/2} |||` for psd `A`, `B`.
pub fn sqrt_difference_sides(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    kind: NormKind,
) -> Result<(f64, f64)> {
    let ra = eigh(a)?.reconstruct_with(|l| l.max(0.0).sqrt());
    let rb = eigh(b)?.reconstruct_with(|l| l.max(0.0).sqrt());
    let lhs = crate::kernel::norm(&(ra - rb), kind);
    Ok((lhs, abs_sqrt_norm(&(a - b), kind)?))
}

/// `|||Eig(X) - Eig(Y)|||` and `|||X - Y|||` for symmetric `X`, `Y`.
pub fn lidskii_wielandt_sides(
    x: &DMatrix<f64>,
    y: &DMatrix<f64>,
    kind: NormKind,
) -> Result<(f64, f64)> {
    let (ex, ey) = (eigh(x)?, eigh(y)?);
    let lhs = kind.of_singular_values(
        ex.eigenvalues
            .iter()
            .zip(ey.eigenvalues.iter())
            .map(|(p, q)| p - q),
    );
    Ok((lhs, crate::kernel::norm(&(x - y), kind)))
}

#[derive(Clone, Debug)]
pub struct SweepRow {
    pub epsilon: f64,
    pub kind: NormKind,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    /// `C √ε`.
    pub envelope: f64,
}

#[derive(Clone, Debug)]
pub struct Sweep {
    /// Ordered by the input `ε` list, then by norm kind.
    pub rows: Vec<SweepRow>,
}

impl Sweep {
    pub const CSV_HEADER: &'static str = "epsilon,norm_kind,lhs,rhs,ratio";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                format_g17(r.epsilon),
                r.kind.name(),
                format_g17(r.lhs),
                format_g17(r.rhs),
                format_g17(r.ratio)
            ));
        }
        out
    }

    /// Rows where `lhs` exceeds the envelope (plus `slack`).
    pub fn envelope_violations(&self, slack: f64) -> Vec<&SweepRow> {
        self.rows
            .iter()
            .filter(|r| r.lhs > r.envelope + slack)
            .collect()
    }
}

/// `C` with `rhs(ε) <= C √ε` for all `0 <= ε <= eps_max`, where `B = A + εE`.
///
/// Uses `‖B±‖ <= ‖A±‖ + ε‖E‖_op` and `‖A± - B±‖_F <= ε‖E‖_F`, the latter
/// because `X -> X+` is nonexpansive in the Frobenius norm.
pub fn envelope_coefficient(
    a: &SymMatrix,
    direction: &SymMatrix,
    eps_max: f64,
    kind: NormKind,
) -> Result<f64> {
    let pa = parts(a)?;
    let e_op = crate::kernel::sym_operator_norm(direction.as_matrix())?;
    let e_f = direction.frobenius();
    let dim = a.dim() as f64;
    let c_k = match kind {
        NormKind::Operator => e_f.sqrt(),
        NormKind::Frobenius => (dim.sqrt() * e_f).sqrt(),
        NormKind::Trace => dim.sqrt() * (dim.sqrt() * e_f).sqrt(),
    };
    let side = |top: f64| top.sqrt() + (top + eps_max * e_op).sqrt();
    Ok((side(pa.top_pos) + side(pa.top_neg)) * c_k)
}

/// Evaluate the bound along `B = A + εE` for each `ε` and every norm kind.
pub fn sweep(
    a: &SymMatrix,
    direction: &SymMatrix,
    epsilons: &[f64],
    tol: &Tolerances,
) -> Result<Sweep> {
    check_same_dim(a, direction)?;
    if let Some(e) = epsilons.iter().find(|e| !(e.is_finite() && **e >= 0.0)) {
        return Err(Error::InvalidSpec(format!(
            "epsilon must be finite and nonnegative, got {e}"
        )));
    }
    let eps_max = epsilons.iter().copied().fold(0.0, f64::max);
    let mut coeffs = Vec::with_capacity(3);
    for kind in NormKind::ALL {
        coeffs.push(envelope_coefficient(a, direction, eps_max, kind)?);
    }
    let mut rows = Vec::with_capacity(epsilons.len() * 3);
    for &eps in epsilons {
        let b = SymMatrix::new(a.as_matrix() + direction.as_matrix() * eps)?;
        for (kind, c) in NormKind::ALL.into_iter().zip(&coeffs) {
            let r = bound_main(a, &b, kind, tol)?;
            rows.push(SweepRow {
                epsilon: eps,
                kind,
                lhs: r.lhs,
                rhs: r.rhs,
                ratio: r.ratio(),
                envelope: c * eps.sqrt(),
            });
        }
    }
    Ok(Sweep { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn diag(d: &[f64]) -> SymMatrix {
        SymMatrix::from_diagonal(d).unwrap()
    }

    fn close(a: &[f64], b: &[f64], eps: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= eps)
    }

    #[test]
    fn d_hat_examples() {
        assert!(close(
            &d_hat(&diag(&[1.0; 4]), &tol()).unwrap().values,
            &[1.0; 4],
            1e-14
        ));
        assert!(close(
            &d_hat(&diag(&[-1.0; 4]), &tol()).unwrap().values,
            &[-1.0; 4],
            1e-14
        ));
        let d = d_hat(&diag(&[-5.0, 7.0, -5.0, 7.0]), &tol()).unwrap();
        assert!(close(&d.values, &[7.0, 7.0, -5.0, -5.0], 1e-13));
        assert_eq!(d.pairs().len(), 2);
    }

    #[test]
    fn identical_inputs_give_zero_sides() {
        let a = diag(&[-2.0, 3.0, 1.0, 0.5]);
        for kind in NormKind::ALL {
            let r = bound_main(&a, &a, kind, &tol()).unwrap();
            assert_eq!(r.lhs, 0.0);
            assert!(r.rhs.abs() < 1e-12);
            assert!(r.pass);
        }
    }

    #[test]
    fn hand_evaluated_pairs() {
        let a = diag(&[2.0; 4]);
        let b = diag(&[1.0; 4]);
        let r = bound_operator(&a, &b, &tol()).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-14);
        assert!((r.rhs - (2f64.sqrt() + 1.0)).abs() < 1e-14);
        assert_eq!(r.term_neg, 0.0);
        assert!(r.pass);

        let r = bound_frobenius(&a, &b, &tol()).unwrap();
        assert!((r.lhs - 2.0).abs() < 1e-14);
        assert!((r.rhs - 2.0 * (2f64.sqrt() + 1.0)).abs() < 1e-13);
        assert!(r.pass);
    }

    #[test]
    fn sweep_starts_at_zero() {
        let a = diag(&[-2.0, 3.0, 1.0, 0.5]);
        let e = SymMatrix::new(DMatrix::from_fn(4, 4, |i, j| ((i + j) as f64).cos())).unwrap();
        let s = sweep(&a, &e, &[0.0, 1e-2, 1e-4], &tol()).unwrap();
        assert_eq!(s.rows.len(), 9);
        assert!(s.rows[..3].iter().all(|r| r.lhs == 0.0));
        assert!(s.envelope_violations(1e-9).is_empty());
        assert!(s
            .to_csv()
            .starts_with("epsilon,norm_kind,lhs,rhs,ratio\n0,op,0,"));
    }

    #[test]
    fn lemma_sides_on_diagonal() {
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![4.0, 1.0]));
        let b = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0]));
        let (l, r) = sqrt_difference_sides(&a, &b, NormKind::Operator).unwrap();
        assert!((l - 1.0).abs() < 1e-14);
        assert!((r - 3f64.sqrt()).abs() < 1e-14);
        let (l, r) = lidskii_wielandt_sides(&a, &b, NormKind::Trace).unwrap();
        assert!((l - 3.0).abs() < 1e-14 && (r - 3.0).abs() < 1e-14);
    }
}
