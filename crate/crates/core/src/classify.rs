//! Membership checks for the matrix classes and verification of
//! invariant-subspace certificates.
//!
//! A decomposition `M^T A M = D ⊕ D` exists exactly when there are subspaces
//! `W-`, `W0`, `W+` with
//!
//! * (i) the three are pairwise symplectically orthogonal symplectic subspaces
//!   of dimensions `(ν, ξ, π)`,
//! * (ii) each is invariant under `JA`,
//! * (iii) `A` is negative definite on `W-`, zero on `W0 = ker A` and positive
//!   definite on `W+`.
//!
//! Every check here returns a [`MembershipReport`] listing one record per
//! measured quantity, tagged with the condition it belongs to.

use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::kernel::{self, column_space, eigh, inertia_of, principal_angle_sin, InertiaSignature};
use crate::symplectic::{
    form_matrix, j_mul, symplectic_margin, Subspace, SymplecticOrthogonalProjection,
};
use crate::{SymMatrix, Tolerances};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixClass {
    Pd,
    SpPsd,
    EigSpSm,
    CertifiedSpSm,
}

impl fmt::Display for MatrixClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatrixClass::Pd => "Pd",
            MatrixClass::SpPsd => "SpPsd",
            MatrixClass::EigSpSm => "EigSpSm",
            MatrixClass::CertifiedSpSm => "SpSm",
        })
    }
}

/// Which of the three existence conditions a record belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExistenceCondition {
    I,
    II,
    III,
}

impl fmt::Display for ExistenceCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExistenceCondition::I => "i",
            ExistenceCondition::II => "ii",
            ExistenceCondition::III => "iii",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Comparison {
    /// Pass iff `residual <= threshold`.
    AtMost,
    /// Pass iff `residual > threshold`.
    Above,
}

impl Comparison {
    fn holds(self, residual: f64, threshold: f64) -> bool {
        match self {
            Comparison::AtMost => residual <= threshold,
            Comparison::Above => residual > threshold,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Comparison::AtMost => "<=",
            Comparison::Above => ">",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ConditionRecord {
    pub name: String,
    pub condition: ExistenceCondition,
    pub residual: f64,
    pub threshold: f64,
    pub comparison: Comparison,
    pub pass: bool,
}

impl ConditionRecord {
    pub fn new(
        name: impl Into<String>,
        condition: ExistenceCondition,
        residual: f64,
        threshold: f64,
        comparison: Comparison,
    ) -> Self {
        Self {
            name: name.into(),
            condition,
            residual,
            threshold,
            comparison,
            pass: comparison.holds(residual, threshold),
        }
    }
}

#[derive(Clone, Debug)]
pub struct MembershipReport {
    pub class: MatrixClass,
    pub verdict: bool,
    pub conditions: Vec<ConditionRecord>,
    pub inertia: InertiaSignature,
    /// Distance of the eigenvalue closest to the zero threshold, relative to
    /// the spectral scale. Small values mean the verdict is fragile.
    pub margin: f64,
}

impl MembershipReport {
    fn from_records(
        class: MatrixClass,
        conditions: Vec<ConditionRecord>,
        inertia: InertiaSignature,
        margin: f64,
    ) -> Self {
        Self {
            class,
            verdict: conditions.iter().all(|c| c.pass),
            conditions,
            inertia,
            margin,
        }
    }

    pub fn first_failure(&self) -> Option<&ConditionRecord> {
        self.conditions.iter().find(|c| !c.pass)
    }

    /// The rejection error for the first failed record, if any.
    pub fn rejection(&self) -> Option<Error> {
        self.first_failure().map(|c| Error::Rejected {
            class: self.class,
            condition: c.name.clone(),
            existence_condition: c.condition,
            residual: c.residual,
            threshold: c.threshold,
        })
    }

    pub fn into_result(self) -> Result<Self> {
        match self.rejection() {
            Some(e) => Err(e),
            None => Ok(self),
        }
    }

    /// One-line verdict.
    pub fn summary(&self) -> String {
        match (self.class, self.first_failure()) {
            (c, None) => format!("{c}: yes"),
            (c, Some(f)) => format!("{c}: no ({} fails, condition {})", f.name, f.condition),
        }
    }
}

/// Eigenspaces of `A` grouped by eigenvalue sign.
/// Whether a decomposition is known to exist, from the SpPsd and EigSpSm
/// reports of one matrix. A psd matrix with symplectic kernel is certified by
/// its kernel and the kernel's symplectic complement even when its eigenspaces
/// fail the EigSpSm test.
pub fn spsm_summary(sppsd: &MembershipReport, eigsps: &MembershipReport) -> &'static str {
    match (eigsps.verdict, sppsd.verdict) {
        (true, _) => "SpSm: yes (eigenspaces)",
        (false, true) => "SpSm: yes (kernel and its symplectic complement)",
        (false, false) => "SpSm: undetermined without certificate",
    }
}

#[derive(Clone, Debug)]
pub struct EigenspaceTriple {
    pub neg: Subspace,
    pub zero: Subspace,
    pub pos: Subspace,
    pub inertia: InertiaSignature,
    pub margin: f64,
}

pub fn eigenspace_split(a: &SymMatrix, rank_tol: f64) -> Result<EigenspaceTriple> {
    let eig = eigh(a.as_matrix())?;
    let s = eig.spectral_scale();
    let t = rank_tol * s;
    let margin = eig
        .eigenvalues
        .iter()
        .map(|&l| (l.abs() - t).abs() / s)
        .fold(f64::INFINITY, f64::min);
    Ok(EigenspaceTriple {
        neg: Subspace::from_orthonormal(eig.select(|l| l < -t)),
        zero: Subspace::from_orthonormal(eig.select(|l| l.abs() <= t)),
        pos: Subspace::from_orthonormal(eig.select(|l| l > t)),
        inertia: inertia_of(&eig, rank_tol),
        margin,
    })
}

fn symplecticity_record(name: &str, w: &Subspace, tol: &Tolerances) -> ConditionRecord {
    let margin = if w.dim() == 0 {
        1.0
    } else {
        symplectic_margin(w)
    };
    ConditionRecord::new(
        name,
        ExistenceCondition::I,
        margin,
        tol.symp_tol,
        Comparison::Above,
    )
}

/// `‖Q_1^T J Q_2‖_F` on orthonormal bases.
fn orthogonality_record(
    name: &str,
    w1: &Subspace,
    w2: &Subspace,
    tol: &Tolerances,
) -> ConditionRecord {
    let r = if w1.dim() == 0 || w2.dim() == 0 {
        0.0
    } else {
        form_matrix(w1.orthonormal_basis(), w2.orthonormal_basis()).norm()
    };
    ConditionRecord::new(
        name,
        ExistenceCondition::I,
        r,
        tol.check_tol,
        Comparison::AtMost,
    )
}

/// `‖(I - QQ^T) J A Q‖_F / (‖A‖_op ‖Q‖_F)`.
fn invariance_record(
    name: &str,
    a: &DMatrix<f64>,
    a_op: f64,
    w: &Subspace,
    tol: &Tolerances,
) -> ConditionRecord {
    let q = w.orthonormal_basis();
    let r = if w.dim() == 0 || a_op == 0.0 {
        0.0
    } else {
        let jaq = j_mul(&(a * q));
        let resid = &jaq - q * (q.transpose() * &jaq);
        resid.norm() / (a_op * q.norm())
    };
    ConditionRecord::new(
        name,
        ExistenceCondition::II,
        r,
        tol.check_tol,
        Comparison::AtMost,
    )
}

fn check_ambient(a: &SymMatrix, ws: &[&Subspace]) -> Result<()> {
    for w in ws {
        if w.ambient_dim() != a.dim() {
            return Err(Error::Dimension(format!(
                "subspace lives in R^{} but the matrix is {}x{}",
                w.ambient_dim(),
                a.dim(),
                a.dim()
            )));
        }
    }
    Ok(())
}

/// Conditions (i) and (ii) on a triple of subspaces.
fn structural_records(
    a: &SymMatrix,
    a_op: f64,
    ws: [&Subspace; 3],
    names: [&str; 3],
    tol: &Tolerances,
) -> Vec<ConditionRecord> {
    let mut out = Vec::new();
    for (w, name) in ws.iter().zip(names) {
        out.push(symplecticity_record(&format!("{name}_symplectic"), w, tol));
    }
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        out.push(orthogonality_record(
            &format!("{}_{}_symplectically_orthogonal", names[i], names[j]),
            ws[i],
            ws[j],
            tol,
        ));
    }
    for (w, name) in ws.iter().zip(names) {
        out.push(invariance_record(
            &format!("{name}_ja_invariant"),
            a.as_matrix(),
            a_op,
            w,
            tol,
        ));
    }
    out
}

/// Largest and smallest eigenvalue of `Q^T A Q` (`None` on the zero subspace).
fn restricted_extremes(a: &DMatrix<f64>, q: &DMatrix<f64>) -> Result<Option<(f64, f64)>> {
    if q.ncols() == 0 {
        return Ok(None);
    }
    let b = kernel::symmetrize(&(q.transpose() * a * q));
    let eig = eigh(&b)?;
    let k = eig.eigenvalues.len();
    Ok(Some((eig.eigenvalues[0], eig.eigenvalues[k - 1])))
}

fn spectral_scale(a: &SymMatrix) -> Result<(f64, f64)> {
    let eig = eigh(a.as_matrix())?;
    let op = eig.eigenvalues.iter().fold(0.0f64, |m, &l| m.max(l.abs()));
    Ok((eig.spectral_scale(), op))
}

/// Membership in the class whose sign-grouped eigenspaces satisfy
/// conditions (i) and (ii). Condition (iii) holds for eigenspaces by
/// construction and is recorded as such.
pub fn check_eigsps_membership(a: &SymMatrix, tol: &Tolerances) -> Result<MembershipReport> {
    let triple = eigenspace_split(a, tol.rank_tol)?;
    let (_, a_op) = spectral_scale(a)?;
    let mut records = structural_records(
        a,
        a_op,
        [&triple.neg, &triple.zero, &triple.pos],
        ["negative_eigenspace", "kernel", "positive_eigenspace"],
        tol,
    );
    records.push(ConditionRecord::new(
        "sign_definite_on_eigenspaces",
        ExistenceCondition::III,
        0.0,
        0.0,
        Comparison::AtMost,
    ));
    Ok(MembershipReport::from_records(
        MatrixClass::EigSpSm,
        records,
        triple.inertia,
        triple.margin,
    ))
}

/// Positive semidefinite with a symplectic (or trivial) kernel.
pub fn check_sppsd(a: &SymMatrix, tol: &Tolerances) -> Result<MembershipReport> {
    let triple = eigenspace_split(a, tol.rank_tol)?;
    let eig = eigh(a.as_matrix())?;
    let s = eig.spectral_scale();
    let lmin = eig.eigenvalues[0];
    let records = vec![
        ConditionRecord::new(
            "positive_semidefinite",
            ExistenceCondition::III,
            0.0 - lmin,
            tol.rank_tol * s,
            Comparison::AtMost,
        ),
        symplecticity_record("kernel_symplectic", &triple.zero, tol),
    ];
    Ok(MembershipReport::from_records(
        MatrixClass::SpPsd,
        records,
        triple.inertia,
        triple.margin,
    ))
}

/// Smallest eigenvalue above the zero threshold.
pub fn check_pd(a: &SymMatrix, tol: &Tolerances) -> Result<MembershipReport> {
    let triple = eigenspace_split(a, tol.rank_tol)?;
    let eig = eigh(a.as_matrix())?;
    let records = vec![ConditionRecord::new(
        "positive_definite",
        ExistenceCondition::III,
        eig.eigenvalues[0],
        tol.rank_tol * eig.spectral_scale(),
        Comparison::Above,
    )];
    Ok(MembershipReport::from_records(
        MatrixClass::Pd,
        records,
        triple.inertia,
        triple.margin,
    ))
}

/// Check a caller-supplied triple `(W-, W0, W+)` against conditions (i)-(iii).
pub fn verify_certificate(
    a: &SymMatrix,
    w_neg: &Subspace,
    w_zero: &Subspace,
    w_pos: &Subspace,
    tol: &Tolerances,
) -> Result<MembershipReport> {
    check_ambient(a, &[w_neg, w_zero, w_pos])?;
    let triple = eigenspace_split(a, tol.rank_tol)?;
    let (s, a_op) = spectral_scale(a)?;
    let am = a.as_matrix();
    let inertia = triple.inertia;

    let dim_mismatch = w_neg.dim().abs_diff(inertia.nu)
        + w_zero.dim().abs_diff(inertia.xi)
        + w_pos.dim().abs_diff(inertia.pi);
    let mut records = vec![ConditionRecord::new(
        "dimensions_match_inertia",
        ExistenceCondition::I,
        dim_mismatch as f64,
        0.0,
        Comparison::AtMost,
    )];
    records.extend(structural_records(
        a,
        a_op,
        [w_neg, w_zero, w_pos],
        ["w_neg", "w_zero", "w_pos"],
        tol,
    ));

    let t = tol.rank_tol * s;
    let (neg_r, neg_t) = match restricted_extremes(am, w_neg.orthonormal_basis())? {
        Some((_, hi)) => (hi, -t),
        None => (0.0, 0.0),
    };
    records.push(ConditionRecord::new(
        "negative_definite_on_w_neg",
        ExistenceCondition::III,
        neg_r,
        neg_t,
        Comparison::AtMost,
    ));
    let kernel_angle =
        principal_angle_sin(triple.zero.orthonormal_basis(), w_zero.orthonormal_basis());
    records.push(ConditionRecord::new(
        "w_zero_is_kernel",
        ExistenceCondition::III,
        kernel_angle,
        tol.check_tol,
        Comparison::AtMost,
    ));
    let (pos_r, pos_t) = match restricted_extremes(am, w_pos.orthonormal_basis())? {
        Some((lo, _)) => (-lo, -t),
        None => (0.0, 0.0),
    };
    records.push(ConditionRecord::new(
        "positive_definite_on_w_pos",
        ExistenceCondition::III,
        pos_r,
        pos_t,
        Comparison::AtMost,
    ));
    Ok(MembershipReport::from_records(
        MatrixClass::CertifiedSpSm,
        records,
        inertia,
        triple.margin,
    ))
}

/// Certificate given as three projections: pairwise products vanish, they
/// resolve the identity, each is idempotent, `A = Π-^T A Π- + Π+^T A Π+`, and
/// `Π∓^T A Π∓` is definite of the right sign on the range.
///
/// Takes raw matrices so that slightly wrong projections produce a report
/// instead of a construction error.
pub fn projection_certificate_matrices(
    a: &SymMatrix,
    p_neg: &DMatrix<f64>,
    p_zero: &DMatrix<f64>,
    p_pos: &DMatrix<f64>,
    tol: &Tolerances,
) -> Result<MembershipReport> {
    let m = a.dim();
    for p in [p_neg, p_zero, p_pos] {
        if p.shape() != (m, m) {
            return Err(Error::Dimension(format!(
                "projection is {}x{} but the matrix is {m}x{m}",
                p.nrows(),
                p.ncols()
            )));
        }
        kernel::check_finite(p)?;
    }
    let triple = eigenspace_split(a, tol.rank_tol)?;
    let (s, _) = spectral_scale(a)?;
    let am = a.as_matrix();
    let ps = [p_neg, p_zero, p_pos];
    let names = ["neg", "zero", "pos"];
    let mut records = Vec::new();

    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let r = (ps[i] * ps[j]).norm() / (1.0 + ps[i].norm() * ps[j].norm());
        records.push(ConditionRecord::new(
            format!("product_{}_{}_vanishes", names[i], names[j]),
            ExistenceCondition::I,
            r,
            tol.check_tol,
            Comparison::AtMost,
        ));
    }
    let total_norm: f64 = ps.iter().map(|p| p.norm()).sum();
    let resolution =
        (p_neg + p_zero + p_pos - DMatrix::<f64>::identity(m, m)).norm() / (1.0 + total_norm);
    records.push(ConditionRecord::new(
        "resolution_of_identity",
        ExistenceCondition::I,
        resolution,
        tol.check_tol,
        Comparison::AtMost,
    ));
    for (p, name) in ps.iter().zip(names) {
        let r = ((*p) * (*p) - (*p)).norm() / (1.0 + p.norm());
        records.push(ConditionRecord::new(
            format!("idempotent_{name}"),
            ExistenceCondition::I,
            r,
            tol.check_tol,
            Comparison::AtMost,
        ));
    }
    let rebuilt = p_neg.transpose() * am * p_neg + p_pos.transpose() * am * p_pos;
    records.push(ConditionRecord::new(
        "reconstruction",
        ExistenceCondition::II,
        (am - rebuilt).norm() / a.scale(),
        tol.check_tol,
        Comparison::AtMost,
    ));

    let t = tol.rank_tol * s;
    let restricted = |p: &DMatrix<f64>| -> Result<Option<(f64, f64)>> {
        let q = column_space(p, tol.rank_tol);
        let b = p.transpose() * am * p;
        restricted_extremes(&b, &q)
    };
    let (neg_r, neg_t) = match restricted(p_neg)? {
        Some((_, hi)) => (hi, -t),
        None => (0.0, 0.0),
    };
    records.push(ConditionRecord::new(
        "negative_definite_on_range_neg",
        ExistenceCondition::III,
        neg_r,
        neg_t,
        Comparison::AtMost,
    ));
    let (pos_r, pos_t) = match restricted(p_pos)? {
        Some((lo, _)) => (-lo, -t),
        None => (0.0, 0.0),
    };
    records.push(ConditionRecord::new(
        "positive_definite_on_range_pos",
        ExistenceCondition::III,
        pos_r,
        pos_t,
        Comparison::AtMost,
    ));
    Ok(MembershipReport::from_records(
        MatrixClass::CertifiedSpSm,
        records,
        triple.inertia,
        triple.margin,
    ))
}

pub fn projection_certificate(
    a: &SymMatrix,
    p_neg: &SymplecticOrthogonalProjection,
    p_zero: &SymplecticOrthogonalProjection,
    p_pos: &SymplecticOrthogonalProjection,
    tol: &Tolerances,
) -> Result<MembershipReport> {
    projection_certificate_matrices(a, p_neg.matrix(), p_zero.matrix(), p_pos.matrix(), tol)
}
