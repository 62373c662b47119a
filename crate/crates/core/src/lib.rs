//! Williamson-type symplectic diagonalization of real symmetric matrices.
//!
//! Given a real symmetric `2n x 2n` matrix `A`, a Williamson decomposition is a
//! symplectic `M` (`M^T J M = J`) together with a real diagonal `D` such that
//! `M^T A M = D ⊕ D`. The crate covers:
//!
//! * positive definite matrices (the classical case),
//! * positive semidefinite matrices with a symplectic kernel,
//! * the class whose sign-grouped eigenspaces are pairwise symplectically
//!   orthogonal symplectic subspaces invariant under `JA` ([`engine::williamson_eigsps`]),
//! * arbitrary symmetric matrices for which the caller supplies invariant
//!   subspaces as a certificate ([`engine::williamson_via_subspaces`]).
//!
//! Around the decompositions sit membership checks ([`classify`]), symplectic
//! projections ([`symplectic`]), perturbation bounds on the symplectic
//! spectrum ([`perturbation`]), seeded instance generators ([`generate`]) and
//! a plain-text matrix format ([`io`]).
//!
//! All numerical "is it zero" decisions go through one knob, the rank
//! tolerance in [`Tolerances`].

// `!(x > t)` is used on purpose so that NaN lands on the failing side.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classify;
pub mod engine;
pub mod error;
pub mod generate;
pub mod io;
pub mod kernel;
pub mod perturbation;
pub mod symplectic;

pub use error::{Error, ErrorCategory, Result};
pub use kernel::{InertiaSignature, NormKind, SymMatrix};

/// Tolerances threaded through every constructor and check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// An eigenvalue `λ` is zero iff `|λ| <= rank_tol * max(1, max|λ_i|)`.
    pub rank_tol: f64,
    /// Maximum `‖M^T J M - J‖_F` for a matrix to count as a symplectic frame,
    /// and the floor on `σ_min(Q^T J Q)` (orthonormal `Q`) for symplectic subspaces.
    pub symp_tol: f64,
    /// Threshold on normalized residuals in membership reports.
    pub check_tol: f64,
    /// Acceptance threshold on decomposition residuals, relative to `max(1, ‖A‖_F)`.
    pub decomp_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rank_tol: 1e-9,
            symp_tol: 1e-8,
            check_tol: 1e-7,
            decomp_tol: 1e-7,
        }
    }
}
