#![allow(dead_code)]

use nalgebra::DMatrix;
use williamson_core::generate::{gen_eigsps, EigSpSmInstance, GeneratorSpec, SeededRng};
use williamson_core::{InertiaSignature, SymMatrix};

/// Random signature with even entries summing to `2n`.
pub fn random_signature(n: usize, rng: &mut SeededRng) -> InertiaSignature {
    let neg = rng.int_in(0, n);
    let zero = rng.int_in(0, n - neg);
    InertiaSignature::new(2 * neg, 2 * zero, 2 * (n - neg - zero))
}

pub fn eigsps_instance(seed: u64) -> EigSpSmInstance {
    let mut rng = SeededRng::new(seed ^ 0x5eed_0000);
    let n = rng.int_in(1, 6);
    let sig = random_signature(n, &mut rng);
    let mut spec = GeneratorSpec::with_signature(n, sig, seed);
    spec.conditioning = rng.log_uniform(1.0, 100.0);
    gen_eigsps(&spec).expect("valid spec")
}

/// Random definite 2x2 matrix with eigenvalues of one sign.
pub fn definite_2x2(seed: u64) -> SymMatrix {
    let mut rng = SeededRng::new(seed);
    let sign = if rng.uniform() < 0.5 { -1.0 } else { 1.0 };
    let l1 = rng.log_uniform(1e-2, 1e2);
    let l2 = rng.log_uniform(1e-2, 1e2);
    let t = rng.uniform_in(0.0, std::f64::consts::PI);
    let (c, s) = (t.cos(), t.sin());
    let r = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
    let d = DMatrix::from_row_slice(2, 2, &[sign * l1, 0.0, 0.0, sign * l2]);
    SymMatrix::new(&r * d * r.transpose()).unwrap()
}

/// Random psd matrix, rank-deficient about a third of the time.
pub fn random_psd(dim: usize, rng: &mut SeededRng) -> DMatrix<f64> {
    let k = if rng.uniform() < 0.33 {
        rng.int_in(0, dim)
    } else {
        dim
    };
    let g = rng.gaussian_matrix(dim, k);
    let m = &g * g.transpose();
    (&m + m.transpose()) * 0.5
}

/// `a` and `b` agree entrywise within `eps` after sorting.
pub fn multiset_close(a: &[f64], b: &[f64], eps: f64) -> bool {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    x.len() == y.len() && x.iter().zip(&y).all(|(p, q)| (p - q).abs() <= eps)
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    if x.len() != y.len() {
        return f64::INFINITY;
    }
    x.iter()
        .zip(&y)
        .map(|(p, q)| (p - q).abs())
        .fold(0.0, f64::max)
}
