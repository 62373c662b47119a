//! Seeded random instances with known symplectic spectra.
//!
//! The random source is Xoshiro256++ seeded through SplitMix64
//! (`seed_from_u64`). Uniform reals take the top 53 bits of a draw,
//! `(x >> 11) * 2^-53`. Gaussians use one Box-Muller transform per draw,
//! `sqrt(-2 ln(1 - u1)) cos(2π u2)`, discarding the sine branch. Matrices
//! are filled in column-major order.

use nalgebra::{Complex, DMatrix, QR};
use rand_core::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::classify::EigenspaceTriple;
use crate::engine::SymplecticSpectrum;
use crate::error::{Error, Result};
use crate::kernel::InertiaSignature;
use crate::symplectic::{Subspace, SymplecticFrame};
use crate::SymMatrix;

/// The crate's portable random stream.
#[derive(Clone, Debug)]
pub struct SeededRng {
    inner: Xoshiro256PlusPlus,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: Xoshiro256PlusPlus::seed_from_u64(seed),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer in `lo..=hi`.
    pub fn int_in(&mut self, lo: usize, hi: usize) -> usize {
        lo + (self.uniform() * (hi - lo + 1) as f64) as usize
    }

    /// Standard normal.
    pub fn gaussian(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    /// Log-uniform on `[lo, hi]`.
    pub fn log_uniform(&mut self, lo: f64, hi: f64) -> f64 {
        (lo.ln() + (hi.ln() - lo.ln()) * self.uniform()).exp()
    }

    pub fn gaussian_matrix(&mut self, rows: usize, cols: usize) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(rows, cols);
        for x in m.iter_mut() {
            *x = self.gaussian();
        }
        m
    }

    /// `(G + G^T) / √2` with `G` standard Gaussian.
    pub fn symmetric_gaussian(&mut self, dim: usize) -> DMatrix<f64> {
        let g = self.gaussian_matrix(dim, dim);
        (&g + g.transpose()) * std::f64::consts::FRAC_1_SQRT_2
    }
}

#[derive(Clone, Debug)]
pub struct GeneratorSpec {
    pub n: usize,
    /// Even entries summing to `2n`. Derived from `spectrum` when absent.
    pub signature: Option<InertiaSignature>,
    /// Prescribed `D`, length `n`.
    pub spectrum: Option<Vec<f64>>,
    pub seed: u64,
    /// Drawn magnitudes `|d_i|` are log-uniform on `[1, conditioning]`.
    pub conditioning: f64,
}

impl GeneratorSpec {
    pub fn with_signature(n: usize, signature: InertiaSignature, seed: u64) -> Self {
        Self {
            n,
            signature: Some(signature),
            spectrum: None,
            seed,
            conditioning: 10.0,
        }
    }

    pub fn with_spectrum(spectrum: Vec<f64>, seed: u64) -> Self {
        Self {
            n: spectrum.len(),
            signature: None,
            spectrum: Some(spectrum),
            seed,
            conditioning: 10.0,
        }
    }

    fn spectrum_signature(d: &[f64]) -> InertiaSignature {
        let neg = d.iter().filter(|&&x| x < 0.0).count();
        let zero = d.iter().filter(|&&x| x == 0.0).count();
        InertiaSignature::new(2 * neg, 2 * zero, 2 * (d.len() - neg - zero))
    }

    /// Checks consistency and returns the signature in force.
    pub fn validate(&self) -> Result<InertiaSignature> {
        if self.n == 0 {
            return Err(Error::InvalidSpec("n must be positive".into()));
        }
        if !(self.conditioning.is_finite() && self.conditioning >= 1.0) {
            return Err(Error::InvalidSpec(format!(
                "conditioning must be finite and >= 1, got {}",
                self.conditioning
            )));
        }
        let from_spectrum = match &self.spectrum {
            Some(d) => {
                if d.len() != self.n {
                    return Err(Error::InvalidSpec(format!(
                        "spectrum has {} values but n = {}",
                        d.len(),
                        self.n
                    )));
                }
                if d.iter().any(|x| !x.is_finite()) {
                    return Err(Error::InvalidSpec("spectrum values must be finite".into()));
                }
                Some(Self::spectrum_signature(d))
            }
            None => None,
        };
        let sig = match (self.signature, from_spectrum) {
            (Some(s), Some(t)) if s != t => {
                return Err(Error::InvalidSpec(format!(
                    "signature {s} disagrees with the spectrum's signature {t}"
                )))
            }
            (Some(s), _) => s,
            (None, Some(t)) => t,
            (None, None) => {
                return Err(Error::InvalidSpec(
                    "either a signature or a spectrum is required".into(),
                ))
            }
        };
        if !sig.all_even() || sig.dim() != 2 * self.n {
            return Err(Error::InvalidSpec(format!(
                "signature {sig} must have even entries summing to {}",
                2 * self.n
            )));
        }
        Ok(sig)
    }
}

/// `[[X, Y], [-Y, X]]` for a Haar-random unitary `X + ιY`.
pub fn random_orthosymplectic_with(n: usize, rng: &mut SeededRng) -> SymplecticFrame {
    let mut z = DMatrix::<Complex<f64>>::zeros(n, n);
    for x in z.iter_mut() {
        let re = rng.gaussian();
        let im = rng.gaussian();
        *x = Complex::new(re, im) * std::f64::consts::FRAC_1_SQRT_2;
    }
    let qr = QR::new(z);
    let r = qr.r();
    let mut q = qr.q();
    // Fix the phases so the distribution is Haar.
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex::new(1.0, 0.0)
        };
        for x in q.column_mut(j).iter_mut() {
            *x *= phase;
        }
    }
    let mut u = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let (x, y) = (q[(i, j)].re, q[(i, j)].im);
            u[(i, j)] = x;
            u[(i, n + j)] = y;
            u[(n + i, j)] = -y;
            u[(n + i, n + j)] = x;
        }
    }
    SymplecticFrame::new(u, 1e-10).expect("unitary embedding is symplectic")
}

pub fn random_orthosymplectic(n: usize, seed: u64) -> SymplecticFrame {
    random_orthosymplectic_with(n, &mut SeededRng::new(seed))
}

/// `U_1 (Λ ⊕ Λ^{-1}) U_2` with `Λ` log-uniform on `[1/spread, spread]`, so
/// the condition number is at most `spread²`.
pub fn random_symplectic(n: usize, seed: u64, spread: f64) -> SymplecticFrame {
    let mut rng = SeededRng::new(seed);
    let u1 = random_orthosymplectic_with(n, &mut rng);
    let u2 = random_orthosymplectic_with(n, &mut rng);
    let spread = spread.max(1.0);
    let mut mid = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        let l = rng.log_uniform(1.0 / spread, spread);
        mid[(i, i)] = l;
        mid[(n + i, n + i)] = 1.0 / l;
    }
    let m = u1.matrix() * mid * u2.matrix();
    SymplecticFrame::new(m, 1e-8).expect("product of symplectic matrices")
}

#[derive(Clone, Debug)]
pub struct EigSpSmInstance {
    pub a: SymMatrix,
    pub truth: SymplecticSpectrum,
    pub certificate: EigenspaceTriple,
}

/// `A = U (diag(d) ⊕ diag(d)) U^T` for an orthosymplectic `U`, with the
/// `U`-images of the coordinate pair spans as the eigenspace certificate.
pub fn assemble_eigsps(d: &[f64], u: &SymplecticFrame) -> Result<EigSpSmInstance> {
    let n = d.len();
    let um = u.matrix();
    if um.shape() != (2 * n, 2 * n) {
        return Err(Error::Dimension(format!(
            "frame is {}x{} for {n} values",
            um.nrows(),
            um.ncols()
        )));
    }
    let orth = (um.transpose() * um - DMatrix::<f64>::identity(2 * n, 2 * n)).norm();
    if orth > 1e-10 {
        return Err(Error::InvalidSpec(format!(
            "frame is not orthogonal (defect {orth:e})"
        )));
    }
    let mut scaled = um.clone();
    for (i, &di) in d.iter().enumerate() {
        scaled.column_mut(i).scale_mut(di);
        scaled.column_mut(n + i).scale_mut(di);
    }
    let a = SymMatrix::new(scaled * um.transpose())?;

    let group = |pred: &dyn Fn(f64) -> bool| -> Subspace {
        let idx: Vec<usize> = (0..n).filter(|&i| pred(d[i])).collect();
        let cols: Vec<usize> = idx
            .iter()
            .copied()
            .chain(idx.iter().map(|i| n + i))
            .collect();
        Subspace::from_orthonormal(um.select_columns(&cols))
    };
    let neg = group(&|x| x < 0.0);
    let zero = group(&|x| x == 0.0);
    let pos = group(&|x| x > 0.0);
    let inertia = InertiaSignature::new(neg.dim(), zero.dim(), pos.dim());
    let s = d.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let margin = d
        .iter()
        .map(|x| (x.abs() - crate::Tolerances::default().rank_tol * s).abs() / s)
        .fold(f64::INFINITY, f64::min);
    Ok(EigSpSmInstance {
        a,
        truth: SymplecticSpectrum::from_unsorted(d.to_vec()),
        certificate: EigenspaceTriple {
            neg,
            zero,
            pos,
            inertia,
            margin,
        },
    })
}

pub fn gen_eigsps(spec: &GeneratorSpec) -> Result<EigSpSmInstance> {
    let sig = spec.validate()?;
    let mut rng = SeededRng::new(spec.seed);
    let d = match &spec.spectrum {
        Some(d) => d.clone(),
        None => {
            let mut d = Vec::with_capacity(spec.n);
            for _ in 0..sig.nu / 2 {
                d.push(-rng.log_uniform(1.0, spec.conditioning));
            }
            d.extend(std::iter::repeat_n(0.0, sig.xi / 2));
            for _ in 0..sig.pi / 2 {
                d.push(rng.log_uniform(1.0, spec.conditioning));
            }
            d
        }
    };
    let u = random_orthosymplectic_with(spec.n, &mut rng);
    assemble_eigsps(&d, &u)
}

/// `t G + (1 - t) I` with `G = S^T S / ‖S^T S‖` and `t = (c - 1) / c`, so the
/// spectrum lies in `[1/c, 1]`.
pub fn gen_pd(n: usize, seed: u64, conditioning: f64) -> Result<SymMatrix> {
    if n == 0 {
        return Err(Error::InvalidSpec("n must be positive".into()));
    }
    if !(conditioning.is_finite() && conditioning >= 1.0) {
        return Err(Error::InvalidSpec(format!(
            "conditioning must be finite and >= 1, got {conditioning}"
        )));
    }
    let mut rng = SeededRng::new(seed);
    let s = rng.gaussian_matrix(2 * n, 2 * n);
    let sts = crate::kernel::symmetrize(&(s.transpose() * &s));
    let top = crate::kernel::sym_operator_norm(&sts)?;
    let t = (conditioning - 1.0) / conditioning;
    let g = if top > 0.0 {
        sts / top
    } else {
        DMatrix::zeros(2 * n, 2 * n)
    };
    SymMatrix::new(g * t + DMatrix::<f64>::identity(2 * n, 2 * n) * (1.0 - t))
}

/// Positive semidefinite with symplectic kernel of dimension `2n - rank`.
pub fn gen_sppsd(n: usize, rank: usize, seed: u64) -> Result<SymMatrix> {
    if !rank.is_multiple_of(2) || rank > 2 * n {
        return Err(Error::InvalidSpec(format!(
            "rank must be even and at most {}, got {rank}",
            2 * n
        )));
    }
    let spec = GeneratorSpec::with_signature(n, InertiaSignature::new(0, 2 * n - rank, rank), seed);
    Ok(gen_eigsps(&spec)?.a)
}

/// Symmetric matrix of dimension `dim` with `N(0, 1)` off-diagonal scale.
pub fn gen_symmetric(dim: usize, seed: u64) -> Result<SymMatrix> {
    SymMatrix::new(SeededRng::new(seed).symmetric_gaussian(dim))
}

/// `A + eps E` with `E` symmetric Gaussian, `‖E‖_F = 1`.
pub fn perturb(a: &SymMatrix, eps: f64, seed: u64) -> Result<SymMatrix> {
    if !eps.is_finite() {
        return Err(Error::InvalidSpec(format!("eps must be finite, got {eps}")));
    }
    let e = unit_direction(a.dim(), seed);
    SymMatrix::new(a.as_matrix() + e * eps)
}

/// The direction used by [`perturb`]: symmetric Gaussian, unit Frobenius norm.
pub fn unit_direction(dim: usize, seed: u64) -> DMatrix<f64> {
    let e = SeededRng::new(seed).symmetric_gaussian(dim);
    let f = e.norm();
    e / f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::symplectic_defect;

    #[test]
    fn rng_is_deterministic() {
        let a: Vec<u64> = {
            let mut r = SeededRng::new(7);
            (0..4).map(|_| r.next_u64()).collect()
        };
        let mut r = SeededRng::new(7);
        assert!(a.iter().all(|&x| x == r.next_u64()));
        let mut r = SeededRng::new(1);
        for _ in 0..1000 {
            let u = r.uniform();
            assert!((0.0..1.0).contains(&u));
            assert!(r.gaussian().is_finite());
        }
    }

    #[test]
    fn orthosymplectic_properties() {
        for n in 1..5 {
            for seed in 0..5 {
                let u = random_orthosymplectic(n, seed);
                let m = u.matrix();
                assert!(
                    (m.transpose() * m - DMatrix::<f64>::identity(2 * n, 2 * n)).norm() <= 1e-10
                );
                assert!(symplectic_defect(m) <= 1e-10);
                assert!((m.determinant() - 1.0).abs() < 1e-10);
            }
        }
        let u = random_orthosymplectic(1, 3);
        let m = u.matrix();
        assert!((m[(0, 0)] - m[(1, 1)]).abs() < 1e-15);
        assert!((m[(0, 1)] + m[(1, 0)]).abs() < 1e-15);
    }

    #[test]
    fn assemble_with_identity() {
        let inst = assemble_eigsps(&[-1.0, 4.0], &SymplecticFrame::identity(2)).unwrap();
        let expected =
            DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-1.0, 4.0, -1.0, 4.0]));
        assert_eq!(inst.a.as_matrix(), &expected);
        assert_eq!(inst.truth.values, vec![-1.0, 4.0]);
    }

    #[test]
    fn spec_validation() {
        assert!(
            GeneratorSpec::with_signature(2, InertiaSignature::new(1, 1, 2), 0)
                .validate()
                .is_err()
        );
        assert!(
            GeneratorSpec::with_signature(2, InertiaSignature::new(2, 0, 4), 0)
                .validate()
                .is_err()
        );
        let mut s = GeneratorSpec::with_spectrum(vec![-1.0, 2.0], 0);
        s.signature = Some(InertiaSignature::new(0, 0, 4));
        assert!(s.validate().is_err());
        assert!(gen_sppsd(2, 3, 0).is_err());
    }

    #[test]
    fn pd_generator() {
        let a = gen_pd(3, 11, 1.0).unwrap();
        assert!((a.as_matrix() - DMatrix::<f64>::identity(6, 6)).norm() < 1e-14);
        let a = gen_pd(3, 11, 50.0).unwrap();
        let e = crate::kernel::eigh(a.as_matrix()).unwrap().eigenvalues;
        assert!(e[0] >= 1.0 / 50.0 - 1e-12 && e[5] <= 1.0 + 1e-12);
    }

    #[test]
    fn sppsd_ranks() {
        assert_eq!(gen_sppsd(2, 0, 5).unwrap().frobenius(), 0.0);
        let a = gen_sppsd(2, 4, 5).unwrap();
        assert!(crate::kernel::eigh(a.as_matrix()).unwrap().eigenvalues[0] > 0.5);
    }

    #[test]
    fn perturb_norm() {
        let a = gen_symmetric(4, 2).unwrap();
        assert_eq!(perturb(&a, 0.0, 9).unwrap().as_matrix(), a.as_matrix());
        let b = perturb(&a, 0.25, 9).unwrap();
        assert!(((b.as_matrix() - a.as_matrix()).norm() - 0.25).abs() < 1e-12);
        assert_eq!(b.asymmetry(), 0.0);
    }
}
