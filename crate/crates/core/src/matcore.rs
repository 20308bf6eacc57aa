//! Complex Hermitian linear algebra.
//!
//! Everything downstream works through [`HermitianMatrix`] and its positive
//! definite refinement [`PdMatrix`]. Functional calculus goes through the
//! spectral decomposition, which is computed once per matrix and cached.

use std::fmt;
use std::sync::OnceLock;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Eigenvalues at or below this value are rejected by functional calculus on (0, inf).
pub const EIGEN_FLOOR: f64 = 1e-12;

/// Largest admissible `hi / lo` ratio for [`random_pd`].
pub const CONDITION_CAP: f64 = 1e6;

const EIGEN_EPS: f64 = 1e-15;
const EIGEN_MAX_ITER: usize = 10_000;

#[derive(Clone)]
pub struct HermitianMatrix {
    entries: CMatrix,
    spectrum: OnceLock<SpectralDecomposition>,
}

impl fmt::Debug for HermitianMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HermitianMatrix")
            .field("dim", &self.dim())
            .field("entries", &self.entries)
            .finish()
    }
}

impl PartialEq for HermitianMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

impl HermitianMatrix {
    /// Wraps a square matrix, replacing it by its Hermitian part `(M + M*)/2`.
    pub fn new(entries: CMatrix) -> Result<Self> {
        let (rows, cols) = entries.shape();
        if rows != cols || rows == 0 {
            return Err(Error::NotSquare { rows, cols });
        }
        Ok(Self::hermitian_part(entries))
    }

    fn hermitian_part(m: CMatrix) -> Self {
        let adj = m.adjoint();
        Self {
            entries: (m + adj).scale(0.5),
            spectrum: OnceLock::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        assert!(n >= 1, "dimension must be at least 1");
        Self::hermitian_part(CMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "dimension must be at least 1");
        Self::hermitian_part(CMatrix::zeros(n, n))
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::NotSquare { rows: 0, cols: 0 });
        }
        let n = diag.len();
        let m = CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(diag[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Ok(Self::hermitian_part(m))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    /// Cached spectral decomposition.
    pub fn spectrum(&self) -> Result<&SpectralDecomposition> {
        if let Some(s) = self.spectrum.get() {
            return Ok(s);
        }
        let s = eigh(self)?;
        let _ = self.spectrum.set(s);
        Ok(self.spectrum.get().expect("spectrum was just set"))
    }

    pub fn eigenvalues(&self) -> Result<&[f64]> {
        Ok(&self.spectrum()?.eigenvalues)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.spectrum()?.eigenvalues[0])
    }

    pub fn max_eigenvalue(&self) -> Result<f64> {
        Ok(*self.spectrum()?.eigenvalues.last().expect("dim >= 1"))
    }

    /// Largest absolute eigenvalue.
    pub fn spectral_norm(&self) -> Result<f64> {
        let ev = self.eigenvalues()?;
        Ok(ev[0].abs().max(ev[ev.len() - 1].abs()))
    }

    pub fn trace(&self, normalized: bool) -> f64 {
        let t: f64 = self.entries.diagonal().iter().map(|z| z.re).sum();
        if normalized {
            t / self.dim() as f64
        } else {
            t
        }
    }

    fn check_dim(&self, other: &HermitianMatrix) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &HermitianMatrix) -> Result<HermitianMatrix> {
        self.check_dim(other)?;
        Ok(Self::hermitian_part(&self.entries + &other.entries))
    }

    pub fn sub(&self, other: &HermitianMatrix) -> Result<HermitianMatrix> {
        self.check_dim(other)?;
        Ok(Self::hermitian_part(&self.entries - &other.entries))
    }

    pub fn scale(&self, alpha: f64) -> HermitianMatrix {
        Self::hermitian_part(self.entries.scale(alpha))
    }

    /// `(self + other) / 2`.
    pub fn midpoint(&self, other: &HermitianMatrix) -> Result<HermitianMatrix> {
        self.check_dim(other)?;
        Ok(Self::hermitian_part(
            (&self.entries + &other.entries).scale(0.5),
        ))
    }

    /// `C* X C` for a (possibly rectangular) `C` with `dim(X)` rows.
    pub fn congruence(&self, c: &CMatrix) -> Result<HermitianMatrix> {
        if c.nrows() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: c.nrows(),
            });
        }
        Ok(Self::hermitian_part(c.adjoint() * &self.entries * c))
    }

    /// `S X S` for Hermitian `S`.
    pub fn sandwich(&self, s: &HermitianMatrix) -> Result<HermitianMatrix> {
        self.check_dim(s)?;
        Ok(Self::hermitian_part(
            &s.entries * &self.entries * &s.entries,
        ))
    }

    /// Real part of the Hilbert-Schmidt inner product `Tr(self * other)`.
    pub fn inner(&self, other: &HermitianMatrix) -> Result<f64> {
        self.check_dim(other)?;
        Ok(self.entries.dotc(&other.entries).re)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.norm()
    }

    pub fn frobenius_distance(&self, other: &HermitianMatrix) -> Result<f64> {
        self.check_dim(other)?;
        Ok((&self.entries - &other.entries).norm())
    }

    /// Certifies positive definiteness.
    pub fn to_pd(&self) -> Result<PdMatrix> {
        PdMatrix::new(self.clone())
    }

    /// Applies a real function to the spectrum without any domain restriction.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> Result<HermitianMatrix> {
        let s = self.spectrum()?;
        let values: Vec<f64> = s.eigenvalues.iter().map(|&l| f(l)).collect();
        Ok(s.rebuild(&values))
    }
}

#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Columns are the matching orthonormal eigenvectors.
    pub unitary: CMatrix,
}

impl SpectralDecomposition {
    /// `U diag(values) U*`.
    pub fn rebuild(&self, values: &[f64]) -> HermitianMatrix {
        let mut scaled = self.unitary.clone();
        for (j, &v) in values.iter().enumerate() {
            scaled.column_mut(j).scale_mut(v);
        }
        HermitianMatrix::hermitian_part(scaled * self.unitary.adjoint())
    }

    pub fn reconstruct(&self) -> HermitianMatrix {
        self.rebuild(&self.eigenvalues)
    }
}

/// Spectral decomposition with eigenvalues sorted ascending.
pub fn eigh(h: &HermitianMatrix) -> Result<SpectralDecomposition> {
    let n = h.dim();
    let norm = h.frobenius_norm();
    if !norm.is_finite() {
        return Err(Error::NonConvergence { dim: n, norm });
    }
    let eig = SymmetricEigen::try_new(h.entries.clone(), EIGEN_EPS, EIGEN_MAX_ITER)
        .ok_or(Error::NonConvergence { dim: n, norm })?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let unitary = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(SpectralDecomposition {
        eigenvalues,
        unitary,
    })
}

/// A Hermitian matrix certified positive definite.
#[derive(Clone, Debug, PartialEq)]
pub struct PdMatrix {
    herm: HermitianMatrix,
    min_eig: f64,
}

impl PdMatrix {
    pub fn new(herm: HermitianMatrix) -> Result<Self> {
        let min_eig = herm.min_eigenvalue()?;
        if !(min_eig > 0.0) {
            return Err(Error::NotPositiveDefinite(min_eig));
        }
        Ok(Self { herm, min_eig })
    }

    pub fn from_entries(entries: CMatrix) -> Result<Self> {
        Self::new(HermitianMatrix::new(entries)?)
    }

    pub fn identity(n: usize) -> Self {
        Self::new(HermitianMatrix::identity(n)).expect("identity is positive definite")
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(HermitianMatrix::from_diagonal(diag)?)
    }

    pub fn dim(&self) -> usize {
        self.herm.dim()
    }

    pub fn min_eig(&self) -> f64 {
        self.min_eig
    }

    pub fn as_hermitian(&self) -> &HermitianMatrix {
        &self.herm
    }

    pub fn into_hermitian(self) -> HermitianMatrix {
        self.herm
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self
            .herm
            .spectrum
            .get()
            .expect("certified matrices carry their spectrum")
            .eigenvalues
    }

    pub fn trace(&self, normalized: bool) -> f64 {
        self.herm.trace(normalized)
    }

    pub fn inverse(&self) -> Result<PdMatrix> {
        func_calc(self, |x| x.recip())?.to_pd()
    }

    pub fn sqrt(&self) -> Result<PdMatrix> {
        func_calc(self, f64::sqrt)?.to_pd()
    }

    pub fn inv_sqrt(&self) -> Result<PdMatrix> {
        func_calc(self, |x| x.sqrt().recip())?.to_pd()
    }

    /// `S^{1/2} X S^{1/2}` style products stay PD when `s` is PD.
    pub fn sandwich(&self, s: &PdMatrix) -> Result<PdMatrix> {
        self.herm.sandwich(&s.herm)?.to_pd()
    }
}

impl AsRef<HermitianMatrix> for PdMatrix {
    fn as_ref(&self) -> &HermitianMatrix {
        &self.herm
    }
}

/// `U diag(f(λ)) U*` for `A` with spectrum strictly above [`EIGEN_FLOOR`].
pub fn func_calc(a: &PdMatrix, f: impl Fn(f64) -> f64) -> Result<HermitianMatrix> {
    func_calc_with(a, |x| Ok(f(x)))
}

/// Fallible variant of [`func_calc`].
pub fn func_calc_with(a: &PdMatrix, f: impl Fn(f64) -> Result<f64>) -> Result<HermitianMatrix> {
    let s = a.herm.spectrum()?;
    let mut values = Vec::with_capacity(s.eigenvalues.len());
    for (index, &value) in s.eigenvalues.iter().enumerate() {
        if value <= EIGEN_FLOOR {
            return Err(Error::Domain {
                index,
                value,
                floor: EIGEN_FLOOR,
            });
        }
        let y = f(value)?;
        if !y.is_finite() {
            return Err(Error::NonFinite(value));
        }
        values.push(y);
    }
    Ok(s.rebuild(&values))
}

pub fn trace(h: &HermitianMatrix, normalized: bool) -> f64 {
    h.trace(normalized)
}

/// `A ▽ B = (A + B) / 2`.
pub fn mean_arith(a: &PdMatrix, b: &PdMatrix) -> Result<PdMatrix> {
    a.herm.midpoint(&b.herm)?.to_pd()
}

/// `A ! B = 2 (A^{-1} + B^{-1})^{-1}`.
pub fn mean_harm(a: &PdMatrix, b: &PdMatrix) -> Result<PdMatrix> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    mean_arith(&a.inverse()?, &b.inverse()?)?.inverse()
}

/// `A <= B` in the Löwner order, up to `tol`.
pub fn loewner_leq(a: &HermitianMatrix, b: &HermitianMatrix, tol: f64) -> Result<bool> {
    Ok(b.sub(a)?.min_eigenvalue()? >= -tol)
}

/// `n x n` matrix of i.i.d. standard complex Gaussians (real and imaginary
/// parts each N(0, 1/2)).
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * s, im * s)
    })
}

/// Haar-distributed unitary via QR of a complex Gaussian matrix with the
/// phases of `R`'s diagonal absorbed into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let qr = complex_gaussian(rng, n, n).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for v in q.column_mut(j).iter_mut() {
            *v *= phase;
        }
    }
    q
}

fn check_eig_range(lo: f64, hi: f64) -> Result<()> {
    if !(lo > 0.0 && lo.is_finite() && hi.is_finite()) {
        return Err(Error::InvalidRange {
            lo,
            hi,
            reason: "bounds must be finite and positive",
        });
    }
    if !(lo < hi) {
        return Err(Error::InvalidRange {
            lo,
            hi,
            reason: "lower bound must be below upper bound",
        });
    }
    if hi / lo > CONDITION_CAP {
        return Err(Error::InvalidRange {
            lo,
            hi,
            reason: "condition number exceeds 1e6",
        });
    }
    Ok(())
}

/// Random PD matrix `Q diag(λ) Q*` with log-uniform eigenvalues in `[lo, hi]`.
pub fn random_pd(n: usize, seed: u64, eig_range: (f64, f64)) -> Result<PdMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_pd_with(&mut rng, n, eig_range)
}

pub fn random_pd_with<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    (lo, hi): (f64, f64),
) -> Result<PdMatrix> {
    check_eig_range(lo, hi)?;
    if n == 0 {
        return Err(Error::NotSquare { rows: 0, cols: 0 });
    }
    let q = random_unitary(rng, n);
    let (llo, lhi) = (lo.ln(), hi.ln());
    let lambdas: Vec<f64> = (0..n)
        .map(|_| {
            (llo + (lhi - llo) * rng.random::<f64>())
                .exp()
                .clamp(lo, hi)
        })
        .collect();
    let mut scaled = q.clone();
    for (j, &l) in lambdas.iter().enumerate() {
        scaled.column_mut(j).scale_mut(l);
    }
    PdMatrix::new(HermitianMatrix::hermitian_part(scaled * q.adjoint()))
}
