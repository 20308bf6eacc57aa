//! Strictly positive maps in Kraus form, `Φ(X) = Σ C_i* X C_i`.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matcore::{complex_gaussian, CMatrix, HermitianMatrix, PdMatrix};

/// Lower bound on the smallest eigenvalue of `Φ(I)`.
pub const POSITIVITY_FLOOR: f64 = 1e-8;
const MAX_RESAMPLES: usize = 16;

#[derive(Clone, Debug, PartialEq)]
pub struct PositiveMap {
    in_dim: usize,
    out_dim: usize,
    kraus: Vec<CMatrix>,
    unit_image_min_eig: f64,
}

impl PositiveMap {
    /// Each Kraus operator is `in_dim x out_dim`.
    pub fn new(kraus: Vec<CMatrix>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::InvalidMap("at least one Kraus operator is required".into()))?;
        let (m, k) = first.shape();
        if m == 0 || k == 0 {
            return Err(Error::InvalidMap(
                "Kraus operators must be non-empty".into(),
            ));
        }
        if let Some(bad) = kraus.iter().find(|c| c.shape() != (m, k)) {
            return Err(Error::InvalidMap(format!(
                "Kraus operators must share shape {m}x{k}, found {}x{}",
                bad.nrows(),
                bad.ncols()
            )));
        }
        let mut map = Self {
            in_dim: m,
            out_dim: k,
            kraus,
            unit_image_min_eig: 0.0,
        };
        let min_eig = map.unit_image()?.min_eigenvalue()?;
        if !(min_eig > POSITIVITY_FLOOR) {
            return Err(Error::Certificate(min_eig));
        }
        map.unit_image_min_eig = min_eig;
        Ok(map)
    }

    pub fn identity(n: usize) -> Self {
        Self::new(vec![CMatrix::identity(n, n)]).expect("identity map is strictly positive")
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    /// Smallest eigenvalue of `Φ(I)`, the strict-positivity certificate.
    pub fn certificate(&self) -> f64 {
        self.unit_image_min_eig
    }

    /// `Φ(I) = Σ C_i* C_i`.
    pub fn unit_image(&self) -> Result<HermitianMatrix> {
        let mut acc = CMatrix::zeros(self.out_dim, self.out_dim);
        for c in &self.kraus {
            acc += c.adjoint() * c;
        }
        HermitianMatrix::new(acc)
    }

    pub fn apply(&self, x: &HermitianMatrix) -> Result<HermitianMatrix> {
        if x.dim() != self.in_dim {
            return Err(Error::DimensionMismatch {
                expected: self.in_dim,
                found: x.dim(),
            });
        }
        let mut acc = CMatrix::zeros(self.out_dim, self.out_dim);
        for c in &self.kraus {
            acc += c.adjoint() * x.entries() * c;
        }
        HermitianMatrix::new(acc)
    }

    pub fn apply_pd(&self, x: &PdMatrix) -> Result<PdMatrix> {
        self.apply(x.as_hermitian())?.to_pd()
    }

    /// Seeded complex Gaussian Kraus family scaled so that `‖Φ(I)‖ = 1`.
    pub fn random(m: usize, k: usize, num_kraus: usize, seed: u64) -> Result<Self> {
        if m == 0 || k == 0 || num_kraus == 0 {
            return Err(Error::InvalidMap(
                "dimensions and Kraus count must be positive".into(),
            ));
        }
        if num_kraus * m < k {
            return Err(Error::InvalidMap(format!(
                "{num_kraus} Kraus operators of size {m}x{k} cannot give a full-rank Φ(I)"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut last = 0.0;
        for _ in 0..MAX_RESAMPLES {
            let kraus: Vec<CMatrix> = (0..num_kraus)
                .map(|_| complex_gaussian(&mut rng, m, k))
                .collect();
            let raw = Self {
                in_dim: m,
                out_dim: k,
                kraus,
                unit_image_min_eig: 0.0,
            };
            let norm = raw.unit_image()?.max_eigenvalue()?;
            let s = Complex64::new(norm.sqrt().recip(), 0.0);
            let scaled = raw.kraus.into_iter().map(|c| c * s).collect();
            match Self::new(scaled) {
                Ok(map) => return Ok(map),
                Err(Error::Certificate(v)) => last = v,
                Err(e) => return Err(e),
            }
        }
        Err(Error::Certificate(last))
    }

    /// Right-multiplies every Kraus operator by `Φ(I)^{-1/2}`, making the
    /// family satisfy `Σ C_i* C_i = I`.
    pub fn normalize_unital(&self) -> Result<Self> {
        let correction = self.unit_image()?.to_pd()?.inv_sqrt()?;
        let kraus = self
            .kraus
            .iter()
            .map(|c| c * correction.as_hermitian().entries())
            .collect();
        Self::new(kraus)
    }

    /// `‖Σ C_i* C_i - I‖_F`.
    pub fn unitality_defect(&self) -> Result<f64> {
        self.unit_image()?
            .frobenius_distance(&HermitianMatrix::identity(self.out_dim))
    }

    /// The map `X ↦ Φ(U X U*)`, i.e. Kraus operators `U* C_i`.
    pub fn precompose_unitary(&self, u: &CMatrix) -> Result<Self> {
        if u.shape() != (self.in_dim, self.in_dim) {
            return Err(Error::DimensionMismatch {
                expected: self.in_dim,
                found: u.nrows(),
            });
        }
        Self::new(self.kraus.iter().map(|c| u.adjoint() * c).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::random_pd;

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[test]
    fn identity_map_is_identity() {
        let x = random_pd(3, 1, (0.1, 10.0)).unwrap();
        let y = PositiveMap::identity(3).apply(x.as_hermitian()).unwrap();
        assert!(y.frobenius_distance(x.as_hermitian()).unwrap() < 1e-15);
    }

    #[test]
    fn pinching_map() {
        let e1 = CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(0.0)]);
        let e2 = CMatrix::from_row_slice(2, 2, &[c(0.0), c(0.0), c(0.0), c(1.0)]);
        let pinch = PositiveMap::new(vec![e1, e2]).unwrap();
        let x = HermitianMatrix::new(CMatrix::from_row_slice(
            2,
            2,
            &[
                c(2.0),
                Complex64::new(1.0, 1.0),
                Complex64::new(1.0, -1.0),
                c(5.0),
            ],
        ))
        .unwrap();
        let y = pinch.apply(&x).unwrap();
        let expected = HermitianMatrix::from_diagonal(&[2.0, 5.0]).unwrap();
        assert!(y.frobenius_distance(&expected).unwrap() < 1e-15);
    }

    #[test]
    fn trace_map_from_basis_vectors() {
        let e1 = CMatrix::from_row_slice(2, 1, &[c(1.0), c(0.0)]);
        let e2 = CMatrix::from_row_slice(2, 1, &[c(0.0), c(1.0)]);
        let tr = PositiveMap::new(vec![e1, e2]).unwrap();
        let x = HermitianMatrix::from_diagonal(&[3.0, 4.0]).unwrap();
        assert!((tr.apply(&x).unwrap().trace(false) - 7.0).abs() < 1e-15);
    }

    #[test]
    fn random_map_examples() {
        let a = PositiveMap::random(3, 2, 2, 7).unwrap();
        let b = PositiveMap::random(3, 2, 2, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.certificate() > POSITIVITY_FLOOR);
        assert!((a.unit_image().unwrap().max_eigenvalue().unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(
            PositiveMap::random(2, 4, 1, 0),
            Err(Error::InvalidMap(_))
        ));
    }

    #[test]
    fn random_map_preserves_positivity() {
        let x = random_pd(4, 2, (0.1, 10.0)).unwrap();
        let map = PositiveMap::random(4, 3, 2, 3).unwrap();
        assert!(
            map.apply(x.as_hermitian())
                .unwrap()
                .min_eigenvalue()
                .unwrap()
                > 0.0
        );
    }

    #[test]
    fn rejects_inconsistent_or_degenerate_families() {
        assert!(PositiveMap::new(vec![]).is_err());
        let a = CMatrix::identity(2, 2);
        let b = CMatrix::identity(3, 3);
        assert!(matches!(
            PositiveMap::new(vec![a, b]),
            Err(Error::InvalidMap(_))
        ));
        // rank-one Φ(I) on a 2-dim output
        let v = CMatrix::from_row_slice(1, 2, &[c(1.0), c(0.0)]);
        assert!(matches!(
            PositiveMap::new(vec![v]),
            Err(Error::Certificate(_))
        ));
        let map = PositiveMap::identity(2);
        assert!(map.apply(&HermitianMatrix::identity(3)).is_err());
    }

    #[test]
    fn normalize_unital_examples() {
        let id = PositiveMap::identity(3);
        let n = id.normalize_unital().unwrap();
        for (a, b) in n.kraus().iter().zip(id.kraus()) {
            assert!((a - b).norm() < 1e-12);
        }

        let two = PositiveMap::new(vec![CMatrix::identity(2, 2) * c(2.0)]).unwrap();
        let n = two.normalize_unital().unwrap();
        assert!((&n.kraus()[0] - CMatrix::identity(2, 2)).norm() < 1e-12);

        let map = PositiveMap::random(3, 3, 3, 11).unwrap();
        let n = map.normalize_unital().unwrap();
        assert!(n.unitality_defect().unwrap() <= 1e-10);
        let again = n.normalize_unital().unwrap();
        for (a, b) in again.kraus().iter().zip(n.kraus()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn apply_is_linear() {
        let map = PositiveMap::random(3, 2, 2, 5).unwrap();
        let x = random_pd(3, 1, (0.1, 10.0)).unwrap().into_hermitian();
        let y = random_pd(3, 2, (0.1, 10.0)).unwrap().into_hermitian();
        let (alpha, beta) = (0.7, -2.3);
        let lhs = map
            .apply(&x.scale(alpha).add(&y.scale(beta)).unwrap())
            .unwrap();
        let rhs = map
            .apply(&x)
            .unwrap()
            .scale(alpha)
            .add(&map.apply(&y).unwrap().scale(beta))
            .unwrap();
        assert!(lhs.frobenius_distance(&rhs).unwrap() <= 1e-10);
    }
}
