//! Dimension-generic vectors on the unit sphere and antipodal configurations.
//!
//! An antipodal configuration of 2d points on S^{d-1} is stored as d
//! representatives, one per antipodal pair; the negations are implicit, so
//! antipodality cannot be violated after construction.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{CrossError, Result};

/// Unit-norm slack after normalization.
pub const EPS_UNIT: f64 = 1e-10;
/// Relative smallest-singular-value threshold for rank checks.
pub const EPS_RANK: f64 = 1e-9;
/// Pairwise-dot threshold under which representatives count as orthonormal.
pub const EPS_ORTH: f64 = 1e-8;

/// A point of S^{d-1}, d >= 2, unit norm within [`EPS_UNIT`].
#[derive(Debug, Clone, PartialEq)]
pub struct UnitVector(DVector<f64>);

impl UnitVector {
    /// Wraps coordinates that are already unit within `eps`.
    pub fn try_new_with_eps(coords: DVector<f64>, eps: f64) -> Result<Self> {
        if coords.len() < 2 {
            return Err(CrossError::BadDimension(coords.len()));
        }
        let n2 = coords.norm_squared();
        if (n2 - 1.0).abs() > eps {
            return Err(CrossError::ZeroVector { norm: n2.sqrt() });
        }
        Ok(Self(coords))
    }

    pub fn try_new(coords: DVector<f64>) -> Result<Self> {
        Self::try_new_with_eps(coords, EPS_UNIT)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn dot(&self, other: &UnitVector) -> f64 {
        self.0.dot(&other.0)
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn neg(&self) -> UnitVector {
        UnitVector(-&self.0)
    }
}

/// Radial projection v -> v / |v|. Idempotent on unit vectors.
pub fn normalize(v: &DVector<f64>) -> Result<UnitVector> {
    let norm = v.norm();
    if norm <= 1e-14 {
        return Err(CrossError::ZeroVector { norm });
    }
    if v.len() < 2 {
        return Err(CrossError::BadDimension(v.len()));
    }
    Ok(UnitVector(v / norm))
}

/// 2d antipodal points {±y_1, ..., ±y_d} stored as the d representatives y_i.
#[derive(Debug, Clone)]
pub struct AntipodalConfig {
    representatives: Vec<UnitVector>,
}

impl AntipodalConfig {
    /// Builds a configuration from d representatives in R^d.
    ///
    /// Degenerate inputs (coincident or antiparallel representatives) are
    /// accepted here; exact downstream algorithms check general position.
    pub fn new(representatives: Vec<UnitVector>) -> Result<Self> {
        let d = representatives.len();
        if d < 2 {
            return Err(CrossError::BadDimension(d));
        }
        for y in &representatives {
            if y.dim() != d {
                return Err(CrossError::DimensionMismatch {
                    expected: d,
                    got: y.dim(),
                });
            }
        }
        Ok(Self { representatives })
    }

    pub fn dim(&self) -> usize {
        self.representatives.len()
    }

    pub fn representatives(&self) -> &[UnitVector] {
        &self.representatives
    }

    /// The full 2d-point set {±y_1, ..., ±y_d}.
    pub fn full_points(&self) -> Vec<UnitVector> {
        let mut pts = Vec::with_capacity(2 * self.dim());
        for y in &self.representatives {
            pts.push(y.clone());
        }
        for y in &self.representatives {
            pts.push(y.neg());
        }
        pts
    }

    /// d x d matrix whose columns are the representatives.
    pub fn rep_matrix(&self) -> DMatrix<f64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |i, j| self.representatives[j].coords()[i])
    }

    /// Ratio of smallest to largest singular value of the representative matrix.
    pub fn singular_ratio(&self) -> f64 {
        let svd = self.rep_matrix().svd(false, false);
        let max = svd.singular_values.max();
        let min = svd.singular_values.min();
        if max == 0.0 {
            0.0
        } else {
            min / max
        }
    }

    /// Largest |y_i . y_j| over i != j; zero exactly for orthonormal representatives.
    pub fn max_offdiag_dot(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in (i + 1)..d {
                worst = worst.max(self.representatives[i].dot(&self.representatives[j]).abs());
            }
        }
        worst
    }

    /// True when the representatives are pairwise orthonormal within [`EPS_ORTH`],
    /// i.e. the configuration is a regular cross-polytope.
    pub fn is_cross_polytope(&self) -> bool {
        self.max_offdiag_dot() <= EPS_ORTH
    }
}

/// True iff the representatives span R^d within [`EPS_RANK`]. For antipodal
/// configurations this is equivalent to the full 2d-point set not lying in a
/// hyperplane (such a hyperplane would have to pass through the origin).
pub fn is_general_position(cfg: &AntipodalConfig) -> bool {
    cfg.singular_ratio() > EPS_RANK
}

/// Vertices of the regular cross-polytope: representatives e_1, ..., e_d.
pub fn cross_polytope(d: usize) -> Result<AntipodalConfig> {
    if d < 2 {
        return Err(CrossError::BadDimension(d));
    }
    let reps = (0..d)
        .map(|i| {
            let mut v = DVector::zeros(d);
            v[i] = 1.0;
            UnitVector(v)
        })
        .collect();
    AntipodalConfig::new(reps)
}

/// Seeded ChaCha stream; every randomized routine in the crate derives its
/// stream this way so that results are a pure function of the seed.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One point drawn uniformly on S^{d-1} (normalized standard Gaussian).
pub fn random_unit_vector(d: usize, rng: &mut ChaCha8Rng) -> UnitVector {
    loop {
        let v = DVector::from_fn(d, |_, _| StandardNormal.sample(rng));
        if let Ok(u) = normalize(&v) {
            return u;
        }
    }
}

/// d representatives drawn independently and uniformly on S^{d-1};
/// deterministic for a fixed seed.
pub fn random_antipodal(d: usize, rng_seed: u64) -> Result<AntipodalConfig> {
    if d < 2 {
        return Err(CrossError::BadDimension(d));
    }
    let mut rng = seeded_rng(rng_seed);
    let reps = (0..d).map(|_| random_unit_vector(d, &mut rng)).collect();
    AntipodalConfig::new(reps)
}

/// Cross-polytope with the last representative rotated by `theta` in the
/// (first, last) coordinate plane. A one-parameter family leaving the
/// regular configuration; used to probe the uniqueness clauses.
pub fn perturbed_cross_polytope(d: usize, theta: f64) -> Result<AntipodalConfig> {
    let base = cross_polytope(d)?;
    let mut reps: Vec<UnitVector> = base.representatives().to_vec();
    let mut v = DVector::zeros(d);
    v[d - 1] = theta.cos();
    v[0] = theta.sin();
    reps[d - 1] = normalize(&v)?;
    AntipodalConfig::new(reps)
}

/// N arbitrary points on S^{d-1}, possibly coincident, possibly non-antipodal.
#[derive(Debug, Clone)]
pub struct GenericConfig {
    points: Vec<UnitVector>,
}

impl GenericConfig {
    pub fn new(points: Vec<UnitVector>) -> Result<Self> {
        if points.is_empty() {
            return Err(CrossError::Parse("empty configuration".into()));
        }
        let d = points[0].dim();
        for p in &points {
            if p.dim() != d {
                return Err(CrossError::DimensionMismatch {
                    expected: d,
                    got: p.dim(),
                });
            }
        }
        Ok(Self { points })
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn points(&self) -> &[UnitVector] {
        &self.points
    }
}

impl From<&AntipodalConfig> for GenericConfig {
    fn from(cfg: &AntipodalConfig) -> Self {
        GenericConfig {
            points: cfg.full_points(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn normalize_scaling() {
        let v = DVector::from_vec(vec![3.0, 4.0]);
        let u = normalize(&v).unwrap();
        assert_abs_diff_eq!(u.coords()[0], 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(u.coords()[1], 0.8, epsilon = 1e-15);
    }

    #[test]
    fn normalize_already_unit() {
        let v = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        let u = normalize(&v).unwrap();
        assert_eq!(u.coords(), &v);
    }

    #[test]
    fn normalize_symmetric() {
        let v = DVector::from_vec(vec![1.0, 1.0, 1.0, 1.0]);
        let u = normalize(&v).unwrap();
        for i in 0..4 {
            assert_abs_diff_eq!(u.coords()[i], 0.5, epsilon = 1e-15);
        }
    }

    #[test]
    fn normalize_zero_rejected() {
        let v = DVector::from_vec(vec![0.0, 1e-15]);
        assert!(matches!(normalize(&v), Err(CrossError::ZeroVector { .. })));
    }

    #[test]
    fn cross_polytope_general_position() {
        for d in 2..=16 {
            let cfg = cross_polytope(d).unwrap();
            assert!(is_general_position(&cfg), "d = {d}");
            assert!(cfg.is_cross_polytope());
        }
    }

    #[test]
    fn cross_polytope_pairwise_dots() {
        let cfg = cross_polytope(4).unwrap();
        let pts = cfg.full_points();
        assert_eq!(pts.len(), 8);
        for i in 0..8 {
            for j in 0..8 {
                if i == j {
                    continue;
                }
                let dot = pts[i].dot(&pts[j]);
                assert!(dot.abs() < 1e-15 || (dot + 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn rank_deficient_detected() {
        let e1 = normalize(&DVector::from_vec(vec![1.0, 0.0, 0.0])).unwrap();
        let e2 = normalize(&DVector::from_vec(vec![0.0, 1.0, 0.0])).unwrap();
        let mid = normalize(&DVector::from_vec(vec![1.0, 1.0, 0.0])).unwrap();
        let cfg = AntipodalConfig::new(vec![e1.clone(), e2.clone(), mid]).unwrap();
        assert!(!is_general_position(&cfg));

        // Tiny third component lifts the rank: smallest relative singular
        // value is about 7e-4, above EPS_RANK.
        let near = normalize(&DVector::from_vec(vec![1.0, 1.0, 1e-3])).unwrap();
        let cfg = AntipodalConfig::new(vec![e1, e2, near]).unwrap();
        assert!(is_general_position(&cfg));
        assert!(cfg.singular_ratio() > 1e-4);
    }

    #[test]
    fn random_antipodal_deterministic() {
        let a = random_antipodal(3, 42).unwrap();
        let b = random_antipodal(3, 42).unwrap();
        for (x, y) in a.representatives().iter().zip(b.representatives()) {
            assert_eq!(x.coords(), y.coords());
        }
    }

    #[test]
    fn random_antipodal_full_rank() {
        let cfg = random_antipodal(5, 7).unwrap();
        assert!(is_general_position(&cfg));
    }

    #[test]
    fn random_antipodal_unit_norm() {
        let cfg = random_antipodal(2, 1).unwrap();
        for y in cfg.representatives() {
            assert!((y.coords().norm_squared() - 1.0).abs() <= EPS_UNIT);
        }
    }
}
