//! Exact facet enumeration for the convex hull of an antipodal configuration
//! in general position.
//!
//! The boundary of the hull of {±y_1, ..., ±y_d} is the union of 2^d
//! (d-1)-simplices F_σ, σ ∈ {-1,+1}^d, with vertices {σ_i y_i}. Each F_σ
//! lies on a unique supporting hyperplane x·z_σ = a_σ with a_σ > 0, so the
//! whole facet structure comes from 2^{d-1} small linear solves plus
//! antipodal mirroring; no incremental hull algorithm is needed.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{CrossError, Result};
use crate::geom::{
    is_general_position, normalize, random_unit_vector, seeded_rng, AntipodalConfig, UnitVector,
};

/// Supporting-hyperplane slack.
pub const EPS_HULL: f64 = 1e-9;

/// One boundary simplex F_σ with its supporting hyperplane x·z_σ = a_σ.
///
/// Sign convention: bit i of `sigma_bitmask` set means σ_i = -1.
#[derive(Debug, Clone)]
pub struct Facet {
    pub sigma_bitmask: u64,
    pub normal: UnitVector,
    pub offset: f64,
}

impl Facet {
    pub fn signs(&self, d: usize) -> Vec<f64> {
        (0..d)
            .map(|i| if self.sigma_bitmask >> i & 1 == 1 { -1.0 } else { 1.0 })
            .collect()
    }

    /// Vertices σ_i y_i of the simplex.
    pub fn vertices(&self, cfg: &AntipodalConfig) -> Vec<UnitVector> {
        let signs = self.signs(cfg.dim());
        cfg.representatives()
            .iter()
            .zip(signs)
            .map(|(y, s)| if s < 0.0 { y.neg() } else { y.clone() })
            .collect()
    }
}

/// All 2^d facets of the hull, sorted by sign bitmask.
#[derive(Debug, Clone)]
pub struct HullStructure {
    pub config: AntipodalConfig,
    pub facets: Vec<Facet>,
}

impl HullStructure {
    /// The facet with the smallest offset; ties broken by smallest bitmask.
    pub fn min_offset_facet(&self) -> &Facet {
        self.facets
            .iter()
            .min_by(|a, b| {
                a.offset
                    .partial_cmp(&b.offset)
                    .unwrap()
                    .then(a.sigma_bitmask.cmp(&b.sigma_bitmask))
            })
            .expect("hull has facets")
    }
}

/// Enumerates the 2^d facets of the hull of an antipodal configuration.
///
/// For each σ the hyperplane through {σ_i y_i} is found by solving
/// (σ_i y_i)·w = 1 for all i; then z_σ = w/|w| and a_σ = 1/|w|. Only the
/// 2^{d-1} sign vectors with σ_d = +1 are solved; the rest are antipodal
/// mirrors (normal negated, offset unchanged).
pub fn enumerate_facets(cfg: &AntipodalConfig) -> Result<HullStructure> {
    let d = cfg.dim();
    if !is_general_position(cfg) {
        return Err(CrossError::NotGeneralPosition {
            sigma_ratio: cfg.singular_ratio(),
        });
    }
    // Rows of `basis` are the representatives y_i^T.
    let basis = cfg.rep_matrix().transpose();
    let half: u64 = 1 << (d - 1);
    let full_mask: u64 = (1 << d) - 1;

    let half_facets: Result<Vec<Facet>> = (0..half)
        .into_par_iter()
        .map(|mask| solve_facet(&basis, mask, d))
        .collect();
    let half_facets = half_facets?;

    let mut facets = Vec::with_capacity(1 << d);
    facets.extend(half_facets.iter().cloned());
    for f in &half_facets {
        facets.push(Facet {
            sigma_bitmask: !f.sigma_bitmask & full_mask,
            normal: f.normal.neg(),
            offset: f.offset,
        });
    }
    facets.sort_by_key(|f| f.sigma_bitmask);
    Ok(HullStructure {
        config: cfg.clone(),
        facets,
    })
}

fn solve_facet(basis: &DMatrix<f64>, mask: u64, d: usize) -> Result<Facet> {
    let signed = DMatrix::from_fn(d, d, |i, j| {
        let s = if mask >> i & 1 == 1 { -1.0 } else { 1.0 };
        s * basis[(i, j)]
    });
    let rhs = DVector::from_element(d, 1.0);
    let lu = signed.lu();
    let w = lu
        .solve(&rhs)
        .ok_or(CrossError::NotGeneralPosition { sigma_ratio: 0.0 })?;
    let norm = w.norm();
    let offset = 1.0 / norm;
    if !offset.is_finite() || offset <= 0.0 {
        return Err(CrossError::NumericalDegeneracy {
            sigma: mask,
            offset,
        });
    }
    Ok(Facet {
        sigma_bitmask: mask,
        normal: normalize(&w)?,
        offset,
    })
}

/// Samples uniform sphere points and checks that each lies in the cone of
/// exactly one facet simplex.
///
/// A sample x with basis coefficients c (solving Y c = x) lies in
/// cone(F_σ) for σ_i = sign(c_i), since the coefficients of x with respect
/// to {σ_i y_i} are |c_i| ≥ 0. Linear independence of the y_i forces any
/// other cone's coefficient vector to have a strictly negative entry, so σ
/// is the only candidate; containment is strict iff min_i |c_i| > ε_hull.
pub fn verify_boundary_cover(
    hull: &HullStructure,
    n_samples: usize,
    rng_seed: u64,
) -> Result<bool> {
    verify_boundary_cover_with_eps(hull, n_samples, rng_seed, EPS_HULL)
}

/// [`verify_boundary_cover`] with an explicit strict-containment slack.
pub fn verify_boundary_cover_with_eps(
    hull: &HullStructure,
    n_samples: usize,
    rng_seed: u64,
    eps: f64,
) -> Result<bool> {
    let cfg = &hull.config;
    let d = cfg.dim();
    if !is_general_position(cfg) {
        return Err(CrossError::NotGeneralPosition {
            sigma_ratio: cfg.singular_ratio(),
        });
    }
    let lu = cfg.rep_matrix().lu();
    let mut rng = seeded_rng(rng_seed);
    for _ in 0..n_samples {
        let x = random_unit_vector(d, &mut rng);
        let c = lu
            .solve(x.coords())
            .ok_or(CrossError::NotGeneralPosition {
                sigma_ratio: cfg.singular_ratio(),
            })?;
        let min_abs = c.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
        // Membership in the sign-matched cone holds with all coefficients
        // |c_i| >= 0 >= -eps; strict containment needs min |c_i| > eps.
        if min_abs <= eps {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{cross_polytope, random_antipodal, AntipodalConfig};
    use approx::assert_abs_diff_eq;
    use nalgebra::DVector;

    #[test]
    fn cross_polytope_d3_facets() {
        let hull = enumerate_facets(&cross_polytope(3).unwrap()).unwrap();
        assert_eq!(hull.facets.len(), 8);
        let inv_sqrt3 = 1.0 / 3.0f64.sqrt();
        for f in &hull.facets {
            assert_abs_diff_eq!(f.offset, inv_sqrt3, epsilon = 1e-12);
            for c in f.normal.coords() {
                assert_abs_diff_eq!(c.abs(), inv_sqrt3, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn cross_polytope_offsets_all_dims() {
        for d in 2..=8 {
            let hull = enumerate_facets(&cross_polytope(d).unwrap()).unwrap();
            assert_eq!(hull.facets.len(), 1 << d);
            for f in &hull.facets {
                assert_abs_diff_eq!(f.offset, 1.0 / (d as f64).sqrt(), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn skewed_d3_offset_matches_least_squares_oracle() {
        // Representatives e_1, e_2, (e_2 + e_3)/sqrt(2). Oracle: solve the
        // 3x3 system for the sigma = (+,+,+) hyperplane by hand-rolled
        // Cramer elimination and compare.
        let e1 = crate::geom::normalize(&DVector::from_vec(vec![1.0, 0.0, 0.0])).unwrap();
        let e2 = crate::geom::normalize(&DVector::from_vec(vec![0.0, 1.0, 0.0])).unwrap();
        let y3 = crate::geom::normalize(&DVector::from_vec(vec![0.0, 1.0, 1.0])).unwrap();
        let cfg = AntipodalConfig::new(vec![e1, e2, y3]).unwrap();
        let hull = enumerate_facets(&cfg).unwrap();
        let plus = hull
            .facets
            .iter()
            .find(|f| f.sigma_bitmask == 0)
            .unwrap();
        // w = (1, 1, sqrt(2) - 1) satisfies all three equations; a = 1/|w|.
        let w = DVector::from_vec(vec![1.0, 1.0, 2.0f64.sqrt() - 1.0]);
        let oracle = 1.0 / w.norm();
        assert_abs_diff_eq!(plus.offset, oracle, epsilon = 1e-12);
    }

    #[test]
    fn antipodal_mirror_symmetry() {
        let cfg = random_antipodal(4, 17).unwrap();
        let hull = enumerate_facets(&cfg).unwrap();
        let full_mask = (1u64 << 4) - 1;
        for f in &hull.facets {
            let mirror = hull
                .facets
                .iter()
                .find(|g| g.sigma_bitmask == (!f.sigma_bitmask & full_mask))
                .unwrap();
            assert_abs_diff_eq!(f.offset, mirror.offset, epsilon = 1e-12);
            for i in 0..4 {
                assert_abs_diff_eq!(
                    f.normal.coords()[i],
                    -mirror.normal.coords()[i],
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn supporting_hyperplane_property() {
        let cfg = random_antipodal(5, 23).unwrap();
        let hull = enumerate_facets(&cfg).unwrap();
        for f in &hull.facets {
            for p in cfg.full_points() {
                assert!(p.dot(&f.normal) <= f.offset + EPS_HULL);
            }
        }
    }

    #[test]
    fn facet_count_random_configs() {
        for d in 2..=8 {
            for seed in 0..100 {
                let cfg = random_antipodal(d, 1000 * d as u64 + seed).unwrap();
                let hull = enumerate_facets(&cfg).unwrap();
                assert_eq!(hull.facets.len(), 1 << d);
                for f in &hull.facets {
                    assert!(f.offset > 0.0);
                }
            }
        }
    }

    #[test]
    fn boundary_cover_cross_polytope() {
        let hull = enumerate_facets(&cross_polytope(4).unwrap()).unwrap();
        assert!(verify_boundary_cover(&hull, 100_000, 0).unwrap());
    }

    #[test]
    fn boundary_cover_random() {
        let cfg = random_antipodal(3, 5).unwrap();
        let hull = enumerate_facets(&cfg).unwrap();
        assert!(verify_boundary_cover(&hull, 100_000, 0).unwrap());
    }

    #[test]
    fn degenerate_rejected() {
        let e1 = crate::geom::normalize(&DVector::from_vec(vec![1.0, 0.0, 0.0])).unwrap();
        let e2 = crate::geom::normalize(&DVector::from_vec(vec![0.0, 1.0, 0.0])).unwrap();
        let mid = crate::geom::normalize(&DVector::from_vec(vec![1.0, 1.0, 0.0])).unwrap();
        let cfg = AntipodalConfig::new(vec![e1, e2, mid]).unwrap();
        assert!(matches!(
            enumerate_facets(&cfg),
            Err(CrossError::NotGeneralPosition { .. })
        ));
    }
}
