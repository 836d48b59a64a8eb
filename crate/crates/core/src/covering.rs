//! Covering quantities: the dot-product mesh measure η(ω, S^{d-1}) and the
//! mesh norm ρ(ω, S^{d-1}) = sqrt(2 - 2η).
//!
//! For antipodal configurations in general position η is computed exactly
//! from the hull facet offsets; arbitrary configurations fall back to a
//! sampled upper-bound estimator with local refinement.

use nalgebra::DVector;

use crate::error::{CrossError, Result};
use crate::geom::{
    is_general_position, normalize, random_unit_vector, seeded_rng, AntipodalConfig,
    GenericConfig, UnitVector,
};
use crate::hull::enumerate_facets;

/// Slack added to the 1/sqrt(d) bound check to absorb roundoff.
pub const EPS_BOUND: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoveringMethod {
    ExactFacet,
    Sampled,
}

/// η, ρ and a deepest-hole witness attaining the min-max.
#[derive(Debug, Clone)]
pub struct CoveringReport {
    pub eta: f64,
    pub rho: f64,
    pub witness: UnitVector,
    pub method: CoveringMethod,
    pub tolerance: f64,
}

/// Maximum dot product of `x` with the configuration points.
pub fn max_dot(cfg: &GenericConfig, x: &UnitVector) -> f64 {
    cfg.points()
        .iter()
        .map(|p| p.dot(x))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Exact η for an antipodal configuration in general position.
///
/// Why min over facet offsets equals the min-max: any x in cone(F_σ) writes
/// as x = Σ c_i (σ_i y_i) with c_i ≥ 0 and Σ c_i (σ_i y_i)·z_σ = x·z_σ, so
/// the largest dot of x with the configuration is at least a_σ (some
/// coefficient pairs x against a vertex on the supporting hyperplane), while
/// x = z_σ itself attains max_i z_σ·x_i = a_σ by the supporting property.
/// The cones cover the sphere, hence min_x max_i x·x_i = min_σ a_σ.
pub fn eta_exact(cfg: &AntipodalConfig) -> Result<CoveringReport> {
    let hull = enumerate_facets(cfg)?;
    let best = hull.min_offset_facet();
    let eta = best.offset;
    Ok(CoveringReport {
        eta,
        rho: (2.0 - 2.0 * eta).sqrt(),
        witness: best.normal.clone(),
        method: CoveringMethod::ExactFacet,
        tolerance: 1e-12,
    })
}

/// Recovers the antipodal pair structure of a generic configuration, if any:
/// N = 2d points that match up into exact ± pairs.
pub fn detect_antipodal(cfg: &GenericConfig) -> Option<AntipodalConfig> {
    let d = cfg.dim();
    let pts = cfg.points();
    if pts.len() != 2 * d {
        return None;
    }
    let mut used = vec![false; pts.len()];
    let mut reps = Vec::with_capacity(d);
    for i in 0..pts.len() {
        if used[i] {
            continue;
        }
        let neg = pts[i].neg();
        let partner = (i + 1..pts.len()).find(|&j| {
            !used[j] && (pts[j].coords() - neg.coords()).norm() < 1e-12
        })?;
        used[i] = true;
        used[partner] = true;
        reps.push(pts[i].clone());
    }
    AntipodalConfig::new(reps).ok()
}

/// Sampled upper-bound estimator of η for arbitrary configurations.
///
/// Evaluates F(x) = max_i x·x_i over quasi-uniform samples, injecting the
/// facet normals as candidates whenever the configuration is antipodal and
/// in general position (those are exactly the hole candidates of the exact
/// path), then refines the best candidate by projected subgradient descent
/// with step halving.
pub fn eta_sampled(
    cfg: &GenericConfig,
    n_samples: usize,
    refine_iters: usize,
    rng_seed: u64,
) -> CoveringReport {
    let d = cfg.dim();
    let mut rng = seeded_rng(rng_seed);

    let mut best: Option<(f64, UnitVector)> = None;
    let consider = |x: UnitVector, value: f64, best: &mut Option<(f64, UnitVector)>| {
        if best.as_ref().map_or(true, |(v, _)| value < *v) {
            *best = Some((value, x));
        }
    };

    if let Some(anti) = detect_antipodal(cfg) {
        if is_general_position(&anti) {
            if let Ok(hull) = enumerate_facets(&anti) {
                for f in &hull.facets {
                    let v = max_dot(cfg, &f.normal);
                    consider(f.normal.clone(), v, &mut best);
                }
            }
        }
    }
    for _ in 0..n_samples.max(1) {
        let x = random_unit_vector(d, &mut rng);
        let v = max_dot(cfg, &x);
        consider(x, v, &mut best);
    }

    let (mut value, mut x) = best.expect("at least one candidate");
    let mut step = 0.1;
    for _ in 0..refine_iters {
        // Subgradient of F at x: the point attaining the max, projected to
        // the tangent space.
        let (_, top) = cfg
            .points()
            .iter()
            .map(|p| (p.dot(&x), p))
            .fold(None::<(f64, &UnitVector)>, |acc, (v, p)| match acc {
                Some((bv, bp)) if bv >= v => Some((bv, bp)),
                _ => Some((v, p)),
            })
            .unwrap();
        let tangent = top.coords() - top.dot(&x) * x.coords();
        if tangent.norm() < 1e-16 {
            break;
        }
        let trial_vec: DVector<f64> = x.coords() - step * &tangent;
        match normalize(&trial_vec) {
            Ok(trial) => {
                let tv = max_dot(cfg, &trial);
                if tv < value {
                    value = tv;
                    x = trial;
                } else {
                    step *= 0.5;
                }
            }
            Err(_) => step *= 0.5,
        }
        if step < 1e-17 {
            break;
        }
    }

    CoveringReport {
        eta: value,
        rho: (2.0 - 2.0 * value).sqrt(),
        witness: x,
        method: CoveringMethod::Sampled,
        tolerance: step,
    }
}

/// Direct sampled mesh-norm estimate: max over samples (and the refined η
/// witness) of the Euclidean distance to the nearest configuration point.
pub fn mesh_norm_sampled(cfg: &GenericConfig, n_samples: usize, rng_seed: u64) -> f64 {
    let d = cfg.dim();
    let nearest_dist = |x: &UnitVector| -> f64 {
        cfg.points()
            .iter()
            .map(|p| (x.coords() - p.coords()).norm())
            .fold(f64::INFINITY, f64::min)
    };
    let mut rng = seeded_rng(rng_seed);
    let mut best = 0.0f64;
    for _ in 0..n_samples {
        best = best.max(nearest_dist(&random_unit_vector(d, &mut rng)));
    }
    let report = eta_sampled(cfg, n_samples, 200, rng_seed.wrapping_add(1));
    best.max(nearest_dist(&report.witness))
}

#[derive(Debug, Clone)]
pub struct BoundCheck {
    pub eta: f64,
    pub bound: f64,
    pub satisfied: bool,
    pub is_cross_polytope: bool,
}

/// Checks η(ω_{2d}) ≤ 1/sqrt(d) and reports whether the representatives are
/// orthonormal (the equality case).
pub fn check_covering_bound(cfg: &AntipodalConfig) -> BoundCheck {
    let d = cfg.dim() as f64;
    let eta = match eta_exact(cfg) {
        Ok(r) => r.eta,
        Err(_) => eta_sampled(&cfg.into(), 200_000, 200, 0).eta,
    };
    let bound = 1.0 / d.sqrt();
    BoundCheck {
        eta,
        bound,
        satisfied: eta <= bound + EPS_BOUND,
        is_cross_polytope: cfg.is_cross_polytope(),
    }
}

/// Produces a point y with |y·x_i| ≤ 1/sqrt(d) + slack for all 2d points,
/// certifying that the configuration is centered. The η witness works: its
/// max dot is η ≤ 1/sqrt(d), and antipodality bounds the dots from below.
pub fn is_centered_witness(cfg: &AntipodalConfig) -> Result<UnitVector> {
    let witness = match eta_exact(cfg) {
        Ok(r) => r.witness,
        Err(_) => eta_sampled(&cfg.into(), 200_000, 200, 0).witness,
    };
    let bound = 1.0 / (cfg.dim() as f64).sqrt() + EPS_BOUND;
    let worst = cfg
        .full_points()
        .iter()
        .map(|p| p.dot(&witness))
        .fold(f64::NEG_INFINITY, f64::max);
    if worst > bound {
        return Err(CrossError::WitnessNotFound {
            tol: EPS_BOUND,
            worst,
        });
    }
    Ok(witness)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{cross_polytope, random_antipodal, AntipodalConfig};
    use approx::assert_abs_diff_eq;
    use nalgebra::DVector;

    fn perturbed_cross_polytope(d: usize, theta: f64) -> AntipodalConfig {
        crate::geom::perturbed_cross_polytope(d, theta).unwrap()
    }

    #[test]
    fn eta_exact_cross_polytope() {
        assert_abs_diff_eq!(
            eta_exact(&cross_polytope(4).unwrap()).unwrap().eta,
            0.5,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            eta_exact(&cross_polytope(2).unwrap()).unwrap().eta,
            std::f64::consts::FRAC_1_SQRT_2,
            epsilon = 1e-12
        );
    }

    #[test]
    fn perturbed_below_bound_and_matches_sampled() {
        let cfg = perturbed_cross_polytope(3, 0.1);
        let exact = eta_exact(&cfg).unwrap();
        assert!(exact.eta < 1.0 / 3.0f64.sqrt());
        let sampled = eta_sampled(&(&cfg).into(), 100_000, 300, 7);
        assert_abs_diff_eq!(exact.eta, sampled.eta, epsilon = 1e-4);
    }

    #[test]
    fn eta_sampled_cross_polytope_d3() {
        let cfg: GenericConfig = (&cross_polytope(3).unwrap()).into();
        let report = eta_sampled(&cfg, 100_000, 300, 3);
        assert_abs_diff_eq!(report.eta, 1.0 / 3.0f64.sqrt(), epsilon = 1e-6);
    }

    #[test]
    fn eta_sampled_single_point() {
        let e1 = normalize(&DVector::from_vec(vec![1.0, 0.0, 0.0])).unwrap();
        let cfg = GenericConfig::new(vec![e1]).unwrap();
        let report = eta_sampled(&cfg, 50_000, 300, 1);
        assert_abs_diff_eq!(report.eta, -1.0, epsilon = 1e-6);
    }

    #[test]
    fn eta_sampled_triangle_on_circle() {
        // Equally spaced N = 3 points on S^1; the deepest hole sits at an
        // arc midpoint, dot = cos(pi/3) = 1/2.
        let pts: Vec<UnitVector> = (0..3)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / 3.0;
                normalize(&DVector::from_vec(vec![t.cos(), t.sin()])).unwrap()
            })
            .collect();
        let cfg = GenericConfig::new(pts).unwrap();
        let report = eta_sampled(&cfg, 100_000, 300, 2);
        assert_abs_diff_eq!(report.eta, 0.5, epsilon = 1e-6);
    }

    #[test]
    fn rho_eta_relation() {
        let cfg = random_antipodal(4, 12).unwrap();
        let r = eta_exact(&cfg).unwrap();
        assert_abs_diff_eq!(r.rho * r.rho, 2.0 - 2.0 * r.eta, epsilon = 1e-12);
        let direct = mesh_norm_sampled(&(&cfg).into(), 50_000, 4);
        assert_abs_diff_eq!(direct, r.rho, epsilon = 2e-4);
    }

    #[test]
    fn bound_check_cross_polytope() {
        let check = check_covering_bound(&cross_polytope(5).unwrap());
        assert!(check.satisfied);
        assert!(check.is_cross_polytope);
        assert_abs_diff_eq!(check.eta, 1.0 / 5.0f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn bound_check_random() {
        let check = check_covering_bound(&random_antipodal(4, 3).unwrap());
        assert!(check.satisfied);
        assert!(!check.is_cross_polytope);
    }

    #[test]
    fn near_equality_implies_cross_polytope() {
        // Contrapositive of the uniqueness clause on the perturbed family:
        // away from the cross-polytope, eta stays clearly below the bound.
        for &theta in &[1e-3, 1e-2, 1e-1] {
            let cfg = perturbed_cross_polytope(3, theta);
            let eta = eta_exact(&cfg).unwrap().eta;
            assert!(eta < 1.0 / 3.0f64.sqrt());
            if (eta - 1.0 / 3.0f64.sqrt()).abs() <= 1e-10 {
                assert!(cfg.is_cross_polytope());
            }
        }
    }

    #[test]
    fn eta_converges_to_bound_as_theta_vanishes() {
        let bound = 1.0 / 3.0f64.sqrt();
        let mut prev_gap = f64::INFINITY;
        for &theta in &[1e-1, 1e-2, 1e-3] {
            let gap = bound - eta_exact(&perturbed_cross_polytope(3, theta)).unwrap().eta;
            assert!(gap > 0.0 && gap < prev_gap);
            prev_gap = gap;
        }
        assert!(prev_gap < 1e-2);
    }

    #[test]
    fn rotation_invariance() {
        let cfg = random_antipodal(4, 8).unwrap();
        let eta0 = eta_exact(&cfg).unwrap().eta;
        // Random orthogonal matrix from QR of a Gaussian matrix.
        let mut rng = seeded_rng(99);
        let m = nalgebra::DMatrix::from_fn(4, 4, |_, _| {
            use rand_distr::Distribution;
            rand_distr::StandardNormal.sample(&mut rng)
        });
        let q = m.qr().q();
        let reps = cfg
            .representatives()
            .iter()
            .map(|y| normalize(&(&q * y.coords())).unwrap())
            .collect();
        let rotated = AntipodalConfig::new(reps).unwrap();
        let eta1 = eta_exact(&rotated).unwrap().eta;
        assert_abs_diff_eq!(eta0, eta1, epsilon = 1e-12);
    }

    #[test]
    fn centered_witness_examples() {
        let w = is_centered_witness(&cross_polytope(3).unwrap()).unwrap();
        for c in w.coords() {
            assert_abs_diff_eq!(c.abs(), 1.0 / 3.0f64.sqrt(), epsilon = 1e-12);
        }
        assert!(is_centered_witness(&random_antipodal(5, 11).unwrap()).is_ok());
        let w2 = is_centered_witness(&cross_polytope(2).unwrap()).unwrap();
        for c in w2.coords() {
            assert_abs_diff_eq!(c.abs(), std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-12);
        }
    }
}
