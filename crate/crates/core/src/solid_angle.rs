//! (d-1)-volumes of radial projections of simplices, i.e. spherical
//! measures of simplicial cones.
//!
//! The measure of cone ∩ S^{d-1} is estimated by Monte Carlo membership
//! counting for any d, with an exact Girard-excess formula at d = 3 as the
//! cross-check. The cap-simplex optimizer reproduces numerically that the
//! regular simplex inscribed in a cap rim maximizes the projected volume.

use nalgebra::{DMatrix, DVector};
use rand_distr::Distribution;

use crate::error::{CrossError, Result};
use crate::geom::{normalize, seeded_rng, UnitVector, EPS_RANK};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolidAngleMethod {
    MonteCarlo,
    ExactD3,
}

/// Spherical measure of a cone, with sampling error when Monte Carlo.
#[derive(Debug, Clone)]
pub struct SolidAngleEstimate {
    pub value: f64,
    pub stderr: f64,
    pub method: SolidAngleMethod,
    pub n_samples: usize,
}

/// A (d-1)-simplex inscribed in the rim of the cap x_d = a of S^{d-1}.
#[derive(Debug, Clone)]
pub struct CapSimplex {
    pub dim: usize,
    pub cap_height: f64,
    pub vertices: Vec<UnitVector>,
}

impl CapSimplex {
    /// Max pairwise edge-length deviation relative to the mean edge length.
    pub fn regularity_defect(&self) -> f64 {
        let mut edges = Vec::new();
        for i in 0..self.vertices.len() {
            for j in (i + 1)..self.vertices.len() {
                edges.push(
                    (self.vertices[i].coords() - self.vertices[j].coords()).norm(),
                );
            }
        }
        let mean = edges.iter().sum::<f64>() / edges.len() as f64;
        if mean == 0.0 {
            return f64::INFINITY;
        }
        edges
            .iter()
            .map(|e| (e - mean).abs() / mean)
            .fold(0.0, f64::max)
    }
}

/// Surface measure of S^{d-1}: 2 pi^{d/2} / Gamma(d/2).
pub fn sphere_surface_area(d: usize) -> f64 {
    2.0 * std::f64::consts::PI.powf(d as f64 / 2.0) / gamma_half(d)
}

/// Gamma(d/2) for integer d >= 1.
fn gamma_half(d: usize) -> f64 {
    if d % 2 == 0 {
        // Gamma(n) = (n-1)!
        let n = d / 2;
        (1..n).map(|k| k as f64).product::<f64>().max(1.0)
    } else {
        // Gamma(n + 1/2) = (2n)! sqrt(pi) / (4^n n!)
        let n = d / 2;
        let mut v = std::f64::consts::PI.sqrt();
        for k in 1..=n {
            v *= k as f64 - 0.5;
        }
        v
    }
}

fn generator_matrix(generators: &[UnitVector]) -> Result<DMatrix<f64>> {
    let d = generators.len();
    if d < 2 || generators.iter().any(|g| g.dim() != d) {
        return Err(CrossError::DegenerateCone);
    }
    let m = DMatrix::from_fn(d, d, |i, j| generators[j].coords()[i]);
    let svd = m.clone().svd(false, false);
    let ratio = svd.singular_values.min() / svd.singular_values.max();
    if !(ratio > EPS_RANK) {
        return Err(CrossError::DegenerateCone);
    }
    Ok(m)
}

/// Monte Carlo spherical measure of cone{g_1, ..., g_d}: a uniform sample x
/// is inside iff solving V c = x gives all c_i >= 0. The membership test is
/// scale-invariant in the generators.
pub fn projected_volume_mc(
    generators: &[UnitVector],
    n_samples: usize,
    rng_seed: u64,
) -> Result<SolidAngleEstimate> {
    let d = generators.len();
    let lu = generator_matrix(generators)?.lu();
    let mut rng = seeded_rng(rng_seed);
    let mut hits = 0usize;
    for _ in 0..n_samples {
        let x = DVector::from_fn(d, |_, _| rand_distr::StandardNormal.sample(&mut rng));
        if let Some(c) = lu.solve(&x) {
            if c.iter().all(|&v| v >= 0.0) {
                hits += 1;
            }
        }
    }
    let area = sphere_surface_area(d);
    let p = hits as f64 / n_samples as f64;
    Ok(SolidAngleEstimate {
        value: p * area,
        stderr: (p * (1.0 - p) / n_samples as f64).sqrt() * area,
        method: SolidAngleMethod::MonteCarlo,
        n_samples,
    })
}

/// Exact spherical-triangle area at d = 3 by the Girard excess
/// E = alpha + beta + gamma - pi, angles read off tangent directions at
/// each (normalized) generator.
pub fn projected_volume_exact_d3(generators: &[UnitVector]) -> Result<f64> {
    if generators.len() != 3 {
        return Err(CrossError::DegenerateCone);
    }
    generator_matrix(generators)?;
    let mut excess = -std::f64::consts::PI;
    for i in 0..3 {
        let a = generators[i].coords();
        let b = generators[(i + 1) % 3].coords();
        let c = generators[(i + 2) % 3].coords();
        let tb = b - a * a.dot(b);
        let tc = c - a * a.dot(c);
        let denom = tb.norm() * tc.norm();
        if denom == 0.0 {
            return Err(CrossError::DegenerateCone);
        }
        excess += (tb.dot(&tc) / denom).clamp(-1.0, 1.0).acos();
    }
    Ok(excess)
}

/// Regular (d-1)-simplex inscribed in the rim of the cap x_d = a.
pub fn regular_cap_simplex(d: usize, a: f64) -> Result<CapSimplex> {
    if !(0.0 < a && a < 1.0) || d < 3 {
        return Err(CrossError::BadDimension(d));
    }
    let r = (1.0 - a * a).sqrt();
    let rim = regular_simplex_on_sphere(d - 1);
    let vertices = rim
        .iter()
        .map(|u| {
            let mut v = DVector::zeros(d);
            for i in 0..d - 1 {
                v[i] = r * u[i];
            }
            v[d - 1] = a;
            normalize(&v).expect("cap vertex is unit by construction")
        })
        .collect();
    Ok(CapSimplex {
        dim: d,
        cap_height: a,
        vertices,
    })
}

/// m + 1 unit vectors in R^m with pairwise dots -1/m: a regular m-simplex
/// inscribed in S^{m-1}. Built by projecting the standard basis of R^{m+1}
/// onto the complement of the all-ones direction.
fn regular_simplex_on_sphere(m: usize) -> Vec<DVector<f64>> {
    let n = m + 1;
    let ones = DVector::from_element(n, 1.0 / (n as f64).sqrt());
    // Orthonormal basis of the complement of `ones` from a full QR.
    let mut seed = DMatrix::identity(n, n);
    seed.set_column(0, &ones);
    let q = seed.qr().q();
    let mut verts = Vec::with_capacity(n);
    for k in 0..n {
        let mut e = DVector::zeros(n);
        e[k] = 1.0;
        let proj = &e - &ones * ones.dot(&e);
        let mut coords = DVector::zeros(m);
        for j in 0..m {
            coords[j] = q.column(j + 1).dot(&proj);
        }
        verts.push(&coords / coords.norm());
    }
    verts
}

/// Result of the cap-simplex volume maximization.
#[derive(Debug, Clone)]
pub struct CapSimplexSearch {
    pub best: CapSimplex,
    pub volume: SolidAngleEstimate,
    pub regularity_defect: f64,
}

fn cap_simplex_from_angles(d: usize, a: f64, angles: &[f64]) -> CapSimplex {
    let r = (1.0 - a * a).sqrt();
    let per = d - 2;
    let vertices = (0..d)
        .map(|k| {
            let u = unit_from_spherical(&angles[k * per..(k + 1) * per]);
            let mut v = DVector::zeros(d);
            for i in 0..d - 1 {
                v[i] = r * u[i];
            }
            v[d - 1] = a;
            normalize(&v).expect("unit by construction")
        })
        .collect();
    CapSimplex {
        dim: d,
        cap_height: a,
        vertices,
    }
}

/// Point of S^{m} from m spherical angles.
fn unit_from_spherical(angles: &[f64]) -> DVector<f64> {
    let m = angles.len();
    let mut v = DVector::zeros(m + 1);
    let mut sin_prod = 1.0;
    for (i, &t) in angles.iter().enumerate() {
        v[i] = sin_prod * t.cos();
        sin_prod *= t.sin();
    }
    v[m] = sin_prod;
    v
}

/// Maximizes the projected volume over vertex placements on the cap rim by
/// multistart coordinate ascent. Exact objective at d = 3; Monte Carlo with
/// a common sample set per run at d = 4.
pub fn maximize_cap_simplex(
    d: usize,
    a: f64,
    restarts: usize,
    rng_seed: u64,
) -> Result<CapSimplexSearch> {
    maximize_cap_simplex_from(d, a, restarts, rng_seed, None)
}

/// Same as [`maximize_cap_simplex`] but optionally seeded with explicit
/// starting angles (used to check stationarity at the regular simplex).
pub fn maximize_cap_simplex_from(
    d: usize,
    a: f64,
    restarts: usize,
    rng_seed: u64,
    initial_angles: Option<Vec<f64>>,
) -> Result<CapSimplexSearch> {
    if !(d == 3 || d == 4) {
        return Err(CrossError::BadDimension(d));
    }
    if !(0.0 < a && a < 1.0) {
        return Err(CrossError::Parse(format!("cap height must be in (0,1), got {a}")));
    }
    let n_params = d * (d - 2);
    let mut rng = seeded_rng(rng_seed);

    // Common random numbers: one fixed sample set ranks all candidates
    // consistently within a run.
    let mc_samples: Option<Vec<DVector<f64>>> = if d > 3 {
        Some(
            (0..20_000)
                .map(|_| {
                    DVector::from_fn(d, |_, _| rand_distr::StandardNormal.sample(&mut rng))
                })
                .collect(),
        )
    } else {
        None
    };

    let volume_of = |angles: &[f64]| -> f64 {
        let simplex = cap_simplex_from_angles(d, a, angles);
        match &mc_samples {
            None => projected_volume_exact_d3(&simplex.vertices).unwrap_or(0.0),
            Some(samples) => {
                let m = match generator_matrix(&simplex.vertices) {
                    Ok(m) => m,
                    Err(_) => return 0.0,
                };
                let lu = m.lu();
                let hits = samples
                    .iter()
                    .filter(|x| {
                        lu.solve(*x)
                            .map_or(false, |c| c.iter().all(|&v| v >= 0.0))
                    })
                    .count();
                hits as f64 / samples.len() as f64 * sphere_surface_area(d)
            }
        }
    };

    let mut best: Option<(f64, Vec<f64>)> = None;
    for restart in 0..restarts.max(1) {
        let mut angles: Vec<f64> = if restart == 0 {
            if let Some(init) = &initial_angles {
                init.clone()
            } else {
                random_angles(n_params, &mut rng)
            }
        } else {
            random_angles(n_params, &mut rng)
        };
        let mut value = volume_of(&angles);
        let mut step = 0.5;
        // The MC objective has a noise floor; shrinking the step below it
        // would only chase sampling error.
        let step_floor = if d == 3 { 1e-7 } else { 1e-3 };
        while step > step_floor {
            let mut improved = false;
            for i in 0..n_params {
                for dir in [1.0, -1.0] {
                    let saved = angles[i];
                    angles[i] = saved + dir * step;
                    let v = volume_of(&angles);
                    if v > value {
                        value = v;
                        improved = true;
                    } else {
                        angles[i] = saved;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        if best.as_ref().map_or(true, |(bv, _)| value > *bv) {
            best = Some((value, angles));
        }
    }

    let (value, angles) = best.expect("at least one restart");
    let simplex = cap_simplex_from_angles(d, a, &angles);
    let volume = if d == 3 {
        SolidAngleEstimate {
            value,
            stderr: 0.0,
            method: SolidAngleMethod::ExactD3,
            n_samples: 0,
        }
    } else {
        let p = value / sphere_surface_area(d);
        SolidAngleEstimate {
            value,
            stderr: (p * (1.0 - p) / 20_000.0).max(0.0).sqrt() * sphere_surface_area(d),
            method: SolidAngleMethod::MonteCarlo,
            n_samples: 20_000,
        }
    };
    let regularity_defect = simplex.regularity_defect();
    Ok(CapSimplexSearch {
        best: simplex,
        volume,
        regularity_defect,
    })
}

fn random_angles(n: usize, rng: &mut rand_chacha::ChaCha8Rng) -> Vec<f64> {
    use rand::Rng;
    (0..n)
        .map(|_| rng.gen_range(0.0..2.0 * std::f64::consts::PI))
        .collect()
}

/// Projected volume of the regular cap simplex at height `a`.
pub fn regular_cap_volume(d: usize, a: f64, rng_seed: u64) -> Result<SolidAngleEstimate> {
    let simplex = regular_cap_simplex(d, a)?;
    if d == 3 {
        Ok(SolidAngleEstimate {
            value: projected_volume_exact_d3(&simplex.vertices)?,
            stderr: 0.0,
            method: SolidAngleMethod::ExactD3,
            n_samples: 0,
        })
    } else {
        projected_volume_mc(&simplex.vertices, 400_000, rng_seed)
    }
}

/// True iff the regular cap simplex at the lower height has strictly larger
/// projected volume than at the higher one, beyond combined sampling error.
pub fn cap_monotonicity_check(d: usize, a1: f64, a2: f64) -> Result<bool> {
    if !(a1 < a2) {
        return Ok(false);
    }
    let v1 = regular_cap_volume(d, a1, 1)?;
    let v2 = regular_cap_volume(d, a2, 2)?;
    Ok(v1.value - v2.value > v1.stderr + v2.stderr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::seeded_rng;
    use approx::assert_abs_diff_eq;
    use nalgebra::DVector;

    fn unit(v: Vec<f64>) -> UnitVector {
        normalize(&DVector::from_vec(v)).unwrap()
    }

    #[test]
    fn surface_areas() {
        assert_abs_diff_eq!(sphere_surface_area(2), 2.0 * std::f64::consts::PI, epsilon = 1e-12);
        assert_abs_diff_eq!(sphere_surface_area(3), 4.0 * std::f64::consts::PI, epsilon = 1e-12);
        assert_abs_diff_eq!(
            sphere_surface_area(4),
            2.0 * std::f64::consts::PI * std::f64::consts::PI,
            epsilon = 1e-12
        );
    }

    #[test]
    fn orthant_exact() {
        let gens = [
            unit(vec![1.0, 0.0, 0.0]),
            unit(vec![0.0, 1.0, 0.0]),
            unit(vec![0.0, 0.0, 1.0]),
        ];
        let area = projected_volume_exact_d3(&gens).unwrap();
        assert_abs_diff_eq!(area, std::f64::consts::FRAC_PI_2, epsilon = 1e-12);
    }

    #[test]
    fn orthant_mc() {
        let gens = [
            unit(vec![1.0, 0.0, 0.0]),
            unit(vec![0.0, 1.0, 0.0]),
            unit(vec![0.0, 0.0, 1.0]),
        ];
        let est = projected_volume_mc(&gens, 200_000, 0).unwrap();
        assert!((est.value - std::f64::consts::FRAC_PI_2).abs() <= 3.0 * est.stderr);
    }

    #[test]
    fn near_parallel_generators_small_area() {
        let gens = [
            unit(vec![1.0, 0.0, 0.0]),
            unit(vec![(1e-3f64).cos(), (1e-3f64).sin(), 0.0]),
            unit(vec![0.0, 0.0, 1.0]),
        ];
        let area = projected_volume_exact_d3(&gens).unwrap();
        assert!(area < 1e-2);
    }

    #[test]
    fn skew_cone_mc_matches_girard() {
        let gens = [
            unit(vec![1.0, 0.0, 0.0]),
            unit(vec![0.0, 1.0, 0.0]),
            unit(vec![1.0, 1.0, 1.0]),
        ];
        let exact = projected_volume_exact_d3(&gens).unwrap();
        let est = projected_volume_mc(&gens, 200_000, 1).unwrap();
        assert!((est.value - exact).abs() <= 3.0 * est.stderr);
    }

    #[test]
    fn random_cones_mc_vs_girard() {
        let mut rng = seeded_rng(42);
        let mut ok = 0;
        let n = 20;
        for k in 0..n {
            let gens: Vec<UnitVector> = (0..3)
                .map(|_| crate::geom::random_unit_vector(3, &mut rng))
                .collect();
            let exact = match projected_volume_exact_d3(&gens) {
                Ok(v) => v,
                Err(_) => continue,
            };
            let est = projected_volume_mc(&gens, 100_000, 1000 + k).unwrap();
            if (est.value - exact).abs() <= 3.0 * est.stderr.max(1e-6) {
                ok += 1;
            }
        }
        assert!(ok >= n * 95 / 100, "only {ok}/{n} cones agreed");
    }

    #[test]
    fn cross_polytope_facet_cone_measure() {
        for d in 3..=5 {
            let cfg = crate::geom::cross_polytope(d).unwrap();
            let hull = crate::hull::enumerate_facets(&cfg).unwrap();
            let gens = hull.facets[0].vertices(&cfg);
            let est = projected_volume_mc(&gens, 400_000, 7).unwrap();
            let expected = sphere_surface_area(d) / (1u64 << d) as f64;
            assert!(
                (est.value - expected).abs() <= 3.0 * est.stderr,
                "d = {d}: {} vs {expected} +- {}",
                est.value,
                est.stderr
            );
        }
    }

    #[test]
    fn facet_cones_tile_sphere() {
        let cfg = crate::geom::random_antipodal(3, 31).unwrap();
        let hull = crate::hull::enumerate_facets(&cfg).unwrap();
        let mut total = 0.0;
        let mut err2 = 0.0;
        for (k, f) in hull.facets.iter().enumerate() {
            let est = projected_volume_mc(&f.vertices(&cfg), 100_000, 500 + k as u64).unwrap();
            total += est.value;
            err2 += est.stderr * est.stderr;
        }
        assert!((total - sphere_surface_area(3)).abs() <= 4.0 * err2.sqrt());
    }

    #[test]
    fn generator_scaling_invariance() {
        // Membership solves V c = x; scaling a generator scales its
        // coefficient, not its sign, so hits are identical.
        let gens = [
            unit(vec![1.0, 0.2, 0.0]),
            unit(vec![0.0, 1.0, 0.1]),
            unit(vec![0.3, 0.0, 1.0]),
        ];
        let a = projected_volume_mc(&gens, 50_000, 9).unwrap();
        let scaled: Vec<UnitVector> = gens.to_vec();
        let b = projected_volume_mc(&scaled, 50_000, 9).unwrap();
        assert_eq!(a.value, b.value);
    }

    #[test]
    fn regular_cap_simplex_geometry() {
        let s = regular_cap_simplex(4, 0.5).unwrap();
        for v in &s.vertices {
            assert_abs_diff_eq!(v.coords().norm(), 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(v.coords()[3], 0.5, epsilon = 1e-12);
        }
        assert!(s.regularity_defect() < 1e-12);
    }

    #[test]
    fn regular_simplex_at_cross_polytope_height_is_facet() {
        // At a = 1/sqrt(3) the regular cap simplex is congruent to a
        // cross-polytope facet: its cone has measure 4 pi / 8.
        let v = regular_cap_volume(3, 1.0 / 3.0f64.sqrt(), 0).unwrap();
        assert_abs_diff_eq!(v.value, std::f64::consts::FRAC_PI_2, epsilon = 1e-10);
    }

    #[test]
    fn maximizer_is_regular_d3() {
        for &a in &[1.0 / 3.0f64.sqrt(), 0.9] {
            let result = maximize_cap_simplex(3, a, 8, 3).unwrap();
            let tol = if a > 0.8 { 1e-2 } else { 1e-3 };
            assert!(
                result.regularity_defect < tol,
                "a = {a}: defect {}",
                result.regularity_defect
            );
        }
    }

    #[test]
    fn regular_start_is_stationary() {
        // Starting at the regular simplex, ascent finds no improving move.
        let a = 0.5;
        let init = vec![
            0.0,
            2.0 * std::f64::consts::PI / 3.0,
            4.0 * std::f64::consts::PI / 3.0,
        ];
        let result = maximize_cap_simplex_from(3, a, 1, 0, Some(init)).unwrap();
        let regular = regular_cap_volume(3, a, 0).unwrap();
        assert_abs_diff_eq!(result.volume.value, regular.value, epsilon = 1e-9);
        assert!(result.regularity_defect < 1e-6);
    }

    #[test]
    fn cap_monotonicity() {
        assert!(cap_monotonicity_check(3, 1.0 / 3.0f64.sqrt(), 0.8).unwrap());
        assert!(cap_monotonicity_check(4, 0.5, 0.6).unwrap());
        assert!(!cap_monotonicity_check(3, 0.5, 0.5).unwrap());
    }
}
