//! Optimization over antipodal configurations: reproduces at desk scale
//! that the regular cross-polytope maximizes both the covering measure η
//! and the polarization value.

use nalgebra::DVector;

use crate::error::Result;
use crate::geom::{
    normalize, random_unit_vector, seeded_rng, AntipodalConfig, EPS_RANK,
};
use crate::polarization::{polarization_value, cross_polytope_closed_form, PotentialFunction};

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub best: AntipodalConfig,
    pub objective: f64,
    pub trace: Vec<(usize, f64)>,
    pub converged: bool,
    /// Raw pairwise measure max |y_i · y_j|, i != j; no alignment attempted.
    pub distance_to_cross_polytope: f64,
}

fn config_from_params(d: usize, params: &[f64]) -> Option<AntipodalConfig> {
    let mut reps = Vec::with_capacity(d);
    for i in 0..d {
        let v = DVector::from_iterator(d, params[i * d..(i + 1) * d].iter().copied());
        reps.push(normalize(&v).ok()?);
    }
    let cfg = AntipodalConfig::new(reps).ok()?;
    // Near-rank-deficient iterates would break the exact facet path.
    if cfg.singular_ratio() < 10.0 * EPS_RANK {
        return None;
    }
    Some(cfg)
}

fn random_params(d: usize, rng: &mut rand_chacha::ChaCha8Rng) -> Vec<f64> {
    let mut params = Vec::with_capacity(d * d);
    for _ in 0..d {
        params.extend(random_unit_vector(d, rng).coords().iter());
    }
    params
}

fn eta_of_params(d: usize, params: &[f64]) -> f64 {
    config_from_params(d, params)
        .and_then(|cfg| crate::covering::eta_exact(&cfg).ok())
        .map_or(f64::NEG_INFINITY, |r| r.eta)
}

/// Softened η: softmin over the facet offsets, smooth across the kinks of
/// the true min. Approaches min_σ a_σ from below as beta grows.
fn softmin_eta(d: usize, params: &[f64], beta: f64) -> f64 {
    let Some(cfg) = config_from_params(d, params) else {
        return f64::NEG_INFINITY;
    };
    let Ok(hull) = crate::hull::enumerate_facets(&cfg) else {
        return f64::NEG_INFINITY;
    };
    let min = hull
        .facets
        .iter()
        .map(|f| f.offset)
        .fold(f64::INFINITY, f64::min);
    let sum: f64 = hull
        .facets
        .iter()
        .map(|f| (-beta * (f.offset - min)).exp())
        .sum();
    min - sum.ln() / beta
}

/// Maximizes η over antipodal configurations by multistart smoothed ascent
/// with softmin annealing, followed by a coordinate-ascent polish on the
/// true min. The reported objective is always the exact facet value.
pub fn maximize_eta(d: usize, restarts: usize, rng_seed: u64) -> Result<SearchResult> {
    let mut rng = seeded_rng(rng_seed);
    let target = 1.0 / (d as f64).sqrt();
    let n_params = d * d;

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut trace = Vec::new();
    let mut iter_count = 0usize;

    for _ in 0..restarts.max(1) {
        let mut params = random_params(d, &mut rng);

        // Annealed smoothed ascent: finite-difference gradient on softmin.
        for stage in 0..4 {
            let beta = 10.0f64.powi(stage + 1);
            let mut step = 0.05;
            let mut value = softmin_eta(d, &params, beta);
            for _ in 0..200 {
                let fd = 1e-6;
                let mut grad = vec![0.0; n_params];
                for i in 0..n_params {
                    let saved = params[i];
                    params[i] = saved + fd;
                    let plus = softmin_eta(d, &params, beta);
                    params[i] = saved - fd;
                    let minus = softmin_eta(d, &params, beta);
                    params[i] = saved;
                    grad[i] = (plus - minus) / (2.0 * fd);
                }
                let norm: f64 = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
                if norm < 1e-12 {
                    break;
                }
                let trial: Vec<f64> = params
                    .iter()
                    .zip(&grad)
                    .map(|(p, g)| p + step * g / norm)
                    .collect();
                let tv = softmin_eta(d, &trial, beta);
                if tv > value {
                    value = tv;
                    params = trial;
                    step = (step * 1.2).min(0.2);
                } else {
                    step *= 0.5;
                    if step < 1e-9 {
                        break;
                    }
                }
                iter_count += 1;
            }
            trace.push((iter_count, eta_of_params(d, &params)));
        }

        // Polish directly on the exact min with shrinking coordinate steps.
        let mut value = eta_of_params(d, &params);
        let mut step = 0.01;
        while step > 1e-9 {
            let mut improved = false;
            for i in 0..n_params {
                for dir in [1.0, -1.0] {
                    let saved = params[i];
                    params[i] = saved + dir * step;
                    let tv = eta_of_params(d, &params);
                    if tv > value {
                        value = tv;
                        improved = true;
                    } else {
                        params[i] = saved;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
            iter_count += 1;
        }
        trace.push((iter_count, value));

        if best.as_ref().map_or(true, |(bv, _)| value > *bv) {
            best = Some((value, params));
        }
    }

    let (objective, params) = best.expect("at least one restart");
    let best_cfg = config_from_params(d, &params).expect("best iterate is non-degenerate");
    Ok(SearchResult {
        converged: objective >= target - 1e-6,
        distance_to_cross_polytope: best_cfg.max_offdiag_dot(),
        best: best_cfg,
        objective,
        trace,
    })
}

/// Maximizes the polarization value over antipodal configurations by
/// coordinate-wise ascent with shrinking steps; the inner minimum always
/// comes from the polarization module.
pub fn maximize_polarization(
    d: usize,
    g: &PotentialFunction,
    restarts: usize,
    rng_seed: u64,
) -> Result<SearchResult> {
    g.second_derivative_certificate()?;
    let mut rng = seeded_rng(rng_seed);
    let n_params = d * d;
    let target = cross_polytope_closed_form(d, g);

    let inner = |params: &[f64], seed: u64| -> f64 {
        let Some(cfg) = config_from_params(d, params) else {
            return f64::NEG_INFINITY;
        };
        polarization_value(&(&cfg).into(), g, 1, seed)
            .map_or(f64::NEG_INFINITY, |r| r.value)
    };

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut trace = Vec::new();
    let mut iter_count = 0usize;

    for restart in 0..restarts.max(1) {
        let mut params = random_params(d, &mut rng);
        let seed = rng_seed.wrapping_add(restart as u64);
        let mut value = inner(&params, seed);
        let mut step = 0.2;
        while step > 1e-7 {
            let mut improved = false;
            for i in 0..n_params {
                for dir in [1.0, -1.0] {
                    let saved = params[i];
                    params[i] = saved + dir * step;
                    let tv = inner(&params, seed);
                    if tv > value {
                        value = tv;
                        improved = true;
                    } else {
                        params[i] = saved;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
            iter_count += 1;
            trace.push((iter_count, value));
        }
        if best.as_ref().map_or(true, |(bv, _)| value > *bv) {
            best = Some((value, params));
        }
    }

    let (objective, params) = best.expect("at least one restart");
    let best_cfg = config_from_params(d, &params).expect("best iterate is non-degenerate");
    Ok(SearchResult {
        converged: objective >= target - 1e-5,
        distance_to_cross_polytope: best_cfg.max_offdiag_dot(),
        best: best_cfg,
        objective,
        trace,
    })
}
