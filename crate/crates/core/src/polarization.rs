//! Potential functions on dot products, polarization values, the closed form
//! for the regular cross-polytope, and the even-quadratic Hermite lower
//! bound behind it.
//!
//! A potential is g on [-1,1], equivalently f on squared distances in (0,4]
//! through g(t) = f(2-2t). For antipodal configurations the potential of a
//! point x reduces to a sum of h(y_i·x) with h(t) = g(t) + g(-t).

use nalgebra::DVector;

use crate::error::{CrossError, Result};
use crate::geom::{
    is_general_position, normalize, random_unit_vector, seeded_rng, GenericConfig, UnitVector,
};
use crate::geom::AntipodalConfig;
use crate::hull::enumerate_facets;

/// Step for central-difference derivatives of table potentials.
const TABLE_DIFF_STEP: f64 = 1e-5;

/// Evaluable potential g on [-1, 1]. g may be +infinity at t = 1.
#[derive(Debug, Clone)]
pub enum PotentialFunction {
    /// Riesz: f(u) = u^{-s/2} for s > 0, f(u) = -u^{-s/2} for -1 <= s < 0.
    Riesz { s: f64 },
    /// Logarithmic: f(u) = (1/2) ln(1/u), so g(t) = -(1/2) ln(2 - 2t).
    Log,
    /// Gaussian test potential g(t) = exp(alpha t); smooth, g'' positive and convex.
    Gauss { alpha: f64 },
    /// Values on a uniform grid over [-1, 1], linearly interpolated.
    Table { values: Vec<f64> },
}

impl PotentialFunction {
    pub fn riesz(s: f64) -> Self {
        PotentialFunction::Riesz { s }
    }

    /// g(t).
    pub fn eval(&self, t: f64) -> f64 {
        let t = t.clamp(-1.0, 1.0);
        match self {
            PotentialFunction::Riesz { s } => {
                let sign = if *s > 0.0 { 1.0 } else { -1.0 };
                sign * (2.0 - 2.0 * t).powf(-s / 2.0)
            }
            PotentialFunction::Log => {
                let u = 2.0 - 2.0 * t;
                if u <= 0.0 {
                    f64::INFINITY
                } else {
                    -0.5 * u.ln()
                }
            }
            PotentialFunction::Gauss { alpha } => (alpha * t).exp(),
            PotentialFunction::Table { values } => table_eval(values, t),
        }
    }

    /// g'(t) on (-1, 1); closed form for built-ins, central differences for tables.
    pub fn deriv(&self, t: f64) -> f64 {
        match self {
            PotentialFunction::Riesz { s } => {
                let sign = if *s > 0.0 { 1.0 } else { -1.0 };
                sign * s * (2.0 - 2.0 * t).powf(-s / 2.0 - 1.0)
            }
            PotentialFunction::Log => 1.0 / (2.0 - 2.0 * t),
            PotentialFunction::Gauss { alpha } => alpha * (alpha * t).exp(),
            PotentialFunction::Table { values } => {
                (table_eval(values, t + TABLE_DIFF_STEP) - table_eval(values, t - TABLE_DIFF_STEP))
                    / (2.0 * TABLE_DIFF_STEP)
            }
        }
    }

    /// h(t) = g(t) + g(-t); even by construction.
    pub fn h_eval(&self, t: f64) -> f64 {
        self.eval(t) + self.eval(-t)
    }

    pub fn h_deriv(&self, t: f64) -> f64 {
        self.deriv(t) - self.deriv(-t)
    }

    /// The dual distance-squared form f(u) = g(1 - u/2), u in (0, 4].
    pub fn eval_distance_squared(&self, u: f64) -> f64 {
        self.eval(1.0 - u / 2.0)
    }

    /// Numerical certificate that g'' is non-negative and convex on (-1, 1),
    /// checked through first and second differences of g' on a 2049-point
    /// grid with relative slack.
    pub fn second_derivative_certificate(&self) -> Result<()> {
        const N: usize = 2049;
        let lo = -1.0 + 1e-3;
        let hi = 1.0 - 1e-3;
        let step = (hi - lo) / (N - 1) as f64;
        let dg: Vec<f64> = (0..N).map(|i| self.deriv(lo + step * i as f64)).collect();
        if dg.iter().any(|v| !v.is_finite()) {
            return Err(CrossError::CertificateFailed(
                "g' not finite on the certificate grid".into(),
            ));
        }
        let slack = |a: f64, b: f64| 1e-8 * (1.0 + a.abs() + b.abs());
        // g'' >= 0: g' non-decreasing.
        for w in dg.windows(2) {
            if w[1] < w[0] - slack(w[0], w[1]) {
                return Err(CrossError::CertificateFailed(
                    "g' decreases: g'' takes negative values".into(),
                ));
            }
        }
        // g'' convex: second differences of g' (a proxy for g''') non-decreasing.
        let d2: Vec<f64> = dg.windows(3).map(|w| w[2] - 2.0 * w[1] + w[0]).collect();
        for w in d2.windows(2) {
            if w[1] < w[0] - slack(w[0], w[1]) {
                return Err(CrossError::CertificateFailed(
                    "second differences of g' decrease: g'' not convex".into(),
                ));
            }
        }
        Ok(())
    }

    /// True when g'' stays strictly positive on the certificate grid; under
    /// this the equality case of the polarization bound is exclusive to the
    /// cross-polytope.
    pub fn strictly_convex(&self) -> bool {
        const N: usize = 1025;
        let lo = -1.0 + 1e-3;
        let hi = 1.0 - 1e-3;
        let step = (hi - lo) / (N - 1) as f64;
        (0..N - 1).all(|i| {
            let a = self.deriv(lo + step * i as f64);
            let b = self.deriv(lo + step * (i + 1) as f64);
            b > a
        })
    }
}

fn table_eval(values: &[f64], t: f64) -> f64 {
    let n = values.len();
    if n == 1 {
        return values[0];
    }
    let pos = (t.clamp(-1.0, 1.0) + 1.0) / 2.0 * (n - 1) as f64;
    let idx = (pos.floor() as usize).min(n - 2);
    let frac = pos - idx as f64;
    values[idx] * (1.0 - frac) + values[idx + 1] * frac
}

/// Sum of g over the dot products of x with the configuration points.
/// Infinity is a value, not an error (Riesz potentials at coincident points).
pub fn potential_at(cfg: &GenericConfig, g: &PotentialFunction, x: &UnitVector) -> f64 {
    cfg.points().iter().map(|p| g.eval(p.dot(x))).sum()
}

/// Same potential for an antipodal configuration through h; agrees with the
/// direct 2d-term sum.
pub fn potential_at_antipodal(
    cfg: &AntipodalConfig,
    g: &PotentialFunction,
    x: &UnitVector,
) -> f64 {
    cfg.representatives()
        .iter()
        .map(|y| g.h_eval(y.dot(x)))
        .sum()
}

/// Euclidean gradient of the potential at x: sum of g'(x·x_i) x_i.
fn potential_gradient(cfg: &GenericConfig, g: &PotentialFunction, x: &UnitVector) -> DVector<f64> {
    let mut grad = DVector::zeros(cfg.dim());
    for p in cfg.points() {
        grad += p.coords() * g.deriv(p.dot(x));
    }
    grad
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolarizationMethod {
    CandidateExact,
    MultistartDescent,
}

#[derive(Debug, Clone)]
pub struct PolarizationReport {
    pub value: f64,
    pub minimizer: UnitVector,
    pub method: PolarizationMethod,
    /// Cross-polytope closed form minus the found value.
    pub gap_to_bound: f64,
}

/// Minimum of the potential over the sphere by multistart projected
/// gradient descent with deterministic candidate injection.
///
/// For antipodal configurations in general position the facet normals of the
/// hull are injected as starts: the minimal-offset normal has all its dots
/// within [-1/sqrt(d), 1/sqrt(d)], so with h non-decreasing its potential
/// already sits at or below the cross-polytope closed form, and for the
/// cross-polytope itself the normals are exactly the dual-cube vertices.
pub fn polarization_value(
    cfg: &GenericConfig,
    g: &PotentialFunction,
    n_starts: usize,
    rng_seed: u64,
) -> Result<PolarizationReport> {
    let d = cfg.dim();
    let mut rng = seeded_rng(rng_seed);

    let mut candidates: Vec<UnitVector> = Vec::new();
    if let Some(anti) = crate::covering::detect_antipodal(cfg) {
        if is_general_position(&anti) {
            if let Ok(hull) = enumerate_facets(&anti) {
                candidates.extend(hull.facets.iter().map(|f| f.normal.clone()));
            }
        }
    }
    let n_injected = candidates.len();
    for _ in 0..n_starts.max(1) {
        candidates.push(random_unit_vector(d, &mut rng));
    }

    let mut best: Option<(f64, UnitVector, usize)> = None;
    for (idx, start) in candidates.into_iter().enumerate() {
        let mut x = start;
        let mut value = potential_at(cfg, g, &x);
        if !value.is_finite() {
            // Descent cannot start on a singularity; nudge off it.
            let jitter = random_unit_vector(d, &mut rng);
            let nudged = x.coords() + 1e-6 * jitter.coords();
            match normalize(&nudged) {
                Ok(u) => {
                    x = u;
                    value = potential_at(cfg, g, &x);
                }
                Err(_) => continue,
            }
            if !value.is_finite() {
                continue;
            }
        }
        let mut step = 0.5;
        for _ in 0..10_000 {
            let grad = potential_gradient(cfg, g, &x);
            let tangent = &grad - x.coords() * grad.dot(x.coords());
            if !tangent.iter().all(|v| v.is_finite()) {
                break;
            }
            if tangent.norm() < 1e-10 {
                break;
            }
            let trial_vec: DVector<f64> = x.coords() - step * &tangent;
            match normalize(&trial_vec) {
                Ok(trial) => {
                    let tv = potential_at(cfg, g, &trial);
                    if tv < value {
                        value = tv;
                        x = trial;
                        step = (step * 1.2).min(1.0);
                    } else {
                        step *= 0.5;
                    }
                }
                Err(_) => step *= 0.5,
            }
            if step < 1e-16 {
                break;
            }
        }
        if best
            .as_ref()
            .map_or(true, |(bv, _, _)| value < *bv)
        {
            best = Some((value, x, idx));
        }
    }

    let (value, minimizer, idx) = best.ok_or(CrossError::NonFiniteEverywhere)?;
    let method = if idx < n_injected {
        PolarizationMethod::CandidateExact
    } else {
        PolarizationMethod::MultistartDescent
    };
    Ok(PolarizationReport {
        value,
        minimizer,
        method,
        gap_to_bound: cross_polytope_closed_form(d, g) - value,
    })
}

/// P^g of the regular cross-polytope: d (g(1/sqrt(d)) + g(-1/sqrt(d))).
pub fn cross_polytope_closed_form(d: usize, g: &PotentialFunction) -> f64 {
    let t = 1.0 / (d as f64).sqrt();
    d as f64 * (g.eval(t) + g.eval(-t))
}

/// Even quadratic p(t) = a t^2 + b interpolating h and h' at ±1/sqrt(d),
/// plus the grid minimum of h - p (non-negative when g'' is convex).
#[derive(Debug, Clone, Copy)]
pub struct HermiteQuadratic {
    pub a: f64,
    pub b: f64,
    pub min_defect: f64,
}

pub fn hermite_even_quadratic(g: &PotentialFunction, d: usize) -> HermiteQuadratic {
    let t = 1.0 / (d as f64).sqrt();
    // p'(t) = 2 a t matched to h'(t) at t = 1/sqrt(d); evenness of h makes
    // the four Hermite conditions collapse to these two.
    let a = (d as f64).sqrt() / 2.0 * g.h_deriv(t);
    let b = g.h_eval(t) - a / d as f64;
    let n = 10_000;
    let lo = -1.0 + 1e-6;
    let hi = 1.0 - 1e-6;
    let step = (hi - lo) / (n - 1) as f64;
    let min_defect = (0..n)
        .map(|i| {
            let t = lo + step * i as f64;
            g.h_eval(t) - (a * t * t + b)
        })
        .fold(f64::INFINITY, f64::min);
    HermiteQuadratic { a, b, min_defect }
}

/// Outcome of checking P^g(cfg) against the cross-polytope closed form.
#[derive(Debug, Clone)]
pub struct PolarizationChain {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub equality: bool,
    pub is_cross_polytope: bool,
}

/// Verifies P^g(cfg) <= d (g(1/sqrt(d)) + g(-1/sqrt(d))) for an antipodal
/// configuration, after certifying the g'' hypotheses. The right-hand side
/// is always the closed form, never re-derived by optimization.
pub fn verify_polarization_chain(
    cfg: &AntipodalConfig,
    g: &PotentialFunction,
    n_starts: usize,
    rng_seed: u64,
) -> Result<PolarizationChain> {
    g.second_derivative_certificate()?;
    let lhs = polarization_value(&cfg.into(), g, n_starts, rng_seed)?.value;
    let rhs = cross_polytope_closed_form(cfg.dim(), g);
    Ok(PolarizationChain {
        lhs,
        rhs,
        holds: lhs <= rhs + 1e-8,
        equality: (lhs - rhs).abs() <= 1e-6,
        is_cross_polytope: cfg.is_cross_polytope(),
    })
}
