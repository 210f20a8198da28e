//! Brute-force reference computations. They share no code path with the
//! radial volume formula or the solver loop, so tests can hold those to them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{polar_point, BallPoint, Direction, ModelPoint};
use crate::horoball::{busemann_value, horoball_contains, Horoball};
use crate::measure::DiscreteMeasure;
use crate::polytope::{extremal_radii, volume, volume_exact, HConvexPolytope};
use crate::quadrature::{build_quadrature, default_node_count, unit_ball_volume, QuadratureKind};
use crate::solver::{even_polytope, phi_p, rescale_to_constraint, Constraint};

const CHUNK: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Volume by sampling the Euclidean ball of radius `tanh(R/2)` in the Poincaré
/// model, weighting hits by the density `(2 / (1 - |Y|²))^{n+1}`.
pub fn mc_volume(p: &HConvexPolytope, samples: usize, seed: u64) -> Result<McEstimate> {
    if samples < 10_000 {
        return Err(Error::InvalidArgument(format!("need at least 10⁴ samples, got {samples}")));
    }
    if p.is_degenerate() {
        return Ok(McEstimate { value: 0.0, std_error: 0.0, samples, seed });
    }
    let dim = p.dim() + 1;
    let big = extremal_radii(p)?.0;
    let rho = (0.5 * big).tanh() * (1.0 + 1e-9);
    let horoballs: Vec<Horoball<f64>> = (0..p.len()).map(|i| p.spec().horoball(i)).collect();
    let chunks = samples.div_ceil(CHUNK);
    let sums: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let mut y = vec![0.0; dim];
            let (mut s1, mut s2) = (0.0, 0.0);
            for _ in 0..CHUNK.min(samples - k * CHUNK) {
                // uniform point: Gaussian direction, radius ρ U^{1/dim}
                for v in y.iter_mut() {
                    *v = rng.sample(StandardNormal);
                }
                let len = y.iter().map(|v| v * v).sum::<f64>().sqrt();
                let r = rho * rng.random::<f64>().powf(1.0 / dim as f64);
                for v in y.iter_mut() {
                    *v *= r / len;
                }
                let r2 = r * r;
                if r2 >= 1.0 {
                    continue;
                }
                let x = ModelPoint::Ball(BallPoint::new(y.clone()).expect("inside the unit ball")).to_hyperboloid();
                if horoballs.iter().all(|b| horoball_contains(b, &x, false)) {
                    let w = (2.0 / (1.0 - r2)).powi(dim as i32);
                    s1 += w;
                    s2 += w * w;
                }
            }
            (s1, s2)
        })
        .collect();
    let (s1, s2) = sums.iter().fold((0.0, 0.0), |acc, s| (acc.0 + s.0, acc.1 + s.1));
    let count = samples as f64;
    let mean = s1 / count;
    let var = (s2 / count - mean * mean).max(0.0) * count / (count - 1.0);
    let scale = unit_ball_volume(dim) * rho.powi(dim as i32);
    Ok(McEstimate {
        value: scale * mean,
        std_error: scale * (var / count).sqrt(),
        samples,
        seed,
    })
}

/// Distance along `θ` to the horosphere of `b`, by bracketing and bisection
/// on the Busemann value. Infinite when the ray never leaves the horoball.
pub fn radial_bisection(b: &Horoball<f64>, theta: &Direction<f64>) -> f64 {
    let f = |r: f64| busemann_value(&b.center, &polar_point(r, theta)) - b.s;
    let mut hi = 1.0;
    while f(hi) < 0.0 {
        hi *= 2.0;
        if hi > 700.0 {
            return f64::INFINITY;
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Exhaustive search over the constraint slice for `m ≤ 2` pairs: the ray
/// `(cos t, sin t)` for `t = kπ/(2·resolution)`, `0 < k < resolution`, is
/// rescaled onto `Φ_p = 1` (maximizing `V`) for `p ≥ 0` or onto `V = v0`
/// (minimizing `Φ_p`) for `p < 0`.
pub fn grid_search_even(mu: &DiscreteMeasure, p: f64, v0: f64, resolution: usize) -> Result<Vec<f64>> {
    let m = mu.pairs()?.len();
    if m > 2 {
        return Err(Error::InvalidArgument(format!("grid search handles m ≤ 2 pairs, got {m}")));
    }
    if resolution < 100 {
        return Err(Error::InvalidArgument(format!("resolution {resolution} is below 100")));
    }
    let target = if p >= 0.0 { Constraint::Phi(1.0) } else { Constraint::Volume(v0) };
    let rays: Vec<Vec<f64>> = if m == 1 {
        vec![vec![1.0]]
    } else {
        (1..resolution)
            .map(|k| {
                let t = k as f64 / resolution as f64 * std::f64::consts::FRAC_PI_2;
                vec![t.cos(), t.sin()]
            })
            .collect()
    };
    let n = mu.dim();
    let quad = if n == 1 {
        None
    } else {
        Some(build_quadrature(n, default_node_count(n), QuadratureKind::default_for(n), 0)?)
    };
    let scored = rays
        .par_iter()
        .map(|ray| {
            let z = rescale_to_constraint(ray, mu, p, target)?;
            let score = if p >= 0.0 {
                let body = even_polytope(mu, &z)?;
                match &quad {
                    Some(q) => volume(&body, q)?,
                    None => volume_exact(&body)?,
                }
            } else {
                -phi_p(&z, mu, p)?
            };
            Ok((score, z))
        })
        .collect::<Result<Vec<_>>>()?;
    let best = scored
        .into_iter()
        .reduce(|a, b| if b.0 > a.0 { b } else { a })
        .expect("at least one ray");
    Ok(best.1)
}
