//! Node sets on `S^n` and the radial integrals `∫₀^ρ sinhⁿ r dr`.

use std::collections::HashMap;
use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex, OnceLock};

use gauss_quad::legendre::GaussLegendre;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Direction;
use crate::scalar::Real;

/// Layout of a [`SphereQuadrature`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadratureKind {
    /// Equiangular nodes on the circle (`n = 1` only).
    UniformGrid,
    /// Gauss–Legendre in `cos φ` times equispaced longitudes (`n = 2` only).
    ProductRule,
    /// Normalized Gaussian samples with equal weights, any `n`.
    MonteCarlo,
}

impl QuadratureKind {
    /// Deterministic default for the dimension: grid, product rule, then MC.
    pub fn default_for(n: usize) -> Self {
        match n {
            1 => QuadratureKind::UniformGrid,
            2 => QuadratureKind::ProductRule,
            _ => QuadratureKind::MonteCarlo,
        }
    }
}

/// Weighted node set approximating integrals over `S^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereQuadrature {
    pub n: usize,
    pub nodes: Vec<Direction<f64>>,
    pub weights: Vec<f64>,
    pub kind: QuadratureKind,
    pub seed: u64,
}

impl SphereQuadrature {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ w_k f(θ_k)` summed in node order.
    pub fn integrate(&self, f: impl Fn(&Direction<f64>) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(d, w)| w * f(d)).sum()
    }
}

/// Default node count used by the volume and solver paths.
pub fn default_node_count(n: usize) -> usize {
    match n {
        1 => 4096,
        _ => 16384,
    }
}

/// Builds the quadrature; identical arguments give bit-identical output.
pub fn build_quadrature(n: usize, count: usize, kind: QuadratureKind, seed: u64) -> Result<SphereQuadrature> {
    if n == 0 {
        return Err(Error::InvalidArgument("sphere dimension must be ≥ 1".into()));
    }
    if count < 4 {
        return Err(Error::InvalidArgument(format!("need at least 4 nodes, got {count}")));
    }
    let (nodes, weights) = match (kind, n) {
        (QuadratureKind::UniformGrid, 1) => {
            let w = std::f64::consts::TAU / count as f64;
            let nodes = (0..count)
                .map(|k| Direction::from_angle(std::f64::consts::TAU * k as f64 / count as f64))
                .collect();
            (nodes, vec![w; count])
        }
        (QuadratureKind::ProductRule, 2) => product_rule(count),
        (QuadratureKind::MonteCarlo, _) => monte_carlo(n, count, seed),
        _ => {
            return Err(Error::UnsupportedQuadrature(format!(
                "{kind:?} is not available on S^{n}"
            )))
        }
    };
    Ok(SphereQuadrature {
        n,
        nodes,
        weights,
        kind,
        seed,
    })
}

fn product_rule(count: usize) -> (Vec<Direction<f64>>, Vec<f64>) {
    let lat = ((count as f64 / 2.0).sqrt().round() as usize).max(2);
    let lon = count.div_ceil(lat).max(3);
    let rule = gauss_legendre(lat);
    let dphi = std::f64::consts::TAU / lon as f64;
    let mut nodes = Vec::with_capacity(lat * lon);
    let mut weights = Vec::with_capacity(lat * lon);
    for &(z, wz) in rule.iter() {
        let rho = (1.0 - z * z).sqrt();
        for j in 0..lon {
            let phi = dphi * j as f64;
            nodes.push(Direction::new(vec![rho * phi.cos(), rho * phi.sin(), z]).expect("unit node"));
            weights.push(wz * dphi);
        }
    }
    (nodes, weights)
}

fn monte_carlo(n: usize, count: usize, seed: u64) -> (Vec<Direction<f64>>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nodes = Vec::with_capacity(count);
    while nodes.len() < count {
        let v: Vec<f64> = (0..=n).map(|_| StandardNormal.sample(&mut rng)).collect();
        if let Ok(d) = Direction::new(v) {
            nodes.push(d);
        }
    }
    let w = sphere_area(n) / count as f64;
    (nodes, vec![w; count])
}

type Rule = Arc<[(f64, f64)]>;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, cached per degree.
pub(crate) fn gauss_legendre(degree: usize) -> Rule {
    static CACHE: OnceLock<Mutex<HashMap<usize, Rule>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("quadrature cache poisoned");
    guard
        .entry(degree)
        .or_insert_with(|| {
            let rule = GaussLegendre::new(NonZeroUsize::new(degree.max(1)).expect("nonzero"));
            let mut pairs: Vec<(f64, f64)> = rule.as_node_weight_pairs().to_vec();
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            pairs.into()
        })
        .clone()
}

/// `∫_a^b f` with a fixed Gauss–Legendre rule of the given degree.
pub(crate) fn integrate_gl(degree: usize, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    gauss_legendre(degree).iter().map(|&(x, w)| w * f(mid + half * x)).sum::<f64>() * half
}

/// Volume `ω_k` of the unit ball in `R^k`.
pub fn unit_ball_volume(k: usize) -> f64 {
    match k {
        0 => 1.0,
        1 => 2.0,
        _ => std::f64::consts::TAU / k as f64 * unit_ball_volume(k - 2),
    }
}

/// Area `|S^n| = (n+1) ω_{n+1}` of the unit sphere in `R^{n+1}`.
pub fn sphere_area(n: usize) -> f64 {
    (n as f64 + 1.0) * unit_ball_volume(n + 1)
}

/// Below this radius the recurrence loses digits to cancellation and a
/// Gauss–Legendre rule on `[0, ρ]` is used instead.
const SMALL_RHO: f64 = 1.0;

/// `I_n(ρ) = ∫₀^ρ sinhⁿ r dr`.
pub fn sinh_power_integral<T: Real>(n: usize, rho: T) -> T {
    if !(rho > T::zero()) {
        return T::zero();
    }
    if rho.as_f64() < SMALL_RHO {
        let r = rho.as_f64();
        let v = integrate_gl(24, 0.0, r, |t| t.sinh().powi(n as i32));
        return T::lit(v);
    }
    let (sh, ch) = (rho.sinh(), rho.cosh());
    // I_0 and I_1 seed the even and odd chains of the recurrence.
    let mut prev = if n.is_multiple_of(2) { rho } else { ch - T::one() };
    let mut k = if n.is_multiple_of(2) { 0 } else { 1 };
    while k < n {
        k += 2;
        let kt = T::lit(k as f64);
        prev = (sh.powi(k as i32 - 1) * ch - (kt - T::one()) * prev) / kt;
    }
    prev
}
