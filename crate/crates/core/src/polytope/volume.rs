//! Volumes and facet areas.

use rayon::prelude::*;

use super::{build_polytope, HConvexPolytope};
use crate::error::{Error, Result};
use crate::geometry::Direction;
use crate::horoball::horoball_radial;
use crate::quadrature::{
    build_quadrature, default_node_count, integrate_gl, sinh_power_integral, QuadratureKind, SphereQuadrature,
};

/// Default central-difference step for [`facet_area_fd`].
pub const DEFAULT_FD_STEP: f64 = 1e-4;

/// Sample count for facet areas in dimensions where no exact method exists.
const DEFAULT_FACET_SAMPLES: usize = 200_000;

/// How [`facet_area_with`] measures the facet shadow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FacetAreaMethod {
    /// Exact for `n ≤ 2`; seeded sampling with a default budget otherwise.
    Exact,
    /// Sampling over the bounding box of the smallest disk (`n ≥ 2`).
    MonteCarlo { samples: usize, seed: u64 },
}

/// `V(P) ≈ Σ_k w_k ∫₀^{ρ(θ_k)} sinhⁿ r dr`.
///
/// On the circle with an equiangular grid the sum is taken piecewise: each
/// boundary arc is integrated by the trapezoid rule on the grid nodes inside
/// it plus its two endpoints, so the radial function is smooth on every panel
/// and the result varies smoothly with the spec.
pub fn volume(p: &HConvexPolytope, quad: &SphereQuadrature) -> Result<f64> {
    if quad.n != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: quad.n,
        });
    }
    if p.is_degenerate() {
        return Ok(0.0);
    }
    let n = p.dim();
    if n == 1 && quad.kind == QuadratureKind::UniformGrid && !p.planar_arcs().is_empty() {
        return Ok(split_trapezoid(p, quad.len()));
    }
    let terms: Vec<f64> = quad
        .nodes
        .par_iter()
        .zip(quad.weights.par_iter())
        .map(|(t, w)| w * sinh_power_integral(n, p.radial_unchecked(t)))
        .collect();
    Ok(terms.iter().sum())
}

fn split_trapezoid(p: &HConvexPolytope, count: usize) -> f64 {
    let step = std::f64::consts::TAU / count as f64;
    let mut total = 0.0;
    for arc in p.planar_arcs() {
        let h = p.spec().horoball(arc.facet);
        let f = |phi: f64| sinh_power_integral(1, horoball_radial(&h, &Direction::from_angle(phi)).expect("x > 0").value());
        let end = arc.start + arc.len;
        let first = (arc.start / step).floor() as i64 + 1;
        let last = (end / step).ceil() as i64 - 1;
        let (mut prev_phi, mut prev_f) = (arc.start, f(arc.start));
        for k in first..=last {
            let phi = k as f64 * step;
            if phi <= prev_phi || phi >= end {
                continue;
            }
            let v = f(phi);
            total += 0.5 * (phi - prev_phi) * (v + prev_f);
            prev_phi = phi;
            prev_f = v;
        }
        total += 0.5 * (end - prev_phi) * (f(end) + prev_f);
    }
    total
}

/// Volume without a user-supplied quadrature: Gauss–Legendre along every
/// boundary arc for `n = 1` (exact to rounding), the default rule otherwise.
pub fn volume_exact(p: &HConvexPolytope) -> Result<f64> {
    if p.is_degenerate() {
        return Ok(0.0);
    }
    if p.dim() != 1 {
        let n = p.dim();
        let quad = build_quadrature(n, default_node_count(n), QuadratureKind::default_for(n), 0)?;
        return volume(p, &quad);
    }
    let mut total = 0.0;
    for arc in p.planar_arcs() {
        let e = &p.spec().horoballs()[arc.facet].0;
        let s = p.spec().horoballs()[arc.facet].1;
        let anchor = e.antipode().angle();
        let panels = (arc.len / 0.1).ceil().max(1.0) as usize;
        let width = arc.len / panels as f64;
        for k in 0..panels {
            let a = arc.start + k as f64 * width;
            total += integrate_gl(20, a, a + width, |phi| {
                // θ·e = -cos(φ - angle(-e)) on this arc
                let c = -(phi - anchor).cos();
                let t = (s.exp() + ((2.0 * s).exp_m1() + c * c).sqrt()) / (1.0 - c);
                // cosh ρ - 1 with t = e^ρ
                0.5 * (t - 1.0) * (t - 1.0) / t
            });
        }
    }
    Ok(total)
}

/// `S(P, e_i)`: zero when the horoball does not touch the body in a facet.
pub fn facet_area(p: &HConvexPolytope, i: usize) -> Result<f64> {
    facet_area_with(p, i, FacetAreaMethod::Exact)
}

pub fn facet_area_with(p: &HConvexPolytope, i: usize, method: FacetAreaMethod) -> Result<f64> {
    p.require_interior()?;
    if i >= p.len() {
        return Err(Error::InvalidArgument(format!("facet index {i} out of range 0..{}", p.len())));
    }
    if !p.facet_nonempty()[i] {
        return Ok(0.0);
    }
    let n = p.dim();
    let facet = p.facet(i);
    if !facet.shadow.is_solid() {
        return Ok(0.0);
    }
    let euclidean = match method {
        FacetAreaMethod::MonteCarlo { samples, seed } if n >= 2 => facet.shadow_mc(n, samples, seed),
        _ => facet.shadow.euclidean_area(n, DEFAULT_FACET_SAMPLES, 0),
    };
    Ok(euclidean / facet.height.powi(n as i32))
}

/// `(V(x + δe_i) - V(x - δe_i)) / 2δ` with a fixed quadrature.
pub fn facet_area_fd(p: &HConvexPolytope, i: usize, delta: f64, quad: &SphereQuadrature) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!("step δ = {delta} must be positive")));
    }
    let xs = p.spec().values();
    if i >= xs.len() {
        return Err(Error::InvalidArgument(format!("facet index {i} out of range 0..{}", xs.len())));
    }
    if xs[i] - delta <= 0.0 {
        return Err(Error::InvalidArgument(format!("x[{i}] - δ must stay positive")));
    }
    let mut up = xs.clone();
    up[i] += delta;
    let mut down = xs;
    down[i] -= delta;
    let v_up = volume(&build_polytope(&p.spec().with_values(&up)?)?, quad)?;
    let v_down = volume(&build_polytope(&p.spec().with_values(&down)?)?, quad)?;
    Ok((v_up - v_down) / (2.0 * delta))
}

impl super::shadow::Facet {
    fn shadow_mc(&self, n: usize, samples: usize, seed: u64) -> f64 {
        match &self.shadow {
            super::shadow::Shadow::Interval { a, b } => (b - a).max(0.0),
            s => super::shadow::mc_intersection_volume(s.disks(), n, samples, seed),
        }
    }
}
