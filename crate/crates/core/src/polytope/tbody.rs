//! The body `T(r)`: the h-convex hull of two points at distance `r`.
//!
//! Any h-convex body containing `O` and a point at distance `r` contains a
//! copy of `T(r)`, so a volume bound caps how far the body reaches.

use super::PolytopeSpec;
use crate::error::{Error, Result};
use crate::geometry::{boost_to_origin, half_space_to_ideal, polar_point, Direction};
use crate::horoball::{horoball_transform, Horoball};
use crate::quadrature::{build_quadrature, integrate_gl, unit_ball_volume, QuadratureKind};

/// `V(T(r)) = ω_n ∫₁^{e^r} S(y)ⁿ / y^{n+1} dy` with
/// `S(y) = √((e^r + 1)y - y²) - e^{r/2}`, integrated adaptively in `log y`.
pub fn t_body_volume(r: f64, n: usize) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidArgument(format!("r = {r} must be positive")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("n must be ≥ 1".into()));
    }
    let er = r.exp();
    let half = (0.5 * r).exp();
    // y = e^v turns dy / y^{n+1} into dv / y^n
    let f = |v: f64| {
        let y = v.exp();
        let s = (((er + 1.0) * y - y * y).max(0.0)).sqrt() - half;
        (s.max(0.0) / y).powi(n as i32)
    };
    let rough = integrate_gl(32, 0.0, r, f).abs();
    let value = adaptive(&f, 0.0, r, 1e-13 * rough.max(1e-300), 30);
    Ok(unit_ball_volume(n) * value)
}

/// Absolute-tolerance bisection around a 16-point Gauss–Legendre rule.
fn adaptive(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: usize) -> f64 {
    let whole = integrate_gl(16, a, b, f);
    let mid = 0.5 * (a + b);
    let left = integrate_gl(16, a, mid, f);
    let right = integrate_gl(16, mid, b, f);
    let split = left + right;
    if depth == 0 || (split - whole).abs() <= tol {
        split
    } else {
        adaptive(f, a, mid, 0.5 * tol, depth - 1) + adaptive(f, mid, b, 0.5 * tol, depth - 1)
    }
}

/// Closed-form lower bound for `V(T(r))` with `q = (e^{r/2}-1)/(e^{r/2}+1)`
/// and `A = (e^r+1)/2`:
/// `ω_n qⁿ [log A + Σ_{k<n} (-1)^{n-k} C(n,k)/(n-k) (1 - A^{k-n})]`.
pub fn t_body_lower_bound(r: f64, n: usize) -> f64 {
    let half = (0.5 * r).exp();
    let q = (half - 1.0) / (half + 1.0);
    let a = 0.5 * (r.exp() + 1.0);
    let mut sum = a.ln();
    let mut binom = 1.0;
    for k in 0..n {
        let sign = if (n - k).is_multiple_of(2) { 1.0 } else { -1.0 };
        sum += sign * binom / (n - k) as f64 * (1.0 - a.powi(k as i32 - n as i32));
        binom = binom * (n - k) as f64 / (k + 1) as f64;
    }
    unit_ball_volume(n) * q.powi(n as i32) * sum
}

/// Wulff approximation of `T(r)` centred at the midpoint of its two tips.
///
/// In the half-space chart the tips are `(0, 1)` and `(0, e^r)`; each
/// horoball is tangent at `p = e^{r/2} θ` with parameter 0, so its boundary
/// passes through both tips. Directions `θ ∈ S^{n-1}` are the two points of
/// `S^0` for `n = 1`, `count` equispaced angles for `n = 2`, and `count`
/// seeded samples beyond. Everything is then boosted so the midpoint sits at `O`.
pub fn t_body_wulff_spec(r: f64, n: usize, count: usize) -> Result<PolytopeSpec> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!("r = {r} must be positive")));
    }
    let thetas: Vec<Vec<f64>> = match n {
        0 => return Err(Error::InvalidArgument("n must be ≥ 1".into())),
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..count)
            .map(|k| {
                let a = std::f64::consts::TAU * k as f64 / count as f64;
                vec![a.cos(), a.sin()]
            })
            .collect(),
        _ => build_quadrature(n - 1, count.max(4), QuadratureKind::default_for(n - 1), 0x7b0d)?
            .nodes
            .into_iter()
            .map(|d| d.components().to_vec())
            .collect(),
    };
    let scale = (0.5 * r).exp();
    let shift = boost_to_origin(&polar_point(0.5 * r, &Direction::reference(n)));
    let horoballs = thetas
        .iter()
        .map(|t| {
            let p: Vec<f64> = t.iter().map(|c| scale * c).collect();
            let h = horoball_transform(&Horoball::new(half_space_to_ideal(&p), 0.0), &shift);
            (h.center, h.s)
        })
        .collect();
    PolytopeSpec::new(n, horoballs, false)
}

/// Smallest `r` with `V(T(r)) > M`, to within 1e-10.
pub fn boundedness_bound(m: f64, n: usize) -> Result<f64> {
    if !(m > 0.0) {
        return Err(Error::InvalidArgument(format!("M = {m} must be positive")));
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while t_body_volume(hi, n)? <= m {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if t_body_volume(mid, n)? > m {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
