//! Discrete even horospherical p-Minkowski problem.
//!
//! For `p ≥ 0` the solver maximizes `V(P(z))` on the slice `Φ_p(z) = 1`; for
//! `p < 0` it minimizes `Φ_p(z)` on `V(P(z)) = V₀`. The unknown is the paired
//! half `z ∈ R₊^m`, so every iterate is origin symmetric. At a critical point
//! `S(P, e_i) = λ a_i e^{p z_i}`, which is what [`residual`] certifies.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{DiscreteMeasure, DIRECTION_TOL};
use crate::polytope::{
    boundedness_bound, build_polytope, facet_area, volume, volume_exact, HConvexPolytope, PolytopeSpec,
};
use crate::quadrature::{build_quadrature, QuadratureKind, SphereQuadrature};

/// How the volume gradient (the paired facet areas) is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GradientMode {
    /// Facet areas computed from the facet geometry.
    #[default]
    Direct,
    /// Central differences of the volume in each paired coordinate.
    FiniteDifference,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub p: f64,
    /// Volume level for `p < 0`; ignored otherwise.
    pub v0: f64,
    /// Quadrature size for volumes. `None` uses the exact arc rule for `n = 1`
    /// and the default rule otherwise.
    pub quad_nodes: Option<usize>,
    pub quad_kind: Option<QuadratureKind>,
    /// Initial step, as the largest relative change of any `z_k`.
    pub step: f64,
    pub backtrack: f64,
    pub max_iters: usize,
    pub tol: f64,
    pub gradient: GradientMode,
    /// Step of the finite-difference gradient and of the spot checks.
    pub fd_step: f64,
    /// Iterations between direct versus finite-difference gradient checks; 0 disables them.
    pub check_every: usize,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            p: 0.0,
            v0: 1.0,
            quad_nodes: None,
            quad_kind: None,
            step: 0.05,
            backtrack: 0.5,
            max_iters: 500,
            tol: 1e-3,
            gradient: GradientMode::Direct,
            fd_step: 1e-5,
            check_every: 10,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn with_p(p: f64) -> Self {
        Self { p, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, v: f64| Err(Error::InvalidArgument(format!("{field} = {v} is out of range")));
        if !self.p.is_finite() {
            return bad("p", self.p);
        }
        if !(self.v0 > 0.0 && self.v0.is_finite()) {
            return bad("v0", self.v0);
        }
        if !(self.step > 0.0 && self.step < 1.0) {
            return bad("step", self.step);
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return bad("backtrack", self.backtrack);
        }
        if !(self.tol > 0.0) {
            return bad("tol", self.tol);
        }
        if !(self.fd_step > 0.0) {
            return bad("fd_step", self.fd_step);
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidArgument("max_iters must be ≥ 1".into()));
        }
        if self.quad_nodes == Some(0) {
            return Err(Error::InvalidArgument("quad_nodes must be ≥ 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SolverResult {
    pub polytope: HConvexPolytope,
    /// Support values of the pairs, in the order of [`DiscreteMeasure::pairs`].
    pub z: Vec<f64>,
    pub lambda: f64,
    pub residual_max_rel: f64,
    /// Objective after every accepted step, starting at the initial point.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub volume: f64,
    /// Largest relative gap between direct and finite-difference gradients at each spot check.
    pub gradient_checks: Vec<f64>,
    /// Accepted iterates with `max z` above the a-priori bound (`p < 0` only).
    pub bound_violations: usize,
}

/// The constraint slice targeted by [`rescale_to_constraint`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Constraint {
    Phi(f64),
    Volume(f64),
}

/// `Φ_p(x) = (1/p) Σ a_i (e^{p x_i} - 1)`, or `Σ a_i x_i` at `p = 0`, for the
/// paired half `x` of an even measure.
pub fn phi_p(x: &[f64], mu: &DiscreteMeasure, p: f64) -> Result<f64> {
    let pairs = mu.pairs()?;
    check_len(x, pairs.len())?;
    Ok(pair_weights(mu, &pairs).iter().zip(x).map(|(w, &z)| w * phi_term(z, p)).sum())
}

fn phi_term(z: f64, p: f64) -> f64 {
    if p == 0.0 {
        z
    } else {
        (p * z).exp_m1() / p
    }
}

fn pair_weights(mu: &DiscreteMeasure, pairs: &[(usize, usize)]) -> Vec<f64> {
    pairs.iter().map(|&(i, j)| mu.atoms()[i].1 + mu.atoms()[j].1).collect()
}

fn check_len(x: &[f64], m: usize) -> Result<()> {
    if x.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: x.len(),
        });
    }
    if let Some(k) = x.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::InvalidArgument(format!("x[{k}] = {} must be finite and ≥ 0", x[k])));
    }
    Ok(())
}

/// `t·x` with `t > 0` chosen so the constraint holds: exactly for `Φ_0`, by
/// bisection for `Φ_p`, and by safeguarded Newton for the volume.
pub fn rescale_to_constraint(x: &[f64], mu: &DiscreteMeasure, p: f64, target: Constraint) -> Result<Vec<f64>> {
    let pairs = mu.pairs()?;
    check_len(x, pairs.len())?;
    if x.iter().any(|v| *v <= 0.0) {
        return Err(Error::InvalidArgument("rescaling needs x > 0".into()));
    }
    let t = match target {
        Constraint::Phi(c) => {
            let w = pair_weights(mu, &pairs);
            let phi = |t: f64| w.iter().zip(x).map(|(w, z)| w * phi_term(t * z, p)).sum::<f64>();
            phi_scale(&phi, &w, p, c)?
        }
        Constraint::Volume(c) => {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::Unreachable(format!("volume level {c} must be positive")));
            }
            let eval = Evaluator::new(mu, &SolverConfig::default())?;
            eval.volume_scale(x, c)?
        }
    };
    Ok(x.iter().map(|z| t * z).collect())
}

fn phi_scale(phi: &impl Fn(f64) -> f64, w: &[f64], p: f64, c: f64) -> Result<f64> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Unreachable(format!("Φ level {c} must be positive")));
    }
    if p == 0.0 {
        return Ok(c / phi(1.0));
    }
    if p < 0.0 {
        let sup = w.iter().sum::<f64>() / -p;
        if c >= sup {
            return Err(Error::Unreachable(format!("Φ_p is bounded by Σa/|p| = {sup}, below {c}")));
        }
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while phi(hi) < c {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Unreachable(format!("Φ_p never reaches {c}")));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if phi(mid) < c {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (flo, fhi) = (phi(lo), phi(hi));
    Ok(if (c - flo).abs() < (fhi - c).abs() { lo } else { hi })
}

/// `(λ, max_rel)` with `λ = Σ S(P, e_i) / Σ a_i e^{p u_i}` and
/// `max_rel = max_i |e^{-p u_i} S(P, e_i) - λ a_i| / (λ a_i)`.
pub fn residual(p_body: &HConvexPolytope, mu: &DiscreteMeasure, p: f64) -> Result<(f64, f64)> {
    if mu.dim() != p_body.dim() {
        return Err(Error::DimensionMismatch {
            expected: p_body.dim(),
            found: mu.dim(),
        });
    }
    let dirs = p_body.spec().directions();
    let mut rows = Vec::with_capacity(mu.len());
    for (k, (e, a)) in mu.atoms().iter().enumerate() {
        let j = dirs.iter().position(|d| d.chord(e) < DIRECTION_TOL).ok_or(Error::MismatchedDirections(k))?;
        rows.push((*a, p_body.canonical_support()[j], facet_area(p_body, j)?));
    }
    let total: f64 = rows.iter().map(|r| r.2).sum();
    let norm: f64 = rows.iter().map(|&(a, u, _)| a * (p * u).exp()).sum();
    let lambda = total / norm;
    let max_rel = rows
        .iter()
        .map(|&(a, u, s)| ((-p * u).exp() * s - lambda * a).abs() / (lambda * a))
        .fold(0.0, f64::max);
    Ok((lambda, max_rel))
}

/// The even polytope `P(z)` over the directions of `μ`, with `z` giving the
/// value of each antipodal pair in the order of [`DiscreteMeasure::pairs`].
pub fn even_polytope(mu: &DiscreteMeasure, z: &[f64]) -> Result<HConvexPolytope> {
    let eval = Evaluator::new(mu, &SolverConfig::default())?;
    check_len(z, eval.pairs.len())?;
    eval.polytope(z)
}

/// Volume, gradients and specs for one measure and configuration.
struct Evaluator<'a> {
    mu: &'a DiscreteMeasure,
    pairs: Vec<(usize, usize)>,
    weights: Vec<f64>,
    quad: Option<SphereQuadrature>,
    fd_quad: Option<SphereQuadrature>,
    cfg: SolverConfig,
}

impl<'a> Evaluator<'a> {
    fn new(mu: &'a DiscreteMeasure, cfg: &SolverConfig) -> Result<Self> {
        let pairs = mu.pairs()?;
        let n = mu.dim();
        let quad = match cfg.quad_nodes {
            Some(count) => Some(build_quadrature(n, count, cfg.quad_kind.unwrap_or(QuadratureKind::default_for(n)), cfg.seed)?),
            None if n == 1 => None,
            None => Some(build_quadrature(
                n,
                crate::quadrature::default_node_count(n),
                cfg.quad_kind.unwrap_or(QuadratureKind::default_for(n)),
                cfg.seed,
            )?),
        };
        Ok(Self {
            weights: pair_weights(mu, &pairs),
            fd_quad: quad.clone(),
            mu,
            pairs,
            quad,
            cfg: cfg.clone(),
        })
    }

    fn spec(&self, z: &[f64]) -> Result<PolytopeSpec> {
        let mut xs = vec![0.0; self.mu.len()];
        for (k, &(i, j)) in self.pairs.iter().enumerate() {
            xs[i] = z[k];
            xs[j] = z[k];
        }
        let horoballs = self.mu.atoms().iter().zip(xs).map(|((e, _), x)| (e.clone(), x)).collect();
        PolytopeSpec::new(self.mu.dim(), horoballs, true)
    }

    fn polytope(&self, z: &[f64]) -> Result<HConvexPolytope> {
        build_polytope(&self.spec(z)?)
    }

    fn volume_of(&self, p: &HConvexPolytope) -> Result<f64> {
        match &self.quad {
            Some(q) => volume(p, q),
            None => volume_exact(p),
        }
    }

    fn phi(&self, z: &[f64]) -> f64 {
        self.weights.iter().zip(z).map(|(w, &x)| w * phi_term(x, self.cfg.p)).sum()
    }

    fn phi_grad(&self, z: &[f64]) -> Vec<f64> {
        self.weights.iter().zip(z).map(|(w, &x)| w * (self.cfg.p * x).exp()).collect()
    }

    /// `∂V/∂z_k = S(P, e_i) + S(P, e_j)`.
    fn grad_direct(&self, p: &HConvexPolytope) -> Result<Vec<f64>> {
        self.pairs.iter().map(|&(i, j)| Ok(facet_area(p, i)? + facet_area(p, j)?)).collect()
    }

    fn grad_fd(&self, z: &[f64]) -> Result<Vec<f64>> {
        let vol = |z: &[f64]| -> Result<f64> {
            let p = self.polytope(z)?;
            match &self.fd_quad {
                Some(q) => volume(&p, q),
                None => volume_exact(&p),
            }
        };
        (0..z.len())
            .map(|k| {
                let delta = self.cfg.fd_step.min(0.5 * z[k]);
                let mut up = z.to_vec();
                up[k] += delta;
                let mut down = z.to_vec();
                down[k] -= delta;
                Ok((vol(&up)? - vol(&down)?) / (2.0 * delta))
            })
            .collect()
    }

    fn grad(&self, z: &[f64], p: &HConvexPolytope) -> Result<Vec<f64>> {
        match self.cfg.gradient {
            GradientMode::Direct => self.grad_direct(p),
            GradientMode::FiniteDifference => self.grad_fd(z),
        }
    }

    /// Paired canonical support: the same body with every listed horoball supporting.
    fn canonical(&self, z: &[f64]) -> Result<Vec<f64>> {
        let p = self.polytope(z)?;
        let u = p.canonical_support();
        Ok(self.pairs.iter().map(|&(i, j)| 0.5 * (u[i] + u[j])).collect())
    }

    /// `t` with `V(P(t z)) = c`, using `dV/dt = Σ_k z_k ∂V/∂z_k`.
    fn volume_scale(&self, z: &[f64], c: f64) -> Result<f64> {
        let at = |t: f64| -> Result<(f64, f64)> {
            let scaled: Vec<f64> = z.iter().map(|x| t * x).collect();
            let p = self.polytope(&scaled)?;
            let v = self.volume_of(&p)?;
            let g = self.grad_direct(&p)?;
            Ok((v - c, g.iter().zip(z).map(|(g, x)| g * x).sum()))
        };
        let (mut lo, mut hi) = (0.0f64, f64::INFINITY);
        let mut t = 1.0;
        for _ in 0..200 {
            let (f, df) = at(t)?;
            if f.abs() <= 1e-13 * c {
                return Ok(t);
            }
            if f < 0.0 {
                lo = lo.max(t);
            } else {
                hi = hi.min(t);
            }
            let newton = t - f / df;
            t = if df > 0.0 && newton > lo && newton < hi {
                newton
            } else if hi.is_finite() {
                0.5 * (lo + hi)
            } else {
                2.0 * t
            };
            if hi.is_finite() && hi - lo <= 1e-15 * hi {
                return Ok(t);
            }
        }
        Ok(t)
    }

    fn rescale(&self, z: &[f64]) -> Result<Vec<f64>> {
        let t = if self.cfg.p < 0.0 {
            self.volume_scale(z, self.cfg.v0)?
        } else {
            let phi = |t: f64| self.weights.iter().zip(z).map(|(w, x)| w * phi_term(t * x, self.cfg.p)).sum::<f64>();
            phi_scale(&phi, &self.weights, self.cfg.p, 1.0)?
        };
        Ok(z.iter().map(|x| t * x).collect())
    }
}

/// One feasible iterate with everything the loop needs.
struct Point {
    z: Vec<f64>,
    polytope: HConvexPolytope,
    volume: f64,
    objective: f64,
    grad_v: Vec<f64>,
}

/// Projected-gradient solver for even `μ`. Non-convergence is reported through
/// `converged = false` together with the best iterate.
pub fn solve_even(mu: &DiscreteMeasure, cfg: &SolverConfig) -> Result<SolverResult> {
    cfg.validate()?;
    if !mu.is_even() {
        return Err(Error::NotEven("the solver needs a measure flagged even".into()));
    }
    let eval = Evaluator::new(mu, cfg)?;
    let m = eval.pairs.len();
    let p = cfg.p;
    let maximize = p >= 0.0;
    let bound = if p < 0.0 { Some(boundedness_bound(cfg.v0 * 1.01, mu.dim())?) } else { None };

    let feasible = |z: Vec<f64>| -> Result<Point> {
        let z = eval.rescale(&eval.canonical(&z)?)?;
        let polytope = eval.polytope(&z)?;
        let volume = eval.volume_of(&polytope)?;
        let grad_v = eval.grad(&z, &polytope)?;
        let objective = if maximize { volume } else { eval.phi(&z) };
        Ok(Point {
            z,
            polytope,
            volume,
            objective,
            grad_v,
        })
    };

    let mut cur = feasible(vec![1.0; m])?;
    let mut trace = vec![cur.objective];
    let mut checks = Vec::new();
    let mut violations = 0;
    let mut alpha = cfg.step;
    let mut iterations = 0;
    let (mut lambda, mut max_rel) = residual(&cur.polytope, mu, p)?;

    while iterations < cfg.max_iters && max_rel > cfg.tol {
        iterations += 1;
        if cfg.check_every > 0 && iterations % cfg.check_every == 0 {
            let direct = eval.grad_direct(&cur.polytope)?;
            let fd = eval.grad_fd(&cur.z)?;
            let gap = direct
                .iter()
                .zip(&fd)
                .map(|(a, b)| (a - b).abs() / a.abs().max(b.abs()).max(1e-8))
                .fold(0.0, f64::max);
            log::debug!("iteration {iterations}: gradient spot check {gap:.3e}");
            checks.push(gap);
        }
        let Some(dir) = search_direction(&cur.z, &cur.grad_v, &eval.phi_grad(&cur.z), maximize) else {
            break;
        };
        let mut accepted = None;
        while alpha >= 1e-12 {
            let trial: Vec<f64> = cur.z.iter().zip(&dir).map(|(z, d)| (z + alpha * d).max(1e-9 * z)).collect();
            let next = feasible(trial)?;
            let better = if maximize { next.objective > cur.objective } else { next.objective < cur.objective };
            if better {
                accepted = Some(next);
                break;
            }
            alpha *= cfg.backtrack;
        }
        let Some(next) = accepted else {
            log::debug!("line search stalled at iteration {iterations}");
            break;
        };
        cur = next;
        alpha = (2.0 * alpha).min(0.5);
        trace.push(cur.objective);
        if let Some(b) = bound {
            if cur.z.iter().cloned().fold(0.0, f64::max) > b {
                violations += 1;
                log::warn!("iterate {iterations} exceeds the a-priori support bound {b}");
            }
        }
        (lambda, max_rel) = residual(&cur.polytope, mu, p)?;
        log::trace!("iteration {iterations}: objective {} residual {max_rel:.3e}", cur.objective);
    }

    Ok(SolverResult {
        converged: max_rel <= cfg.tol,
        polytope: cur.polytope,
        z: cur.z,
        lambda,
        residual_max_rel: max_rel,
        objective_trace: trace,
        iterations,
        volume: cur.volume,
        gradient_checks: checks,
        bound_violations: violations,
    })
}

/// Ascent (or descent) direction for the objective, projected onto the tangent
/// of the constraint in the metric `diag(z)` and normalized so its largest
/// relative component is 1.
fn search_direction(z: &[f64], grad_v: &[f64], grad_phi: &[f64], maximize: bool) -> Option<Vec<f64>> {
    // objective gradient g and constraint gradient c
    let (g, c): (Vec<f64>, &[f64]) = if maximize {
        (grad_v.to_vec(), grad_phi)
    } else {
        (grad_phi.iter().map(|x| -x).collect(), grad_v)
    };
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).zip(z).map(|((a, b), z)| a * b * z).sum::<f64>();
    let cc = dot(c, c);
    if !(cc > 0.0) {
        return None;
    }
    let mu = dot(c, &g) / cc;
    let d: Vec<f64> = g.iter().zip(c).zip(z).map(|((g, c), z)| z * (g - mu * c)).collect();
    let scale = d.iter().zip(z).map(|(d, z)| (d / z).abs()).fold(0.0, f64::max);
    if !(scale > 0.0 && scale.is_finite()) {
        return None;
    }
    Some(d.iter().map(|d| d / scale).collect())
}
