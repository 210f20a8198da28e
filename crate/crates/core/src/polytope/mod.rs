//! H-convex polytopes `P = ∩ B̄_{e_i}(x_i)` and their geometry.
//!
//! In dimensions `n ≤ 2` every facet is resolved exactly in the half-space
//! chart (see `shadow`), which makes support values, extremal radii, facet
//! areas and nearest points exact. Higher dimensions fall back to sampling
//! and derivative-free search.

mod metric;
mod separate;
mod shadow;
mod tbody;
mod volume;

pub use metric::hausdorff_distance;
pub use separate::separate;
pub use tbody::{boundedness_bound, t_body_lower_bound, t_body_volume, t_body_wulff_spec};
pub use volume::{
    facet_area, facet_area_fd, facet_area_with, volume, volume_exact, FacetAreaMethod, DEFAULT_FD_STEP,
};

use crate::error::{Error, Result};
use crate::geometry::{geodesic_distance, polar_point, Direction, HyperboloidPoint};
use crate::horoball::{busemann_value, horoball_radial, Horoball};
use crate::measure::{DiscreteMeasure, DIRECTION_TOL};
use crate::search::{search_nodes, search_spacing, sphere_max};

use rayon::prelude::*;
use shadow::Facet;

/// Tolerance between `x_i` and the support value for a facet to count as present.
pub const FACET_TOL: f64 = 1e-7;

/// Horoball data defining a polytope.
#[derive(Debug, Clone, PartialEq)]
pub struct PolytopeSpec {
    n: usize,
    horoballs: Vec<(Direction<f64>, f64)>,
    even: bool,
}

impl PolytopeSpec {
    /// Checks: at least two distinct directions, matching dimensions, finite
    /// `x_i ≥ 0`, and the pairing `(e, x) ↔ (-e, x)` when `even` is set.
    pub fn new(n: usize, horoballs: Vec<(Direction<f64>, f64)>, even: bool) -> Result<Self> {
        if n == 0 {
            return Err(Error::Spec("dimension n must be ≥ 1".into()));
        }
        if horoballs.len() < 2 {
            return Err(Error::Spec(format!("need at least 2 horoballs, got {}", horoballs.len())));
        }
        for (k, (e, x)) in horoballs.iter().enumerate() {
            if e.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n + 1,
                    found: e.components().len(),
                });
            }
            if !x.is_finite() || *x < 0.0 {
                return Err(Error::Spec(format!("x[{k}] = {x} must be finite and ≥ 0")));
            }
        }
        let first = &horoballs[0].0;
        if horoballs.iter().all(|(e, _)| e.chord(first) < DIRECTION_TOL) {
            return Err(Error::Spec("need at least two distinct directions".into()));
        }
        let spec = Self { n, horoballs, even };
        if even {
            spec.pairs()?;
        }
        Ok(spec)
    }

    /// The lens `B̄_e(s₁) ∩ B̄_{-e}(s₂)`.
    pub fn lens(e: &Direction<f64>, s1: f64, s2: f64) -> Result<Self> {
        Self::new(e.dim(), vec![(e.clone(), s1), (e.antipode(), s2)], s1 == s2)
    }

    /// Even spec from a half list: entries `e_1…e_m` then `-e_1…-e_m`.
    pub fn from_pairs(n: usize, half: &[(Direction<f64>, f64)]) -> Result<Self> {
        let mut all = half.to_vec();
        all.extend(half.iter().map(|(e, x)| (e.antipode(), *x)));
        Self::new(n, all, true)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.horoballs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.horoballs.is_empty()
    }

    pub fn is_even(&self) -> bool {
        self.even
    }

    pub fn horoballs(&self) -> &[(Direction<f64>, f64)] {
        &self.horoballs
    }

    pub fn directions(&self) -> Vec<Direction<f64>> {
        self.horoballs.iter().map(|(e, _)| e.clone()).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.horoballs.iter().map(|(_, x)| *x).collect()
    }

    /// Same directions with new values. The even flag is kept only when the
    /// new values still respect the pairing.
    pub fn with_values(&self, xs: &[f64]) -> Result<Self> {
        if xs.len() != self.horoballs.len() {
            return Err(Error::DimensionMismatch {
                expected: self.horoballs.len(),
                found: xs.len(),
            });
        }
        let horoballs: Vec<_> = self.horoballs.iter().zip(xs).map(|((e, _), &x)| (e.clone(), x)).collect();
        let even = self.even && self.pairs()?.iter().all(|&(i, j)| xs[i] == xs[j]);
        Self::new(self.n, horoballs, even)
    }

    /// Antipodal index pairs `(i, j)` of an even spec.
    pub fn pairs(&self) -> Result<Vec<(usize, usize)>> {
        let mut used = vec![false; self.horoballs.len()];
        let mut pairs = Vec::new();
        for i in 0..self.horoballs.len() {
            if used[i] {
                continue;
            }
            let anti = self.horoballs[i].0.antipode();
            let j = (i + 1..self.horoballs.len())
                .find(|&j| !used[j] && self.horoballs[j].0.chord(&anti) < DIRECTION_TOL)
                .ok_or_else(|| Error::Spec(format!("even spec: entry {i} has no antipodal partner")))?;
            if self.horoballs[i].1 != self.horoballs[j].1 {
                return Err(Error::Spec(format!("even spec: x[{i}] ≠ x[{j}]")));
            }
            used[i] = true;
            used[j] = true;
            pairs.push((i, j));
        }
        Ok(pairs)
    }

    pub fn horoball(&self, i: usize) -> Horoball<f64> {
        Horoball::new(self.horoballs[i].0.clone(), self.horoballs[i].1)
    }
}

/// A built polytope with its facets resolved.
#[derive(Debug, Clone)]
pub struct HConvexPolytope {
    spec: PolytopeSpec,
    canonical_support: Vec<f64>,
    facet_nonempty: Vec<bool>,
    facets: Vec<Facet>,
    /// Facet endpoints, `n = 1` only.
    vertices: Vec<HyperboloidPoint<f64>>,
    /// Angular ranges of the boundary pieces, `n = 1` only.
    arcs: Vec<PlanarArc>,
    degenerate: bool,
}

/// Directions `[start, start + len]` (absolute angle) in which the boundary
/// of a planar polytope is the horocycle of `facet`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarArc {
    pub facet: usize,
    pub start: f64,
    pub len: f64,
}

/// Builds the polytope; every `x_i` must be positive so that `O` is interior.
pub fn build_polytope(spec: &PolytopeSpec) -> Result<HConvexPolytope> {
    if let Some(k) = spec.horoballs.iter().position(|(_, x)| *x <= 0.0) {
        return Err(Error::DegenerateBody(format!(
            "x[{k}] = 0 puts the origin on the boundary"
        )));
    }
    let dirs = spec.directions();
    let xs = spec.values();
    let facets: Vec<Facet> = (0..dirs.len()).into_par_iter().map(|i| Facet::build(&dirs, &xs, i)).collect();
    let vertices = if spec.n == 1 {
        facets
            .iter()
            .filter_map(|f| match f.shadow {
                shadow::Shadow::Interval { a, b } if b > a => Some([f.lift(&[a]), f.lift(&[b])]),
                _ => None,
            })
            .flatten()
            .collect()
    } else {
        Vec::new()
    };
    let mut poly = HConvexPolytope {
        spec: spec.clone(),
        canonical_support: xs.clone(),
        facet_nonempty: vec![true; xs.len()],
        facets,
        vertices,
        arcs: Vec::new(),
        degenerate: false,
    };
    for i in 0..xs.len() {
        if !poly.facets[i].shadow.is_solid() {
            let u = poly.support_unchecked(&dirs[i]);
            poly.canonical_support[i] = u.min(xs[i]);
            poly.facet_nonempty[i] = xs[i] - u <= FACET_TOL;
        }
    }
    if spec.n == 1 {
        poly.arcs = planar_arcs(&poly);
    }
    Ok(poly)
}

/// Like [`build_polytope`] but also accepts the even spec with all `x_i = 0`,
/// whose body is the single point `O`.
pub fn build_polytope_allow_degenerate(spec: &PolytopeSpec) -> Result<HConvexPolytope> {
    if spec.even && spec.horoballs.iter().all(|(_, x)| *x == 0.0) {
        let m = spec.len();
        return Ok(HConvexPolytope {
            spec: spec.clone(),
            canonical_support: vec![0.0; m],
            facet_nonempty: vec![false; m],
            facets: Vec::new(),
            vertices: Vec::new(),
            arcs: Vec::new(),
            degenerate: true,
        });
    }
    build_polytope(spec)
}

fn planar_arcs(poly: &HConvexPolytope) -> Vec<PlanarArc> {
    let mut arcs = Vec::new();
    for (i, (f, (e, _))) in poly.facets.iter().zip(&poly.spec.horoballs).enumerate() {
        let shadow::Shadow::Interval { a, b } = f.shadow else { continue };
        if b <= a {
            continue;
        }
        let anchor = e.antipode();
        let rel = |x: &HyperboloidPoint<f64>| {
            let t = x.spatial();
            let a = anchor.components();
            (a[0] * t[1] - a[1] * t[0]).atan2(a[0] * t[0] + a[1] * t[1])
        };
        let (pa, pb) = (rel(&f.lift(&[a])), rel(&f.lift(&[b])));
        let (lo, hi) = if pa <= pb { (pa, pb) } else { (pb, pa) };
        arcs.push(PlanarArc {
            facet: i,
            start: anchor.angle() + lo,
            len: hi - lo,
        });
    }
    arcs
}

impl HConvexPolytope {
    pub fn spec(&self) -> &PolytopeSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.n
    }

    pub fn len(&self) -> usize {
        self.spec.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spec.is_empty()
    }

    /// `u(P, e_i)` for every listed direction.
    pub fn canonical_support(&self) -> &[f64] {
        &self.canonical_support
    }

    pub fn facet_nonempty(&self) -> &[bool] {
        &self.facet_nonempty
    }

    /// The body is the single point `O`.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Facet endpoints of a planar polytope.
    pub fn vertices(&self) -> &[HyperboloidPoint<f64>] {
        &self.vertices
    }

    /// Boundary pieces of a planar polytope in angular order of their facets.
    pub fn planar_arcs(&self) -> &[PlanarArc] {
        &self.arcs
    }

    pub(crate) fn facet(&self, i: usize) -> &Facet {
        &self.facets[i]
    }

    fn require_interior(&self) -> Result<()> {
        if self.degenerate {
            Err(Error::DegenerateBody("the body is the single point O".into()))
        } else {
            Ok(())
        }
    }

    fn check_dim(&self, d: &Direction<f64>) -> Result<()> {
        if d.dim() != self.spec.n {
            return Err(Error::DimensionMismatch {
                expected: self.spec.n + 1,
                found: d.components().len(),
            });
        }
        Ok(())
    }

    /// Support value from the resolved facets (exact for `n ≤ 2`).
    fn support_unchecked(&self, e: &Direction<f64>) -> f64 {
        if self.spec.n == 1 && !self.vertices.is_empty() {
            return self
                .vertices
                .iter()
                .map(|v| busemann_value(e, v))
                .fold(f64::NEG_INFINITY, f64::max);
        }
        if self.spec.n == 2 {
            let mut best = f64::NEG_INFINITY;
            for (f, (ei, xi)) in self.facets.iter().zip(&self.spec.horoballs) {
                if !f.shadow.is_solid() {
                    continue;
                }
                match f.ideal_contact(e, ei) {
                    None => best = best.max(*xi),
                    Some(q) => {
                        for y in f.shadow.boundary_candidates(&q) {
                            best = best.max(busemann_value(e, &f.lift(&y)));
                        }
                    }
                }
            }
            return best;
        }
        for (f, (ei, xi)) in self.facets.iter().zip(&self.spec.horoballs) {
            if f.shadow.is_solid() && ei.chord(e) < DIRECTION_TOL {
                return *xi;
            }
        }
        let n = self.spec.n;
        let g = |t: &Direction<f64>| busemann_value(e, &polar_point(self.radial_unchecked(t), t));
        let nodes = search_nodes(n);
        let extra: Vec<Direction<f64>> = std::iter::once(e.antipode()).chain(self.spec.directions()).collect();
        sphere_max(&g, &nodes, &extra, search_spacing(n)).1
    }

    fn radial_unchecked(&self, theta: &Direction<f64>) -> f64 {
        self.spec
            .horoballs
            .iter()
            .map(|(e, x)| {
                horoball_radial(&Horoball::new(e.clone(), *x), theta)
                    .expect("x > 0 checked at build")
                    .value()
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// `ρ(P, θ) = min_j ρ_j(θ)`, the distance from `O` to `∂P` along `θ`.
pub fn radial(p: &HConvexPolytope, theta: &Direction<f64>) -> Result<f64> {
    p.require_interior()?;
    p.check_dim(theta)?;
    Ok(p.radial_unchecked(theta))
}

/// `u(P, e) = max_{X ∈ P} f_e(X)`.
pub fn support(p: &HConvexPolytope, e: &Direction<f64>) -> Result<f64> {
    p.require_interior()?;
    p.check_dim(e)?;
    Ok(p.support_unchecked(e))
}

/// `(R, r)`: the largest and smallest distance from `O` to `∂P`.
pub fn extremal_radii(p: &HConvexPolytope) -> Result<(f64, f64)> {
    p.require_interior()?;
    let n = p.spec.n;
    if n <= 2 {
        let origin = HyperboloidPoint::origin(n);
        let zero = vec![0.0; n];
        let (mut big, mut small) = (f64::NEG_INFINITY, f64::INFINITY);
        for (f, (_, x)) in p.facets.iter().zip(&p.spec.horoballs) {
            if !f.shadow.is_solid() {
                continue;
            }
            if f.shadow.contains(&zero) {
                small = small.min(*x);
            }
            for y in f.shadow.boundary_candidates(&zero) {
                let d = geodesic_distance(&origin, &f.lift(&y));
                big = big.max(d);
                small = small.min(d);
            }
        }
        return Ok((big, small));
    }
    let nodes = search_nodes(n);
    let extra = p.spec.directions();
    let antis: Vec<_> = extra.iter().map(|e| e.antipode()).collect();
    let all: Vec<_> = extra.into_iter().chain(antis).collect();
    let spacing = search_spacing(n);
    let big = sphere_max(&|t| p.radial_unchecked(t), &nodes, &all, spacing).1;
    let small = -sphere_max(&|t| -p.radial_unchecked(t), &nodes, &all, spacing).1;
    Ok((big, small))
}

/// Replaces every `x_i` by `u(P, e_i)`; the body is unchanged.
pub fn canonicalize(spec: &PolytopeSpec) -> Result<PolytopeSpec> {
    let p = build_polytope(spec)?;
    spec.with_values(&p.canonical_support)
}

/// Wulff spec `{(e_g, u(P, e_g) + ε)}` over `grid`, an outer approximation of
/// the parallel body `P^ε` that is exact at the grid directions.
pub fn outer_parallel_support(p: &HConvexPolytope, eps: f64, grid: &[Direction<f64>]) -> Result<PolytopeSpec> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("ε = {eps} must be positive")));
    }
    let horoballs = grid
        .iter()
        .map(|e| Ok((e.clone(), support(p, e)? + eps)))
        .collect::<Result<Vec<_>>>()?;
    PolytopeSpec::new(p.dim(), horoballs, false)
}

/// `S_p(P, ·) = Σ e^{-p u_i} S(P, e_i) δ_{e_i}` over facets of positive area.
pub fn surface_measure_p(p_body: &HConvexPolytope, p: f64) -> Result<DiscreteMeasure> {
    p_body.require_interior()?;
    let mut atoms = Vec::new();
    for (i, (e, _)) in p_body.spec.horoballs.iter().enumerate() {
        let area = facet_area(p_body, i)?;
        if area > 0.0 {
            atoms.push((e.clone(), (-p * p_body.canonical_support[i]).exp() * area));
        }
    }
    if p_body.spec.even {
        if let Ok(m) = DiscreteMeasure::new(p_body.dim(), atoms.clone(), true) {
            return Ok(m);
        }
    }
    DiscreteMeasure::new(p_body.dim(), atoms, false)
}


#[cfg(test)]
mod tests {
    use super::testing::arb_planar_spec;
    use super::*;
    use proptest::prelude::*;

    fn d(v: &[f64]) -> Direction<f64> {
        Direction::new(v.to_vec()).unwrap()
    }

    fn lens(n: usize, s: f64) -> HConvexPolytope {
        build_polytope(&PolytopeSpec::lens(&Direction::reference(n), s, s).unwrap()).unwrap()
    }

    /// Dense-grid maximum of `log(cosh ρ - sinh ρ θ·e)` over the circle.
    fn planar_support_oracle(p: &HConvexPolytope, e: &Direction<f64>, count: usize) -> f64 {
        let step = std::f64::consts::TAU / count as f64;
        let g = |a: f64| {
            let t = Direction::from_angle(a);
            let r = radial(p, &t).unwrap();
            (r.cosh() - r.sinh() * t.dot(e)).ln()
        };
        let k = (0..count).max_by(|&i, &j| g(i as f64 * step).total_cmp(&g(j as f64 * step))).unwrap();
        let a = k as f64 * step;
        crate::search::golden_max(g, a - step, a + step, 1e-13).1.max(g(a))
    }

    #[test]
    fn spec_validation() {
        let e = d(&[1.0, 0.0]);
        assert!(PolytopeSpec::new(1, vec![(e.clone(), 1.0)], false).is_err());
        assert!(PolytopeSpec::new(1, vec![(e.clone(), 1.0), (e.clone(), 2.0)], false).is_err());
        assert!(PolytopeSpec::new(1, vec![(e.clone(), -1.0), (e.antipode(), 1.0)], false).is_err());
        assert!(PolytopeSpec::new(1, vec![(e.clone(), 1.0), (e.antipode(), 2.0)], true).is_err());
        assert!(PolytopeSpec::new(2, vec![(e.clone(), 1.0), (e.antipode(), 1.0)], false).is_err());
        let zero = PolytopeSpec::lens(&e, 0.0, 0.0).unwrap();
        assert!(matches!(build_polytope(&zero), Err(Error::DegenerateBody(_))));
        let point = build_polytope_allow_degenerate(&zero).unwrap();
        assert!(point.is_degenerate());
        assert!(matches!(radial(&point, &e), Err(Error::DegenerateBody(_))));
    }

    #[test]
    fn lens_basics() {
        for n in [1, 2] {
            let s = 0.8;
            let p = lens(n, s);
            assert_eq!(p.facet_nonempty(), &[true, true]);
            assert_eq!(p.canonical_support(), &[s, s]);
            let e = Direction::reference(n);
            assert!((radial(&p, &e).unwrap() - s).abs() < 1e-14);
            assert!((radial(&p, &e.antipode()).unwrap() - s).abs() < 1e-14);
            assert!((support(&p, &e).unwrap() - s).abs() < 1e-14);
            assert!((support(&p, &e.antipode()).unwrap() - s).abs() < 1e-12);
            let (big, small) = extremal_radii(&p).unwrap();
            assert!((small - s).abs() < 1e-12);
            assert!((big - s.exp().acosh()).abs() < 1e-12, "{big}");
        }
        let p = lens(1, 2f64.ln());
        let side = d(&[1.0, 0.0]);
        assert!((radial(&p, &side).unwrap() - 2f64.acosh()).abs() < 1e-13);
    }

    #[test]
    fn redundant_horoball_is_detected() {
        let s = 2f64.ln();
        for n in [1, 2] {
            let e = Direction::reference(n);
            let side = Direction::axis(n, 0);
            let spec = PolytopeSpec::new(n, vec![(e.clone(), s), (e.antipode(), s), (side.clone(), 10.0)], false).unwrap();
            let p = build_polytope(&spec).unwrap();
            assert_eq!(p.facet_nonempty(), &[true, true, false]);
            let u = p.canonical_support()[2];
            let big = s.exp().acosh();
            assert!(u >= big - 1e-6 && u <= big + 1e-12, "{u}");
            if n == 1 {
                assert!((u - planar_support_oracle(&p, &side, 200_000)).abs() < 1e-8);
            }
            let canon = canonicalize(&spec).unwrap();
            assert!(canon.values()[2] < 10.0);
            let again = canonicalize(&canon).unwrap();
            for (a, b) in canon.values().iter().zip(again.values()) {
                assert!((a - b).abs() < 1e-7);
            }
            let q = build_polytope(&canon).unwrap();
            for k in 0..50 {
                let t = crate::search::search_nodes(n)[k * 7].clone();
                assert!((radial(&p, &t).unwrap() - radial(&q, &t).unwrap()).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn planar_arcs_tile_the_circle() {
        let spec = PolytopeSpec::new(
            1,
            vec![(d(&[1.0, 0.0]), 0.7), (d(&[0.0, 1.0]), 1.1), (d(&[-1.0, -0.2]), 0.4), (d(&[0.3, -1.0]), 0.9)],
            false,
        )
        .unwrap();
        let p = build_polytope(&spec).unwrap();
        let total: f64 = p.planar_arcs().iter().map(|a| a.len).sum();
        assert!((total - std::f64::consts::TAU).abs() < 1e-10);
        for arc in p.planar_arcs() {
            let mid = Direction::from_angle(arc.start + 0.5 * arc.len);
            let rho = radial(&p, &mid).unwrap();
            let own = horoball_radial(&spec.horoball(arc.facet), &mid).unwrap().value();
            assert!((rho - own).abs() < 1e-12);
        }
    }

    #[test]
    fn support_n2_matches_numeric_search() {
        let spec = PolytopeSpec::new(
            2,
            vec![
                (d(&[0.0, 0.0, 1.0]), 0.6),
                (d(&[0.0, 0.0, -1.0]), 0.8),
                (d(&[1.0, 0.2, 0.0]), 0.5),
                (d(&[-0.5, 1.0, 0.3]), 0.9),
                (d(&[0.2, -1.0, -0.4]), 0.7),
            ],
            false,
        )
        .unwrap();
        let p = build_polytope(&spec).unwrap();
        let nodes = search_nodes(2);
        for e in [d(&[0.3, 0.3, 0.9]), d(&[-1.0, 0.0, 0.0]), d(&[0.1, -0.7, 0.2])] {
            let g = |t: &Direction<f64>| busemann_value(&e, &polar_point(p.radial_unchecked(t), t));
            let numeric = sphere_max(&g, &nodes, &[], search_spacing(2)).1;
            let exact = support(&p, &e).unwrap();
            assert!(exact >= numeric - 1e-9, "{exact} < {numeric}");
            assert!(exact - numeric < 1e-4, "{exact} vs {numeric}");
        }
    }

    #[test]
    fn higher_dimensional_lens() {
        let p = lens(3, 0.5);
        let e = Direction::reference(3);
        assert_eq!(p.facet_nonempty(), &[true, true]);
        assert!((support(&p, &e).unwrap() - 0.5).abs() < 1e-12);
        let (big, small) = extremal_radii(&p).unwrap();
        assert!((small - 0.5).abs() < 1e-6);
        assert!((big - 0.5f64.exp().acosh()).abs() < 1e-6);
    }

    #[test]
    fn outer_parallel_is_exact_on_grid() {
        let p = lens(1, 0.7);
        let grid: Vec<_> = (0..16).map(|k| Direction::from_angle(k as f64 * std::f64::consts::FRAC_PI_8)).collect();
        let spec = outer_parallel_support(&p, 0.2, &grid).unwrap();
        let q = build_polytope(&spec).unwrap();
        for (g, (_, x)) in grid.iter().zip(spec.horoballs()) {
            assert!((support(&q, g).unwrap() - x).abs() < 1e-9);
            assert!((x - support(&p, g).unwrap() - 0.2).abs() < 1e-15);
        }
    }

    #[test]
    fn surface_measure_scaling() {
        let s = 0.9;
        let p = lens(1, s);
        let base = surface_measure_p(&p, 0.0).unwrap();
        let expected = 2.0 * ((2.0 * s).exp() - 1.0).sqrt();
        for (_, a) in base.atoms() {
            assert!((a - expected).abs() < 1e-12);
        }
        for pw in [-2.0, 0.5, 3.0] {
            let m = surface_measure_p(&p, pw).unwrap();
            assert!(m.is_even());
            for ((_, a), (_, b)) in m.atoms().iter().zip(base.atoms()) {
                assert!((a - (-pw * s).exp() * b).abs() < 1e-12);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn boundary_consistency(spec in arb_planar_spec(2..=6, 0.2, 2.0), angles in proptest::collection::vec(0.0f64..6.3, 20)) {
            let p = build_polytope(&spec).unwrap();
            for a in angles {
                let t = Direction::from_angle(a);
                let r = radial(&p, &t).unwrap();
                let x = polar_point(r, &t);
                let mut on_some = false;
                for (e, s) in spec.horoballs() {
                    let f = busemann_value(e, &x);
                    prop_assert!(f <= s + 1e-9);
                    on_some |= (f - s).abs() <= 1e-9;
                }
                prop_assert!(on_some);
            }
        }

        #[test]
        fn planar_support_is_exact(spec in arb_planar_spec(2..=5, 0.2, 2.0), a in 0.0f64..6.3) {
            let p = build_polytope(&spec).unwrap();
            let e = Direction::from_angle(a);
            let u = support(&p, &e).unwrap();
            let oracle = planar_support_oracle(&p, &e, 20_000);
            prop_assert!(u >= oracle - 1e-10);
            prop_assert!(u - oracle < 1e-8, "u={u} oracle={oracle}");
            prop_assert!(u >= radial(&p, &e.antipode()).unwrap() - 1e-12);
            let (big, _) = extremal_radii(&p).unwrap();
            prop_assert!(u <= big + 1e-12);
        }

        #[test]
        fn canonical_support_bounds(spec in arb_planar_spec(2..=6, 0.2, 2.0)) {
            let p = build_polytope(&spec).unwrap();
            for (u, x) in p.canonical_support().iter().zip(spec.values()) {
                prop_assert!(*u <= x);
            }
            let canon = canonicalize(&spec).unwrap();
            let again = canonicalize(&canon).unwrap();
            for (a, b) in canon.values().iter().zip(again.values()) {
                prop_assert!((a - b).abs() <= 1e-7);
            }
            let q = build_polytope(&canon).unwrap();
            for k in 0..64 {
                let t = Direction::from_angle(k as f64 * 0.098);
                prop_assert!((radial(&p, &t).unwrap() - radial(&q, &t).unwrap()).abs() <= 1e-7);
            }
        }

        #[test]
        fn even_support_is_symmetric(half in proptest::collection::vec((0.0f64..std::f64::consts::PI, 0.2f64..2.0), 1..4), a in 0.0f64..6.3) {
            let hs: Vec<_> = half.into_iter().map(|(t, x)| (Direction::from_angle(t), x)).collect();
            prop_assume!(hs.iter().enumerate().all(|(i, (a, _))| hs[..i].iter().all(|(b, _)| a.chord(b) > 1e-3 && a.chord(&b.antipode()) > 1e-3)));
            let spec = PolytopeSpec::from_pairs(1, &hs).unwrap();
            let p = build_polytope(&spec).unwrap();
            let e = Direction::from_angle(a);
            prop_assert!((support(&p, &e).unwrap() - support(&p, &e.antipode()).unwrap()).abs() <= 1e-9);
            for (i, j) in spec.pairs().unwrap() {
                prop_assert!((facet_area(&p, i).unwrap() - facet_area(&p, j).unwrap()).abs() <= 1e-6);
            }
        }
    }
}
