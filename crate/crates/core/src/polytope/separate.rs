use super::HConvexPolytope;
use crate::error::{Error, Result};
use crate::geometry::{boost_to_origin, geodesic_distance, polar_point, Direction, HyperboloidPoint};
use crate::horoball::{horoball_contains, horoball_transform, Horoball};
use crate::search::{search_nodes, search_spacing, sphere_max};

/// A horoball containing `P` whose horosphere passes through the point of `P`
/// nearest to the exterior point `q`, which it excludes.
///
/// With `q` moved to the origin, the nearest point sits at distance `D` in
/// direction `θ₀`, and `B_{θ₀}(-D)` is the horoball; the result is that
/// horoball moved back.
pub fn separate(p: &HConvexPolytope, q: &HyperboloidPoint<f64>) -> Result<Horoball<f64>> {
    p.require_interior()?;
    if q.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim() + 2,
            found: q.coords().len(),
        });
    }
    let inside = (0..p.len()).all(|i| horoball_contains(&p.spec().horoball(i), q, false));
    if inside {
        return Err(Error::PointInside);
    }
    let (nearest, dist) = nearest_boundary_point(p, q);
    let to_origin = boost_to_origin(q);
    let image = to_origin.apply(&nearest);
    let theta = Direction::new(image.spatial().to_vec())
        .map_err(|_| Error::InvalidPoint("nearest point coincides with the query".into()))?;
    Ok(horoball_transform(&Horoball::new(theta, -dist), &to_origin.inverse()))
}

/// Point of `∂P` closest to an exterior point, with its distance.
pub(crate) fn nearest_boundary_point(p: &HConvexPolytope, q: &HyperboloidPoint<f64>) -> (HyperboloidPoint<f64>, f64) {
    let n = p.dim();
    if n <= 2 {
        let mut best: Option<(HyperboloidPoint<f64>, f64)> = None;
        for i in 0..p.len() {
            let facet = p.facet(i);
            if !facet.shadow.is_solid() {
                continue;
            }
            let (y, _) = facet.project(q);
            let mut cands = facet.shadow.boundary_candidates(&y);
            if facet.shadow.contains(&y) {
                cands.push(y);
            }
            for c in cands {
                let x = facet.lift(&c);
                let d = geodesic_distance(&x, q);
                if best.as_ref().is_none_or(|b| d < b.1) {
                    best = Some((x, d));
                }
            }
        }
        return best.expect("a bounded polytope has at least one facet");
    }
    let nodes = search_nodes(n);
    let f = |t: &Direction<f64>| -geodesic_distance(&polar_point(p.radial_unchecked(t), t), q);
    let toward = Direction::new(q.spatial().to_vec()).ok();
    let extra: Vec<_> = toward.into_iter().collect();
    let (theta, neg) = sphere_max(&f, &nodes, &extra, search_spacing(n));
    (polar_point(p.radial_unchecked(&theta), &theta), -neg)
}
