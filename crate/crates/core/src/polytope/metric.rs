use super::HConvexPolytope;
use crate::error::{Error, Result};
use crate::geometry::Direction;
use crate::quadrature::SphereQuadrature;
use crate::search::{golden_max, nelder_mead, TangentChart};

/// `d_H(K, L) = max_e |u(K, e) - u(L, e)|`: scanned over the quadrature
/// nodes, then refined around the best few.
pub fn hausdorff_distance(k: &HConvexPolytope, l: &HConvexPolytope, quad: &SphereQuadrature) -> Result<f64> {
    if k.dim() != l.dim() || quad.n != k.dim() {
        return Err(Error::DimensionMismatch {
            expected: k.dim(),
            found: if k.dim() != l.dim() { l.dim() } else { quad.n },
        });
    }
    k.require_interior()?;
    l.require_interior()?;
    let gap = |e: &Direction<f64>| (k.support_unchecked(e) - l.support_unchecked(e)).abs();
    let mut scored: Vec<(f64, usize)> = quad.nodes.iter().enumerate().map(|(i, e)| (gap(e), i)).collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut best = scored[0].0;
    let spacing = (quad.weights.iter().sum::<f64>() / quad.len() as f64).powf(1.0 / k.dim() as f64);
    for &(_, i) in scored.iter().take(3) {
        let start = &quad.nodes[i];
        let refined = if k.dim() == 1 {
            let phi = start.angle();
            golden_max(|a| gap(&Direction::from_angle(a)), phi - spacing, phi + spacing, 1e-9).1
        } else {
            let chart = TangentChart::new(start);
            -nelder_mead(|c| -gap(&chart.point(c)), &vec![0.0; chart.dim()], 0.5 * spacing, 1e-11, 400).1
        };
        best = best.max(refined);
    }
    Ok(best)
}
