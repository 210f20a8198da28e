//! Small derivative-free optimizers and sphere charts used by the numeric
//! fallbacks (support, separation and extremal radii for `n ≥ 3`).

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::geometry::Direction;
use crate::quadrature::{build_quadrature, QuadratureKind};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Maximizes a unimodal `f` on `[a, b]`; returns `(argmax, max)`.
pub fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    [(x, fx), (c, fc), (d, fd)]
        .into_iter()
        .fold((x, fx), |best, cand| if cand.1 > best.1 { cand } else { best })
}

/// Nelder–Mead minimization from `x0` with initial simplex edge `step`.
pub fn nelder_mead(
    f: impl Fn(&[f64]) -> f64,
    x0: &[f64],
    step: f64,
    tol: f64,
    max_evals: usize,
) -> (Vec<f64>, f64) {
    let dim = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push((x0.to_vec(), f(x0)));
    for k in 0..dim {
        let mut x = x0.to_vec();
        x[k] += step;
        let fx = f(&x);
        simplex.push((x, fx));
    }
    let mut evals = dim + 1;
    let blend = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> {
        a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
    };
    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[dim].1 - simplex[0].1;
        let size = simplex[1..]
            .iter()
            .map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if spread.abs() <= tol && size <= tol {
            break;
        }
        let mut centroid = vec![0.0; dim];
        for (x, _) in &simplex[..dim] {
            for (c, v) in centroid.iter_mut().zip(x) {
                *c += v / dim as f64;
            }
        }
        let worst = simplex[dim].clone();
        let reflected = blend(&centroid, &worst.0, -1.0);
        let fr = f(&reflected);
        evals += 1;
        if fr < simplex[0].1 {
            let expanded = blend(&centroid, &worst.0, -2.0);
            let fe = f(&expanded);
            evals += 1;
            simplex[dim] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[dim - 1].1 {
            simplex[dim] = (reflected, fr);
        } else {
            let contracted = if fr < worst.1 {
                blend(&centroid, &reflected, 0.5)
            } else {
                blend(&centroid, &worst.0, 0.5)
            };
            let fc = f(&contracted);
            evals += 1;
            if fc < worst.1.min(fr) {
                simplex[dim] = (contracted, fc);
            } else {
                let best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let x = blend(&best, &entry.0, 0.5);
                    let fx = f(&x);
                    *entry = (x, fx);
                }
                evals += dim;
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex.swap_remove(0)
}

/// Exponential-map chart of `S^n` around `base`.
#[derive(Debug, Clone)]
pub struct TangentChart {
    base: Vec<f64>,
    basis: Vec<Vec<f64>>,
}

impl TangentChart {
    pub fn new(base: &Direction<f64>) -> Self {
        let b = base.components().to_vec();
        let dim = b.len();
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(dim - 1);
        for axis in 0..dim {
            if basis.len() == dim - 1 {
                break;
            }
            let mut v = vec![0.0; dim];
            v[axis] = 1.0;
            for u in std::iter::once(&b).chain(basis.iter()) {
                let proj: f64 = v.iter().zip(u).map(|(x, y)| x * y).sum();
                v.iter_mut().zip(u).for_each(|(x, y)| *x -= proj * y);
            }
            let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if len > 1e-6 {
                basis.push(v.into_iter().map(|x| x / len).collect());
            }
        }
        Self { base: b, basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn point(&self, coords: &[f64]) -> Direction<f64> {
        let mut v = vec![0.0; self.base.len()];
        for (c, u) in coords.iter().zip(&self.basis) {
            v.iter_mut().zip(u).for_each(|(x, y)| *x += c * y);
        }
        let t = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let comps: Vec<f64> = if t < 1e-300 {
            self.base.clone()
        } else {
            self.base
                .iter()
                .zip(&v)
                .map(|(b, x)| t.cos() * b + t.sin() * x / t)
                .collect()
        };
        Direction::new(comps).expect("chart point is a unit vector")
    }
}

/// Maximizes `f` over `S^n`: scan `nodes` (plus `extra` candidates), then
/// refine the best few with Nelder–Mead in tangent charts.
pub fn sphere_max(
    f: &(dyn Fn(&Direction<f64>) -> f64 + Sync),
    nodes: &[Direction<f64>],
    extra: &[Direction<f64>],
    spacing: f64,
) -> (Direction<f64>, f64) {
    let mut scored: Vec<(f64, &Direction<f64>)> = nodes.iter().chain(extra).map(|d| (f(d), d)).collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best = (scored[0].1.clone(), scored[0].0);
    for (_, start) in scored.iter().take(4) {
        let chart = TangentChart::new(start);
        let (x, fx) = nelder_mead(|c| -f(&chart.point(c)), &vec![0.0; chart.dim()], spacing, 1e-10, 600);
        if -fx > best.1 {
            best = (chart.point(&x), -fx);
        }
    }
    best
}

type NodeSet = Arc<Vec<Direction<f64>>>;

/// Cached node set for numeric searches over `S^n`: 1024-point grid on the
/// circle, a 2048-node product rule on `S^2`, 4096 fixed-seed samples above.
pub fn search_nodes(n: usize) -> NodeSet {
    static CACHE: OnceLock<Mutex<HashMap<usize, NodeSet>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    cache
        .lock()
        .expect("search cache poisoned")
        .entry(n)
        .or_insert_with(|| {
            let (count, kind) = match n {
                1 => (1024, QuadratureKind::UniformGrid),
                2 => (2048, QuadratureKind::ProductRule),
                _ => (4096, QuadratureKind::MonteCarlo),
            };
            Arc::new(build_quadrature(n, count, kind, 0x5eed).expect("valid search grid").nodes)
        })
        .clone()
}

/// Typical angular spacing of [`search_nodes`].
pub fn search_spacing(n: usize) -> f64 {
    let count = search_nodes(n).len() as f64;
    let area = crate::quadrature::sphere_area(n);
    (area / count).powf(1.0 / n as f64)
}
