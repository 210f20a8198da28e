//! Facets seen from above.
//!
//! A reflection fixing `O` takes the facet normal `e_i` to `e*`, so in the
//! half-space chart the facet lies in the plane at height `h = e^{-x_i}`.
//! Every other horoball is a Euclidean ball tangent to the boundary at `p_j`
//! with radius `r_j`, and its slice by that plane is the disk
//! `|y - p_j|² ≤ h(2r_j - h)`. The facet is the intersection of these disks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::geometry::{
    half_space_to_hyperboloid, hyperboloid_to_half_space, Direction, HalfSpacePoint, HyperboloidPoint,
    Isometry,
};
use crate::measure::DIRECTION_TOL;
use crate::search::nelder_mead;

/// Euclidean disk `|y - center| ≤ radius` in the facet plane.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Disk {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Disk {
    fn contains(&self, y: &[f64], slack: f64) -> bool {
        let d2: f64 = y.iter().zip(&self.center).map(|(a, b)| (a - b) * (a - b)).sum();
        d2 <= self.radius * self.radius * (1.0 + slack) + slack
    }
}

/// Boundary arc of a planar shadow: angles `[start, end]` on circle `disk`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct ArcPiece {
    pub disk: usize,
    pub start: f64,
    pub end: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Shadow {
    Empty,
    /// `n = 1`: the segment `[a, b]`.
    Interval { a: f64, b: f64 },
    /// `n = 2`: intersection of disks with its boundary arcs and exact area.
    Region { disks: Vec<Disk>, arcs: Vec<ArcPiece>, area: f64 },
    /// `n ≥ 3`: nonempty intersection of balls.
    Balls { disks: Vec<Disk> },
}

impl Shadow {
    pub fn disks(&self) -> &[Disk] {
        match self {
            Shadow::Region { disks, .. } | Shadow::Balls { disks } => disks,
            _ => &[],
        }
    }

    /// Positive measure in the facet plane.
    pub fn is_solid(&self) -> bool {
        match self {
            Shadow::Empty => false,
            Shadow::Interval { a, b } => b > a,
            Shadow::Region { area, .. } => *area > 0.0,
            Shadow::Balls { .. } => true,
        }
    }

    pub fn contains(&self, y: &[f64]) -> bool {
        match self {
            Shadow::Empty => false,
            Shadow::Interval { a, b } => *a <= y[0] && y[0] <= *b,
            Shadow::Region { disks, .. } | Shadow::Balls { disks } => {
                disks.iter().all(|d| d.contains(y, 1e-14))
            }
        }
    }

    /// Boundary points containing every local extremum of `|y - q|²` on the
    /// boundary (`n ≤ 2` only): interval ends, arc ends, and the nearest and
    /// farthest points of each arc's circle when they lie on the arc.
    pub fn boundary_candidates(&self, q: &[f64]) -> Vec<Vec<f64>> {
        match self {
            Shadow::Interval { a, b } => vec![vec![*a], vec![*b]],
            Shadow::Region { disks, arcs, .. } => {
                let mut out = Vec::with_capacity(arcs.len() * 4);
                for arc in arcs {
                    let d = &disks[arc.disk];
                    let point = |phi: f64| vec![d.center[0] + d.radius * phi.cos(), d.center[1] + d.radius * phi.sin()];
                    out.push(point(arc.start));
                    out.push(point(arc.end));
                    let (dx, dy) = (q[0] - d.center[0], q[1] - d.center[1]);
                    if dx * dx + dy * dy > 0.0 {
                        let near = dy.atan2(dx);
                        for phi in [near, near + std::f64::consts::PI] {
                            if let Some(phi) = angle_in_arc(phi, arc.start, arc.end) {
                                out.push(point(phi));
                            }
                        }
                    }
                }
                out
            }
            _ => Vec::new(),
        }
    }

    /// Euclidean measure of the shadow; `n ≥ 3` falls back to sampling.
    pub fn euclidean_area(&self, n: usize, samples: usize, seed: u64) -> f64 {
        match self {
            Shadow::Empty => 0.0,
            Shadow::Interval { a, b } => (b - a).max(0.0),
            Shadow::Region { area, .. } => *area,
            Shadow::Balls { disks } => mc_intersection_volume(disks, n, samples, seed),
        }
    }
}

/// Returns `phi` shifted into `[start, end]` modulo 2π, if it lies there.
fn angle_in_arc(phi: f64, start: f64, end: f64) -> Option<f64> {
    let tau = std::f64::consts::TAU;
    let shifted = start + (phi - start).rem_euclid(tau);
    (shifted <= end).then_some(shifted)
}

/// Facet `i` in its own frame.
#[derive(Debug, Clone)]
pub(crate) struct Facet {
    /// Reflection swapping `e_i` and `e*`; its own inverse.
    pub frame: Isometry<f64>,
    pub height: f64,
    pub shadow: Shadow,
}

impl Facet {
    pub fn build(dirs: &[Direction<f64>], xs: &[f64], i: usize) -> Self {
        let n = dirs[i].dim();
        let reference = Direction::reference(n);
        let frame = Isometry::reflection(&dirs[i], &reference);
        let height = (-xs[i]).exp();
        let empty = |frame| Facet {
            frame,
            height,
            shadow: Shadow::Empty,
        };
        let mut disks = Vec::with_capacity(dirs.len());
        for j in 0..dirs.len() {
            if j == i {
                continue;
            }
            let chord = dirs[j].chord(&dirs[i]);
            if chord < DIRECTION_TOL {
                if xs[j] < xs[i] {
                    return empty(frame);
                }
                continue;
            }
            let (contact, one_minus_z) = frame_contact(&frame, &dirs[j], chord);
            let radius = xs[j].exp() / one_minus_z;
            let w2 = height * (2.0 * radius - height);
            if w2 <= 0.0 {
                return empty(frame);
            }
            disks.push(Disk {
                center: contact,
                radius: w2.sqrt(),
            });
        }
        let shadow = match n {
            1 => {
                let a = disks.iter().map(|d| d.center[0] - d.radius).fold(f64::NEG_INFINITY, f64::max);
                let b = disks.iter().map(|d| d.center[0] + d.radius).fold(f64::INFINITY, f64::min);
                if b >= a {
                    Shadow::Interval { a, b }
                } else {
                    Shadow::Empty
                }
            }
            2 => planar_region(disks),
            _ => {
                if ball_intersection_nonempty(&disks) {
                    Shadow::Balls { disks }
                } else {
                    Shadow::Empty
                }
            }
        };
        Facet { frame, height, shadow }
    }

    /// The boundary point above `y` in the original frame.
    pub fn lift(&self, y: &[f64]) -> HyperboloidPoint<f64> {
        let p = half_space_to_hyperboloid(&HalfSpacePoint::new(y.to_vec(), self.height).expect("positive height"));
        self.frame.apply(&p)
    }

    /// Half-space coordinates `(horizontal, height)` of `x` in this frame.
    pub fn project(&self, x: &HyperboloidPoint<f64>) -> (Vec<f64>, f64) {
        let u = hyperboloid_to_half_space(&self.frame.apply(x));
        (u.horizontal().to_vec(), u.height())
    }

    /// Boundary contact of the ideal point `e` in this frame; `None` for `e = e_i`.
    pub fn ideal_contact(&self, e: &Direction<f64>, e_i: &Direction<f64>) -> Option<Vec<f64>> {
        let chord = e.chord(e_i);
        (chord >= DIRECTION_TOL).then(|| frame_contact(&self.frame, e, chord).0)
    }
}

/// Image of `e` on `∂U` after the frame reflection, with `1 - z` computed
/// from the chord to `e_i` to avoid cancellation.
fn frame_contact(frame: &Isometry<f64>, e: &Direction<f64>, chord: f64) -> (Vec<f64>, f64) {
    let n = e.dim();
    let mut v = e.components().to_vec();
    v.push(1.0);
    let img = frame.apply_vector(&v);
    let one_minus_z = 0.5 * chord * chord;
    (img[..n].iter().map(|c| c / one_minus_z).collect(), one_minus_z)
}

/// Exact intersection of planar disks: boundary arcs by angular clipping and
/// area by Green's theorem.
fn planar_region(mut disks: Vec<Disk>) -> Shadow {
    let mut unique: Vec<Disk> = Vec::with_capacity(disks.len());
    for d in disks.drain(..) {
        let dup = unique.iter().any(|u| {
            let scale = u.radius.max(1.0);
            (u.center[0] - d.center[0]).abs() <= 1e-13 * scale
                && (u.center[1] - d.center[1]).abs() <= 1e-13 * scale
                && (u.radius - d.radius).abs() <= 1e-13 * scale
        });
        if !dup {
            unique.push(d);
        }
    }
    let disks = unique;
    let tau = std::f64::consts::TAU;
    let mut arcs = Vec::new();
    'circles: for (j, dj) in disks.iter().enumerate() {
        // Allowed angles satisfy cos(φ - φ_k) ≥ κ_k for every other disk k.
        let mut constraints: Vec<(f64, f64)> = Vec::new();
        for (k, dk) in disks.iter().enumerate() {
            if k == j {
                continue;
            }
            let (dx, dy) = (dk.center[0] - dj.center[0], dk.center[1] - dj.center[1]);
            let dist = (dx * dx + dy * dy).sqrt();
            if dist == 0.0 {
                if dj.radius <= dk.radius {
                    continue;
                }
                continue 'circles;
            }
            let kappa = (dist * dist + dj.radius * dj.radius - dk.radius * dk.radius) / (2.0 * dj.radius * dist);
            if kappa <= -1.0 {
                continue;
            }
            if kappa >= 1.0 {
                continue 'circles;
            }
            constraints.push((dy.atan2(dx), kappa.acos()));
        }
        let inside = |phi: f64| {
            constraints.iter().all(|&(center, half)| {
                let delta = (phi - center + std::f64::consts::PI).rem_euclid(tau) - std::f64::consts::PI;
                delta.abs() <= half
            })
        };
        if constraints.is_empty() {
            arcs.push(ArcPiece { disk: j, start: 0.0, end: tau });
            continue;
        }
        let mut cuts: Vec<f64> = constraints
            .iter()
            .flat_map(|&(c, h)| [(c - h).rem_euclid(tau), (c + h).rem_euclid(tau)])
            .collect();
        cuts.push(0.0);
        cuts.sort_by(f64::total_cmp);
        cuts.push(tau);
        let mut open: Option<f64> = None;
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b - a <= 0.0 {
                continue;
            }
            if inside(0.5 * (a + b)) {
                open.get_or_insert(a);
            } else if let Some(s) = open.take() {
                arcs.push(ArcPiece { disk: j, start: s, end: a });
            }
        }
        if let Some(s) = open {
            // Join with a piece starting at 0 so arcs never split at angle 0.
            match arcs.iter().position(|p| p.disk == j && p.start == 0.0) {
                Some(first) if s > 0.0 => {
                    let head = arcs.remove(first);
                    arcs.push(ArcPiece { disk: j, start: s, end: tau + head.end });
                }
                _ => arcs.push(ArcPiece { disk: j, start: s, end: tau }),
            }
        }
    }
    let area: f64 = arcs
        .iter()
        .map(|arc| {
            let d = &disks[arc.disk];
            let (c, w) = (&d.center, d.radius);
            0.5 * (w * w * (arc.end - arc.start)
                + w * (c[0] * (arc.end.sin() - arc.start.sin()) - c[1] * (arc.end.cos() - arc.start.cos())))
        })
        .sum();
    if arcs.is_empty() || area <= 0.0 {
        Shadow::Empty
    } else {
        Shadow::Region { disks, arcs, area }
    }
}

/// Convex feasibility of `∩ |y - c_j| ≤ w_j` via the scaled max-violation.
fn ball_intersection_nonempty(disks: &[Disk]) -> bool {
    let Some(smallest) = disks.iter().min_by(|a, b| a.radius.total_cmp(&b.radius)) else {
        return true;
    };
    let violation = |y: &[f64]| {
        disks
            .iter()
            .map(|d| {
                let d2: f64 = y.iter().zip(&d.center).map(|(a, b)| (a - b) * (a - b)).sum();
                d2 / (d.radius * d.radius) - 1.0
            })
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let (_, v) = nelder_mead(violation, &smallest.center, 0.5 * smallest.radius, 1e-14, 20_000);
    v <= 1e-10
}

/// Monte-Carlo measure of `∩ disks` over the bounding box of the smallest one.
/// Samples are drawn in fixed-size chunks, each on its own RNG stream, and the
/// hit counts are reduced in chunk order, so the result only depends on the seed.
pub(crate) fn mc_intersection_volume(disks: &[Disk], n: usize, samples: usize, seed: u64) -> f64 {
    let Some(smallest) = disks.iter().min_by(|a, b| a.radius.total_cmp(&b.radius)) else {
        return f64::INFINITY;
    };
    const CHUNK: usize = 1 << 16;
    let chunks = samples.div_ceil(CHUNK);
    let hits: Vec<u64> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let count = CHUNK.min(samples - k * CHUNK);
            let mut y = vec![0.0; n];
            let mut hit = 0u64;
            for _ in 0..count {
                for (v, c) in y.iter_mut().zip(&smallest.center) {
                    *v = c + smallest.radius * (2.0 * rng.random::<f64>() - 1.0);
                }
                if disks.iter().all(|d| d.contains(&y, 0.0)) {
                    hit += 1;
                }
            }
            hit
        })
        .collect();
    let total: u64 = hits.iter().sum();
    let box_volume = (2.0 * smallest.radius).powi(n as i32);
    box_volume * total as f64 / samples as f64
}
