//! End-to-end acceptance checks. Each test prints one PASS/FAIL line.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

mod common;

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::time::Instant;

use common::{even_measure, planar_spec, report, rng};
use horomink::geometry::{boost_to_origin, polar_point};
use horomink::horoball::{busemann_value, horoball_contains, horoball_transform};
use horomink::oracle::{grid_search_even, mc_volume};
use horomink::polytope::{
    boundedness_bound, facet_area_with, outer_parallel_support, t_body_lower_bound, t_body_volume, t_body_wulff_spec,
    FacetAreaMethod,
};
use horomink::solver::phi_p;
use horomink::*;
use rand::Rng;

const LN2: f64 = std::f64::consts::LN_2;

fn lens(n: usize, s: f64) -> HConvexPolytope {
    build_polytope(&PolytopeSpec::lens(&Direction::reference(n), s, s).unwrap()).unwrap()
}

fn grid(count: usize) -> SphereQuadrature {
    build_quadrature(1, count, QuadratureKind::UniformGrid, 0).unwrap()
}

fn lens_volume() -> f64 {
    4.0 * (3f64.sqrt() - PI / 3.0)
}

fn n2_lens_mc_area(seed: u64) -> f64 {
    facet_area_with(&lens(2, LN2), 0, FacetAreaMethod::MonteCarlo { samples: 1_000_000, seed }).unwrap()
}

#[test]
fn criterion_01_lens_facet_area() {
    let start = Instant::now();
    let planar = facet_area(&lens(1, LN2), 0).unwrap();
    let err1 = (planar - 2.0 * 3f64.sqrt()).abs();
    let spatial = n2_lens_mc_area(2024);
    let rel2 = (spatial - 3.0 * PI).abs() / (3.0 * PI);
    let secs = start.elapsed().as_secs_f64();
    report(
        1,
        "lens facet area",
        err1 <= 1e-9 && rel2 <= 5e-3 && secs <= 5.0,
        format!("n=1 abs err {err1:.1e}, n=2 rel err {rel2:.2e}, {secs:.2} s"),
    );
}

#[test]
fn criterion_02_variational_formula() {
    let start = Instant::now();
    let quad = grid(4096);
    let mut r = rng(2);
    let mut worst: f64 = 0.0;
    let mut facets = 0;
    for _ in 0..50 {
        let m = r.random_range(2..=5);
        let p = build_polytope(&planar_spec(&mut r, m, 0.2, 2.0)).unwrap();
        for i in 0..p.len() {
            let s = facet_area(&p, i).unwrap();
            let fd = facet_area_fd(&p, i, 1e-4, &quad).unwrap();
            worst = worst.max((s - fd).abs() / s.max(1e-8));
            facets += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    report(
        2,
        "variational formula",
        worst <= 1e-3 && secs <= 60.0,
        format!("{facets} facets, worst rel gap {worst:.2e}, {secs:.1} s"),
    );
}

/// Volumes of 20 polytopes and their images under 5 boosts each.
fn isometry_volumes(seed: u64) -> Vec<(f64, f64)> {
    let quad = grid(10_000);
    let mut r = rng(seed);
    let mut out = Vec::new();
    for _ in 0..20 {
        let m = r.random_range(2..=6);
        // x ≥ 1.5 keeps the inradius above 1, so O stays inside after a unit boost
        let spec = planar_spec(&mut r, m, 1.5, 2.5);
        let v = volume(&build_polytope(&spec).unwrap(), &quad).unwrap();
        for _ in 0..5 {
            let t = Direction::from_angle(r.random_range(0.0..TAU));
            let iso = Isometry::boost(&t, r.random_range(0.0..1.0));
            let moved = spec
                .horoballs()
                .iter()
                .map(|(e, x)| {
                    let h = horoball_transform(&Horoball::new(e.clone(), *x), &iso);
                    (h.center, h.s)
                })
                .collect();
            let image = build_polytope(&PolytopeSpec::new(1, moved, false).unwrap()).unwrap();
            out.push((v, volume(&image, &quad).unwrap()));
        }
    }
    out
}

#[test]
fn criterion_03_isometry_invariance() {
    let pairs = isometry_volumes(3);
    let worst = pairs.iter().map(|(a, b)| (a - b).abs() / a).fold(0.0, f64::max);
    report(3, "volume isometry invariance", worst <= 1e-3, format!("{} boosts, worst rel change {worst:.2e}", pairs.len()));
}

#[test]
fn criterion_04_lens_volume() {
    let p = lens(1, LN2);
    let quad = volume(&p, &grid(4096)).unwrap();
    let est = mc_volume(&p, 1_000_000, 4).unwrap();
    let target = lens_volume();
    let q_err = (quad - target).abs();
    let sigmas = (est.value - target).abs() / est.std_error;
    report(
        4,
        "lens volume",
        q_err <= 1e-4 && sigmas <= 3.0,
        format!("quadrature err {q_err:.1e}, mc {:.5} ± {:.5} ({sigmas:.2}σ)", est.value, est.std_error),
    );
}

#[test]
fn criterion_05_t_body() {
    let lower_ok = [1.0, 2.0, 4.0].iter().all(|&r| t_body_volume(r, 1).unwrap() >= t_body_lower_bound(r, 1));
    // T(2) from 256 horoballs in H³, against the one-dimensional integral
    let spec = t_body_wulff_spec(2.0, 2, 256).unwrap();
    let quad = build_quadrature(2, 16384, QuadratureKind::ProductRule, 0).unwrap();
    let wulff = volume(&build_polytope(&spec).unwrap(), &quad).unwrap();
    let exact = t_body_volume(2.0, 2).unwrap();
    let wulff_rel = (wulff - exact).abs() / exact;
    // in H² the construction gives two horoballs and the body exactly
    let planar = volume_exact(&build_polytope(&t_body_wulff_spec(2.0, 1, 0).unwrap()).unwrap()).unwrap();
    let planar_rel = (planar - t_body_volume(2.0, 1).unwrap()).abs() / planar;
    // a body reaching distance R has volume at least V(T(R))
    let mut r = rng(5);
    let mut bounded = 0;
    for _ in 0..50 {
        let m = r.random_range(2..=6);
        let p = build_polytope(&planar_spec(&mut r, m, 0.2, 2.0)).unwrap();
        let v = volume_exact(&p).unwrap();
        let (big, _) = extremal_radii(&p).unwrap();
        let max_u = p.canonical_support().iter().cloned().fold(0.0, f64::max);
        if t_body_volume(big, 1).unwrap() <= v * (1.0 + 1e-9) && max_u <= boundedness_bound(v, 1).unwrap() + 1e-9 {
            bounded += 1;
        }
    }
    report(
        5,
        "T(r) bounds",
        lower_ok && wulff_rel <= 0.01 && planar_rel <= 1e-9 && bounded == 50,
        format!("lower bounds {lower_ok}, Wulff rel {wulff_rel:.2e}, planar rel {planar_rel:.1e}, bounded {bounded}/50"),
    );
}

fn square_measure() -> DiscreteMeasure {
    DiscreteMeasure::from_pairs(1, vec![(Direction::from_angle(0.0), 1.0), (Direction::from_angle(FRAC_PI_2), 1.0)]).unwrap()
}

#[test]
fn criterion_06_solver_p0() {
    let start = Instant::now();
    let mu = square_measure();
    let res = solve_even(&mu, &SolverConfig::with_p(0.0)).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let oracle = grid_search_even(&mu, 0.0, 1.0, 400).unwrap();
    let z_err = res.z.iter().map(|z| (z - 0.25).abs()).fold(0.0, f64::max);
    let cell = FRAC_PI_2 / 400.0;
    let oracle_gap = res.z.iter().zip(&oracle).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    report(
        6,
        "solver p = 0",
        res.converged && z_err <= 1e-4 && res.residual_max_rel <= 1e-3 && res.iterations <= 200 && secs <= 10.0 && oracle_gap <= cell,
        format!(
            "z err {z_err:.1e}, residual {:.1e}, {} iterations, grid oracle gap {oracle_gap:.1e}, {secs:.2} s",
            res.residual_max_rel, res.iterations
        ),
    );
}

/// Residual, constraint error and monotonicity for one solver run.
fn run_instance(mu: &DiscreteMeasure, p: f64) -> (bool, f64, f64, bool) {
    let res = solve_even(mu, &SolverConfig::with_p(p)).unwrap();
    let constraint = if p < 0.0 { (res.volume - 1.0).abs() } else { (phi_p(&res.z, mu, p).unwrap() - 1.0).abs() };
    let monotone = res.objective_trace.windows(2).all(|w| if p >= 0.0 { w[1] >= w[0] } else { w[1] <= w[0] });
    (res.converged, res.residual_max_rel, constraint, monotone)
}

#[test]
fn criterion_07_solver_p_family() {
    let start = Instant::now();
    let n = 1.0;
    let mut lines = Vec::new();
    let mut ok = true;
    for (k, p) in [2.0, -1.0, -n].into_iter().enumerate() {
        let mut r = rng(70 + k as u64);
        let mut worst_res: f64 = 0.0;
        let mut worst_con: f64 = 0.0;
        let mut all = true;
        for _ in 0..10 {
            let m = r.random_range(2..=6);
            let mu = even_measure(&mut r, m);
            let (converged, res, con, mono) = run_instance(&mu, p);
            all &= converged && mono && res <= 1e-2 && (p >= 0.0 || con <= 1e-3);
            worst_res = worst_res.max(res);
            worst_con = worst_con.max(con);
        }
        ok &= all;
        lines.push(format!("p={p}: residual ≤ {worst_res:.1e}, constraint err ≤ {worst_con:.1e}"));
    }
    let secs = start.elapsed().as_secs_f64();
    report(7, "solver p family", ok && secs <= 300.0, format!("{}; {secs:.1} s", lines.join("; ")));
}

#[test]
fn criterion_08_metric_suite() {
    let mut r = rng(8);
    let quad = grid(720);
    let mut axioms = 0;
    for _ in 0..100 {
        let mut pick = || {
            let m = r.random_range(2..=5);
            build_polytope(&planar_spec(&mut r, m, 0.2, 2.0)).unwrap()
        };
        let (a, b, c) = (pick(), pick(), pick());
        let ab = hausdorff_distance(&a, &b, &quad).unwrap();
        let ba = hausdorff_distance(&b, &a, &quad).unwrap();
        let ac = hausdorff_distance(&a, &c, &quad).unwrap();
        let cb = hausdorff_distance(&c, &b, &quad).unwrap();
        let aa = hausdorff_distance(&a, &a, &quad).unwrap();
        if ab == ba && ab >= 0.0 && aa == 0.0 && ab <= ac + cb + 1e-9 && (ab > 0.0 || a.spec() == b.spec()) {
            axioms += 1;
        }
    }
    // max_e u = R and min_e u = r
    let mut extremal = 0;
    let mut worst_extremal: f64 = 0.0;
    let dense: Vec<Direction> = (0..20_000).map(|k| Direction::from_angle(TAU * k as f64 / 20_000.0)).collect();
    for _ in 0..50 {
        let m = r.random_range(2..=6);
        let p = build_polytope(&planar_spec(&mut r, m, 0.2, 2.0)).unwrap();
        let us: Vec<f64> = dense.iter().map(|e| support(&p, e).unwrap()).collect();
        let (big, small) = extremal_radii(&p).unwrap();
        let max_u = us.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min_u = us.iter().cloned().fold(f64::INFINITY, f64::min);
        let gap = (max_u - big).abs().max((min_u - small).abs());
        worst_extremal = worst_extremal.max(gap);
        if gap <= 1e-3 {
            extremal += 1;
        }
    }
    // ρ(P, θ) + ε ≤ ρ(P^ε, θ) ≤ ρ(P, θ) + C(r, R) ε
    let mut parallel = 0;
    let outer: Vec<Direction> = (0..2048).map(|k| Direction::from_angle(TAU * k as f64 / 2048.0)).collect();
    for _ in 0..50 {
        let m = r.random_range(2..=6);
        let p = build_polytope(&planar_spec(&mut r, m, 0.2, 2.0)).unwrap();
        let eps = r.random_range(1e-3..0.5);
        let q = build_polytope(&outer_parallel_support(&p, eps, &outer).unwrap()).unwrap();
        let (big, small) = extremal_radii(&p).unwrap();
        let c = 2.0 * (2.0 * big).exp() / (small * small.exp());
        let holds = (0..720).all(|k| {
            let t = Direction::from_angle(TAU * (k as f64 + 0.37) / 720.0);
            let (rp, rq) = (radial(&p, &t).unwrap(), radial(&q, &t).unwrap());
            rq >= rp + eps - 1e-9 && rq <= rp + c * eps
        });
        if holds {
            parallel += 1;
        }
    }
    report(
        8,
        "metric suite",
        axioms == 100 && extremal == 50 && parallel == 50,
        format!("axioms {axioms}/100, extremal {extremal}/50 (worst {worst_extremal:.1e}), parallel bound {parallel}/50"),
    );
}

/// Separating horoballs for 50 random exterior points; returns
/// `(worst slack over boundary samples, all excluded)` and the horoball parameters.
fn separation_run(seed: u64) -> (f64, bool, Vec<f64>) {
    let mut r = rng(seed);
    let mut worst: f64 = f64::NEG_INFINITY;
    let mut excluded = true;
    let mut params = Vec::new();
    for _ in 0..50 {
        let m = r.random_range(2..=6);
        let p = build_polytope(&planar_spec(&mut r, m, 0.2, 2.0)).unwrap();
        let t = Direction::from_angle(r.random_range(0.0..TAU));
        let q = polar_point(radial(&p, &t).unwrap() + r.random_range(0.05..2.0), &t);
        let b = separate(&p, &q).unwrap();
        excluded &= !horoball_contains(&b, &q, false);
        for k in 0..10_000 {
            let th = Direction::from_angle(TAU * k as f64 / 10_000.0);
            let x = polar_point(radial(&p, &th).unwrap(), &th);
            worst = worst.max(busemann_value(&b.center, &x) - b.s);
        }
        params.push(b.s);
        params.extend_from_slice(b.center.components());
    }
    (worst, excluded, params)
}

#[test]
fn criterion_09_separation() {
    let (worst, excluded, _) = separation_run(9);
    report(9, "separating horosphere", worst <= 1e-6 && excluded, format!("worst overshoot {worst:.1e}, all excluded {excluded}"));
}

fn bits(v: &[f64]) -> Vec<u64> {
    v.iter().map(|x| x.to_bits()).collect()
}

#[test]
fn criterion_10_determinism() {
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let run = || {
        let mut out = vec![n2_lens_mc_area(2024)];
        out.extend(isometry_volumes(3).into_iter().flat_map(|(a, b)| [a, b]));
        let est = mc_volume(&lens(1, LN2), 1_000_000, 4).unwrap();
        out.extend([est.value, est.std_error]);
        let mut r = rng(70);
        let mu = even_measure(&mut r, 4);
        let res = solve_even(&mu, &SolverConfig::with_p(2.0)).unwrap();
        out.extend(res.z);
        out.extend(res.objective_trace);
        out.push(res.lambda);
        out.extend(separation_run(9).2);
        let p = build_polytope(&t_body_wulff_spec(2.0, 2, 256).unwrap()).unwrap();
        out.push(volume(&p, &build_quadrature(2, 16384, QuadratureKind::ProductRule, 0).unwrap()).unwrap());
        let mc = build_quadrature(3, 4096, QuadratureKind::MonteCarlo, 17).unwrap();
        out.push(volume(&lens(3, 0.5), &mc).unwrap());
        out
    };
    let first = run();
    let second = run();
    let serial = single.install(run);
    let same = bits(&first) == bits(&second) && bits(&first) == bits(&serial);
    report(10, "determinism", same, format!("{} numbers compared across reruns and a 1-thread pool", first.len()));
}

#[test]
fn boost_keeps_origin_map_consistent() {
    // sanity for the isometry construction used above
    let x = polar_point(0.8, &Direction::from_angle(1.0));
    let iso = boost_to_origin(&x);
    assert!(iso.apply(&x).spatial().iter().all(|c| c.abs() < 1e-12));
}
