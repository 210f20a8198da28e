//! Random instances shared by the integration suites.
#![allow(dead_code)]

use horomink::{DiscreteMeasure, Direction, PolytopeSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, TAU};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Angles whose pairwise angular gap is at least `gap`, taken modulo `period`.
pub fn separated_angles(rng: &mut ChaCha8Rng, count: usize, period: f64, gap: f64) -> Vec<f64> {
    let mut angles: Vec<f64> = Vec::with_capacity(count);
    while angles.len() < count {
        let a = rng.random_range(0.0..period);
        let far = angles.iter().all(|b| {
            let d = (a - b).rem_euclid(period);
            d.min(period - d) >= gap
        });
        if far {
            angles.push(a);
        }
    }
    angles
}

/// Planar spec with `m` directions (at least 0.05 rad apart) and `x_i ∈ [lo, hi)`.
pub fn planar_spec(rng: &mut ChaCha8Rng, m: usize, lo: f64, hi: f64) -> PolytopeSpec {
    let angles = separated_angles(rng, m, TAU, 0.05);
    let hs = angles.into_iter().map(|a| (Direction::from_angle(a), rng.random_range(lo..hi))).collect();
    PolytopeSpec::new(1, hs, false).expect("valid spec")
}

/// Even planar measure with `m` antipodal pairs and weights in `[0.5, 2)`.
pub fn even_measure(rng: &mut ChaCha8Rng, m: usize) -> DiscreteMeasure {
    let angles = separated_angles(rng, m, PI, 0.05);
    let half = angles.into_iter().map(|a| (Direction::from_angle(a), rng.random_range(0.5..2.0))).collect();
    DiscreteMeasure::from_pairs(1, half).expect("valid measure")
}

/// Prints one verdict line and fails the test when the criterion fails.
pub fn report(id: u32, name: &str, ok: bool, detail: String) {
    println!("criterion {id:>2} [{name}]: {} ({detail})", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {id} failed: {detail}");
}
