//! Horoballs `B_e(s) = {X : f_e(X) < s}` and their horospheres `H_e(s)`.
//!
//! `f_e(X) = log(-X·(e, 1))` is the Busemann function of the ideal point `e`
//! normalized so that `f_e(O) = 0`. A horoball is the same thing as the null
//! vector `e^{-s}(e, 1)`, which is how isometries act on it.

use crate::error::{Error, Result};
use crate::geometry::{ideal_to_half_space, lorentz_dot, Direction, HyperboloidPoint, Isometry};
use crate::scalar::{norm_sq, Real};

/// Cosines closer to 1 than this give an unbounded radial extent.
const UNBOUNDED_GAP: f64 = 1e-9;

/// Closed horoball `B̄_e(s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Horoball<T: Real> {
    pub center: Direction<T>,
    pub s: T,
}

impl<T: Real> Horoball<T> {
    pub fn new(center: Direction<T>, s: T) -> Self {
        Self { center, s }
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    /// The null vector `e^{-s}(e, 1)` representing the horoball.
    pub fn null_vector(&self) -> Vec<T> {
        let scale = (-self.s).exp();
        let mut v: Vec<T> = self.center.components().iter().map(|&c| scale * c).collect();
        v.push(scale);
        v
    }
}

/// Distance from `O` to the boundary of a horoball along a ray.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialExtent<T> {
    Finite(T),
    Unbounded,
}

impl<T: Real> RadialExtent<T> {
    pub fn finite(self) -> Option<T> {
        match self {
            RadialExtent::Finite(v) => Some(v),
            RadialExtent::Unbounded => None,
        }
    }

    /// The extent as a number, `+∞` when unbounded.
    pub fn value(self) -> T {
        self.finite().unwrap_or_else(T::infinity)
    }
}

/// Horoball as a Euclidean region of the upper half-space chart.
#[derive(Debug, Clone, PartialEq)]
pub enum HalfSpaceHoroballForm<T: Real> {
    /// `{y_{n+1} > height}`, the horoball centered at `e*`.
    Plane { height: T },
    /// Open Euclidean ball of `radius` tangent to the boundary at `(contact, 0)`.
    Ball { contact: Vec<T>, radius: T },
}

impl<T: Real> HalfSpaceHoroballForm<T> {
    /// Membership of the half-space point `(horizontal, height)`.
    pub fn contains(&self, horizontal: &[T], height: T) -> bool {
        match self {
            HalfSpaceHoroballForm::Plane { height: h } => height > *h,
            HalfSpaceHoroballForm::Ball { contact, radius } => {
                let dy = height - *radius;
                let d2: T = horizontal
                    .iter()
                    .zip(contact)
                    .map(|(&a, &b)| (a - b) * (a - b))
                    .sum::<T>()
                    + dy * dy;
                d2 < *radius * *radius
            }
        }
    }
}

/// `f_e(X) = log(x_{n+2} - x·e)`, the signed horospherical distance.
pub fn busemann_value<T: Real>(e: &Direction<T>, x: &HyperboloidPoint<T>) -> T {
    let mut n = e.components().to_vec();
    n.push(T::one());
    (-lorentz_dot(x.coords(), &n)).ln()
}

/// `f_e(X) < s` when `strict`, `f_e(X) ≤ s` otherwise.
pub fn horoball_contains<T: Real>(b: &Horoball<T>, x: &HyperboloidPoint<T>, strict: bool) -> bool {
    let f = busemann_value(&b.center, x);
    if strict {
        f < b.s
    } else {
        f <= b.s
    }
}

/// Largest `λ` with `polar_point(λ, θ) ∈ B̄_e(s)`; needs `s > 0`.
///
/// With `c = θ·e` and `t = e^λ` the boundary condition `cosh λ - c sinh λ = e^s`
/// reads `(1-c)t² - 2e^s t + (1+c) = 0`; the larger root is the exit point.
pub fn horoball_radial<T: Real>(b: &Horoball<T>, theta: &Direction<T>) -> Result<RadialExtent<T>> {
    if !(b.s > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "radial extent needs the origin inside (s = {} ≤ 0)",
            b.s
        )));
    }
    let c = theta.dot(&b.center).min(T::one()).max(-T::one());
    if c > T::one() - T::lit(UNBOUNDED_GAP) {
        return Ok(RadialExtent::Unbounded);
    }
    let es = b.s.exp();
    // e^{2s} - 1 + c² = expm1(2s) + c² keeps precision for small s
    let disc = ((b.s + b.s).exp_m1() + c * c).sqrt();
    let t = (es + disc) / (T::one() - c);
    Ok(RadialExtent::Finite(t.ln()))
}

/// Image of a horoball under an isometry.
pub fn horoball_transform<T: Real>(b: &Horoball<T>, iso: &Isometry<T>) -> Horoball<T> {
    let image = iso.apply_vector(&b.null_vector());
    let n = b.dim();
    let lambda = image[n + 1];
    let spatial: Vec<T> = image[..=n].iter().map(|&c| c / lambda).collect();
    let center = Direction::new(spatial).expect("image of a null vector has a nonzero direction");
    Horoball::new(center, -lambda.ln())
}

/// Euclidean form of the horoball in the half-space chart (`e* ↦ ∞`).
pub fn halfspace_form<T: Real>(b: &Horoball<T>) -> HalfSpaceHoroballForm<T> {
    match ideal_to_half_space(&b.center) {
        None => HalfSpaceHoroballForm::Plane {
            height: (-b.s).exp(),
        },
        Some(contact) => {
            let radius = b.s.exp() * (T::one() + norm_sq(&contact)) / T::lit(2.0);
            HalfSpaceHoroballForm::Ball { contact, radius }
        }
    }
}

/// Euclidean ball bounding the horoball in the Poincaré ball model:
/// center `e/(1+e^s)`, radius `e^s/(1+e^s)`, tangent to the sphere at `e`.
pub fn ball_model_form<T: Real>(b: &Horoball<T>) -> (Vec<T>, T) {
    let es = b.s.exp();
    let denom = T::one() + es;
    let center = b.center.components().iter().map(|&c| c / denom).collect();
    (center, es / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{
        convert_model, geodesic_distance, half_space_to_hyperboloid, polar_point, HalfSpacePoint,
        Model, ModelPoint,
    };
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn dir(v: &[f64]) -> Direction<f64> {
        Direction::new(v.to_vec()).unwrap()
    }

    /// Bisection on `cosh λ - c sinh λ = e^s` over `[0, 60]`.
    fn radial_oracle(s: f64, c: f64) -> f64 {
        let g = |l: f64| l.cosh() - c * l.sinh() - s.exp();
        let (mut lo, mut hi) = (0.0, 60.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn busemann_on_axis() {
        let e = dir(&[0.0, 1.0, 0.0]);
        let o = HyperboloidPoint::origin(2);
        assert_eq!(busemann_value(&e, &o), 0.0);
        assert_abs_diff_eq!(busemann_value(&e, &polar_point(1.7, &e.antipode())), 1.7, epsilon = 1e-13);
        assert_abs_diff_eq!(busemann_value(&e, &polar_point(1.7, &e)), -1.7, epsilon = 1e-13);
    }

    #[test]
    fn containment_strictness() {
        let e = dir(&[1.0, 0.0]);
        let o = HyperboloidPoint::origin(1);
        assert!(horoball_contains(&Horoball::new(e.clone(), 1.0), &o, true));
        assert!(!horoball_contains(&Horoball::new(e.clone(), -1.0), &o, true));
        let b = Horoball::new(e.clone(), 0.0);
        assert!(!horoball_contains(&b, &o, true));
        assert!(horoball_contains(&b, &o, false));
    }

    #[test]
    fn radial_closed_form_matches_bisection() {
        let e = dir(&[0.0, 0.0, 1.0]);
        let b = Horoball::new(e.clone(), 2f64.ln());
        let side = dir(&[1.0, 0.0, 0.0]);
        let r = horoball_radial(&b, &side).unwrap().finite().unwrap();
        assert_abs_diff_eq!(r, (2.0 + 3f64.sqrt()).ln(), epsilon = 1e-14);
        assert_abs_diff_eq!(r, radial_oracle(2f64.ln(), 0.0), epsilon = 1e-12);
        assert_abs_diff_eq!(r, 1.31696, epsilon = 1e-5);
        assert_abs_diff_eq!(horoball_radial(&b, &e.antipode()).unwrap().value(), 2f64.ln(), epsilon = 1e-15);
        assert_eq!(horoball_radial(&b, &e).unwrap(), RadialExtent::Unbounded);
        for c in [-0.9f64, -0.3, 0.2, 0.7, 0.99] {
            let theta = dir(&[(1.0 - c * c).sqrt(), 0.0, c]);
            let got = horoball_radial(&b, &theta).unwrap().value();
            assert_abs_diff_eq!(got, radial_oracle(2f64.ln(), c), epsilon = 1e-10);
        }
        assert!(horoball_radial(&Horoball::new(e, 0.0), &side).is_err());
    }

    #[test]
    fn translation_toward_center_shifts_parameter() {
        let e = dir(&[0.6, 0.8]);
        let b = Horoball::new(e.clone(), 0.9);
        // Moving everything by d toward e brings e's horospheres closer to O.
        let d = 0.35;
        let iso = Isometry::boost(&e, -d);
        let img = horoball_transform(&b, &iso);
        assert!(img.center.chord(&e) < 1e-12);
        assert_abs_diff_eq!(img.s, b.s + d, epsilon = 1e-12);
        let iso = Isometry::boost(&e, d);
        let img = horoball_transform(&b, &iso);
        assert_abs_diff_eq!(img.s, b.s - d, epsilon = 1e-12);
        assert_abs_diff_eq!(busemann_value(&e, &iso.apply(&HyperboloidPoint::origin(1))), -d, epsilon = 1e-12);
        let same = horoball_transform(&b, &Isometry::identity(1));
        assert!(same.center.chord(&e) < 1e-15);
        assert_abs_diff_eq!(same.s, 0.9, epsilon = 1e-15);
    }

    #[test]
    fn rotation_moves_center_only() {
        let e = dir(&[1.0, 0.0]);
        let rot = Isometry::from_orthogonal(1, &[0.0, -1.0, 1.0, 0.0]).unwrap();
        let img = horoball_transform(&Horoball::new(e, 0.4), &rot);
        assert!(img.center.chord(&dir(&[0.0, 1.0])) < 1e-15);
        assert_abs_diff_eq!(img.s, 0.4, epsilon = 1e-15);
    }

    #[test]
    fn halfspace_golden_forms() {
        let b = Horoball::new(Direction::<f64>::reference(2), 0.7);
        assert_eq!(halfspace_form(&b), HalfSpaceHoroballForm::Plane { height: (-0.7f64).exp() });
        let s = 1.3;
        match halfspace_form(&Horoball::new(Direction::<f64>::reference(2).antipode(), s)) {
            HalfSpaceHoroballForm::Ball { contact, radius } => {
                assert_eq!(contact, vec![0.0, 0.0]);
                assert_abs_diff_eq!(radius, s.exp() / 2.0, epsilon = 1e-14);
            }
            other => panic!("unexpected {other:?}"),
        }
        let r = 1.8f64;
        let theta = dir(&[0.6, -0.8]);
        let p: Vec<f64> = theta.components().iter().map(|c| (r / 2.0).exp() * c).collect();
        let e = crate::geometry::half_space_to_ideal(&p);
        match halfspace_form(&Horoball::new(e, 0.0)) {
            HalfSpaceHoroballForm::Ball { contact, radius } => {
                assert_abs_diff_eq!(contact[0], p[0], epsilon = 1e-12);
                assert_abs_diff_eq!(radius, (1.0 + r.exp()) / 2.0, epsilon = 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ball_model_form_touches_diameter() {
        let e = dir(&[0.0, 1.0]);
        let s = 0.8;
        let (c, rad) = ball_model_form(&Horoball::new(e.clone(), s));
        // The horosphere crosses the diameter at polar_point(s, -e).
        let x = polar_point(s, &e.antipode());
        let y = match convert_model(&ModelPoint::Hyperboloid(x), Model::Ball).unwrap() {
            ModelPoint::Ball(y) => y,
            _ => unreachable!(),
        };
        let d = ((y.coords()[0] - c[0]).powi(2) + (y.coords()[1] - c[1]).powi(2)).sqrt();
        assert_abs_diff_eq!(d, rad, epsilon = 1e-14);
        assert_abs_diff_eq!(c[1] + rad, 1.0, epsilon = 1e-15);
    }

    /// Points of `H_e(s)` in a frame where `e` is sent to `e*`: the horizontal
    /// plane at height `e^{-s}`.
    fn horosphere_point(e: &Direction<f64>, s: f64, u: f64) -> HyperboloidPoint<f64> {
        let to_ref = Isometry::reflection(e, &Direction::reference(1));
        let y = half_space_to_hyperboloid(&HalfSpacePoint::new(vec![u], (-s).exp()).unwrap());
        to_ref.inverse().apply(&y)
    }

    fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..200 {
            let c = b - g * (b - a);
            let d = a + g * (b - a);
            if f(c) < f(d) {
                b = d;
            } else {
                a = c;
            }
        }
        f(0.5 * (a + b))
    }

    fn arb_dir(n: usize) -> impl Strategy<Value = Direction<f64>> {
        proptest::collection::vec(-1.0f64..1.0, n + 1).prop_filter_map("nonzero", |v| Direction::new(v).ok())
    }

    fn arb_point(n: usize) -> impl Strategy<Value = HyperboloidPoint<f64>> {
        (arb_dir(n), 0.0f64..3.0).prop_map(|(d, r)| polar_point(r, &d))
    }

    fn arb_boost(n: usize) -> impl Strategy<Value = Isometry<f64>> {
        (arb_dir(n), -1.5f64..1.5).prop_map(|(d, t)| Isometry::boost(&d, t))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn radial_hits_horosphere(e in arb_dir(2), theta in arb_dir(2), s in 0.01f64..3.0) {
            let b = Horoball::new(e.clone(), s);
            if let RadialExtent::Finite(l) = horoball_radial(&b, &theta).unwrap() {
                let f = busemann_value(&e, &polar_point(l, &theta));
                prop_assert!((f - s).abs() <= 1e-9, "f = {f}, s = {s}");
            } else {
                prop_assert!(theta.dot(&e) > 1.0 - 1e-9);
            }
        }

        #[test]
        fn transform_preserves_membership(e in arb_dir(2), s in -2.0f64..2.0, iso in arb_boost(2),
                                          xs in proptest::collection::vec(arb_point(2), 20)) {
            let b = Horoball::new(e, s);
            let img = horoball_transform(&b, &iso);
            for x in &xs {
                let f = busemann_value(&b.center, x);
                if (f - s).abs() < 1e-9 { continue; }
                prop_assert_eq!(horoball_contains(&b, x, true), horoball_contains(&img, &iso.apply(x), true));
            }
        }

        #[test]
        fn transform_composes(e in arb_dir(2), s in -2.0f64..2.0, a in arb_boost(2), b in arb_boost(2)) {
            let h = Horoball::new(e, s);
            let once = horoball_transform(&h, &b.compose(&a));
            let twice = horoball_transform(&horoball_transform(&h, &a), &b);
            prop_assert!((once.s - twice.s).abs() <= 1e-9);
            prop_assert!(once.center.chord(&twice.center) <= 1e-9);
        }

        #[test]
        fn halfspace_form_agrees_with_membership(e in arb_dir(2), s in -1.5f64..1.5,
                                                 xs in proptest::collection::vec(arb_point(2), 40)) {
            let b = Horoball::new(e, s);
            let form = halfspace_form(&b);
            for x in &xs {
                if (busemann_value(&b.center, x) - s).abs() < 1e-9 { continue; }
                let u = match convert_model(&ModelPoint::Hyperboloid(x.clone()), Model::HalfSpace).unwrap() {
                    ModelPoint::HalfSpace(u) => u,
                    _ => unreachable!(),
                };
                prop_assert_eq!(form.contains(u.horizontal(), u.height()), horoball_contains(&b, x, true));
            }
        }

        #[test]
        fn parallel_horosphere_at_distance_eps(e in arb_dir(1), s in -1.0f64..1.5, eps in 0.01f64..1.0, u in -2.0f64..2.0) {
            let x = horosphere_point(&e, s, u);
            prop_assert!((busemann_value(&e, &x) - s).abs() < 1e-9);
            let dist = golden_min(|v| geodesic_distance(&x, &horosphere_point(&e, s + eps, v)), u - 10.0, u + 10.0);
            prop_assert!((dist - eps).abs() <= 1e-8, "dist {dist} eps {eps}");
        }
    }
}
