//! Points and isometries of hyperbolic space `H^{n+1}`.
//!
//! The hyperboloid `{X : X·X = -1, x_{n+2} > 0}` in Minkowski space with the
//! Lorentzian product `X·Y = Σ_{i≤n+1} x_i y_i - x_{n+2} y_{n+2}` is the
//! canonical representation. The Poincaré ball and the upper half-space are
//! charts. The half-space chart sends the reference boundary direction
//! `e* = (0, …, 0, 1)` to infinity and the origin `O = (0, …, 0, 1)` to `(0, 1)`.

use crate::error::{Error, Result};
use crate::scalar::{dot, norm, norm_sq, Real};

const UNIT_TOL: f64 = 1e-12;
const HYPERBOLOID_TOL: f64 = 1e-10;

/// Unit vector of `S^n ⊂ R^{n+1}`; center of a horoball or a ray direction.
#[derive(Debug, Clone, PartialEq)]
pub struct Direction<T: Real> {
    components: Vec<T>,
}

impl<T: Real> Direction<T> {
    /// Normalizes `components`. Needs at least two finite, not all zero, entries.
    pub fn new(components: Vec<T>) -> Result<Self> {
        if components.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "direction needs at least 2 components, got {}",
                components.len()
            )));
        }
        let len = norm(&components);
        if !len.is_finite() || len <= T::zero() {
            return Err(Error::InvalidArgument(
                "direction must be finite and nonzero".into(),
            ));
        }
        Ok(Self {
            components: components.into_iter().map(|c| c / len).collect(),
        })
    }

    /// Accepts an already normalized vector, checking the norm within 1e-12.
    pub fn from_unit(components: Vec<T>) -> Result<Self> {
        let dir = Self::new(components.clone())?;
        let err = (norm(&components) - T::one()).abs();
        if err.as_f64() > UNIT_TOL.max(T::epsilon().as_f64() * 8.0) {
            return Err(Error::InvalidArgument(format!(
                "direction is not unit (|v| - 1 = {})",
                err
            )));
        }
        Ok(dir)
    }

    /// The unit circle direction `(cos φ, sin φ)`.
    pub fn from_angle(phi: T) -> Self {
        Self {
            components: vec![phi.cos(), phi.sin()],
        }
    }

    /// The reference boundary direction `e* = (0, …, 0, 1)` of `S^n`.
    pub fn reference(n: usize) -> Self {
        let mut components = vec![T::zero(); n + 1];
        components[n] = T::one();
        Self { components }
    }

    /// The `k`-th standard basis vector of `R^{n+1}`.
    pub fn axis(n: usize, k: usize) -> Self {
        let mut components = vec![T::zero(); n + 1];
        components[k] = T::one();
        Self { components }
    }

    pub fn components(&self) -> &[T] {
        &self.components
    }

    /// Dimension `n` of the sphere `S^n` the direction lives on.
    pub fn dim(&self) -> usize {
        self.components.len() - 1
    }

    pub fn dot(&self, other: &Self) -> T {
        dot(&self.components, &other.components)
    }

    pub fn antipode(&self) -> Self {
        Self {
            components: self.components.iter().map(|&c| -c).collect(),
        }
    }

    /// Euclidean distance between the two unit vectors.
    pub fn chord(&self, other: &Self) -> T {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(&a, &b)| (a - b) * (a - b))
            .sum::<T>()
            .sqrt()
    }

    /// Polar angle in `[0, 2π)`; only meaningful on `S^1`.
    pub fn angle(&self) -> T {
        let phi = self.components[1].atan2(self.components[0]);
        if phi < T::zero() {
            phi + T::TAU()
        } else {
            phi
        }
    }
}

/// Lorentzian product `Σ_{i≤n+1} a_i b_i - a_{n+2} b_{n+2}`.
#[inline]
pub fn lorentz_dot<T: Real>(a: &[T], b: &[T]) -> T {
    let last = a.len() - 1;
    dot(&a[..last], &b[..last]) - a[last] * b[last]
}

/// Point of the hyperboloid model, coordinates `(x_1, …, x_{n+2})`.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperboloidPoint<T: Real> {
    coords: Vec<T>,
}

impl<T: Real> HyperboloidPoint<T> {
    /// Validates `X·X = -1` (relative to `x_{n+2}^2`) and `x_{n+2} > 0`.
    pub fn new(coords: Vec<T>) -> Result<Self> {
        if coords.len() < 3 {
            return Err(Error::InvalidPoint(
                "hyperboloid point needs at least 3 coordinates".into(),
            ));
        }
        let time = coords[coords.len() - 1];
        if !(time > T::zero()) || coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidPoint(
                "hyperboloid point must be finite with positive last coordinate".into(),
            ));
        }
        let defect = (lorentz_dot(&coords, &coords) + T::one()).abs().as_f64();
        let scale = time.as_f64().powi(2).max(1.0);
        if defect > HYPERBOLOID_TOL * scale {
            return Err(Error::InvalidPoint(format!(
                "X·X + 1 = {defect:e} exceeds tolerance"
            )));
        }
        Ok(Self { coords })
    }

    /// Lifts spatial coordinates `x ∈ R^{n+1}` to `(x, sqrt(1 + |x|²))`.
    pub fn from_spatial(spatial: &[T]) -> Self {
        let mut coords = spatial.to_vec();
        coords.push((T::one() + norm_sq(spatial)).sqrt());
        Self { coords }
    }

    /// The origin `O = (0, …, 0, 1)` of `H^{n+1}`.
    pub fn origin(n: usize) -> Self {
        let mut coords = vec![T::zero(); n + 2];
        coords[n + 1] = T::one();
        Self { coords }
    }

    pub(crate) fn from_raw(coords: Vec<T>) -> Self {
        Self { coords }
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    /// The first `n+1` coordinates.
    pub fn spatial(&self) -> &[T] {
        &self.coords[..self.coords.len() - 1]
    }

    /// The last coordinate `x_{n+2} = cosh d(O, X)`.
    pub fn time(&self) -> T {
        self.coords[self.coords.len() - 1]
    }

    /// Dimension `n` with the point in `H^{n+1}`.
    pub fn dim(&self) -> usize {
        self.coords.len() - 2
    }

    pub fn lorentz_dot(&self, other: &Self) -> T {
        lorentz_dot(&self.coords, &other.coords)
    }

    /// Rescales back onto the hyperboloid after accumulated rounding.
    pub(crate) fn renormalized(mut self) -> Self {
        let q = -lorentz_dot(&self.coords, &self.coords);
        if q > T::zero() {
            let s = q.sqrt();
            self.coords.iter_mut().for_each(|c| *c = *c / s);
        }
        self
    }
}

/// Geodesic distance `arccosh(-X·Y)`.
///
/// Evaluated as `2 asinh(|X - Y|_L / 2)`, which equals the arccosh form but
/// keeps precision for nearby points; the Lorentzian square is clamped at 0.
pub fn geodesic_distance<T: Real>(x: &HyperboloidPoint<T>, y: &HyperboloidPoint<T>) -> T {
    let diff: Vec<T> = x.coords.iter().zip(&y.coords).map(|(&a, &b)| a - b).collect();
    let q = lorentz_dot(&diff, &diff).max(T::zero());
    let two = T::lit(2.0);
    two * (q.sqrt() / two).asinh()
}

/// The point `(sinh r · θ, cosh r)` at distance `r` from `O` along `θ`.
pub fn polar_point<T: Real>(r: T, theta: &Direction<T>) -> HyperboloidPoint<T> {
    let (sh, ch) = (r.sinh(), r.cosh());
    let mut coords: Vec<T> = theta.components.iter().map(|&c| sh * c).collect();
    coords.push(ch);
    HyperboloidPoint { coords }
}

/// Point of the Poincaré ball model.
#[derive(Debug, Clone, PartialEq)]
pub struct BallPoint<T: Real> {
    coords: Vec<T>,
}

impl<T: Real> BallPoint<T> {
    pub fn new(coords: Vec<T>) -> Result<Self> {
        if coords.len() < 2 || coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidPoint("ball point must be finite, dim ≥ 2".into()));
        }
        if norm_sq(&coords) >= T::one() {
            return Err(Error::InvalidPoint("ball point must have norm < 1".into()));
        }
        Ok(Self { coords })
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }
}

/// Point of the upper half-space model `{(y, y_{n+1}) : y_{n+1} > 0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpacePoint<T: Real> {
    horizontal: Vec<T>,
    height: T,
}

impl<T: Real> HalfSpacePoint<T> {
    pub fn new(horizontal: Vec<T>, height: T) -> Result<Self> {
        if !(height > T::zero()) || !height.is_finite() {
            return Err(Error::InvalidPoint("half-space height must be > 0".into()));
        }
        if horizontal.is_empty() || horizontal.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidPoint(
                "half-space horizontal part must be finite, dim ≥ 1".into(),
            ));
        }
        Ok(Self { horizontal, height })
    }

    pub fn horizontal(&self) -> &[T] {
        &self.horizontal
    }

    pub fn height(&self) -> T {
        self.height
    }
}

/// Model tag for [`convert_model`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Hyperboloid,
    Ball,
    HalfSpace,
}

/// A point expressed in one of the three models.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelPoint<T: Real> {
    Hyperboloid(HyperboloidPoint<T>),
    Ball(BallPoint<T>),
    HalfSpace(HalfSpacePoint<T>),
}

impl<T: Real> ModelPoint<T> {
    pub fn model(&self) -> Model {
        match self {
            ModelPoint::Hyperboloid(_) => Model::Hyperboloid,
            ModelPoint::Ball(_) => Model::Ball,
            ModelPoint::HalfSpace(_) => Model::HalfSpace,
        }
    }

    /// The hyperboloid representative of the point.
    pub fn to_hyperboloid(&self) -> HyperboloidPoint<T> {
        match self {
            ModelPoint::Hyperboloid(x) => x.clone(),
            ModelPoint::Ball(y) => ball_to_hyperboloid(y),
            ModelPoint::HalfSpace(u) => half_space_to_hyperboloid(u),
        }
    }
}

/// Stereographic projection from `(0, -1)`: `x / (1 + x_{n+2})`.
pub fn hyperboloid_to_ball<T: Real>(x: &HyperboloidPoint<T>) -> BallPoint<T> {
    let denom = T::one() + x.time();
    BallPoint {
        coords: x.spatial().iter().map(|&c| c / denom).collect(),
    }
}

/// Inverse stereographic projection `(2Y, 1 + |Y|²) / (1 - |Y|²)`.
pub fn ball_to_hyperboloid<T: Real>(y: &BallPoint<T>) -> HyperboloidPoint<T> {
    let r2 = norm_sq(&y.coords);
    let denom = T::one() - r2;
    let two = T::lit(2.0);
    let mut coords: Vec<T> = y.coords.iter().map(|&c| two * c / denom).collect();
    coords.push((T::one() + r2) / denom);
    HyperboloidPoint { coords }
}

/// Half-space chart: height `1/(x_{n+2} - x_{n+1})`, horizontal `x' · height`.
pub fn hyperboloid_to_half_space<T: Real>(x: &HyperboloidPoint<T>) -> HalfSpacePoint<T> {
    let n = x.dim();
    let s = x.coords[n + 1] - x.coords[n];
    // x_{n+2} - x_{n+1} = (1 + |x'|²) / (x_{n+2} + x_{n+1}) avoids cancellation
    // for points far out towards e*.
    let s = if x.coords[n] > T::zero() {
        (T::one() + norm_sq(&x.coords[..n])) / (x.coords[n + 1] + x.coords[n])
    } else {
        s
    };
    let height = T::one() / s;
    HalfSpacePoint {
        horizontal: x.coords[..n].iter().map(|&c| c * height).collect(),
        height,
    }
}

pub fn half_space_to_hyperboloid<T: Real>(u: &HalfSpacePoint<T>) -> HyperboloidPoint<T> {
    let t = u.height;
    let u2 = norm_sq(&u.horizontal);
    let two = T::lit(2.0);
    let mut coords: Vec<T> = u.horizontal.iter().map(|&c| c / t).collect();
    coords.push((u2 + t * t - T::one()) / (two * t));
    coords.push((u2 + t * t + T::one()) / (two * t));
    HyperboloidPoint { coords }
}

/// Converts `p` into the `target` model. Rejects points violating the
/// invariants of their own model.
pub fn convert_model<T: Real>(p: &ModelPoint<T>, target: Model) -> Result<ModelPoint<T>> {
    let x = match p {
        ModelPoint::Hyperboloid(x) => HyperboloidPoint::new(x.coords.clone())?,
        ModelPoint::Ball(y) => ball_to_hyperboloid(&BallPoint::new(y.coords.clone())?),
        ModelPoint::HalfSpace(u) => {
            half_space_to_hyperboloid(&HalfSpacePoint::new(u.horizontal.clone(), u.height)?)
        }
    };
    Ok(match target {
        Model::Hyperboloid => ModelPoint::Hyperboloid(x),
        Model::Ball => ModelPoint::Ball(hyperboloid_to_ball(&x)),
        Model::HalfSpace => ModelPoint::HalfSpace(hyperboloid_to_half_space(&x)),
    })
}

/// Image of a boundary direction on `∂U^{n+1} = R^n ∪ {∞}`: `None` for `e*`.
pub fn ideal_to_half_space<T: Real>(e: &Direction<T>) -> Option<Vec<T>> {
    let n = e.dim();
    let denom = T::one() - e.components[n];
    if denom.as_f64() <= 1e-15 {
        return None;
    }
    Some(e.components[..n].iter().map(|&c| c / denom).collect())
}

/// Boundary direction whose half-space image is the finite point `p ∈ R^n`.
pub fn half_space_to_ideal<T: Real>(p: &[T]) -> Direction<T> {
    let p2 = norm_sq(p);
    let denom = p2 + T::one();
    let two = T::lit(2.0);
    let mut components: Vec<T> = p.iter().map(|&c| two * c / denom).collect();
    components.push((p2 - T::one()) / denom);
    Direction { components }
}

/// Linear map of Minkowski space preserving the Lorentzian form and the
/// upper sheet. Stored row-major, `(n+2) × (n+2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Isometry<T: Real> {
    size: usize,
    matrix: Vec<T>,
}

impl<T: Real> Isometry<T> {
    pub fn identity(n: usize) -> Self {
        let size = n + 2;
        let mut matrix = vec![T::zero(); size * size];
        for i in 0..size {
            matrix[i * size + i] = T::one();
        }
        Self { size, matrix }
    }

    /// Validates `MᵀηM = η` within 1e-10 and a positive time-time entry.
    pub fn from_matrix(n: usize, matrix: Vec<T>) -> Result<Self> {
        let size = n + 2;
        if matrix.len() != size * size {
            return Err(Error::DimensionMismatch {
                expected: size * size,
                found: matrix.len(),
            });
        }
        let iso = Self { size, matrix };
        if iso.lorentz_defect().as_f64() > 1e-10 || !(iso.entry(size - 1, size - 1) > T::zero())
        {
            return Err(Error::InvalidArgument(
                "matrix is not an orthochronous Lorentz transformation".into(),
            ));
        }
        Ok(iso)
    }

    /// Extends an orthogonal `(n+1) × (n+1)` matrix (row-major) by fixing `x_{n+2}`.
    pub fn from_orthogonal(n: usize, rotation: &[T]) -> Result<Self> {
        let k = n + 1;
        if rotation.len() != k * k {
            return Err(Error::DimensionMismatch {
                expected: k * k,
                found: rotation.len(),
            });
        }
        let mut iso = Self::identity(n);
        for i in 0..k {
            for j in 0..k {
                iso.matrix[i * iso.size + j] = rotation[i * k + j];
            }
        }
        Self::from_matrix(n, iso.matrix)
    }

    /// Householder reflection of `R^{n+1}` swapping the unit vectors `from`
    /// and `to`; fixes `O`.
    pub fn reflection(from: &Direction<T>, to: &Direction<T>) -> Self {
        let n = from.dim();
        let mut iso = Self::identity(n);
        let v: Vec<T> = from
            .components
            .iter()
            .zip(&to.components)
            .map(|(&a, &b)| a - b)
            .collect();
        let v2 = norm_sq(&v);
        if v2.as_f64() < 1e-28 {
            return iso;
        }
        let two = T::lit(2.0);
        for i in 0..=n {
            for j in 0..=n {
                iso.matrix[i * iso.size + j] = iso.matrix[i * iso.size + j] - two * v[i] * v[j] / v2;
            }
        }
        iso
    }

    /// Translation by `distance` along the geodesic through `O` in direction
    /// `theta`; maps `O` to `polar_point(distance, theta)`.
    pub fn boost(theta: &Direction<T>, distance: T) -> Self {
        let n = theta.dim();
        let size = n + 2;
        let mut iso = Self::identity(n);
        let (sh, ch) = (distance.sinh(), distance.cosh());
        let th = &theta.components;
        for i in 0..=n {
            for j in 0..=n {
                iso.matrix[i * size + j] = iso.matrix[i * size + j] + (ch - T::one()) * th[i] * th[j];
            }
            iso.matrix[i * size + n + 1] = sh * th[i];
            iso.matrix[(n + 1) * size + i] = sh * th[i];
        }
        iso.matrix[(n + 1) * size + n + 1] = ch;
        iso
    }

    pub fn dim(&self) -> usize {
        self.size - 2
    }

    pub fn entry(&self, row: usize, col: usize) -> T {
        self.matrix[row * self.size + col]
    }

    pub fn matrix(&self) -> &[T] {
        &self.matrix
    }

    pub fn apply_vector(&self, v: &[T]) -> Vec<T> {
        (0..self.size)
            .map(|i| dot(&self.matrix[i * self.size..(i + 1) * self.size], v))
            .collect()
    }

    pub fn apply(&self, x: &HyperboloidPoint<T>) -> HyperboloidPoint<T> {
        HyperboloidPoint::from_raw(self.apply_vector(&x.coords)).renormalized()
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        let s = self.size;
        let mut matrix = vec![T::zero(); s * s];
        for i in 0..s {
            for j in 0..s {
                matrix[i * s + j] = (0..s).map(|k| self.entry(i, k) * other.entry(k, j)).sum();
            }
        }
        Self { size: s, matrix }
    }

    /// `η Mᵀ η`, exact inverse of a Lorentz transformation.
    pub fn inverse(&self) -> Self {
        let s = self.size;
        let sign = |i: usize| if i == s - 1 { -T::one() } else { T::one() };
        let mut matrix = vec![T::zero(); s * s];
        for i in 0..s {
            for j in 0..s {
                matrix[i * s + j] = sign(i) * self.entry(j, i) * sign(j);
            }
        }
        Self { size: s, matrix }
    }

    /// Largest entry of `|MᵀηM - η|`.
    pub fn lorentz_defect(&self) -> T {
        let s = self.size;
        let eta = |i: usize| if i == s - 1 { -T::one() } else { T::one() };
        let mut worst = T::zero();
        for i in 0..s {
            for j in 0..s {
                let v: T = (0..s).map(|k| self.entry(k, i) * eta(k) * self.entry(k, j)).sum();
                let target = if i == j { eta(i) } else { T::zero() };
                worst = worst.max((v - target).abs());
            }
        }
        worst
    }
}

/// An isometry `Λ` with `Λ(X) = O`: the boost back along the ray from `O` to `X`.
pub fn boost_to_origin<T: Real>(x: &HyperboloidPoint<T>) -> Isometry<T> {
    let n = x.dim();
    let sp = x.spatial();
    let len = norm(sp);
    if len.as_f64() < 1e-300 {
        return Isometry::identity(n);
    }
    let theta = Direction {
        components: sp.iter().map(|&c| c / len).collect(),
    };
    let r = len.asinh();
    Isometry::boost(&theta, -r)
}
