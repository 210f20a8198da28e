//! Horospherically convex polytopes in hyperbolic space `H^{n+1}` and a
//! solver for the discrete horospherical p-Minkowski problem with even data.
//!
//! A polytope is a finite intersection of closed horoballs `B̄_{e_i}(x_i)`.
//! The crate computes its radial and support functions, volume, facet areas
//! and Hausdorff distances, separates exterior points by horoballs, and finds
//! even polytopes whose p-surface area measure is a multiple of a given even
//! discrete measure.
//!
//! The geometry kernel ([`geometry`], [`horoball`]) is generic over the scalar
//! through [`scalar::Real`]; the polytope layer and everything above it work
//! in `f64`. The aliases at the crate root name the `f64` instances.
//!
//! ```
//! use horomink::{build_polytope, facet_area, Direction, PolytopeSpec};
//!
//! let lens = PolytopeSpec::lens(&Direction::from_angle(0.0), 2f64.ln(), 2f64.ln()).unwrap();
//! let p = build_polytope(&lens).unwrap();
//! assert!((facet_area(&p, 0).unwrap() - 2.0 * 3f64.sqrt()).abs() < 1e-12);
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod geometry;
pub mod horoball;
pub mod measure;
pub mod oracle;
pub mod polytope;
pub mod quadrature;
pub mod scalar;
pub mod search;
pub mod solver;

pub use error::{Error, Result};
pub use geometry::{Model, ModelPoint};
pub use measure::DiscreteMeasure;
pub use polytope::{
    build_polytope, build_polytope_allow_degenerate, canonicalize, extremal_radii, facet_area, facet_area_fd,
    hausdorff_distance, radial, separate, support, surface_measure_p, volume, volume_exact, HConvexPolytope,
    PolytopeSpec,
};
pub use quadrature::{build_quadrature, QuadratureKind, SphereQuadrature};
pub use solver::{residual, solve_even, SolverConfig, SolverResult};

pub type Direction = geometry::Direction<f64>;
pub type HyperboloidPoint = geometry::HyperboloidPoint<f64>;
pub type BallPoint = geometry::BallPoint<f64>;
pub type HalfSpacePoint = geometry::HalfSpacePoint<f64>;
pub type Isometry = geometry::Isometry<f64>;
pub type Horoball = horoball::Horoball<f64>;
