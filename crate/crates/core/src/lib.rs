//! Rank-2 holomorphic vector bundles on non-Kähler elliptic surfaces.
//!
//! The crate models a non-Kähler elliptic surface `X -> B` with fibre
//! `T = C*/<tau>` through its Néron-Severi lattice, and provides
//!
//! * exact Chern-class arithmetic (`Delta`, `n_E`, `m(2, c1)`),
//! * numerics on the Tate curve and its degree-2 quotient to `P^1`,
//! * divisor arithmetic on the Jacobian surface `J(X) = B x T*`,
//! * spectral covers of explicitly presented rank-2 bundles, and
//! * the existence decision for given `(c1, c2)` together with replayable
//!   construction recipes.
//!
//! Numeric types are generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! aliases below fix double precision, which is what the CLI uses.

pub mod bundles;
pub mod error;
pub mod existence;
pub mod io;
pub mod jacobian_surface;
pub mod lattice;
pub mod poly;
pub mod rational;
pub mod scalar;
pub mod surface_model;
pub mod tate_curve;

pub use error::{Error, Result};
pub use lattice::HomLattice;
pub use rational::Rational;
pub use scalar::Scalar;
pub use surface_model::{ChernData, NSClass};

pub type CurveParam64 = tate_curve::CurveParam<f64>;
pub type TatePoint64 = tate_curve::TatePoint<f64>;
pub type Tolerance64 = tate_curve::Tolerance<f64>;
pub type SurfaceData64 = surface_model::SurfaceData<f64>;
pub type BasePoint64 = surface_model::BasePoint<f64>;
pub type SectionOfJ64 = jacobian_surface::SectionOfJ<f64>;
pub type Bisection64 = jacobian_surface::Bisection<f64>;
pub type JacobianSurface64<'a> = jacobian_surface::JacobianSurface<'a, f64>;
pub type LineBundle64 = bundles::LineBundleOnX<f64>;
pub type RankTwoBundle64 = bundles::RankTwoBundle<f64>;
pub type SpectralCover64 = bundles::SpectralCover<f64>;
pub type Verdict64 = existence::Verdict<f64>;
pub type Recipe64 = existence::Recipe<f64>;

pub type CurveParam32 = tate_curve::CurveParam<f32>;
pub type TatePoint32 = tate_curve::TatePoint<f32>;
