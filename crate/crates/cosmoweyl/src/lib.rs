//! Geometry, curvature and energy tools for the expanding region of de
//! Sitter and Schwarzschild-de Sitter spacetimes in double-null gauge.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the
//! `*64` aliases below fix the scalar to `f64`.

pub mod analysis;
pub mod audit;
pub mod belrobinson;
pub mod charts;
pub mod decay;
pub mod error;
pub mod fd;
pub mod nullframe;
pub mod scalar;
pub mod tensor;
pub mod weyl;

pub use error::{Error, Result};
pub use scalar::{lit, Real};

/// Double-precision instantiations of the generic types.
pub type SdSParams64 = charts::SdSParams<f64>;
pub type SdsGeometry64 = charts::SdsGeometry<f64>;
pub type EllipsoidSection64 = charts::EllipsoidSection<f64>;
pub type StructureCoefficients64 = nullframe::StructureCoefficients<f64>;
pub type BoostLaw64 = nullframe::BoostLaw<f64>;
pub type FoliationChange64 = nullframe::FoliationChange<f64>;
pub type WeylNull64 = weyl::WeylNull<f64>;
pub type Weyl4_64 = weyl::Weyl4<f64>;
pub type EMPair64 = weyl::EMPair<f64>;
pub type SphereGrid64 = analysis::SphereGrid<f64>;
pub type GronwallBound64 = decay::GronwallBound<f64>;
