//! Construction and numerical verification of k-slant curves.
//!
//! Curves are [`Curve3`] values with jet evaluators. The [`slant`] module
//! iterates the operators I (spherical) and J (Euclidean); [`verify`]
//! measures what the results satisfy. A guide lives in `book/`.

pub mod bessel;
pub mod cli;
pub mod curve;
pub mod error;
pub mod frames;
pub mod gallery;
pub mod io;
pub mod jet;
pub mod quadrature;
pub mod slant;
pub mod verify;

pub use curve::{arc_length_reparametrize, eval_derivatives, resample, Curve3, CurveMeta, SampledCurve};
pub use error::{Error, Result};
pub use quadrature::{cumulative_integral, Interval, QuadratureConfig, Rule};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/curves.md")]
    mod curves {}
    #[doc = include_str!("../../../book/src/frames.md")]
    mod frames {}
    #[doc = include_str!("../../../book/src/operators.md")]
    mod operators {}
    #[doc = include_str!("../../../book/src/gallery.md")]
    mod gallery {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
}
