//! Numerical analysis of weighted composition operators `f -> psi * (f o phi)`
//! on the Bloch space of the unit disk, the unit ball and the unit polydisk.
//!
//! The pointwise math ([`geometry`], [`holo`], [`bloch`], the pointwise parts of
//! [`wco`]) is generic over the real scalar through [`Scalar`]; the seeded
//! estimation engine in [`suprema`] and everything built on it runs in `f64`.
//! The aliases below name the `f64` (default) and `f32` instantiations.

pub mod bloch;
pub mod error;
pub mod geometry;
pub mod holo;
pub mod linalg;
pub mod scalar;
pub mod suprema;
pub mod wco;

pub use error::{Error, Result};
pub use geometry::{DomainKind, DomainSpec, SampleStrategy};
pub use holo::{Expr, ScalarMap, SelfMap};
pub use scalar::{plog, Scalar, C};
pub use suprema::{LimsupEstimate, LimsupVerdict, SupConfig, SupEstimate};
pub use wco::{Classification, HinfReport, NormBounds, SymbolPair, Verdict};

pub type Complex = num_complex::Complex<f64>;
pub type Point = geometry::Point<f64>;
pub type MetricForm = geometry::MetricForm<f64>;
pub type CMatrix = linalg::CMatrix<f64>;
pub type Jet = holo::Jet<f64>;
pub type OmegaValue = bloch::OmegaValue<f64>;
pub type PointwiseFields = wco::PointwiseFields<f64>;

pub type Complex32 = num_complex::Complex<f32>;
pub type Point32 = geometry::Point<f32>;
pub type MetricForm32 = geometry::MetricForm<f32>;
pub type CMatrix32 = linalg::CMatrix<f32>;
pub type Jet32 = holo::Jet<f32>;
pub type OmegaValue32 = bloch::OmegaValue<f32>;
pub type PointwiseFields32 = wco::PointwiseFields<f32>;
