//! Euler characteristic primitives of planar excursion sets.
//!
//! The Euler integral `I_f(h) = ∫ h(u) χ({f >= u}) du` of a smooth field is computed two ways:
//! directly, by evaluating the Euler characteristic of excursion sets over a level grid, and as a
//! spatial integral of a local density built from the gradient and Hessian of `f`. The crate also
//! provides a shot-noise random field model with its characteristic functions, a closed form for
//! the stationary expected density, and moment bounds for the Euler integral of shot noise.

// `!(x > 0.0)` style checks are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod euler_integral;
pub mod fields;
pub mod geometry;
pub mod moments;
pub mod quadrature;
pub mod seed;
pub mod shotnoise;
pub mod topology;
pub mod validation;

pub use error::{Error, Result};
pub use fields::{Field, Jet2, ScalarField, TestFunction};
pub use geometry::{BBox, Point};
