//! Smooth scalar fields on the plane with exact second-order jets.

mod bump;
mod radial;
mod testfn;
mod transform;

pub use bump::{Bump, BumpMixture};
pub use radial::{RadialField, RadialProfile};
pub use testfn::TestFunction;
pub use transform::{rotate_field, Affine, Rotated, SumField};

use crate::error::{invalid, Error, Result};
use crate::geometry::{BBox, Point, SymMat2};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

/// Value, gradient and Hessian of a field at one point.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Jet2 {
    pub value: f64,
    pub grad: [f64; 2],
    pub hess: SymMat2,
}

impl Jet2 {
    pub fn new(value: f64, grad: [f64; 2], hess: SymMat2) -> Self {
        Self { value, grad, hess }
    }

    pub fn scaled(&self, s: f64) -> Jet2 {
        Jet2::new(self.value * s, [self.grad[0] * s, self.grad[1] * s], self.hess.scaled(s))
    }

    pub fn add(&self, other: &Jet2) -> Jet2 {
        Jet2::new(
            self.value + other.value,
            [self.grad[0] + other.grad[0], self.grad[1] + other.grad[1]],
            self.hess + other.hess,
        )
    }

    pub fn grad_norm(&self) -> f64 {
        self.grad[0].hypot(self.grad[1])
    }

    /// Second derivative along axis `i` (0 or 1).
    pub fn d2(&self, i: usize) -> f64 {
        self.hess.diag(i)
    }
}

/// A C² field with closed-form jets and a box outside which it is negligible.
pub trait ScalarField: Send + Sync + fmt::Debug {
    fn jet(&self, p: Point) -> Jet2;

    fn value(&self, p: Point) -> f64 {
        self.jet(p).value
    }

    /// Box outside which the field stays below `1e-12` times its largest level of interest.
    /// Fields without compact essential support (affine perturbations) report [`BBox::EMPTY`].
    fn bbox(&self) -> BBox;

    fn descriptor(&self) -> Descriptor;
}

pub type Field = Arc<dyn ScalarField>;

/// Flat key-value description of a field: a family name and its numeric parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Descriptor {
    pub family: String,
    pub params: Vec<(String, f64)>,
}

impl Descriptor {
    pub fn new(family: impl Into<String>) -> Self {
        Self { family: family.into(), params: Vec::new() }
    }

    pub fn with(mut self, key: impl Into<String>, value: f64) -> Self {
        self.params.push((key.into(), value));
        self
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.params.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    fn require(&self, key: &str) -> Result<f64> {
        self.get(key)
            .ok_or_else(|| invalid(format!("field family `{}` needs parameter `{key}`", self.family)))
    }

    /// Parses `family key=value key=value ...`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut parts = text.split_whitespace();
        let family = parts.next().ok_or_else(|| Error::Parse("empty field descriptor".into()))?;
        let mut d = Descriptor::new(family);
        for part in parts {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got `{part}`")))?;
            let v: f64 = v
                .parse()
                .map_err(|_| Error::Parse(format!("bad number `{v}` for `{k}`")))?;
            d.params.push((k.to_string(), v));
        }
        Ok(d)
    }
}

impl fmt::Display for Descriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.family)?;
        for (k, v) in &self.params {
            write!(f, " {k}={v}")?;
        }
        Ok(())
    }
}

/// Names accepted by [`named_field`].
pub const FIELD_NAMES: &[&str] = &["radial_exp", "radial_ring", "single_bump", "two_bump", "bump_ring"];

/// Built-in test fields.
///
/// * `radial_exp`: `exp(-|x|^2)`, one maximum.
/// * `radial_ring`: `(1 + 2|x|^2) exp(-|x|^2)`, a maximum ring around a local minimum.
/// * `single_bump`: the one-bump mixture equal to `radial_exp`.
/// * `two_bump`: unit Gaussian bumps at `(±1, 0)`, two maxima and a saddle at value `2/e`.
/// * `bump_ring`: eight bumps on a circle of radius 2, so mid levels enclose a hole.
pub fn named_field(name: &str) -> Result<Field> {
    let f: Field = match name {
        "radial_exp" => Arc::new(RadialField::new(RadialProfile::exp(1.0, 1.0))?),
        "radial_ring" => Arc::new(RadialField::new(RadialProfile::poly_exp(1.0, 2.0, 1.0))?),
        "single_bump" => Arc::new(BumpMixture::new(vec![Bump::new(Point::ORIGIN, 1.0, 1.0)])?),
        "two_bump" => Arc::new(BumpMixture::two_bump()),
        "bump_ring" => Arc::new(BumpMixture::ring(8, 2.0, 1.0, 0.6)?),
        other => {
            return Err(invalid(format!(
                "unknown field `{other}` (known: {})",
                FIELD_NAMES.join(", ")
            )))
        }
    };
    Ok(f)
}

/// Rebuilds a field from its descriptor.
pub fn field_from_descriptor(d: &Descriptor) -> Result<Field> {
    match d.family.as_str() {
        "radial" => {
            let profile = RadialProfile::poly_exp(
                d.require("a0")?,
                d.get("a1").unwrap_or(0.0),
                d.get("rate").unwrap_or(1.0),
            );
            Ok(Arc::new(RadialField::new(profile)?))
        }
        "bumps" => {
            let n = d.require("count")? as usize;
            let mut bumps = Vec::with_capacity(n);
            for k in 0..n {
                bumps.push(Bump::new(
                    Point::new(d.require(&format!("cx{k}"))?, d.require(&format!("cy{k}"))?),
                    d.require(&format!("w{k}"))?,
                    d.require(&format!("s{k}"))?,
                ));
            }
            Ok(Arc::new(BumpMixture::new(bumps)?))
        }
        "affine" => Ok(Arc::new(Affine::new(d.require("a")?, d.require("b1")?, d.require("b2")?))),
        name => named_field(name),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptor_round_trip() {
        for name in FIELD_NAMES {
            let f = named_field(name).unwrap();
            let d = f.descriptor();
            let parsed = Descriptor::parse(&d.to_string()).unwrap();
            assert_eq!(parsed, d);
            let g = field_from_descriptor(&parsed).unwrap();
            for p in [Point::new(0.3, -0.7), Point::new(1.1, 0.4)] {
                assert_eq!(f.jet(p), g.jet(p), "{name}");
            }
        }
    }

    #[test]
    fn unknown_field_is_rejected() {
        assert!(named_field("nope").is_err());
        assert!(Descriptor::parse("radial a0").is_err());
    }
}
