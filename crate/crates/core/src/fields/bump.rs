use super::{Descriptor, Jet2, ScalarField};
use crate::error::{invalid, Result};
use crate::geometry::{BBox, Point, SymMat2};

/// `weight * exp(-|x - center|^2 / width^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub center: Point,
    pub weight: f64,
    pub width: f64,
}

impl Bump {
    pub fn new(center: Point, weight: f64, width: f64) -> Self {
        Self { center, weight, width }
    }

    fn jet(&self, p: Point) -> Jet2 {
        let d = p - self.center;
        let s2 = self.width * self.width;
        let e = self.weight * (-d.norm_sq() / s2).exp();
        let a = 2.0 / s2;
        let b = 4.0 / (s2 * s2);
        Jet2::new(
            e,
            [-a * d.x * e, -a * d.y * e],
            SymMat2::new((b * d.x * d.x - a) * e, b * d.x * d.y * e, (b * d.y * d.y - a) * e),
        )
    }
}

/// Sum of Gaussian bumps with positive weights.
#[derive(Debug, Clone)]
pub struct BumpMixture {
    bumps: Vec<Bump>,
    bbox: BBox,
}

impl BumpMixture {
    pub fn new(bumps: Vec<Bump>) -> Result<Self> {
        if bumps.is_empty() {
            return Err(invalid("bump mixture needs at least one bump"));
        }
        if bumps.iter().any(|b| !(b.weight > 0.0 && b.width > 0.0)) {
            return Err(invalid("bump weights and widths must be positive"));
        }
        let total: f64 = bumps.iter().map(|b| b.weight).sum();
        let mut bbox = BBox::EMPTY;
        for b in &bumps {
            // beyond this radius every bump is below 1e-12 * (its weight / total weight)
            let r = b.width * (total / b.weight * 1e12 * bumps.len() as f64).ln().max(0.0).sqrt();
            bbox = bbox.union(&BBox::around(b.center, r));
        }
        Ok(Self { bumps, bbox })
    }

    /// Unit bumps at `(±1, 0)` with unit width.
    pub fn two_bump() -> Self {
        Self::new(vec![
            Bump::new(Point::new(-1.0, 0.0), 1.0, 1.0),
            Bump::new(Point::new(1.0, 0.0), 1.0, 1.0),
        ])
        .expect("valid two-bump mixture")
    }

    /// `count` equal bumps evenly spaced on a circle of radius `radius`.
    pub fn ring(count: usize, radius: f64, weight: f64, width: f64) -> Result<Self> {
        let bumps = (0..count)
            .map(|k| {
                let a = std::f64::consts::TAU * k as f64 / count as f64;
                Bump::new(Point::new(radius * a.cos(), radius * a.sin()), weight, width)
            })
            .collect();
        Self::new(bumps)
    }

    pub fn bumps(&self) -> &[Bump] {
        &self.bumps
    }
}

impl ScalarField for BumpMixture {
    fn jet(&self, p: Point) -> Jet2 {
        self.bumps.iter().fold(Jet2::default(), |acc, b| acc.add(&b.jet(p)))
    }

    fn value(&self, p: Point) -> f64 {
        self.bumps
            .iter()
            .map(|b| b.weight * (-(p - b.center).norm_sq() / (b.width * b.width)).exp())
            .sum()
    }

    fn bbox(&self) -> BBox {
        self.bbox
    }

    fn descriptor(&self) -> Descriptor {
        let mut d = Descriptor::new("bumps").with("count", self.bumps.len() as f64);
        for (k, b) in self.bumps.iter().enumerate() {
            d = d
                .with(format!("cx{k}"), b.center.x)
                .with(format!("cy{k}"), b.center.y)
                .with(format!("w{k}"), b.weight)
                .with(format!("s{k}"), b.width);
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{RadialField, RadialProfile};

    #[test]
    fn single_bump_matches_radial_exp() {
        let m = BumpMixture::new(vec![Bump::new(Point::ORIGIN, 1.0, 1.0)]).unwrap();
        let r = RadialField::new(RadialProfile::exp(1.0, 1.0)).unwrap();
        for k in 0..50 {
            let p = Point::new(-2.0 + 0.083 * k as f64, 1.5 - 0.061 * k as f64);
            let (a, b) = (m.jet(p), r.jet(p));
            assert_eq!(a.value, b.value);
            assert_eq!(a.grad, b.grad);
            for (x, y) in [(a.hess.xx, b.hess.xx), (a.hess.xy, b.hess.xy), (a.hess.yy, b.hess.yy)] {
                assert!((x - y).abs() <= 1e-15, "{x} {y}");
            }
        }
    }

    #[test]
    fn two_bump_saddle_value() {
        let f = BumpMixture::two_bump();
        let j = f.jet(Point::ORIGIN);
        assert!((j.value - 2.0 * (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(j.grad, [0.0, 0.0]);
        assert!(j.hess.det() < 0.0);
    }

    #[test]
    fn value_matches_jet_value() {
        let f = BumpMixture::ring(8, 2.0, 1.0, 0.6).unwrap();
        let p = Point::new(0.7, -1.9);
        assert!((f.value(p) - f.jet(p).value).abs() < 1e-16);
        let b = f.bbox();
        assert!(f.value(Point::new(b.max.x, 0.0)) < 1e-12);
    }
}
