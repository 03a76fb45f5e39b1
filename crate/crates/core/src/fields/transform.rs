use super::{Descriptor, Field, Jet2, ScalarField};
use crate::geometry::{BBox, Point, SymMat2};
use std::sync::Arc;

/// `f(r(x))` where `r` is the clockwise quarter turn `(x1, x2) -> (x2, -x1)` applied `quarter_turns` times.
#[derive(Debug, Clone)]
pub struct Rotated {
    inner: Field,
    quarter_turns: u8,
}

/// The field `x -> f(r_{k pi/2} x)`.
pub fn rotate_field(f: Field, quarter_turns: u8) -> Field {
    Arc::new(Rotated { inner: f, quarter_turns: quarter_turns % 4 })
}

fn turn(p: Point) -> Point {
    Point::new(p.y, -p.x)
}

fn turn_back(p: Point) -> Point {
    Point::new(-p.y, p.x)
}

impl ScalarField for Rotated {
    fn jet(&self, p: Point) -> Jet2 {
        let mut q = p;
        for _ in 0..self.quarter_turns {
            q = turn(q);
        }
        let mut j = self.inner.jet(q);
        // each turn pulls the gradient back by R^T and the Hessian by R^T H R; for R = [[0,1],[-1,0]]
        // this maps (g1, g2) -> (-g2, g1) and (hxx, hxy, hyy) -> (hyy, -hxy, hxx)
        for _ in 0..self.quarter_turns {
            j = Jet2::new(
                j.value,
                [-j.grad[1], j.grad[0]],
                SymMat2::new(j.hess.yy, -j.hess.xy, j.hess.xx),
            );
        }
        j
    }

    fn value(&self, p: Point) -> f64 {
        let mut q = p;
        for _ in 0..self.quarter_turns {
            q = turn(q);
        }
        self.inner.value(q)
    }

    fn bbox(&self) -> BBox {
        let b = self.inner.bbox();
        if b.is_empty() {
            return b;
        }
        let mut corners = [b.min, b.max, Point::new(b.min.x, b.max.y), Point::new(b.max.x, b.min.y)];
        for _ in 0..self.quarter_turns {
            for c in corners.iter_mut() {
                *c = turn_back(*c);
            }
        }
        corners.iter().fold(BBox::EMPTY, |acc, c| acc.union(&BBox::new(*c, *c)))
    }

    fn descriptor(&self) -> Descriptor {
        let mut d = self.inner.descriptor();
        d.params.push(("quarter_turns".into(), self.quarter_turns as f64));
        d
    }
}

/// `A + B1 x1 + B2 x2`.
#[derive(Debug, Clone, Copy)]
pub struct Affine {
    pub a: f64,
    pub b: [f64; 2],
}

impl Affine {
    pub fn new(a: f64, b1: f64, b2: f64) -> Self {
        Self { a, b: [b1, b2] }
    }
}

impl ScalarField for Affine {
    fn jet(&self, p: Point) -> Jet2 {
        Jet2::new(self.value(p), self.b, SymMat2::default())
    }

    fn value(&self, p: Point) -> f64 {
        self.a + self.b[0] * p.x + self.b[1] * p.y
    }

    fn bbox(&self) -> BBox {
        BBox::EMPTY
    }

    fn descriptor(&self) -> Descriptor {
        Descriptor::new("affine").with("a", self.a).with("b1", self.b[0]).with("b2", self.b[1])
    }
}

/// Linear combination `sum_k c_k f_k`.
#[derive(Debug, Clone)]
pub struct SumField {
    terms: Vec<(f64, Field)>,
}

impl SumField {
    pub fn new(terms: Vec<(f64, Field)>) -> Self {
        Self { terms }
    }

    /// `f + eta * g`.
    pub fn perturbed(f: Field, eta: f64, g: Field) -> Field {
        Arc::new(Self::new(vec![(1.0, f), (eta, g)]))
    }
}

impl ScalarField for SumField {
    fn jet(&self, p: Point) -> Jet2 {
        self.terms
            .iter()
            .fold(Jet2::default(), |acc, (c, f)| acc.add(&f.jet(p).scaled(*c)))
    }

    fn value(&self, p: Point) -> f64 {
        self.terms.iter().map(|(c, f)| c * f.value(p)).sum()
    }

    fn bbox(&self) -> BBox {
        self.terms.iter().fold(BBox::EMPTY, |acc, (_, f)| acc.union(&f.bbox()))
    }

    fn descriptor(&self) -> Descriptor {
        let mut d = Descriptor::new("sum").with("terms", self.terms.len() as f64);
        for (k, (c, f)) in self.terms.iter().enumerate() {
            d.params.push((format!("c{k}"), *c));
            for (key, v) in f.descriptor().params {
                d.params.push((format!("t{k}.{key}"), v));
            }
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::named_field;

    #[test]
    fn rotation_matches_composed_evaluation() {
        let f = named_field("two_bump").unwrap();
        let g = rotate_field(f.clone(), 1);
        let p = Point::new(0.37, -1.21);
        let rp = Point::new(p.y, -p.x);
        assert_eq!(g.value(p), f.value(rp));
        // finite-difference check of the pulled-back jet
        let h = 1e-5;
        let j = g.jet(p);
        let gx = (g.value(Point::new(p.x + h, p.y)) - g.value(Point::new(p.x - h, p.y))) / (2.0 * h);
        let gy = (g.value(Point::new(p.x, p.y + h)) - g.value(Point::new(p.x, p.y - h))) / (2.0 * h);
        assert!((j.grad[0] - gx).abs() < 1e-9 && (j.grad[1] - gy).abs() < 1e-9);
        let dxy = (g.jet(Point::new(p.x, p.y + h)).grad[0] - g.jet(Point::new(p.x, p.y - h)).grad[0]) / (2.0 * h);
        assert!((j.hess.xy - dxy).abs() < 1e-8);
    }

    #[test]
    fn four_turns_are_identity() {
        let f = named_field("bump_ring").unwrap();
        let g = rotate_field(f.clone(), 4);
        let p = Point::new(1.3, 0.2);
        assert_eq!(f.jet(p), g.jet(p));
        let two = rotate_field(rotate_field(f.clone(), 1), 1);
        let direct = rotate_field(f, 2);
        assert_eq!(two.jet(p), direct.jet(p));
    }

    #[test]
    fn rotated_bbox_of_two_bump_swaps_axes() {
        let f = named_field("two_bump").unwrap();
        let b = f.bbox();
        let r = rotate_field(f, 1).bbox();
        assert_eq!(r.width(), b.height());
        assert_eq!(r.height(), b.width());
    }
}
