//! Points, axis-aligned boxes and the symmetric 2×2 matrices used by jets.

use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn max_norm(self) -> f64 {
        self.x.abs().max(self.y.abs())
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, rhs: f64) -> Point {
        Point::new(self.x * rhs, self.y * rhs)
    }
}

/// Axis-aligned rectangle. An empty box has `min > max` and is the identity for [`BBox::union`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub min: Point,
    pub max: Point,
}

impl BBox {
    pub const EMPTY: BBox = BBox {
        min: Point::new(f64::INFINITY, f64::INFINITY),
        max: Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
    };

    pub fn new(min: Point, max: Point) -> Self {
        Self { min, max }
    }

    /// Square of half-width `r` centred at `c`.
    pub fn around(c: Point, r: f64) -> Self {
        Self::new(Point::new(c.x - r, c.y - r), Point::new(c.x + r, c.y + r))
    }

    pub fn is_empty(&self) -> bool {
        !(self.min.x <= self.max.x && self.min.y <= self.max.y)
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn center(&self) -> Point {
        Point::new(0.5 * (self.min.x + self.max.x), 0.5 * (self.min.y + self.max.y))
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    pub fn contains_box(&self, other: &BBox) -> bool {
        other.is_empty() || (self.contains(other.min) && self.contains(other.max))
    }

    pub fn union(&self, other: &BBox) -> BBox {
        if self.is_empty() {
            return *other;
        }
        if other.is_empty() {
            return *self;
        }
        BBox::new(
            Point::new(self.min.x.min(other.min.x), self.min.y.min(other.min.y)),
            Point::new(self.max.x.max(other.max.x), self.max.y.max(other.max.y)),
        )
    }

    pub fn dilate(&self, r: f64) -> BBox {
        if self.is_empty() {
            return *self;
        }
        BBox::new(
            Point::new(self.min.x - r, self.min.y - r),
            Point::new(self.max.x + r, self.max.y + r),
        )
    }

    /// Smallest square with the same centre that contains the box.
    pub fn squared(&self) -> BBox {
        let half = 0.5 * self.width().max(self.height());
        BBox::around(self.center(), half)
    }
}

/// Symmetric 2×2 matrix stored by its three distinct entries.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SymMat2 {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl SymMat2 {
    pub const fn new(xx: f64, xy: f64, yy: f64) -> Self {
        Self { xx, xy, yy }
    }

    pub fn det(&self) -> f64 {
        self.xx * self.yy - self.xy * self.xy
    }

    pub fn trace(&self) -> f64 {
        self.xx + self.yy
    }

    pub fn diag(&self, i: usize) -> f64 {
        if i == 0 {
            self.xx
        } else {
            self.yy
        }
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let mean = 0.5 * self.trace();
        let half_diff = 0.5 * (self.xx - self.yy);
        let r = half_diff.hypot(self.xy);
        (mean - r, mean + r)
    }

    /// Number of strictly positive eigenvalues, decided from the determinant and trace signs.
    pub fn positive_eigenvalue_count(&self) -> u8 {
        let det = self.det();
        if det < 0.0 {
            1
        } else if self.trace() > 0.0 {
            // det == 0 leaves one zero eigenvalue, the other equal to the trace
            if det > 0.0 {
                2
            } else {
                1
            }
        } else {
            0
        }
    }

    /// Solves `self * v = rhs`; `None` when the matrix is singular.
    pub fn solve(&self, rhs: [f64; 2]) -> Option<[f64; 2]> {
        let det = self.det();
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        Some([
            (self.yy * rhs[0] - self.xy * rhs[1]) / det,
            (self.xx * rhs[1] - self.xy * rhs[0]) / det,
        ])
    }

    pub fn scaled(&self, s: f64) -> SymMat2 {
        SymMat2::new(self.xx * s, self.xy * s, self.yy * s)
    }
}

impl Add for SymMat2 {
    type Output = SymMat2;
    fn add(self, rhs: SymMat2) -> SymMat2 {
        SymMat2::new(self.xx + rhs.xx, self.xy + rhs.xy, self.yy + rhs.yy)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_count_matches_classification() {
        assert_eq!(SymMat2::new(-2.0, 0.0, -1.0).positive_eigenvalue_count(), 0);
        assert_eq!(SymMat2::new(-2.0, 0.0, 1.0).positive_eigenvalue_count(), 1);
        assert_eq!(SymMat2::new(2.0, 0.5, 1.0).positive_eigenvalue_count(), 2);
        let (lo, hi) = SymMat2::new(2.0, 1.0, 2.0).eigenvalues();
        assert!((lo - 1.0).abs() < 1e-15 && (hi - 3.0).abs() < 1e-15);
    }

    #[test]
    fn solve_inverts() {
        let m = SymMat2::new(3.0, 1.0, 2.0);
        let v = m.solve([1.0, -1.0]).unwrap();
        assert!((3.0 * v[0] + v[1] - 1.0).abs() < 1e-15);
        assert!((v[0] + 2.0 * v[1] + 1.0).abs() < 1e-15);
        assert!(SymMat2::new(1.0, 1.0, 1.0).solve([1.0, 0.0]).is_none());
    }

    #[test]
    fn empty_box_is_union_identity() {
        let b = BBox::around(Point::new(1.0, 2.0), 0.5);
        assert_eq!(BBox::EMPTY.union(&b), b);
        assert_eq!(b.union(&BBox::EMPTY), b);
        assert!(BBox::EMPTY.is_empty());
    }
}
