use super::{Descriptor, Jet2, ScalarField};
use crate::error::{invalid, Result};
use crate::geometry::{BBox, Point, SymMat2};

/// Profile `psi(r) = (a0 + a1 r) exp(-rate r)` of a radial field `f(x) = psi(|x|^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialProfile {
    pub a0: f64,
    pub a1: f64,
    pub rate: f64,
}

impl RadialProfile {
    pub fn exp(amplitude: f64, rate: f64) -> Self {
        Self { a0: amplitude, a1: 0.0, rate }
    }

    pub fn poly_exp(a0: f64, a1: f64, rate: f64) -> Self {
        Self { a0, a1, rate }
    }

    /// `(psi, psi', psi'')` at `r = |x|^2`.
    pub fn eval(&self, r: f64) -> (f64, f64, f64) {
        let e = (-self.rate * r).exp();
        let poly = self.a0 + self.a1 * r;
        let psi = poly * e;
        let d1 = (self.a1 - self.rate * poly) * e;
        let d2 = (self.rate * self.rate * poly - 2.0 * self.rate * self.a1) * e;
        (psi, d1, d2)
    }

    pub fn psi0(&self) -> f64 {
        self.a0
    }

    /// Largest value of the profile on `r >= 0`.
    pub fn max_value(&self) -> f64 {
        let r_star = if self.a1 > 0.0 { (1.0 / self.rate - self.a0 / self.a1).max(0.0) } else { 0.0 };
        self.eval(r_star).0.max(self.a0)
    }

    /// Smallest `r` beyond which `psi` stays below `tol`.
    pub fn cutoff(&self, tol: f64) -> f64 {
        let mut hi = 1.0;
        while self.eval(hi).0 >= tol || self.eval(hi).1 >= 0.0 {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let (v, d, _) = self.eval(mid);
            if v >= tol || d >= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }
}

#[derive(Debug, Clone)]
pub struct RadialField {
    profile: RadialProfile,
    half_width: f64,
}

impl RadialField {
    pub fn new(profile: RadialProfile) -> Result<Self> {
        if !(profile.rate > 0.0 && profile.a0 > 0.0 && profile.a1 >= 0.0) {
            return Err(invalid("radial profile needs a0 > 0, a1 >= 0, rate > 0"));
        }
        let half_width = profile.cutoff(1e-12 * profile.max_value()).sqrt() * (1.0 + 1e-9);
        Ok(Self { profile, half_width })
    }

    pub fn profile(&self) -> &RadialProfile {
        &self.profile
    }
}

impl ScalarField for RadialField {
    fn jet(&self, p: Point) -> Jet2 {
        let r = p.norm_sq();
        let (psi, d1, d2) = self.profile.eval(r);
        Jet2::new(
            psi,
            [2.0 * p.x * d1, 2.0 * p.y * d1],
            SymMat2::new(
                2.0 * d1 + 4.0 * p.x * p.x * d2,
                4.0 * p.x * p.y * d2,
                2.0 * d1 + 4.0 * p.y * p.y * d2,
            ),
        )
    }

    fn value(&self, p: Point) -> f64 {
        self.profile.eval(p.norm_sq()).0
    }

    fn bbox(&self) -> BBox {
        BBox::around(Point::ORIGIN, self.half_width)
    }

    fn descriptor(&self) -> Descriptor {
        Descriptor::new("radial")
            .with("a0", self.profile.a0)
            .with("a1", self.profile.a1)
            .with("rate", self.profile.rate)
    }
}
