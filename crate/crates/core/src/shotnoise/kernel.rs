use crate::error::{invalid, Result};
use crate::fields::Jet2;
use crate::geometry::{Point, SymMat2};
use serde::{Deserialize, Serialize};

/// Radial profile of a grain kernel `g(x) = phi(|x|^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum KernelShape {
    /// `exp(-r)`.
    Gaussian,
    /// `(1 + r)^(-beta)` with `beta > 2`.
    RadialPower { beta: f64 },
}

impl KernelShape {
    /// `(phi, phi', phi'')` at `r = |x|^2`.
    pub fn profile(&self, r: f64) -> (f64, f64, f64) {
        match *self {
            Self::Gaussian => {
                let e = (-r).exp();
                (e, -e, e)
            }
            Self::RadialPower { beta } => {
                let base = (1.0 + r).powf(-beta);
                let d1 = -beta * base / (1.0 + r);
                let d2 = beta * (beta + 1.0) * base / ((1.0 + r) * (1.0 + r));
                (base, d1, d2)
            }
        }
    }
}

/// A grain kernel with the constants of its regularity and decay conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrainKernel {
    pub shape: KernelShape,
    /// `gamma` in `|g| + sum_i (d_i g^2 + |d_ii g|) <= C (1 + |x|)^(-gamma)`.
    pub decay_gamma: f64,
    pub decay_const: f64,
    /// `alpha` in `|grad g| <= C g^(alpha / 2)`.
    pub grad_alpha: f64,
    pub grad_const: f64,
    /// Radius beyond which every jet entry is below `1e-12`.
    pub truncation_radius: f64,
    /// Superlevel sets `{g >= u}` are convex for `u` above this level.
    pub convex_level_threshold: f64,
}

/// Upper envelope of `|g| + sum_i (d_i g^2 + |d_ii g|)` at distance `rho`; it also dominates every
/// individual jet entry.
fn envelope(shape: &KernelShape, rho: f64) -> f64 {
    let r = rho * rho;
    let (p, d1, d2) = shape.profile(r);
    p.abs() + 4.0 * r * d1 * d1 + 2.0 * (2.0 * d1.abs() + 4.0 * r * d2.abs())
}

fn truncation(shape: &KernelShape) -> f64 {
    let mut hi = 1.0;
    while envelope(shape, hi) >= 1e-12 {
        hi *= 2.0;
    }
    // the envelope is decreasing on the tail; bisect for the crossing
    let mut lo = 0.5 * hi;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if envelope(shape, mid) >= 1e-12 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

fn decay_constant(shape: &KernelShape, gamma: f64, reach: f64) -> f64 {
    let n = 200_000;
    let sup = (0..=n)
        .map(|k| {
            let rho = reach * k as f64 / n as f64;
            envelope(shape, rho) * (1.0 + rho).powf(gamma)
        })
        .fold(0.0, f64::max);
    1.01 * sup
}

impl GrainKernel {
    /// `g(x) = exp(-|x|^2)`: gradient exponent 3/2 with the exact constant `2 sqrt(2) e^(-1/2)`.
    pub fn gaussian() -> Self {
        let shape = KernelShape::Gaussian;
        let truncation_radius = truncation(&shape);
        Self {
            shape,
            decay_gamma: 5.0,
            decay_const: decay_constant(&shape, 5.0, truncation_radius),
            grad_alpha: 1.5,
            grad_const: 2.0 * 2f64.sqrt() * (-0.5f64).exp(),
            truncation_radius,
            convex_level_threshold: 1.0,
        }
    }

    /// `g(x) = (1 + |x|^2)^(-beta)`.
    pub fn radial_power(beta: f64) -> Result<Self> {
        if !(beta > 2.0 && beta.is_finite()) {
            return Err(invalid(format!("power kernel needs beta > 2, got {beta}")));
        }
        let shape = KernelShape::RadialPower { beta };
        let truncation_radius = truncation(&shape);
        Ok(Self {
            shape,
            decay_gamma: 2.0 * beta,
            decay_const: decay_constant(&shape, 2.0 * beta, truncation_radius),
            grad_alpha: 2.0,
            grad_const: beta,
            truncation_radius,
            convex_level_threshold: 1.0,
        })
    }

    pub fn jet(&self, p: Point) -> Jet2 {
        let r = p.norm_sq();
        let (phi, d1, d2) = self.shape.profile(r);
        Jet2::new(
            phi,
            [2.0 * p.x * d1, 2.0 * p.y * d1],
            SymMat2::new(2.0 * d1 + 4.0 * p.x * p.x * d2, 4.0 * p.x * p.y * d2, 2.0 * d1 + 4.0 * p.y * p.y * d2),
        )
    }

    pub fn value(&self, p: Point) -> f64 {
        self.shape.profile(p.norm_sq()).0
    }

    /// Kernels here are radial, so rotating a grain leaves it unchanged.
    pub fn is_radial(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_constants() {
        let k = GrainKernel::gaussian();
        assert!((k.truncation_radius - 5.75).abs() < 0.1, "{}", k.truncation_radius);
        let tail = Point::new(k.truncation_radius, 0.0);
        let j = k.jet(tail);
        for v in [j.value, j.grad[0], j.hess.xx, j.hess.yy] {
            assert!(v.abs() < 1e-12);
        }
        // |grad g| <= C g^(3/4), with equality at |x| = sqrt(2)
        for k2 in 1..2000 {
            let rho = k2 as f64 * 0.005;
            let jet = k.jet(Point::new(rho, 0.0));
            assert!(jet.grad_norm() <= k.grad_const * jet.value.powf(0.75) * (1.0 + 1e-12));
        }
        let at = k.jet(Point::new(2f64.sqrt(), 0.0));
        assert!((at.grad_norm() - k.grad_const * at.value.powf(0.75)).abs() < 1e-14);
    }

    #[test]
    fn decay_bound_holds() {
        for k in [GrainKernel::gaussian(), GrainKernel::radial_power(3.0).unwrap()] {
            for i in 0..5000 {
                let rho = i as f64 * 0.01;
                let j = k.jet(Point::new(0.6 * rho, 0.8 * rho));
                let lhs = j.value.abs() + j.grad[0].powi(2) + j.grad[1].powi(2) + j.hess.xx.abs() + j.hess.yy.abs();
                assert!(lhs <= k.decay_const * (1.0 + rho).powf(-k.decay_gamma), "rho={rho}");
            }
        }
    }

    #[test]
    fn power_kernel_gradient_exponent() {
        let k = GrainKernel::radial_power(3.0).unwrap();
        for i in 0..1000 {
            let j = k.jet(Point::new(0.05 * i as f64, 0.0));
            assert!(j.grad_norm() <= k.grad_const * j.value * (1.0 + 1e-12));
        }
        assert!(GrainKernel::radial_power(2.0).is_err());
    }
}
