//! The Euler integral `I_f(h) = ∫ h(u) χ({f >= u}) du` and its checks.

mod coarea;
mod continuity;
mod direct;
mod gamma;
mod kac_rice;
mod spatial;

pub use coarea::{coarea_check, level_set_length};
pub use continuity::{continuity_gap_bound, continuity_moment_report, delta_x, ContinuityMomentReport, GapBound};
pub use direct::{euler_primitive_direct, level_nodes, DirectResult};
pub use gamma::{gamma_density, quarter_weights, rotavg_density, TieRule};
pub use kac_rice::{kac_rice_1d, Profile1D};
pub use spatial::{integrate_jets, SpatialRule};

use crate::error::{invalid, Error, Result};
use crate::fields::{ScalarField, TestFunction};
use crate::geometry::BBox;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Discretisation parameters shared by the Euler-integral routines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Cells per side of the square spatial integration domain.
    pub spatial_resolution: usize,
    /// Number of level nodes across the support of `h`.
    pub level_count: usize,
    pub rule: SpatialRule,
    pub tie: TieRule,
    /// Target relative accuracy; a resolution-halving change above `10 * tol` is an error.
    pub tol: f64,
    /// Lattice sites per side of the bounding box for excursion-set Euler characteristics.
    pub ec_resolution: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            spatial_resolution: 512,
            level_count: 128,
            rule: SpatialRule::Midpoint,
            tie: TieRule::Half,
            tol: 1e-4,
            ec_resolution: 1024,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.spatial_resolution < 64 {
            return Err(invalid("spatial_resolution must be at least 64"));
        }
        if self.level_count < 32 {
            return Err(invalid("level_count must be at least 32"));
        }
        if self.ec_resolution < 16 {
            return Err(invalid("ec_resolution must be at least 16"));
        }
        if let SpatialRule::GaussLegendre(0) = self.rule {
            return Err(invalid("Gauss-Legendre rule needs at least one node"));
        }
        if !(self.tol > 0.0) {
            return Err(invalid("tol must be positive"));
        }
        Ok(())
    }
}

/// A computed value with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: Complex64,
    pub error: f64,
}

/// Square integration domain shared by a field and its quarter-turn rotations.
pub fn integration_domain(field: &dyn ScalarField) -> Result<BBox> {
    let b = field.bbox();
    if b.is_empty() {
        return Err(invalid("field has no bounding box to integrate over"));
    }
    Ok(b.squared())
}

pub(crate) fn check_positive_support(h: &TestFunction) -> Result<(f64, f64)> {
    match h.support() {
        Some((a, b)) if a > 0.0 => Ok((a, b)),
        Some((a, _)) => Err(invalid(format!("test function support must lie in (0, inf), starts at {a}"))),
        None => Err(invalid("test function must be compactly supported")),
    }
}

fn refined<F>(field: &dyn ScalarField, quad: &QuadratureSpec, what: &'static str, density: F) -> Result<Estimate>
where
    F: Fn(&crate::fields::Jet2) -> Complex64 + Sync,
{
    quad.validate()?;
    let domain = integration_domain(field)?;
    let n = quad.spatial_resolution;
    let fine = integrate_jets(field, &domain, n, quad.rule, &density);
    let coarse = integrate_jets(field, &domain, n / 2, quad.rule, &density);
    let error = (fine - coarse).norm();
    let change = error / fine.norm().max(1.0);
    if change > 10.0 * quad.tol {
        return Err(Error::NotConverged { what, change, limit: 10.0 * quad.tol });
    }
    Ok(Estimate { value: fine, error })
}

/// `I_f(h) = -∫ gamma(x) dx` over the square hull of the field's bounding box.
///
/// The value is taken at `spatial_resolution`; the error estimate is its change from half that
/// resolution.
pub fn euler_primitive_integral(field: &dyn ScalarField, h: &TestFunction, quad: &QuadratureSpec) -> Result<Estimate> {
    check_positive_support(h)?;
    let tie = quad.tie;
    refined(field, quad, "I_f", |j| -gamma_density(j, h, tie))
}

/// The rotation-averaged form of `I_f(h)`.
pub fn euler_primitive_rotavg(field: &dyn ScalarField, h: &TestFunction, quad: &QuadratureSpec) -> Result<Estimate> {
    check_positive_support(h)?;
    let tie = quad.tie;
    refined(field, quad, "rotation-averaged I_f", |j| rotavg_density(j, h, tie))
}

/// `I_f(h)` over an explicit square domain at a single resolution, without a convergence check.
pub fn euler_primitive_on(field: &dyn ScalarField, h: &TestFunction, domain: &BBox, n: usize, quad: &QuadratureSpec) -> Complex64 {
    let tie = quad.tie;
    integrate_jets(field, domain, n, quad.rule, |j| -gamma_density(j, h, tie))
}
