use crate::fields::{Jet2, ScalarField};
use crate::geometry::{BBox, Point};
use crate::quadrature::{gauss_legendre, pairwise_sum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Per-cell rule of the tensor-product spatial quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpatialRule {
    /// One node at each cell centre.
    Midpoint,
    /// `n x n` Gauss–Legendre nodes per cell.
    GaussLegendre(usize),
}

/// `∫_domain density(jet f(x)) dx` on an `n x n` cell partition of `domain`.
///
/// Rows are summed in parallel and combined in a fixed order, so the result does not depend on
/// the number of worker threads.
pub fn integrate_jets<F>(field: &dyn ScalarField, domain: &BBox, n: usize, rule: SpatialRule, density: F) -> Complex64
where
    F: Fn(&Jet2) -> Complex64 + Sync,
{
    let (offsets, weights) = match rule {
        SpatialRule::Midpoint => (vec![0.5], vec![1.0]),
        SpatialRule::GaussLegendre(m) => {
            let (x, w) = gauss_legendre(m);
            (x.iter().map(|t| 0.5 * (t + 1.0)).collect(), w.iter().map(|w| 0.5 * w).collect())
        }
    };
    let dx = domain.width() / n as f64;
    let dy = domain.height() / n as f64;
    let rows: Vec<(f64, f64)> = (0..n * offsets.len())
        .into_par_iter()
        .map(|r| {
            let (cj, qj) = (r / offsets.len(), r % offsets.len());
            let y = domain.min.y + (cj as f64 + offsets[qj]) * dy;
            let mut re = Vec::with_capacity(n * offsets.len());
            let mut im = Vec::with_capacity(n * offsets.len());
            for ci in 0..n {
                for (qi, off) in offsets.iter().enumerate() {
                    let x = domain.min.x + (ci as f64 + off) * dx;
                    let v = weights[qi] * density(&field.jet(Point::new(x, y)));
                    re.push(v.re);
                    im.push(v.im);
                }
            }
            (weights[qj] * pairwise_sum(&re), weights[qj] * pairwise_sum(&im))
        })
        .collect();
    let re: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let im: Vec<f64> = rows.iter().map(|r| r.1).collect();
    Complex64::new(pairwise_sum(&re), pairwise_sum(&im)) * (dx * dy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::named_field;

    #[test]
    fn integrates_a_gaussian() {
        let f = named_field("radial_exp").unwrap();
        let d = f.bbox();
        for rule in [SpatialRule::Midpoint, SpatialRule::GaussLegendre(3)] {
            let v = integrate_jets(f.as_ref(), &d, 200, rule, |j| Complex64::new(j.value, 0.0));
            assert!((v.re - std::f64::consts::PI).abs() < 1e-10, "{rule:?}: {v}");
        }
    }
}
