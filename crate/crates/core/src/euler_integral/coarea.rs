use super::{check_positive_support, integrate_jets, integration_domain, level_nodes, QuadratureSpec};
use crate::error::Result;
use crate::fields::{ScalarField, TestFunction};
use crate::geometry::Point;
use crate::quadrature::pairwise_sum;
use crate::topology::{GridSpec, SampledGrid};
use num_complex::Complex64;
use rayon::prelude::*;

/// Length of the level curve `{f = u}` by marching squares with linear interpolation along
/// cell edges. Cells with diagonally opposite corners on the same side are resolved by the sign
/// of `f - u` at the cell centre.
pub fn level_set_length(field: &dyn ScalarField, grid: &SampledGrid, u: f64) -> f64 {
    let spec = grid.spec;
    let s = spec.spacing;
    let rows: Vec<f64> = (0..spec.ny - 1)
        .into_par_iter()
        .map(|j| {
            let mut total = 0.0;
            for i in 0..spec.nx - 1 {
                // corners counter-clockwise from lower-left
                let v = [grid.get(i, j), grid.get(i + 1, j), grid.get(i + 1, j + 1), grid.get(i, j + 1)];
                let inside = v.map(|x| x >= u);
                let count = inside.iter().filter(|&&b| b).count();
                if count == 0 || count == 4 {
                    continue;
                }
                let corner = [Point::new(0.0, 0.0), Point::new(s, 0.0), Point::new(s, s), Point::new(0.0, s)];
                let crossing = |k: usize| {
                    let l = (k + 1) % 4;
                    let t = (u - v[k]) / (v[l] - v[k]);
                    corner[k] + (corner[l] - corner[k]) * t
                };
                let cut: Vec<usize> = (0..4).filter(|&k| inside[k] != inside[(k + 1) % 4]).collect();
                if cut.len() == 2 {
                    total += (crossing(cut[0]) - crossing(cut[1])).norm();
                } else {
                    let centre = field.value(spec.point(i, j) + Point::new(0.5 * s, 0.5 * s)) >= u;
                    // when the centre joins corners 0 and 2, the curves cut off corners 1 and 3
                    let (p, q) = if centre == inside[0] { ((0, 1), (2, 3)) } else { ((0, 3), (1, 2)) };
                    total += (crossing(p.0) - crossing(p.1)).norm();
                    total += (crossing(q.0) - crossing(q.1)).norm();
                }
            }
            total
        })
        .collect();
    pairwise_sum(&rows)
}

/// `(∫ h(u) length({f = u}) du, ∫ h(f) |grad f| dx)`, equal by the co-area formula.
pub fn coarea_check(field: &dyn ScalarField, h: &TestFunction, quad: &QuadratureSpec) -> Result<(f64, f64)> {
    quad.validate()?;
    let (a, b) = check_positive_support(h)?;
    let domain = integration_domain(field)?;
    let spec = GridSpec::covering(&domain, domain.center(), domain.width() / quad.spatial_resolution as f64)?;
    let grid = SampledGrid::sample(field, spec);
    let du = (b - a) / quad.level_count as f64;
    let terms: Vec<f64> = level_nodes(a, b, quad.level_count)
        .iter()
        .map(|&u| h.eval(u).re * level_set_length(field, &grid, u) * du)
        .collect();
    let lhs = pairwise_sum(&terms);
    let rhs = integrate_jets(field, &domain, quad.spatial_resolution, quad.rule, |j| {
        Complex64::new(h.eval(j.value).re * j.grad_norm(), 0.0)
    })
    .re;
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::named_field;

    #[test]
    fn circle_length() {
        let f = named_field("radial_exp").unwrap();
        let spec = GridSpec::covering(&f.bbox(), Point::ORIGIN, 1.0 / 128.0).unwrap();
        let grid = SampledGrid::sample(f.as_ref(), spec);
        // {exp(-r^2) = 1/e} is the unit circle
        let len = level_set_length(f.as_ref(), &grid, (-1.0f64).exp());
        assert!((len - std::f64::consts::TAU).abs() < 1e-3, "{len}");
    }
}
