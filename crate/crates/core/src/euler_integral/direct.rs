use super::{check_positive_support, integration_domain, QuadratureSpec};
use crate::error::Result;
use crate::fields::{ScalarField, TestFunction};
use crate::topology::{
    euler_char_bicov_levels, euler_char_cubical_levels, euler_char_morse, find_critical_points, CriticalPointConfig,
    EcMethod, GridSpec, SampledGrid,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Direct evaluation of `∫ h(u) χ({f >= u}) du` on a level grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectResult {
    pub value: f64,
    /// Change from the same computation with half the level nodes.
    pub error: f64,
    /// Levels at which the Euler characteristic was evaluated, after moving away from critical values.
    pub levels: Vec<f64>,
    pub euler: Vec<i64>,
}

/// Midpoints of `count` equal cells on `[a, b]`.
pub fn level_nodes(a: f64, b: f64, count: usize) -> Vec<f64> {
    let du = (b - a) / count as f64;
    (0..count).map(|k| a + (k as f64 + 0.5) * du).collect()
}

/// Moves levels that fall within `margin` of a critical value just outside that band, on the same side.
fn snap(levels: &mut [f64], critical: &[f64], margin: f64) {
    for u in levels.iter_mut() {
        for &c in critical {
            if (*u - c).abs() <= margin {
                *u = if *u >= c { c + 1.5 * margin } else { c - 1.5 * margin };
            }
        }
    }
}

fn direct_sum(
    sampled: Option<&SampledGrid>,
    h: &TestFunction,
    nodes: &[f64],
    snapped: &[f64],
    du: f64,
    method: EcMethod,
    points: &[crate::topology::CriticalPoint],
) -> Result<(f64, Vec<i64>)> {
    let euler: Vec<i64> = match method {
        EcMethod::Morse => snapped.iter().map(|&u| euler_char_morse(points, u, 1e-9)).collect::<Result<_>>()?,
        EcMethod::Cubical => euler_char_cubical_levels(sampled.expect("sampled grid"), snapped)?,
        EcMethod::Bicov => euler_char_bicov_levels(sampled.expect("sampled grid"), snapped)?,
    };
    let terms: Vec<f64> = nodes.iter().zip(&euler).map(|(&u, &chi)| h.eval(u).re * chi as f64 * du).collect();
    Ok((crate::quadrature::pairwise_sum(&terms), euler))
}

/// `∫ h(u) χ({f >= u}) du` by the midpoint rule over `level_count` levels spanning the support of `h`.
///
/// Grid methods use a lattice with `ec_resolution` sites across the bounding box. Levels within
/// a few lattice spacings' worth of field variation from a critical value are moved out of that
/// band, where the lattice Euler characteristic is unreliable. The exact Euler characteristic is
/// constant across the move and `h` is still evaluated at the original node, so the quadrature
/// itself is unchanged. If the critical points cannot be
/// located (degenerate fields) grid methods proceed without moving levels.
pub fn euler_primitive_direct(
    field: &dyn ScalarField,
    h: &TestFunction,
    quad: &QuadratureSpec,
    method: EcMethod,
) -> Result<DirectResult> {
    quad.validate()?;
    let (a, b) = check_positive_support(h)?;
    let domain = integration_domain(field)?;
    let cfg = CriticalPointConfig { level_floor: 0.5 * a, ..CriticalPointConfig::default() };
    let points = match method {
        EcMethod::Morse => find_critical_points(field, &domain, &cfg)?,
        _ => find_critical_points(field, &domain, &cfg).unwrap_or_default(),
    };
    let critical: Vec<f64> = points.iter().map(|p| p.value).collect();

    let (sampled, margin) = if method == EcMethod::Morse {
        (None, 1e-8)
    } else {
        let spacing = domain.width() / quad.ec_resolution as f64;
        let spec = GridSpec::covering(&domain, domain.center(), spacing)?;
        let grid = SampledGrid::sample(field, spec);
        let max_grad = max_gradient(field, &spec);
        (Some(grid), 5.0 * spacing * max_grad)
    };

    let run = |count: usize| -> Result<(f64, Vec<f64>, Vec<i64>)> {
        let du = (b - a) / count as f64;
        let nodes = level_nodes(a, b, count);
        let mut levels = nodes.clone();
        snap(&mut levels, &critical, margin);
        let (value, euler) = direct_sum(sampled.as_ref(), h, &nodes, &levels, du, method, &points)?;
        Ok((value, levels, euler))
    };
    let (value, levels, euler) = run(quad.level_count)?;
    let (coarse, _, _) = run(quad.level_count / 2)?;
    Ok(DirectResult { value, error: (value - coarse).abs(), levels, euler })
}

fn max_gradient(field: &dyn ScalarField, spec: &GridSpec) -> f64 {
    let stride = (spec.nx / 256).max(1);
    (0..spec.ny)
        .into_par_iter()
        .step_by(stride)
        .map(|j| {
            (0..spec.nx)
                .step_by(stride)
                .map(|i| field.jet(spec.point(i, j)).grad_norm())
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}
