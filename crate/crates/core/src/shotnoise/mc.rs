use super::{sample_germs, KernelModel, ShotField};
use crate::error::{invalid, Result};
use crate::euler_integral::{gamma_density, TieRule};
use crate::fields::{Jet2, ScalarField, TestFunction};
use crate::geometry::Point;
use crate::quadrature::Rule1D;
use crate::seed::{complex_estimate, derive_seed, McEstimate};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// `(pi - 2) / (16 pi)`: the mean of `cos^2` of a uniform angle restricted to one cone, over the full circle.
pub const ISOTROPY_FACTOR: f64 = (PI - 2.0) / (16.0 * PI);

/// `∫_{-3pi/4}^{-pi/2} cos^2(theta) d theta` by Gauss–Legendre; equals `(pi - 2) / 8`.
pub fn angular_constant() -> f64 {
    Rule1D::uniform(-0.75 * PI, -0.5 * PI, 4, 12).integrate(|t| t.cos().powi(2))
}

fn check_window(model: &KernelModel, window_radius: f64, intensity: f64, reps: usize) -> Result<f64> {
    let reach = model.max_truncation_radius();
    if window_radius < 5.0 * reach {
        return Err(invalid(format!(
            "window radius {window_radius} is below 5 truncation radii ({})",
            5.0 * reach
        )));
    }
    if !(intensity > 0.0) || reps < 2 {
        return Err(invalid("Monte Carlo needs positive intensity and at least 2 replicates"));
    }
    Ok(reach)
}

/// Jet of the shot noise at the origin for replicate seed `seed`.
///
/// Germs beyond the truncation radius do not reach the origin, and the restriction of a Poisson
/// process to a sub-disc is again Poisson, so only `B(0, reach)` is sampled.
fn origin_jet(model: &KernelModel, reach: f64, intensity: f64, seed: u64) -> Result<Jet2> {
    let s = sample_germs(reach, intensity, model, seed)?;
    Ok(s.germs.iter().fold(Jet2::default(), |acc, g| {
        acc.add(&model.components[g.kernel].1.jet(Point::ORIGIN - g.position).scaled(g.amplitude))
    }))
}

fn origin_jets(model: &KernelModel, window_radius: f64, intensity: f64, reps: usize, seed: u64) -> Result<Vec<Jet2>> {
    let reach = check_window(model, window_radius, intensity, reps)?;
    (0..reps as u64)
        .into_par_iter()
        .map(|r| origin_jet(model, reach, intensity, derive_seed(seed, r)))
        .collect()
}

/// Monte Carlo mean of `e^{i t f(0)}`.
pub fn empirical_cf(
    model: &KernelModel,
    window_radius: f64,
    intensity: f64,
    t: f64,
    reps: usize,
    seed: u64,
) -> Result<McEstimate<Complex64>> {
    let jets = origin_jets(model, window_radius, intensity, reps, seed)?;
    let v: Vec<Complex64> = jets.iter().map(|j| Complex64::new(0.0, t * j.value).exp()).collect();
    Ok(complex_estimate(&v))
}

/// Monte Carlo mean of `-sum_i 1{grad f(0) in Q_i} (i t d_i f(0)^2 + d_ii f(0)) e^{i t f(0)}`.
pub fn mc_gamma_at_origin(
    t: f64,
    model: &KernelModel,
    window_radius: f64,
    intensity: f64,
    reps: usize,
    seed: u64,
) -> Result<McEstimate<Complex64>> {
    let jets = origin_jets(model, window_radius, intensity, reps, seed)?;
    let h = TestFunction::fourier(t);
    let v: Vec<Complex64> = jets.iter().map(|j| -gamma_density(j, &h, TieRule::Strict)).collect();
    Ok(complex_estimate(&v))
}

/// Both sides of `E[h(f) 1{grad f in Q_i} d_i f^2] = (pi - 2)/(16 pi) E[h(f) |grad f|^2]` at the
/// origin with `h(u) = e^{itu}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsotropyRecord {
    pub lhs: [Complex64; 2],
    pub rhs: Complex64,
    /// Standard error of `lhs_i - rhs`, from the per-replicate differences.
    pub stderr: [f64; 2],
    pub angular_constant: f64,
}

pub fn isotropy_factor_check(
    model: &KernelModel,
    t: f64,
    window_radius: f64,
    intensity: f64,
    reps: usize,
    seed: u64,
) -> Result<IsotropyRecord> {
    if !model.is_isotropic() {
        return Err(invalid("isotropy check needs an isotropic model"));
    }
    let jets = origin_jets(model, window_radius, intensity, reps, seed)?;
    let mut lhs = [Complex64::new(0.0, 0.0); 2];
    let mut stderr = [0.0; 2];
    let rhs_samples: Vec<Complex64> = jets
        .iter()
        .map(|j| ISOTROPY_FACTOR * j.grad_norm().powi(2) * Complex64::new(0.0, t * j.value).exp())
        .collect();
    let rhs = complex_estimate(&rhs_samples).mean;
    for i in 0..2 {
        let samples: Vec<Complex64> = jets
            .iter()
            .map(|j| {
                let w = crate::euler_integral::quarter_weights(j.grad, TieRule::Strict)[i];
                w * j.grad[i] * j.grad[i] * Complex64::new(0.0, t * j.value).exp()
            })
            .collect();
        lhs[i] = complex_estimate(&samples).mean;
        let diffs: Vec<Complex64> = samples.iter().zip(&rhs_samples).map(|(a, b)| a - b).collect();
        stderr[i] = complex_estimate(&diffs).stderr;
    }
    Ok(IsotropyRecord { lhs, rhs, stderr, angular_constant: angular_constant() })
}

/// `(1 / |W_n|) I_f(h^(t), W_n)` averaged over replicates, for the window `W_n = B(0, sqrt n)`.
///
/// Germs are sampled in the window itself, so the field loses the contributions of outside germs
/// near the boundary; that edge bias decays like `1 / sqrt n`. The density is averaged over the centres of a square lattice of
/// `spatial_resolution` cells per window diameter that fall inside the window.
pub fn mc_euler_primitive_fourier(
    t: f64,
    model: &KernelModel,
    n: f64,
    intensity: f64,
    reps: usize,
    spatial_resolution: usize,
    seed: u64,
) -> Result<McEstimate<Complex64>> {
    if !(n > 0.0) || spatial_resolution < 4 || reps < 2 {
        return Err(invalid("window area, resolution and replicate count must be positive"));
    }
    let radius = n.sqrt();
    let cell = 2.0 * radius / spatial_resolution as f64;
    let nodes: Vec<Point> = (0..spatial_resolution * spatial_resolution)
        .map(|k| {
            let (i, j) = (k % spatial_resolution, k / spatial_resolution);
            Point::new(-radius + (i as f64 + 0.5) * cell, -radius + (j as f64 + 0.5) * cell)
        })
        .filter(|p| p.norm() < radius)
        .collect();
    let h = TestFunction::fourier(t);
    let values: Vec<Complex64> = (0..reps as u64)
        .map(|r| {
            let sample = sample_germs(radius, intensity, model, derive_seed(seed, r))?;
            let field = ShotField::new(&sample, model);
            let parts: Vec<Complex64> =
                nodes.par_iter().map(|&p| -gamma_density(&field.jet(p), &h, TieRule::Strict)).collect();
            let re: Vec<f64> = parts.iter().map(|z| z.re).collect();
            let im: Vec<f64> = parts.iter().map(|z| z.im).collect();
            let m = nodes.len() as f64;
            Ok(Complex64::new(
                crate::quadrature::pairwise_sum(&re) / m,
                crate::quadrature::pairwise_sum(&im) / m,
            ))
        })
        .collect::<Result<_>>()?;
    Ok(complex_estimate(&values))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angular_constant_is_closed_form() {
        assert!((angular_constant() - (PI - 2.0) / 8.0).abs() < 1e-14);
        assert!((ISOTROPY_FACTOR - 0.022_711_264_227).abs() < 1e-12);
    }

    #[test]
    fn cf_at_zero_is_one_and_seeded() {
        let m = KernelModel::gaussian();
        let e = empirical_cf(&m, 30.0, 1.0, 0.0, 50, 1).unwrap();
        assert_eq!(e.mean, Complex64::new(1.0, 0.0));
        let a = mc_gamma_at_origin(1.0, &m, 30.0, 1.0, 200, 5).unwrap();
        let b = mc_gamma_at_origin(1.0, &m, 30.0, 1.0, 200, 5).unwrap();
        assert_eq!(a.mean.re.to_bits(), b.mean.re.to_bits());
        assert!(empirical_cf(&m, 10.0, 1.0, 1.0, 50, 1).is_err());
    }
}
