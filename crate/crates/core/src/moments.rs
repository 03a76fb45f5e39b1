//! Higher moments of `I_f(h)` for shot-noise fields and the moment bound
//! `E|I_f(h)|^q <= C_q (M^{1/p} (|h| + |h'|) ∫ P(f(x) in supp h)^{1 - 1/p} dx)^q`.

use crate::error::{invalid, Result};
use crate::euler_integral::{euler_primitive_on, QuadratureSpec};
use crate::fields::{ScalarField, TestFunction};
use crate::geometry::{BBox, Point};
use crate::quadrature::{pairwise_sum, Rule1D};
use crate::seed::{derive_seed, order_free_sum};
use crate::shotnoise::{sample_germs, KernelModel, ShotField};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// `q 2^q`: a factor `q` from the proof and at most `2^q` from splitting the sum over the two cones.
pub fn default_constant(q: u32) -> f64 {
    q as f64 * 2f64.powi(q as i32)
}

/// `constant (M^{1/p} (|h| + |h'|) support_prob_integral)^q`.
///
/// The factor `(|h| + |h'|)^q` is kept outside the constant.
pub fn moment_bound(q: u32, p: f64, m: f64, h: &TestFunction, support_prob_integral: f64, constant: f64) -> Result<f64> {
    if !(p > 1.0) {
        return Err(invalid(format!("moment bound needs p > 1, got {p}")));
    }
    if q == 0 || !(m >= 0.0) || !(support_prob_integral >= 0.0) || !(constant > 0.0) {
        return Err(invalid("moment bound needs q >= 1 and nonnegative M, integral and constant"));
    }
    let (h0, h1, _) = h.sup_norms();
    Ok(constant * (m.powf(1.0 / p) * (h0 + h1) * support_prob_integral).powi(q as i32))
}

/// Mean of `|v|^q`.
pub fn empirical_moment(values: &[Complex64], q: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(invalid("empirical moment of an empty sample"));
    }
    let p: Vec<f64> = values.iter().map(|v| v.norm().powf(q)).collect();
    Ok(order_free_sum(&p) / values.len() as f64)
}

/// Jackknife standard error of [`empirical_moment`].
pub fn jackknife_stderr(values: &[Complex64], q: f64) -> Result<f64> {
    let n = values.len();
    if n < 2 {
        return Err(invalid("jackknife needs at least 2 values"));
    }
    let p: Vec<f64> = values.iter().map(|v| v.norm().powf(q)).collect();
    let total = order_free_sum(&p);
    let loo: Vec<f64> = p.iter().map(|x| (total - x) / (n - 1) as f64).collect();
    let mean = order_free_sum(&loo) / n as f64;
    let dev: Vec<f64> = loo.iter().map(|x| (x - mean).powi(2)).collect();
    Ok(((n - 1) as f64 / n as f64 * order_free_sum(&dev)).sqrt())
}

/// Raw moments `E[S^k]`, `k = 0..=n`, of a compound Poisson variable with cumulants `kappa[k-1]`.
fn moments_from_cumulants(kappa: &[f64]) -> Vec<f64> {
    let n = kappa.len();
    let mut m = vec![1.0; n + 1];
    for j in 1..=n {
        let mut acc = 0.0;
        let mut binom = 1.0; // C(j-1, k-1)
        for k in 1..=j {
            acc += binom * kappa[k - 1] * m[j - k];
            binom *= (j - k) as f64 / k as f64;
        }
        m[j] = acc;
    }
    m
}

/// `∫ |d_1 g|^n dx` and `∫ |d_11 g|^n dx` over the plane for one kernel, in polar coordinates.
fn kernel_abs_integrals(kernel: &crate::shotnoise::GrainKernel, n: u32) -> (f64, f64) {
    let t = kernel.truncation_radius;
    let radial = Rule1D::uniform(0.0, t, (t / 0.05).ceil() as usize, 8);
    let angles = 512;
    let (mut grad, mut hess) = (Vec::new(), Vec::new());
    for (&r, &w) in radial.nodes.iter().zip(&radial.weights) {
        let (mut a, mut b) = (0.0, 0.0);
        for k in 0..angles {
            let th = 2.0 * PI * (k as f64 + 0.5) / angles as f64;
            let jet = kernel.jet(Point::new(r * th.cos(), r * th.sin()));
            a += jet.grad[0].abs().powi(n as i32);
            b += jet.hess.xx.abs().powi(n as i32);
        }
        let scale = w * r * 2.0 * PI / angles as f64;
        grad.push(a * scale);
        hess.push(b * scale);
    }
    (pairwise_sum(&grad), pairwise_sum(&hess))
}

/// `M = max(sup_x E|d_i f(x)|^{2pq}, sup_x E|d_ii f(x)|^{pq})` bounded above for a shot noise of the
/// given intensity on any window.
///
/// `|d_i f(x)|` is dominated by `sum_y |M_y d_i g(x - y)|` over all germs of the plane, a compound
/// Poisson variable whose cumulants `lambda E[|M|^k] ∫ |d_i g|^k` are explicit. Non-integer orders
/// go through Lyapunov's inequality at the next integer order. Radial kernels make both indices `i`
/// equal.
pub fn kernel_moment_bound(model: &KernelModel, intensity: f64, p: f64, q: u32) -> Result<f64> {
    if !(p > 1.0) || q == 0 || !(intensity > 0.0) {
        return Err(invalid("kernel moment bound needs p > 1, q >= 1 and positive intensity"));
    }
    let orders = [2.0 * p * q as f64, p * q as f64];
    let top = orders[0].ceil() as u32;
    let mut kappa_grad = vec![0.0; top as usize];
    let mut kappa_hess = vec![0.0; top as usize];
    for k in 1..=top {
        let amp = model.amplitude.moment_abs(k);
        for (w, kernel) in &model.components {
            let (a, b) = kernel_abs_integrals(kernel, k);
            kappa_grad[k as usize - 1] += intensity * w * amp * a;
            kappa_hess[k as usize - 1] += intensity * w * amp * b;
        }
    }
    let mg = moments_from_cumulants(&kappa_grad);
    let mh = moments_from_cumulants(&kappa_hess);
    let lyapunov = |m: &[f64], r: f64| {
        let n = r.ceil();
        m[n as usize].powf(r / n)
    };
    Ok(lyapunov(&mg, orders[0]).max(lyapunov(&mh, orders[1])))
}

/// A shot noise with germs on the disc `B(0, radius)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShotWindow {
    pub radius: f64,
    pub intensity: f64,
    /// Midpoint cells per side of the square integration domain.
    pub resolution: usize,
}

impl Default for ShotWindow {
    fn default() -> Self {
        Self { radius: 3.0, intensity: 1.0, resolution: 256 }
    }
}

impl ShotWindow {
    /// Square containing the support of every realization.
    pub fn domain(&self, model: &KernelModel) -> BBox {
        BBox::around(Point::ORIGIN, self.radius + model.max_truncation_radius())
    }

    fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0) || !(self.intensity > 0.0) || self.resolution < 4 {
            return Err(invalid("window needs positive radius, intensity and at least 4 cells"));
        }
        Ok(())
    }

    fn nodes(&self, model: &KernelModel) -> (Vec<Point>, f64) {
        let d = self.domain(model);
        let n = self.resolution;
        let cell = d.width() / n as f64;
        let pts = (0..n * n)
            .map(|k| Point::new(d.min.x + ((k % n) as f64 + 0.5) * cell, d.min.y + ((k / n) as f64 + 0.5) * cell))
            .collect();
        (pts, cell * cell)
    }

    fn field(&self, model: &KernelModel, seed: u64) -> Result<ShotField> {
        Ok(ShotField::new(&sample_germs(self.radius, self.intensity, model, seed)?, model))
    }
}

fn support_of(h: &TestFunction) -> Result<(f64, f64)> {
    h.support().ok_or_else(|| invalid("test function must have compact support"))
}

fn prob_integral(hits: &[u32], reps: usize, p: f64, cell_area: f64) -> f64 {
    let terms: Vec<f64> = hits.iter().map(|&c| (c as f64 / reps as f64).powf(1.0 - 1.0 / p)).collect();
    pairwise_sum(&terms) * cell_area
}

/// `∫ P(f(x) in supp h)^{1 - 1/p} dx` with the probabilities estimated pointwise from `reps`
/// realizations on the window.
pub fn support_prob_integral(
    model: &KernelModel,
    h: &TestFunction,
    p: f64,
    window: &ShotWindow,
    reps: usize,
    seed: u64,
) -> Result<f64> {
    if !(p > 1.0) || reps == 0 {
        return Err(invalid("support probability integral needs p > 1 and reps >= 1"));
    }
    window.validate()?;
    let (a, b) = support_of(h)?;
    let (nodes, area) = window.nodes(model);
    let mut hits = vec![0u32; nodes.len()];
    for r in 0..reps as u64 {
        let f = window.field(model, derive_seed(seed, r))?;
        let inside: Vec<bool> = nodes.par_iter().map(|&x| (a..=b).contains(&f.value(x))).collect();
        for (c, i) in hits.iter_mut().zip(inside) {
            *c += i as u32;
        }
    }
    Ok(prob_integral(&hits, reps, p, area))
}

/// Replicates of `I_f(h)` over the window, one per derived seed, together with the per-node
/// support hit counts of the same realizations.
fn sample_primitives(
    model: &KernelModel,
    h: &TestFunction,
    window: &ShotWindow,
    quad: &QuadratureSpec,
    reps: usize,
    seed: u64,
) -> Result<(Vec<Complex64>, Vec<u32>, f64)> {
    window.validate()?;
    let (a, b) = support_of(h)?;
    let domain = window.domain(model);
    let (nodes, area) = window.nodes(model);
    let mut hits = vec![0u32; nodes.len()];
    let mut values = Vec::with_capacity(reps);
    for r in 0..reps as u64 {
        let f = window.field(model, derive_seed(seed, r))?;
        values.push(euler_primitive_on(&f, h, &domain, window.resolution, quad));
        let inside: Vec<bool> = nodes.par_iter().map(|&x| (a..=b).contains(&f.value(x))).collect();
        for (c, i) in hits.iter_mut().zip(inside) {
            *c += i as u32;
        }
    }
    Ok((values, hits, area))
}

/// Inputs of a moment comparison, kept with the result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentInputs {
    pub model: String,
    pub test_function: String,
    pub window: ShotWindow,
    pub p: f64,
    pub m: f64,
    pub h_norm_sum: f64,
    pub support_prob_integral: f64,
    pub reps: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub q: u32,
    pub empirical_qth: f64,
    /// Jackknife standard error of `empirical_qth`.
    pub stderr: f64,
    pub bound: f64,
    pub constant_used: f64,
    pub holds: bool,
    pub inputs: MomentInputs,
}

impl MomentReport {
    pub const CSV_HEADER: &'static str = "model,test_function,window_radius,intensity,resolution,q,p,M,h_norm_sum,support_prob_integral,reps,seed,empirical_qth,stderr,bound,constant_used,holds";

    pub fn csv_row(&self) -> String {
        let i = &self.inputs;
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            i.model,
            i.test_function,
            i.window.radius,
            i.window.intensity,
            i.window.resolution,
            self.q,
            i.p,
            i.m,
            i.h_norm_sum,
            i.support_prob_integral,
            i.reps,
            i.seed,
            self.empirical_qth,
            self.stderr,
            self.bound,
            self.constant_used,
            self.holds
        )
    }
}

/// Compares `E|I_f(h)|^q` over `reps` shot-noise realizations with the moment bound for each
/// `(q, p)` pair, using the default constant `q 2^q`.
///
/// The realizations are shared by all pairs and by the support-probability estimate.
#[allow(clippy::too_many_arguments)]
pub fn moment_check(
    model_name: &str,
    h: &TestFunction,
    pairs: &[(u32, f64)],
    window: &ShotWindow,
    quad: &QuadratureSpec,
    reps: usize,
    seed: u64,
) -> Result<Vec<MomentReport>> {
    if reps < 2 {
        return Err(invalid("moment check needs at least 2 replicates"));
    }
    let model = KernelModel::named(model_name)?;
    let (values, hits, area) = sample_primitives(&model, h, window, quad, reps, seed)?;
    let (h0, h1, _) = h.sup_norms();
    pairs
        .iter()
        .map(|&(q, p)| {
            let m = kernel_moment_bound(&model, window.intensity, p, q)?;
            let spi = prob_integral(&hits, reps, p, area);
            let constant = default_constant(q);
            let bound = moment_bound(q, p, m, h, spi, constant)?;
            let empirical_qth = empirical_moment(&values, q as f64)?;
            Ok(MomentReport {
                q,
                empirical_qth,
                stderr: jackknife_stderr(&values, q as f64)?,
                bound,
                constant_used: constant,
                holds: empirical_qth <= bound,
                inputs: MomentInputs {
                    model: model_name.to_string(),
                    test_function: h.to_string(),
                    window: *window,
                    p,
                    m,
                    h_norm_sum: h0 + h1,
                    support_prob_integral: spi,
                    reps,
                    seed,
                },
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bump() -> TestFunction {
        TestFunction::bump(0.2, 0.8).unwrap()
    }

    #[test]
    fn bound_is_zero_without_support_and_homogeneous_in_h() {
        let h = bump();
        assert_eq!(moment_bound(2, 2.0, 3.0, &h, 0.0, 8.0).unwrap(), 0.0);
        let h2 = TestFunction::scaled_bump(0.2, 0.8, 2.0).unwrap();
        for q in [1, 2, 3] {
            let a = moment_bound(q, 2.0, 3.0, &h, 1.5, 1.0).unwrap();
            let b = moment_bound(q, 2.0, 3.0, &h2, 1.5, 1.0).unwrap();
            assert!((b / a - 2f64.powi(q as i32)).abs() < 1e-12);
        }
        assert!(moment_bound(1, 1.0, 1.0, &h, 1.0, 1.0).is_err());
        assert_eq!(default_constant(2), 8.0);
    }

    #[test]
    fn empirical_moment_basics() {
        assert_eq!(empirical_moment(&[Complex64::new(0.0, 0.0); 3], 2.0).unwrap(), 0.0);
        assert_eq!(empirical_moment(&[Complex64::new(2.0, 0.0)], 2.0).unwrap(), 4.0);
        assert!(empirical_moment(&[], 1.0).is_err());
        let v = [Complex64::new(1.0, 0.0), Complex64::new(-3.0, 0.0), Complex64::new(0.0, 2.0)];
        let w = [v[2], v[0], v[1]];
        assert_eq!(empirical_moment(&v, 3.0).unwrap(), empirical_moment(&w, 3.0).unwrap());
        let s: Vec<Complex64> = v.iter().map(|x| x * -2.5).collect();
        let ratio = empirical_moment(&s, 3.0).unwrap() / empirical_moment(&v, 3.0).unwrap();
        assert!((ratio - 2.5f64.powi(3)).abs() < 1e-12);
    }

    #[test]
    fn cumulant_recursion_matches_poisson() {
        // Poisson(mu): every cumulant equals mu; E N^2 = mu + mu^2, E N^3 = mu^3 + 3 mu^2 + mu
        let mu = 1.7;
        let m = moments_from_cumulants(&[mu; 3]);
        assert!((m[2] - (mu + mu * mu)).abs() < 1e-12);
        assert!((m[3] - (mu.powi(3) + 3.0 * mu * mu + mu)).abs() < 1e-12);
    }

    #[test]
    fn abs_integrals_of_gaussian_kernel() {
        // g = exp(-|x|^2): ∫ (d_1 g)^2 = ∫ 4 x^2 exp(-2|x|^2) = pi / 2
        let k = crate::shotnoise::GrainKernel::gaussian();
        let (a, _) = kernel_abs_integrals(&k, 2);
        assert!((a - PI / 2.0).abs() < 1e-8, "{a}");
    }

    #[test]
    fn support_integral_vanishes_above_range() {
        let model = KernelModel::gaussian();
        let w = ShotWindow { radius: 1.0, intensity: 1.0, resolution: 16 };
        let h = TestFunction::bump(1e3, 1e3 + 1.0).unwrap();
        assert_eq!(support_prob_integral(&model, &h, 2.0, &w, 3, 1).unwrap(), 0.0);
        let h = bump();
        let a = support_prob_integral(&model, &h, 2.0, &w, 20, 1).unwrap();
        let b = support_prob_integral(&model, &h, 8.0, &w, 20, 1).unwrap();
        assert!(a > 0.0 && b <= a);
    }
}
