use super::KernelModel;
use crate::error::{invalid, Error, Result};
use crate::quadrature::Rule1D;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Discretisation of the radial integrals behind the Bessel reduction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesselQuadrature {
    pub radial_panel: f64,
    pub radial_order: usize,
    pub amplitude_nodes: usize,
    /// Spacing of the tabulation in `|s|`.
    pub table_step: f64,
}

impl Default for BesselQuadrature {
    fn default() -> Self {
        Self { radial_panel: 0.1, radial_order: 8, amplitude_nodes: 24, table_step: 0.05 }
    }
}

/// Truncation of the improper double integral over `(0, inf)^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImproperSpec {
    pub eps0: f64,
    pub s_max: f64,
    /// Log-spaced nodes per axis.
    pub nodes: usize,
}

impl Default for ImproperSpec {
    fn default() -> Self {
        Self { eps0: 1e-3, s_max: 50.0, nodes: 200 }
    }
}

/// Radial functions of `rho = |s|` from which `psi(t, s)` and `d4 psi(t, s)` follow for radial
/// grains: `psi = exp(L)`, `d4 psi_1 = i psi (a - b cos 2 alpha)` with `alpha` the angle of `s`.
#[derive(Debug, Clone)]
pub struct RadialCfTable {
    step: f64,
    log_psi: Vec<Complex64>,
    a: Vec<Complex64>,
    b: Vec<Complex64>,
}

struct RadialNode {
    w: f64,
    r: f64,
    m: f64,
    phi: f64,
    dphi: f64,
    d2phi: f64,
}

fn radial_nodes(model: &KernelModel, quad: &BesselQuadrature) -> Vec<RadialNode> {
    let amps = model.amplitude.quadrature(quad.amplitude_nodes);
    let mut nodes = Vec::new();
    for (p, kernel) in &model.components {
        let t = kernel.truncation_radius;
        let rule = Rule1D::uniform(0.0, t, (t / quad.radial_panel).ceil() as usize, quad.radial_order);
        for (&r, &wr) in rule.nodes.iter().zip(&rule.weights) {
            let (phi, dphi, d2phi) = kernel.shape.profile(r * r);
            for &(m, wm) in &amps {
                nodes.push(RadialNode { w: p * wm * wr, r, m, phi, dphi, d2phi });
            }
        }
    }
    nodes
}

fn bessel_j2(x: f64) -> f64 {
    libm::jn(2, x)
}

impl RadialCfTable {
    /// Tabulates on `[0, rho_max]`.
    pub fn new(t: f64, model: &KernelModel, intensity: f64, quad: &BesselQuadrature, rho_max: f64) -> Result<Self> {
        if !model.is_isotropic() {
            return Err(invalid("the Bessel reduction needs an isotropic model"));
        }
        let nodes = radial_nodes(model, quad);
        let phases: Vec<Complex64> = nodes.iter().map(|n| Complex64::new(0.0, t * n.m * n.phi).exp()).collect();
        let count = (rho_max / quad.table_step).ceil() as usize + 3;
        let mut log_psi = Vec::with_capacity(count);
        let mut a = Vec::with_capacity(count);
        let mut b = Vec::with_capacity(count);
        for k in 0..count {
            let rho = k as f64 * quad.table_step;
            let (mut l, mut aa, mut bb) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
            for (n, e) in nodes.iter().zip(&phases) {
                let arg = 2.0 * n.m * n.dphi.abs() * n.r * rho;
                let j0 = libm::j0(arg);
                let j2 = bessel_j2(arg);
                l += n.w * 2.0 * PI * n.r * (e * j0 - 1.0);
                aa += n.w * n.r * n.m * PI * j0 * (4.0 * n.dphi + 4.0 * n.r * n.r * n.d2phi) * e;
                bb += n.w * n.r * n.m * 4.0 * PI * n.r * n.r * n.d2phi * j2 * e;
            }
            log_psi.push(intensity * l);
            a.push(intensity * aa);
            b.push(intensity * bb);
        }
        Ok(Self { step: quad.table_step, log_psi, a, b })
    }

    pub fn rho_max(&self) -> f64 {
        (self.log_psi.len() - 3) as f64 * self.step
    }

    fn interp(values: &[Complex64], x: f64) -> Complex64 {
        // cubic Lagrange through the four nearest nodes
        let k = (x.floor() as usize).clamp(1, values.len() - 3);
        let u = x - k as f64;
        let (p0, p1, p2, p3) = (values[k - 1], values[k], values[k + 1], values[k + 2]);
        let w0 = -u * (u - 1.0) * (u - 2.0) / 6.0;
        let w1 = (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0;
        let w2 = -(u + 1.0) * u * (u - 2.0) / 2.0;
        let w3 = (u + 1.0) * u * (u - 1.0) / 6.0;
        p0 * w0 + p1 * w1 + p2 * w2 + p3 * w3
    }

    /// `(log psi, a, b)` at `rho`; the functions are even in `rho`.
    pub fn at(&self, rho: f64) -> (Complex64, Complex64, Complex64) {
        let x = rho.abs() / self.step;
        if x < 1.0 {
            // mirror through rho = 0 using evenness
            let mirrored = |v: &[Complex64]| {
                let ext = [v[1], v[0], v[1], v[2]];
                let u = x;
                let w0 = -u * (u - 1.0) * (u - 2.0) / 6.0;
                let w1 = (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0;
                let w2 = -(u + 1.0) * u * (u - 2.0) / 2.0;
                let w3 = (u + 1.0) * u * (u - 1.0) / 6.0;
                ext[0] * w0 + ext[1] * w1 + ext[2] * w2 + ext[3] * w3
            };
            return (mirrored(&self.log_psi), mirrored(&self.a), mirrored(&self.b));
        }
        (Self::interp(&self.log_psi, x), Self::interp(&self.a, x), Self::interp(&self.b, x))
    }

    /// `d psi_1 / dv` at `(t, s, 0)`.
    pub fn d4_psi(&self, s: [f64; 2]) -> Complex64 {
        let rho2 = s[0] * s[0] + s[1] * s[1];
        let rho = rho2.sqrt();
        let (l, a, b) = self.at(rho);
        let cos2 = if rho2 > 0.0 { (s[0] * s[0] - s[1] * s[1]) / rho2 } else { 0.0 };
        Complex64::i() * l.exp() * (a - b * cos2)
    }
}

/// Closed-form expected density of the Euler integral at one point, with its parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationaryDensity {
    pub value: Complex64,
    pub error: f64,
    /// `sum_i i t (pi - 2) / (8 pi) d22 psi_i(t, 0)`.
    pub gradient_term: Complex64,
    /// `-sum_i d4 psi_i(t, 0, 0, 0) / (4 i)`.
    pub curvature_term: Complex64,
    /// `-sum_i (i / (2 pi^2)) ∫∫ D_i(s1, s2) / (s1 s2)`.
    pub integral_term: Complex64,
}

fn double_integral(table: &RadialCfTable, spec: &ImproperSpec) -> Complex64 {
    let (lo, hi) = (spec.eps0.ln(), spec.s_max.ln());
    let n = spec.nodes;
    let dx = (hi - lo) / (n - 1) as f64;
    let xs: Vec<f64> = (0..n).map(|k| (lo + k as f64 * dx).exp()).collect();
    let trap = |k: usize| if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, &s1) in xs.iter().enumerate() {
        let mut row = Complex64::new(0.0, 0.0);
        for (j, &s2) in xs.iter().enumerate() {
            // ds1 ds2 / (s1 s2) is the area element of the log grid
            let d = table.d4_psi([s1 - s2, s2]) - table.d4_psi([s1 + s2, -s2]);
            row += trap(j) * d;
        }
        acc += trap(i) * row;
    }
    acc * dx * dx
}

/// `E[-sum_i 1{grad f(0) in Q_i} (i t d_i f(0)^2 + d_ii f(0)) e^{i t f(0)}]` for an isotropic
/// shot noise, from the characteristic functions.
///
/// The indicator of each cone is written through sign functions; the sign-sign product becomes
/// the improper double integral over `s`, evaluated on a log-spaced grid. For radial grains the
/// two cone terms are equal. The error bar is the change when the grid is refined and the
/// truncation `[eps0, s_max]` widened by a factor 2 at both ends.
pub fn stationary_limit_density(
    t: f64,
    model: &KernelModel,
    intensity: f64,
    quad: &BesselQuadrature,
    improper: &ImproperSpec,
) -> Result<StationaryDensity> {
    if !(improper.eps0 > 0.0 && improper.s_max > improper.eps0 && improper.nodes >= 8) {
        return Err(invalid("improper integral needs 0 < eps0 < s_max and at least 8 nodes"));
    }
    let wide = ImproperSpec { eps0: 0.5 * improper.eps0, s_max: 2.0 * improper.s_max, nodes: 2 * improper.nodes };
    let table = RadialCfTable::new(t, model, intensity, quad, 5f64.sqrt() * wide.s_max)?;

    let nodes = radial_nodes(model, quad);
    let mut grad_sq = Complex64::new(0.0, 0.0);
    for n in &nodes {
        let e = Complex64::new(0.0, t * n.m * n.phi).exp();
        // |grad g|^2 = 4 r^2 phi'^2, integrated over the circle of radius r
        grad_sq += n.w * 2.0 * PI * n.r * 4.0 * n.r * n.r * n.m * n.m * n.dphi * n.dphi * e;
    }
    let (l0, a0, _) = table.at(0.0);
    let psi0 = l0.exp();
    // each variant: d22 psi_i(t, 0) = -psi(t) lambda E ∫ (d_i g)^2 e^{itg} = -psi(t) lambda E ∫ |grad g|^2 e^{itg} / 2
    let d22 = -psi0 * intensity * grad_sq * 0.5;
    let it = Complex64::new(0.0, t);
    let gradient_term = 2.0 * it * (PI - 2.0) / (8.0 * PI) * d22;
    let d4_origin = Complex64::i() * psi0 * a0;
    let curvature_term = -2.0 * d4_origin / (4.0 * Complex64::i());

    let coarse = double_integral(&table, improper);
    let fine = double_integral(&table, &wide);
    let factor = -2.0 * Complex64::i() / (2.0 * PI * PI);
    let integral_term = factor * coarse;
    let error = (factor * (fine - coarse)).norm();
    let value = gradient_term + curvature_term + integral_term;
    if error > 0.05 * value.norm().max(1.0) {
        return Err(Error::NotConverged { what: "stationary double integral", change: error, limit: 0.05 });
    }
    Ok(StationaryDensity { value, error, gradient_term, curvature_term, integral_term })
}
