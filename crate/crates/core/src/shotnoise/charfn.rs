use super::KernelModel;
use crate::error::{invalid, Result};
use crate::geometry::Point;
use crate::quadrature::{gauss_legendre, Rule1D};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Polar quadrature over the plane for integrals of functionals of one grain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CfQuadrature {
    /// Width of the composite Gauss–Legendre panels in the radius.
    pub radial_panel: f64,
    pub radial_order: usize,
    /// Trapezoid nodes in the angle.
    pub angular_nodes: usize,
    /// Gauss–Legendre nodes for the amplitude law.
    pub amplitude_nodes: usize,
}

impl Default for CfQuadrature {
    fn default() -> Self {
        Self { radial_panel: 0.125, radial_order: 8, angular_nodes: 64, amplitude_nodes: 8 }
    }
}

impl CfQuadrature {
    pub fn refined(&self) -> Self {
        Self {
            radial_panel: 0.5 * self.radial_panel,
            radial_order: self.radial_order,
            angular_nodes: 2 * self.angular_nodes,
            amplitude_nodes: 2 * self.amplitude_nodes,
        }
    }
}

/// One quadrature node of `E ∫ F(M g(x)) dx`, carrying `M` times the grain jet.
#[derive(Debug, Clone, Copy)]
struct Node {
    w: f64,
    v: f64,
    g1: f64,
    g2: f64,
    g11: f64,
    g22: f64,
}

/// Joint characteristic functions of the shot-noise value, gradient and one second derivative
/// at a point:
///
/// `psi_1(t, s, v) = E exp(i (t f + s1 d1 f + s2 d2 f + v d11 f))`,
/// `psi_2(t, s, v) = E exp(i (t f + s1 d2 f + s2 d1 f + v d22 f))`,
///
/// both equal to `exp(lambda E ∫ (e^{i(...)} - 1) dx)` with the grain in place of `f`.
#[derive(Debug, Clone)]
pub struct CharacteristicFunction {
    intensity: f64,
    nodes: Vec<Node>,
}

impl CharacteristicFunction {
    pub fn new(model: &KernelModel, intensity: f64, quad: &CfQuadrature) -> Result<Self> {
        if !(intensity > 0.0) || quad.angular_nodes < 4 || quad.radial_order == 0 || !(quad.radial_panel > 0.0) {
            return Err(invalid("characteristic function needs positive intensity and a non-trivial quadrature"));
        }
        let ang = quad.angular_nodes;
        let dtheta = std::f64::consts::TAU / ang as f64;
        let amps = model.amplitude.quadrature(quad.amplitude_nodes);
        let mut nodes = Vec::new();
        for (p, kernel) in &model.components {
            let t = kernel.truncation_radius;
            let panels = (t / quad.radial_panel).ceil() as usize;
            let radial = Rule1D::uniform(0.0, t, panels, quad.radial_order);
            for (&rho, &wr) in radial.nodes.iter().zip(&radial.weights) {
                for k in 0..ang {
                    let theta = (k as f64 + 0.5) * dtheta;
                    let j = kernel.jet(Point::new(rho * theta.cos(), rho * theta.sin()));
                    for &(m, wm) in &amps {
                        nodes.push(Node {
                            w: p * wm * wr * rho * dtheta,
                            v: m * j.value,
                            g1: m * j.grad[0],
                            g2: m * j.grad[1],
                            g11: m * j.hess.xx,
                            g22: m * j.hess.yy,
                        });
                    }
                }
            }
        }
        Ok(Self { intensity, nodes })
    }

    /// `(first gradient partner, second gradient partner, second derivative)` for variant `i`.
    fn pairing(i: usize, n: &Node) -> (f64, f64, f64) {
        if i == 1 {
            (n.g1, n.g2, n.g11)
        } else {
            (n.g2, n.g1, n.g22)
        }
    }

    fn check_variant(i: usize) -> Result<()> {
        if i == 1 || i == 2 {
            Ok(())
        } else {
            Err(invalid(format!("characteristic function variant must be 1 or 2, got {i}")))
        }
    }

    /// `log psi_i(t, s, v)`.
    pub fn log_psi(&self, i: usize, t: f64, s: [f64; 2], v: f64) -> Result<Complex64> {
        Self::check_variant(i)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for n in &self.nodes {
            let (a1, a2, b) = Self::pairing(i, n);
            let phase = t * n.v + s[0] * a1 + s[1] * a2 + v * b;
            acc += n.w * (Complex64::new(0.0, phase).exp() - 1.0);
        }
        Ok(self.intensity * acc)
    }

    pub fn psi(&self, i: usize, t: f64, s: [f64; 2], v: f64) -> Result<Complex64> {
        Ok(self.log_psi(i, t, s, v)?.exp())
    }

    /// `d psi_i / dv` at `v = 0`: `i psi_i(t, s, 0) lambda E ∫ d_ii g e^{i(t g + s . grad g)} dx`.
    pub fn d4_psi(&self, i: usize, t: f64, s: [f64; 2]) -> Result<Complex64> {
        Self::check_variant(i)?;
        let mut log = Complex64::new(0.0, 0.0);
        let mut k = Complex64::new(0.0, 0.0);
        for n in &self.nodes {
            let (a1, a2, b) = Self::pairing(i, n);
            let e = Complex64::new(0.0, t * n.v + s[0] * a1 + s[1] * a2).exp();
            log += n.w * (e - 1.0);
            k += n.w * b * e;
        }
        let lam = self.intensity;
        Ok(Complex64::i() * (lam * log).exp() * lam * k)
    }

    /// `d^2 psi_i / ds1^2` at `s = 0, v = 0`:
    /// `-psi(t) [(lambda E ∫ a e^{itg})^2 + lambda E ∫ a^2 e^{itg}]`, where `a` is the gradient
    /// component paired with `s1`.
    pub fn d22_psi(&self, i: usize, t: f64) -> Result<Complex64> {
        Self::check_variant(i)?;
        let mut log = Complex64::new(0.0, 0.0);
        let mut first = Complex64::new(0.0, 0.0);
        let mut second = Complex64::new(0.0, 0.0);
        for n in &self.nodes {
            let (a, _, _) = Self::pairing(i, n);
            let e = Complex64::new(0.0, t * n.v).exp();
            log += n.w * (e - 1.0);
            first += n.w * a * e;
            second += n.w * a * a * e;
        }
        let lam = self.intensity;
        Ok(-(lam * log).exp() * (lam * lam * first * first + lam * second))
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }
}

/// `psi_i(t, s, v)` with the default quadrature.
pub fn psi(i: usize, t: f64, s: [f64; 2], v: f64, model: &KernelModel, intensity: f64) -> Result<Complex64> {
    CharacteristicFunction::new(model, intensity, &CfQuadrature::default())?.psi(i, t, s, v)
}

/// `log psi(t, 0, 0)` for Gaussian grains from the one-dimensional reduction
/// `lambda pi E_M ∫_0^1 (e^{i t M u} - 1) / u du`.
pub fn gaussian_log_cf_1d(t: f64, model: &KernelModel, intensity: f64) -> Complex64 {
    let rule = Rule1D::uniform(0.0, 1.0, 32, 10);
    let (mx, mw) = gauss_legendre(16);
    let (lo, hi) = match model.amplitude {
        super::AmplitudeLaw::Constant { value } => (value, value),
        super::AmplitudeLaw::Uniform { lo, hi } => (lo, hi),
    };
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, w) in mx.iter().zip(&mw) {
        let m = 0.5 * (lo + hi) + 0.5 * (hi - lo) * x;
        let inner: Complex64 = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&u, &wu)| wu * (Complex64::new(0.0, t * m * u).exp() - 1.0) / u)
            .sum();
        acc += 0.5 * w * inner;
    }
    intensity * std::f64::consts::PI * acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cf() -> CharacteristicFunction {
        CharacteristicFunction::new(&KernelModel::gaussian(), 1.0, &CfQuadrature::default()).unwrap()
    }

    #[test]
    fn value_cf_matches_one_dimensional_reduction() {
        let c = cf();
        for t in [0.5, 1.0, 2.0, -1.3] {
            let a = c.log_psi(1, t, [0.0, 0.0], 0.0).unwrap();
            let b = gaussian_log_cf_1d(t, &KernelModel::gaussian(), 1.0);
            assert!((a - b).norm() < 1e-9, "t={t}: {a} vs {b}");
        }
        assert_eq!(c.psi(1, 0.0, [0.0, 0.0], 0.0).unwrap(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn derivatives_match_central_differences() {
        let c = cf();
        for (t, s) in [(1.0, [0.3, -0.2]), (0.5, [0.0, 0.0]), (2.0, [-0.4, 0.7])] {
            for i in [1, 2] {
                let d = 1e-4;
                let fd = (c.psi(i, t, s, d).unwrap() - c.psi(i, t, s, -d).unwrap()) / (2.0 * d);
                let an = c.d4_psi(i, t, s).unwrap();
                assert!((fd - an).norm() <= 1e-3 * an.norm().max(1e-12), "i={i} t={t}: {fd} vs {an}");
            }
        }
        for i in [1, 2] {
            let t = 1.0;
            let d = 1e-3;
            let p = |x: f64| c.psi(i, t, [x, 0.0], 0.0).unwrap();
            let fd = (p(d) - 2.0 * p(0.0) + p(-d)) / (d * d);
            let an = c.d22_psi(i, t).unwrap();
            assert!((fd - an).norm() <= 1e-3 * an.norm(), "{fd} vs {an}");
        }
    }

    #[test]
    fn symmetries() {
        let c = cf();
        let a = c.d4_psi(1, 0.7, [0.2, 0.5]).unwrap();
        let b = c.d4_psi(1, -0.7, [-0.2, -0.5]).unwrap();
        // d4 psi(-t, -s) = -conj(d4 psi(t, s)): the factor i flips under conjugation
        assert!((a + b.conj()).norm() < 1e-12);
        // radial grains: both variants coincide
        let p1 = c.psi(1, 1.0, [0.3, 0.1], 0.2).unwrap();
        let p2 = c.psi(2, 1.0, [0.3, 0.1], 0.2).unwrap();
        assert!((p1 - p2).norm() < 1e-10);
        // the plane integral of d11 g vanishes
        assert!(c.d4_psi(1, 0.0, [0.0, 0.0]).unwrap().norm() < 1e-10);
        // t = 0: d22 psi = -lambda E ∫ d1 g^2, real and negative
        let d = c.d22_psi(1, 0.0).unwrap();
        assert!(d.re < 0.0 && d.im.abs() < 1e-15);
    }
}
