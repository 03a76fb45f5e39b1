use crate::fields::{Jet2, TestFunction};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Treatment of gradients lying exactly on the boundary of a quarter-plane cone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TieRule {
    /// Indicators are strict: boundary gradients get weight 0.
    Strict,
    /// Boundary gradients get weight 1/2 per tied inequality, and a vanishing gradient gets the
    /// angular share 1/8. Sample points on symmetry lines then contribute their average.
    Half,
}

fn step(lower: f64, upper: f64, tie: TieRule) -> f64 {
    if lower < upper {
        1.0
    } else if lower == upper && tie == TieRule::Half {
        0.5
    } else {
        0.0
    }
}

/// Weights of the cones `Q1 = {d2 < d1 < 0}` and `Q2 = {d1 < d2 < 0}` at gradient `g`.
pub fn quarter_weights(g: [f64; 2], tie: TieRule) -> [f64; 2] {
    if tie == TieRule::Half && g == [0.0, 0.0] {
        return [0.125, 0.125];
    }
    [step(g[1], g[0], tie) * step(g[0], 0.0, tie), step(g[0], g[1], tie) * step(g[1], 0.0, tie)]
}

/// Local density `sum_i 1{grad f in Q_i} (d_i f^2 h'(f) + d_ii f h(f))`.
///
/// The Euler integral is `I_f(h) = -∫ gamma`.
pub fn gamma_density(jet: &Jet2, h: &TestFunction, tie: TieRule) -> Complex64 {
    let w = quarter_weights(jet.grad, tie);
    if w == [0.0, 0.0] {
        return Complex64::new(0.0, 0.0);
    }
    let (hv, hd) = h.eval_with_derivative(jet.value);
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, &wi) in w.iter().enumerate() {
        if wi != 0.0 {
            acc += wi * (jet.grad[i] * jet.grad[i] * hd + jet.d2(i) * hv);
        }
    }
    acc
}

/// Rotation-averaged density `-(1/4) sum_i 1{|d_i' f| > |d_i f|} (d_i f^2 h'(f) + d_ii f h(f))`,
/// with `i'` the other axis. Integrates to `I_f(h)` directly (no sign flip).
pub fn rotavg_density(jet: &Jet2, h: &TestFunction, tie: TieRule) -> Complex64 {
    let a = [jet.grad[0].abs(), jet.grad[1].abs()];
    let w = [step(a[0], a[1], tie), step(a[1], a[0], tie)];
    if w == [0.0, 0.0] {
        return Complex64::new(0.0, 0.0);
    }
    let (hv, hd) = h.eval_with_derivative(jet.value);
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, &wi) in w.iter().enumerate() {
        if wi != 0.0 {
            acc += wi * (jet.grad[i] * jet.grad[i] * hd + jet.d2(i) * hv);
        }
    }
    -0.25 * acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SymMat2;

    #[test]
    fn cones_partition_the_lower_left_octants() {
        assert_eq!(quarter_weights([-1.0, -2.0], TieRule::Strict), [1.0, 0.0]);
        assert_eq!(quarter_weights([-2.0, -1.0], TieRule::Strict), [0.0, 1.0]);
        assert_eq!(quarter_weights([1.0, -2.0], TieRule::Strict), [0.0, 0.0]);
        assert_eq!(quarter_weights([-1.0, -1.0], TieRule::Strict), [0.0, 0.0]);
        assert_eq!(quarter_weights([-1.0, -1.0], TieRule::Half), [0.5, 0.5]);
        assert_eq!(quarter_weights([0.0, -1.0], TieRule::Half), [0.5, 0.0]);
        assert_eq!(quarter_weights([0.0, 0.0], TieRule::Half), [0.125, 0.125]);
    }

    #[test]
    fn density_outside_cones_vanishes() {
        let h = TestFunction::bump(0.2, 0.8).unwrap();
        let j = Jet2::new(0.5, [0.3, -1.0], SymMat2::new(1.0, 0.0, 1.0));
        assert_eq!(gamma_density(&j, &h, TieRule::Strict), Complex64::new(0.0, 0.0));
        let j = Jet2::new(0.5, [-0.3, -1.0], SymMat2::new(2.0, 0.0, 3.0));
        let (hv, hd) = h.eval_with_derivative(0.5);
        assert!((gamma_density(&j, &h, TieRule::Strict) - (0.09 * hd + 2.0 * hv)).norm() < 1e-15);
    }
}
