use crate::error::{Error, Result};
use crate::fields::TestFunction;
use crate::quadrature::{pairwise_sum, Rule1D};
use serde::{Deserialize, Serialize};

/// One-dimensional profiles for the up-crossing identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile1D {
    /// `max(0, 1 - |x|)` on `[-2, 2]`.
    Tent,
    /// `amplitude * exp(-x^2 / width^2)` on `[-8 width, 8 width]`.
    Gaussian { amplitude: f64, width: f64 },
    /// Two Gaussians of unit width at `±separation / 2`, which has two up-crossings at low levels.
    TwoGaussians { separation: f64 },
}

impl Profile1D {
    pub fn domain(&self) -> (f64, f64) {
        match self {
            Self::Tent => (-2.0, 2.0),
            Self::Gaussian { width, .. } => (-8.0 * width, 8.0 * width),
            Self::TwoGaussians { separation } => (-0.5 * separation - 8.0, 0.5 * separation + 8.0),
        }
    }

    /// Points where the profile is not smooth, or where it should be split for quadrature.
    fn breakpoints(&self) -> Vec<f64> {
        match self {
            Self::Tent => vec![-1.0, 0.0, 1.0],
            Self::Gaussian { .. } => vec![0.0],
            Self::TwoGaussians { separation } => vec![-0.5 * separation, 0.0, 0.5 * separation],
        }
    }

    /// `(f(x), f'(x))`.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        match self {
            Self::Tent => {
                if x.abs() >= 1.0 {
                    (0.0, 0.0)
                } else {
                    (1.0 - x.abs(), -x.signum())
                }
            }
            Self::Gaussian { amplitude, width } => {
                let e = amplitude * (-(x * x) / (width * width)).exp();
                (e, -2.0 * x / (width * width) * e)
            }
            Self::TwoGaussians { separation } => {
                let (c1, c2) = (-0.5 * separation, 0.5 * separation);
                let (e1, e2) = ((-(x - c1).powi(2)).exp(), (-(x - c2).powi(2)).exp());
                (e1 + e2, -2.0 * (x - c1) * e1 - 2.0 * (x - c2) * e2)
            }
        }
    }

    /// Exact up-crossing count of level `u` for the tent, which is 1 on `(0, 1)`.
    fn exact_upcrossings(&self, u: f64) -> Option<usize> {
        match self {
            Self::Tent => Some(usize::from(u > 0.0 && u < 1.0)),
            _ => None,
        }
    }
}

const PANELS: usize = 512;
const ORDER: usize = 8;

fn panel_edges(profile: &Profile1D) -> Vec<f64> {
    let (lo, hi) = profile.domain();
    let mut cuts = vec![lo];
    cuts.extend(profile.breakpoints());
    cuts.push(hi);
    let mut edges = vec![lo];
    for w in cuts.windows(2) {
        for k in 1..=PANELS {
            edges.push(w[0] + (w[1] - w[0]) * k as f64 / PANELS as f64);
        }
    }
    edges
}

/// Up-crossings of level `u`: sign changes from below to at-or-above along a fine sample of the
/// profile that includes its breakpoints.
fn upcrossings(profile: &Profile1D, edges: &[f64], u: f64) -> usize {
    if let Some(n) = profile.exact_upcrossings(u) {
        return n;
    }
    let mut n = 0;
    let mut prev = profile.eval(edges[0]).0;
    for &x in &edges[1..] {
        let v = profile.eval(x).0;
        if prev < u && v >= u {
            n += 1;
        }
        prev = v;
    }
    n
}

/// `(∫ h(u) N+(u) du, ∫ h(f(x)) |f'(x)| dx)` for a real test function supported in `(0, inf)`.
///
/// Each level is crossed once going up and once going down, so the second integral is twice the first.
pub fn kac_rice_1d(profile: &Profile1D, h: &TestFunction, level_count: usize) -> Result<(f64, f64)> {
    let (a, b) = super::check_positive_support(h)?;
    let (lo, hi) = profile.domain();
    for x in [lo, hi] {
        if profile.eval(x).0 >= a {
            return Err(Error::BoundaryCondition(format!(
                "profile at {x} is {} which reaches the support of h",
                profile.eval(x).0
            )));
        }
    }
    let edges = panel_edges(profile);
    let levels = Rule1D::uniform(a, b, level_count.max(1), ORDER);
    let lhs_terms: Vec<f64> = levels
        .nodes
        .iter()
        .zip(&levels.weights)
        .map(|(&u, &w)| w * h.eval(u).re * upcrossings(profile, &edges, u) as f64)
        .collect();
    let space = Rule1D::composite(&edges, ORDER);
    let rhs_terms: Vec<f64> = space
        .nodes
        .iter()
        .zip(&space.weights)
        .map(|(&x, &w)| {
            let (f, df) = profile.eval(x);
            w * h.eval(f).re * df.abs()
        })
        .collect();
    Ok((pairwise_sum(&lhs_terms), pairwise_sum(&rhs_terms)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tent_is_exact() {
        let h = TestFunction::bump(0.1, 0.9).unwrap();
        let (lhs, rhs) = kac_rice_1d(&Profile1D::Tent, &h, 128).unwrap();
        assert!((rhs - 2.0 * lhs).abs() < 1e-12 * rhs, "{lhs} {rhs}");
    }

    #[test]
    fn two_humps_cross_twice() {
        let p = Profile1D::TwoGaussians { separation: 4.0 };
        let edges = panel_edges(&p);
        assert_eq!(upcrossings(&p, &edges, 0.5), 2);
        assert_eq!(upcrossings(&p, &edges, 1.5), 0);
    }

    #[test]
    fn boundary_violation_is_reported() {
        let h = TestFunction::bump(1e-30, 0.5).unwrap();
        assert!(matches!(
            kac_rice_1d(&Profile1D::Gaussian { amplitude: 1.0, width: 1.0 }, &h, 64),
            Err(Error::BoundaryCondition(_))
        ));
    }
}
