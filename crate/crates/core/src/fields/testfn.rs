use crate::error::{invalid, Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Test function `h` of the level variable.
///
/// Bumps are real and compactly supported; Fourier modes `e^{itu}` are bounded with bounded
/// derivatives. Everything evaluates to `Complex64` so both kinds share one code path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TestFunction {
    /// `scale * exp(-1 / (1 - tau^2))` with `tau = (2u - a - b) / (b - a)`, supported on `(a, b)`.
    Bump { a: f64, b: f64, scale: f64 },
    /// `exp(i t u)`.
    Fourier { t: f64 },
    /// `sum_k c_k h_k`.
    Combination(Vec<(f64, TestFunction)>),
}

/// Derivatives of `phi(tau) = exp(-1 / (1 - tau^2))` up to order two.
fn phi(tau: f64) -> (f64, f64, f64) {
    let q = 1.0 - tau * tau;
    if q <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    let v = (-1.0 / q).exp();
    if v == 0.0 {
        return (0.0, 0.0, 0.0);
    }
    let d1 = v * (-2.0 * tau / (q * q));
    let t2 = tau * tau;
    let d2 = v * (6.0 * t2 * t2 - 2.0) / (q * q * q * q);
    (v, d1, d2)
}

fn phi_d2_sup() -> f64 {
    // |phi''| is even in tau; scan then refine the maximiser by golden section
    let f = |t: f64| phi(t).2.abs();
    let n = 20_000;
    let mut best = (0.0, f(0.0));
    for k in 0..n {
        let t = k as f64 / n as f64;
        let v = f(t);
        if v > best.1 {
            best = (t, v);
        }
    }
    let (mut lo, mut hi) = ((best.0 - 1.0 / n as f64).max(0.0), (best.0 + 1.0 / n as f64).min(1.0));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..100 {
        let m1 = hi - g * (hi - lo);
        let m2 = lo + g * (hi - lo);
        if f(m1) > f(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    f(0.5 * (lo + hi)).max(best.1)
}

impl TestFunction {
    pub fn bump(a: f64, b: f64) -> Result<Self> {
        Self::scaled_bump(a, b, 1.0)
    }

    pub fn scaled_bump(a: f64, b: f64, scale: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(invalid(format!("bump support needs a < b, got ({a}, {b})")));
        }
        Ok(Self::Bump { a, b, scale })
    }

    pub fn fourier(t: f64) -> Self {
        Self::Fourier { t }
    }

    /// `(h(u), h'(u), h''(u))`.
    pub fn eval_all(&self, u: f64) -> (Complex64, Complex64, Complex64) {
        match self {
            Self::Bump { a, b, scale } => {
                let k = 2.0 / (b - a);
                let (v, d1, d2) = phi((2.0 * u - a - b) / (b - a));
                (
                    Complex64::new(scale * v, 0.0),
                    Complex64::new(scale * k * d1, 0.0),
                    Complex64::new(scale * k * k * d2, 0.0),
                )
            }
            Self::Fourier { t } => {
                let e = Complex64::new(0.0, t * u).exp();
                let it = Complex64::new(0.0, *t);
                (e, it * e, it * it * e)
            }
            Self::Combination(terms) => {
                let zero = Complex64::new(0.0, 0.0);
                terms.iter().fold((zero, zero, zero), |acc, (c, h)| {
                    let (v, d1, d2) = h.eval_all(u);
                    (acc.0 + c * v, acc.1 + c * d1, acc.2 + c * d2)
                })
            }
        }
    }

    pub fn eval(&self, u: f64) -> Complex64 {
        match self {
            Self::Bump { a, b, scale } => Complex64::new(scale * phi((2.0 * u - a - b) / (b - a)).0, 0.0),
            _ => self.eval_all(u).0,
        }
    }

    /// `(h(u), h'(u))`.
    pub fn eval_with_derivative(&self, u: f64) -> (Complex64, Complex64) {
        let (v, d, _) = self.eval_all(u);
        (v, d)
    }

    /// Closed support interval, or `None` when the function is not compactly supported.
    pub fn support(&self) -> Option<(f64, f64)> {
        match self {
            Self::Bump { a, b, .. } => Some((*a, *b)),
            Self::Fourier { .. } => None,
            Self::Combination(terms) => terms.iter().try_fold((f64::INFINITY, f64::NEG_INFINITY), |acc, (_, h)| {
                h.support().map(|(a, b)| (acc.0.min(a), acc.1.max(b)))
            }),
        }
    }

    /// `(sup|h|, sup|h'|, sup|h''|)`, exact or an upper bound for combinations.
    pub fn sup_norms(&self) -> (f64, f64, f64) {
        match self {
            Self::Bump { a, b, scale } => {
                let k = 2.0 / (b - a);
                let s = scale.abs();
                let t1 = 3f64.powf(-0.25);
                (s * (-1.0f64).exp(), s * k * phi(t1).1.abs(), s * k * k * phi_d2_sup())
            }
            Self::Fourier { t } => (1.0, t.abs(), t * t),
            Self::Combination(terms) => terms.iter().fold((0.0, 0.0, 0.0), |acc, (c, h)| {
                let n = h.sup_norms();
                (acc.0 + c.abs() * n.0, acc.1 + c.abs() * n.1, acc.2 + c.abs() * n.2)
            }),
        }
    }

    /// `max(|h|, |h'|, |h''|)` sup norms.
    pub fn n2(&self) -> f64 {
        let (a, b, c) = self.sup_norms();
        a.max(b).max(c)
    }

    pub fn is_real(&self) -> bool {
        match self {
            Self::Bump { .. } => true,
            Self::Fourier { t } => *t == 0.0,
            Self::Combination(terms) => terms.iter().all(|(_, h)| h.is_real()),
        }
    }

    /// Parses `bump:a:b`, `bump:a:b:scale` or `fourier:t`.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.trim().split(':').collect();
        let num = |s: &str| -> Result<f64> {
            s.parse().map_err(|_| Error::Parse(format!("bad number `{s}` in test function `{text}`")))
        };
        match parts.as_slice() {
            ["bump", a, b] => Self::bump(num(a)?, num(b)?),
            ["bump", a, b, s] => Self::scaled_bump(num(a)?, num(b)?, num(s)?),
            ["fourier", t] => Ok(Self::fourier(num(t)?)),
            _ => Err(Error::Parse(format!(
                "test function `{text}` is not of the form bump:a:b[:scale] or fourier:t"
            ))),
        }
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Bump { a, b, scale } if *scale == 1.0 => write!(f, "bump:{a}:{b}"),
            Self::Bump { a, b, scale } => write!(f, "bump:{a}:{b}:{scale}"),
            Self::Fourier { t } => write!(f, "fourier:{t}"),
            Self::Combination(terms) => {
                for (k, (c, h)) in terms.iter().enumerate() {
                    if k > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "{c}*{h}")?;
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_derivatives_match_finite_differences() {
        let h = TestFunction::bump(0.2, 0.8).unwrap();
        for k in 1..60 {
            let u = 0.2 + 0.6 * k as f64 / 60.0;
            let (_, d1, d2) = h.eval_all(u);
            let e = 1e-5;
            let fd1 = (h.eval(u + e).re - h.eval(u - e).re) / (2.0 * e);
            let fd2 = (h.eval_all(u + e).1.re - h.eval_all(u - e).1.re) / (2.0 * e);
            assert!((d1.re - fd1).abs() < 1e-6 * (1.0 + fd1.abs()), "u={u}");
            assert!((d2.re - fd2).abs() < 1e-5 * (1.0 + fd2.abs()), "u={u}");
        }
        assert_eq!(h.eval(0.2).re, 0.0);
        assert_eq!(h.eval(0.9).re, 0.0);
    }

    #[test]
    fn sup_norms_dominate_samples() {
        let h = TestFunction::bump(0.1, 0.5).unwrap();
        let (s0, s1, s2) = h.sup_norms();
        let mut m = (0.0f64, 0.0f64, 0.0f64);
        for k in 0..200_001 {
            let u = 0.1 + 0.4 * k as f64 / 200_000.0;
            let (v, d1, d2) = h.eval_all(u);
            m = (m.0.max(v.re.abs()), m.1.max(d1.re.abs()), m.2.max(d2.re.abs()));
        }
        for (s, sample) in [(s0, m.0), (s1, m.1), (s2, m.2)] {
            assert!(s >= sample * (1.0 - 1e-12) && s <= sample * (1.0 + 1e-6), "{s} vs {sample}");
        }
    }

    #[test]
    fn fourier_derivative_is_it_times_value() {
        let h = TestFunction::fourier(1.7);
        let (v, d, _) = h.eval_all(0.3);
        assert!((d - Complex64::new(0.0, 1.7) * v).norm() < 1e-15);
        assert_eq!(h.support(), None);
        assert!((h.n2() - 1.7 * 1.7).abs() < 1e-15);
    }

    #[test]
    fn parse_round_trip() {
        for s in ["bump:0.2:0.8", "bump:0.1:0.5:2", "fourier:-1.5"] {
            assert_eq!(TestFunction::parse(s).unwrap().to_string(), s);
        }
        assert!(TestFunction::parse("bump:0.8:0.2").is_err());
        assert!(TestFunction::parse("gauss:1").is_err());
    }
}
