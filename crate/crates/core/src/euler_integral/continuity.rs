use super::{gamma_density, integration_domain, QuadratureSpec, TieRule};
use crate::error::Result;
use crate::fields::{Field, Jet2, SumField, TestFunction};
use crate::geometry::Point;
use crate::seed::derive_seed;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Pointwise change of one cone term of the density under `f -> f + g`, with its bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapBound {
    pub actual: f64,
    pub bound: f64,
}

/// `max_u 1{|d_u f| <= |d_u g|}` over the axes and the two diagonals.
pub fn delta_x(jf: &Jet2, jg: &Jet2) -> f64 {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let dirs = [[1.0, 0.0], [0.0, 1.0], [r, r], [r, -r]];
    let hit = dirs.iter().any(|d| {
        let df = d[0] * jf.grad[0] + d[1] * jf.grad[1];
        let dg = d[0] * jg.grad[0] + d[1] * jg.grad[1];
        df.abs() <= dg.abs()
    });
    if hit {
        1.0
    } else {
        0.0
    }
}

fn cone_term(j: &Jet2, h: &TestFunction, i: usize) -> Complex64 {
    if super::quarter_weights(j.grad, TieRule::Strict)[i] == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let (hv, hd) = h.eval_with_derivative(j.value);
    j.grad[i] * j.grad[i] * hd + j.d2(i) * hv
}

/// `|gamma_i(f) - gamma_i(f + g)|` against
/// `6 N2(h) max(d_i f^2, |d_ii f|, 2|d_i f| + |d_i g|) max(delta_x, |d_i g|, |g|, |d_ii g|)`.
///
/// The bound is an upper estimate when the jet of `f` is of order one or more. For jets of `f`
/// much smaller than one it can fail: the term `d_ii g h(f + g)` is not controlled by the
/// first factor then.
pub fn continuity_gap_bound(jf: &Jet2, jg: &Jet2, h: &TestFunction, i: usize) -> GapBound {
    let sum = jf.add(jg);
    let actual = (cone_term(jf, h, i) - cone_term(&sum, h, i)).norm();
    let (dfi, dgi) = (jf.grad[i], jg.grad[i]);
    let a = (dfi * dfi).max(jf.d2(i).abs()).max(2.0 * dfi.abs() + dgi.abs());
    let b = delta_x(jf, jg).max(dgi.abs()).max(jg.value.abs()).max(jg.d2(i).abs());
    GapBound { actual, bound: 6.0 * h.n2() * a * b }
}

/// Monte Carlo comparison of `E|I_f(h) - I_{f+g}(h)|^q` with the integrated pointwise bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuityMomentReport {
    pub lhs: f64,
    /// `(N2(h) sum_i ∫ ||A_i||_{2q} ||B_i||_{2q} dx)^q`, to be multiplied by `6^q`. The maxima in
    /// `A_i`, `B_i` are bounded by sums of the `2q`-th powers of their entries.
    pub rhs_without_constant: f64,
    pub reps: usize,
}

/// Runs `reps` replicates of the random perturbation `sample_g(seed_r)`.
pub fn continuity_moment_report(
    f: &Field,
    sample_g: &(dyn Fn(u64) -> Result<Field> + Sync),
    h: &TestFunction,
    q: u32,
    quad: &QuadratureSpec,
    reps: usize,
    seed: u64,
) -> Result<ContinuityMomentReport> {
    let domain = integration_domain(f.as_ref())?;
    let n = quad.spatial_resolution;
    let dx = domain.width() / n as f64;
    let dy = domain.height() / n as f64;
    let nodes: Vec<Point> = (0..n * n)
        .map(|k| {
            Point::new(domain.min.x + ((k % n) as f64 + 0.5) * dx, domain.min.y + ((k / n) as f64 + 0.5) * dy)
        })
        .collect();
    let f_jets: Vec<Jet2> = nodes.par_iter().map(|&p| f.jet(p)).collect();
    let tie = quad.tie;
    let i_f: Complex64 = f_jets.iter().map(|j| -gamma_density(j, h, tie)).sum::<Complex64>() * (dx * dy);
    let qq = 2 * q as i32;
    // per node: E(2|d_i f| + |d_i g|)^{2q} for i = 0, 1, then E of delta, |g|, |d_i g|, |d_ii g| powers
    let mut acc = vec![[0.0f64; 8]; nodes.len()];
    let mut diffs = Vec::with_capacity(reps);
    for r in 0..reps {
        let g = sample_g(derive_seed(seed, r as u64))?;
        let fg: Field = Arc::new(SumField::new(vec![(1.0, f.clone()), (1.0, g.clone())]));
        let contrib: Vec<(Complex64, [f64; 8])> = nodes
            .par_iter()
            .zip(&f_jets)
            .map(|(&p, jf)| {
                let jg = g.jet(p);
                let gamma = -gamma_density(&fg.jet(p), h, tie);
                let m = [
                    (2.0 * jf.grad[0].abs() + jg.grad[0].abs()).powi(qq),
                    (2.0 * jf.grad[1].abs() + jg.grad[1].abs()).powi(qq),
                    delta_x(jf, &jg),
                    jg.value.abs().powi(qq),
                    jg.grad[0].abs().powi(qq),
                    jg.grad[1].abs().powi(qq),
                    jg.hess.xx.abs().powi(qq),
                    jg.hess.yy.abs().powi(qq),
                ];
                (gamma, m)
            })
            .collect();
        let i_fg: Complex64 = contrib.iter().map(|c| c.0).sum::<Complex64>() * (dx * dy);
        diffs.push((i_f - i_fg).norm().powi(q as i32));
        for (a, (_, m)) in acc.iter_mut().zip(&contrib) {
            for k in 0..8 {
                a[k] += m[k];
            }
        }
    }
    let inv = 1.0 / reps as f64;
    let p = 1.0 / qq as f64;
    let mut integral = 0.0;
    for (a, jf) in acc.iter().zip(&f_jets) {
        for i in 0..2 {
            let a_i = (jf.grad[i].powi(2 * qq) + jf.d2(i).abs().powi(qq) + a[i] * inv).powf(p);
            let b_i = ((a[2] + a[3] + a[4 + i] + a[6 + i]) * inv).powf(p);
            integral += a_i * b_i * dx * dy;
        }
    }
    Ok(ContinuityMomentReport {
        lhs: crate::seed::order_free_sum(&diffs) * inv,
        rhs_without_constant: (h.n2() * integral).powi(q as i32),
        reps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SymMat2;

    #[test]
    fn bound_holds_for_order_one_jets() {
        let h = TestFunction::bump(0.2, 0.8).unwrap();
        let jf = Jet2::new(0.5, [-1.0, -1.5], SymMat2::new(1.2, 0.3, -0.4));
        let jg = Jet2::new(0.01, [0.02, -0.01], SymMat2::new(0.05, 0.0, 0.02));
        for i in 0..2 {
            let g = continuity_gap_bound(&jf, &jg, &h, i);
            assert!(g.actual <= g.bound, "{g:?}");
        }
    }

    #[test]
    fn bound_fails_for_small_jets_of_f() {
        // grad f tiny and d_ii f = 0, while g only bends: the bound scales with |grad f|
        let h = TestFunction::bump(0.2, 0.8).unwrap();
        let jf = Jet2::new(0.5, [-1e-4, -2e-4], SymMat2::new(0.0, 0.0, 0.0));
        let jg = Jet2::new(0.0, [0.0, 0.0], SymMat2::new(1.0, 0.0, 0.0));
        let g = continuity_gap_bound(&jf, &jg, &h, 0);
        assert!(g.actual > g.bound, "{g:?}");
    }
}
