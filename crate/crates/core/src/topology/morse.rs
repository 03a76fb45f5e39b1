use crate::error::{invalid, Error, Result};
use crate::fields::{Field, ScalarField, SumField};
use crate::geometry::{BBox, Point};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub location: Point,
    pub value: f64,
    /// Number of positive Hessian eigenvalues: 0 maximum, 1 saddle, 2 minimum.
    pub index: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPointConfig {
    pub newton_tol: f64,
    pub degeneracy_tol: f64,
    pub seed_resolution: usize,
    pub max_iterations: usize,
    /// Critical points below this value are ignored, together with Newton seeds below it.
    pub level_floor: f64,
}

impl Default for CriticalPointConfig {
    fn default() -> Self {
        Self {
            newton_tol: 1e-10,
            degeneracy_tol: 1e-8,
            seed_resolution: 64,
            max_iterations: 50,
            level_floor: 1e-6,
        }
    }
}

/// Counts of maxima, saddles and minima.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MuTriple {
    pub maxima: usize,
    pub saddles: usize,
    pub minima: usize,
}

impl MuTriple {
    pub fn euler(&self) -> i64 {
        self.maxima as i64 - self.saddles as i64 + self.minima as i64
    }
}

fn newton(field: &dyn ScalarField, start: Point, region: &BBox, cfg: &CriticalPointConfig) -> Option<Point> {
    let mut x = start;
    let mut j = field.jet(x);
    let mut gnorm = j.grad_norm();
    for _ in 0..cfg.max_iterations {
        if gnorm <= cfg.newton_tol {
            return Some(x);
        }
        let step = j.hess.solve(j.grad)?;
        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let y = Point::new(x.x - scale * step[0], x.y - scale * step[1]);
            let jy = field.jet(y);
            if jy.grad_norm() < gnorm {
                x = y;
                j = jy;
                gnorm = jy.grad_norm();
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if !accepted || !region.contains(x) {
            return None;
        }
    }
    (gnorm <= cfg.newton_tol).then_some(x)
}

/// Critical points of `field` in `region` with value at least `cfg.level_floor`, sorted by value
/// (descending).
///
/// Seeds are the lattice sites where `|grad f|` is a local minimum among their 8 neighbours;
/// each seed is refined by damped Newton iteration on `grad f = 0`.
pub fn find_critical_points(
    field: &dyn ScalarField,
    region: &BBox,
    cfg: &CriticalPointConfig,
) -> Result<Vec<CriticalPoint>> {
    if region.is_empty() || cfg.seed_resolution < 3 {
        return Err(invalid("critical point search needs a non-empty region and seed_resolution >= 3"));
    }
    let n = cfg.seed_resolution;
    let site = |i: usize, j: usize| {
        Point::new(
            region.min.x + region.width() * i as f64 / (n - 1) as f64,
            region.min.y + region.height() * j as f64 / (n - 1) as f64,
        )
    };
    let jets: Vec<_> = (0..n * n).into_par_iter().map(|k| field.jet(site(k % n, k / n))).collect();
    let gn = |i: usize, j: usize| jets[j * n + i].grad_norm();
    let mut seeds = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let jet = &jets[j * n + i];
            if jet.value < cfg.level_floor {
                continue;
            }
            let g = gn(i, j);
            let mut is_min = true;
            for dj in -1isize..=1 {
                for di in -1isize..=1 {
                    let (a, b) = (i as isize + di, j as isize + dj);
                    if (di, dj) == (0, 0) || a < 0 || b < 0 || a >= n as isize || b >= n as isize {
                        continue;
                    }
                    if gn(a as usize, b as usize) < g {
                        is_min = false;
                    }
                }
            }
            if is_min {
                seeds.push(site(i, j));
            }
        }
    }
    let found: Vec<Option<Point>> = seeds.par_iter().map(|&s| newton(field, s, region, cfg)).collect();
    let mut points: Vec<CriticalPoint> = Vec::new();
    for x in found.into_iter().flatten() {
        let dedup = 10.0 * cfg.newton_tol;
        if points.iter().any(|p| (p.location - x).max_norm() <= dedup) {
            continue;
        }
        let jet = field.jet(x);
        if jet.value < cfg.level_floor {
            continue;
        }
        let det = jet.hess.det();
        if det.abs() <= cfg.degeneracy_tol {
            return Err(Error::DegenerateCriticalPoint { x: x.x, y: x.y, det });
        }
        points.push(CriticalPoint { location: x, value: jet.value, index: jet.hess.positive_eigenvalue_count() });
    }
    points.sort_by(|a, b| {
        b.value
            .total_cmp(&a.value)
            .then(a.location.x.total_cmp(&b.location.x))
            .then(a.location.y.total_cmp(&b.location.y))
    });
    Ok(points)
}

/// Counts of critical points with value at least `level`; fails if a critical value lies within
/// `value_tol` of `level`.
pub fn mu_triple(points: &[CriticalPoint], level: f64, value_tol: f64) -> Result<MuTriple> {
    let mut mu = MuTriple::default();
    for p in points {
        if (p.value - level).abs() <= value_tol {
            return Err(Error::CriticalLevel { level, value: p.value, tol: value_tol });
        }
        if p.value >= level {
            match p.index {
                0 => mu.maxima += 1,
                1 => mu.saddles += 1,
                _ => mu.minima += 1,
            }
        }
    }
    Ok(mu)
}

/// Morse count `mu_0 - mu_1 + mu_2` of `{f >= level}`.
pub fn euler_char_morse(points: &[CriticalPoint], level: f64, value_tol: f64) -> Result<i64> {
    Ok(mu_triple(points, level, value_tol)?.euler())
}

/// Critical-point counts above `level` for `f` and for `f + eta * perturbation`, both searched in
/// the bounding box of `f`.
pub fn morse_count_stability(
    field: &Field,
    level: f64,
    perturbation: &Field,
    eta: f64,
    cfg: &CriticalPointConfig,
) -> Result<(MuTriple, MuTriple)> {
    let region = field.bbox();
    let cfg = CriticalPointConfig { level_floor: level, ..*cfg };
    let base = find_critical_points(field.as_ref(), &region, &cfg)?;
    let perturbed = SumField::perturbed(field.clone(), eta, perturbation.clone());
    let moved = find_critical_points(perturbed.as_ref(), &region, &cfg)?;
    Ok((mu_triple(&base, level, 0.0)?, mu_triple(&moved, level, 0.0)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::named_field;

    #[test]
    fn two_bump_has_two_maxima_and_a_saddle() {
        let f = named_field("two_bump").unwrap();
        let pts = find_critical_points(f.as_ref(), &f.bbox(), &CriticalPointConfig::default()).unwrap();
        assert_eq!(pts.len(), 3, "{pts:?}");
        assert_eq!(pts[0].index, 0);
        assert_eq!(pts[1].index, 0);
        assert_eq!(pts[2].index, 1);
        assert!((pts[2].value - 2.0 * (-1.0f64).exp()).abs() < 1e-12);
        assert!(pts[2].location.max_norm() < 1e-10);
        assert_eq!(euler_char_morse(&pts, 0.5, 1e-9).unwrap(), 1);
        assert_eq!(euler_char_morse(&pts, 0.9, 1e-9).unwrap(), 2);
        assert!(matches!(
            euler_char_morse(&pts, pts[2].value, 1e-9),
            Err(Error::CriticalLevel { .. })
        ));
    }

    #[test]
    fn ring_profile_has_a_minimum_at_the_centre() {
        let f = named_field("radial_ring").unwrap();
        let pts = find_critical_points(f.as_ref(), &f.bbox(), &CriticalPointConfig::default());
        // the maximum set of a radial ring is a circle, which is degenerate
        assert!(matches!(pts, Err(Error::DegenerateCriticalPoint { .. })));
    }
}
