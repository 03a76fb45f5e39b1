use super::levels::{check_boundary, sort_levels, unsort, LevelCounter};
use super::{BinaryGrid, SampledGrid};
use crate::error::Result;
use rayon::prelude::*;

/// Euler characteristic `V - E + F` of the union of closed unit pixels at the occupied sites.
///
/// Pixels sharing only a corner are connected, so foreground is 8-connected and holes are
/// 4-connected background components.
pub fn euler_char_cubical(grid: &BinaryGrid) -> i64 {
    let (nx, ny) = (grid.spec.nx as isize, grid.spec.ny as isize);
    let occ = |i: isize, j: isize| grid.get_signed(i, j);
    // vertex (a, b) is the lower-left corner of pixel (a, b); it touches pixels a-1..=a, b-1..=b
    (0..=ny)
        .into_par_iter()
        .map(|b| {
            let mut acc = 0i64;
            for a in 0..=nx {
                let (ll, lr, ul, ur) = (occ(a - 1, b - 1), occ(a, b - 1), occ(a - 1, b), occ(a, b));
                if ll || lr || ul || ur {
                    acc += 1;
                }
                // horizontal edge from vertex (a, b) to (a + 1, b) bounds pixels (a, b - 1) and (a, b)
                if lr || ur {
                    acc -= 1;
                }
                // vertical edge from vertex (a, b) to (a, b + 1) bounds pixels (a - 1, b) and (a, b)
                if ul || ur {
                    acc -= 1;
                }
                if ur {
                    acc += 1;
                }
            }
            acc
        })
        .sum()
}

/// [`euler_char_cubical`] of `{f >= u}` for every `u` in `levels`, from one pass over the samples.
///
/// A pixel is present for `u <= f`, an edge for `u <=` the larger of its two pixels and a vertex
/// for `u <=` the largest of its four pixels.
pub fn euler_char_cubical_levels(grid: &SampledGrid, levels: &[f64]) -> Result<Vec<i64>> {
    let (sorted, order) = sort_levels(levels);
    check_boundary(grid.boundary_max(), &sorted)?;
    let (nx, ny) = (grid.spec.nx as isize, grid.spec.ny as isize);
    let v = |i: isize, j: isize| {
        if i < 0 || j < 0 || i >= nx || j >= ny {
            f64::NEG_INFINITY
        } else {
            grid.get(i as usize, j as usize)
        }
    };
    let rows: Vec<LevelCounter> = (0..=ny)
        .into_par_iter()
        .map(|b| {
            let mut c = LevelCounter::new(&sorted);
            for a in 0..=nx {
                let (ll, lr, ul, ur) = (v(a - 1, b - 1), v(a, b - 1), v(a - 1, b), v(a, b));
                c.add_up_to(ll.max(lr).max(ul).max(ur), 1);
                c.add_up_to(lr.max(ur), -1);
                c.add_up_to(ul.max(ur), -1);
                c.add_up_to(ur, 1);
            }
            c
        })
        .collect();
    let mut total = LevelCounter::new(&sorted);
    for r in &rows {
        total.merge(r);
    }
    Ok(unsort(total.totals(), &order))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::topology::GridSpec;

    fn grid(rows: &[&str]) -> BinaryGrid {
        let spec = GridSpec::new(Point::ORIGIN, 1.0, rows[0].len(), rows.len()).unwrap();
        BinaryGrid::from_rows(spec, 0.5, rows).unwrap()
    }

    #[test]
    fn level_sweep_matches_per_level_counts() {
        let f = crate::fields::named_field("bump_ring").unwrap();
        let spec = GridSpec::covering(&f.bbox(), Point::ORIGIN, 0.05).unwrap();
        let s = SampledGrid::sample(f.as_ref(), spec);
        let levels: Vec<f64> = (1..40).map(|k| 0.03 * k as f64).rev().collect();
        let swept = euler_char_cubical_levels(&s, &levels).unwrap();
        for (u, chi) in levels.iter().zip(&swept) {
            assert_eq!(*chi, euler_char_cubical(&s.threshold(*u).unwrap()), "u={u}");
        }
        assert!(swept.contains(&0) && swept.contains(&8));
    }

    #[test]
    fn small_shapes() {
        assert_eq!(euler_char_cubical(&grid(&["000", "010", "000"])), 1);
        assert_eq!(euler_char_cubical(&grid(&["0000", "0110", "0110", "0000"])), 1);
        assert_eq!(euler_char_cubical(&grid(&["00000", "01110", "01010", "01110", "00000"])), 0);
        assert_eq!(euler_char_cubical(&grid(&["0000", "0100", "0010", "0000"])), 1);
        assert_eq!(euler_char_cubical(&grid(&["00000", "01010", "00000"])), 2);
        assert_eq!(euler_char_cubical(&grid(&["000", "000", "000"])), 0);
    }
}
