use crate::error::{Error, Result};

/// Accumulates cell counts for many levels at once.
///
/// A cell present exactly for `u <= t` is recorded once with [`LevelCounter::add_up_to`]; the
/// count at each level is then a prefix sum over the sorted levels.
pub(crate) struct LevelCounter<'a> {
    sorted: &'a [f64],
    diff: Vec<i64>,
}

impl<'a> LevelCounter<'a> {
    pub fn new(sorted: &'a [f64]) -> Self {
        Self { sorted, diff: vec![0; sorted.len() + 1] }
    }

    /// Adds `w` at every level `u <= t`.
    #[inline]
    pub fn add_up_to(&mut self, t: f64, w: i64) {
        let idx = self.sorted.partition_point(|&u| u <= t);
        self.diff[0] += w;
        self.diff[idx] -= w;
    }

    /// Adds `w` at every level `lo < u <= hi`.
    #[inline]
    pub fn add_between(&mut self, lo: f64, hi: f64, w: i64) {
        if lo < hi {
            self.add_up_to(hi, w);
            self.add_up_to(lo, -w);
        }
    }

    pub fn merge(&mut self, other: &LevelCounter<'_>) {
        for (a, b) in self.diff.iter_mut().zip(&other.diff) {
            *a += b;
        }
    }

    pub fn totals(&self) -> Vec<i64> {
        let mut acc = 0;
        self.diff[..self.sorted.len()]
            .iter()
            .map(|d| {
                acc += d;
                acc
            })
            .collect()
    }
}

/// Sorted copy of `levels` with the permutation back to the input order.
pub(crate) fn sort_levels(levels: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..levels.len()).collect();
    order.sort_by(|&a, &b| levels[a].total_cmp(&levels[b]));
    (order.iter().map(|&k| levels[k]).collect(), order)
}

pub(crate) fn unsort(sorted_values: Vec<i64>, order: &[usize]) -> Vec<i64> {
    let mut out = vec![0; order.len()];
    for (v, &k) in sorted_values.into_iter().zip(order) {
        out[k] = v;
    }
    out
}

/// Fails with the lowest level at which a boundary site is occupied.
pub(crate) fn check_boundary(boundary_max: f64, sorted: &[f64]) -> Result<()> {
    match sorted.first() {
        Some(&lowest) if boundary_max >= lowest => Err(Error::ExcursionNotContained { level: lowest }),
        _ => Ok(()),
    }
}
