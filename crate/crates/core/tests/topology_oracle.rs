//! Lattice Euler characteristics against a union-find count of components and holes.

use euler_primitive::geometry::Point;
use euler_primitive::topology::{
    euler_char_bicov_grid, euler_char_bicov_levels, euler_char_cubical, euler_char_cubical_levels, BinaryGrid,
    GridSpec, SampledGrid,
};
use euler_primitive::fields::named_field;
use proptest::prelude::*;

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut c = x;
        while self.parent[c] != r {
            let next = self.parent[c];
            self.parent[c] = r;
            c = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

/// Components of the sites equal to `value` on the grid padded by one empty ring, under the given
/// neighbour offsets. Returns the count, excluding the component of the padding when `value` is false.
fn components(grid: &BinaryGrid, value: bool, offsets: &[(isize, isize)]) -> usize {
    let (nx, ny) = (grid.spec.nx as isize + 2, grid.spec.ny as isize + 2);
    let at = |i: isize, j: isize| grid.get_signed(i - 1, j - 1);
    let idx = |i: isize, j: isize| (j * nx + i) as usize;
    let mut dsu = Dsu::new((nx * ny) as usize);
    for j in 0..ny {
        for i in 0..nx {
            if at(i, j) != value {
                continue;
            }
            for &(di, dj) in offsets {
                let (a, b) = (i + di, j + dj);
                if a >= 0 && b >= 0 && a < nx && b < ny && at(a, b) == value {
                    dsu.union(idx(i, j), idx(a, b));
                }
            }
        }
    }
    let mut roots = std::collections::BTreeSet::new();
    for j in 0..ny {
        for i in 0..nx {
            if at(i, j) == value {
                roots.insert(dsu.find(idx(i, j)));
            }
        }
    }
    let outside = if value { None } else { Some(dsu.find(idx(0, 0))) };
    roots.iter().filter(|r| Some(**r) != outside).count()
}

const FOUR: [(isize, isize); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
const EIGHT: [(isize, isize); 8] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1), (1, -1), (-1, 1)];
// the three-point counts live on a hexagonal lattice: foreground and background both join
// diagonal neighbours along e1 - e2
const SIX: [(isize, isize); 6] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1)];

fn oracle_cubical(g: &BinaryGrid) -> i64 {
    components(g, true, &EIGHT) as i64 - components(g, false, &FOUR) as i64
}

fn oracle_bicov(g: &BinaryGrid) -> i64 {
    components(g, true, &SIX) as i64 - components(g, false, &SIX) as i64
}

fn grid_from(cells: &[bool], n: usize) -> BinaryGrid {
    let spec = GridSpec::new(Point::new(0.0, 0.0), 1.0, n, n).unwrap();
    let rows: Vec<String> = cells.chunks(n).map(|r| r.iter().map(|&b| if b { '1' } else { '0' }).collect()).collect();
    let refs: Vec<&str> = rows.iter().map(String::as_str).collect();
    BinaryGrid::from_rows(spec, 0.5, &refs).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn cubical_matches_union_find(n in 3usize..14, bits in proptest::collection::vec(any::<bool>(), 196)) {
        let g = grid_from(&bits[..n * n], n);
        prop_assert_eq!(euler_char_cubical(&g), oracle_cubical(&g));
    }

    #[test]
    fn bicov_matches_union_find(n in 3usize..14, bits in proptest::collection::vec(any::<bool>(), 196)) {
        let g = grid_from(&bits[..n * n], n);
        prop_assert_eq!(euler_char_bicov_grid(&g), oracle_bicov(&g));
    }

    #[test]
    fn text_format_round_trips(n in 3usize..10, bits in proptest::collection::vec(any::<bool>(), 100)) {
        let g = grid_from(&bits[..n * n], n);
        let back = BinaryGrid::from_text(&g.to_text()).unwrap();
        prop_assert_eq!(back, g);
    }
}

#[test]
fn annulus_and_blocks() {
    let ring = ["00000", "01110", "01010", "01110", "00000"];
    let g = grid_from(&ring.concat().chars().map(|c| c == '1').collect::<Vec<_>>(), 5);
    assert_eq!(euler_char_cubical(&g), 0);
    assert_eq!(oracle_cubical(&g), 0);
    assert_eq!(euler_char_bicov_grid(&g), 0);
}

#[test]
fn level_sweeps_equal_single_level_counts() {
    let f = named_field("bump_ring").unwrap();
    let b = f.bbox();
    let grid = SampledGrid::sample(f.as_ref(), GridSpec::covering(&b, b.center(), 1.0 / 32.0).unwrap());
    let levels: Vec<f64> = (1..40).map(|k| k as f64 * 0.025).rev().collect();
    let cub = euler_char_cubical_levels(&grid, &levels).unwrap();
    let bic = euler_char_bicov_levels(&grid, &levels).unwrap();
    for (k, &u) in levels.iter().enumerate() {
        let t = grid.threshold(u).unwrap();
        assert_eq!(cub[k], euler_char_cubical(&t), "u={u}");
        assert_eq!(bic[k], euler_char_bicov_grid(&t), "u={u}");
    }
    // mid levels of the ring enclose one hole
    assert!(cub.contains(&0) && cub.contains(&8));
}
