use crate::error::{invalid, Error, Result};
use crate::fields::ScalarField;
use crate::geometry::{BBox, Point};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Regular lattice `origin + (i, j) * spacing` with `nx * ny` sites.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub origin: Point,
    pub spacing: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(origin: Point, spacing: f64, nx: usize, ny: usize) -> Result<Self> {
        if !(spacing > 0.0 && spacing.is_finite()) || nx < 3 || ny < 3 {
            return Err(invalid("grid needs positive spacing and at least 3x3 sites"));
        }
        Ok(Self { origin, spacing, nx, ny })
    }

    /// Square lattice of odd side `2m + 1` centred at `center` whose sites cover `bbox` with at
    /// least two sites to spare on each side. With a dyadic spacing and centre the coordinates are
    /// exact, so the lattice is invariant under quarter turns about the centre.
    pub fn covering(bbox: &BBox, center: Point, spacing: f64) -> Result<Self> {
        if bbox.is_empty() {
            return Err(invalid("cannot cover an empty box"));
        }
        let reach = [
            center.x - bbox.min.x,
            bbox.max.x - center.x,
            center.y - bbox.min.y,
            bbox.max.y - center.y,
        ]
        .into_iter()
        .fold(0.0f64, f64::max);
        let m = (reach / spacing).ceil() as usize + 2;
        let n = 2 * m + 1;
        let origin = Point::new(center.x - m as f64 * spacing, center.y - m as f64 * spacing);
        Self::new(origin, spacing, n, n)
    }

    pub fn point(&self, i: usize, j: usize) -> Point {
        Point::new(self.origin.x + i as f64 * self.spacing, self.origin.y + j as f64 * self.spacing)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Field values sampled on a lattice, row-major with `j` the row index.
#[derive(Debug, Clone)]
pub struct SampledGrid {
    pub spec: GridSpec,
    pub values: Vec<f64>,
}

impl SampledGrid {
    pub fn sample(field: &dyn ScalarField, spec: GridSpec) -> Self {
        let values = (0..spec.ny)
            .into_par_iter()
            .flat_map_iter(|j| (0..spec.nx).map(move |i| field.value(spec.point(i, j))))
            .collect();
        Self { spec, values }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.spec.nx + i]
    }

    /// Largest value on the outermost ring of sites.
    pub fn boundary_max(&self) -> f64 {
        let (nx, ny) = (self.spec.nx, self.spec.ny);
        let rows = (0..nx).flat_map(|i| [self.get(i, 0), self.get(i, ny - 1)]);
        let cols = (0..ny).flat_map(|j| [self.get(0, j), self.get(nx - 1, j)]);
        rows.chain(cols).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Excursion set `{f >= level}`; fails if any boundary site is occupied.
    pub fn threshold(&self, level: f64) -> Result<BinaryGrid> {
        let occupied: Vec<bool> = self.values.iter().map(|&v| v >= level).collect();
        let grid = BinaryGrid { spec: self.spec, level, occupied };
        grid.check_contained()?;
        Ok(grid)
    }
}

/// Excursion set on a lattice; each occupied site is a closed unit pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryGrid {
    pub spec: GridSpec,
    pub level: f64,
    pub occupied: Vec<bool>,
}

/// Samples `field` on `spec` and thresholds at `level`.
pub fn binarize(field: &dyn ScalarField, spec: GridSpec, level: f64) -> Result<BinaryGrid> {
    SampledGrid::sample(field, spec).threshold(level)
}

impl BinaryGrid {
    pub fn from_rows(spec: GridSpec, level: f64, rows: &[&str]) -> Result<Self> {
        if rows.len() != spec.ny {
            return Err(invalid("row count does not match ny"));
        }
        let mut occupied = Vec::with_capacity(spec.len());
        for row in rows {
            let cells: Vec<bool> = row.chars().filter(|c| !c.is_whitespace()).map(|c| c == '1').collect();
            if cells.len() != spec.nx {
                return Err(invalid("row length does not match nx"));
            }
            occupied.extend(cells);
        }
        Ok(Self { spec, level, occupied })
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.occupied[j * self.spec.nx + i]
    }

    /// Out-of-range sites read as empty.
    pub fn get_signed(&self, i: isize, j: isize) -> bool {
        i >= 0
            && j >= 0
            && (i as usize) < self.spec.nx
            && (j as usize) < self.spec.ny
            && self.get(i as usize, j as usize)
    }

    pub fn count(&self) -> usize {
        self.occupied.iter().filter(|&&b| b).count()
    }

    pub fn check_contained(&self) -> Result<()> {
        let (nx, ny) = (self.spec.nx, self.spec.ny);
        let edge = (0..nx).any(|i| self.get(i, 0) || self.get(i, ny - 1))
            || (0..ny).any(|j| self.get(0, j) || self.get(nx - 1, j));
        if edge {
            Err(Error::ExcursionNotContained { level: self.level })
        } else {
            Ok(())
        }
    }

    /// Text raster: a `BINGRID` tag, `nx ny`, `spacing origin_x origin_y level`, then one line of
    /// space-separated 0/1 per row, starting from `j = 0`.
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "BINGRID\n{} {}\n{} {} {} {}\n",
            self.spec.nx, self.spec.ny, self.spec.spacing, self.spec.origin.x, self.spec.origin.y, self.level
        );
        for j in 0..self.spec.ny {
            let row: Vec<&str> = (0..self.spec.nx).map(|i| if self.get(i, j) { "1" } else { "0" }).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let bad = |m: &str| Error::Parse(format!("binary grid: {m}"));
        if lines.next().map(str::trim) != Some("BINGRID") {
            return Err(bad("missing BINGRID tag"));
        }
        let dims: Vec<usize> = lines
            .next()
            .ok_or_else(|| bad("missing dimensions"))?
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| bad("bad dimension")))
            .collect::<Result<_>>()?;
        let geo: Vec<f64> = lines
            .next()
            .ok_or_else(|| bad("missing geometry line"))?
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| bad("bad geometry value")))
            .collect::<Result<_>>()?;
        if dims.len() != 2 || geo.len() != 4 {
            return Err(bad("malformed header"));
        }
        let spec = GridSpec::new(Point::new(geo[1], geo[2]), geo[0], dims[0], dims[1])?;
        let rows: Vec<&str> = lines.collect();
        Self::from_rows(spec, geo[3], &rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::named_field;

    #[test]
    fn covering_grid_is_symmetric_and_exact() {
        let f = named_field("two_bump").unwrap();
        let spec = GridSpec::covering(&f.bbox(), Point::ORIGIN, 1.0 / 256.0).unwrap();
        let m = spec.nx / 2;
        assert_eq!(spec.point(m, m), Point::ORIGIN);
        assert_eq!(spec.point(0, 0).x, -spec.point(spec.nx - 1, 0).x);
        assert!(spec.point(1, 1).x < f.bbox().min.x);
    }

    #[test]
    fn text_round_trip() {
        let spec = GridSpec::new(Point::new(-1.0, -1.0), 0.5, 5, 4).unwrap();
        let g = BinaryGrid::from_rows(spec, 0.3, &["00000", "01100", "00100", "00000"]).unwrap();
        let back = BinaryGrid::from_text(&g.to_text()).unwrap();
        assert_eq!(back, g);
        assert!(BinaryGrid::from_text("BINGRID\n5 4\n0.5 0 0\n").is_err());
    }

    #[test]
    fn boundary_contact_is_reported() {
        let spec = GridSpec::new(Point::ORIGIN, 1.0, 3, 3).unwrap();
        let g = BinaryGrid::from_rows(spec, 0.0, &["000", "001", "000"]).unwrap();
        assert!(matches!(g.check_contained(), Err(Error::ExcursionNotContained { .. })));
    }
}
