use super::{Germ, GermSample, KernelModel};
use crate::fields::{Descriptor, Jet2, ScalarField};
use crate::geometry::{BBox, Point};

/// `f(x) = sum_y M_y g(r_y(x - y))` over a germ sample, with grains cut off at their truncation radius.
///
/// Every kernel is radial, so the grain rotations do not change the field and are not applied.
#[derive(Debug, Clone)]
pub struct ShotField {
    model: KernelModel,
    germs: Vec<Germ>,
    reach: f64,
    origin: Point,
    cell: f64,
    nx: usize,
    ny: usize,
    /// Germ indices per bin, row-major.
    bins: Vec<Vec<u32>>,
    bbox: BBox,
    window_radius: f64,
    intensity: f64,
}

impl ShotField {
    pub fn new(sample: &GermSample, model: &KernelModel) -> Self {
        let reach = model.max_truncation_radius();
        let bbox = BBox::around(Point::ORIGIN, sample.window_radius + reach);
        let cell = reach.max(bbox.width() / 256.0);
        let nx = ((bbox.width() / cell).ceil() as usize).max(1);
        let ny = nx;
        let mut bins = vec![Vec::new(); nx * ny];
        for (k, g) in sample.germs.iter().enumerate() {
            let i = (((g.position.x - bbox.min.x) / cell) as usize).min(nx - 1);
            let j = (((g.position.y - bbox.min.y) / cell) as usize).min(ny - 1);
            bins[j * nx + i].push(k as u32);
        }
        Self {
            model: model.clone(),
            germs: sample.germs.clone(),
            reach,
            origin: bbox.min,
            cell,
            nx,
            ny,
            bins,
            bbox,
            window_radius: sample.window_radius,
            intensity: sample.intensity,
        }
    }

    fn for_each_near(&self, p: Point, mut visit: impl FnMut(&Germ, Point)) {
        let lo_i = ((p.x - self.reach - self.origin.x) / self.cell).floor().max(0.0) as usize;
        let lo_j = ((p.y - self.reach - self.origin.y) / self.cell).floor().max(0.0) as usize;
        let hi_i = ((p.x + self.reach - self.origin.x) / self.cell).floor();
        let hi_j = ((p.y + self.reach - self.origin.y) / self.cell).floor();
        if hi_i < 0.0 || hi_j < 0.0 {
            return;
        }
        let hi_i = (hi_i as usize).min(self.nx - 1);
        let hi_j = (hi_j as usize).min(self.ny - 1);
        let r2 = self.reach * self.reach;
        for j in lo_j..=hi_j {
            for i in lo_i..=hi_i {
                for &k in &self.bins[j * self.nx + i] {
                    let g = &self.germs[k as usize];
                    let d = p - g.position;
                    if d.norm_sq() < r2 {
                        visit(g, d);
                    }
                }
            }
        }
    }

    pub fn germ_count(&self) -> usize {
        self.germs.len()
    }
}

impl ScalarField for ShotField {
    fn jet(&self, p: Point) -> Jet2 {
        let mut acc = Jet2::default();
        self.for_each_near(p, |g, d| {
            acc = acc.add(&self.model.components[g.kernel].1.jet(d).scaled(g.amplitude));
        });
        acc
    }

    fn value(&self, p: Point) -> f64 {
        let mut acc = 0.0;
        self.for_each_near(p, |g, d| acc += g.amplitude * self.model.components[g.kernel].1.value(d));
        acc
    }

    fn bbox(&self) -> BBox {
        self.bbox
    }

    fn descriptor(&self) -> Descriptor {
        Descriptor::new("shot_noise")
            .with("window_radius", self.window_radius)
            .with("intensity", self.intensity)
            .with("germs", self.germs.len() as f64)
    }
}
