use super::KernelModel;
use crate::error::{invalid, Error, Result};
use crate::geometry::Point;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::fmt::Write;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Germ {
    pub position: Point,
    pub kernel: usize,
    pub amplitude: f64,
    /// Clockwise rotation angle of the grain.
    pub rotation: f64,
}

/// A Poisson germ process realised in the disc `B(0, window_radius)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GermSample {
    pub seed: u64,
    pub window_radius: f64,
    pub intensity: f64,
    pub germs: Vec<Germ>,
}

/// Poisson germs of intensity `intensity` in `B(0, window_radius)` with marks drawn from `model`.
pub fn sample_germs(window_radius: f64, intensity: f64, model: &KernelModel, seed: u64) -> Result<GermSample> {
    if !(window_radius > 0.0 && intensity > 0.0 && window_radius.is_finite() && intensity.is_finite()) {
        return Err(invalid("germ sampling needs positive finite window radius and intensity"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mean = intensity * std::f64::consts::PI * window_radius * window_radius;
    let count = Poisson::new(mean).map_err(|e| invalid(format!("Poisson mean {mean}: {e}")))?.sample(&mut rng) as usize;
    let germs = (0..count)
        .map(|_| {
            let r = window_radius * rng.random::<f64>().sqrt();
            let a = TAU * rng.random::<f64>();
            let kernel = model.sample_component(&mut rng);
            let amplitude = model.amplitude.sample(&mut rng);
            let rotation = if model.rotate { TAU * rng.random::<f64>() } else { 0.0 };
            Germ { position: Point::new(r * a.cos(), r * a.sin()), kernel, amplitude, rotation }
        })
        .collect();
    Ok(GermSample { seed, window_radius, intensity, germs })
}

impl GermSample {
    /// Text form: header lines `seed`, `window_radius`, `intensity`, then one
    /// `x y kernel-id amplitude rotation` line per germ. Floats are written in shortest
    /// round-trip form, so parsing restores the sample exactly.
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "seed {}\nwindow_radius {:?}\nintensity {:?}\n",
            self.seed, self.window_radius, self.intensity
        );
        for g in &self.germs {
            let _ = writeln!(
                s,
                "{:?} {:?} {} {:?} {:?}",
                g.position.x, g.position.y, g.kernel, g.amplitude, g.rotation
            );
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |m: String| Error::Parse(format!("germ sample: {m}"));
        let mut lines = text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#'));
        let mut header = |key: &str| -> Result<String> {
            let line = lines.next().ok_or_else(|| bad(format!("missing `{key}` line")))?;
            match line.split_once(' ') {
                Some((k, v)) if k == key => Ok(v.trim().to_string()),
                _ => Err(bad(format!("expected `{key} <value>`, got `{line}`"))),
            }
        };
        let seed = header("seed")?.parse().map_err(|_| bad("bad seed".into()))?;
        let window_radius = header("window_radius")?.parse().map_err(|_| bad("bad window radius".into()))?;
        let intensity = header("intensity")?.parse().map_err(|_| bad("bad intensity".into()))?;
        let mut germs = Vec::new();
        for line in lines {
            let t: Vec<&str> = line.split_whitespace().collect();
            if t.len() != 5 {
                return Err(bad(format!("expected 5 fields, got `{line}`")));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad(format!("bad number `{s}`")));
            germs.push(Germ {
                position: Point::new(num(t[0])?, num(t[1])?),
                kernel: t[2].parse().map_err(|_| bad(format!("bad kernel id `{}`", t[2])))?,
                amplitude: num(t[3])?,
                rotation: num(t[4])?,
            });
        }
        Ok(Self { seed, window_radius, intensity, germs })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_sample() {
        let m = KernelModel::gaussian();
        let a = sample_germs(6.0, 1.0, &m, 7).unwrap();
        let b = sample_germs(6.0, 1.0, &m, 7).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, sample_germs(6.0, 1.0, &m, 8).unwrap());
        assert!(a.germs.iter().all(|g| g.position.norm() <= 6.0 && (0.5..1.5).contains(&g.amplitude)));
    }

    #[test]
    fn text_round_trip_is_exact() {
        let s = sample_germs(3.0, 2.0, &KernelModel::gaussian(), 99).unwrap();
        assert_eq!(GermSample::from_text(&s.to_text()).unwrap(), s);
        assert!(GermSample::from_text("seed 1\nwindow_radius 2\n").is_err());
    }

    #[test]
    fn mean_count_matches_intensity() {
        let m = KernelModel::gaussian();
        let n: usize = (0..400).map(|k| sample_germs(5.0, 0.5, &m, k).unwrap().germs.len()).sum();
        let mean = n as f64 / 400.0;
        let expect = 0.5 * std::f64::consts::PI * 25.0;
        // Poisson standard error of the mean is sqrt(expect / 400)
        assert!((mean - expect).abs() < 4.0 * (expect / 400.0).sqrt(), "{mean} vs {expect}");
    }
}
