use super::GrainKernel;
use crate::error::{invalid, Result};
use crate::quadrature::Rule1D;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Law of the grain amplitude `M`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum AmplitudeLaw {
    Constant { value: f64 },
    Uniform { lo: f64, hi: f64 },
}

impl AmplitudeLaw {
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match *self {
            Self::Constant { value } => value,
            Self::Uniform { lo, hi } => rng.random_range(lo..hi),
        }
    }

    /// `E[M^n]`.
    pub fn moment(&self, n: u32) -> f64 {
        match *self {
            Self::Constant { value } => value.powi(n as i32),
            Self::Uniform { lo, hi } => {
                let k = n as i32 + 1;
                (hi.powi(k) - lo.powi(k)) / (k as f64 * (hi - lo))
            }
        }
    }

    /// `E[|M|^n]`.
    pub fn moment_abs(&self, n: u32) -> f64 {
        match *self {
            Self::Constant { value } => value.abs().powi(n as i32),
            Self::Uniform { lo, hi } => {
                let k = n as i32 + 1;
                let primitive = |x: f64| x.signum() * x.abs().powi(k) / k as f64;
                (primitive(hi) - primitive(lo)) / (hi - lo)
            }
        }
    }

    pub fn max(&self) -> f64 {
        match *self {
            Self::Constant { value } => value.abs(),
            Self::Uniform { lo, hi } => lo.abs().max(hi.abs()),
        }
    }

    /// Nodes and probability weights for `E[F(M)]`.
    pub fn quadrature(&self, nodes: usize) -> Vec<(f64, f64)> {
        match *self {
            Self::Constant { value } => vec![(value, 1.0)],
            Self::Uniform { lo, hi } => {
                let r = Rule1D::uniform(lo, hi, 1, nodes);
                r.nodes.iter().zip(&r.weights).map(|(&m, &w)| (m, w / (hi - lo))).collect()
            }
        }
    }
}

/// Grain kernels with mixture weights, an amplitude law and the rotation flag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelModel {
    pub components: Vec<(f64, GrainKernel)>,
    pub amplitude: AmplitudeLaw,
    /// Uniform random rotation of each grain.
    pub rotate: bool,
}

/// Names accepted by [`KernelModel::named`].
pub const MODEL_NAMES: &[&str] = &["gaussian", "power3", "mixed"];

impl KernelModel {
    pub fn new(components: Vec<(f64, GrainKernel)>, amplitude: AmplitudeLaw, rotate: bool) -> Result<Self> {
        if components.is_empty() {
            return Err(invalid("kernel model needs at least one component"));
        }
        let total: f64 = components.iter().map(|c| c.0).sum();
        if components.iter().any(|c| !(c.0 > 0.0)) || (total - 1.0).abs() > 1e-12 {
            return Err(invalid("mixture weights must be positive and sum to 1"));
        }
        if let AmplitudeLaw::Uniform { lo, hi } = amplitude {
            if !(lo > 0.0 && lo < hi) {
                return Err(invalid("uniform amplitude law needs 0 < lo < hi"));
            }
        }
        Ok(Self { components, amplitude, rotate })
    }

    /// Gaussian grains with amplitudes uniform on `[0.5, 1.5]`.
    pub fn gaussian() -> Self {
        Self::new(vec![(1.0, GrainKernel::gaussian())], AmplitudeLaw::Uniform { lo: 0.5, hi: 1.5 }, true)
            .expect("valid default model")
    }

    /// Built-in models: `gaussian`, `power3` (power kernel with `beta = 3`) and `mixed` (equal mixture).
    pub fn named(name: &str) -> Result<Self> {
        let amplitude = AmplitudeLaw::Uniform { lo: 0.5, hi: 1.5 };
        match name {
            "gaussian" => Ok(Self::gaussian()),
            "power3" => Self::new(vec![(1.0, GrainKernel::radial_power(3.0)?)], amplitude, true),
            "mixed" => Self::new(
                vec![(0.5, GrainKernel::gaussian()), (0.5, GrainKernel::radial_power(3.0)?)],
                amplitude,
                true,
            ),
            other => Err(invalid(format!("unknown kernel model `{other}` (known: {})", MODEL_NAMES.join(", ")))),
        }
    }

    pub fn with_amplitude(mut self, amplitude: AmplitudeLaw) -> Result<Self> {
        self.amplitude = amplitude;
        Self::new(self.components, self.amplitude, self.rotate)
    }

    pub fn max_truncation_radius(&self) -> f64 {
        self.components.iter().map(|c| c.1.truncation_radius).fold(0.0, f64::max)
    }

    /// Index of the component drawn for a grain.
    pub fn sample_component(&self, rng: &mut ChaCha8Rng) -> usize {
        if self.components.len() == 1 {
            return 0;
        }
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (k, (w, _)) in self.components.iter().enumerate() {
            acc += w;
            if u < acc {
                return k;
            }
        }
        self.components.len() - 1
    }

    pub fn is_isotropic(&self) -> bool {
        self.rotate || self.components.iter().all(|c| c.1.is_radial())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_moments() {
        let a = AmplitudeLaw::Uniform { lo: 0.5, hi: 1.5 };
        assert!((a.moment(1) - 1.0).abs() < 1e-15);
        assert!((a.moment(2) - 13.0 / 12.0).abs() < 1e-15);
        let q: f64 = a.quadrature(8).iter().map(|(m, w)| w * m.powi(5)).sum();
        assert!((q - a.moment(5)).abs() < 1e-14);
    }

    #[test]
    fn weights_must_sum_to_one() {
        let k = GrainKernel::gaussian();
        assert!(KernelModel::new(vec![(0.5, k)], AmplitudeLaw::Constant { value: 1.0 }, true).is_err());
        assert!(KernelModel::named("nope").is_err());
        assert!(KernelModel::named("mixed").is_ok());
    }
}
