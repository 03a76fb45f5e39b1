//! Planar shot noise: Poisson germs carrying random grains, its characteristic functions and
//! the expected density of its Euler integral.

mod charfn;
mod field;
mod germs;
mod kernel;
mod mc;
mod model;
mod stationary;

pub use charfn::{gaussian_log_cf_1d, psi, CfQuadrature, CharacteristicFunction};
pub use field::ShotField;
pub use germs::{sample_germs, Germ, GermSample};
pub use kernel::{GrainKernel, KernelShape};
pub use mc::{
    angular_constant, empirical_cf, isotropy_factor_check, mc_euler_primitive_fourier, mc_gamma_at_origin,
    IsotropyRecord, ISOTROPY_FACTOR,
};
pub use model::{AmplitudeLaw, KernelModel, MODEL_NAMES};
pub use stationary::{stationary_limit_density, BesselQuadrature, ImproperSpec, RadialCfTable, StationaryDensity};
