//! Euler characteristic of excursion sets `{f >= u}` by three independent routes.

mod bicov;
mod cubical;
mod grid;
mod levels;
mod morse;

pub use bicov::{euler_char_bicov, euler_char_bicov_grid, euler_char_bicov_levels};
pub use cubical::{euler_char_cubical, euler_char_cubical_levels};
pub use grid::{binarize, BinaryGrid, GridSpec, SampledGrid};
pub use morse::{
    euler_char_morse, find_critical_points, morse_count_stability, mu_triple, CriticalPoint,
    CriticalPointConfig, MuTriple,
};

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// How the Euler characteristic of an excursion set is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EcMethod {
    Cubical,
    Bicov,
    Morse,
}

impl FromStr for EcMethod {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "cubical" => Ok(Self::Cubical),
            "bicov" => Ok(Self::Bicov),
            "morse" => Ok(Self::Morse),
            _ => Err(crate::Error::Parse(format!("unknown EC method `{s}` (cubical, bicov, morse)"))),
        }
    }
}

impl fmt::Display for EcMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Cubical => "cubical",
            Self::Bicov => "bicov",
            Self::Morse => "morse",
        })
    }
}
