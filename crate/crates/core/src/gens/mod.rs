//! Nonstationary order generators.
//!
//! A [`GeneratorSpec`] fixes the law of every order of an `n`-order episode
//! as a function of normalized time. Sampling is driven by keyed streams
//! ([`StreamKey`]) so real paths, single-sample paths, SAA pools and probes
//! never share random numbers.

mod family;
mod law;
mod population;
mod sample;
mod stream;
mod validate;

pub use family::{Bounds, Consumption, Family, GeneratorSpec, Schedule, TwoPhaseVariant};
pub use law::{ConsumptionLaw, OrderLaw, Tilted};
pub use population::{
    delta_path, mean_accept_mass, nondegeneracy_estimate, population_objective, population_price,
    population_price_exact, PopulationPrice, PriceMethod,
};
pub use sample::{density_f, density_v, instance_key, sample_instance, sample_instance_rep, sample_order, sample_path};
pub use stream::{Purpose, StreamKey, REAL_PATH, TILDE_PATH};
pub use validate::{validate_generator, ValidationGrid, Violation, ViolationKind};

use crate::lp::LpError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("invalid generator parameter: {0}")]
    Param(String),
    #[error(transparent)]
    Solver(#[from] LpError),
}
