//! Density tracking for protograph ensembles and the expected scaling
//! coefficient built on it.

mod density;
mod jfunc;
mod mcde;
mod pexit;
mod quadrature;
mod scaling;

pub use density::{EdgeDensity, EdgeDensitySchedule, HISTOGRAM_BINS, HISTOGRAM_RANGE};
pub use jfunc::{j_complement, j_complement_quadrature, j_function, j_inverse, j_inverse_complement, MU_MAX};
pub use mcde::{mc_density_evolution, MIN_SAMPLES};
pub use pexit::{pexit_posterior_information, pexit_run, pexit_slot_means};
pub use quadrature::integrate;
pub use scaling::{residual_slots, scaling_coefficient, tail_factor, Coefficient, TRUNCATION_SIGMAS};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("iteration count must be at least 1")]
    ZeroIterations,
    #[error("{samples} samples per population, at least {min} required")]
    TooFewSamples { samples: usize, min: usize },
    #[error("invalid density schedule: {0}")]
    Schedule(String),
}
