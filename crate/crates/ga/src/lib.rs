//! Elitist genetic algorithm with linear constraints, specialised to
//! optimizing initial droplet size distributions for flame metrics.
//!
//! The engine is generic over a [`SearchSpace`]; [`IdsdSpace`] is the
//! mixed-integer iDSD problem and [`toys`] holds bit-string and box problems
//! with known optima.

pub mod chromosome;
pub mod config;
pub mod constraints;
pub mod engine;
pub mod fitness;
pub mod space;
pub mod toys;

pub use chromosome::{decode, encode, Chromosome, IdsdSpace};
pub use config::{ConstraintMode, GAConfig, SelectionMode};
pub use constraints::{ConstraintSet, LinearConstraint};
pub use engine::{evaluate_fitness, run, select_parents, Fitness, GenerationStats, RunResult, SURROGATE_SCORE};
pub use fitness::{merge_polish, optimize_idsd, CombustionFitness, FitnessKind, Objective};
pub use space::{GaRng, SearchSpace};

#[derive(Debug, thiserror::Error)]
pub enum GaError {
    #[error("invalid GA setting `{field}`: {reason}")]
    InvalidConfig { field: &'static str, reason: String },
    #[error("malformed chromosome: {0}")]
    Malformed(String),
    #[error(transparent)]
    Model(#[from] polyflame_core::ModelError),
}

/// Initial population of `config.population_size` repaired iDSD chromosomes.
pub fn init_population(config: &GAConfig, n_sections: usize, k_dof: usize, rng: &mut GaRng) -> Result<Vec<Chromosome>, GaError> {
    let space = IdsdSpace::new(n_sections, k_dof, config.delta_cap, config.e_bar_const)?;
    Ok((0..config.population_size)
        .map(|_| {
            let mut ch = space.sample(rng);
            space.repair(&mut ch, rng);
            ch
        })
        .collect())
}
