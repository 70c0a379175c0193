use serde::{Deserialize, Serialize};

use crate::GaError;

/// How parents are drawn for each crossover.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionMode {
    /// Every child is bred from the top `elite_parents` individuals.
    #[default]
    Elite,
    /// Fitness-proportional draws from the whole population; elites still survive.
    Roulette,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintMode {
    /// Project candidates back onto the feasible set before scoring.
    #[default]
    Repair,
    /// Score infeasible candidates with a linear penalty on the violation.
    Penalty,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GAConfig {
    pub population_size: usize,
    pub max_generations: usize,
    pub termination_cost_delta: f64,
    pub termination_window: usize,
    pub mutation_rate: f64,
    pub elite_parents: usize,
    pub rng_seed: u64,
    pub delta_cap: f64,
    pub e_bar_const: f64,
    pub equality_band: f64,
    pub selection: SelectionMode,
    pub constraint_mode: ConstraintMode,
    pub penalty_weight: f64,
}

impl Default for GAConfig {
    fn default() -> Self {
        Self {
            population_size: 100,
            max_generations: 200,
            termination_cost_delta: 1e-6,
            termination_window: 20,
            mutation_rate: 0.05,
            elite_parents: 2,
            rng_seed: 0,
            delta_cap: 0.7,
            e_bar_const: 100.0,
            equality_band: 1e-6,
            selection: SelectionMode::Elite,
            constraint_mode: ConstraintMode::Repair,
            penalty_weight: 1e3,
        }
    }
}

impl GAConfig {
    pub fn validate(&self) -> Result<(), GaError> {
        let bad = |field: &'static str, reason: &str| {
            Err(GaError::InvalidConfig {
                field,
                reason: reason.to_string(),
            })
        };
        if self.population_size < 2 {
            return bad("population_size", "must be at least 2");
        }
        if self.max_generations == 0 {
            return bad("max_generations", "must be positive");
        }
        if !(self.termination_cost_delta >= 0.0) {
            return bad("termination_cost_delta", "must be non-negative");
        }
        if self.termination_window == 0 {
            return bad("termination_window", "must be positive");
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return bad("mutation_rate", "must lie in [0, 1]");
        }
        if self.elite_parents < 2 || self.elite_parents > self.population_size {
            return bad("elite_parents", "must lie in 2..=population_size");
        }
        if !(self.delta_cap > 0.0 && self.delta_cap <= 1.0) {
            return bad("delta_cap", "must lie in (0, 1]");
        }
        if !(self.e_bar_const > 0.0 && self.e_bar_const.is_finite()) {
            return bad("e_bar_const", "must be positive");
        }
        if !(self.equality_band > 0.0) {
            return bad("equality_band", "must be positive");
        }
        if !(self.penalty_weight >= 0.0) {
            return bad("penalty_weight", "must be non-negative");
        }
        Ok(())
    }
}
