use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use polyflame_core::{FieldGrid, FieldSolution, FlameMetrics, GridEvaluator, InitialDistribution, ModelParams, Numerics};

use crate::chromosome::{Chromosome, IdsdSpace};
use crate::config::GAConfig;
use crate::constraints::ConstraintSet;
use crate::engine::{run, Fitness, RunResult, SURROGATE_SCORE};
use crate::space::SearchSpace;
use crate::GaError;

pub type CustomObjective = Arc<dyn Fn(&InitialDistribution) -> Option<f64> + Send + Sync>;

#[derive(Clone)]
pub enum FitnessKind {
    EtaMax,
    TMax,
    Custom(CustomObjective),
}

impl fmt::Debug for FitnessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::EtaMax => "EtaMax",
            Self::TMax => "TMax",
            Self::Custom(_) => "Custom",
        })
    }
}

/// Serializable subset of [`FitnessKind`] for config files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    #[default]
    EtaMax,
    TMax,
}

impl From<Objective> for FitnessKind {
    fn from(o: Objective) -> Self {
        match o {
            Objective::EtaMax => Self::EtaMax,
            Objective::TMax => Self::TMax,
        }
    }
}

/// Flame metrics of one iDSD on a fixed model context.
pub struct CombustionFitness {
    params: ModelParams,
    numerics: Numerics,
    evaluator: GridEvaluator,
    kind: FitnessKind,
}

impl CombustionFitness {
    pub fn new(params: ModelParams, numerics: Numerics, kind: FitnessKind) -> Result<Self, GaError> {
        params.validate()?;
        numerics.validate()?;
        let grid = FieldGrid::uniform(numerics.n_xi, numerics.n_eta, numerics.eta_top)?;
        Ok(Self {
            params,
            numerics,
            evaluator: GridEvaluator::new(grid),
            kind,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn numerics(&self) -> &Numerics {
        &self.numerics
    }

    pub fn metrics(&self, init: &InitialDistribution) -> Result<Option<FlameMetrics>, GaError> {
        let sol = FieldSolution::new(&self.params, init, self.numerics.n_modes)?;
        Ok(polyflame_core::flame_metrics(&sol, &self.evaluator))
    }

    pub fn score_distribution(&self, init: &InitialDistribution) -> Option<f64> {
        if let FitnessKind::Custom(f) = &self.kind {
            return f(init);
        }
        let m = match self.metrics(init) {
            Ok(m) => m?,
            Err(e) => {
                log::warn!("fitness evaluation failed: {e}");
                return None;
            }
        };
        match self.kind {
            FitnessKind::EtaMax => Some(m.eta_max),
            FitnessKind::TMax => Some(m.t_max),
            FitnessKind::Custom(_) => unreachable!(),
        }
    }
}

impl Fitness<Chromosome> for CombustionFitness {
    fn evaluate(&self, ch: &Chromosome) -> Option<f64> {
        let init = ch.to_distribution(self.params.n_sections).ok()?;
        self.score_distribution(&init)
    }
}

/// GA over `k_dof`-section iDSDs with `Ē` pinned to `config.e_bar_const`,
/// finished by [`merge_polish`] on the best chromosome.
pub fn optimize_idsd<F: Fitness<Chromosome>>(
    config: &GAConfig,
    n_sections: usize,
    k_dof: usize,
    fitness: &F,
    constraints: Option<&ConstraintSet>,
) -> Result<RunResult<Chromosome>, GaError> {
    let space = IdsdSpace::new(n_sections, k_dof, config.delta_cap, config.e_bar_const)?;
    let default_set;
    let constraints = match constraints {
        Some(c) => c,
        None => {
            default_set = ConstraintSet::idsd(n_sections, config.delta_cap, config.e_bar_const, config.equality_band);
            &default_set
        }
    };
    let mut result = run(&space, config, fitness, constraints)?;
    if result.best_score > SURROGATE_SCORE {
        let (best, score, evaluations) = merge_polish(&space, fitness, constraints, &result.best, result.best_score);
        result.best = best;
        result.best_score = score;
        result.evaluations += evaluations;
    }
    Ok(result)
}

/// Greedy local search that moves the whole fraction of one gene onto
/// another, keeping the best strictly improving feasible move, until none
/// is left. Returns the polished chromosome, its score and the number of
/// fitness calls.
///
/// On flat objectives the GA tends to stall on a split of the liquid over
/// adjacent sections that scores slightly below the concentrated iDSD.
pub fn merge_polish<F: Fitness<Chromosome>>(
    space: &IdsdSpace,
    fitness: &F,
    constraints: &ConstraintSet,
    start: &Chromosome,
    start_score: f64,
) -> (Chromosome, f64, usize) {
    let (mut best, mut score) = (start.clone(), start_score);
    let mut calls = 0;
    loop {
        let mut step: Option<(Chromosome, f64)> = None;
        for from in 0..best.k() {
            if best.fractions[from] <= 0.0 {
                continue;
            }
            for to in (0..best.k()).filter(|&t| t != from) {
                let mut c = best.clone();
                c.fractions[to] += c.fractions[from];
                c.fractions[from] = 0.0;
                if !constraints.is_feasible(&space.decision_vector(&c), 1e-9) {
                    continue;
                }
                calls += 1;
                match fitness.evaluate(&c) {
                    Some(v) if v.is_finite() && v > step.as_ref().map_or(score, |s| s.1) => step = Some((c, v)),
                    _ => {}
                }
            }
        }
        match step {
            Some((c, v)) => (best, score) = (c, v),
            None => return (best, score, calls),
        }
    }
}
