//! Generational loop: evaluate, select the elite, breed the next generation
//! from it, repeat until the budget or the improvement window runs out.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ConstraintMode, GAConfig, SelectionMode};
use crate::constraints::ConstraintSet;
use crate::space::{GaRng, SearchSpace};
use crate::GaError;

/// Score given to infeasible candidates and failed evaluations.
pub const SURROGATE_SCORE: f64 = -1e9;

/// Feasibility slack used when checking constraints after repair.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Black-box objective; `None` marks a failed evaluation (e.g. no flame).
pub trait Fitness<G>: Sync {
    fn evaluate(&self, genome: &G) -> Option<f64>;
}

impl<G, F> Fitness<G> for F
where
    F: Fn(&G) -> Option<f64> + Sync,
{
    fn evaluate(&self, genome: &G) -> Option<f64> {
        self(genome)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    pub best: f64,
    pub mean: f64,
    pub worst: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunResult<G> {
    pub best: G,
    pub best_score: f64,
    pub history: Vec<GenerationStats>,
    /// Distinct genomes scored.
    pub evaluations: usize,
    pub cache_hits: usize,
    /// Scored genomes that received the surrogate.
    pub failures: usize,
    /// True when the improvement window stopped the run.
    pub converged: bool,
}

/// Scores in parallel, substituting the surrogate for failures.
pub fn evaluate_fitness<G: Sync, F: Fitness<G>>(population: &[G], fitness: &F) -> Vec<f64> {
    population
        .par_iter()
        .map(|g| match fitness.evaluate(g) {
            Some(s) if s.is_finite() => s,
            _ => SURROGATE_SCORE,
        })
        .collect()
}

/// Indices of the `n` best scores, best first; ties go to the lower index.
pub fn select_parents(scores: &[f64], n: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    let rank = |s: f64| if s.is_nan() { f64::NEG_INFINITY } else { s };
    order.sort_by(|&a, &b| rank(scores[b]).total_cmp(&rank(scores[a])));
    order.truncate(n);
    order
}

fn roulette(scores: &[f64], rng: &mut GaRng) -> usize {
    let floor = scores.iter().cloned().fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = scores.iter().map(|s| s - floor).collect();
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return rng.random_range(0..scores.len());
    }
    let mut target = rng.random::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if target < *w {
            return i;
        }
        target -= w;
    }
    scores.len() - 1
}

struct Scorer<'a, S: SearchSpace, F> {
    space: &'a S,
    config: &'a GAConfig,
    constraints: &'a ConstraintSet,
    fitness: &'a F,
    cache: HashMap<Vec<u8>, f64>,
    hits: usize,
    failures: usize,
}

impl<S: SearchSpace, F: Fitness<S::Genome>> Scorer<'_, S, F> {
    fn raw(&self, g: &S::Genome) -> (f64, bool) {
        let x = self.space.decision_vector(g);
        let violation = self.constraints.violation(&x);
        let feasible = self.constraints.is_feasible(&x, FEASIBILITY_TOL);
        if self.config.constraint_mode == ConstraintMode::Repair && !feasible {
            return (SURROGATE_SCORE, true);
        }
        let base = match self.fitness.evaluate(g) {
            Some(s) if s.is_finite() => s,
            _ => return (SURROGATE_SCORE, true),
        };
        match self.config.constraint_mode {
            ConstraintMode::Penalty => (base - self.config.penalty_weight * violation, false),
            ConstraintMode::Repair => (base, false),
        }
    }

    fn score_all(&mut self, population: &[S::Genome]) -> Vec<f64> {
        let keys: Vec<Vec<u8>> = population.iter().map(|g| self.space.key(g)).collect();
        let mut pending: Vec<usize> = Vec::new();
        let mut queued: HashMap<&[u8], ()> = HashMap::new();
        for (i, k) in keys.iter().enumerate() {
            if self.cache.contains_key(k) || queued.contains_key(k.as_slice()) {
                self.hits += 1;
            } else {
                queued.insert(k.as_slice(), ());
                pending.push(i);
            }
        }
        let fresh: Vec<(f64, bool)> = pending.par_iter().map(|&i| self.raw(&population[i])).collect();
        for (&i, (s, failed)) in pending.iter().zip(fresh) {
            self.failures += failed as usize;
            self.cache.insert(keys[i].clone(), s);
        }
        keys.iter().map(|k| self.cache[k]).collect()
    }
}

/// Runs the GA over `space`, maximizing `fitness` subject to `constraints`.
pub fn run<S, F>(
    space: &S,
    config: &GAConfig,
    fitness: &F,
    constraints: &ConstraintSet,
) -> Result<RunResult<S::Genome>, GaError>
where
    S: SearchSpace,
    F: Fitness<S::Genome>,
{
    config.validate()?;
    let mut rng = GaRng::seed_from_u64(config.rng_seed);
    let mut scorer = Scorer {
        space,
        config,
        constraints,
        fitness,
        cache: HashMap::new(),
        hits: 0,
        failures: 0,
    };
    let settle = |g: &mut S::Genome, rng: &mut GaRng| {
        space.repair(g, rng);
        if config.constraint_mode == ConstraintMode::Repair {
            space.project(g, constraints, FEASIBILITY_TOL);
        }
    };

    let mut population: Vec<S::Genome> = (0..config.population_size)
        .map(|_| {
            let mut g = space.sample(&mut rng);
            settle(&mut g, &mut rng);
            g
        })
        .collect();
    let mut history: Vec<GenerationStats> = Vec::new();
    let mut best: Option<(S::Genome, f64)> = None;
    let mut converged = false;

    for generation in 0..config.max_generations {
        let scores = scorer.score_all(&population);
        let order = select_parents(&scores, config.elite_parents);
        let top = order[0];
        if best.as_ref().map_or(true, |(_, s)| scores[top] > *s) {
            best = Some((population[top].clone(), scores[top]));
        }
        history.push(GenerationStats {
            generation,
            best: scores[top],
            mean: scores.iter().sum::<f64>() / scores.len() as f64,
            worst: scores.iter().cloned().fold(f64::INFINITY, f64::min),
        });
        log::debug!("generation {generation}: best {:.6}", scores[top]);

        let w = config.termination_window;
        if history.len() > w && history[generation].best - history[generation - w].best < config.termination_cost_delta {
            converged = true;
            break;
        }
        if generation + 1 == config.max_generations {
            break;
        }

        let mut next: Vec<S::Genome> = order.iter().map(|&i| population[i].clone()).collect();
        while next.len() < config.population_size {
            let (a, b) = match config.selection {
                SelectionMode::Elite => {
                    let i = rng.random_range(0..order.len());
                    let mut j = rng.random_range(0..order.len() - 1);
                    if j >= i {
                        j += 1;
                    }
                    (order[i.min(j)], order[i.max(j)])
                }
                SelectionMode::Roulette => (roulette(&scores, &mut rng), roulette(&scores, &mut rng)),
            };
            let (mut x, mut y) = space.crossover(&population[a], &population[b], &mut rng);
            for child in [&mut x, &mut y] {
                space.mutate(child, config.mutation_rate, &mut rng);
                settle(child, &mut rng);
            }
            next.push(x);
            if next.len() < config.population_size {
                next.push(y);
            }
        }
        population = next;
    }

    let (best, best_score) = best.expect("at least one generation");
    Ok(RunResult {
        best,
        best_score,
        history,
        evaluations: scorer.cache.len(),
        cache_hits: scorer.hits,
        failures: scorer.failures,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toys::{l1_norm, sinc3, sinc3_space, BitSpace, BoxSpace};
    use rand::Rng;

    #[test]
    fn parents_are_top_scores() {
        assert_eq!(select_parents(&[3.0, 1.0, 2.0], 2), vec![0, 2]);
        assert_eq!(select_parents(&[5.0; 6], 2), vec![0, 1]);
        assert_eq!(select_parents(&[f64::NAN, 1.0, 0.5], 2), vec![1, 2]);
    }

    #[test]
    fn parents_match_sort_oracle() {
        let mut rng = GaRng::seed_from_u64(1);
        for _ in 0..50 {
            let scores: Vec<f64> = (0..100).map(|_| (rng.random::<f64>() * 20.0).round()).collect();
            let mut oracle: Vec<(f64, usize)> = scores.iter().cloned().zip(0..).collect();
            oracle.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
            let want: Vec<usize> = oracle.iter().take(2).map(|p| p.1).collect();
            assert_eq!(select_parents(&scores, 2), want);
        }
    }

    #[test]
    fn failures_become_surrogates() {
        let f = |x: &f64| if *x > 0.0 { Some(*x) } else { None };
        assert_eq!(evaluate_fitness(&[1.0, -1.0, 2.0], &f), vec![1.0, SURROGATE_SCORE, 2.0]);
    }

    #[test]
    fn l1_toy_reaches_all_ones() {
        let space = BitSpace { len: 24 };
        let cfg = GAConfig {
            population_size: 40,
            max_generations: 300,
            mutation_rate: 1.0 / 24.0,
            rng_seed: 5,
            ..GAConfig::default()
        };
        let f = |g: &Vec<bool>| Some(l1_norm(g));
        let res = run(&space, &cfg, &f, &ConstraintSet::new()).unwrap();
        assert_eq!(res.best_score, 24.0);
        assert!(res.best.iter().all(|b| *b));
    }

    #[test]
    fn elitism_keeps_best_non_decreasing() {
        let space = sinc3_space();
        let cfg = GAConfig {
            population_size: 30,
            max_generations: 60,
            rng_seed: 11,
            ..GAConfig::default()
        };
        let f = |g: &Vec<f64>| Some(sinc3(g));
        let res = run(&space, &cfg, &f, &ConstraintSet::new()).unwrap();
        assert!(res.history.windows(2).all(|w| w[1].best >= w[0].best));
        assert_eq!(res.best_score, res.history.last().unwrap().best);
    }

    #[test]
    fn huge_termination_delta_stops_after_window() {
        let space = sinc3_space();
        let cfg = GAConfig {
            population_size: 10,
            termination_cost_delta: 1e12,
            ..GAConfig::default()
        };
        let f = |g: &Vec<f64>| Some(sinc3(g));
        let res = run(&space, &cfg, &f, &ConstraintSet::new()).unwrap();
        assert!(res.converged);
        assert!(res.history.len() <= 21);
        assert_eq!(res.history.len(), 21);
    }

    #[test]
    fn same_seed_same_run() {
        let space = sinc3_space();
        let cfg = GAConfig {
            population_size: 20,
            max_generations: 30,
            rng_seed: 99,
            selection: SelectionMode::Roulette,
            ..GAConfig::default()
        };
        let f = |g: &Vec<f64>| Some(sinc3(g));
        let a = run(&space, &cfg, &f, &ConstraintSet::new()).unwrap();
        let b = run(&space, &cfg, &f, &ConstraintSet::new()).unwrap();
        assert_eq!(a.history, b.history);
        assert_eq!(a.best, b.best);
    }

    #[test]
    fn equality_band_holds_at_optimum() {
        let space = BoxSpace::new(vec![0.0, 0.0], vec![20.0, 20.0]);
        let mut cons = ConstraintSet::new();
        cons.add_equality("x + y = 10", vec![1.0, 1.0], 10.0, 1e-6);
        let cfg = GAConfig {
            population_size: 40,
            max_generations: 150,
            rng_seed: 3,
            ..GAConfig::default()
        };
        let f = |g: &Vec<f64>| Some(-(g[0] - 3.0).powi(2) - (g[1] - 4.0).powi(2));
        let res = run(&space, &cfg, &f, &cons).unwrap();
        assert!(cons.equality_residual(0, &res.best).abs() <= 1e-6);
        assert!((res.best[0] - 4.5).abs() < 0.05 && (res.best[1] - 5.5).abs() < 0.05, "{:?}", res.best);
        assert_eq!(res.failures, 0);
    }

    #[test]
    fn penalty_mode_discourages_violations() {
        let space = BoxSpace::new(vec![0.0], vec![10.0]);
        let mut cons = ConstraintSet::new();
        cons.add_inequality("x <= 4", vec![1.0], 4.0);
        let cfg = GAConfig {
            population_size: 30,
            max_generations: 100,
            constraint_mode: ConstraintMode::Penalty,
            mutation_rate: 0.5,
            rng_seed: 8,
            ..GAConfig::default()
        };
        let f = |g: &Vec<f64>| Some(g[0]);
        let res = run(&space, &cfg, &f, &cons).unwrap();
        assert!(res.best[0] <= 4.0 + 1e-3 && res.best[0] > 3.9, "{:?}", res.best);
    }

    #[test]
    fn invalid_config_is_rejected() {
        let space = sinc3_space();
        let cfg = GAConfig {
            elite_parents: 1,
            ..GAConfig::default()
        };
        let f = |g: &Vec<f64>| Some(sinc3(g));
        assert!(run(&space, &cfg, &f, &ConstraintSet::new()).is_err());
    }

    #[test]
    fn cache_serves_elite_copies() {
        let space = sinc3_space();
        let cfg = GAConfig {
            population_size: 20,
            max_generations: 10,
            ..GAConfig::default()
        };
        let f = |g: &Vec<f64>| Some(sinc3(g));
        let res = run(&space, &cfg, &f, &ConstraintSet::new()).unwrap();
        assert!(res.cache_hits >= 2 * 9);
        assert_eq!(res.evaluations + res.cache_hits, 20 * res.history.len());
    }
}
