use std::time::Instant;

use polyflame_core::{InitialDistribution, ModelParams, Numerics};
use polyflame_ga::toys::{sinc3, sinc3_space};
use polyflame_ga::{optimize_idsd, run, CombustionFitness, ConstraintSet, FitnessKind, GAConfig};
use rayon::prelude::*;

fn fitness(kind: FitnessKind) -> CombustionFitness {
    CombustionFitness::new(ModelParams::default(), Numerics::default(), kind).unwrap()
}

/// Best score over sections × δ ∈ {0, 0.01, …, 0.7}.
fn one_dof_grid(fit: &CombustionFitness) -> (f64, usize, f64) {
    let cells: Vec<(usize, f64)> = (1..=9).flat_map(|d| (0..=70).map(move |i| (d, i as f64 * 0.01))).collect();
    cells
        .par_iter()
        .map(|&(d, delta)| {
            let init = InitialDistribution::monosectional(9, d, delta).unwrap();
            (fit.score_distribution(&init).unwrap_or(f64::NEG_INFINITY), d, delta)
        })
        .reduce(|| (f64::NEG_INFINITY, 0, 0.0), |a, b| if b.0 > a.0 || (b.0 == a.0 && (b.1, b.2) < (a.1, a.2)) { b } else { a })
}

#[test]
fn one_dof_matches_grid_oracle() {
    let fit = fitness(FitnessKind::EtaMax);
    let start = Instant::now();
    let (oracle, d, delta) = one_dof_grid(&fit);
    let t_grid = start.elapsed();
    let start = Instant::now();
    let res = optimize_idsd(&GAConfig::default(), 9, 1, &fit, None).unwrap();
    println!(
        "1-DoF: oracle {oracle:.6} at d={d} δ={delta} ({t_grid:?}); GA {:.6} at {:?} after {} generations, {} evaluations ({:?})",
        res.best_score,
        res.best,
        res.history.len(),
        res.evaluations,
        start.elapsed()
    );
    assert!(res.best_score >= oracle - 1e-3);
    assert!((res.best_score - oracle).abs() <= 1e-3);
    assert!(res.best.total() <= 0.7 + 1e-9);
}

#[test]
fn two_dof_matches_grid_oracle() {
    let fit = fitness(FitnessKind::EtaMax);
    let mut cells = Vec::new();
    for a in 1..=9usize {
        for b in a + 1..=9 {
            for i in 0..=14 {
                for j in 0..=14 - i {
                    cells.push((a, b, i as f64 * 0.05, j as f64 * 0.05));
                }
            }
        }
    }
    let oracle = cells
        .par_iter()
        .map(|&(a, b, x, y)| {
            let init = InitialDistribution::from_pairs(9, &[a, b], &[x, y]).unwrap();
            fit.score_distribution(&init).unwrap_or(f64::NEG_INFINITY)
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    let res = optimize_idsd(&GAConfig::default(), 9, 2, &fit, None).unwrap();
    println!("2-DoF: oracle {oracle:.6}; GA {:.6} at {:?}", res.best_score, res.best);
    assert!(res.best_score >= oracle - 1e-3);
    assert!(res.best.sections[0] != res.best.sections[1]);
}

#[test]
fn sinc_toy_reaches_two() {
    let cfg = GAConfig {
        population_size: 100,
        max_generations: 200,
        ..GAConfig::default()
    };
    let f = |g: &Vec<f64>| Some(sinc3(g));
    let res = run(&sinc3_space(), &cfg, &f, &ConstraintSet::new()).unwrap();
    println!("sinc toy: {:.6} at {:?}", res.best_score, res.best);
    assert!((res.best_score - 2.0).abs() <= 0.02);
}

#[test]
fn evaluated_chromosomes_stay_feasible() {
    use std::sync::Mutex;
    let seen = Mutex::new(Vec::new());
    let f = |ch: &polyflame_ga::Chromosome| {
        seen.lock().unwrap().push(ch.clone());
        Some(ch.fractions.iter().enumerate().map(|(i, x)| (i + 1) as f64 * x).sum())
    };
    let cfg = GAConfig {
        population_size: 40,
        max_generations: 50,
        mutation_rate: 0.5,
        ..GAConfig::default()
    };
    optimize_idsd(&cfg, 9, 4, &f, None).unwrap();
    let seen = seen.into_inner().unwrap();
    assert!(seen.len() > 100);
    for ch in seen {
        assert!(ch.total() <= 0.7 + 1e-9);
        assert!(ch.has_distinct_sections(9));
    }
}
