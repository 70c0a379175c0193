//! Spread iDSDs of equal total liquid around one section, checked against
//! the monosectional envelope.

use serde::{Deserialize, Serialize};

use polyflame_core::InitialDistribution;

use crate::context::FlameContext;
use crate::sweep::{mono_label, run_families, Family, SweepResult};
use crate::ExperimentError;

/// Slack allowed above the monosectional envelope.
pub const BOUND_TOL: f64 = 1e-9;

pub const UNIFORM: &str = "uniform";

pub fn spread_label(level: usize) -> String {
    format!("spread {level}")
}

/// Level 1 is the monosectional at `center`. Level `s > 1` spreads over
/// `|i − center| ≤ s − 1` with Gaussian weights of width
/// `σ = (s − 1)/√(2 ln 12)`, so each first neighbour carries 1/12 of the
/// center weight. Weights are normalized to `total`.
pub fn spread_distribution(
    n_sections: usize,
    center: usize,
    total: f64,
    level: usize,
) -> Result<InitialDistribution, ExperimentError> {
    if level == 0 || !(1..=n_sections).contains(&center) {
        return Err(ExperimentError::InvalidSpec {
            field: "spread",
            reason: format!("level {level} around section {center} of {n_sections}"),
        });
    }
    if level == 1 {
        return Ok(InitialDistribution::monosectional(n_sections, center, total)?);
    }
    let reach = (level - 1) as f64;
    let sigma2 = reach * reach / (2.0 * 12f64.ln());
    let w: Vec<f64> = (1..=n_sections)
        .map(|i| {
            let off = i as f64 - center as f64;
            if off.abs() <= reach {
                (-off * off / (2.0 * sigma2)).exp()
            } else {
                0.0
            }
        })
        .collect();
    let sum: f64 = w.iter().sum();
    Ok(InitialDistribution::new(w.iter().map(|x| total * x / sum).collect())?)
}

/// Spread levels `1..=n_spreads` plus the uniform distribution.
pub fn spreading_suite(
    n_sections: usize,
    center: usize,
    total: f64,
    n_spreads: usize,
) -> Result<Vec<Family>, ExperimentError> {
    let mut out = Vec::new();
    for level in 1..=n_spreads {
        out.push(Family {
            label: spread_label(level),
            init: spread_distribution(n_sections, center, total, level)?,
        });
    }
    out.push(Family {
        label: UNIFORM.into(),
        init: InitialDistribution::new(vec![total / n_sections as f64; n_sections])?,
    });
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundViolation {
    pub curve: String,
    pub e_bar: f64,
    pub eta_max: f64,
    pub envelope: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpreadingReport {
    pub result: SweepResult,
    /// `(Ē, max over monosectionals of η_max)`.
    pub envelope: Vec<(f64, Option<f64>)>,
    pub violations: Vec<BoundViolation>,
    pub bounded: bool,
    /// Spread curve with the highest η_max peak.
    pub peak_curve: Option<String>,
}

/// Evaluates the spreading suite and every monosectional with the same total
/// over `e_grid`, and checks the suite against the monosectional envelope.
pub fn spreading_validation(
    ctx: &FlameContext,
    center: usize,
    total: f64,
    n_spreads: usize,
    e_grid: &[f64],
) -> Result<SpreadingReport, ExperimentError> {
    let n = ctx.params.n_sections;
    let pe = ctx.params.peclet;
    let suite = spreading_suite(n, center, total, n_spreads)?;
    let monos: Vec<Family> = (1..=n)
        .map(|d| {
            Ok(Family {
                label: mono_label(d, total),
                init: InitialDistribution::monosectional(n, d, total)?,
            })
        })
        .collect::<Result<_, ExperimentError>>()?;
    let mut families = suite.clone();
    families.extend(monos.iter().cloned());
    let rows = run_families(ctx, &families, e_grid, &[pe]);
    let failures = rows.iter().filter(|r| r.outcome.error.is_some()).count();
    let result = SweepResult {
        rows,
        failures,
        ..SweepResult::default()
    };

    let envelope: Vec<(f64, Option<f64>)> = e_grid
        .iter()
        .map(|&e| {
            let best = monos
                .iter()
                .filter_map(|m| {
                    result
                        .rows
                        .iter()
                        .find(|r| r.curve == m.label && r.e_bar == e)
                        .and_then(|r| r.outcome.eta_max)
                })
                .fold(None, |acc: Option<f64>, x| Some(acc.map_or(x, |a| a.max(x))));
            (e, best)
        })
        .collect();

    let mut violations = Vec::new();
    for fam in suite.iter().filter(|f| f.init.delta().iter().filter(|d| **d > 0.0).count() > 1) {
        for (k, &(e, env)) in envelope.iter().enumerate() {
            let row = &result.curve(&fam.label, pe)[k];
            if let Some(eta) = row.outcome.eta_max {
                if env.map_or(true, |v| eta > v + BOUND_TOL) {
                    violations.push(BoundViolation {
                        curve: fam.label.clone(),
                        e_bar: e,
                        eta_max: eta,
                        envelope: env,
                    });
                }
            }
        }
    }
    let peak_curve = result
        .peaks()
        .into_iter()
        .filter(|p| suite.iter().any(|f| f.label == p.curve))
        .fold(None, |acc: Option<(String, f64)>, p| match acc {
            Some(a) if a.1 >= p.eta_max => Some(a),
            _ => Some((p.curve, p.eta_max)),
        })
        .map(|p| p.0);
    Ok(SpreadingReport {
        bounded: violations.is_empty() && failures == 0,
        result,
        envelope,
        violations,
        peak_curve,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn second_level_is_five_sixty_five() {
        let d = spread_distribution(9, 5, 0.7, 2).unwrap();
        let want = [0.0, 0.0, 0.0, 0.05, 0.6, 0.05, 0.0, 0.0, 0.0];
        for (a, b) in d.delta().iter().zip(want) {
            assert!((a - b).abs() < 1e-15, "{:?}", d.delta());
        }
    }

    #[test]
    fn every_level_keeps_the_total() {
        for level in 1..=7 {
            let d = spread_distribution(9, 5, 0.7, level).unwrap();
            assert!((d.total() - 0.7).abs() < 1e-14);
            assert_eq!(d.delta().iter().filter(|x| **x > 0.0).count(), (2 * level - 1).min(9));
            let peak = d.delta()[4];
            assert!(d.delta().iter().all(|x| *x <= peak));
        }
        let suite = spreading_suite(9, 5, 0.7, 7).unwrap();
        assert_eq!(suite.len(), 8);
        assert!(suite[7].init.delta().iter().all(|x| (x - 0.7 / 9.0).abs() < 1e-15));
    }

    #[test]
    fn spreading_widens_monotonically() {
        let dom: Vec<f64> = (1..=7)
            .map(|l| spread_distribution(9, 5, 0.7, l).unwrap().dominant_share())
            .collect();
        assert!(dom.windows(2).all(|w| w[1] < w[0]), "{dom:?}");
    }

    #[test]
    fn level_zero_is_rejected() {
        assert!(spread_distribution(9, 5, 0.7, 0).is_err());
        assert!(spread_distribution(9, 10, 0.7, 2).is_err());
    }
}
