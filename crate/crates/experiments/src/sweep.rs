//! Ē sweeps over families of iDSDs.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use polyflame_core::InitialDistribution;

use crate::context::{FlameContext, PointOutcome};
use crate::reversal::detect_reversal;
use crate::spec::SweepSpec;
use crate::ExperimentError;

pub const GASEOUS: &str = "gaseous";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub curve: String,
    pub e_bar: f64,
    pub peclet: f64,
    pub delta: Vec<f64>,
    #[serde(flatten)]
    pub outcome: PointOutcome,
}

/// Relative distance of a curve's last point from the gaseous height.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Asymptote {
    pub curve: String,
    pub peclet: f64,
    pub e_bar: f64,
    pub eta_max: Option<f64>,
    pub gaseous_eta_max: Option<f64>,
    pub relative_gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reversal {
    pub section: usize,
    pub lower_delta: f64,
    pub upper_delta: f64,
    pub e_bar_rev: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePeak {
    pub curve: String,
    pub peclet: f64,
    pub e_bar: f64,
    pub eta_max: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub asymptotes: Vec<Asymptote>,
    pub reversals: Vec<Reversal>,
    pub failures: usize,
}

/// One curve of a sweep: a labelled iDSD.
#[derive(Debug, Clone, PartialEq)]
pub struct Family {
    pub label: String,
    pub init: InitialDistribution,
}

pub fn mono_label(d: usize, delta: f64) -> String {
    format!("mono d={d} delta={delta}")
}

impl SweepResult {
    pub fn curve_labels(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.curve) {
                out.push(r.curve.clone());
            }
        }
        out
    }

    pub fn curve(&self, label: &str, peclet: f64) -> Vec<&SweepRow> {
        self.rows.iter().filter(|r| r.curve == label && r.peclet == peclet).collect()
    }

    /// η_max peak of every curve at every Pe.
    pub fn peaks(&self) -> Vec<CurvePeak> {
        let mut out = Vec::new();
        let mut pes: Vec<f64> = Vec::new();
        for r in &self.rows {
            if !pes.contains(&r.peclet) {
                pes.push(r.peclet);
            }
        }
        for label in self.curve_labels() {
            for &pe in &pes {
                let best = self
                    .curve(&label, pe)
                    .into_iter()
                    .filter_map(|r| r.outcome.eta_max.map(|e| (e, r.e_bar)))
                    .fold(None, |acc: Option<(f64, f64)>, p| match acc {
                        Some(a) if a.0 >= p.0 => Some(a),
                        _ => Some(p),
                    });
                if let Some((eta, e_bar)) = best {
                    out.push(CurvePeak {
                        curve: label.clone(),
                        peclet: pe,
                        e_bar,
                        eta_max: eta,
                    });
                }
            }
        }
        out
    }

    /// CSV with header `curve,e_bar,peclet,delta,eta_max,t_max,flags`;
    /// `delta` lists the per-section fractions separated by `;`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), ExperimentError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["curve", "e_bar", "peclet", "delta", "eta_max", "t_max", "flags"])?;
        for r in &self.rows {
            let delta: Vec<String> = r.delta.iter().map(|d| d.to_string()).collect();
            let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
            w.write_record([
                r.curve.clone(),
                r.e_bar.to_string(),
                r.peclet.to_string(),
                delta.join(";"),
                opt(r.outcome.eta_max),
                opt(r.outcome.t_max),
                r.outcome.flags(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Every family at every (Pe, Ē), in family-major then Pe then Ē order.
pub fn run_families(ctx: &FlameContext, families: &[Family], e_grid: &[f64], pe_list: &[f64]) -> Vec<SweepRow> {
    let tasks: Vec<(usize, f64, f64)> = families
        .iter()
        .enumerate()
        .flat_map(|(i, _)| pe_list.iter().flat_map(move |&pe| e_grid.iter().map(move |&e| (i, pe, e))))
        .collect();
    tasks
        .par_iter()
        .map(|&(i, pe, e)| {
            let f = &families[i];
            SweepRow {
                curve: f.label.clone(),
                e_bar: e,
                peclet: pe,
                delta: f.init.delta().to_vec(),
                outcome: ctx.evaluate(&f.init, e, pe),
            }
        })
        .collect()
}

fn finish(ctx: &FlameContext, rows: Vec<SweepRow>, pe_list: &[f64]) -> SweepResult {
    let failures = rows.iter().filter(|r| r.outcome.error.is_some()).count();
    for r in rows.iter().filter(|r| r.outcome.error.is_some()) {
        log::warn!("{} at Ē={} Pe={}: {}", r.curve, r.e_bar, r.peclet, r.outcome.error.as_deref().unwrap_or(""));
    }
    let mut result = SweepResult {
        rows,
        asymptotes: Vec::new(),
        reversals: Vec::new(),
        failures,
    };
    let gas = InitialDistribution::zeros(ctx.params.n_sections);
    for &pe in pe_list {
        let gaseous = ctx.evaluate(&gas, ctx.params.e_bar, pe).eta_max;
        for label in result.curve_labels() {
            if let Some(last) = result.curve(&label, pe).last() {
                let eta = last.outcome.eta_max;
                result.asymptotes.push(Asymptote {
                    curve: label.clone(),
                    peclet: pe,
                    e_bar: last.e_bar,
                    eta_max: eta,
                    gaseous_eta_max: gaseous,
                    relative_gap: eta.zip(gaseous).map(|(a, g)| (a - g).abs() / g),
                });
            }
        }
    }
    result
}

/// Curves η_max(Ē) and T_max(Ē) for every `(d, δ)` in the spec plus the
/// gaseous baseline, at the context's Pe. Reversals are detected between
/// consecutive δ values of each section.
pub fn monosectional_sweep(ctx: &FlameContext, spec: &SweepSpec) -> Result<SweepResult, ExperimentError> {
    let n = ctx.params.n_sections;
    spec.validate(n)?;
    let mut families = vec![Family {
        label: GASEOUS.into(),
        init: InitialDistribution::zeros(n),
    }];
    for &d in &spec.d_list {
        for &delta in &spec.delta_list {
            families.push(Family {
                label: mono_label(d, delta),
                init: InitialDistribution::monosectional(n, d, delta)?,
            });
        }
    }
    let pe = ctx.params.peclet;
    let rows = run_families(ctx, &families, &spec.e_bar_grid, &[pe]);
    let mut result = finish(ctx, rows, &[pe]);

    let mut deltas = spec.delta_list.clone();
    deltas.sort_by(f64::total_cmp);
    deltas.dedup();
    for &d in &spec.d_list {
        for pair in deltas.windows(2) {
            let (lo, hi) = (pair[0], pair[1]);
            let eta = |delta: f64| -> Vec<Option<f64>> {
                result.curve(&mono_label(d, delta), pe).iter().map(|r| r.outcome.eta_max).collect()
            };
            let (a, b) = (eta(hi), eta(lo));
            let init_lo = InitialDistribution::monosectional(n, d, lo)?;
            let init_hi = InitialDistribution::monosectional(n, d, hi)?;
            let diff = |e: f64| {
                let a = ctx.evaluate(&init_hi, e, pe).eta_max?;
                let b = ctx.evaluate(&init_lo, e, pe).eta_max?;
                Some(a - b)
            };
            if let Some(e_rev) = detect_reversal(&spec.e_bar_grid, &a, &b, Some(&diff)) {
                result.reversals.push(Reversal {
                    section: d,
                    lower_delta: lo,
                    upper_delta: hi,
                    e_bar_rev: e_rev,
                });
            }
        }
    }
    Ok(result)
}

/// Symmetric Dirichlet(1) weights over `n` sections; they sum to 1.
pub fn dirichlet_weights(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let draws: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let sum: f64 = draws.iter().sum();
    draws.into_iter().map(|x| x / sum).collect()
}

/// Dirichlet(1) weights scaled to `total`.
pub fn random_idsd(n: usize, total: f64, rng: &mut ChaCha8Rng) -> Result<InitialDistribution, ExperimentError> {
    let w = dirichlet_weights(n, rng);
    let mut delta: Vec<f64> = w.iter().map(|x| x * total).collect();
    let sum: f64 = delta.iter().sum();
    if sum > total {
        let s = total / sum;
        delta.iter_mut().for_each(|d| *d *= s);
    }
    Ok(InitialDistribution::new(delta)?)
}

/// `n_random` Dirichlet iDSDs with `total_delta` liquid, one monosectional
/// control with the same total, and the gaseous baseline.
pub fn polysectional_random_sweep(ctx: &FlameContext, spec: &SweepSpec) -> Result<SweepResult, ExperimentError> {
    let n = ctx.params.n_sections;
    spec.validate(n)?;
    let pe = ctx.params.peclet;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    let mut families = vec![Family {
        label: GASEOUS.into(),
        init: InitialDistribution::zeros(n),
    }];
    let control = match spec.control_section {
        Some(d) => d,
        None => {
            let monos: Vec<Family> = spec
                .d_list
                .iter()
                .map(|&d| {
                    Ok(Family {
                        label: mono_label(d, spec.total_delta),
                        init: InitialDistribution::monosectional(n, d, spec.total_delta)?,
                    })
                })
                .collect::<Result<_, ExperimentError>>()?;
            let probe = finish(ctx, run_families(ctx, &monos, &spec.e_bar_grid, &[pe]), &[]);
            let peaks = probe.peaks();
            let best = peaks
                .iter()
                .fold(None, |acc: Option<&CurvePeak>, p| match acc {
                    Some(a) if a.eta_max >= p.eta_max => Some(a),
                    _ => Some(p),
                })
                .ok_or(ExperimentError::NoFlame)?;
            spec.d_list[monos.iter().position(|f| f.label == best.curve).expect("peak of a probed curve")]
        }
    };
    families.push(Family {
        label: format!("control {}", mono_label(control, spec.total_delta)),
        init: InitialDistribution::monosectional(n, control, spec.total_delta)?,
    });
    for i in 0..spec.n_random {
        families.push(Family {
            label: format!("random {i}"),
            init: random_idsd(n, spec.total_delta, &mut rng)?,
        });
    }
    let rows = run_families(ctx, &families, &spec.e_bar_grid, &[pe]);
    Ok(finish(ctx, rows, &[pe]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dirichlet_weights_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let w = dirichlet_weights(9, &mut rng);
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(w.iter().all(|x| *x >= 0.0));
            let d = random_idsd(9, 0.7, &mut rng).unwrap();
            assert!(d.total() <= 0.7 + 1e-15 && d.total() > 0.7 - 1e-12);
        }
    }

    #[test]
    fn dirichlet_marginal_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 20_000;
        let mean = (0..n).map(|_| dirichlet_weights(4, &mut rng)[2]).sum::<f64>() / n as f64;
        assert!((mean - 0.25).abs() < 0.005, "{mean}");
    }

    #[test]
    fn csv_has_stable_header() {
        let result = SweepResult {
            rows: vec![SweepRow {
                curve: "x".into(),
                e_bar: 1.0,
                peclet: 10.0,
                delta: vec![0.1, 0.2],
                outcome: PointOutcome {
                    eta_max: Some(0.2),
                    t_max: None,
                    front_truncated: true,
                    multi_crossing_columns: 0,
                    error: None,
                },
            }],
            ..SweepResult::default()
        };
        let mut buf = Vec::new();
        result.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("curve,e_bar,peclet,delta,eta_max,t_max,flags"));
        assert_eq!(lines.next(), Some("x,1,10,0.1;0.2,0.2,,truncated"));
    }
}
