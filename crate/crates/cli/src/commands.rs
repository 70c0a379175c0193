use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use polyflame_core::temperature_field::metrics_from_values;
use polyflame_core::{FieldGrid, FieldSolution, GridEvaluator};
use polyflame_experiments::{
    monosectional_sweep, pe_ratios, pe_sensitivity, polysectional_random_sweep, spreading_validation, Family,
    FlameContext, SweepResult,
};
use polyflame_ga::toys::{sinc3, sinc3_space};
use polyflame_ga::{encode, optimize_idsd, run as run_ga, CombustionFitness, ConstraintSet, SURROGATE_SCORE};

use crate::config::{Problem, RunConfig};
use crate::{CliError, Command};

/// What a command produced.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub summary: String,
    pub files: Vec<PathBuf>,
    /// The main JSON artifact (also written to disk).
    pub report: Value,
}

struct Writer<'a> {
    cfg: &'a RunConfig,
    command: &'static str,
    files: Vec<PathBuf>,
}

impl Writer<'_> {
    fn path(&self, suffix: &str, ext: &str) -> PathBuf {
        let stem = if suffix.is_empty() {
            format!("{}-{}", self.command, self.cfg.hash())
        } else {
            format!("{}-{}-{}", self.command, suffix, self.cfg.hash())
        };
        self.cfg.output_dir.join(format!("{stem}.{ext}"))
    }

    fn bytes(&mut self, suffix: &str, ext: &str, data: &[u8]) -> Result<(), CliError> {
        fs::create_dir_all(&self.cfg.output_dir)?;
        let path = self.path(suffix, ext);
        fs::write(&path, data)?;
        self.files.push(path);
        Ok(())
    }

    fn json(&mut self, value: &Value) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(value).expect("report serializes");
        self.bytes("", "json", text.as_bytes())
    }

    fn sweep_csv(&mut self, suffix: &str, result: &SweepResult) -> Result<(), CliError> {
        let mut buf = Vec::new();
        result.write_csv(&mut buf).map_err(|e| CliError::Compute(e.to_string()))?;
        self.bytes(suffix, "csv", &buf)
    }

    fn timing(&mut self, seconds: f64) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(&json!({ "wall_time_s": seconds })).expect("serializes");
        self.bytes("", "timing.json", text.as_bytes())
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializes")
}

fn compute(e: impl std::fmt::Display) -> CliError {
    CliError::Compute(e.to_string())
}

pub fn execute(command: Command, cfg: &RunConfig) -> Result<Outcome, CliError> {
    if command == Command::ShowConfig {
        return Ok(Outcome {
            summary: cfg.to_toml(),
            files: Vec::new(),
            report: to_value(cfg),
        });
    }
    let start = Instant::now();
    let mut w = Writer {
        cfg,
        command: command.name(),
        files: Vec::new(),
    };
    let (summary, report, failure) = match command {
        Command::Field => field(cfg, &mut w)?,
        Command::Optimize => optimize(cfg, &mut w)?,
        Command::Sweep => sweep(cfg, &mut w)?,
        Command::Pe => pe(cfg, &mut w)?,
        Command::Validate => validate(cfg, &mut w)?,
        Command::ShowConfig => unreachable!(),
    };
    w.json(&report)?;
    w.timing(start.elapsed().as_secs_f64())?;
    if let Some(msg) = failure {
        return Err(CliError::Compute(format!("{msg} (artifacts in {})", cfg.output_dir.display())));
    }
    Ok(Outcome {
        summary,
        files: w.files,
        report,
    })
}

type Produced = (String, Value, Option<String>);

fn field(cfg: &RunConfig, w: &mut Writer) -> Result<Produced, CliError> {
    let init = cfg.field_distribution()?;
    let sol = FieldSolution::new(&cfg.model, &init, cfg.numerics.n_modes).map_err(compute)?;
    let grid = FieldGrid::uniform(cfg.numerics.n_xi, cfg.numerics.n_eta, cfg.numerics.eta_top).map_err(compute)?;
    let values = GridEvaluator::new(grid).evaluate(&sol);
    let mut csv = Vec::new();
    values.write_csv(&mut csv)?;
    w.bytes("", "csv", &csv)?;
    let metrics = metrics_from_values(&sol, &values);
    let summary = match &metrics {
        Some(m) => format!("eta_max = {:.6}, T_max = {:.6}", m.eta_max, m.t_max),
        None => "no flame front on the grid".into(),
    };
    let report = json!({
        "command": "field",
        "config": to_value(&cfg.echo()),
        "delta": init.delta(),
        "metrics": to_value(&metrics),
    });
    let failure = metrics.is_none().then(|| "no flame front on the grid".to_string());
    Ok((summary, report, failure))
}

fn optimize(cfg: &RunConfig, _w: &mut Writer) -> Result<Produced, CliError> {
    match cfg.optimize.problem {
        Problem::Sinc => {
            let f = |g: &Vec<f64>| Some(sinc3(g));
            let res = run_ga(&sinc3_space(), &cfg.ga, &f, &ConstraintSet::new()).map_err(compute)?;
            let summary = format!("best {:.6} at {:?} after {} generations", res.best_score, res.best, res.history.len());
            let report = json!({
                "command": "optimize",
                "config": to_value(&cfg.echo()),
                "problem": "sinc",
                "best": res.best,
                "best_score": res.best_score,
                "history": to_value(&res.history),
                "evaluations": res.evaluations,
                "cache_hits": res.cache_hits,
                "failures": res.failures,
                "converged": res.converged,
            });
            Ok((summary, report, None))
        }
        Problem::Idsd => {
            let n = cfg.model.n_sections;
            let params = cfg.model.with_e_bar(cfg.ga.e_bar_const);
            let fitness = CombustionFitness::new(params, cfg.numerics.clone(), cfg.optimize.objective.into())
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let res = optimize_idsd(&cfg.ga, n, cfg.optimize.k_dof, &fitness, None).map_err(compute)?;
            let init = res.best.to_distribution(n).map_err(compute)?;
            let metrics = fitness.metrics(&init).map_err(compute)?;
            let failure = (res.best_score <= SURROGATE_SCORE).then(|| "no chromosome produced a flame".to_string());
            let summary = format!(
                "best {:.6} with sections {:?} fractions {:?} after {} generations ({} evaluations)",
                res.best_score,
                res.best.sections,
                res.best.fractions,
                res.history.len(),
                res.evaluations
            );
            let report = json!({
                "command": "optimize",
                "config": to_value(&cfg.echo()),
                "problem": "idsd",
                "best": to_value(&res.best),
                "best_bits": encode(&res.best, cfg.ga.delta_cap).ok(),
                "best_delta": init.delta(),
                "best_score": res.best_score,
                "best_dominant_share": res.best.dominant_share(),
                "best_metrics": to_value(&metrics),
                "history": to_value(&res.history),
                "evaluations": res.evaluations,
                "cache_hits": res.cache_hits,
                "failures": res.failures,
                "converged": res.converged,
            });
            Ok((summary, report, failure))
        }
    }
}

fn context(cfg: &RunConfig) -> Result<FlameContext, CliError> {
    FlameContext::new(cfg.model.clone(), cfg.numerics.clone()).map_err(|e| CliError::Usage(e.to_string()))
}

fn all_failed(r: &SweepResult) -> bool {
    !r.rows.is_empty() && r.rows.iter().all(|row| row.outcome.eta_max.is_none())
}

fn sweep(cfg: &RunConfig, w: &mut Writer) -> Result<Produced, CliError> {
    let ctx = context(cfg)?;
    let mono = monosectional_sweep(&ctx, &cfg.experiment).map_err(compute)?;
    let random = polysectional_random_sweep(&ctx, &cfg.experiment).map_err(compute)?;
    w.sweep_csv("mono", &mono)?;
    w.sweep_csv("random", &random)?;
    let summary = format!(
        "{} monosectional rows, {} random rows, {} reversals, {} failed points",
        mono.rows.len(),
        random.rows.len(),
        mono.reversals.len(),
        mono.failures + random.failures
    );
    let report = json!({
        "command": "sweep",
        "config": to_value(&cfg.echo()),
        "monosectional": {
            "asymptotes": to_value(&mono.asymptotes),
            "reversals": to_value(&mono.reversals),
            "peaks": to_value(&mono.peaks()),
            "failures": mono.failures,
        },
        "random": {
            "asymptotes": to_value(&random.asymptotes),
            "peaks": to_value(&random.peaks()),
            "failures": random.failures,
        },
    });
    let failure = (all_failed(&mono) && all_failed(&random)).then(|| "no flame at any sweep point".to_string());
    Ok((summary, report, failure))
}

fn pe(cfg: &RunConfig, w: &mut Writer) -> Result<Produced, CliError> {
    let ctx = context(cfg)?;
    let families: Vec<Family> = cfg
        .pe_distributions()?
        .into_iter()
        .map(|(label, init)| Family { label, init })
        .collect();
    let result = pe_sensitivity(&ctx, &cfg.experiment, &families).map_err(compute)?;
    w.sweep_csv("", &result)?;
    let lo = cfg.experiment.pe_list.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = cfg.experiment.pe_list.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let ratios = if lo < hi { pe_ratios(&result, lo, hi) } else { Vec::new() };
    let summary = format!("{} rows over Pe {:?}, {} failed points", result.rows.len(), cfg.experiment.pe_list, result.failures);
    let report = json!({
        "command": "pe",
        "config": to_value(&cfg.echo()),
        "ratios": to_value(&ratios),
        "failures": result.failures,
    });
    let failure = all_failed(&result).then(|| "no flame at any point".to_string());
    Ok((summary, report, failure))
}

fn validate(cfg: &RunConfig, w: &mut Writer) -> Result<Produced, CliError> {
    let ctx = context(cfg)?;
    let e = &cfg.experiment;
    let report = spreading_validation(&ctx, e.center_section, e.total_delta, e.n_spreads, &e.e_bar_grid).map_err(compute)?;
    w.sweep_csv("", &report.result)?;
    let summary = format!(
        "\"bounded\": {} ({} violations, highest peak: {})",
        report.bounded,
        report.violations.len(),
        report.peak_curve.as_deref().unwrap_or("none")
    );
    let value = json!({
        "command": "validate",
        "config": to_value(&cfg.echo()),
        "bounded": report.bounded,
        "violations": to_value(&report.violations),
        "peak_curve": report.peak_curve,
        "envelope": to_value(&report.envelope),
        "failures": report.result.failures,
    });
    let failure = all_failed(&report.result).then(|| "no flame at any point".to_string());
    Ok((summary, value, failure))
}
