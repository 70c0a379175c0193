use serde::{Deserialize, Serialize};

use polyflame_core::{FieldGrid, FieldSolution, GridEvaluator, InitialDistribution, ModelParams, Numerics};

use crate::ExperimentError;

/// Fixed model and grid used to evaluate many iDSDs.
#[derive(Debug)]
pub struct FlameContext {
    pub params: ModelParams,
    pub numerics: Numerics,
    evaluator: GridEvaluator,
}

/// Flame metrics of one (iDSD, Ē, Pe) point, or the reason there are none.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointOutcome {
    pub eta_max: Option<f64>,
    pub t_max: Option<f64>,
    pub front_truncated: bool,
    pub multi_crossing_columns: usize,
    pub error: Option<String>,
}

impl PointOutcome {
    fn failed(msg: String) -> Self {
        Self {
            eta_max: None,
            t_max: None,
            front_truncated: false,
            multi_crossing_columns: 0,
            error: Some(msg),
        }
    }

    pub fn flags(&self) -> String {
        let mut f = Vec::new();
        if self.error.is_some() {
            f.push("error");
        } else if self.eta_max.is_none() {
            f.push("no_flame");
        }
        if self.front_truncated {
            f.push("truncated");
        }
        if self.multi_crossing_columns > 0 {
            f.push("multi_crossing");
        }
        f.join("|")
    }
}

impl FlameContext {
    pub fn new(params: ModelParams, numerics: Numerics) -> Result<Self, ExperimentError> {
        params.validate()?;
        numerics.validate()?;
        let grid = FieldGrid::uniform(numerics.n_xi, numerics.n_eta, numerics.eta_top)?;
        Ok(Self {
            params,
            numerics,
            evaluator: GridEvaluator::new(grid),
        })
    }

    pub fn evaluate(&self, init: &InitialDistribution, e_bar: f64, peclet: f64) -> PointOutcome {
        let params = self.params.with_e_bar(e_bar).with_peclet(peclet);
        let sol = match FieldSolution::new(&params, init, self.numerics.n_modes) {
            Ok(s) => s,
            Err(e) => return PointOutcome::failed(e.to_string()),
        };
        match polyflame_core::flame_metrics(&sol, &self.evaluator) {
            Some(m) => PointOutcome {
                eta_max: Some(m.eta_max),
                t_max: Some(m.t_max),
                front_truncated: m.front_truncated,
                multi_crossing_columns: m.multi_crossing_columns,
                error: None,
            },
            None => PointOutcome {
                eta_max: None,
                t_max: None,
                front_truncated: false,
                multi_crossing_columns: 0,
                error: None,
            },
        }
    }

    /// Evaluation at the context's own Ē and Pe.
    pub fn evaluate_default(&self, init: &InitialDistribution) -> PointOutcome {
        self.evaluate(init, self.params.e_bar, self.params.peclet)
    }
}
