//! Coarse (c, V) search for a gaseous flame with a target height and temperature.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use polyflame_core::{InitialDistribution, ModelParams, Numerics};

use crate::context::FlameContext;
use crate::ExperimentError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationTarget {
    pub eta_max: f64,
    pub eta_tol: f64,
    pub t_max: f64,
    pub t_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationCell {
    pub c: f64,
    pub v_ox: f64,
    pub eta_max: Option<f64>,
    pub t_max: Option<f64>,
    /// Worst of the two errors in units of their tolerances.
    pub misfit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub target: CalibrationTarget,
    pub cells: Vec<CalibrationCell>,
    pub best: CalibrationCell,
}

impl Calibration {
    pub fn within_tolerance(&self) -> bool {
        self.best.misfit <= 1.0
    }
}

pub fn calibrate_gaseous(
    base: &ModelParams,
    numerics: &Numerics,
    c_grid: &[f64],
    v_grid: &[f64],
    target: CalibrationTarget,
) -> Result<Calibration, ExperimentError> {
    let pairs: Vec<(f64, f64)> = c_grid.iter().flat_map(|&c| v_grid.iter().map(move |&v| (c, v))).collect();
    let cells: Vec<CalibrationCell> = pairs
        .par_iter()
        .map(|&(c, v_ox)| {
            let params = ModelParams { c, v_ox, ..base.clone() };
            let point = FlameContext::new(params, numerics.clone())
                .map(|ctx| ctx.evaluate_default(&InitialDistribution::zeros(base.n_sections)));
            let (eta, t) = match point {
                Ok(p) => (p.eta_max, p.t_max),
                Err(_) => (None, None),
            };
            let misfit = match (eta, t) {
                (Some(e), Some(t)) => {
                    ((e - target.eta_max).abs() / target.eta_tol).max((t - target.t_max).abs() / target.t_tol)
                }
                _ => f64::INFINITY,
            };
            CalibrationCell {
                c,
                v_ox,
                eta_max: eta,
                t_max: t,
                misfit,
            }
        })
        .collect();
    let best = cells
        .iter()
        .fold(None, |acc: Option<&CalibrationCell>, x| match acc {
            Some(a) if a.misfit <= x.misfit => Some(a),
            _ => Some(x),
        })
        .filter(|b| b.misfit.is_finite())
        .cloned()
        .ok_or(ExperimentError::NoFlame)?;
    Ok(Calibration { target, cells, best })
}
