use serde::{Deserialize, Serialize};

use crate::context::FlameContext;
use crate::spec::SweepSpec;
use crate::sweep::{run_families, Family, SweepResult};
use crate::ExperimentError;

/// Curves η_max(Ē; Pe) and T_max(Ē; Pe) for the given iDSDs.
pub fn pe_sensitivity(ctx: &FlameContext, spec: &SweepSpec, idsds: &[Family]) -> Result<SweepResult, ExperimentError> {
    spec.validate(ctx.params.n_sections)?;
    let rows = run_families(ctx, idsds, &spec.e_bar_grid, &spec.pe_list);
    let failures = rows.iter().filter(|r| r.outcome.error.is_some()).count();
    Ok(SweepResult {
        rows,
        failures,
        ..SweepResult::default()
    })
}

/// `η_max(Pe_lo)/η_max(Pe_hi)` and `T_max(Pe_hi)/T_max(Pe_lo)` at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeRatio {
    pub curve: String,
    pub e_bar: f64,
    pub pe_lo: f64,
    pub pe_hi: f64,
    pub eta_ratio: f64,
    pub t_ratio: f64,
}

pub fn pe_ratios(result: &SweepResult, pe_lo: f64, pe_hi: f64) -> Vec<PeRatio> {
    let mut out = Vec::new();
    for lo in result.rows.iter().filter(|r| r.peclet == pe_lo) {
        let hi = result
            .rows
            .iter()
            .find(|r| r.peclet == pe_hi && r.curve == lo.curve && r.e_bar == lo.e_bar);
        let Some(hi) = hi else { continue };
        let (Some(el), Some(eh), Some(tl), Some(th)) =
            (lo.outcome.eta_max, hi.outcome.eta_max, lo.outcome.t_max, hi.outcome.t_max)
        else {
            continue;
        };
        out.push(PeRatio {
            curve: lo.curve.clone(),
            e_bar: lo.e_bar,
            pe_lo,
            pe_hi,
            eta_ratio: el / eh,
            t_ratio: th / tl,
        });
    }
    out
}
