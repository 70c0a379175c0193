use serde::{Deserialize, Serialize};

use crate::ExperimentError;

/// `n` points spaced evenly in log between `lo` and `hi` (both included).
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|k| {
            if k == 0 {
                lo
            } else if k == n - 1 {
                hi
            } else {
                (a + (b - a) * k as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

/// Grids shared by the sweep, Pe and ladder studies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    pub e_bar_grid: Vec<f64>,
    pub d_list: Vec<usize>,
    pub delta_list: Vec<f64>,
    pub pe_list: Vec<f64>,
    pub dof_list: Vec<usize>,
    /// Ē values visited by the DoF ladder.
    pub ladder_e_bar: Vec<f64>,
    pub rng_seed: u64,
    /// Random polysectional iDSDs per batch.
    pub n_random: usize,
    /// Total liquid fraction of random and spread iDSDs.
    pub total_delta: f64,
    /// Monosectional control of the random batch; `None` picks the best of `d_list`.
    pub control_section: Option<usize>,
    pub center_section: usize,
    pub n_spreads: usize,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            e_bar_grid: log_grid(1.0, 1e6, 40),
            d_list: vec![1, 3, 5, 7, 9],
            delta_list: vec![0.1, 0.3, 0.5, 0.7, 0.9],
            pe_list: vec![3.0, 10.0, 100.0, 1000.0],
            dof_list: (1..=6).collect(),
            ladder_e_bar: vec![30.0, 100.0, 300.0, 1000.0],
            rng_seed: 0,
            n_random: 10,
            total_delta: 0.7,
            control_section: None,
            center_section: 5,
            n_spreads: 7,
        }
    }
}

impl SweepSpec {
    pub fn validate(&self, n_sections: usize) -> Result<(), ExperimentError> {
        let bad = |field: &'static str, reason: String| Err(ExperimentError::InvalidSpec { field, reason });
        if self.e_bar_grid.is_empty() || self.e_bar_grid.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
            return bad("e_bar_grid", "must be a non-empty list of positive values".into());
        }
        if self.e_bar_grid.windows(2).any(|w| !(w[1] > w[0])) {
            return bad("e_bar_grid", "must be strictly increasing".into());
        }
        if self.d_list.is_empty() || self.d_list.iter().any(|d| !(1..=n_sections).contains(d)) {
            return bad("d_list", format!("needs section indices in 1..={n_sections}"));
        }
        if self.delta_list.is_empty() || self.delta_list.iter().any(|d| !(0.0..=1.0).contains(d)) {
            return bad("delta_list", "needs fractions in [0, 1]".into());
        }
        if self.pe_list.is_empty() || self.pe_list.iter().any(|p| !(*p > 0.0 && p.is_finite())) {
            return bad("pe_list", "needs positive values".into());
        }
        if self.dof_list.is_empty() || self.dof_list.iter().any(|k| !(1..=n_sections).contains(k)) {
            return bad("dof_list", format!("needs values in 1..={n_sections}"));
        }
        if self.ladder_e_bar.is_empty() || self.ladder_e_bar.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
            return bad("ladder_e_bar", "needs positive values".into());
        }
        if !(self.total_delta > 0.0 && self.total_delta <= 1.0) {
            return bad("total_delta", "must lie in (0, 1]".into());
        }
        if let Some(d) = self.control_section {
            if !(1..=n_sections).contains(&d) {
                return bad("control_section", format!("must lie in 1..={n_sections}"));
            }
        }
        if !(1..=n_sections).contains(&self.center_section) {
            return bad("center_section", format!("must lie in 1..={n_sections}"));
        }
        if self.n_spreads == 0 {
            return bad("n_spreads", "must be positive".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_is_forty_log_points() {
        let g = log_grid(1.0, 1e6, 40);
        assert_eq!(g.len(), 40);
        assert_eq!((g[0], g[39]), (1.0, 1e6));
        let r = g[1] / g[0];
        assert!(g.windows(2).all(|w| (w[1] / w[0] - r).abs() < 1e-12));
        SweepSpec::default().validate(9).unwrap();
    }

    #[test]
    fn bad_grids_are_rejected() {
        let spec = SweepSpec {
            e_bar_grid: vec![10.0, 1.0],
            ..SweepSpec::default()
        };
        assert!(spec.validate(9).is_err());
        let spec = SweepSpec {
            d_list: vec![10],
            ..SweepSpec::default()
        };
        assert!(spec.validate(9).is_err());
        let spec = SweepSpec {
            dof_list: vec![],
            ..SweepSpec::default()
        };
        assert!(spec.validate(9).is_err());
    }
}
