//! Temperature coupling function γ_T, the temperature field and flame metrics.
//!
//! With unit Lewis number γ_T obeys the same operator as γ, with the vapor
//! source scaled by `1 − Λ` (latent heat absorbed by evaporation) and an inlet
//! carrying `T₀ + 1 − Σδ` on the fuel side and `T₀` on the oxidizer side.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::field::{FieldValues, GridEvaluator};
use crate::gas_phase::{
    match_inlet, step_coefficients, GasSeriesCoefficients, ParticularProfile, SectionModes, Series, TransportParams,
};
use crate::model::FieldSolution;
use crate::sectional_spray::SprayCoefficients;

pub const LEWIS: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalParams {
    pub lambda_latent: f64,
    pub t0: f64,
}

impl ThermalParams {
    pub fn new(lambda_latent: f64, t0: f64) -> Result<Self> {
        let p = Self { lambda_latent, t0 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_latent >= 0.0 && self.lambda_latent < 1.0) {
            return Err(invalid(
                "lambda_latent",
                format!("must lie in [0, 1), got {}", self.lambda_latent),
            ));
        }
        if !self.t0.is_finite() {
            return Err(invalid("t0", "must be finite"));
        }
        Ok(())
    }

    pub fn lewis(&self) -> f64 {
        LEWIS
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TempSeriesCoefficients {
    pub k0p: Vec<f64>,
    pub knp: SectionModes,
    pub b0p: Vec<f64>,
    pub bnp: SectionModes,
    pub c20p: f64,
    pub c2np: Vec<f64>,
    pub profiles: Vec<Option<ParticularProfile>>,
}

impl TempSeriesCoefficients {
    pub(crate) fn series(&self) -> Series<'_> {
        Series {
            c0: self.c20p,
            cn: &self.c2np,
            b0: &self.b0p,
            bn: &self.bnp,
            profiles: &self.profiles,
        }
    }
}

/// Primed coefficients for a source scaled by `sink_factor` (`1 − Λ`).
pub(crate) fn primed_series(
    spray: &SprayCoefficients,
    gas: &GasSeriesCoefficients,
    sink_factor: f64,
    t0: f64,
    transport: &TransportParams,
) -> TempSeriesCoefficients {
    let k0p: Vec<f64> = gas.k0.iter().map(|k| sink_factor * k).collect();
    let knp = gas.kn.scaled(sink_factor);
    let b0p: Vec<f64> = gas.b0.iter().map(|b| sink_factor * b).collect();
    let bnp = gas.bn.scaled(sink_factor);
    let (a0, an) = step_coefficients(t0 + 1.0 - spray.init().total(), t0, transport.c, gas.n_modes());
    let (c20p, c2np) = match_inlet(a0, &an, &b0p, &bnp, spray.delta_coeff(), transport.peclet, &gas.q);
    TempSeriesCoefficients {
        k0p,
        knp,
        b0p,
        bnp,
        c20p,
        c2np,
        profiles: gas.profiles.iter().map(|p| p.map(|p| p.scaled(sink_factor))).collect(),
    }
}

pub fn temperature_series(
    spray: &SprayCoefficients,
    gas: &GasSeriesCoefficients,
    thermal: &ThermalParams,
    transport: &TransportParams,
) -> Result<TempSeriesCoefficients> {
    thermal.validate()?;
    Ok(primed_series(spray, gas, 1.0 - thermal.lambda_latent, thermal.t0, transport))
}

/// `γ_T(ξ, η)` by direct summation.
pub fn gamma_t(
    xi: f64,
    eta: f64,
    temp: &TempSeriesCoefficients,
    gas: &GasSeriesCoefficients,
    spray: &SprayCoefficients,
) -> f64 {
    temp.series().eval(&gas.q, spray.delta_coeff(), xi, eta).0
}

/// `T = γ_T − γ` where fuel remains (`γ > 0`), `T = γ_T` on the oxidizer side.
pub fn temperature_from(gamma: f64, gamma_t: f64) -> f64 {
    gamma_t - gamma.max(0.0)
}

pub fn temperature_at(xi: f64, eta: f64, solution: &FieldSolution) -> f64 {
    solution.temperature(xi, eta)
}

/// Outcome of scanning the evaluated γ grid column by column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontScan {
    pub points: Vec<(f64, f64)>,
    /// Columns with more than one sign change (the highest crossing is kept).
    pub multi_crossing_columns: usize,
    /// Fuel remains on the top row, so the front may continue above the grid.
    pub truncated: bool,
}

/// Per-column γ = 0 crossings with linear interpolation; `None` when γ never
/// changes sign on the grid.
pub fn scan_front(values: &FieldValues) -> Option<FrontScan> {
    let (nx, ne) = (values.xi.len(), values.eta.len());
    let mut points = Vec::new();
    let mut multi = 0;
    for k in 0..nx {
        let mut highest = None;
        let mut crossings = 0;
        for j in 0..ne - 1 {
            let (a, b) = (values.gamma_at(j, k), values.gamma_at(j + 1, k));
            if (a > 0.0) != (b > 0.0) {
                crossings += 1;
                let t = a / (a - b);
                highest = Some(values.eta[j] + t * (values.eta[j + 1] - values.eta[j]));
            }
        }
        if crossings > 1 {
            multi += 1;
        }
        if let Some(eta) = highest {
            points.push((values.xi[k], eta));
        }
    }
    if points.is_empty() {
        return None;
    }
    if multi > 0 {
        log::warn!("{multi} grid columns cross γ = 0 more than once; kept the highest crossing");
    }
    let truncated = (0..nx).any(|k| values.gamma_at(ne - 1, k) > 0.0);
    Some(FrontScan {
        points,
        multi_crossing_columns: multi,
        truncated,
    })
}

pub fn flame_front(solution: &FieldSolution, evaluator: &GridEvaluator) -> Option<Vec<(f64, f64)>> {
    scan_front(&evaluator.evaluate(solution)).map(|s| s.points)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlameMetrics {
    pub eta_max: f64,
    pub t_max: f64,
    /// Location of the temperature maximum.
    pub t_max_at: (f64, f64),
    pub front: Vec<(f64, f64)>,
    pub multi_crossing_columns: usize,
    pub front_truncated: bool,
}

/// Highest front point and the temperature maximum; `None` when there is no flame.
pub fn flame_metrics(solution: &FieldSolution, evaluator: &GridEvaluator) -> Option<FlameMetrics> {
    metrics_from_values(solution, &evaluator.evaluate(solution))
}

pub fn metrics_from_values(solution: &FieldSolution, values: &FieldValues) -> Option<FlameMetrics> {
    let scan = scan_front(values)?;
    let eta_max = scan.points.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let (t_max, t_max_at) = temperature_peak(solution, values);
    Some(FlameMetrics {
        eta_max,
        t_max,
        t_max_at,
        front: scan.points,
        multi_crossing_columns: scan.multi_crossing_columns,
        front_truncated: scan.truncated,
    })
}

/// Grid maximum of T, refined by golden-section search along η in the
/// argmax column between the neighbouring rows.
pub fn temperature_peak(solution: &FieldSolution, values: &FieldValues) -> (f64, (f64, f64)) {
    let nx = values.xi.len();
    let mut best = (f64::NEG_INFINITY, 0, 0);
    for j in 0..values.eta.len() {
        for k in 0..nx {
            let t = values.temperature_at(j, k);
            if t > best.0 {
                best = (t, j, k);
            }
        }
    }
    let (grid_max, j, k) = best;
    let xi = values.xi[k];
    let lo = values.eta[j.saturating_sub(1)];
    let hi = values.eta[(j + 1).min(values.eta.len() - 1)];
    let (eta, t) = golden_section_max(|e| solution.temperature(xi, e), lo, hi, 1e-10);
    if t > grid_max {
        (t, (xi, eta))
    } else {
        (grid_max, (xi, values.eta[j]))
    }
}

/// Maximizer of a unimodal function on `[lo, hi]`.
pub fn golden_section_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        }
    }
    let x = 0.5 * (lo + hi);
    let fx = f(x);
    [(x, fx), (x1, f1), (x2, f2)]
        .into_iter()
        .fold((x, fx), |acc, p| if p.1 > acc.1 { p } else { acc })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldGrid;
    use crate::gas_phase::SeriesTruncation;
    use crate::sectional_spray::{build_section_grid, InitialDistribution, ResonancePolicy};

    fn parts(delta: Vec<f64>) -> (SprayCoefficients, GasSeriesCoefficients, TransportParams) {
        let g = build_section_grid(delta.len(), 1.0).unwrap();
        let init = InitialDistribution::new(delta).unwrap();
        let spray = SprayCoefficients::new(&g, 2.0, &init, ResonancePolicy::Perturb).unwrap();
        let tp = TransportParams::new(10.0, 0.3, 0.0).unwrap();
        let gas = GasSeriesCoefficients::assemble(&spray, &tp, SeriesTruncation::new(30).unwrap()).unwrap();
        (spray, gas, tp)
    }

    #[test]
    fn full_latent_heat_cancels_source() {
        let (spray, gas, tp) = parts(vec![0.2, 0.1, 0.3]);
        let t = primed_series(&spray, &gas, 0.0, 0.0, &tp);
        assert!(t.k0p.iter().chain(&t.b0p).all(|&v| v == 0.0));
        assert!((1..=30).all(|n| (0..3).all(|i| t.knp.get(i, n) == 0.0 && t.bnp.get(i, n) == 0.0)));
        assert!(temperature_series(&spray, &gas, &ThermalParams { lambda_latent: 1.0, t0: 0.0 }, &tp).is_err());
    }

    #[test]
    fn no_latent_heat_keeps_gas_coefficients() {
        let (spray, gas, tp) = parts(vec![0.2, 0.1, 0.3]);
        let t = temperature_series(&spray, &gas, &ThermalParams::new(0.0, 0.0).unwrap(), &tp).unwrap();
        assert_eq!(t.b0p, gas.b0);
        assert_eq!(t.bnp, gas.bn);
        // With V = 0 the inlet steps coincide, so the whole series does.
        assert!((t.c20p - gas.c20).abs() < 1e-15);
        assert!(t.c2np.iter().zip(&gas.c2n).all(|(a, b)| (a - b).abs() < 1e-15));
    }

    #[test]
    fn half_latent_heat_halves_k() {
        let (spray, gas, tp) = parts(vec![0.2, 0.1, 0.3]);
        let t = temperature_series(&spray, &gas, &ThermalParams::new(0.5, 0.0).unwrap(), &tp).unwrap();
        for i in 0..3 {
            assert_eq!(t.k0p[i], 0.5 * gas.k0[i]);
            for n in 1..=30 {
                assert_eq!(t.knp.get(i, n), 0.5 * gas.kn.get(i, n));
            }
        }
    }

    #[test]
    fn temperature_split() {
        assert_eq!(temperature_from(0.3, 0.5), 0.2);
        assert_eq!(temperature_from(-0.3, 0.5), 0.5);
    }

    #[test]
    fn planted_level_set_is_recovered() {
        let c = 0.4;
        let grid = FieldGrid::uniform(41, 81, 0.8).unwrap();
        let mut values = FieldValues::zeros(&grid);
        for j in 0..grid.eta.len() {
            for k in 0..grid.xi.len() {
                let g = (c - grid.xi[k]) - grid.eta[j];
                values.set(j, k, g, 0.0);
            }
        }
        let scan = scan_front(&values).unwrap();
        assert_eq!(scan.multi_crossing_columns, 0);
        assert!(!scan.truncated);
        for (xi, eta) in &scan.points {
            assert!(*xi < c);
            assert!((eta - (c - xi)).abs() < 1e-12);
        }
        assert_eq!(scan.points.len(), 16);
    }

    #[test]
    fn uniform_sign_has_no_front() {
        let grid = FieldGrid::uniform(11, 11, 1.0).unwrap();
        let mut values = FieldValues::zeros(&grid);
        for j in 0..11 {
            for k in 0..11 {
                values.set(j, k, 1.0 + j as f64, 0.0);
            }
        }
        assert!(scan_front(&values).is_none());
    }

    #[test]
    fn multiple_crossings_keep_highest() {
        let grid = FieldGrid::new(vec![0.0, 1.0], vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        let mut values = FieldValues::zeros(&grid);
        for (j, g) in [1.0, -1.0, 1.0, -1.0].into_iter().enumerate() {
            values.set(j, 0, g, 0.0);
            values.set(j, 1, -1.0, 0.0);
        }
        let scan = scan_front(&values).unwrap();
        assert_eq!(scan.multi_crossing_columns, 1);
        assert_eq!(scan.points, vec![(0.0, 2.5)]);
    }

    #[test]
    fn golden_section_finds_peak() {
        let (x, f) = golden_section_max(|x| -(x - 0.3f64).powi(2) + 2.0, 0.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-6);
        assert!((f - 2.0).abs() < 1e-12);
        let (x, _) = golden_section_max(|x| 1.0 - (x - 0.7f64).abs(), 0.0, 1.0, 1e-12);
        assert!((x - 0.7).abs() < 1e-9);
    }
}
