//! Residual checks of an assembled solution against its governing equations.

use crate::model::FieldSolution;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scalar {
    Gamma,
    GammaT,
}

fn value(sol: &FieldSolution, which: Scalar, xi: f64, eta: f64) -> f64 {
    match which {
        Scalar::Gamma => sol.gamma(xi, eta),
        Scalar::GammaT => sol.gamma_t(xi, eta),
    }
}

fn source(sol: &FieldSolution, which: Scalar, xi: f64, eta: f64) -> f64 {
    let s = sol.vapor_source(xi, eta);
    match which {
        Scalar::Gamma => s,
        Scalar::GammaT => (1.0 - sol.thermal.lambda_latent) * s,
    }
}

/// Inlet step value at ξ (fuel side `ξ ≤ c`).
pub fn inlet_value(sol: &FieldSolution, which: Scalar, xi: f64) -> f64 {
    let liquid = sol.spray.init().total();
    let fuel_side = xi <= sol.transport.c;
    match (which, fuel_side) {
        (Scalar::Gamma, true) => 1.0 - liquid,
        (Scalar::Gamma, false) => -sol.transport.v_ox,
        (Scalar::GammaT, true) => sol.thermal.t0 + 1.0 - liquid,
        (Scalar::GammaT, false) => sol.thermal.t0,
    }
}

/// `f_η − f_ξξ − f_ηη/Pe² − source` by fourth-order central differences of
/// spacing `h`.
pub fn pde_residual(sol: &FieldSolution, which: Scalar, xi: f64, eta: f64, h: f64) -> f64 {
    let f = |x, e| value(sol, which, x, e);
    let mid = f(xi, eta);
    let (n1, n2, s1, s2) = (f(xi, eta + h), f(xi, eta + 2.0 * h), f(xi, eta - h), f(xi, eta - 2.0 * h));
    let (e1, e2, w1, w2) = (f(xi + h, eta), f(xi + 2.0 * h, eta), f(xi - h, eta), f(xi - 2.0 * h, eta));
    let d_eta = (-n2 + 8.0 * n1 - 8.0 * s1 + s2) / (12.0 * h);
    let d_xixi = (-e2 + 16.0 * e1 - 30.0 * mid + 16.0 * w1 - w2) / (12.0 * h * h);
    let d_etaeta = (-n2 + 16.0 * n1 - 30.0 * mid + 16.0 * s1 - s2) / (12.0 * h * h);
    let pe2 = sol.transport.peclet.powi(2);
    d_eta - d_xixi - d_etaeta / pe2 - source(sol, which, xi, eta)
}

/// Interior sample lattice: `0.05 ≤ ξ ≤ 0.95` away from the channel edge,
/// `0.01 ≤ η ≤ 1`.
pub fn interior_points(c: f64) -> Vec<(f64, f64)> {
    let etas = [0.01, 0.02, 0.05, 0.1, 0.2, 0.35, 0.5, 0.75, 1.0];
    let mut pts = Vec::new();
    for k in 0..=36 {
        let xi = 0.05 + 0.025 * k as f64;
        if (xi - c).abs() <= 0.05 {
            continue;
        }
        pts.extend(etas.iter().map(|&eta| (xi, eta)));
    }
    pts
}

pub fn max_pde_residual(sol: &FieldSolution, which: Scalar, h: f64) -> f64 {
    interior_points(sol.transport.c)
        .into_iter()
        .map(|(xi, eta)| pde_residual(sol, which, xi, eta, h).abs())
        .fold(0.0, f64::max)
}

/// `f − f_η/Pe² − step(ξ)` at η = 0 with the exact series derivative.
pub fn inlet_residual(sol: &FieldSolution, which: Scalar, xi: f64) -> f64 {
    let pe2 = sol.transport.peclet.powi(2);
    let (f, df) = match which {
        Scalar::Gamma => (sol.gamma(xi, 0.0), sol.d_gamma_d_eta(xi, 0.0)),
        Scalar::GammaT => (sol.gamma_t(xi, 0.0), sol.d_gamma_t_d_eta(xi, 0.0)),
    };
    f - df / pe2 - inlet_value(sol, which, xi)
}

/// Worst inlet residual on 1001 points, skipping `|ξ − c| ≤ gibbs_zone`.
pub fn max_inlet_residual(sol: &FieldSolution, which: Scalar, gibbs_zone: f64) -> f64 {
    (0..=1000)
        .map(|k| k as f64 / 1000.0)
        .filter(|xi| (xi - sol.transport.c).abs() > gibbs_zone)
        .map(|xi| inlet_residual(sol, which, xi).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelParams;
    use crate::sectional_spray::InitialDistribution;

    #[test]
    fn lattice_avoids_channel_edge() {
        let pts = interior_points(0.17);
        assert!(pts.iter().all(|(x, e)| (x - 0.17).abs() > 0.05 && *e >= 0.01 && *x <= 0.95 + 1e-12));
        assert!(pts.len() > 200);
    }

    #[test]
    fn inlet_values_follow_streams() {
        let params = ModelParams {
            t0: 0.2,
            ..ModelParams::default()
        };
        let init = InitialDistribution::monosectional(9, 3, 0.4).unwrap();
        let sol = FieldSolution::new(&params, &init, 10).unwrap();
        assert!((inlet_value(&sol, Scalar::Gamma, 0.1) - 0.6).abs() < 1e-15);
        assert_eq!(inlet_value(&sol, Scalar::Gamma, 0.9), -0.3);
        assert!((inlet_value(&sol, Scalar::GammaT, 0.1) - 0.8).abs() < 1e-15);
        assert_eq!(inlet_value(&sol, Scalar::GammaT, 0.9), 0.2);
    }
}
