use polyflame_core::diagnostics::{max_inlet_residual, max_pde_residual, Scalar};
use polyflame_core::{FieldSolution, InitialDistribution, ModelParams};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn mono5(e_bar: f64, n_modes: usize) -> FieldSolution {
    let params = ModelParams {
        e_bar,
        ..ModelParams::default()
    };
    let init = InitialDistribution::monosectional(9, 5, 0.7).unwrap();
    FieldSolution::new(&params, &init, n_modes).unwrap()
}

#[test]
fn interior_residuals_are_small() {
    let sol = mono5(1.0, 400);
    let g = max_pde_residual(&sol, Scalar::Gamma, 1e-3);
    let t = max_pde_residual(&sol, Scalar::GammaT, 1e-3);
    println!("max interior residual: gamma {g:.3e}, gamma_T {t:.3e}");
    assert!(g <= 1e-3 && t <= 1e-3);
}

#[test]
fn inlet_residuals_are_small() {
    let sol = mono5(1.0, 400);
    let g = max_inlet_residual(&sol, Scalar::Gamma, 0.05);
    let t = max_inlet_residual(&sol, Scalar::GammaT, 0.05);
    println!("max inlet residual: gamma {g:.3e}, gamma_T {t:.3e}");
    assert!(g <= 1e-2 && t <= 1e-2);
}

#[test]
fn single_section_inlet_reconstruction() {
    let params = ModelParams {
        n_sections: 1,
        c: 0.5,
        v_ox: 0.2,
        e_bar: 1.0,
        ..ModelParams::default()
    };
    let sol = FieldSolution::new(&params, &InitialDistribution::new(vec![0.7]).unwrap(), 400).unwrap();
    // The inlet functional is the truncated cosine series of the step plus
    // the part of the particular profile beyond the truncation.
    let jump = 1.0 - 0.7 + 0.2;
    let d = sol.spray.delta_coeff()[0];
    let robin = 1.0 + d / 100.0;
    for k in 0..=200 {
        let xi = k as f64 / 200.0;
        let mut projected = 0.5 * (1.0 - 0.7) + 0.5 * -0.2;
        let mut profile_modes = 0.5 * sol.gas.b0[0];
        for n in 1..=400 {
            let w = n as f64 * std::f64::consts::PI;
            projected += 2.0 * jump * (w * 0.5).sin() / w * (w * xi).cos();
            profile_modes += sol.gas.bn.get(0, n) * (w * xi).cos();
        }
        let tail = robin * (sol.gas.profiles[0].unwrap().eval(xi) - profile_modes);
        let functional = sol.gamma(xi, 0.0) - sol.d_gamma_d_eta(xi, 0.0) / 100.0;
        assert!((functional - projected - tail).abs() < 1e-10);
    }
    assert!(max_inlet_residual(&sol, Scalar::Gamma, 0.15) <= 1e-3);
}

#[test]
fn doubling_modes_barely_moves_field() {
    let (a, b) = (mono5(100.0, 200), mono5(100.0, 400));
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (xi, eta) = (rng.random_range(0.0..1.0), rng.random_range(0.01..1.0));
        worst = worst.max((a.gamma(xi, eta) - b.gamma(xi, eta)).abs());
        worst = worst.max((a.gamma_t(xi, eta) - b.gamma_t(xi, eta)).abs());
    }
    println!("200 -> 400 modes: {worst:.3e}");
    assert!(worst <= 1e-6);
}

#[test]
fn far_field_is_flat() {
    let sol = mono5(100.0, 200);
    for k in 0..=20 {
        let xi = k as f64 / 20.0;
        assert!(sol.d_gamma_d_eta(xi, 10.0).abs() <= 1e-8);
        assert!((sol.gamma(xi, 10.0) - sol.gamma_far_field()).abs() <= 1e-8);
    }
}

#[test]
fn source_equals_liquid_loss() {
    let sol = mono5(3.0, 50);
    for eta in [0.01, 0.2, 1.0, 4.0] {
        let h = 1e-5;
        let loss = -(sol.spray.total_liquid(eta + h) - sol.spray.total_liquid(eta - h)) / (2.0 * h);
        let analytic: f64 = {
            let d = sol.spray.delta_coeff();
            let om = sol.spray.omega();
            (0..9).map(|i| (0..=i).map(|j| d[i] * om.get(i, j)).sum::<f64>() * (-d[i] * eta).exp()).sum()
        };
        assert!((sol.vapor_source(0.1, eta) - analytic).abs() <= 1e-9);
        assert!((sol.vapor_source(0.1, eta) - loss).abs() <= 1e-6);
    }
}

#[test]
fn walls_have_zero_flux() {
    let sol = mono5(30.0, 200);
    let h = 1e-6;
    for eta in [0.01, 0.1, 0.4] {
        for (a, b) in [(0.0, h), (1.0 - h, 1.0)] {
            let dg = (sol.gamma(b, eta) - sol.gamma(a, eta)) / h;
            let dt = (sol.gamma_t(b, eta) - sol.gamma_t(a, eta)) / h;
            assert!(dg.abs() < 1e-3 && dt.abs() < 1e-3);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn more_latent_heat_never_warms_fuel_side(
        section in 1usize..=9,
        frac in 0.05f64..0.9,
        e_bar in 1.0f64..1e4,
        xi in 0.0f64..0.17,
        eta in 0.0f64..0.6,
        l1 in 0.0f64..0.9,
        dl in 0.0f64..0.09,
    ) {
        let base = ModelParams { e_bar, ..ModelParams::default() };
        let init = InitialDistribution::monosectional(9, section, frac).unwrap();
        let lo = FieldSolution::new(&ModelParams { lambda_latent: l1, ..base.clone() }, &init, 100).unwrap();
        let hi = FieldSolution::new(&ModelParams { lambda_latent: l1 + dl, ..base }, &init, 100).unwrap();
        prop_assert!(hi.temperature(xi, eta) <= lo.temperature(xi, eta) + 1e-12);
    }

    #[test]
    fn spray_field_tends_to_far_field(
        section in 1usize..=9,
        frac in 0.0f64..1.0,
        e_bar in 100.0f64..1e5,
    ) {
        let params = ModelParams { e_bar, ..ModelParams::default() };
        let init = InitialDistribution::monosectional(9, section, frac).unwrap();
        let sol = FieldSolution::new(&params, &init, 100).unwrap();
        prop_assert!((sol.gamma(0.3, 10.0) - sol.gamma_far_field()).abs() < 1e-9);
    }
}
