//! Truncated cosine-series solution of the coupled mass-fraction field γ(ξ, η).
//!
//! The field obeys `γ_η = γ_ξξ + γ_ηη/Pe² + S̄_d` on `0 ≤ ξ ≤ 1`, `η ≥ 0` with
//! zero-flux walls, the mixed inlet condition `γ − γ_η/Pe² = step(ξ)` and a
//! flat far field. Each section contributes a particular solution decaying
//! like `e^{−Δᵢη}`; the homogeneous modes decay like `e^{qₙη}`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, ModelError, Result};
use crate::sectional_spray::{InitialDistribution, SprayCoefficients, RESONANCE_TOLERANCE};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransportParams {
    pub peclet: f64,
    pub c: f64,
    pub v_ox: f64,
}

impl TransportParams {
    pub fn new(peclet: f64, c: f64, v_ox: f64) -> Result<Self> {
        let p = Self { peclet, c, v_ox };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.peclet > 0.0 && self.peclet.is_finite()) {
            return Err(invalid("peclet", format!("must be positive, got {}", self.peclet)));
        }
        if !(self.c > 0.0 && self.c < 1.0) {
            return Err(invalid("c", format!("must lie in (0, 1), got {}", self.c)));
        }
        if !(self.v_ox >= 0.0 && self.v_ox.is_finite()) {
            return Err(invalid("v_ox", format!("must be non-negative, got {}", self.v_ox)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesTruncation {
    pub n_modes: usize,
}

impl SeriesTruncation {
    pub fn new(n_modes: usize) -> Result<Self> {
        if n_modes == 0 {
            return Err(invalid("n_modes", "must be at least 1"));
        }
        Ok(Self { n_modes })
    }
}

/// Row-major `N × n_modes` table; column `m` holds mode `n = m + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionModes {
    n_sections: usize,
    n_modes: usize,
    data: Vec<f64>,
}

impl SectionModes {
    pub fn zeros(n_sections: usize, n_modes: usize) -> Self {
        Self {
            n_sections,
            n_modes,
            data: vec![0.0; n_sections * n_modes],
        }
    }

    pub fn n_sections(&self) -> usize {
        self.n_sections
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    /// Coefficient of section `i` (0-based) and mode `n` (1-based).
    pub fn get(&self, i: usize, n: usize) -> f64 {
        self.data[i * self.n_modes + n - 1]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n_modes..(i + 1) * self.n_modes]
    }

    fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.n_modes..(i + 1) * self.n_modes]
    }

    pub(crate) fn scaled(&self, factor: f64) -> Self {
        Self {
            n_sections: self.n_sections,
            n_modes: self.n_modes,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }
}

/// `qₙ = (Pe²/2)(1 − √(1 + 4(nπ)²/Pe²))`, written in a cancellation-free form.
pub fn decay_exponent(peclet: f64, n: usize) -> f64 {
    let w = n as f64 * PI;
    let root = (1.0 + 4.0 * w * w / (peclet * peclet)).sqrt();
    -2.0 * w * w / (1.0 + root)
}

pub fn decay_exponents(peclet: f64, n_modes: usize) -> Vec<f64> {
    (1..=n_modes).map(|n| decay_exponent(peclet, n)).collect()
}

/// `Sᵢ = Σ_{j ≤ i} Ωᵢⱼ`, the amplitude of section `i` in the vapor source.
pub fn heaviside_partial_sums(spray: &SprayCoefficients) -> Vec<f64> {
    (0..spray.n_sections()).map(|i| spray.omega().row_sum(i)).collect()
}

/// Cosine coefficients of `Sᵢ·𝟙[ξ ≤ c]`: `k₀ᵢ = 2cSᵢ`, `kₙᵢ = 2Sᵢ sin(nπc)/(nπ)`.
pub fn heaviside_fourier(s: &[f64], c: f64, n_modes: usize) -> (Vec<f64>, SectionModes) {
    let k0 = s.iter().map(|v| 2.0 * c * v).collect();
    let shape: Vec<f64> = (1..=n_modes)
        .map(|n| {
            let w = n as f64 * PI;
            2.0 * (w * c).sin() / w
        })
        .collect();
    let mut kn = SectionModes::zeros(s.len(), n_modes);
    for (i, &si) in s.iter().enumerate() {
        for (dst, f) in kn.row_mut(i).iter_mut().zip(&shape) {
            *dst = si * f;
        }
    }
    (k0, kn)
}

fn mode_gap(delta: f64, peclet: f64, n: usize) -> f64 {
    let w = n as f64 * PI;
    delta + (delta / peclet).powi(2) - w * w
}

fn resonant_mode(delta: f64, peclet: f64) -> Option<usize> {
    if delta <= 0.0 {
        return None;
    }
    let centre = ((delta + (delta / peclet).powi(2)).sqrt() / PI).round() as usize;
    (centre.saturating_sub(1).max(1)..=centre + 1).find(|&n| {
        let w = n as f64 * PI;
        mode_gap(delta, peclet, n).abs() < RESONANCE_TOLERANCE * w * w
    })
}

/// Nudges any `Δᵢ` with `Δᵢ + (Δᵢ/Pe)² ≈ (nπ)²`, for any mode `n`, by
/// relative steps of 1e-9.
pub fn detune_rates(delta_coeff: &mut [f64], peclet: f64) -> usize {
    let mut nudges = 0;
    for d in delta_coeff.iter_mut() {
        for _ in 0..64 {
            if resonant_mode(*d, peclet).is_none() {
                break;
            }
            *d *= 1.0 + RESONANCE_TOLERANCE;
            nudges += 1;
        }
    }
    if nudges > 0 {
        log::warn!("perturbed {nudges} evaporation rates resonant with a cosine mode");
    }
    nudges
}

/// `b₀ᵢ = −Δᵢk₀ᵢ/(Δᵢ + (Δᵢ/Pe)²)`, `bₙᵢ = −Δᵢkₙᵢ/(Δᵢ + (Δᵢ/Pe)² − (nπ)²)`.
pub fn particular_coefficients(
    delta_coeff: &[f64],
    k0: &[f64],
    kn: &SectionModes,
    peclet: f64,
) -> Result<(Vec<f64>, SectionModes)> {
    let n = delta_coeff.len();
    if k0.len() != n || kn.n_sections() != n {
        return Err(ModelError::LengthMismatch {
            name: "k0",
            expected: n,
            actual: k0.len().min(kn.n_sections()),
        });
    }
    let mut b0 = vec![0.0; n];
    let mut bn = SectionModes::zeros(n, kn.n_modes());
    for i in 0..n {
        let d = delta_coeff[i];
        if d == 0.0 {
            continue;
        }
        if let Some(mode) = resonant_mode(d, peclet) {
            return Err(ModelError::ModeResonance { section: i + 1, mode });
        }
        b0[i] = -d * k0[i] / (d + (d / peclet).powi(2));
        let src = kn.row(i);
        for (m, dst) in bn.row_mut(i).iter_mut().enumerate() {
            *dst = -d * src[m] / mode_gap(d, peclet, m + 1);
        }
    }
    Ok((b0, bn))
}

/// Closed-form sum of one section's particular series `b₀/2 + Σₙ bₙ cos(nπξ)`:
/// the Neumann solution of `G'' + A·G = −f·𝟙[ξ ≤ c]` on `[0, 1]` with
/// `A = Δ + (Δ/Pe)²` and `f = Δ·S`.
///
/// Used only when `√A/π` lies within half the mode band (see
/// [`particular_profiles`]); faster sections keep the truncated series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParticularProfile {
    pub f: f64,
    pub a: f64,
    pub c: f64,
}

impl ParticularProfile {
    pub fn new(delta: f64, partial_sum: f64, c: f64, peclet: f64) -> Self {
        Self {
            f: delta * partial_sum,
            a: delta + (delta / peclet).powi(2),
            c,
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            f: self.f * factor,
            ..*self
        }
    }

    pub fn eval(&self, xi: f64) -> f64 {
        if self.f == 0.0 || self.a == 0.0 {
            return 0.0;
        }
        let k = self.a.sqrt();
        let amp = self.f / self.a;
        let sk = k.sin();
        if xi <= self.c {
            amp * ((k * (1.0 - self.c)).sin() * (k * xi).cos() / sk - 1.0)
        } else {
            -amp * (k * self.c).sin() * (k * (1.0 - xi)).cos() / sk
        }
    }
}

/// Closed-form profiles for sections whose frequency `√A/π` is at most
/// `n_modes/2`, `None` for the rest.
///
/// Inside that band the homogeneous modes can absorb the profile at the
/// inlet, and the exact sum removes the Gibbs ringing of the discontinuous
/// source from the field. Beyond it the profile oscillates faster than any
/// retained mode, so the truncated series is the consistent choice; such
/// sections decay within `η ≲ 1/Δ < 1e−3`.
pub fn particular_profiles(
    delta_coeff: &[f64],
    partial_sums: &[f64],
    c: f64,
    peclet: f64,
    n_modes: usize,
) -> Vec<Option<ParticularProfile>> {
    let band = 0.5 * n_modes as f64 * PI;
    delta_coeff
        .iter()
        .zip(partial_sums)
        .map(|(&d, &s)| {
            let p = ParticularProfile::new(d, s, c, peclet);
            (p.a.sqrt() <= band).then_some(p)
        })
        .collect()
}

/// Cosine coefficients of the inlet step: `inner` on `ξ ≤ c`, `outer` beyond.
pub fn step_coefficients(inner: f64, outer: f64, c: f64, n_modes: usize) -> (f64, Vec<f64>) {
    let a0 = c * inner + (1.0 - c) * outer;
    let an = (1..=n_modes)
        .map(|n| {
            let w = n as f64 * PI;
            2.0 * (inner - outer) * (w * c).sin() / w
        })
        .collect();
    (a0, an)
}

/// Chooses the homogeneous amplitudes so the mixed inlet functional
/// `γ − γ_η/Pe²` reproduces the step coefficients `(a0, an)` mode by mode.
pub(crate) fn match_inlet(
    a0: f64,
    an: &[f64],
    b0: &[f64],
    bn: &SectionModes,
    delta_coeff: &[f64],
    peclet: f64,
    q: &[f64],
) -> (f64, Vec<f64>) {
    let pe2 = peclet * peclet;
    let robin: Vec<f64> = delta_coeff.iter().map(|d| 1.0 + d / pe2).collect();
    let c0 = a0 - 0.5 * b0.iter().zip(&robin).map(|(b, g)| b * g).sum::<f64>();
    let mut cn = an.to_vec();
    for (i, g) in robin.iter().enumerate() {
        for (dst, b) in cn.iter_mut().zip(bn.row(i)) {
            *dst -= b * g;
        }
    }
    for (dst, qn) in cn.iter_mut().zip(q) {
        *dst /= 1.0 - qn / pe2;
    }
    (c0, cn)
}

/// `(C₂₀, C₂ₙ)` for the mass-fraction field with inlet `1 − Σδ` (fuel) / `−V` (oxidizer).
pub fn homogeneous_coefficients(
    init: &InitialDistribution,
    b0: &[f64],
    bn: &SectionModes,
    delta_coeff: &[f64],
    transport: &TransportParams,
    q: &[f64],
) -> (f64, Vec<f64>) {
    let (a0, an) = step_coefficients(1.0 - init.total(), -transport.v_ox, transport.c, q.len());
    match_inlet(a0, &an, b0, bn, delta_coeff, transport.peclet, q)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GasSeriesCoefficients {
    pub q: Vec<f64>,
    pub partial_sums: Vec<f64>,
    pub k0: Vec<f64>,
    pub kn: SectionModes,
    pub b0: Vec<f64>,
    pub bn: SectionModes,
    pub c20: f64,
    pub c2n: Vec<f64>,
    pub profiles: Vec<Option<ParticularProfile>>,
}

impl GasSeriesCoefficients {
    pub fn assemble(
        spray: &SprayCoefficients,
        transport: &TransportParams,
        truncation: SeriesTruncation,
    ) -> Result<Self> {
        transport.validate()?;
        let m = truncation.n_modes;
        let q = decay_exponents(transport.peclet, m);
        let partial_sums = heaviside_partial_sums(spray);
        let (k0, kn) = heaviside_fourier(&partial_sums, transport.c, m);
        let (b0, bn) = particular_coefficients(spray.delta_coeff(), &k0, &kn, transport.peclet)?;
        let (c20, c2n) = homogeneous_coefficients(spray.init(), &b0, &bn, spray.delta_coeff(), transport, &q);
        let profiles = particular_profiles(spray.delta_coeff(), &partial_sums, transport.c, transport.peclet, m);
        Ok(Self {
            q,
            partial_sums,
            k0,
            kn,
            b0,
            bn,
            c20,
            c2n,
            profiles,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.q.len()
    }

    pub(crate) fn series(&self) -> Series<'_> {
        Series {
            c0: self.c20,
            cn: &self.c2n,
            b0: &self.b0,
            bn: &self.bn,
            profiles: &self.profiles,
        }
    }
}

/// One assembled field: constant, homogeneous modes and particular parts.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Series<'a> {
    pub c0: f64,
    pub cn: &'a [f64],
    pub b0: &'a [f64],
    pub bn: &'a SectionModes,
    pub profiles: &'a [Option<ParticularProfile>],
}

impl Series<'_> {
    /// Value and η-derivative at one point by direct summation.
    pub fn eval(&self, q: &[f64], delta: &[f64], xi: f64, eta: f64) -> (f64, f64) {
        let decay: Vec<f64> = delta.iter().map(|d| (-d * eta).exp()).collect();
        let mut value = self.c0;
        let mut slope = 0.0;
        for (i, e) in decay.iter().enumerate() {
            let g = match &self.profiles[i] {
                Some(p) => p.eval(xi),
                None => 0.5 * self.b0[i],
            };
            value += g * e;
            slope -= g * delta[i] * e;
        }
        let c1 = (PI * xi).cos();
        let (mut cos_prev, mut cos_cur) = (1.0, c1);
        for m in 0..q.len() {
            let eq = (q[m] * eta).exp();
            let mut amp = self.cn[m] * eq;
            let mut amp_slope = self.cn[m] * q[m] * eq;
            for (i, e) in decay.iter().enumerate() {
                if self.profiles[i].is_none() {
                    let b = self.bn.data[i * self.bn.n_modes + m];
                    amp += b * e;
                    amp_slope -= b * delta[i] * e;
                }
            }
            value += amp * cos_cur;
            slope += amp_slope * cos_cur;
            let next = 2.0 * c1 * cos_cur - cos_prev;
            cos_prev = cos_cur;
            cos_cur = next;
        }
        (value, slope)
    }
}

/// `γ(ξ, η)` by direct summation of the truncated series.
pub fn gamma(xi: f64, eta: f64, gas: &GasSeriesCoefficients, spray: &SprayCoefficients) -> f64 {
    gas.series().eval(&gas.q, spray.delta_coeff(), xi, eta).0
}

/// `∂γ/∂η` by direct summation.
pub fn d_gamma_d_eta(xi: f64, eta: f64, gas: &GasSeriesCoefficients, spray: &SprayCoefficients) -> f64 {
    gas.series().eval(&gas.q, spray.delta_coeff(), xi, eta).1
}

/// `S̄_d = 𝟙[ξ ≤ c] Σᵢ Δᵢ Sᵢ e^{−Δᵢη}`
pub fn vapor_source(
    xi: f64,
    eta: f64,
    gas: &GasSeriesCoefficients,
    spray: &SprayCoefficients,
    transport: &TransportParams,
) -> f64 {
    if xi > transport.c {
        return 0.0;
    }
    spray
        .delta_coeff()
        .iter()
        .zip(&gas.partial_sums)
        .map(|(d, s)| d * s * (-d * eta).exp())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sectional_spray::{build_section_grid, ResonancePolicy};

    fn spray(n: usize, e_bar: f64, delta: Vec<f64>) -> SprayCoefficients {
        let g = build_section_grid(n, 1.0).unwrap();
        let init = InitialDistribution::new(delta).unwrap();
        SprayCoefficients::new(&g, e_bar, &init, ResonancePolicy::Perturb).unwrap()
    }

    #[test]
    fn first_decay_exponent() {
        let naive = 50.0 * (1.0 - (1.0 + 4.0 * PI * PI / 100.0f64).sqrt());
        let q = decay_exponents(10.0, 100);
        assert!((q[0] - naive).abs() < 1e-12);
        assert!((q[0] + 9.050490600).abs() < 1e-9);
        assert_eq!(decay_exponent(10.0, 0), 0.0);
        assert!((q[99] / (-100.0 * PI * 10.0) - 1.0).abs() < 0.02);
        assert!(q.windows(2).all(|w| w[1] < w[0]) && q[0] < 0.0);
    }

    #[test]
    fn stable_form_matches_textbook_form() {
        for pe in [0.5, 3.0, 10.0, 100.0, 1000.0] {
            for n in [1usize, 7, 50, 400] {
                let w = n as f64 * PI;
                let naive = pe * pe / 2.0 * (1.0 - (1.0 + 4.0 * w * w / (pe * pe)).sqrt());
                let q = decay_exponent(pe, n);
                assert!((q - naive).abs() <= 1e-9 * q.abs().max(1.0), "pe {pe} n {n}");
            }
        }
    }

    #[test]
    fn partial_sums_small_cases() {
        let s = spray(1, 2.0, vec![0.7]);
        assert_eq!(heaviside_partial_sums(&s), vec![0.7]);
        let s = spray(4, 2.0, vec![0.0; 4]);
        assert!(heaviside_partial_sums(&s).iter().all(|&v| v == 0.0));
        let s = spray(9, 3.0, {
            let mut d = vec![0.0; 9];
            d[8] = 1.0;
            d
        });
        let sums = heaviside_partial_sums(&s);
        let row: f64 = (0..9).map(|j| s.omega().get(8, j)).sum();
        assert_eq!(sums[8], row);
        let total: f64 = sums.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn source_rebuilt_from_partial_sums() {
        let s = spray(5, 1.5, vec![0.1, 0.05, 0.2, 0.0, 0.3]);
        let tp = TransportParams::new(10.0, 0.4, 0.3).unwrap();
        let gas = GasSeriesCoefficients::assemble(&s, &tp, SeriesTruncation::new(10).unwrap()).unwrap();
        for eta in [0.0, 0.05, 0.3, 1.2] {
            let h = 1e-6;
            let lo: f64 = s.liquid_mass_fractions(eta - h).iter().sum();
            let hi: f64 = s.liquid_mass_fractions(eta + h).iter().sum();
            let fd = -(hi - lo) / (2.0 * h);
            let analytic: f64 = {
                let d = s.delta_coeff();
                (0..5)
                    .map(|j| (j..5).map(|i| d[i] * s.omega().get(i, j) * (-d[i] * eta).exp()).sum::<f64>())
                    .sum()
            };
            let src = vapor_source(0.2, eta, &gas, &s, &tp);
            assert!((src - analytic).abs() < 1e-12);
            if eta > 0.0 {
                assert!((src - fd).abs() < 1e-7);
            }
            assert_eq!(vapor_source(0.41, eta, &gas, &s, &tp), 0.0);
        }
    }

    #[test]
    fn single_section_source() {
        let s = spray(1, 2.0, vec![0.7]);
        let tp = TransportParams::new(10.0, 0.5, 0.2).unwrap();
        let gas = GasSeriesCoefficients::assemble(&s, &tp, SeriesTruncation::new(4).unwrap()).unwrap();
        let d = s.delta_coeff()[0];
        let v = vapor_source(0.1, 0.4, &gas, &s, &tp);
        assert!((v - d * 0.7 * (-d * 0.4).exp()).abs() < 1e-15);
    }

    #[test]
    fn heaviside_coefficients() {
        let (k0, kn) = heaviside_fourier(&[1.0], 0.5, 2);
        assert!((k0[0] - 1.0).abs() < 1e-15);
        assert!(kn.get(0, 2).abs() < 1e-15);
        let (_, kn) = heaviside_fourier(&[0.7], 0.5, 1);
        assert!((kn.get(0, 1) - 0.445634).abs() < 1e-6);
    }

    #[test]
    fn particular_examples() {
        let (k0, kn) = heaviside_fourier(&[1.0, 0.0], 0.5, 3);
        let delta = [6.0 / 7.0, 0.4];
        let (b0, bn) = particular_coefficients(&delta, &k0, &kn, 10.0).unwrap();
        assert!((b0[0] + 0.991501416).abs() < 1e-9);
        assert_eq!(b0[1], 0.0);
        assert!((0..3).all(|m| bn.get(1, m + 1) == 0.0));
        let (b0, _) = particular_coefficients(&delta, &k0, &kn, 1e9).unwrap();
        assert!((b0[0] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn resonance_is_detected_and_detuned() {
        // Δ + (Δ/Pe)² = π² exactly at Pe = 10.
        let pe = 10.0f64;
        let d = (-pe * pe + (pe.powi(4) + 4.0 * pe * pe * PI * PI).sqrt()) / 2.0;
        let (k0, kn) = heaviside_fourier(&[0.5], 0.3, 5);
        assert!(matches!(
            particular_coefficients(&[d], &k0, &kn, pe),
            Err(ModelError::ModeResonance { section: 1, mode: 1 })
        ));
        let mut rates = vec![d];
        assert!(detune_rates(&mut rates, pe) > 0);
        let (_, bn) = particular_coefficients(&rates, &k0, &kn, pe).unwrap();
        assert!(bn.get(0, 1).is_finite());
    }

    #[test]
    fn pure_gas_homogeneous_coefficients() {
        let s = spray(3, 1.0, vec![0.0; 3]);
        let c = 0.3;
        let tp = TransportParams::new(10.0, c, 0.0).unwrap();
        let gas = GasSeriesCoefficients::assemble(&s, &tp, SeriesTruncation::new(20).unwrap()).unwrap();
        assert!((gas.c20 - c).abs() < 1e-15);
        for n in 1..=20 {
            let w = n as f64 * PI;
            let expected = 2.0 * (w * c).sin() / (w * (1.0 - gas.q[n - 1] / 100.0));
            assert!((gas.c2n[n - 1] - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn step_with_full_channel_has_no_modes() {
        let (a0, an) = step_coefficients(1.0, 0.0, 1.0, 30);
        assert_eq!(a0, 1.0);
        assert!(an.iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn particular_constant_identity() {
        let s = spray(9, 5.0, vec![0.0, 0.1, 0.0, 0.2, 0.0, 0.1, 0.05, 0.0, 0.15]);
        let tp = TransportParams::new(3.0, 0.25, 0.4).unwrap();
        let gas = GasSeriesCoefficients::assemble(&s, &tp, SeriesTruncation::new(5).unwrap()).unwrap();
        for (i, d) in s.delta_coeff().iter().enumerate() {
            let lhs = -gas.b0[i] * (1.0 + d / 9.0);
            assert!((lhs - gas.k0[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn cosine_recurrence_matches_direct_sum() {
        let s = spray(4, 3.0, vec![0.2, 0.0, 0.3, 0.1]);
        let tp = TransportParams::new(10.0, 0.35, 0.3).unwrap();
        let gas = GasSeriesCoefficients::assemble(&s, &tp, SeriesTruncation::new(200).unwrap()).unwrap();
        for &(xi, eta) in &[(0.0, 0.001), (0.2, 0.05), (0.77, 0.3), (1.0, 0.02)] {
            let mut direct = gas.c20;
            for (i, d) in s.delta_coeff().iter().enumerate() {
                direct += gas.profiles[i].unwrap().eval(xi) * (-d * eta).exp();
            }
            for n in 1..=200 {
                direct += gas.c2n[n - 1] * (gas.q[n - 1] * eta).exp() * (n as f64 * PI * xi).cos();
            }
            assert!((gamma(xi, eta, &gas, &s) - direct).abs() < 1e-11);
        }
    }

    #[test]
    fn profile_is_the_summed_particular_series() {
        let s = spray(4, 40.0, vec![0.2, 0.0, 0.3, 0.1]);
        let tp = TransportParams::new(10.0, 0.35, 0.3).unwrap();
        let m = 20_000;
        let gas = GasSeriesCoefficients::assemble(&s, &tp, SeriesTruncation::new(m).unwrap()).unwrap();
        for i in [0, 2, 3] {
            for &xi in &[0.0, 0.1, 0.3, 0.34, 0.36, 0.6, 1.0] {
                let mut sum = 0.5 * gas.b0[i];
                for n in 1..=m {
                    sum += gas.bn.get(i, n) * (n as f64 * PI * xi).cos();
                }
                let exact = gas.profiles[i].unwrap().eval(xi);
                assert!((exact - sum).abs() < 1e-7 * exact.abs().max(1e-3), "section {i} ξ {xi}: {exact} vs {sum}");
            }
        }
    }

    #[test]
    fn fast_sections_keep_the_truncated_series() {
        let s = spray(9, 1e5, vec![0.1; 9]);
        let tp = TransportParams::new(10.0, 0.17, 0.3).unwrap();
        let gas = GasSeriesCoefficients::assemble(&s, &tp, SeriesTruncation::new(200).unwrap()).unwrap();
        for (i, d) in s.delta_coeff().iter().enumerate() {
            let resolved = (d + (d / 10.0).powi(2)).sqrt() <= 100.0 * PI;
            assert_eq!(gas.profiles[i].is_some(), resolved, "section {}", i + 1);
        }
        assert!(gas.profiles.iter().any(|p| p.is_none()));
        let (xi, eta) = (0.4, 1e-6);
        let mut direct = gas.c20;
        for (i, d) in s.delta_coeff().iter().enumerate() {
            let e = (-d * eta).exp();
            match gas.profiles[i] {
                Some(p) => direct += p.eval(xi) * e,
                None => {
                    direct += 0.5 * gas.b0[i] * e;
                    for n in 1..=200 {
                        direct += gas.bn.get(i, n) * e * (n as f64 * PI * xi).cos();
                    }
                }
            }
        }
        for n in 1..=200 {
            direct += gas.c2n[n - 1] * (gas.q[n - 1] * eta).exp() * (n as f64 * PI * xi).cos();
        }
        assert!((gamma(xi, eta, &gas, &s) - direct).abs() < 1e-10);
    }

    #[test]
    fn profile_solves_its_ode() {
        let p = ParticularProfile::new(57.0, 0.4, 0.3, 3.0);
        let h = 1e-4;
        for &xi in &[0.05, 0.2, 0.29, 0.31, 0.5, 0.95] {
            let d2 = (p.eval(xi + h) - 2.0 * p.eval(xi) + p.eval(xi - h)) / (h * h);
            let rhs = if xi <= 0.3 { -p.f } else { 0.0 };
            assert!((d2 + p.a * p.eval(xi) - rhs).abs() < 1e-4 * p.f, "ξ {xi}");
        }
        let slope = |x: f64| (p.eval(x + h) - p.eval(x - h)) / (2.0 * h);
        assert!((slope(0.3 - 2.0 * h) - slope(0.3 + 2.0 * h)).abs() < 1e-2 * p.f);
        assert!(((p.eval(h) - p.eval(0.0)) / h).abs() < 1e-3 * p.f);
        assert!(((p.eval(1.0) - p.eval(1.0 - h)) / h).abs() < 1e-3 * p.f);
    }
}
