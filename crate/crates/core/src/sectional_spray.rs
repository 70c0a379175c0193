//! Droplet-size sectioning and the closed-form sectional spray solution.
//!
//! Sections are indexed from 0 internally. Section `i` loses liquid at rate
//! `Δᵢ` and is fed from section `i + 1` at rate `ψᵢ`, so the liquid mass
//! fraction in section `j` is a finite sum of decaying exponentials.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, ModelError, Result};

/// Relative closeness below which two decay rates are treated as resonant.
pub const RESONANCE_TOLERANCE: f64 = 1e-9;

/// What to do when two decay rates (or a rate and a cosine mode) coincide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResonancePolicy {
    Reject,
    #[default]
    Perturb,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionGrid {
    d_low: Vec<f64>,
    d_high: Vec<f64>,
}

impl SectionGrid {
    pub fn new(d_low: Vec<f64>, d_high: Vec<f64>) -> Result<Self> {
        if d_low.is_empty() {
            return Err(invalid("n_sections", "at least one section is required"));
        }
        if d_low.len() != d_high.len() {
            return Err(ModelError::LengthMismatch {
                name: "d_high",
                expected: d_low.len(),
                actual: d_high.len(),
            });
        }
        for (i, (&lo, &hi)) in d_low.iter().zip(&d_high).enumerate() {
            if !lo.is_finite() || !hi.is_finite() || lo < 0.0 {
                return Err(invalid("d_low", format!("section {} has bounds [{lo}, {hi})", i + 1)));
            }
            if lo == hi {
                return Err(ModelError::DegenerateSection { index: i + 1, value: lo });
            }
            if lo > hi {
                return Err(invalid("d_high", format!("section {} has d_low > d_high", i + 1)));
            }
        }
        for i in 1..d_low.len() {
            let gap = (d_high[i - 1] - d_low[i]).abs();
            if gap > 1e-12 * d_low[i].abs().max(1.0) {
                return Err(ModelError::NonContiguous { index: i, next: i + 1 });
            }
        }
        Ok(Self { d_low, d_high })
    }

    /// Uniform grid `[i·w, (i+1)·w)` for `i = 1..=n`.
    pub fn uniform(n_sections: usize, monomer_width: f64) -> Result<Self> {
        if n_sections == 0 {
            return Err(invalid("n_sections", "must be at least 1"));
        }
        if !(monomer_width > 0.0 && monomer_width.is_finite()) {
            return Err(invalid("monomer_width", format!("must be positive, got {monomer_width}")));
        }
        let d_low = (1..=n_sections).map(|i| i as f64 * monomer_width).collect();
        let d_high = (1..=n_sections).map(|i| (i + 1) as f64 * monomer_width).collect();
        Self::new(d_low, d_high)
    }

    pub fn n_sections(&self) -> usize {
        self.d_low.len()
    }

    pub fn d_low(&self) -> &[f64] {
        &self.d_low
    }

    pub fn d_high(&self) -> &[f64] {
        &self.d_high
    }
}

pub fn build_section_grid(n_sections: usize, monomer_width: f64) -> Result<SectionGrid> {
    SectionGrid::uniform(n_sections, monomer_width)
}

/// Liquid fuel fraction per section at injection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialDistribution {
    delta: Vec<f64>,
}

impl InitialDistribution {
    pub fn new(delta: Vec<f64>) -> Result<Self> {
        if delta.is_empty() {
            return Err(invalid("delta", "empty distribution"));
        }
        if let Some(bad) = delta.iter().find(|d| !(d.is_finite() && **d >= 0.0)) {
            return Err(invalid("delta", format!("fractions must be non-negative, got {bad}")));
        }
        let total: f64 = delta.iter().sum();
        if total > 1.0 + 1e-12 {
            return Err(invalid("delta", format!("total liquid fraction {total} exceeds 1")));
        }
        Ok(Self { delta })
    }

    pub fn zeros(n_sections: usize) -> Self {
        Self {
            delta: vec![0.0; n_sections.max(1)],
        }
    }

    /// All liquid in one section; `section` is 1-based.
    pub fn monosectional(n_sections: usize, section: usize, fraction: f64) -> Result<Self> {
        if section == 0 || section > n_sections {
            return Err(invalid("section", format!("{section} outside 1..={n_sections}")));
        }
        let mut delta = vec![0.0; n_sections];
        delta[section - 1] = fraction;
        Self::new(delta)
    }

    /// Scatter `(section, fraction)` pairs (1-based sections) into a full vector.
    pub fn from_pairs(n_sections: usize, sections: &[usize], fractions: &[f64]) -> Result<Self> {
        if sections.len() != fractions.len() {
            return Err(ModelError::LengthMismatch {
                name: "fractions",
                expected: sections.len(),
                actual: fractions.len(),
            });
        }
        let mut delta = vec![0.0; n_sections];
        for (&s, &f) in sections.iter().zip(fractions) {
            if s == 0 || s > n_sections {
                return Err(invalid("section", format!("{s} outside 1..={n_sections}")));
            }
            delta[s - 1] += f;
        }
        Self::new(delta)
    }

    pub fn delta(&self) -> &[f64] {
        &self.delta
    }

    pub fn n_sections(&self) -> usize {
        self.delta.len()
    }

    pub fn total(&self) -> f64 {
        self.delta.iter().sum()
    }

    /// Largest single-section share of the total liquid (1 for an empty spray).
    pub fn dominant_share(&self) -> f64 {
        let total = self.total();
        if total <= 0.0 {
            return 1.0;
        }
        self.delta.iter().cloned().fold(0.0, f64::max) / total
    }
}

/// `Δᵢ = (3Ē/2)(3d_Hᵢ − 2d_Lᵢ)/(d_Hᵢ³ − d_Lᵢ³)` and
/// `ψᵢ = (3Ē/2) d_L,i+1/(d_H,i+1³ − d_L,i+1³)`.
pub fn evaporation_coefficients(grid: &SectionGrid, e_bar: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(e_bar >= 0.0 && e_bar.is_finite()) {
        return Err(invalid("e_bar", format!("must be non-negative, got {e_bar}")));
    }
    let k = 1.5 * e_bar;
    let mut delta = Vec::with_capacity(grid.n_sections());
    for (i, (&lo, &hi)) in grid.d_low.iter().zip(&grid.d_high).enumerate() {
        let cube = hi.powi(3) - lo.powi(3);
        if cube <= 0.0 {
            return Err(ModelError::DegenerateSection { index: i + 1, value: lo });
        }
        delta.push(k * (3.0 * hi - 2.0 * lo) / cube);
    }
    let psi = (1..grid.n_sections())
        .map(|i| {
            let (lo, hi) = (grid.d_low[i], grid.d_high[i]);
            k * lo / (hi.powi(3) - lo.powi(3))
        })
        .collect();
    Ok((delta, psi))
}

fn too_close(a: f64, b: f64) -> bool {
    (a - b).abs() < RESONANCE_TOLERANCE * a.abs().max(b.abs())
}

/// Nudges coinciding decay rates apart by relative steps of 1e-9.
/// Returns how many nudges were applied.
pub fn separate_rates(delta_coeff: &mut [f64]) -> usize {
    let mut nudges = 0;
    for i in 1..delta_coeff.len() {
        for _ in 0..64 {
            let clash = (0..i).any(|j| delta_coeff[j] != 0.0 && too_close(delta_coeff[i], delta_coeff[j]));
            if !clash {
                break;
            }
            delta_coeff[i] *= 1.0 + RESONANCE_TOLERANCE;
            nudges += 1;
        }
    }
    if nudges > 0 {
        log::warn!("perturbed {nudges} near-resonant evaporation rates by relative 1e-9");
    }
    nudges
}

/// Lower-triangular `Ωᵢⱼ` (nonzero only for `i ≥ j`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfluenceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl InfluenceMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    /// `Σ_{j ≤ i} Ωᵢⱼ`
    pub fn row_sum(&self, i: usize) -> f64 {
        (0..=i).map(|j| self.get(i, j)).sum()
    }

    /// `Σ_{i ≥ j} Ωᵢⱼ`
    pub fn column_sum(&self, j: usize) -> f64 {
        (j..self.n).map(|i| self.get(i, j)).sum()
    }
}

pub fn influence_matrix(
    delta_coeff: &[f64],
    psi_coeff: &[f64],
    init: &InitialDistribution,
) -> Result<InfluenceMatrix> {
    let n = delta_coeff.len();
    if init.n_sections() != n {
        return Err(ModelError::LengthMismatch {
            name: "delta",
            expected: n,
            actual: init.n_sections(),
        });
    }
    if psi_coeff.len() + 1 != n {
        return Err(ModelError::LengthMismatch {
            name: "psi_coeff",
            expected: n - 1,
            actual: psi_coeff.len(),
        });
    }
    let delta = init.delta();
    let mut omega = InfluenceMatrix::zeros(n);
    for j in (0..n).rev() {
        let mut below = 0.0;
        for i in j + 1..n {
            let upstream = omega.get(i, j + 1);
            if psi_coeff[j] == 0.0 || upstream == 0.0 {
                continue;
            }
            if too_close(delta_coeff[j], delta_coeff[i]) {
                return Err(ModelError::RateResonance {
                    i: i + 1,
                    j: j + 1,
                    value: delta_coeff[i],
                });
            }
            let v = psi_coeff[j] / (delta_coeff[j] - delta_coeff[i]) * upstream;
            omega.set(i, j, v);
            below += v;
        }
        omega.set(j, j, delta[j] - below);
    }
    Ok(omega)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SprayCoefficients {
    e_bar: f64,
    delta_coeff: Vec<f64>,
    psi_coeff: Vec<f64>,
    omega: InfluenceMatrix,
    init: InitialDistribution,
}

impl SprayCoefficients {
    pub fn new(
        grid: &SectionGrid,
        e_bar: f64,
        init: &InitialDistribution,
        policy: ResonancePolicy,
    ) -> Result<Self> {
        let (delta_coeff, psi_coeff) = evaporation_coefficients(grid, e_bar)?;
        Self::from_rates(e_bar, delta_coeff, psi_coeff, init, policy)
    }

    /// Assemble from precomputed (possibly already perturbed) rates.
    pub fn from_rates(
        e_bar: f64,
        mut delta_coeff: Vec<f64>,
        psi_coeff: Vec<f64>,
        init: &InitialDistribution,
        policy: ResonancePolicy,
    ) -> Result<Self> {
        if policy == ResonancePolicy::Perturb {
            separate_rates(&mut delta_coeff);
        }
        let omega = influence_matrix(&delta_coeff, &psi_coeff, init)?;
        Ok(Self {
            e_bar,
            delta_coeff,
            psi_coeff,
            omega,
            init: init.clone(),
        })
    }

    pub fn e_bar(&self) -> f64 {
        self.e_bar
    }

    pub fn n_sections(&self) -> usize {
        self.delta_coeff.len()
    }

    pub fn delta_coeff(&self) -> &[f64] {
        &self.delta_coeff
    }

    pub fn psi_coeff(&self) -> &[f64] {
        &self.psi_coeff
    }

    pub fn omega(&self) -> &InfluenceMatrix {
        &self.omega
    }

    pub fn init(&self) -> &InitialDistribution {
        &self.init
    }

    pub fn liquid_mass_fractions(&self, eta: f64) -> Vec<f64> {
        let n = self.n_sections();
        let decay: Vec<f64> = self.delta_coeff.iter().map(|d| (-d * eta).exp()).collect();
        (0..n)
            .map(|j| (j..n).map(|i| self.omega.get(i, j) * decay[i]).sum())
            .collect()
    }

    pub fn total_liquid(&self, eta: f64) -> f64 {
        self.liquid_mass_fractions(eta).iter().sum()
    }
}

/// `γ_dⱼ(η) = Σ_{i ≥ j} Ωᵢⱼ e^{−Δᵢη}`
pub fn liquid_mass_fractions(coeffs: &SprayCoefficients, eta: f64) -> Result<Vec<f64>> {
    if !(eta >= 0.0) {
        return Err(invalid("eta", format!("must be non-negative, got {eta}")));
    }
    Ok(coeffs.liquid_mass_fractions(eta))
}
