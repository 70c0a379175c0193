use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::gas_phase::{detune_rates, GasSeriesCoefficients, SeriesTruncation, TransportParams};
use crate::sectional_spray::{
    evaporation_coefficients, InitialDistribution, ResonancePolicy, SectionGrid, SprayCoefficients,
};
use crate::temperature_field::{temperature_from, temperature_series, TempSeriesCoefficients, ThermalParams};

/// Physical and dimensionless model inputs for one flame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelParams {
    pub n_sections: usize,
    pub monomer_width: f64,
    pub peclet: f64,
    pub c: f64,
    pub v_ox: f64,
    pub lambda_latent: f64,
    pub t0: f64,
    pub e_bar: f64,
    pub resonance: ResonancePolicy,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            n_sections: 9,
            monomer_width: 1.0,
            peclet: 10.0,
            c: 0.17,
            v_ox: 0.3,
            lambda_latent: 0.02,
            t0: 0.0,
            e_bar: 100.0,
            resonance: ResonancePolicy::Perturb,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        self.section_grid()?;
        self.transport().validate()?;
        self.thermal().validate()?;
        if !(self.e_bar >= 0.0 && self.e_bar.is_finite()) {
            return Err(invalid("e_bar", format!("must be non-negative, got {}", self.e_bar)));
        }
        Ok(())
    }

    pub fn section_grid(&self) -> Result<SectionGrid> {
        SectionGrid::uniform(self.n_sections, self.monomer_width)
    }

    pub fn transport(&self) -> TransportParams {
        TransportParams {
            peclet: self.peclet,
            c: self.c,
            v_ox: self.v_ox,
        }
    }

    pub fn thermal(&self) -> ThermalParams {
        ThermalParams {
            lambda_latent: self.lambda_latent,
            t0: self.t0,
        }
    }

    pub fn with_e_bar(&self, e_bar: f64) -> Self {
        Self { e_bar, ..self.clone() }
    }

    pub fn with_peclet(&self, peclet: f64) -> Self {
        Self { peclet, ..self.clone() }
    }
}

/// Discretization controls for series truncation and the evaluation grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Numerics {
    pub n_modes: usize,
    pub n_xi: usize,
    pub n_eta: usize,
    pub eta_top: f64,
    pub front_tolerance: f64,
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            n_modes: 200,
            n_xi: 401,
            n_eta: 801,
            eta_top: 0.6,
            front_tolerance: 1e-3,
        }
    }
}

impl Numerics {
    pub fn validate(&self) -> Result<()> {
        SeriesTruncation::new(self.n_modes)?;
        if self.n_xi < 2 || self.n_eta < 2 {
            return Err(invalid("grid", "need at least 2 points per axis"));
        }
        if !(self.eta_top > 0.0 && self.eta_top.is_finite()) {
            return Err(invalid("eta_top", "must be positive"));
        }
        if !(self.front_tolerance > 0.0) {
            return Err(invalid("front_tolerance", "must be positive"));
        }
        Ok(())
    }
}

/// Assembled spray, gas and temperature series for one iDSD.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSolution {
    pub transport: TransportParams,
    pub thermal: ThermalParams,
    pub spray: SprayCoefficients,
    pub gas: GasSeriesCoefficients,
    pub temp: TempSeriesCoefficients,
}

impl FieldSolution {
    pub fn new(params: &ModelParams, init: &InitialDistribution, n_modes: usize) -> Result<Self> {
        params.validate()?;
        Self::assemble(
            &params.section_grid()?,
            params.e_bar,
            init,
            params.transport(),
            params.thermal(),
            SeriesTruncation::new(n_modes)?,
            params.resonance,
        )
    }

    pub fn assemble(
        grid: &SectionGrid,
        e_bar: f64,
        init: &InitialDistribution,
        transport: TransportParams,
        thermal: ThermalParams,
        truncation: SeriesTruncation,
        policy: ResonancePolicy,
    ) -> Result<Self> {
        transport.validate()?;
        thermal.validate()?;
        let (mut delta_coeff, psi_coeff) = evaporation_coefficients(grid, e_bar)?;
        if policy == ResonancePolicy::Perturb {
            detune_rates(&mut delta_coeff, transport.peclet);
        }
        let spray = SprayCoefficients::from_rates(e_bar, delta_coeff, psi_coeff, init, policy)?;
        let gas = GasSeriesCoefficients::assemble(&spray, &transport, truncation)?;
        let temp = temperature_series(&spray, &gas, &thermal, &transport)?;
        Ok(Self {
            transport,
            thermal,
            spray,
            gas,
            temp,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.gas.n_modes()
    }

    pub fn gamma(&self, xi: f64, eta: f64) -> f64 {
        self.gas.series().eval(&self.gas.q, self.spray.delta_coeff(), xi, eta).0
    }

    pub fn d_gamma_d_eta(&self, xi: f64, eta: f64) -> f64 {
        self.gas.series().eval(&self.gas.q, self.spray.delta_coeff(), xi, eta).1
    }

    pub fn gamma_t(&self, xi: f64, eta: f64) -> f64 {
        self.temp.series().eval(&self.gas.q, self.spray.delta_coeff(), xi, eta).0
    }

    pub fn d_gamma_t_d_eta(&self, xi: f64, eta: f64) -> f64 {
        self.temp.series().eval(&self.gas.q, self.spray.delta_coeff(), xi, eta).1
    }

    pub fn temperature(&self, xi: f64, eta: f64) -> f64 {
        temperature_from(self.gamma(xi, eta), self.gamma_t(xi, eta))
    }

    pub fn vapor_source(&self, xi: f64, eta: f64) -> f64 {
        crate::gas_phase::vapor_source(xi, eta, &self.gas, &self.spray, &self.transport)
    }

    /// Far-field value `c(1 + V) − V` of γ.
    pub fn gamma_far_field(&self) -> f64 {
        let tp = &self.transport;
        tp.c * (1.0 + tp.v_ox) - tp.v_ox
    }
}
