//! Closed-form model of a polydisperse spray diffusion flame in a channel.
//!
//! A sectional spray solution feeds a vapor source into truncated cosine
//! series for the coupled mass fraction γ and the temperature coupling
//! function γ_T. Flame metrics (height of the γ = 0 front and peak
//! temperature) are extracted from grid evaluations.

pub mod diagnostics;
pub mod error;
pub mod field;
pub mod gas_phase;
pub mod model;
pub mod sectional_spray;
pub mod temperature_field;

pub use error::{ModelError, Result};
pub use field::{FieldGrid, FieldValues, GridEvaluator};
pub use model::{FieldSolution, ModelParams, Numerics};
pub use sectional_spray::{InitialDistribution, ResonancePolicy, SectionGrid, SprayCoefficients};
pub use temperature_field::{flame_front, flame_metrics, FlameMetrics, ThermalParams};
pub use gas_phase::TransportParams;
