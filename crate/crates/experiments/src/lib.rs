//! Reproduction harness: Ē sweeps, Péclet study, DoF ladders of GA optima,
//! spreading validation and gaseous calibration. Every study returns plain
//! tables that serialize to CSV or JSON.

pub mod calibration;
pub mod context;
pub mod ladder;
pub mod pe;
pub mod reversal;
pub mod spec;
pub mod spreading;
pub mod sweep;

pub use calibration::{calibrate_gaseous, Calibration, CalibrationCell, CalibrationTarget};
pub use context::{FlameContext, PointOutcome};
pub use ladder::{dof_ladder, LadderRow};
pub use pe::{pe_ratios, pe_sensitivity, PeRatio};
pub use reversal::detect_reversal;
pub use spec::{log_grid, SweepSpec};
pub use spreading::{spread_distribution, spreading_suite, spreading_validation, SpreadingReport};
pub use sweep::{monosectional_sweep, polysectional_random_sweep, random_idsd, Family, SweepResult, SweepRow};

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("invalid experiment setting `{field}`: {reason}")]
    InvalidSpec { field: &'static str, reason: String },
    #[error("no configuration produced a flame")]
    NoFlame,
    #[error(transparent)]
    Model(#[from] polyflame_core::ModelError),
    #[error(transparent)]
    Ga(#[from] polyflame_ga::GaError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
