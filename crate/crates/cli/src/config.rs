//! Run configuration: one TOML file, overridden by command-line flags.
//!
//! Precedence, lowest first: built-in defaults, the `--config` file, then
//! `--seed` (sets both the GA and the experiment seed) and `--out`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use polyflame_core::{InitialDistribution, ModelParams, Numerics};
use polyflame_experiments::SweepSpec;
use polyflame_ga::{GAConfig, Objective};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FieldConfig {
    /// Per-section liquid fractions; empty means the gaseous flame.
    pub delta: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Problem {
    #[default]
    Idsd,
    /// `sinc(x−10)·sinc(y−10)·(1−z³)` on `[0,20]²×[−1,1]`.
    Sinc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizeConfig {
    pub problem: Problem,
    pub k_dof: usize,
    pub objective: Objective,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        Self {
            problem: Problem::Idsd,
            k_dof: 1,
            objective: Objective::EtaMax,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PeConfig {
    /// iDSDs to follow across Pe; empty means monosectionals d ∈ {2, 5, 8}
    /// holding the experiment's total liquid fraction.
    pub idsds: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelParams,
    pub numerics: Numerics,
    pub ga: GAConfig,
    pub experiment: SweepSpec,
    pub field: FieldConfig,
    pub optimize: OptimizeConfig,
    pub pe: PeConfig,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: ModelParams::default(),
            numerics: Numerics::default(),
            ga: GAConfig::default(),
            experiment: SweepSpec::default(),
            field: FieldConfig::default(),
            optimize: OptimizeConfig::default(),
            pe: PeConfig::default(),
            output_dir: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Defaults, then the file, then flags.
    pub fn resolve(path: Option<&Path>, out: Option<PathBuf>, seed: Option<u64>) -> Result<Self, CliError> {
        let mut cfg = match path {
            Some(p) => Self::load(p)?,
            None => Self::default(),
        };
        if let Some(out) = out {
            cfg.output_dir = out;
        }
        if let Some(seed) = seed {
            cfg.ga.rng_seed = seed;
            cfg.experiment.rng_seed = seed;
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let usage = |e: &dyn std::fmt::Display| CliError::Usage(e.to_string());
        self.model.validate().map_err(|e| usage(&e))?;
        self.numerics.validate().map_err(|e| usage(&e))?;
        self.ga.validate().map_err(|e| usage(&e))?;
        self.experiment.validate(self.model.n_sections).map_err(|e| usage(&e))?;
        self.field_distribution()?;
        for d in &self.pe.idsds {
            self.distribution(d, "pe.idsds")?;
        }
        let n = self.model.n_sections;
        if self.optimize.problem == Problem::Idsd && !(1..=n).contains(&self.optimize.k_dof) {
            return Err(CliError::Usage(format!("optimize.k_dof must lie in 1..={n}, got {}", self.optimize.k_dof)));
        }
        Ok(())
    }

    fn distribution(&self, delta: &[f64], what: &str) -> Result<InitialDistribution, CliError> {
        let n = self.model.n_sections;
        if delta.len() != n {
            return Err(CliError::Usage(format!("{what}: expected {n} fractions, got {}", delta.len())));
        }
        InitialDistribution::new(delta.to_vec()).map_err(|e| CliError::Usage(format!("{what}: {e}")))
    }

    pub fn field_distribution(&self) -> Result<InitialDistribution, CliError> {
        if self.field.delta.is_empty() {
            Ok(InitialDistribution::zeros(self.model.n_sections))
        } else {
            self.distribution(&self.field.delta, "field.delta")
        }
    }

    pub fn pe_distributions(&self) -> Result<Vec<(String, InitialDistribution)>, CliError> {
        if self.pe.idsds.is_empty() {
            let total = self.experiment.total_delta;
            return [2, 5, 8]
                .iter()
                .filter(|&&d| d <= self.model.n_sections)
                .map(|&d| {
                    let init = InitialDistribution::monosectional(self.model.n_sections, d, total)
                        .map_err(|e| CliError::Usage(e.to_string()))?;
                    Ok((polyflame_experiments::sweep::mono_label(d, total), init))
                })
                .collect();
        }
        self.pe
            .idsds
            .iter()
            .enumerate()
            .map(|(i, d)| Ok((format!("idsd {i}"), self.distribution(d, "pe.idsds")?)))
            .collect()
    }

    /// First 12 hex digits of the SHA-256 of the resolved config as JSON.
    /// The output directory is not part of the hash.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(&self.echo()).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        hex::encode(digest)[..12].to_string()
    }

    /// The config as embedded in artifacts: everything but the output directory.
    pub fn echo(&self) -> Self {
        Self {
            output_dir: PathBuf::new(),
            ..self.clone()
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(RunConfig::from_toml("").unwrap(), RunConfig::default());
    }

    #[test]
    fn file_values_override_defaults() {
        let cfg = RunConfig::from_toml("[model]\npeclet = 100.0\n[ga]\npopulation_size = 8\n").unwrap();
        assert_eq!(cfg.model.peclet, 100.0);
        assert_eq!(cfg.ga.population_size, 8);
        assert_eq!(cfg.model.c, ModelParams::default().c);
    }

    #[test]
    fn unknown_keys_are_usage_errors() {
        assert!(matches!(RunConfig::from_toml("[model]\npecklet = 1.0\n"), Err(CliError::Usage(_))));
        assert!(matches!(RunConfig::from_toml("colour = 1\n"), Err(CliError::Usage(_))));
    }

    #[test]
    fn flags_override_file() {
        let dir = std::env::temp_dir().join(format!("polyflame-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.toml");
        std::fs::write(&path, "output_dir = \"a\"\n[ga]\nrng_seed = 3\n").unwrap();
        let cfg = RunConfig::resolve(Some(&path), Some("b".into()), Some(9)).unwrap();
        assert_eq!(cfg.output_dir, PathBuf::from("b"));
        assert_eq!((cfg.ga.rng_seed, cfg.experiment.rng_seed), (9, 9));
        let cfg = RunConfig::resolve(Some(&path), None, None).unwrap();
        assert_eq!((cfg.output_dir, cfg.ga.rng_seed), (PathBuf::from("a"), 3));
        std::fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn hash_tracks_content_not_output_dir() {
        let a = RunConfig::default();
        let b = RunConfig {
            output_dir: "elsewhere".into(),
            ..RunConfig::default()
        };
        let mut c = RunConfig::default();
        c.model.e_bar = 101.0;
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
        assert_eq!(a.hash().len(), 12);
    }

    #[test]
    fn round_trips_through_toml() {
        let cfg = RunConfig::default();
        assert_eq!(RunConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn validation_catches_bad_blocks() {
        let mut cfg = RunConfig::default();
        cfg.optimize.k_dof = 10;
        assert!(matches!(cfg.validate(), Err(CliError::Usage(_))));
        let mut cfg = RunConfig::default();
        cfg.field.delta = vec![0.5; 3];
        assert!(cfg.validate().is_err());
        let mut cfg = RunConfig::default();
        cfg.model.peclet = -1.0;
        assert!(cfg.validate().is_err());
        RunConfig::default().validate().unwrap();
    }
}
