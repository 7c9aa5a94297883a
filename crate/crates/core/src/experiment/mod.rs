//! Batch experiment pipelines over populations of numeral systems.
//!
//! Three experiments share one flow — measure irregularity, measure
//! learnability, regress one on the other — and differ in the population
//! and the test distribution:
//!
//! 1. exp1: power-law train and test distributions.
//! 2. exp2: power-law training, uniform test (generalisation pressure),
//!    with sub-population fits for the regular and random clusters.
//! 3. exp3: neighbourhood families of a base system, regressing within
//!    each family and summarizing slopes across families.

mod run;

pub use run::{
    generate_neighbourhood_files, generate_random_files, measure_systems, run_exp1, run_exp2,
    run_exp3, write_measure_csv, write_rows_csv, Exp1Report, Exp2Report, Exp3Report, MeasureRow,
    NeighbourhoodReport, SystemRow,
};

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gen::GenError;
use crate::harness::MeasureOptions;
use crate::learner::{DistKind, TrainConfig, TrainError};
use crate::numeral::{builtin_system, BuiltinName, NumeralSystem, SystemSource};
use crate::regress::FitError;
use crate::sysfile::{read_systems_dir, SysFileError};

/// Scale presets. `Paper` mirrors the full training protocol; `Desk` is the
/// reduced profile meant for laptops and the test suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    Paper,
    Desk,
}

impl std::str::FromStr for Profile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paper" => Ok(Profile::Paper),
            "desk" => Ok(Profile::Desk),
            other => Err(format!("unknown profile {other:?}")),
        }
    }
}

/// Full experiment configuration. A JSON file with these fields (all
/// optional) can seed the config; explicit values override the profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    /// Directory of system-definition files to ingest into the population.
    pub systems_dir: Option<PathBuf>,
    /// Built-in systems forming the regular cluster.
    pub builtins: Vec<String>,
    /// Number of random baseline systems; `None` takes the profile value.
    pub random_baselines: Option<usize>,
    pub train_dist: DistKind,
    pub test_dist: DistKind,
    pub profile: Profile,
    pub epochs: Option<u32>,
    pub repetitions: Option<usize>,
    pub eval_interval: Option<u32>,
    pub master_seed: u64,
    /// Worker threads; 0 lets the pool pick.
    pub parallelism: usize,
    pub out_dir: PathBuf,
    /// Neighbourhoods with at most this many member systems are excluded.
    pub exclude_small_neighbourhoods: u128,
    /// Random interior variants per neighbourhood alongside the extremes.
    pub exp3_interiors: usize,
    /// Bases whose neighbourhoods exp3 explores.
    pub neighbourhood_bases: Vec<String>,
    /// Evaluate on all of 1..=99 instead of sampling the test set.
    pub full_enumeration: bool,
    /// Write per-run accuracy traces under `<out>/traces/`.
    pub dump_traces: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            systems_dir: None,
            builtins: vec![
                "mandarin".to_string(),
                "base20".to_string(),
                "french_like".to_string(),
            ],
            random_baselines: None,
            train_dist: DistKind::PowerLaw,
            test_dist: DistKind::Uniform,
            profile: Profile::Desk,
            epochs: None,
            repetitions: None,
            eval_interval: None,
            master_seed: 1,
            parallelism: 0,
            out_dir: PathBuf::from("out"),
            exclude_small_neighbourhoods: 10,
            exp3_interiors: 2,
            neighbourhood_bases: vec![
                "mandarin".to_string(),
                "base20".to_string(),
                "french_like".to_string(),
                "basque_like".to_string(),
            ],
            full_enumeration: false,
            dump_traces: false,
        }
    }
}

impl ExperimentConfig {
    /// Training hyperparameters after applying the profile and overrides.
    pub fn train_config(&self) -> TrainConfig {
        let epochs = self.epochs.unwrap_or(match self.profile {
            Profile::Paper => 30_000,
            Profile::Desk => 3_000,
        });
        TrainConfig {
            epochs,
            ..TrainConfig::default()
        }
    }

    /// Harness options after profile and overrides.
    pub fn measure_options(&self) -> MeasureOptions {
        let repetitions = self.repetitions.unwrap_or(match self.profile {
            Profile::Paper => 20,
            Profile::Desk => 5,
        });
        let eval_interval = self.eval_interval.unwrap_or(match self.profile {
            Profile::Paper => 300,
            Profile::Desk => 100,
        });
        MeasureOptions {
            repetitions,
            eval_interval,
            full_enumeration: self.full_enumeration,
        }
    }

    pub fn baseline_count(&self) -> usize {
        self.random_baselines.unwrap_or(match self.profile {
            Profile::Paper => 300,
            Profile::Desk => 10,
        })
    }
}

#[derive(Debug, Error)]
pub enum ExpError {
    #[error("configuration: {0}")]
    BadConfig(String),
    #[error(transparent)]
    SysFile(#[from] SysFileError),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Train(#[from] TrainError),
    #[error("regression: {0}")]
    Fit(#[from] FitError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("unknown builtin {0:?}")]
    UnknownBuiltin(String),
}

pub(crate) fn io_err(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> ExpError + '_ {
    move |source| ExpError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Which cluster a population member belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    /// Attested or attested-like systems (builtin or ingested).
    Regular,
    /// Random baseline systems.
    Random,
}

#[derive(Debug, Clone)]
pub struct PopulationEntry {
    pub system: NumeralSystem,
    pub category: Category,
}

/// Assembles the experiment population: built-ins, any ingested directory,
/// and seeded random baselines. Systems failing validation are returned
/// separately rather than silently dropped.
pub fn build_population(
    config: &ExperimentConfig,
) -> Result<(Vec<PopulationEntry>, Vec<String>), ExpError> {
    let mut population = Vec::new();
    let mut skipped = Vec::new();
    for name in &config.builtins {
        let parsed: BuiltinName = name
            .parse()
            .map_err(|_| ExpError::UnknownBuiltin(name.clone()))?;
        population.push(PopulationEntry {
            system: builtin_system(parsed),
            category: Category::Regular,
        });
    }
    if let Some(dir) = &config.systems_dir {
        for system in read_systems_dir(dir)? {
            let report = system.validate();
            if report.is_valid() {
                let category = match system.source() {
                    SystemSource::Generated => Category::Random,
                    _ => Category::Regular,
                };
                population.push(PopulationEntry { system, category });
            } else {
                skipped.push(format!("{}: {report}", system.name()));
            }
        }
    }
    for (_, system) in crate::gen::random_population(config.baseline_count(), config.master_seed)?
    {
        population.push(PopulationEntry {
            system,
            category: Category::Random,
        });
    }
    Ok((population, skipped))
}

/// Runs `body` on a rayon pool of the configured width (0 = default).
pub fn with_pool<T: Send>(parallelism: usize, body: impl FnOnce() -> T + Send) -> T {
    if parallelism == 0 {
        return body();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build()
        .expect("thread pool");
    pool.install(body)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profiles_resolve_to_documented_scales() {
        let desk = ExperimentConfig::default();
        assert_eq!(desk.train_config().epochs, 3000);
        assert_eq!(desk.measure_options().repetitions, 5);
        assert_eq!(desk.measure_options().eval_interval, 100);
        assert_eq!(desk.baseline_count(), 10);

        let paper = ExperimentConfig {
            profile: Profile::Paper,
            ..ExperimentConfig::default()
        };
        assert_eq!(paper.train_config().epochs, 30_000);
        assert_eq!(paper.measure_options().repetitions, 20);
        assert_eq!(paper.measure_options().eval_interval, 300);
        assert_eq!(paper.baseline_count(), 300);

        let tweaked = ExperimentConfig {
            epochs: Some(77),
            repetitions: Some(2),
            eval_interval: Some(11),
            random_baselines: Some(1),
            ..ExperimentConfig::default()
        };
        assert_eq!(tweaked.train_config().epochs, 77);
        assert_eq!(tweaked.measure_options().repetitions, 2);
        assert_eq!(tweaked.measure_options().eval_interval, 11);
        assert_eq!(tweaked.baseline_count(), 1);
    }

    #[test]
    fn config_round_trips_through_json() {
        let config = ExperimentConfig {
            master_seed: 42,
            parallelism: 8,
            ..ExperimentConfig::default()
        };
        let text = serde_json::to_string_pretty(&config).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, config);
        // Partial files rely on defaults.
        let partial: ExperimentConfig =
            serde_json::from_str(r#"{"master_seed": 7, "profile": "paper"}"#).unwrap();
        assert_eq!(partial.master_seed, 7);
        assert_eq!(partial.profile, Profile::Paper);
        assert_eq!(partial.builtins, ExperimentConfig::default().builtins);
    }

    #[test]
    fn population_includes_builtins_and_baselines() {
        let config = ExperimentConfig {
            random_baselines: Some(3),
            ..ExperimentConfig::default()
        };
        let (population, skipped) = build_population(&config).unwrap();
        assert!(skipped.is_empty());
        assert_eq!(population.len(), 3 + 3);
        let regular = population
            .iter()
            .filter(|e| e.category == Category::Regular)
            .count();
        assert_eq!(regular, 3);
        for entry in &population {
            assert!(entry.system.validate().is_valid(), "{}", entry.system.name());
        }
    }

    #[test]
    fn unknown_builtin_is_rejected() {
        let config = ExperimentConfig {
            builtins: vec!["klingon".to_string()],
            ..ExperimentConfig::default()
        };
        match build_population(&config) {
            Err(ExpError::UnknownBuiltin(name)) => assert_eq!(name, "klingon"),
            other => panic!("unexpected: {other:?}"),
        }
    }
}
