//! Experiment pipelines and their file outputs.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{
    build_population, io_err, with_pool, Category, ExpError, ExperimentConfig, PopulationEntry,
};
use crate::gen::{build_neighbourhood, random_population, Neighbourhood};
use crate::harness::{measure_learnability, LearnabilityResult};
use crate::learner::{DistKind, NeedDistribution};
use crate::mdl::{irregularity, local_irregularity};
use crate::numeral::{builtin_system, BuiltinName, NumeralSystem};
use crate::regress::{fit_ols_checked, FitError, RegressionFit};
use crate::seed;
use crate::sysfile::{read_system, write_system};

pub const LOCAL_WINDOW: usize = 10;
/// Regressions refuse degenerate populations.
pub const MIN_FIT_POINTS: usize = 3;

/// One measured system: the results-CSV schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemRow {
    pub system_id: String,
    pub irregularity_bits: f64,
    pub local_irregularity_bits: f64,
    pub lexicon_size_atoms: usize,
    pub avg_complexity: f64,
    pub learnability: f64,
    pub auc_stddev: f64,
    pub repetitions: usize,
    pub seed: u64,
    #[serde(skip)]
    pub category: Option<Category>,
}

/// Measures one system end to end: DFA bits over the full range, windowed
/// local bits, surface stats and learnability.
fn measure_entry(
    entry: &PopulationEntry,
    p: &NeedDistribution,
    q: &NeedDistribution,
    config: &ExperimentConfig,
) -> Result<(SystemRow, LearnabilityResult), ExpError> {
    let system = &entry.system;
    let score = irregularity(system, 1, 99).expect("validated systems cover 1..=99");
    let local = local_irregularity(system, LOCAL_WINDOW).expect("window inside range");
    let stats = system.stats();
    let result = measure_learnability(
        system,
        p,
        q,
        &config.train_config(),
        &config.measure_options(),
        config.master_seed,
    )?;
    let row = SystemRow {
        system_id: system.name().to_string(),
        irregularity_bits: score.bits,
        local_irregularity_bits: local,
        lexicon_size_atoms: stats.lexicon_size_atoms,
        avg_complexity: stats.avg_complexity,
        learnability: result.learnability,
        auc_stddev: result.auc_stddev,
        repetitions: result.per_run.len(),
        seed: config.master_seed,
        category: Some(entry.category),
    };
    Ok((row, result))
}

fn measure_population(
    population: &[PopulationEntry],
    p: &NeedDistribution,
    q: &NeedDistribution,
    config: &ExperimentConfig,
) -> Result<Vec<SystemRow>, ExpError> {
    let mut rows = Vec::with_capacity(population.len());
    for entry in population {
        let (row, result) = measure_entry(entry, p, q, config)?;
        if config.dump_traces {
            dump_traces(&config.out_dir, &row.system_id, &result)?;
        }
        rows.push(row);
    }
    Ok(rows)
}

fn dump_traces(
    out_dir: &Path,
    system_id: &str,
    result: &LearnabilityResult,
) -> Result<(), ExpError> {
    let dir = out_dir.join("traces");
    fs::create_dir_all(&dir).map_err(io_err(&dir))?;
    for (idx, run) in result.per_run.iter().enumerate() {
        let path = dir.join(format!("{system_id}_rep{idx}.csv"));
        let mut text = String::from("epoch,accuracy\n");
        for (epoch, acc) in &run.trace {
            text.push_str(&format!("{epoch},{acc}\n"));
        }
        fs::write(&path, text).map_err(io_err(&path))?;
    }
    Ok(())
}

fn learnability_on_irregularity(rows: &[SystemRow]) -> Result<RegressionFit, FitError> {
    let points: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r.irregularity_bits, r.learnability))
        .collect();
    fit_ols_checked(&points, MIN_FIT_POINTS)
}

/// Writes rows in the results-CSV schema.
pub fn write_rows_csv(rows: &[SystemRow], path: &Path) -> Result<(), ExpError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    let mut writer = csv::Writer::from_path(path).map_err(|e| ExpError::Io {
        path: path.display().to_string(),
        source: std::io::Error::other(e),
    })?;
    for row in rows {
        writer.serialize(row).map_err(|e| ExpError::Io {
            path: path.display().to_string(),
            source: std::io::Error::other(e),
        })?;
    }
    writer.flush().map_err(io_err(path))?;
    Ok(())
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<(), ExpError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    let text = serde_json::to_string_pretty(value).expect("serializable report");
    fs::write(path, text + "\n").map_err(io_err(path))
}

#[derive(Debug, Clone, Serialize)]
pub struct Exp1Report {
    pub rows: Vec<SystemRow>,
    pub fit: RegressionFit,
    pub skipped: Vec<String>,
}

/// Experiment 1: power-law training and test distributions.
pub fn run_exp1(config: &ExperimentConfig) -> Result<Exp1Report, ExpError> {
    if config.train_dist != DistKind::PowerLaw || config.test_dist != DistKind::PowerLaw {
        return Err(ExpError::BadConfig(
            "exp1 requires power-law training and test distributions".to_string(),
        ));
    }
    let (population, skipped) = build_population(config)?;
    let p = NeedDistribution::power_law();
    let report = with_pool(config.parallelism, || -> Result<Exp1Report, ExpError> {
        let rows = measure_population(&population, &p, &p, config)?;
        let fit = learnability_on_irregularity(&rows)?;
        Ok(Exp1Report { rows, fit, skipped })
    })?;
    write_rows_csv(&report.rows, &config.out_dir.join("exp1_results.csv"))?;
    write_json(&report.fit, &config.out_dir.join("exp1_fit.json"))?;
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct Exp2Report {
    pub rows: Vec<SystemRow>,
    pub fit_global: RegressionFit,
    pub fit_regular: Option<RegressionFit>,
    pub fit_random: Option<RegressionFit>,
    /// Learnability against average length within the random cluster.
    pub fit_complexity_random: Option<RegressionFit>,
    pub skipped: Vec<String>,
}

/// Experiment 2: power-law training, uniform test distribution, with
/// cluster-restricted fits and the length-against-learnability fit for the
/// random cluster.
pub fn run_exp2(config: &ExperimentConfig) -> Result<Exp2Report, ExpError> {
    if config.train_dist != DistKind::PowerLaw || config.test_dist != DistKind::Uniform {
        return Err(ExpError::BadConfig(
            "exp2 requires power-law training and uniform test distributions".to_string(),
        ));
    }
    let (population, skipped) = build_population(config)?;
    let p = NeedDistribution::power_law();
    let q = NeedDistribution::uniform();
    let report = with_pool(config.parallelism, || -> Result<Exp2Report, ExpError> {
        let rows = measure_population(&population, &p, &q, config)?;
        let fit_global = learnability_on_irregularity(&rows)?;
        let regular: Vec<SystemRow> = rows
            .iter()
            .filter(|r| r.category == Some(Category::Regular))
            .cloned()
            .collect();
        let random: Vec<SystemRow> = rows
            .iter()
            .filter(|r| r.category == Some(Category::Random))
            .cloned()
            .collect();
        let fit_regular = learnability_on_irregularity(&regular).ok();
        let fit_random = learnability_on_irregularity(&random).ok();
        let complexity_points: Vec<(f64, f64)> = random
            .iter()
            .map(|r| (r.avg_complexity, r.learnability))
            .collect();
        let fit_complexity_random = fit_ols_checked(&complexity_points, MIN_FIT_POINTS).ok();
        Ok(Exp2Report {
            rows,
            fit_global,
            fit_regular,
            fit_random,
            fit_complexity_random,
            skipped,
        })
    })?;
    write_rows_csv(&report.rows, &config.out_dir.join("exp2_results.csv"))?;
    #[derive(Serialize)]
    struct Fits<'a> {
        global: &'a RegressionFit,
        regular: &'a Option<RegressionFit>,
        random: &'a Option<RegressionFit>,
        complexity_random: &'a Option<RegressionFit>,
    }
    write_json(
        &Fits {
            global: &report.fit_global,
            regular: &report.fit_regular,
            random: &report.fit_random,
            complexity_random: &report.fit_complexity_random,
        },
        &config.out_dir.join("exp2_fits.json"),
    )?;
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct NeighbourhoodReport {
    pub base: String,
    /// Member count of the neighbourhood (stringified, it can be astronomically large).
    pub size: String,
    pub rows: Vec<SystemRow>,
    /// Absent when the neighbourhood has no irregularity spread to regress over.
    pub fit: Option<RegressionFit>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Exp3Report {
    pub neighbourhoods: Vec<NeighbourhoodReport>,
    pub excluded_small: Vec<String>,
    pub mean_slope: f64,
    /// Standard error of the mean slope.
    pub se_slope: f64,
    pub negative_slopes: usize,
    pub fitted: usize,
}

fn resolve_base(name: &str) -> Result<NumeralSystem, ExpError> {
    if let Ok(builtin) = name.parse::<BuiltinName>() {
        return Ok(builtin_system(builtin));
    }
    let path = Path::new(name);
    if path.exists() {
        return Ok(read_system(path)?);
    }
    Err(ExpError::UnknownBuiltin(name.to_string()))
}

/// Experiment 3: regress learnability on irregularity inside each base
/// system's neighbourhood (greedy extremes plus sampled interiors), then
/// summarize the slope distribution.
pub fn run_exp3(config: &ExperimentConfig) -> Result<Exp3Report, ExpError> {
    let p = NeedDistribution::power_law();
    let q = NeedDistribution::uniform();
    let mut neighbourhoods = Vec::new();
    let mut excluded_small = Vec::new();
    for base_name in &config.neighbourhood_bases {
        let base = resolve_base(base_name)?;
        let hood_seed = seed::derive(
            config.master_seed,
            &[seed::tag("neighbourhood"), seed::tag(base.name())],
        );
        let hood = build_neighbourhood(&base, hood_seed, config.exp3_interiors);
        if hood.size() <= config.exclude_small_neighbourhoods {
            excluded_small.push(base.name().to_string());
            continue;
        }
        let entries: Vec<PopulationEntry> = hood
            .variants
            .iter()
            .map(|system| PopulationEntry {
                system: system.clone(),
                category: Category::Regular,
            })
            .collect();
        let rows = with_pool(config.parallelism, || {
            measure_population(&entries, &p, &q, config)
        })?;
        let fit = learnability_on_irregularity(&rows).ok();
        neighbourhoods.push(NeighbourhoodReport {
            base: base.name().to_string(),
            size: hood.size().to_string(),
            rows,
            fit,
        });
    }
    let slopes: Vec<f64> = neighbourhoods
        .iter()
        .filter_map(|n| n.fit.as_ref().map(|f| f.slope))
        .collect();
    let fitted = slopes.len();
    let mean_slope = if fitted > 0 {
        slopes.iter().sum::<f64>() / fitted as f64
    } else {
        0.0
    };
    let se_slope = if fitted > 1 {
        let var = slopes
            .iter()
            .map(|s| (s - mean_slope).powi(2))
            .sum::<f64>()
            / (fitted - 1) as f64;
        (var / fitted as f64).sqrt()
    } else {
        0.0
    };
    let negative_slopes = slopes.iter().filter(|&&s| s < 0.0).count();
    let report = Exp3Report {
        neighbourhoods,
        excluded_small,
        mean_slope,
        se_slope,
        negative_slopes,
        fitted,
    };

    // Flat per-variant CSV with the neighbourhood as the leading column.
    #[derive(Serialize)]
    struct Exp3Row<'a> {
        neighbourhood: &'a str,
        system_id: &'a str,
        irregularity_bits: f64,
        local_irregularity_bits: f64,
        lexicon_size_atoms: usize,
        avg_complexity: f64,
        learnability: f64,
        auc_stddev: f64,
        repetitions: usize,
        seed: u64,
    }
    let path = config.out_dir.join("exp3_results.csv");
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    let mut writer = csv::Writer::from_path(&path).map_err(|e| ExpError::Io {
        path: path.display().to_string(),
        source: std::io::Error::other(e),
    })?;
    for hood in &report.neighbourhoods {
        for row in &hood.rows {
            writer
                .serialize(Exp3Row {
                    neighbourhood: &hood.base,
                    system_id: &row.system_id,
                    irregularity_bits: row.irregularity_bits,
                    local_irregularity_bits: row.local_irregularity_bits,
                    lexicon_size_atoms: row.lexicon_size_atoms,
                    avg_complexity: row.avg_complexity,
                    learnability: row.learnability,
                    auc_stddev: row.auc_stddev,
                    repetitions: row.repetitions,
                    seed: row.seed,
                })
                .map_err(|e| ExpError::Io {
                    path: path.display().to_string(),
                    source: std::io::Error::other(e),
                })?;
        }
    }
    writer.flush().map_err(io_err(&path))?;
    write_json(&report, &config.out_dir.join("exp3_summary.json"))?;
    Ok(report)
}

/// Row of the `measure` subcommand's CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureRow {
    pub name: String,
    pub bits: f64,
    pub state_count: usize,
    pub transition_count: usize,
    pub alphabet_size: usize,
    pub local_bits: f64,
}

/// Scores each system over the given inclusive range, plus windowed local
/// irregularity over the full 1..=99.
pub fn measure_systems(
    systems: &[NumeralSystem],
    lo: u32,
    hi: u32,
    window: usize,
) -> Result<Vec<MeasureRow>, ExpError> {
    let mut rows = Vec::with_capacity(systems.len());
    for system in systems {
        let report = system.validate();
        if !report.is_valid() {
            return Err(ExpError::BadConfig(format!(
                "{} failed validation: {report}",
                system.name()
            )));
        }
        let score = irregularity(system, lo, hi)
            .map_err(|e| ExpError::BadConfig(format!("{}: {e}", system.name())))?;
        let local = local_irregularity(system, window)
            .map_err(|e| ExpError::BadConfig(format!("{}: {e}", system.name())))?;
        rows.push(MeasureRow {
            name: system.name().to_string(),
            bits: score.bits,
            state_count: score.state_count,
            transition_count: score.transition_count,
            alphabet_size: score.alphabet_size,
            local_bits: local,
        });
    }
    Ok(rows)
}

pub fn write_measure_csv(rows: &[MeasureRow], path: &Path) -> Result<(), ExpError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    let mut writer = csv::Writer::from_path(path).map_err(|e| ExpError::Io {
        path: path.display().to_string(),
        source: std::io::Error::other(e),
    })?;
    for row in rows {
        writer.serialize(row).map_err(|e| ExpError::Io {
            path: path.display().to_string(),
            source: std::io::Error::other(e),
        })?;
    }
    writer.flush().map_err(io_err(path))?;
    Ok(())
}

/// Emits `count` random baseline systems as definition files plus a JSON
/// manifest. Byte-stable for a fixed seed.
pub fn generate_random_files(
    count: usize,
    master_seed: u64,
    out_dir: &Path,
) -> Result<Vec<String>, ExpError> {
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let population = random_population(count, master_seed)?;
    let mut files = Vec::new();
    let mut manifest_systems = Vec::new();
    for (lexicon, system) in &population {
        let file = format!("{}.tsv", system.name());
        write_system(system, &out_dir.join(&file))?;
        manifest_systems.push(serde_json::json!({
            "name": system.name(),
            "file": file,
            "lexicon": lexicon,
            "stats": system.stats(),
        }));
        files.push(file);
    }
    let manifest = serde_json::json!({
        "kind": "random",
        "seed": master_seed,
        "count": count,
        "systems": manifest_systems,
    });
    let path = out_dir.join("manifest.json");
    fs::write(
        &path,
        serde_json::to_string_pretty(&manifest).expect("manifest") + "\n",
    )
    .map_err(io_err(&path))?;
    Ok(files)
}

/// Emits a base system's neighbourhood: the base, both greedy extremes and
/// any interior variants, plus a manifest recording per-number alternative
/// counts and the neighbourhood size.
pub fn generate_neighbourhood_files(
    base_name: &str,
    master_seed: u64,
    interiors: usize,
    out_dir: &Path,
) -> Result<Neighbourhood, ExpError> {
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let base = resolve_base(base_name)?;
    let hood_seed = seed::derive(
        master_seed,
        &[seed::tag("neighbourhood"), seed::tag(base.name())],
    );
    let hood = build_neighbourhood(&base, hood_seed, interiors);
    write_system(&base, &out_dir.join(format!("{}.tsv", base.name())))?;
    let mut variant_files = Vec::new();
    for variant in &hood.variants {
        let file = format!("{}.tsv", variant.name());
        write_system(variant, &out_dir.join(&file))?;
        variant_files.push(file);
    }
    let alternative_counts: BTreeMap<u32, usize> = hood
        .alternatives
        .iter()
        .map(|(&n, alts)| (n, alts.len()))
        .collect();
    let manifest = serde_json::json!({
        "kind": "neighbourhood",
        "base": base.name(),
        "seed": master_seed,
        "size": hood.size().to_string(),
        "lexicon": hood.lexicon,
        "alternative_counts": alternative_counts,
        "variants": variant_files,
    });
    let path = out_dir.join("manifest.json");
    fs::write(
        &path,
        serde_json::to_string_pretty(&manifest).expect("manifest") + "\n",
    )
    .map_err(io_err(&path))?;
    Ok(hood)
}
