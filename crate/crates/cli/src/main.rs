//! Command-line harness: measure regularity, generate comparison systems,
//! train agents and reproduce the three experiments.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use recnum::experiment::{
    generate_neighbourhood_files, generate_random_files, measure_systems, run_exp1, run_exp2,
    run_exp3, write_measure_csv, ExpError, ExperimentConfig, Profile,
};
use recnum::harness::{measure_learnability, MeasureOptions};
use recnum::learner::{DistKind, NeedDistribution};
use recnum::numeral::{builtin_system, BuiltinName, NumeralSystem};
use recnum::regress::fit_ols_checked;
use recnum::sysfile::{read_system, read_systems_dir};

const EXIT_VALIDATION: u8 = 2;
const EXIT_ABORT: u8 = 3;

#[derive(Parser)]
#[command(
    name = "recnum",
    about = "Regularity and learnability of recursive numeral systems",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score systems: description-length bits over a range plus local bits.
    Measure(MeasureArgs),
    /// Produce comparison systems as definition files.
    #[command(subcommand)]
    Generate(GenerateCmd),
    /// Train agents on one system and dump accuracy traces.
    Train(TrainArgs),
    /// Experiment 1: power-law training and test distributions.
    Exp1(ExpArgs),
    /// Experiment 2: power-law training, uniform test distribution.
    Exp2(ExpArgs),
    /// Experiment 3: regularity extremes within base-system neighbourhoods.
    Exp3(ExpArgs),
    /// Ordinary least squares over two columns of a results CSV.
    Regress(RegressArgs),
}

#[derive(Args)]
struct MeasureArgs {
    /// Built-in systems to score.
    #[arg(long = "builtin")]
    builtins: Vec<String>,
    /// Directory of system-definition files to score.
    #[arg(long)]
    systems_dir: Option<PathBuf>,
    /// Inclusive range, e.g. 1..10.
    #[arg(long, default_value = "1..99")]
    range: String,
    /// Window size for local irregularity.
    #[arg(long, default_value_t = 10)]
    window: usize,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum GenerateCmd {
    /// Seeded random baseline systems.
    Random(GenerateRandomArgs),
    /// A base system's neighbourhood: greedy extremes plus interiors.
    Neighbourhood(GenerateNeighbourhoodArgs),
}

#[derive(Args)]
struct GenerateRandomArgs {
    #[arg(long, default_value_t = 10)]
    count: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenerateNeighbourhoodArgs {
    /// Built-in name or path to a system file.
    #[arg(long)]
    base: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Random interior variants besides the two greedy extremes.
    #[arg(long, default_value_t = 2)]
    interiors: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    /// Built-in system to train on.
    #[arg(long, conflicts_with = "system")]
    builtin: Option<String>,
    /// System-definition file to train on.
    #[arg(long)]
    system: Option<PathBuf>,
    #[arg(long = "train-dist", default_value = "power")]
    train_dist: DistKind,
    #[arg(long = "test-dist", default_value = "uniform")]
    test_dist: DistKind,
    #[arg(long)]
    epochs: Option<u32>,
    #[arg(long, default_value_t = 1)]
    reps: usize,
    #[arg(long)]
    eval_interval: Option<u32>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_parser = parse_profile, default_value = "desk")]
    profile: Profile,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Clone)]
struct ExpArgs {
    /// JSON config file; explicit flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    systems_dir: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = parse_profile)]
    profile: Option<Profile>,
    #[arg(long)]
    epochs: Option<u32>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    eval_interval: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (0 = automatic).
    #[arg(long)]
    parallel: Option<usize>,
    #[arg(long = "train-dist")]
    train_dist: Option<DistKind>,
    #[arg(long = "test-dist")]
    test_dist: Option<DistKind>,
    #[arg(long = "exclude-small-neighbourhoods")]
    exclude_small_neighbourhoods: Option<u128>,
    #[arg(long)]
    random_baselines: Option<usize>,
    /// Write per-run accuracy traces.
    #[arg(long, default_value_t = false)]
    dump_traces: bool,
}

#[derive(Args)]
struct RegressArgs {
    /// Results CSV to read.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "irregularity_bits")]
    x: String,
    #[arg(long, default_value = "learnability")]
    y: String,
}

fn parse_profile(s: &str) -> Result<Profile, String> {
    s.parse()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Measure(args) => cmd_measure(args),
        Command::Generate(GenerateCmd::Random(args)) => cmd_generate_random(args),
        Command::Generate(GenerateCmd::Neighbourhood(args)) => cmd_generate_neighbourhood(args),
        Command::Train(args) => cmd_train(args),
        Command::Exp1(args) => cmd_exp(args, Exp::One),
        Command::Exp2(args) => cmd_exp(args, Exp::Two),
        Command::Exp3(args) => cmd_exp(args, Exp::Three),
        Command::Regress(args) => cmd_regress(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            let mut source = err.source();
            while let Some(cause) = source {
                eprintln!("  caused by: {cause}");
                source = cause.source();
            }
            ExitCode::from(exit_code_for(err.as_ref()))
        }
    }
}

type CmdResult = Result<(), Box<dyn std::error::Error>>;

fn exit_code_for(err: &(dyn std::error::Error + 'static)) -> u8 {
    if let Some(exp) = err.downcast_ref::<ExpError>() {
        return match exp {
            ExpError::BadConfig(_)
            | ExpError::SysFile(_)
            | ExpError::UnknownBuiltin(_)
            | ExpError::Fit(_)
            | ExpError::Gen(_) => EXIT_VALIDATION,
            ExpError::Train(_) | ExpError::Io { .. } => EXIT_ABORT,
        };
    }
    if err.downcast_ref::<recnum::sysfile::SysFileError>().is_some() {
        return EXIT_VALIDATION;
    }
    if err.downcast_ref::<recnum::learner::TrainError>().is_some() {
        return EXIT_ABORT;
    }
    if let Some(cli_err) = err.downcast_ref::<CliError>() {
        return cli_err.code;
    }
    EXIT_ABORT
}

#[derive(Debug)]
struct CliError {
    message: String,
    code: u8,
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

fn invalid(message: impl Into<String>) -> Box<dyn std::error::Error> {
    Box::new(CliError {
        message: message.into(),
        code: EXIT_VALIDATION,
    })
}

fn parse_range(text: &str) -> Result<(u32, u32), Box<dyn std::error::Error>> {
    let (lo, hi) = text
        .split_once("..")
        .ok_or_else(|| invalid(format!("range must look like 1..99, got {text:?}")))?;
    let lo: u32 = lo
        .trim()
        .parse()
        .map_err(|_| invalid(format!("bad range start {lo:?}")))?;
    let hi: u32 = hi
        .trim()
        .trim_start_matches('=')
        .parse()
        .map_err(|_| invalid(format!("bad range end {hi:?}")))?;
    if lo < 1 || hi > 99 || lo > hi {
        return Err(invalid(format!("range {lo}..{hi} must sit inside 1..99")));
    }
    Ok((lo, hi))
}

fn collect_systems(
    builtins: &[String],
    systems_dir: Option<&PathBuf>,
) -> Result<Vec<NumeralSystem>, Box<dyn std::error::Error>> {
    let mut systems = Vec::new();
    for name in builtins {
        let parsed: BuiltinName = name.parse().map_err(|e| invalid(format!("{e}")))?;
        systems.push(builtin_system(parsed));
    }
    if let Some(dir) = systems_dir {
        systems.extend(read_systems_dir(dir)?);
    }
    if systems.is_empty() {
        return Err(invalid("no systems given: use --builtin or --systems-dir"));
    }
    Ok(systems)
}

fn cmd_measure(args: MeasureArgs) -> CmdResult {
    let (lo, hi) = parse_range(&args.range)?;
    let systems = collect_systems(&args.builtins, args.systems_dir.as_ref())?;
    for system in &systems {
        let report = system.validate();
        if !report.is_valid() {
            return Err(invalid(format!(
                "{} failed validation: {report}",
                system.name()
            )));
        }
    }
    let rows = measure_systems(&systems, lo, hi, args.window)?;
    write_measure_csv(&rows, &args.out)?;
    for row in &rows {
        println!(
            "{}: {:.3} bits (|S|={}, |Z|={}, |A|={}), local {:.3}",
            row.name, row.bits, row.state_count, row.transition_count, row.alphabet_size,
            row.local_bits
        );
    }
    Ok(())
}

fn cmd_generate_random(args: GenerateRandomArgs) -> CmdResult {
    let files = generate_random_files(args.count, args.seed, &args.out)?;
    println!("wrote {} systems to {}", files.len(), args.out.display());
    Ok(())
}

fn cmd_generate_neighbourhood(args: GenerateNeighbourhoodArgs) -> CmdResult {
    let hood = generate_neighbourhood_files(&args.base, args.seed, args.interiors, &args.out)?;
    println!(
        "neighbourhood of {}: size {}, {} variants written to {}",
        hood.base.name(),
        hood.size(),
        hood.variants.len(),
        args.out.display()
    );
    Ok(())
}

fn cmd_train(args: TrainArgs) -> CmdResult {
    let system = match (&args.builtin, &args.system) {
        (Some(name), None) => {
            let parsed: BuiltinName = name.parse().map_err(|e| invalid(format!("{e}")))?;
            builtin_system(parsed)
        }
        (None, Some(path)) => read_system(path)?,
        _ => return Err(invalid("give exactly one of --builtin or --system")),
    };
    let report = system.validate();
    if !report.is_valid() {
        return Err(invalid(format!(
            "{} failed validation: {report}",
            system.name()
        )));
    }
    let scaffold = ExperimentConfig {
        profile: args.profile,
        epochs: args.epochs,
        eval_interval: args.eval_interval,
        ..ExperimentConfig::default()
    };
    let train_config = scaffold.train_config();
    let options = MeasureOptions {
        repetitions: args.reps,
        eval_interval: scaffold.measure_options().eval_interval,
        full_enumeration: false,
    };
    let p = dist_of(args.train_dist);
    let q = dist_of(args.test_dist);
    let result = measure_learnability(&system, &p, &q, &train_config, &options, args.seed)?;
    std::fs::create_dir_all(&args.out)
        .map_err(|e| invalid(format!("{}: {e}", args.out.display())))?;
    for (idx, run) in result.per_run.iter().enumerate() {
        let mut text = String::from("epoch,accuracy\n");
        for (epoch, acc) in &run.trace {
            text.push_str(&format!("{epoch},{acc}\n"));
        }
        std::fs::write(args.out.join(format!("trace_rep{idx}.csv")), text)?;
    }
    let dump = serde_json::json!({
        "system": system.name(),
        "seed": args.seed,
        "train_dist": args.train_dist,
        "test_dist": args.test_dist,
        "config": train_config,
        "learnability": result.learnability,
        "auc_stddev": result.auc_stddev,
        "per_run": result.per_run.iter().map(|r| serde_json::json!({
            "seed": r.seed,
            "auc": r.auc,
        })).collect::<Vec<_>>(),
    });
    std::fs::write(
        args.out.join("run.json"),
        serde_json::to_string_pretty(&dump)? + "\n",
    )?;
    println!(
        "{}: learnability {:.4} over {} repetition(s)",
        system.name(),
        result.learnability,
        result.per_run.len()
    );
    Ok(())
}

fn dist_of(kind: DistKind) -> NeedDistribution {
    match kind {
        DistKind::PowerLaw => NeedDistribution::power_law(),
        DistKind::Uniform => NeedDistribution::uniform(),
        DistKind::Degenerate => NeedDistribution::degenerate(1),
    }
}

enum Exp {
    One,
    Two,
    Three,
}

fn cmd_exp(args: ExpArgs, which: Exp) -> CmdResult {
    let mut config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| invalid(format!("{}: {e}", path.display())))?;
            serde_json::from_str::<ExperimentConfig>(&text)
                .map_err(|e| invalid(format!("{}: {e}", path.display())))?
        }
        None => ExperimentConfig::default(),
    };
    // Per-experiment distribution defaults; explicit flags still win.
    match which {
        Exp::One => {
            config.train_dist = DistKind::PowerLaw;
            config.test_dist = DistKind::PowerLaw;
        }
        Exp::Two | Exp::Three => {
            config.train_dist = DistKind::PowerLaw;
            config.test_dist = DistKind::Uniform;
        }
    }
    if let Some(dir) = args.systems_dir {
        config.systems_dir = Some(dir);
    }
    if let Some(out) = args.out {
        config.out_dir = out;
    }
    if let Some(profile) = args.profile {
        config.profile = profile;
    }
    if let Some(epochs) = args.epochs {
        config.epochs = Some(epochs);
    }
    if let Some(reps) = args.reps {
        config.repetitions = Some(reps);
    }
    if let Some(interval) = args.eval_interval {
        config.eval_interval = Some(interval);
    }
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    if let Some(parallel) = args.parallel {
        config.parallelism = parallel;
    }
    if let Some(kind) = args.train_dist {
        config.train_dist = kind;
    }
    if let Some(kind) = args.test_dist {
        config.test_dist = kind;
    }
    if let Some(threshold) = args.exclude_small_neighbourhoods {
        config.exclude_small_neighbourhoods = threshold;
    }
    if let Some(count) = args.random_baselines {
        config.random_baselines = Some(count);
    }
    if args.dump_traces {
        config.dump_traces = true;
    }

    match which {
        Exp::One => {
            let report = run_exp1(&config)?;
            for line in &report.skipped {
                eprintln!("skipped: {line}");
            }
            println!(
                "exp1: {} systems, slope {:.6}, intercept {:.6}",
                report.rows.len(),
                report.fit.slope,
                report.fit.intercept
            );
        }
        Exp::Two => {
            let report = run_exp2(&config)?;
            for line in &report.skipped {
                eprintln!("skipped: {line}");
            }
            println!(
                "exp2: {} systems, global slope {:.6}",
                report.rows.len(),
                report.fit_global.slope
            );
            if let Some(fit) = &report.fit_regular {
                println!("  regular-cluster slope {:.6}", fit.slope);
            }
            if let Some(fit) = &report.fit_random {
                println!("  random-cluster slope {:.6}", fit.slope);
            }
            if let Some(fit) = &report.fit_complexity_random {
                println!("  random-cluster complexity slope {:.6}", fit.slope);
            }
        }
        Exp::Three => {
            let report = run_exp3(&config)?;
            for name in &report.excluded_small {
                eprintln!("excluded small neighbourhood: {name}");
            }
            println!(
                "exp3: {} neighbourhoods fitted, mean slope {:.6} (se {:.6}), {} negative",
                report.fitted, report.mean_slope, report.se_slope, report.negative_slopes
            );
        }
    }
    Ok(())
}

fn cmd_regress(args: RegressArgs) -> CmdResult {
    let mut reader = csv::Reader::from_path(&args.input)
        .map_err(|e| invalid(format!("{}: {e}", args.input.display())))?;
    let headers = reader.headers()?.clone();
    let x_idx = headers
        .iter()
        .position(|h| h == args.x)
        .ok_or_else(|| invalid(format!("no column {:?}", args.x)))?;
    let y_idx = headers
        .iter()
        .position(|h| h == args.y)
        .ok_or_else(|| invalid(format!("no column {:?}", args.y)))?;
    let mut points = Vec::new();
    for record in reader.records() {
        let record = record?;
        let x: f64 = record[x_idx]
            .parse()
            .map_err(|_| invalid(format!("bad value {:?} in column {}", &record[x_idx], args.x)))?;
        let y: f64 = record[y_idx]
            .parse()
            .map_err(|_| invalid(format!("bad value {:?} in column {}", &record[y_idx], args.y)))?;
        points.push((x, y));
    }
    let fit = fit_ols_checked(&points, 3).map_err(|e| invalid(format!("{e}")))?;
    println!("{}", serde_json::to_string_pretty(&fit)?);
    Ok(())
}
