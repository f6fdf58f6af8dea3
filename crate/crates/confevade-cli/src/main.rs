//! Command-line front end: generates variability models, samples and labels
//! configurations, trains classifiers, runs attacks and reproduces the
//! campaign grids. All randomness flows from a single --seed flag (falling
//! back to CONFEVADE_SEED), so identical invocations write identical files.
//!
//! Exit codes: 0 success, 2 input or parse error, 3 precondition violation,
//! 4 numerical error.

mod manifest;

use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use confevade::attack::{run_attack_pool, AttackKind, AttackParams, SignMode};
use confevade::campaign::{
    benchmark_train_params, label_dataset, rq1_campaign, rq2_retrain, summarize, summary_csv,
    CampaignReport, GridSpec, InjectionLabel, Protocol, Rq1Config, Rq2Config, SyntheticOracle,
    CALIBRATION_SAMPLES, DEFAULT_MINORITY_RATIO, DEFAULT_QUALITY_FEATURES,
};
use confevade::classifier::{LinearSvm, TrainParams};
use confevade::data::{
    balance_with_centroids, load_configs_csv, load_csv, save_configs_csv, save_csv,
    split_stratified, Label,
};
use confevade::seed::{derive_seed, purpose};
use confevade::vm::{gen_motiv_like_with, FeatureKind, VariabilityModel};
use confevade::{Error, ErrorCategory};

#[derive(Debug)]
enum CliError {
    Lib(Error),
    Arg(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Arg(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

type CliResult<T> = Result<T, CliError>;

fn exit_code(error: &CliError) -> i32 {
    match error {
        CliError::Arg(_) => 2,
        CliError::Lib(e) => match e.category() {
            ErrorCategory::Input => 2,
            ErrorCategory::Precondition => 3,
            ErrorCategory::Numerical => 4,
        },
    }
}

#[derive(Parser)]
#[command(
    name = "confevade",
    version,
    about = "Adversarial configuration generation against learned acceptability classifiers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone)]
enum Command {
    /// Generate or inspect variability models.
    Model {
        #[command(subcommand)]
        action: ModelAction,
    },
    /// Generate synthetic labeling oracles.
    Oracle {
        #[command(subcommand)]
        action: OracleAction,
    },
    /// Sample valid configurations into a CSV (no label column).
    Sample(SampleArgs),
    /// Label a configuration CSV with an oracle.
    Label(LabelArgs),
    /// Stratified train/test split of a labeled CSV.
    Split(SplitArgs),
    /// Balance classes by centroid augmentation.
    Balance(BalanceArgs),
    /// Train the linear classifier on a labeled CSV.
    Train(TrainArgs),
    /// Run pooled gradient evasion attacks and export the results.
    Attack(AttackArgs),
    /// Run the random-perturbation baseline and export the results.
    Baseline(BaselineArgs),
    /// Attack-effectiveness grid campaign (success and validity counts).
    Rq1(Rq1Args),
    /// Retraining-degradation campaign (accuracy after injection).
    Rq2(Rq2Args),
    /// Summarize a campaign report into a plotting-ready CSV.
    Report(ReportArgs),
    /// Re-run a recorded manifest, reproducing its outputs exactly.
    Rerun { manifest: PathBuf },
}

#[derive(Subcommand, Clone)]
enum ModelAction {
    /// Write a synthetic model file.
    Gen {
        /// Model family to generate.
        #[arg(long, default_value = "motiv-like")]
        preset: Preset,
        /// Number of requires/excludes constraints among Boolean options.
        #[arg(long, default_value_t = 3)]
        constraints: usize,
        #[arg(long, env = "CONFEVADE_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print feature counts and the log10 size of the configuration space.
    Inspect { path: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    MotivLike,
}

#[derive(Subcommand, Clone)]
enum OracleAction {
    /// Build a sparse quality oracle calibrated to a non-acceptable ratio.
    Gen {
        #[arg(long)]
        model: PathBuf,
        /// Number of scored quality features.
        #[arg(long, default_value_t = DEFAULT_QUALITY_FEATURES)]
        features: usize,
        /// Target non-acceptable fraction.
        #[arg(long, default_value_t = DEFAULT_MINORITY_RATIO)]
        ratio: f64,
        /// Calibration sample size.
        #[arg(long, default_value_t = CALIBRATION_SAMPLES)]
        calib_n: usize,
        #[arg(long, env = "CONFEVADE_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args, Clone)]
struct SampleArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    n: usize,
    #[arg(long, env = "CONFEVADE_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Clone)]
struct LabelArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    oracle: PathBuf,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Clone)]
struct SplitArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    train_n: usize,
    #[arg(long, env = "CONFEVADE_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out_train: PathBuf,
    #[arg(long)]
    out_test: PathBuf,
}

#[derive(Args, Clone)]
struct BalanceArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    input: PathBuf,
    #[arg(long, env = "CONFEVADE_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Clone)]
struct TrainArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    input: PathBuf,
    /// L2 regularization strength.
    #[arg(long, default_value_t = 1.0)]
    reg: f64,
    #[arg(long, default_value_t = 50)]
    epochs: usize,
    /// Initial learning rate (decays as 1/t).
    #[arg(long, default_value_t = 1.0)]
    lr: f64,
    /// Fit a min-max scaler on the training set.
    #[arg(long)]
    scale: bool,
    #[arg(long, env = "CONFEVADE_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Clone)]
struct AttackCommonArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    svm: PathBuf,
    /// Labeled CSV supplying the starting pool.
    #[arg(long)]
    input: PathBuf,
    /// Class the attacks start from.
    #[arg(long, default_value = "non-acceptable", value_parser = parse_label)]
    source: Label,
    /// Step size t.
    #[arg(long)]
    t: f64,
    /// Number of displacements per attack.
    #[arg(long)]
    disp: usize,
    #[arg(long, default_value_t = 400)]
    n_attacks: usize,
    /// Seed the pool only with rows the classifier currently gets right.
    #[arg(long)]
    only_correct: bool,
    /// Repair feature types once at the end instead of after every step.
    #[arg(long)]
    end_repair_only: bool,
    #[arg(long, env = "CONFEVADE_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Clone)]
struct AttackArgs {
    #[command(flatten)]
    common: AttackCommonArgs,
}

#[derive(Args, Clone)]
struct BaselineArgs {
    #[command(flatten)]
    common: AttackCommonArgs,
    /// Draw the direction sign once per attack instead of every step.
    #[arg(long)]
    sign_per_attack: bool,
}

#[derive(Args, Clone)]
struct CampaignTrainArgs {
    /// L2 regularization strength.
    #[arg(long, default_value_t = benchmark_train_params().regularization)]
    reg: f64,
    #[arg(long, default_value_t = benchmark_train_params().epochs)]
    epochs: usize,
    /// Initial learning rate (decays as 1/t).
    #[arg(long, default_value_t = benchmark_train_params().learning_rate)]
    lr: f64,
    /// Fit a min-max scaler on the training set.
    #[arg(long)]
    scale: bool,
}

impl CampaignTrainArgs {
    fn to_params(&self) -> TrainParams {
        TrainParams {
            regularization: self.reg,
            epochs: self.epochs,
            learning_rate: self.lr,
            seed: 0,
            min_max_scale: self.scale,
        }
    }
}

#[derive(Args, Clone)]
struct OracleSourceArgs {
    /// Oracle file; generated from the seed when omitted.
    #[arg(long)]
    oracle: Option<PathBuf>,
    /// Quality features for a generated oracle.
    #[arg(long, default_value_t = DEFAULT_QUALITY_FEATURES)]
    oracle_features: usize,
    /// Non-acceptable ratio for a generated oracle.
    #[arg(long, default_value_t = DEFAULT_MINORITY_RATIO)]
    ratio: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Evasion,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum BalancedArg {
    False,
    True,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum InjectArg {
    Oracle,
    Source,
}

#[derive(Args, Clone)]
struct Rq1Args {
    #[arg(long)]
    model: PathBuf,
    #[command(flatten)]
    oracle: OracleSourceArgs,
    /// Step sizes: comma list or a power-of-ten range like 1e-6..1e6.
    #[arg(long, default_value = "1e-6,1e-4,1e-2,1,1e2,1e4,1e6")]
    t_grid: String,
    /// Displacement budgets (comma list).
    #[arg(long, default_value = "20,50,100")]
    disp: String,
    #[arg(long, default_value = "false")]
    balanced: BalancedArg,
    #[arg(long, default_value_t = 5)]
    reps: usize,
    #[arg(long, default_value_t = 400)]
    attacks: usize,
    #[arg(long, default_value = "evasion")]
    kind: KindArg,
    #[arg(long, default_value = "non-acceptable", value_parser = parse_label)]
    source: Label,
    #[arg(long, default_value_t = Protocol::default().sample_n)]
    sample_n: usize,
    #[arg(long, default_value_t = Protocol::default().train_n)]
    train_n: usize,
    #[command(flatten)]
    train: CampaignTrainArgs,
    /// Full-scale settings: 10 repetitions, 4000 attacks.
    #[arg(long)]
    paper_scale: bool,
    /// Thread count for campaign cells (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, env = "CONFEVADE_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Clone)]
struct Rq2Args {
    #[arg(long)]
    model: PathBuf,
    #[command(flatten)]
    oracle: OracleSourceArgs,
    /// Step sizes: comma list or a power-of-ten range like 1e-4..1e1.
    #[arg(long, default_value = "1e-4..1e1")]
    t_grid: String,
    #[arg(long, default_value_t = 20)]
    disp: usize,
    #[arg(long, default_value_t = 25)]
    n_adv: usize,
    #[arg(long, default_value_t = 10)]
    reps: usize,
    /// Label carried by injected configurations.
    #[arg(long, default_value = "oracle")]
    inject_label: InjectArg,
    /// Balance both the training and the test set by centroids.
    #[arg(long)]
    balanced: bool,
    #[arg(long, default_value_t = Protocol::default().sample_n)]
    sample_n: usize,
    #[arg(long, default_value_t = Protocol::default().train_n)]
    train_n: usize,
    #[command(flatten)]
    train: CampaignTrainArgs,
    /// Thread count for campaign cells (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, env = "CONFEVADE_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Clone)]
struct ReportArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

fn parse_label(s: &str) -> Result<Label, String> {
    match s {
        "-1" | "acceptable" => Ok(Label::Acceptable),
        "1" | "+1" | "non-acceptable" => Ok(Label::NonAcceptable),
        other => Err(format!(
            "unknown class '{other}' (use -1/acceptable or +1/non-acceptable)"
        )),
    }
}

/// Parses "a,b,c" lists and inclusive power-of-ten ranges "1e-4..1e1".
fn parse_t_grid(text: &str) -> CliResult<Vec<f64>> {
    let bad = |msg: String| CliError::Arg(format!("--t-grid: {msg}"));
    if let Some((lo, hi)) = text.split_once("..") {
        let lo: f64 = lo.parse().map_err(|_| bad(format!("bad number '{lo}'")))?;
        let hi: f64 = hi.parse().map_err(|_| bad(format!("bad number '{hi}'")))?;
        if !(lo > 0.0 && hi > lo) {
            return Err(bad("range needs 0 < low < high".to_string()));
        }
        let lo_exp = lo.log10().round() as i32;
        let hi_exp = hi.log10().round() as i32;
        for (value, exp) in [(lo, lo_exp), (hi, hi_exp)] {
            if (value - 10f64.powi(exp)).abs() > 1e-12 * value {
                return Err(bad(format!("range endpoint {value} is not a power of ten")));
            }
        }
        return Ok((lo_exp..=hi_exp).map(|e| 10f64.powi(e)).collect());
    }
    text.split(',')
        .map(|part| {
            let t: f64 = part
                .trim()
                .parse()
                .map_err(|_| bad(format!("bad number '{part}'")))?;
            if t > 0.0 {
                Ok(t)
            } else {
                Err(bad(format!("step size must be positive, got {t}")))
            }
        })
        .collect()
}

fn parse_disp_list(text: &str) -> CliResult<Vec<usize>> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Arg(format!("--disp: bad count '{part}'")))
        })
        .collect()
}

fn load_model(path: &std::path::Path) -> CliResult<VariabilityModel> {
    let text = std::fs::read_to_string(path).map_err(Error::from)?;
    Ok(serde_json::from_str(&text).map_err(Error::from)?)
}

fn argv() -> Vec<String> {
    std::env::args().skip(1).collect()
}

fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match jobs {
        #[cfg(feature = "parallel")]
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool")
            .install(f),
        #[cfg(not(feature = "parallel"))]
        Some(_) => {
            eprintln!("warning: built without the 'parallel' feature; --jobs has no effect");
            f()
        }
        None => f(),
    }
}

fn build_or_load_oracle(
    args: &OracleSourceArgs,
    model: &VariabilityModel,
    master: u64,
    inputs: &mut Vec<PathBuf>,
) -> CliResult<SyntheticOracle> {
    match &args.oracle {
        Some(path) => {
            inputs.push(path.clone());
            Ok(SyntheticOracle::load(path)?)
        }
        None => {
            let oracle = SyntheticOracle::sparse_quality(
                model,
                args.oracle_features,
                derive_seed(master, &[purpose::ORACLE]),
            )?
            .calibrate(
                model,
                args.ratio,
                CALIBRATION_SAMPLES,
                derive_seed(master, &[purpose::CALIBRATE]),
            )?;
            Ok(oracle)
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(error) = run(cli.command, &argv()) {
        eprintln!("error: {error}");
        std::process::exit(exit_code(&error));
    }
}

fn run(command: Command, argv: &[String]) -> CliResult<()> {
    match command {
        Command::Model { action } => run_model(action, argv),
        Command::Oracle { action } => run_oracle(action, argv),
        Command::Sample(args) => run_sample(args, argv),
        Command::Label(args) => run_label(args, argv),
        Command::Split(args) => run_split(args, argv),
        Command::Balance(args) => run_balance(args, argv),
        Command::Train(args) => run_train(args, argv),
        Command::Attack(args) => run_attack(args.common, AttackKind::Evasion, "attack", argv),
        Command::Baseline(args) => {
            let sign_mode = if args.sign_per_attack {
                SignMode::PerAttack
            } else {
                SignMode::PerStep
            };
            run_attack(args.common, AttackKind::Random { sign_mode }, "baseline", argv)
        }
        Command::Rq1(args) => run_rq1(args, argv),
        Command::Rq2(args) => run_rq2(args, argv),
        Command::Report(args) => run_report(args, argv),
        Command::Rerun { manifest } => run_rerun(&manifest),
    }
}

fn run_model(action: ModelAction, argv: &[String]) -> CliResult<()> {
    match action {
        ModelAction::Gen {
            preset: Preset::MotivLike,
            constraints,
            seed,
            out,
        } => {
            let model = gen_motiv_like_with(seed, constraints)?;
            let mut text = serde_json::to_string_pretty(&model).map_err(Error::from)?;
            text.push('\n');
            std::fs::write(&out, text).map_err(Error::from)?;
            manifest::emit("model gen", argv, seed, &[], std::slice::from_ref(&out))?;
            println!("wrote {} ({} features)", out.display(), model.len());
            Ok(())
        }
        ModelAction::Inspect { path } => {
            let model = load_model(&path)?;
            let mut booleans = 0;
            let mut enumerations = 0;
            let mut reals = 0;
            for feature in model.features() {
                match feature.kind {
                    FeatureKind::Boolean => booleans += 1,
                    FeatureKind::Enumeration { .. } => enumerations += 1,
                    FeatureKind::Real { .. } => reals += 1,
                }
            }
            println!(
                "features: {} ({booleans} boolean, {enumerations} enumeration, {reals} real)",
                model.len()
            );
            println!("constraints: {}", model.cross_constraints().len());
            println!("log10(size) \u{2248} {:.0}", model.config_space_log10());
            Ok(())
        }
    }
}

fn run_oracle(action: OracleAction, argv: &[String]) -> CliResult<()> {
    let OracleAction::Gen {
        model,
        features,
        ratio,
        calib_n,
        seed,
        out,
    } = action;
    let vm = load_model(&model)?;
    let oracle = SyntheticOracle::sparse_quality(&vm, features, derive_seed(seed, &[purpose::ORACLE]))?
        .calibrate(&vm, ratio, calib_n, derive_seed(seed, &[purpose::CALIBRATE]))?;
    oracle.save(&out)?;
    manifest::emit("oracle gen", argv, seed, &[model], std::slice::from_ref(&out))?;
    println!(
        "wrote {} ({} quality features, threshold {:.5})",
        out.display(),
        oracle.linear.len(),
        oracle.threshold
    );
    Ok(())
}

fn run_sample(args: SampleArgs, argv: &[String]) -> CliResult<()> {
    let model = load_model(&args.model)?;
    let configs = model.sample_random(args.n, args.seed)?;
    save_configs_csv(&model, &configs, &args.out)?;
    manifest::emit("sample", argv, args.seed, &[args.model], std::slice::from_ref(&args.out))?;
    println!("wrote {} ({} configurations)", args.out.display(), configs.len());
    Ok(())
}

fn run_label(args: LabelArgs, argv: &[String]) -> CliResult<()> {
    let model = load_model(&args.model)?;
    let oracle = SyntheticOracle::load(&args.oracle)?;
    let configs = load_configs_csv(&model, &args.input)?;
    let dataset = label_dataset(&model, &oracle, &configs)?;
    save_csv(&dataset, &args.out)?;
    let (acceptable, non_acceptable) = dataset.class_counts();
    manifest::emit(
        "label",
        argv,
        0,
        &[args.model, args.oracle, args.input],
        std::slice::from_ref(&args.out),
    )?;
    println!(
        "wrote {} ({acceptable} acceptable, {non_acceptable} non-acceptable)",
        args.out.display()
    );
    Ok(())
}

fn run_split(args: SplitArgs, argv: &[String]) -> CliResult<()> {
    let model = load_model(&args.model)?;
    let dataset = load_csv(&model, &args.input)?;
    let (train, test) = split_stratified(&dataset, args.train_n, args.seed)?;
    save_csv(&train, &args.out_train)?;
    save_csv(&test, &args.out_test)?;
    manifest::emit(
        "split",
        argv,
        args.seed,
        &[args.model, args.input],
        &[args.out_train.clone(), args.out_test.clone()],
    )?;
    println!(
        "wrote {} ({} rows) and {} ({} rows)",
        args.out_train.display(),
        train.len(),
        args.out_test.display(),
        test.len()
    );
    Ok(())
}

fn run_balance(args: BalanceArgs, argv: &[String]) -> CliResult<()> {
    let model = load_model(&args.model)?;
    let dataset = load_csv(&model, &args.input)?;
    let balanced = balance_with_centroids(&dataset, args.seed)?;
    save_csv(&balanced, &args.out)?;
    manifest::emit(
        "balance",
        argv,
        args.seed,
        &[args.model, args.input],
        std::slice::from_ref(&args.out),
    )?;
    println!(
        "wrote {} ({} rows, classes {:?})",
        args.out.display(),
        balanced.len(),
        balanced.class_counts()
    );
    Ok(())
}

fn run_train(args: TrainArgs, argv: &[String]) -> CliResult<()> {
    let model = load_model(&args.model)?;
    let dataset = load_csv(&model, &args.input)?;
    let params = TrainParams {
        regularization: args.reg,
        epochs: args.epochs,
        learning_rate: args.lr,
        seed: args.seed,
        min_max_scale: args.scale,
    };
    let svm = LinearSvm::train(&dataset, &params)?;
    svm.save(&args.out)?;
    let accuracy = svm.accuracy(&dataset)?;
    manifest::emit(
        "train",
        argv,
        args.seed,
        &[args.model, args.input],
        std::slice::from_ref(&args.out),
    )?;
    println!(
        "wrote {} (training accuracy {accuracy:.4})",
        args.out.display()
    );
    Ok(())
}

fn run_attack(
    args: AttackCommonArgs,
    kind: AttackKind,
    command: &str,
    argv: &[String],
) -> CliResult<()> {
    let model = load_model(&args.model)?;
    let svm = LinearSvm::load(&args.svm)?;
    let dataset = load_csv(&model, &args.input)?;
    let mut pool = Vec::new();
    for row in dataset.rows() {
        if row.label != args.source {
            continue;
        }
        if args.only_correct && svm.predict(&row.config)? != args.source {
            continue;
        }
        pool.push(row.config.clone());
    }
    let params = AttackParams {
        step_size: args.t,
        nb_disp: args.disp,
        source_label: args.source,
        repair_each_step: !args.end_repair_only,
    };
    let outcomes = run_attack_pool(&model, &svm, &pool, args.n_attacks, &params, kind, args.seed)?;
    let mut results = Vec::new();
    let mut errors = 0usize;
    let mut first_error = None;
    for outcome in outcomes {
        match outcome {
            Ok(result) => results.push(result),
            Err(e) => {
                errors += 1;
                first_error.get_or_insert(e);
            }
        }
    }
    if results.is_empty() {
        if let Some(e) = first_error {
            return Err(e.into());
        }
    }
    let csv = confevade::attack::results_csv(&model, &svm, args.source, &results)?;
    std::fs::write(&args.out, csv).map_err(Error::from)?;
    let successes = results
        .iter()
        .filter(|r| confevade::attack::is_successful(&svm, r, args.source))
        .count();
    manifest::emit(
        command,
        argv,
        args.seed,
        &[args.model, args.svm, args.input],
        std::slice::from_ref(&args.out),
    )?;
    println!(
        "wrote {} ({} attacks, {successes} misclassified, {errors} errors)",
        args.out.display(),
        results.len()
    );
    Ok(())
}

fn run_rq1(args: Rq1Args, argv: &[String]) -> CliResult<()> {
    let model = load_model(&args.model)?;
    let mut inputs = vec![args.model.clone()];
    let oracle = build_or_load_oracle(&args.oracle, &model, args.seed, &mut inputs)?;

    let mut grid = GridSpec {
        step_sizes: parse_t_grid(&args.t_grid)?,
        nb_disps: parse_disp_list(&args.disp)?,
        balanced: match args.balanced {
            BalancedArg::False => vec![false],
            BalancedArg::True => vec![true],
            BalancedArg::Both => vec![false, true],
        },
        repetitions: args.reps,
        n_attacks: args.attacks,
    };
    if args.paper_scale {
        grid = grid.paper_scale();
    }
    let cfg = Rq1Config {
        grid,
        kind: match args.kind {
            KindArg::Evasion => AttackKind::Evasion,
            KindArg::Random => AttackKind::Random {
                sign_mode: SignMode::PerStep,
            },
        },
        source_label: args.source,
        protocol: Protocol {
            sample_n: args.sample_n,
            train_n: args.train_n,
        },
        train: args.train.to_params(),
        seed: args.seed,
    };
    let report = with_jobs(args.jobs, || rq1_campaign(&model, &oracle, &cfg))?;
    report.save(&args.out)?;
    manifest::emit("rq1", argv, args.seed, &inputs, std::slice::from_ref(&args.out))?;
    println!(
        "wrote {} ({} cells)",
        args.out.display(),
        report.rq1_cells.len()
    );
    Ok(())
}

fn run_rq2(args: Rq2Args, argv: &[String]) -> CliResult<()> {
    let model = load_model(&args.model)?;
    let mut inputs = vec![args.model.clone()];
    let oracle = build_or_load_oracle(&args.oracle, &model, args.seed, &mut inputs)?;

    let sample = model.sample_random(args.sample_n, derive_seed(args.seed, &[purpose::SAMPLE]))?;
    let dataset = label_dataset(&model, &oracle, &sample)?;
    let (mut train, mut test) =
        split_stratified(&dataset, args.train_n, derive_seed(args.seed, &[purpose::SPLIT]))?;
    if args.balanced {
        train = balance_with_centroids(&train, derive_seed(args.seed, &[purpose::BALANCE, 1]))?;
        test = balance_with_centroids(&test, derive_seed(args.seed, &[purpose::BALANCE, 2]))?;
    }

    let cfg = Rq2Config {
        t_list: parse_t_grid(&args.t_grid)?,
        nb_disp: args.disp,
        n_adv: args.n_adv,
        repetitions: args.reps,
        source_label: Label::NonAcceptable,
        injected_label: match args.inject_label {
            InjectArg::Oracle => InjectionLabel::Oracle,
            InjectArg::Source => InjectionLabel::Source,
        },
        train: args.train.to_params(),
        seed: args.seed,
    };
    let report = with_jobs(args.jobs, || rq2_retrain(&model, &oracle, &train, &test, &cfg))?;
    report.save(&args.out)?;
    manifest::emit("rq2", argv, args.seed, &inputs, std::slice::from_ref(&args.out))?;
    println!(
        "wrote {} (baseline accuracy {:.4})",
        args.out.display(),
        report.baseline_accuracy.unwrap_or(f64::NAN)
    );
    Ok(())
}

fn run_report(args: ReportArgs, argv: &[String]) -> CliResult<()> {
    let report = CampaignReport::load(&args.input)?;
    let rows = summarize(&report)?;
    std::fs::write(&args.out, summary_csv(&rows)).map_err(Error::from)?;
    manifest::emit("report", argv, report.seed, &[args.input], std::slice::from_ref(&args.out))?;
    println!("wrote {} ({} summary rows)", args.out.display(), rows.len());
    Ok(())
}

fn run_rerun(path: &std::path::Path) -> CliResult<()> {
    let manifest = manifest::load(path)?;
    if manifest.argv.first().map(String::as_str) == Some("rerun") {
        return Err(CliError::Arg(
            "refusing to re-run a manifest that records a rerun".to_string(),
        ));
    }
    println!(
        "re-running: confevade {}",
        manifest.argv.join(" ")
    );
    let full: Vec<String> = std::iter::once("confevade".to_string())
        .chain(manifest.argv.iter().cloned())
        .collect();
    let cli = Cli::try_parse_from(&full)
        .map_err(|e| CliError::Arg(format!("manifest arguments do not parse: {e}")))?;
    run(cli.command, &manifest.argv)
}
