//! Experiment campaigns: synthetic labeling oracles, attack-effectiveness
//! grids over step sizes and displacement budgets, retraining experiments
//! and statistical summaries.
//!
//! A campaign is fully determined by its master seed. Sub-seeds derive from
//! (purpose, cell coordinates) via [`crate::seed::derive_seed`], so grid
//! cells are independent and can run in parallel (the `parallel` feature,
//! on by default) with output identical to the sequential path.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::attack::{is_successful, run_attack_pool, AttackKind, AttackParams};
use crate::classifier::{LinearSvm, TrainParams};
use crate::data::{balance_with_centroids, split_stratified, Dataset, Label, LabeledConfig};
use crate::error::{Error, Result};
use crate::seed::{derive_seed, purpose};
use crate::vm::{gen_motiv_like, Configuration, FeatureKind, VariabilityModel};

/// Quality features scored by the default benchmark oracle.
pub const DEFAULT_QUALITY_FEATURES: usize = 8;
/// Non-acceptable share the default benchmark oracle is calibrated to.
pub const DEFAULT_MINORITY_RATIO: f64 = 0.1;
/// Sample size used to calibrate oracle thresholds.
pub const CALIBRATION_SAMPLES: usize = 4500;

// --------------------------------------------------------------------------
// Synthetic oracle
// --------------------------------------------------------------------------

/// Deterministic stand-in for a product-level testing oracle: a sparse
/// linear (optionally partially squared) score over feature indices with a
/// threshold. Labels +1 (non-acceptable) iff score >= threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticOracle {
    /// (feature index, weight) linear terms.
    pub linear: Vec<(usize, f64)>,
    /// (feature index, weight) squared terms; empty means a linear oracle.
    pub squared: Vec<(usize, f64)>,
    pub threshold: f64,
}

impl SyntheticOracle {
    /// Weight given to the dominant quality features (the rest get 1.0).
    pub const DOMINANT_WEIGHT: f64 = 10.0;

    /// Builds an uncalibrated oracle scoring `k` "quality" features,
    /// preferring real-valued features (blur/noise analogues) and falling
    /// back to the remaining features if needed. Two dominant features
    /// carry most of the score (weight 10) and the rest contribute weight
    /// 1, mirroring acceptability being driven by a couple of strong
    /// degradations plus minor ones; signs are drawn per feature, so
    /// products can fail from too much of one quality or too little of
    /// another.
    pub fn sparse_quality(model: &VariabilityModel, k: usize, seed: u64) -> Result<Self> {
        if k == 0 || k > model.len() {
            return Err(Error::Precondition(format!(
                "oracle needs 1..={} quality features, got {k}",
                model.len()
            )));
        }
        let mut reals: Vec<usize> = model
            .features()
            .iter()
            .enumerate()
            .filter(|(_, f)| matches!(f.kind, FeatureKind::Real { .. }))
            .map(|(i, _)| i)
            .collect();
        let mut others: Vec<usize> = (0..model.len()).filter(|i| !reals.contains(i)).collect();
        let mut rng: ChaCha8Rng = rand::SeedableRng::seed_from_u64(seed);
        crate::seed::shuffle(&mut reals, &mut rng);
        crate::seed::shuffle(&mut others, &mut rng);
        let chosen: Vec<usize> = reals.into_iter().chain(others).take(k).collect();
        let linear = chosen
            .into_iter()
            .enumerate()
            .map(|(rank, i)| {
                let magnitude = if rank < 2 { Self::DOMINANT_WEIGHT } else { 1.0 };
                let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                (i, sign * magnitude)
            })
            .collect();
        Ok(SyntheticOracle {
            linear,
            squared: Vec::new(),
            threshold: 0.0,
        })
    }

    fn max_index(&self) -> Option<usize> {
        self.linear
            .iter()
            .chain(&self.squared)
            .map(|&(i, _)| i)
            .max()
    }

    pub fn score(&self, config: &Configuration) -> Result<f64> {
        let values = config.values();
        if let Some(max) = self.max_index() {
            if max >= values.len() {
                return Err(Error::DimensionMismatch {
                    expected: max + 1,
                    got: values.len(),
                });
            }
        }
        let linear: f64 = self.linear.iter().map(|&(i, w)| w * values[i]).sum();
        let squared: f64 = self
            .squared
            .iter()
            .map(|&(i, w)| w * values[i] * values[i])
            .sum();
        Ok(linear + squared)
    }

    /// Threshold labeling: +1 iff score >= threshold (the tie mirrors the
    /// classifier's sign rule).
    pub fn label(&self, config: &Configuration) -> Result<Label> {
        Ok(if self.score(config)? >= self.threshold {
            Label::NonAcceptable
        } else {
            Label::Acceptable
        })
    }

    /// Sets the threshold to the (1 - target_ratio) empirical quantile of
    /// scores over `n` random valid configurations, so roughly
    /// `target_ratio` of fresh samples come out non-acceptable.
    pub fn calibrate(
        &self,
        model: &VariabilityModel,
        target_ratio: f64,
        n: usize,
        seed: u64,
    ) -> Result<SyntheticOracle> {
        if !(target_ratio > 0.0 && target_ratio < 1.0) {
            return Err(Error::Precondition(format!(
                "target_ratio must be in (0, 1), got {target_ratio}"
            )));
        }
        if n < 2 {
            return Err(Error::Precondition(
                "calibration needs at least two samples".to_string(),
            ));
        }
        let samples = model.sample_random(n, seed)?;
        let mut scores = samples
            .iter()
            .map(|c| self.score(c))
            .collect::<Result<Vec<f64>>>()?;
        scores.sort_by(f64::total_cmp);
        if scores[0] == scores[n - 1] {
            return Err(Error::Calibration(
                "score distribution is degenerate (all samples score equal)".to_string(),
            ));
        }
        let index = (((1.0 - target_ratio) * n as f64).floor() as usize).min(n - 1);
        Ok(SyntheticOracle {
            threshold: scores[index],
            ..self.clone()
        })
    }

    pub fn save(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

/// Labels configurations with the oracle into a dataset.
pub fn label_dataset(
    model: &VariabilityModel,
    oracle: &SyntheticOracle,
    configs: &[Configuration],
) -> Result<Dataset> {
    let rows = configs
        .iter()
        .map(|config| {
            Ok(LabeledConfig {
                config: config.clone(),
                label: oracle.label(config)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(model.clone(), rows)
}

/// Training settings calibrated for the synthetic benchmark: light
/// regularization and longer averaging than the library defaults, which
/// this 108-feature, 500-row protocol needs to pick the quality signal out
/// of the hundred unused options.
pub fn benchmark_train_params() -> TrainParams {
    TrainParams {
        regularization: 0.1,
        epochs: 100,
        learning_rate: 10.0,
        seed: 0,
        min_max_scale: false,
    }
}

/// The standard synthetic benchmark: a 108-option model shaped like the
/// industrial video-generator case plus a calibrated 8-feature quality
/// oracle with a 10% non-acceptable rate.
pub fn motiv_benchmark(seed: u64) -> Result<(VariabilityModel, SyntheticOracle)> {
    let model = gen_motiv_like(derive_seed(seed, &[purpose::MODEL]));
    let oracle = SyntheticOracle::sparse_quality(
        &model,
        DEFAULT_QUALITY_FEATURES,
        derive_seed(seed, &[purpose::ORACLE]),
    )?
    .calibrate(
        &model,
        DEFAULT_MINORITY_RATIO,
        CALIBRATION_SAMPLES,
        derive_seed(seed, &[purpose::CALIBRATE]),
    )?;
    Ok((model, oracle))
}

// --------------------------------------------------------------------------
// Campaign configuration
// --------------------------------------------------------------------------

/// Grid over attack settings. The full-scale grid is seven step sizes,
/// displacement budgets {20, 50, 100}, ten repetitions and 4000 attacks;
/// desk-scale defaults shrink that to 5 repetitions and 400 attacks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub step_sizes: Vec<f64>,
    pub nb_disps: Vec<usize>,
    pub balanced: Vec<bool>,
    pub repetitions: usize,
    pub n_attacks: usize,
}

/// The seven canonical step sizes.
pub fn canonical_step_sizes() -> Vec<f64> {
    vec![1e-6, 1e-4, 1e-2, 1.0, 1e2, 1e4, 1e6]
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            step_sizes: canonical_step_sizes(),
            nb_disps: vec![20, 50, 100],
            balanced: vec![false],
            repetitions: 5,
            n_attacks: 400,
        }
    }
}

impl GridSpec {
    /// Restores the full-scale settings: ten repetitions, 4000 attacks.
    pub fn paper_scale(mut self) -> Self {
        self.repetitions = 10;
        self.n_attacks = 4000;
        self
    }

    fn check(&self) -> Result<()> {
        if self.step_sizes.is_empty()
            || self.nb_disps.is_empty()
            || self.balanced.is_empty()
            || self.repetitions == 0
            || self.n_attacks == 0
        {
            return Err(Error::Precondition(
                "grid lists must be non-empty with repetitions and n_attacks >= 1".to_string(),
            ));
        }
        if let Some(&t) = self.step_sizes.iter().find(|&&t| t.is_nan() || t <= 0.0) {
            return Err(Error::Precondition(format!(
                "step sizes must be positive, got {t}"
            )));
        }
        if self.nb_disps.contains(&0) {
            return Err(Error::Precondition("nb_disp must be >= 1".to_string()));
        }
        Ok(())
    }
}

/// Dataset sizes of the evaluation protocol: a 4500-configuration sample
/// with 500 rows set aside for training.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Protocol {
    pub sample_n: usize,
    pub train_n: usize,
}

impl Default for Protocol {
    fn default() -> Self {
        Protocol {
            sample_n: 4500,
            train_n: 500,
        }
    }
}

/// Full configuration of an attack-effectiveness campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rq1Config {
    pub grid: GridSpec,
    pub kind: AttackKind,
    pub source_label: Label,
    pub protocol: Protocol,
    /// Training hyper-parameters; the `seed` field is ignored (training
    /// seeds derive from the campaign seed).
    pub train: TrainParams,
    pub seed: u64,
}

impl Rq1Config {
    pub fn new(seed: u64) -> Self {
        Rq1Config {
            grid: GridSpec::default(),
            kind: AttackKind::Evasion,
            source_label: Label::NonAcceptable,
            protocol: Protocol::default(),
            train: TrainParams::default(),
            seed,
        }
    }
}

/// Which label injected adversarial configurations carry in retraining.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InjectionLabel {
    /// Ground truth from the oracle (default).
    Oracle,
    /// The attack's source class, whether or not the point truly crossed.
    Source,
}

/// Full configuration of a retraining-degradation campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rq2Config {
    pub t_list: Vec<f64>,
    pub nb_disp: usize,
    pub n_adv: usize,
    pub repetitions: usize,
    pub source_label: Label,
    pub injected_label: InjectionLabel,
    /// Training hyper-parameters; the `seed` field is ignored. Baseline and
    /// retrained classifiers share one derived seed so an `n_adv` of zero
    /// reproduces the baseline exactly.
    pub train: TrainParams,
    pub seed: u64,
}

/// Step sizes 10^-4 .. 10^1, the retraining sweep.
pub fn rq2_step_sizes() -> Vec<f64> {
    vec![1e-4, 1e-3, 1e-2, 1e-1, 1.0, 1e1]
}

impl Rq2Config {
    pub fn new(seed: u64) -> Self {
        Rq2Config {
            t_list: rq2_step_sizes(),
            nb_disp: 20,
            n_adv: 25,
            repetitions: 10,
            source_label: Label::NonAcceptable,
            injected_label: InjectionLabel::Oracle,
            train: TrainParams::default(),
            seed,
        }
    }
}

// --------------------------------------------------------------------------
// Reports
// --------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CampaignKind {
    Rq1,
    Rq2,
}

/// One grid cell of an attack-effectiveness campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rq1Cell {
    pub t: f64,
    pub nb_disp: usize,
    pub balanced: bool,
    pub rep: usize,
    pub n_attacks: usize,
    pub n_misclassified: usize,
    pub n_valid: usize,
    pub n_errors: usize,
    /// Present when the whole cell failed (training or data preparation).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// One retraining run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rq2Cell {
    pub t: f64,
    pub rep: usize,
    pub accuracy: f64,
}

/// Echo of the retraining settings inside a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rq2Settings {
    pub t_list: Vec<f64>,
    pub nb_disp: usize,
    pub n_adv: usize,
    pub repetitions: usize,
    pub injected_label: InjectionLabel,
}

/// Serializable outcome of a campaign. Cells are stored in canonical grid
/// order (step size, displacements, balanced arm, repetition), so identical
/// seeds produce byte-identical serialized reports regardless of how many
/// threads executed the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub kind: CampaignKind,
    pub seed: u64,
    pub attack: AttackKind,
    pub source_label: Label,
    pub train: TrainParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub protocol: Option<Protocol>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rq2: Option<Rq2Settings>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline_accuracy: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rq1_cells: Vec<Rq1Cell>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rq2_cells: Vec<Rq2Cell>,
}

impl CampaignReport {
    /// Canonical serialization used for report files; byte-stable for a
    /// given campaign seed and configuration.
    pub fn to_json(&self) -> String {
        let mut text =
            serde_json::to_string_pretty(self).expect("report serialization cannot fail");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

// --------------------------------------------------------------------------
// Execution
// --------------------------------------------------------------------------

#[cfg(feature = "parallel")]
fn map_jobs<J: Send + Sync, R: Send>(
    jobs: &[J],
    parallel: bool,
    run: impl Fn(&J) -> R + Send + Sync,
) -> Vec<R> {
    use rayon::prelude::*;
    if parallel {
        jobs.par_iter().map(run).collect()
    } else {
        jobs.iter().map(run).collect()
    }
}

#[cfg(not(feature = "parallel"))]
fn map_jobs<J, R>(jobs: &[J], _parallel: bool, run: impl Fn(&J) -> R) -> Vec<R> {
    jobs.iter().map(run).collect()
}

/// Data and classifier shared by every cell of one balanced arm.
struct ArmContext {
    svm: LinearSvm,
    pool: Vec<Configuration>,
}

fn build_arm(
    model: &VariabilityModel,
    oracle: &SyntheticOracle,
    cfg: &Rq1Config,
    balanced: bool,
) -> Result<ArmContext> {
    let master = cfg.seed;
    let sample = model.sample_random(
        cfg.protocol.sample_n,
        derive_seed(master, &[purpose::SAMPLE]),
    )?;
    let dataset = label_dataset(model, oracle, &sample)?;
    let (train_set, test_set) = split_stratified(
        &dataset,
        cfg.protocol.train_n,
        derive_seed(master, &[purpose::SPLIT]),
    )?;
    let train_set = if balanced {
        balance_with_centroids(&train_set, derive_seed(master, &[purpose::BALANCE, 1]))?
    } else {
        train_set
    };
    let mut train_params = cfg.train.clone();
    train_params.seed = derive_seed(master, &[purpose::TRAIN, u64::from(balanced)]);
    let svm = LinearSvm::train(&train_set, &train_params)?;
    let pool = evasion_pool(&svm, &test_set, cfg.source_label)?;
    Ok(ArmContext { svm, pool })
}

/// Start points for pooled attacks: rows of the source class that the
/// classifier currently gets right. A start the classifier already
/// mislabels has nothing to evade, and counting it as an instant success
/// would measure classifier error rather than attack effect.
fn evasion_pool(
    svm: &LinearSvm,
    dataset: &Dataset,
    source_label: Label,
) -> Result<Vec<Configuration>> {
    let mut pool = Vec::new();
    for row in dataset.rows() {
        if row.label == source_label && svm.predict(&row.config)? == source_label {
            pool.push(row.config.clone());
        }
    }
    if pool.is_empty() {
        return Err(Error::Precondition(format!(
            "no correctly-classified source-class ({source_label}) rows to seed attacks"
        )));
    }
    Ok(pool)
}

fn run_rq1(
    model: &VariabilityModel,
    oracle: &SyntheticOracle,
    cfg: &Rq1Config,
    parallel: bool,
) -> Result<CampaignReport> {
    cfg.grid.check()?;

    let arms: Vec<std::result::Result<ArmContext, String>> = cfg
        .grid
        .balanced
        .iter()
        .map(|&balanced| build_arm(model, oracle, cfg, balanced).map_err(|e| e.to_string()))
        .collect();

    struct Job {
        t: f64,
        t_idx: usize,
        nb_disp: usize,
        disp_idx: usize,
        balanced: bool,
        arm_idx: usize,
        rep: usize,
    }
    let mut jobs = Vec::new();
    for (t_idx, &t) in cfg.grid.step_sizes.iter().enumerate() {
        for (disp_idx, &nb_disp) in cfg.grid.nb_disps.iter().enumerate() {
            for (arm_idx, &balanced) in cfg.grid.balanced.iter().enumerate() {
                for rep in 0..cfg.grid.repetitions {
                    jobs.push(Job {
                        t,
                        t_idx,
                        nb_disp,
                        disp_idx,
                        balanced,
                        arm_idx,
                        rep,
                    });
                }
            }
        }
    }

    let cells = map_jobs(&jobs, parallel, |job| {
        let base = Rq1Cell {
            t: job.t,
            nb_disp: job.nb_disp,
            balanced: job.balanced,
            rep: job.rep,
            n_attacks: cfg.grid.n_attacks,
            n_misclassified: 0,
            n_valid: 0,
            n_errors: 0,
            note: None,
        };
        let arm = match &arms[job.arm_idx] {
            Ok(arm) => arm,
            Err(message) => {
                return Rq1Cell {
                    n_attacks: 0,
                    note: Some(message.clone()),
                    ..base
                }
            }
        };
        let params = AttackParams::new(job.t, job.nb_disp, cfg.source_label);
        let rng_seed = derive_seed(
            cfg.seed,
            &[
                purpose::POOL,
                job.t_idx as u64,
                job.disp_idx as u64,
                u64::from(job.balanced),
                job.rep as u64,
            ],
        );
        let outcomes = match run_attack_pool(
            model,
            &arm.svm,
            &arm.pool,
            cfg.grid.n_attacks,
            &params,
            cfg.kind,
            rng_seed,
        ) {
            Ok(outcomes) => outcomes,
            Err(e) => {
                return Rq1Cell {
                    n_attacks: 0,
                    note: Some(e.to_string()),
                    ..base
                }
            }
        };
        let mut cell = base;
        for outcome in &outcomes {
            match outcome {
                Ok(result) => {
                    if is_successful(&arm.svm, result, cfg.source_label) {
                        cell.n_misclassified += 1;
                    }
                    match model.validate(&result.end) {
                        Ok(report) if report.is_valid() => cell.n_valid += 1,
                        Ok(_) => {}
                        Err(_) => cell.n_errors += 1,
                    }
                }
                Err(_) => cell.n_errors += 1,
            }
        }
        cell
    });

    Ok(CampaignReport {
        kind: CampaignKind::Rq1,
        seed: cfg.seed,
        attack: cfg.kind,
        source_label: cfg.source_label,
        train: cfg.train.clone(),
        protocol: Some(cfg.protocol),
        grid: Some(cfg.grid.clone()),
        rq2: None,
        baseline_accuracy: None,
        rq1_cells: cells,
        rq2_cells: Vec::new(),
    })
}

/// Runs the attack-effectiveness grid: per balanced arm, sample, label,
/// split and train once; per cell, run the pooled attacks and count
/// misclassified and valid finals. Parallel across cells when the crate's
/// `parallel` feature is enabled.
pub fn rq1_campaign(
    model: &VariabilityModel,
    oracle: &SyntheticOracle,
    cfg: &Rq1Config,
) -> Result<CampaignReport> {
    run_rq1(model, oracle, cfg, true)
}

/// [`rq1_campaign`] forced onto the sequential code path; the report is
/// byte-identical.
pub fn rq1_campaign_sequential(
    model: &VariabilityModel,
    oracle: &SyntheticOracle,
    cfg: &Rq1Config,
) -> Result<CampaignReport> {
    run_rq1(model, oracle, cfg, false)
}

fn rows_overlap(a: &Dataset, b: &Dataset) -> bool {
    let key = |row: &LabeledConfig| {
        let mut bits: Vec<u64> = row.config.values().iter().map(|v| v.to_bits()).collect();
        bits.push(row.label.value() as u64);
        bits
    };
    let set: std::collections::HashSet<Vec<u64>> = a.rows().iter().map(key).collect();
    b.rows().iter().any(|row| set.contains(&key(row)))
}

fn run_rq2(
    model: &VariabilityModel,
    oracle: &SyntheticOracle,
    base_train: &Dataset,
    test: &Dataset,
    cfg: &Rq2Config,
    parallel: bool,
) -> Result<CampaignReport> {
    if cfg.t_list.is_empty() || cfg.repetitions == 0 {
        return Err(Error::Precondition(
            "t_list must be non-empty and repetitions >= 1".to_string(),
        ));
    }
    if let Some(&t) = cfg.t_list.iter().find(|&&t| t.is_nan() || t <= 0.0) {
        return Err(Error::Precondition(format!(
            "step sizes must be positive, got {t}"
        )));
    }
    if rows_overlap(base_train, test) {
        return Err(Error::Precondition(
            "test set must be disjoint from the training set".to_string(),
        ));
    }

    let mut train_params = cfg.train.clone();
    train_params.seed = derive_seed(cfg.seed, &[purpose::TRAIN]);
    let baseline = LinearSvm::train(base_train, &train_params)?;
    let baseline_accuracy = baseline.accuracy(test)?;

    let pool = if cfg.n_adv > 0 {
        evasion_pool(&baseline, base_train, cfg.source_label)?
    } else {
        Vec::new()
    };

    struct Job {
        t: f64,
        t_idx: usize,
        rep: usize,
    }
    let mut jobs = Vec::new();
    for (t_idx, &t) in cfg.t_list.iter().enumerate() {
        for rep in 0..cfg.repetitions {
            jobs.push(Job { t, t_idx, rep });
        }
    }

    let cells = map_jobs(&jobs, parallel, |job| -> Result<Rq2Cell> {
        let mut rows = base_train.rows().to_vec();
        if cfg.n_adv > 0 {
            let params = AttackParams::new(job.t, cfg.nb_disp, cfg.source_label);
            let rng_seed = derive_seed(
                cfg.seed,
                &[purpose::RQ2_ADV, job.t_idx as u64, job.rep as u64],
            );
            let outcomes = run_attack_pool(
                model,
                &baseline,
                &pool,
                cfg.n_adv,
                &params,
                AttackKind::Evasion,
                rng_seed,
            )?;
            for outcome in outcomes {
                let result = outcome?;
                let label = match cfg.injected_label {
                    InjectionLabel::Oracle => oracle.label(&result.end)?,
                    InjectionLabel::Source => cfg.source_label,
                };
                rows.push(LabeledConfig {
                    config: result.end,
                    label,
                });
            }
        }
        let retrain_set = Dataset::new(model.clone(), rows)?;
        let retrained = LinearSvm::train(&retrain_set, &train_params)?;
        Ok(Rq2Cell {
            t: job.t,
            rep: job.rep,
            accuracy: retrained.accuracy(test)?,
        })
    });
    let cells = cells.into_iter().collect::<Result<Vec<Rq2Cell>>>()?;

    Ok(CampaignReport {
        kind: CampaignKind::Rq2,
        seed: cfg.seed,
        attack: AttackKind::Evasion,
        source_label: cfg.source_label,
        train: cfg.train.clone(),
        protocol: None,
        grid: None,
        rq2: Some(Rq2Settings {
            t_list: cfg.t_list.clone(),
            nb_disp: cfg.nb_disp,
            n_adv: cfg.n_adv,
            repetitions: cfg.repetitions,
            injected_label: cfg.injected_label,
        }),
        baseline_accuracy: Some(baseline_accuracy),
        rq1_cells: Vec::new(),
        rq2_cells: cells,
    })
}

/// Retraining experiment: per step size and repetition, generate `n_adv`
/// evasion configurations against the baseline classifier, label them
/// (oracle truth or source class), add them to the training set all at
/// once, retrain with the same seed and record accuracy on the untouched
/// test set. An `n_adv` of zero is the control and reproduces the baseline
/// accuracy exactly.
pub fn rq2_retrain(
    model: &VariabilityModel,
    oracle: &SyntheticOracle,
    base_train: &Dataset,
    test: &Dataset,
    cfg: &Rq2Config,
) -> Result<CampaignReport> {
    run_rq2(model, oracle, base_train, test, cfg, true)
}

/// [`rq2_retrain`] forced onto the sequential code path; the report is
/// byte-identical.
pub fn rq2_retrain_sequential(
    model: &VariabilityModel,
    oracle: &SyntheticOracle,
    base_train: &Dataset,
    test: &Dataset,
    cfg: &Rq2Config,
) -> Result<CampaignReport> {
    run_rq2(model, oracle, base_train, test, cfg, false)
}

// --------------------------------------------------------------------------
// Summaries
// --------------------------------------------------------------------------

/// Five-number summary with linearly interpolated quartiles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiveNum {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

impl FiveNum {
    fn of(values: &mut [f64]) -> FiveNum {
        values.sort_by(f64::total_cmp);
        FiveNum {
            min: values[0],
            q1: quantile_sorted(values, 0.25),
            median: quantile_sorted(values, 0.5),
            q3: quantile_sorted(values, 0.75),
            max: values[values.len() - 1],
        }
    }
}

/// Linear-interpolation quantile (the h = p(n-1) rule) on sorted data.
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let h = p * (n - 1) as f64;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    let frac = h - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// One summarized metric for one grid cell group (repetitions collapsed).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub t: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nb_disp: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub balanced: Option<bool>,
    pub metric: String,
    pub stats: FiveNum,
}

/// Collapses repetitions into five-number summaries per cell group:
/// misclassified and valid counts for attack grids, accuracy for
/// retraining campaigns. Cells that failed outright are skipped; a group
/// with no surviving repetitions is an error.
pub fn summarize(report: &CampaignReport) -> Result<Vec<SummaryRow>> {
    let mut rows = Vec::new();
    match report.kind {
        CampaignKind::Rq1 => {
            let grid = report
                .grid
                .as_ref()
                .ok_or_else(|| Error::Precondition("rq1 report lacks its grid".to_string()))?;
            for &t in &grid.step_sizes {
                for &nb_disp in &grid.nb_disps {
                    for &balanced in &grid.balanced {
                        let group: Vec<&Rq1Cell> = report
                            .rq1_cells
                            .iter()
                            .filter(|c| {
                                c.t == t
                                    && c.nb_disp == nb_disp
                                    && c.balanced == balanced
                                    && c.note.is_none()
                            })
                            .collect();
                        if group.is_empty() {
                            return Err(Error::Precondition(format!(
                                "no usable repetitions for cell t={t}, nb_disp={nb_disp}, balanced={balanced}"
                            )));
                        }
                        for (metric, extract) in [
                            (
                                "misclassified",
                                (|c: &&Rq1Cell| c.n_misclassified as f64)
                                    as fn(&&Rq1Cell) -> f64,
                            ),
                            ("valid", |c: &&Rq1Cell| c.n_valid as f64),
                        ] {
                            let mut values: Vec<f64> = group.iter().map(extract).collect();
                            rows.push(SummaryRow {
                                t,
                                nb_disp: Some(nb_disp),
                                balanced: Some(balanced),
                                metric: metric.to_string(),
                                stats: FiveNum::of(&mut values),
                            });
                        }
                    }
                }
            }
        }
        CampaignKind::Rq2 => {
            let settings = report
                .rq2
                .as_ref()
                .ok_or_else(|| Error::Precondition("rq2 report lacks its settings".to_string()))?;
            for &t in &settings.t_list {
                let mut values: Vec<f64> = report
                    .rq2_cells
                    .iter()
                    .filter(|c| c.t == t)
                    .map(|c| c.accuracy)
                    .collect();
                if values.is_empty() {
                    return Err(Error::Precondition(format!(
                        "no repetitions recorded for t={t}"
                    )));
                }
                rows.push(SummaryRow {
                    t,
                    nb_disp: Some(settings.nb_disp),
                    balanced: None,
                    metric: "accuracy".to_string(),
                    stats: FiveNum::of(&mut values),
                });
            }
        }
    }
    Ok(rows)
}

/// Long-format CSV of summary rows: "t,nb_disp,balanced,stat,value" with
/// stat names like "misclassified_median".
pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from("t,nb_disp,balanced,stat,value\n");
    for row in rows {
        let nb_disp = row.nb_disp.map_or(String::new(), |d| d.to_string());
        let balanced = row.balanced.map_or(String::new(), |b| b.to_string());
        for (stat, value) in [
            ("min", row.stats.min),
            ("q1", row.stats.q1),
            ("median", row.stats.median),
            ("q3", row.stats.q3),
            ("max", row.stats.max),
        ] {
            out.push_str(&format!(
                "{},{},{},{}_{},{}\n",
                row.t, nb_disp, balanced, row.metric, stat, value
            ));
        }
    }
    out
}
