//! Labeled configuration datasets: CSV persistence, stratified splitting,
//! centroid-based class balancing and enumeration dummification.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::vm::{Configuration, CrossConstraint, FeatureDef, FeatureKind, VariabilityModel};

/// Class label: -1 acceptable, +1 non-acceptable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Acceptable,
    NonAcceptable,
}

impl Label {
    pub fn value(self) -> i32 {
        match self {
            Label::Acceptable => -1,
            Label::NonAcceptable => 1,
        }
    }

    pub fn from_value(value: i32) -> Result<Self> {
        match value {
            -1 => Ok(Label::Acceptable),
            1 => Ok(Label::NonAcceptable),
            other => Err(Error::Precondition(format!(
                "label must be -1 or +1, got {other}"
            ))),
        }
    }

    pub fn opposite(self) -> Self {
        match self {
            Label::Acceptable => Label::NonAcceptable,
            Label::NonAcceptable => Label::Acceptable,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

impl serde::Serialize for Label {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_i32(self.value())
    }
}

impl<'de> serde::Deserialize<'de> for Label {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let value = i32::deserialize(deserializer)?;
        Label::from_value(value).map_err(serde::de::Error::custom)
    }
}

/// One configuration with its ground-truth label.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledConfig {
    pub config: Configuration,
    pub label: Label,
}

/// A variability model together with labeled rows over it.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    model: VariabilityModel,
    rows: Vec<LabeledConfig>,
}

impl Dataset {
    /// Builds a dataset, checking that every row matches the model's width.
    pub fn new(model: VariabilityModel, rows: Vec<LabeledConfig>) -> Result<Self> {
        for row in &rows {
            if row.config.len() != model.len() {
                return Err(Error::DimensionMismatch {
                    expected: model.len(),
                    got: row.config.len(),
                });
            }
        }
        Ok(Dataset { model, rows })
    }

    pub fn model(&self) -> &VariabilityModel {
        &self.model
    }

    pub fn rows(&self) -> &[LabeledConfig] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// (acceptable, non-acceptable) row counts.
    pub fn class_counts(&self) -> (usize, usize) {
        let non_acceptable = self
            .rows
            .iter()
            .filter(|r| r.label == Label::NonAcceptable)
            .count();
        (self.rows.len() - non_acceptable, non_acceptable)
    }

    pub fn configs_with_label(&self, label: Label) -> Vec<Configuration> {
        self.rows
            .iter()
            .filter(|r| r.label == label)
            .map(|r| r.config.clone())
            .collect()
    }
}

// --------------------------------------------------------------------------
// CSV persistence
//
// Dataset files: header "name1,...,nameN,label", one row per configuration.
// Reals are fixed-point at the feature's precision, Booleans and
// enumerations are integers, labels are -1 or 1. UTF-8, "\n" newlines.
// Unlabeled configuration files are the same without the label column.
// --------------------------------------------------------------------------

/// Decimal places needed so that fixed-point output stays within `precision`.
fn decimal_places(precision: f64) -> usize {
    let digits = -precision.log10();
    let rounded = digits.round();
    let digits = if (digits - rounded).abs() < 1e-9 {
        rounded
    } else {
        digits.ceil()
    };
    digits.clamp(0.0, 17.0) as usize
}

fn format_cell(kind: &FeatureKind, value: f64) -> String {
    match kind {
        FeatureKind::Boolean | FeatureKind::Enumeration { .. } => format!("{}", value.round() as i64),
        FeatureKind::Real { precision, .. } => {
            format!("{value:.*}", decimal_places(*precision))
        }
    }
}

fn csv_header(model: &VariabilityModel, labeled: bool) -> String {
    let mut header: Vec<&str> = model.feature_names().collect();
    if labeled {
        header.push("label");
    }
    header.join(",")
}

fn parse_cell(path: &str, line: usize, column: &str, cell: &str) -> Result<f64> {
    cell.parse::<f64>().map_err(|_| Error::Parse {
        path: path.to_string(),
        line,
        msg: format!("non-numeric value '{cell}' in column '{column}'"),
    })
}

fn split_line(line: &str) -> Vec<&str> {
    line.strip_suffix('\r').unwrap_or(line).split(',').collect()
}

fn check_header(path: &str, found: &[&str], model: &VariabilityModel, labeled: bool) -> Result<()> {
    let expected_len = model.len() + usize::from(labeled);
    let names: Vec<&str> = model
        .feature_names()
        .chain(labeled.then_some("label"))
        .collect();
    if found.len() != expected_len || found != names.as_slice() {
        return Err(Error::Parse {
            path: path.to_string(),
            line: 1,
            msg: format!(
                "header mismatch: expected '{}', found '{}'",
                names.join(","),
                found.join(",")
            ),
        });
    }
    Ok(())
}

fn dataset_to_csv(dataset: &Dataset) -> String {
    let model = dataset.model();
    let mut out = String::new();
    out.push_str(&csv_header(model, true));
    out.push('\n');
    for row in dataset.rows() {
        for (feature, &value) in model.features().iter().zip(row.config.values()) {
            out.push_str(&format_cell(&feature.kind, value));
            out.push(',');
        }
        out.push_str(&row.label.to_string());
        out.push('\n');
    }
    out
}

/// Serializes a labeled dataset to the CSV format above.
pub fn save_csv(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, dataset_to_csv(dataset))?;
    Ok(())
}

/// Loads a labeled dataset, verifying the header against the model order.
pub fn load_csv(model: &VariabilityModel, path: impl AsRef<Path>) -> Result<Dataset> {
    let path_str = path.as_ref().display().to_string();
    let text = std::fs::read_to_string(&path)?;
    parse_dataset_csv(model, &text, &path_str)
}

fn parse_dataset_csv(model: &VariabilityModel, text: &str, path: &str) -> Result<Dataset> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Parse {
        path: path.to_string(),
        line: 1,
        msg: "empty file".to_string(),
    })?;
    check_header(path, &split_line(header), model, true)?;

    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line_no = i + 2;
        if line.is_empty() {
            continue;
        }
        let cells = split_line(line);
        if cells.len() != model.len() + 1 {
            return Err(Error::Parse {
                path: path.to_string(),
                line: line_no,
                msg: format!("expected {} cells, found {}", model.len() + 1, cells.len()),
            });
        }
        let mut values = Vec::with_capacity(model.len());
        for (feature, cell) in model.features().iter().zip(&cells) {
            values.push(parse_cell(path, line_no, &feature.name, cell)?);
        }
        let label_cell = cells[model.len()];
        let label_value = label_cell.parse::<i32>().map_err(|_| Error::Parse {
            path: path.to_string(),
            line: line_no,
            msg: format!("non-integer label '{label_cell}'"),
        })?;
        let label = Label::from_value(label_value).map_err(|_| Error::Parse {
            path: path.to_string(),
            line: line_no,
            msg: format!("label '{label_cell}' not in {{-1, +1}}"),
        })?;
        rows.push(LabeledConfig {
            config: Configuration::new(values),
            label,
        });
    }
    Dataset::new(model.clone(), rows)
}

/// Serializes unlabeled configurations (same format, no label column).
pub fn save_configs_csv(
    model: &VariabilityModel,
    configs: &[Configuration],
    path: impl AsRef<Path>,
) -> Result<()> {
    let mut out = String::new();
    out.push_str(&csv_header(model, false));
    out.push('\n');
    for config in configs {
        if config.len() != model.len() {
            return Err(Error::DimensionMismatch {
                expected: model.len(),
                got: config.len(),
            });
        }
        let cells: Vec<String> = model
            .features()
            .iter()
            .zip(config.values())
            .map(|(feature, &value)| format_cell(&feature.kind, value))
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Loads unlabeled configurations.
pub fn load_configs_csv(model: &VariabilityModel, path: impl AsRef<Path>) -> Result<Vec<Configuration>> {
    let path_str = path.as_ref().display().to_string();
    let text = std::fs::read_to_string(&path)?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Parse {
        path: path_str.clone(),
        line: 1,
        msg: "empty file".to_string(),
    })?;
    check_header(&path_str, &split_line(header), model, false)?;
    let mut configs = Vec::new();
    for (i, line) in lines.enumerate() {
        let line_no = i + 2;
        if line.is_empty() {
            continue;
        }
        let cells = split_line(line);
        if cells.len() != model.len() {
            return Err(Error::Parse {
                path: path_str.clone(),
                line: line_no,
                msg: format!("expected {} cells, found {}", model.len(), cells.len()),
            });
        }
        let mut values = Vec::with_capacity(model.len());
        for (feature, cell) in model.features().iter().zip(&cells) {
            values.push(parse_cell(&path_str, line_no, &feature.name, cell)?);
        }
        configs.push(Configuration::new(values));
    }
    Ok(configs)
}

// --------------------------------------------------------------------------
// Stratified splitting
// --------------------------------------------------------------------------

/// Splits into a train set of exactly `train_n` rows and the complement,
/// keeping per-class proportions within one row of the full dataset.
/// Quotas use the largest-remainder rule; selection within a class is a
/// seeded shuffle. Row order inside each output follows the input.
pub fn split_stratified(dataset: &Dataset, train_n: usize, seed: u64) -> Result<(Dataset, Dataset)> {
    let total = dataset.len();
    if train_n == 0 || train_n >= total {
        return Err(Error::Precondition(format!(
            "train_n must be in (0, {total}), got {train_n}"
        )));
    }

    let classes = [Label::Acceptable, Label::NonAcceptable];
    let mut per_class: Vec<Vec<usize>> = classes
        .iter()
        .map(|&label| {
            dataset
                .rows()
                .iter()
                .enumerate()
                .filter(|(_, r)| r.label == label)
                .map(|(i, _)| i)
                .collect()
        })
        .collect();

    // Largest-remainder quotas per class.
    let ideals: Vec<f64> = per_class
        .iter()
        .map(|idx| train_n as f64 * idx.len() as f64 / total as f64)
        .collect();
    let mut quotas: Vec<usize> = ideals.iter().map(|v| v.floor() as usize).collect();
    let mut assigned: usize = quotas.iter().sum();
    let mut order: Vec<usize> = (0..classes.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = ideals[a] - ideals[a].floor();
        let fb = ideals[b] - ideals[b].floor();
        fb.partial_cmp(&fa).unwrap().then(a.cmp(&b))
    });
    let mut cursor = 0;
    while assigned < train_n {
        let class = order[cursor % order.len()];
        cursor += 1;
        if quotas[class] < per_class[class].len() {
            quotas[class] += 1;
            assigned += 1;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train_indices = HashSet::new();
    for (class, indices) in per_class.iter_mut().enumerate() {
        crate::seed::shuffle(indices, &mut rng);
        for &idx in indices.iter().take(quotas[class]) {
            train_indices.insert(idx);
        }
    }

    let mut train_rows = Vec::with_capacity(train_n);
    let mut test_rows = Vec::with_capacity(total - train_n);
    for (i, row) in dataset.rows().iter().enumerate() {
        if train_indices.contains(&i) {
            train_rows.push(row.clone());
        } else {
            test_rows.push(row.clone());
        }
    }
    Ok((
        Dataset::new(dataset.model().clone(), train_rows)?,
        Dataset::new(dataset.model().clone(), test_rows)?,
    ))
}

// --------------------------------------------------------------------------
// Centroid balancing
// --------------------------------------------------------------------------

/// Retries per centroid before duplicate avoidance gives up.
const MAX_CENTROID_RETRIES: usize = 1_000;

/// Where a balancing centroid came from: indices into the minority pool
/// (original minority rows first, then added centroids in creation order)
/// and the midpoint before type repair.
#[derive(Debug, Clone)]
pub struct CentroidRecord {
    pub parent_a: usize,
    pub parent_b: usize,
    pub midpoint: Vec<f64>,
}

/// [`balance_with_centroids`] plus a trace of every centroid's parents and
/// pre-repair midpoint, for auditing and property checks.
pub fn balance_with_centroids_traced(
    dataset: &Dataset,
    seed: u64,
) -> Result<(Dataset, Vec<CentroidRecord>)> {
    let (acceptable, non_acceptable) = dataset.class_counts();
    if acceptable == 0 || non_acceptable == 0 {
        return Err(Error::Precondition(
            "both classes must be non-empty".to_string(),
        ));
    }
    if acceptable == non_acceptable {
        return Err(Error::Precondition(
            "classes are already balanced".to_string(),
        ));
    }
    let minority_label = if non_acceptable < acceptable {
        Label::NonAcceptable
    } else {
        Label::Acceptable
    };
    let needed = acceptable.abs_diff(non_acceptable);

    let model = dataset.model();
    let mut pool: Vec<Configuration> = dataset.configs_with_label(minority_label);
    let mut seen: HashSet<Vec<u64>> = dataset
        .rows()
        .iter()
        .map(|r| bit_pattern(&r.config))
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut added = Vec::with_capacity(needed);
    let mut trace = Vec::with_capacity(needed);
    for _ in 0..needed {
        if pool.len() < 2 {
            return Err(Error::Augmentation(
                "minority pool has fewer than two configurations".to_string(),
            ));
        }
        let mut placed = false;
        for _ in 0..MAX_CENTROID_RETRIES {
            let a = rng.random_range(0..pool.len());
            let b = loop {
                let candidate = rng.random_range(0..pool.len());
                if candidate != a {
                    break candidate;
                }
            };
            let midpoint: Vec<f64> = pool[a]
                .values()
                .iter()
                .zip(pool[b].values())
                .map(|(&x, &y)| (x + y) / 2.0)
                .collect();
            let centroid = model.repair_types(&Configuration::new(midpoint.clone()))?;
            if seen.insert(bit_pattern(&centroid)) {
                trace.push(CentroidRecord {
                    parent_a: a,
                    parent_b: b,
                    midpoint,
                });
                pool.push(centroid.clone());
                added.push(centroid);
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(Error::Augmentation(format!(
                "no never-seen-before centroid found within {MAX_CENTROID_RETRIES} retries"
            )));
        }
    }

    let mut rows = dataset.rows().to_vec();
    rows.extend(added.into_iter().map(|config| LabeledConfig {
        config,
        label: minority_label,
    }));
    Ok((Dataset::new(model.clone(), rows)?, trace))
}

/// Adds midpoints of randomly drawn minority pairs (repaired to their
/// feature types) until class counts are exactly equal. Each new centroid
/// must be distinct from every existing row and immediately joins the pool
/// of eligible parents. Originals are never removed or relabeled.
pub fn balance_with_centroids(dataset: &Dataset, seed: u64) -> Result<Dataset> {
    balance_with_centroids_traced(dataset, seed).map(|(balanced, _)| balanced)
}

fn bit_pattern(config: &Configuration) -> Vec<u64> {
    config.values().iter().map(|v| v.to_bits()).collect()
}

// --------------------------------------------------------------------------
// Dummification
// --------------------------------------------------------------------------

/// One-hot expansion of every enumeration into its full literal set. An
/// enumeration of cardinality k becomes k Boolean features named
/// "{name}_{literal}"; all literals are emitted, whether or not a dataset
/// uses them, so the transform does not depend on observed rows.
pub fn dummify_model(model: &VariabilityModel) -> Result<VariabilityModel> {
    if !model
        .features()
        .iter()
        .any(|f| matches!(f.kind, FeatureKind::Enumeration { .. }))
    {
        return Err(Error::Precondition(
            "model has no enumeration features to dummify".to_string(),
        ));
    }
    let mut features = Vec::new();
    for feature in model.features() {
        match feature.kind {
            FeatureKind::Enumeration { cardinality } => {
                for literal in 0..cardinality {
                    features.push(FeatureDef {
                        name: format!("{}_{literal}", feature.name),
                        kind: FeatureKind::Boolean,
                    });
                }
            }
            _ => features.push(feature.clone()),
        }
    }
    // Cross constraints only reference Boolean features, which keep their
    // names, so they carry over unchanged.
    let constraints: Vec<CrossConstraint> = model.cross_constraints().to_vec();
    VariabilityModel::new(features, constraints)
}

/// Dummifies the model and rewrites every row into the expanded space.
pub fn dummify(dataset: &Dataset) -> Result<(VariabilityModel, Dataset)> {
    let model = dataset.model();
    let dummified = dummify_model(model)?;
    let mut rows = Vec::with_capacity(dataset.len());
    for (row_idx, row) in dataset.rows().iter().enumerate() {
        let mut values = Vec::with_capacity(dummified.len());
        for (feature, &value) in model.features().iter().zip(row.config.values()) {
            match feature.kind {
                FeatureKind::Enumeration { cardinality } => {
                    if value.fract() != 0.0 || value < 0.0 || value > f64::from(cardinality - 1) {
                        return Err(Error::Precondition(format!(
                            "row {row_idx}: enumeration '{}' value {value} is not a literal",
                            feature.name
                        )));
                    }
                    for literal in 0..cardinality {
                        values.push(if f64::from(literal) == value { 1.0 } else { 0.0 });
                    }
                }
                _ => values.push(value),
            }
        }
        rows.push(LabeledConfig {
            config: Configuration::new(values),
            label: row.label,
        });
    }
    let dataset = Dataset::new(dummified.clone(), rows)?;
    Ok((dummified, dataset))
}

/// Inverts [`dummify`]: collapses each one-hot literal group back to the
/// original enumeration value. Errors if a group is not exactly one-hot.
pub fn undummify(
    model: &VariabilityModel,
    dummified: &VariabilityModel,
    dataset: &Dataset,
) -> Result<Dataset> {
    let expected = dummify_model(model)?;
    if expected.features() != dummified.features() {
        return Err(Error::Precondition(
            "dummified model does not match the original model's expansion".to_string(),
        ));
    }
    let mut rows = Vec::with_capacity(dataset.len());
    for (row_idx, row) in dataset.rows().iter().enumerate() {
        if row.config.len() != dummified.len() {
            return Err(Error::DimensionMismatch {
                expected: dummified.len(),
                got: row.config.len(),
            });
        }
        let mut values = Vec::with_capacity(model.len());
        let mut cursor = 0;
        for feature in model.features() {
            match feature.kind {
                FeatureKind::Enumeration { cardinality } => {
                    let group = &row.config.values()[cursor..cursor + cardinality as usize];
                    cursor += cardinality as usize;
                    let ones: Vec<usize> = group
                        .iter()
                        .enumerate()
                        .filter(|(_, &v)| v == 1.0)
                        .map(|(i, _)| i)
                        .collect();
                    let all_binary = group.iter().all(|&v| v == 0.0 || v == 1.0);
                    if ones.len() != 1 || !all_binary {
                        return Err(Error::Precondition(format!(
                            "row {row_idx}: literal group for '{}' is not one-hot",
                            feature.name
                        )));
                    }
                    values.push(ones[0] as f64);
                }
                _ => {
                    values.push(row.config.values()[cursor]);
                    cursor += 1;
                }
            }
        }
        rows.push(LabeledConfig {
            config: Configuration::new(values),
            label: row.label,
        });
    }
    Dataset::new(model.clone(), rows)
}
