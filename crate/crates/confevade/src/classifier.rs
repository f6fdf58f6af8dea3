//! Linear max-margin classifier.
//!
//! Training minimizes the L2-regularized hinge loss by seeded stochastic
//! subgradient descent with a 1/t learning-rate decay (with the default
//! regularization of 1.0 and initial rate 1.0 this is the classic Pegasos
//! schedule). The returned weights are the tail average of the second half
//! of the iterates, which removes the last-iterate noise of the 1/t
//! schedule. The bias term is unregularized; SGD gives it no decay, so its
//! iterate never forgets early noise, and the final bias is instead set by
//! exact minimization of the hinge loss in the intercept alone (a convex
//! piecewise-linear problem solved by a breakpoint sweep). Everything
//! downstream only needs the discriminant g(x) = w·x + b, its constant
//! gradient, and the sign rule h = sign(g) with ties going to +1.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Label};
use crate::error::{Error, Result};
use crate::vm::{Configuration, VariabilityModel};

/// Training hyper-parameters. `learning_rate` is the initial step size; the
/// effective rate at global step t (1-based) is `learning_rate / t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainParams {
    pub regularization: f64,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
    /// Fit a per-feature min-max scaler on the training set and apply it
    /// inside the discriminant. Off by default: the attack operates on the
    /// raw heterogeneous space.
    pub min_max_scale: bool,
}

impl Default for TrainParams {
    fn default() -> Self {
        TrainParams {
            regularization: 1.0,
            epochs: 50,
            learning_rate: 1.0,
            seed: 0,
            min_max_scale: false,
        }
    }
}

impl TrainParams {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Per-feature min-max ranges fitted on the training set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    mins: Vec<f64>,
    spans: Vec<f64>,
}

impl Scaler {
    fn fit(rows: &[Vec<f64>]) -> Self {
        let dim = rows.first().map_or(0, Vec::len);
        let mut mins = vec![f64::INFINITY; dim];
        let mut maxs = vec![f64::NEG_INFINITY; dim];
        for row in rows {
            for (i, &v) in row.iter().enumerate() {
                mins[i] = mins[i].min(v);
                maxs[i] = maxs[i].max(v);
            }
        }
        let spans = mins
            .iter()
            .zip(&maxs)
            .map(|(&lo, &hi)| if hi > lo { hi - lo } else { 1.0 })
            .collect();
        Scaler { mins, spans }
    }

    fn apply(&self, values: &[f64]) -> Vec<f64> {
        values
            .iter()
            .zip(&self.mins)
            .zip(&self.spans)
            .map(|((&v, &lo), &span)| (v - lo) / span)
            .collect()
    }
}

/// Trained linear classifier: weights, bias and the parameters that
/// produced them. Immutable once trained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSvm {
    weights: Vec<f64>,
    bias: f64,
    params: TrainParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scaler: Option<Scaler>,
}

/// Sign rule shared by the classifier: g >= 0 predicts +1 (non-acceptable),
/// the tie at exactly 0 included.
pub fn label_from_discriminant(g: f64) -> Label {
    if g >= 0.0 {
        Label::NonAcceptable
    } else {
        Label::Acceptable
    }
}

impl LinearSvm {
    /// Builds a model directly from weights and bias, for constructed test
    /// cases and analytic checks.
    pub fn from_parts(weights: Vec<f64>, bias: f64) -> Self {
        LinearSvm {
            weights,
            bias,
            params: TrainParams::default(),
            scaler: None,
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn params(&self) -> &TrainParams {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// Trains on a dataset with both classes present.
    pub fn train(dataset: &Dataset, params: &TrainParams) -> Result<Self> {
        Self::train_traced(dataset, params).map(|(svm, _)| svm)
    }

    /// [`LinearSvm::train`] plus the regularized objective recorded at the
    /// end of every epoch.
    pub fn train_traced(dataset: &Dataset, params: &TrainParams) -> Result<(Self, Vec<f64>)> {
        if dataset.is_empty() {
            return Err(Error::Precondition("training set is empty".to_string()));
        }
        let (acceptable, non_acceptable) = dataset.class_counts();
        if acceptable == 0 || non_acceptable == 0 {
            return Err(Error::Precondition(
                "training needs both classes; margin is undefined on one class".to_string(),
            ));
        }
        if params.epochs == 0 {
            return Err(Error::Precondition("epochs must be >= 1".to_string()));
        }
        let positive = |v: f64| v > 0.0;
        if !positive(params.regularization) || !positive(params.learning_rate) {
            return Err(Error::Precondition(
                "regularization and learning_rate must be positive".to_string(),
            ));
        }

        let raw: Vec<Vec<f64>> = dataset
            .rows()
            .iter()
            .map(|r| r.config.values().to_vec())
            .collect();
        let scaler = params.min_max_scale.then(|| Scaler::fit(&raw));
        let rows: Vec<Vec<f64>> = match &scaler {
            Some(s) => raw.iter().map(|r| s.apply(r)).collect(),
            None => raw,
        };
        let labels: Vec<f64> = dataset
            .rows()
            .iter()
            .map(|r| f64::from(r.label.value()))
            .collect();

        let dim = dataset.model().len();
        let lambda = params.regularization;
        let mut weights = vec![0.0; dim];
        let mut bias = 0.0;
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let mut order: Vec<usize> = (0..rows.len()).collect();
        let total_steps = params.epochs as u64 * rows.len() as u64;
        let average_from = total_steps / 2 + 1;
        let mut weight_sum = vec![0.0; dim];
        let mut averaged_steps = 0u64;
        let mut step: u64 = 0;
        let mut trace = Vec::with_capacity(params.epochs);

        for _ in 0..params.epochs {
            crate::seed::shuffle(&mut order, &mut rng);
            for &i in &order {
                step += 1;
                let eta = params.learning_rate / step as f64;
                let margin = labels[i] * (dot(&weights, &rows[i]) + bias);
                let decay = (1.0 - eta * lambda).max(0.0);
                for w in weights.iter_mut() {
                    *w *= decay;
                }
                if margin < 1.0 {
                    for (w, &x) in weights.iter_mut().zip(&rows[i]) {
                        *w += eta * labels[i] * x;
                    }
                    bias += eta * labels[i];
                }
                if step >= average_from {
                    for (sum, &w) in weight_sum.iter_mut().zip(&weights) {
                        *sum += w;
                    }
                    averaged_steps += 1;
                }
            }
            trace.push(objective(&weights, bias, &rows, &labels, lambda));
        }

        let scale = 1.0 / averaged_steps as f64;
        let weights: Vec<f64> = weight_sum.into_iter().map(|w| w * scale).collect();
        let scores: Vec<f64> = rows.iter().map(|row| dot(&weights, row)).collect();
        let bias = optimal_bias(&scores, &labels);

        Ok((
            LinearSvm {
                weights,
                bias,
                params: params.clone(),
                scaler,
            },
            trace,
        ))
    }

    fn check_dim(&self, x: &Configuration) -> Result<()> {
        if x.len() != self.weights.len() {
            return Err(Error::DimensionMismatch {
                expected: self.weights.len(),
                got: x.len(),
            });
        }
        Ok(())
    }

    /// The discriminant g(x) = w·x + b (on scaled inputs when a scaler was
    /// fitted). |g(x)| serves as the confidence proxy.
    pub fn discriminant(&self, x: &Configuration) -> Result<f64> {
        self.check_dim(x)?;
        let g = match &self.scaler {
            Some(s) => dot(&self.weights, &s.apply(x.values())) + self.bias,
            None => dot(&self.weights, x.values()) + self.bias,
        };
        Ok(g)
    }

    /// h(x) = sign(g(x)) with the tie at 0 assigned to +1.
    pub fn predict(&self, x: &Configuration) -> Result<Label> {
        Ok(label_from_discriminant(self.discriminant(x)?))
    }

    /// Gradient of the discriminant with respect to the raw configuration.
    /// Constant for a linear kernel: the weights, divided by the fitted
    /// spans when a scaler is active.
    pub fn gradient(&self) -> Vec<f64> {
        match &self.scaler {
            Some(s) => self
                .weights
                .iter()
                .zip(&s.spans)
                .map(|(&w, &span)| w / span)
                .collect(),
            None => self.weights.clone(),
        }
    }

    /// Fraction of rows whose prediction matches the label.
    pub fn accuracy(&self, dataset: &Dataset) -> Result<f64> {
        if dataset.is_empty() {
            return Err(Error::Precondition(
                "accuracy is undefined on an empty dataset".to_string(),
            ));
        }
        let mut correct = 0usize;
        for row in dataset.rows() {
            if self.predict(&row.config)? == row.label {
                correct += 1;
            }
        }
        Ok(correct as f64 / dataset.len() as f64)
    }

    /// The `k` features with the largest absolute weights, descending; ties
    /// keep model order.
    pub fn top_features(&self, model: &VariabilityModel, k: usize) -> Result<Vec<(String, f64)>> {
        if model.len() != self.weights.len() {
            return Err(Error::DimensionMismatch {
                expected: self.weights.len(),
                got: model.len(),
            });
        }
        if k > self.weights.len() {
            return Err(Error::Precondition(format!(
                "k must be <= {} features, got {k}",
                self.weights.len()
            )));
        }
        let mut ranked: Vec<(String, f64)> = model
            .feature_names()
            .zip(&self.weights)
            .map(|(name, &w)| (name.to_string(), w.abs()))
            .collect();
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1));
        ranked.truncate(k);
        Ok(ranked)
    }

    /// Serializes as {"weights":[...],"bias":..,"params":{...}} at full
    /// double precision ("scaler" appears only when one was fitted).
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("classifier serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Exact minimizer of b -> sum_i max(0, 1 - y_i (s_i + b)).
///
/// The loss is convex piecewise linear with one breakpoint per row
/// (1 - s for +1 rows, -1 - s for -1 rows) and every breakpoint raises the
/// slope by one as b sweeps upward, starting from -(#positive). The slope
/// reaches zero after #positive breakpoints; any b in the following flat
/// segment is optimal and the midpoint is returned, which lands exactly at
/// zero for datasets mirrored through the origin.
fn optimal_bias(scores: &[f64], labels: &[f64]) -> f64 {
    let mut breakpoints: Vec<f64> = scores
        .iter()
        .zip(labels)
        .map(|(&s, &y)| if y > 0.0 { 1.0 - s } else { -1.0 - s })
        .collect();
    breakpoints.sort_by(f64::total_cmp);
    let positives = labels.iter().filter(|&&y| y > 0.0).count();
    // Both classes are present, so 1 <= positives <= n - 1 and the segment
    // [breakpoints[positives - 1], breakpoints[positives]] exists.
    let lo = breakpoints[positives - 1];
    let hi = breakpoints[positives];
    lo / 2.0 + hi / 2.0
}

fn objective(weights: &[f64], bias: f64, rows: &[Vec<f64>], labels: &[f64], lambda: f64) -> f64 {
    let reg = 0.5 * lambda * dot(weights, weights);
    let hinge: f64 = rows
        .iter()
        .zip(labels)
        .map(|(row, &y)| (1.0 - y * (dot(weights, row) + bias)).max(0.0))
        .sum();
    reg + hinge / rows.len() as f64
}
