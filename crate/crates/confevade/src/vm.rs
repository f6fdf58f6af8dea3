//! Variability models: typed option definitions, configurations, validity
//! checking, type repair and random sampling.
//!
//! A model is an ordered list of typed features (Boolean, enumeration, real
//! interval) plus a small set of requires/excludes constraints between
//! Boolean features. Feature order defines the vector indexing used by
//! [`Configuration`] everywhere else in the crate.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::Error as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rejection-sampling budget per configuration before giving up on a model
/// whose constraints look unsatisfiable.
const MAX_SAMPLE_REJECTIONS: usize = 10_000;

/// The value domain of a single configuration option.
#[derive(Debug, Clone, PartialEq)]
pub enum FeatureKind {
    /// Valid values are exactly {0, 1}.
    Boolean,
    /// Valid values are integers in [0, cardinality - 1].
    Enumeration { cardinality: u32 },
    /// Valid values are reals in [min, max]. `precision` governs how values
    /// are rounded when serialized; stored values stay full-width floats.
    Real { min: f64, max: f64, precision: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureDef {
    pub name: String,
    pub kind: FeatureKind,
}

impl FeatureDef {
    fn check(&self) -> Result<()> {
        match self.kind {
            FeatureKind::Boolean => Ok(()),
            FeatureKind::Enumeration { cardinality } => {
                if cardinality < 2 {
                    return Err(Error::InvalidModel(format!(
                        "enumeration '{}' needs cardinality >= 2, got {}",
                        self.name, cardinality
                    )));
                }
                Ok(())
            }
            FeatureKind::Real { min, max, precision } => {
                if min.is_nan() || max.is_nan() || min >= max {
                    return Err(Error::InvalidModel(format!(
                        "real '{}' needs min < max, got [{min}, {max}]",
                        self.name
                    )));
                }
                if precision.is_nan() || precision <= 0.0 {
                    return Err(Error::InvalidModel(format!(
                        "real '{}' needs precision > 0, got {precision}",
                        self.name
                    )));
                }
                Ok(())
            }
        }
    }
}

/// A cross-tree constraint between two Boolean features, referenced by name.
#[derive(Debug, Clone, PartialEq)]
pub enum CrossConstraint {
    /// Selecting `a` forces `b`.
    Requires { a: String, b: String },
    /// `a` and `b` cannot both be selected.
    Excludes { a: String, b: String },
}

impl CrossConstraint {
    pub fn endpoints(&self) -> (&str, &str) {
        match self {
            CrossConstraint::Requires { a, b } | CrossConstraint::Excludes { a, b } => (a, b),
        }
    }

    fn describe(&self) -> String {
        match self {
            CrossConstraint::Requires { a, b } => format!("requires({a} -> {b})"),
            CrossConstraint::Excludes { a, b } => format!("excludes({a}, {b})"),
        }
    }
}

/// An ordered, typed option space plus cross-tree constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct VariabilityModel {
    features: Vec<FeatureDef>,
    cross_constraints: Vec<CrossConstraint>,
}

/// A complete assignment of values to all options of a model, in model
/// order. Operations that take a `Configuration` also take its model; the
/// configuration itself is just the dense value vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    values: Vec<f64>,
}

impl Configuration {
    pub fn new(values: Vec<f64>) -> Self {
        Configuration { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// One violated domain or constraint, with the offending feature or
/// constraint and a short reason.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub subject: String,
    pub reason: String,
}

/// Outcome of [`VariabilityModel::validate`]. Valid iff no violations.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidityReport {
    violations: Vec<Violation>,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }
}

impl VariabilityModel {
    /// Builds a model, checking feature-definition invariants, name
    /// uniqueness and that constraints reference existing Boolean features.
    pub fn new(features: Vec<FeatureDef>, cross_constraints: Vec<CrossConstraint>) -> Result<Self> {
        for feature in &features {
            feature.check()?;
        }
        let mut seen = std::collections::HashSet::new();
        for feature in &features {
            if !seen.insert(feature.name.as_str()) {
                return Err(Error::InvalidModel(format!(
                    "duplicate feature name '{}'",
                    feature.name
                )));
            }
        }
        let model = VariabilityModel {
            features,
            cross_constraints: Vec::new(),
        };
        for constraint in &cross_constraints {
            let (a, b) = constraint.endpoints();
            if a == b {
                return Err(Error::InvalidModel(format!(
                    "constraint {} references the same feature twice",
                    constraint.describe()
                )));
            }
            for name in [a, b] {
                match model.feature_index(name) {
                    Some(idx) => {
                        if model.features[idx].kind != FeatureKind::Boolean {
                            return Err(Error::InvalidModel(format!(
                                "constraint {} references non-Boolean feature '{name}'",
                                constraint.describe()
                            )));
                        }
                    }
                    None => {
                        return Err(Error::InvalidModel(format!(
                            "constraint {} references unknown feature '{name}'",
                            constraint.describe()
                        )));
                    }
                }
            }
        }
        Ok(VariabilityModel {
            cross_constraints,
            ..model
        })
    }

    pub fn features(&self) -> &[FeatureDef] {
        &self.features
    }

    pub fn cross_constraints(&self) -> &[CrossConstraint] {
        &self.cross_constraints
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|f| f.name == name)
    }

    pub fn feature_names(&self) -> impl Iterator<Item = &str> {
        self.features.iter().map(|f| f.name.as_str())
    }

    fn check_len(&self, config: &Configuration) -> Result<()> {
        if config.len() != self.features.len() {
            return Err(Error::DimensionMismatch {
                expected: self.features.len(),
                got: config.len(),
            });
        }
        Ok(())
    }

    /// Checks every feature value against its kind's valid set and every
    /// cross constraint; reports one violation per offence.
    pub fn validate(&self, config: &Configuration) -> Result<ValidityReport> {
        self.check_len(config)?;
        let mut violations = Vec::new();
        for (feature, &value) in self.features.iter().zip(config.values()) {
            match feature.kind {
                FeatureKind::Boolean => {
                    if value != 0.0 && value != 1.0 {
                        violations.push(Violation {
                            subject: feature.name.clone(),
                            reason: format!("value {value} not in {{0, 1}}"),
                        });
                    }
                }
                FeatureKind::Enumeration { cardinality } => {
                    if !(value.fract() == 0.0) {
                        violations.push(Violation {
                            subject: feature.name.clone(),
                            reason: format!("value {value} is not an integer literal"),
                        });
                    } else if value < 0.0 {
                        violations.push(Violation {
                            subject: feature.name.clone(),
                            reason: format!("value {value} below literal 0"),
                        });
                    } else if value > f64::from(cardinality - 1) {
                        violations.push(Violation {
                            subject: feature.name.clone(),
                            reason: format!(
                                "value {value} above maximum literal {}",
                                cardinality - 1
                            ),
                        });
                    }
                }
                FeatureKind::Real { min, max, .. } => {
                    // NaN counts as out of range on the low side.
                    if value.is_nan() || value < min {
                        violations.push(Violation {
                            subject: feature.name.clone(),
                            reason: format!("value {value} below min {min}"),
                        });
                    } else if value > max {
                        violations.push(Violation {
                            subject: feature.name.clone(),
                            reason: format!("value {value} above max {max}"),
                        });
                    }
                }
            }
        }
        for constraint in &self.cross_constraints {
            let (a, b) = constraint.endpoints();
            // Unwraps are safe: constraints were resolved at construction.
            let va = config.values()[self.feature_index(a).unwrap()];
            let vb = config.values()[self.feature_index(b).unwrap()];
            let violated = match constraint {
                CrossConstraint::Requires { .. } => va == 1.0 && vb == 0.0,
                CrossConstraint::Excludes { .. } => va == 1.0 && vb == 1.0,
            };
            if violated {
                violations.push(Violation {
                    subject: constraint.describe(),
                    reason: "constraint violated".to_string(),
                });
            }
        }
        Ok(ValidityReport { violations })
    }

    /// Coerces feature values back to their kinds after a displacement.
    ///
    /// Booleans snap to the nearest of {0, 1}; enumerations round half away
    /// from zero and negative literals reset to 0, but values above the
    /// cardinality are left alone so later validation can flag them; reals
    /// are untouched. Idempotent.
    pub fn repair_types(&self, config: &Configuration) -> Result<Configuration> {
        self.check_len(config)?;
        let values = self
            .features
            .iter()
            .zip(config.values())
            .map(|(feature, &value)| match feature.kind {
                FeatureKind::Boolean => {
                    if value < 0.0 {
                        0.0
                    } else if value > 1.0 {
                        1.0
                    } else {
                        value.round()
                    }
                }
                FeatureKind::Enumeration { .. } => {
                    let rounded = value.round();
                    if rounded < 0.0 {
                        0.0
                    } else {
                        rounded
                    }
                }
                FeatureKind::Real { .. } => value,
            })
            .collect();
        Ok(Configuration::new(values))
    }

    /// Draws `n` valid configurations, uniformly per feature domain, with
    /// rejection sampling against the cross constraints.
    pub fn sample_random(&self, n: usize, seed: u64) -> Result<Vec<Configuration>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            out.push(self.sample_one(&mut rng)?);
        }
        Ok(out)
    }

    pub(crate) fn sample_one(&self, rng: &mut ChaCha8Rng) -> Result<Configuration> {
        for _ in 0..MAX_SAMPLE_REJECTIONS {
            let values: Vec<f64> = self
                .features
                .iter()
                .map(|feature| match feature.kind {
                    FeatureKind::Boolean => f64::from(rng.random_range(0..=1u32)),
                    FeatureKind::Enumeration { cardinality } => {
                        f64::from(rng.random_range(0..cardinality))
                    }
                    FeatureKind::Real { min, max, .. } => rng.random_range(min..=max),
                })
                .collect();
            let candidate = Configuration::new(values);
            if self.satisfies_constraints(&candidate) {
                return Ok(candidate);
            }
        }
        Err(Error::SamplingExhausted {
            attempts: MAX_SAMPLE_REJECTIONS,
        })
    }

    fn satisfies_constraints(&self, config: &Configuration) -> bool {
        self.cross_constraints.iter().all(|constraint| {
            let (a, b) = constraint.endpoints();
            let va = config.values()[self.feature_index(a).unwrap()];
            let vb = config.values()[self.feature_index(b).unwrap()];
            match constraint {
                CrossConstraint::Requires { .. } => !(va == 1.0 && vb == 0.0),
                CrossConstraint::Excludes { .. } => !(va == 1.0 && vb == 1.0),
            }
        })
    }

    /// Base-10 log of the product of per-feature domain sizes, ignoring
    /// cross constraints (an over-estimate of the variant space).
    pub fn config_space_log10(&self) -> f64 {
        self.features
            .iter()
            .map(|feature| match feature.kind {
                FeatureKind::Boolean => 2f64.log10(),
                FeatureKind::Enumeration { cardinality } => f64::from(cardinality).log10(),
                FeatureKind::Real { min, max, precision } => {
                    ((max - min) / precision).max(1.0).log10()
                }
            })
            .sum()
    }
}

/// Generates a synthetic model shaped like the industrial video-generator
/// case: 20 Boolean options, 46 enumerations of 7 literals, 42 reals on
/// [0, 27.64] at precision 1e-5, plus `n_constraints` requires/excludes
/// pairs drawn among the Boolean options.
pub fn gen_motiv_like_with(seed: u64, n_constraints: usize) -> Result<VariabilityModel> {
    const N_BOOL: usize = 20;
    let max_pairs = N_BOOL * (N_BOOL - 1) / 2;
    if n_constraints > max_pairs {
        return Err(Error::Precondition(format!(
            "at most {max_pairs} distinct Boolean pairs available, asked for {n_constraints}"
        )));
    }

    let mut features = Vec::with_capacity(108);
    for i in 1..=N_BOOL {
        features.push(FeatureDef {
            name: format!("b{i:02}"),
            kind: FeatureKind::Boolean,
        });
    }
    for i in 1..=46 {
        features.push(FeatureDef {
            name: format!("e{i:02}"),
            kind: FeatureKind::Enumeration { cardinality: 7 },
        });
    }
    for i in 1..=42 {
        features.push(FeatureDef {
            name: format!("r{i:02}"),
            kind: FeatureKind::Real {
                min: 0.0,
                max: 27.64,
                precision: 1e-5,
            },
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut used_pairs = std::collections::HashSet::new();
    let mut constraints = Vec::with_capacity(n_constraints);
    while constraints.len() < n_constraints {
        let a = rng.random_range(0..N_BOOL);
        let b = rng.random_range(0..N_BOOL);
        if a == b {
            continue;
        }
        let key = (a.min(b), a.max(b));
        if !used_pairs.insert(key) {
            continue;
        }
        let a_name = format!("b{:02}", a + 1);
        let b_name = format!("b{:02}", b + 1);
        constraints.push(if rng.random_bool(0.5) {
            CrossConstraint::Requires { a: a_name, b: b_name }
        } else {
            CrossConstraint::Excludes { a: a_name, b: b_name }
        });
    }

    VariabilityModel::new(features, constraints)
}

/// [`gen_motiv_like_with`] with the default of 3 cross constraints.
pub fn gen_motiv_like(seed: u64) -> VariabilityModel {
    gen_motiv_like_with(seed, 3).expect("default constraint count is always satisfiable")
}

// --------------------------------------------------------------------------
// JSON model files
//
// {"features":[{"name":..,"kind":"boolean"|"enumeration"|"real",
//               "cardinality"?,"min"?,"max"?,"precision"?}, ...],
//  "constraints":[{"kind":"requires"|"excludes","a":..,"b":..}, ...]}
//
// Unknown fields are rejected, as are kind-inapplicable fields.
// --------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    features: Vec<RawFeature>,
    constraints: Vec<RawConstraint>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFeature {
    name: String,
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    cardinality: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    precision: Option<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConstraint {
    kind: String,
    a: String,
    b: String,
}

impl Serialize for VariabilityModel {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let features = self
            .features
            .iter()
            .map(|f| {
                let mut raw = RawFeature {
                    name: f.name.clone(),
                    kind: String::new(),
                    cardinality: None,
                    min: None,
                    max: None,
                    precision: None,
                };
                match f.kind {
                    FeatureKind::Boolean => raw.kind = "boolean".into(),
                    FeatureKind::Enumeration { cardinality } => {
                        raw.kind = "enumeration".into();
                        raw.cardinality = Some(cardinality);
                    }
                    FeatureKind::Real { min, max, precision } => {
                        raw.kind = "real".into();
                        raw.min = Some(min);
                        raw.max = Some(max);
                        raw.precision = Some(precision);
                    }
                }
                raw
            })
            .collect();
        let constraints = self
            .cross_constraints
            .iter()
            .map(|c| match c {
                CrossConstraint::Requires { a, b } => RawConstraint {
                    kind: "requires".into(),
                    a: a.clone(),
                    b: b.clone(),
                },
                CrossConstraint::Excludes { a, b } => RawConstraint {
                    kind: "excludes".into(),
                    a: a.clone(),
                    b: b.clone(),
                },
            })
            .collect();
        RawModel {
            features,
            constraints,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for VariabilityModel {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let raw = RawModel::deserialize(deserializer)?;
        let mut features = Vec::with_capacity(raw.features.len());
        for f in raw.features {
            let kind = match f.kind.as_str() {
                "boolean" => {
                    if f.cardinality.is_some()
                        || f.min.is_some()
                        || f.max.is_some()
                        || f.precision.is_some()
                    {
                        return Err(D::Error::custom(format!(
                            "feature '{}': boolean takes no extra fields",
                            f.name
                        )));
                    }
                    FeatureKind::Boolean
                }
                "enumeration" => {
                    if f.min.is_some() || f.max.is_some() || f.precision.is_some() {
                        return Err(D::Error::custom(format!(
                            "feature '{}': enumeration takes only 'cardinality'",
                            f.name
                        )));
                    }
                    let cardinality = f.cardinality.ok_or_else(|| {
                        D::Error::custom(format!("feature '{}': missing 'cardinality'", f.name))
                    })?;
                    FeatureKind::Enumeration { cardinality }
                }
                "real" => {
                    if f.cardinality.is_some() {
                        return Err(D::Error::custom(format!(
                            "feature '{}': real takes 'min'/'max'/'precision'",
                            f.name
                        )));
                    }
                    let field = |opt: Option<f64>, what: &str| {
                        opt.ok_or_else(|| {
                            D::Error::custom(format!("feature '{}': missing '{what}'", f.name))
                        })
                    };
                    FeatureKind::Real {
                        min: field(f.min, "min")?,
                        max: field(f.max, "max")?,
                        precision: field(f.precision, "precision")?,
                    }
                }
                other => {
                    return Err(D::Error::custom(format!(
                        "feature '{}': unknown kind '{other}'",
                        f.name
                    )))
                }
            };
            features.push(FeatureDef { name: f.name, kind });
        }
        let constraints = raw
            .constraints
            .into_iter()
            .map(|c| match c.kind.as_str() {
                "requires" => Ok(CrossConstraint::Requires { a: c.a, b: c.b }),
                "excludes" => Ok(CrossConstraint::Excludes { a: c.a, b: c.b }),
                other => Err(D::Error::custom(format!("unknown constraint kind '{other}'"))),
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        VariabilityModel::new(features, constraints).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(name: &str, min: f64, max: f64) -> FeatureDef {
        FeatureDef {
            name: name.into(),
            kind: FeatureKind::Real {
                min,
                max,
                precision: 1e-5,
            },
        }
    }

    fn boolean(name: &str) -> FeatureDef {
        FeatureDef {
            name: name.into(),
            kind: FeatureKind::Boolean,
        }
    }

    fn enumeration(name: &str, cardinality: u32) -> FeatureDef {
        FeatureDef {
            name: name.into(),
            kind: FeatureKind::Enumeration { cardinality },
        }
    }

    #[test]
    fn validate_real_above_max() {
        let model = VariabilityModel::new(vec![real("r", 0.0, 27.64)], vec![]).unwrap();
        let report = model
            .validate(&Configuration::new(vec![27.65]))
            .unwrap();
        assert!(!report.is_valid());
        assert!(report.violations()[0].reason.contains("above max"));
        // The boundary itself is fine.
        assert!(model
            .validate(&Configuration::new(vec![27.64]))
            .unwrap()
            .is_valid());
    }

    #[test]
    fn validate_enumeration_edges() {
        let model = VariabilityModel::new(vec![enumeration("e", 7)], vec![]).unwrap();
        assert!(model.validate(&Configuration::new(vec![6.0])).unwrap().is_valid());
        assert!(!model.validate(&Configuration::new(vec![7.0])).unwrap().is_valid());
        assert!(!model.validate(&Configuration::new(vec![2.5])).unwrap().is_valid());
        assert!(!model.validate(&Configuration::new(vec![-1.0])).unwrap().is_valid());
    }

    #[test]
    fn validate_requires() {
        let model = VariabilityModel::new(
            vec![boolean("a"), boolean("b")],
            vec![CrossConstraint::Requires {
                a: "a".into(),
                b: "b".into(),
            }],
        )
        .unwrap();
        let report = model.validate(&Configuration::new(vec![1.0, 0.0])).unwrap();
        assert_eq!(report.violations().len(), 1);
        assert!(report.violations()[0].subject.contains("requires"));
        assert!(model.validate(&Configuration::new(vec![1.0, 1.0])).unwrap().is_valid());
        assert!(model.validate(&Configuration::new(vec![0.0, 0.0])).unwrap().is_valid());
    }

    #[test]
    fn validate_excludes() {
        let model = VariabilityModel::new(
            vec![boolean("a"), boolean("b")],
            vec![CrossConstraint::Excludes {
                a: "a".into(),
                b: "b".into(),
            }],
        )
        .unwrap();
        assert!(!model.validate(&Configuration::new(vec![1.0, 1.0])).unwrap().is_valid());
        assert!(model.validate(&Configuration::new(vec![1.0, 0.0])).unwrap().is_valid());
    }

    #[test]
    fn validate_length_mismatch() {
        let model = VariabilityModel::new(vec![boolean("a")], vec![]).unwrap();
        assert!(matches!(
            model.validate(&Configuration::new(vec![0.0, 1.0])),
            Err(Error::DimensionMismatch { expected: 1, got: 2 })
        ));
    }

    #[test]
    fn repair_boolean_rounds_to_nearest() {
        let model = VariabilityModel::new(vec![boolean("a")], vec![]).unwrap();
        let repair = |v: f64| model.repair_types(&Configuration::new(vec![v])).unwrap().values()[0];
        assert_eq!(repair(0.7), 1.0);
        assert_eq!(repair(0.3), 0.0);
        assert_eq!(repair(0.5), 1.0);
        assert_eq!(repair(-3.2), 0.0);
        assert_eq!(repair(42.0), 1.0);
    }

    #[test]
    fn repair_enumeration_resets_negatives_only() {
        let model = VariabilityModel::new(vec![enumeration("e", 7)], vec![]).unwrap();
        let repair = |v: f64| model.repair_types(&Configuration::new(vec![v])).unwrap().values()[0];
        assert_eq!(repair(-2.3), 0.0);
        // Above-cardinality values stay; validate flags them later.
        assert_eq!(repair(8.6), 9.0);
        assert_eq!(repair(3.4), 3.0);
        assert_eq!(repair(3.5), 4.0);
        let report = model.validate(&Configuration::new(vec![repair(8.6)])).unwrap();
        assert!(!report.is_valid());
    }

    #[test]
    fn repair_leaves_reals_untouched() {
        let model = VariabilityModel::new(vec![real("r", 0.0, 1.0)], vec![]).unwrap();
        let out = model.repair_types(&Configuration::new(vec![17.3])).unwrap();
        assert_eq!(out.values()[0], 17.3);
    }

    #[test]
    fn repair_is_idempotent() {
        let model = VariabilityModel::new(
            vec![boolean("a"), enumeration("e", 7), real("r", 0.0, 5.0)],
            vec![],
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let raw = Configuration::new(vec![
                rng.random_range(-10.0..10.0),
                rng.random_range(-10.0..10.0),
                rng.random_range(-10.0..10.0),
            ]);
            let once = model.repair_types(&raw).unwrap();
            let twice = model.repair_types(&once).unwrap();
            assert_eq!(once, twice);
        }
    }

    #[test]
    fn repair_then_validate_never_flags_booleans() {
        let model = VariabilityModel::new(vec![boolean("a"), boolean("b")], vec![]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let raw = Configuration::new(vec![
                rng.random_range(-100.0..100.0),
                rng.random_range(-100.0..100.0),
            ]);
            let repaired = model.repair_types(&raw).unwrap();
            let report = model.validate(&repaired).unwrap();
            for violation in report.violations() {
                assert!(
                    !violation.reason.contains("{0, 1}"),
                    "boolean violation after repair: {violation:?}"
                );
            }
        }
    }

    #[test]
    fn sample_zero_is_empty() {
        let model = gen_motiv_like(1);
        assert!(model.sample_random(0, 9).unwrap().is_empty());
    }

    #[test]
    fn sample_is_valid_and_deterministic() {
        let model = gen_motiv_like(1);
        let a = model.sample_random(200, 42).unwrap();
        let b = model.sample_random(200, 42).unwrap();
        assert_eq!(a, b);
        for config in &a {
            assert!(model.validate(config).unwrap().is_valid());
        }
        let c = model.sample_random(200, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn sample_motiv_scale() {
        let model = gen_motiv_like(1);
        let configs = model.sample_random(4500, 7).unwrap();
        assert_eq!(configs.len(), 4500);
        for config in &configs {
            assert!(model.validate(config).unwrap().is_valid());
        }
    }

    #[test]
    fn sample_exhaustion_errors() {
        // A tight constraint set still admits (0,0); rejection recovers.
        let model = VariabilityModel::new(
            vec![boolean("a"), boolean("b")],
            vec![
                CrossConstraint::Requires { a: "a".into(), b: "b".into() },
                CrossConstraint::Requires { a: "b".into(), b: "a".into() },
                CrossConstraint::Excludes { a: "a".into(), b: "b".into() },
            ],
        )
        .unwrap();
        assert!(model.sample_random(5, 1).is_ok());

        // A 50-long requires chain leaves 51 valid assignments out of 2^50;
        // the rejection budget cannot find one, so sampling reports
        // exhaustion instead of spinning forever.
        let features: Vec<FeatureDef> = (0..50).map(|i| boolean(&format!("x{i}"))).collect();
        let constraints: Vec<CrossConstraint> = (0..49)
            .map(|i| CrossConstraint::Requires {
                a: format!("x{i}"),
                b: format!("x{}", i + 1),
            })
            .collect();
        let chain = VariabilityModel::new(features, constraints).unwrap();
        assert!(matches!(
            chain.sample_random(1, 5),
            Err(Error::SamplingExhausted { .. })
        ));
    }

    #[test]
    fn motiv_like_shape() {
        let model = gen_motiv_like(1);
        assert_eq!(model.len(), 108);
        let mut bools = 0;
        let mut enums = 0;
        let mut reals = 0;
        for feature in model.features() {
            match feature.kind {
                FeatureKind::Boolean => bools += 1,
                FeatureKind::Enumeration { cardinality } => {
                    assert_eq!(cardinality, 7);
                    enums += 1;
                }
                FeatureKind::Real { min, max, precision } => {
                    assert_eq!(min, 0.0);
                    assert_eq!(max, 27.64);
                    assert_eq!(precision, 1e-5);
                    reals += 1;
                }
            }
        }
        assert_eq!((bools, enums, reals), (20, 46, 42));
        assert_eq!(model.cross_constraints().len(), 3);
        // Deterministic per seed.
        assert_eq!(model, gen_motiv_like(1));
        assert_ne!(
            gen_motiv_like(1).cross_constraints(),
            gen_motiv_like(2).cross_constraints()
        );
    }

    #[test]
    fn space_size_motiv_like() {
        let model = gen_motiv_like(1);
        let log10 = model.config_space_log10();
        assert!((log10 - 315.0).abs() <= 2.0, "log10 size {log10}");
    }

    #[test]
    fn space_size_trivial_cases() {
        let one_bool = VariabilityModel::new(vec![boolean("a")], vec![]).unwrap();
        assert!((one_bool.config_space_log10() - 2f64.log10()).abs() < 1e-12);

        let two_enums =
            VariabilityModel::new(vec![enumeration("e1", 7), enumeration("e2", 7)], vec![]).unwrap();
        assert!((two_enums.config_space_log10() - 2.0 * 7f64.log10()).abs() < 1e-12);

        // A real feature narrower than its precision counts as one value.
        let narrow = VariabilityModel::new(
            vec![FeatureDef {
                name: "r".into(),
                kind: FeatureKind::Real {
                    min: 0.0,
                    max: 1e-7,
                    precision: 1e-5,
                },
            }],
            vec![],
        )
        .unwrap();
        assert_eq!(narrow.config_space_log10(), 0.0);
    }

    #[test]
    fn space_size_is_additive() {
        let part_a = vec![boolean("a"), enumeration("e", 5)];
        let part_b = vec![real("r", 0.0, 2.0), boolean("z")];
        let combined: Vec<FeatureDef> =
            part_a.iter().cloned().chain(part_b.iter().cloned()).collect();
        let log_a = VariabilityModel::new(part_a, vec![]).unwrap().config_space_log10();
        let log_b = VariabilityModel::new(part_b, vec![]).unwrap().config_space_log10();
        let log_ab = VariabilityModel::new(combined, vec![]).unwrap().config_space_log10();
        assert!((log_ab - (log_a + log_b)).abs() < 1e-9);
    }

    #[test]
    fn model_rejects_bad_definitions() {
        assert!(VariabilityModel::new(vec![boolean("a"), boolean("a")], vec![]).is_err());
        assert!(VariabilityModel::new(vec![enumeration("e", 1)], vec![]).is_err());
        assert!(VariabilityModel::new(vec![real("r", 2.0, 1.0)], vec![]).is_err());
        assert!(VariabilityModel::new(
            vec![boolean("a")],
            vec![CrossConstraint::Requires { a: "a".into(), b: "a".into() }]
        )
        .is_err());
        assert!(VariabilityModel::new(
            vec![boolean("a"), enumeration("e", 3)],
            vec![CrossConstraint::Requires { a: "a".into(), b: "e".into() }]
        )
        .is_err());
        assert!(VariabilityModel::new(
            vec![boolean("a")],
            vec![CrossConstraint::Excludes { a: "a".into(), b: "zzz".into() }]
        )
        .is_err());
    }

    #[test]
    fn model_json_round_trip() {
        let model = gen_motiv_like(5);
        let json = serde_json::to_string_pretty(&model).unwrap();
        let back: VariabilityModel = serde_json::from_str(&json).unwrap();
        assert_eq!(model, back);
    }

    #[test]
    fn model_json_rejects_unknown_and_inapplicable_fields() {
        let unknown = r#"{"features":[{"name":"a","kind":"boolean","color":"red"}],"constraints":[]}"#;
        assert!(serde_json::from_str::<VariabilityModel>(unknown).is_err());

        let inapplicable =
            r#"{"features":[{"name":"a","kind":"boolean","min":0.0}],"constraints":[]}"#;
        assert!(serde_json::from_str::<VariabilityModel>(inapplicable).is_err());

        let missing =
            r#"{"features":[{"name":"e","kind":"enumeration"}],"constraints":[]}"#;
        assert!(serde_json::from_str::<VariabilityModel>(missing).is_err());

        let bad_constraint = r#"{"features":[{"name":"a","kind":"boolean"},{"name":"b","kind":"boolean"}],"constraints":[{"kind":"implies","a":"a","b":"b"}]}"#;
        assert!(serde_json::from_str::<VariabilityModel>(bad_constraint).is_err());
    }
}
