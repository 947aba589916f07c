//! Compared-validation runs: split, predict from one half, score on the
//! other, for every method and for all users and cold-start users.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::baselines::BaselineConfig;
use crate::engine::{inject_self_confidence, run_rga, softmax_normalize, RgaConfig};
use crate::error::{Error, Result};
use crate::eval::metrics::{mae, rmse};
use crate::eval::split::{cold_start_users, split_half};
use crate::matrix::{SparseTrustMatrix, TrustRecord};

pub const DEFAULT_COLD_START_THRESHOLD: usize = 5;

/// Space in which predictions and held-out values are compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScoringMode {
    /// Held-out values (and raw-scale baseline predictions) are pushed
    /// through the row softmax of the predict half, extended by the held-out
    /// entry itself; roundtable output is compared as is.
    #[default]
    Normalized,
    /// Held-out values stay raw; roundtable rows are divided by their largest
    /// off-diagonal entry.
    RawRescaled,
}

impl ScoringMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ScoringMode::Normalized => "normalized",
            ScoringMode::RawRescaled => "raw-rescaled",
        }
    }
}

impl std::str::FromStr for ScoringMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "normalized" => Ok(ScoringMode::Normalized),
            "raw-rescaled" | "raw" => Ok(ScoringMode::RawRescaled),
            other => Err(Error::InvalidParameter(format!("unknown scoring mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Population {
    AllUsers,
    ColdStart,
}

impl Population {
    pub fn as_str(self) -> &'static str {
        match self {
            Population::AllUsers => "all_users",
            Population::ColdStart => "cold_start",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Method {
    Rga,
    Baseline(BaselineConfig),
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Rga => "rga",
            Method::Baseline(b) => b.name(),
        }
    }

    /// The four methods of the comparison, in report order.
    pub fn all() -> Vec<Method> {
        vec![
            Method::Rga,
            Method::Baseline(BaselineConfig::mole_trust()),
            Method::Baseline(BaselineConfig::guha()),
            Method::Baseline(BaselineConfig::tidal_trust()),
        ]
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Rga => f.write_str("rga"),
            Method::Baseline(b) => b.fmt(f),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub rga: RgaConfig,
    pub methods: Vec<Method>,
    pub scoring: ScoringMode,
    pub cold_start_threshold: usize,
    pub seed: u64,
    pub repetitions: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            rga: RgaConfig::default(),
            methods: Method::all(),
            scoring: ScoringMode::Normalized,
            cold_start_threshold: DEFAULT_COLD_START_THRESHOLD,
            seed: 0,
            repetitions: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub method: String,
    pub population: Population,
    /// `None` for the mean over repetitions.
    pub repetition: Option<usize>,
    pub mae: f64,
    pub rmse: f64,
    /// Held-out pairs in this population.
    pub n_tested: f64,
    /// Held-out pairs the method produced a value for; the metrics' `N`.
    pub n_predictable: f64,
    pub pre_sparsity: f64,
    /// Sparsity degree of the mined matrix, for methods that produce one.
    pub post_sparsity: Option<f64>,
    pub seed: u64,
    pub config_echo: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodFailure {
    pub method: String,
    pub repetition: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct ExperimentOutcome {
    /// Per-repetition rows followed by one mean row per (method, population).
    pub reports: Vec<EvaluationReport>,
    pub failures: Vec<MethodFailure>,
    /// Propagation depth reached in each repetition.
    pub rga_depths: Vec<usize>,
}

/// Seed used by repetition `rep`.
pub fn repetition_seed(seed: u64, rep: usize) -> u64 {
    seed.wrapping_add(rep as u64)
}

fn normalized_value(v: f64, denominator: f64) -> f64 {
    let e = v.exp();
    e / (denominator + e)
}

pub fn run_experiment(records: &[TrustRecord], m: usize, config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    if config.repetitions < 1 {
        return Err(Error::InvalidParameter("repetitions must be at least 1".into()));
    }
    if config.methods.is_empty() {
        return Err(Error::InvalidParameter("no methods requested".into()));
    }
    config.rga.validate()?;
    let full = SparseTrustMatrix::from_records(records, m)?;
    let cold_start = cold_start_users(&full, config.cold_start_threshold);
    let unique = full.to_records();

    let mut outcome = ExperimentOutcome::default();
    for rep in 0..config.repetitions {
        let seed = repetition_seed(config.seed, rep);
        run_repetition(&unique, m, &cold_start, config, rep, seed, &mut outcome)?;
    }
    append_means(&mut outcome, config);
    Ok(outcome)
}

fn run_repetition(
    unique: &[TrustRecord],
    m: usize,
    cold_start: &BTreeSet<usize>,
    config: &ExperimentConfig,
    rep: usize,
    seed: u64,
    outcome: &mut ExperimentOutcome,
) -> Result<()> {
    let split = split_half(unique, seed)?;
    let predict = SparseTrustMatrix::from_records(&split.predict_set, m)?;
    let pairs: Vec<(usize, usize)> = split.test_set.iter().map(|r| (r.trustor, r.trustee)).collect();
    let pre_sparsity = predict.sparsity_degree();

    let rga_cfg = RgaConfig {
        retain_depths: false,
        ..config.rga.clone()
    };
    let rga = run_rga(&predict, &rga_cfg);
    let (denominators, fallback_mpd) = match &rga {
        Ok(r) => {
            outcome.rga_depths.push(r.depth);
            (r.normalized.row_denominators().to_vec(), r.depth.max(1))
        }
        Err(_) => {
            let g = softmax_normalize(&inject_self_confidence(&predict))?;
            (g.row_denominators().to_vec(), config.rga.max_depth)
        }
    };

    let echo_common = format!(
        "scoring={} cs_threshold={} epsilon={} max_depth={} aggregation={}",
        config.scoring.as_str(),
        config.cold_start_threshold,
        config.rga.epsilon,
        config.rga.max_depth,
        config.rga.aggregation.as_str()
    );

    for method in &config.methods {
        let predicted: Result<(Vec<Option<f64>>, Option<f64>)> = match method {
            Method::Rga => match &rga {
                Ok(r) => Ok((rga_predictions(&r.aggregated, &pairs, config.scoring), Some(r.aggregated.sparsity_degree()))),
                Err(e) => Err(Error::InvalidParameter(e.to_string())),
            },
            Method::Baseline(b) => b.predict_pairs(&predict, &pairs, fallback_mpd).map(|p| {
                let p = match config.scoring {
                    ScoringMode::Normalized => p
                        .into_iter()
                        .zip(&pairs)
                        .map(|(v, &(i, _))| v.map(|v| normalized_value(v, denominators[i])))
                        .collect(),
                    ScoringMode::RawRescaled => p,
                };
                (p, None)
            }),
        };
        let (predictions, post_sparsity) = match predicted {
            Ok(p) => p,
            Err(e) => {
                outcome.failures.push(MethodFailure {
                    method: method.name().to_string(),
                    repetition: rep,
                    message: e.to_string(),
                });
                continue;
            }
        };

        let echo = match (method, config.scoring) {
            (Method::Baseline(BaselineConfig::MoleTrust { mpd: None, trust_threshold }), _) => format!(
                "mole_trust:mpd=auto({fallback_mpd}),threshold={trust_threshold} {echo_common}"
            ),
            _ => format!("{method} {echo_common}"),
        };

        for population in [Population::AllUsers, Population::ColdStart] {
            let mut scored = Vec::new();
            let mut n_tested = 0usize;
            for ((record, &(i, _)), pred) in split.test_set.iter().zip(&pairs).zip(&predictions) {
                if population == Population::ColdStart && !cold_start.contains(&i) {
                    continue;
                }
                n_tested += 1;
                if let Some(p) = pred {
                    let truth = match config.scoring {
                        ScoringMode::Normalized => normalized_value(record.value, denominators[i]),
                        ScoringMode::RawRescaled => record.value,
                    };
                    scored.push((truth, *p));
                }
            }
            if scored.is_empty() {
                outcome.failures.push(MethodFailure {
                    method: method.name().to_string(),
                    repetition: rep,
                    message: format!(
                        "no predictions among {n_tested} {} test pairs",
                        population.as_str()
                    ),
                });
                continue;
            }
            outcome.reports.push(EvaluationReport {
                method: method.name().to_string(),
                population,
                repetition: Some(rep),
                mae: mae(&scored)?,
                rmse: rmse(&scored)?,
                n_tested: n_tested as f64,
                n_predictable: scored.len() as f64,
                pre_sparsity,
                post_sparsity,
                seed,
                config_echo: echo.clone(),
            });
        }
    }
    Ok(())
}

fn rga_predictions(aggregated: &SparseTrustMatrix, pairs: &[(usize, usize)], scoring: ScoringMode) -> Vec<Option<f64>> {
    let mut row_max: HashMap<usize, f64> = HashMap::new();
    pairs
        .iter()
        .map(|&(i, j)| {
            let v = aggregated.get(i, j);
            if v == 0.0 {
                return None;
            }
            match scoring {
                ScoringMode::Normalized => Some(v),
                ScoringMode::RawRescaled => {
                    let peak = *row_max.entry(i).or_insert_with(|| {
                        aggregated
                            .row_iter(i)
                            .filter(|&(k, _)| k != i)
                            .map(|(_, v)| v)
                            .fold(0.0, f64::max)
                    });
                    Some(v / peak)
                }
            }
        })
        .collect()
}

fn append_means(outcome: &mut ExperimentOutcome, config: &ExperimentConfig) {
    let mut groups: BTreeMap<(usize, Population), Vec<&EvaluationReport>> = BTreeMap::new();
    let order: HashMap<&str, usize> = config
        .methods
        .iter()
        .enumerate()
        .map(|(k, m)| (m.name(), k))
        .collect();
    for r in &outcome.reports {
        groups.entry((order[r.method.as_str()], r.population)).or_default().push(r);
    }
    let mut means = Vec::new();
    for rows in groups.values() {
        let n = rows.len() as f64;
        let mean = |f: &dyn Fn(&EvaluationReport) -> f64| rows.iter().map(|r| f(r)).sum::<f64>() / n;
        let post = if rows.iter().all(|r| r.post_sparsity.is_some()) {
            Some(mean(&|r| r.post_sparsity.unwrap()))
        } else {
            None
        };
        let first = rows[0];
        means.push(EvaluationReport {
            method: first.method.clone(),
            population: first.population,
            repetition: None,
            mae: mean(&|r| r.mae),
            rmse: mean(&|r| r.rmse),
            n_tested: mean(&|r| r.n_tested),
            n_predictable: mean(&|r| r.n_predictable),
            pre_sparsity: mean(&|r| r.pre_sparsity),
            post_sparsity: post,
            seed: config.seed,
            config_echo: first.config_echo.clone(),
        });
    }
    outcome.reports.extend(means);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain_records() -> Vec<TrustRecord> {
        vec![
            TrustRecord::new(0, 1, 1.0),
            TrustRecord::new(1, 2, 1.0),
            TrustRecord::new(0, 2, 1.0),
        ]
    }

    #[test]
    fn rga_scores_only_predicted_pairs() {
        let cfg = ExperimentConfig {
            methods: vec![Method::Rga],
            repetitions: 1,
            seed: 3,
            ..ExperimentConfig::default()
        };
        let out = run_experiment(&chain_records(), 3, &cfg).unwrap();
        let split = split_half(&chain_records(), 3).unwrap();
        let row = out
            .reports
            .iter()
            .find(|r| r.population == Population::AllUsers && r.repetition == Some(0));
        let predictable = {
            let p = SparseTrustMatrix::from_records(&split.predict_set, 3).unwrap();
            let r = run_rga(&p, &RgaConfig::default()).unwrap();
            split
                .test_set
                .iter()
                .filter(|t| r.aggregated.get(t.trustor, t.trustee) != 0.0)
                .count()
        };
        match row {
            Some(row) => {
                assert_eq!(row.n_tested, split.test_set.len() as f64);
                assert_eq!(row.n_predictable, predictable as f64);
            }
            None => assert_eq!(predictable, 0),
        }
    }

    #[test]
    fn repetitions_are_averaged() {
        let records: Vec<TrustRecord> = (0..60)
            .map(|k| TrustRecord::new(k % 12, (k / 12 * 5 + k + 1) % 12, 0.2 + 0.1 * (k % 8) as f64))
            .filter(|r| r.trustor != r.trustee)
            .collect();
        let cfg = ExperimentConfig {
            methods: vec![Method::Rga, Method::Baseline(BaselineConfig::guha())],
            repetitions: 3,
            ..ExperimentConfig::default()
        };
        let out = run_experiment(&records, 12, &cfg).unwrap();
        for method in ["rga", "guha_propagation"] {
            let reps: Vec<_> = out
                .reports
                .iter()
                .filter(|r| r.method == method && r.population == Population::AllUsers && r.repetition.is_some())
                .collect();
            let mean = out
                .reports
                .iter()
                .find(|r| r.method == method && r.population == Population::AllUsers && r.repetition.is_none())
                .unwrap();
            assert_eq!(reps.len(), 3);
            let avg = reps.iter().map(|r| r.mae).sum::<f64>() / 3.0;
            assert!((mean.mae - avg).abs() < 1e-15);
            assert!(mean.rmse >= mean.mae);
        }
    }

    #[test]
    fn deterministic() {
        let records: Vec<TrustRecord> = (0..40)
            .map(|k| TrustRecord::new(k % 9, (k / 9 * 2 + k + 1) % 9, 0.1 + 0.1 * (k % 9) as f64))
            .filter(|r| r.trustor != r.trustee)
            .collect();
        let cfg = ExperimentConfig::default();
        let a = run_experiment(&records, 9, &cfg).unwrap();
        let b = run_experiment(&records, 9, &cfg).unwrap();
        assert_eq!(a.reports, b.reports);
        assert_eq!(a.failures, b.failures);
    }

    #[test]
    fn normalized_value_matches_softmax_entry() {
        // row with diagonal 1 and one stored 0.5; held-out 0.8
        let d = 1f64.exp() + 0.5f64.exp();
        let v = normalized_value(0.8, d);
        assert!((v - 0.8f64.exp() / (d + 0.8f64.exp())).abs() < 1e-15);
    }
}
