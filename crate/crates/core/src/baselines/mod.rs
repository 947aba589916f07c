//! Comparison trust metrics: MoleTrust, Guha et al.'s propagation operators
//! and TidalTrust.

mod guha;
mod mole_trust;
mod tidal_trust;

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

pub use guha::{guha_operator, guha_propagation};
pub use mole_trust::mole_trust;
pub use tidal_trust::{tidal_trust, TidalSearch};

use crate::error::{Error, Result};
use crate::matrix::SparseTrustMatrix;

pub const DEFAULT_GUHA_ALPHAS: [f64; 4] = [0.4, 0.4, 0.1, 0.1];
pub const DEFAULT_TIDAL_MAX: f64 = 0.008;
pub const DEFAULT_MOLE_THRESHOLD: f64 = 0.6;

#[derive(Debug, Clone, PartialEq)]
pub enum BaselineConfig {
    MoleTrust {
        /// Maximum propagation distance. `None` defers to the propagation
        /// depth reached by the roundtable run on the same data.
        mpd: Option<usize>,
        trust_threshold: f64,
    },
    GuhaPropagation {
        alphas: [f64; 4],
        steps: usize,
    },
    TidalTrust {
        max_threshold: f64,
    },
}

impl BaselineConfig {
    pub fn mole_trust() -> Self {
        BaselineConfig::MoleTrust {
            mpd: None,
            trust_threshold: DEFAULT_MOLE_THRESHOLD,
        }
    }

    pub fn guha() -> Self {
        BaselineConfig::GuhaPropagation {
            alphas: DEFAULT_GUHA_ALPHAS,
            steps: 1,
        }
    }

    pub fn tidal_trust() -> Self {
        BaselineConfig::TidalTrust {
            max_threshold: DEFAULT_TIDAL_MAX,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            BaselineConfig::MoleTrust { .. } => "mole_trust",
            BaselineConfig::GuhaPropagation { .. } => "guha_propagation",
            BaselineConfig::TidalTrust { .. } => "tidal_trust",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            BaselineConfig::MoleTrust {
                mpd,
                trust_threshold,
            } => {
                if mpd == Some(0) {
                    return Err(Error::InvalidParameter("mpd must be at least 1".into()));
                }
                if !trust_threshold.is_finite() {
                    return Err(Error::InvalidParameter("trust_threshold must be finite".into()));
                }
            }
            BaselineConfig::GuhaPropagation { alphas, steps } => {
                check_alphas(&alphas)?;
                if steps == 0 {
                    return Err(Error::InvalidParameter("steps must be at least 1".into()));
                }
            }
            BaselineConfig::TidalTrust { max_threshold } => {
                if !max_threshold.is_finite() {
                    return Err(Error::InvalidParameter("max threshold must be finite".into()));
                }
            }
        }
        Ok(())
    }

    /// Predicts each `(source, target)` pair from the trust statements in `s`.
    ///
    /// `fallback_mpd` fills in an unset MoleTrust horizon.
    pub fn predict_pairs(
        &self,
        s: &SparseTrustMatrix,
        pairs: &[(usize, usize)],
        fallback_mpd: usize,
    ) -> Result<Vec<Option<f64>>> {
        self.validate()?;
        let m = s.dim();
        if let Some(&(a, b)) = pairs.iter().find(|&&(a, b)| a >= m || b >= m) {
            return Err(Error::EntityOutOfRange { id: a.max(b), m });
        }
        match *self {
            BaselineConfig::GuhaPropagation { alphas, steps } => {
                let belief = guha_propagation(s, alphas, steps)?;
                Ok(pairs
                    .iter()
                    .map(|&(i, j)| Some(belief.get(i, j)).filter(|v| *v != 0.0))
                    .collect())
            }
            BaselineConfig::MoleTrust {
                mpd,
                trust_threshold,
            } => {
                let horizon = mpd.unwrap_or(fallback_mpd).max(1);
                per_source(pairs, |source, targets| {
                    let reach = mole_trust(s, source, horizon, trust_threshold)?;
                    Ok(targets.iter().map(|t| reach.get(t).copied()).collect())
                })
            }
            BaselineConfig::TidalTrust { max_threshold } => {
                let reverse = s.transpose();
                per_source(pairs, |source, targets| {
                    let search = TidalSearch::new(s, &reverse, source)?;
                    Ok(targets.iter().map(|&t| search.rate(t, max_threshold)).collect())
                })
            }
        }
    }
}

impl fmt::Display for BaselineConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaselineConfig::MoleTrust {
                mpd,
                trust_threshold,
            } => {
                let mpd = mpd.map_or_else(|| "auto".to_string(), |d| d.to_string());
                write!(f, "mole_trust:mpd={mpd},threshold={trust_threshold}")
            }
            BaselineConfig::GuhaPropagation { alphas, steps } => write!(
                f,
                "guha_propagation:alphas={}/{}/{}/{},steps={steps}",
                alphas[0], alphas[1], alphas[2], alphas[3]
            ),
            BaselineConfig::TidalTrust { max_threshold } => {
                write!(f, "tidal_trust:max={max_threshold}")
            }
        }
    }
}

pub(crate) fn check_alphas(alphas: &[f64; 4]) -> Result<()> {
    if alphas.iter().any(|a| !(*a >= 0.0) || !a.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "propagation weights must be finite and non-negative, got {alphas:?}"
        )));
    }
    Ok(())
}

/// Groups pairs by source, evaluates each source in parallel and scatters the
/// answers back into input order.
fn per_source<F>(pairs: &[(usize, usize)], eval: F) -> Result<Vec<Option<f64>>>
where
    F: Fn(usize, &[usize]) -> Result<Vec<Option<f64>>> + Sync,
{
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (slot, &(source, _)) in pairs.iter().enumerate() {
        groups.entry(source).or_default().push(slot);
    }
    let groups: Vec<(usize, Vec<usize>)> = groups.into_iter().collect();
    let answers = groups
        .par_iter()
        .map(|(source, slots)| {
            let targets: Vec<usize> = slots.iter().map(|&s| pairs[s].1).collect();
            eval(*source, &targets)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut out = vec![None; pairs.len()];
    for ((_, slots), values) in groups.iter().zip(answers) {
        for (&slot, v) in slots.iter().zip(values) {
            out[slot] = v;
        }
    }
    Ok(out)
}
