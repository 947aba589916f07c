//! CSV report rows and key-value run manifests.

use std::collections::BTreeMap;
use std::io::Write;

use crate::dataset::format_value;
use crate::error::{Error, Result};
use crate::eval::experiment::EvaluationReport;

pub const REPORT_COLUMNS: [&str; 10] = [
    "method",
    "population",
    "repetition",
    "mae",
    "rmse",
    "n_tested",
    "n_predictable",
    "pre_sparsity",
    "post_sparsity",
    "seed",
];

pub fn write_reports_csv<W: Write>(reports: &[EvaluationReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(REPORT_COLUMNS)?;
    for r in reports {
        w.write_record([
            r.method.clone(),
            r.population.as_str().to_string(),
            r.repetition.map_or_else(|| "mean".to_string(), |k| k.to_string()),
            r.mae.to_string(),
            r.rmse.to_string(),
            r.n_tested.to_string(),
            r.n_predictable.to_string(),
            format_value(r.pre_sparsity),
            r.post_sparsity.map(format_value).unwrap_or_default(),
            r.seed.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

/// Ordered `key = value` lines. Keys repeat for list-valued settings.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Manifest {
    entries: BTreeMap<String, Vec<String>>,
}

impl Manifest {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.entries.insert(key.to_string(), vec![value.to_string()]);
        self
    }

    pub fn push(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.entries.entry(key.to_string()).or_default().push(value.to_string());
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).and_then(|v| v.last()).map(String::as_str)
    }

    pub fn get_all(&self, key: &str) -> &[String] {
        self.entries.get(key).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Parses `key = value` lines; blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut m = Manifest::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::InvalidParameter(format!("manifest line {}: expected key = value", n + 1)));
            };
            m.push(k.trim(), v.trim());
        }
        Ok(m)
    }
}

impl std::fmt::Display for Manifest {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (k, values) in &self.entries {
            for v in values {
                writeln!(f, "{k} = {v}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::experiment::Population;

    #[test]
    fn csv_layout() {
        let r = EvaluationReport {
            method: "rga".into(),
            population: Population::ColdStart,
            repetition: None,
            mae: 0.25,
            rmse: 0.5,
            n_tested: 10.0,
            n_predictable: 8.0,
            pre_sparsity: 0.01,
            post_sparsity: None,
            seed: 9,
            config_echo: String::new(),
        };
        let mut buf = Vec::new();
        write_reports_csv(&[r], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "method,population,repetition,mae,rmse,n_tested,n_predictable,pre_sparsity,post_sparsity,seed\n\
             rga,cold_start,mean,0.25,0.5,10,8,0.01,,9\n"
        );
    }

    #[test]
    fn manifest_round_trip() {
        let mut m = Manifest::new();
        m.set("seed", 4).push("method", "rga").push("method", "tidal_trust:max=0.008");
        let text = m.to_string();
        assert_eq!(text, "method = rga\nmethod = tidal_trust:max=0.008\nseed = 4\n");
        let back = Manifest::parse(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.get_all("method").len(), 2);
        assert!(Manifest::parse("novalue\n").is_err());
    }
}
