//! Effective run configuration: built-in defaults, overridden by a key-value
//! config file, overridden by command-line flags. The merged result is what
//! gets written to each run's manifest.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::Args;
use rga_core::baselines::BaselineConfig;
use rga_core::dataset::{Delimiter, LoadOptions};
use rga_core::eval::{ExperimentConfig, Manifest, Method, ScoringMode, DEFAULT_COLD_START_THRESHOLD};
use rga_core::{Aggregation, RgaConfig};

/// Flags shared by every subcommand. Each maps onto a config-file key of the
/// same name.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Ternary trust file: trustor, trustee, value per line; `stats` takes several
    #[arg(long = "input")]
    pub inputs: Vec<PathBuf>,
    /// Field separator: tab, comma, space, whitespace or a single character
    #[arg(long)]
    pub delimiter: Option<String>,
    /// Raw values are divided by this to land in [0, 1]
    #[arg(long = "value-scale")]
    pub value_scale: Option<f64>,
    /// Input has a header row
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub header: Option<bool>,
    /// Treat every edge as undirected (adds the reverse edge)
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub symmetric: Option<bool>,
    /// Item count, for user-item rating files in `stats`
    #[arg(long = "n-items")]
    pub n_items: Option<usize>,
    /// Stop once consecutive nonzero counts differ by less than this
    #[arg(long)]
    pub epsilon: Option<usize>,
    #[arg(long = "max-depth")]
    pub max_depth: Option<usize>,
    /// include-depth-0 or mine-only
    #[arg(long)]
    pub aggregation: Option<String>,
    /// Entries below this magnitude are dropped during propagation
    #[arg(long = "drop-tolerance")]
    pub drop_tolerance: Option<f64>,
    /// normalized or raw-rescaled
    #[arg(long)]
    pub scoring: Option<String>,
    /// Users with at most this many trust statements count as cold-start
    #[arg(long = "cs-threshold")]
    pub cs_threshold: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub repetitions: Option<usize>,
    /// Sparsity degree to thin to, as a fraction or with a % suffix
    #[arg(long = "target-degree")]
    pub target_degree: Option<String>,
    /// Method with optional parameters, e.g. `tidal_trust:max=0.008`; repeatable
    #[arg(long = "method")]
    pub methods: Vec<String>,
    #[arg(long = "out-dir")]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub inputs: Vec<PathBuf>,
    pub delimiter: Delimiter,
    pub value_scale: f64,
    pub header: bool,
    pub symmetric: bool,
    pub n_items: Option<usize>,
    pub epsilon: usize,
    pub max_depth: usize,
    pub aggregation: Aggregation,
    pub drop_tolerance: f64,
    pub scoring: ScoringMode,
    pub cs_threshold: usize,
    pub seed: u64,
    pub repetitions: usize,
    pub target_degree: Option<f64>,
    /// Empty means the subcommand's default method set.
    pub methods: Vec<Method>,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        let rga = RgaConfig::default();
        Self {
            inputs: Vec::new(),
            delimiter: Delimiter::default(),
            value_scale: 1.0,
            header: false,
            symmetric: false,
            n_items: None,
            epsilon: rga.epsilon,
            max_depth: rga.max_depth,
            aggregation: rga.aggregation,
            drop_tolerance: rga.drop_tolerance,
            scoring: ScoringMode::Normalized,
            cs_threshold: DEFAULT_COLD_START_THRESHOLD,
            seed: 0,
            repetitions: 5,
            target_degree: None,
            methods: Vec::new(),
            out_dir: PathBuf::from("rga-out"),
        }
    }
}

/// `0.018%` or `0.00018`.
pub fn parse_degree(text: &str) -> Result<f64> {
    let text = text.trim();
    let value = match text.strip_suffix('%') {
        Some(pct) => pct.trim().parse::<f64>().map(|v| v / 100.0),
        None => text.parse::<f64>(),
    }
    .with_context(|| format!("invalid sparsity degree {text:?}"))?;
    if !(0.0..=1.0).contains(&value) {
        bail!("sparsity degree {text} is outside [0, 1]");
    }
    Ok(value)
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => bail!("{key}: expected true or false, got {v:?}"),
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    v.parse::<T>().map_err(|e| anyhow!("{key}: {e} ({v:?})"))
}

/// `name[:key=value,key=value]`.
pub fn parse_method(spec: &str) -> Result<Method> {
    let (name, params) = match spec.split_once(':') {
        Some((n, p)) => (n.trim(), p.trim()),
        None => (spec.trim(), ""),
    };
    let mut pairs = Vec::new();
    for item in params.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| anyhow!("method {name}: expected key=value, got {item:?}"))?;
        pairs.push((k.trim(), v.trim()));
    }
    let unknown = |k: &str| anyhow!("method {name}: unknown parameter {k:?}");

    let method = match name {
        "rga" => {
            if let Some((k, _)) = pairs.first() {
                return Err(unknown(k));
            }
            Method::Rga
        }
        "mole_trust" | "mt" => {
            let mut mpd = None;
            let mut trust_threshold = rga_core::baselines::DEFAULT_MOLE_THRESHOLD;
            for (k, v) in pairs {
                match k {
                    "mpd" if v == "auto" => mpd = None,
                    "mpd" => mpd = Some(parse_num(k, v)?),
                    "threshold" => trust_threshold = parse_num(k, v)?,
                    _ => return Err(unknown(k)),
                }
            }
            Method::Baseline(BaselineConfig::MoleTrust { mpd, trust_threshold })
        }
        "guha_propagation" | "guha" | "pt" => {
            let mut alphas = rga_core::baselines::DEFAULT_GUHA_ALPHAS;
            let mut steps = 1;
            for (k, v) in pairs {
                match k {
                    "alphas" => {
                        let parts: Vec<f64> = v
                            .split('/')
                            .map(|p| parse_num::<f64>(k, p.trim()))
                            .collect::<Result<_>>()?;
                        alphas = parts
                            .try_into()
                            .map_err(|_| anyhow!("alphas: expected four values separated by '/'"))?;
                    }
                    "steps" => steps = parse_num(k, v)?,
                    _ => return Err(unknown(k)),
                }
            }
            Method::Baseline(BaselineConfig::GuhaPropagation { alphas, steps })
        }
        "tidal_trust" | "tt" => {
            let mut max_threshold = rga_core::baselines::DEFAULT_TIDAL_MAX;
            for (k, v) in pairs {
                match k {
                    "max" => max_threshold = parse_num(k, v)?,
                    _ => return Err(unknown(k)),
                }
            }
            Method::Baseline(BaselineConfig::TidalTrust { max_threshold })
        }
        other => bail!("unknown method {other:?}"),
    };
    if let Method::Baseline(b) = &method {
        b.validate()?;
    }
    Ok(method)
}

impl RunConfig {
    /// Applies the keys of a config file or manifest. Unknown keys are errors;
    /// `command` is informational and ignored.
    pub fn apply_manifest(&mut self, m: &Manifest) -> Result<()> {
        let mut methods_seen = false;
        let mut inputs_seen = false;
        for key in m.keys() {
            let v = m.get(key).unwrap_or_default();
            match key {
                "command" => {}
                "input" => inputs_seen = true,
                "delimiter" => self.delimiter = v.parse()?,
                "value-scale" => self.value_scale = parse_num(key, v)?,
                "header" => self.header = parse_bool(key, v)?,
                "symmetric" => self.symmetric = parse_bool(key, v)?,
                "n-items" => self.n_items = if v.is_empty() { None } else { Some(parse_num(key, v)?) },
                "epsilon" => self.epsilon = parse_num(key, v)?,
                "max-depth" => self.max_depth = parse_num(key, v)?,
                "aggregation" => self.aggregation = v.parse()?,
                "drop-tolerance" => self.drop_tolerance = parse_num(key, v)?,
                "scoring" => self.scoring = v.parse()?,
                "cs-threshold" => self.cs_threshold = parse_num(key, v)?,
                "seed" => self.seed = parse_num(key, v)?,
                "repetitions" => self.repetitions = parse_num(key, v)?,
                "target-degree" => self.target_degree = if v.is_empty() { None } else { Some(parse_degree(v)?) },
                "method" => methods_seen = true,
                "out-dir" => self.out_dir = PathBuf::from(v),
                other => bail!("unknown configuration key {other:?}"),
            }
        }
        if inputs_seen {
            self.inputs = m.get_all("input").iter().filter(|s| !s.is_empty()).map(PathBuf::from).collect();
        }
        if methods_seen {
            self.methods = m.get_all("method").iter().map(|s| parse_method(s)).collect::<Result<_>>()?;
        }
        Ok(())
    }

    pub fn apply_flags(&mut self, f: &Flags) -> Result<()> {
        if !f.inputs.is_empty() {
            self.inputs = f.inputs.clone();
        }
        if let Some(v) = &f.delimiter {
            self.delimiter = v.parse()?;
        }
        if let Some(v) = f.value_scale {
            self.value_scale = v;
        }
        if let Some(v) = f.header {
            self.header = v;
        }
        if let Some(v) = f.symmetric {
            self.symmetric = v;
        }
        if let Some(v) = f.n_items {
            self.n_items = Some(v);
        }
        if let Some(v) = f.epsilon {
            self.epsilon = v;
        }
        if let Some(v) = f.max_depth {
            self.max_depth = v;
        }
        if let Some(v) = &f.aggregation {
            self.aggregation = v.parse()?;
        }
        if let Some(v) = f.drop_tolerance {
            self.drop_tolerance = v;
        }
        if let Some(v) = &f.scoring {
            self.scoring = v.parse()?;
        }
        if let Some(v) = f.cs_threshold {
            self.cs_threshold = v;
        }
        if let Some(v) = f.seed {
            self.seed = v;
        }
        if let Some(v) = f.repetitions {
            self.repetitions = v;
        }
        if let Some(v) = &f.target_degree {
            self.target_degree = Some(parse_degree(v)?);
        }
        if !f.methods.is_empty() {
            self.methods = f.methods.iter().map(|s| parse_method(s)).collect::<Result<_>>()?;
        }
        if let Some(v) = &f.out_dir {
            self.out_dir = v.clone();
        }
        Ok(())
    }

    /// Defaults, then the config file (if any), then flags.
    pub fn resolve(config_file: Option<&Path>, flags: &Flags) -> Result<Self> {
        let mut cfg = RunConfig::default();
        if let Some(path) = config_file {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config file {}", path.display()))?;
            let manifest = Manifest::parse(&text)?;
            cfg.apply_manifest(&manifest)
                .with_context(|| format!("in config file {}", path.display()))?;
        }
        cfg.apply_flags(flags)?;
        Ok(cfg)
    }

    /// The single input of commands that read one file.
    pub fn input(&self) -> Result<&Path> {
        match self.inputs.as_slice() {
            [one] => Ok(one),
            [] => bail!("no input file; pass --input or set `input` in the config file"),
            _ => bail!("this command reads exactly one --input, got {}", self.inputs.len()),
        }
    }

    pub fn load_options(&self) -> LoadOptions {
        LoadOptions {
            delimiter: self.delimiter,
            value_scale: self.value_scale,
            header: self.header,
            symmetric: self.symmetric,
            ..LoadOptions::default()
        }
    }

    pub fn rga(&self) -> RgaConfig {
        RgaConfig {
            epsilon: self.epsilon,
            max_depth: self.max_depth,
            aggregation: self.aggregation,
            drop_tolerance: self.drop_tolerance,
            retain_depths: false,
        }
    }

    pub fn experiment(&self, default_methods: Vec<Method>) -> ExperimentConfig {
        ExperimentConfig {
            rga: self.rga(),
            methods: if self.methods.is_empty() {
                default_methods
            } else {
                self.methods.clone()
            },
            scoring: self.scoring,
            cold_start_threshold: self.cs_threshold,
            seed: self.seed,
            repetitions: self.repetitions,
        }
    }

    /// Every effective setting, in config-file syntax.
    pub fn to_manifest(&self, command: &str, methods: &[Method]) -> Manifest {
        let mut m = Manifest::new();
        m.set("command", command);
        for input in &self.inputs {
            m.push("input", input.display());
        }
        m.set("delimiter", self.delimiter)
            .set("value-scale", self.value_scale)
            .set("header", self.header)
            .set("symmetric", self.symmetric)
            .set("n-items", self.n_items.map(|n| n.to_string()).unwrap_or_default())
            .set("epsilon", self.epsilon)
            .set("max-depth", self.max_depth)
            .set("aggregation", self.aggregation.as_str())
            .set("drop-tolerance", self.drop_tolerance)
            .set("scoring", self.scoring.as_str())
            .set("cs-threshold", self.cs_threshold)
            .set("seed", self.seed)
            .set("repetitions", self.repetitions)
            .set("target-degree", self.target_degree.map(|t| t.to_string()).unwrap_or_default())
            .set("out-dir", self.out_dir.display());
        for method in methods {
            m.push("method", method);
        }
        m
    }
}
