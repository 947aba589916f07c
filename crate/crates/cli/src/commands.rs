use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rga_core::dataset::{dataset_stats, format_value, load_ternary, write_ternary, TernaryDataset};
use rga_core::eval::{run_experiment, sparsify, write_reports_csv, Method};
use rga_core::{run_rga_with_progress, SparseTrustMatrix};

use crate::config::RunConfig;

fn create_out_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn write_manifest(cfg: &RunConfig, command: &str, methods: &[Method]) -> Result<PathBuf> {
    let path = cfg.out_dir.join("manifest.txt");
    write_file(&path, cfg.to_manifest(command, methods).to_string().as_bytes())?;
    Ok(path)
}

fn csv_bytes(header: &[&str], rows: &[Vec<String>]) -> Vec<u8> {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out.into_bytes()
}

fn load(cfg: &RunConfig, path: &Path) -> Result<TernaryDataset> {
    let data = load_ternary(path, &cfg.load_options()).with_context(|| format!("loading {}", path.display()))?;
    if !data.malformed.is_empty() {
        eprintln!(
            "warning: {}: skipped {} malformed line(s), first at line {}: {}",
            path.display(),
            data.malformed.len(),
            data.malformed[0].line,
            data.malformed[0].reason
        );
    }
    Ok(data)
}

fn matrix_of(data: &TernaryDataset) -> Result<SparseTrustMatrix> {
    Ok(SparseTrustMatrix::from_records(&data.records, data.m)?)
}

pub fn stats(cfg: &RunConfig) -> Result<()> {
    if cfg.inputs.is_empty() {
        bail!("no input file; pass --input or set `input` in the config file");
    }
    let mut rows = Vec::new();
    for path in &cfg.inputs {
        let data = load(cfg, path)?;
        let users = match cfg.n_items {
            // user-item files: rows are the distinct raters
            Some(_) => {
                let mut raters: Vec<usize> = data.records.iter().map(|r| r.trustor).collect();
                raters.sort_unstable();
                raters.dedup();
                raters.len()
            }
            None => data.m,
        };
        let s = dataset_stats(&data.records, users, cfg.n_items);
        println!(
            "{}: users {}, items {}, trust edges {}, sparsity {}%, mean friends per user {}",
            path.display(),
            s.num_users,
            s.num_items.map_or_else(|| "-".to_string(), |n| n.to_string()),
            s.num_trust_edges,
            format_value(s.sparsity_degree * 100.0),
            format_value(s.mean_friends_per_user),
        );
        rows.push(vec![
            path.display().to_string(),
            s.num_users.to_string(),
            s.num_items.map(|n| n.to_string()).unwrap_or_default(),
            s.num_trust_edges.to_string(),
            format_value(s.sparsity_degree),
            format_value(s.mean_friends_per_user),
            data.malformed.len().to_string(),
        ]);
    }
    create_out_dir(&cfg.out_dir)?;
    write_file(
        &cfg.out_dir.join("stats.csv"),
        &csv_bytes(
            &[
                "input",
                "num_users",
                "num_items",
                "num_trust_edges",
                "sparsity_degree",
                "mean_friends_per_user",
                "malformed_lines",
            ],
            &rows,
        ),
    )?;
    write_manifest(cfg, "stats", &[])?;
    Ok(())
}

pub fn sparsify_cmd(cfg: &RunConfig) -> Result<()> {
    let Some(target) = cfg.target_degree else {
        bail!("sparsify needs --target-degree");
    };
    let data = load(cfg, cfg.input()?)?;
    let matrix = matrix_of(&data)?;
    let thinned = sparsify(&matrix, target, cfg.seed)?;
    eprintln!(
        "sparsify: {} -> {} entries, degree {}% -> {}% (target {}%)",
        matrix.nnz(),
        thinned.matrix.nnz(),
        format_value(thinned.before_degree * 100.0),
        format_value(thinned.achieved_degree * 100.0),
        format_value(target * 100.0),
    );

    create_out_dir(&cfg.out_dir)?;
    let records = thinned.matrix.to_records();
    write_ternary(&records, cfg.out_dir.join("sparsified.tsv"), cfg.delimiter, Some(&data.ids))?;
    write_file(
        &cfg.out_dir.join("sparsify.csv"),
        &csv_bytes(
            &[
                "target_degree",
                "before_degree",
                "achieved_degree",
                "keep_probability",
                "nnz_before",
                "nnz_after",
                "dim",
                "seed",
            ],
            &[vec![
                format_value(target),
                format_value(thinned.before_degree),
                format_value(thinned.achieved_degree),
                format_value(thinned.keep_probability),
                matrix.nnz().to_string(),
                thinned.matrix.nnz().to_string(),
                matrix.dim().to_string(),
                cfg.seed.to_string(),
            ]],
        ),
    )?;
    write_manifest(cfg, "sparsify", &[])?;
    Ok(())
}

pub fn mine(cfg: &RunConfig) -> Result<()> {
    let data = load(cfg, cfg.input()?)?;
    let matrix = matrix_of(&data)?;
    let result = run_rga_with_progress(&matrix, &cfg.rga(), |depth, nnz| {
        eprintln!("depth {depth}: nnz {nnz}");
    })?;

    let pre = matrix.sparsity_degree();
    let post = result.aggregated.sparsity_degree();
    let mined_pairs = result
        .aggregated
        .records()
        .filter(|r| r.trustor != r.trustee && !matrix.contains(r.trustor, r.trustee))
        .count();
    eprintln!(
        "mine: depth {}, {}, sparsity {}% -> {}% (residual {}%), {} new pairs",
        result.depth,
        if result.converged { "converged" } else { "stopped at max depth" },
        format_value(pre * 100.0),
        format_value(post * 100.0),
        format_value((post - pre).abs() * 100.0),
        mined_pairs,
    );

    create_out_dir(&cfg.out_dir)?;
    write_ternary(
        &result.aggregated.to_records(),
        cfg.out_dir.join("mined.tsv"),
        cfg.delimiter,
        Some(&data.ids),
    )?;
    let history: Vec<Vec<String>> = result
        .nnz_history
        .iter()
        .enumerate()
        .map(|(d, n)| vec![d.to_string(), n.to_string()])
        .collect();
    write_file(&cfg.out_dir.join("nnz_history.csv"), &csv_bytes(&["depth", "nnz"], &history))?;
    write_file(
        &cfg.out_dir.join("mine.csv"),
        &csv_bytes(
            &[
                "dim",
                "nnz_before",
                "nnz_after",
                "pre_sparsity",
                "post_sparsity",
                "residual",
                "mined_pairs",
                "depth",
                "converged",
            ],
            &[vec![
                matrix.dim().to_string(),
                matrix.nnz().to_string(),
                result.aggregated.nnz().to_string(),
                format_value(pre),
                format_value(post),
                format_value((post - pre).abs()),
                mined_pairs.to_string(),
                result.depth.to_string(),
                result.converged.to_string(),
            ]],
        ),
    )?;
    write_manifest(cfg, "mine", &[])?;
    Ok(())
}

/// `evaluate` defaults to RGA alone, `compare` to every method.
pub fn evaluate(cfg: &RunConfig, command: &str, default_methods: Vec<Method>) -> Result<()> {
    let data = load(cfg, cfg.input()?)?;
    let experiment = cfg.experiment(default_methods);
    let outcome = run_experiment(&data.records, data.m, &experiment)?;
    for f in &outcome.failures {
        eprintln!("warning: {} (repetition {}): {}", f.method, f.repetition, f.message);
    }
    for r in outcome.reports.iter().filter(|r| r.repetition.is_none()) {
        eprintln!(
            "{:<18} {:<10} mae {:<14} rmse {:<14} predicted {}/{}",
            r.method,
            r.population.as_str(),
            format_value(r.mae),
            format_value(r.rmse),
            format_value(r.n_predictable),
            format_value(r.n_tested),
        );
    }

    create_out_dir(&cfg.out_dir)?;
    let mut report = Vec::new();
    write_reports_csv(&outcome.reports, &mut report)?;
    write_file(&cfg.out_dir.join("report.csv"), &report)?;

    let mut failures = Vec::new();
    writeln!(failures, "method,repetition,message")?;
    for f in &outcome.failures {
        writeln!(failures, "{},{},\"{}\"", f.method, f.repetition, f.message.replace('"', "\"\""))?;
    }
    write_file(&cfg.out_dir.join("failures.csv"), &failures)?;
    write_manifest(cfg, command, &experiment.methods)?;
    Ok(())
}
