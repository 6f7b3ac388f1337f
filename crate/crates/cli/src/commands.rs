use std::fs;
use std::path::{Path, PathBuf};

use axiometer::format::write_election;
use axiometer::report::{display_table, report_json, write_metric_rows, write_rankings, MetricRow};
use axiometer::rules::rules_by_name;
use axiometer::stats::{
    aggregate_corpus, bootstrap_metric, pool_intervals, write_intervals, write_pooled, write_summaries,
    BootstrapConfig, GroupField, IntervalEstimate, Metric,
};
use axiometer::synth::{
    replicate, run_bt_experiment, score_replicate, shared_strengths, write_bt_rows, BtConfig, BtRow, Sampler,
    StrengthMode,
};
use axiometer::{evaluate_all, parse_election_auto, DynRule, ExactElection, Rational, Scalar};
use log::{info, warn};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::failure::Failure;
use crate::manifest::{sidecar, write_file, RunManifest};
use crate::{
    AnalyzeArgs, BootstrapArgs, BtArgs, BtExperimentArgs, GenerateArgs, Global, OutputFormat, SamplerArg, SweepArgs,
};

type Rules = Vec<DynRule<Rational>>;

fn load(path: &Path, id: String, seats: Option<usize>) -> Result<ExactElection, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    let mut e: ExactElection =
        parse_election_auto(&text).map_err(|e| Failure::from_core(&path.display().to_string(), &e))?;
    e.id = id;
    if seats.is_some() {
        e.seats = seats;
    }
    Ok(e)
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn rules_for(g: &Global, seats: Option<usize>, context: &str) -> Result<Rules, Failure> {
    let rules = rules_by_name::<Rational>(&g.rules, seats).map_err(|e| Failure::from_core(context, &e))?;
    if rules.is_empty() {
        return Err(Failure::Config("--rules is empty".into()));
    }
    Ok(rules)
}

fn rule_names(g: &Global) -> Vec<String> {
    g.rules
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

fn csv_bytes<F>(write: F) -> Result<Vec<u8>, Failure>
where
    F: FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
{
    let mut buf = Vec::new();
    write(&mut buf).map_err(|e| Failure::Other(e.to_string()))?;
    Ok(buf)
}

fn json_bytes<T: serde::Serialize>(value: &T) -> Result<Vec<u8>, Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::Other(e.to_string()))?;
    text.push('\n');
    Ok(text.into_bytes())
}

/// `metrics.csv` -> `metrics.rankings.csv`.
fn rankings_path(out: &Path) -> PathBuf {
    let ext = out
        .extension()
        .map(|e| e.to_string_lossy().into_owned())
        .unwrap_or_else(|| "csv".into());
    out.with_extension(format!("rankings.{ext}"))
}

pub fn analyze(g: &Global, a: &AnalyzeArgs) -> Result<(), Failure> {
    let path = a.profile.display().to_string();
    let e = load(&a.profile, stem(&a.profile), a.seats)?;
    let rules = rules_for(g, e.seats, &path)?;
    let reports = evaluate_all(&rules, &e.profile).map_err(|err| Failure::from_core(&path, &err))?;
    let p = &e.profile;

    let json_doc = || -> Value { reports.iter().map(|r| report_json(&e.id, p, e.seats, r)).collect() };
    let Some(out) = &a.out else {
        match g.format {
            OutputFormat::Csv => print!("{}", display_table(p, &reports)),
            OutputFormat::Json => print!("{}", String::from_utf8_lossy(&json_bytes(&json_doc())?)),
        }
        return Ok(());
    };

    let mut manifest = RunManifest::new(
        "analyze",
        rule_names(g),
        g.seed,
        json!({ "seats": e.seats, "format": format!("{:?}", g.format).to_lowercase() }),
    );
    manifest.input(&a.profile)?;
    match g.format {
        OutputFormat::Csv => {
            let rows: Vec<MetricRow> = reports.iter().map(|r| MetricRow::new(&e.id, p, e.seats, r)).collect();
            write_file(out, &csv_bytes(|b| write_metric_rows(&rows, b))?)?;
            let ranks = rankings_path(out);
            write_file(&ranks, &csv_bytes(|b| write_rankings(&e.id, p, &reports, b))?)?;
            manifest.output(out)?;
            manifest.output(&ranks)?;
        }
        OutputFormat::Json => {
            write_file(out, &json_bytes(&json_doc())?)?;
            manifest.output(out)?;
        }
    }
    manifest.write(&sidecar(out))?;
    print!("{}", display_table(p, &reports));
    Ok(())
}

/// Every `*.csv` under `dir`, sorted.
fn corpus_files(dir: &Path) -> Result<Vec<PathBuf>, Failure> {
    fn walk(dir: &Path, out: &mut Vec<PathBuf>) -> std::io::Result<()> {
        for entry in fs::read_dir(dir)? {
            let path = entry?.path();
            if path.is_dir() {
                walk(&path, out)?;
            } else if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
                out.push(path);
            }
        }
        Ok(())
    }
    let mut files = Vec::new();
    walk(dir, &mut files).map_err(|e| Failure::io(dir, e))?;
    files.sort();
    Ok(files)
}

/// Relative path without extension, `/`-separated.
fn election_id(root: &Path, path: &Path) -> String {
    let rel = path.strip_prefix(root).unwrap_or(path).with_extension("");
    rel.components()
        .map(|c| c.as_os_str().to_string_lossy())
        .collect::<Vec<_>>()
        .join("/")
}

struct Scored {
    id: String,
    rows: Vec<MetricRow>,
    json: Vec<Value>,
}

fn score_file(g: &Global, root: &Path, path: &Path, seats: Option<usize>) -> Result<Scored, Failure> {
    let id = election_id(root, path);
    let context = path.display().to_string();
    let mut e = load(path, id, None)?;
    e.seats = e.seats.or(seats);
    let rules = rules_for(g, e.seats, &context)?;
    let reports = evaluate_all(&rules, &e.profile).map_err(|err| Failure::from_core(&context, &err))?;
    Ok(Scored {
        rows: reports
            .iter()
            .map(|r| MetricRow::new(&e.id, &e.profile, e.seats, r))
            .collect(),
        json: reports
            .iter()
            .map(|r| report_json(&e.id, &e.profile, e.seats, r))
            .collect(),
        id: e.id,
    })
}

pub fn sweep(g: &Global, a: &SweepArgs) -> Result<(), Failure> {
    let group_by = a
        .group_by
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<GroupField>()
                .map_err(|e| Failure::from_core("--group-by", &e))
        })
        .collect::<Result<Vec<_>, _>>()?;
    // catch a bad rule list before touching the corpus
    rules_for(g, Some(1), "--rules")?;
    let files = corpus_files(&a.dir)?;
    let results: Vec<(PathBuf, Result<Scored, Failure>)> = files
        .par_iter()
        .map(|path| (path.clone(), score_file(g, &a.dir, path, a.seats)))
        .collect();

    let mut scored = Vec::new();
    let mut failed = 0usize;
    for (path, r) in results {
        match r {
            Ok(s) => {
                info!("{}: {} rows", path.display(), s.rows.len());
                scored.push(s);
            }
            Err(f) => {
                warn!("{f}");
                failed += 1;
            }
        }
    }
    scored.sort_by(|x, y| x.id.cmp(&y.id));
    let rows: Vec<MetricRow> = scored.iter().flat_map(|s| s.rows.iter().cloned()).collect();
    eprintln!(
        "swept {} files: {} scored, {} failed, {} rows",
        files.len(),
        scored.len(),
        failed,
        rows.len()
    );
    if scored.is_empty() {
        return Err(Failure::EmptyCorpus(format!(
            "no election under {} could be scored",
            a.dir.display()
        )));
    }

    let mut manifest = RunManifest::new(
        "sweep",
        rule_names(g),
        g.seed,
        json!({ "default_seats": a.seats, "group_by": a.group_by, "files": files.len(), "scored": scored.len(), "failed": failed }),
    );
    for s in &scored {
        // inputs in id order
        let path = files
            .iter()
            .find(|p| election_id(&a.dir, p) == s.id)
            .expect("scored file is in the corpus");
        manifest.input(path)?;
    }
    match g.format {
        OutputFormat::Csv => write_file(&a.out, &csv_bytes(|b| write_metric_rows(&rows, b))?)?,
        OutputFormat::Json => {
            let all: Vec<&Value> = scored.iter().flat_map(|s| s.json.iter()).collect();
            write_file(&a.out, &json_bytes(&all)?)?
        }
    }
    manifest.output(&a.out)?;
    if let Some(summary) = &a.summary {
        let groups = aggregate_corpus(&rows, &group_by);
        write_file(summary, &csv_bytes(|b| write_summaries(&group_by, &groups, b))?)?;
        manifest.output(summary)?;
    }
    manifest.write(&sidecar(&a.out))
}

fn bt_config(g: &Global, m: usize, alpha: f64, bt: &BtArgs) -> Result<BtConfig, Failure> {
    let cfg = BtConfig {
        m,
        voters: bt.voters,
        alpha,
        seed: g.seed,
        profiles: bt.profiles,
        strengths: if bt.shared_strengths {
            StrengthMode::Shared
        } else {
            StrengthMode::Fresh
        },
        sampler: match bt.sampler {
            SamplerArg::Auto => Sampler::Auto,
            SamplerArg::Exact => Sampler::Exact,
            SamplerArg::Mcmc => Sampler::Mcmc,
        },
        burn_in: bt.burn_in,
        thin: bt.thin,
    };
    cfg.validate().map_err(|e| Failure::from_core("config", &e))?;
    if bt.profiles == 0 {
        return Err(Failure::Config("--profiles must be at least 1".into()));
    }
    Ok(cfg)
}

fn write_rows(format: OutputFormat, rows: &[BtRow], out: &Path) -> Result<(), Failure> {
    match format {
        OutputFormat::Csv => write_file(out, &csv_bytes(|b| write_bt_rows(rows, b))?),
        OutputFormat::Json => write_file(out, &json_bytes(&rows)?),
    }
}

pub fn generate(g: &Global, a: &GenerateArgs) -> Result<(), Failure> {
    let cfg = bt_config(g, a.m, a.alpha, &a.bt)?;
    let rules = rules_for(g, Some(a.bt.seats), "--rules")?;
    let core = |e: axiometer::Error| Failure::from_core("generate", &e);
    let shared = match cfg.strengths {
        StrengthMode::Shared => Some(shared_strengths(&cfg).map_err(core)?),
        StrengthMode::Fresh => None,
    };
    let replicates = (0..cfg.profiles)
        .into_par_iter()
        .map(|r| {
            let (s, p) = replicate::<Rational>(&cfg, r, shared.as_ref())?;
            let rows = score_replicate(&cfg, &rules, r, &p)?;
            let mut text = Vec::new();
            write_election(&p, Some(a.bt.seats), &mut text).expect("writing to memory");
            Ok((s, text, rows))
        })
        .collect::<axiometer::Result<Vec<_>>>()
        .map_err(core)?;

    let width = (cfg.profiles - 1).to_string().len().max(3);
    let mut manifest = RunManifest::new(
        "generate",
        rule_names(g),
        g.seed,
        json!({ "bt": cfg, "seats": a.bt.seats }),
    );
    let mut strengths = Vec::new();
    let mut rows = Vec::new();
    for (r, (s, text, mut scored)) in replicates.into_iter().enumerate() {
        let path = a.out.join("profiles").join(format!("bt_{r:0width$}.csv"));
        write_file(&path, &text)?;
        manifest.output(&path)?;
        strengths.push(s.as_slice().to_vec());
        rows.append(&mut scored);
    }
    let ext = if g.format == OutputFormat::Json { "json" } else { "csv" };
    let experiment = a.out.join(format!("experiment.{ext}"));
    write_rows(g.format, &rows, &experiment)?;
    manifest.output(&experiment)?;
    let strengths_path = a.out.join("strengths.json");
    write_file(&strengths_path, &json_bytes(&strengths)?)?;
    manifest.output(&strengths_path)?;
    manifest.write(&a.out.join("manifest.json"))?;
    eprintln!(
        "wrote {} profiles and {} experiment rows to {}",
        cfg.profiles,
        rows.len(),
        a.out.display()
    );
    Ok(())
}

pub fn bt_experiment(g: &Global, a: &BtExperimentArgs) -> Result<(), Failure> {
    let rules = rules_for(g, Some(a.bt.seats), "--rules")?;
    let mut configs = Vec::new();
    for &m in &a.m {
        for &alpha in &a.alpha {
            configs.push(bt_config(g, m, alpha, &a.bt)?);
        }
    }
    let mut rows = Vec::new();
    for cfg in &configs {
        info!("m = {}, alpha = {}", cfg.m, cfg.alpha);
        rows.extend(run_bt_experiment(cfg, &rules).map_err(|e| Failure::from_core("bt-experiment", &e))?);
    }
    let mut manifest = RunManifest::new(
        "bt-experiment",
        rule_names(g),
        g.seed,
        json!({ "grid": configs, "seats": a.bt.seats }),
    );
    write_rows(g.format, &rows, &a.out)?;
    manifest.output(&a.out)?;
    manifest.write(&sidecar(&a.out))
}

fn interval_json(id: &str, e: &IntervalEstimate<Rational>) -> Value {
    json!({
        "election_id": id,
        "rule": e.rule,
        "metric": e.metric.name(),
        "point": e.point.to_f64(),
        "mean": e.mean.to_f64(),
        "lo": e.lo.to_f64(),
        "hi": e.hi.to_f64(),
        "B": e.resamples,
        "confidence": e.confidence,
    })
}

pub fn bootstrap(g: &Global, a: &BootstrapArgs) -> Result<(), Failure> {
    let metrics = a
        .metrics
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<Metric>()
                .map_err(|e| Failure::from_core("--metrics", &e))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let cfg = BootstrapConfig {
        resamples: a.resamples,
        confidence: a.confidence,
        seed: g.seed,
    };
    cfg.validate().map_err(|e| Failure::from_core("config", &e))?;

    let mut manifest = RunManifest::new(
        "bootstrap",
        rule_names(g),
        g.seed,
        json!({ "bootstrap": cfg, "metrics": a.metrics, "seats": a.seats, "pooling": "per-election intervals, endpoints averaged within (candidates, seats, rule, metric)" }),
    );
    let mut rows = Vec::new();
    let mut pooled = Vec::new();
    for path in &a.profiles {
        let context = path.display().to_string();
        let e = load(path, stem(path), a.seats)?;
        manifest.input(path)?;
        let rules = rules_for(g, e.seats, &context)?;
        for rule in &rules {
            for &metric in &metrics {
                let est = bootstrap_metric(&e.profile, rule, metric, &cfg)
                    .map_err(|err| Failure::from_core(&context, &err))?;
                pooled.push((e.profile.m(), e.seats, est.clone()));
                rows.push((e.id.clone(), est));
            }
        }
    }
    match g.format {
        OutputFormat::Csv => write_file(&a.out, &csv_bytes(|b| write_intervals(&rows, b))?)?,
        OutputFormat::Json => {
            let doc: Vec<Value> = rows.iter().map(|(id, e)| interval_json(id, e)).collect();
            write_file(&a.out, &json_bytes(&doc)?)?
        }
    }
    manifest.output(&a.out)?;
    if let Some(path) = &a.pooled {
        write_file(path, &csv_bytes(|b| write_pooled(&pool_intervals(&pooled), b))?)?;
        manifest.output(path)?;
    }
    manifest.write(&sidecar(&a.out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_are_relative_paths_without_extension() {
        assert_eq!(
            election_id(Path::new("/c"), Path::new("/c/4_cands/ward.csv")),
            "4_cands/ward"
        );
    }

    #[test]
    fn rankings_file_sits_beside_the_metrics() {
        assert_eq!(rankings_path(Path::new("o/m.csv")), PathBuf::from("o/m.rankings.csv"));
        assert_eq!(rankings_path(Path::new("o/m")), PathBuf::from("o/m.rankings.csv"));
    }
}
