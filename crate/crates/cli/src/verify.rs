use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::Result;
use clap::{Args, ValueEnum};
use gwtree::limits::{
    contour_limit_experiment, height_contour_gap_experiment, llt_experiment, lukasiewicz_marginal_experiment,
    progeny_asymptotics_experiment, ratio_vs_gamma_experiment, ContourConfig, GapConfig, LltConfig,
    MarginalConfig, ProgenyConfig, RatioConfig,
};
use gwtree::offspring::{FiniteVarianceLaw, OffspringLaw};
use gwtree::report::{ExperimentReport, SuiteReport};
use gwtree::sampler::Method;
use serde_json::Value;

use crate::common::{csv_file, output_path, resolve_seed, LawArgs};
use crate::sample::parse_method;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Llt,
    Progeny,
    Ratio,
    Contour,
    Gap,
    Marginal,
    All,
}

/// Runs verification experiments and writes a JSON report plus one CSV of
/// plot data per experiment next to it.
#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub suite: Suite,
    #[command(flatten)]
    pub law: LawArgs,
    /// Sizes for the multi-size suites; single-size suites use the last one.
    #[arg(long, value_delimiter = ',')]
    pub n_list: Option<Vec<usize>>,
    #[arg(long)]
    pub replicates: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = "rejection", value_parser = parse_method)]
    pub method: Method,
    /// Wall-clock budget in seconds for each sampling suite.
    #[arg(long)]
    pub time_budget: Option<f64>,
    #[arg(long, default_value = "report.json")]
    pub out: PathBuf,
}

fn suites(suite: Suite) -> Vec<Suite> {
    match suite {
        Suite::All => vec![Suite::Llt, Suite::Progeny, Suite::Ratio, Suite::Marginal, Suite::Gap, Suite::Contour],
        s => vec![s],
    }
}

fn skipped(name: &str, law: &OffspringLaw<f64>, why: &str) -> ExperimentReport {
    let mut r = ExperimentReport::new(name).param("law", law.to_spec());
    r.note(why);
    r
}

fn run_one(suite: Suite, law: &OffspringLaw<f64>, args: &VerifyArgs, seed: u64) -> Result<ExperimentReport> {
    let finite = law.variance().is_some();
    let n_list = args.n_list.clone();
    let single = n_list.as_ref().and_then(|l| l.last().copied());
    let budget = args.time_budget.map(Duration::from_secs_f64);
    let report = match suite {
        Suite::Llt => {
            let mut cfg = LltConfig::default();
            if !finite {
                cfg.e1_bound = None;
            }
            if let Some(l) = n_list {
                cfg.n_list = l;
            }
            llt_experiment(law, &cfg)?
        }
        Suite::Progeny => {
            let mut cfg = ProgenyConfig::default();
            if let Some(l) = n_list {
                cfg.n_list = l;
            }
            progeny_asymptotics_experiment(law, &cfg)?
        }
        Suite::Ratio => {
            let mut cfg = RatioConfig::default();
            if let Some(l) = n_list {
                cfg.n_list = l;
            }
            ratio_vs_gamma_experiment(law, &cfg)?
        }
        Suite::Marginal => {
            let mut cfg = MarginalConfig::default();
            if let Some(n) = single {
                cfg.n = n;
            }
            lukasiewicz_marginal_experiment(law, &cfg)?
        }
        Suite::Gap => {
            let mut cfg = GapConfig { seed, method: args.method, time_budget: budget, ..GapConfig::default() };
            if !finite {
                cfg.n_list = vec![1_000, 10_000];
            }
            if let Some(l) = n_list {
                cfg.n_list = l;
            }
            if let Some(r) = args.replicates {
                cfg.replicates = r;
            }
            height_contour_gap_experiment(law, &cfg)?
        }
        Suite::Contour => match FiniteVarianceLaw::try_from(law.clone()) {
            Ok(fv) => {
                let mut cfg =
                    ContourConfig { seed, method: args.method, time_budget: budget, ..ContourConfig::default() };
                if let Some(n) = single {
                    cfg.n = n;
                }
                if let Some(r) = args.replicates {
                    cfg.replicates = r;
                }
                contour_limit_experiment(&fv, &cfg)?
            }
            Err(_) => skipped(
                "contour",
                law,
                "skipped: no density-level reference for theta < 2; see the gap and marginal suites",
            ),
        },
        Suite::All => unreachable!("expanded by suites()"),
    };
    Ok(report)
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Flattens one entry of a statistic into named columns.
fn columns(key: &str, v: &Value) -> Vec<(String, String)> {
    match v {
        Value::Object(map) => map.iter().flat_map(|(k, x)| columns(&format!("{key}_{k}"), x)).collect(),
        Value::Array(items) => items.iter().enumerate().flat_map(|(i, x)| columns(&format!("{key}_{i}"), x)).collect(),
        x => vec![(key.to_string(), cell(x))],
    }
}

/// One row per size for multi-size experiments, `statistic,value` rows
/// otherwise.
fn write_plot_csv(report: &ExperimentReport, path: &Path) -> Result<()> {
    let mut w = csv_file(path, &format!("gwtree.plot.{}.v1", report.name))?;
    let sizes: Vec<u64> = report
        .parameters
        .get("n_list")
        .and_then(Value::as_array)
        .map(|a| a.iter().filter_map(Value::as_u64).collect())
        .unwrap_or_default();
    let series: Vec<(&String, &Vec<Value>)> = report
        .statistics
        .iter()
        .filter_map(|(k, v)| v.as_array().filter(|a| !sizes.is_empty() && a.len() == sizes.len()).map(|a| (k, a)))
        .collect();
    if series.is_empty() {
        w.write_record(["statistic", "value"])?;
        for (k, v) in &report.statistics {
            for (name, value) in columns(k, v) {
                w.write_record([name, value])?;
            }
        }
    } else {
        for (row, &n) in sizes.iter().enumerate() {
            let mut cells = vec![("n".to_string(), n.to_string())];
            for (k, values) in &series {
                cells.extend(columns(k, &values[row]));
            }
            if row == 0 {
                w.write_record(cells.iter().map(|c| c.0.as_str()))?;
            }
            w.write_record(cells.iter().map(|c| c.1.as_str()))?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Returns whether every experiment passed.
pub fn run(args: &VerifyArgs) -> Result<bool> {
    let law = args.law.load()?;
    let seed = resolve_seed(args.seed);
    let mut reports = Vec::new();
    for suite in suites(args.suite) {
        let report = run_one(suite, &law, args, seed)?;
        eprintln!("{}: {}", report.name, match report.pass {
            Some(true) => "PASS",
            Some(false) => "FAIL",
            None => "no verdict",
        });
        reports.push(report);
    }
    let path = output_path(&args.out)?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("report").to_string();
    for report in &reports {
        write_plot_csv(report, &path.with_file_name(format!("{stem}.{}.csv", report.name)))?;
    }
    let suite = SuiteReport::new(reports);
    suite.write(&path)?;
    Ok(suite.pass)
}
