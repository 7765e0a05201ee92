use std::io::Write;
use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, ValueEnum};
use gwtree::codings::{contour_from_heights, height_from_walk, LukasiewiczPath};
use gwtree::rng::replicate_rng;
use gwtree::sampler::{ConditionedSampler, Method};
use rayon::prelude::*;
use serde_json::json;

use crate::common::{csv_output, open_output, resolve_seed, LawArgs};

/// Replicates held in memory at once.
const CHUNK: usize = 256;

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Emit {
    Tree,
    Walk,
    Height,
    Contour,
}

/// Sample trees conditioned on their size.
#[derive(Args, Debug)]
pub struct SampleArgs {
    #[command(flatten)]
    pub law: LawArgs,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// `rejection`, `sequential` or `dp_exact`.
    #[arg(long, default_value = "rejection", value_parser = parse_method)]
    pub method: Method,
    #[arg(long, value_enum, default_value = "tree")]
    pub emit: Emit,
    /// `.jsonl` selects JSON lines, anything else CSV; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: gwtree::Error| e.to_string())
}

fn emitted(walk: &LukasiewiczPath, emit: Emit) -> Vec<i64> {
    match emit {
        Emit::Tree => gwtree::codings::tree_from_walk(walk).child_counts().iter().map(|&k| k as i64).collect(),
        Emit::Walk => walk.values().to_vec(),
        Emit::Height => height_from_walk(walk).values().iter().map(|&h| h as i64).collect(),
        Emit::Contour => contour_from_heights(&height_from_walk(walk)).values().iter().map(|&c| c as i64).collect(),
    }
}

fn column(emit: Emit) -> &'static str {
    match emit {
        Emit::Tree => "children",
        Emit::Walk => "W",
        Emit::Height => "H",
        Emit::Contour => "C",
    }
}

pub fn run(args: &SampleArgs) -> Result<()> {
    let law = args.law.load()?;
    let seed = resolve_seed(args.seed);
    let sampler = ConditionedSampler::new(&law, args.n, args.method)?;
    let jsonl = args.out.as_ref().is_some_and(|p| p.extension().is_some_and(|e| e == "jsonl"));
    let name = format!("{:?}", args.emit).to_lowercase();
    let mut sink = if jsonl { Some(open_output(args.out.as_deref())?) } else { None };
    let mut table = if jsonl { None } else { Some(csv_output(args.out.as_deref(), "gwtree.sample.v1")?) };
    if let Some(w) = table.as_mut() {
        w.write_record(["replicate", "index", column(args.emit)])?;
    }
    let mut start = 0;
    while start < args.count {
        let end = (start + CHUNK).min(args.count);
        let rows = (start..end)
            .into_par_iter()
            .map(|i| sampler.walk(&mut replicate_rng(seed, i as u64)).map(|w| emitted(&w, args.emit)))
            .collect::<gwtree::Result<Vec<_>>>()?;
        for (offset, values) in rows.into_iter().enumerate() {
            let replicate = start + offset;
            if let Some(w) = sink.as_mut() {
                let line = json!({
                    "schema": "gwtree.sample.v1",
                    "replicate": replicate,
                    "seed": seed,
                    "n": args.n,
                    "emit": name,
                    "values": values,
                });
                writeln!(w, "{line}")?;
            }
            if let Some(w) = table.as_mut() {
                for (k, v) in values.iter().enumerate() {
                    w.write_record([replicate.to_string(), k.to_string(), v.to_string()])?;
                }
            }
        }
        start = end;
    }
    if let Some(mut w) = sink {
        w.flush()?;
    }
    if let Some(mut w) = table {
        w.flush()?;
    }
    Ok(())
}
