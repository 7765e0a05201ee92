use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use gwtree::codings::{contour_from_heights, height_from_walk, rescale, walk_from_tree, PathRef, Tree};
use gwtree::rng::rng_from_seed;
use gwtree::sampler::{ConditionedSampler, Method};

use crate::common::{csv_output, resolve_seed, LawArgs};
use crate::sample::parse_method;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Walk,
    Height,
    Contour,
    /// All three codings rescaled on a common time grid in `[0, 1]`.
    Rescaled,
}

/// Codings of a given tree (`--child-counts`) or of a sampled one.
#[derive(Args, Debug)]
pub struct CodingsArgs {
    /// Child counts in depth-first order, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub child_counts: Option<Vec<usize>>,
    #[command(flatten)]
    pub law: LawArgs,
    /// Size of the sampled tree when no child counts are given.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = "rejection", value_parser = parse_method)]
    pub method: Method,
    #[arg(long, value_enum, default_value = "walk")]
    pub emit: Emit,
    #[arg(long, default_value_t = 201)]
    pub grid_points: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: &CodingsArgs) -> Result<()> {
    let law = args.law.load()?;
    let tree = match (&args.child_counts, args.n) {
        (Some(counts), None) => Tree::from_child_counts(counts.clone())?,
        (None, Some(n)) => {
            let seed = resolve_seed(args.seed);
            ConditionedSampler::new(&law, n, args.method)?.tree(&mut rng_from_seed(seed))?
        }
        (Some(_), Some(_)) => bail!("--child-counts and --n are mutually exclusive"),
        (None, None) => bail!("one of --child-counts or --n is required"),
    };
    let walk = walk_from_tree(&tree);
    let heights = height_from_walk(&walk);
    let contour = contour_from_heights(&heights);
    let mut w = csv_output(args.out.as_deref(), "gwtree.codings.v1")?;
    match args.emit {
        Emit::Walk => {
            w.write_record(["index", "W"])?;
            for (i, v) in walk.values().iter().enumerate() {
                w.write_record([i.to_string(), v.to_string()])?;
            }
        }
        Emit::Height => {
            w.write_record(["index", "H"])?;
            for (i, v) in heights.values().iter().enumerate() {
                w.write_record([i.to_string(), v.to_string()])?;
            }
        }
        Emit::Contour => {
            w.write_record(["time", "C"])?;
            for (i, v) in contour.values().iter().enumerate() {
                w.write_record([i.to_string(), v.to_string()])?;
            }
        }
        Emit::Rescaled => {
            let n = tree.size();
            let bn = law.calibrate_bn(n).context("scaling constant")?;
            let paths = [PathRef::Walk(&walk), PathRef::Height(&heights), PathRef::Contour(&contour)]
                .map(|p| rescale(p, n, bn, args.grid_points));
            let [walk_r, height_r, contour_r] = paths;
            let (walk_r, height_r, contour_r) = (walk_r?, height_r?, contour_r?);
            w.write_record(["t", "walk", "height", "contour"])?;
            for i in 0..args.grid_points {
                w.write_record([
                    walk_r.times[i].to_string(),
                    walk_r.values[i].to_string(),
                    height_r.values[i].to_string(),
                    contour_r.values[i].to_string(),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}
