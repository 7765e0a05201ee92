use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use gwtree::exactlaw::{
    check_absolute_continuity, enumerate_conditioned, kemperman_check, phi, phi_star, progeny_pmf, walk_pmf,
    RatioTable, WalkWindow,
};
use serde_json::{json, Value};

use crate::common::{write_json, LawArgs};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum What {
    /// Law of `W_n`.
    Walk,
    /// `P[ζ = k]` for `k <= n`.
    Progeny,
    /// `P[W_n = -j]`-type hitting mass `phi_n(j)`.
    Phi,
    /// `phi*_n(j)`, survival of the walk started at `j`.
    PhiStar,
    /// `D_n^(a)(k)`, one value or the whole row.
    Ratio,
    /// Every tree of size `n` with its conditional probability.
    Enumerate,
    /// Hitting-time identity checked up to `n` and `j`.
    Kemperman,
    /// Exhaustive absolute-continuity check at `(n, a)`.
    #[value(alias = "absolute-continuity")]
    AcCheck,
}

/// Exact finite-n tables, as JSON.
#[derive(Args, Debug)]
pub struct ExactArgs {
    #[command(flatten)]
    pub law: LawArgs,
    #[arg(long, value_enum)]
    pub what: What,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub j: Option<usize>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Upper end of the walk window; automatic when absent.
    #[arg(long)]
    pub top: Option<i64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn need<T: Copy>(value: Option<T>, flag: &str, what: What) -> Result<T> {
    value.with_context(|| format!("--{flag} is required for --what {}", name(what)))
}

fn name(what: What) -> String {
    what.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
}

pub fn run(args: &ExactArgs) -> Result<()> {
    let law = args.law.load()?;
    let n = args.n;
    if n == 0 {
        bail!("--n must be at least 1");
    }
    let body: Value = match args.what {
        What::Walk => {
            let window = args.top.map(WalkWindow::up_to).unwrap_or_default();
            let table = walk_pmf(&law.step_law(), n, &window)?;
            json!({ "offset": table.offset, "last": table.last(), "masses": table.masses,
                    "total": table.total(), "truncated_mass": table.truncated_mass })
        }
        What::Progeny => {
            let p = progeny_pmf(&law, n)?;
            json!({ "offset": p.table.offset, "masses": p.table.masses, "truncated_mass": p.table.truncated_mass,
                    "survival_at_n": p.survival(n), "cross_check_gap": p.cross_check_gap, "checked": p.checked })
        }
        What::Phi => {
            let j = need(args.j, "j", args.what)?;
            json!({ "j": j, "value": phi(&law, n, j)? })
        }
        What::PhiStar => {
            let j = need(args.j, "j", args.what)?;
            json!({ "j": j, "value": phi_star(&law, n, j)? })
        }
        What::Ratio => {
            let a = need(args.a, "a", args.what)?;
            let table = RatioTable::new(&law, n, a)?;
            let ks: Vec<usize> = match args.k {
                Some(k) => vec![k],
                None => (0..table.r).collect(),
            };
            let values = ks
                .iter()
                .map(|&k| Ok(json!({ "k": k, "value": table.ratio(k).ok() })))
                .collect::<Result<Vec<_>>>()?;
            json!({ "a": a, "m": table.m, "r": table.r, "phi_n1": table.phi_n1,
                    "phi_star_n1": table.phi_star_n1, "values": values })
        }
        What::Enumerate => {
            let trees: Vec<Value> = enumerate_conditioned(&law, n)?
                .into_iter()
                .map(|(t, p)| json!({ "child_counts": t.child_counts(), "probability": p }))
                .collect();
            json!({ "count": trees.len(), "trees": trees })
        }
        What::Kemperman => {
            let j = need(args.j, "j", args.what)?;
            serde_json::to_value(kemperman_check(&law, n, j))?
        }
        What::AcCheck => {
            let a = need(args.a, "a", args.what)?;
            let report = check_absolute_continuity(&law, n, a)?;
            let pass = report.passed();
            write_json(args.out.as_deref(), &json!({
                "schema": "gwtree.exact.v1", "law": law.to_spec(), "what": name(args.what), "n": n,
                "result": report.deterministic_json(),
            }))?;
            if !pass {
                return Err(crate::GateFailed.into());
            }
            return Ok(());
        }
    };
    write_json(
        args.out.as_deref(),
        &json!({ "schema": "gwtree.exact.v1", "law": law.to_spec(), "what": name(args.what), "n": n, "result": body }),
    )
}
