use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use gwtree::stable::{excursion_marginal_cdf_theta2, excursion_marginal_theta2, StableLaw};

use crate::common::csv_output;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum What {
    /// Density `p_1(x)`.
    #[value(alias = "density")]
    P1,
    /// Density `p_t(x)`, needs `--t`.
    Pt,
    /// Distribution function of `X_1`.
    Cdf,
    /// First-passage density `q_s(x)` with `s = --t`.
    #[value(alias = "first-passage")]
    Qs,
    /// `int_lower^inf q_s(x) ds`, lower bound `--lower` (default 0).
    #[value(alias = "passage")]
    Integral,
    /// `Gamma_a(x)`, needs `--a`.
    Gamma,
    /// `N(ζ > x)`.
    ZetaTail,
    /// Excursion marginal density at time `--t` (theta = 2 only).
    #[value(alias = "excursion-marginal")]
    ExcMarginal,
    /// Its distribution function.
    #[value(alias = "excursion-cdf")]
    ExcCdf,
}

/// Stable densities and derived quantities on a grid, as CSV.
#[derive(Args, Debug)]
pub struct StableArgs {
    #[arg(long, default_value_t = 2.0)]
    pub theta: f64,
    #[arg(long, value_enum)]
    pub what: What,
    /// Comma-separated evaluation points.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "grid")]
    pub x: Option<Vec<f64>>,
    /// `lo:hi:count`, evenly spaced and inclusive.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub lower: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let [lo, hi, count] = parts[..] else {
        bail!("--grid expects lo:hi:count, got {text:?}");
    };
    let lo: f64 = lo.trim().parse().context("grid lower end")?;
    let hi: f64 = hi.trim().parse().context("grid upper end")?;
    let count: usize = count.trim().parse().context("grid count")?;
    if count == 0 || !lo.is_finite() || !hi.is_finite() || hi < lo {
        bail!("--grid needs finite ends with hi >= lo and count >= 1");
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    let h = (hi - lo) / (count - 1) as f64;
    Ok((0..count).map(|i| lo + h * i as f64).collect())
}

pub fn run(args: &StableArgs) -> Result<()> {
    let law = StableLaw::new(args.theta)?;
    let xs = match (&args.x, &args.grid) {
        (Some(xs), _) => xs.clone(),
        (None, Some(g)) => parse_grid(g)?,
        (None, None) => bail!("one of --x or --grid is required"),
    };
    let t = || args.t.context("--t is required for this quantity");
    let value = |x: f64| -> Result<f64> {
        Ok(match args.what {
            What::P1 => law.density_p1(x)?,
            What::Pt => law.density_pt(t()?, x)?,
            What::Cdf => law.cdf(x)?,
            What::Qs => law.first_passage_density(t()?, x)?,
            What::Integral => law.passage_integral(args.lower, x)?,
            What::Gamma => {
                let a = args.a.context("--a is required for gamma")?;
                if x == 0.0 { law.gamma_a_at_zero(a) } else { law.gamma_a(a, x)? }
            }
            What::ZetaTail => law.zeta_tail(x)?,
            What::ExcMarginal | What::ExcCdf => {
                if args.theta != 2.0 {
                    bail!("excursion marginals are only available for theta = 2");
                }
                if args.what == What::ExcMarginal {
                    excursion_marginal_theta2(t()?, x)?
                } else {
                    excursion_marginal_cdf_theta2(t()?, x)?
                }
            }
        })
    };
    let mut w = csv_output(args.out.as_deref(), "gwtree.stable.v1")?;
    w.write_record(["x", "value"])?;
    for x in xs {
        let v = value(x)?;
        w.write_record([x.to_string(), format!("{v:.17e}")])?;
    }
    w.flush()?;
    Ok(())
}
