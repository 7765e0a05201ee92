use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use clap::Args;
use gwtree::offspring::{LawSpec, OffspringLaw};
use gwtree::rng::splitmix64;

pub const OUTPUT_DIR_VAR: &str = "GWTREE_OUTPUT_DIR";

#[derive(Args, Clone, Debug)]
pub struct LawArgs {
    /// `geometric`, `stable`, or a path to a JSON law file.
    #[arg(long, default_value = "geometric")]
    pub law: String,
    /// Geometric parameter `p` or stable index `theta`.
    #[arg(long, visible_alias = "theta")]
    pub param: Option<f64>,
}

impl LawArgs {
    pub fn load(&self) -> Result<OffspringLaw<f64>> {
        let law = match self.law.as_str() {
            "geometric" => OffspringLaw::geometric(self.param.unwrap_or(0.5))?,
            "stable" => OffspringLaw::stable(self.param.unwrap_or(1.5))?,
            path => {
                if self.param.is_some() {
                    bail!("--param cannot be combined with a law file");
                }
                let text = fs::read_to_string(path).with_context(|| format!("reading law file {path}"))?;
                let spec: LawSpec = serde_json::from_str(&text).with_context(|| format!("parsing law file {path}"))?;
                OffspringLaw::from_spec(&spec)?
            }
        };
        Ok(law)
    }
}

/// The given seed, or a fresh one announced on stderr.
pub fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let nanos = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_nanos() as u64).unwrap_or(0);
        let seed = splitmix64(nanos ^ u64::from(std::process::id()));
        eprintln!("seed = {seed}");
        seed
    })
}

/// Relative output paths land under `$GWTREE_OUTPUT_DIR` when it is set.
pub fn output_path(path: &Path) -> Result<PathBuf> {
    let resolved = match std::env::var_os(OUTPUT_DIR_VAR) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    };
    if let Some(parent) = resolved.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    Ok(resolved)
}

/// File at `out` (resolved with [`output_path`]) or stdout.
pub fn open_output(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => {
            let path = output_path(p)?;
            Box::new(io::BufWriter::new(
                fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?,
            ))
        }
        None => Box::new(io::BufWriter::new(io::stdout())),
    })
}

/// CSV writer whose first line is `# schema: <schema>`.
pub fn csv_output(out: Option<&Path>, schema: &str) -> Result<csv::Writer<Box<dyn Write>>> {
    csv_with_schema(open_output(out)?, schema)
}

/// Like [`csv_output`] for a path that is already resolved.
pub fn csv_file(path: &Path, schema: &str) -> Result<csv::Writer<Box<dyn Write>>> {
    let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    csv_with_schema(Box::new(io::BufWriter::new(file)), schema)
}

fn csv_with_schema(mut sink: Box<dyn Write>, schema: &str) -> Result<csv::Writer<Box<dyn Write>>> {
    writeln!(sink, "# schema: {schema}")?;
    Ok(csv::Writer::from_writer(sink))
}

pub fn write_json(out: Option<&Path>, value: &serde_json::Value) -> Result<()> {
    let mut sink = open_output(out)?;
    serde_json::to_writer_pretty(&mut sink, value)?;
    writeln!(sink)?;
    sink.flush()?;
    Ok(())
}
