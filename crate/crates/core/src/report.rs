//! JSON experiment reports.
//!
//! Everything except the `timing` object is a deterministic function of the
//! configuration and seed.

use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::Result;

pub const REPORT_SCHEMA: &str = "gwtree.report.v1";

#[derive(Clone, Debug, Serialize)]
pub struct Timing {
    pub wall_seconds: f64,
    pub unix_timestamp: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub schema: &'static str,
    pub name: String,
    pub parameters: Map<String, Value>,
    pub statistics: Map<String, Value>,
    pub tolerances: Map<String, Value>,
    /// `None` when the configuration does not support a verdict.
    pub pass: Option<bool>,
    pub seed: Option<u64>,
    pub notes: Vec<String>,
    pub timing: Option<Timing>,
}

impl ExperimentReport {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            schema: REPORT_SCHEMA,
            name: name.into(),
            parameters: Map::new(),
            statistics: Map::new(),
            tolerances: Map::new(),
            pass: None,
            seed: None,
            notes: Vec::new(),
            timing: None,
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.parameters.insert(key.into(), json!(value));
        self
    }

    pub fn stat(&mut self, key: &str, value: impl Serialize) {
        self.statistics.insert(key.into(), json!(value));
    }

    pub fn tolerance(&mut self, key: &str, value: impl Serialize) {
        self.tolerances.insert(key.into(), json!(value));
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn finish(&mut self, started: Instant) {
        self.timing = Some(Timing {
            wall_seconds: started.elapsed().as_secs_f64(),
            unix_timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        });
    }

    pub fn passed(&self) -> bool {
        self.pass.unwrap_or(true)
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }

    /// Report without the nondeterministic `timing` object.
    pub fn deterministic_json(&self) -> Value {
        let mut v = self.to_json();
        if let Some(obj) = v.as_object_mut() {
            obj.remove("timing");
        }
        v
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n")?;
        Ok(())
    }
}

/// Bundle of reports written as one JSON document.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub schema: &'static str,
    pub pass: bool,
    pub reports: Vec<ExperimentReport>,
}

impl SuiteReport {
    pub fn new(reports: Vec<ExperimentReport>) -> Self {
        let pass = reports.iter().all(ExperimentReport::passed);
        Self { schema: REPORT_SCHEMA, pass, reports }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n")?;
        Ok(())
    }
}
