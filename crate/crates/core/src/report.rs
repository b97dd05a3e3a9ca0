//! Run reports: resolved configuration, per-check rows, pass/fail.
//!
//! Pass/fail is determined solely by the recorded tolerances; reports embed
//! the full resolved configuration so a run can be reproduced from its own
//! output. Writes are atomic (temp file + rename).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Where a reference value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RefSource {
    /// Closed-form or immediate value.
    ClosedForm,
    /// Computed by an independent numerical route.
    IndependentOracle,
    /// Established constant from the literature.
    Literature,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckRow {
    pub name: String,
    pub computed: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reference: Option<f64>,
    pub source: RefSource,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRow {
    /// |computed − reference| ≤ tolerance.
    pub fn against(
        name: impl Into<String>,
        computed: f64,
        reference: f64,
        source: RefSource,
        tolerance: f64,
    ) -> CheckRow {
        CheckRow {
            name: name.into(),
            computed,
            reference: Some(reference),
            source,
            tolerance,
            pass: (computed - reference).abs() <= tolerance,
        }
    }

    /// computed ≥ bound − tolerance.
    pub fn at_least(
        name: impl Into<String>,
        computed: f64,
        bound: f64,
        source: RefSource,
        tolerance: f64,
    ) -> CheckRow {
        CheckRow {
            name: name.into(),
            computed,
            reference: Some(bound),
            source,
            tolerance,
            pass: computed >= bound - tolerance,
        }
    }

    /// computed ≤ bound + tolerance.
    pub fn at_most(
        name: impl Into<String>,
        computed: f64,
        bound: f64,
        source: RefSource,
        tolerance: f64,
    ) -> CheckRow {
        CheckRow {
            name: name.into(),
            computed,
            reference: Some(bound),
            source,
            tolerance,
            pass: computed <= bound + tolerance,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub tool_version: String,
    pub command: String,
    /// The full resolved configuration of the run.
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub workers: usize,
    pub rows: Vec<CheckRow>,
    #[serde(default)]
    pub extra: serde_json::Value,
    /// Wall-clock milliseconds; the only field allowed to differ between
    /// identical runs.
    pub wall_ms: u128,
}

impl Report {
    pub fn new(command: impl Into<String>, config: serde_json::Value) -> Report {
        Report {
            tool_version: TOOL_VERSION.to_string(),
            command: command.into(),
            config,
            seed: None,
            workers: rayon::current_num_threads(),
            rows: Vec::new(),
            extra: serde_json::Value::Null,
            wall_ms: 0,
        }
    }

    pub fn push(&mut self, row: CheckRow) {
        self.rows.push(row);
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn write_atomic(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, &text)?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }

    /// Flat CSV projection of the rows, for plotting.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("name,computed,reference,source,tolerance,pass\n");
        for r in &self.rows {
            let source = match r.source {
                RefSource::ClosedForm => "closed-form",
                RefSource::IndependentOracle => "independent-oracle",
                RefSource::Literature => "literature",
            };
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.name.replace(',', ";"),
                r.computed,
                r.reference.map(|v| v.to_string()).unwrap_or_default(),
                source,
                r.tolerance,
                r.pass
            ));
        }
        out
    }
}
