//! Persisted runs: one JSON document per run.

use std::collections::BTreeMap;
use std::path::Path;

use rootwave::expsums::SumSeries;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema_version: u32,
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub checkpoints: SumSeries,
    pub wall_time: f64,
    pub thread_count: usize,
}

impl RunRecord {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let record: RunRecord =
            serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        if record.schema_version != SCHEMA_VERSION {
            return Err(format!(
                "schema_version {} is not {SCHEMA_VERSION}",
                record.schema_version
            ));
        }
        Ok(record)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("records serialize") + "\n"
    }
}

/// `x,count,re,im,ratio_re`, reals with 17 significant digits.
pub fn series_csv(series: &SumSeries) -> String {
    let mut out = String::from("x,count,re,im,ratio_re\n");
    for ((&x, v), &count) in series
        .checkpoints
        .iter()
        .zip(&series.values)
        .zip(&series.counts)
    {
        out += &format!(
            "{x},{count},{:.16e},{:.16e},{:.16e}\n",
            v.re,
            v.im,
            v.re / x as f64
        );
    }
    out
}
