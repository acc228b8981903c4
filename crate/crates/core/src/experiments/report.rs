//! Versioned experiment report and its JSON / CSV renderings.

use std::io::Write;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::verifiers::Verdict;

pub const SCHEMA: &str = "qembed-report/1";

#[derive(Clone, Debug, Serialize)]
pub struct NamedVerdict {
    pub check: String,
    pub verdict: Verdict,
}

/// Result of one experiment. `trials` holds one flat JSON object per trial
/// (or table row); they are written to JSON only on request but always
/// drive the CSV output.
#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub experiment_id: String,
    pub params: Value,
    pub seed: u64,
    pub bounds: Value,
    pub aggregates: Value,
    pub trials: Vec<Value>,
    pub verdicts: Vec<NamedVerdict>,
    pub runtime_seconds: Option<f64>,
}

impl ExperimentReport {
    pub fn new(experiment_id: impl Into<String>, seed: u64) -> Self {
        Self {
            experiment_id: experiment_id.into(),
            params: Value::Object(Map::new()),
            seed,
            bounds: Value::Object(Map::new()),
            aggregates: Value::Object(Map::new()),
            trials: Vec::new(),
            verdicts: Vec::new(),
            runtime_seconds: None,
        }
    }

    pub fn push_verdict(&mut self, check: impl Into<String>, verdict: Verdict) {
        self.verdicts.push(NamedVerdict {
            check: check.into(),
            verdict,
        });
    }

    pub fn verdict(&self, check: &str) -> Option<Verdict> {
        self.verdicts
            .iter()
            .find(|v| v.check == check)
            .map(|v| v.verdict)
    }

    /// Fail if any check failed, otherwise a scope warning if any, otherwise pass.
    pub fn overall(&self) -> Verdict {
        self.verdicts
            .iter()
            .fold(Verdict::Pass, |acc, v| acc.combine(v.verdict))
    }

    pub fn any_failed(&self) -> bool {
        self.verdicts.iter().any(|v| v.verdict.is_fail())
    }

    /// Ordered JSON object: schema, experiment_id, params, seed, bounds,
    /// aggregates, trials (only when `full`), verdicts, runtime_seconds.
    pub fn to_value(&self, full: bool) -> Value {
        let mut m = Map::new();
        m.insert("schema".into(), Value::from(SCHEMA));
        m.insert(
            "experiment_id".into(),
            Value::from(self.experiment_id.clone()),
        );
        m.insert("params".into(), self.params.clone());
        m.insert("seed".into(), Value::from(self.seed));
        m.insert("bounds".into(), self.bounds.clone());
        m.insert("aggregates".into(), self.aggregates.clone());
        if full {
            m.insert("trials".into(), Value::Array(self.trials.clone()));
        }
        m.insert(
            "verdicts".into(),
            serde_json::to_value(&self.verdicts).expect("verdicts serialize"),
        );
        m.insert(
            "runtime_seconds".into(),
            self.runtime_seconds.map_or(Value::Null, Value::from),
        );
        Value::Object(m)
    }

    pub fn to_json(&self, full: bool) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value(full)).expect("report serializes");
        s.push('\n');
        s
    }

    /// One CSV row per trial; the header is the key list of the first trial.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_rows_csv(&self.trials, out)
    }
}

/// Writes flat JSON objects as CSV rows with a mandatory header row.
/// Nested values are written as compact JSON text.
pub fn write_rows_csv<W: Write>(rows: &[Value], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let header: Vec<String> = match rows.first() {
        Some(Value::Object(m)) => m.keys().cloned().collect(),
        Some(_) => return Err(Error::param("CSV rows must be JSON objects")),
        None => vec!["empty".to_string()],
    };
    w.write_record(&header).map_err(csv_err)?;
    for row in rows {
        let obj = row
            .as_object()
            .ok_or_else(|| Error::param("CSV rows must be JSON objects"))?;
        let fields: Vec<String> = header
            .iter()
            .map(|k| match obj.get(k) {
                None | Some(Value::Null) => String::new(),
                Some(Value::String(s)) => s.clone(),
                Some(v) => v.to_string(),
            })
            .collect();
        w.write_record(&fields).map_err(csv_err)?;
    }
    w.flush()
        .map_err(|e| Error::param(format!("CSV write failed: {e}")))?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::param(format!("CSV write failed: {e}"))
}
