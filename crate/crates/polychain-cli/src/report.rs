use std::collections::BTreeMap;
use std::fmt::Display;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use polychain::exact::{format_rational, CertifiedReal, Q};

#[derive(Debug)]
pub struct CliError(pub String);

impl<E: Display> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// What a subcommand produced.
#[derive(Debug, Default)]
pub struct Outcome {
    pub inputs: Vec<Vec<u8>>,
    pub results: Value,
    pub verdicts: BTreeMap<String, Value>,
    pub text: String,
    pub verification_failed: bool,
}

impl Outcome {
    pub fn verdict(&mut self, name: &str, v: impl Into<Value>) {
        self.verdicts.insert(name.to_string(), v.into());
    }

    /// Records a check; a failed check makes the run exit with code 2.
    pub fn check(&mut self, name: &str, ok: bool) {
        self.verdicts.insert(name.to_string(), Value::Bool(ok));
        if !ok {
            self.verification_failed = true;
        }
    }
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub inputs_sha256: String,
    pub results: Value,
    pub verdicts: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

impl RunReport {
    pub fn new(args: &[String], outcome: &Outcome, timing_ms: Option<u64>) -> Self {
        let mut h = Sha256::new();
        for input in &outcome.inputs {
            h.update((input.len() as u64).to_le_bytes());
            h.update(input);
        }
        let inputs_sha256 = h.finalize().iter().map(|b| format!("{b:02x}")).collect();
        RunReport {
            command: args.to_vec(),
            inputs_sha256,
            results: outcome.results.clone(),
            verdicts: outcome.verdicts.clone(),
            timing_ms,
        }
    }
}

pub fn rational(q: &Q) -> Value {
    Value::String(format_rational(q))
}

/// `{"exact": ..., "interval": [lo, hi]}`; `exact` is null when only the
/// enclosure is known.
pub fn certified(c: &CertifiedReal) -> Value {
    json!({
        "exact": c.exact.as_ref().map(|e| match e.as_rational() {
            Some(r) => format_rational(&r),
            None => e.to_string(),
        }),
        "interval": [c.interval.lo, c.interval.hi],
    })
}
