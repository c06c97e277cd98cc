//! Report assembly. Every computed number is an object
//! `{"value", "exact"?, "provenance"}` where `value` has 15 significant
//! digits, `exact` is the rational when one is known and `provenance` is
//! `"exact"` or `"estimated(N, seed)"`.

use std::time::Instant;

use mixgap_core::Rational;
use serde_json::{json, Map, Value};

use crate::io::{format_decimal, rational_string, rational_to_f64};

/// A value computed without sampling, known as a rational.
pub fn exact(r: &Rational) -> Value {
    json!({"value": format_decimal(rational_to_f64(r)), "exact": rational_string(r), "provenance": "exact"})
}

/// A value computed without sampling in floating point.
pub fn exact_float(v: f64) -> Value {
    json!({"value": format_decimal(v), "provenance": "exact"})
}

pub fn exact_int(v: u64) -> Value {
    json!({"value": v.to_string(), "exact": v.to_string(), "provenance": "exact"})
}

pub fn estimated_tag(samples: u64, seed: u64) -> String {
    format!("estimated({samples}, {seed})")
}

/// A sample statistic over `samples` draws seeded with `seed`.
pub fn estimated(r: &Rational, samples: u64, seed: u64) -> Value {
    json!({"value": format_decimal(rational_to_f64(r)), "exact": rational_string(r), "provenance": estimated_tag(samples, seed)})
}

pub fn estimated_float(v: f64, samples: u64, seed: u64) -> Value {
    json!({"value": format_decimal(v), "provenance": estimated_tag(samples, seed)})
}

pub fn estimated_int(v: u64, samples: u64, seed: u64) -> Value {
    json!({"value": v.to_string(), "exact": v.to_string(), "provenance": estimated_tag(samples, seed)})
}

/// The envelope written by every command.
#[derive(Debug)]
pub struct Report {
    command: Vec<String>,
    seed: Option<u64>,
    profile: Option<&'static str>,
    params: Map<String, Value>,
    results: Map<String, Value>,
    started: Instant,
}

impl Report {
    pub fn new(command: &[String]) -> Self {
        Self { command: command.to_vec(), seed: None, profile: None, params: Map::new(), results: Map::new(), started: Instant::now() }
    }

    pub fn seed(&mut self, seed: u64) -> &mut Self {
        self.seed = Some(seed);
        self
    }

    pub fn profile(&mut self, profile: &'static str) -> &mut Self {
        self.profile = Some(profile);
        self
    }

    /// Inputs echoed back; plain JSON.
    pub fn param(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.params.insert(key.into(), value.into());
        self
    }

    /// Computed outputs; numbers must come from the helpers above.
    pub fn result(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.results.insert(key.into(), value.into());
        self
    }

    pub fn to_json(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("command".into(), json!(self.command));
        obj.insert("seed".into(), json!(self.seed));
        obj.insert("profile".into(), json!(self.profile));
        obj.insert("params".into(), Value::Object(self.params.clone()));
        obj.insert("results".into(), Value::Object(self.results.clone()));
        obj.insert("wall_clock_seconds".into(), json!(format_decimal(self.started.elapsed().as_secs_f64())));
        Value::Object(obj)
    }
}
