//! Scenario configuration and per-scenario parameter schemas.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Number(f64),
    Text(String),
}

impl ParamValue {
    /// `--param k=v` values: numeric when they parse as `f64`, text otherwise.
    pub fn parse(raw: &str) -> Self {
        raw.trim().parse::<f64>().map(ParamValue::Number).unwrap_or_else(|_| ParamValue::Text(raw.to_string()))
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Number(v) => write!(f, "{v}"),
            ParamValue::Text(s) => write!(f, "{s}"),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub scenario: String,
    #[serde(default)]
    pub params: BTreeMap<String, ParamValue>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kind {
    Number,
    /// Non-negative integer.
    Count,
    Choice(&'static [&'static str]),
}

#[derive(Debug, Clone, Copy)]
pub enum Default {
    Required,
    Optional,
    Number(f64),
    Text(&'static str),
}

#[derive(Debug, Clone, Copy)]
pub struct ParamSpec {
    pub name: &'static str,
    pub kind: Kind,
    pub default: Default,
    pub help: &'static str,
}

impl ParamSpec {
    pub const fn new(name: &'static str, kind: Kind, default: Default, help: &'static str) -> Self {
        Self { name, kind, default, help }
    }

    fn describe_kind(&self) -> String {
        match self.kind {
            Kind::Number => "number".into(),
            Kind::Count => "integer".into(),
            Kind::Choice(opts) => opts.join("|"),
        }
    }

    pub fn describe(&self) -> String {
        let default = match self.default {
            Default::Required => "required".to_string(),
            Default::Optional => "optional".to_string(),
            Default::Number(v) => format!("default {v}"),
            Default::Text(s) => format!("default {s}"),
        };
        format!("{} ({}, {}): {}", self.name, self.describe_kind(), default, self.help)
    }

    fn check(&self, value: &ParamValue) -> Option<String> {
        match (self.kind, value) {
            (Kind::Number, ParamValue::Number(v)) if v.is_finite() => None,
            (Kind::Count, ParamValue::Number(v)) if *v >= 0.0 && v.fract() == 0.0 && *v <= u32::MAX as f64 => None,
            (Kind::Choice(opts), ParamValue::Text(s)) if opts.contains(&s.as_str()) => None,
            _ => Some(format!("{} = {value} is not a valid {}", self.name, self.describe_kind())),
        }
    }
}

/// Outcome of checking a parameter map against a schema.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct SchemaReport {
    pub missing: Vec<String>,
    pub invalid: Vec<String>,
    pub extra: Vec<String>,
}

impl SchemaReport {
    pub fn is_ok(&self) -> bool {
        self.missing.is_empty() && self.invalid.is_empty()
    }

    pub fn lines(&self) -> Vec<String> {
        let mut out = Vec::new();
        out.extend(self.missing.iter().map(|m| format!("error: missing required parameter `{m}`")));
        out.extend(self.invalid.iter().map(|m| format!("error: {m}")));
        out.extend(self.extra.iter().map(|m| format!("warning: unknown parameter `{m}` ignored")));
        out
    }
}

pub fn check_params(schema: &[ParamSpec], params: &BTreeMap<String, ParamValue>) -> SchemaReport {
    let mut report = SchemaReport::default();
    for spec in schema {
        match params.get(spec.name) {
            Some(v) => report.invalid.extend(spec.check(v)),
            None if matches!(spec.default, Default::Required) => report.missing.push(spec.name.to_string()),
            None => {}
        }
    }
    report.extra = params.keys().filter(|k| !schema.iter().any(|s| s.name == k.as_str())).cloned().collect();
    report
}

/// Parameters resolved against a schema, defaults filled in.
#[derive(Debug, Clone)]
pub struct Params(BTreeMap<String, ParamValue>);

impl Params {
    pub fn resolve(schema: &[ParamSpec], given: &BTreeMap<String, ParamValue>) -> Self {
        let mut map = BTreeMap::new();
        for spec in schema {
            let value = match (given.get(spec.name), spec.default) {
                (Some(v), _) => Some(v.clone()),
                (None, Default::Number(v)) => Some(ParamValue::Number(v)),
                (None, Default::Text(s)) => Some(ParamValue::Text(s.to_string())),
                (None, _) => None,
            };
            if let Some(v) = value {
                map.insert(spec.name.to_string(), v);
            }
        }
        Self(map)
    }

    pub fn as_map(&self) -> &BTreeMap<String, ParamValue> {
        &self.0
    }

    pub fn num(&self, name: &str) -> f64 {
        match self.0.get(name) {
            Some(ParamValue::Number(v)) => *v,
            other => panic!("parameter {name} resolved to {other:?}; schema validation should have caught this"),
        }
    }

    pub fn opt_num(&self, name: &str) -> Option<f64> {
        match self.0.get(name) {
            Some(ParamValue::Number(v)) => Some(*v),
            _ => None,
        }
    }

    pub fn count(&self, name: &str) -> usize {
        self.num(name) as usize
    }

    pub fn text(&self, name: &str) -> &str {
        match self.0.get(name) {
            Some(ParamValue::Text(s)) => s,
            other => panic!("parameter {name} resolved to {other:?}; schema validation should have caught this"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SCHEMA: &[ParamSpec] = &[
        ParamSpec::new("r_max", Kind::Number, Default::Required, ""),
        ParamSpec::new("steps", Kind::Count, Default::Number(5.0), ""),
        ParamSpec::new("state", Kind::Choice(&["a", "b"]), Default::Text("a"), ""),
    ];

    fn map(pairs: &[(&str, ParamValue)]) -> BTreeMap<String, ParamValue> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }

    #[test]
    fn parse_values() {
        assert_eq!(ParamValue::parse("1e-3"), ParamValue::Number(1e-3));
        assert_eq!(ParamValue::parse("vacuum"), ParamValue::Text("vacuum".into()));
    }

    #[test]
    fn report_missing_invalid_extra() {
        let r = check_params(SCHEMA, &map(&[("steps", ParamValue::Number(2.5)), ("zzz", ParamValue::Number(1.0))]));
        assert_eq!(r.missing, vec!["r_max"]);
        assert_eq!(r.invalid.len(), 1);
        assert_eq!(r.extra, vec!["zzz"]);
        assert!(!r.is_ok());
        let r = check_params(SCHEMA, &map(&[("r_max", ParamValue::Number(1.0)), ("extra", ParamValue::Number(0.0))]));
        assert!(r.is_ok());
    }

    #[test]
    fn defaults_filled() {
        let p = Params::resolve(SCHEMA, &map(&[("r_max", ParamValue::Number(2.0))]));
        assert_eq!(p.count("steps"), 5);
        assert_eq!(p.text("state"), "a");
        assert_eq!(p.num("r_max"), 2.0);
    }

    #[test]
    fn config_json_defaults() {
        let c: ScenarioConfig = serde_json::from_str(r#"{"scenario": "loss-sweep", "params": {"r": 1.15}}"#).unwrap();
        assert_eq!(c.seed, 0);
        assert_eq!(c.format, Format::Csv);
        assert_eq!(c.params["r"], ParamValue::Number(1.15));
    }
}
