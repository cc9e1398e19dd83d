//! Run configuration: defaults, then a config file, then command-line flags.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use xpro::explain::ExplainConfig;
use xpro::neighborhood::Method;
use xpro::xproa::Direction;
use xpro::{Error, Result};

pub const CONFIG_ENV: &str = "XPRO_CONFIG";
pub const DEFAULT_ETA: f64 = 0.1;

/// Resolved knobs; embedded in every output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub explain: ExplainConfig,
    pub eta: f64,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Knobs {
    /// key=value or JSON config file; defaults to $XPRO_CONFIG when set.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, value_parser = parse_method)]
    pub engine: Option<Method>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Prototype count (xprob) or landmark count (xproa), for the selected engine.
    #[arg(short = 'k', long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub xprob_k: Option<usize>,
    #[arg(long)]
    pub xproa_k: Option<usize>,
    /// Maximal XPROB neighborhood size.
    #[arg(short = 'p', long)]
    pub p: Option<usize>,
    /// n-gram context width.
    #[arg(long)]
    pub context_n: Option<usize>,
    #[arg(long)]
    pub xprob_max_rounds: Option<usize>,
    /// Interpolation steps.
    #[arg(short = 's', long)]
    pub s: Option<usize>,
    /// XPROA members kept per class.
    #[arg(short = 'n', long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub xproa_max_rounds: Option<usize>,
    #[arg(long)]
    pub patience: Option<usize>,
    #[arg(long, value_parser = parse_direction)]
    pub direction: Option<Direction>,
    /// Kernel width of the distance weights.
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub ridge: Option<f64>,
    /// Closeness/diversity trade-off of exemplar selection.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub exemplar_count: Option<usize>,
    #[arg(long)]
    pub m_extrinsic: Option<usize>,
    /// Attribution threshold of the manipulation plan.
    #[arg(long)]
    pub eta: Option<f64>,
}

fn parse_method(s: &str) -> std::result::Result<Method, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_direction(s: &str) -> std::result::Result<Direction, String> {
    serde_json::from_value(Value::String(s.into())).map_err(|_| format!("unknown direction {s:?}"))
}

fn scalar(raw: &str) -> Value {
    if let Ok(v) = raw.parse::<u64>() {
        return Value::from(v);
    }
    if let Ok(v) = raw.parse::<f64>() {
        if v.is_finite() {
            return Value::from(v);
        }
    }
    match raw {
        "true" => Value::Bool(true),
        "false" => Value::Bool(false),
        _ => Value::String(raw.to_string()),
    }
}

/// Reads `key = value` lines (`#` comments allowed) or a JSON object. A JSON output artifact
/// is accepted too: its embedded `config` block is used.
pub fn parse_config_text(content: &str) -> Result<Map<String, Value>> {
    let trimmed = content.trim_start();
    if trimmed.starts_with('{') {
        let value: Value = serde_json::from_str(trimmed)?;
        let Value::Object(mut obj) = value else { unreachable!("starts with a brace") };
        return match obj.remove("config") {
            Some(Value::Object(mut inner)) => {
                if let Some(eta) = obj.remove("eta") {
                    inner.insert("eta".into(), eta);
                }
                if let Some(Value::Object(run)) = inner.remove("explain") {
                    let eta = inner.remove("eta");
                    inner = run;
                    if let Some(eta) = eta {
                        inner.insert("eta".into(), eta);
                    }
                }
                Ok(inner)
            }
            _ => Ok(obj),
        };
    }
    let mut map = Map::new();
    for (lineno, line) in content.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("config line {}: expected key=value", lineno + 1)))?;
        map.insert(key.trim().replace('-', "_"), scalar(value.trim()));
    }
    Ok(map)
}

fn merge(base: &mut RunConfig, overrides: Map<String, Value>) -> Result<()> {
    let Value::Object(mut explain) = serde_json::to_value(&base.explain)? else { unreachable!("struct") };
    for (key, value) in overrides {
        if key == "eta" {
            base.eta = serde_json::from_value(value).map_err(|e| Error::Config(format!("eta: {e}")))?;
        } else if explain.contains_key(&key) {
            explain.insert(key, value);
        } else {
            return Err(Error::Config(format!("unknown config key {key:?}")));
        }
    }
    base.explain = serde_json::from_value(Value::Object(explain)).map_err(|e| Error::Config(e.to_string()))?;
    Ok(())
}

fn read_config(path: &Path) -> Result<Map<String, Value>> {
    let content = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    parse_config_text(&content)
}

impl Knobs {
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut run = RunConfig { explain: ExplainConfig::default(), eta: DEFAULT_ETA };
        let path = self.config.clone().or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
        if let Some(path) = path {
            merge(&mut run, read_config(&path)?)?;
        }
        let c = &mut run.explain;
        macro_rules! set {
            ($($field:ident),*) => { $( if let Some(v) = self.$field { c.$field = v; } )* };
        }
        set!(engine, seed, xprob_k, xproa_k, p, context_n, xprob_max_rounds, s, n, xproa_max_rounds, patience, direction, sigma, ridge, lambda, exemplar_count, m_extrinsic);
        if let Some(k) = self.k {
            match c.engine {
                Method::Xprob => c.xprob_k = k,
                Method::Xproa => c.xproa_k = k,
            }
        }
        if let Some(eta) = self.eta {
            run.eta = eta;
        }
        if !(run.eta >= 0.0 && run.eta.is_finite()) {
            return Err(Error::Config(format!("eta must be non-negative, got {}", run.eta)));
        }
        run.explain.validate()?;
        Ok(run)
    }
}
