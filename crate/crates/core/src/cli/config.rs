use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::datasets::CsvSchema;
use crate::error::{Error, Result};
use crate::faim::ThetaWeights;

/// On-disk run configuration. Every key is optional; command-line flags win.
///
/// ```toml
/// input = "synthetic.csv"
/// output_dir = "out"
/// stepsize = 0.01
/// threshold = 0.5
/// seed = 42
///
/// [schema]
/// group = "group"
///
/// [thetas.blue]
/// a = 1.0
/// b = 0.0
/// c = 0.0
/// ```
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    pub stepsize: Option<f64>,
    pub threshold: Option<f64>,
    pub seed: Option<u64>,
    pub n: Option<usize>,
    pub normalize: Option<bool>,
    #[serde(default)]
    pub schema: SchemaConfig,
    #[serde(default)]
    pub thetas: BTreeMap<String, ThetaEntry>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemaConfig {
    pub id: Option<String>,
    pub group: Option<String>,
    pub score: Option<String>,
    pub label: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThetaEntry {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl ThetaEntry {
    pub fn weights(&self) -> Result<ThetaWeights> {
        ThetaWeights::new(self.a, self.b, self.c)
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&read(path)?).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn thetas(&self) -> Result<BTreeMap<String, ThetaWeights>> {
        self.thetas.iter().map(|(g, t)| Ok((g.clone(), t.weights()?))).collect()
    }
}

/// Per-group theta file: one TOML table per group with keys `a`, `b`, `c`.
pub fn parse_theta_file(text: &str) -> Result<BTreeMap<String, ThetaWeights>> {
    let raw: BTreeMap<String, ThetaEntry> = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    raw.into_iter().map(|(g, t)| Ok((g, t.weights()?))).collect()
}

pub fn load_theta_file(path: &Path) -> Result<BTreeMap<String, ThetaWeights>> {
    parse_theta_file(&read(path)?)
}

/// `"a,b,c"` as given to `--theta`.
pub fn parse_theta_triple(text: &str) -> Result<ThetaWeights> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(Error::Config(format!("expected three comma-separated weights, got {text:?}")));
    }
    let mut v = [0.0; 3];
    for (slot, p) in v.iter_mut().zip(&parts) {
        *slot = parse_fraction(p).ok_or_else(|| Error::Config(format!("bad theta weight {p:?}")))?;
    }
    ThetaWeights::new(v[0], v[1], v[2])
}

/// A float or a `p/q` fraction such as `1/3`.
fn parse_fraction(text: &str) -> Option<f64> {
    match text.split_once('/') {
        Some((p, q)) => Some(p.trim().parse::<f64>().ok()? / q.trim().parse::<f64>().ok()?),
        None => text.parse().ok(),
    }
}

/// Flag values override the config's `[schema]` table, which overrides the
/// default column names.
pub fn resolve_schema(config: &SchemaConfig, flags: &SchemaConfig, no_id: bool) -> CsvSchema {
    let d = CsvSchema::default();
    let pick = |flag: &Option<String>, file: &Option<String>, default: String| {
        flag.clone().or_else(|| file.clone()).unwrap_or(default)
    };
    CsvSchema {
        id: if no_id { None } else { flags.id.clone().or_else(|| config.id.clone()).or(d.id) },
        group: pick(&flags.group, &config.group, d.group),
        score: pick(&flags.score, &config.score, d.score),
        label: pick(&flags.label, &config.label, d.label),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_config() {
        let cfg = RunConfig::parse(
            "input = \"x.csv\"\nstepsize = 0.05\n[schema]\ngroup = \"race\"\n[thetas.a]\na = 0.5\nb = 0.5\nc = 0.0\n",
        )
        .unwrap();
        assert_eq!(cfg.input.as_deref(), Some(Path::new("x.csv")));
        assert_eq!(cfg.stepsize, Some(0.05));
        assert_eq!(cfg.schema.group.as_deref(), Some("race"));
        assert_eq!(cfg.thetas().unwrap()["a"], ThetaWeights::new(0.5, 0.5, 0.0).unwrap());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(matches!(RunConfig::parse("stepsiz = 0.1"), Err(Error::Config(_))));
    }

    #[test]
    fn theta_file_validates() {
        let t = parse_theta_file("[blue]\na = 1.0\nb = 0.0\nc = 0.0\n[orange]\na = 0.0\nb = 0.0\nc = 1.0\n").unwrap();
        assert_eq!(t.len(), 2);
        assert!(parse_theta_file("[blue]\na = 0.6\nb = 0.6\nc = 0.0\n").is_err());
    }

    #[test]
    fn theta_triples() {
        assert_eq!(parse_theta_triple("1,0,0").unwrap(), ThetaWeights::CALIBRATION);
        let eq = parse_theta_triple("1/3, 1/3, 1/3").unwrap();
        assert!((eq.a() - 1.0 / 3.0).abs() < 1e-15);
        assert!(parse_theta_triple("1,0").is_err());
        assert!(parse_theta_triple("x,0,1").is_err());
    }

    #[test]
    fn schema_precedence() {
        let file = SchemaConfig { group: Some("race".into()), score: Some("s".into()), ..Default::default() };
        let flags = SchemaConfig { group: Some("sex".into()), ..Default::default() };
        let s = resolve_schema(&file, &flags, false);
        assert_eq!((s.group.as_str(), s.score.as_str(), s.label.as_str()), ("sex", "s", "ground_truth"));
        assert_eq!(s.id.as_deref(), Some("id"));
        assert_eq!(resolve_schema(&file, &flags, true).id, None);
    }
}
