use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use mls_core::numerics::Precision;
use mls_core::orbits::SolveOptions;
use mls_core::verifier::Thresholds;
use mls_core::DomainSpec;
use serde::Deserialize;

pub const PRECISION_ENV: &str = "MLS_PRECISION";

/// A domain given inline or by name/path.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum DomainRef {
    Named(String),
    Inline(DomainSpec),
}

/// Contents of a `--config` file. Every field is optional; command-line
/// flags take precedence.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub domain: Option<DomainRef>,
    pub precision: Option<Precision>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub starts: Option<usize>,
    pub p: Option<u64>,
    pub q: Option<u64>,
    pub n_min: Option<usize>,
    pub n_max: Option<usize>,
    pub q_max: Option<u64>,
    pub k: Option<usize>,
    pub m: Option<usize>,
    pub thresholds: Option<Thresholds>,
    pub output: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> anyhow::Result<FileConfig> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

/// Resolves a builtin name or a JSON file holding a domain spec.
pub fn resolve_domain(text: &str) -> anyhow::Result<DomainSpec> {
    if let Some(spec) = DomainSpec::builtin(text) {
        return Ok(spec);
    }
    let path = Path::new(text);
    if !path.exists() {
        bail!("domain `{text}` is neither a builtin (circle, ellipse, generic) nor a file");
    }
    let body = std::fs::read_to_string(path)
        .with_context(|| format!("reading domain {}", path.display()))?;
    serde_json::from_str(&body).with_context(|| format!("parsing domain {}", path.display()))
}

impl DomainRef {
    pub fn resolve(&self) -> anyhow::Result<DomainSpec> {
        match self {
            DomainRef::Named(s) => resolve_domain(s),
            DomainRef::Inline(spec) => Ok(spec.clone()),
        }
    }
}

/// Settings shared by all commands after merging flags, environment and
/// config file.
#[derive(Debug, Clone)]
pub struct Common {
    pub domain: DomainSpec,
    pub precision: Precision,
    pub solve: SolveOptions,
    pub jobs: usize,
}

pub fn resolve_common(
    file: &FileConfig,
    domain: Option<&str>,
    precision: Option<Precision>,
    seed: Option<u64>,
    jobs: Option<usize>,
) -> anyhow::Result<Common> {
    let domain = match (domain, &file.domain) {
        (Some(d), _) => resolve_domain(d)?,
        (None, Some(d)) => d.resolve()?,
        (None, None) => DomainSpec::default_generic(),
    };
    let env = match std::env::var(PRECISION_ENV) {
        Ok(v) if !v.trim().is_empty() => Some(
            v.parse::<Precision>()
                .map_err(|e| anyhow::anyhow!("{PRECISION_ENV}: {e}"))?,
        ),
        _ => None,
    };
    let precision = precision.or(env).or(file.precision).unwrap_or_default();
    let mut solve = SolveOptions::default();
    if let Some(s) = seed.or(file.seed) {
        solve.seed = s;
    }
    if let Some(n) = file.starts {
        if n == 0 {
            bail!("starts must be positive");
        }
        solve.starts = n;
    }
    let jobs = jobs.or(file.jobs).unwrap_or(1);
    if jobs == 0 {
        bail!("jobs must be positive");
    }
    Ok(Common {
        domain,
        precision,
        solve,
        jobs,
    })
}

/// Flag value, else config value, else an error naming the missing key.
pub fn required<T: Copy>(flag: Option<T>, file: Option<T>, name: &str) -> anyhow::Result<T> {
    flag.or(file)
        .ok_or_else(|| anyhow::anyhow!("missing `{name}` (flag or config key)"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        let err = serde_json::from_str::<FileConfig>(r#"{"p": 1, "bogus": 2}"#).unwrap_err();
        assert!(err.to_string().contains("bogus"));
    }

    #[test]
    fn inline_and_named_domains() {
        let c: FileConfig =
            serde_json::from_str(r#"{"domain": {"kind": "ellipse", "a": 1.0, "b": 0.5}}"#).unwrap();
        assert_eq!(c.domain.unwrap().resolve().unwrap(), DomainSpec::ellipse(1.0, 0.5));
        let c: FileConfig = serde_json::from_str(r#"{"domain": "circle"}"#).unwrap();
        assert_eq!(c.domain.unwrap().resolve().unwrap(), DomainSpec::circle(1.0));
        assert!(resolve_domain("no-such-domain").is_err());
    }

    #[test]
    fn flags_override_file() {
        let file = FileConfig {
            seed: Some(5),
            jobs: Some(3),
            ..Default::default()
        };
        let c = resolve_common(&file, Some("circle"), Some(Precision::Double), Some(9), None).unwrap();
        assert_eq!(c.solve.seed, 9);
        assert_eq!(c.jobs, 3);
        assert_eq!(c.domain, DomainSpec::circle(1.0));
        assert_eq!(required(None, Some(4u64), "q").unwrap(), 4);
        assert!(required::<u64>(None, None, "q").is_err());
    }
}
