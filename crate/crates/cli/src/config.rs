//! Run configuration: a TOML file with CLI flag overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

pub const DEFAULT_SAMPLES: u32 = 256;
pub const DEFAULT_REPLICATES: u32 = 1000;

/// Which agent answers the prompts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AgentConfig {
    /// Chat-completions HTTP endpoint. The credential is read from the
    /// environment variable named here, never from the config file.
    Llm {
        endpoint: String,
        model: String,
        credential_env: String,
        #[serde(default = "default_temperature")]
        temperature: f64,
        #[serde(default = "default_max_tokens")]
        max_tokens: u32,
        #[serde(default = "default_max_retries")]
        max_retries: u32,
    },
    /// Planted PT parameters for battery trials plus planted marker
    /// probabilities for sweep trials. Either side may be omitted when the
    /// run only exercises the other.
    Synthetic {
        sigma: f64,
        lambda: f64,
        gamma: f64,
        /// Marker text -> probability in [0, 1]. Empty map leaves sweep
        /// trials unsupported.
        #[serde(default)]
        marker_probs: BTreeMap<String, f64>,
        #[serde(default = "default_sharpness")]
        sharpness: f64,
    },
}

fn default_temperature() -> f64 {
    1.0
}

fn default_max_tokens() -> u32 {
    16
}

fn default_max_retries() -> u32 {
    3
}

fn default_sharpness() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub agent: AgentConfig,
    #[serde(default = "default_samples")]
    pub n_samples: u32,
    #[serde(default = "default_replicates")]
    pub bootstrap_replicates: u32,
    #[serde(default)]
    pub master_seed: u64,
    pub output_dir: PathBuf,
}

fn default_samples() -> u32 {
    DEFAULT_SAMPLES
}

fn default_replicates() -> u32 {
    DEFAULT_REPLICATES
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let config: RunConfig =
            toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples < 2 || !self.n_samples.is_multiple_of(2) {
            bail!("n_samples must be even and >= 2, got {}", self.n_samples);
        }
        if let AgentConfig::Synthetic {
            marker_probs,
            sharpness,
            ..
        } = &self.agent
        {
            for (marker, p) in marker_probs {
                if !(0.0..=1.0).contains(p) {
                    bail!("marker {marker:?}: probability {p} outside [0, 1]");
                }
            }
            if *sharpness <= 0.0 {
                bail!("sharpness must be positive, got {sharpness}");
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_synthetic_config_with_defaults() {
        let text = r#"
output_dir = "/tmp/run"
master_seed = 42

[agent]
kind = "synthetic"
sigma = 0.67
lambda = 2.63
gamma = 0.685
"#;
        let c: RunConfig = toml::from_str(text).unwrap();
        c.validate().unwrap();
        assert_eq!(c.n_samples, DEFAULT_SAMPLES);
        assert_eq!(c.bootstrap_replicates, DEFAULT_REPLICATES);
        assert_eq!(c.master_seed, 42);
        assert!(matches!(c.agent, AgentConfig::Synthetic { sharpness, .. } if sharpness == 0.5));
    }

    #[test]
    fn parses_llm_config_without_secret_material() {
        let text = r#"
output_dir = "out"
n_samples = 64

[agent]
kind = "llm"
endpoint = "https://example.invalid/v1/chat/completions"
model = "test-model"
credential_env = "PTE_API_KEY"
"#;
        let c: RunConfig = toml::from_str(text).unwrap();
        c.validate().unwrap();
        match c.agent {
            AgentConfig::Llm {
                credential_env,
                max_retries,
                ..
            } => {
                assert_eq!(credential_env, "PTE_API_KEY");
                assert_eq!(max_retries, 3);
            }
            _ => panic!("wrong agent kind"),
        }
    }

    #[test]
    fn rejects_odd_sample_count() {
        let text = r#"
output_dir = "out"
n_samples = 7

[agent]
kind = "synthetic"
sigma = 1.0
lambda = 1.0
gamma = 1.0
"#;
        let c: RunConfig = toml::from_str(text).unwrap();
        assert!(c.validate().is_err());
    }

    #[test]
    fn rejects_out_of_range_marker_probability() {
        let text = r#"
output_dir = "out"

[agent]
kind = "synthetic"
sigma = 1.0
lambda = 1.0
gamma = 1.0
sharpness = 0.5

[agent.marker_probs]
likely = 1.5
"#;
        let c: RunConfig = toml::from_str(text).unwrap();
        assert!(c.validate().is_err());
    }
}
