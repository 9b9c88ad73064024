//! Layered run configuration: built-in defaults, then a TOML file, then
//! `CLIFF_`-prefixed environment variables, then command-line flags.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use cliff_core::objectives::{LossConfig, PairNormalization, PoolKind, PoolingSpec};
use cliff_core::strategies::StrategyConfig;

/// N-gram model knobs for the bundled generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelConfig {
    pub order: usize,
    pub smoothing_k: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig { order: 3, smoothing_k: 0.1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnalysisConfig {
    pub bins: usize,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig { bins: 10 }
    }
}

/// The fully resolved run configuration, hashed into the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Settings {
    pub seed: u64,
    pub workers: usize,
    pub out_dir: PathBuf,
    pub reps_dim: usize,
    pub strategy: StrategyConfig,
    pub loss: LossConfig,
    pub pooling: PoolingSpec,
    pub model: ModelConfig,
    pub analysis: AnalysisConfig,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            seed: 0,
            workers: 1,
            out_dir: PathBuf::from("out"),
            reps_dim: 8,
            strategy: StrategyConfig::default(),
            loss: LossConfig::default(),
            pooling: PoolingSpec::default(),
            model: ModelConfig::default(),
            analysis: AnalysisConfig::default(),
        }
    }
}

fn env_var(name: &str) -> Option<String> {
    std::env::var(format!("CLIFF_{name}")).ok()
}

fn parse_env<T: std::str::FromStr>(name: &str, into: &mut T) -> Result<()> {
    if let Some(raw) = env_var(name) {
        *into = raw
            .parse()
            .map_err(|_| anyhow::anyhow!("environment variable CLIFF_{name}='{raw}' is invalid"))?;
    }
    Ok(())
}

pub fn parse_pool_kind(raw: &str) -> Result<PoolKind> {
    match raw.replace('-', "_").as_str() {
        "all_tokens" => Ok(PoolKind::AllTokens),
        "entity_tokens" => Ok(PoolKind::EntityTokens),
        "last_token" => Ok(PoolKind::LastToken),
        other => anyhow::bail!("unknown pooling kind '{other}'"),
    }
}

pub fn parse_pair_normalization(raw: &str) -> Result<PairNormalization> {
    match raw.replace('-', "_").as_str() {
        "choose_pairs" => Ok(PairNormalization::ChoosePairs),
        "ordered_pairs" => Ok(PairNormalization::OrderedPairs),
        other => anyhow::bail!("unknown pair normalization '{other}'"),
    }
}

impl Settings {
    /// Loads the file layer (when given) and applies environment overrides.
    /// Flag overrides are applied afterwards by the caller.
    pub fn load(config_path: Option<&Path>) -> Result<Self> {
        let mut settings = match config_path {
            Some(path) => {
                let raw = std::fs::read_to_string(path)
                    .with_context(|| format!("reading config file {}", path.display()))?;
                toml::from_str(&raw)
                    .with_context(|| format!("parsing config file {}", path.display()))?
            }
            None => Settings::default(),
        };
        settings.apply_env()?;
        Ok(settings)
    }

    fn apply_env(&mut self) -> Result<()> {
        parse_env("SEED", &mut self.seed)?;
        parse_env("WORKERS", &mut self.workers)?;
        if let Some(dir) = env_var("OUT_DIR") {
            self.out_dir = PathBuf::from(dir);
        }
        parse_env("REPS_DIM", &mut self.reps_dim)?;
        parse_env("NUCLEUS_P", &mut self.strategy.nucleus_p)?;
        parse_env("SAMPLES_PER_ANCHOR", &mut self.strategy.samples_per_anchor)?;
        parse_env("FILL_LEN_MAX", &mut self.strategy.fill_len_max)?;
        parse_env("NEGATIVES_PER_BATCH", &mut self.strategy.negatives_per_batch)?;
        parse_env("THRESHOLD", &mut self.strategy.threshold)?;
        parse_env("TAU", &mut self.loss.tau)?;
        parse_env("LAMBDA", &mut self.loss.lambda)?;
        if let Some(raw) = env_var("POOLING") {
            self.pooling.kind = parse_pool_kind(&raw)?;
        }
        parse_env("USE_MLP", &mut self.pooling.use_mlp)?;
        parse_env("ORDER", &mut self.model.order)?;
        parse_env("SMOOTHING_K", &mut self.model.smoothing_k)?;
        parse_env("BINS", &mut self.analysis.bins)?;
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.workers < 1 {
            anyhow::bail!("workers must be >= 1");
        }
        self.strategy.validate()?;
        self.loss.validate()?;
        if self.model.order < 2 {
            anyhow::bail!("model order must be >= 2");
        }
        if self.analysis.bins < 2 {
            anyhow::bail!("analysis bins must be >= 2");
        }
        Ok(())
    }

    /// Stable hash of the resolved configuration, for the manifest.
    pub fn config_hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("settings serialize");
        format!("{:016x}", cliff_core::genkit::hash64(0, &canonical))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_shipped_values() {
        let s = Settings::default();
        assert_eq!(s.strategy.nucleus_p, 0.7);
        assert_eq!(s.strategy.negatives_per_batch, 5);
        assert_eq!(s.strategy.threshold, 0.21);
        assert_eq!(s.loss.tau, 1.0);
        assert_eq!(s.loss.lambda, 1.0);
        assert_eq!(s.model.order, 3);
    }

    #[test]
    fn toml_layer_overrides_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cliff.toml");
        std::fs::write(
            &path,
            "seed = 42\n[strategy]\nnegatives_per_batch = 4\n[loss]\nlambda = 0.5\n",
        )
        .unwrap();
        let s = Settings::load(Some(&path)).unwrap();
        assert_eq!(s.seed, 42);
        assert_eq!(s.strategy.negatives_per_batch, 4);
        assert_eq!(s.loss.lambda, 0.5);
        assert_eq!(s.strategy.nucleus_p, 0.7); // untouched default
    }

    #[test]
    fn config_hash_is_stable_and_sensitive() {
        let a = Settings::default();
        let mut b = Settings::default();
        assert_eq!(a.config_hash(), b.config_hash());
        b.seed = 1;
        assert_ne!(a.config_hash(), b.config_hash());
    }
}
