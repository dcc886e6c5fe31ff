use std::path::Path;

use anyhow::{Context, Result};
use itinbench::agent::{ChatConfig, EpisodeLimits};
use itinbench::dataset::IngestConfig;
use itinbench::metrics::MetricConfig;
use itinbench::synth::SynthConfig;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Root seed for the synthetic city and every clustering step.
    pub seed: u64,
    pub synth: SynthConfig,
    pub ingest: IngestConfig,
    pub queries: QueryConfig,
    pub metrics: MetricConfig,
    pub agent: AgentConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QueryConfig {
    pub first_seed: u64,
    pub count: u64,
}

impl Default for QueryConfig {
    fn default() -> Self {
        QueryConfig { first_seed: 0, count: 100 }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AgentConfig {
    pub chat: ChatConfig,
    pub limits: EpisodeLimits,
}

impl RunConfig {
    pub fn load(path: Option<&Path>, seed: Option<u64>) -> Result<Self> {
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?;
                toml::from_str(&text).with_context(|| format!("parsing config {}", p.display()))?
            }
            None => RunConfig::default(),
        };
        if let Some(s) = seed {
            cfg.seed = s;
        }
        cfg.synth.seed = cfg.seed;
        cfg.metrics.cluster_seed = cfg.seed;
        cfg.agent.limits.cluster_seed = cfg.seed;
        Ok(cfg)
    }

    /// sha256 of the effective configuration.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}
