//! Run configuration: loaded from `--config`, overridden by flags, embedded
//! in every output file.

use std::path::{Path, PathBuf};

use qmsa_core::scoring::build_weight_tensor_with;
use qmsa_core::{
    build_weight_tensor, read_fasta, MatrixScoring, OptimizerConfig, PenaltyConfig, SequenceSet,
    WeightTensor,
};
use serde::{Deserialize, Serialize};

use crate::Invalid;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Inline sequences; exclusive with `fasta`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seqs: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fasta: Option<PathBuf>,
    /// String lengths for content-free counting.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lengths: Option<Vec<usize>>,
    /// Scoring-matrix JSON replacing the native SP scores.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scoring: Option<PathBuf>,
    pub penalties: PenaltyConfig,
    pub p: usize,
    pub p_list: Vec<usize>,
    pub shots: u64,
    pub top_k: usize,
    pub optimizer: OptimizerConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seqs: None,
            fasta: None,
            lengths: None,
            scoring: None,
            penalties: PenaltyConfig::default(),
            p: 1,
            p_list: Vec::new(),
            shots: 5000,
            top_k: 10,
            optimizer: OptimizerConfig::default(),
        }
    }
}

/// Either a bare config or any output file carrying a `config` key.
#[derive(Deserialize)]
#[serde(untagged)]
enum ConfigFile {
    Embedded { config: RunConfig },
    Bare(RunConfig),
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        // CSV outputs carry the config on their first line
        let json = text.strip_prefix(crate::output::CONFIG_PREFIX).map_or(text.as_str(), |rest| {
            rest.lines().next().unwrap_or_default()
        });
        match serde_json::from_str::<ConfigFile>(json) {
            Ok(ConfigFile::Embedded { config } | ConfigFile::Bare(config)) => Ok(config),
            Err(e) => Err(Invalid(format!("config {}: {e}", path.display())).into()),
        }
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.seqs.is_some() && self.fasta.is_some() {
            return Err(Invalid("give either inline sequences or a FASTA file, not both".into()).into());
        }
        if self.p == 0 {
            return Err(Invalid("p must be at least 1".into()).into());
        }
        if self.p_list.contains(&0) {
            return Err(Invalid("every entry of the p list must be at least 1".into()).into());
        }
        if self.shots == 0 {
            return Err(Invalid("shots must be at least 1".into()).into());
        }
        self.penalties.validate()?;
        self.optimizer.validate()?;
        Ok(())
    }

    pub fn sequences(&self) -> anyhow::Result<SequenceSet> {
        match (&self.seqs, &self.fasta) {
            (Some(list), None) => Ok(SequenceSet::new(list)?),
            (None, Some(path)) => Ok(read_fasta(path)?),
            _ => Err(Invalid("no sequences: pass --seqs or --fasta".into()).into()),
        }
    }

    pub fn weights(&self, seqs: &SequenceSet) -> anyhow::Result<WeightTensor> {
        Ok(match &self.scoring {
            Some(path) => build_weight_tensor_with(seqs, &MatrixScoring::from_path(path)?),
            None => build_weight_tensor(seqs),
        })
    }
}
