use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::report::Partial;
use super::{HarnessError, ScanConfig};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShardState {
    /// Inclusive conductor range.
    pub start: u64,
    pub end: u64,
    /// Every conductor below `next` in this range has been aggregated.
    pub next: u64,
    pub partial: Partial,
}

impl ShardState {
    pub fn is_done(&self) -> bool {
        self.next > self.end
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub config_hash: String,
    pub shards: Vec<ShardState>,
}

pub(crate) fn config_hash(cfg: &ScanConfig) -> String {
    let canon = format!("max_conductor={};k_max={};shards={}", cfg.max_conductor, cfg.k_max, cfg.shard_count);
    hex::encode(Sha256::digest(canon.as_bytes()))
}

impl Checkpoint {
    pub fn fresh(cfg: &ScanConfig, ranges: &[(u64, u64)]) -> Self {
        Checkpoint {
            config_hash: config_hash(cfg),
            shards: ranges
                .iter()
                .map(|&(start, end)| ShardState { start, end, next: start, partial: Partial::new(cfg.k_max) })
                .collect(),
        }
    }

    /// Load `path` if it exists; `Ok(None)` when there is nothing to resume.
    pub fn load(path: &Path, cfg: &ScanConfig) -> Result<Option<Self>, HarnessError> {
        let text = match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(HarnessError::io(path, e)),
        };
        let cp: Checkpoint =
            serde_json::from_str(&text).map_err(|source| HarnessError::Json { path: path.into(), source })?;
        if cp.config_hash != config_hash(cfg) {
            return Err(HarnessError::CheckpointMismatch { path: path.into() });
        }
        Ok(Some(cp))
    }

    /// Write to a sibling temp file, then rename over `path`.
    pub fn save(&self, path: &Path) -> Result<(), HarnessError> {
        let tmp = path.with_extension("tmp");
        let body = serde_json::to_vec(self).expect("checkpoint serializes");
        let mut f = fs::File::create(&tmp).map_err(|e| HarnessError::io(&tmp, e))?;
        f.write_all(&body).and_then(|_| f.sync_all()).map_err(|e| HarnessError::io(&tmp, e))?;
        fs::rename(&tmp, path).map_err(|e| HarnessError::io(path, e))
    }
}
