//! On-disk memo of filtration stages, enabled by `TTGEO_CACHE_DIR`.

use std::fs;
use std::path::PathBuf;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use ttgeo::family::FiltrationStage;
use ttgeo::{Family, FamilySpec, Result};

pub const CACHE_ENV: &str = "TTGEO_CACHE_DIR";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Entry {
    spec: FamilySpec,
    stage: FiltrationStage,
}

#[derive(Debug, Clone)]
pub struct StageCache {
    dir: PathBuf,
}

impl StageCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn from_env() -> Option<Self> {
        std::env::var_os(CACHE_ENV)
            .filter(|d| !d.is_empty())
            .map(Self::new)
    }

    fn path(&self, f: &Family, n: u64) -> PathBuf {
        let name: String = f
            .name()
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
            .collect();
        self.dir.join(format!("stage-{name}-{n}.json"))
    }

    /// Stage `n` of `f`, read from the cache when a valid entry exists and
    /// written back otherwise. Unreadable or stale entries are recomputed.
    pub fn stage(&self, f: &Family, n: u64) -> Result<Arc<FiltrationStage>> {
        let n = f.canonical_index(n)?;
        let path = self.path(f, n);
        if let Ok(text) = fs::read_to_string(&path) {
            if let Ok(entry) = serde_json::from_str::<Entry>(&text) {
                if entry.spec == *f.spec() && f.preload_stage(entry.stage).is_ok() {
                    return f.stage(n);
                }
            }
        }
        let stage = f.stage(n)?;
        let entry = Entry {
            spec: f.spec().clone(),
            stage: (*stage).clone(),
        };
        let written = fs::create_dir_all(&self.dir)
            .and_then(|_| fs::write(&path, serde_json::to_string(&entry).expect("serializable")));
        if let Err(e) = written {
            eprintln!("warning: cannot write {}: {e}", path.display());
        }
        Ok(stage)
    }

    pub fn is_cached(&self, f: &Family, n: u64) -> bool {
        f.canonical_index(n)
            .map(|n| self.path(f, n).is_file())
            .unwrap_or(false)
    }
}
