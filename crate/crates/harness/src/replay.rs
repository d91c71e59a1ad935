//! Re-run a recorded experiment and compare checksums.

use std::fs;
use std::path::Path;

use crate::artifacts::{Manifest, MANIFEST_FILE};
use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::pipelines::{run_into, ExperimentRecord};

/// Re-run the experiment recorded by `manifest_path` (a manifest file or
/// its directory) with the manifest's seed, in a scratch directory under
/// `scratch`, and check every recorded file against its checksum.
pub fn replay(manifest_path: &Path, scratch: &Path) -> Result<ExperimentRecord> {
    let manifest_path =
        if manifest_path.is_dir() { manifest_path.join(MANIFEST_FILE) } else { manifest_path.to_path_buf() };
    let manifest = Manifest::read(&manifest_path)?;
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    let config_path = dir.join(&manifest.config_file);
    let text = fs::read_to_string(&config_path).map_err(|e| HarnessError::io(&config_path, e))?;
    let mut config = ExperimentConfig::parse(&text, Some(manifest.kind))?;
    config.seed = manifest.seed;
    config.workers = manifest.workers;

    let target = scratch.join(format!("replay-{}", &manifest.config_hash[..12]));
    if target.exists() {
        fs::remove_dir_all(&target).map_err(|e| HarnessError::io(&target, e))?;
    }
    let record = run_into(&config, &target)?;
    let mut divergent: Vec<String> = manifest
        .files
        .iter()
        .filter(|(name, sum)| record.manifest.files.get(*name) != Some(*sum))
        .map(|(name, _)| name.clone())
        .collect();
    divergent.extend(record.manifest.files.keys().filter(|n| !manifest.files.contains_key(*n)).cloned());
    if !divergent.is_empty() {
        return Err(HarnessError::Reproducibility { divergent });
    }
    Ok(record)
}
