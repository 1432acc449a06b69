//! JSON manifests describing one embedding set spread over array files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::npy::read_array;
use crate::embedding::{EmbeddingSet, SpaceTag};
use crate::error::{DiversityError, Result};
use crate::json::to_stable_string_pretty;

/// One set of artifacts: ordered array files sharing a latent space.
///
/// File paths are resolved relative to the directory holding the manifest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetManifest {
    pub set_name: String,
    pub space_tag: SpaceTag,
    pub files: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub created_by: String,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl SetManifest {
    fn resolve_path(&self, file: &str) -> PathBuf {
        let p = Path::new(file);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }
}

pub fn load_manifest(path: impl AsRef<Path>) -> Result<SetManifest> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| DiversityError::io(path, e))?;
    let mut manifest: SetManifest =
        serde_json::from_str(&text).map_err(|e| DiversityError::InvalidManifest {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
    if manifest.files.is_empty() {
        return Err(DiversityError::InvalidManifest {
            path: path.to_path_buf(),
            reason: "'files' is empty".into(),
        });
    }
    manifest.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok(manifest)
}

pub fn write_manifest(manifest: &SetManifest, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut text =
        to_stable_string_pretty(manifest).map_err(|e| DiversityError::InvalidManifest {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
    text.push('\n');
    fs::write(path, text).map_err(|e| DiversityError::io(path, e))
}

/// Reads every listed file and concatenates the row blocks in order.
pub fn resolve_manifest(manifest: &SetManifest) -> Result<EmbeddingSet> {
    let invalid = |reason: String| DiversityError::InvalidManifest {
        path: manifest
            .base_dir
            .join(format!("{}.manifest.json", manifest.set_name)),
        reason,
    };
    if manifest.files.is_empty() {
        return Err(invalid("'files' is empty".into()));
    }

    let mut blocks = Vec::with_capacity(manifest.files.len());
    let mut dim: Option<(usize, &str)> = None;
    for file in &manifest.files {
        let path = manifest.resolve_path(file);
        let payload = read_array(&path)?;
        let (n, d) = payload.file.shape;
        match dim {
            Some((d0, first)) if d0 != d => {
                return Err(DiversityError::SpaceMismatch(format!(
                    "{} has D = {d} but {first} has D = {d0}",
                    path.display()
                )))
            }
            None => dim = Some((d, file)),
            _ => {}
        }
        manifest.space_tag.check_dimension(d).map_err(|_| {
            DiversityError::SpaceMismatch(format!(
                "{} has D = {d}, manifest declares space {}",
                path.display(),
                manifest.space_tag
            ))
        })?;
        let ids = (0..n).map(|row| format!("{file}#{row}")).collect();
        let block = EmbeddingSet::new(payload.matrix, manifest.space_tag)
            .map_err(|e| match e {
                DiversityError::InvalidData { row, col } => DiversityError::CorruptFile {
                    path: path.clone(),
                    reason: format!("non-finite value at row {row}, column {col}"),
                },
                other => other,
            })?
            .with_source_ids(ids)?;
        blocks.push(block);
    }

    let set = EmbeddingSet::concat(&blocks)?;
    match &manifest.labels {
        Some(labels) if labels.len() != set.n_samples() => Err(invalid(format!(
            "{} labels for {} rows",
            labels.len(),
            set.n_samples()
        ))),
        Some(labels) => set.with_labels(labels.clone()),
        None => Ok(set),
    }
}
