//! Turns command-line paths into embedding sets.

use std::fs;
use std::path::{Path, PathBuf};

use latent_diversity::io::{load_manifest, read_array, resolve_manifest};
use latent_diversity::{DiversityError, EmbeddingSet, SpaceTag};

use crate::CliError;

const IMAGE_EXTENSIONS: &[&str] = &["png", "jpg", "jpeg", "webp", "bmp", "gif", "tif", "tiff"];

/// A loaded input and the name it goes by in reports.
pub struct Input {
    pub name: String,
    pub set: EmbeddingSet,
}

fn has_extension(path: &Path, exts: &[&str]) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| exts.iter().any(|x| e.eq_ignore_ascii_case(x)))
}

/// Loads a manifest (`*.json`), a directory of `*.npy` files (concatenated in
/// lexicographic order) or a single array file.
pub fn load(path: &Path, space: Option<SpaceTag>) -> Result<Input, CliError> {
    let with_path = |e: DiversityError| CliError::at(path, e);
    let (name, set) = if path.is_dir() {
        (file_stem(path), load_directory(path)?)
    } else if has_extension(path, &["json"]) {
        let manifest = load_manifest(path).map_err(with_path)?;
        let set = resolve_manifest(&manifest).map_err(with_path)?;
        (manifest.set_name.clone(), set)
    } else {
        let payload = read_array(path).map_err(with_path)?;
        let set = EmbeddingSet::from_matrix(payload.matrix).map_err(with_path)?;
        let ids = (0..set.n_samples())
            .map(|r| format!("{}#{r}", path.display()))
            .collect();
        (
            file_stem(path),
            set.with_source_ids(ids).map_err(with_path)?,
        )
    };
    let set = match space {
        Some(tag) => set.retag(tag).map_err(with_path)?,
        None => set,
    };
    Ok(Input { name, set })
}

fn file_stem(path: &Path) -> String {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    name.strip_suffix(".npy")
        .map(str::to_string)
        .unwrap_or(name)
}

fn load_directory(dir: &Path) -> Result<EmbeddingSet, CliError> {
    let entries = fs::read_dir(dir).map_err(|e| {
        CliError::at(
            dir,
            DiversityError::Io {
                path: dir.to_path_buf(),
                source: e,
            },
        )
    })?;
    let mut arrays: Vec<PathBuf> = Vec::new();
    let mut images = 0usize;
    for entry in entries.flatten() {
        let p = entry.path();
        if !p.is_file() {
            continue;
        }
        if has_extension(&p, &["npy"]) {
            arrays.push(p);
        } else if has_extension(&p, IMAGE_EXTENSIONS) {
            images += 1;
        }
    }
    if arrays.is_empty() {
        let reason = if images > 0 {
            format!(
                "directory holds {images} image file(s) but no .npy embeddings; this tool does not run \
                 models. Export embeddings first with the embedder bridge \
                 (`embed images --model <inception_v3_pool3|clip_image> --out <dir>`)"
            )
        } else {
            "directory holds no .npy array files".to_string()
        };
        return Err(CliError::at(
            dir,
            DiversityError::UnsupportedFormat {
                path: dir.to_path_buf(),
                reason,
            },
        ));
    }
    arrays.sort();
    let blocks = arrays
        .iter()
        .map(|p| {
            let payload = read_array(p)?;
            let ids = (0..payload.file.shape.0)
                .map(|r| format!("{}#{r}", p.display()))
                .collect();
            EmbeddingSet::from_matrix(payload.matrix)?.with_source_ids(ids)
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::at(dir, e))?;
    EmbeddingSet::concat(&blocks).map_err(|e| CliError::at(dir, e))
}
