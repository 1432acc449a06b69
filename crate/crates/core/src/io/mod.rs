//! Array files and set manifests: the transport between embedders and the
//! numerical engine.

mod manifest;
mod npy;

pub use manifest::{load_manifest, resolve_manifest, write_manifest, SetManifest};
pub use npy::{read_array, write_array, ArrayFile, ArrayPayload, Dtype};
