//! On-disk artifact: an index directory holding `index.bin`.
//!
//! Layout of `index.bin`: 8-byte magic, little-endian `u32` format version,
//! then the bincode-encoded [`IndexData`]. All collections are ordered, so the
//! encoding is a pure function of the index contents.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::{Index, IndexData};
use crate::error::StoreError;

pub const INDEX_FILE: &str = "index.bin";
pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &[u8; 8] = b"SEMVIZIX";

fn artifact_path(path: &Path) -> PathBuf {
    if path.is_dir() || path.extension().is_none() {
        path.join(INDEX_FILE)
    } else {
        path.to_path_buf()
    }
}

impl Index {
    /// Serializes the index to bytes.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(1 << 20);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        bincode::serialize_into(&mut out, self.data()).expect("in-memory serialization cannot fail");
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Index, StoreError> {
        Self::decode(bytes, Path::new("<memory>"))
    }

    fn decode(bytes: &[u8], path: &Path) -> Result<Index, StoreError> {
        if bytes.len() < 12 || &bytes[..8] != MAGIC {
            return Err(StoreError::BadMagic { path: path.to_path_buf() });
        }
        let version = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
        if version != FORMAT_VERSION {
            return Err(StoreError::Version { path: path.to_path_buf(), found: version, expected: FORMAT_VERSION });
        }
        let data: IndexData = bincode::deserialize(&bytes[12..])
            .map_err(|e| StoreError::Corrupt { path: path.to_path_buf(), reason: e.to_string() })?;
        Ok(Index::from_data(data))
    }

    /// Writes the artifact. `path` is an index directory (created if needed)
    /// or an explicit file path with an extension. Returns the file written.
    pub fn save(&self, path: &Path) -> Result<PathBuf, StoreError> {
        let file = artifact_path(path);
        if let Some(dir) = file.parent() {
            fs::create_dir_all(dir).map_err(|source| StoreError::Io { path: dir.to_path_buf(), source })?;
        }
        let io = |source| StoreError::Io { path: file.clone(), source };
        let tmp = file.with_extension("bin.tmp");
        let mut f = fs::File::create(&tmp).map_err(io)?;
        f.write_all(&self.to_bytes()).map_err(io)?;
        f.sync_all().map_err(io)?;
        fs::rename(&tmp, &file).map_err(io)?;
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Index, StoreError> {
        let file = artifact_path(path);
        let bytes = fs::read(&file).map_err(|source| StoreError::Io { path: file.clone(), source })?;
        Self::decode(&bytes, &file)
    }
}
