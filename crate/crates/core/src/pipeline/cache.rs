use std::collections::BTreeMap;
use std::fs::{self, OpenOptions};
use std::io::ErrorKind;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub(crate) fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub(crate) fn file_digest(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(hex_digest(&bytes))
}

/// What a finished stage produced, keyed by the hash of its inputs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub(crate) struct Manifest {
    pub key: String,
    /// Artifact file name → SHA-256 of its contents.
    pub files: BTreeMap<String, String>,
}

impl Manifest {
    pub fn read(path: &Path) -> Option<Manifest> {
        let text = fs::read_to_string(path).ok()?;
        serde_json::from_str(&text).ok()
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    /// True when every artifact is present in `dir` with the recorded hash.
    pub fn artifacts_intact(&self, dir: &Path) -> bool {
        self.files
            .iter()
            .all(|(name, digest)| file_digest(&dir.join(name)).is_ok_and(|d| &d == digest))
    }

    pub fn collect(key: String, dir: &Path, names: &[String]) -> Result<Manifest> {
        let files = names
            .iter()
            .map(|n| Ok((n.clone(), file_digest(&dir.join(n))?)))
            .collect::<Result<_>>()?;
        Ok(Manifest { key, files })
    }
}

/// Advisory lock: a `.lock` file in the cache directory, removed on drop.
#[derive(Debug)]
pub struct CacheLock {
    path: PathBuf,
}

impl CacheLock {
    pub fn acquire(cache_dir: &Path) -> Result<CacheLock> {
        fs::create_dir_all(cache_dir).map_err(|e| Error::io(cache_dir, e))?;
        let path = cache_dir.join(".lock");
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(_) => Ok(CacheLock { path }),
            Err(e) if e.kind() == ErrorKind::AlreadyExists => Err(Error::Config(format!(
                "cache directory {} is in use by another pipeline (remove {} if it is stale)",
                cache_dir.display(),
                path.display()
            ))),
            Err(e) => Err(Error::io(&path, e)),
        }
    }
}

impl Drop for CacheLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}
