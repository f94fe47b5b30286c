use std::fs;
use std::path::{Path, PathBuf};

use super::model::{RegistryEntry, RegistryKey};
use crate::{Error, Result};

/// Environment variable overriding the registry location.
pub const REGISTRY_ENV: &str = "WEATHERGEN_REGISTRY";

/// Directory of fitted models, one JSON document per model.
#[derive(Debug, Clone)]
pub struct ModelRegistry {
    root: PathBuf,
}

/// Entries read from a registry at one point in time, sorted by file name.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RegistrySnapshot {
    pub entries: Vec<RegistryEntry>,
}

impl ModelRegistry {
    /// Open (creating if needed) the registry at `root`.
    pub fn open(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(|e| Error::io(&root, e))?;
        Ok(Self { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn path_of(&self, key: &RegistryKey) -> PathBuf {
        self.root.join(key.file_name())
    }

    /// Serialized form written by [`put`](Self::put).
    pub fn to_bytes(entry: &RegistryEntry) -> Result<Vec<u8>> {
        let mut bytes = serde_json::to_vec_pretty(entry)?;
        bytes.push(b'\n');
        Ok(bytes)
    }

    /// Store `entry`, replacing any entry with the same key. The write goes
    /// through a temporary file and a rename so readers never see a partial
    /// document.
    pub fn put(&self, entry: &RegistryEntry) -> Result<PathBuf> {
        let path = self.path_of(&entry.key);
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, Self::to_bytes(entry)?).map_err(|e| Error::io(&tmp, e))?;
        fs::rename(&tmp, &path).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }

    pub fn get(&self, key: &RegistryKey) -> Result<Option<RegistryEntry>> {
        let path = self.path_of(key);
        if !path.exists() {
            return Ok(None);
        }
        Self::read(&path).map(Some)
    }

    pub fn read(path: &Path) -> Result<RegistryEntry> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_slice(&bytes)?)
    }

    pub fn remove(&self, key: &RegistryKey) -> Result<bool> {
        let path = self.path_of(key);
        if !path.exists() {
            return Ok(false);
        }
        fs::remove_file(&path).map_err(|e| Error::io(&path, e))?;
        Ok(true)
    }

    /// Registry file names, sorted.
    pub fn list(&self) -> Result<Vec<String>> {
        let mut names = Vec::new();
        for item in fs::read_dir(&self.root).map_err(|e| Error::io(&self.root, e))? {
            let item = item.map_err(|e| Error::io(&self.root, e))?;
            let name = item.file_name().to_string_lossy().into_owned();
            if name.ends_with(".json") {
                names.push(name);
            }
        }
        names.sort();
        Ok(names)
    }

    pub fn snapshot(&self) -> Result<RegistrySnapshot> {
        let entries = self
            .list()?
            .iter()
            .map(|n| Self::read(&self.root.join(n)))
            .collect::<Result<Vec<_>>>()?;
        Ok(RegistrySnapshot { entries })
    }
}
