//! Content-addressed on-disk cache for census rows.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::census::{enumerate, CensusError, CensusRow, ClassName, Connectivity};

/// Bumped whenever the census output changes shape.
const FORMAT: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CacheError {
    #[error(transparent)]
    Census(#[from] CensusError),
    #[error("cache i/o: {0}")]
    Io(#[from] io::Error),
    #[error("corrupt cache entry {path}: {source}")]
    Corrupt { path: PathBuf, source: serde_json::Error },
}

pub struct CensusCache {
    dir: PathBuf,
}

impl CensusCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        CensusCache { dir: dir.into() }
    }

    /// `$SUBCRIT_CACHE`, else `fallback`.
    pub fn from_env(fallback: impl Into<PathBuf>) -> Self {
        match std::env::var_os("SUBCRIT_CACHE") {
            Some(d) if !d.is_empty() => Self::new(d),
            _ => Self::new(fallback),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn key(class: ClassName, n: usize, connectivity: Connectivity) -> String {
        let mut h = Sha256::new();
        h.update(format!("census/{FORMAT}/{class}/{n}/{connectivity}"));
        hex::encode(h.finalize())
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(&key[..2]).join(format!("{key}.json"))
    }

    pub fn get(&self, class: ClassName, n: usize, connectivity: Connectivity) -> Result<Option<CensusRow>, CacheError> {
        let path = self.path(&Self::key(class, n, connectivity));
        match fs::read_to_string(&path) {
            Ok(text) => serde_json::from_str(&text).map(Some).map_err(|source| CacheError::Corrupt { path, source }),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e.into()),
        }
    }

    pub fn put(&self, row: &CensusRow) -> Result<(), CacheError> {
        let path = self.path(&Self::key(row.class, row.n, row.connectivity));
        fs::create_dir_all(path.parent().expect("cache paths have a parent"))?;
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, row.to_json())?;
        fs::rename(tmp, path)?;
        Ok(())
    }

    /// Cached census, computing and storing it on a miss.
    pub fn census(&self, class: ClassName, n: usize, connectivity: Connectivity) -> Result<CensusRow, CacheError> {
        if let Some(row) = self.get(class, n, connectivity)? {
            return Ok(row);
        }
        let row = enumerate(class, n, connectivity)?;
        self.put(&row)?;
        Ok(row)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_through_disk() {
        let dir = std::env::temp_dir().join(format!("subcrit-cache-test-{}", std::process::id()));
        let cache = CensusCache::new(&dir);
        assert!(cache.get(ClassName::Trees, 4, Connectivity::Connected).unwrap().is_none());
        let row = cache.census(ClassName::Trees, 4, Connectivity::Connected).unwrap();
        assert_eq!(cache.get(ClassName::Trees, 4, Connectivity::Connected).unwrap(), Some(row));
        fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn keys_differ_by_parameters() {
        let a = CensusCache::key(ClassName::Sp, 5, Connectivity::All);
        let b = CensusCache::key(ClassName::Sp, 5, Connectivity::Connected);
        assert_ne!(a, b);
        assert_eq!(a.len(), 64);
    }
}
