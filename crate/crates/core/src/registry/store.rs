use std::io;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use thiserror::Error;

use super::persist::{load_registry, save_registry, LoadError};
use super::workflow::Registry;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("cannot read `{path}`: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("`{path}`: {source}")]
    Load { path: PathBuf, source: LoadError },
}

#[derive(Debug, Error)]
pub enum MutateError<E> {
    /// The mutation itself refused; nothing changed.
    #[error(transparent)]
    Rejected(E),
    /// The mutation succeeded but could not be written; nothing changed.
    #[error("failed to persist registry: {0}")]
    Persist(#[source] io::Error),
}

/// Single-writer, multi-reader holder of the registry.
///
/// Readers take an `Arc` snapshot and never observe a partial mutation.
/// Writers are serialized; each works on a copy, persists it (when backed by
/// a file) and only then publishes it.
#[derive(Debug)]
pub struct RegistryStore {
    current: RwLock<Arc<Registry>>,
    writer: Mutex<()>,
    path: Option<PathBuf>,
}

impl RegistryStore {
    pub fn in_memory(registry: Registry) -> Self {
        RegistryStore {
            current: RwLock::new(Arc::new(registry)),
            writer: Mutex::new(()),
            path: None,
        }
    }

    pub fn open(path: impl AsRef<Path>) -> Result<Self, StoreError> {
        let path = path.as_ref().to_path_buf();
        let text = std::fs::read_to_string(&path).map_err(|source| StoreError::Read {
            path: path.clone(),
            source,
        })?;
        let registry = load_registry(&text).map_err(|source| StoreError::Load {
            path: path.clone(),
            source,
        })?;
        Ok(RegistryStore {
            current: RwLock::new(Arc::new(registry)),
            writer: Mutex::new(()),
            path: Some(path),
        })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn snapshot(&self) -> Arc<Registry> {
        Arc::clone(&self.current.read().unwrap_or_else(|e| e.into_inner()))
    }

    pub fn mutate<T, E>(
        &self,
        f: impl FnOnce(&mut Registry) -> Result<T, E>,
    ) -> Result<T, MutateError<E>> {
        let _guard = self.writer.lock().unwrap_or_else(|e| e.into_inner());
        let mut next = (*self.snapshot()).clone();
        let out = f(&mut next).map_err(MutateError::Rejected)?;
        if let Some(path) = &self.path {
            write_atomically(path, &save_registry(&next)).map_err(MutateError::Persist)?;
        }
        *self.current.write().unwrap_or_else(|e| e.into_inner()) = Arc::new(next);
        Ok(out)
    }
}

fn write_atomically(path: &Path, contents: &str) -> io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)
}
