//! Content-addressed artifact store. Operator matrices use the checksummed
//! binary format of the core crate; other payloads are JSON behind a
//! SHA-256 header line. Unreadable or mismatching entries are recomputed
//! and overwritten.

use std::fs;
use std::path::{Path, PathBuf};

use ablab_core::transferop::{build_operator, Frame, OperatorMatrix, OperatorMeta, TransferOpError, Variant};
use log::{info, warn};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const CACHE_ENV: &str = "ABLAB_CACHE_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CacheOutcome {
    Hit,
    Miss,
    /// The stored entry was corrupt and has been rebuilt.
    Recomputed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEvent {
    pub kind: String,
    pub key: String,
    pub outcome: CacheOutcome,
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes through a temporary sibling and renames into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes).map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

impl Cache {
    /// `$ABLAB_CACHE_DIR` when set, otherwise `<outdir>/cache`.
    pub fn locate(outdir: &Path) -> Self {
        let dir = std::env::var_os(CACHE_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| outdir.join("cache"));
        Self { dir }
    }

    pub fn at(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn operator_path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.abto"))
    }

    /// The operator for these parameters, built only on a miss.
    pub fn operator(
        &self,
        energy: f64,
        lambda: f64,
        n_max: usize,
        quadrature: usize,
        variant: Variant,
        frame: Frame,
    ) -> Result<(OperatorMatrix, CacheEvent), CliError> {
        let key = OperatorMeta {
            energy,
            lambda,
            n_max,
            quadrature,
            variant,
            frame,
            quadrature_change: 0.0,
        }
        .cache_key();
        let path = self.operator_path(&key);
        let mut outcome = CacheOutcome::Miss;
        if let Ok(bytes) = fs::read(&path) {
            match OperatorMatrix::from_bytes(&bytes) {
                Ok(op) if op.meta.cache_key() == key => {
                    info!("cache hit: operator {key}");
                    return Ok((op, event("operator", key, CacheOutcome::Hit)));
                }
                Ok(_) => {
                    warn!("cache entry {key} holds a different operator; recomputing");
                    outcome = CacheOutcome::Recomputed;
                }
                Err(e) => {
                    warn!("{e}; recomputing {key}");
                    outcome = CacheOutcome::Recomputed;
                }
            }
        }
        info!("cache miss: building operator {key}");
        let op = build_operator(energy, lambda, n_max, quadrature, variant, frame)
            .map_err(|e: TransferOpError| CliError::stage("build_operator", e))?;
        write_atomic(&path, &op.to_bytes())?;
        Ok((op, event("operator", key, outcome)))
    }

    /// A JSON payload keyed by the hash of `(kind, key_material)`.
    pub fn json<K, T, F>(&self, kind: &str, key_material: &K, compute: F) -> Result<(T, CacheEvent), CliError>
    where
        K: Serialize,
        T: Serialize + DeserializeOwned,
        F: FnOnce() -> Result<T, CliError>,
    {
        let material = serde_json::to_vec(&(kind, key_material)).expect("key serializes");
        let key = sha256_hex(&material);
        let path = self.dir.join(format!("{key}.json"));
        let mut outcome = CacheOutcome::Miss;
        if let Ok(text) = fs::read_to_string(&path) {
            match decode_json::<T>(&text) {
                Some(v) => {
                    info!("cache hit: {kind} {key}");
                    return Ok((v, event(kind, key, CacheOutcome::Hit)));
                }
                None => {
                    warn!("corrupt cache entry {kind} {key}; recomputing");
                    outcome = CacheOutcome::Recomputed;
                }
            }
        }
        info!("cache miss: computing {kind} {key}");
        let value = compute()?;
        let body = serde_json::to_string(&value).expect("payload serializes");
        let text = format!("{}\n{body}", sha256_hex(body.as_bytes()));
        write_atomic(&path, text.as_bytes())?;
        Ok((value, event(kind, key, outcome)))
    }
}

fn decode_json<T: DeserializeOwned>(text: &str) -> Option<T> {
    let (digest, body) = text.split_once('\n')?;
    if sha256_hex(body.as_bytes()) != digest {
        return None;
    }
    serde_json::from_str(body).ok()
}

fn event(kind: &str, key: String, outcome: CacheOutcome) -> CacheEvent {
    CacheEvent {
        kind: kind.to_string(),
        key,
        outcome,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operator_hit_miss_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::at(dir.path());
        let build = || cache.operator(0.5, 0.2, 8, 128, Variant::Plain, Frame::Tilde).unwrap();
        let (a, e1) = build();
        assert_eq!(e1.outcome, CacheOutcome::Miss);
        let (b, e2) = build();
        assert_eq!(e2.outcome, CacheOutcome::Hit);
        assert_eq!(a, b);

        let (_, e3) = cache.operator(0.5, 0.2, 8, 256, Variant::Plain, Frame::Tilde).unwrap();
        assert_eq!(e3.outcome, CacheOutcome::Miss);

        let path = cache.operator_path(&e1.key);
        let bytes = fs::read(&path).unwrap();
        fs::write(&path, &bytes[..bytes.len() / 2]).unwrap();
        let (c, e4) = build();
        assert_eq!(e4.outcome, CacheOutcome::Recomputed);
        assert_eq!(a, c);
        assert_eq!(build().1.outcome, CacheOutcome::Hit);
    }

    #[test]
    fn json_entries_are_checksummed() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::at(dir.path());
        let get = |v: u32| cache.json("demo", &("k", 1), || Ok(vec![v, v + 1])).unwrap();
        let (v, e) = get(1);
        assert_eq!((v, e.outcome), (vec![1, 2], CacheOutcome::Miss));
        let (v, e) = get(7);
        assert_eq!((v, e.outcome), (vec![1, 2], CacheOutcome::Hit));
        let path = dir.path().join(format!("{}.json", e.key));
        let text = fs::read_to_string(&path).unwrap().replace("[1,2]", "[1,3]");
        fs::write(&path, text).unwrap();
        let (v, e) = get(7);
        assert_eq!((v, e.outcome), (vec![7, 8], CacheOutcome::Recomputed));
    }
}
