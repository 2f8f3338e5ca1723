//! Result persistence: JSON-lines records, append-only run logs, and
//! resumable checkpoints for long sweeps.
//!
//! One record per line, UTF-8, with all integers as decimal strings so
//! downstream tools never truncate past 53 bits.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{SystemTime, UNIX_EPOCH};

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed record in {path}: {message}")]
    Corrupt { path: PathBuf, message: String },
    #[error(
        "checkpoint {path} belongs to a different run (digest {found}, expected {expected}); \
         delete it or pass a matching instance"
    )]
    DigestMismatch {
        path: PathBuf,
        expected: String,
        found: String,
    },
}

/// Provenance record appended after every search or census run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    #[serde(with = "crate::arith::serde_u64_str")]
    pub started_unix_ms: u64,
    #[serde(with = "crate::arith::serde_u64_str")]
    pub finished_unix_ms: u64,
    pub summary: serde_json::Value,
    pub version: String,
}

impl RunRecord {
    pub fn begin(command: &str, parameters: BTreeMap<String, String>) -> Self {
        RunRecord {
            command: command.to_string(),
            parameters,
            started_unix_ms: now_ms(),
            finished_unix_ms: 0,
            summary: serde_json::Value::Null,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn finish(mut self, summary: serde_json::Value) -> Self {
        self.finished_unix_ms = now_ms();
        self.summary = summary;
        self
    }
}

pub fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

/// Appends one JSON record as a line to `path`, creating the file if
/// needed.
pub fn append_jsonl<T: Serialize>(path: &Path, record: &T) -> Result<(), StoreError> {
    let mut file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|source| StoreError::Io {
            path: path.to_path_buf(),
            source,
        })?;
    let mut line = serde_json::to_string(record).expect("records serialize");
    line.push('\n');
    file.write_all(line.as_bytes()).map_err(|source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads every line of a JSON-lines file into `T`.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, StoreError> {
    let file = File::open(path).map_err(|source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut out = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|source| StoreError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(
            serde_json::from_str(&line).map_err(|e| StoreError::Corrupt {
                path: path.to_path_buf(),
                message: format!("line {}: {e}", idx + 1),
            })?,
        );
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct CheckpointHeader {
    schema: String,
    digest: String,
    #[serde(with = "crate::arith::serde_u64_str")]
    total_masks: u64,
    #[serde(with = "crate::arith::serde_u64_str")]
    chunk_size: u64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(bound = "T: Serialize + DeserializeOwned")]
struct CheckpointChunk<T> {
    chunk: u64,
    hits: Vec<T>,
}

const CHECKPOINT_SCHEMA: &str = "sweep-checkpoint/v1";

/// Append-only progress file for a chunked sweep.
///
/// The first line pins the instance digest and chunking; each further line
/// records one completed chunk with its hits. Resuming against a file whose
/// digest disagrees with the live instance is refused.
#[derive(Debug)]
pub struct CheckpointFile {
    path: PathBuf,
    writer: Mutex<File>,
}

impl CheckpointFile {
    /// Opens (verifying the header) or creates (writing it) a checkpoint,
    /// returning the handle plus any chunks already completed.
    pub fn open_or_create<T: Serialize + DeserializeOwned>(
        path: &Path,
        digest: &str,
        total_masks: u64,
        chunk_size: u64,
    ) -> Result<(Self, BTreeMap<u64, Vec<T>>), StoreError> {
        let mut done = BTreeMap::new();
        if path.exists() {
            let file = File::open(path).map_err(|source| StoreError::Io {
                path: path.to_path_buf(),
                source,
            })?;
            let mut lines = BufReader::new(file).lines();
            let header_line = lines
                .next()
                .transpose()
                .map_err(|source| StoreError::Io {
                    path: path.to_path_buf(),
                    source,
                })?
                .ok_or_else(|| StoreError::Corrupt {
                    path: path.to_path_buf(),
                    message: "empty checkpoint file".into(),
                })?;
            let header: CheckpointHeader =
                serde_json::from_str(&header_line).map_err(|e| StoreError::Corrupt {
                    path: path.to_path_buf(),
                    message: format!("header: {e}"),
                })?;
            if header.digest != digest {
                return Err(StoreError::DigestMismatch {
                    path: path.to_path_buf(),
                    expected: digest.to_string(),
                    found: header.digest,
                });
            }
            if header.schema != CHECKPOINT_SCHEMA
                || header.total_masks != total_masks
                || header.chunk_size != chunk_size
            {
                return Err(StoreError::Corrupt {
                    path: path.to_path_buf(),
                    message: "checkpoint chunking disagrees with this run".into(),
                });
            }
            for (idx, line) in lines.enumerate() {
                let line = line.map_err(|source| StoreError::Io {
                    path: path.to_path_buf(),
                    source,
                })?;
                if line.trim().is_empty() {
                    continue;
                }
                let chunk: CheckpointChunk<T> =
                    serde_json::from_str(&line).map_err(|e| StoreError::Corrupt {
                        path: path.to_path_buf(),
                        message: format!("chunk line {}: {e}", idx + 2),
                    })?;
                done.insert(chunk.chunk, chunk.hits);
            }
        } else {
            let header = CheckpointHeader {
                schema: CHECKPOINT_SCHEMA.to_string(),
                digest: digest.to_string(),
                total_masks,
                chunk_size,
            };
            append_jsonl(path, &header)?;
        }
        let writer = OpenOptions::new()
            .append(true)
            .open(path)
            .map_err(|source| StoreError::Io {
                path: path.to_path_buf(),
                source,
            })?;
        Ok((
            CheckpointFile {
                path: path.to_path_buf(),
                writer: Mutex::new(writer),
            },
            done,
        ))
    }

    /// Durably records one finished chunk. Safe to call from worker threads.
    pub fn record_chunk<T: Serialize + DeserializeOwned + Clone>(
        &self,
        chunk: u64,
        hits: &[T],
    ) -> Result<(), StoreError> {
        let record = CheckpointChunk {
            chunk,
            hits: hits.to_vec(),
        };
        let mut line = serde_json::to_string(&record).expect("records serialize");
        line.push('\n');
        let mut writer = self.writer.lock().expect("checkpoint lock");
        writer
            .write_all(line.as_bytes())
            .and_then(|_| writer.flush())
            .map_err(|source| StoreError::Io {
                path: self.path.clone(),
                source,
            })
    }
}
