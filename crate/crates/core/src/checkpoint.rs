//! Versioned, checksummed checkpoint files for long runs.
//!
//! Layout: 8-byte magic, u32 LE format version, u64 LE payload length, JSON
//! payload (a `{kind, data}` envelope), then a 32-byte SHA-256 of everything
//! before the trailer. The checksum is verified before any payload parsing,
//! so truncation and corruption are reported as such rather than as JSON
//! errors.

use std::path::Path;

use serde::{de::DeserializeOwned, Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"KEPCHKP1";
const VERSION: u32 = 1;

/// Payload kind for a quantum run snapshot (`QuantumRunState`).
pub const QUANTUM_KIND: &str = "quantum-run";
/// Payload kind for a classical ensemble snapshot (`EnsemblePartial`).
pub const CLASSICAL_KIND: &str = "classical-ensemble";

#[derive(Serialize, Deserialize)]
struct Envelope<T> {
    kind: String,
    data: T,
}

/// Write `value` as a checkpoint of the given kind.
pub fn save<T: Serialize>(kind: &str, value: &T, path: &Path) -> Result<()> {
    let envelope = Envelope {
        kind: kind.to_string(),
        data: value,
    };
    let payload = serde_json::to_vec(&envelope)
        .map_err(|e| Error::Internal(format!("checkpoint serialization failed: {e}")))?;
    let mut bytes = Vec::with_capacity(payload.len() + 52);
    bytes.extend_from_slice(MAGIC);
    bytes.extend_from_slice(&VERSION.to_le_bytes());
    bytes.extend_from_slice(&(payload.len() as u64).to_le_bytes());
    bytes.extend_from_slice(&payload);
    let digest = Sha256::digest(&bytes);
    bytes.extend_from_slice(&digest);
    std::fs::write(path, &bytes).map_err(|e| Error::io(path, e))
}

/// Read a checkpoint back, validating magic, version, checksum, and kind.
pub fn load<T: DeserializeOwned>(kind: &str, path: &Path) -> Result<T> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.len() < 20 + 32 {
        return Err(Error::Checkpoint("file too short for a checkpoint".into()));
    }
    if &bytes[0..8] != MAGIC {
        return Err(Error::Checkpoint("bad magic: not a checkpoint file".into()));
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
    if version != VERSION {
        return Err(Error::Checkpoint(format!(
            "unsupported checkpoint version {version}, expected {VERSION}"
        )));
    }
    let payload_len = u64::from_le_bytes(bytes[12..20].try_into().unwrap()) as usize;
    let body_len = 20usize
        .checked_add(payload_len)
        .ok_or_else(|| Error::Checkpoint("payload length overflows".into()))?;
    if bytes.len() != body_len + 32 {
        return Err(Error::Checkpoint(format!(
            "length mismatch: header claims {} payload bytes, file has {}",
            payload_len,
            bytes.len().saturating_sub(52)
        )));
    }
    let digest = Sha256::digest(&bytes[..body_len]);
    if digest.as_slice() != &bytes[body_len..] {
        return Err(Error::Checkpoint("checksum mismatch: file corrupted".into()));
    }
    let envelope: Envelope<T> = serde_json::from_slice(&bytes[20..body_len])
        .map_err(|e| Error::Checkpoint(format!("payload parse failed: {e}")))?;
    if envelope.kind != kind {
        return Err(Error::Checkpoint(format!(
            "kind mismatch: file holds {:?}, expected {kind:?}",
            envelope.kind
        )));
    }
    Ok(envelope.data)
}
