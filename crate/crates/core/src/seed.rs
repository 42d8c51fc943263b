//! Labeled seed derivation: every random stream in a run is keyed by a label
//! and a tuple of integers hashed together with SHA-256.

use sha2::{Digest, Sha256};

pub fn derive_seed(label: &str, parts: &[u64]) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update((label.len() as u64).to_le_bytes());
    hasher.update(label.as_bytes());
    for p in parts {
        hasher.update(p.to_le_bytes());
    }
    let digest = hasher.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}
