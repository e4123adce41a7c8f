//! Seeds and purpose-labelled substreams.
//!
//! Every stage draws from its own ChaCha8 stream whose key is a SHA-256 of
//! the parent seed and a label, so stages can be rerun in isolation and the
//! output never depends on the platform or on thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seed(pub u64);

impl Seed {
    /// Child seed for `label`; distinct labels give independent streams.
    pub fn derive(self, label: &str) -> Seed {
        self.derive_indexed(label, &[])
    }

    pub fn derive_indexed(self, label: &str, indices: &[u64]) -> Seed {
        let mut hasher = Sha256::new();
        hasher.update(self.0.to_le_bytes());
        hasher.update((label.len() as u64).to_le_bytes());
        hasher.update(label.as_bytes());
        for i in indices {
            hasher.update(i.to_le_bytes());
        }
        let digest = hasher.finalize();
        let mut word = [0u8; 8];
        word.copy_from_slice(&digest[..8]);
        Seed(u64::from_le_bytes(word))
    }

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

impl From<u64> for Seed {
    fn from(v: u64) -> Self {
        Seed(v)
    }
}
