//! Labeled, hash-split seed derivation.
//!
//! Every random stream in the crate is derived from one master seed through a
//! tree of `(label, index)` children, so streams for different purposes never
//! collide and results do not depend on scheduling or worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// A node in the seed-derivation tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeedTree {
    key: [u8; 32],
}

impl SeedTree {
    /// Root node for a 64-bit master seed.
    pub fn from_master(master: u64) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(b"uarnc-seed-root");
        hasher.update(master.to_le_bytes());
        SeedTree { key: hasher.finalize().into() }
    }

    /// Child stream for a purpose label and an index within that purpose.
    pub fn child(&self, label: &str, index: u64) -> SeedTree {
        let mut hasher = Sha256::new();
        hasher.update(self.key);
        hasher.update([label.len() as u8]);
        hasher.update(label.as_bytes());
        hasher.update(index.to_le_bytes());
        SeedTree { key: hasher.finalize().into() }
    }

    /// Generator seeded from this node.
    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::from_seed(self.key)
    }
}
