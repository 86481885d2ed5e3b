//! Per-role randomness derived from one master seed.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

/// Derives an independent ChaCha20 stream for `role` from `seed`.
pub fn derive_rng(seed: u64, role: &str) -> ChaCha20Rng {
    let mut h = Sha256::new();
    h.update(b"gpake-rng");
    h.update((role.len() as u32).to_be_bytes());
    h.update(role.as_bytes());
    h.update(seed.to_be_bytes());
    ChaCha20Rng::from_seed(h.finalize().into())
}

/// One stream per role, so that adding draws in one role never shifts the
/// values another role sees.
#[derive(Debug, Clone)]
pub struct RoleRngs {
    pub client: ChaCha20Rng,
    pub gateway: ChaCha20Rng,
    pub server: ChaCha20Rng,
}

impl RoleRngs {
    pub fn from_seed(seed: u64) -> Self {
        RoleRngs {
            client: derive_rng(seed, "client"),
            gateway: derive_rng(seed, "gateway"),
            server: derive_rng(seed, "server"),
        }
    }
}
