use sha2::{Digest, Sha256};

/// Base seed used when neither the config nor the environment provides one.
pub const DEFAULT_BASE_SEED: u64 = 42;
pub const SEED_ENV: &str = "INERTIA_ID_SEED";

/// Per-run seed from the grid coordinates.
///
/// Depends only on the run's own coordinates, so dropping other grid values never changes it.
pub fn derive_seed(base: u64, satellite: &str, profile: &str, mode: &str, seed: u64) -> u64 {
    let mut h = Sha256::new();
    h.update(base.to_le_bytes());
    for part in [satellite, profile, mode] {
        h.update((part.len() as u64).to_le_bytes());
        h.update(part.as_bytes());
    }
    h.update(seed.to_le_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("sha256 digest has 32 bytes"))
}
