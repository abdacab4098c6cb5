//! Deterministic seed derivation.
//!
//! Per-pass and per-replicate seeds are derived from a single master seed so
//! that runs are replayable and independent implementations can reproduce
//! them: `derive_seed(master, domain, index)` is FNV-1a 64 over the master
//! seed bytes, the domain string, and the index bytes, in that order.

const FNV_OFFSET: u64 = 0xcbf29ce484222325;
const FNV_PRIME: u64 = 0x100000001b3;

/// Derive a child seed from `master` for the given domain label and index.
pub fn derive_seed(master: u64, domain: &str, index: u64) -> u64 {
    let mut h = FNV_OFFSET;
    for b in master
        .to_le_bytes()
        .iter()
        .chain(domain.as_bytes())
        .chain(index.to_le_bytes().iter())
    {
        h ^= *b as u64;
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}
