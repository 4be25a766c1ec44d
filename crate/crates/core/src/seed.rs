//! Seed for randomized checks.

/// Environment variable that overrides the default seed of randomized tests.
pub const SEED_ENV: &str = "FIXSCAN_SEED";

const DEFAULT_SEED: u64 = 0x5eed_f1c5;

/// Seed from `FIXSCAN_SEED`, or a fixed default when unset or unparsable.
pub fn test_seed() -> u64 {
    std::env::var(SEED_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_SEED)
}
