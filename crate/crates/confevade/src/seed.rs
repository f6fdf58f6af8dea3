//! Deterministic seed derivation.
//!
//! All randomness in a campaign flows from one master seed. Sub-seeds are
//! derived by mixing the master with a purpose tag and the cell coordinates
//! (step-size index, displacement index, balanced arm, repetition), so any
//! cell can be recomputed in isolation and parallel execution cannot change
//! results. The mixer is SplitMix64, which is stable across platforms.

/// Purpose tags for derived seeds. Keeping them in one place documents the
/// splitting scheme: master -> (purpose, indices...) -> sub-seed.
pub mod purpose {
    pub const SAMPLE: u64 = 1;
    pub const ORACLE: u64 = 2;
    pub const SPLIT: u64 = 3;
    pub const BALANCE: u64 = 4;
    pub const TRAIN: u64 = 5;
    pub const POOL: u64 = 6;
    pub const POOL_SELECT: u64 = 7;
    pub const POOL_PERTURB: u64 = 8;
    pub const RQ2_ADV: u64 = 9;
    pub const MODEL: u64 = 10;
    pub const CALIBRATE: u64 = 11;
}

/// Fisher-Yates with our seeded generator, so shuffles do not depend on
/// `rand`'s shuffle implementation details staying put across versions.
pub(crate) fn shuffle<T>(items: &mut [T], rng: &mut rand_chacha::ChaCha8Rng) {
    use rand::Rng;
    for i in (1..items.len()).rev() {
        let j = rng.random_range(0..=i);
        items.swap(i, j);
    }
}

fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a sub-seed from `master` and a tag sequence.
pub fn derive_seed(master: u64, tags: &[u64]) -> u64 {
    let mut state = splitmix64(master);
    for &tag in tags {
        state = splitmix64(state ^ splitmix64(tag.wrapping_add(0xA5A5_A5A5_A5A5_A5A5)));
    }
    state
}
