//! Seed derivation for reproducible, order-independent Monte Carlo.
//!
//! Every random stream in a sweep is keyed by `(master_seed, replication, purpose)`
//! through SplitMix64 finalisation, then fed to ChaCha8. Streams never depend on
//! the order in which replications are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a derived stream is used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Events = 0,
    VolumesAsset1 = 1,
    VolumesAsset2 = 2,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn derive_seed(master_seed: u64, replication: u64, purpose: Purpose) -> u64 {
    let a = splitmix64(master_seed);
    let b = splitmix64(a ^ replication.wrapping_mul(0xd1b5_4a32_d192_ed03));
    splitmix64(b ^ (purpose as u64).wrapping_mul(0x8cb9_2ba7_2f3d_8dd7))
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
