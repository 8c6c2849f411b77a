//! Shared setup helpers for the criterion benchmarks.

use asl_core::sensing::{LogPolicy, SignalInstance, SensingOracle};
use asl_core::support::{sample_support, SupportClass};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Builds a fresh oracle over a uniformly drawn member of the class.
pub fn seeded_oracle(class: &SupportClass, mu: f64, seed: u64) -> SensingOracle {
    let mut srng = ChaCha8Rng::seed_from_u64(seed);
    let support = sample_support(class, &mut srng).expect("sample support");
    let instance = SignalInstance::new(support, mu).expect("instance");
    let mut nrng = ChaCha8Rng::seed_from_u64(seed);
    nrng.set_stream(1);
    SensingOracle::with_log(instance, nrng, None, LogPolicy::Off)
}
