//! Test support shared by the atlas crates: seeded random generators for
//! descriptors and registries, and brute-force oracles that recompute results
//! without going through the library's own algorithms.

pub mod corpus;
pub mod gen;
pub mod oracle;

pub use rand;

use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The shipped 12-tool fixture.
pub fn fixture_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/atlas.json")
}

pub fn fixture_text() -> String {
    std::fs::read_to_string(fixture_path()).expect("fixture is readable")
}
