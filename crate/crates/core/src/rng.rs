//! Counter-based random streams.
//!
//! Every replicate owns a ChaCha8 stream selected by `(master_seed, stream_id)`.
//! ChaCha is a counter-mode generator, so the output of a stream depends only on
//! that pair and never on how many other streams were consumed before it.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Golden-ratio increment of splitmix64.
pub const SPLITMIX_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// splitmix64 finalizer. A bijection on `u64`.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stream id of replicate `replicate` under `master_seed`:
/// `mix64(master_seed + GAMMA * (replicate + 1))` in wrapping arithmetic.
///
/// `GAMMA` is odd, so distinct replicate indices map to distinct ids.
pub fn derive_stream_id(master_seed: u64, replicate: u64) -> u64 {
    mix64(master_seed.wrapping_add(SPLITMIX_GAMMA.wrapping_mul(replicate.wrapping_add(1))))
}

/// Identifies the stream a sample was drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedInfo {
    pub master_seed: u64,
    pub stream_id: u64,
}

/// Source of the primitive draws consumed by the samplers.
pub trait UniformStream {
    /// Uniform on `(0, 1]`.
    fn next_unit(&mut self) -> f64;
    /// Fair coin.
    fn next_bit(&mut self) -> bool;

    fn seed_info(&self) -> Option<SeedInfo> {
        None
    }
}

/// Seeded ChaCha8 stream.
#[derive(Clone, Debug)]
pub struct Stream {
    master_seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl Stream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(stream_id);
        Stream {
            master_seed,
            stream_id,
            rng,
        }
    }

    /// Stream for replicate `replicate` of a run seeded with `master_seed`.
    pub fn for_replicate(master_seed: u64, replicate: u64) -> Self {
        Self::new(master_seed, derive_stream_id(master_seed, replicate))
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }
}

impl UniformStream for Stream {
    fn next_unit(&mut self) -> f64 {
        // 53 random bits shifted into (0, 1].
        ((self.rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    fn next_bit(&mut self) -> bool {
        self.rng.next_u64() >> 63 == 1
    }

    fn seed_info(&self) -> Option<SeedInfo> {
        Some(SeedInfo {
            master_seed: self.master_seed,
            stream_id: self.stream_id,
        })
    }
}

/// Replays a fixed script of draws; used to pin sampler outputs in tests.
///
/// Panics when the script runs out.
#[derive(Clone, Debug, Default)]
pub struct ScriptedStream {
    units: Vec<f64>,
    bits: Vec<bool>,
    unit_pos: usize,
    bit_pos: usize,
}

impl ScriptedStream {
    pub fn new(units: Vec<f64>, bits: Vec<bool>) -> Self {
        ScriptedStream {
            units,
            bits,
            unit_pos: 0,
            bit_pos: 0,
        }
    }

    pub fn units_consumed(&self) -> usize {
        self.unit_pos
    }

    pub fn bits_consumed(&self) -> usize {
        self.bit_pos
    }
}

impl UniformStream for ScriptedStream {
    fn next_unit(&mut self) -> f64 {
        let u = self.units[self.unit_pos];
        self.unit_pos += 1;
        u
    }

    fn next_bit(&mut self) -> bool {
        let b = self.bits[self.bit_pos];
        self.bit_pos += 1;
        b
    }
}
