//! Seed derivation for independent random streams.
//!
//! Every consumer of randomness (world generation, the visit stream, each GA
//! run, each replication) draws from its own generator whose seed is derived
//! from a base seed and a stream tag. Changing how many numbers one consumer
//! draws never shifts the numbers another consumer sees.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_pcg::Pcg64Mcg;

pub type SimRng = ChaCha8Rng;

/// Named sub-streams of a base seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    World,
    Visits,
    Ga,
    Replication,
    Evaluation,
}

impl Stream {
    fn tag(self) -> u64 {
        match self {
            Stream::World => 0x5752_4c44,
            Stream::Visits => 0x5653_4954,
            Stream::Ga => 0x4741_5f5f,
            Stream::Replication => 0x5245_504c,
            Stream::Evaluation => 0x4556_414c,
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed of sub-stream `index` of `stream` under `base`.
pub fn derive_seed(base: u64, stream: Stream, index: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(base) ^ stream.tag()) ^ index)
}

pub fn stream_rng(base: u64, stream: Stream, index: u64) -> SimRng {
    SimRng::seed_from_u64(derive_seed(base, stream, index))
}

/// Small generator used for the handful of draws a single visit needs.
pub type VisitRng = Pcg64Mcg;

/// Per-visit generators of one simulation seed. Visit `seq` always gets the
/// same generator, so every simulation mode sees the same draws for the same visit.
#[derive(Debug, Clone, Copy)]
pub struct VisitStreams {
    base: u64,
}

impl VisitStreams {
    pub fn new(seed: u64) -> Self {
        Self { base: derive_seed(seed, Stream::Visits, 0) }
    }

    pub fn for_visit(&self, visit_seq: u64) -> VisitRng {
        VisitRng::seed_from_u64(splitmix64(self.base ^ splitmix64(visit_seq)))
    }
}

pub fn visit_rng(seed: u64, visit_seq: u64) -> VisitRng {
    VisitStreams::new(seed).for_visit(visit_seq)
}
