//! Seeded random streams.
//!
//! Every experiment draws from a single user seed. The seed is fanned out to
//! named streams, and each stream is further split by an index (shot number,
//! realization number) so work items can run in any order, or in parallel,
//! and still reproduce bit for bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stream {
    /// Comparator draws `u` for measurement shots.
    Shots,
    /// Hardware noise (AWGN, coefficient jitter).
    Noise,
    /// Dressed-state noise vectors.
    Dressing,
    /// Random gates and random states for ensembles.
    Gates,
    /// Per-setting tomography sampling.
    Tomography,
}

impl Stream {
    fn tag(self) -> u64 {
        match self {
            Stream::Shots => 0x9e37_79b9_7f4a_7c15,
            Stream::Noise => 0xbf58_476d_1ce4_e5b9,
            Stream::Dressing => 0x94d0_49bb_1331_11eb,
            Stream::Gates => 0x2545_f491_4f6c_dd1d,
            Stream::Tomography => 0xd6e8_feb8_6659_fd93,
        }
    }
}

/// Independent generator for work item `index` of `stream` under `seed`.
pub fn stream_rng(seed: u64, stream: Stream, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ stream.tag());
    rng.set_stream(index);
    rng
}
