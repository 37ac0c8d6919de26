//! Philox4x32-10 counter-based generator (Salmon et al., "Parallel random
//! numbers: as easy as 1, 2, 3", SC'11).
//!
//! Output is a pure function of `(key, counter)`. The key is the 64-bit seed;
//! the 128-bit counter holds a 64-bit block index in its low words and a
//! 64-bit stream id in its high words. A stream is therefore a `(seed,
//! stream)` pair, and draw `i` of a stream can be computed without touching
//! draws `0..i`, which is what makes parallel simulation reproducible.

const MULT_0: u32 = 0xD251_1F53;
const MULT_1: u32 = 0xCD9E_8D57;
const WEYL_0: u32 = 0x9E37_79B9;
const WEYL_1: u32 = 0xBB67_AE85;
const ROUNDS: usize = 10;

#[inline]
fn mulhilo(a: u32, b: u32) -> (u32, u32) {
    let product = u64::from(a) * u64::from(b);
    ((product >> 32) as u32, product as u32)
}

/// One Philox4x32-10 block.
pub fn philox4x32(counter: [u32; 4], key: [u32; 2]) -> [u32; 4] {
    let mut ctr = counter;
    let mut k = key;
    for round in 0..ROUNDS {
        if round > 0 {
            k[0] = k[0].wrapping_add(WEYL_0);
            k[1] = k[1].wrapping_add(WEYL_1);
        }
        let (hi0, lo0) = mulhilo(MULT_0, ctr[0]);
        let (hi1, lo1) = mulhilo(MULT_1, ctr[2]);
        ctr = [hi1 ^ ctr[1] ^ k[0], lo1, hi0 ^ ctr[3] ^ k[1], lo0];
    }
    ctr
}

/// A `(seed, stream)` substream of Philox output, addressable by index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CounterRng {
    key: [u32; 2],
    stream: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        Self {
            key: [seed as u32, (seed >> 32) as u32],
            stream: 0,
        }
    }

    /// An independent substream derived from this generator's seed.
    pub fn split(self, stream: u64) -> Self {
        Self { stream, ..self }
    }

    pub fn stream(self) -> u64 {
        self.stream
    }

    /// The two 64-bit words of block `block`.
    pub fn block(self, block: u64) -> [u64; 2] {
        let out = philox4x32(
            [
                block as u32,
                (block >> 32) as u32,
                self.stream as u32,
                (self.stream >> 32) as u32,
            ],
            self.key,
        );
        [
            u64::from(out[0]) | (u64::from(out[1]) << 32),
            u64::from(out[2]) | (u64::from(out[3]) << 32),
        ]
    }

    /// The `index`-th 64-bit word of the stream.
    pub fn word(self, index: u64) -> u64 {
        self.block(index / 2)[(index % 2) as usize]
    }

    /// The `index`-th uniform of the stream, strictly inside (0, 1).
    pub fn uniform(self, index: u64) -> f64 {
        to_open_unit(self.word(index))
    }

    /// Sequential iterator over uniforms starting at `start`.
    pub fn uniforms(self, start: u64) -> impl Iterator<Item = f64> {
        (start..).map(move |i| self.uniform(i))
    }
}

/// Top 52 bits mapped to the midpoint grid `(k + 1/2)·2⁻⁵²`, never 0 or 1.
#[inline]
pub fn to_open_unit(word: u64) -> f64 {
    ((word >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
}
