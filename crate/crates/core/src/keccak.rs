//! Keccak-f[1600] and the SHAKE128/SHAKE256 extendable-output functions.

use crate::error::XofError;

/// 25 lanes of 64 bits, indexed `x + 5y`.
pub type KeccakState = [u64; 25];

pub const SHAKE128_RATE: usize = 168;
pub const SHAKE256_RATE: usize = 136;

const ROUNDS: usize = 24;

const ROUND_CONSTANTS: [u64; ROUNDS] = [
    0x0000_0000_0000_0001,
    0x0000_0000_0000_8082,
    0x8000_0000_0000_808a,
    0x8000_0000_8000_8000,
    0x0000_0000_0000_808b,
    0x0000_0000_8000_0001,
    0x8000_0000_8000_8081,
    0x8000_0000_0000_8009,
    0x0000_0000_0000_008a,
    0x0000_0000_0000_0088,
    0x0000_0000_8000_8009,
    0x0000_0000_8000_000a,
    0x0000_0000_8000_808b,
    0x8000_0000_0000_008b,
    0x8000_0000_0000_8089,
    0x8000_0000_0000_8003,
    0x8000_0000_0000_8002,
    0x8000_0000_0000_0080,
    0x0000_0000_0000_800a,
    0x8000_0000_8000_000a,
    0x8000_0000_8000_8081,
    0x8000_0000_0000_8080,
    0x0000_0000_8000_0001,
    0x8000_0000_8000_8008,
];

// ρ offsets and π destinations along the lane walk starting at (1, 0).
const RHO: [u32; 24] = [
    1, 3, 6, 10, 15, 21, 28, 36, 45, 55, 2, 14, 27, 41, 56, 8, 25, 43, 62, 18, 39, 61, 20, 44,
];
const PI: [usize; 24] = [
    10, 7, 11, 17, 18, 3, 5, 16, 8, 21, 24, 4, 15, 23, 19, 13, 12, 2, 20, 14, 22, 9, 6, 1,
];

/// The 24-round Keccak-f[1600] permutation, in place.
pub fn keccak_f1600(a: &mut KeccakState) {
    for rc in ROUND_CONSTANTS {
        // θ
        let mut c = [0u64; 5];
        for x in 0..5 {
            c[x] = a[x] ^ a[x + 5] ^ a[x + 10] ^ a[x + 15] ^ a[x + 20];
        }
        for x in 0..5 {
            let d = c[(x + 4) % 5] ^ c[(x + 1) % 5].rotate_left(1);
            for y in 0..5 {
                a[x + 5 * y] ^= d;
            }
        }
        // ρ and π
        let mut carry = a[1];
        for (&rot, &dst) in RHO.iter().zip(PI.iter()) {
            let tmp = a[dst];
            a[dst] = carry.rotate_left(rot);
            carry = tmp;
        }
        // χ
        for y in 0..5 {
            let row = [
                a[5 * y],
                a[5 * y + 1],
                a[5 * y + 2],
                a[5 * y + 3],
                a[5 * y + 4],
            ];
            for x in 0..5 {
                a[5 * y + x] = row[x] ^ (!row[(x + 1) % 5] & row[(x + 2) % 5]);
            }
        }
        // ι
        a[0] ^= rc;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    Absorbing,
    Squeezing,
}

/// Incremental SHAKE state.
///
/// `position` is the byte offset inside the current rate block. While
/// absorbing it stays below the rate; while squeezing it may equal the rate,
/// in which case the next read permutes first.
#[derive(Clone, Debug)]
pub struct XofStream {
    state: KeccakState,
    rate: usize,
    position: usize,
    phase: Phase,
}

impl XofStream {
    pub fn shake128() -> Self {
        Self::with_rate(SHAKE128_RATE)
    }

    pub fn shake256() -> Self {
        Self::with_rate(SHAKE256_RATE)
    }

    fn with_rate(rate: usize) -> Self {
        Self {
            state: [0; 25],
            rate,
            position: 0,
            phase: Phase::Absorbing,
        }
    }

    pub fn rate(&self) -> usize {
        self.rate
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    fn xor_byte(&mut self, pos: usize, byte: u8) {
        self.state[pos / 8] ^= (byte as u64) << (8 * (pos % 8));
    }

    fn get_byte(&self, pos: usize) -> u8 {
        (self.state[pos / 8] >> (8 * (pos % 8))) as u8
    }

    pub fn absorb(&mut self, mut input: &[u8]) -> Result<(), XofError> {
        if self.phase != Phase::Absorbing {
            return Err(XofError::AbsorbAfterFinalize);
        }
        while !input.is_empty() {
            if self.position.is_multiple_of(8) && input.len() >= 8 && self.position + 8 <= self.rate {
                let lane = u64::from_le_bytes(input[..8].try_into().expect("8 bytes"));
                self.state[self.position / 8] ^= lane;
                self.position += 8;
                input = &input[8..];
            } else {
                self.xor_byte(self.position, input[0]);
                self.position += 1;
                input = &input[1..];
            }
            if self.position == self.rate {
                keccak_f1600(&mut self.state);
                self.position = 0;
            }
        }
        Ok(())
    }

    /// Pads with 0x1F ... 0x80 and switches to squeezing. Idempotent.
    pub fn finalize(&mut self) {
        if self.phase == Phase::Squeezing {
            return;
        }
        self.xor_byte(self.position, 0x1f);
        self.xor_byte(self.rate - 1, 0x80);
        keccak_f1600(&mut self.state);
        self.position = 0;
        self.phase = Phase::Squeezing;
    }

    /// Fills `out` with the next output bytes, finalizing first if needed.
    pub fn squeeze(&mut self, out: &mut [u8]) {
        self.finalize();
        let mut i = 0;
        while i < out.len() {
            if self.position == self.rate {
                keccak_f1600(&mut self.state);
                self.position = 0;
            }
            if self.position.is_multiple_of(8) && out.len() - i >= 8 {
                out[i..i + 8].copy_from_slice(&self.state[self.position / 8].to_le_bytes());
                self.position += 8;
                i += 8;
            } else {
                out[i] = self.get_byte(self.position);
                self.position += 1;
                i += 1;
            }
        }
    }

    pub fn squeeze_vec(&mut self, n: usize) -> Vec<u8> {
        let mut out = vec![0u8; n];
        self.squeeze(&mut out);
        out
    }
}

/// SHAKE256 over the concatenation of `parts`, truncated to `OUT` bytes.
pub fn hash_h<const OUT: usize>(parts: &[&[u8]]) -> [u8; OUT] {
    let mut xof = XofStream::shake256();
    for part in parts {
        xof.absorb(part).expect("fresh stream absorbs");
    }
    let mut out = [0u8; OUT];
    xof.squeeze(&mut out);
    out
}

pub fn shake128(input: &[u8], outlen: usize) -> Vec<u8> {
    let mut xof = XofStream::shake128();
    xof.absorb(input).expect("fresh stream absorbs");
    xof.squeeze_vec(outlen)
}

pub fn shake256(input: &[u8], outlen: usize) -> Vec<u8> {
    let mut xof = XofStream::shake256();
    xof.absorb(input).expect("fresh stream absorbs");
    xof.squeeze_vec(outlen)
}
