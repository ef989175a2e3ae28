//! Parameter sets for the three security levels.

use std::fmt;
use std::str::FromStr;

use crate::error::ParamError;

/// Ring dimension.
pub const N: usize = 256;
/// Prime modulus q = 2^23 - 2^13 + 1.
pub const Q: i32 = 8_380_417;
/// Dropped bits of `t` in `power2round`.
pub const D: u32 = 13;
/// Seed width in bytes (256-bit seeds: ρ, K, tr, c̃).
pub const SEED_BYTES: usize = 32;
/// Width of collision-resistant hash outputs in bytes (512 bits: ρ′, μ).
pub const CRH_BYTES: usize = 64;

/// NIST security level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SecurityLevel {
    Two,
    Three,
    Five,
}

impl SecurityLevel {
    pub const ALL: [SecurityLevel; 3] = [
        SecurityLevel::Two,
        SecurityLevel::Three,
        SecurityLevel::Five,
    ];

    pub fn from_number(level: u8) -> Result<Self, ParamError> {
        match level {
            2 => Ok(Self::Two),
            3 => Ok(Self::Three),
            5 => Ok(Self::Five),
            other => Err(ParamError::UnknownLevel(other)),
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Self::Two => 2,
            Self::Three => 3,
            Self::Five => 5,
        }
    }

    pub fn params(self) -> &'static Params {
        match self {
            Self::Two => &LEVEL2,
            Self::Three => &LEVEL3,
            Self::Five => &LEVEL5,
        }
    }
}

impl fmt::Display for SecurityLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

impl FromStr for SecurityLevel {
    type Err = ParamError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let n: u8 = s
            .trim()
            .parse()
            .map_err(|_| ParamError::UnparsableLevel(s.to_owned()))?;
        Self::from_number(n)
    }
}

/// Per-level scheme parameters.
///
/// Everything that varies between levels lives here; the ring constants
/// (`N`, `Q`, `D`) are module-level constants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Params {
    pub level: SecurityLevel,
    /// Rows of the public matrix.
    pub k: usize,
    /// Columns of the public matrix.
    pub l: usize,
    /// Number of ±1 coefficients in the challenge.
    pub tau: usize,
    pub gamma1: i32,
    pub gamma2: i32,
    pub eta: i32,
    /// τ·η
    pub beta: i32,
    /// Maximum number of set hint bits.
    pub omega: usize,
    /// Bits per coefficient of packed `z`.
    pub gamma1_bits: u32,
    /// Bits per coefficient of packed `s1`/`s2`.
    pub eta_bits: u32,
    /// Bits per coefficient of packed `w1`.
    pub w1_bits: u32,
}

pub const LEVEL2: Params = Params {
    level: SecurityLevel::Two,
    k: 4,
    l: 4,
    tau: 39,
    gamma1: 1 << 17,
    gamma2: (Q - 1) / 88,
    eta: 2,
    beta: 78,
    omega: 80,
    gamma1_bits: 18,
    eta_bits: 3,
    w1_bits: 6,
};

pub const LEVEL3: Params = Params {
    level: SecurityLevel::Three,
    k: 6,
    l: 5,
    tau: 49,
    gamma1: 1 << 19,
    gamma2: (Q - 1) / 32,
    eta: 4,
    beta: 196,
    omega: 55,
    gamma1_bits: 20,
    eta_bits: 4,
    w1_bits: 4,
};

pub const LEVEL5: Params = Params {
    level: SecurityLevel::Five,
    k: 8,
    l: 7,
    tau: 60,
    gamma1: 1 << 19,
    gamma2: (Q - 1) / 32,
    eta: 2,
    beta: 120,
    omega: 75,
    gamma1_bits: 20,
    eta_bits: 3,
    w1_bits: 4,
};

impl Params {
    /// α = 2γ2, the decomposition modulus.
    pub fn alpha(&self) -> i32 {
        2 * self.gamma2
    }

    /// Number of high-bits cells, (q-1)/α.
    pub fn w1_cells(&self) -> i32 {
        (Q - 1) / self.alpha()
    }

    pub fn poly_t1_bytes(&self) -> usize {
        N * 10 / 8
    }

    pub fn poly_t0_bytes(&self) -> usize {
        N * D as usize / 8
    }

    pub fn poly_eta_bytes(&self) -> usize {
        N * self.eta_bits as usize / 8
    }

    pub fn poly_z_bytes(&self) -> usize {
        N * self.gamma1_bits as usize / 8
    }

    pub fn poly_w1_bytes(&self) -> usize {
        N * self.w1_bits as usize / 8
    }

    pub fn hint_bytes(&self) -> usize {
        self.omega + self.k
    }

    pub fn public_key_bytes(&self) -> usize {
        SEED_BYTES + self.k * self.poly_t1_bytes()
    }

    pub fn secret_key_bytes(&self) -> usize {
        3 * SEED_BYTES + (self.k + self.l) * self.poly_eta_bytes() + self.k * self.poly_t0_bytes()
    }

    pub fn signature_bytes(&self) -> usize {
        SEED_BYTES + self.l * self.poly_z_bytes() + self.hint_bytes()
    }

    /// Expected number of signing attempts per signature.
    pub fn expected_attempts(&self) -> f64 {
        match self.level {
            SecurityLevel::Two => 4.25,
            SecurityLevel::Three => 5.1,
            SecurityLevel::Five => 3.85,
        }
    }
}
