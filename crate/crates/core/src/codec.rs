//! Byte encodings of polynomials, keys and signatures.
//!
//! Every polynomial field is a little-endian bitstream: coefficient i occupies
//! bits [i·w, (i+1)·w). Packers write into caller-provided slices so the batch
//! pool can place outputs at fixed offsets; the `Vec` helpers wrap them.

use crate::error::DecodeError;
use crate::params::{Params, SecurityLevel, D, N, SEED_BYTES};
use crate::ring::Poly;

fn check_len(what: &'static str, bytes: &[u8], expected: usize) -> Result<(), DecodeError> {
    if bytes.len() != expected {
        return Err(DecodeError::Length {
            what,
            expected,
            actual: bytes.len(),
        });
    }
    Ok(())
}

/// Packs N values of `bits` bits each. `out` must be exactly N·bits/8 bytes.
pub fn pack_bits(values: &[u32; N], bits: u32, out: &mut [u8]) {
    assert_eq!(out.len(), N * bits as usize / 8, "packed length");
    out.fill(0);
    let mut acc: u64 = 0;
    let mut filled = 0u32;
    let mut pos = 0;
    for &v in values {
        debug_assert!(v < 1 << bits);
        acc |= (v as u64) << filled;
        filled += bits;
        while filled >= 8 {
            out[pos] = acc as u8;
            pos += 1;
            acc >>= 8;
            filled -= 8;
        }
    }
}

/// Inverse of [`pack_bits`]. `bytes` must be exactly N·bits/8 long.
pub fn unpack_bits(bytes: &[u8], bits: u32) -> [u32; N] {
    assert_eq!(bytes.len(), N * bits as usize / 8, "packed length");
    let mask = (1u64 << bits) - 1;
    let mut out = [0u32; N];
    let mut acc: u64 = 0;
    let mut filled = 0u32;
    let mut bytes = bytes.iter();
    for v in out.iter_mut() {
        while filled < bits {
            acc |= (*bytes.next().expect("length checked") as u64) << filled;
            filled += 8;
        }
        *v = (acc & mask) as u32;
        acc >>= bits;
        filled -= bits;
    }
    out
}

fn pack_offset(p: &Poly, offset: i32, bits: u32, out: &mut [u8]) {
    let vals = p.coeffs.map(|c| (offset - c) as u32);
    pack_bits(&vals, bits, out);
}

fn unpack_offset(bytes: &[u8], offset: i32, bits: u32) -> Poly {
    Poly::from_coeffs(unpack_bits(bytes, bits).map(|v| offset - v as i32))
}

/// t1 coefficients in [0, 2^10).
pub fn pack_t1(p: &Poly, out: &mut [u8]) {
    pack_bits(&p.coeffs.map(|c| c as u32), 10, out);
}

pub fn unpack_t1(bytes: &[u8]) -> Poly {
    Poly::from_coeffs(unpack_bits(bytes, 10).map(|v| v as i32))
}

/// t0 coefficients in (-2^12, 2^12], stored as 2^12 - t0.
pub fn pack_t0(p: &Poly, out: &mut [u8]) {
    pack_offset(p, 1 << (D - 1), D, out);
}

pub fn unpack_t0(bytes: &[u8]) -> Poly {
    unpack_offset(bytes, 1 << (D - 1), D)
}

/// Secret coefficients in [-η, η], stored as η - x.
pub fn pack_eta(p: &Poly, params: &Params, out: &mut [u8]) {
    pack_offset(p, params.eta, params.eta_bits, out);
}

/// Rejects stored values above 2η.
pub fn unpack_eta(bytes: &[u8], params: &Params) -> Result<Poly, DecodeError> {
    let raw = unpack_bits(bytes, params.eta_bits);
    if let Some(index) = raw.iter().position(|&v| v as i32 > 2 * params.eta) {
        return Err(DecodeError::CoefficientRange { what: "eta", index });
    }
    Ok(Poly::from_coeffs(raw.map(|v| params.eta - v as i32)))
}

/// z coefficients in [-γ1+1, γ1], stored as γ1 - z.
pub fn pack_z(p: &Poly, params: &Params, out: &mut [u8]) {
    pack_offset(p, params.gamma1, params.gamma1_bits, out);
}

pub fn unpack_z(bytes: &[u8], params: &Params) -> Poly {
    unpack_offset(bytes, params.gamma1, params.gamma1_bits)
}

/// w1 coefficients in [0, m).
pub fn pack_w1(p: &Poly, params: &Params, out: &mut [u8]) {
    pack_bits(&p.coeffs.map(|c| c as u32), params.w1_bits, out);
}

pub fn unpack_w1(bytes: &[u8], params: &Params) -> Result<Poly, DecodeError> {
    let raw = unpack_bits(bytes, params.w1_bits);
    if let Some(index) = raw.iter().position(|&v| v as i32 >= params.w1_cells()) {
        return Err(DecodeError::CoefficientRange { what: "w1", index });
    }
    Ok(Poly::from_coeffs(raw.map(|v| v as i32)))
}

/// Writes ω position bytes followed by k cumulative counts. Requires weight <= ω.
pub fn encode_hint(h: &[Poly], omega: usize, out: &mut [u8]) {
    assert_eq!(out.len(), omega + h.len(), "hint length");
    out.fill(0);
    let mut k = 0;
    for (i, p) in h.iter().enumerate() {
        for (j, &bit) in p.coeffs.iter().enumerate() {
            if bit != 0 {
                out[k] = j as u8;
                k += 1;
            }
        }
        out[omega + i] = k as u8;
    }
}

/// Strict inverse of [`encode_hint`]: rejects every non-canonical encoding.
pub fn decode_hint(bytes: &[u8], k: usize, omega: usize) -> Result<Vec<Poly>, DecodeError> {
    check_len("hint", bytes, omega + k)?;
    let mut h = vec![Poly::zero(); k];
    let mut start = 0usize;
    for (i, p) in h.iter_mut().enumerate() {
        let end = bytes[omega + i] as usize;
        if end < start || end > omega {
            return Err(DecodeError::Hint(
                "cumulative count out of order or above omega",
            ));
        }
        for j in start..end {
            if j > start && bytes[j] <= bytes[j - 1] {
                return Err(DecodeError::Hint("positions not strictly ascending"));
            }
            p.coeffs[bytes[j] as usize] = 1;
        }
        start = end;
    }
    if bytes[start..omega].iter().any(|&b| b != 0) {
        return Err(DecodeError::Hint("nonzero slack bytes"));
    }
    Ok(h)
}

/// Public key: ρ and t1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PublicKey {
    pub params: &'static Params,
    pub rho: [u8; SEED_BYTES],
    pub t1: Vec<Poly>,
}

/// Secret key: ρ, K, tr, s1, s2, t0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecretKey {
    pub params: &'static Params,
    pub rho: [u8; SEED_BYTES],
    pub key: [u8; SEED_BYTES],
    pub tr: [u8; SEED_BYTES],
    pub s1: Vec<Poly>,
    pub s2: Vec<Poly>,
    pub t0: Vec<Poly>,
}

/// Signature: c̃, z and the hint vector h.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    pub c_tilde: [u8; SEED_BYTES],
    pub z: Vec<Poly>,
    pub h: Vec<Poly>,
}

fn seed(bytes: &[u8]) -> [u8; SEED_BYTES] {
    bytes.try_into().expect("seed slice")
}

impl PublicKey {
    pub fn pack_into(&self, out: &mut [u8]) {
        let p = self.params;
        assert_eq!(out.len(), p.public_key_bytes());
        let (rho, rest) = out.split_at_mut(SEED_BYTES);
        rho.copy_from_slice(&self.rho);
        for (poly, chunk) in self.t1.iter().zip(rest.chunks_exact_mut(p.poly_t1_bytes())) {
            pack_t1(poly, chunk);
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.params.public_key_bytes()];
        self.pack_into(&mut out);
        out
    }

    pub fn from_bytes(level: SecurityLevel, bytes: &[u8]) -> Result<Self, DecodeError> {
        let p = level.params();
        check_len("public key", bytes, p.public_key_bytes())?;
        let (rho, rest) = bytes.split_at(SEED_BYTES);
        let t1 = rest
            .chunks_exact(p.poly_t1_bytes())
            .map(unpack_t1)
            .collect();
        Ok(Self {
            params: p,
            rho: seed(rho),
            t1,
        })
    }
}

impl SecretKey {
    pub fn pack_into(&self, out: &mut [u8]) {
        let p = self.params;
        assert_eq!(out.len(), p.secret_key_bytes());
        out[..SEED_BYTES].copy_from_slice(&self.rho);
        out[SEED_BYTES..2 * SEED_BYTES].copy_from_slice(&self.key);
        out[2 * SEED_BYTES..3 * SEED_BYTES].copy_from_slice(&self.tr);
        let (eta_part, t0_part) =
            out[3 * SEED_BYTES..].split_at_mut((p.l + p.k) * p.poly_eta_bytes());
        for (poly, chunk) in self
            .s1
            .iter()
            .chain(self.s2.iter())
            .zip(eta_part.chunks_exact_mut(p.poly_eta_bytes()))
        {
            pack_eta(poly, p, chunk);
        }
        for (poly, chunk) in self
            .t0
            .iter()
            .zip(t0_part.chunks_exact_mut(p.poly_t0_bytes()))
        {
            pack_t0(poly, chunk);
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.params.secret_key_bytes()];
        self.pack_into(&mut out);
        out
    }

    pub fn from_bytes(level: SecurityLevel, bytes: &[u8]) -> Result<Self, DecodeError> {
        let p = level.params();
        check_len("secret key", bytes, p.secret_key_bytes())?;
        let (eta_part, t0_part) =
            bytes[3 * SEED_BYTES..].split_at((p.l + p.k) * p.poly_eta_bytes());
        let mut secrets = eta_part
            .chunks_exact(p.poly_eta_bytes())
            .map(|c| unpack_eta(c, p))
            .collect::<Result<Vec<_>, _>>()?;
        let s2 = secrets.split_off(p.l);
        Ok(Self {
            params: p,
            rho: seed(&bytes[..SEED_BYTES]),
            key: seed(&bytes[SEED_BYTES..2 * SEED_BYTES]),
            tr: seed(&bytes[2 * SEED_BYTES..3 * SEED_BYTES]),
            s1: secrets,
            s2,
            t0: t0_part
                .chunks_exact(p.poly_t0_bytes())
                .map(unpack_t0)
                .collect(),
        })
    }
}

impl Signature {
    pub fn pack_into(&self, params: &Params, out: &mut [u8]) {
        assert_eq!(out.len(), params.signature_bytes());
        let (c, rest) = out.split_at_mut(SEED_BYTES);
        c.copy_from_slice(&self.c_tilde);
        let (zs, hint) = rest.split_at_mut(params.l * params.poly_z_bytes());
        for (poly, chunk) in self
            .z
            .iter()
            .zip(zs.chunks_exact_mut(params.poly_z_bytes()))
        {
            pack_z(poly, params, chunk);
        }
        encode_hint(&self.h, params.omega, hint);
    }

    pub fn to_bytes(&self, params: &Params) -> Vec<u8> {
        let mut out = vec![0u8; params.signature_bytes()];
        self.pack_into(params, &mut out);
        out
    }

    pub fn from_bytes(params: &Params, bytes: &[u8]) -> Result<Self, DecodeError> {
        check_len("signature", bytes, params.signature_bytes())?;
        let (c, rest) = bytes.split_at(SEED_BYTES);
        let (zs, hint) = rest.split_at(params.l * params.poly_z_bytes());
        Ok(Self {
            c_tilde: seed(c),
            z: zs
                .chunks_exact(params.poly_z_bytes())
                .map(|b| unpack_z(b, params))
                .collect(),
            h: decode_hint(hint, params.k, params.omega)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{LEVEL2, LEVEL3, LEVEL5};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const ALL: [&Params; 3] = [&LEVEL2, &LEVEL3, &LEVEL5];

    fn random_in(rng: &mut ChaCha8Rng, lo: i32, hi: i32) -> Poly {
        let mut p = Poly::zero();
        p.coeffs
            .iter_mut()
            .for_each(|c| *c = rng.gen_range(lo..=hi));
        p
    }

    fn random_hint(rng: &mut ChaCha8Rng, k: usize, omega: usize) -> Vec<Poly> {
        let mut h = vec![Poly::zero(); k];
        for _ in 0..rng.gen_range(0..=omega) {
            h[rng.gen_range(0..k)].coeffs[rng.gen_range(0..N)] = 1;
        }
        h
    }

    /// Bit-at-a-time packer used as an oracle for the word-based one.
    fn naive_pack(values: &[u32; N], bits: u32) -> Vec<u8> {
        let mut out = vec![0u8; N * bits as usize / 8];
        for (i, &v) in values.iter().enumerate() {
            for b in 0..bits as usize {
                let pos = i * bits as usize + b;
                out[pos / 8] |= (((v >> b) & 1) as u8) << (pos % 8);
            }
        }
        out
    }

    proptest! {
        #[test]
        fn pack_bits_matches_naive(bits in 1u32..=24, seed in any::<u64>()) {
            prop_assume!((N * bits as usize).is_multiple_of(8));
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let vals: [u32; N] = std::array::from_fn(|_| rng.gen_range(0..1u32 << bits));
            let mut out = vec![0u8; N * bits as usize / 8];
            pack_bits(&vals, bits, &mut out);
            prop_assert_eq!(&out, &naive_pack(&vals, bits));
            prop_assert_eq!(unpack_bits(&out, bits), vals);
        }
    }

    #[test]
    fn zero_polys_and_boundaries() {
        for p in ALL {
            let mut t1 = vec![0u8; p.poly_t1_bytes()];
            pack_t1(&Poly::zero(), &mut t1);
            assert!(t1.iter().all(|&b| b == 0));
            assert_eq!(unpack_t1(&t1), Poly::zero());

            let mut buf = vec![0u8; p.poly_t0_bytes()];
            for v in [-(1 << 12) + 1, 1 << 12, 0] {
                let poly = Poly::from_coeffs([v; N]);
                pack_t0(&poly, &mut buf);
                assert_eq!(unpack_t0(&buf), poly);
            }
            let mut buf = vec![0u8; p.poly_z_bytes()];
            for v in [-p.gamma1 + 1, p.gamma1, 0] {
                let poly = Poly::from_coeffs([v; N]);
                pack_z(&poly, p, &mut buf);
                assert_eq!(unpack_z(&buf, p), poly);
            }
            let mut buf = vec![0u8; p.poly_eta_bytes()];
            for v in [-p.eta, p.eta, 0] {
                let poly = Poly::from_coeffs([v; N]);
                pack_eta(&poly, p, &mut buf);
                assert_eq!(unpack_eta(&buf, p).unwrap(), poly);
            }
            let mut buf = vec![0u8; p.poly_w1_bytes()];
            let poly = Poly::from_coeffs([p.w1_cells() - 1; N]);
            pack_w1(&poly, p, &mut buf);
            assert_eq!(unpack_w1(&buf, p).unwrap(), poly);
        }
    }

    #[test]
    fn out_of_range_fields_are_rejected() {
        // η = 2 with 3 bits: raw 5 is out of range.
        let mut buf = vec![0u8; LEVEL2.poly_eta_bytes()];
        buf[0] = 5;
        assert_eq!(
            unpack_eta(&buf, &LEVEL2),
            Err(DecodeError::CoefficientRange {
                what: "eta",
                index: 0
            })
        );
        // η = 4 with 4 bits: raw 9 in the second nibble.
        let mut buf = vec![0u8; LEVEL3.poly_eta_bytes()];
        buf[0] = 0x90;
        assert_eq!(
            unpack_eta(&buf, &LEVEL3),
            Err(DecodeError::CoefficientRange {
                what: "eta",
                index: 1
            })
        );
        // 6-bit w1 with 44 cells.
        let mut buf = vec![0u8; LEVEL2.poly_w1_bytes()];
        buf[0] = 44;
        assert!(unpack_w1(&buf, &LEVEL2).is_err());
    }

    #[test]
    fn random_fields_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for p in ALL {
            for _ in 0..1000 {
                let t1 = random_in(&mut rng, 0, 1023);
                let mut b = vec![0u8; p.poly_t1_bytes()];
                pack_t1(&t1, &mut b);
                assert_eq!(unpack_t1(&b), t1);

                let t0 = random_in(&mut rng, -(1 << 12) + 1, 1 << 12);
                let mut b = vec![0u8; p.poly_t0_bytes()];
                pack_t0(&t0, &mut b);
                assert_eq!(unpack_t0(&b), t0);

                let s = random_in(&mut rng, -p.eta, p.eta);
                let mut b = vec![0u8; p.poly_eta_bytes()];
                pack_eta(&s, p, &mut b);
                assert_eq!(unpack_eta(&b, p).unwrap(), s);

                let z = random_in(&mut rng, -p.gamma1 + 1, p.gamma1);
                let mut b = vec![0u8; p.poly_z_bytes()];
                pack_z(&z, p, &mut b);
                assert_eq!(unpack_z(&b, p), z);

                let w1 = random_in(&mut rng, 0, p.w1_cells() - 1);
                let mut b = vec![0u8; p.poly_w1_bytes()];
                pack_w1(&w1, p, &mut b);
                assert_eq!(unpack_w1(&b, p).unwrap(), w1);

                let h = random_hint(&mut rng, p.k, p.omega);
                let mut b = vec![0u8; p.hint_bytes()];
                encode_hint(&h, p.omega, &mut b);
                assert_eq!(decode_hint(&b, p.k, p.omega).unwrap(), h);
            }
        }
    }

    #[test]
    fn hint_examples() {
        let p = &LEVEL2;
        let mut h = vec![Poly::zero(); p.k];
        let mut b = vec![0xffu8; p.hint_bytes()];
        encode_hint(&h, p.omega, &mut b);
        assert!(b.iter().all(|&x| x == 0));
        h[0].coeffs[5] = 1;
        encode_hint(&h, p.omega, &mut b);
        assert_eq!(b[0], 5);
        assert!(b[1..p.omega].iter().all(|&x| x == 0));
        assert!(b[p.omega..].iter().all(|&x| x == 1));
    }

    #[test]
    fn hint_decoding_is_strict() {
        let p = &LEVEL3;
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for _ in 0..500 {
            let h = random_hint(&mut rng, p.k, p.omega);
            let mut b = vec![0u8; p.hint_bytes()];
            encode_hint(&h, p.omega, &mut b);
            let used = b[p.omega + p.k - 1] as usize;
            // Any nonzero slack byte breaks canonicality.
            if used < p.omega {
                let mut bad = b.clone();
                bad[rng.gen_range(used..p.omega)] = rng.gen_range(1..=255);
                assert!(decode_hint(&bad, p.k, p.omega).is_err());
            }
            // Count above omega.
            let mut bad = b.clone();
            bad[p.omega + p.k - 1] = p.omega as u8 + 1;
            assert!(decode_hint(&bad, p.k, p.omega).is_err());
            // Decreasing counts.
            if b[p.omega] > 0 {
                let mut bad = b.clone();
                bad[p.omega + 1] = b[p.omega] - 1;
                assert!(decode_hint(&bad, p.k, p.omega).is_err());
            }
        }
        // Repeated position inside one polynomial.
        let mut b = vec![0u8; p.hint_bytes()];
        b[0] = 3;
        b[1] = 3;
        b[p.omega..].fill(2);
        assert_eq!(
            decode_hint(&b, p.k, p.omega),
            Err(DecodeError::Hint("positions not strictly ascending"))
        );
    }

    #[test]
    fn objects_round_trip_and_reject_bad_lengths() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for level in SecurityLevel::ALL {
            let p = level.params();
            for _ in 0..50 {
                let pk = PublicKey {
                    params: p,
                    rho: rng.gen(),
                    t1: (0..p.k).map(|_| random_in(&mut rng, 0, 1023)).collect(),
                };
                let bytes = pk.to_bytes();
                assert_eq!(bytes.len(), p.public_key_bytes());
                assert_eq!(PublicKey::from_bytes(level, &bytes).unwrap(), pk);
                assert!(PublicKey::from_bytes(level, &bytes[1..]).is_err());

                let sk = SecretKey {
                    params: p,
                    rho: rng.gen(),
                    key: rng.gen(),
                    tr: rng.gen(),
                    s1: (0..p.l)
                        .map(|_| random_in(&mut rng, -p.eta, p.eta))
                        .collect(),
                    s2: (0..p.k)
                        .map(|_| random_in(&mut rng, -p.eta, p.eta))
                        .collect(),
                    t0: (0..p.k)
                        .map(|_| random_in(&mut rng, -(1 << 12) + 1, 1 << 12))
                        .collect(),
                };
                let bytes = sk.to_bytes();
                assert_eq!(bytes.len(), p.secret_key_bytes());
                assert_eq!(SecretKey::from_bytes(level, &bytes).unwrap(), sk);
                assert!(SecretKey::from_bytes(level, &bytes[..bytes.len() - 1]).is_err());

                let sig = Signature {
                    c_tilde: rng.gen(),
                    z: (0..p.l)
                        .map(|_| random_in(&mut rng, -p.gamma1 + 1, p.gamma1))
                        .collect(),
                    h: random_hint(&mut rng, p.k, p.omega),
                };
                let bytes = sig.to_bytes(p);
                assert_eq!(bytes.len(), p.signature_bytes());
                assert_eq!(Signature::from_bytes(p, &bytes).unwrap(), sig);
                assert!(Signature::from_bytes(p, &[]).is_err());
            }
        }
    }
}
