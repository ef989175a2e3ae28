//! Expansion of seeds into matrix entries, secrets, masks and challenges.

use crate::codec::unpack_z;
use crate::keccak::{XofStream, SHAKE128_RATE, SHAKE256_RATE};
use crate::params::{Params, CRH_BYTES, N, Q, SEED_BYTES};
use crate::ring::{MatrixOrder, NttPoly, Poly};

/// Appends the accepted candidates to `out[ctr..]` in input order, stopping
/// once `out` is full. Returns the new count.
pub fn rej_compact<F>(candidates: &[u32], accept: F, out: &mut [i32], mut ctr: usize) -> usize
where
    F: Fn(u32) -> bool,
{
    debug_assert!(ctr <= out.len());
    for &c in candidates {
        if ctr == out.len() {
            break;
        }
        if accept(c) {
            out[ctr] = c as i32;
            ctr += 1;
        }
    }
    ctr
}

/// Matrix entry Â_{i,j}, uniform in [0, q) and read as an NTT-domain value.
pub fn expand_a(rho: &[u8; SEED_BYTES], i: usize, j: usize) -> NttPoly {
    let nonce = ((i << 8) | j) as u16;
    let mut xof = XofStream::shake128();
    xof.absorb(rho).expect("fresh stream");
    xof.absorb(&nonce.to_le_bytes()).expect("fresh stream");
    let mut out = NttPoly::zero();
    let mut block = [0u8; SHAKE128_RATE];
    let mut cands = [0u32; SHAKE128_RATE / 3];
    let mut ctr = 0;
    while ctr < N {
        xof.squeeze(&mut block);
        for (c, b) in cands.iter_mut().zip(block.chunks_exact(3)) {
            *c = u32::from_le_bytes([b[0], b[1], b[2], 0]) & 0x7f_ffff;
        }
        ctr = rej_compact(&cands, |t| t < Q as u32, &mut out.coeffs, ctr);
    }
    out
}

/// Secret polynomial with coefficients in [-η, η].
pub fn expand_s(rho_prime: &[u8; CRH_BYTES], eta: i32, nonce: u16) -> Poly {
    debug_assert!(eta == 2 || eta == 4);
    let mut xof = XofStream::shake256();
    xof.absorb(rho_prime).expect("fresh stream");
    xof.absorb(&nonce.to_le_bytes()).expect("fresh stream");
    let limit = if eta == 2 { 15 } else { 9 };
    let mut out = Poly::zero();
    let mut block = [0u8; SHAKE256_RATE];
    let mut nibbles = [0u32; 2 * SHAKE256_RATE];
    let mut ctr = 0;
    while ctr < N {
        xof.squeeze(&mut block);
        for (pair, b) in nibbles.chunks_exact_mut(2).zip(block.iter()) {
            pair[0] = (b & 0x0f) as u32;
            pair[1] = (b >> 4) as u32;
        }
        let start = ctr;
        ctr = rej_compact(&nibbles, |t| t < limit, &mut out.coeffs, ctr);
        for c in &mut out.coeffs[start..ctr] {
            *c = if eta == 2 {
                2 - (*c - ((205 * *c) >> 10) * 5)
            } else {
                4 - *c
            };
        }
    }
    out
}

/// Masking polynomial with coefficients in [-γ1+1, γ1].
pub fn expand_mask(rho_prime: &[u8; CRH_BYTES], params: &Params, nonce: u16) -> Poly {
    let mut xof = XofStream::shake256();
    xof.absorb(rho_prime).expect("fresh stream");
    xof.absorb(&nonce.to_le_bytes()).expect("fresh stream");
    let mut buf = [0u8; 640];
    let buf = &mut buf[..params.poly_z_bytes()];
    xof.squeeze(buf);
    unpack_z(buf, params)
}

/// Challenge with exactly τ coefficients in {-1, 1}.
pub fn sample_in_ball(c_tilde: &[u8; SEED_BYTES], tau: usize) -> Poly {
    let mut xof = XofStream::shake256();
    xof.absorb(c_tilde).expect("fresh stream");
    let mut block = [0u8; SHAKE256_RATE];
    xof.squeeze(&mut block);
    let mut signs = u64::from_le_bytes(block[..8].try_into().expect("8 bytes"));
    let mut pos = 8;
    let mut c = Poly::zero();
    for i in N - tau..N {
        let b = loop {
            if pos == SHAKE256_RATE {
                xof.squeeze(&mut block);
                pos = 0;
            }
            let b = block[pos] as usize;
            pos += 1;
            if b <= i {
                break b;
            }
        };
        c.coeffs[i] = c.coeffs[b];
        c.coeffs[b] = 1 - 2 * (signs & 1) as i32;
        signs >>= 1;
    }
    c
}

/// Lazily expanded entries of Â (k rows, ℓ columns) in the given order.
pub fn matrix_entries(
    rho: &[u8; SEED_BYTES],
    k: usize,
    l: usize,
    order: MatrixOrder,
) -> impl Iterator<Item = NttPoly> + '_ {
    (0..k * l).map(move |idx| match order {
        MatrixOrder::RowMajor => expand_a(rho, idx / l, idx % l),
        MatrixOrder::ColumnMajor => expand_a(rho, idx % k, idx / k),
    })
}

/// Â materialized row-major: entry (i, j) at index i·ℓ + j.
pub fn expand_matrix(rho: &[u8; SEED_BYTES], k: usize, l: usize) -> Vec<NttPoly> {
    matrix_entries(rho, k, l, MatrixOrder::RowMajor).collect()
}
