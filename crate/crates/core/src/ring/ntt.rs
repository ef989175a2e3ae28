//! Negacyclic number-theoretic transform over Z_q[X]/(X^256 + 1).
//!
//! Forward: Cooley-Tukey butterflies, 8 levels, natural order in, bit-reversed
//! order out. Inverse: Gentleman-Sande butterflies with the n^-1 scaling folded
//! into the last level's multiplications.
//!
//! Loop trip counts and table indices depend only on the level, never on
//! coefficient values.

use super::reduce::{mont_reduce, MONT};
use crate::params::{N, Q};

/// Primitive 512-th root of unity modulo q.
pub const ROOT_OF_UNITY: i32 = 1753;

const fn pow_mod(base: i64, mut exp: u32) -> i64 {
    let q = Q as i64;
    let mut b = base.rem_euclid(q);
    let mut acc = 1i64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % q;
        }
        b = b * b % q;
        exp >>= 1;
    }
    acc
}

const fn bitrev8(x: usize) -> usize {
    let mut r = 0;
    let mut i = 0;
    while i < 8 {
        r |= ((x >> i) & 1) << (7 - i);
        i += 1;
    }
    r
}

const fn build_zetas() -> [i32; N] {
    let mut z = [0i32; N];
    let mut i = 1;
    while i < N {
        let w = pow_mod(ROOT_OF_UNITY as i64, bitrev8(i) as u32);
        let mut v = (w * MONT as i64).rem_euclid(Q as i64);
        if v > (Q / 2) as i64 {
            v -= Q as i64;
        }
        z[i] = v as i32;
        i += 1;
    }
    z
}

/// Montgomery-form powers ψ^bitrev8(i)·R mod q, centered. Entry 0 is unused
/// by the butterflies.
pub static ZETAS: [i32; N] = build_zetas();

/// (R^2 / 256) mod q: scales by 256^-1 and lifts into Montgomery form.
const INV_N_TOMONT: i32 = 41_978;
/// (R / 256) mod q = 2^24 mod q: scales by 256^-1 only.
const INV_N_PLAIN: i32 = ((1i64 << 24) % Q as i64) as i32;

const _: () =
    assert!((INV_N_TOMONT as i64 * 256) % Q as i64 == (MONT as i64 * MONT as i64) % Q as i64);

/// Forward transform in place.
///
/// Input coefficients must satisfy |a| < q; outputs satisfy |a| < 9q.
pub(crate) fn forward(a: &mut [i32; N]) {
    let mut k = 0;
    let mut len = 128;
    while len > 0 {
        let mut start = 0;
        while start < N {
            k += 1;
            let zeta = ZETAS[k] as i64;
            for j in start..start + len {
                let t = mont_reduce(zeta * a[j + len] as i64);
                a[j + len] = a[j] - t;
                a[j] += t;
            }
            start += 2 * len;
        }
        len >>= 1;
    }
}

/// Inverse transform in place, output scaled by `scale`·R^-1·(per-level factors).
///
/// Input coefficients must satisfy |a| < q; outputs satisfy |a| < q.
fn inverse_scaled(a: &mut [i32; N], scale: i32) {
    let mut k = N;
    let mut len = 1;
    // Levels 1..7: plain Gentleman-Sande butterflies.
    while len < N / 2 {
        let mut start = 0;
        while start < N {
            k -= 1;
            let zeta = -ZETAS[k] as i64;
            for j in start..start + len {
                let t = a[j];
                a[j] = t + a[j + len];
                a[j + len] = mont_reduce(zeta * (t - a[j + len]) as i64);
            }
            start += 2 * len;
        }
        len <<= 1;
    }
    // Last level: the root for this level is -ZETAS[1]; fold it and the
    // n^-1 scale into a single constant per half.
    let fused = mont_reduce(scale as i64 * -ZETAS[1] as i64) as i64;
    let scale = scale as i64;
    for j in 0..N / 2 {
        let t = a[j] as i64;
        let u = a[j + N / 2] as i64;
        a[j] = mont_reduce(scale * (t + u));
        a[j + N / 2] = mont_reduce(fused * (t - u));
    }
}

/// Exact inverse of [`forward`]: `inverse(forward(f)) ≡ f`.
pub(crate) fn inverse(a: &mut [i32; N]) {
    inverse_scaled(a, INV_N_PLAIN);
}

/// Inverse transform that additionally multiplies by R, cancelling the R^-1
/// left behind by one Montgomery pointwise product.
pub(crate) fn inverse_tomont(a: &mut [i32; N]) {
    inverse_scaled(a, INV_N_TOMONT);
}
