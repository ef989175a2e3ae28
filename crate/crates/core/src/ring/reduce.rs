//! Scalar reductions modulo q.
//!
//! Montgomery arithmetic uses R = 2^32. Everything here is branch-free on the
//! coefficient value.

use crate::params::Q;

/// q^-1 mod 2^32.
pub const QINV: i32 = 58_728_449;

/// R mod q, the Montgomery form of 1.
pub const MONT: i32 = ((1i64 << 32) % Q as i64) as i32;

const _: () = assert!(inverse_mod_2_32(Q as i64) == QINV as i64);
const _: () = assert!((QINV as i64 * Q as i64) & 0xffff_ffff == 1);

/// Inverse of an odd `a` modulo 2^32 via the extended Euclidean algorithm.
pub(crate) const fn inverse_mod_2_32(a: i64) -> i64 {
    let m: i64 = 1 << 32;
    let (mut old_r, mut r) = (a.rem_euclid(m), m);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let quot = old_r / r;
        let tmp = old_r - quot * r;
        old_r = r;
        r = tmp;
        let tmp = old_s - quot * s;
        old_s = s;
        s = tmp;
    }
    // old_r is the gcd; callers only pass odd values so it is 1.
    let inv = old_s.rem_euclid(m);
    // Fold into the signed 32-bit window used by `QINV`.
    if inv >= 1 << 31 {
        inv - m
    } else {
        inv
    }
}

/// Montgomery reduction: for -2^31·q <= a < 2^31·q returns c ≡ a·2^-32 (mod q) with |c| < q.
#[inline]
pub const fn mont_reduce(a: i64) -> i32 {
    debug_assert!(a < (1i64 << 31) * Q as i64 && a >= -(1i64 << 31) * Q as i64);
    let t = (a as i32).wrapping_mul(QINV);
    ((a - t as i64 * Q as i64) >> 32) as i32
}

/// Barrett-style lazy reduction. For |a| < 2^31 - 2^22 the result is
/// congruent to `a` and lies in [-6283008, 6283008].
#[inline]
pub const fn reduce32(a: i32) -> i32 {
    let t = (a + (1 << 22)) >> 23;
    a - t * Q
}

/// Exact centered reduction: returns `a mod± q`, in
/// (-(q+1)/2, q/2] = [-4190208, 4190208], for |a| < 2^31 - 2^22.
#[inline]
pub const fn reduce_centered(a: i32) -> i32 {
    let mut r = reduce32(a);
    // r > (q-1)/2  ->  r - q
    r -= ((Q / 2 - r) >> 31) & Q;
    // r < -(q-1)/2  ->  r + q
    r += ((r + Q / 2) >> 31) & Q;
    r
}

/// Adds q to negative inputs, mapping (-q, q) onto [0, q).
#[inline]
pub const fn caddq(a: i32) -> i32 {
    a + ((a >> 31) & Q)
}

/// Montgomery multiplication a·b·2^-32 mod q.
#[inline]
pub const fn mont_mul(a: i32, b: i32) -> i32 {
    mont_reduce(a as i64 * b as i64)
}
