//! Rounding: power-of-two split, high/low bits, hints and norm checks.
//!
//! Scalar functions take canonical inputs in [0, q). The two supported values
//! of γ2 are (q-1)/88 and (q-1)/32; decompose is written as branch-free
//! arithmetic selects for both.

use crate::error::ParamError;
use crate::params::{D, N, Q};
use crate::ring::{reduce_centered, Poly};

const GAMMA2_88: i32 = (Q - 1) / 88;
const GAMMA2_32: i32 = (Q - 1) / 32;

/// Largest admissible norm bound.
pub const MAX_NORM_BOUND: i32 = (Q - 1) / 8;

/// a = a1·2^13 + a0 with a0 ∈ (-2^12, 2^12].
#[inline]
pub fn power2round(a: i32) -> (i32, i32) {
    let a1 = (a + (1 << (D - 1)) - 1) >> D;
    (a1, a - (a1 << D))
}

/// Splits r into (r1, r0) with r ≡ r1·2γ2 + r0 and r1 ∈ [0, (q-1)/2γ2).
#[inline]
pub fn decompose(r: i32, gamma2: i32) -> (i32, i32) {
    debug_assert!(gamma2 == GAMMA2_88 || gamma2 == GAMMA2_32);
    let mut r1 = (r + 127) >> 7;
    if gamma2 == GAMMA2_88 {
        r1 = (r1 * 11275 + (1 << 23)) >> 24;
        // 44 wraps to 0
        r1 ^= ((43 - r1) >> 31) & r1;
    } else {
        r1 = (r1 * 1025 + (1 << 21)) >> 22;
        r1 &= 15;
    }
    let mut r0 = r - r1 * 2 * gamma2;
    r0 -= (((Q - 1) / 2 - r0) >> 31) & Q;
    (r1, r0)
}

#[inline]
pub fn highbits(r: i32, gamma2: i32) -> i32 {
    decompose(r, gamma2).0
}

#[inline]
pub fn lowbits(r: i32, gamma2: i32) -> i32 {
    decompose(r, gamma2).1
}

/// True iff adding z to r changes the high bits.
#[inline]
pub fn make_hint(z: i32, r: i32, gamma2: i32) -> bool {
    let mut sum = z + r;
    sum -= ((Q - 1 - sum) >> 31) & Q;
    highbits(r, gamma2) != highbits(sum, gamma2)
}

/// Recovers highbits(r + z) from r and the hint bit.
#[inline]
pub fn use_hint(h: bool, r: i32, gamma2: i32) -> i32 {
    let (r1, r0) = decompose(r, gamma2);
    if !h {
        return r1;
    }
    if gamma2 == GAMMA2_32 {
        if r0 > 0 {
            (r1 + 1) & 15
        } else {
            (r1 - 1) & 15
        }
    } else if r0 > 0 {
        if r1 == 43 {
            0
        } else {
            r1 + 1
        }
    } else if r1 == 0 {
        43
    } else {
        r1 - 1
    }
}

/// Norm check without bound validation. True means some coefficient has
/// centered absolute value >= bound.
#[inline]
pub(crate) fn exceeds(f: &Poly, bound: i32) -> bool {
    f.coeffs.iter().any(|&a| {
        let c = reduce_centered(a);
        let abs = c - ((c >> 31) & (2 * c));
        abs >= bound
    })
}

/// Infinity-norm check; `Ok(true)` means reject.
pub fn chknorm(f: &Poly, bound: i32) -> Result<bool, ParamError> {
    if bound > MAX_NORM_BOUND {
        return Err(ParamError::NormBoundTooLarge(bound));
    }
    Ok(exceeds(f, bound))
}

/// Number of set hint bits across the vector.
pub fn hint_weight(h: &[Poly]) -> usize {
    h.iter()
        .map(|p| p.coeffs.iter().filter(|&&b| b != 0).count())
        .sum()
}

/// Coefficient-wise [`power2round`] of a canonical polynomial.
pub fn poly_power2round(a: &Poly) -> (Poly, Poly) {
    let mut hi = Poly::zero();
    let mut lo = Poly::zero();
    for i in 0..N {
        (hi.coeffs[i], lo.coeffs[i]) = power2round(a.coeffs[i]);
    }
    (hi, lo)
}

/// Coefficient-wise [`decompose`] of a canonical polynomial.
pub fn poly_decompose(a: &Poly, gamma2: i32) -> (Poly, Poly) {
    let mut hi = Poly::zero();
    let mut lo = Poly::zero();
    for i in 0..N {
        (hi.coeffs[i], lo.coeffs[i]) = decompose(a.coeffs[i], gamma2);
    }
    (hi, lo)
}

/// Coefficient-wise [`make_hint`]; returns the 0/1 polynomial and its weight.
pub fn poly_make_hint(z: &Poly, r: &Poly, gamma2: i32) -> (Poly, usize) {
    let mut h = Poly::zero();
    let mut weight = 0;
    for i in 0..N {
        let bit = make_hint(z.coeffs[i], r.coeffs[i], gamma2);
        h.coeffs[i] = bit as i32;
        weight += bit as usize;
    }
    (h, weight)
}

/// Coefficient-wise [`use_hint`].
pub fn poly_use_hint(h: &Poly, r: &Poly, gamma2: i32) -> Poly {
    let mut out = Poly::zero();
    for i in 0..N {
        out.coeffs[i] = use_hint(h.coeffs[i] != 0, r.coeffs[i], gamma2);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const GAMMAS: [i32; 2] = [GAMMA2_88, GAMMA2_32];

    /// Centered remainder in (-m/2, m/2].
    fn mod_pm(r: i64, m: i64) -> i64 {
        let mut x = r.rem_euclid(m);
        if x > m / 2 {
            x -= m;
        }
        x
    }

    fn decompose_oracle(r: i32, gamma2: i32) -> (i32, i32) {
        let alpha = 2 * gamma2 as i64;
        let r = r as i64;
        let r0 = mod_pm(r, alpha);
        if r - r0 == Q as i64 - 1 {
            (0, (r0 - 1) as i32)
        } else {
            (((r - r0) / alpha) as i32, r0 as i32)
        }
    }

    #[test]
    fn power2round_examples() {
        assert_eq!(power2round(0), (0, 0));
        assert_eq!(power2round(4096), (0, 4096));
        assert_eq!(power2round(Q - 1), (1023, 0));
    }

    #[test]
    fn power2round_exhaustive() {
        for a in 0..Q {
            let (a1, a0) = power2round(a);
            assert_eq!(a1 * (1 << D) + a0, a);
            assert!(a0 > -(1 << 12) && a0 <= 1 << 12, "a={a}");
            assert_eq!(a0 as i64, mod_pm(a as i64, 1 << D));
        }
    }

    #[test]
    fn decompose_examples() {
        assert_eq!(decompose(0, GAMMA2_88), (0, 0));
        assert_eq!(decompose(380_928, GAMMA2_88), (2, 0));
        assert_eq!(decompose(Q - 1, GAMMA2_88), (0, -1));
        assert_eq!(decompose(Q - 1, GAMMA2_32), (0, -1));
        assert_eq!(highbits(380_928, GAMMA2_88), 2);
        assert_eq!(lowbits(Q - 1, GAMMA2_32), -1);
    }

    #[test]
    fn decompose_exhaustive() {
        for gamma2 in GAMMAS {
            let alpha = 2 * gamma2;
            let m = (Q - 1) / alpha;
            for r in 0..Q {
                let (r1, r0) = decompose(r, gamma2);
                assert_eq!((r1, r0), decompose_oracle(r, gamma2), "r={r}");
                assert!((0..m).contains(&r1));
                assert_eq!(
                    (r1 as i64 * alpha as i64 + r0 as i64 - r as i64).rem_euclid(Q as i64),
                    0
                );
            }
        }
    }

    #[test]
    fn use_hint_examples() {
        assert_eq!(use_hint(true, 1, GAMMA2_32), 1);
        assert_eq!(use_hint(true, Q - 1, GAMMA2_32), 15);
        assert_eq!(use_hint(true, Q - 1, GAMMA2_88), 43);
        assert_eq!(use_hint(false, 380_928, GAMMA2_88), 2);
        assert!(!make_hint(0, 12345, GAMMA2_88));
        assert!(!make_hint(1, 0, GAMMA2_88));
    }

    #[test]
    fn hint_lemma_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for gamma2 in GAMMAS {
            let m = (Q - 1) / (2 * gamma2);
            for _ in 0..1_000_000 {
                let r = rng.gen_range(0..Q);
                let z = rng.gen_range(-gamma2..=gamma2);
                let zc = z.rem_euclid(Q);
                let h = make_hint(zc, r, gamma2);
                let target = highbits((r + zc) % Q, gamma2);
                assert_eq!(use_hint(h, r, gamma2), target, "r={r} z={z}");
                let diff = (use_hint(h, r, gamma2) - highbits(r, gamma2)).rem_euclid(m);
                assert!(diff == 0 || diff == 1 || diff == m - 1);
            }
        }
    }

    #[test]
    fn chknorm_examples_and_oracle() {
        assert_eq!(chknorm(&Poly::zero(), 1), Ok(false));
        let mut p = Poly::zero();
        p.coeffs[0] = Q - 1;
        assert_eq!(chknorm(&p, 1), Ok(true));
        assert_eq!(
            chknorm(&p, MAX_NORM_BOUND + 1),
            Err(ParamError::NormBoundTooLarge(MAX_NORM_BOUND + 1))
        );

        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..2000 {
            let spread = rng.gen_range(1..Q);
            let mut f = Poly::zero();
            f.coeffs
                .iter_mut()
                .for_each(|c| *c = rng.gen_range(-spread..spread));
            let bound = rng.gen_range(1..=MAX_NORM_BOUND);
            let max_abs = f
                .coeffs
                .iter()
                .map(|&c| mod_pm(c as i64, Q as i64).abs())
                .max()
                .unwrap();
            assert_eq!(chknorm(&f, bound), Ok(max_abs >= bound as i64));
        }
    }

    #[test]
    fn hint_weight_counts() {
        let mut h = vec![Poly::zero(); 4];
        assert_eq!(hint_weight(&h), 0);
        h[2].coeffs[7] = 1;
        assert_eq!(hint_weight(&h), 1);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..100 {
            let mut count = 0;
            for p in h.iter_mut() {
                for c in p.coeffs.iter_mut() {
                    *c = rng.gen_bool(0.05) as i32;
                    count += *c as usize;
                }
            }
            assert_eq!(hint_weight(&h), count);
        }
    }

    #[test]
    fn poly_wrappers_agree_with_scalars() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let mut a = Poly::zero();
        a.coeffs.iter_mut().for_each(|c| *c = rng.gen_range(0..Q));
        let (hi, lo) = poly_power2round(&a);
        for i in 0..N {
            assert_eq!((hi.coeffs[i], lo.coeffs[i]), power2round(a.coeffs[i]));
        }
        let (hi, lo) = poly_decompose(&a, GAMMA2_88);
        let (h, w) = poly_make_hint(&lo.canonical(), &a, GAMMA2_88);
        assert_eq!(w, hint_weight(std::slice::from_ref(&h)));
        let used = poly_use_hint(&h, &a, GAMMA2_88);
        for i in 0..N {
            assert_eq!(hi.coeffs[i], decompose(a.coeffs[i], GAMMA2_88).0);
            assert_eq!(
                used.coeffs[i],
                use_hint(h.coeffs[i] != 0, a.coeffs[i], GAMMA2_88)
            );
        }
    }
}
