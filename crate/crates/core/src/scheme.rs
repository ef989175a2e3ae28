//! Key generation, signing and verification.
//!
//! Signing is split into [`SignPrecomp`] (per key) and [`sign_attempt`] (one
//! pass of the rejection loop at a given nonce) so that a scheduler can run
//! attempts out of order.

use crate::codec::{pack_w1, PublicKey, SecretKey, Signature};
use crate::error::{DecodeError, ParamError};
use crate::keccak::hash_h;
use crate::params::{Params, SecurityLevel, CRH_BYTES, N, SEED_BYTES};
use crate::ring::{matvec_accumulate, MatrixOrder, NttPoly, Poly};
use crate::round::{self, exceeds, poly_power2round, MAX_NORM_BOUND};
use crate::sample::{expand_mask, expand_matrix, expand_s, matrix_entries, sample_in_ball};

/// A matched key pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeyPair {
    pub public: PublicKey,
    pub secret: SecretKey,
}

/// Deterministic key generation from a 32-byte seed.
pub fn keygen(level: SecurityLevel, zeta: &[u8; SEED_BYTES]) -> KeyPair {
    let p = level.params();
    let seeds = hash_h::<{ 2 * SEED_BYTES + CRH_BYTES }>(&[zeta]);
    let rho: [u8; SEED_BYTES] = seeds[..SEED_BYTES].try_into().expect("split");
    let rho_prime: [u8; CRH_BYTES] = seeds[SEED_BYTES..SEED_BYTES + CRH_BYTES]
        .try_into()
        .expect("split");
    let key: [u8; SEED_BYTES] = seeds[SEED_BYTES + CRH_BYTES..].try_into().expect("split");

    let s1: Vec<Poly> = (0..p.l)
        .map(|i| expand_s(&rho_prime, p.eta, i as u16))
        .collect();
    let s2: Vec<Poly> = (0..p.k)
        .map(|i| expand_s(&rho_prime, p.eta, (p.l + i) as u16))
        .collect();
    let s1_hat: Vec<NttPoly> = s1.iter().cloned().map(Poly::ntt).collect();

    let mut t_hat = vec![NttPoly::zero(); p.k];
    matvec_accumulate(
        MatrixOrder::ColumnMajor,
        matrix_entries(&rho, p.k, p.l, MatrixOrder::ColumnMajor),
        &s1_hat,
        &mut t_hat,
    )
    .expect("matrix stream yields k·ℓ entries");

    let mut t1 = Vec::with_capacity(p.k);
    let mut t0 = Vec::with_capacity(p.k);
    for (t_i, s2_i) in t_hat.into_iter().zip(&s2) {
        let mut t = t_i.intt_tomont();
        t.add_assign(s2_i);
        let (hi, lo) = poly_power2round(&t.canonical());
        t1.push(hi);
        t0.push(lo);
    }

    let public = PublicKey { params: p, rho, t1 };
    let tr = hash_h::<SEED_BYTES>(&[&public.to_bytes()]);
    let secret = SecretKey {
        params: p,
        rho,
        key,
        tr,
        s1,
        s2,
        t0,
    };
    KeyPair { public, secret }
}

/// Rejection bounds used by [`sign_attempt`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RejectionBounds {
    /// ‖z‖∞ must stay below this (γ1 − β).
    pub z: i32,
    /// ‖r0‖∞ must stay below this (γ2 − β).
    pub r0: i32,
    /// ‖c·t0‖∞ must stay below this (γ2).
    pub vt: i32,
}

impl RejectionBounds {
    pub fn for_params(p: &Params) -> Self {
        Self {
            z: p.gamma1 - p.beta,
            r0: p.gamma2 - p.beta,
            vt: p.gamma2,
        }
    }
}

/// Per-key signing state: the secret vectors in NTT form and the cached Â.
#[derive(Clone, Debug)]
pub struct SignPrecomp {
    pub params: &'static Params,
    pub rho: [u8; SEED_BYTES],
    pub key: [u8; SEED_BYTES],
    pub tr: [u8; SEED_BYTES],
    s1_hat: Vec<NttPoly>,
    s2_hat: Vec<NttPoly>,
    t0_hat: Vec<NttPoly>,
    /// Row-major, entry (i, j) at i·ℓ + j.
    a_hat: Vec<NttPoly>,
    bounds: RejectionBounds,
}

impl SignPrecomp {
    pub fn new(sk: &SecretKey) -> Self {
        let p = sk.params;
        let ntt_all = |v: &[Poly]| v.iter().cloned().map(Poly::ntt).collect::<Vec<_>>();
        Self {
            params: p,
            rho: sk.rho,
            key: sk.key,
            tr: sk.tr,
            s1_hat: ntt_all(&sk.s1),
            s2_hat: ntt_all(&sk.s2),
            t0_hat: ntt_all(&sk.t0),
            a_hat: expand_matrix(&sk.rho, p.k, p.l),
            bounds: RejectionBounds::for_params(p),
        }
    }

    /// Replaces the rejection bounds; each must lie in [1, (q-1)/8].
    pub fn with_bounds(mut self, bounds: RejectionBounds) -> Result<Self, ParamError> {
        for b in [bounds.z, bounds.r0, bounds.vt] {
            if !(1..=MAX_NORM_BOUND).contains(&b) {
                return Err(ParamError::NormBoundTooLarge(b));
            }
        }
        self.bounds = bounds;
        Ok(self)
    }

    pub fn bounds(&self) -> RejectionBounds {
        self.bounds
    }

    /// μ = H(tr ‖ M).
    pub fn message_digest(&self, msg: &[u8]) -> [u8; CRH_BYTES] {
        hash_h(&[&self.tr, msg])
    }

    /// Deterministic ρ′ = H(K ‖ μ).
    pub fn derive_rho_prime(&self, mu: &[u8; CRH_BYTES]) -> [u8; CRH_BYTES] {
        hash_h(&[&self.key, mu])
    }
}

/// Check that ended an attempt.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RejectStage {
    ZNorm,
    R0Norm,
    VtNorm,
    HintWeight,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AttemptResult {
    Accept(Signature),
    Reject(RejectStage),
}

impl AttemptResult {
    pub fn is_accept(&self) -> bool {
        matches!(self, AttemptResult::Accept(_))
    }
}

fn highbits_packed(w: &[Poly], p: &Params) -> Vec<u8> {
    let mut out = vec![0u8; p.k * p.poly_w1_bytes()];
    for (w_i, chunk) in w.iter().zip(out.chunks_exact_mut(p.poly_w1_bytes())) {
        pack_w1(w_i, p, chunk);
    }
    out
}

/// One pass of the signing loop with masking nonces κ, κ+1, ..., κ+ℓ−1.
///
/// Norm checks run polynomial by polynomial and stop at the first violation.
pub fn sign_attempt(
    pre: &SignPrecomp,
    mu: &[u8; CRH_BYTES],
    rho_prime: &[u8; CRH_BYTES],
    kappa: u16,
) -> AttemptResult {
    let p = pre.params;
    let gamma2 = p.gamma2;
    let y: Vec<Poly> = (0..p.l)
        .map(|i| expand_mask(rho_prime, p, kappa.wrapping_add(i as u16)))
        .collect();
    let y_hat: Vec<NttPoly> = y.iter().cloned().map(Poly::ntt).collect();

    let mut w_hat = vec![NttPoly::zero(); p.k];
    matvec_accumulate(MatrixOrder::RowMajor, &pre.a_hat, &y_hat, &mut w_hat)
        .expect("cached matrix has k·ℓ entries");
    let mut w1 = Vec::with_capacity(p.k);
    let mut w0 = Vec::with_capacity(p.k);
    for w_i in w_hat {
        let mut w = w_i.intt_tomont();
        w.caddq();
        let (hi, lo) = round::poly_decompose(&w, gamma2);
        w1.push(hi);
        w0.push(lo);
    }

    let c_tilde = hash_h::<SEED_BYTES>(&[mu, &highbits_packed(&w1, p)]);
    let c_hat = sample_in_ball(&c_tilde, p.tau).ntt();

    let mut z = Vec::with_capacity(p.l);
    for (s1_i, y_i) in pre.s1_hat.iter().zip(&y) {
        let mut z_i = c_hat.pointwise_mont(s1_i).intt_tomont();
        z_i.add_assign(y_i);
        z_i.reduce();
        if exceeds(&z_i, pre.bounds.z) {
            return AttemptResult::Reject(RejectStage::ZNorm);
        }
        z.push(z_i);
    }

    // r0 = w0 − c·s2, which equals LowBits(w − c·s2) whenever it passes.
    for (w0_i, s2_i) in w0.iter_mut().zip(&pre.s2_hat) {
        let cs2 = c_hat.pointwise_mont(s2_i).intt_tomont();
        *w0_i = w0_i.sub(&cs2);
        w0_i.reduce();
        if exceeds(w0_i, pre.bounds.r0) {
            return AttemptResult::Reject(RejectStage::R0Norm);
        }
    }

    let mut ct0 = Vec::with_capacity(p.k);
    for t0_i in &pre.t0_hat {
        let mut v = c_hat.pointwise_mont(t0_i).intt_tomont();
        v.reduce();
        if exceeds(&v, pre.bounds.vt) {
            return AttemptResult::Reject(RejectStage::VtNorm);
        }
        ct0.push(v);
    }

    // h = MakeHint(−c·t0, w − c·s2 + c·t0) on canonical operands.
    let mut h = Vec::with_capacity(p.k);
    let mut weight = 0;
    for ((w1_i, r0_i), v_i) in w1.iter().zip(&w0).zip(&ct0) {
        let mut r = Poly::zero();
        for j in 0..N {
            r.coeffs[j] = w1_i.coeffs[j] * 2 * gamma2 + r0_i.coeffs[j] + v_i.coeffs[j];
        }
        let (h_i, wt) = round::poly_make_hint(&v_i.neg().canonical(), &r.canonical(), gamma2);
        weight += wt;
        if weight > p.omega {
            return AttemptResult::Reject(RejectStage::HintWeight);
        }
        h.push(h_i);
    }

    AttemptResult::Accept(Signature { c_tilde, z, h })
}

/// Packed signature plus the number of attempts it took.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignOutput {
    pub signature: Vec<u8>,
    pub attempts: u32,
}

/// Runs the rejection loop from κ = 0 with a given ρ′.
pub fn sign_with_rho_prime(
    pre: &SignPrecomp,
    mu: &[u8; CRH_BYTES],
    rho_prime: &[u8; CRH_BYTES],
) -> SignOutput {
    let mut attempt: u32 = 0;
    loop {
        let kappa = (attempt as usize * pre.params.l) as u16;
        attempt += 1;
        if let AttemptResult::Accept(sig) = sign_attempt(pre, mu, rho_prime, kappa) {
            return SignOutput {
                signature: sig.to_bytes(pre.params),
                attempts: attempt,
            };
        }
    }
}

/// Deterministic signing with precomputed key state.
pub fn sign_precomp(pre: &SignPrecomp, msg: &[u8]) -> SignOutput {
    let mu = pre.message_digest(msg);
    let rho_prime = pre.derive_rho_prime(&mu);
    sign_with_rho_prime(pre, &mu, &rho_prime)
}

/// Randomized signing: ρ′ comes from the caller instead of H(K ‖ μ).
pub fn sign_randomized(pre: &SignPrecomp, msg: &[u8], rho_prime: &[u8; CRH_BYTES]) -> SignOutput {
    let mu = pre.message_digest(msg);
    sign_with_rho_prime(pre, &mu, rho_prime)
}

/// Deterministic signature of `msg`.
pub fn sign(sk: &SecretKey, msg: &[u8]) -> Vec<u8> {
    sign_precomp(&SignPrecomp::new(sk), msg).signature
}

/// Verification that reports malformed signatures separately from invalid ones.
pub fn verify_detailed(pk: &PublicKey, msg: &[u8], sig: &[u8]) -> Result<bool, DecodeError> {
    let p = pk.params;
    let sig = Signature::from_bytes(p, sig)?;
    if sig.z.iter().any(|z_i| exceeds(z_i, p.gamma1 - p.beta)) {
        return Ok(false);
    }
    if round::hint_weight(&sig.h) > p.omega {
        return Ok(false);
    }
    let tr = hash_h::<SEED_BYTES>(&[&pk.to_bytes()]);
    let mu = hash_h::<CRH_BYTES>(&[&tr, msg]);

    let z_hat: Vec<NttPoly> = sig.z.iter().cloned().map(Poly::ntt).collect();
    let mut acc = vec![NttPoly::zero(); p.k];
    matvec_accumulate(
        MatrixOrder::ColumnMajor,
        matrix_entries(&pk.rho, p.k, p.l, MatrixOrder::ColumnMajor),
        &z_hat,
        &mut acc,
    )
    .expect("matrix stream yields k·ℓ entries");

    let c_hat = sample_in_ball(&sig.c_tilde, p.tau).ntt();
    let mut w1 = Vec::with_capacity(p.k);
    for ((acc_i, t1_i), h_i) in acc.iter_mut().zip(&pk.t1).zip(&sig.h) {
        let t1_hat = t1_i.shiftl_d().ntt();
        acc_i.sub_assign(&c_hat.pointwise_mont(&t1_hat));
        acc_i.reduce();
        let mut w = acc_i.clone().intt_tomont();
        w.caddq();
        w1.push(round::poly_use_hint(h_i, &w, p.gamma2));
    }
    let c_check = hash_h::<SEED_BYTES>(&[&mu, &highbits_packed(&w1, p)]);
    Ok(c_check == sig.c_tilde)
}

/// Accept/reject verification; malformed input rejects.
pub fn verify(pk: &PublicKey, msg: &[u8], sig: &[u8]) -> bool {
    matches!(verify_detailed(pk, msg, sig), Ok(true))
}

/// Verification over packed keys.
pub fn verify_bytes(
    level: SecurityLevel,
    pk: &[u8],
    msg: &[u8],
    sig: &[u8],
) -> Result<bool, DecodeError> {
    verify_detailed(&PublicKey::from_bytes(level, pk)?, msg, sig)
}
