//! Arithmetic in Z_q and R_q = Z_q[X]/(X^256 + 1).
//!
//! Polynomials come in two types, [`Poly`] for the normal (coefficient)
//! domain and [`NttPoly`] for the transformed domain, so the domain of every
//! value is fixed at compile time. Coefficients are `i32` and reduced lazily;
//! each operation documents the bound it expects and the bound it produces.

mod ntt;
pub mod reduce;

pub use ntt::{ROOT_OF_UNITY, ZETAS};
pub use reduce::{caddq, mont_reduce, reduce32, reduce_centered, MONT, QINV};

use std::borrow::Borrow;

use crate::error::RingError;
use crate::params::{D, N};

/// Ring element in the coefficient domain.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Poly {
    pub coeffs: [i32; N],
}

/// Ring element in the NTT domain.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NttPoly {
    pub coeffs: [i32; N],
}

impl Default for Poly {
    fn default() -> Self {
        Self::zero()
    }
}

impl Default for NttPoly {
    fn default() -> Self {
        Self::zero()
    }
}

impl Poly {
    pub const fn zero() -> Self {
        Self { coeffs: [0; N] }
    }

    pub const fn from_coeffs(coeffs: [i32; N]) -> Self {
        Self { coeffs }
    }

    /// Forward NTT. Requires |coeff| < q; the result has |coeff| < 9q.
    pub fn ntt(mut self) -> NttPoly {
        ntt::forward(&mut self.coeffs);
        NttPoly {
            coeffs: self.coeffs,
        }
    }

    /// Coefficient-wise sum without reduction.
    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn add_assign(&mut self, other: &Poly) {
        for (a, b) in self.coeffs.iter_mut().zip(other.coeffs.iter()) {
            *a += b;
        }
    }

    /// Coefficient-wise difference without reduction.
    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(other.coeffs.iter()) {
            *a -= b;
        }
        out
    }

    pub fn neg(&self) -> Poly {
        let mut out = self.clone();
        for a in out.coeffs.iter_mut() {
            *a = -*a;
        }
        out
    }

    /// Multiplies every coefficient by 2^d. Requires |coeff| < 2^(31-d).
    pub fn shiftl_d(&self) -> Poly {
        let mut out = self.clone();
        for a in out.coeffs.iter_mut() {
            *a <<= D;
        }
        out
    }

    /// Lazy reduction to |coeff| <= 6283008.
    pub fn reduce(&mut self) {
        self.coeffs.iter_mut().for_each(|a| *a = reduce32(*a));
    }

    /// Exact centered representatives in (-(q+1)/2, q/2].
    pub fn reduce_centered(&mut self) {
        self.coeffs
            .iter_mut()
            .for_each(|a| *a = reduce_centered(*a));
    }

    /// Maps (-q, q) onto [0, q).
    pub fn caddq(&mut self) {
        self.coeffs.iter_mut().for_each(|a| *a = caddq(*a));
    }

    /// Canonical representatives in [0, q).
    pub fn canonical(&self) -> Poly {
        let mut out = self.clone();
        out.coeffs
            .iter_mut()
            .for_each(|a| *a = caddq(reduce_centered(*a)));
        out
    }
}

impl NttPoly {
    pub const fn zero() -> Self {
        Self { coeffs: [0; N] }
    }

    pub const fn from_coeffs(coeffs: [i32; N]) -> Self {
        Self { coeffs }
    }

    /// Exact inverse of [`Poly::ntt`]. Requires |coeff| < q; result |coeff| < q.
    pub fn intt(mut self) -> Poly {
        ntt::inverse(&mut self.coeffs);
        Poly {
            coeffs: self.coeffs,
        }
    }

    /// Inverse NTT followed by multiplication with R = 2^32. This is the
    /// inverse to use after [`NttPoly::pointwise_mont`], whose R^-1 it cancels.
    pub fn intt_tomont(mut self) -> Poly {
        ntt::inverse_tomont(&mut self.coeffs);
        Poly {
            coeffs: self.coeffs,
        }
    }

    /// c_i = mont_reduce(a_i · b_i); requires |a_i·b_i| <= 2^31·q, gives |c_i| < q.
    pub fn pointwise_mont(&self, other: &NttPoly) -> NttPoly {
        let mut out = NttPoly::zero();
        for ((c, a), b) in out
            .coeffs
            .iter_mut()
            .zip(self.coeffs.iter())
            .zip(other.coeffs.iter())
        {
            *c = mont_reduce(*a as i64 * *b as i64);
        }
        out
    }

    /// self += a ∘ b (Montgomery pointwise product), unreduced.
    pub fn pointwise_acc(&mut self, a: &NttPoly, b: &NttPoly) {
        for ((c, x), y) in self
            .coeffs
            .iter_mut()
            .zip(a.coeffs.iter())
            .zip(b.coeffs.iter())
        {
            *c += mont_reduce(*x as i64 * *y as i64);
        }
    }

    pub fn add_assign(&mut self, other: &NttPoly) {
        for (a, b) in self.coeffs.iter_mut().zip(other.coeffs.iter()) {
            *a += b;
        }
    }

    pub fn sub_assign(&mut self, other: &NttPoly) {
        for (a, b) in self.coeffs.iter_mut().zip(other.coeffs.iter()) {
            *a -= b;
        }
    }

    /// Lazy reduction to |coeff| <= 6283008.
    pub fn reduce(&mut self) {
        self.coeffs.iter_mut().for_each(|a| *a = reduce32(*a));
    }
}

/// Traversal order of the public matrix in [`matvec_accumulate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixOrder {
    /// Â_{0,0}, Â_{0,1}, ..., Â_{0,ℓ-1}, Â_{1,0}, ...
    RowMajor,
    /// Â_{0,0}, Â_{1,0}, ..., Â_{k-1,0}, Â_{0,1}, ...
    ColumnMajor,
}

/// acc_i += Σ_j Â_{i,j} ∘ v_j, consuming Â one polynomial at a time from
/// `supplier` in the given order.
///
/// `acc.len()` is k and `v.len()` is ℓ. Entries of `acc` must start with
/// |coeff| < q (zero is typical) and `v` entries must satisfy the
/// [`NttPoly::pointwise_mont`] bound; on return `acc` is lazily reduced.
/// The supplier must yield at least k·ℓ polynomials.
pub fn matvec_accumulate<I>(
    order: MatrixOrder,
    supplier: I,
    v: &[NttPoly],
    acc: &mut [NttPoly],
) -> Result<(), RingError>
where
    I: IntoIterator,
    I::Item: Borrow<NttPoly>,
{
    let (k, l) = (acc.len(), v.len());
    let expected = k * l;
    let mut supplier = supplier.into_iter();
    let mut yielded = 0;
    let mut next = || {
        let p = supplier
            .next()
            .ok_or(RingError::SupplierExhausted { yielded, expected })?;
        yielded += 1;
        Ok::<_, RingError>(p)
    };
    match order {
        MatrixOrder::RowMajor => {
            for acc_i in acc.iter_mut() {
                for v_j in v {
                    acc_i.pointwise_acc(next()?.borrow(), v_j);
                }
            }
        }
        MatrixOrder::ColumnMajor => {
            for v_j in v {
                for acc_i in acc.iter_mut() {
                    acc_i.pointwise_acc(next()?.borrow(), v_j);
                }
            }
        }
    }
    acc.iter_mut().for_each(NttPoly::reduce);
    Ok(())
}
