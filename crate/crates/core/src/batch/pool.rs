//! Fixed-layout task memory.
//!
//! Every per-task field lives in its own 256-byte-aligned arena at a fixed
//! stride, so a slot address depends only on (field, task index). Inputs to
//! hash calls are laid out contiguously: tr ‖ M in one slot, K ‖ μ in
//! another, so hashing them reads a single slice.

use std::alloc::{alloc_zeroed, dealloc, Layout};
use std::ptr::NonNull;

use crate::error::PoolError;
use crate::keccak::hash_h;
use crate::params::{Params, SecurityLevel, CRH_BYTES, SEED_BYTES};

pub const ARENA_ALIGN: usize = 256;

/// Zero-initialized, 256-byte-aligned byte buffer.
pub struct Arena {
    ptr: NonNull<u8>,
    layout: Layout,
}

// The arena owns its allocation exclusively; access goes through &self/&mut self.
unsafe impl Send for Arena {}
unsafe impl Sync for Arena {}

impl Arena {
    pub fn new(bytes: usize) -> Result<Self, PoolError> {
        let layout = Layout::from_size_align(bytes.max(1), ARENA_ALIGN)
            .map_err(|_| PoolError::Allocation { bytes })?;
        // SAFETY: layout has nonzero size.
        let raw = unsafe { alloc_zeroed(layout) };
        let ptr = NonNull::new(raw).ok_or(PoolError::Allocation { bytes })?;
        Ok(Self { ptr, layout })
    }

    pub fn as_slice(&self) -> &[u8] {
        // SAFETY: ptr is valid for layout.size() initialized bytes for the arena's lifetime.
        unsafe { std::slice::from_raw_parts(self.ptr.as_ptr(), self.layout.size()) }
    }

    pub fn as_mut_slice(&mut self) -> &mut [u8] {
        // SAFETY: as above, and &mut self guarantees exclusivity.
        unsafe { std::slice::from_raw_parts_mut(self.ptr.as_ptr(), self.layout.size()) }
    }

    pub fn base_addr(&self) -> usize {
        self.ptr.as_ptr() as usize
    }
}

impl Drop for Arena {
    fn drop(&mut self) {
        // SAFETY: allocated in `new` with the same layout.
        unsafe { dealloc(self.ptr.as_ptr(), self.layout) }
    }
}

/// Per-task fields held by the pool.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Field {
    /// tr ‖ M, hashed into μ.
    TrMessage,
    /// K ‖ μ, hashed into ρ′.
    KeyMu,
    RhoPrime,
    Signature,
    /// Per-slot scratch where workers write candidate signatures.
    Staging,
}

pub struct MemoryPool {
    params: &'static Params,
    capacity: usize,
    max_message: usize,
    msg_len: Vec<usize>,
    tr_msg: Arena,
    key_mu: Arena,
    rho_prime: Arena,
    signatures: Arena,
    staging: Arena,
}

/// Mutable views of the arenas, split so fields can be borrowed independently.
pub struct PoolViews<'a> {
    pub tr_msg: &'a [u8],
    pub msg_len: &'a [usize],
    pub key_mu: &'a mut [u8],
    pub rho_prime: &'a mut [u8],
    pub signatures: &'a mut [u8],
    pub staging: &'a mut [u8],
}

impl MemoryPool {
    /// Arenas for `capacity` tasks with messages up to `max_message` bytes.
    pub fn new(
        level: SecurityLevel,
        capacity: usize,
        max_message: usize,
    ) -> Result<Self, PoolError> {
        if capacity == 0 {
            return Err(PoolError::ZeroCapacity);
        }
        let params = level.params();
        let arena = |stride: usize| {
            let bytes = stride
                .checked_mul(capacity)
                .ok_or(PoolError::Allocation { bytes: usize::MAX })?;
            Arena::new(bytes)
        };
        Ok(Self {
            params,
            capacity,
            max_message,
            msg_len: vec![0; capacity],
            tr_msg: arena(SEED_BYTES + max_message)?,
            key_mu: arena(SEED_BYTES + CRH_BYTES)?,
            rho_prime: arena(CRH_BYTES)?,
            signatures: arena(params.signature_bytes())?,
            staging: arena(params.signature_bytes())?,
        })
    }

    pub fn params(&self) -> &'static Params {
        self.params
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn max_message(&self) -> usize {
        self.max_message
    }

    pub fn stride(&self, field: Field) -> usize {
        match field {
            Field::TrMessage => SEED_BYTES + self.max_message,
            Field::KeyMu => SEED_BYTES + CRH_BYTES,
            Field::RhoPrime => CRH_BYTES,
            Field::Signature | Field::Staging => self.params.signature_bytes(),
        }
    }

    /// Byte offset of a task's slot inside the field's arena.
    pub fn offset(&self, field: Field, task: usize) -> usize {
        task * self.stride(field)
    }

    fn arena(&self, field: Field) -> &Arena {
        match field {
            Field::TrMessage => &self.tr_msg,
            Field::KeyMu => &self.key_mu,
            Field::RhoPrime => &self.rho_prime,
            Field::Signature => &self.signatures,
            Field::Staging => &self.staging,
        }
    }

    pub fn arena_base(&self, field: Field) -> usize {
        self.arena(field).base_addr()
    }

    fn check(&self, task: usize) -> Result<(), PoolError> {
        if task >= self.capacity {
            return Err(PoolError::TaskOutOfRange {
                index: task,
                capacity: self.capacity,
            });
        }
        Ok(())
    }

    pub fn slot(&self, field: Field, task: usize) -> Result<&[u8], PoolError> {
        self.check(task)?;
        let (off, stride) = (self.offset(field, task), self.stride(field));
        Ok(&self.arena(field).as_slice()[off..off + stride])
    }

    /// The packed signature stored for a task.
    pub fn signature(&self, task: usize) -> Result<&[u8], PoolError> {
        self.slot(Field::Signature, task)
    }

    /// Stores tr ‖ M and K for a task, then derives μ and ρ′ in place.
    pub fn load_task(
        &mut self,
        task: usize,
        tr: &[u8; SEED_BYTES],
        key: &[u8; SEED_BYTES],
        msg: &[u8],
    ) -> Result<(), PoolError> {
        self.check(task)?;
        if msg.len() > self.max_message {
            return Err(PoolError::MessageTooLong {
                len: msg.len(),
                max: self.max_message,
            });
        }
        let off = self.offset(Field::TrMessage, task);
        let slot = &mut self.tr_msg.as_mut_slice()[off..off + SEED_BYTES + msg.len()];
        slot[..SEED_BYTES].copy_from_slice(tr);
        slot[SEED_BYTES..].copy_from_slice(msg);
        self.msg_len[task] = msg.len();
        let off = self.offset(Field::KeyMu, task);
        self.key_mu.as_mut_slice()[off..off + SEED_BYTES].copy_from_slice(key);
        self.derive_seeds(task);
        Ok(())
    }

    fn derive_seeds(&mut self, task: usize) {
        let off = self.offset(Field::TrMessage, task);
        let input = &self.tr_msg.as_slice()[off..off + SEED_BYTES + self.msg_len[task]];
        let mu = hash_h::<CRH_BYTES>(&[input]);
        let off = self.offset(Field::KeyMu, task);
        let key_mu = &mut self.key_mu.as_mut_slice()[off..off + SEED_BYTES + CRH_BYTES];
        key_mu[SEED_BYTES..].copy_from_slice(&mu);
        let rho_prime = hash_h::<CRH_BYTES>(&[key_mu]);
        let off = self.offset(Field::RhoPrime, task);
        self.rho_prime.as_mut_slice()[off..off + CRH_BYTES].copy_from_slice(&rho_prime);
    }

    /// μ of a loaded task.
    pub fn mu(&self, task: usize) -> Result<[u8; CRH_BYTES], PoolError> {
        Ok(self.slot(Field::KeyMu, task)?[SEED_BYTES..]
            .try_into()
            .expect("slot width"))
    }

    pub fn rho_prime(&self, task: usize) -> Result<[u8; CRH_BYTES], PoolError> {
        Ok(self
            .slot(Field::RhoPrime, task)?
            .try_into()
            .expect("slot width"))
    }

    /// Copies a staging slot into a task's signature slot.
    pub fn promote(&mut self, staging_slot: usize, task: usize) -> Result<(), PoolError> {
        self.check(staging_slot)?;
        self.check(task)?;
        let n = self.params.signature_bytes();
        let src = &self.staging.as_slice()[staging_slot * n..(staging_slot + 1) * n];
        self.signatures.as_mut_slice()[task * n..(task + 1) * n].copy_from_slice(src);
        Ok(())
    }

    pub fn views(&mut self) -> PoolViews<'_> {
        PoolViews {
            tr_msg: self.tr_msg.as_slice(),
            msg_len: &self.msg_len,
            key_mu: self.key_mu.as_mut_slice(),
            rho_prime: self.rho_prime.as_mut_slice(),
            signatures: self.signatures.as_mut_slice(),
            staging: self.staging.as_mut_slice(),
        }
    }
}
