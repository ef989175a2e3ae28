use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParamError {
    #[error("unsupported security level {0} (expected 2, 3 or 5)")]
    UnknownLevel(u8),
    #[error("cannot parse security level from {0:?}")]
    UnparsableLevel(String),
    #[error("norm bound {0} exceeds (q-1)/8")]
    NormBoundTooLarge(i32),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("matrix supplier exhausted after {yielded} of {expected} polynomials")]
    SupplierExhausted { yielded: usize, expected: usize },
    #[error("vector length mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum XofError {
    #[error("absorb called after finalize")]
    AbsorbAfterFinalize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("{what}: expected {expected} bytes, got {actual}")]
    Length {
        what: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("{what}: coefficient {index} out of range")]
    CoefficientRange { what: &'static str, index: usize },
    #[error("malformed hint encoding: {0}")]
    Hint(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PoolError {
    #[error("pool capacity must be at least 1")]
    ZeroCapacity,
    #[error("arena of {bytes} bytes could not be allocated")]
    Allocation { bytes: usize },
    #[error("task index {index} outside pool capacity {capacity}")]
    TaskOutOfRange { index: usize, capacity: usize },
    #[error("message of {len} bytes exceeds pool slot of {max} bytes")]
    MessageTooLong { len: usize, max: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BatchError {
    #[error("concurrency (psi) must be at least 1")]
    ZeroConcurrency,
    #[error("worker count must be at least 1")]
    ZeroWorkers,
    #[error("batch of {tasks} tasks does not fit pool of capacity {capacity}")]
    BatchTooLarge { tasks: usize, capacity: usize },
    #[error("secret key level {key} does not match pool level {pool}")]
    LevelMismatch { key: u8, pool: u8 },
    #[error(transparent)]
    Pool(#[from] PoolError),
    #[error("worker pool: {0}")]
    Workers(String),
}
