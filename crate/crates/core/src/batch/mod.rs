//! Batch signing: task memory pool, speculative scheduler and worker engine.

pub mod engine;
pub mod pool;
pub mod scheduler;
pub mod simulation;

pub use engine::{
    batch_keygen, batch_sign, batch_sign_streams, batch_verify, partition, BatchConfig,
    BatchEngine, BatchReport, RoundTrace, SignTask, VerifyItem, DEFAULT_CONCURRENCY_MULTIPLIER,
    TRACE_HEADER,
};
pub use pool::{Field, MemoryPool, ARENA_ALIGN};
pub use scheduler::{Assignment, CommitSummary, Outcome, SchedulerState, TaskStatus};
pub use simulation::{simulate, SimulationReport};
