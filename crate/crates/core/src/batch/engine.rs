//! Fork-join batch signing on a worker pool, plus parallel keygen and verify.

use rayon::prelude::*;

use super::pool::MemoryPool;
use super::scheduler::{Outcome, SchedulerState, TaskStatus};
use crate::codec::PublicKey;
use crate::error::BatchError;
use crate::params::{SecurityLevel, CRH_BYTES, SEED_BYTES};
use crate::scheme::{keygen, sign_attempt, verify, AttemptResult, KeyPair, SignPrecomp};

/// Default ratio of execution slots to workers.
pub const DEFAULT_CONCURRENCY_MULTIPLIER: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BatchConfig {
    /// Execution slots per round (Ψ).
    pub psi: usize,
    /// Worker threads (W).
    pub workers: usize,
    /// Fill idle slots with future nonces.
    pub speculate: bool,
}

impl BatchConfig {
    pub fn new(psi: usize, workers: usize) -> Self {
        Self {
            psi,
            workers,
            speculate: true,
        }
    }

    /// Ψ = min(Φ, c·W).
    pub fn default_psi(phi: usize, workers: usize, multiplier: usize) -> usize {
        phi.min(multiplier * workers).max(1)
    }

    fn validate(&self) -> Result<(), BatchError> {
        if self.psi == 0 {
            return Err(BatchError::ZeroConcurrency);
        }
        if self.workers == 0 {
            return Err(BatchError::ZeroWorkers);
        }
        Ok(())
    }
}

pub const TRACE_HEADER: &str = "version,round,active_tasks,attempts,speculative,idle_slots";

/// Per-round scheduler activity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RoundTrace {
    pub round: usize,
    /// Unfinished tasks when the round was scheduled.
    pub active_tasks: usize,
    pub attempts: usize,
    pub speculative: usize,
    pub idle_slots: usize,
}

impl RoundTrace {
    pub fn csv_row(&self) -> String {
        format!(
            "1,{},{},{},{},{}",
            self.round, self.active_tasks, self.attempts, self.speculative, self.idle_slots
        )
    }
}

/// One message to sign under a prepared key.
#[derive(Clone, Copy, Debug)]
pub struct SignTask<'a> {
    pub key: &'a SignPrecomp,
    pub message: &'a [u8],
}

#[derive(Debug)]
pub struct BatchReport {
    /// Packed signatures in submission order.
    pub results: Vec<Result<Vec<u8>, BatchError>>,
    /// Attempts up to and including the accepted one; 0 for failed tasks.
    pub attempts: Vec<u32>,
    /// Every (task, attempt index) executed, in execution order.
    pub executed: Vec<(usize, u32)>,
    pub rounds: Vec<RoundTrace>,
}

impl BatchReport {
    pub fn executed_attempts(&self) -> usize {
        self.executed.len()
    }

    /// Attempts a sequential signer would have run.
    pub fn sequential_attempts(&self) -> u64 {
        self.attempts.iter().map(|&a| a as u64).sum()
    }
}

fn worker_pool(workers: usize) -> Result<rayon::ThreadPool, BatchError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| BatchError::Workers(e.to_string()))
}

/// A memory pool and worker pool reused across batches.
pub struct BatchEngine {
    pool: MemoryPool,
    workers: rayon::ThreadPool,
    config: BatchConfig,
}

impl BatchEngine {
    pub fn new(
        level: SecurityLevel,
        capacity: usize,
        max_message: usize,
        config: BatchConfig,
    ) -> Result<Self, BatchError> {
        config.validate()?;
        Ok(Self {
            pool: MemoryPool::new(level, capacity, max_message)?,
            workers: worker_pool(config.workers)?,
            config,
        })
    }

    pub fn pool(&self) -> &MemoryPool {
        &self.pool
    }

    pub fn config(&self) -> BatchConfig {
        self.config
    }

    /// Signs up to `capacity` messages. Ψ is capped at the pool capacity.
    /// Output is byte-identical to signing each task sequentially.
    pub fn sign(&mut self, tasks: &[SignTask<'_>]) -> Result<BatchReport, BatchError> {
        let capacity = self.pool.capacity();
        if tasks.len() > capacity {
            return Err(BatchError::BatchTooLarge {
                tasks: tasks.len(),
                capacity,
            });
        }
        let params = self.pool.params();
        let psi = self.config.psi.min(capacity);
        let mut state = SchedulerState::new(tasks.len(), psi, self.config.speculate);
        let mut errors: Vec<Option<BatchError>> = vec![None; tasks.len()];

        for (i, task) in tasks.iter().enumerate() {
            let loaded = if task.key.params.level != params.level {
                Err(BatchError::LevelMismatch {
                    key: task.key.params.level.number(),
                    pool: params.level.number(),
                })
            } else {
                self.pool
                    .load_task(i, &task.key.tr, &task.key.key, task.message)
                    .map_err(BatchError::from)
            };
            if let Err(e) = loaded {
                errors[i] = Some(e);
                state.mark_failed(i);
            }
        }

        let sig_bytes = params.signature_bytes();
        let mut executed = Vec::new();
        let mut rounds = Vec::new();
        while !state.is_complete() {
            let assignments = state.schedule_round();
            let active_tasks = state.remaining();
            let views = self.pool.views();
            let key_mu: &[u8] = views.key_mu;
            let rho_primes: &[u8] = views.rho_prime;
            let outcomes: Vec<Option<Outcome>> = self.workers.install(|| {
                views
                    .staging
                    .par_chunks_exact_mut(sig_bytes)
                    .zip(assignments.par_iter())
                    .map(|(buf, a)| {
                        let km = a.task * (SEED_BYTES + CRH_BYTES) + SEED_BYTES;
                        let mu: &[u8; CRH_BYTES] =
                            key_mu[km..km + CRH_BYTES].try_into().expect("slot width");
                        let rp = a.task * CRH_BYTES;
                        let rho_prime: &[u8; CRH_BYTES] = rho_primes[rp..rp + CRH_BYTES]
                            .try_into()
                            .expect("slot width");
                        let kappa = (a.attempt as usize * params.l) as u16;
                        match sign_attempt(tasks[a.task].key, mu, rho_prime, kappa) {
                            AttemptResult::Accept(sig) => {
                                sig.pack_into(params, buf);
                                Some(Outcome::Valid)
                            }
                            AttemptResult::Reject(_) => Some(Outcome::Invalid),
                        }
                    })
                    .collect()
            });
            let summary = state.commit_round(&assignments, &outcomes);
            for (slot, task) in summary.improved {
                self.pool.promote(slot, task)?;
            }
            let speculative = assignments.iter().filter(|a| a.speculative).count();
            rounds.push(RoundTrace {
                round: rounds.len(),
                active_tasks,
                attempts: assignments.len(),
                speculative,
                idle_slots: psi - assignments.len(),
            });
            executed.extend(assignments.iter().map(|a| (a.task, a.attempt)));
        }

        let mut results = Vec::with_capacity(tasks.len());
        let mut attempts = Vec::with_capacity(tasks.len());
        for (i, err) in errors.into_iter().enumerate() {
            match (state.status(i), err) {
                (TaskStatus::Done { attempt }, _) => {
                    results.push(Ok(self.pool.signature(i)?.to_vec()));
                    attempts.push(attempt + 1);
                }
                (_, Some(e)) => {
                    results.push(Err(e));
                    attempts.push(0);
                }
                (status, None) => unreachable!("task {i} left in state {status:?}"),
            }
        }
        Ok(BatchReport {
            results,
            attempts,
            executed,
            rounds,
        })
    }
}

/// Signs `tasks` with a pool sized to this batch.
pub fn batch_sign(
    level: SecurityLevel,
    tasks: &[SignTask<'_>],
    config: BatchConfig,
) -> Result<BatchReport, BatchError> {
    let max_message = tasks.iter().map(|t| t.message.len()).max().unwrap_or(0);
    BatchEngine::new(level, tasks.len().max(1), max_message, config)?.sign(tasks)
}

/// Splits `items` into at most `streams` contiguous, nearly equal partitions.
pub fn partition<T>(items: &[T], streams: usize) -> Vec<&[T]> {
    let streams = streams.clamp(1, items.len().max(1));
    let chunk = items.len().div_ceil(streams).max(1);
    if items.is_empty() {
        return vec![items];
    }
    items.chunks(chunk).collect()
}

/// Splits `tasks` into `streams` contiguous partitions, each signed by its
/// own engine on its own thread; reports come back in partition order.
pub fn batch_sign_streams(
    level: SecurityLevel,
    tasks: &[SignTask<'_>],
    config: BatchConfig,
    streams: usize,
) -> Result<Vec<BatchReport>, BatchError> {
    std::thread::scope(|s| {
        let handles: Vec<_> = partition(tasks, streams)
            .into_iter()
            .map(|part| s.spawn(move || batch_sign(level, part, config)))
            .collect();
        handles
            .into_iter()
            .map(|h| {
                h.join()
                    .map_err(|_| BatchError::Workers("stream thread panicked".into()))?
            })
            .collect()
    })
}

/// One signature to check.
#[derive(Clone, Copy, Debug)]
pub struct VerifyItem<'a> {
    pub key: &'a PublicKey,
    pub message: &'a [u8],
    pub signature: &'a [u8],
}

/// Order-preserving parallel verification; malformed signatures reject.
pub fn batch_verify(items: &[VerifyItem<'_>], workers: usize) -> Result<Vec<bool>, BatchError> {
    if workers == 0 {
        return Err(BatchError::ZeroWorkers);
    }
    Ok(worker_pool(workers)?.install(|| {
        items
            .par_iter()
            .map(|it| verify(it.key, it.message, it.signature))
            .collect()
    }))
}

/// Order-preserving parallel key generation.
pub fn batch_keygen(
    level: SecurityLevel,
    seeds: &[[u8; SEED_BYTES]],
    workers: usize,
) -> Result<Vec<KeyPair>, BatchError> {
    if workers == 0 {
        return Err(BatchError::ZeroWorkers);
    }
    Ok(worker_pool(workers)?.install(|| seeds.par_iter().map(|z| keygen(level, z)).collect()))
}
