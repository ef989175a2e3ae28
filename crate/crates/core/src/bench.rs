//! Throughput measurement shared by the command line and the test suite.

use std::time::{Duration, Instant};

use crate::batch::{
    batch_keygen, batch_verify, partition, BatchConfig, BatchEngine, SignTask, VerifyItem,
};
use crate::error::BatchError;
use crate::keccak::hash_h;
use crate::params::SecurityLevel;
use crate::scheme::{keygen, sign_precomp, SignPrecomp};

pub const BENCH_HEADER: &str =
    "version,op,level,phi,psi,workers,streams,reps,throughput_ops,mean_latency_ms,attempts_mean";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BenchOp {
    Keygen,
    Sign,
    Verify,
}

impl BenchOp {
    pub fn name(self) -> &'static str {
        match self {
            BenchOp::Keygen => "keygen",
            BenchOp::Sign => "sign",
            BenchOp::Verify => "verify",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub op: BenchOp,
    pub level: SecurityLevel,
    pub phi: usize,
    pub psi: usize,
    pub workers: usize,
    pub streams: usize,
    pub reps: usize,
    /// Operations per second over the median repetition.
    pub throughput: f64,
    /// Median wall time of one batch; every result of a batch is available then.
    pub mean_latency_ms: f64,
    /// Mean signing attempts per message (0 for other operations).
    pub attempts_mean: f64,
}

impl BenchRow {
    pub fn csv_row(&self) -> String {
        format!(
            "1,{},{},{},{},{},{},{},{:.2},{:.4},{:.4}",
            self.op.name(),
            self.level,
            self.phi,
            self.psi,
            self.workers,
            self.streams,
            self.reps,
            self.throughput,
            self.mean_latency_ms,
            self.attempts_mean
        )
    }
}

/// Messages derived from a seed: message i is H(seed ‖ i) truncated to 32 bytes.
pub fn bench_messages(seed: &[u8; 32], count: usize) -> Vec<Vec<u8>> {
    (0..count as u64)
        .map(|i| hash_h::<32>(&[seed, &i.to_le_bytes()]).to_vec())
        .collect()
}

fn median(mut xs: Vec<Duration>) -> Duration {
    xs.sort();
    xs[xs.len() / 2]
}

fn row(
    op: BenchOp,
    level: SecurityLevel,
    phi: usize,
    config: BatchConfig,
    streams: usize,
    times: Vec<Duration>,
    attempts_mean: f64,
) -> BenchRow {
    let reps = times.len();
    let t = median(times).as_secs_f64().max(1e-9);
    BenchRow {
        op,
        level,
        phi,
        psi: config.psi,
        workers: config.workers,
        streams,
        reps,
        throughput: phi as f64 / t,
        mean_latency_ms: t * 1e3,
        attempts_mean,
    }
}

/// Signs Φ messages under one key `reps` times and reports the median.
///
/// The tasks are split into `streams` partitions, each with its own engine
/// built before timing starts, so only signing is measured.
pub fn bench_sign(
    level: SecurityLevel,
    phi: usize,
    config: BatchConfig,
    streams: usize,
    reps: usize,
    seed: &[u8; 32],
) -> Result<BenchRow, BatchError> {
    let pre = SignPrecomp::new(&keygen(level, seed).secret);
    let msgs = bench_messages(seed, phi);
    let tasks: Vec<SignTask> = msgs
        .iter()
        .map(|m| SignTask {
            key: &pre,
            message: m,
        })
        .collect();
    let parts: Vec<&[SignTask]> = partition(&tasks, streams);
    let mut engines = parts
        .iter()
        .map(|part| BatchEngine::new(level, part.len().max(1), 32, config))
        .collect::<Result<Vec<_>, _>>()?;
    let mut times = Vec::with_capacity(reps);
    let mut attempts = 0.0;
    for _ in 0..reps.max(1) {
        let start = Instant::now();
        let reports = std::thread::scope(|s| {
            let handles: Vec<_> = engines
                .iter_mut()
                .zip(&parts)
                .map(|(e, part)| s.spawn(move || e.sign(part)))
                .collect();
            handles
                .into_iter()
                .map(|h| {
                    h.join()
                        .map_err(|_| BatchError::Workers("stream thread panicked".into()))?
                })
                .collect::<Result<Vec<_>, _>>()
        })?;
        times.push(start.elapsed());
        let total: u64 = reports.iter().map(|r| r.sequential_attempts()).sum();
        attempts = total as f64 / phi.max(1) as f64;
    }
    Ok(row(
        BenchOp::Sign,
        level,
        phi,
        config,
        streams,
        times,
        attempts,
    ))
}

/// Plain sequential signing of Φ messages, for comparison with the batch engine.
pub fn bench_sign_sequential(
    level: SecurityLevel,
    phi: usize,
    reps: usize,
    seed: &[u8; 32],
) -> BenchRow {
    let pre = SignPrecomp::new(&keygen(level, seed).secret);
    let msgs = bench_messages(seed, phi);
    let mut times = Vec::with_capacity(reps);
    let mut attempts = 0.0;
    for _ in 0..reps.max(1) {
        let start = Instant::now();
        let total: u64 = msgs
            .iter()
            .map(|m| sign_precomp(&pre, m).attempts as u64)
            .sum();
        times.push(start.elapsed());
        attempts = total as f64 / phi.max(1) as f64;
    }
    row(
        BenchOp::Sign,
        level,
        phi,
        BatchConfig {
            psi: 1,
            workers: 1,
            speculate: false,
        },
        1,
        times,
        attempts,
    )
}

pub fn bench_keygen(
    level: SecurityLevel,
    phi: usize,
    workers: usize,
    reps: usize,
    seed: &[u8; 32],
) -> Result<BenchRow, BatchError> {
    let seeds: Vec<[u8; 32]> = bench_messages(seed, phi)
        .into_iter()
        .map(|m| m.try_into().expect("32 bytes"))
        .collect();
    let mut times = Vec::with_capacity(reps);
    for _ in 0..reps.max(1) {
        let start = Instant::now();
        batch_keygen(level, &seeds, workers)?;
        times.push(start.elapsed());
    }
    Ok(row(
        BenchOp::Keygen,
        level,
        phi,
        BatchConfig::new(phi.max(1), workers),
        1,
        times,
        0.0,
    ))
}

pub fn bench_verify(
    level: SecurityLevel,
    phi: usize,
    workers: usize,
    reps: usize,
    seed: &[u8; 32],
) -> Result<BenchRow, BatchError> {
    let kp = keygen(level, seed);
    let pre = SignPrecomp::new(&kp.secret);
    let msgs = bench_messages(seed, phi);
    let sigs: Vec<Vec<u8>> = msgs
        .iter()
        .map(|m| sign_precomp(&pre, m).signature)
        .collect();
    let items: Vec<VerifyItem> = msgs
        .iter()
        .zip(&sigs)
        .map(|(m, s)| VerifyItem {
            key: &kp.public,
            message: m,
            signature: s,
        })
        .collect();
    let mut times = Vec::with_capacity(reps);
    for _ in 0..reps.max(1) {
        let start = Instant::now();
        let flags = batch_verify(&items, workers)?;
        times.push(start.elapsed());
        debug_assert!(flags.iter().all(|&f| f));
    }
    Ok(row(
        BenchOp::Verify,
        level,
        phi,
        BatchConfig::new(phi.max(1), workers),
        1,
        times,
        0.0,
    ))
}
