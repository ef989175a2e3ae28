//! `dilithium`: keys, signing, verification, batch modes and benchmarks.
//!
//! Exit status: 0 success or accept, 1 signature rejected, 2 malformed input
//! or any other error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use dilithium_core::batch::{
    batch_sign_streams, batch_verify, BatchConfig, SignTask, VerifyItem,
    DEFAULT_CONCURRENCY_MULTIPLIER, TRACE_HEADER,
};
use dilithium_core::bench::{
    bench_keygen, bench_messages, bench_sign, bench_sign_sequential, bench_verify, BenchRow,
    BENCH_HEADER,
};
use dilithium_core::codec::{PublicKey, SecretKey};
use dilithium_core::scheme::{keygen, sign_precomp, verify_detailed, SignPrecomp};
use dilithium_core::SecurityLevel;

#[derive(Parser)]
#[command(
    name = "dilithium",
    version,
    about = "Dilithium signatures with a speculative batch-signing engine"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a key pair.
    Keygen(KeygenArgs),
    /// Sign one message.
    Sign(SignArgs),
    /// Verify one signature (exit 0 accept, 1 reject, 2 malformed).
    Verify(VerifyArgs),
    /// Sign many messages with the batch engine.
    BatchSign(BatchSignArgs),
    /// Verify many signatures in parallel.
    BatchVerify(BatchVerifyArgs),
    /// Print benchmark rows as CSV.
    Bench(BenchArgs),
    /// Evaluate throughput over a grid of Ψ, batch sizes and stream counts.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Binary,
    Hex,
}

#[derive(Args)]
struct Common {
    /// Security level: 2, 3 or 5.
    #[arg(long, value_parser = parse_level)]
    level: SecurityLevel,
    #[arg(long, value_enum, default_value_t = OutFormat::Binary)]
    out_format: OutFormat,
}

#[derive(Args)]
struct KeygenArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    pk: PathBuf,
    #[arg(long)]
    sk: PathBuf,
    /// 32-byte key seed in hex. Test mode only: keys become reproducible.
    #[arg(long)]
    seed: Option<String>,
}

#[derive(Args)]
struct SignArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    sk: PathBuf,
    #[arg(long)]
    msg: PathBuf,
    #[arg(long)]
    sig: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_parser = parse_level)]
    level: SecurityLevel,
    #[arg(long)]
    pk: PathBuf,
    #[arg(long)]
    msg: PathBuf,
    #[arg(long)]
    sig: PathBuf,
}

#[derive(Args)]
struct Engine {
    /// Batch size Φ: tasks per engine submission. Defaults to all messages.
    #[arg(long)]
    phi: Option<usize>,
    /// Execution slots per round Ψ. Defaults to min(Φ, 4·W). Must not exceed Φ.
    #[arg(long)]
    psi: Option<usize>,
    /// Worker threads per engine. Defaults to the available cores.
    #[arg(long)]
    workers: Option<usize>,
    /// Independent engines over partitions of each batch.
    #[arg(long, default_value_t = 1)]
    streams: usize,
}

#[derive(Args)]
struct BatchSignArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    engine: Engine,
    #[arg(long)]
    sk: PathBuf,
    /// Directory for signatures; defaults to next to each message. Each is named <message>.sig.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Write the per-round scheduler trace as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(required = true)]
    messages: Vec<PathBuf>,
}

#[derive(Args)]
struct BatchVerifyArgs {
    #[arg(long, value_parser = parse_level)]
    level: SecurityLevel,
    #[arg(long)]
    pk: PathBuf,
    #[arg(long)]
    workers: Option<usize>,
    /// Directory holding <message>.sig files; defaults to next to each message.
    #[arg(long)]
    sig_dir: Option<PathBuf>,
    #[arg(required = true)]
    messages: Vec<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum BenchTarget {
    Sign,
    SignSequential,
    Keygen,
    Verify,
    All,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_parser = parse_level)]
    level: SecurityLevel,
    #[arg(long, default_value_t = 256)]
    phi: usize,
    #[arg(long)]
    psi: Option<usize>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, default_value_t = 1)]
    streams: usize,
    #[arg(long, default_value_t = 100)]
    reps: usize,
    #[arg(long, value_enum, default_value_t = BenchTarget::All)]
    op: BenchTarget,
    /// Seed for the benchmark key and messages, in hex.
    #[arg(long)]
    seed: Option<String>,
    /// Also write the scheduler trace of one signing batch as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_parser = parse_level)]
    level: SecurityLevel,
    /// Batch size for the Ψ sweep.
    #[arg(long, default_value_t = 1024)]
    phi: usize,
    /// Ψ values, comma separated. Values above Φ are skipped.
    #[arg(long, value_delimiter = ',', default_values_t = [1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024])]
    psi: Vec<usize>,
    /// Batch sizes for the batch sweep, run at Ψ = min(Φ, 4·W).
    #[arg(long, value_delimiter = ',', default_values_t = [1, 4, 16, 64, 256, 1024])]
    batch: Vec<usize>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [1])]
    streams: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    reps: usize,
    #[arg(long)]
    seed: Option<String>,
}

fn parse_level(s: &str) -> Result<SecurityLevel, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn parse_seed(hex_seed: &str) -> Result<[u8; 32]> {
    let bytes = hex::decode(hex_seed.trim()).context("seed is not valid hex")?;
    bytes
        .try_into()
        .map_err(|b: Vec<u8>| anyhow::anyhow!("seed must be 32 bytes, got {}", b.len()))
}

fn seed_or_random(seed: Option<&str>) -> Result<[u8; 32]> {
    match seed {
        Some(s) => parse_seed(s),
        None => {
            let mut out = [0u8; 32];
            getrandom::getrandom(&mut out)
                .map_err(|e| anyhow::anyhow!("operating system entropy source failed: {e}"))?;
            Ok(out)
        }
    }
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn write_bytes(path: &Path, bytes: &[u8], format: OutFormat) -> Result<()> {
    let data = match format {
        OutFormat::Binary => bytes.to_vec(),
        OutFormat::Hex => format!("{}\n", hex::encode(bytes)).into_bytes(),
    };
    fs::write(path, data).with_context(|| format!("writing {}", path.display()))
}

/// Reads a key or signature written in either format. Raw bytes are
/// recognised by their exact length; anything else is decoded as hex if it can be.
fn read_encoded(path: &Path, binary_len: usize) -> Result<Vec<u8>> {
    let raw = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    if raw.len() == binary_len {
        return Ok(raw);
    }
    match std::str::from_utf8(&raw)
        .ok()
        .and_then(|s| hex::decode(s.trim()).ok())
    {
        Some(bytes) => Ok(bytes),
        None => Ok(raw),
    }
}

fn read_secret(path: &Path, level: SecurityLevel) -> Result<SecretKey> {
    let bytes = read_encoded(path, level.params().secret_key_bytes())?;
    SecretKey::from_bytes(level, &bytes)
        .with_context(|| format!("decoding secret key {}", path.display()))
}

fn read_public(path: &Path, level: SecurityLevel) -> Result<PublicKey> {
    let bytes = read_encoded(path, level.params().public_key_bytes())?;
    PublicKey::from_bytes(level, &bytes)
        .with_context(|| format!("decoding public key {}", path.display()))
}

fn sig_path(msg: &Path, dir: Option<&Path>) -> PathBuf {
    let mut name = msg.file_name().unwrap_or_default().to_os_string();
    name.push(".sig");
    match dir {
        Some(d) => d.join(name),
        None => msg.with_file_name(name),
    }
}

fn resolve_engine(e: &Engine, messages: usize) -> Result<(usize, BatchConfig)> {
    let phi = e.phi.unwrap_or(messages).max(1);
    let workers = e.workers.unwrap_or_else(default_workers);
    ensure!(workers >= 1, "--workers must be at least 1");
    ensure!(e.streams >= 1, "--streams must be at least 1");
    let psi = e
        .psi
        .unwrap_or_else(|| BatchConfig::default_psi(phi, workers, DEFAULT_CONCURRENCY_MULTIPLIER));
    ensure!(psi >= 1, "--psi must be at least 1");
    ensure!(psi <= phi, "--psi ({psi}) must not exceed --phi ({phi})");
    Ok((phi, BatchConfig::new(psi, workers)))
}

fn cmd_keygen(a: KeygenArgs) -> Result<ExitCode> {
    if a.seed.is_some() {
        eprintln!("warning: --seed makes key generation deterministic; use it for testing only");
    }
    let zeta = seed_or_random(a.seed.as_deref())?;
    let kp = keygen(a.common.level, &zeta);
    write_bytes(&a.pk, &kp.public.to_bytes(), a.common.out_format)?;
    write_bytes(&a.sk, &kp.secret.to_bytes(), a.common.out_format)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_sign(a: SignArgs) -> Result<ExitCode> {
    let sk = read_secret(&a.sk, a.common.level)?;
    let msg = fs::read(&a.msg).with_context(|| format!("reading {}", a.msg.display()))?;
    let out = sign_precomp(&SignPrecomp::new(&sk), &msg);
    write_bytes(&a.sig, &out.signature, a.common.out_format)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(a: VerifyArgs) -> Result<ExitCode> {
    let pk = read_public(&a.pk, a.level)?;
    let msg = fs::read(&a.msg).with_context(|| format!("reading {}", a.msg.display()))?;
    let sig = read_encoded(&a.sig, a.level.params().signature_bytes())?;
    match verify_detailed(&pk, &msg, &sig) {
        Ok(true) => {
            println!("accept");
            Ok(ExitCode::SUCCESS)
        }
        Ok(false) => {
            println!("reject");
            Ok(ExitCode::from(1))
        }
        Err(e) => bail!("malformed signature {}: {e}", a.sig.display()),
    }
}

fn cmd_batch_sign(a: BatchSignArgs) -> Result<ExitCode> {
    let level = a.common.level;
    let pre = SignPrecomp::new(&read_secret(&a.sk, level)?);
    let msgs = a
        .messages
        .iter()
        .map(|p| fs::read(p).with_context(|| format!("reading {}", p.display())))
        .collect::<Result<Vec<_>>>()?;
    let (phi, config) = resolve_engine(&a.engine, msgs.len())?;
    let tasks: Vec<SignTask> = msgs
        .iter()
        .map(|m| SignTask {
            key: &pre,
            message: m,
        })
        .collect();
    let mut trace = match &a.trace {
        Some(p) => {
            let mut f = fs::File::create(p).with_context(|| format!("creating {}", p.display()))?;
            writeln!(f, "{TRACE_HEADER}")?;
            Some(f)
        }
        None => None,
    };
    let mut round_base = 0;
    for (chunk_index, chunk) in tasks.chunks(phi).enumerate() {
        let reports = batch_sign_streams(level, chunk, config, a.engine.streams)?;
        let mut results = Vec::with_capacity(chunk.len());
        for r in reports {
            if let Some(f) = trace.as_mut() {
                for t in &r.rounds {
                    let mut t = *t;
                    t.round += round_base;
                    writeln!(f, "{}", t.csv_row())?;
                }
                round_base += r.rounds.len();
            }
            results.extend(r.results);
        }
        for (i, result) in results.into_iter().enumerate() {
            let msg_path = &a.messages[chunk_index * phi + i];
            let sig = result.with_context(|| format!("signing {}", msg_path.display()))?;
            write_bytes(
                &sig_path(msg_path, a.out_dir.as_deref()),
                &sig,
                a.common.out_format,
            )?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_batch_verify(a: BatchVerifyArgs) -> Result<ExitCode> {
    let pk = read_public(&a.pk, a.level)?;
    let sig_len = a.level.params().signature_bytes();
    let mut msgs = Vec::with_capacity(a.messages.len());
    let mut sigs = Vec::with_capacity(a.messages.len());
    for p in &a.messages {
        msgs.push(fs::read(p).with_context(|| format!("reading {}", p.display()))?);
        let sp = sig_path(p, a.sig_dir.as_deref());
        let sig = read_encoded(&sp, sig_len)?;
        ensure!(
            sig.len() == sig_len,
            "malformed signature {}: expected {sig_len} bytes, got {}",
            sp.display(),
            sig.len()
        );
        sigs.push(sig);
    }
    let items: Vec<VerifyItem> = msgs
        .iter()
        .zip(&sigs)
        .map(|(m, s)| VerifyItem {
            key: &pk,
            message: m,
            signature: s,
        })
        .collect();
    let flags = batch_verify(&items, a.workers.unwrap_or_else(default_workers))?;
    for (p, ok) in a.messages.iter().zip(&flags) {
        println!("{},{}", p.display(), if *ok { "accept" } else { "reject" });
    }
    Ok(if flags.iter().all(|&f| f) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn print_row(row: &BenchRow) {
    println!("{}", row.csv_row());
}

fn cmd_bench(a: BenchArgs) -> Result<ExitCode> {
    ensure!(a.phi >= 1, "--phi must be at least 1");
    let workers = a.workers.unwrap_or_else(default_workers);
    let psi = a.psi.unwrap_or_else(|| {
        BatchConfig::default_psi(a.phi, workers, DEFAULT_CONCURRENCY_MULTIPLIER)
    });
    ensure!(
        psi >= 1 && psi <= a.phi,
        "--psi ({psi}) must be between 1 and --phi ({})",
        a.phi
    );
    let seed = seed_or_random(a.seed.as_deref())?;
    let config = BatchConfig::new(psi, workers);
    let want = |t: BenchTarget| a.op == t || a.op == BenchTarget::All;
    println!("{BENCH_HEADER}");
    if want(BenchTarget::Keygen) {
        print_row(&bench_keygen(a.level, a.phi, workers, a.reps, &seed)?);
    }
    if want(BenchTarget::Sign) {
        print_row(&bench_sign(
            a.level, a.phi, config, a.streams, a.reps, &seed,
        )?);
    }
    if want(BenchTarget::SignSequential) {
        print_row(&bench_sign_sequential(a.level, a.phi, a.reps, &seed));
    }
    if want(BenchTarget::Verify) {
        print_row(&bench_verify(a.level, a.phi, workers, a.reps, &seed)?);
    }
    if let Some(path) = &a.trace {
        let pre = SignPrecomp::new(&keygen(a.level, &seed).secret);
        let msgs = bench_messages(&seed, a.phi);
        let tasks: Vec<SignTask> = msgs
            .iter()
            .map(|m| SignTask {
                key: &pre,
                message: m,
            })
            .collect();
        let report = dilithium_core::batch::batch_sign(a.level, &tasks, config)?;
        let mut out = format!("{TRACE_HEADER}\n");
        for t in &report.rounds {
            out.push_str(&t.csv_row());
            out.push('\n');
        }
        fs::write(path, out).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(ExitCode::SUCCESS)
}

/// Checks that a batch run reproduces sequential signing byte for byte.
fn check_equivalence(
    level: SecurityLevel,
    pre: &SignPrecomp,
    msgs: &[Vec<u8>],
    config: BatchConfig,
    streams: usize,
) -> Result<()> {
    let tasks: Vec<SignTask> = msgs
        .iter()
        .map(|m| SignTask {
            key: pre,
            message: m,
        })
        .collect();
    let reports = batch_sign_streams(level, &tasks, config, streams)?;
    let batch: Vec<Vec<u8>> = reports
        .into_iter()
        .flat_map(|r| r.results)
        .collect::<Result<_, _>>()?;
    for (i, (m, sig)) in msgs.iter().zip(&batch).enumerate() {
        ensure!(
            sign_precomp(pre, m).signature == *sig,
            "psi {}: signature {i} differs from sequential signing",
            config.psi
        );
    }
    Ok(())
}

fn cmd_sweep(a: SweepArgs) -> Result<ExitCode> {
    let workers = a.workers.unwrap_or_else(default_workers);
    let seed = seed_or_random(a.seed.as_deref())?;
    let pre = SignPrecomp::new(&keygen(a.level, &seed).secret);
    let msgs = bench_messages(&seed, a.phi);
    println!("{BENCH_HEADER}");
    for &streams in &a.streams {
        for &psi in a.psi.iter().filter(|&&p| p >= 1 && p <= a.phi) {
            let config = BatchConfig::new(psi, workers);
            check_equivalence(a.level, &pre, &msgs, config, streams)?;
            print_row(&bench_sign(a.level, a.phi, config, streams, a.reps, &seed)?);
        }
        for &phi in a.batch.iter().filter(|&&b| b >= 1) {
            let config = BatchConfig::new(
                BatchConfig::default_psi(phi, workers, DEFAULT_CONCURRENCY_MULTIPLIER),
                workers,
            );
            print_row(&bench_sign(a.level, phi, config, streams, a.reps, &seed)?);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Keygen(a) => cmd_keygen(a),
        Command::Sign(a) => cmd_sign(a),
        Command::Verify(a) => cmd_verify(a),
        Command::BatchSign(a) => cmd_batch_sign(a),
        Command::BatchVerify(a) => cmd_batch_verify(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Sweep(a) => cmd_sweep(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
