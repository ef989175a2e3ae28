use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const SEED: &str = "000102030405060708090a0b0c0d0e0f101112131415161718191a1b1c1d1e1f";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dilithium"))
        .args(args)
        .output()
        .expect("spawn dilithium")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

struct Keys {
    dir: TempDir,
}

impl Keys {
    fn new(level: &str, format: &str) -> Self {
        let dir = TempDir::new().unwrap();
        let out = run(&[
            "keygen",
            "--level",
            level,
            "--seed",
            SEED,
            "--out-format",
            format,
            "--pk",
            p(&dir.path().join("pk")),
            "--sk",
            p(&dir.path().join("sk")),
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
        std::fs::write(dir.path().join("msg"), b"attack at dawn").unwrap();
        Keys { dir }
    }

    fn path(&self, name: &str) -> std::path::PathBuf {
        self.dir.path().join(name)
    }

    fn sign(&self, level: &str, format: &str) {
        let out = run(&[
            "sign",
            "--level",
            level,
            "--out-format",
            format,
            "--sk",
            p(&self.path("sk")),
            "--msg",
            p(&self.path("msg")),
            "--sig",
            p(&self.path("sig")),
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }

    fn verify(&self, level: &str, sig: &str) -> i32 {
        run(&[
            "verify",
            "--level",
            level,
            "--pk",
            p(&self.path("pk")),
            "--msg",
            p(&self.path("msg")),
            "--sig",
            p(&self.path(sig)),
        ])
        .status
        .code()
        .unwrap()
    }
}

#[test]
fn pipeline_accepts_at_every_level() {
    for (level, sizes) in [
        ("2", (1312, 2528, 2420)),
        ("3", (1952, 4000, 3293)),
        ("5", (2592, 4864, 4595)),
    ] {
        let k = Keys::new(level, "binary");
        k.sign(level, "binary");
        let len = |n: &str| std::fs::metadata(k.path(n)).unwrap().len() as usize;
        assert_eq!((len("pk"), len("sk"), len("sig")), sizes);
        assert_eq!(k.verify(level, "sig"), 0);
    }
}

#[test]
fn truncated_signature_is_malformed() {
    let k = Keys::new("2", "binary");
    k.sign("2", "binary");
    let sig = std::fs::read(k.path("sig")).unwrap();
    std::fs::write(k.path("short"), &sig[..sig.len() - 1]).unwrap();
    assert_eq!(k.verify("2", "short"), 2);
}

#[test]
fn mutated_challenge_is_rejected() {
    let k = Keys::new("3", "binary");
    k.sign("3", "binary");
    let mut sig = std::fs::read(k.path("sig")).unwrap();
    sig[5] ^= 0x10;
    std::fs::write(k.path("bad"), &sig).unwrap();
    assert_eq!(k.verify("3", "bad"), 1);
    std::fs::write(k.path("msg"), b"attack at dusk").unwrap();
    assert_eq!(k.verify("3", "sig"), 1);
}

#[test]
fn hex_output_round_trips() {
    let bin = Keys::new("5", "binary");
    bin.sign("5", "binary");
    let hex = Keys::new("5", "hex");
    hex.sign("5", "hex");
    for name in ["pk", "sk", "sig"] {
        let text = std::fs::read_to_string(hex.path(name)).unwrap();
        assert_eq!(
            hex::decode(text.trim()).unwrap(),
            std::fs::read(bin.path(name)).unwrap(),
            "{name}"
        );
    }
    assert_eq!(hex.verify("5", "sig"), 0);
}

#[test]
fn batch_sign_matches_single_signing() {
    let k = Keys::new("2", "binary");
    let msgs: Vec<String> = (0..6)
        .map(|i| {
            let path = k.path(&format!("m{i}"));
            std::fs::write(&path, format!("message {i}")).unwrap();
            p(&path).to_owned()
        })
        .collect();
    let out_dir = k.path("sigs");
    std::fs::create_dir(&out_dir).unwrap();
    let trace = k.path("trace.csv");
    let (sk, pk) = (k.path("sk"), k.path("pk"));
    let mut args = vec![
        "batch-sign",
        "--level",
        "2",
        "--sk",
        p(&sk),
        "--phi",
        "4",
        "--psi",
        "3",
        "--workers",
        "2",
    ];
    args.extend([
        "--streams",
        "2",
        "--out-dir",
        p(&out_dir),
        "--trace",
        p(&trace),
    ]);
    args.extend(msgs.iter().map(String::as_str));
    let out = run(&args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    for i in 0..6 {
        std::fs::copy(k.path(&format!("m{i}")), k.path("msg")).unwrap();
        k.sign("2", "binary");
        assert_eq!(
            std::fs::read(out_dir.join(format!("m{i}.sig"))).unwrap(),
            std::fs::read(k.path("sig")).unwrap()
        );
    }
    let trace = std::fs::read_to_string(trace).unwrap();
    let mut lines = trace.lines();
    assert_eq!(
        lines.next(),
        Some("version,round,active_tasks,attempts,speculative,idle_slots")
    );
    assert!(lines.all(|l| l.starts_with("1,")));

    let mut args = vec![
        "batch-verify",
        "--level",
        "2",
        "--pk",
        p(&pk),
        "--sig-dir",
        p(&out_dir),
    ];
    args.extend(msgs.iter().map(String::as_str));
    assert_eq!(run(&args).status.code(), Some(0));
    std::fs::write(&msgs[3], "tampered").unwrap();
    assert_eq!(run(&args).status.code(), Some(1));
}

#[test]
fn psi_above_phi_is_refused() {
    let k = Keys::new("2", "binary");
    let out = run(&[
        "batch-sign",
        "--level",
        "2",
        "--sk",
        p(&k.path("sk")),
        "--phi",
        "2",
        "--psi",
        "3",
        p(&k.path("msg")),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&[
        "bench", "--level", "2", "--phi", "2", "--psi", "3", "--reps", "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bench_and_sweep_emit_versioned_csv() {
    let header = "version,op,level,phi,psi,workers,streams,reps,throughput_ops,mean_latency_ms,attempts_mean";
    let out = run(&[
        "bench",
        "--level",
        "2",
        "--phi",
        "4",
        "--workers",
        "2",
        "--reps",
        "2",
        "--seed",
        SEED,
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], header);
    assert_eq!(lines.len(), 5);
    assert!(lines[1..]
        .iter()
        .all(|l| l.starts_with("1,") && l.split(',').count() == 11));

    let out = run(&[
        "sweep",
        "--level",
        "2",
        "--phi",
        "8",
        "--psi",
        "1,8,16",
        "--batch",
        "1,2",
        "--streams",
        "1,2",
        "--workers",
        "2",
        "--reps",
        "1",
        "--seed",
        SEED,
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    // Ψ = 16 exceeds Φ and is skipped: (2 Ψ points + 2 batch points) per stream count.
    assert_eq!(text.lines().count(), 1 + 2 * 4);
}

#[test]
fn bad_level_and_missing_file_fail() {
    assert_eq!(
        run(&["keygen", "--level", "4", "--pk", "x", "--sk", "y"])
            .status
            .code(),
        Some(2)
    );
    let k = Keys::new("2", "binary");
    assert_eq!(k.verify("2", "does-not-exist"), 2);
}
