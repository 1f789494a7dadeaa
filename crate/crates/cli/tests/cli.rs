//! End-to-end tests driving the `scet` binary through its subcommands.

use scet_core::params::toy_profile;
use scet_core::scet::{ciphertext_from_bytes, ciphertext_to_bytes};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_scet"))
}

fn run_ok(args: &[&str], dir: &Path) -> Output {
    let out = bin().args(args).current_dir(dir).output().unwrap();
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).trim().to_string()
}

/// keygen → signcrypt → unsigncrypt recovers the original hex message.
#[test]
fn pipeline_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run_ok(
        &["keygen", "--role", "receiver", "--out", "r", "--seed", "1"],
        d,
    );
    run_ok(
        &["keygen", "--role", "sender", "--out", "s", "--seed", "2"],
        d,
    );
    run_ok(
        &[
            "signcrypt", "--to", "r.pk", "--from", "s.sk", "--from-pk", "s.pk", "--msg", "a5c3",
            "--out", "ct.bin", "--seed", "3",
        ],
        d,
    );
    let out = run_ok(
        &[
            "unsigncrypt",
            "--key",
            "r.sk",
            "--my-pk",
            "r.pk",
            "--sender",
            "s.pk",
            "--in",
            "ct.bin",
        ],
        d,
    );
    assert_eq!(stdout(&out), "a5c3");
}

/// A tampered ciphertext prints REJECT and exits 1.
#[test]
fn tampered_ciphertext_rejects() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run_ok(
        &["keygen", "--role", "receiver", "--out", "r", "--seed", "4"],
        d,
    );
    run_ok(
        &["keygen", "--role", "sender", "--out", "s", "--seed", "5"],
        d,
    );
    run_ok(
        &[
            "signcrypt", "--to", "r.pk", "--from", "s.sk", "--from-pk", "s.pk", "--msg", "1234",
            "--out", "ct.bin", "--seed", "6",
        ],
        d,
    );
    let ps = toy_profile();
    let bytes = std::fs::read(d.join("ct.bin")).unwrap();
    let mut ct = ciphertext_from_bytes(&ps, &bytes).unwrap();
    ct.e.set(0, ct.e.get(0) + 1);
    std::fs::write(d.join("ct.bin"), ciphertext_to_bytes(&ps, &ct)).unwrap();
    let out = bin()
        .args([
            "unsigncrypt",
            "--key",
            "r.sk",
            "--my-pk",
            "r.pk",
            "--sender",
            "s.pk",
            "--in",
            "ct.bin",
        ])
        .current_dir(d)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout(&out), "REJECT");
}

/// Equality test prints 1 across different receivers for the same message
/// and 0 for different messages.
#[test]
fn equality_test_cross_receiver() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for (role, name, seed) in [
        ("receiver", "r1", "11"),
        ("receiver", "r2", "12"),
        ("sender", "s", "13"),
    ] {
        run_ok(&["keygen", "--role", role, "--out", name, "--seed", seed], d);
    }
    for (to, msg, out, seed) in [
        ("r1.pk", "beef", "ct1.bin", "21"),
        ("r2.pk", "beef", "ct2.bin", "22"),
        ("r1.pk", "0001", "ct3.bin", "23"),
    ] {
        run_ok(
            &[
                "signcrypt", "--to", to, "--from", "s.sk", "--from-pk", "s.pk", "--msg", msg,
                "--out", out, "--seed", seed,
            ],
            d,
        );
    }
    run_ok(&["tag", "--key", "r1.sk", "--out", "r1.tag"], d);
    run_ok(&["tag", "--key", "r2.sk", "--out", "r2.tag"], d);
    let same = run_ok(
        &[
            "test", "--tag1", "r1.tag", "--ct1", "ct1.bin", "--keys1", "r1.pk", "s.pk", "--tag2",
            "r2.tag", "--ct2", "ct2.bin", "--keys2", "r2.pk", "s.pk",
        ],
        d,
    );
    assert_eq!(stdout(&same), "1");
    let diff = run_ok(
        &[
            "test", "--tag1", "r1.tag", "--ct1", "ct1.bin", "--keys1", "r1.pk", "s.pk", "--tag2",
            "r1.tag", "--ct2", "ct3.bin", "--keys2", "r1.pk", "s.pk",
        ],
        d,
    );
    assert_eq!(stdout(&diff), "0");
}

/// Files the CLI writes parse and re-serialize bit-exactly.
#[test]
fn written_files_roundtrip_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run_ok(
        &["keygen", "--role", "receiver", "--out", "r", "--seed", "31"],
        d,
    );
    run_ok(
        &["keygen", "--role", "sender", "--out", "s", "--seed", "32"],
        d,
    );
    run_ok(
        &[
            "signcrypt", "--to", "r.pk", "--from", "s.sk", "--from-pk", "s.pk", "--msg", "cafe",
            "--out", "ct.bin", "--seed", "33",
        ],
        d,
    );
    run_ok(&["tag", "--key", "r.sk", "--out", "r.tag"], d);
    let ps = toy_profile();
    let reencode: Vec<(PathBuf, Box<dyn Fn(&[u8]) -> Vec<u8>>)> = vec![
        (
            d.join("r.pk"),
            Box::new(|b| {
                scet_core::scet::receiver_pk_to_bytes(
                    &toy_profile(),
                    &scet_core::scet::receiver_pk_from_bytes(&toy_profile(), b).unwrap(),
                )
            }),
        ),
        (
            d.join("r.sk"),
            Box::new(|b| {
                scet_core::scet::receiver_sk_to_bytes(
                    &toy_profile(),
                    &scet_core::scet::receiver_sk_from_bytes(&toy_profile(), b).unwrap(),
                )
            }),
        ),
        (
            d.join("s.pk"),
            Box::new(|b| {
                scet_core::scet::sender_pk_to_bytes(
                    &toy_profile(),
                    &scet_core::scet::sender_pk_from_bytes(&toy_profile(), b).unwrap(),
                )
            }),
        ),
        (
            d.join("s.sk"),
            Box::new(|b| {
                scet_core::scet::sender_sk_to_bytes(
                    &toy_profile(),
                    &scet_core::scet::sender_sk_from_bytes(&toy_profile(), b).unwrap(),
                )
            }),
        ),
        (
            d.join("r.tag"),
            Box::new(|b| {
                scet_core::scet::tag_key_to_bytes(
                    &toy_profile(),
                    &scet_core::scet::tag_key_from_bytes(&toy_profile(), b).unwrap(),
                )
            }),
        ),
        (
            d.join("ct.bin"),
            Box::new(move |b| ciphertext_to_bytes(&ps, &ciphertext_from_bytes(&ps, b).unwrap())),
        ),
    ];
    for (path, re) in reencode {
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(re(&bytes), bytes, "roundtrip mismatch for {path:?}");
    }
}

/// Secret-key material never appears on stdout.
#[test]
fn no_secret_material_printed() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = run_ok(
        &["keygen", "--role", "receiver", "--out", "r", "--seed", "41"],
        d,
    );
    let text = stdout(&out);
    assert!(text.contains("r.pk") && text.contains("r.sk"));
    let sk = std::fs::read(d.join("r.sk")).unwrap();
    // Output is a short path notice, nothing close to key-sized.
    assert!(text.len() < 100 && sk.len() > 1000);
}

/// params-check: toy exits 0; demo --json is valid JSON with all checks
/// passing; a structurally broken profile file exits 3.
#[test]
fn params_check_profiles() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run_ok(&["params-check", "--profile", "toy"], d);
    let out = run_ok(&["params-check", "--profile", "demo", "--json"], d);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["passed"].as_bool().unwrap()));

    let mut ps = toy_profile();
    ps.k += 1; // breaks k = ceil(log2 q)
    std::fs::write(d.join("bad.json"), serde_json::to_string(&ps).unwrap()).unwrap();
    let out = bin()
        .args(["params-check", "--profile", "bad.json"])
        .current_dir(d)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

/// attack-demo prints per-trial lines and a perfect advantage at small trial
/// counts.
#[test]
fn attack_demo_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_ok(&["attack-demo", "--trials", "5", "--seed", "7"], dir.path());
    let text = stdout(&out);
    assert_eq!(text.lines().filter(|l| l.starts_with("trial")).count(), 5);
    assert!(text.contains("correct 5/5"));
    assert!(text.contains("advantage 1.0000"));
}

/// Mixed-profile files are refused: a demo-profile command cannot consume
/// toy-profile keys.
#[test]
fn cross_profile_files_refused() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run_ok(
        &["keygen", "--role", "receiver", "--out", "r", "--seed", "51"],
        d,
    );
    let out = bin()
        .args([
            "tag", "--key", "r.sk", "--out", "r.tag", "--profile", "demo",
        ])
        .current_dir(d)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("digest mismatch"));
}
