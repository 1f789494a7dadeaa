//! `scet` — command-line front end for the signcryption-with-equality-test
//! library: key lifecycle, signcrypt/unsigncrypt, tag extraction, equality
//! testing, parameter checking, the chosen-plaintext attack demo and the
//! acceptance self-test.
//!
//! Exit codes: 0 success, 1 cryptographic reject (⊥ or failed self-test),
//! 2 I/O or format error, 3 invalid parameters.
//!
//! Public parameters are derived deterministically from the profile, so two
//! invocations with the same `--profile` operate in the same system. Messages
//! are hex-encoded ℓ-bit strings. No subcommand prints secret-key material.

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use scet_core::params::{check_constraints, demo_profile, toy_profile, ParamSet};
use scet_core::scet::{
    self, keygen_receiver, keygen_sender, setup, signcrypt, tag_extract, test_equality,
    unsigncrypt, PublicParams, TestSide,
};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Seed for deriving public parameters from a profile; fixed so that
/// separate invocations agree on the system.
const PP_SEED: u64 = 1;

#[derive(Parser)]
#[command(
    name = "scet",
    version,
    about = "Lattice signcryption with a ciphertext equality test (educational; insecure toy parameters)"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Role {
    Receiver,
    Sender,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a key pair and write PREFIX.pk / PREFIX.sk.
    Keygen {
        #[arg(long, value_enum)]
        role: Role,
        /// Output path prefix.
        #[arg(long)]
        out: PathBuf,
        /// Parameter profile: toy, demo, or a JSON file.
        #[arg(long, default_value = "toy")]
        profile: String,
        /// RNG seed for reproducible keys (default: OS entropy).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Signcrypt a message to a receiver.
    Signcrypt {
        /// Receiver public-key file.
        #[arg(long)]
        to: PathBuf,
        /// Sender secret-key file.
        #[arg(long)]
        from: PathBuf,
        /// Sender public-key file.
        #[arg(long)]
        from_pk: PathBuf,
        /// Message as a hex-encoded ℓ-bit string.
        #[arg(long)]
        msg: String,
        /// Ciphertext output file.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "toy")]
        profile: String,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Unsigncrypt a ciphertext; prints the message as hex, or REJECT.
    Unsigncrypt {
        /// Receiver secret-key file.
        #[arg(long)]
        key: PathBuf,
        /// Receiver public-key file.
        #[arg(long)]
        my_pk: PathBuf,
        /// Sender public-key file.
        #[arg(long)]
        sender: PathBuf,
        /// Ciphertext file.
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "toy")]
        profile: String,
    },
    /// Extract the equality-test tag key from a receiver secret key.
    Tag {
        /// Receiver secret-key file.
        #[arg(long)]
        key: PathBuf,
        /// Tag-key output file.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "toy")]
        profile: String,
    },
    /// Equality-test two ciphertexts; prints 1 (same message) or 0.
    Test {
        /// Tag-key file for side 1.
        #[arg(long)]
        tag1: PathBuf,
        /// Ciphertext file for side 1.
        #[arg(long)]
        ct1: PathBuf,
        /// Receiver and sender public-key files for side 1.
        #[arg(long, num_args = 2, value_names = ["RECEIVER_PK", "SENDER_PK"])]
        keys1: Vec<PathBuf>,
        /// Tag-key file for side 2.
        #[arg(long)]
        tag2: PathBuf,
        /// Ciphertext file for side 2.
        #[arg(long)]
        ct2: PathBuf,
        /// Receiver and sender public-key files for side 2.
        #[arg(long, num_args = 2, value_names = ["RECEIVER_PK", "SENDER_PK"])]
        keys2: Vec<PathBuf>,
        #[arg(long, default_value = "toy")]
        profile: String,
    },
    /// Evaluate every parameter inequality for a profile.
    ParamsCheck {
        #[arg(long, default_value = "toy")]
        profile: String,
        /// Emit the report as JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Run the chosen-plaintext attack experiment against the Lu-SC scheme.
    AttackDemo {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the acceptance suite at the toy profile.
    Selftest,
}

/// Error carrying the process exit code.
struct CliError {
    code: u8,
    message: String,
}

type CliResult<T> = Result<T, CliError>;

fn fail<T>(code: u8, message: impl Into<String>) -> CliResult<T> {
    Err(CliError {
        code,
        message: message.into(),
    })
}

/// Core-library errors surfacing through the CLI are format problems.
fn format_err(e: scet_core::Error) -> CliError {
    CliError {
        code: 2,
        message: e.to_string(),
    }
}

fn read_file(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| CliError {
        code: 2,
        message: format!("reading {}: {e}", path.display()),
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes).map_err(|e| CliError {
        code: 2,
        message: format!("writing {}: {e}", path.display()),
    })
}

fn load_profile(profile: &str) -> CliResult<ParamSet> {
    let ps: ParamSet = match profile {
        "toy" => toy_profile(),
        "demo" => demo_profile(),
        path => {
            let text = fs::read_to_string(path).map_err(|e| CliError {
                code: 2,
                message: format!("reading profile {path}: {e}"),
            })?;
            match serde_json::from_str(&text) {
                Ok(ps) => ps,
                Err(e) => return fail(2, format!("parsing profile {path}: {e}")),
            }
        }
    };
    if let Err(e) = ps.validate() {
        return fail(3, e.to_string());
    }
    Ok(ps)
}

fn load_system(profile: &str) -> CliResult<PublicParams> {
    let ps = load_profile(profile)?;
    match setup(&ps, PP_SEED) {
        Ok(pp) => Ok(pp),
        Err(e) => fail(3, e.to_string()),
    }
}

fn make_rng(seed: Option<u64>) -> ChaCha20Rng {
    match seed {
        Some(s) => ChaCha20Rng::seed_from_u64(s),
        None => ChaCha20Rng::from_entropy(),
    }
}

/// Parse a hex string into exactly `ell` bits (MSB-first within each digit);
/// any padding bits in the last digit must be zero.
fn hex_to_bits(s: &str, ell: usize) -> CliResult<Vec<u8>> {
    let digits = ell.div_ceil(4);
    if s.len() != digits {
        return fail(
            2,
            format!("message must be {digits} hex digits ({ell} bits), got {}", s.len()),
        );
    }
    let mut bits = Vec::with_capacity(4 * digits);
    for ch in s.chars() {
        let v = match ch.to_digit(16) {
            Some(v) => v as u8,
            None => return fail(2, format!("invalid hex digit {ch:?}")),
        };
        for i in (0..4).rev() {
            bits.push((v >> i) & 1);
        }
    }
    if bits[ell..].iter().any(|&b| b != 0) {
        return fail(2, "padding bits past the message length must be zero");
    }
    bits.truncate(ell);
    Ok(bits)
}

fn bits_to_hex(bits: &[u8]) -> String {
    let mut out = String::new();
    for chunk in bits.chunks(4) {
        let mut v = 0u32;
        for (i, &b) in chunk.iter().enumerate() {
            v |= (b as u32) << (3 - i);
        }
        out.push(char::from_digit(v, 16).unwrap());
    }
    out
}

fn run(cli: Cli) -> CliResult<u8> {
    match cli.cmd {
        Cmd::Keygen {
            role,
            out,
            profile,
            seed,
        } => {
            let pp = load_system(&profile)?;
            let mut rng = make_rng(seed);
            let pk_path = out.with_extension("pk");
            let sk_path = out.with_extension("sk");
            match role {
                Role::Receiver => {
                    let keys = keygen_receiver(&pp, &mut rng).map_err(format_err)?;
                    write_file(&pk_path, &scet::receiver_pk_to_bytes(&pp.params, &keys.public))?;
                    write_file(&sk_path, &scet::receiver_sk_to_bytes(&pp.params, &keys.secret))?;
                }
                Role::Sender => {
                    let keys = keygen_sender(&pp, &mut rng).map_err(format_err)?;
                    write_file(&pk_path, &scet::sender_pk_to_bytes(&pp.params, &keys.public))?;
                    write_file(&sk_path, &scet::sender_sk_to_bytes(&pp.params, &keys.secret))?;
                }
            }
            println!("wrote {} and {}", pk_path.display(), sk_path.display());
            Ok(0)
        }
        Cmd::Signcrypt {
            to,
            from,
            from_pk,
            msg,
            out,
            profile,
            seed,
        } => {
            let pp = load_system(&profile)?;
            let pk_r =
                scet::receiver_pk_from_bytes(&pp.params, &read_file(&to)?).map_err(format_err)?;
            let sk_s =
                scet::sender_sk_from_bytes(&pp.params, &read_file(&from)?).map_err(format_err)?;
            let pk_s = scet::sender_pk_from_bytes(&pp.params, &read_file(&from_pk)?)
                .map_err(format_err)?;
            let mu = hex_to_bits(&msg, pp.params.ell)?;
            let mut rng = make_rng(seed);
            let ct = signcrypt(&pp, &pk_r, &sk_s, &pk_s, &mu, &mut rng).map_err(format_err)?;
            write_file(&out, &scet::ciphertext_to_bytes(&pp.params, &ct))?;
            println!("wrote {}", out.display());
            Ok(0)
        }
        Cmd::Unsigncrypt {
            key,
            my_pk,
            sender,
            input,
            profile,
        } => {
            let pp = load_system(&profile)?;
            let sk_r =
                scet::receiver_sk_from_bytes(&pp.params, &read_file(&key)?).map_err(format_err)?;
            let pk_r = scet::receiver_pk_from_bytes(&pp.params, &read_file(&my_pk)?)
                .map_err(format_err)?;
            let pk_s = scet::sender_pk_from_bytes(&pp.params, &read_file(&sender)?)
                .map_err(format_err)?;
            let ct = scet::ciphertext_from_bytes(&pp.params, &read_file(&input)?)
                .map_err(format_err)?;
            match unsigncrypt(&pp, &sk_r, &pk_r, &pk_s, &ct).map_err(format_err)? {
                Some(mu) => {
                    println!("{}", bits_to_hex(&mu));
                    Ok(0)
                }
                None => {
                    println!("REJECT");
                    Ok(1)
                }
            }
        }
        Cmd::Tag { key, out, profile } => {
            let pp = load_system(&profile)?;
            let sk_r =
                scet::receiver_sk_from_bytes(&pp.params, &read_file(&key)?).map_err(format_err)?;
            let tg = tag_extract(&sk_r);
            write_file(&out, &scet::tag_key_to_bytes(&pp.params, &tg))?;
            println!("wrote {}", out.display());
            Ok(0)
        }
        Cmd::Test {
            tag1,
            ct1,
            keys1,
            tag2,
            ct2,
            keys2,
            profile,
        } => {
            let pp = load_system(&profile)?;
            let load_side = |tag: &Path, ct: &Path, keys: &[PathBuf]| -> CliResult<_> {
                let tg =
                    scet::tag_key_from_bytes(&pp.params, &read_file(tag)?).map_err(format_err)?;
                let ct = scet::ciphertext_from_bytes(&pp.params, &read_file(ct)?)
                    .map_err(format_err)?;
                let pk_r = scet::receiver_pk_from_bytes(&pp.params, &read_file(&keys[0])?)
                    .map_err(format_err)?;
                let pk_s = scet::sender_pk_from_bytes(&pp.params, &read_file(&keys[1])?)
                    .map_err(format_err)?;
                Ok((tg, ct, pk_r, pk_s))
            };
            let s1 = load_side(&tag1, &ct1, &keys1)?;
            let s2 = load_side(&tag2, &ct2, &keys2)?;
            let side1: TestSide = (&s1.0, &s1.1, &s1.2, &s1.3);
            let side2: TestSide = (&s2.0, &s2.1, &s2.2, &s2.3);
            let equal = test_equality(&pp, side1, side2).map_err(format_err)?;
            println!("{}", u8::from(equal));
            Ok(0)
        }
        Cmd::ParamsCheck { profile, json } => {
            let ps = load_profile(&profile)?;
            let report = check_constraints(&ps);
            if json {
                println!("{}", serde_json::to_string_pretty(&report).unwrap());
            } else {
                print!("{}", report.render_text());
            }
            // Hardness rows are report-only; functional failures make the
            // profile unusable.
            Ok(if report.functional_ok() { 0 } else { 3 })
        }
        Cmd::AttackDemo { trials, seed } => {
            let pp = scet_core::attack::toy_lu_params().map_err(format_err)?;
            let report = scet_core::attack::attack_experiment(&pp, trials, seed)
                .map_err(|e| CliError {
                    code: 3,
                    message: e.to_string(),
                })?;
            for (i, t) in report.trials.iter().enumerate() {
                println!(
                    "trial {:>3}: truth={} guess={} {}",
                    i,
                    t.truth,
                    t.guess,
                    if t.truth == t.guess { "correct" } else { "WRONG" }
                );
            }
            println!(
                "correct {}/{} | collisions {} | advantage {:.4}",
                report.correct,
                report.trials.len(),
                report.collisions,
                report.advantage
            );
            Ok(0)
        }
        Cmd::Selftest => {
            let results = scet_core::acceptance::run_all();
            let mut ok = true;
            for r in &results {
                println!("{}", r.render());
                ok &= r.passed;
            }
            Ok(if ok { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
