//! An executable IND-CPA break of the Lu et al. lattice signcryption.
//!
//! The module carries just enough of the victim scheme ("Lu-SC") to emit
//! honestly distributed ciphertexts: setup, key generation and signcrypt.
//! The distinguisher then decides which of two chosen plaintexts a challenge
//! ciphertext encrypts using public information only, by re-deriving the
//! masking vector t = c − μ_b for both candidates and testing the scheme's
//! own verification relations.
//!
//! One liberty is taken with the victim's key generation, and it is the only
//! one: instead of a GPV short-basis trapdoor for A_S we use the gadget
//! trapdoor stack already in this crate, and draw the kernel vector v of
//! F_μ = [A_S || C_0 + Σ(−1)^{h_i}C_i] by extending a preimage sample to the
//! right block. Every object the distinguisher sees — the C_i (uniform), the
//! ciphertext equations, the verification relations — is exactly as in the
//! victim scheme; only the sampler behind the sender's secret differs.

use crate::error::{Error, Result};
use crate::gaussian::sample_vec;
use crate::hashes::{xof_expand, XofStream, DOMAIN_LU_H2};
use crate::params::ceil_log2;
use crate::serialize::Writer;
use crate::trapdoor::{gen_trap, sample_pre_extended, GTrapdoor};
use crate::zq::{balanced_lift, IntVector, ZqMatrix, ZqVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Victim-scheme system parameters and public matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct LuParams {
    pub n: usize,
    pub q: u64,
    /// Uniform key block width; the full key width is m = m_bar + nk.
    pub m_bar: usize,
    pub m: usize,
    /// Message-hash output length (number of C_i sign flips).
    pub tau: usize,
    /// Kernel-sample width.
    pub sigma: f64,
    /// LWE noise width αq.
    pub alpha_q: f64,
    /// Public mixing matrices C_0..C_τ, each n×m.
    pub c: Vec<ZqMatrix>,
}

/// Public half of a Lu-SC key: the trapdoor matrix A and the uniform B.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LuPublicKey {
    pub a: ZqMatrix,
    pub b: ZqMatrix,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LuKeyPair {
    pub public: LuPublicKey,
    pub trapdoor: GTrapdoor,
}

/// Lu-SC ciphertext (c, b1, b2).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LuCiphertext {
    pub c: ZqVector,
    pub b1: ZqVector,
    pub b2: ZqVector,
}

/// Deterministic setup: dimensions plus the uniform C_0..C_τ.
pub fn lu_setup(
    n: usize,
    q: u64,
    m_bar: usize,
    tau: usize,
    sigma: f64,
    alpha: f64,
    seed: u64,
) -> Result<LuParams> {
    if n == 0 || tau == 0 || sigma <= 0.0 || alpha <= 0.0 {
        return Err(Error::InvalidParams("Lu setup arguments must be positive".into()));
    }
    let k = ceil_log2(q);
    let m = m_bar + n * k;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut c = Vec::with_capacity(tau + 1);
    for _ in 0..=tau {
        c.push(ZqMatrix::uniform(n, m, q, &mut rng)?);
    }
    Ok(LuParams {
        n,
        q,
        m_bar,
        m,
        tau,
        sigma,
        alpha_q: alpha * q as f64,
        c,
    })
}

/// Desk-scale victim parameters for the attack demonstration.
pub fn toy_lu_params() -> Result<LuParams> {
    lu_setup(4, 7681, 52, 16, 115.0, 5.0 / 7681.0, 0)
}

/// Generate one sender and one receiver key pair.
pub fn lu_keygen<R: Rng + ?Sized>(pp: &LuParams, rng: &mut R) -> Result<(LuKeyPair, LuKeyPair)> {
    let pair = |rng: &mut R| -> Result<LuKeyPair> {
        let (a, t) = gen_trap(pp.n, pp.m_bar, pp.q, 2.7, 1, rng)?;
        let b = ZqMatrix::uniform(pp.n, pp.m, pp.q, rng)?;
        Ok(LuKeyPair {
            public: LuPublicKey { a, b },
            trapdoor: t,
        })
    };
    let sender = pair(rng)?;
    let receiver = pair(rng)?;
    Ok((sender, receiver))
}

fn h1_input(mu: &ZqVector, pk_r: &LuPublicKey) -> Vec<u8> {
    let mut w = Writer::new();
    w.put_vector(mu);
    w.put_matrix(&pk_r.a);
    w.put_matrix(&pk_r.b);
    w.into_bytes()
}

/// H1(μ, pk_R) ∈ {0,1}^τ.
pub fn lu_h1(pp: &LuParams, mu: &ZqVector, pk_r: &LuPublicKey) -> Vec<u8> {
    let mut x = XofStream::new(b"LU/H1", &h1_input(mu, pk_r));
    (0..pp.tau).map(|_| x.next_bits(1) as u8).collect()
}

/// H2(μ, pk_S, pk_R, v) ∈ Z_q^n.
pub fn lu_h2(
    pp: &LuParams,
    mu: &ZqVector,
    pk_s: &LuPublicKey,
    pk_r: &LuPublicKey,
    v: &IntVector,
) -> Result<ZqVector> {
    let mut w = Writer::new();
    w.put_vector(mu);
    w.put_matrix(&pk_s.a);
    w.put_matrix(&pk_s.b);
    w.put_matrix(&pk_r.a);
    w.put_matrix(&pk_r.b);
    w.put_int_vector(v);
    xof_expand(DOMAIN_LU_H2, &w.into_bytes(), pp.n, pp.q)
}

/// C_0 + Σ (−1)^{h_i}·C_i.
fn signed_block(pp: &LuParams, h: &[u8]) -> Result<ZqMatrix> {
    let mut out = pp.c[0].clone();
    for (i, &hi) in h.iter().enumerate() {
        out = if hi == 0 {
            out.add(&pp.c[i + 1])?
        } else {
            out.sub(&pp.c[i + 1])?
        };
    }
    Ok(out)
}

/// Signcrypt a plaintext μ ∈ Z_q^n under the victim scheme.
pub fn lu_signcrypt<R: Rng + ?Sized>(
    pp: &LuParams,
    mu: &ZqVector,
    sender: &LuKeyPair,
    pk_r: &LuPublicKey,
    rng: &mut R,
) -> Result<LuCiphertext> {
    if mu.len() != pp.n || mu.modulus() != pp.q {
        return Err(Error::DimensionMismatch("Lu plaintext shape".into()));
    }
    let h = lu_h1(pp, mu, pk_r);
    let block = signed_block(pp, &h)?;
    let zero = ZqVector::zeros(pp.n, pp.q)?;

    // Nonzero Gaussian kernel vector of F_μ = [A_S || block].
    let mut v;
    loop {
        v = sample_pre_extended(&sender.public.a, &sender.trapdoor, &block, &zero, pp.sigma, rng)?;
        if v.entries().iter().any(|&e| e != 0) {
            break;
        }
    }

    let t = lu_h2(pp, mu, &sender.public, pk_r, &v)?;
    let c = t.add(mu)?;

    let e = sample_vec(2 * pp.m, pp.alpha_q, rng)?;
    let b1 = pk_r
        .a
        .hstack(&pp.c[0])?
        .transpose()
        .mul_vec(&t)?
        .add(&v.reduce_mod(pp.q)?)?;
    let b2 = pk_r
        .b
        .hstack(&pp.c[1])?
        .transpose()
        .mul_vec(&t)?
        .add(&e.reduce_mod(pp.q)?)?;
    Ok(LuCiphertext { c, b1, b2 })
}

/// Result of the distinguisher on one challenge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DistinguishOutcome {
    pub guess: u8,
    /// Set when both distinct candidates verified — an H2 collision witness.
    pub collision_witness: bool,
}

/// Decide whether `ct` signcrypts μ0 or μ1, from public data only.
pub fn cpa_distinguish(
    pp: &LuParams,
    ct: &LuCiphertext,
    pk_s: &LuPublicKey,
    pk_r: &LuPublicKey,
    mu0: &ZqVector,
    mu1: &ZqVector,
) -> Result<DistinguishOutcome> {
    let two_m = 2 * pp.m;
    if ct.b1.len() != two_m || ct.b2.len() != two_m || ct.c.len() != pp.n {
        return Err(Error::DimensionMismatch("Lu ciphertext shape".into()));
    }
    let v_bound = pp.sigma * (two_m as f64).sqrt();
    let e_bound = pp.alpha_q * (two_m as f64).sqrt();
    let ac0 = pk_r.a.hstack(&pp.c[0])?.transpose();
    let bc1 = pk_r.b.hstack(&pp.c[1])?.transpose();

    let matches = |mu: &ZqVector| -> Result<bool> {
        let t = ct.c.sub(mu)?;
        let v = balanced_lift(&ct.b1.sub(&ac0.mul_vec(&t)?)?);
        let e = balanced_lift(&ct.b2.sub(&bc1.mul_vec(&t)?)?);
        if v.norm() > v_bound || e.norm() > e_bound {
            return Ok(false);
        }
        if t != lu_h2(pp, mu, pk_s, pk_r, &v)? {
            return Ok(false);
        }
        let h = lu_h1(pp, mu, pk_r);
        let f_mu = pk_s.a.hstack(&signed_block(pp, &h)?)?;
        Ok(f_mu.mul_vec(&v.reduce_mod(pp.q)?)? == ZqVector::zeros(pp.n, pp.q)?)
    };

    let m0 = matches(mu0)?;
    let m1 = matches(mu1)?;
    match (m0, m1) {
        (true, false) => Ok(DistinguishOutcome {
            guess: 0,
            collision_witness: false,
        }),
        (false, true) => Ok(DistinguishOutcome {
            guess: 1,
            collision_witness: false,
        }),
        (true, true) => Ok(DistinguishOutcome {
            guess: 0,
            // Identical challenge plaintexts trivially both match; only
            // distinct ones witness an H2 collision.
            collision_witness: mu0 != mu1,
        }),
        (false, false) => Err(Error::NeitherMatches),
    }
}

/// One recorded game of the experiment harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialRecord {
    pub truth: u8,
    pub guess: u8,
}

/// Outcome of the full IND-CPA experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub trials: Vec<TrialRecord>,
    pub correct: usize,
    pub collisions: usize,
    /// |2·Pr[guess = b] − 1|.
    pub advantage: f64,
}

/// Run `trials` independent IND-CPA games end to end and estimate the
/// distinguisher's advantage.
pub fn attack_experiment(pp: &LuParams, trials: usize, seed: u64) -> Result<ExperimentReport> {
    if trials == 0 {
        return Err(Error::InvalidInput("trials must be >= 1".into()));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut records = Vec::with_capacity(trials);
    let mut correct = 0usize;
    let mut collisions = 0usize;
    for _ in 0..trials {
        let (sender, receiver) = lu_keygen(pp, &mut rng)?;
        let mu0 = ZqVector::uniform(pp.n, pp.q, &mut rng)?;
        let mut mu1 = ZqVector::uniform(pp.n, pp.q, &mut rng)?;
        while mu1 == mu0 {
            mu1 = ZqVector::uniform(pp.n, pp.q, &mut rng)?;
        }
        let truth: u8 = rng.gen_range(0..2);
        let challenge = if truth == 0 { &mu0 } else { &mu1 };
        let ct = lu_signcrypt(pp, challenge, &sender, &receiver.public, &mut rng)?;
        let out = cpa_distinguish(pp, &ct, &sender.public, &receiver.public, &mu0, &mu1)?;
        if out.collision_witness {
            collisions += 1;
        }
        if out.guess == truth {
            correct += 1;
        }
        records.push(TrialRecord {
            truth,
            guess: out.guess,
        });
    }
    let advantage = (2.0 * correct as f64 / trials as f64 - 1.0).abs();
    Ok(ExperimentReport {
        trials: records,
        correct,
        collisions,
        advantage,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn setup_deterministic_and_dims() {
        let pp1 = toy_lu_params().unwrap();
        let pp2 = toy_lu_params().unwrap();
        assert_eq!(pp1, pp2);
        assert_eq!(pp1.c.len(), pp1.tau + 1);
        assert_eq!(pp1.m, pp1.m_bar + pp1.n * ceil_log2(pp1.q));
        for m in &pp1.c {
            assert_eq!((m.rows(), m.cols()), (pp1.n, pp1.m));
        }
        assert_ne!(pp1, lu_setup(4, 7681, 52, 16, 115.0, 5.0 / 7681.0, 1).unwrap());
    }

    #[test]
    fn keygen_distinct() {
        let pp = toy_lu_params().unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(90);
        let mut seen = std::collections::HashSet::new();
        for _ in 0..100 {
            let (s, r) = lu_keygen(&pp, &mut rng).unwrap();
            assert!(seen.insert(s.public.a.entries().to_vec()));
            assert!(seen.insert(r.public.a.entries().to_vec()));
        }
    }

    #[test]
    fn signcrypt_identities() {
        let pp = toy_lu_params().unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(91);
        let (sender, receiver) = lu_keygen(&pp, &mut rng).unwrap();
        let bound = pp.sigma * ((2 * pp.m) as f64).sqrt();
        let mut over = 0;
        for _ in 0..100 {
            let mu = ZqVector::uniform(pp.n, pp.q, &mut rng).unwrap();
            let ct = lu_signcrypt(&pp, &mu, &sender, &receiver.public, &mut rng).unwrap();

            // Recover v from b1 and check the kernel identity F_μ·v = 0.
            let t = ct.c.sub(&mu).unwrap();
            let ac0 = receiver.public.a.hstack(&pp.c[0]).unwrap().transpose();
            let v = balanced_lift(&ct.b1.sub(&ac0.mul_vec(&t).unwrap()).unwrap());
            assert!(v.norm() > 0.0);
            if v.norm() > bound {
                over += 1;
            }
            let h = lu_h1(&pp, &mu, &receiver.public);
            let f_mu = sender
                .public
                .a
                .hstack(&signed_block(&pp, &h).unwrap())
                .unwrap();
            assert_eq!(
                f_mu.mul_vec(&v.reduce_mod(pp.q).unwrap()).unwrap(),
                ZqVector::zeros(pp.n, pp.q).unwrap()
            );
            // c − μ = H2(μ, pk_S, pk_R, v).
            assert_eq!(t, lu_h2(&pp, &mu, &sender.public, &receiver.public, &v).unwrap());
        }
        assert!(over <= 1, "over = {over}");
    }

    #[test]
    fn distinguisher_correct_both_directions() {
        let pp = toy_lu_params().unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(92);
        let (sender, receiver) = lu_keygen(&pp, &mut rng).unwrap();
        for truth in [0u8, 1] {
            for _ in 0..20 {
                let mu0 = ZqVector::uniform(pp.n, pp.q, &mut rng).unwrap();
                let mu1 = ZqVector::uniform(pp.n, pp.q, &mut rng).unwrap();
                if mu0 == mu1 {
                    continue;
                }
                let challenge = if truth == 0 { &mu0 } else { &mu1 };
                let ct =
                    lu_signcrypt(&pp, challenge, &sender, &receiver.public, &mut rng).unwrap();
                let out = cpa_distinguish(&pp, &ct, &sender.public, &receiver.public, &mu0, &mu1)
                    .unwrap();
                assert_eq!(out.guess, truth);
                assert!(!out.collision_witness);
            }
        }
    }

    #[test]
    fn wrong_candidate_norm_margin() {
        let pp = toy_lu_params().unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(93);
        let (sender, receiver) = lu_keygen(&pp, &mut rng).unwrap();
        let bound = pp.sigma * ((2 * pp.m) as f64).sqrt();
        let ac0 = receiver.public.a.hstack(&pp.c[0]).unwrap().transpose();
        for _ in 0..100 {
            let mu = ZqVector::uniform(pp.n, pp.q, &mut rng).unwrap();
            let wrong = ZqVector::uniform(pp.n, pp.q, &mut rng).unwrap();
            if mu == wrong {
                continue;
            }
            let ct = lu_signcrypt(&pp, &mu, &sender, &receiver.public, &mut rng).unwrap();
            let t_wrong = ct.c.sub(&wrong).unwrap();
            let v_wrong = balanced_lift(&ct.b1.sub(&ac0.mul_vec(&t_wrong).unwrap()).unwrap());
            assert!(
                v_wrong.norm() > bound,
                "wrong-candidate norm {} within bound {bound}",
                v_wrong.norm()
            );
        }
    }

    #[test]
    fn identical_challenge_messages_exempt() {
        let pp = toy_lu_params().unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(94);
        let (sender, receiver) = lu_keygen(&pp, &mut rng).unwrap();
        let mu = ZqVector::uniform(pp.n, pp.q, &mut rng).unwrap();
        let ct = lu_signcrypt(&pp, &mu, &sender, &receiver.public, &mut rng).unwrap();
        let out =
            cpa_distinguish(&pp, &ct, &sender.public, &receiver.public, &mu, &mu).unwrap();
        assert_eq!(out.guess, 0);
        assert!(!out.collision_witness);
    }

    #[test]
    fn garbage_ciphertext_rejected() {
        let pp = toy_lu_params().unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(95);
        let (sender, receiver) = lu_keygen(&pp, &mut rng).unwrap();
        let mu0 = ZqVector::uniform(pp.n, pp.q, &mut rng).unwrap();
        let mu1 = ZqVector::uniform(pp.n, pp.q, &mut rng).unwrap();
        let garbage = LuCiphertext {
            c: ZqVector::uniform(pp.n, pp.q, &mut rng).unwrap(),
            b1: ZqVector::uniform(2 * pp.m, pp.q, &mut rng).unwrap(),
            b2: ZqVector::uniform(2 * pp.m, pp.q, &mut rng).unwrap(),
        };
        assert_eq!(
            cpa_distinguish(&pp, &garbage, &sender.public, &receiver.public, &mu0, &mu1),
            Err(Error::NeitherMatches)
        );
    }

    #[test]
    fn experiment_degenerate_and_deterministic() {
        let pp = toy_lu_params().unwrap();
        let one = attack_experiment(&pp, 1, 5).unwrap();
        assert!(one.advantage == 0.0 || one.advantage == 1.0);
        let a = attack_experiment(&pp, 10, 6).unwrap();
        let b = attack_experiment(&pp, 10, 6).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.correct, 10, "all guesses should be right");
        assert!(attack_experiment(&pp, 0, 0).is_err());
    }
}
