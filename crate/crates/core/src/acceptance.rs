//! The acceptance suite: eleven numbered end-to-end criteria covering scheme
//! correctness, trapdoor identities, sampler statistics, the equality test,
//! the attack demonstration and the parameter checker.
//!
//! The suite is deterministic (fixed seeds) and is exercised both by the
//! `acceptance` integration test target and by the CLI `selftest` command.

use crate::attack::{attack_experiment, toy_lu_params};
use crate::gaussian::sample_vec;
use crate::hashes::wat_nonabort_estimate;
use crate::params::{check_constraints, demo_profile, toy_profile};
use crate::scet::{
    ciphertext_elements, keygen_receiver, keygen_sender, public_key_elements,
    secret_key_elements, setup, signcrypt, tag_extract, test_equality, unsigncrypt, Ciphertext,
    PublicParams, ReceiverKeys, SenderKeys, TestSide,
};
use crate::stats::binomial_se;
use crate::trapdoor::{
    apply_trapdoor, gen_trap, invert_lwe, sample_pre, trapdoor_combine, GTrapdoor,
};
use crate::zq::{IntMatrix, ZqMatrix, ZqVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Outcome of one numbered criterion.
#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub index: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CriterionResult {
    /// One-line rendering: "[PASS] criterion  1: roundtrip — 200/200".
    pub fn render(&self) -> String {
        format!(
            "[{}] criterion {:>2}: {} — {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.index,
            self.name,
            self.detail
        )
    }
}

fn toy_env(seed: u64) -> (PublicParams, ReceiverKeys, SenderKeys, ChaCha20Rng) {
    let pp = setup(&toy_profile(), 1).expect("toy setup");
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let rk = keygen_receiver(&pp, &mut rng).expect("receiver keygen");
    let sk = keygen_sender(&pp, &mut rng).expect("sender keygen");
    (pp, rk, sk, rng)
}

fn random_message<R: Rng + ?Sized>(ell: usize, rng: &mut R) -> Vec<u8> {
    (0..ell).map(|_| rng.gen_range(0..2u8)).collect()
}

/// Criterion 1: 200/200 signcrypt/unsigncrypt roundtrips at the toy profile.
fn c1_roundtrip() -> CriterionResult {
    let (pp, rk, sk, mut rng) = toy_env(101);
    let trials = 200;
    let mut ok = 0;
    for _ in 0..trials {
        let mu = random_message(pp.params.ell, &mut rng);
        let good = signcrypt(&pp, &rk.public, &sk.secret, &sk.public, &mu, &mut rng)
            .ok()
            .and_then(|ct| unsigncrypt(&pp, &rk.secret, &rk.public, &sk.public, &ct).ok())
            .flatten()
            == Some(mu);
        ok += usize::from(good);
    }
    CriterionResult {
        index: 1,
        name: "roundtrip correctness",
        passed: ok == trials,
        detail: format!("{ok}/{trials} messages recovered"),
    }
}

/// Criterion 2: equality-test truth table, 100 pairs per cell.
fn c2_equality_table() -> CriterionResult {
    let pp = setup(&toy_profile(), 1).expect("toy setup");
    let mut rng = ChaCha20Rng::seed_from_u64(102);
    let rk1 = keygen_receiver(&pp, &mut rng).unwrap();
    let rk2 = keygen_receiver(&pp, &mut rng).unwrap();
    let sk1 = keygen_sender(&pp, &mut rng).unwrap();
    let sk2 = keygen_sender(&pp, &mut rng).unwrap();
    let tg1 = tag_extract(&rk1.secret);
    let tg2 = tag_extract(&rk2.secret);
    let per_cell = 100;

    // (same message?, same receiver?) -> expected test output.
    let mut counts = Vec::new();
    let mut all_ok = true;
    for &(same_mu, same_receiver) in &[(true, true), (true, false), (false, true), (false, false)]
    {
        let mut ok = 0;
        for _ in 0..per_cell {
            let mu1 = random_message(pp.params.ell, &mut rng);
            let mu2 = if same_mu {
                mu1.clone()
            } else {
                let mut other = random_message(pp.params.ell, &mut rng);
                while other == mu1 {
                    other = random_message(pp.params.ell, &mut rng);
                }
                other
            };
            let (rkb, skb, tgb) = if same_receiver {
                (&rk1, &sk1, &tg1)
            } else {
                (&rk2, &sk2, &tg2)
            };
            let ct1 =
                signcrypt(&pp, &rk1.public, &sk1.secret, &sk1.public, &mu1, &mut rng).unwrap();
            let ct2 =
                signcrypt(&pp, &rkb.public, &skb.secret, &skb.public, &mu2, &mut rng).unwrap();
            let s1: TestSide = (&tg1, &ct1, &rk1.public, &sk1.public);
            let s2: TestSide = (tgb, &ct2, &rkb.public, &skb.public);
            let got = test_equality(&pp, s1, s2).unwrap();
            ok += usize::from(got == same_mu);
        }
        all_ok &= ok == per_cell;
        counts.push(format!(
            "{}/{} ({}-message, {}-receiver)",
            ok,
            per_cell,
            if same_mu { "same" } else { "diff" },
            if same_receiver { "same" } else { "diff" }
        ));
    }
    CriterionResult {
        index: 2,
        name: "equality-test truth table",
        passed: all_ok,
        detail: counts.join(", "),
    }
}

/// Criterion 3: exact trapdoor relations for 100 keygens per tag, and exact
/// preimage identities over 10^3 draws.
fn c3_trapdoor_identities() -> CriterionResult {
    let ps = toy_profile();
    let mut rng = ChaCha20Rng::seed_from_u64(103);
    let ctx = crate::gadget::GadgetCtx::new(ps.q, ps.n).unwrap();
    let g = ctx.gadget_matrix().unwrap();
    let mut relation_ok = 0;
    for tag in [0u64, 1] {
        for _ in 0..100 {
            let (a, t) = gen_trap(ps.n, ps.m_bar, ps.q, ps.sigma1, tag, &mut rng).unwrap();
            if apply_trapdoor(&a, &t.r).unwrap() == g.scalar_mul(tag) {
                relation_ok += 1;
            }
        }
    }
    let (a, t) = gen_trap(ps.n, ps.m_bar, ps.q, ps.sigma1, 1, &mut rng).unwrap();
    let mut preimage_ok = 0;
    let draws = 1000;
    for _ in 0..draws {
        let u = ZqVector::uniform(ps.n, ps.q, &mut rng).unwrap();
        let e = sample_pre(&a, &t, &u, ps.sigma2, &mut rng).unwrap();
        if a.mul_vec(&e.reduce_mod(ps.q).unwrap()).unwrap() == u {
            preimage_ok += 1;
        }
    }
    CriterionResult {
        index: 3,
        name: "trapdoor and preimage identities",
        passed: relation_ok == 200 && preimage_ok == draws,
        detail: format!("{relation_ok}/200 key relations, {preimage_ok}/{draws} preimages exact"),
    }
}

/// Criterion 4: preimage norm bound ‖e‖ ≤ σ2√m violated at most 1% of 10^4.
fn c4_preimage_norm() -> CriterionResult {
    let ps = toy_profile();
    let mut rng = ChaCha20Rng::seed_from_u64(104);
    let (a, t) = gen_trap(ps.n, ps.m_bar, ps.q, ps.sigma1, 1, &mut rng).unwrap();
    let tag = ZqMatrix::identity(ps.n, ps.q).unwrap();
    let sampler = crate::trapdoor::PreimageSampler::new(&a, &t.r, &tag, ps.sigma2).unwrap();
    let bound = ps.sigma2 * (ps.m as f64).sqrt();
    let trials = 10_000;
    let mut over = 0;
    for _ in 0..trials {
        let u = ZqVector::uniform(ps.n, ps.q, &mut rng).unwrap();
        let e = sampler.sample(&u, &mut rng).unwrap();
        over += usize::from(e.norm() > bound);
    }
    CriterionResult {
        index: 4,
        name: "preimage norm bound",
        passed: over * 100 <= trials,
        detail: format!("{over}/{trials} over sigma2*sqrt(m) (allowed 1%)"),
    }
}

/// Criterion 5: exact LWE inversion rate ≥ 99.9% over 10^4 Gaussian-noise
/// trials.
fn c5_invert_success() -> CriterionResult {
    let ps = toy_profile();
    let mut rng = ChaCha20Rng::seed_from_u64(105);
    let (a, t) = gen_trap(ps.n, ps.m_bar, ps.q, ps.sigma1, 1, &mut rng).unwrap();
    let alpha_q = ps.alpha * ps.q as f64;
    let trials = 10_000;
    let mut ok = 0;
    for _ in 0..trials {
        let s = ZqVector::uniform(ps.n, ps.q, &mut rng).unwrap();
        let e = sample_vec(ps.m, alpha_q, &mut rng).unwrap();
        let b = a
            .transpose()
            .mul_vec(&s)
            .unwrap()
            .add(&e.reduce_mod(ps.q).unwrap())
            .unwrap();
        if let Ok((sr, er)) = invert_lwe(&a, &t, &b) {
            ok += usize::from(sr == s && er == e);
        }
    }
    CriterionResult {
        index: 5,
        name: "LWE inversion success rate",
        passed: ok * 1000 >= trials * 999,
        detail: format!("{ok}/{trials} exact recoveries (need 99.9%)"),
    }
}

/// Criterion 6: abort-resistant hash non-abort estimate lands in the
/// predicted interval for (q=97, Q=10), widened by 3 standard errors.
fn c6_wat_interval() -> CriterionResult {
    let mut rng = ChaCha20Rng::seed_from_u64(106);
    let (q, big_q, trials) = (97u64, 10usize, 100_000usize);
    let est = wat_nonabort_estimate(q, big_q, trials, &mut rng).unwrap();
    let hi = 1.0 / q as f64;
    let lo = hi * (1.0 - big_q as f64 / q as f64);
    let se = binomial_se(hi, trials);
    let passed = est >= lo - 3.0 * se && est <= hi + 3.0 * se;
    CriterionResult {
        index: 6,
        name: "abort-resistant hash interval",
        passed,
        detail: format!(
            "estimate {est:.6} vs [{:.6}, {:.6}] (3 SE = {:.6})",
            lo, hi, 3.0 * se
        ),
    }
}

/// Criterion 7: combined-trapdoor relation exact over 100 random
/// combinations.
fn c7_combine_identity() -> CriterionResult {
    let ps = toy_profile();
    let mut rng = ChaCha20Rng::seed_from_u64(107);
    let ctx = crate::gadget::GadgetCtx::new(ps.q, ps.n).unwrap();
    let nk = ps.n * ctx.k();
    let g = ctx.gadget_matrix().unwrap();
    let a = ZqMatrix::uniform(ps.n, ps.m_bar, ps.q, &mut rng).unwrap();
    let mut parts: Vec<(IntMatrix, u64, ZqMatrix)> = Vec::new();
    for _ in 0..4 {
        let r = crate::gaussian::sample_matrix(ps.m_bar, nk, ps.sigma1, &mut rng).unwrap();
        let x = rng.gen_range(0..ps.q);
        let block = g.scalar_mul(x).sub(&a.mul_int(&r).unwrap()).unwrap();
        parts.push((r, x, block));
    }
    let refs: Vec<(&IntMatrix, u64)> = parts.iter().map(|(r, x, _)| (r, *x)).collect();
    let mut ok = 0;
    for _ in 0..100 {
        let hs: Vec<u64> = (0..4).map(|_| rng.gen_range(0..ps.q)).collect();
        let comb: GTrapdoor = trapdoor_combine(&refs, &hs, ps.q).unwrap();
        let mut block_sum = ZqMatrix::zeros(ps.n, nk, ps.q).unwrap();
        for ((_, _, block), &h) in parts.iter().zip(&hs) {
            block_sum = block_sum.add(&block.scalar_mul(h)).unwrap();
        }
        let full = a.hstack(&block_sum).unwrap();
        if apply_trapdoor(&full, &comb.r).unwrap() == g.scalar_mul(comb.tag) {
            ok += 1;
        }
    }
    CriterionResult {
        index: 7,
        name: "combined-trapdoor identity",
        passed: ok == 100,
        detail: format!("{ok}/100 combinations exact"),
    }
}

/// Criterion 8: serialized element counts match the size table exactly.
fn c8_size_accounting() -> CriterionResult {
    let (pp, rk, sk, mut rng) = toy_env(108);
    let ps = &pp.params;
    let mu = random_message(ps.ell, &mut rng);
    let ct: Ciphertext =
        signcrypt(&pp, &rk.public, &sk.secret, &sk.public, &mu, &mut rng).unwrap();
    let pk_count = rk.public.a.entries().len() + rk.public.ap.entries().len();
    let sk_count = rk.secret.t.r.entries().len() + rk.secret.tp.r.entries().len();
    let ct_count = ct.element_count();
    let passed = pk_count == public_key_elements(ps)
        && sk_count == secret_key_elements(ps)
        && ct_count == ciphertext_elements(ps)
        && pk_count == 2 * ps.m * ps.n
        && sk_count == 2 * ps.m_bar * ps.n * ps.k
        && ct_count == 3 * ps.m + (ps.m + ps.n * ps.k) + 2 * (ps.m + ps.ell);
    CriterionResult {
        index: 8,
        name: "size-table accounting",
        passed,
        detail: format!("pk {pk_count}, sk {sk_count}, ct {ct_count} scalars"),
    }
}

/// Criterion 9: the IND-CPA distinguisher wins 100/100 games with
/// advantage ≥ 0.99.
fn c9_attack() -> CriterionResult {
    let pp = toy_lu_params().unwrap();
    let report = attack_experiment(&pp, 100, 109).unwrap();
    let passed = report.correct == 100 && report.advantage >= 0.99;
    CriterionResult {
        index: 9,
        name: "IND-CPA attack on Lu-SC",
        passed,
        detail: format!(
            "{}/100 correct guesses, advantage {:.3}, {} collision witnesses",
            report.correct, report.advantage, report.collisions
        ),
    }
}

/// Criterion 10: single-coordinate tampers on e, c1, r_s, r_e are rejected
/// at least 99% of the time (100 tampers each).
fn c10_tamper() -> CriterionResult {
    let (pp, rk, sk, mut rng) = toy_env(110);
    let ps = pp.params.clone();
    let cts: Vec<Ciphertext> = (0..10)
        .map(|_| {
            let mu = random_message(ps.ell, &mut rng);
            signcrypt(&pp, &rk.public, &sk.secret, &sk.public, &mu, &mut rng).unwrap()
        })
        .collect();
    let mut reject = |mutate: &mut dyn FnMut(&mut Ciphertext, &mut ChaCha20Rng)| -> usize {
        let mut rejected = 0;
        for i in 0..100 {
            let mut ct = cts[i % cts.len()].clone();
            mutate(&mut ct, &mut rng);
            let out = unsigncrypt(&pp, &rk.secret, &rk.public, &sk.public, &ct).unwrap();
            rejected += usize::from(out.is_none());
        }
        rejected
    };
    let q = ps.q;
    let e_rej = reject(&mut |ct, rng| {
        let i = rng.gen_range(0..ct.e.len());
        let delta = if rng.gen::<bool>() { 1 } else { -1 };
        ct.e.set(i, ct.e.get(i) + delta);
    });
    let c1_rej = reject(&mut |ct, rng| {
        let i = rng.gen_range(0..ct.c1.len());
        let delta = rng.gen_range(1..q);
        ct.c1.set(i, (ct.c1.get(i) + delta) % q);
    });
    let rs_rej = reject(&mut |ct, rng| {
        let i = rng.gen_range(0..ct.r_s.len());
        let delta = if rng.gen::<bool>() { 1 } else { -1 };
        ct.r_s.set(i, ct.r_s.get(i) + delta);
    });
    let re_rej = reject(&mut |ct, rng| {
        let i = rng.gen_range(0..ct.r_e.len());
        let delta = if rng.gen::<bool>() { 1 } else { -1 };
        ct.r_e.set(i, ct.r_e.get(i) + delta);
    });
    let passed = [e_rej, c1_rej, rs_rej, re_rej].iter().all(|&r| r >= 99);
    CriterionResult {
        index: 10,
        name: "tamper rejection",
        passed,
        detail: format!(
            "rejects per 100: e {e_rej}, c1 {c1_rej}, r_s {rs_rej}, r_e {re_rej} (need 99)"
        ),
    }
}

/// Criterion 11: the demo profile passes every inequality, and shrinking αq
/// below 2√n flags exactly the LWE hardness constraint.
fn c11_checker() -> CriterionResult {
    let demo = demo_profile();
    let demo_report = check_constraints(&demo);
    let mut mutated = demo.clone();
    mutated.alpha = 1.0 / mutated.q as f64;
    let mutated_report = check_constraints(&mutated);
    let failing = mutated_report.failing();
    let passed = demo_report.all_ok() && failing == vec!["LWE hardness"];
    CriterionResult {
        index: 11,
        name: "parameter checker",
        passed,
        detail: format!(
            "demo failing: {:?}; mutated failing: {:?}",
            demo_report.failing(),
            failing
        ),
    }
}

/// Run every criterion, in order.
pub fn run_all() -> Vec<CriterionResult> {
    vec![
        c1_roundtrip(),
        c2_equality_table(),
        c3_trapdoor_identities(),
        c4_preimage_norm(),
        c5_invert_success(),
        c6_wat_interval(),
        c7_combine_identity(),
        c8_size_accounting(),
        c9_attack(),
        c10_tamper(),
        c11_checker(),
    ]
}
