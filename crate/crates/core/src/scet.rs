//! The signcryption-with-equality-test scheme: system setup, receiver and
//! sender key generation, signcrypt, unsigncrypt, tag extraction and the
//! equality test, plus the binary file encodings for every artifact.
//!
//! The construction runs two parallel "tracks": the plain track carries the
//! message μ and the signature, the primed track carries H(μ) and is the only
//! one the equality tester can open. A receiver's tag key is exactly the
//! primed-track trapdoor T', so handing it out never exposes the plain track.

use crate::error::{Error, Result};
use crate::gadget::GadgetCtx;
use crate::gaussian::sample_vec;
use crate::hashes::{hash_h, hash_h1, hash_h3, FrdCtx, XofStream};
use crate::params::{check_constraints, ParamSet};
use crate::serialize::{kind, vector_to_bytes, Reader, Writer};
use crate::trapdoor::{
    gen_trap, invert_lwe_tagged, sample_pre_extended, sample_pre_matrix_tagged, GTrapdoor,
};
use crate::zq::{f_hash, lift_balanced, sub_mod, IntMatrix, IntVector, ZqMatrix, ZqVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Cap on the tag-resampling loop in signcrypt (the zero-tag event has
/// probability about q^−n per draw).
const MAX_RESAMPLE: usize = 64;

/// System-wide public material.
#[derive(Debug, Clone, PartialEq)]
pub struct PublicParams {
    pub params: ParamSet,
    /// FRD encoding context for the per-ciphertext tag matrices.
    pub frd: FrdCtx,
    /// Signature-side mixing matrices C_0..C_n, each n×nk.
    pub c: Vec<ZqMatrix>,
    /// Primed-track counterparts C'_0..C'_n.
    pub cp: Vec<ZqMatrix>,
    /// Tag-derivation matrix B (n×m).
    pub b: ZqMatrix,
    /// Primed-track tag-derivation matrix B' (n×m).
    pub bp: ZqMatrix,
    /// Message-masking matrix U (n×ℓ).
    pub u_mat: ZqMatrix,
    /// Primed-track masking matrix U' (n×ℓ).
    pub up_mat: ZqMatrix,
    /// Signature syndrome u (length n).
    pub u_syn: ZqVector,
}

/// Receiver public key: the two tag-0 key matrices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReceiverPublic {
    pub a: ZqMatrix,
    pub ap: ZqMatrix,
}

/// Receiver secret key: trapdoors for both tracks (tags 0).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReceiverSecret {
    pub t: GTrapdoor,
    pub tp: GTrapdoor,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReceiverKeys {
    pub public: ReceiverPublic,
    pub secret: ReceiverSecret,
}

/// Sender public key: the two tag-1 key matrices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SenderPublic {
    pub a: ZqMatrix,
    pub ap: ZqMatrix,
}

/// Sender secret key: trapdoors for both tracks (tags 1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SenderSecret {
    pub t: GTrapdoor,
    pub tp: GTrapdoor,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SenderKeys {
    pub public: SenderPublic,
    pub secret: SenderSecret,
}

/// Equality-test key: only the primed-track receiver trapdoor. Holding just
/// T' is what keeps the tester unable to open the message track.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagKey {
    pub tp: GTrapdoor,
}

/// Full ciphertext.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ciphertext {
    /// Masked LWE sample under the tagged receiver key (length m).
    pub c0: ZqVector,
    /// Message slot: s·U + x1 + μ·⌊q/2⌋ (length ℓ).
    pub c1: ZqVector,
    /// Tag-derivation randomness for the plain track (length m).
    pub r_e: IntVector,
    /// Signature-hash randomness (length m).
    pub r_s: IntVector,
    /// Primed-track LWE sample (length m).
    pub c0p: ZqVector,
    /// Hash slot: s'·U' + x'1 + H(μ)·⌊q/2⌋ (length ℓ).
    pub c1p: ZqVector,
    /// Tag-derivation randomness for the primed track (length m).
    pub r_ep: IntVector,
    /// Signature preimage (length m + nk).
    pub e: IntVector,
}

impl Ciphertext {
    /// Total number of stored scalars across all eight components.
    pub fn element_count(&self) -> usize {
        self.c0.len()
            + self.c1.len()
            + self.r_e.len()
            + self.r_s.len()
            + self.c0p.len()
            + self.c1p.len()
            + self.r_ep.len()
            + self.e.len()
    }
}

/// Expected ciphertext scalar count: 3m + (m+nk) + 2(m+ℓ).
pub fn ciphertext_elements(ps: &ParamSet) -> usize {
    3 * ps.m + (ps.m + ps.n * ps.k) + 2 * (ps.m + ps.ell)
}

/// Expected public-key scalar count: 2mn.
pub fn public_key_elements(ps: &ParamSet) -> usize {
    2 * ps.m * ps.n
}

/// Expected secret-key scalar count: 2·m̄·nk.
pub fn secret_key_elements(ps: &ParamSet) -> usize {
    2 * ps.m_bar * ps.n * ps.k
}

/// Deterministic system setup from a seed.
pub fn setup(ps: &ParamSet, seed: u64) -> Result<PublicParams> {
    ps.validate()?;
    let report = check_constraints(ps);
    if !report.functional_ok() {
        return Err(Error::InvalidParams(format!(
            "functional constraints failing: {:?}",
            report.failing()
        )));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let (n, q, nk) = (ps.n, ps.q, ps.n * ps.k);
    let frd = FrdCtx::new(n, q)?;
    let mut c = Vec::with_capacity(n + 1);
    let mut cp = Vec::with_capacity(n + 1);
    for _ in 0..=n {
        c.push(ZqMatrix::uniform(n, nk, q, &mut rng)?);
    }
    for _ in 0..=n {
        cp.push(ZqMatrix::uniform(n, nk, q, &mut rng)?);
    }
    let b = ZqMatrix::uniform(n, ps.m, q, &mut rng)?;
    let bp = ZqMatrix::uniform(n, ps.m, q, &mut rng)?;
    let u_mat = ZqMatrix::uniform(n, ps.ell, q, &mut rng)?;
    let up_mat = ZqMatrix::uniform(n, ps.ell, q, &mut rng)?;
    let u_syn = ZqVector::uniform(n, q, &mut rng)?;
    Ok(PublicParams {
        params: ps.clone(),
        frd,
        c,
        cp,
        b,
        bp,
        u_mat,
        up_mat,
        u_syn,
    })
}

/// Receiver key generation: both tracks keyed with tag 0, so the bare key
/// matrices satisfy A·[T; I] ≡ 0 and only the FRD-shifted versions invert.
pub fn keygen_receiver<R: Rng + ?Sized>(pp: &PublicParams, rng: &mut R) -> Result<ReceiverKeys> {
    let ps = &pp.params;
    let (a, t) = gen_trap(ps.n, ps.m_bar, ps.q, ps.sigma1, 0, rng)?;
    let (ap, tp) = gen_trap(ps.n, ps.m_bar, ps.q, ps.sigma1, 0, rng)?;
    Ok(ReceiverKeys {
        public: ReceiverPublic { a, ap },
        secret: ReceiverSecret { t, tp },
    })
}

/// Sender key generation: both tracks keyed with tag 1 (A·[T; I] ≡ G).
pub fn keygen_sender<R: Rng + ?Sized>(pp: &PublicParams, rng: &mut R) -> Result<SenderKeys> {
    let ps = &pp.params;
    let (a, t) = gen_trap(ps.n, ps.m_bar, ps.q, ps.sigma1, 1, rng)?;
    let (ap, tp) = gen_trap(ps.n, ps.m_bar, ps.q, ps.sigma1, 1, rng)?;
    Ok(SenderKeys {
        public: SenderPublic { a, ap },
        secret: SenderSecret { t, tp },
    })
}

/// Copy out the equality-test key; deliberately never touches T.
pub fn tag_extract(sk_r: &ReceiverSecret) -> TagKey {
    TagKey {
        tp: sk_r.tp.clone(),
    }
}

fn validate_bits(mu: &[u8], ell: usize) -> Result<()> {
    if mu.len() != ell {
        return Err(Error::InvalidInput(format!(
            "message must be {ell} bits, got {}",
            mu.len()
        )));
    }
    if mu.iter().any(|&b| b > 1) {
        return Err(Error::InvalidInput("message entries must be 0 or 1".into()));
    }
    Ok(())
}

/// Bit string scaled by ⌊q/2⌋, as added into a c1 slot.
fn encode_message(bits: &[u8], q: u64) -> Result<ZqVector> {
    let half = q / 2;
    ZqVector::from_entries(q, &bits.iter().map(|&b| b as u64 * half).collect::<Vec<_>>())
}

/// Regev decoding: bit_i = 1 iff v_i is within q/4 of ⌊q/2⌋.
pub fn decode_bits(v: &ZqVector) -> Vec<u8> {
    let q = v.modulus();
    let half = q / 2;
    v.entries()
        .iter()
        .map(|&vi| {
            let d = lift_balanced(sub_mod(vi, half, q), q).unsigned_abs();
            u8::from(4 * d < q)
        })
        .collect()
}

/// Draw tag-derivation randomness until the tag t = Ā·digest + B·r is
/// nonzero, so its FRD matrix is invertible.
fn sample_tag<R: Rng + ?Sized>(
    a_bar: &ZqMatrix,
    b_mat: &ZqMatrix,
    digest: &ZqVector,
    alpha_q: f64,
    m: usize,
    rng: &mut R,
) -> Result<(IntVector, ZqVector)> {
    let fixed = a_bar.mul_vec(digest)?;
    for _ in 0..MAX_RESAMPLE {
        let r = sample_vec(m, alpha_q, rng)?;
        let t = fixed.add(&f_hash(b_mat, &r)?)?;
        if t.entries().iter().any(|&e| e != 0) {
            return Ok((r, t));
        }
    }
    Err(Error::Internal("tag resampling loop exhausted".into()))
}

/// Shift a tag-0 key matrix by the FRD tag: A + [0 | H2(t)·G]. Returns the
/// shifted matrix together with the tag matrix H2(t).
fn tagged_key(pp: &PublicParams, a: &ZqMatrix, t: &ZqVector) -> Result<(ZqMatrix, ZqMatrix)> {
    let ps = &pp.params;
    let h2t = pp.frd.encode(t)?;
    let g = GadgetCtx::new(ps.q, ps.n)?.gadget_matrix()?;
    let shifted = a.add_into_cols(ps.m_bar, &h2t.mul(&g)?)?;
    Ok((shifted, h2t))
}

/// C_0 + Σ h_i·C_i over a (n+1)-element matrix family.
fn combined_block(mats: &[ZqMatrix], h: &ZqVector) -> Result<ZqMatrix> {
    let mut out = mats[0].clone();
    for i in 0..h.len() {
        out = out.add(&mats[i + 1].scalar_mul(h.get(i)))?;
    }
    Ok(out)
}

/// Canonical byte encoding of (μ, pk_r, partial ciphertext) fed to H3.
fn signature_hash_input(
    mu: &[u8],
    pk_r: &ReceiverPublic,
    c0: &ZqVector,
    c1_bar: &ZqVector,
    r_e: &IntVector,
    c0p: &ZqVector,
    c1p_bar: &ZqVector,
    r_ep: &IntVector,
) -> Vec<u8> {
    let mut w = Writer::new();
    w.put_u64(mu.len() as u64);
    w.put_bytes(mu);
    w.put_matrix(&pk_r.a);
    w.put_matrix(&pk_r.ap);
    w.put_vector(c0);
    w.put_vector(c1_bar);
    w.put_int_vector(r_e);
    w.put_vector(c0p);
    w.put_vector(c1p_bar);
    w.put_int_vector(r_ep);
    w.into_bytes()
}

/// Signature-hash coefficients h = Ā_s·H3(input) + B·r_s.
fn signature_coeffs(
    pp: &PublicParams,
    pk_s: &SenderPublic,
    input: &[u8],
    r_s: &IntVector,
) -> Result<ZqVector> {
    let ps = &pp.params;
    let digest = hash_h3(input, ps.m_bar, ps.q)?;
    let a_s_bar = pk_s.a.col_range(0, ps.m_bar)?;
    a_s_bar.mul_vec(&digest)?.add(&f_hash(&pp.b, r_s)?)
}

/// Signcrypt a ℓ-bit message to a receiver.
pub fn signcrypt<R: Rng + ?Sized>(
    pp: &PublicParams,
    pk_r: &ReceiverPublic,
    sk_s: &SenderSecret,
    pk_s: &SenderPublic,
    mu: &[u8],
    rng: &mut R,
) -> Result<Ciphertext> {
    let ps = &pp.params;
    validate_bits(mu, ps.ell)?;
    let (q, m) = (ps.q, ps.m);
    let alpha_q = ps.alpha * q as f64;

    // Plain-track and primed-track tags, resampled on the zero event.
    let h1 = hash_h1(&pk_s.a, ps.m_bar)?;
    let a_r_bar = pk_r.a.col_range(0, ps.m_bar)?;
    let (r_e, t) = sample_tag(&a_r_bar, &pp.b, &h1, alpha_q, m, rng)?;

    let h1p = hash_h1(&pk_s.ap, ps.m_bar)?;
    let a_rp_bar = pk_r.ap.col_range(0, ps.m_bar)?;
    let (r_ep, tp) = sample_tag(&a_rp_bar, &pp.bp, &h1p, alpha_q, m, rng)?;

    let (a_rt, _) = tagged_key(pp, &pk_r.a, &t)?;
    let (a_rtp, _) = tagged_key(pp, &pk_r.ap, &tp)?;

    // Dual-Regev encryptions on both tracks.
    let s = ZqVector::uniform(ps.n, q, rng)?;
    let sp = ZqVector::uniform(ps.n, q, rng)?;
    let x0 = sample_vec(m, alpha_q, rng)?;
    let x0p = sample_vec(m, alpha_q, rng)?;
    let x1 = sample_vec(ps.ell, alpha_q, rng)?;
    let x1p = sample_vec(ps.ell, alpha_q, rng)?;

    let c0 = a_rt.left_vec_mul(&s)?.add(&x0.reduce_mod(q)?)?;
    let c1_bar = pp.u_mat.left_vec_mul(&s)?.add(&x1.reduce_mod(q)?)?;
    let c0p = a_rtp.left_vec_mul(&sp)?.add(&x0p.reduce_mod(q)?)?;
    let c1p_bar = pp.up_mat.left_vec_mul(&sp)?.add(&x1p.reduce_mod(q)?)?;

    // Sign μ together with the receiver identity and the partial ciphertext.
    let r_s = sample_vec(m, alpha_q, rng)?;
    let input = signature_hash_input(mu, pk_r, &c0, &c1_bar, &r_e, &c0p, &c1p_bar, &r_ep);
    let h = signature_coeffs(pp, pk_s, &input, &r_s)?;
    let block = combined_block(&pp.c, &h)?;
    let e = sample_pre_extended(&pk_s.a, &sk_s.t, &block, &pp.u_syn, ps.sigma2, rng)?;

    let hmu = hash_h(mu)?;
    let c1 = c1_bar.add(&encode_message(mu, q)?)?;
    let c1p = c1p_bar.add(&encode_message(&hmu, q)?)?;

    Ok(Ciphertext {
        c0,
        c1,
        r_e,
        r_s,
        c0p,
        c1p,
        r_ep,
        e,
    })
}

/// Structural validation of a ciphertext against the parameter set.
pub fn validate_ciphertext(pp: &PublicParams, ct: &Ciphertext) -> Result<()> {
    let ps = &pp.params;
    let nk = ps.n * ps.k;
    let ok = ct.c0.len() == ps.m
        && ct.c1.len() == ps.ell
        && ct.r_e.len() == ps.m
        && ct.r_s.len() == ps.m
        && ct.c0p.len() == ps.m
        && ct.c1p.len() == ps.ell
        && ct.r_ep.len() == ps.m
        && ct.e.len() == ps.m + nk
        && ct.c0.modulus() == ps.q
        && ct.c1.modulus() == ps.q
        && ct.c0p.modulus() == ps.q
        && ct.c1p.modulus() == ps.q;
    if !ok {
        return Err(Error::DimensionMismatch(
            "ciphertext shape does not match parameter set".into(),
        ));
    }
    Ok(())
}

/// Deterministic sampler stream derived from ciphertext material, so the
/// unsigncrypt and test algorithms stay deterministic functions.
fn derived_rng(domain: &[u8], bytes: &[u8]) -> ChaCha20Rng {
    let mut x = XofStream::new(domain, bytes);
    let mut seed = [0u8; 32];
    for b in seed.iter_mut() {
        *b = x.next_byte();
    }
    ChaCha20Rng::from_seed(seed)
}

/// Unsigncrypt: recover μ or reject with `None`.
pub fn unsigncrypt(
    pp: &PublicParams,
    sk_r: &ReceiverSecret,
    pk_r: &ReceiverPublic,
    pk_s: &SenderPublic,
    ct: &Ciphertext,
) -> Result<Option<Vec<u8>>> {
    let ps = &pp.params;
    validate_ciphertext(pp, ct)?;
    let q = ps.q;

    // Recompute the plain-track tag; a zero tag cannot be inverted.
    let h1 = hash_h1(&pk_s.a, ps.m_bar)?;
    let a_r_bar = pk_r.a.col_range(0, ps.m_bar)?;
    let t = a_r_bar.mul_vec(&h1)?.add(&f_hash(&pp.b, &ct.r_e)?)?;
    if t.entries().iter().all(|&e| e == 0) {
        return Ok(None);
    }
    let (a_rt, h2t) = tagged_key(pp, &pk_r.a, &t)?;

    let (_, x0) = match invert_lwe_tagged(&a_rt, &sk_r.t.r, &h2t, &ct.c0) {
        Ok(pair) => pair,
        Err(Error::DecodingFailure) | Err(Error::NonInvertibleTag) => return Ok(None),
        Err(e) => return Err(e),
    };

    // v = c1 − (c0 − x0)·E with E a preimage of U under the tagged key.
    let mut det = derived_rng(b"SCET/usc-sampler", &vector_to_bytes(&ct.c0));
    let e_mat = sample_pre_matrix_tagged(&a_rt, &sk_r.t.r, &h2t, &pp.u_mat, ps.sigma2, &mut det)?;
    let d = ct.c0.sub(&x0.reduce_mod(q)?)?;
    let v = ct.c1.sub(&int_matrix_left_mul(&d, &e_mat)?)?;
    let mu = decode_bits(&v);

    // Rebuild the signed material and verify the signature equation.
    let c1_bar = ct.c1.sub(&encode_message(&mu, q)?)?;
    let hmu = hash_h(&mu)?;
    let c1p_bar = ct.c1p.sub(&encode_message(&hmu, q)?)?;
    let input =
        signature_hash_input(&mu, pk_r, &ct.c0, &c1_bar, &ct.r_e, &ct.c0p, &c1p_bar, &ct.r_ep);
    let h = signature_coeffs(pp, pk_s, &input, &ct.r_s)?;
    let block = combined_block(&pp.c, &h)?;
    let a_sh = pk_s.a.hstack(&block)?;

    let nk = ps.n * ps.k;
    let bound = ps.sigma2 * ((ps.m + nk) as f64).sqrt();
    let sig_ok =
        a_sh.mul_vec(&ct.e.reduce_mod(q)?)? == pp.u_syn && ct.e.norm() <= bound;
    Ok(if sig_ok { Some(mu) } else { None })
}

/// dᵗ·E for an integer matrix E, reduced mod q.
fn int_matrix_left_mul(d: &ZqVector, e: &IntMatrix) -> Result<ZqVector> {
    if e.rows() != d.len() {
        return Err(Error::DimensionMismatch("int_matrix_left_mul".into()));
    }
    let q = d.modulus();
    let qi = q as i128;
    let mut out = Vec::with_capacity(e.cols());
    for j in 0..e.cols() {
        let mut acc: i128 = 0;
        for i in 0..e.rows() {
            acc += d.get(i) as i128 * e.get(i, j) as i128;
            if acc.unsigned_abs() >= 1 << 126 {
                acc = acc.rem_euclid(qi);
            }
        }
        out.push(acc.rem_euclid(qi) as u64);
    }
    ZqVector::from_entries(q, &out)
}

/// Open the primed track of one ciphertext with a tag key, returning the
/// decoded hash bits H(μ). Fails with `DecodeFailure` when the track cannot
/// be inverted.
pub fn recover_hash(
    pp: &PublicParams,
    tg: &TagKey,
    ct: &Ciphertext,
    pk_r: &ReceiverPublic,
    pk_s: &SenderPublic,
) -> Result<Vec<u8>> {
    let ps = &pp.params;
    validate_ciphertext(pp, ct)?;
    let q = ps.q;

    let h1p = hash_h1(&pk_s.ap, ps.m_bar)?;
    let a_rp_bar = pk_r.ap.col_range(0, ps.m_bar)?;
    let tp = a_rp_bar.mul_vec(&h1p)?.add(&f_hash(&pp.bp, &ct.r_ep)?)?;
    if tp.entries().iter().all(|&e| e == 0) {
        return Err(Error::DecodeFailure);
    }
    let (a_rtp, h2tp) = tagged_key(pp, &pk_r.ap, &tp)?;

    let (_, x0p) = match invert_lwe_tagged(&a_rtp, &tg.tp.r, &h2tp, &ct.c0p) {
        Ok(pair) => pair,
        Err(Error::DecodingFailure) | Err(Error::NonInvertibleTag) => {
            return Err(Error::DecodeFailure)
        }
        Err(e) => return Err(e),
    };

    let mut det = derived_rng(b"SCET/test-sampler", &vector_to_bytes(&ct.c0p));
    let e_mat =
        sample_pre_matrix_tagged(&a_rtp, &tg.tp.r, &h2tp, &pp.up_mat, ps.sigma2, &mut det)?;
    let d = ct.c0p.sub(&x0p.reduce_mod(q)?)?;
    let v = ct.c1p.sub(&int_matrix_left_mul(&d, &e_mat)?)?;
    Ok(decode_bits(&v))
}

/// One side of the equality test: the tester's material for a ciphertext.
pub type TestSide<'a> = (
    &'a TagKey,
    &'a Ciphertext,
    &'a ReceiverPublic,
    &'a SenderPublic,
);

/// Compare the messages under two ciphertexts using only tag keys: recovers
/// H(μ) from each primed track and compares. An undecodable side counts as
/// unequal.
pub fn test_equality(pp: &PublicParams, side_i: TestSide, side_j: TestSide) -> Result<bool> {
    let hi = match recover_hash(pp, side_i.0, side_i.1, side_i.2, side_i.3) {
        Ok(h) => h,
        Err(Error::DecodeFailure) => return Ok(false),
        Err(e) => return Err(e),
    };
    let hj = match recover_hash(pp, side_j.0, side_j.1, side_j.2, side_j.3) {
        Ok(h) => h,
        Err(Error::DecodeFailure) => return Ok(false),
        Err(e) => return Err(e),
    };
    Ok(hi == hj)
}

// ---- file encodings ----

fn put_digest(w: &mut Writer, ps: &ParamSet) {
    w.put_bytes(&ps.digest());
}

fn check_digest(r: &mut Reader, ps: &ParamSet) -> Result<()> {
    let stored = r.take(32)?;
    if stored != ps.digest() {
        return Err(Error::ParamsDigestMismatch);
    }
    Ok(())
}

fn put_trapdoor(w: &mut Writer, t: &GTrapdoor) {
    w.put_int_matrix(&t.r);
    w.put_u64(t.tag);
}

fn get_trapdoor(r: &mut Reader, ps: &ParamSet) -> Result<GTrapdoor> {
    let mat = r.get_int_matrix()?;
    if mat.rows() != ps.m_bar || mat.cols() != ps.n * ps.k {
        return Err(Error::Malformed("trapdoor shape".into()));
    }
    let tag = r.get_u64()?;
    Ok(GTrapdoor { r: mat, tag })
}

fn check_matrix_shape(m: &ZqMatrix, rows: usize, cols: usize, q: u64) -> Result<()> {
    if m.rows() != rows || m.cols() != cols || m.modulus() != q {
        return Err(Error::Malformed("matrix shape".into()));
    }
    Ok(())
}

/// Serialize the public parameters (self-describing: embeds the ParamSet).
pub fn pp_to_bytes(pp: &PublicParams) -> Vec<u8> {
    let ps = &pp.params;
    let mut w = Writer::new();
    w.put_header(kind::PUBLIC_PARAMS);
    put_digest(&mut w, ps);
    for v in [
        ps.n as u64,
        ps.q,
        ps.k as u64,
        ps.m_bar as u64,
        ps.m as u64,
        ps.ell as u64,
        ps.big_n as u64,
        ps.big_m as u64,
        ps.big_q as u64,
        ps.alpha.to_bits(),
        ps.sigma1.to_bits(),
        ps.sigma2.to_bits(),
    ] {
        w.put_u64(v);
    }
    for coeff in pp.frd.poly() {
        w.put_u64(*coeff);
    }
    for m in pp.c.iter().chain(&pp.cp) {
        w.put_matrix(m);
    }
    w.put_matrix(&pp.b);
    w.put_matrix(&pp.bp);
    w.put_matrix(&pp.u_mat);
    w.put_matrix(&pp.up_mat);
    w.put_vector(&pp.u_syn);
    w.into_bytes()
}

/// Parse and fully validate serialized public parameters.
pub fn pp_from_bytes(bytes: &[u8]) -> Result<PublicParams> {
    let mut r = Reader::new(bytes);
    r.expect_header(kind::PUBLIC_PARAMS)?;
    let stored_digest: Vec<u8> = r.take(32)?.to_vec();
    let mut words = [0u64; 12];
    for w in words.iter_mut() {
        *w = r.get_u64()?;
    }
    let ps = ParamSet {
        n: words[0] as usize,
        q: words[1],
        k: words[2] as usize,
        m_bar: words[3] as usize,
        m: words[4] as usize,
        ell: words[5] as usize,
        big_n: words[6] as usize,
        big_m: words[7] as usize,
        big_q: words[8] as usize,
        alpha: f64::from_bits(words[9]),
        sigma1: f64::from_bits(words[10]),
        sigma2: f64::from_bits(words[11]),
    };
    ps.validate()?;
    if stored_digest != ps.digest() {
        return Err(Error::ParamsDigestMismatch);
    }
    let mut poly = Vec::with_capacity(ps.n + 1);
    for _ in 0..=ps.n {
        poly.push(r.get_u64()?);
    }
    let frd = FrdCtx::from_poly(ps.n, ps.q, poly)?;
    let nk = ps.n * ps.k;
    let mut c = Vec::with_capacity(ps.n + 1);
    let mut cp = Vec::with_capacity(ps.n + 1);
    for _ in 0..=ps.n {
        let m = r.get_matrix()?;
        check_matrix_shape(&m, ps.n, nk, ps.q)?;
        c.push(m);
    }
    for _ in 0..=ps.n {
        let m = r.get_matrix()?;
        check_matrix_shape(&m, ps.n, nk, ps.q)?;
        cp.push(m);
    }
    let b = r.get_matrix()?;
    check_matrix_shape(&b, ps.n, ps.m, ps.q)?;
    let bp = r.get_matrix()?;
    check_matrix_shape(&bp, ps.n, ps.m, ps.q)?;
    let u_mat = r.get_matrix()?;
    check_matrix_shape(&u_mat, ps.n, ps.ell, ps.q)?;
    let up_mat = r.get_matrix()?;
    check_matrix_shape(&up_mat, ps.n, ps.ell, ps.q)?;
    let u_syn = r.get_vector()?;
    if u_syn.len() != ps.n {
        return Err(Error::Malformed("syndrome length".into()));
    }
    r.finish()?;
    Ok(PublicParams {
        params: ps,
        frd,
        c,
        cp,
        b,
        bp,
        u_mat,
        up_mat,
        u_syn,
    })
}

fn key_pair_to_bytes(k: u8, ps: &ParamSet, a: &ZqMatrix, ap: &ZqMatrix) -> Vec<u8> {
    let mut w = Writer::new();
    w.put_header(k);
    put_digest(&mut w, ps);
    w.put_matrix(a);
    w.put_matrix(ap);
    w.into_bytes()
}

fn key_pair_from_bytes(k: u8, ps: &ParamSet, bytes: &[u8]) -> Result<(ZqMatrix, ZqMatrix)> {
    let mut r = Reader::new(bytes);
    r.expect_header(k)?;
    check_digest(&mut r, ps)?;
    let a = r.get_matrix()?;
    check_matrix_shape(&a, ps.n, ps.m, ps.q)?;
    let ap = r.get_matrix()?;
    check_matrix_shape(&ap, ps.n, ps.m, ps.q)?;
    r.finish()?;
    Ok((a, ap))
}

fn trapdoor_pair_to_bytes(k: u8, ps: &ParamSet, t: &GTrapdoor, tp: &GTrapdoor) -> Vec<u8> {
    let mut w = Writer::new();
    w.put_header(k);
    put_digest(&mut w, ps);
    put_trapdoor(&mut w, t);
    put_trapdoor(&mut w, tp);
    w.into_bytes()
}

fn trapdoor_pair_from_bytes(
    k: u8,
    ps: &ParamSet,
    bytes: &[u8],
) -> Result<(GTrapdoor, GTrapdoor)> {
    let mut r = Reader::new(bytes);
    r.expect_header(k)?;
    check_digest(&mut r, ps)?;
    let t = get_trapdoor(&mut r, ps)?;
    let tp = get_trapdoor(&mut r, ps)?;
    r.finish()?;
    Ok((t, tp))
}

pub fn receiver_pk_to_bytes(ps: &ParamSet, pk: &ReceiverPublic) -> Vec<u8> {
    key_pair_to_bytes(kind::RECEIVER_PK, ps, &pk.a, &pk.ap)
}

pub fn receiver_pk_from_bytes(ps: &ParamSet, bytes: &[u8]) -> Result<ReceiverPublic> {
    let (a, ap) = key_pair_from_bytes(kind::RECEIVER_PK, ps, bytes)?;
    Ok(ReceiverPublic { a, ap })
}

pub fn receiver_sk_to_bytes(ps: &ParamSet, sk: &ReceiverSecret) -> Vec<u8> {
    trapdoor_pair_to_bytes(kind::RECEIVER_SK, ps, &sk.t, &sk.tp)
}

pub fn receiver_sk_from_bytes(ps: &ParamSet, bytes: &[u8]) -> Result<ReceiverSecret> {
    let (t, tp) = trapdoor_pair_from_bytes(kind::RECEIVER_SK, ps, bytes)?;
    Ok(ReceiverSecret { t, tp })
}

pub fn sender_pk_to_bytes(ps: &ParamSet, pk: &SenderPublic) -> Vec<u8> {
    key_pair_to_bytes(kind::SENDER_PK, ps, &pk.a, &pk.ap)
}

pub fn sender_pk_from_bytes(ps: &ParamSet, bytes: &[u8]) -> Result<SenderPublic> {
    let (a, ap) = key_pair_from_bytes(kind::SENDER_PK, ps, bytes)?;
    Ok(SenderPublic { a, ap })
}

pub fn sender_sk_to_bytes(ps: &ParamSet, sk: &SenderSecret) -> Vec<u8> {
    trapdoor_pair_to_bytes(kind::SENDER_SK, ps, &sk.t, &sk.tp)
}

pub fn sender_sk_from_bytes(ps: &ParamSet, bytes: &[u8]) -> Result<SenderSecret> {
    let (t, tp) = trapdoor_pair_from_bytes(kind::SENDER_SK, ps, bytes)?;
    Ok(SenderSecret { t, tp })
}

pub fn tag_key_to_bytes(ps: &ParamSet, tg: &TagKey) -> Vec<u8> {
    let mut w = Writer::new();
    w.put_header(kind::TAG_KEY);
    put_digest(&mut w, ps);
    put_trapdoor(&mut w, &tg.tp);
    w.into_bytes()
}

pub fn tag_key_from_bytes(ps: &ParamSet, bytes: &[u8]) -> Result<TagKey> {
    let mut r = Reader::new(bytes);
    r.expect_header(kind::TAG_KEY)?;
    check_digest(&mut r, ps)?;
    let tp = get_trapdoor(&mut r, ps)?;
    r.finish()?;
    Ok(TagKey { tp })
}

pub fn ciphertext_to_bytes(ps: &ParamSet, ct: &Ciphertext) -> Vec<u8> {
    let mut w = Writer::new();
    w.put_header(kind::CIPHERTEXT);
    put_digest(&mut w, ps);
    w.put_vector(&ct.c0);
    w.put_vector(&ct.c1);
    w.put_int_vector(&ct.r_e);
    w.put_int_vector(&ct.r_s);
    w.put_vector(&ct.c0p);
    w.put_vector(&ct.c1p);
    w.put_int_vector(&ct.r_ep);
    w.put_int_vector(&ct.e);
    w.into_bytes()
}

pub fn ciphertext_from_bytes(ps: &ParamSet, bytes: &[u8]) -> Result<Ciphertext> {
    let mut r = Reader::new(bytes);
    r.expect_header(kind::CIPHERTEXT)?;
    check_digest(&mut r, ps)?;
    let c0 = r.get_vector()?;
    let c1 = r.get_vector()?;
    let r_e = r.get_int_vector()?;
    let r_s = r.get_int_vector()?;
    let c0p = r.get_vector()?;
    let c1p = r.get_vector()?;
    let r_ep = r.get_int_vector()?;
    let e = r.get_int_vector()?;
    r.finish()?;
    let nk = ps.n * ps.k;
    let ok = c0.len() == ps.m
        && c1.len() == ps.ell
        && r_e.len() == ps.m
        && r_s.len() == ps.m
        && c0p.len() == ps.m
        && c1p.len() == ps.ell
        && r_ep.len() == ps.m
        && e.len() == ps.m + nk
        && c0.modulus() == ps.q;
    if !ok {
        return Err(Error::Malformed("ciphertext component shapes".into()));
    }
    Ok(Ciphertext {
        c0,
        c1,
        r_e,
        r_s,
        c0p,
        c1p,
        r_ep,
        e,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::toy_profile;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn toy_pp() -> PublicParams {
        setup(&toy_profile(), 1).unwrap()
    }

    fn random_message<R: Rng + ?Sized>(ell: usize, rng: &mut R) -> Vec<u8> {
        (0..ell).map(|_| rng.gen_range(0..2u8)).collect()
    }

    #[test]
    fn setup_deterministic_and_dims() {
        let ps = toy_profile();
        let pp1 = setup(&ps, 7).unwrap();
        let pp2 = setup(&ps, 7).unwrap();
        assert_eq!(pp1, pp2);
        assert_ne!(pp1, setup(&ps, 8).unwrap());

        let nk = ps.n * ps.k;
        assert_eq!(pp1.c.len(), ps.n + 1);
        assert_eq!(pp1.cp.len(), ps.n + 1);
        for m in pp1.c.iter().chain(&pp1.cp) {
            assert_eq!((m.rows(), m.cols()), (ps.n, nk));
        }
        assert_eq!((pp1.b.rows(), pp1.b.cols()), (ps.n, ps.m));
        assert_eq!((pp1.u_mat.rows(), pp1.u_mat.cols()), (ps.n, ps.ell));
        assert_eq!(pp1.u_syn.len(), ps.n);
    }

    #[test]
    fn keygen_identities_and_distinctness() {
        let pp = toy_pp();
        let ps = &pp.params;
        let mut rng = ChaCha20Rng::seed_from_u64(70);
        let g = GadgetCtx::new(ps.q, ps.n).unwrap().gadget_matrix().unwrap();
        let zero = g.scalar_mul(0);

        let mut seen = std::collections::HashSet::new();
        for _ in 0..100 {
            let rk = keygen_receiver(&pp, &mut rng).unwrap();
            assert_eq!(
                crate::trapdoor::apply_trapdoor(&rk.public.a, &rk.secret.t.r).unwrap(),
                zero
            );
            assert_eq!(
                crate::trapdoor::apply_trapdoor(&rk.public.ap, &rk.secret.tp.r).unwrap(),
                zero
            );
            assert!(seen.insert(rk.public.a.entries().to_vec()));
        }

        let sk = keygen_sender(&pp, &mut rng).unwrap();
        assert_eq!(
            crate::trapdoor::apply_trapdoor(&sk.public.a, &sk.secret.t.r).unwrap(),
            g
        );
        assert_eq!(
            crate::trapdoor::apply_trapdoor(&sk.public.ap, &sk.secret.tp.r).unwrap(),
            g
        );
    }

    #[test]
    fn roundtrip_small() {
        let pp = toy_pp();
        let mut rng = ChaCha20Rng::seed_from_u64(71);
        let rk = keygen_receiver(&pp, &mut rng).unwrap();
        let sk = keygen_sender(&pp, &mut rng).unwrap();
        for _ in 0..20 {
            let mu = random_message(pp.params.ell, &mut rng);
            let ct = signcrypt(&pp, &rk.public, &sk.secret, &sk.public, &mu, &mut rng).unwrap();
            assert_eq!(ct.element_count(), ciphertext_elements(&pp.params));
            let out = unsigncrypt(&pp, &rk.secret, &rk.public, &sk.public, &ct).unwrap();
            assert_eq!(out, Some(mu));
        }
    }

    #[test]
    fn signature_identity_on_fresh_output() {
        let pp = toy_pp();
        let ps = &pp.params;
        let mut rng = ChaCha20Rng::seed_from_u64(72);
        let rk = keygen_receiver(&pp, &mut rng).unwrap();
        let sk = keygen_sender(&pp, &mut rng).unwrap();
        let mu = random_message(ps.ell, &mut rng);
        let ct = signcrypt(&pp, &rk.public, &sk.secret, &sk.public, &mu, &mut rng).unwrap();

        // Recompute h from the true message and check A_{s,h}·e ≡ u.
        let c1_bar = ct.c1.sub(&encode_message(&mu, ps.q).unwrap()).unwrap();
        let hmu = hash_h(&mu).unwrap();
        let c1p_bar = ct.c1p.sub(&encode_message(&hmu, ps.q).unwrap()).unwrap();
        let input = signature_hash_input(
            &mu, &rk.public, &ct.c0, &c1_bar, &ct.r_e, &ct.c0p, &c1p_bar, &ct.r_ep,
        );
        let h = signature_coeffs(&pp, &sk.public, &input, &ct.r_s).unwrap();
        let block = combined_block(&pp.c, &h).unwrap();
        let a_sh = sk.public.a.hstack(&block).unwrap();
        assert_eq!(
            a_sh.mul_vec(&ct.e.reduce_mod(ps.q).unwrap()).unwrap(),
            pp.u_syn
        );
        assert!(ct.e.norm() <= ps.sigma2 * ((ps.m + ps.n * ps.k) as f64).sqrt());
    }

    #[test]
    fn decode_bits_examples() {
        let q = 64;
        let zero = ZqVector::zeros(4, q).unwrap();
        assert_eq!(decode_bits(&zero), vec![0; 4]);
        let half = ZqVector::from_entries(q, &[32, 32, 32]).unwrap();
        assert_eq!(decode_bits(&half), vec![1; 3]);
        let edge = ZqVector::from_entries(q, &[14, 18]).unwrap();
        assert_eq!(decode_bits(&edge), vec![0, 1]);
    }

    #[test]
    fn tamper_rejected() {
        let pp = toy_pp();
        let ps = &pp.params;
        let mut rng = ChaCha20Rng::seed_from_u64(73);
        let rk = keygen_receiver(&pp, &mut rng).unwrap();
        let sk = keygen_sender(&pp, &mut rng).unwrap();
        let mu = random_message(ps.ell, &mut rng);
        let ct = signcrypt(&pp, &rk.public, &sk.secret, &sk.public, &mu, &mut rng).unwrap();

        let mut bad = ct.clone();
        bad.e.set(0, bad.e.get(0) + 1);
        assert_eq!(
            unsigncrypt(&pp, &rk.secret, &rk.public, &sk.public, &bad).unwrap(),
            None
        );

        let mut bad = ct.clone();
        bad.c1.set(3, (bad.c1.get(3) + ps.q / 2) % ps.q);
        assert_eq!(
            unsigncrypt(&pp, &rk.secret, &rk.public, &sk.public, &bad).unwrap(),
            None
        );

        let mut bad = ct;
        bad.r_s.set(5, bad.r_s.get(5) + 1);
        assert_eq!(
            unsigncrypt(&pp, &rk.secret, &rk.public, &sk.public, &bad).unwrap(),
            None
        );
    }

    #[test]
    fn equality_truth_table_small() {
        let pp = toy_pp();
        let ps = &pp.params;
        let mut rng = ChaCha20Rng::seed_from_u64(74);
        let rk1 = keygen_receiver(&pp, &mut rng).unwrap();
        let rk2 = keygen_receiver(&pp, &mut rng).unwrap();
        let sk1 = keygen_sender(&pp, &mut rng).unwrap();
        let sk2 = keygen_sender(&pp, &mut rng).unwrap();
        let tg1 = tag_extract(&rk1.secret);
        let tg2 = tag_extract(&rk2.secret);

        let mu = random_message(ps.ell, &mut rng);
        let mut mu2 = mu.clone();
        mu2[0] ^= 1;

        let ct1 = signcrypt(&pp, &rk1.public, &sk1.secret, &sk1.public, &mu, &mut rng).unwrap();
        let ct2 = signcrypt(&pp, &rk2.public, &sk2.secret, &sk2.public, &mu, &mut rng).unwrap();
        let ct3 = signcrypt(&pp, &rk2.public, &sk2.secret, &sk2.public, &mu2, &mut rng).unwrap();

        let s1: TestSide = (&tg1, &ct1, &rk1.public, &sk1.public);
        let s2: TestSide = (&tg2, &ct2, &rk2.public, &sk2.public);
        let s3: TestSide = (&tg2, &ct3, &rk2.public, &sk2.public);

        // Same message across different receivers and senders.
        assert!(test_equality(&pp, s1, s2).unwrap());
        // Reflexivity.
        assert!(test_equality(&pp, s1, s1).unwrap());
        // Different messages.
        assert!(!test_equality(&pp, s1, s3).unwrap());
        assert!(!test_equality(&pp, s2, s3).unwrap());
    }

    #[test]
    fn tag_key_is_primed_trapdoor_only() {
        let pp = toy_pp();
        let mut rng = ChaCha20Rng::seed_from_u64(75);
        let rk = keygen_receiver(&pp, &mut rng).unwrap();
        let tg = tag_extract(&rk.secret);
        assert_eq!(tg.tp, rk.secret.tp);
        assert_ne!(tg.tp, rk.secret.t);
    }

    #[test]
    fn table2_element_counts() {
        let ps = toy_profile();
        let nk = ps.n * ps.k;
        assert_eq!(ciphertext_elements(&ps), 3 * ps.m + (ps.m + nk) + 2 * (ps.m + ps.ell));
        assert_eq!(public_key_elements(&ps), 2 * ps.m * ps.n);
        assert_eq!(secret_key_elements(&ps), 2 * ps.m_bar * nk);

        let pp = toy_pp();
        let mut rng = ChaCha20Rng::seed_from_u64(76);
        let rk = keygen_receiver(&pp, &mut rng).unwrap();
        assert_eq!(
            rk.public.a.entries().len() + rk.public.ap.entries().len(),
            public_key_elements(&ps)
        );
        assert_eq!(
            rk.secret.t.r.entries().len() + rk.secret.tp.r.entries().len(),
            secret_key_elements(&ps)
        );
    }

    #[test]
    fn serialization_roundtrips() {
        let pp = toy_pp();
        let ps = &pp.params;
        let mut rng = ChaCha20Rng::seed_from_u64(77);
        let rk = keygen_receiver(&pp, &mut rng).unwrap();
        let sk = keygen_sender(&pp, &mut rng).unwrap();
        let tg = tag_extract(&rk.secret);
        let mu = random_message(ps.ell, &mut rng);
        let ct = signcrypt(&pp, &rk.public, &sk.secret, &sk.public, &mu, &mut rng).unwrap();

        assert_eq!(pp_from_bytes(&pp_to_bytes(&pp)).unwrap(), pp);
        assert_eq!(
            receiver_pk_from_bytes(ps, &receiver_pk_to_bytes(ps, &rk.public)).unwrap(),
            rk.public
        );
        assert_eq!(
            receiver_sk_from_bytes(ps, &receiver_sk_to_bytes(ps, &rk.secret)).unwrap(),
            rk.secret
        );
        assert_eq!(
            sender_pk_from_bytes(ps, &sender_pk_to_bytes(ps, &sk.public)).unwrap(),
            sk.public
        );
        assert_eq!(
            sender_sk_from_bytes(ps, &sender_sk_to_bytes(ps, &sk.secret)).unwrap(),
            sk.secret
        );
        assert_eq!(tag_key_from_bytes(ps, &tag_key_to_bytes(ps, &tg)).unwrap(), tg);
        assert_eq!(
            ciphertext_from_bytes(ps, &ciphertext_to_bytes(ps, &ct)).unwrap(),
            ct
        );
    }

    #[test]
    fn cross_parameter_files_rejected() {
        let pp = toy_pp();
        let ps = &pp.params;
        let mut rng = ChaCha20Rng::seed_from_u64(78);
        let rk = keygen_receiver(&pp, &mut rng).unwrap();
        let bytes = receiver_pk_to_bytes(ps, &rk.public);
        let mut other = ps.clone();
        other.ell *= 2;
        assert_eq!(
            receiver_pk_from_bytes(&other, &bytes),
            Err(Error::ParamsDigestMismatch)
        );
    }

    #[test]
    fn unsigncrypt_wrong_receiver_rejects() {
        let pp = toy_pp();
        let mut rng = ChaCha20Rng::seed_from_u64(79);
        let rk1 = keygen_receiver(&pp, &mut rng).unwrap();
        let rk2 = keygen_receiver(&pp, &mut rng).unwrap();
        let sk = keygen_sender(&pp, &mut rng).unwrap();
        let mu = random_message(pp.params.ell, &mut rng);
        let ct = signcrypt(&pp, &rk1.public, &sk.secret, &sk.public, &mu, &mut rng).unwrap();
        let out = unsigncrypt(&pp, &rk2.secret, &rk2.public, &sk.public, &ct).unwrap();
        assert_ne!(out, Some(mu));
    }

    #[test]
    fn bad_message_rejected() {
        let pp = toy_pp();
        let mut rng = ChaCha20Rng::seed_from_u64(80);
        let rk = keygen_receiver(&pp, &mut rng).unwrap();
        let sk = keygen_sender(&pp, &mut rng).unwrap();
        let short = vec![0u8; pp.params.ell - 1];
        assert!(matches!(
            signcrypt(&pp, &rk.public, &sk.secret, &sk.public, &short, &mut rng),
            Err(Error::InvalidInput(_))
        ));
        let nonbit = vec![2u8; pp.params.ell];
        assert!(matches!(
            signcrypt(&pp, &rk.public, &sk.secret, &sk.public, &nonbit, &mut rng),
            Err(Error::InvalidInput(_))
        ));
    }
}
