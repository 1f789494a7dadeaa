//! Gadget trapdoors: key generation, preimage sampling (plain, matrix and
//! extended variants), LWE inversion, trapdoor linear combination, and
//! trapdoor quality estimation.
//!
//! A trapdoor for A ∈ Z_q^{n×m} with m = m̄ + nk is a short matrix
//! R ∈ Z^{m̄×nk} satisfying A·[R; I] ≡ H·G (mod q) for an invertible tag H.
//! Receivers use tag 0 (inversion then requires an added invertible
//! per-ciphertext tag), senders use tag 1.

use crate::error::{Error, Result};
use crate::gadget::GadgetCtx;
use crate::gaussian::{sample_matrix, sample_nonspherical, sample_vec, RealMatrix};
use crate::params::{gadget_sampling_width, rounding_base};
use crate::zq::{balanced_lift, inv_mod, IntMatrix, IntVector, ZqMatrix, ZqVector};
use rand::Rng;

/// Secret trapdoor matrix with its scalar tag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GTrapdoor {
    /// Short matrix R of shape m̄ × nk.
    pub r: IntMatrix,
    /// Scalar tag h; the tag matrix is h·I_n.
    pub tag: u64,
}

/// Generate (A, R) with A = [Ā | tag·G − Ā·R], Ā uniform and R Gaussian of
/// width σ1. The relation A·[R; I] ≡ tag·G (mod q) holds exactly.
pub fn gen_trap<R: Rng + ?Sized>(
    n: usize,
    m_bar: usize,
    q: u64,
    sigma1: f64,
    tag: u64,
    rng: &mut R,
) -> Result<(ZqMatrix, GTrapdoor)> {
    let ctx = GadgetCtx::new(q, n)?;
    let nk = n * ctx.k();
    let a_bar = ZqMatrix::uniform(n, m_bar, q, rng)?;
    let r = sample_matrix(m_bar, nk, sigma1, rng)?;
    let g = ctx.gadget_matrix()?;
    let second = g.scalar_mul(tag % q).sub(&a_bar.mul_int(&r)?)?;
    let a = a_bar.hstack(&second)?;
    Ok((a, GTrapdoor { r, tag: tag % q }))
}

/// A·[R; I] mod q, the left side of the trapdoor relation.
pub fn apply_trapdoor(a: &ZqMatrix, r: &IntMatrix) -> Result<ZqMatrix> {
    let (m_bar, nk) = (r.rows(), r.cols());
    if a.cols() != m_bar + nk {
        return Err(Error::DimensionMismatch(format!(
            "apply_trapdoor: A has {} cols, R implies {}",
            a.cols(),
            m_bar + nk
        )));
    }
    let mut r_full = IntMatrix::zeros(m_bar + nk, nk);
    for i in 0..m_bar {
        for j in 0..nk {
            r_full.set(i, j, r.get(i, j));
        }
    }
    for j in 0..nk {
        r_full.set(m_bar + j, j, 1);
    }
    a.mul_int(&r_full)
}

/// Preimage sampler for a fixed (A, R, tag matrix H): factors the
/// perturbation covariance once, then draws preimages per syndrome.
pub struct PreimageSampler<'a> {
    a: &'a ZqMatrix,
    r: &'a IntMatrix,
    tag_inv: ZqMatrix,
    ctx: GadgetCtx,
    chol: RealMatrix,
    sz: f64,
    base: f64,
}

impl<'a> PreimageSampler<'a> {
    /// `tag` is the full n×n tag matrix of the relation A·[R;I] ≡ tag·G.
    pub fn new(a: &'a ZqMatrix, r: &'a IntMatrix, tag: &ZqMatrix, sigma2: f64) -> Result<Self> {
        let n = a.rows();
        let (m_bar, nk) = (r.rows(), r.cols());
        let m = m_bar + nk;
        if a.cols() != m || tag.rows() != n || tag.cols() != n {
            return Err(Error::DimensionMismatch("preimage sampler shapes".into()));
        }
        let q = a.modulus();
        let ctx = GadgetCtx::new(q, n)?;
        if n * ctx.k() != nk {
            return Err(Error::DimensionMismatch(format!(
                "trapdoor has {} gadget columns, expected n*k = {}",
                nk,
                n * ctx.k()
            )));
        }
        let tag_inv = tag.inverse().ok_or(Error::NonInvertibleTag)?;
        let sz = gadget_sampling_width(n);
        let base = rounding_base();

        // Perturbation covariance σ2²I − sz²[R;I][Rᵗ|I] − base²I, factored.
        let mut cov = RealMatrix::zeros(m, m);
        for i in 0..m_bar {
            for j in 0..=i {
                let mut p = 0.0;
                for t in 0..nk {
                    p += r.get(i, t) as f64 * r.get(j, t) as f64;
                }
                cov.set(i, j, -sz * sz * p);
                cov.set(j, i, -sz * sz * p);
            }
        }
        for i in 0..m_bar {
            for j in 0..nk {
                let p = -sz * sz * r.get(i, j) as f64;
                cov.set(i, m_bar + j, p);
                cov.set(m_bar + j, i, p);
            }
        }
        for j in 0..nk {
            let d = cov.get(m_bar + j, m_bar + j) - sz * sz;
            cov.set(m_bar + j, m_bar + j, d);
        }
        for i in 0..m {
            cov.set(i, i, cov.get(i, i) + sigma2 * sigma2 - base * base);
        }
        let chol = cov.cholesky().ok_or_else(|| {
            Error::InvalidParams(
                "perturbation covariance not positive definite (sigma2 too small for this trapdoor)"
                    .into(),
            )
        })?;

        Ok(Self {
            a,
            r,
            tag_inv,
            ctx,
            chol,
            sz,
            base,
        })
    }

    /// Draw e with A·e ≡ u (mod q), statistically close to a spherical
    /// discrete Gaussian of width σ2 on the solution coset.
    pub fn sample<R: Rng + ?Sized>(&self, u: &ZqVector, rng: &mut R) -> Result<IntVector> {
        let q = self.a.modulus();
        let n = self.a.rows();
        let (m_bar, nk) = (self.r.rows(), self.r.cols());
        if u.len() != n || u.modulus() != q {
            return Err(Error::DimensionMismatch("syndrome shape".into()));
        }
        let p = sample_nonspherical(&self.chol, self.base, rng)?;
        let ap = self.a.mul_vec(&p.reduce_mod(q)?)?;
        let w = self.tag_inv.mul_vec(&u.sub(&ap)?)?;
        let k = self.ctx.k();
        let mut z = IntVector::zeros(nk);
        for i in 0..n {
            let blk = self.ctx.g_sample_pre(w.get(i), self.sz, rng)?;
            for j in 0..k {
                z.set(i * k + j, blk.get(j));
            }
        }
        let mut e = IntVector::zeros(m_bar + nk);
        for i in 0..m_bar {
            let mut acc = p.get(i);
            for t in 0..nk {
                acc += self.r.get(i, t) * z.get(t);
            }
            e.set(i, acc);
        }
        for j in 0..nk {
            e.set(m_bar + j, p.get(m_bar + j) + z.get(j));
        }
        Ok(e)
    }
}

fn scalar_tag_matrix(tag: u64, n: usize, q: u64) -> Result<ZqMatrix> {
    if inv_mod(tag % q, q).is_none() {
        return Err(Error::NonInvertibleTag);
    }
    Ok(ZqMatrix::identity(n, q)?.scalar_mul(tag))
}

/// SampleD for a scalar-tag trapdoor: e ∼ D_{Λ_q^u(A), σ2}.
pub fn sample_pre<R: Rng + ?Sized>(
    a: &ZqMatrix,
    t: &GTrapdoor,
    u: &ZqVector,
    sigma2: f64,
    rng: &mut R,
) -> Result<IntVector> {
    let tag = scalar_tag_matrix(t.tag, a.rows(), a.modulus())?;
    PreimageSampler::new(a, &t.r, &tag, sigma2)?.sample(u, rng)
}

/// Column-wise SampleD: E with A·E ≡ U (mod q).
pub fn sample_pre_matrix<R: Rng + ?Sized>(
    a: &ZqMatrix,
    t: &GTrapdoor,
    u: &ZqMatrix,
    sigma2: f64,
    rng: &mut R,
) -> Result<IntMatrix> {
    let tag = scalar_tag_matrix(t.tag, a.rows(), a.modulus())?;
    sample_pre_matrix_tagged(a, &t.r, &tag, u, sigma2, rng)
}

/// Column-wise SampleD with an explicit tag matrix.
pub fn sample_pre_matrix_tagged<R: Rng + ?Sized>(
    a: &ZqMatrix,
    r: &IntMatrix,
    tag: &ZqMatrix,
    u: &ZqMatrix,
    sigma2: f64,
    rng: &mut R,
) -> Result<IntMatrix> {
    if u.rows() != a.rows() {
        return Err(Error::DimensionMismatch("sample_pre_matrix: U rows".into()));
    }
    let sampler = PreimageSampler::new(a, r, tag, sigma2)?;
    let m = a.cols();
    let mut e = IntMatrix::zeros(m, u.cols());
    for j in 0..u.cols() {
        let col = ZqVector::from_entries(
            u.modulus(),
            &(0..u.rows()).map(|i| u.get(i, j)).collect::<Vec<_>>(),
        )?;
        let ej = sampler.sample(&col, rng)?;
        for i in 0..m {
            e.set(i, j, ej.get(i));
        }
    }
    Ok(e)
}

/// SampleD for the concatenation [A | C]: the C-block coordinates are drawn
/// from the spherical width-σ2 Gaussian, then the A-block preimage is sampled
/// on the adjusted syndrome u − C·e2 (extend-right).
pub fn sample_pre_extended<R: Rng + ?Sized>(
    a: &ZqMatrix,
    t: &GTrapdoor,
    c: &ZqMatrix,
    u: &ZqVector,
    sigma2: f64,
    rng: &mut R,
) -> Result<IntVector> {
    if c.rows() != a.rows() || c.modulus() != a.modulus() {
        return Err(Error::DimensionMismatch("sample_pre_extended: C shape".into()));
    }
    let e2 = sample_vec(c.cols(), sigma2, rng)?;
    let ce2 = c.mul_vec(&e2.reduce_mod(c.modulus())?)?;
    let u2 = u.sub(&ce2)?;
    let e1 = sample_pre(a, t, &u2, sigma2, rng)?;
    Ok(e1.concat(&e2))
}

/// Recover (s, e) from bᵗ = sᵗA + eᵗ using an explicit invertible tag matrix.
pub fn invert_lwe_tagged(
    a: &ZqMatrix,
    r: &IntMatrix,
    tag: &ZqMatrix,
    b: &ZqVector,
) -> Result<(ZqVector, IntVector)> {
    let q = a.modulus();
    let n = a.rows();
    let (m_bar, nk) = (r.rows(), r.cols());
    if b.len() != a.cols() || a.cols() != m_bar + nk {
        return Err(Error::DimensionMismatch("invert_lwe: shapes".into()));
    }
    let tag_inv = tag.inverse().ok_or(Error::NonInvertibleTag)?;
    let ctx = GadgetCtx::new(q, n)?;
    let k = ctx.k();
    if n * k != nk {
        return Err(Error::DimensionMismatch("invert_lwe: gadget width".into()));
    }

    // b̂ᵗ = bᵗ[R; I] = (sᵗH)G + eᵗ[R; I]: decode each gadget block.
    let qi = q as i128;
    let mut bhat = Vec::with_capacity(nk);
    for j in 0..nk {
        let mut acc: i128 = b.get(m_bar + j) as i128;
        for i in 0..m_bar {
            acc += b.get(i) as i128 * r.get(i, j) as i128;
            if acc.unsigned_abs() >= 1 << 126 {
                acc = acc.rem_euclid(qi);
            }
        }
        bhat.push(acc.rem_euclid(qi) as u64);
    }
    let mut s_hat = ZqVector::zeros(n, q)?;
    for i in 0..n {
        let block = ZqVector::from_entries(q, &bhat[i * k..(i + 1) * k])?;
        let (x, _) = ctx.g_invert_block(&block)?;
        s_hat.set(i, x);
    }
    // ŝ = Hᵗs, so s = (H⁻¹)ᵗ·ŝ.
    let s = tag_inv.transpose().mul_vec(&s_hat)?;
    let e = balanced_lift(&b.sub(&a.transpose().mul_vec(&s)?)?);
    Ok((s, e))
}

/// Recover (s, e) from bᵗ = sᵗA + eᵗ for a scalar-tag trapdoor.
pub fn invert_lwe(a: &ZqMatrix, t: &GTrapdoor, b: &ZqVector) -> Result<(ZqVector, IntVector)> {
    let tag = scalar_tag_matrix(t.tag, a.rows(), a.modulus())?;
    invert_lwe_tagged(a, &t.r, &tag, b)
}

/// Linear combination of trapdoors sharing one base matrix: R = Σ h̃_i·R_i
/// with balanced-lifted coefficients, tag = Σ h_i·x_i mod q.
pub fn trapdoor_combine(
    trapdoors: &[(&IntMatrix, u64)],
    coeffs: &[u64],
    q: u64,
) -> Result<GTrapdoor> {
    if trapdoors.is_empty() || trapdoors.len() != coeffs.len() {
        return Err(Error::DimensionMismatch("trapdoor_combine: counts".into()));
    }
    let mats: Vec<&IntMatrix> = trapdoors.iter().map(|(r, _)| *r).collect();
    let lifted: Vec<i64> = coeffs
        .iter()
        .map(|&h| crate::zq::lift_balanced(h % q, q))
        .collect();
    let r = IntMatrix::linear_combination(&mats, &lifted)?;
    let mut tag: u128 = 0;
    for ((_, x), &h) in trapdoors.iter().zip(coeffs) {
        tag = (tag + (*x as u128 % q as u128) * (h as u128 % q as u128)) % q as u128;
    }
    Ok(GTrapdoor {
        r,
        tag: tag as u64,
    })
}

/// Largest singular value by power iteration (200 rounds).
pub fn s1_estimate(r: &IntMatrix) -> f64 {
    let (rows, cols) = (r.rows(), r.cols());
    if rows == 0 || cols == 0 {
        return 0.0;
    }
    if r.entries().iter().all(|&e| e == 0) {
        return 0.0;
    }
    let mut v = vec![1.0f64; cols];
    let norm = (cols as f64).sqrt();
    for x in v.iter_mut() {
        *x /= norm;
    }
    let mut est = 0.0;
    for _ in 0..200 {
        // w = Rᵗ(R v)
        let mut rv = vec![0.0f64; rows];
        for i in 0..rows {
            let mut acc = 0.0;
            for j in 0..cols {
                acc += r.get(i, j) as f64 * v[j];
            }
            rv[i] = acc;
        }
        let mut w = vec![0.0f64; cols];
        for j in 0..cols {
            let mut acc = 0.0;
            for i in 0..rows {
                acc += r.get(i, j) as f64 * rv[i];
            }
            w[j] = acc;
        }
        let wn = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if wn == 0.0 {
            return 0.0;
        }
        est = wn.sqrt();
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / wn;
        }
    }
    est
}

/// Lemma-style high-probability bound σ·(1/√2π)(√rows + √cols) on s1 of a
/// Gaussian matrix of width σ.
pub fn s1_gaussian_bound(rows: usize, cols: usize, sigma: f64) -> f64 {
    sigma / (2.0 * std::f64::consts::PI).sqrt() * ((rows as f64).sqrt() + (cols as f64).sqrt())
}
