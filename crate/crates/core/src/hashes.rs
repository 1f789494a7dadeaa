//! Hash roles used by the scheme: the one-way bit-string hash H, the
//! matrix/byte digests H1 and H3 into Z_q^m̄, the full-rank-differences (FRD)
//! encoding serving as H2, and the abort-resistant hash family
//! H_x(h) = 1 + ⟨x, h⟩ with an empirical non-abort estimator.
//!
//! H, H1 and H3 are all instantiated from one extendable-output construction
//! (SHA-256 in counter mode) under distinct domain-separation tags; the Lu
//! attack module uses its own tag for its universal hash.

use crate::error::{Error, Result};
use crate::zq::{ZqMatrix, ZqVector};
use rand::Rng;
use sha2::{Digest, Sha256};

/// Domain tags.
pub const DOMAIN_H: &[u8] = b"SCET/H";
pub const DOMAIN_H1: &[u8] = b"SCET/H1";
pub const DOMAIN_H3: &[u8] = b"SCET/H3";
pub const DOMAIN_FRD: &[u8] = b"SCET/FRD";
pub const DOMAIN_LU_H2: &[u8] = b"LU/H2";

/// Deterministic byte stream: SHA-256 over (domain length, domain, input)
/// seeds counter-mode SHA-256 blocks.
pub struct XofStream {
    seed: [u8; 32],
    counter: u64,
    block: [u8; 32],
    used: usize,
    /// Bit buffer for sub-byte reads, most significant bit first.
    bitbuf: u64,
    bits: u32,
}

impl XofStream {
    pub fn new(domain: &[u8], input: &[u8]) -> Self {
        let mut h = Sha256::new();
        h.update((domain.len() as u64).to_le_bytes());
        h.update(domain);
        h.update(input);
        Self {
            seed: h.finalize().into(),
            counter: 0,
            block: [0; 32],
            used: 32,
            bitbuf: 0,
            bits: 0,
        }
    }

    pub fn next_byte(&mut self) -> u8 {
        if self.used == 32 {
            let mut h = Sha256::new();
            h.update(self.seed);
            h.update(self.counter.to_le_bytes());
            self.block = h.finalize().into();
            self.counter += 1;
            self.used = 0;
        }
        let b = self.block[self.used];
        self.used += 1;
        b
    }

    /// Next `n` bits (n <= 57) as an integer.
    pub fn next_bits(&mut self, n: u32) -> u64 {
        debug_assert!(n <= 57);
        while self.bits < n {
            self.bitbuf = (self.bitbuf << 8) | self.next_byte() as u64;
            self.bits += 8;
        }
        let out = (self.bitbuf >> (self.bits - n)) & ((1u64 << n) - 1);
        self.bits -= n;
        self.bitbuf &= (1u64 << self.bits) - 1;
        out
    }
}

/// Expand (domain, input) into `count` residues uniform in [0, q), by
/// rejection sampling on ⌈log2 q⌉-bit chunks.
pub fn xof_expand(domain: &[u8], input: &[u8], count: usize, q: u64) -> Result<ZqVector> {
    if q < 2 {
        return Err(Error::InvalidParams("xof_expand needs q >= 2".into()));
    }
    let bits = crate::params::ceil_log2(q) as u32;
    let mut stream = XofStream::new(domain, input);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let v = stream.next_bits(bits);
        if v < q {
            out.push(v);
        }
    }
    ZqVector::from_entries(q, &out)
}

/// Pack a 0/1 bit slice into bytes (most significant bit first).
pub fn pack_bits(bits: &[u8]) -> Result<Vec<u8>> {
    if bits.iter().any(|&b| b > 1) {
        return Err(Error::InvalidInput("bit string entries must be 0 or 1".into()));
    }
    let mut out = vec![0u8; (bits.len() + 7) / 8];
    for (i, &b) in bits.iter().enumerate() {
        out[i / 8] |= b << (7 - i % 8);
    }
    Ok(out)
}

/// Length-preserving one-way hash on bit strings.
pub fn hash_h(mu: &[u8]) -> Result<Vec<u8>> {
    if mu.is_empty() {
        return Err(Error::InvalidInput("empty bit string".into()));
    }
    let mut input = (mu.len() as u64).to_le_bytes().to_vec();
    input.extend(pack_bits(mu)?);
    let mut stream = XofStream::new(DOMAIN_H, &input);
    Ok((0..mu.len()).map(|_| stream.next_bits(1) as u8).collect())
}

/// Digest of a public-key matrix into Z_q^m̄.
pub fn hash_h1(a: &ZqMatrix, m_bar: usize) -> Result<ZqVector> {
    let bytes = crate::serialize::matrix_to_bytes(a);
    xof_expand(DOMAIN_H1, &bytes, m_bar, a.modulus())
}

/// Digest of an arbitrary byte string into Z_q^m̄.
pub fn hash_h3(input: &[u8], m_bar: usize, q: u64) -> Result<ZqVector> {
    xof_expand(DOMAIN_H3, input, m_bar, q)
}

/// Deterministic Miller-Rabin primality test for u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let pow = |mut b: u64, mut e: u64| -> u64 {
        let mut acc = 1u64;
        b %= n;
        while e > 0 {
            if e & 1 == 1 {
                acc = (acc as u128 * b as u128 % n as u128) as u64;
            }
            b = (b as u128 * b as u128 % n as u128) as u64;
            e >>= 1;
        }
        acc
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = (x as u128 * x as u128 % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

// ---- polynomial arithmetic mod (f, q), for the FRD encoding ----

/// Coefficients low-to-high, trailing zeros trimmed.
fn poly_trim(mut p: Vec<u64>) -> Vec<u64> {
    while p.last() == Some(&0) {
        p.pop();
    }
    p
}

fn poly_mul(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + (ai as u128 * bj as u128 % q as u128) as u64) % q;
        }
    }
    poly_trim(out)
}

/// Remainder of `a` modulo the monic polynomial `m`.
fn poly_rem(a: &[u64], m: &[u64], q: u64) -> Vec<u64> {
    debug_assert_eq!(*m.last().unwrap(), 1, "modulus must be monic");
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (i, &mi) in m.iter().enumerate() {
                let idx = shift + i;
                let sub = (lead as u128 * mi as u128 % q as u128) as u64;
                r[idx] = (r[idx] + q - sub) % q;
            }
        }
        r.pop();
        r = poly_trim(r);
        if r.len() <= dm {
            break;
        }
    }
    poly_trim(r)
}

fn poly_gcd(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
    let (mut a, mut b) = (poly_trim(a.to_vec()), poly_trim(b.to_vec()));
    while !b.is_empty() {
        // Make b monic before reducing.
        let inv = crate::zq::inv_mod(*b.last().unwrap(), q).expect("prime modulus");
        let monic: Vec<u64> = b
            .iter()
            .map(|&c| (c as u128 * inv as u128 % q as u128) as u64)
            .collect();
        let r = poly_rem(&a, &monic, q);
        a = b;
        b = r;
    }
    a
}

/// x^(q^i) mod f by iterated Frobenius (square-and-multiply per step).
fn frobenius_power(f: &[u64], q: u64, i: usize) -> Vec<u64> {
    let mut r = vec![0u64, 1]; // x
    for _ in 0..i {
        // r <- r^q mod f
        let mut acc = vec![1u64];
        let mut base = r.clone();
        let mut e = q;
        while e > 0 {
            if e & 1 == 1 {
                acc = poly_rem(&poly_mul(&acc, &base, q), f, q);
            }
            base = poly_rem(&poly_mul(&base, &base, q), f, q);
            e >>= 1;
        }
        r = acc;
    }
    r
}

fn poly_is_irreducible(f: &[u64], q: u64) -> bool {
    let n = f.len() - 1;
    if n == 0 {
        return false;
    }
    for i in 1..=n / 2 {
        // gcd(x^(q^i) - x, f) must be constant.
        let mut g = frobenius_power(f, q, i);
        // subtract x
        if g.len() < 2 {
            g.resize(2, 0);
        }
        g[1] = (g[1] + q - 1) % q;
        let g = poly_trim(g);
        let d = poly_gcd(f, &g, q);
        if d.len() > 1 {
            return false;
        }
    }
    true
}

/// Full-rank-differences encoding context: a monic irreducible polynomial f
/// of degree n over the prime field Z_q.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrdCtx {
    n: usize,
    q: u64,
    /// Coefficients of f, low-to-high, length n+1, leading coefficient 1.
    f: Vec<u64>,
}

impl FrdCtx {
    /// Deterministic seeded search for an irreducible modulus polynomial.
    pub fn new(n: usize, q: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParams("FRD needs n >= 1".into()));
        }
        if !is_prime_u64(q) {
            return Err(Error::InvalidParams(format!(
                "FRD needs a prime modulus, got {q}"
            )));
        }
        for attempt in 0u64..4096 {
            let mut input = (n as u64).to_le_bytes().to_vec();
            input.extend(q.to_le_bytes());
            input.extend(attempt.to_le_bytes());
            let low = xof_expand(DOMAIN_FRD, &input, n, q)?;
            let mut f: Vec<u64> = low.entries().to_vec();
            f.push(1);
            if poly_is_irreducible(&f, q) {
                return Ok(Self { n, q, f });
            }
        }
        Err(Error::Internal("no irreducible polynomial found".into()))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    /// Coefficients of f, low-to-high (length n+1, monic).
    pub fn poly(&self) -> &[u64] {
        &self.f
    }

    /// Rebuild from stored coefficients, re-verifying irreducibility.
    pub fn from_poly(n: usize, q: u64, f: Vec<u64>) -> Result<Self> {
        if f.len() != n + 1 || f.last() != Some(&1) {
            return Err(Error::Malformed("FRD polynomial must be monic degree n".into()));
        }
        if !is_prime_u64(q) {
            return Err(Error::InvalidParams("FRD needs a prime modulus".into()));
        }
        if !poly_is_irreducible(&f, q) {
            return Err(Error::Malformed("stored FRD polynomial is reducible".into()));
        }
        Ok(Self { n, q, f })
    }

    /// Multiplication-by-t(x) matrix in Z_q[x]/(f): column j holds the
    /// coefficients of t(x)·x^j mod f. Additive in t; invertible iff t ≠ 0.
    pub fn encode(&self, t: &ZqVector) -> Result<ZqMatrix> {
        if t.len() != self.n || t.modulus() != self.q {
            return Err(Error::DimensionMismatch("frd_encode input".into()));
        }
        let mut out = ZqMatrix::zeros(self.n, self.n, self.q)?;
        let mut col = poly_trim(t.entries().to_vec());
        for j in 0..self.n {
            for (i, &c) in col.iter().enumerate() {
                out.set(i, j, c);
            }
            if j + 1 < self.n {
                // Multiply by x and reduce.
                let mut shifted = vec![0u64];
                shifted.extend_from_slice(&col);
                col = poly_rem(&shifted, &self.f, self.q);
            }
        }
        Ok(out)
    }
}

/// Member of the abort-resistant family H_x(h) = 1 + ⟨x, h⟩ mod q.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WatHash {
    x: ZqVector,
}

impl WatHash {
    pub fn new(x: ZqVector) -> Result<Self> {
        if x.entries().iter().all(|&e| e == 0) {
            return Err(Error::InvalidInput("abort-resistant hash key must be nonzero".into()));
        }
        Ok(Self { x })
    }

    pub fn key(&self) -> &ZqVector {
        &self.x
    }

    pub fn eval(&self, h: &ZqVector) -> Result<u64> {
        let ip = self.x.dot(h)?;
        Ok(crate::zq::add_mod(1 % self.x.modulus(), ip, self.x.modulus()))
    }
}

/// Empirical non-abort probability for explicit target points: the fraction
/// of random keys x with H_x(h*) = 0 and H_x(h^(j)) ≠ 0 for every j.
pub fn wat_nonabort_estimate_with<R: Rng + ?Sized>(
    q: u64,
    h_star: &ZqVector,
    hs: &[ZqVector],
    trials: usize,
    rng: &mut R,
) -> Result<f64> {
    if !is_prime_u64(q) {
        return Err(Error::InvalidParams("estimator needs prime q".into()));
    }
    if hs.len() as u64 >= q {
        return Err(Error::InvalidParams("query budget Q must be < q".into()));
    }
    let n = h_star.len();
    for h in hs {
        if h.len() != n || h.modulus() != q {
            return Err(Error::DimensionMismatch("query point shape".into()));
        }
        if h == h_star {
            return Err(Error::InvalidInput("query point equals the target point".into()));
        }
    }
    for (i, a) in hs.iter().enumerate() {
        if hs[i + 1..].contains(a) {
            return Err(Error::InvalidInput("duplicate query points".into()));
        }
    }
    let mut hits = 0usize;
    for _ in 0..trials {
        let x = ZqVector::uniform(n, q, rng)?;
        let at = |h: &ZqVector| -> u64 {
            crate::zq::add_mod(1, x.dot(h).expect("dims checked"), q)
        };
        if at(h_star) == 0 && hs.iter().all(|h| at(h) != 0) {
            hits += 1;
        }
    }
    Ok(hits as f64 / trials as f64)
}

/// Empirical non-abort probability for `big_q` random distinct query points
/// and a random distinct target point.
pub fn wat_nonabort_estimate<R: Rng + ?Sized>(
    q: u64,
    big_q: usize,
    trials: usize,
    rng: &mut R,
) -> Result<f64> {
    if big_q as u64 >= q {
        return Err(Error::InvalidParams("query budget Q must be < q".into()));
    }
    let n = 4usize;
    let nonzero = |rng: &mut R| -> Result<ZqVector> {
        loop {
            let v = ZqVector::uniform(n, q, rng)?;
            if v.entries().iter().any(|&e| e != 0) {
                return Ok(v);
            }
        }
    };
    let h_star = nonzero(rng)?;
    let mut hs = Vec::with_capacity(big_q);
    while hs.len() < big_q {
        let h = nonzero(rng)?;
        if h != h_star && !hs.contains(&h) {
            hs.push(h);
        }
    }
    wat_nonabort_estimate_with(q, &h_star, &hs, trials, rng)
}
