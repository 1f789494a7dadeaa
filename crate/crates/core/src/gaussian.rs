//! Discrete Gaussian samplers: the one-dimensional D_{Z,s,c}, the discretized
//! Gaussian on Z_q, i.i.d. vector/matrix extensions, and the nonspherical
//! sampler used for preimage perturbations.
//!
//! Width convention: a width-s Gaussian has density proportional to
//! exp(-π x²/s²), so its variance is s²/(2π). No constant-time or
//! side-channel claims are made; everything runs in double precision.

use crate::error::{Error, Result};
use crate::zq::{IntMatrix, IntVector};
use rand::Rng;
use std::f64::consts::PI;

/// Width and center of a one-dimensional discrete Gaussian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussParam {
    /// Width parameter s > 0.
    pub s: f64,
    /// Center c.
    pub c: f64,
}

impl GaussParam {
    pub fn new(s: f64, c: f64) -> Result<Self> {
        if !(s > 0.0) || !s.is_finite() || !c.is_finite() {
            return Err(Error::InvalidParams(format!("bad Gaussian param s={s} c={c}")));
        }
        Ok(Self { s, c })
    }

    /// Centered Gaussian of width s.
    pub fn centered(s: f64) -> Result<Self> {
        Self::new(s, 0.0)
    }
}

/// Standard normal via Box-Muller.
fn normal_std<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>(); // (0, 1]
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

/// Continuous Gaussian of width s (density ∝ exp(-π x²/s²)).
fn continuous_width<R: Rng + ?Sized>(s: f64, rng: &mut R) -> f64 {
    normal_std(rng) * s / (2.0 * PI).sqrt()
}

/// Sample from D_{Z,s,c} by rejection against the exact ρ_{s,c} weight on the
/// tail-cut window [⌈c-10s⌉, ⌊c+10s⌋]. The mass outside the window is far
/// below 2^-100 for every width the scheme uses.
pub fn sample_z<R: Rng + ?Sized>(p: GaussParam, rng: &mut R) -> i64 {
    let lo = (p.c - 10.0 * p.s).ceil() as i64;
    let hi = (p.c + 10.0 * p.s).floor() as i64;
    if lo > hi {
        // Window between two integers; all mass sits at the nearest one.
        return p.c.round() as i64;
    }
    loop {
        let x = rng.gen_range(lo..=hi);
        let d = x as f64 - p.c;
        let w = (-PI * d * d / (p.s * p.s)).exp();
        if rng.gen::<f64>() < w {
            return x;
        }
    }
}

/// Discretized Gaussian on Z_q: draw X from the continuous width-α Gaussian
/// and output ⌊qX⌉ mod q.
pub fn sample_discretized<R: Rng + ?Sized>(alpha: f64, q: u64, rng: &mut R) -> u64 {
    debug_assert!(alpha > 0.0 && alpha < 1.0);
    let x = continuous_width(alpha, rng);
    let r = (q as f64 * x).round() as i64;
    crate::zq::reduce_signed(r, q)
}

/// i.i.d. centered samples of width s.
pub fn sample_vec<R: Rng + ?Sized>(dim: usize, s: f64, rng: &mut R) -> Result<IntVector> {
    let p = GaussParam::centered(s)?;
    Ok(IntVector::new((0..dim).map(|_| sample_z(p, rng)).collect()))
}

/// Matrix with i.i.d. centered entries of width s.
pub fn sample_matrix<R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    s: f64,
    rng: &mut R,
) -> Result<IntMatrix> {
    let p = GaussParam::centered(s)?;
    let entries = (0..rows * cols).map(|_| sample_z(p, rng)).collect();
    IntMatrix::from_entries(rows, cols, entries)
}

/// Dense real matrix for covariance bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_data(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch("real matrix entry count".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch("real mul_vec".into()));
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * v[j]).sum())
            .collect())
    }

    /// Lower-triangular Cholesky factor; `None` when not positive definite.
    pub fn cholesky(&self) -> Option<RealMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut l = RealMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let mut sum = self.get(i, j);
                for t in 0..j {
                    sum -= l.get(i, t) * l.get(j, t);
                }
                if i == j {
                    if sum <= 0.0 {
                        return None;
                    }
                    l.set(i, j, sum.sqrt());
                } else {
                    l.set(i, j, sum / l.get(j, j));
                }
            }
        }
        Some(l)
    }
}

/// Nonspherical integer Gaussian: multiply a standard continuous Gaussian
/// vector by `sqrt_cov`, then randomized-round each coordinate with width
/// `base`. The output is statistically close to a discrete Gaussian with
/// width-squared matrix sqrt_cov·sqrt_covᵗ + base²·I.
pub fn sample_nonspherical<R: Rng + ?Sized>(
    sqrt_cov: &RealMatrix,
    base: f64,
    rng: &mut R,
) -> Result<IntVector> {
    if sqrt_cov.rows() != sqrt_cov.cols() {
        return Err(Error::DimensionMismatch("sqrt_cov must be square".into()));
    }
    let dim = sqrt_cov.rows();
    let g: Vec<f64> = (0..dim).map(|_| continuous_width(1.0, rng)).collect();
    let y = sqrt_cov.mul_vec(&g)?;
    let mut out = Vec::with_capacity(dim);
    for &c in &y {
        out.push(sample_z(GaussParam::new(base, c)?, rng));
    }
    Ok(IntVector::new(out))
}
