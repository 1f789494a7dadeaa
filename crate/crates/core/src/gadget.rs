//! The gadget vector g = (1, 2, ..., 2^(k-1)), its lattice Λ⊥(gᵗ) with the
//! standard short basis S, Gaussian sampling on gadget cosets (randomized
//! nearest-plane), and noisy gadget decoding (Babai nearest-plane against a
//! short basis of the q-ary image lattice Λ_q(gᵗ)).

use crate::error::{Error, Result};
use crate::gaussian::{sample_z, GaussParam};
use crate::zq::{IntMatrix, IntVector, ZqMatrix, ZqVector};
use rand::Rng;

/// Gram-Schmidt data of an integer column basis, in double precision.
#[derive(Debug, Clone)]
struct GramSchmidt {
    /// Orthogonalized columns, one inner Vec per column.
    gs_cols: Vec<Vec<f64>>,
    /// Squared norms of the orthogonalized columns.
    norms_sq: Vec<f64>,
}

impl GramSchmidt {
    fn of_columns(basis: &IntMatrix) -> Self {
        let (rows, cols) = (basis.rows(), basis.cols());
        let mut gs_cols: Vec<Vec<f64>> = Vec::with_capacity(cols);
        let mut norms_sq = Vec::with_capacity(cols);
        for j in 0..cols {
            let mut v: Vec<f64> = (0..rows).map(|i| basis.get(i, j) as f64).collect();
            for t in 0..j {
                let prev = &gs_cols[t];
                let mu = dot(&v, prev) / norms_sq[t];
                for (vi, pi) in v.iter_mut().zip(prev) {
                    *vi -= mu * pi;
                }
            }
            let n2 = dot(&v, &v);
            norms_sq.push(n2);
            gs_cols.push(v);
        }
        Self { gs_cols, norms_sq }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// ⌈log2 q⌉ powers of two: (1, 2, 4, ..., 2^(k-1)).
pub fn gadget_vector(q: u64) -> Result<IntVector> {
    if q < 2 {
        return Err(Error::InvalidParams("gadget needs q >= 2".into()));
    }
    let k = crate::params::ceil_log2(q);
    Ok(IntVector::new((0..k).map(|i| 1i64 << i).collect()))
}

/// Context for gadget-lattice operations at a fixed (q, n).
#[derive(Debug, Clone)]
pub struct GadgetCtx {
    q: u64,
    k: usize,
    n: usize,
    g: IntVector,
    /// Short basis of Λ⊥(gᵗ): bidiagonal (2 on the diagonal, -1 below), with
    /// the last column replaced by the base-2 digits of q when q is not a
    /// power of two.
    s_basis: IntMatrix,
    s_gs: GramSchmidt,
    /// Short basis of Λ_q(gᵗ) = q·(Λ⊥(gᵗ))*, used for decoding.
    d_basis: IntMatrix,
    d_gs: GramSchmidt,
    /// Half the shortest Gram-Schmidt norm of `d_basis`: errors strictly
    /// inside this Euclidean radius decode uniquely.
    radius: f64,
}

impl GadgetCtx {
    pub fn new(q: u64, n: usize) -> Result<Self> {
        let g = gadget_vector(q)?;
        let k = g.len();
        let power_of_two = q & (q - 1) == 0;

        let mut s = IntMatrix::zeros(k, k);
        for j in 0..k {
            s.set(j, j, 2);
            if j + 1 < k {
                s.set(j + 1, j, -1);
            }
        }
        if !power_of_two {
            for i in 0..k {
                s.set(i, k - 1, ((q >> i) & 1) as i64);
            }
        }

        // Column-wise kernel relation g^t S ≡ 0 (mod q).
        for j in 0..k {
            let mut acc: i128 = 0;
            for i in 0..k {
                acc += g.get(i) as i128 * s.get(i, j) as i128;
            }
            if acc.rem_euclid(q as i128) != 0 {
                return Err(Error::Internal(format!("gadget basis column {j} not in kernel")));
            }
        }
        // |det S| = q, so the columns span the whole kernel lattice.
        if det_bareiss(&s)?.unsigned_abs() != q as u128 {
            return Err(Error::Internal("gadget basis determinant != q".into()));
        }

        let s_gs = GramSchmidt::of_columns(&s);
        let max_gs = s_gs.norms_sq.iter().cloned().fold(0.0, f64::max).sqrt();
        if max_gs > 5.0f64.sqrt() + 1e-9 {
            return Err(Error::Internal(format!("gadget basis GS norm {max_gs} > sqrt(5)")));
        }

        let d = dual_scaled_basis(&s, q)?;
        let d_gs = GramSchmidt::of_columns(&d);
        let radius = d_gs.norms_sq.iter().cloned().fold(f64::INFINITY, f64::min).sqrt() / 2.0;

        Ok(Self {
            q,
            k,
            n,
            g,
            s_basis: s,
            s_gs,
            d_basis: d,
            d_gs,
            radius,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gadget(&self) -> &IntVector {
        &self.g
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.s_basis
    }

    /// Euclidean decoding radius of `g_invert_block`.
    pub fn decoding_radius(&self) -> f64 {
        self.radius
    }

    /// The block gadget matrix G = I_n ⊗ gᵗ, of shape n × nk.
    pub fn gadget_matrix(&self) -> Result<ZqMatrix> {
        let mut gm = ZqMatrix::zeros(self.n, self.n * self.k, self.q)?;
        for i in 0..self.n {
            for j in 0..self.k {
                gm.set(i, i * self.k + j, (self.g.get(j) as u64) % self.q);
            }
        }
        Ok(gm)
    }

    /// Short integer z with ⟨g, z⟩ ≡ u (mod q): binary digits for q a power
    /// of two, digits reduced by a nearest-plane step against S otherwise.
    pub fn g_decompose(&self, u: u64) -> Result<IntVector> {
        if u >= self.q {
            return Err(Error::InvalidInput(format!("residue {u} >= q {}", self.q)));
        }
        let digits = IntVector::new((0..self.k).map(|i| ((u >> i) & 1) as i64).collect());
        if self.q & (self.q - 1) == 0 {
            return Ok(digits);
        }
        // Subtract the nearest-plane lattice point to center the digits.
        let v = nearest_plane(&self.s_basis, &self.s_gs, &digits);
        let mut out = digits;
        for i in 0..self.k {
            out.set(i, out.get(i) - v.get(i));
        }
        Ok(out)
    }

    /// Gaussian sample on the coset {z : ⟨g, z⟩ ≡ u (mod q)} of width s,
    /// via randomized nearest-plane (Klein/GPV) over S.
    pub fn g_sample_pre<R: Rng + ?Sized>(&self, u: u64, s: f64, rng: &mut R) -> Result<IntVector> {
        if u >= self.q {
            return Err(Error::InvalidInput(format!("residue {u} >= q {}", self.q)));
        }
        let z0 = IntVector::new((0..self.k).map(|i| ((u >> i) & 1) as i64).collect());
        // Sample v ~ D_{Λ, s, -z0} and output z0 + v ~ D_{z0 + Λ, s}.
        let mut t: Vec<f64> = (0..self.k).map(|i| -(z0.get(i) as f64)).collect();
        let mut v = IntVector::zeros(self.k);
        for j in (0..self.k).rev() {
            let gsj = &self.s_gs.gs_cols[j];
            let c = dot(&t, gsj) / self.s_gs.norms_sq[j];
            let width = s / self.s_gs.norms_sq[j].sqrt();
            let x = sample_z(GaussParam::new(width, c)?, rng);
            for i in 0..self.k {
                let sij = self.s_basis.get(i, j);
                t[i] -= x as f64 * sij as f64;
                v.set(i, v.get(i) + x * sij);
            }
        }
        let mut out = z0;
        for i in 0..self.k {
            out.set(i, out.get(i) + v.get(i));
        }
        Ok(out)
    }

    /// Decode b = x·g + ê (mod q): returns the unique (x, ê) when
    /// ‖ê‖ is inside the decoding radius.
    pub fn g_invert_block(&self, b: &ZqVector) -> Result<(u64, IntVector)> {
        if b.modulus() != self.q {
            return Err(Error::ModulusMismatch(b.modulus(), self.q));
        }
        if b.len() != self.k {
            return Err(Error::DimensionMismatch(format!(
                "gadget block length {} != k {}",
                b.len(),
                self.k
            )));
        }
        let b_int = IntVector::new(b.entries().iter().map(|&e| e as i64).collect::<Vec<_>>());
        let y = nearest_plane(&self.d_basis, &self.d_gs, &b_int);
        let mut err = IntVector::zeros(self.k);
        for i in 0..self.k {
            err.set(i, b_int.get(i) - y.get(i));
        }
        if err.norm() >= self.radius {
            return Err(Error::DecodingFailure);
        }
        // y ≡ x·g (mod q) and g starts with 1, so x is y's first coordinate.
        let x = crate::zq::reduce_signed(y.get(0), self.q);
        Ok((x, err))
    }
}

/// Babai nearest-plane: the lattice point (integer vector) of the column
/// lattice of `basis` nearest to `target` in the Gram-Schmidt sense.
fn nearest_plane(basis: &IntMatrix, gs: &GramSchmidt, target: &IntVector) -> IntVector {
    let k = basis.cols();
    let mut t: Vec<f64> = target.entries().iter().map(|&e| e as f64).collect();
    let mut y = IntVector::zeros(basis.rows());
    for j in (0..k).rev() {
        let c = (dot(&t, &gs.gs_cols[j]) / gs.norms_sq[j]).round() as i64;
        if c == 0 {
            continue;
        }
        for i in 0..basis.rows() {
            let bij = basis.get(i, j);
            t[i] -= c as f64 * bij as f64;
            y.set(i, y.get(i) + c * bij);
        }
    }
    y
}

/// Exact determinant by Bareiss fraction-free elimination.
fn det_bareiss(m: &IntMatrix) -> Result<i128> {
    let n = m.rows();
    if n != m.cols() {
        return Err(Error::DimensionMismatch("determinant of non-square".into()));
    }
    let mut a: Vec<Vec<i128>> = (0..n)
        .map(|i| (0..n).map(|j| m.get(i, j) as i128).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for col in 0..n.saturating_sub(1) {
        if a[col][col] == 0 {
            let Some(swap) = (col + 1..n).find(|&r| a[r][col] != 0) else {
                return Ok(0);
            };
            a.swap(col, swap);
            sign = -sign;
        }
        for i in col + 1..n {
            for j in col + 1..n {
                a[i][j] = (a[i][j] * a[col][col] - a[i][col] * a[col][j]) / prev;
            }
            a[i][col] = 0;
        }
        prev = a[col][col];
    }
    Ok(sign * a[n - 1][n - 1])
}

/// Short basis of Λ_q(gᵗ) as q·S^(-T): computed in floating point, rounded,
/// then verified exactly (Sᵗ·D = q·I over the integers).
fn dual_scaled_basis(s: &IntMatrix, q: u64) -> Result<IntMatrix> {
    let k = s.rows();
    // Invert Sᵗ in f64 by Gauss-Jordan.
    let mut a: Vec<Vec<f64>> = (0..k)
        .map(|i| (0..k).map(|j| s.get(j, i) as f64).collect())
        .collect();
    let mut inv: Vec<Vec<f64>> = (0..k)
        .map(|i| (0..k).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for col in 0..k {
        let pivot_row = (col..k)
            .max_by(|&x, &y| a[x][col].abs().partial_cmp(&a[y][col].abs()).unwrap())
            .unwrap();
        if a[pivot_row][col].abs() < 1e-12 {
            return Err(Error::Internal("singular gadget basis".into()));
        }
        a.swap(col, pivot_row);
        inv.swap(col, pivot_row);
        let p = a[col][col];
        for j in 0..k {
            a[col][j] /= p;
            inv[col][j] /= p;
        }
        for r in 0..k {
            if r == col {
                continue;
            }
            let f = a[r][col];
            if f == 0.0 {
                continue;
            }
            for j in 0..k {
                a[r][j] -= f * a[col][j];
                inv[r][j] -= f * inv[col][j];
            }
        }
    }
    let mut d = IntMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            d.set(i, j, (q as f64 * inv[i][j]).round() as i64);
        }
    }
    // Exact check: Sᵗ·D = q·I.
    for i in 0..k {
        for j in 0..k {
            let mut acc: i128 = 0;
            for t in 0..k {
                acc += s.get(t, i) as i128 * d.get(t, j) as i128;
            }
            let expect = if i == j { q as i128 } else { 0 };
            if acc != expect {
                return Err(Error::Internal(
                    "decoding basis verification failed (modulus too large for f64 path)".into(),
                ));
            }
        }
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    const TEST_QS: [u64; 5] = [8, 10, 97, 1 << 10, 12289];

    #[test]
    fn gadget_vector_values() {
        assert_eq!(gadget_vector(8).unwrap().entries(), &[1, 2, 4]);
        assert_eq!(gadget_vector(2).unwrap().entries(), &[1]);
        assert_eq!(gadget_vector(10).unwrap().entries(), &[1, 2, 4, 8]);
    }

    #[test]
    fn basis_kernel_and_determinant() {
        for &q in &TEST_QS {
            // Construction verifies g^t S ≡ 0 and |det S| = q internally.
            let ctx = GadgetCtx::new(q, 1).unwrap();
            assert_eq!(det_bareiss(ctx.basis()).unwrap().unsigned_abs(), q as u128);
        }
    }

    #[test]
    fn decompose_values() {
        let ctx = GadgetCtx::new(8, 1).unwrap();
        assert_eq!(ctx.g_decompose(0).unwrap().entries(), &[0, 0, 0]);
        assert_eq!(ctx.g_decompose(5).unwrap().entries(), &[1, 0, 1]);

        let ctx = GadgetCtx::new(10, 1).unwrap();
        let z = ctx.g_decompose(7).unwrap();
        let g = gadget_vector(10).unwrap();
        let ip: i64 = (0..4).map(|i| g.get(i) * z.get(i)).sum();
        assert_eq!(ip.rem_euclid(10), 7);
        assert!(z.inf_norm() <= 2, "z = {:?}", z.entries());
    }

    #[test]
    fn decompose_identity_exhaustive() {
        for &q in &TEST_QS {
            let ctx = GadgetCtx::new(q, 1).unwrap();
            let g = ctx.gadget().clone();
            let us: Vec<u64> = if q <= 1 << 12 {
                (0..q).collect()
            } else {
                let mut rng = ChaCha20Rng::seed_from_u64(30);
                (0..4096).map(|_| rng.gen_range(0..q)).collect()
            };
            for u in us {
                let z = ctx.g_decompose(u).unwrap();
                let ip: i128 = (0..z.len())
                    .map(|i| g.get(i) as i128 * z.get(i) as i128)
                    .sum();
                assert_eq!(ip.rem_euclid(q as i128) as u64, u, "q={q} u={u}");
            }
        }
    }

    #[test]
    fn sample_pre_coset_identity() {
        let mut rng = ChaCha20Rng::seed_from_u64(31);
        for &q in &[10u64, 1 << 10, 12289] {
            let ctx = GadgetCtx::new(q, 1).unwrap();
            let g = ctx.gadget().clone();
            let s = crate::params::gadget_sampling_width(4);
            for _ in 0..3000 {
                let u = rng.gen_range(0..q);
                let z = ctx.g_sample_pre(u, s, &mut rng).unwrap();
                let ip: i128 = (0..z.len())
                    .map(|i| g.get(i) as i128 * z.get(i) as i128)
                    .sum();
                assert_eq!(ip.rem_euclid(q as i128) as u64, u);
            }
        }
    }

    #[test]
    fn sample_pre_centered_mean() {
        let mut rng = ChaCha20Rng::seed_from_u64(32);
        let ctx = GadgetCtx::new(16, 1).unwrap();
        let s = 8.0;
        let n = 10_000;
        let mut sums = vec![0.0f64; ctx.k()];
        for _ in 0..n {
            let z = ctx.g_sample_pre(0, s, &mut rng).unwrap();
            for i in 0..ctx.k() {
                sums[i] += z.get(i) as f64;
            }
        }
        for (i, sum) in sums.iter().enumerate() {
            let mean = sum / n as f64;
            assert!(mean.abs() <= 3.0 * s / (n as f64).sqrt(), "coord {i}: mean = {mean}");
        }
    }

    #[test]
    fn sample_pre_has_entropy() {
        let mut rng = ChaCha20Rng::seed_from_u64(33);
        let ctx = GadgetCtx::new(1 << 10, 1).unwrap();
        let mut seen = std::collections::HashSet::new();
        for _ in 0..100 {
            seen.insert(ctx.g_sample_pre(5, 8.0, &mut rng).unwrap().entries().to_vec());
        }
        assert!(seen.len() >= 2);
    }

    #[test]
    fn invert_noiseless_exhaustive() {
        let q = 64u64;
        let ctx = GadgetCtx::new(q, 1).unwrap();
        let g = ctx.gadget().clone();
        for x in 0..q {
            let b = ZqVector::from_entries(
                q,
                &(0..ctx.k())
                    .map(|i| (x * g.get(i) as u64) % q)
                    .collect::<Vec<_>>(),
            )
            .unwrap();
            let (xr, er) = ctx.g_invert_block(&b).unwrap();
            assert_eq!(xr, x);
            assert_eq!(er.norm(), 0.0);
        }
    }

    #[test]
    fn invert_noisy_roundtrip() {
        let mut rng = ChaCha20Rng::seed_from_u64(34);
        let q = 1u64 << 10;
        let ctx = GadgetCtx::new(q, 1).unwrap();
        let g = ctx.gadget().clone();
        let x = 417u64;
        let mut ok = 0;
        let trials = 1000;
        for _ in 0..trials {
            let e = crate::gaussian::sample_vec(ctx.k(), 4.0, &mut rng).unwrap();
            let b = ZqVector::from_entries(
                q,
                &(0..ctx.k())
                    .map(|i| {
                        crate::zq::reduce_signed(x as i64 * g.get(i) + e.get(i), q)
                    })
                    .collect::<Vec<_>>(),
            )
            .unwrap();
            if let Ok((xr, er)) = ctx.g_invert_block(&b) {
                if xr == x && er == e {
                    ok += 1;
                }
            }
        }
        assert!(ok >= 999, "ok = {ok}/{trials}");
    }

    #[test]
    fn invert_random_roundtrip_within_radius() {
        let mut rng = ChaCha20Rng::seed_from_u64(35);
        let q = 12289u64;
        let ctx = GadgetCtx::new(q, 1).unwrap();
        let g = ctx.gadget().clone();
        for _ in 0..10_000 {
            let x = rng.gen_range(0..q);
            let e = crate::gaussian::sample_vec(ctx.k(), 6.0, &mut rng).unwrap();
            if e.norm() >= ctx.decoding_radius() {
                continue;
            }
            let b = ZqVector::from_entries(
                q,
                &(0..ctx.k())
                    .map(|i| crate::zq::reduce_signed(x as i64 * g.get(i) + e.get(i), q))
                    .collect::<Vec<_>>(),
            )
            .unwrap();
            let (xr, er) = ctx.g_invert_block(&b).unwrap();
            assert_eq!((xr, er), (x, e));
        }
    }

    #[test]
    fn invert_beyond_radius_detected() {
        let q = 1u64 << 10;
        let ctx = GadgetCtx::new(q, 1).unwrap();
        let g = ctx.gadget().clone();
        let x = 123u64;
        let mut e = IntVector::zeros(ctx.k());
        e.set(0, (q / 2) as i64);
        let b = ZqVector::from_entries(
            q,
            &(0..ctx.k())
                .map(|i| crate::zq::reduce_signed(x as i64 * g.get(i) + e.get(i), q))
                .collect::<Vec<_>>(),
        )
        .unwrap();
        match ctx.g_invert_block(&b) {
            Err(Error::DecodingFailure) => {}
            Ok((xr, er)) => assert!(xr != x || er != e, "decoded beyond-radius error exactly"),
            Err(e) => panic!("unexpected error {e:?}"),
        }
    }

    #[test]
    fn gadget_matrix_shape() {
        let ctx = GadgetCtx::new(8, 3).unwrap();
        let gm = ctx.gadget_matrix().unwrap();
        assert_eq!((gm.rows(), gm.cols()), (3, 9));
        assert_eq!(gm.get(1, 3), 1);
        assert_eq!(gm.get(1, 4), 2);
        assert_eq!(gm.get(1, 5), 4);
        assert_eq!(gm.get(0, 3), 0);
    }

    #[test]
    fn decoding_radius_scale() {
        // GS norms of the decoding basis are at least q/sqrt(5).
        for &q in &TEST_QS {
            let ctx = GadgetCtx::new(q, 1).unwrap();
            assert!(
                ctx.decoding_radius() >= q as f64 / (2.0 * 5.0f64.sqrt()) - 1e-6,
                "q = {q}, radius = {}",
                ctx.decoding_radius()
            );
        }
    }
}
