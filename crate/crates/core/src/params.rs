//! Parameter profiles and the constraint checker.
//!
//! This module is the single source of numeric policy: the smoothing-parameter
//! floor (with its fixed ε), the concretization of the ω(√log n) slack, and
//! the widths used inside preimage sampling all live here.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// ε in the smoothing floor √(ln(2(1+1/ε))/π).
pub const SMOOTHING_EPS: f64 = 1.0 / ((1u64 << 30) as f64);

/// Smoothing-parameter floor for Z: √(ln(2(1+1/ε))/π).
pub fn smoothing_floor() -> f64 {
    ((2.0 * (1.0 + 1.0 / SMOOTHING_EPS)).ln() / std::f64::consts::PI).sqrt()
}

/// Concretization ω(√log x) := √(2 ln x).
pub fn omega_log(x: usize) -> f64 {
    (2.0 * (x as f64).ln()).sqrt()
}

/// Concretization ω(√(x log x)) := √(2 x ln x).
pub fn omega_xlog(x: usize) -> f64 {
    (2.0 * x as f64 * (x as f64).ln()).sqrt()
}

/// Width floor used by samplers: the larger of the smoothing floor and ω(√log n).
pub fn width_floor(n: usize) -> f64 {
    smoothing_floor().max(omega_log(n))
}

/// Width of the gadget-coset Gaussian inside preimage sampling
/// (Gram-Schmidt norm bound √5 of the gadget basis times the width floor).
pub fn gadget_sampling_width(n: usize) -> f64 {
    5.0f64.sqrt() * width_floor(n)
}

/// Randomized-rounding width used by the nonspherical sampler.
pub fn rounding_base() -> f64 {
    4.0 * smoothing_floor()
}

/// Complete parameter set for the scheme.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSet {
    /// Main security dimension.
    pub n: usize,
    /// Modulus (prime for scheme profiles; the FRD encoding needs a field).
    pub q: u64,
    /// ⌈log2 q⌉.
    pub k: usize,
    /// Width of the uniform key block; the full key width is m = m̄ + nk.
    pub m_bar: usize,
    /// m̄ + nk.
    pub m: usize,
    /// Message length in bits.
    pub ell: usize,
    /// LWE noise rate; the noise width is αq.
    pub alpha: f64,
    /// Trapdoor sampling width.
    pub sigma1: f64,
    /// Preimage sampling width.
    pub sigma2: f64,
    /// Number of receivers the system is sized for.
    pub big_n: usize,
    /// Number of senders the system is sized for.
    pub big_m: usize,
    /// Query budget for abort-resistant-hash contexts.
    pub big_q: usize,
}

/// ⌈log2 q⌉ for q ≥ 2.
pub fn ceil_log2(q: u64) -> usize {
    64 - (q - 1).leading_zeros() as usize
}

impl ParamSet {
    /// Structural validation: k and m must match their defining equations.
    pub fn validate(&self) -> Result<()> {
        if self.q < 2 || self.q > crate::zq::MAX_MODULUS {
            return Err(Error::InvalidParams("q outside [2, 2^62]".into()));
        }
        if self.k != ceil_log2(self.q) {
            return Err(Error::InvalidParams(format!(
                "k = {} but ceil(log2 q) = {}",
                self.k,
                ceil_log2(self.q)
            )));
        }
        if self.m != self.m_bar + self.n * self.k {
            return Err(Error::InvalidParams(format!(
                "m = {} but m_bar + n*k = {}",
                self.m,
                self.m_bar + self.n * self.k
            )));
        }
        if self.n == 0 || self.ell == 0 || self.big_n == 0 || self.big_m == 0 {
            return Err(Error::InvalidParams("n, ell, N, M must be positive".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidParams("alpha must be in (0, 1)".into()));
        }
        if self.sigma1 <= 0.0 || self.sigma2 <= 0.0 {
            return Err(Error::InvalidParams("widths must be positive".into()));
        }
        Ok(())
    }

    /// High-probability bound on the top singular value of the trapdoor:
    /// σ1·(1/√2π)·(√m̄ + √(nk)).
    pub fn s1_bound(&self) -> f64 {
        self.sigma1 / (2.0 * std::f64::consts::PI).sqrt()
            * ((self.m_bar as f64).sqrt() + ((self.n * self.k) as f64).sqrt())
    }

    /// SIS norm bound β := 2σ1σ2√(n+1)·(1/√2π)·(√m̄+√nk)·√(m+nk).
    pub fn beta(&self) -> f64 {
        2.0 * self.sigma1
            * self.sigma2
            * ((self.n + 1) as f64).sqrt()
            / (2.0 * std::f64::consts::PI).sqrt()
            * ((self.m_bar as f64).sqrt() + ((self.n * self.k) as f64).sqrt())
            * ((self.m + self.n * self.k) as f64).sqrt()
    }

    /// Digest binding files to this parameter set.
    pub fn digest(&self) -> [u8; 32] {
        let mut h = Sha256::new();
        for v in [
            self.n as u64,
            self.q,
            self.k as u64,
            self.m_bar as u64,
            self.m as u64,
            self.ell as u64,
            self.big_n as u64,
            self.big_m as u64,
            self.big_q as u64,
        ] {
            h.update(v.to_le_bytes());
        }
        for v in [self.alpha, self.sigma1, self.sigma2] {
            h.update(v.to_bits().to_le_bytes());
        }
        h.finalize().into()
    }
}

/// Smallest profile on which every functional constraint holds and the full
/// signcrypt/unsigncrypt cycle is fast. No security whatsoever.
pub fn toy_profile() -> ParamSet {
    ParamSet {
        n: 4,
        q: 1033,
        k: 11,
        m_bar: 48,
        m: 48 + 4 * 11,
        ell: 16,
        alpha: 1.0 / 200.0,
        sigma1: 2.7,
        sigma2: 110.0,
        big_n: 2,
        big_m: 2,
        big_q: 10,
    }
}

/// Larger profile on which every listed inequality holds numerically.
/// Still far below any claimed security level; for checker demonstration only.
pub fn demo_profile() -> ParamSet {
    ParamSet {
        n: 16,
        q: 67_108_859,
        k: 26,
        m_bar: 416,
        m: 416 + 16 * 26,
        ell: 32,
        alpha: 1.0 / 520.0,
        sigma1: 2.7,
        sigma2: 320.0,
        big_n: 4,
        big_m: 4,
        big_q: 100,
    }
}

/// Constraint category: functional constraints must hold for the scheme to
/// run; hardness constraints are reported only (profiles are insecure toys).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Category {
    Functional,
    Hardness,
}

/// One evaluated inequality.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstraintCheck {
    pub name: String,
    pub category: Category,
    /// Left-hand side of `lhs >= rhs`.
    pub lhs: f64,
    pub rhs: f64,
    pub passed: bool,
    /// lhs / rhs; > 1 means slack.
    pub margin: f64,
}

/// Full checker report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstraintReport {
    pub params: ParamSet,
    pub smoothing_eps_log2: i32,
    pub omega_concretization: String,
    pub s1_bound: f64,
    pub beta: f64,
    pub checks: Vec<ConstraintCheck>,
}

impl ConstraintReport {
    pub fn functional_ok(&self) -> bool {
        self.checks
            .iter()
            .filter(|c| c.category == Category::Functional)
            .all(|c| c.passed)
    }

    pub fn all_ok(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Names of failing checks.
    pub fn failing(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.as_str())
            .collect()
    }

    /// Human-readable rendering.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "parameter set: n={} q={} k={} m_bar={} m={} ell={} alpha={:.6} sigma1={} sigma2={}\n",
            self.params.n,
            self.params.q,
            self.params.k,
            self.params.m_bar,
            self.params.m,
            self.params.ell,
            self.params.alpha,
            self.params.sigma1,
            self.params.sigma2,
        ));
        out.push_str(&format!(
            "policy: eps = 2^{}, {}, s1 bound = {:.3}, beta = {:.3}\n",
            self.smoothing_eps_log2, self.omega_concretization, self.s1_bound, self.beta
        ));
        for c in &self.checks {
            let cat = match c.category {
                Category::Functional => "functional",
                Category::Hardness => "hardness (insecure-toy, report only)",
            };
            out.push_str(&format!(
                "[{}] {} : {:.4} >= {:.4} (margin {:.3}) [{}]\n",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.lhs,
                c.rhs,
                c.margin,
                cat
            ));
        }
        out
    }
}

fn check(name: &str, category: Category, lhs: f64, rhs: f64) -> ConstraintCheck {
    ConstraintCheck {
        name: name.to_string(),
        category,
        lhs,
        rhs,
        passed: lhs >= rhs,
        margin: if rhs != 0.0 { lhs / rhs } else { f64::INFINITY },
    }
}

/// Evaluate every parameter inequality and report pass/fail with margins.
pub fn check_constraints(ps: &ParamSet) -> ConstraintReport {
    let n = ps.n;
    let nk = ps.n * ps.k;
    let omega = omega_log(n);
    let floor = smoothing_floor();
    let s1 = ps.s1_bound();
    let s1sq1 = s1 * s1 + 1.0;
    let beta = ps.beta();
    let sz = gadget_sampling_width(n);
    let base = rounding_base();

    let mut checks = Vec::new();
    checks.push(check(
        "structural: k = ceil(log2 q)",
        Category::Functional,
        if ps.k == ceil_log2(ps.q) { 1.0 } else { 0.0 },
        1.0,
    ));
    checks.push(check(
        "structural: m = m_bar + n*k",
        Category::Functional,
        if ps.m == ps.m_bar + nk { 1.0 } else { 0.0 },
        1.0,
    ));
    checks.push(check(
        "key block width (m_bar >= n*k)",
        Category::Functional,
        ps.m_bar as f64,
        nk as f64,
    ));
    checks.push(check(
        "KeyGen width (sigma1 >= max(smoothing floor, omega(sqrt(log n))))",
        Category::Functional,
        ps.sigma1,
        floor.max(omega),
    ));
    checks.push(check(
        "Invert radius (1/alpha >= 2*sqrt(5*(s1^2+1))*omega)",
        Category::Functional,
        1.0 / ps.alpha,
        2.0 * (5.0 * s1sq1).sqrt() * omega,
    ));
    checks.push(check(
        "SampleD width (sigma2 >= sqrt(7*(s1^2+1))*omega)",
        Category::Functional,
        ps.sigma2,
        (7.0 * s1sq1).sqrt() * omega,
    ));
    checks.push(check(
        "perturbation covariance positive definite (sigma2^2 > sz^2*(s1^2+1) + base^2)",
        Category::Functional,
        ps.sigma2 * ps.sigma2,
        sz * sz * s1sq1 + base * base,
    ));
    checks.push(check(
        "LWE hardness",
        Category::Hardness,
        ps.alpha * ps.q as f64,
        2.0 * (n as f64).sqrt(),
    ));
    checks.push(check(
        "SIS solution exists (beta >= sqrt(2m_bar+2nk+1)*q^(n/(2m_bar+2nk+1)))",
        Category::Hardness,
        beta,
        {
            let d = (2 * ps.m_bar + 2 * nk + 1) as f64;
            d.sqrt() * (ps.q as f64).powf(n as f64 / d)
        },
    ));
    checks.push(check(
        "SIS hardness (q >= beta*omega(sqrt(n log n)))",
        Category::Hardness,
        ps.q as f64,
        beta * omega_xlog(n),
    ));

    ConstraintReport {
        params: ps.clone(),
        smoothing_eps_log2: -30,
        omega_concretization: "omega(sqrt(log x)) := sqrt(2 ln x)".to_string(),
        s1_bound: s1,
        beta,
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profiles_validate() {
        toy_profile().validate().unwrap();
        demo_profile().validate().unwrap();
    }

    #[test]
    fn toy_passes_functional() {
        let report = check_constraints(&toy_profile());
        assert!(report.functional_ok(), "failing: {:?}", report.failing());
    }

    #[test]
    fn demo_passes_everything() {
        let report = check_constraints(&demo_profile());
        assert!(report.all_ok(), "failing: {:?}", report.failing());
    }

    #[test]
    fn small_alpha_q_flags_lwe_hardness() {
        let mut ps = demo_profile();
        ps.alpha = 1.0 / (ps.q as f64); // alpha*q = 1 < 2*sqrt(n)
        let report = check_constraints(&ps);
        let failing = report.failing();
        assert!(failing.contains(&"LWE hardness"));
    }

    #[test]
    fn sigma2_monotone() {
        let mut ps = demo_profile();
        ps.sigma2 *= 2.0;
        let report = check_constraints(&ps);
        assert!(report
            .checks
            .iter()
            .find(|c| c.name.starts_with("SampleD width"))
            .unwrap()
            .passed);
        assert!(report
            .checks
            .iter()
            .find(|c| c.name.starts_with("perturbation covariance"))
            .unwrap()
            .passed);
    }

    #[test]
    fn checker_deterministic() {
        let a = check_constraints(&toy_profile());
        let b = check_constraints(&toy_profile());
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn digest_distinguishes_profiles() {
        assert_ne!(toy_profile().digest(), demo_profile().digest());
        assert_eq!(toy_profile().digest(), toy_profile().digest());
    }

    #[test]
    fn validate_rejects_bad_k() {
        let mut ps = toy_profile();
        ps.k += 1;
        assert!(ps.validate().is_err());
    }

    #[test]
    fn policy_values_sane() {
        // floor = sqrt(ln(2*(1+2^30))/pi) ~ 2.615
        let f = smoothing_floor();
        assert!((f - 2.615).abs() < 0.01, "floor = {f}");
        assert!((omega_log(4) - (2.0 * 4.0f64.ln()).sqrt()).abs() < 1e-12);
        assert!(rounding_base() > 4.0 * 2.6);
    }
}
