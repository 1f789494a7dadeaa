//! Small statistical helpers for the empirical test suites.

/// Pearson chi-square statistic against a flat expectation.
pub fn chi2_uniform_stat(observed: &[u64]) -> f64 {
    let total: u64 = observed.iter().sum();
    let expected = total as f64 / observed.len() as f64;
    observed
        .iter()
        .map(|&o| {
            let d = o as f64 - expected;
            d * d / expected
        })
        .sum()
}

/// Approximate upper 0.99 quantile of the chi-square distribution with `df`
/// degrees of freedom (Wilson-Hilferty cube approximation).
pub fn chi2_critical_99(df: usize) -> f64 {
    let df = df as f64;
    let z = 2.326_347_874_040_841; // standard normal 0.99 quantile
    let t = 2.0 / (9.0 * df);
    df * (1.0 - t + z * t.sqrt()).powi(3)
}

/// Standard error of a binomial proportion estimate.
pub fn binomial_se(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi2_stat_flat_is_zero() {
        assert_eq!(chi2_uniform_stat(&[5, 5, 5, 5]), 0.0);
    }

    #[test]
    fn chi2_critical_reference_values() {
        // Reference quantiles: chi2_{0.99, 10} = 23.21, chi2_{0.99, 100} = 135.81.
        assert!((chi2_critical_99(10) - 23.21).abs() < 0.3);
        assert!((chi2_critical_99(100) - 135.81).abs() < 0.5);
    }

    #[test]
    fn binomial_se_value() {
        let se = binomial_se(0.5, 100);
        assert!((se - 0.05).abs() < 1e-12);
    }
}
