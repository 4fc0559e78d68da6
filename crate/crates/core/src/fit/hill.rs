use crate::error::{Error, Result};

/// `⌊√n⌋`, the usual number of upper order statistics.
pub fn default_hill_k(n: usize) -> usize {
    ((n as f64).sqrt().floor() as usize).max(1)
}

/// Hill estimate `k / Σ_{i≤k} ln(X_(i) / X_(k+1))` of the upper tail index,
/// with `X_(1) ≥ … ≥ X_(n)`.
pub fn hill_estimator(samples: &[f64], k: usize) -> Result<f64> {
    let n = samples.len();
    if k == 0 || k >= n {
        return Err(Error::Domain(format!(
            "Hill estimator needs 1 <= k < n, got k={k}, n={n}"
        )));
    }
    if let Some(bad) = samples.iter().find(|&&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::Domain(format!(
            "samples must be positive and finite, found {bad}"
        )));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    let threshold = sorted[k].ln();
    let sum: f64 = sorted[..k].iter().map(|x| x.ln() - threshold).sum();
    if sum <= 0.0 {
        return Err(Error::DegenerateTail { k: k + 1 });
    }
    Ok(k as f64 / sum)
}

/// Hill estimator on a sample in which `values[i]` occurs with multiplicity
/// `weights[i]`; `k` counts weight.
///
/// Identical to [`hill_estimator`] on the expanded sample when the weights are
/// integers: ties at the threshold contribute zero log-ratios.
pub fn hill_estimator_weighted(values: &[f64], weights: &[f64], k: f64) -> Result<f64> {
    if values.len() != weights.len() {
        return Err(Error::Domain("values and weights differ in length".into()));
    }
    if let Some(bad) = values.iter().find(|&&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::Domain(format!(
            "samples must be positive and finite, found {bad}"
        )));
    }
    if weights.iter().any(|&w| !(w >= 0.0 && w.is_finite())) {
        return Err(Error::Domain(
            "weights must be finite and non-negative".into(),
        ));
    }
    let total: f64 = weights.iter().sum();
    if !(k >= 1.0 && k < total) {
        return Err(Error::Domain(format!(
            "Hill estimator needs 1 <= k < total weight {total}, got {k}"
        )));
    }
    let mut idx: Vec<usize> = (0..values.len()).filter(|&i| weights[i] > 0.0).collect();
    idx.sort_unstable_by(|&a, &b| values[b].total_cmp(&values[a]));

    // Walk down until the cumulative weight strictly exceeds k; that value is
    // X_(k+1). Everything above it contributes its full weight.
    let mut cum = 0.0;
    let mut threshold = None;
    let mut above = Vec::new();
    for &i in &idx {
        if cum + weights[i] > k {
            threshold = Some(values[i]);
            break;
        }
        cum += weights[i];
        above.push(i);
    }
    let threshold = threshold.expect("k < total weight").ln();
    let sum: f64 = above
        .iter()
        .map(|&i| weights[i] * (values[i].ln() - threshold))
        .sum();
    if sum <= 0.0 {
        return Err(Error::DegenerateTail { k: k as usize + 1 });
    }
    Ok(k / sum)
}

/// Hill estimate of the lower-tail power exponent: applies the estimator to
/// reciprocals, so that `P<(c) ∝ c^ν` near zero yields `ν`.
pub fn lower_tail_index(samples: &[f64], k: usize) -> Result<f64> {
    let inv: Vec<f64> = samples.iter().map(|x| 1.0 / x).collect();
    hill_estimator(&inv, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn hand_evaluable_order_statistics() {
        let xs = [1f64.exp().powi(3), 1f64.exp().powi(2), 1f64.exp(), 1.0];
        assert_relative_eq!(hill_estimator(&xs, 3).unwrap(), 0.5, max_relative = 1e-14);
    }

    #[test]
    fn equal_samples_are_degenerate() {
        let xs = [4.0; 10];
        assert!(matches!(
            hill_estimator(&xs, 3),
            Err(Error::DegenerateTail { .. })
        ));
    }

    #[test]
    fn k_out_of_range() {
        let xs = [1.0, 2.0, 3.0];
        assert!(hill_estimator(&xs, 0).is_err());
        assert!(hill_estimator(&xs, 3).is_err());
        assert!(hill_estimator(&[1.0, -2.0, 3.0], 1).is_err());
    }

    #[test]
    fn exact_pareto_samples() {
        // Inverse transform: X = U^(-1/μ).
        let mu = 1.5;
        let n = 100_000;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let xs: Vec<f64> = (0..n)
            .map(|_| {
                let u: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
                u.powf(-1.0 / mu)
            })
            .collect();
        let est = hill_estimator(&xs, default_hill_k(n)).unwrap();
        assert!((est / mu - 1.0).abs() < 0.10, "{est}");
    }

    #[test]
    fn weighted_matches_expanded() {
        let values = [10.0, 3.0, 7.0, 1.5, 7.5, 2.0];
        let weights = [2.0, 5.0, 1.0, 4.0, 3.0, 2.0];
        let expanded: Vec<f64> = values
            .iter()
            .zip(&weights)
            .flat_map(|(&v, &w)| std::iter::repeat_n(v, w as usize))
            .collect();
        for k in 1..expanded.len() {
            let a = hill_estimator_weighted(&values, &weights, k as f64);
            let b = hill_estimator(&expanded, k);
            match (a, b) {
                (Ok(a), Ok(b)) => assert_relative_eq!(a, b, max_relative = 1e-13),
                (Err(_), Err(_)) => {}
                (a, b) => panic!("k={k}: {a:?} vs {b:?}"),
            }
        }
    }

    #[test]
    fn lower_tail_of_uniform_is_one() {
        // P<(c) = c on (0,1) has lower exponent 1.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let xs: Vec<f64> = (0..40_000).map(|_| rng.random_range(1e-300..1.0)).collect();
        let est = lower_tail_index(&xs, 200).unwrap();
        assert!((est - 1.0).abs() < 0.15, "{est}");
    }
}
