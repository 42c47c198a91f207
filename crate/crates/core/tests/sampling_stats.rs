use rpys::sampling::{random_sample, SamplingMode};

/// Chi-square statistic of per-item inclusion counts, scaled for sampling
/// without replacement (variance n·p·(1−p)·N/(N−1) per item, summing to
/// df = N − 1 in expectation).
fn inclusion_chi2(items: usize, n: usize, seeds: u64) -> (f64, Vec<f64>) {
    let mut hits = vec![0u64; items];
    for seed in 0..seeds {
        for i in random_sample(0..items, n, seed) {
            hits[i] += 1;
        }
    }
    let p = n as f64 / items as f64;
    let expected = seeds as f64 * p;
    let var = expected * (1.0 - p) * items as f64 / (items - 1) as f64;
    let chi2 = hits.iter().map(|&h| (h as f64 - expected).powi(2) / var).sum();
    (chi2, hits.iter().map(|&h| h as f64 / seeds as f64).collect())
}

#[test]
fn reservoir_inclusion_is_uniform() {
    // 99.9th percentile of chi-square with 99 degrees of freedom.
    const CRITICAL: f64 = 148.23;
    let (chi2, freq) = inclusion_chi2(100, 25, 200_000);
    assert!(chi2 < CRITICAL, "chi2 = {chi2}");
    // 200,000 seeds put 4σ at about 0.0039.
    assert!(freq.iter().all(|f| (f - 0.25).abs() < 0.004), "{freq:?}");
}

#[test]
fn reservoir_keeps_stream_order_irrelevant() {
    // First and last positions are as likely as the middle.
    let (_, freq) = inclusion_chi2(8, 3, 100_000);
    for f in freq {
        assert!((f - 0.375).abs() < 0.01, "{f}");
    }
}

#[test]
fn mode_names_round_trip() {
    for m in [SamplingMode::None, SamplingMode::Random, SamplingMode::Systematic, SamplingMode::Cluster] {
        assert_eq!(m.to_string().to_lowercase().parse::<SamplingMode>().unwrap(), m);
    }
}
