use rand::Rng;

use mwrc::code::{ml_decode, Candidates, LinearCode, MessageVector};
use mwrc::field::Field;
use mwrc::prob::{stream_rng, NoisePmf};
use mwrc::sim::wilson_interval;

/// Point-to-point errors of exact ML over a binary symmetric channel, with a
/// fresh code, message and noise per trial.
fn ml_errors(k: usize, n: usize, rho: f64, trials: u64, seed: u64) -> u64 {
    let f = Field::binary();
    let noise = NoisePmf::crossover(rho).unwrap();
    (0..trials)
        .filter(|&t| {
            let mut rng = stream_rng(seed, &[k as u64, n as u64, t]);
            let code = LinearCode::sample_full_rank(&f, k, n, &mut rng).unwrap();
            let s: Vec<_> = (0..k).map(|_| f.element(rng.gen_range(0..2)).unwrap()).collect();
            let y = f.add_vec(&code.encode(&s).unwrap(), &noise.sample_vec(n, &mut rng));
            ml_decode(&code, &y, &noise, Candidates::All).unwrap() != MessageVector::new(s)
        })
        .count() as u64
}

#[test]
fn error_rate_falls_with_blocklength_below_capacity() {
    // Rate 1/4 against 1 − H(0.1) ≈ 0.531.
    let trials = 2000;
    let points: Vec<(usize, u64)> = [8, 16, 32, 64].iter().map(|&n| (n, ml_errors(n / 4, n, 0.1, trials, 1))).collect();
    let mut inversions = 0;
    for pair in points.windows(2) {
        let ((n0, e0), (n1, e1)) = (pair[0], pair[1]);
        if e1 > e0 {
            inversions += 1;
            let (lo1, _) = wilson_interval(e1, trials, 1.96);
            let (_, hi0) = wilson_interval(e0, trials, 1.96);
            assert!(lo1 <= hi0, "n = {n0} -> {n1}: {e0} -> {e1} errors, beyond Monte-Carlo noise");
        }
    }
    assert!(inversions <= 1, "{points:?}");
    assert!(points[3].1 < points[0].1, "{points:?}");
}

/// A k = 1, n = 7 code at rate 1/7, frozen from the first verified run. The
/// ensemble average over nonzero generators, with ties going to message 0,
/// is 0.03939, which must sit inside the interval.
#[test]
fn short_code_regression() {
    const FROZEN: u64 = 390;
    let errors = ml_errors(1, 7, 0.1, 10_000, 7);
    let (lo, hi) = wilson_interval(errors, 10_000, 1.96);
    assert!(lo < 0.03939 && 0.03939 < hi, "[{lo}, {hi}]");
    assert_eq!(errors, FROZEN, "p = {}", errors as f64 / 1e4);
}

#[test]
fn singleton_candidate_is_returned() {
    let f = Field::prime(3).unwrap();
    let mut rng = stream_rng(5, &[]);
    let code = LinearCode::sample(&f, 2, 4, &mut rng).unwrap();
    let only = MessageVector::new(vec![f.element(2).unwrap(), f.element(1).unwrap()]);
    let list = [only.clone()];
    let noise = NoisePmf::uniform(&f);
    for _ in 0..20 {
        let y: Vec<_> = (0..4).map(|_| f.element(rng.gen_range(0..3)).unwrap()).collect();
        assert_eq!(ml_decode(&code, &y, &noise, Candidates::Explicit(&list)).unwrap(), only);
    }
}
