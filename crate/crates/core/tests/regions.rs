use rand::Rng;

use mwrc::field::Field;
use mwrc::prob::{stream_rng, NoisePmf};
use mwrc::regions::{
    binary_capacity_region, capacity_region, cdf_region, cut_set_bound, fdf_separate_region, lemma_cdf_optimal,
    lemma_fdf_separate_optimal, separate_branch, Branch, Membership, RateRegion,
};
use mwrc::sim::MwrcConfig;

fn grid(n: usize, upper: f64) -> impl Iterator<Item = [f64; 2]> {
    (0..n)
        .flat_map(move |i| (0..n).map(move |j| [upper * i as f64 / (n - 1) as f64, upper * j as f64 / (n - 1) as f64]))
}

/// Largest constraint violation of either region's vertices against the other.
fn closure_distance(a: &RateRegion, b: &RateRegion) -> f64 {
    let worst = |x: &RateRegion, y: &RateRegion| x.vertices().iter().map(|v| -y.slack(v)).fold(0.0, f64::max);
    worst(a, b).max(worst(b, a))
}

fn random_triple(rng: &mut impl Rng) -> (f64, f64, f64) {
    (rng.gen_range(0.0..0.5), rng.gen_range(0.0..0.5), rng.gen_range(0.0..0.5))
}

// CDF ⊆ FDF-separate is not asserted: with one very noisy user, splitting
// costs more than complete decoding (e.g. ρ = (0.173, 0.452, 0.175)).
#[test]
fn nesting_on_random_channels() {
    let mut rng = stream_rng(8, &[]);
    for _ in 0..20 {
        let (r0, r1, r2) = random_triple(&mut rng);
        let cap = binary_capacity_region(r0, r1, r2).unwrap();
        let fdf = fdf_separate_region(r0, r1, r2, 513).unwrap();
        let cdf = cdf_region(r0, r1, r2).unwrap();
        for p in grid(200, 1.0) {
            assert!(!cdf.contains(&p) || cap.contains(&p), "cdf ⊄ capacity at {p:?} for {:?}", (r0, r1, r2));
            assert!(!fdf.contains(&p) || cap.contains(&p), "fdf ⊄ capacity at {p:?} for {:?}", (r0, r1, r2));
        }
    }
}

#[test]
fn optimality_predicates_agree_with_the_regions() {
    let mut rng = stream_rng(9, &[]);
    let (mut fdf_cases, mut cdf_cases) = (0, 0);
    for i in 0..400 {
        let (r0, r1, mut r2) = random_triple(&mut rng);
        if i % 4 == 0 {
            r2 = r1;
        }
        let cap = binary_capacity_region(r0, r1, r2).unwrap();
        if lemma_fdf_separate_optimal(r0, r1, r2) {
            let fdf = fdf_separate_region(r0, r1, r2, 257).unwrap();
            let d = closure_distance(&fdf, &cap);
            assert!(d <= 1e-6, "{:?}: distance {d}", (r0, r1, r2));
            fdf_cases += 1;
        }
        if lemma_cdf_optimal(r0, r1, r2) {
            let d = closure_distance(&cdf_region(r0, r1, r2).unwrap(), &cap);
            assert!(d <= 1e-6, "{:?}: distance {d}", (r0, r1, r2));
            cdf_cases += 1;
        }
    }
    assert!(fdf_cases > 50 && cdf_cases > 5, "{fdf_cases} / {cdf_cases}");
}

#[test]
fn separate_decoding_matches_capacity_under_a_noisy_relay() {
    for (r0, r1, r2) in [(0.3, 0.1, 0.2), (0.25, 0.05, 0.25), (0.45, 0.4, 0.01)] {
        let cap = binary_capacity_region(r0, r1, r2).unwrap();
        let fdf = fdf_separate_region(r0, r1, r2, 257).unwrap();
        for p in grid(100, 1.0) {
            assert_eq!(fdf.contains(&p), cap.contains(&p), "{p:?} for {:?}", (r0, r1, r2));
        }
    }
}

#[test]
fn complete_decoding_matches_capacity_when_the_relay_is_clean_enough() {
    let cap = binary_capacity_region(0.25, 0.4, 0.4).unwrap();
    let cdf = cdf_region(0.25, 0.4, 0.4).unwrap();
    for p in grid(100, 0.2) {
        assert_eq!(cdf.contains(&p), cap.contains(&p), "{p:?}");
    }
}

#[test]
fn second_branch_lies_in_the_first_when_user_one_is_cleaner() {
    for i in 0..50 {
        for j in i..50 {
            let (r1, r2) = (0.5 * i as f64 / 49.0, 0.5 * j as f64 / 49.0);
            let first = separate_branch(0.1, r1, r2, Branch::First, 65).unwrap();
            let second = separate_branch(0.1, r1, r2, Branch::Second, 65).unwrap();
            for c in &second.corners {
                assert!(first.contains(*c), "({r1}, {r2}): {c:?}");
            }
        }
    }
}

fn random_binary_config(rng: &mut impl Rng, users: usize) -> Vec<f64> {
    (0..=users).map(|_| rng.gen_range(0.0..0.5)).collect()
}

#[test]
fn cut_set_equals_capacity() {
    let mut rng = stream_rng(10, &[]);
    for users in 2..=4 {
        let mut tuples = 0;
        for _ in 0..10 {
            let cfg = MwrcConfig::binary(&random_binary_config(&mut rng, users)).unwrap();
            let (cut, cap) = (cut_set_bound(&cfg), capacity_region(&cfg));
            for _ in 0..1000 {
                let r: Vec<f64> = (0..users).map(|_| rng.gen_range(0.0..0.6)).collect();
                assert_eq!(cut.contains(&r), cap.contains(&r), "{r:?}");
                tuples += 1;
            }
        }
        assert_eq!(tuples, 10_000);
    }
}

#[test]
fn noisier_nodes_never_enlarge_capacity() {
    let mut rng = stream_rng(12, &[]);
    let f = Field::prime(3).unwrap();
    for _ in 0..50 {
        let users = rng.gen_range(2..=4);
        let pmf = |rng: &mut rand_chacha::ChaCha8Rng| {
            let w: Vec<f64> = (0..3).map(|_| rng.gen_range(0.01..1.0)).collect();
            let s: f64 = w.iter().sum();
            NoisePmf::new(&f, w.iter().map(|x| x / s).collect()).unwrap()
        };
        let noise: Vec<NoisePmf> = (0..=users).map(|_| pmf(&mut rng)).collect();
        let mut noisier = noise.clone();
        let node = rng.gen_range(0..=users);
        let more = pmf(&mut rng);
        if more.entropy() >= noise[node].entropy() {
            noisier[node] = more;
        } else {
            noisier[node] = NoisePmf::uniform(&f);
        }
        let gains = vec![f.element(1).unwrap(); users];
        let a = capacity_region(&MwrcConfig::new(&f, gains.clone(), gains.clone(), noise).unwrap());
        let b = capacity_region(&MwrcConfig::new(&f, gains.clone(), gains, noisier).unwrap());
        for _ in 0..200 {
            let r: Vec<f64> = (0..users).map(|_| rng.gen_range(0.0..1.6)).collect();
            assert!(!b.contains(&r) || a.contains(&r), "{r:?}");
        }
    }
}
