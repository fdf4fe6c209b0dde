use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use unimeasure::{kt_log_prob_closed_form, KtState};

/// Sum of Q over every sequence in {0..m}^n, by exhaustive enumeration.
fn enumerate_total(m: u64, n: u32) -> f64 {
    let mut total = 0.0;
    for code in 0..m.pow(n) {
        let mut s = KtState::new(m).unwrap();
        let mut c = code;
        for _ in 0..n {
            s.observe(c % m).unwrap();
            c /= m;
        }
        total += s.log_prob().exp();
    }
    total
}

#[test]
fn kraft_equality_by_enumeration() {
    for m in [2, 3] {
        for n in 0..=6 {
            let total = enumerate_total(m, n);
            assert!((total - 1.0).abs() <= 1e-12, "m={m} n={n}: {total}");
        }
    }
}

#[test]
fn redundancy_against_true_source() {
    for (m, probs) in [(2u64, vec![0.2, 0.8]), (3, vec![0.5, 0.3, 0.2])] {
        for seed in 0..20u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut s = KtState::new(m).unwrap();
            let mut log_p = 0.0;
            for n in 1..=5000u64 {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                let mut sym = m - 1;
                for (i, p) in probs.iter().enumerate() {
                    acc += p;
                    if u < acc {
                        sym = i as u64;
                        break;
                    }
                }
                s.observe(sym).unwrap();
                log_p += probs[sym as usize].ln();
                if n >= 100 {
                    let regret = -s.log_prob() + log_p;
                    let bound = (m as f64 - 1.0) / 2.0 * (n as f64).ln() + 2.0;
                    assert!(regret <= bound, "m={m} seed={seed} n={n}: {regret} > {bound}");
                }
            }
        }
    }
}

proptest! {
    #[test]
    fn predictive_sums_to_one(m in 1u64..40, obs in prop::collection::vec(0u64..1000, 0..200)) {
        let mut s = KtState::new(m).unwrap();
        for o in obs {
            s.observe(o % m).unwrap();
        }
        let total: f64 = (0..m).map(|x| s.predictive(x).unwrap()).sum();
        prop_assert!((total - 1.0).abs() <= 1e-14);
        prop_assert!(s.log_prob() <= 0.0);
        prop_assert_eq!(s.counts().iter().map(|c| c.1).sum::<u64>(), s.total());
    }

    #[test]
    fn sequential_matches_closed_form(
        m in 1u64..64,
        n in 0usize..10_000,
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // Skewed symbol draws so some counts are large and some zero.
        let mut s = KtState::new(m).unwrap();
        for _ in 0..n {
            let a: u64 = rng.random_range(0..m);
            let b: u64 = rng.random_range(0..m);
            s.observe(a.min(b)).unwrap();
        }
        let counts: Vec<u64> = (0..m).map(|x| s.count(x)).collect();
        let closed = kt_log_prob_closed_form(counts, m);
        prop_assert!((s.log_prob() - closed).abs() <= 1e-10, "{} vs {}", s.log_prob(), closed);
        prop_assert!((s.closed_form_log_prob() - closed).abs() <= 1e-10);
        prop_assert_eq!(s.log_prob() == 0.0, s.total() == 0 || m == 1);
    }
}
