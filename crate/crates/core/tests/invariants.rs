use hsd_core::entropy::{
    entropy_series, hsd_estimate, iid_closed_form, markov_closed_form, EstimatePolicy,
};
use hsd_core::measures::{convex_mix, iid, markov};
use hsd_core::properties::gen::{self, Rng64};
use hsd_core::{Partition, StateSpace};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

fn space(k: usize) -> StateSpace {
    StateSpace::indexed(k).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn per_symbol_entropy_is_bounded(seed in any::<u64>(), k in 1usize..=4) {
        let mut rng = Rng64::seed_from_u64(seed);
        let inst = gen::oracle(&mut rng, k).unwrap();
        let p = gen::partition(&mut rng, k, k);
        let series = entropy_series(inst.oracle.as_ref(), &p, 5).unwrap();
        let cap = (p.len() as f64).ln();
        for a in &series.values {
            prop_assert!(*a >= -1e-15 && *a <= cap + 1e-12, "{} {a} > {cap}", inst.label);
        }
    }

    #[test]
    fn markov_increments_equal_closed_form(seed in any::<u64>(), k in 1usize..=3) {
        let mut rng = Rng64::seed_from_u64(seed);
        let spec = gen::stationary_markov(&mut rng, k).unwrap();
        let h = markov_closed_form(&spec).unwrap();
        let mu = markov(space(k), spec).unwrap();
        let series = entropy_series(mu.as_ref(), &Partition::singletons(k), 8).unwrap();
        for d in &series.increments()[1..] {
            prop_assert!((d - h).abs() <= 1e-10, "{d} vs {h}");
        }
        prop_assert!(series.monotone_nonincreasing);
    }

    #[test]
    fn iid_rate_is_constant(seed in any::<u64>(), k in 1usize..=4) {
        let mut rng = Rng64::seed_from_u64(seed);
        let nu = gen::distribution(&mut rng, k);
        let p = gen::partition(&mut rng, k, k);
        let h = iid_closed_form(&nu, &p).unwrap();
        let mu = iid(space(k), nu).unwrap();
        let series = entropy_series(mu.as_ref(), &p, 6).unwrap();
        for a in &series.values {
            prop_assert!((a - h).abs() <= 1e-12);
        }
    }
}

/// Entropy is affine on stationary measures only in the limit. At block length `n`
/// the mixture's entropy is `t E_n(μ) + (1-t) E_n(ρ) + I_n`, where `I_n` is the
/// information a word carries about which component produced it: nondecreasing in
/// `n` and at most `H(t)`. So the `N`-th increment overshoots the weighted entropy
/// by `I_N - I_{N-1} ≥ 0` and the overshoots sum to at most `H(t)`. For close
/// components `I_n` grows slowly, and at `N = 12` the overshoot reaches about 2e-2.
#[test]
fn stationary_mixtures_are_affine_in_the_limit() {
    let mut rng = Rng64::seed_from_u64(21);
    let horizon = 18;
    let worst_at = |n: usize, gaps: &[Vec<f64>]| gaps.iter().map(|g| g[n - 1]).fold(0.0, f64::max);
    let mut gaps = Vec::new();
    for _ in 0..50 {
        let a = gen::stationary_markov(&mut rng, 2).unwrap();
        let b = gen::stationary_markov(&mut rng, 2).unwrap();
        let t: f64 = rng.random();
        let target = t * markov_closed_form(&a).unwrap() + (1.0 - t) * markov_closed_form(&b).unwrap();
        let mix = convex_mix(t, markov(space(2), a).unwrap(), markov(space(2), b).unwrap()).unwrap();
        let series = entropy_series(mix.as_ref(), &Partition::singletons(2), horizon).unwrap();
        let upper = hsd_estimate(&series, EstimatePolicy::Auto).unwrap();
        assert!(upper.is_upper_bound && upper.value >= target - 1e-12);

        let excess: Vec<f64> = series.increments().iter().map(|d| d - target).collect();
        let label_entropy = -(t * t.ln() + (1.0 - t) * (1.0 - t).ln());
        assert!(excess[1..].iter().all(|&g| g >= -1e-12), "{excess:?}");
        assert!(excess[1..].iter().sum::<f64>() <= label_entropy + 1e-12);
        gaps.push(excess);
    }
    let worst: Vec<f64> = [12, 14, 16, 18].iter().map(|&n| worst_at(n, &gaps)).collect();
    println!("worst increment gap at N = 12, 14, 16, 18: {worst:?}");
    assert!(worst.windows(2).all(|w| w[1] <= w[0]));
    assert!(worst[0] < 0.05);
}

#[test]
fn mixing_a_chain_with_itself_is_exactly_affine() {
    let mut rng = Rng64::seed_from_u64(22);
    let spec = gen::stationary_markov(&mut rng, 3).unwrap();
    let h = markov_closed_form(&spec).unwrap();
    let mu = markov(space(3), spec).unwrap();
    let mix = convex_mix(0.3, mu.clone(), mu).unwrap();
    let series = entropy_series(mix.as_ref(), &Partition::singletons(3), 8).unwrap();
    assert!((series.increments()[7] - h).abs() <= 1e-10);
}
