use hsd_core::entropy::{block_entropy, entropy_series};
use hsd_core::measures::{
    check_consistency, dilation_pushforward, restriction_pushforward, shift_pushforward,
    IndexSequence,
};
use hsd_core::properties::gen::{self, constructor_zoo, Rng64};
use hsd_core::space::{full_set, state_set, StateSet};
use hsd_core::Partition;
use rand::{Rng, SeedableRng};

fn all_words(cells: &[StateSet], len: usize) -> Vec<Vec<StateSet>> {
    let mut words = vec![Vec::new()];
    for _ in 0..len {
        words = words
            .into_iter()
            .flat_map(|w| {
                cells.iter().map(move |c| {
                    let mut next = w.clone();
                    next.push(c.clone());
                    next
                })
            })
            .collect();
    }
    words
}

/// Singletons, the full set and one two-state set: enough to expose a broken law.
fn probe_cells(k: usize) -> Vec<StateSet> {
    let mut cells: Vec<StateSet> = (0..k).map(|s| state_set(k, [s])).collect();
    cells.push(full_set(k));
    if k > 2 {
        cells.push(state_set(k, [0, k - 1]));
    }
    cells
}

#[test]
fn every_constructor_satisfies_the_measure_laws() {
    let mut rng = Rng64::seed_from_u64(9);
    let mut worst = 0.0f64;
    for case in 0..100 {
        let k = rng.random_range(1..=4);
        for inst in constructor_zoo(&mut rng, k).unwrap() {
            let size = inst.oracle.space().size();
            let p = gen::partition(&mut rng, size, 3);
            let report = check_consistency(inst.oracle.as_ref(), &p, 6).unwrap();
            assert!(
                report.passes(1e-10),
                "case {case} {}: {:?}",
                inst.label,
                report
            );
            worst = worst.max(report.max_violation);
        }
    }
    assert!(worst <= 1e-10);
}

#[test]
fn stationary_constructors_are_shift_invariant() {
    let mut rng = Rng64::seed_from_u64(10);
    for _ in 0..30 {
        let k = rng.random_range(1..=3);
        let inst = gen::stationary_oracle(&mut rng, k).unwrap();
        assert!(inst.oracle.is_stationary(), "{}", inst.label);
        let sh = shift_pushforward(inst.oracle.clone());
        let cells = probe_cells(k);
        for len in 1..=6 {
            for w in all_words(&cells, len) {
                let a = inst.oracle.mass(&w).unwrap();
                let b = sh.mass(&w).unwrap();
                assert!((a - b).abs() <= 1e-12, "{}: {a} vs {b}", inst.label);
            }
        }
    }
}

#[test]
fn restriction_undoes_dilation() {
    let mut rng = Rng64::seed_from_u64(11);
    for _ in 0..30 {
        let k = rng.random_range(1..=3);
        let inst = gen::oracle(&mut rng, k).unwrap();
        let d = rng.random_range(1..=3);
        let dil = dilation_pushforward(inst.oracle.clone(), d).unwrap();
        let back = restriction_pushforward(dil, IndexSequence::arithmetic(0, d).unwrap());
        let cells = probe_cells(k);
        for len in 1..=4 {
            for w in all_words(&cells, len) {
                let a = inst.oracle.mass(&w).unwrap();
                let b = back.mass(&w).unwrap();
                assert!((a - b).abs() <= 1e-12, "{}: {a} vs {b}", inst.label);
            }
        }
    }
}

#[test]
fn stationary_series_are_nonincreasing() {
    let mut rng = Rng64::seed_from_u64(12);
    for _ in 0..20 {
        let k = rng.random_range(2..=3);
        let inst = gen::stationary_oracle(&mut rng, k).unwrap();
        let p = Partition::singletons(k);
        let series = entropy_series(inst.oracle.as_ref(), &p, 8).unwrap();
        assert!(series.monotone_nonincreasing, "{}: {:?}", inst.label, series.values);
    }
}

#[test]
fn trivial_partition_has_zero_entropy() {
    let mut rng = Rng64::seed_from_u64(13);
    for _ in 0..20 {
        let k = rng.random_range(1..=4);
        let inst = gen::oracle(&mut rng, k).unwrap();
        for n in 1..=5 {
            let e = block_entropy(inst.oracle.as_ref(), &Partition::trivial(k), n).unwrap();
            assert!(e.abs() <= 1e-15);
        }
    }
}
