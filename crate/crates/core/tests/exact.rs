//! Identities checked exactly: masses are rationals and the compared cylinder
//! partitions must carry the same multiset of nonzero masses.

use hsd_core::entropy::{block_masses, mass_profile, markov_closed_form, transformation_block_masses};
use hsd_core::measures::{
    block_recode, dilation_pushforward, factor_pushforward, from_transformation, iid, markov,
    product_measure, product_sequence, shift_pushforward, MarkovSpec, Oracle, TransformationSpec,
};
use hsd_core::scalar::ratio;
use hsd_core::space::{preimage_partition, product_partition, state_set};
use hsd_core::{Distribution, Partition, StateSpace};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Q = BigRational;

fn space(k: usize) -> StateSpace {
    StateSpace::indexed(k).unwrap()
}

/// Random rational distribution with small integer weights, some of them zero.
fn dist(rng: &mut ChaCha8Rng, k: usize) -> Distribution<Q> {
    let mut w: Vec<i64> = (0..k).map(|_| rng.random_range(0..5)).collect();
    if w.iter().all(|&x| x == 0) {
        w[rng.random_range(0..k)] = 1;
    }
    let total: i64 = w.iter().sum();
    Distribution::new(w.into_iter().map(|x| ratio(x, total)).collect()).unwrap()
}

fn partition(rng: &mut ChaCha8Rng, k: usize) -> Partition {
    let cells = rng.random_range(1..=k.min(3));
    let mut assignment: Vec<usize> = (0..k).map(|_| rng.random_range(0..cells)).collect();
    for (c, slot) in assignment.iter_mut().take(cells).enumerate() {
        *slot = c;
    }
    Partition::from_assignment(&assignment).unwrap()
}

fn oracle(rng: &mut ChaCha8Rng, k: usize) -> Oracle<Q> {
    match rng.random_range(0..4) {
        0 => iid(space(k), dist(rng, k)).unwrap(),
        1 => {
            let prefix = vec![dist(rng, k), dist(rng, k)];
            product_sequence(space(k), prefix, vec![dist(rng, k)]).unwrap()
        }
        2 => {
            let rows = (0..k).map(|_| dist(rng, k).weights().to_vec()).collect();
            markov(space(k), MarkovSpec::new(rows, dist(rng, k), false).unwrap()).unwrap()
        }
        _ => {
            let t = (0..k).map(|_| rng.random_range(0..k)).collect();
            let spec = TransformationSpec::new(t, dist(rng, k), false).unwrap();
            from_transformation(space(k), spec).unwrap()
        }
    }
}

fn profile(mu: &Oracle<Q>, p: &Partition, n: usize) -> std::collections::BTreeMap<Q, usize> {
    mass_profile(&block_masses(mu.as_ref(), p, n).unwrap())
}

#[test]
fn transformation_blocks_match_joined_partition() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..50 {
        let k = rng.random_range(1..=5);
        let t: Vec<usize> = (0..k).map(|_| rng.random_range(0..k)).collect();
        let spec = TransformationSpec::new(t, dist(&mut rng, k), false).unwrap();
        let p = partition(&mut rng, k);
        let mu = from_transformation(space(k), spec.clone()).unwrap();
        for n in 1..=6 {
            let direct = mass_profile(&transformation_block_masses(&spec, &p, n).unwrap());
            assert_eq!(profile(&mu, &p, n), direct, "T={:?} n={n}", spec.map());
        }
    }
}

#[test]
fn dilation_blocks_match_shorter_blocks() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for _ in 0..30 {
        let k = rng.random_range(2..=3);
        let mu = oracle(&mut rng, k);
        let p = partition(&mut rng, k);
        for d in 1..=3 {
            let dil = dilation_pushforward(mu.clone(), d).unwrap();
            for n in 1..=8 {
                assert_eq!(profile(&dil, &p, n), profile(&mu, &p, n.div_ceil(d)));
            }
        }
    }
}

#[test]
fn factor_blocks_match_pulled_back_partition() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    for _ in 0..50 {
        let k = rng.random_range(2..=4);
        let ky = rng.random_range(1..=k);
        let f: Vec<usize> = (0..k).map(|_| rng.random_range(0..ky)).collect();
        let mu = oracle(&mut rng, k);
        let image = factor_pushforward(f.clone(), space(ky), mu.clone()).unwrap();
        let q = partition(&mut rng, ky);
        let pulled = preimage_partition(&f, &q).unwrap();
        for n in 1..=6 {
            assert_eq!(profile(&image, &q, n), profile(&mu, &pulled, n));
        }
    }
}

#[test]
fn block_recode_matches_longer_words() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    for _ in 0..50 {
        let k = rng.random_range(2..=3);
        let x = if k == 3 { 2 } else { rng.random_range(2..=3) };
        let mu = oracle(&mut rng, x);
        let rec = block_recode(mu.clone(), k).unwrap();
        let singles_k = Partition::singletons(rec.space().size());
        let singles = Partition::singletons(x);
        for n in (1..).take_while(|n| n * k <= 6) {
            assert_eq!(profile(&rec, &singles_k, n), profile(&mu, &singles, n * k));
        }
    }
}

#[test]
fn product_blocks_are_pairwise_products() {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    for _ in 0..50 {
        let (kx, ky) = (rng.random_range(2..=3), rng.random_range(2..=3));
        let mu = oracle(&mut rng, kx);
        let rho = oracle(&mut rng, ky);
        let prod = product_measure(mu.clone(), rho.clone()).unwrap();
        let p = partition(&mut rng, kx);
        let q = partition(&mut rng, ky);
        let pq = product_partition(&p, &q);
        for n in 1..=4 {
            let a = block_masses(mu.as_ref(), &p, n).unwrap();
            let b = block_masses(rho.as_ref(), &q, n).unwrap();
            let pairs: Vec<Q> = a
                .iter()
                .flat_map(|x| b.iter().map(move |y| x * y))
                .collect();
            assert_eq!(profile(&prod, &pq, n), mass_profile(&pairs));
        }
    }
}

#[test]
fn stationary_chain_is_exactly_shift_invariant() {
    // [[1-a, a], [b, 1-b]] has stationary vector (b, a)/(a+b).
    let (a, b) = (ratio(1, 10), ratio(1, 2));
    let rows = vec![
        vec![Q::one() - a.clone(), a.clone()],
        vec![b.clone(), Q::one() - b.clone()],
    ];
    let pi = vec![b.clone() / (a.clone() + b.clone()), a.clone() / (a.clone() + b.clone())];
    assert_eq!(pi, vec![ratio(5, 6), ratio(1, 6)]);
    let spec = MarkovSpec::new(rows, Distribution::new(pi).unwrap(), true).unwrap();
    let h = markov_closed_form(&spec).unwrap();
    assert!((h - 0.386_427).abs() < 1e-6);
    let mu = markov(space(2), spec).unwrap();
    let sh = shift_pushforward(mu.clone());
    let cells = [state_set(2, [0]), state_set(2, [1]), state_set(2, [0, 1])];
    let mut word = Vec::new();
    for x in 0..3usize.pow(5) {
        word.clear();
        let mut code = x;
        for _ in 0..5 {
            word.push(cells[code % 3].clone());
            code /= 3;
        }
        assert_eq!(mu.mass(&word).unwrap(), sh.mass(&word).unwrap());
    }
}

#[test]
fn masses_of_a_full_level_sum_to_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    for _ in 0..20 {
        let k = rng.random_range(2..=4);
        let mu = oracle(&mut rng, k);
        let p = partition(&mut rng, k);
        for n in 1..=5 {
            let total = block_masses(mu.as_ref(), &p, n)
                .unwrap()
                .into_iter()
                .fold(Q::zero(), |acc, m| acc + m);
            assert_eq!(total, Q::one());
        }
    }
}
