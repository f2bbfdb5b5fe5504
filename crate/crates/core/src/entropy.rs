//! Block entropies `E(μ, P̄ⁿ)`, their per-symbol series, and finite-horizon estimates
//! of `limsup E(μ, P̄ⁿ)/n`.
//!
//! Block entropies are computed by depth-first enumeration of cell words, pruning
//! every prefix of zero mass (all of its extensions have zero mass too). The number
//! of length-`n` words reached is capped; exceeding the cap is an error, never a
//! silent truncation.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measures::{cursor, Cursor, CylinderOracle, MarkovSpec, TransformationSpec, STATIONARY_TOL};
use crate::scalar::Scalar;
use crate::space::{
    dist_entropy, join, phi_nonneg, preimage_partition, Distribution, Partition, StateSet,
};

/// Default cap on length-`n` words reached by one enumeration.
pub const DEFAULT_BUDGET: u64 = 2_000_000;

/// Tolerance of the "nonincreasing" diagnostic on [`EntropySeries`].
pub const MONOTONE_TOL: f64 = 1e-12;

/// Enumeration settings shared by all block-entropy computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Enumerator {
    pub budget: u64,
    /// Split the enumeration over first-cell branches on the rayon pool. Branch
    /// results are combined in cell order, so the result does not depend on it.
    pub parallel: bool,
}

impl Default for Enumerator {
    fn default() -> Self {
        Enumerator {
            budget: DEFAULT_BUDGET,
            parallel: true,
        }
    }
}

impl Enumerator {
    pub fn with_budget(budget: u64) -> Self {
        Enumerator {
            budget,
            ..Self::default()
        }
    }

    /// Nonzero masses of all length-`n` cell words over `p`, in enumeration order.
    pub fn block_masses<S: Scalar>(
        &self,
        mu: &dyn CylinderOracle<S>,
        p: &Partition,
        n: usize,
    ) -> Result<Vec<S>> {
        let parts = self.per_branch(mu, p, n, Vec::new, |acc: &mut Vec<S>, m: &S| {
            acc.push(m.clone())
        })?;
        Ok(parts.into_iter().flatten().collect())
    }

    /// `E(μ, P̄ⁿ) = -Σ_w φ(μ(w))` over length-`n` cell words; `0` for `n = 0`.
    pub fn block_entropy(&self, mu: &dyn CylinderOracle, p: &Partition, n: usize) -> Result<f64> {
        let parts = self.per_branch(mu, p, n, CompensatedSum::default, |acc: &mut CompensatedSum, m: &f64| {
            acc.add(-phi_nonneg(*m))
        })?;
        let mut total = CompensatedSum::default();
        for part in parts {
            total.add(part.sum);
            total.add(part.carry);
        }
        Ok(total.value())
    }

    /// Block entropies for `n = 1..=horizon`. On an error (budget) the rows already
    /// completed are returned alongside it.
    pub fn series_until_error(
        &self,
        mu: &dyn CylinderOracle,
        p: &Partition,
        horizon: usize,
    ) -> (EntropySeries, Option<Error>) {
        let mut blocks = Vec::with_capacity(horizon);
        let mut failure = None;
        for n in 1..=horizon {
            match self.block_entropy(mu, p, n) {
                Ok(e) => blocks.push(e),
                Err(e) => {
                    failure = Some(e);
                    break;
                }
            }
        }
        (EntropySeries::from_blocks(blocks, mu.is_stationary()), failure)
    }

    pub fn entropy_series(
        &self,
        mu: &dyn CylinderOracle,
        p: &Partition,
        horizon: usize,
    ) -> Result<EntropySeries> {
        if horizon == 0 {
            return Err(Error::InvalidArgument("horizon must be at least 1".into()));
        }
        match self.series_until_error(mu, p, horizon) {
            (series, None) => Ok(series),
            (_, Some(e)) => Err(e),
        }
    }

    fn per_branch<S, R, I, V>(
        &self,
        mu: &dyn CylinderOracle<S>,
        p: &Partition,
        n: usize,
        init: I,
        visit: V,
    ) -> Result<Vec<R>>
    where
        S: Scalar,
        R: Send,
        I: Fn() -> R + Sync,
        V: Fn(&mut R, &S) + Sync,
    {
        if p.universe() != mu.space().size() {
            return Err(Error::SpaceMismatch {
                left: mu.space().size(),
                right: p.universe(),
            });
        }
        if n == 0 {
            let mut acc = init();
            visit(&mut acc, &S::one());
            return Ok(vec![acc]);
        }
        let leaves = AtomicU64::new(0);
        let walk = Walk {
            cells: p.cells(),
            n,
            cap: self.budget,
            leaves: &leaves,
        };
        let branch = |first: usize| -> Result<R> {
            let mut acc = init();
            let mut c = cursor(mu);
            walk.descend(c.as_mut(), first, 1, &mut acc, &visit)?;
            Ok(acc)
        };
        if self.parallel && n > 1 {
            (0..p.len()).into_par_iter().map(branch).collect()
        } else {
            (0..p.len()).map(branch).collect()
        }
    }
}

/// Neumaier summation. A block entropy adds up to `budget` terms, and naive
/// accumulation loses about 1e-11 over a million of them.
#[derive(Debug, Default, Clone, Copy)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        self.carry += if self.sum.abs() >= x.abs() {
            (self.sum - t) + x
        } else {
            (x - t) + self.sum
        };
        self.sum = t;
    }

    fn value(self) -> f64 {
        self.sum + self.carry
    }
}

struct Walk<'a> {
    cells: &'a [StateSet],
    n: usize,
    cap: u64,
    leaves: &'a AtomicU64,
}

impl Walk<'_> {
    fn descend<S: Scalar, R>(
        &self,
        c: &mut dyn Cursor<S>,
        cell: usize,
        depth: usize,
        acc: &mut R,
        visit: &impl Fn(&mut R, &S),
    ) -> Result<()> {
        let m = c.push(&self.cells[cell])?;
        if depth == self.n {
            if self.leaves.fetch_add(1, Ordering::Relaxed) >= self.cap {
                return Err(Error::Budget { cap: self.cap });
            }
            if m > S::zero() {
                visit(acc, &m);
            }
        } else if m > S::zero() {
            for next in 0..self.cells.len() {
                self.descend(c, next, depth + 1, acc, visit)?;
            }
        }
        c.pop();
        Ok(())
    }
}

/// `E(μ, P̄ⁿ)` with default enumeration settings.
pub fn block_entropy(mu: &dyn CylinderOracle, p: &Partition, n: usize) -> Result<f64> {
    Enumerator::default().block_entropy(mu, p, n)
}

/// Nonzero length-`n` cylinder masses with default enumeration settings.
pub fn block_masses<S: Scalar>(
    mu: &dyn CylinderOracle<S>,
    p: &Partition,
    n: usize,
) -> Result<Vec<S>> {
    Enumerator::default().block_masses(mu, p, n)
}

/// `a_n = E(μ, P̄ⁿ)/n` for `n = 1..=horizon`.
pub fn entropy_series(mu: &dyn CylinderOracle, p: &Partition, horizon: usize) -> Result<EntropySeries> {
    Enumerator::default().entropy_series(mu, p, horizon)
}

/// The sequence `a_n = E_n / n` with diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropySeries {
    pub values: Vec<f64>,
    pub block_values: Vec<f64>,
    pub horizon: usize,
    /// `a_n ≤ a_{n-1} + MONOTONE_TOL` throughout.
    pub monotone_nonincreasing: bool,
    /// The source oracle was declared stationary.
    pub stationary: bool,
}

impl EntropySeries {
    pub fn from_blocks(block_values: Vec<f64>, stationary: bool) -> Self {
        let values: Vec<f64> = block_values
            .iter()
            .enumerate()
            .map(|(i, e)| e / (i + 1) as f64)
            .collect();
        let monotone_nonincreasing = values.windows(2).all(|w| w[1] <= w[0] + MONOTONE_TOL);
        EntropySeries {
            horizon: values.len(),
            values,
            block_values,
            monotone_nonincreasing,
            stationary,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `E_n - E_{n-1}` for `n = 1..=horizon`, with `E_0 = 0`.
    pub fn increments(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.block_values
            .iter()
            .map(|&e| {
                let d = e - prev;
                prev = e;
                d
            })
            .collect()
    }
}

/// How a finite series is turned into an estimate of its limsup.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EstimatePolicy {
    /// `Last` for stationary sources, `TailMax` with the default window otherwise.
    #[default]
    Auto,
    /// Maximum over the last `window` entries; `None` means the last `⌈N/3⌉`.
    TailMax(Option<usize>),
    Last,
}

/// The policy actually applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Policy {
    TailMax { window: usize },
    Last,
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Policy::TailMax { window } => write!(f, "tail-max-{window}"),
            Policy::Last => write!(f, "last"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HsdEstimate {
    pub value: f64,
    pub policy: Policy,
    pub horizon: usize,
    /// For stationary sources `a_n` decreases to its limit, so `a_N` bounds it above.
    pub is_upper_bound: bool,
    pub justification: Option<String>,
}

pub fn hsd_estimate(series: &EntropySeries, policy: EstimatePolicy) -> Result<HsdEstimate> {
    let n = series.values.len();
    if n == 0 {
        return Err(Error::InvalidArgument("empty entropy series".into()));
    }
    let resolved = match policy {
        EstimatePolicy::Auto if series.stationary => Policy::Last,
        EstimatePolicy::Auto | EstimatePolicy::TailMax(None) => Policy::TailMax {
            window: n.div_ceil(3),
        },
        EstimatePolicy::TailMax(Some(w)) => Policy::TailMax {
            window: w.clamp(1, n),
        },
        EstimatePolicy::Last => Policy::Last,
    };
    let value = match resolved {
        Policy::Last => series.values[n - 1],
        Policy::TailMax { window } => series.values[n - window..]
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max),
    };
    Ok(HsdEstimate {
        value,
        policy: resolved,
        horizon: n,
        is_upper_bound: series.stationary && resolved == Policy::Last,
        justification: None,
    })
}

const SINGLETON_JUSTIFICATION: &str = "singleton partition: it refines every partition of a \
finite space and block entropies are monotone under refinement, so it attains the supremum";

/// Estimate of `sup_P limsup E(μ, P̄ⁿ)/n`, evaluated at the singleton partition.
pub fn hsd_full(mu: &dyn CylinderOracle, horizon: usize) -> Result<HsdEstimate> {
    hsd_full_with(&Enumerator::default(), mu, horizon)
}

pub fn hsd_full_with(enumerator: &Enumerator, mu: &dyn CylinderOracle, horizon: usize) -> Result<HsdEstimate> {
    let p = Partition::singletons(mu.space().size());
    let series = enumerator.entropy_series(mu, &p, horizon)?;
    let mut est = hsd_estimate(&series, EstimatePolicy::Auto)?;
    est.justification = Some(SINGLETON_JUSTIFICATION.to_string());
    Ok(est)
}

/// `-Σ_{i,j} p_i φ(p_ij)` for a chain started in an invariant vector.
pub fn markov_closed_form<S: Scalar>(spec: &MarkovSpec<S>) -> Result<f64> {
    let invariant = spec
        .step(spec.initial().weights())
        .iter()
        .zip(spec.initial().weights())
        .all(|(a, b)| a.close_to(b, STATIONARY_TOL));
    if !invariant {
        return Err(Error::NotStationary {
            residual: spec.stationarity_residual(),
        });
    }
    Ok(spec
        .initial()
        .weights()
        .iter()
        .zip(spec.transition())
        .map(|(p, row)| {
            let row_entropy: f64 = -row.iter().map(|x| phi_nonneg(x.to_f64())).sum::<f64>();
            p.to_f64() * row_entropy
        })
        .sum())
}

/// `E(ν, P)`: entropy of `nu` aggregated over the cells of `p`.
pub fn iid_closed_form<S: Scalar>(nu: &Distribution<S>, p: &Partition) -> Result<f64> {
    Ok(dist_entropy(&nu.aggregate(p)?))
}

/// `∨_{i<n} T^{-i}P`, built by joining preimages under the iterates of `T`.
pub fn transformation_join<S: Scalar>(
    spec: &TransformationSpec<S>,
    p: &Partition,
    n: usize,
) -> Result<Partition> {
    let k = spec.size();
    if p.universe() != k {
        return Err(Error::SpaceMismatch {
            left: k,
            right: p.universe(),
        });
    }
    let mut iterate: Vec<usize> = (0..k).collect();
    let mut joined = Partition::trivial(k);
    for _ in 0..n {
        joined = join(&joined, &preimage_partition(&iterate, p)?)?;
        iterate = iterate.iter().map(|&x| spec.map()[x]).collect();
    }
    Ok(joined)
}

/// Cell masses `ν(C)` of `∨_{i<n} T^{-i}P`.
pub fn transformation_block_masses<S: Scalar>(
    spec: &TransformationSpec<S>,
    p: &Partition,
    n: usize,
) -> Result<Vec<S>> {
    let joined = transformation_join(spec, p, n)?;
    Ok(spec.measure().aggregate(&joined)?.weights().to_vec())
}

/// `E(ν, ∨_{i<n} T^{-i}P)`.
pub fn transformation_block_entropy<S: Scalar>(
    spec: &TransformationSpec<S>,
    p: &Partition,
    n: usize,
) -> Result<f64> {
    let joined = transformation_join(spec, p, n)?;
    Ok(dist_entropy(&spec.measure().aggregate(&joined)?))
}

/// Conditional entropy of the first-coordinate partition `P̄¹` given `Q̄¹`:
/// `-Σ_j Σ_i μ(A_i∩B_j) ln(μ(A_i∩B_j)/μ(B_j))`, zero-mass cells contributing nothing.
pub fn conditional_entropy_first_coord(
    mu: &dyn CylinderOracle,
    p: &Partition,
    q: &Partition,
) -> Result<f64> {
    let k = mu.space().size();
    for part in [p, q] {
        if part.universe() != k {
            return Err(Error::SpaceMismatch {
                left: k,
                right: part.universe(),
            });
        }
    }
    let mut h = 0.0;
    for b in q.cells() {
        let mb = mu.mass(std::slice::from_ref(b))?;
        if mb <= 0.0 {
            continue;
        }
        for a in p.cells() {
            let mut ab = a.clone();
            ab.intersect_with(b);
            let mab = mu.mass(&[ab])?;
            if mab > 0.0 {
                h -= mab * (mab / mb).ln();
            }
        }
    }
    Ok(h.max(0.0))
}

/// Distinct nonzero masses with multiplicities, for exact comparison of two
/// cylinder partitions.
pub fn mass_profile<S: Scalar + Ord>(masses: &[S]) -> BTreeMap<S, usize> {
    let mut profile = BTreeMap::new();
    for m in masses.iter().filter(|m| !m.is_zero()) {
        *profile.entry(m.clone()).or_insert(0) += 1;
    }
    profile
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{from_transformation, iid, markov};
    use crate::space::StateSpace;

    fn space(k: usize) -> StateSpace {
        StateSpace::indexed(k).unwrap()
    }

    fn example_chain() -> MarkovSpec {
        MarkovSpec::new(
            vec![vec![0.9, 0.1], vec![0.5, 0.5]],
            Distribution::new(vec![5.0 / 6.0, 1.0 / 6.0]).unwrap(),
            true,
        )
        .unwrap()
    }

    // −(0.9 ln 0.9 + 0.1 ln 0.1), −ln 0.5
    fn row_entropies() -> (f64, f64) {
        (-(0.9f64 * 0.9f64.ln() + 0.1 * 0.1f64.ln()), 2f64.ln())
    }

    #[test]
    fn block_entropy_examples() {
        let fair = iid(space(2), Distribution::<f64>::uniform(2).unwrap()).unwrap();
        let s = Partition::singletons(2);
        for n in 1..=8 {
            let e = block_entropy(fair.as_ref(), &s, n).unwrap();
            assert!((e - n as f64 * 2f64.ln()).abs() < 1e-12);
            let t = block_entropy(fair.as_ref(), &Partition::trivial(2), n).unwrap();
            assert_eq!(t, 0.0);
        }
        assert_eq!(block_entropy(fair.as_ref(), &s, 0).unwrap(), 0.0);

        // 4-term enumeration of p_i p_ij
        let mu = markov(space(2), example_chain()).unwrap();
        let p = [5.0 / 6.0, 1.0 / 6.0];
        let t = [[0.9, 0.1], [0.5, 0.5]];
        let mut direct = 0.0;
        for (pi, row) in p.iter().zip(&t) {
            for pij in row {
                let m: f64 = pi * pij;
                direct -= m * m.ln();
            }
        }
        let e2 = block_entropy(mu.as_ref(), &s, 2).unwrap();
        assert!((e2 - direct).abs() < 1e-12);
        let (h0, h1) = row_entropies();
        let first = -(p[0] * p[0].ln() + p[1] * p[1].ln());
        assert!((e2 - (first + p[0] * h0 + p[1] * h1)).abs() < 1e-12);
    }

    #[test]
    fn budget_is_enforced() {
        let fair = iid(space(3), Distribution::<f64>::uniform(3).unwrap()).unwrap();
        let s = Partition::singletons(3);
        let small = Enumerator::with_budget(80);
        assert_eq!(
            small.block_entropy(fair.as_ref(), &s, 4),
            Err(Error::Budget { cap: 80 })
        );
        assert!(small.block_entropy(fair.as_ref(), &s, 3).is_ok());
        let (partial, err) = small.series_until_error(fair.as_ref(), &s, 6);
        assert_eq!(partial.horizon, 3);
        assert_eq!(err, Some(Error::Budget { cap: 80 }));
    }

    #[test]
    fn zero_prefixes_are_pruned() {
        // constant path: only one word has mass, so a budget of n·1 leaves suffices
        let frozen = iid(space(4), Distribution::<f64>::point_mass(4, 2).unwrap()).unwrap();
        let e = Enumerator::with_budget(4)
            .block_entropy(frozen.as_ref(), &Partition::singletons(4), 12)
            .unwrap();
        assert_eq!(e, 0.0);
    }

    #[test]
    fn series_examples() {
        let fair = iid(space(2), Distribution::<f64>::uniform(2).unwrap()).unwrap();
        let s = Partition::singletons(2);
        let series = entropy_series(fair.as_ref(), &s, 6).unwrap();
        assert!(series.values.iter().all(|a| (a - 2f64.ln()).abs() < 1e-12));

        let frozen = iid(space(2), Distribution::<f64>::point_mass(2, 0).unwrap()).unwrap();
        let series = entropy_series(frozen.as_ref(), &s, 6).unwrap();
        assert!(series.values.iter().all(|&a| a == 0.0));

        let mu = markov(space(2), example_chain()).unwrap();
        let series = entropy_series(mu.as_ref(), &s, 10).unwrap();
        let h = markov_closed_form(&example_chain()).unwrap();
        let e1 = series.block_values[0];
        for (i, a) in series.values.iter().enumerate() {
            let n = (i + 1) as f64;
            assert!((a - (h + (e1 - h) / n)).abs() < 1e-12);
        }
        assert!(series.values.windows(2).all(|w| w[1] < w[0]));
        assert!(series.monotone_nonincreasing && series.stationary);
    }

    fn series_of(values: &[f64], stationary: bool) -> EntropySeries {
        let blocks = values.iter().enumerate().map(|(i, a)| a * (i + 1) as f64).collect();
        EntropySeries::from_blocks(blocks, stationary)
    }

    #[test]
    fn estimate_policies() {
        let c = series_of(&[0.4; 7], false);
        assert!((hsd_estimate(&c, EstimatePolicy::Auto).unwrap().value - 0.4).abs() < 1e-15);

        let dec = series_of(&[0.9, 0.7, 0.6, 0.55], true);
        let est = hsd_estimate(&dec, EstimatePolicy::Auto).unwrap();
        assert_eq!(est.policy, Policy::Last);
        assert!(est.is_upper_bound);
        assert!((est.value - 0.55).abs() < 1e-15);

        let bumpy = series_of(&[0.5, 0.7, 0.6, 0.6], false);
        let est = hsd_estimate(&bumpy, EstimatePolicy::Auto).unwrap();
        assert_eq!(est.policy, Policy::TailMax { window: 2 });
        assert!((est.value - 0.6).abs() < 1e-15);
        assert!(!est.is_upper_bound);
        let wide = hsd_estimate(&bumpy, EstimatePolicy::TailMax(Some(3))).unwrap();
        assert!((wide.value - 0.7).abs() < 1e-15);

        assert!(hsd_estimate(&series_of(&[], false), EstimatePolicy::Auto).is_err());
    }

    #[test]
    fn hsd_full_examples() {
        for k in 2..=4 {
            let u = iid(space(k), Distribution::<f64>::uniform(k).unwrap()).unwrap();
            let est = hsd_full(u.as_ref(), 5).unwrap();
            assert!((est.value - (k as f64).ln()).abs() < 1e-12);
            assert!(est.justification.is_some());
        }
        let frozen = iid(space(3), Distribution::<f64>::point_mass(3, 1).unwrap()).unwrap();
        assert_eq!(hsd_full(frozen.as_ref(), 5).unwrap().value, 0.0);
    }

    #[test]
    fn markov_closed_form_examples() {
        let id = MarkovSpec::new(
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            Distribution::new(vec![0.3, 0.7]).unwrap(),
            true,
        )
        .unwrap();
        assert_eq!(markov_closed_form(&id).unwrap(), 0.0);
        let fair = MarkovSpec::new(vec![vec![0.5, 0.5]; 2], Distribution::<f64>::uniform(2).unwrap(), true).unwrap();
        assert!((markov_closed_form(&fair).unwrap() - 2f64.ln()).abs() < 1e-15);
        let (h0, h1) = row_entropies();
        let h = markov_closed_form(&example_chain()).unwrap();
        assert!((h - (5.0 / 6.0 * h0 + h1 / 6.0)).abs() < 1e-15);
        assert!((h - 0.386_427).abs() < 1e-6);

        let off = MarkovSpec::new(
            vec![vec![0.9, 0.1], vec![0.5, 0.5]],
            Distribution::<f64>::uniform(2).unwrap(),
            false,
        )
        .unwrap();
        assert!(matches!(markov_closed_form(&off), Err(Error::NotStationary { .. })));
    }

    #[test]
    fn iid_closed_form_examples() {
        let nu = Distribution::new(vec![0.25, 0.25, 0.5]).unwrap();
        assert_eq!(iid_closed_form(&nu, &Partition::trivial(3)).unwrap(), 0.0);
        let u = Distribution::<f64>::uniform(5).unwrap();
        assert!((iid_closed_form(&u, &Partition::singletons(5)).unwrap() - 5f64.ln()).abs() < 1e-12);
        let p = Partition::new(3, vec![vec![0, 1], vec![2]]).unwrap();
        assert!((iid_closed_form(&nu, &p).unwrap() - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn transformation_examples() {
        let nu = Distribution::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let p = Partition::new(4, vec![vec![0, 3], vec![1, 2]]).unwrap();
        let id = TransformationSpec::new(vec![0, 1, 2, 3], nu.clone(), true).unwrap();
        for n in 1..5 {
            let e = transformation_block_entropy(&id, &p, n).unwrap();
            assert!((e - iid_closed_form(&nu, &p).unwrap()).abs() < 1e-15);
            let any = TransformationSpec::new(vec![3, 0, 0, 1], nu.clone(), false).unwrap();
            assert_eq!(transformation_block_entropy(&any, &Partition::trivial(4), n).unwrap(), 0.0);
        }
        let cyc = TransformationSpec::new(vec![1, 2, 0], Distribution::<f64>::uniform(3).unwrap(), true).unwrap();
        let e = transformation_block_entropy(&cyc, &Partition::singletons(3), 3).unwrap();
        assert!((e - 3f64.ln()).abs() < 1e-15);

        let spec = TransformationSpec::new(vec![3, 0, 0, 1], nu, false).unwrap();
        let mu = from_transformation(space(4), spec.clone()).unwrap();
        for n in 1..=6 {
            let a = transformation_block_entropy(&spec, &p, n).unwrap();
            let b = block_entropy(mu.as_ref(), &p, n).unwrap();
            assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn conditional_entropy_examples() {
        let mu = markov(space(2), example_chain()).unwrap();
        let s = Partition::singletons(2);
        let t = Partition::trivial(2);
        assert_eq!(conditional_entropy_first_coord(mu.as_ref(), &s, &s).unwrap(), 0.0);
        let skew = iid(space(2), Distribution::new(vec![0.9, 0.1]).unwrap()).unwrap();
        let h = conditional_entropy_first_coord(skew.as_ref(), &s, &t).unwrap();
        assert!((h - 0.325_083).abs() < 1e-6);
        let first = -(5.0f64 / 6.0 * (5.0f64 / 6.0).ln() + 1.0 / 6.0 * (1.0f64 / 6.0).ln());
        let h = conditional_entropy_first_coord(mu.as_ref(), &s, &t).unwrap();
        assert!((h - first).abs() < 1e-12);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let spec = MarkovSpec::with_stationary_initial(vec![
            vec![0.2, 0.5, 0.3],
            vec![0.6, 0.1, 0.3],
            vec![0.3, 0.3, 0.4],
        ])
        .unwrap();
        let mu = markov(space(3), spec).unwrap();
        let s = Partition::singletons(3);
        let serial = Enumerator {
            parallel: false,
            ..Enumerator::default()
        }
        .block_entropy(mu.as_ref(), &s, 7)
        .unwrap();
        for threads in [1, 2, 5] {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            let par = pool.install(|| block_entropy(mu.as_ref(), &s, 7).unwrap());
            assert_eq!(par.to_bits(), serial.to_bits());
        }
    }
}
