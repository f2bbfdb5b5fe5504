//! Finite state spaces, partitions, cell words and entropy of finite distributions.
//!
//! All logarithms are natural; conversion to bits happens only at the output layer.

use std::collections::{BTreeMap, HashSet};

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::scalar::{self, Scalar};

/// A subset of a finite state space, one bit per state index.
pub type StateSet = FixedBitSet;

/// Tolerance on the total weight of a floating-point [`Distribution`].
pub const DISTRIBUTION_TOL: f64 = 1e-12;

/// Builds a [`StateSet`] over `universe` states from explicit indices.
pub fn state_set(universe: usize, states: impl IntoIterator<Item = usize>) -> StateSet {
    let mut set = FixedBitSet::with_capacity(universe);
    for s in states {
        set.insert(s);
    }
    set
}

/// The full state space as a [`StateSet`].
pub fn full_set(universe: usize) -> StateSet {
    let mut set = FixedBitSet::with_capacity(universe);
    set.insert_range(..);
    set
}

/// Labeled finite state space `{0, .., k-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSpace {
    labels: Vec<String>,
}

impl StateSpace {
    pub fn new<I, L>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = L>,
        L: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::InvalidSpace("state space needs at least one state".into()));
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::InvalidSpace(format!("duplicate label `{l}`")));
            }
        }
        Ok(StateSpace { labels })
    }

    /// States labeled `0`, `1`, ... `k-1`.
    pub fn indexed(k: usize) -> Result<Self> {
        Self::new((0..k).map(|i| i.to_string()))
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, state: usize) -> &str {
        &self.labels[state]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// `X × Y`, with `(x, y)` stored at index `x * |Y| + y`.
    pub fn product(&self, other: &StateSpace) -> StateSpace {
        let labels = self
            .labels
            .iter()
            .flat_map(|x| other.labels.iter().map(move |y| format!("({x},{y})")))
            .collect();
        StateSpace { labels }
    }

    /// `X^k`, tuples encoded with the first coordinate most significant.
    pub fn power(&self, k: usize) -> StateSpace {
        let mut labels = vec![String::new()];
        for _ in 0..k {
            labels = labels
                .iter()
                .flat_map(|prefix| {
                    self.labels.iter().map(move |l| {
                        if prefix.is_empty() {
                            l.clone()
                        } else {
                            format!("{prefix}.{l}")
                        }
                    })
                })
                .collect();
        }
        StateSpace { labels }
    }
}

/// A finite partition of `{0, .., universe-1}` into nonempty, ordered cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    universe: usize,
    cells: Vec<StateSet>,
    cell_of: Vec<usize>,
}

impl Partition {
    pub fn new(universe: usize, cells: Vec<Vec<usize>>) -> Result<Self> {
        if universe == 0 {
            return Err(Error::InvalidPartition("empty state space".into()));
        }
        let mut cell_of = vec![usize::MAX; universe];
        let mut sets = Vec::with_capacity(cells.len());
        for (c, cell) in cells.iter().enumerate() {
            if cell.is_empty() {
                return Err(Error::InvalidPartition(format!("cell {c} is empty")));
            }
            for &s in cell {
                if s >= universe {
                    return Err(Error::IndexOutOfRange {
                        what: "state space",
                        index: s,
                        size: universe,
                    });
                }
                if cell_of[s] != usize::MAX {
                    return Err(Error::InvalidPartition(format!(
                        "state {s} appears in more than one cell"
                    )));
                }
                cell_of[s] = c;
            }
            sets.push(state_set(universe, cell.iter().copied()));
        }
        if let Some(s) = cell_of.iter().position(|&c| c == usize::MAX) {
            return Err(Error::InvalidPartition(format!("state {s} is not covered")));
        }
        Ok(Partition {
            universe,
            cells: sets,
            cell_of,
        })
    }

    /// Partition from a state -> label assignment; cells ordered by label.
    pub fn from_assignment(assignment: &[usize]) -> Result<Self> {
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (s, &label) in assignment.iter().enumerate() {
            groups.entry(label).or_default().push(s);
        }
        Self::new(assignment.len(), groups.into_values().collect())
    }

    pub fn trivial(universe: usize) -> Self {
        Self::new(universe, vec![(0..universe).collect()]).expect("nonempty universe")
    }

    pub fn singletons(universe: usize) -> Self {
        Self::new(universe, (0..universe).map(|s| vec![s]).collect()).expect("nonempty universe")
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[StateSet] {
        &self.cells
    }

    pub fn cell(&self, i: usize) -> &StateSet {
        &self.cells[i]
    }

    pub fn cell_of(&self, state: usize) -> usize {
        self.cell_of[state]
    }

    pub fn cell_states(&self, i: usize) -> Vec<usize> {
        self.cells[i].ones().collect()
    }

    /// Same cells, ignoring order.
    pub fn same_cells(&self, other: &Partition) -> bool {
        self.universe == other.universe && self.canonical_cells() == other.canonical_cells()
    }

    fn canonical_cells(&self) -> Vec<Vec<usize>> {
        let mut cells: Vec<Vec<usize>> = (0..self.len()).map(|i| self.cell_states(i)).collect();
        cells.sort();
        cells
    }

    fn check_same_universe(&self, other: &Partition) -> Result<()> {
        if self.universe != other.universe {
            return Err(Error::SpaceMismatch {
                left: self.universe,
                right: other.universe,
            });
        }
        Ok(())
    }
}

/// A finite word of cell indices of one partition; the empty word is the whole space.
#[derive(Debug, Clone)]
pub struct CellWord<'a> {
    partition: &'a Partition,
    indices: Vec<usize>,
}

impl<'a> CellWord<'a> {
    pub fn new(partition: &'a Partition, indices: Vec<usize>) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= partition.len()) {
            return Err(Error::IndexOutOfRange {
                what: "partition",
                index: bad,
                size: partition.len(),
            });
        }
        Ok(CellWord { partition, indices })
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn partition(&self) -> &Partition {
        self.partition
    }

    pub fn cells(&self) -> Vec<StateSet> {
        self.indices
            .iter()
            .map(|&i| self.partition.cell(i).clone())
            .collect()
    }
}

/// Probability weights over a finite index set.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution<S: Scalar = f64> {
    weights: Vec<S>,
}

impl<S: Scalar> Distribution<S> {
    pub fn new(weights: Vec<S>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidDistribution("no weights".into()));
        }
        for (i, w) in weights.iter().enumerate() {
            if w.is_negative() || *w > S::one() {
                return Err(Error::InvalidDistribution(format!(
                    "weight {i} = {} outside [0, 1]",
                    w.to_f64()
                )));
            }
        }
        let total = scalar::sum(weights.iter().cloned());
        if !total.close_to(&S::one(), DISTRIBUTION_TOL) {
            return Err(Error::InvalidDistribution(format!(
                "weights sum to {}",
                total.to_f64()
            )));
        }
        Ok(Distribution { weights })
    }

    pub fn uniform(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidDistribution("no weights".into()));
        }
        let w = S::one() / S::from_count(k);
        Ok(Distribution {
            weights: vec![w; k],
        })
    }

    pub fn point_mass(k: usize, state: usize) -> Result<Self> {
        if state >= k {
            return Err(Error::IndexOutOfRange {
                what: "state space",
                index: state,
                size: k,
            });
        }
        let mut weights = vec![S::zero(); k];
        weights[state] = S::one();
        Ok(Distribution { weights })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> &S {
        &self.weights[i]
    }

    /// Mass of a set of indices.
    pub fn mass_of(&self, set: &StateSet) -> S {
        scalar::sum(
            set.ones()
                .filter(|&i| i < self.weights.len())
                .map(|i| self.weights[i].clone()),
        )
    }

    /// Cell masses, in partition order.
    pub fn aggregate(&self, p: &Partition) -> Result<Distribution<S>> {
        if p.universe() != self.len() {
            return Err(Error::SpaceMismatch {
                left: self.len(),
                right: p.universe(),
            });
        }
        Ok(Distribution {
            weights: p.cells().iter().map(|c| self.mass_of(c)).collect(),
        })
    }

    /// Image measure under `map`, a total function into `0..target`.
    pub fn pushforward(&self, map: &[usize], target: usize) -> Result<Distribution<S>> {
        if map.len() != self.len() {
            return Err(Error::SpaceMismatch {
                left: self.len(),
                right: map.len(),
            });
        }
        let mut weights = vec![S::zero(); target];
        for (x, &y) in map.iter().enumerate() {
            if y >= target {
                return Err(Error::IndexOutOfRange {
                    what: "target space",
                    index: y,
                    size: target,
                });
            }
            weights[y] = weights[y].clone() + self.weights[x].clone();
        }
        Ok(Distribution { weights })
    }

    /// Product measure on `X × Y`, index `x * |Y| + y`.
    pub fn product(&self, other: &Distribution<S>) -> Distribution<S> {
        let weights = self
            .weights
            .iter()
            .flat_map(|a| other.weights.iter().map(move |b| a.clone() * b.clone()))
            .collect();
        Distribution { weights }
    }
}

/// `x ln x` with `0 ln 0 = 0`.
pub fn phi(x: f64) -> Result<f64> {
    if x < 0.0 || x.is_nan() {
        return Err(Error::Domain(format!("phi is undefined at {x}")));
    }
    Ok(phi_nonneg(x))
}

#[inline]
pub(crate) fn phi_nonneg(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Shannon entropy `-Σ φ(w_i)` in nats.
pub fn dist_entropy<S: Scalar>(d: &Distribution<S>) -> f64 {
    -d.weights.iter().map(|w| phi_nonneg(w.to_f64())).sum::<f64>()
}

/// Validates raw weights and returns their entropy.
pub fn entropy_of_weights(weights: &[f64]) -> Result<f64> {
    Ok(dist_entropy(&Distribution::new(weights.to_vec())?))
}

/// `P ∨ Q`: all nonempty intersections, ordered by `(i, j)`.
pub fn join(p: &Partition, q: &Partition) -> Result<Partition> {
    p.check_same_universe(q)?;
    let mut cells = Vec::new();
    for a in p.cells() {
        for b in q.cells() {
            let mut cell = a.clone();
            cell.intersect_with(b);
            if !cell.is_clear() {
                cells.push(cell.ones().collect());
            }
        }
    }
    Partition::new(p.universe(), cells)
}

/// Whether `q` refines `p`, i.e. every cell of `p` is a union of cells of `q`.
pub fn refines(q: &Partition, p: &Partition) -> Result<bool> {
    p.check_same_universe(q)?;
    // q refines p iff each q-cell sits inside a single p-cell.
    Ok(q.cells().iter().all(|b| {
        let first = b.ones().next().expect("cells are nonempty");
        b.is_subset(p.cell(p.cell_of(first)))
    }))
}

/// `f⁻¹Q` for a total map `f: X → Y` given as `map[x] = f(x)`; empty preimages are dropped.
pub fn preimage_partition(map: &[usize], q: &Partition) -> Result<Partition> {
    if map.is_empty() {
        return Err(Error::InvalidPartition("empty domain".into()));
    }
    if let Some(&y) = map.iter().find(|&&y| y >= q.universe()) {
        return Err(Error::IndexOutOfRange {
            what: "target space",
            index: y,
            size: q.universe(),
        });
    }
    let cells: Vec<Vec<usize>> = (0..q.len())
        .map(|j| (0..map.len()).filter(|&x| q.cell_of(map[x]) == j).collect::<Vec<_>>())
        .filter(|c| !c.is_empty())
        .collect();
    Partition::new(map.len(), cells)
}

/// `P ⊙ Q = {A_i × B_j}` on `X × Y`, cell `(i, j)` at index `i * |Q| + j`.
pub fn product_partition(p: &Partition, q: &Partition) -> Partition {
    let ny = q.universe();
    let mut cells = Vec::with_capacity(p.len() * q.len());
    for i in 0..p.len() {
        for j in 0..q.len() {
            let mut cell = Vec::new();
            for x in p.cell(i).ones() {
                for y in q.cell(j).ones() {
                    cell.push(x * ny + y);
                }
            }
            cells.push(cell);
        }
    }
    Partition::new(p.universe() * ny, cells).expect("product of partitions is a partition")
}

/// k-fold `P ⊙ .. ⊙ P` on `X^k` in the [`StateSpace::power`] encoding.
pub fn power_partition(p: &Partition, k: usize) -> Partition {
    let mut acc = Partition::trivial(1);
    for _ in 0..k {
        acc = product_partition(&acc, p);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn part(universe: usize, cells: &[&[usize]]) -> Partition {
        Partition::new(universe, cells.iter().map(|c| c.to_vec()).collect()).unwrap()
    }

    #[test]
    fn phi_values() {
        assert_eq!(phi(0.0).unwrap(), 0.0);
        assert_eq!(phi(1.0).unwrap(), 0.0);
        assert!((phi(0.5).unwrap() - 0.5 * 0.5f64.ln()).abs() < 1e-15);
        assert!((phi(0.5).unwrap() + 0.346_573_590_279_972_6).abs() < 1e-15);
        assert!(matches!(phi(-1e-3), Err(Error::Domain(_))));
    }

    #[test]
    fn distribution_entropy_examples() {
        assert_eq!(entropy_of_weights(&[1.0]).unwrap(), 0.0);
        assert!((entropy_of_weights(&[0.5, 0.5]).unwrap() - 2f64.ln()).abs() < 1e-15);
        let direct = -(0.9 * 0.9f64.ln() + 0.1 * 0.1f64.ln());
        let h = entropy_of_weights(&[0.9, 0.1]).unwrap();
        assert!((h - direct).abs() < 1e-15);
        assert!((h - 0.325_083).abs() < 1e-6);
    }

    #[test]
    fn distribution_validation() {
        assert!(Distribution::new(vec![0.5, 0.6]).is_err());
        assert!(Distribution::new(vec![-0.1, 1.1]).is_err());
        assert!(Distribution::<f64>::new(vec![]).is_err());
        assert!(Distribution::new(vec![0.3, 0.7 + 5e-13]).is_ok());
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::new(3, vec![vec![0, 1], vec![]]).is_err());
        assert!(Partition::new(3, vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(Partition::new(3, vec![vec![0, 1]]).is_err());
        assert!(Partition::new(3, vec![vec![0, 3], vec![1, 2]]).is_err());
    }

    #[test]
    fn join_examples() {
        let p = part(3, &[&[0, 2], &[1]]);
        assert!(join(&Partition::trivial(3), &p).unwrap().same_cells(&p));
        let s = Partition::singletons(3);
        assert!(join(&s, &p).unwrap().same_cells(&s));
        let a = part(3, &[&[0, 1], &[2]]);
        let b = part(3, &[&[0], &[1, 2]]);
        assert!(join(&a, &b).unwrap().same_cells(&s));
        assert!(join(&p, &p).unwrap().same_cells(&p));
        assert!(join(&a, &Partition::trivial(4)).is_err());
    }

    #[test]
    fn refines_examples() {
        let p = part(3, &[&[0, 2], &[1]]);
        let q = part(3, &[&[0], &[1, 2]]);
        assert!(refines(&p, &Partition::trivial(3)).unwrap());
        assert!(!refines(&Partition::trivial(3), &Partition::singletons(3)).unwrap());
        let j = join(&p, &q).unwrap();
        assert!(refines(&j, &p).unwrap() && refines(&j, &q).unwrap());
        assert!(!refines(&p, &q).unwrap());
    }

    #[test]
    fn preimage_examples() {
        let q = Partition::singletons(2);
        assert!(preimage_partition(&[0, 1], &q).unwrap().same_cells(&q));
        assert!(preimage_partition(&[1, 1, 1], &q)
            .unwrap()
            .same_cells(&Partition::trivial(3)));
        let r = preimage_partition(&[0, 0, 1], &q).unwrap();
        assert!(r.same_cells(&part(3, &[&[0, 1], &[2]])));
    }

    #[test]
    fn product_partition_examples() {
        let t = product_partition(&Partition::trivial(2), &Partition::trivial(3));
        assert_eq!(t.len(), 1);
        let s = product_partition(&Partition::singletons(2), &Partition::singletons(3));
        assert!(s.same_cells(&Partition::singletons(6)));
        let p = part(2, &[&[0], &[1]]);
        let q = part(3, &[&[0], &[1], &[2]]);
        assert_eq!(product_partition(&p, &q).len(), 6);
        assert_eq!(power_partition(&Partition::singletons(2), 3), Partition::singletons(8));
    }

    #[test]
    fn cell_words() {
        let p = Partition::singletons(2);
        assert!(CellWord::new(&p, vec![0, 2]).is_err());
        let w = CellWord::new(&p, vec![]).unwrap();
        assert!(w.is_empty());
        assert_eq!(CellWord::new(&p, vec![1, 0]).unwrap().cells()[0], state_set(2, [1]));
    }

    #[test]
    fn space_labels() {
        assert!(StateSpace::new(["a", "a"]).is_err());
        assert!(StateSpace::new(Vec::<String>::new()).is_err());
        let x = StateSpace::new(["a", "b"]).unwrap();
        let y = StateSpace::new(["u", "v", "w"]).unwrap();
        assert_eq!(x.product(&y).label(5), "(b,w)");
        assert_eq!(x.power(2).labels(), ["a.a", "a.b", "b.a", "b.b"]);
    }

    fn arb_weights(max: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.0f64..1.0, 1..max)
    }

    proptest! {
        #[test]
        fn phi_is_convex(x in 0.0f64..10.0, y in 0.0f64..10.0, t in 0.0f64..=1.0) {
            let lhs = phi(t * x + (1.0 - t) * y).unwrap();
            let rhs = t * phi(x).unwrap() + (1.0 - t) * phi(y).unwrap();
            prop_assert!(lhs <= rhs + 1e-12);
        }

        #[test]
        fn entropy_at_most_log_cells(raw in arb_weights(8)) {
            let total: f64 = raw.iter().sum();
            prop_assume!(total > 1e-9);
            let w: Vec<f64> = raw.iter().map(|x| x / total).collect();
            let h = dist_entropy(&Distribution::new(w.clone()).unwrap());
            let m = w.len() as f64;
            prop_assert!(h >= 0.0 && h <= m.ln() + 1e-12);
        }

        #[test]
        fn grouping_inequality(r in prop::collection::vec(0.0f64..2.0, 1..8)) {
            let total: f64 = r.iter().sum();
            let lhs = -r.iter().map(|&x| phi_nonneg(x)).sum::<f64>();
            let rhs = -phi_nonneg(total) + total * (r.len() as f64).ln();
            prop_assert!(lhs <= rhs + 1e-12);
        }

        #[test]
        fn join_commutes_and_refines(a in prop::collection::vec(0usize..3, 1..7),
                                     b in prop::collection::vec(0usize..3, 1..7)) {
            let k = a.len().min(b.len());
            let p = Partition::from_assignment(&a[..k]).unwrap();
            let q = Partition::from_assignment(&b[..k]).unwrap();
            let pq = join(&p, &q).unwrap();
            prop_assert!(pq.same_cells(&join(&q, &p).unwrap()));
            prop_assert!(refines(&pq, &p).unwrap() && refines(&pq, &q).unwrap());
            prop_assert!(refines(&p, &p).unwrap());
            let pqp = join(&pq, &p).unwrap();
            prop_assert!(pqp.same_cells(&pq));
        }
    }

    #[test]
    fn uniform_is_the_entropy_maximizer() {
        for m in 1..8 {
            let u = Distribution::<f64>::uniform(m).unwrap();
            assert!((dist_entropy(&u) - (m as f64).ln()).abs() < 1e-12);
        }
    }
}
