use std::sync::Arc;

use super::{Cursor, CylinderOracle, Oracle};
use crate::error::{Error, Result};
use crate::scalar::{self, Scalar};
use crate::space::{Distribution, StateSet, StateSpace};

/// Tolerance for `p·P = p` on declared-stationary chains and for measure preservation.
pub const STATIONARY_TOL: f64 = 1e-10;

#[derive(Debug)]
struct Iid<S: Scalar> {
    space: StateSpace,
    nu: Distribution<S>,
}

/// I.i.d. sequence with one-step law `nu`.
pub fn iid<S: Scalar>(space: StateSpace, nu: Distribution<S>) -> Result<Oracle<S>> {
    check_len(&space, nu.len())?;
    Ok(Arc::new(Iid { space, nu }))
}

impl<S: Scalar> CylinderOracle<S> for Iid<S> {
    fn space(&self) -> &StateSpace {
        &self.space
    }

    fn mass(&self, word: &[StateSet]) -> Result<S> {
        Ok(word
            .iter()
            .fold(S::one(), |acc, cell| acc * self.nu.mass_of(cell)))
    }

    fn is_stationary(&self) -> bool {
        true
    }

    fn fast_cursor(&self) -> Option<Box<dyn Cursor<S> + '_>> {
        Some(Box::new(ProductCursor {
            laws: |_: usize| Ok(&self.nu),
            stack: Vec::new(),
        }))
    }
}

#[derive(Debug)]
struct ProductSequence<S: Scalar> {
    space: StateSpace,
    prefix: Vec<Distribution<S>>,
    tail: Vec<Distribution<S>>,
}

impl<S: Scalar> ProductSequence<S> {
    fn law(&self, j: usize) -> Result<&Distribution<S>> {
        if j < self.prefix.len() {
            Ok(&self.prefix[j])
        } else if self.tail.is_empty() {
            Err(Error::SequenceExhausted {
                len: j + 1,
                available: self.prefix.len(),
            })
        } else {
            Ok(&self.tail[(j - self.prefix.len()) % self.tail.len()])
        }
    }
}

/// Independent sequence `ν_0 × ν_1 × ..`: the listed `prefix`, then `tail` repeated
/// forever. With an empty tail, words longer than the prefix are an error.
pub fn product_sequence<S: Scalar>(
    space: StateSpace,
    prefix: Vec<Distribution<S>>,
    tail: Vec<Distribution<S>>,
) -> Result<Oracle<S>> {
    for d in prefix.iter().chain(&tail) {
        check_len(&space, d.len())?;
    }
    Ok(Arc::new(ProductSequence {
        space,
        prefix,
        tail,
    }))
}

impl<S: Scalar> CylinderOracle<S> for ProductSequence<S> {
    fn space(&self) -> &StateSpace {
        &self.space
    }

    fn mass(&self, word: &[StateSet]) -> Result<S> {
        let mut acc = S::one();
        for (j, cell) in word.iter().enumerate() {
            acc = acc * self.law(j)?.mass_of(cell);
        }
        Ok(acc)
    }

    fn is_stationary(&self) -> bool {
        let mut laws = self.prefix.iter().chain(&self.tail);
        match laws.next() {
            Some(first) => laws.all(|d| d == first),
            None => false,
        }
    }

    fn fast_cursor(&self) -> Option<Box<dyn Cursor<S> + '_>> {
        Some(Box::new(ProductCursor {
            laws: move |j: usize| self.law(j),
            stack: Vec::new(),
        }))
    }
}

struct ProductCursor<S, F> {
    laws: F,
    stack: Vec<S>,
}

impl<'a, S, F> Cursor<S> for ProductCursor<S, F>
where
    S: Scalar,
    F: Fn(usize) -> Result<&'a Distribution<S>> + Send,
{
    fn push(&mut self, cell: &StateSet) -> Result<S> {
        let prev = self.stack.last().cloned().unwrap_or_else(S::one);
        let m = prev * (self.laws)(self.stack.len())?.mass_of(cell);
        self.stack.push(m.clone());
        Ok(m)
    }

    fn pop(&mut self) {
        self.stack.pop();
    }
}

/// Homogeneous Markov chain: row-stochastic `transition` and `initial` law.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovSpec<S: Scalar = f64> {
    transition: Vec<Vec<S>>,
    initial: Distribution<S>,
    stationary: bool,
}

impl<S: Scalar> MarkovSpec<S> {
    /// Validates rows to [`crate::space::DISTRIBUTION_TOL`]; when `declared_stationary`, also checks
    /// `initial · transition = initial` to [`STATIONARY_TOL`].
    pub fn new(
        transition: Vec<Vec<S>>,
        initial: Distribution<S>,
        declared_stationary: bool,
    ) -> Result<Self> {
        let k = transition.len();
        if k == 0 {
            return Err(Error::InvalidMatrix("empty transition matrix".into()));
        }
        if initial.len() != k {
            return Err(Error::SpaceMismatch {
                left: k,
                right: initial.len(),
            });
        }
        for (i, row) in transition.iter().enumerate() {
            if row.len() != k {
                return Err(Error::InvalidMatrix(format!(
                    "row {i} has {} entries, expected {k}",
                    row.len()
                )));
            }
            Distribution::new(row.clone()).map_err(|e| {
                Error::InvalidMatrix(format!("row {i} is not a probability vector: {e}"))
            })?;
        }
        let spec = MarkovSpec {
            transition,
            initial,
            stationary: declared_stationary,
        };
        if declared_stationary {
            let residual = spec.stationarity_residual();
            let invariant = spec
                .step(spec.initial.weights())
                .iter()
                .zip(spec.initial.weights())
                .all(|(a, b)| a.close_to(b, STATIONARY_TOL));
            if !invariant {
                return Err(Error::NotStationary { residual });
            }
        }
        Ok(spec)
    }

    pub fn size(&self) -> usize {
        self.transition.len()
    }

    pub fn transition(&self) -> &[Vec<S>] {
        &self.transition
    }

    pub fn initial(&self) -> &Distribution<S> {
        &self.initial
    }

    pub fn is_stationary(&self) -> bool {
        self.stationary
    }

    /// `v · P`.
    pub fn step(&self, v: &[S]) -> Vec<S> {
        let k = self.size();
        (0..k)
            .map(|j| {
                scalar::sum(
                    v.iter()
                        .zip(&self.transition)
                        .map(|(vi, row)| vi.clone() * row[j].clone()),
                )
            })
            .collect()
    }

    /// `max_j |(pP)_j - p_j|` in floating point.
    pub fn stationarity_residual(&self) -> f64 {
        self.step(self.initial.weights())
            .iter()
            .zip(self.initial.weights())
            .map(|(a, b)| (a.to_f64() - b.to_f64()).abs())
            .fold(0.0, f64::max)
    }

    /// Two-step chain `P²` with the same initial law.
    pub fn squared(&self) -> MarkovSpec<S> {
        let transition = self.transition.iter().map(|row| self.step(row)).collect();
        MarkovSpec {
            transition,
            initial: self.initial.clone(),
            stationary: self.stationary,
        }
    }
}

impl MarkovSpec<f64> {
    /// Chain started from a stationary vector found by [`stationary_vector`].
    pub fn with_stationary_initial(transition: Vec<Vec<f64>>) -> Result<Self> {
        let p = stationary_vector(&transition)?;
        MarkovSpec::new(transition, Distribution::new(p)?, true)
    }
}

/// A stationary vector of a row-stochastic matrix by power iteration on the lazy
/// chain `(I + P)/2`, started from the uniform vector.
pub fn stationary_vector(transition: &[Vec<f64>]) -> Result<Vec<f64>> {
    let k = transition.len();
    if k == 0 || transition.iter().any(|r| r.len() != k) {
        return Err(Error::InvalidMatrix("transition matrix must be square".into()));
    }
    let mut v = vec![1.0 / k as f64; k];
    for _ in 0..200_000 {
        let mut next = vec![0.0; k];
        for (i, row) in transition.iter().enumerate() {
            for (j, p) in row.iter().enumerate() {
                next[j] += v[i] * p;
            }
        }
        for (n, vi) in next.iter_mut().zip(&v) {
            *n = 0.5 * (*n + vi);
        }
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= total);
        let change = next
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        v = next;
        if change < 1e-16 {
            break;
        }
    }
    Ok(v)
}

#[derive(Debug)]
struct Markov<S: Scalar> {
    space: StateSpace,
    spec: MarkovSpec<S>,
}

/// Markov chain path measure. Cylinder masses come from masked transfer products:
/// restrict the initial vector to `A_0`, then alternately step and restrict.
pub fn markov<S: Scalar>(space: StateSpace, spec: MarkovSpec<S>) -> Result<Oracle<S>> {
    check_len(&space, spec.size())?;
    Ok(Arc::new(Markov { space, spec }))
}

impl<S: Scalar> Markov<S> {
    fn extend(&self, prev: Option<&[S]>, cell: &StateSet) -> Vec<S> {
        let k = self.spec.size();
        let mut next = vec![S::zero(); k];
        match prev {
            None => {
                for j in cell.ones() {
                    next[j] = self.spec.initial.weight(j).clone();
                }
            }
            Some(v) => {
                for j in cell.ones() {
                    next[j] = scalar::sum(
                        v.iter()
                            .zip(&self.spec.transition)
                            .filter(|(vi, _)| !vi.is_zero())
                            .map(|(vi, row)| vi.clone() * row[j].clone()),
                    );
                }
            }
        }
        next
    }
}

impl<S: Scalar> CylinderOracle<S> for Markov<S> {
    fn space(&self) -> &StateSpace {
        &self.space
    }

    fn mass(&self, word: &[StateSet]) -> Result<S> {
        let mut v: Option<Vec<S>> = None;
        for cell in word {
            v = Some(self.extend(v.as_deref(), cell));
        }
        Ok(v.map(scalar::sum).unwrap_or_else(S::one))
    }

    fn is_stationary(&self) -> bool {
        self.spec.stationary
    }

    fn fast_cursor(&self) -> Option<Box<dyn Cursor<S> + '_>> {
        Some(Box::new(MarkovCursor {
            chain: self,
            stack: Vec::new(),
        }))
    }
}

struct MarkovCursor<'a, S: Scalar> {
    chain: &'a Markov<S>,
    stack: Vec<Vec<S>>,
}

impl<S: Scalar> Cursor<S> for MarkovCursor<'_, S> {
    fn push(&mut self, cell: &StateSet) -> Result<S> {
        let next = self
            .chain
            .extend(self.stack.last().map(|v| v.as_slice()), cell);
        let m = scalar::sum(next.iter().cloned());
        self.stack.push(next);
        Ok(m)
    }

    fn pop(&mut self) {
        self.stack.pop();
    }
}

/// A map `T` on state indices together with a measure `ν`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformationSpec<S: Scalar = f64> {
    map: Vec<usize>,
    measure: Distribution<S>,
    preserving: bool,
}

impl<S: Scalar> TransformationSpec<S> {
    /// When `declared_preserving`, checks `ν(T⁻¹{x}) = ν{x}` for every state.
    pub fn new(map: Vec<usize>, measure: Distribution<S>, declared_preserving: bool) -> Result<Self> {
        let k = map.len();
        if k == 0 {
            return Err(Error::InvalidArgument("empty map".into()));
        }
        if measure.len() != k {
            return Err(Error::SpaceMismatch {
                left: k,
                right: measure.len(),
            });
        }
        if let Some(&y) = map.iter().find(|&&y| y >= k) {
            return Err(Error::IndexOutOfRange {
                what: "state space",
                index: y,
                size: k,
            });
        }
        let spec = TransformationSpec {
            map,
            measure,
            preserving: declared_preserving,
        };
        if declared_preserving {
            let image = spec.measure.pushforward(&spec.map, k)?;
            let ok = image
                .weights()
                .iter()
                .zip(spec.measure.weights())
                .all(|(a, b)| a.close_to(b, STATIONARY_TOL));
            if !ok {
                let residual = image
                    .weights()
                    .iter()
                    .zip(spec.measure.weights())
                    .map(|(a, b)| (a.to_f64() - b.to_f64()).abs())
                    .fold(0.0, f64::max);
                return Err(Error::NotMeasurePreserving { residual });
            }
        }
        Ok(spec)
    }

    pub fn size(&self) -> usize {
        self.map.len()
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn measure(&self) -> &Distribution<S> {
        &self.measure
    }

    pub fn is_preserving(&self) -> bool {
        self.preserving
    }

    /// `(T, T_*ν)`.
    pub fn pushed(&self) -> TransformationSpec<S> {
        TransformationSpec {
            map: self.map.clone(),
            measure: self
                .measure
                .pushforward(&self.map, self.size())
                .expect("map is total on its own space"),
            preserving: self.preserving,
        }
    }
}

#[derive(Debug)]
struct FromTransformation<S: Scalar> {
    space: StateSpace,
    spec: TransformationSpec<S>,
}

/// Orbit process `x, Tx, T²x, ..` with `x ~ ν`.
pub fn from_transformation<S: Scalar>(
    space: StateSpace,
    spec: TransformationSpec<S>,
) -> Result<Oracle<S>> {
    check_len(&space, spec.size())?;
    Ok(Arc::new(FromTransformation { space, spec }))
}

impl<S: Scalar> CylinderOracle<S> for FromTransformation<S> {
    fn space(&self) -> &StateSpace {
        &self.space
    }

    fn mass(&self, word: &[StateSet]) -> Result<S> {
        let map = &self.spec.map;
        let follows = |x: usize| {
            let mut y = x;
            for (i, cell) in word.iter().enumerate() {
                if i > 0 {
                    y = map[y];
                }
                if !cell.contains(y) {
                    return false;
                }
            }
            true
        };
        Ok(scalar::sum(
            (0..self.spec.size())
                .filter(|&x| follows(x))
                .map(|x| self.spec.measure.weight(x).clone()),
        ))
    }

    fn is_stationary(&self) -> bool {
        self.spec.preserving
    }

    fn fast_cursor(&self) -> Option<Box<dyn Cursor<S> + '_>> {
        Some(Box::new(OrbitCursor {
            oracle: self,
            stack: Vec::new(),
        }))
    }
}

// Each level holds the surviving (start state, current position) pairs.
struct OrbitCursor<'a, S: Scalar> {
    oracle: &'a FromTransformation<S>,
    stack: Vec<Vec<(usize, usize)>>,
}

impl<S: Scalar> Cursor<S> for OrbitCursor<'_, S> {
    fn push(&mut self, cell: &StateSet) -> Result<S> {
        let map = &self.oracle.spec.map;
        let next: Vec<(usize, usize)> = match self.stack.last() {
            None => (0..map.len())
                .filter(|&x| cell.contains(x))
                .map(|x| (x, x))
                .collect(),
            Some(alive) => alive
                .iter()
                .map(|&(x, y)| (x, map[y]))
                .filter(|&(_, y)| cell.contains(y))
                .collect(),
        };
        let m = scalar::sum(
            next.iter()
                .map(|&(x, _)| self.oracle.spec.measure.weight(x).clone()),
        );
        self.stack.push(next);
        Ok(m)
    }

    fn pop(&mut self) {
        self.stack.pop();
    }
}

fn check_len(space: &StateSpace, len: usize) -> Result<()> {
    if space.size() != len {
        return Err(Error::SpaceMismatch {
            left: space.size(),
            right: len,
        });
    }
    Ok(())
}
