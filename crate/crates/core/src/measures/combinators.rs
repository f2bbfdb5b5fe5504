//! Measures built from other measures: mixtures, products and pushforwards along
//! path-space maps (shift, restriction, dilation, coordinatewise factor maps, and the
//! regrouping of `X^∞` as `(X^k)^∞`).

use std::sync::Arc;

use super::{check_same_space, cursor, rect, Cursor, CylinderOracle, Oracle};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::space::{full_set, StateSet, StateSpace};

#[derive(Debug)]
struct ConvexMix<S: Scalar> {
    t: S,
    mu: Oracle<S>,
    rho: Oracle<S>,
}

/// `t·μ + (1-t)·ρ`.
pub fn convex_mix<S: Scalar>(t: S, mu: Oracle<S>, rho: Oracle<S>) -> Result<Oracle<S>> {
    if t.is_negative() || t > S::one() {
        return Err(Error::InvalidArgument(format!(
            "mixing weight {} outside [0, 1]",
            t.to_f64()
        )));
    }
    check_same_space(mu.space(), rho.space())?;
    Ok(Arc::new(ConvexMix { t, mu, rho }))
}

impl<S: Scalar> CylinderOracle<S> for ConvexMix<S> {
    fn space(&self) -> &StateSpace {
        self.mu.space()
    }

    fn mass(&self, word: &[StateSet]) -> Result<S> {
        let a = self.mu.mass(word)?;
        let b = self.rho.mass(word)?;
        Ok(self.t.clone() * a + (S::one() - self.t.clone()) * b)
    }

    fn is_stationary(&self) -> bool {
        self.mu.is_stationary() && self.rho.is_stationary()
    }

    fn fast_cursor(&self) -> Option<Box<dyn Cursor<S> + '_>> {
        Some(Box::new(MixCursor {
            t: self.t.clone(),
            mu: cursor(self.mu.as_ref()),
            rho: cursor(self.rho.as_ref()),
        }))
    }
}

struct MixCursor<'a, S> {
    t: S,
    mu: Box<dyn Cursor<S> + 'a>,
    rho: Box<dyn Cursor<S> + 'a>,
}

impl<S: Scalar> Cursor<S> for MixCursor<'_, S> {
    fn push(&mut self, cell: &StateSet) -> Result<S> {
        let a = self.mu.push(cell)?;
        let b = self.rho.push(cell)?;
        Ok(self.t.clone() * a + (S::one() - self.t.clone()) * b)
    }

    fn pop(&mut self) {
        self.mu.pop();
        self.rho.pop();
    }
}

#[derive(Debug)]
struct ProductMeasure<S: Scalar> {
    space: StateSpace,
    dims: [usize; 2],
    mu: Oracle<S>,
    rho: Oracle<S>,
}

/// `μ × ρ` on `(X × Y)^∞`; state `(x, y)` has index `x * |Y| + y`.
pub fn product_measure<S: Scalar>(mu: Oracle<S>, rho: Oracle<S>) -> Result<Oracle<S>> {
    let space = mu.space().product(rho.space());
    let dims = [mu.space().size(), rho.space().size()];
    Ok(Arc::new(ProductMeasure {
        space,
        dims,
        mu,
        rho,
    }))
}

impl<S: Scalar> ProductMeasure<S> {
    fn sum_rectangles(
        &self,
        pieces: &[Vec<Vec<StateSet>>],
        xs: &mut Vec<StateSet>,
        ys: &mut Vec<StateSet>,
    ) -> Result<S> {
        let depth = xs.len();
        if depth == pieces.len() {
            return Ok(self.mu.mass(xs)? * self.rho.mass(ys)?);
        }
        let mut total = S::zero();
        for piece in &pieces[depth] {
            xs.push(piece[0].clone());
            ys.push(piece[1].clone());
            let m = self.sum_rectangles(pieces, xs, ys);
            xs.pop();
            ys.pop();
            total = total + m?;
        }
        Ok(total)
    }
}

impl<S: Scalar> CylinderOracle<S> for ProductMeasure<S> {
    fn space(&self) -> &StateSpace {
        &self.space
    }

    fn mass(&self, word: &[StateSet]) -> Result<S> {
        let pieces: Vec<_> = word
            .iter()
            .map(|cell| rect::decompose(cell, &self.dims))
            .collect();
        self.sum_rectangles(&pieces, &mut Vec::new(), &mut Vec::new())
    }

    fn is_stationary(&self) -> bool {
        self.mu.is_stationary() && self.rho.is_stationary()
    }
}

#[derive(Debug)]
struct Shift<S: Scalar> {
    mu: Oracle<S>,
}

/// `Sh_*μ`: drop the first coordinate.
pub fn shift_pushforward<S: Scalar>(mu: Oracle<S>) -> Oracle<S> {
    Arc::new(Shift { mu })
}

impl<S: Scalar> CylinderOracle<S> for Shift<S> {
    fn space(&self) -> &StateSpace {
        self.mu.space()
    }

    fn mass(&self, word: &[StateSet]) -> Result<S> {
        let mut shifted = Vec::with_capacity(word.len() + 1);
        shifted.push(full_set(self.space().size()));
        shifted.extend_from_slice(word);
        self.mu.mass(&shifted)
    }

    fn is_stationary(&self) -> bool {
        self.mu.is_stationary()
    }
}

/// Strictly increasing sequence `r_0 < r_1 < ..`: an explicit prefix, continued
/// with a constant step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSequence {
    prefix: Vec<usize>,
    step: usize,
}

impl IndexSequence {
    pub fn new(prefix: Vec<usize>, step: usize) -> Result<Self> {
        if prefix.is_empty() {
            return Err(Error::InvalidArgument("index sequence needs a first term".into()));
        }
        if step == 0 {
            return Err(Error::InvalidArgument("index sequence step must be positive".into()));
        }
        if prefix.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(
                "index sequence must be strictly increasing".into(),
            ));
        }
        Ok(IndexSequence { prefix, step })
    }

    /// `r_n = start + n·step`.
    pub fn arithmetic(start: usize, step: usize) -> Result<Self> {
        Self::new(vec![start], step)
    }

    pub fn term(&self, n: usize) -> usize {
        match self.prefix.get(n) {
            Some(&r) => r,
            None => {
                let last = *self.prefix.last().expect("prefix is nonempty");
                last + (n + 1 - self.prefix.len()) * self.step
            }
        }
    }

    /// Whether `r_n ≤ (n+1)k - 1` for every `n`.
    pub fn within_rate(&self, k: usize) -> bool {
        // Past the prefix the slack changes by k - step per term.
        let bound = |n: usize| (n + 1) * k;
        let prefix_ok = (0..self.prefix.len()).all(|n| self.term(n) < bound(n));
        prefix_ok && self.step <= k
    }

    fn is_arithmetic(&self) -> bool {
        self.prefix.windows(2).all(|w| w[1] - w[0] == self.step)
    }
}

#[derive(Debug)]
struct Restriction<S: Scalar> {
    mu: Oracle<S>,
    indices: IndexSequence,
}

/// `ℜ_*μ` for `ℜ(x) = (x_{r_0}, x_{r_1}, ..)`.
pub fn restriction_pushforward<S: Scalar>(mu: Oracle<S>, indices: IndexSequence) -> Oracle<S> {
    Arc::new(Restriction { mu, indices })
}

impl<S: Scalar> CylinderOracle<S> for Restriction<S> {
    fn space(&self) -> &StateSpace {
        self.mu.space()
    }

    fn mass(&self, word: &[StateSet]) -> Result<S> {
        let Some(last) = word.len().checked_sub(1) else {
            return Ok(S::one());
        };
        let full = full_set(self.space().size());
        let mut spread = vec![full; self.indices.term(last) + 1];
        for (j, cell) in word.iter().enumerate() {
            spread[self.indices.term(j)] = cell.clone();
        }
        self.mu.mass(&spread)
    }

    fn is_stationary(&self) -> bool {
        self.mu.is_stationary() && self.indices.is_arithmetic()
    }
}

#[derive(Debug)]
struct Dilation<S: Scalar> {
    mu: Oracle<S>,
    k: usize,
}

/// `𝔇_*μ` for the k-dilation `(x_0, x_1, ..) ↦ (x_0 ×k, x_1 ×k, ..)`.
pub fn dilation_pushforward<S: Scalar>(mu: Oracle<S>, k: usize) -> Result<Oracle<S>> {
    if k == 0 {
        return Err(Error::InvalidArgument("dilation factor must be positive".into()));
    }
    Ok(Arc::new(Dilation { mu, k }))
}

impl<S: Scalar> CylinderOracle<S> for Dilation<S> {
    fn space(&self) -> &StateSpace {
        self.mu.space()
    }

    fn mass(&self, word: &[StateSet]) -> Result<S> {
        let mut blocks = Vec::with_capacity(word.len().div_ceil(self.k));
        for chunk in word.chunks(self.k) {
            let mut meet = chunk[0].clone();
            for cell in &chunk[1..] {
                meet.intersect_with(cell);
            }
            if meet.is_clear() {
                return Ok(S::zero());
            }
            blocks.push(meet);
        }
        self.mu.mass(&blocks)
    }

    fn is_stationary(&self) -> bool {
        self.k == 1 && self.mu.is_stationary()
    }
}

#[derive(Debug)]
struct Factor<S: Scalar> {
    mu: Oracle<S>,
    map: Vec<usize>,
    target: StateSpace,
}

/// `f^∞_*μ` for a state map `f: X → Y` given as `map[x] = f(x)`.
pub fn factor_pushforward<S: Scalar>(
    map: Vec<usize>,
    target: StateSpace,
    mu: Oracle<S>,
) -> Result<Oracle<S>> {
    if map.len() != mu.space().size() {
        return Err(Error::SpaceMismatch {
            left: mu.space().size(),
            right: map.len(),
        });
    }
    if let Some(&y) = map.iter().find(|&&y| y >= target.size()) {
        return Err(Error::IndexOutOfRange {
            what: "target space",
            index: y,
            size: target.size(),
        });
    }
    Ok(Arc::new(Factor { mu, map, target }))
}

impl<S: Scalar> CylinderOracle<S> for Factor<S> {
    fn space(&self) -> &StateSpace {
        &self.target
    }

    fn mass(&self, word: &[StateSet]) -> Result<S> {
        let n = self.map.len();
        let pulled: Vec<StateSet> = word
            .iter()
            .map(|cell| {
                let mut set = StateSet::with_capacity(n);
                for (x, &y) in self.map.iter().enumerate() {
                    if cell.contains(y) {
                        set.insert(x);
                    }
                }
                set
            })
            .collect();
        self.mu.mass(&pulled)
    }

    fn is_stationary(&self) -> bool {
        self.mu.is_stationary()
    }
}

#[derive(Debug)]
struct BlockRecode<S: Scalar> {
    mu: Oracle<S>,
    space: StateSpace,
    dims: Vec<usize>,
}

/// `μ` read as a measure on `(X^k)^∞` by grouping consecutive coordinates into
/// k-tuples. States of `X^k` use the [`StateSpace::power`] encoding.
pub fn block_recode<S: Scalar>(mu: Oracle<S>, k: usize) -> Result<Oracle<S>> {
    if k == 0 {
        return Err(Error::InvalidArgument("block length must be positive".into()));
    }
    let space = mu.space().power(k);
    let dims = vec![mu.space().size(); k];
    Ok(Arc::new(BlockRecode { mu, space, dims }))
}

impl<S: Scalar> BlockRecode<S> {
    fn sum_rectangles(
        &self,
        pieces: &[Vec<Vec<StateSet>>],
        depth: usize,
        walker: &mut dyn super::Cursor<S>,
    ) -> Result<S> {
        if depth == pieces.len() {
            return Ok(S::one());
        }
        let mut total = S::zero();
        for piece in &pieces[depth] {
            let mut pushed = 0;
            let mut m = S::one();
            for cell in piece {
                m = walker.push(cell)?;
                pushed += 1;
                if m.is_zero() {
                    break;
                }
            }
            if !m.is_zero() {
                m = if depth + 1 == pieces.len() {
                    m
                } else {
                    self.sum_rectangles(pieces, depth + 1, walker)?
                };
                total = total + m;
            }
            for _ in 0..pushed {
                walker.pop();
            }
        }
        Ok(total)
    }
}

impl<S: Scalar> CylinderOracle<S> for BlockRecode<S> {
    fn space(&self) -> &StateSpace {
        &self.space
    }

    fn mass(&self, word: &[StateSet]) -> Result<S> {
        if word.is_empty() {
            return Ok(S::one());
        }
        let pieces: Vec<_> = word
            .iter()
            .map(|cell| rect::decompose(cell, &self.dims))
            .collect();
        let mut walker = cursor(self.mu.as_ref());
        self.sum_rectangles(&pieces, 0, walker.as_mut())
    }

    fn is_stationary(&self) -> bool {
        self.mu.is_stationary()
    }
}
