//! Path-space measures given by their cylinder masses.
//!
//! A [`CylinderOracle`] answers `μ(A_0 × .. × A_{n-1} × X × ..)` for any finite word of
//! state subsets. That family of finite-dimensional marginals is all entropy needs, so
//! every process in this crate is an oracle: i.i.d. and independent sequences, Markov
//! chains, orbits of a map, and pushforwards/combinations of other oracles.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::space::{StateSet, StateSpace};

mod combinators;
mod consistency;
mod processes;
pub(crate) mod rect;

pub use combinators::{
    block_recode, convex_mix, dilation_pushforward, factor_pushforward, product_measure,
    restriction_pushforward, shift_pushforward, IndexSequence,
};
pub use consistency::{check_consistency, ConsistencyReport};
pub use processes::{
    from_transformation, iid, markov, product_sequence, stationary_vector, MarkovSpec,
    TransformationSpec, STATIONARY_TOL,
};

/// Finite-dimensional marginals of a probability measure on `X^∞`.
pub trait CylinderOracle<S: Scalar = f64>: Send + Sync + fmt::Debug {
    fn space(&self) -> &StateSpace;

    /// Mass of the cylinder over `word`. Cells must be subsets of [`Self::space`];
    /// [`oracle_mass`] checks that before delegating here.
    fn mass(&self, word: &[StateSet]) -> Result<S>;

    /// Whether the measure is declared shift-invariant.
    fn is_stationary(&self) -> bool {
        false
    }

    /// Incremental evaluator, when the oracle has one cheaper than re-evaluating
    /// whole words.
    fn fast_cursor(&self) -> Option<Box<dyn Cursor<S> + '_>> {
        None
    }
}

/// Shared handle to an oracle.
pub type Oracle<S = f64> = Arc<dyn CylinderOracle<S>>;

/// Depth-first evaluator: `push` extends the current word by one cell and returns
/// the mass of the extended word; `pop` undoes the last push.
pub trait Cursor<S>: Send {
    fn push(&mut self, cell: &StateSet) -> Result<S>;
    fn pop(&mut self);
}

struct WordCursor<'a, S: Scalar> {
    oracle: &'a dyn CylinderOracle<S>,
    word: Vec<StateSet>,
}

impl<S: Scalar> Cursor<S> for WordCursor<'_, S> {
    fn push(&mut self, cell: &StateSet) -> Result<S> {
        self.word.push(cell.clone());
        self.oracle.mass(&self.word)
    }

    fn pop(&mut self) {
        self.word.pop();
    }
}

/// Best available cursor for `mu`.
pub fn cursor<'a, S: Scalar>(mu: &'a dyn CylinderOracle<S>) -> Box<dyn Cursor<S> + 'a> {
    mu.fast_cursor().unwrap_or_else(|| {
        Box::new(WordCursor {
            oracle: mu,
            word: Vec::new(),
        })
    })
}

/// Checked cylinder mass.
pub fn oracle_mass<S: Scalar>(mu: &dyn CylinderOracle<S>, word: &[StateSet]) -> Result<S> {
    check_cells(mu.space().size(), word)?;
    mu.mass(word)
}

pub(crate) fn check_cells(size: usize, word: &[StateSet]) -> Result<()> {
    for cell in word {
        if let Some(s) = cell.ones().find(|&s| s >= size) {
            return Err(Error::IndexOutOfRange {
                what: "state space",
                index: s,
                size,
            });
        }
    }
    Ok(())
}

pub(crate) fn check_same_space(a: &StateSpace, b: &StateSpace) -> Result<()> {
    if a.size() != b.size() {
        return Err(Error::SpaceMismatch {
            left: a.size(),
            right: b.size(),
        });
    }
    Ok(())
}
