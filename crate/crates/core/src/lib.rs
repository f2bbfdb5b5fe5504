//! Stochastic dynamical entropy for processes on finite state spaces.
//!
//! A process is described by the masses of its cylinder sets ([`measures`]). For a
//! partition `P` of the state space, the block entropy `E(μ, P̄ⁿ)` is the Shannon
//! entropy of the induced law on length-`n` cell words, and the entropy of `μ` with
//! respect to `P` is `limsup E(μ, P̄ⁿ)/n` ([`entropy`]). [`topological`] covers
//! word complexity and growth rates of subshifts of finite type, and [`properties`]
//! turns the finite-n forms of the entropy inequalities and identities into seeded
//! numerical checks.

pub mod entropy;
pub mod error;
pub mod measures;
pub mod properties;
pub mod scalar;
pub mod space;
pub mod topological;

pub use error::{Error, Result};
pub use measures::{CylinderOracle, Oracle};
pub use space::{Distribution, Partition, StateSet, StateSpace};
