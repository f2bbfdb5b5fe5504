//! Seeded verification suite. Each registered check draws random instances and
//! evaluates the finite-`n` inequality or identity behind one entropy statement,
//! reporting the largest violation and the worst instances.

use std::fmt;

use rand::SeedableRng;
use rayon::prelude::*;

use crate::entropy::{Enumerator, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use crate::measures::CylinderOracle;
use crate::space::{Partition, StateSpace};
use crate::topological::Sft;

mod checks;
pub mod gen;

use gen::Rng64;

/// Number of witnesses kept per report.
pub const MAX_WITNESSES: usize = 3;

/// Instance generator settings shared by all checks.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckConfig {
    /// Instances per check; `None` uses each check's default.
    pub instances: Option<usize>,
    /// Largest state space drawn for single-space checks.
    pub max_states: usize,
    /// Largest block length `n`.
    pub max_len: usize,
    /// Horizon for estimate-level comparisons.
    pub horizon: usize,
    /// Largest block length for the dilation identity.
    pub dilation_len: usize,
    pub budget: u64,
    /// Subshifts for the variational check; empty means the golden mean shift and
    /// two random irreducible subshifts on at most four states.
    pub sfts: Vec<(String, Sft)>,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            instances: None,
            max_states: 5,
            max_len: 6,
            horizon: 12,
            dilation_len: 8,
            budget: DEFAULT_BUDGET,
            sfts: Vec::new(),
        }
    }
}

impl CheckConfig {
    /// Defaults with the golden mean shift as the only subshift.
    pub fn golden_mean() -> Self {
        CheckConfig {
            sfts: vec![("golden_mean".to_string(), golden_mean())],
            ..Self::default()
        }
    }
}

/// The subshift on `{0, 1}` forbidding `11`.
pub fn golden_mean() -> Sft {
    Sft::new(
        StateSpace::indexed(2).expect("two states"),
        vec![vec![1, 1], vec![1, 0]],
    )
    .expect("golden mean shift is nonempty")
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Pass,
    Fail,
    /// The check could not finish, e.g. the enumeration budget ran out.
    Error(String),
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Pass => f.write_str("pass"),
            Verdict::Fail => f.write_str("fail"),
            Verdict::Error(_) => f.write_str("error"),
        }
    }
}

/// One evaluated comparison `lhs ≤ rhs` or `lhs = rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub inputs: String,
    pub lhs: f64,
    pub rhs: f64,
    pub violation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: String,
    /// The statement checked.
    pub anchor: String,
    pub instances: usize,
    pub max_violation: f64,
    pub tolerance: f64,
    /// The comparisons with the largest violations, worst first.
    pub witnesses: Vec<Witness>,
    pub verdict: Verdict,
}

/// A registered check.
#[derive(Clone, Copy)]
pub struct CheckSpec {
    pub name: &'static str,
    pub anchor: &'static str,
    pub tolerance: f64,
    pub default_instances: usize,
    run: fn(&mut Ctx) -> Result<()>,
}

impl fmt::Debug for CheckSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CheckSpec")
            .field("name", &self.name)
            .field("tolerance", &self.tolerance)
            .finish()
    }
}

const REGISTRY: &[CheckSpec] = &[
    CheckSpec {
        name: "bound_log_cells",
        anchor: "H^sd(mu,P) <= log|P|; finite n: 0 <= E(mu,P^n) <= n log|P|",
        tolerance: 1e-10,
        default_instances: 100,
        run: checks::bound_log_cells,
    },
    CheckSpec {
        name: "refinement_monotone",
        anchor: "P refined by Q implies H^sd(mu,P) <= H^sd(mu,Q); finite n: E(mu,P^n) <= E(mu,Q^n)",
        tolerance: 1e-10,
        default_instances: 100,
        run: checks::refinement_monotone,
    },
    CheckSpec {
        name: "join_subadditive",
        anchor: "H^sd(mu,P v Q) <= H^sd(mu,P) + H^sd(mu,Q); finite n: E(mu,(PvQ)^n) <= E(mu,P^n) + E(mu,Q^n)",
        tolerance: 1e-10,
        default_instances: 100,
        run: checks::join_subadditive,
    },
    CheckSpec {
        name: "stationary_block_equality",
        anchor: "stationary mu: H^sd(mu,P) = E(Sh,mu,P^m) for every m; increment estimates agree across m = 1,2,3",
        tolerance: 2e-3,
        default_instances: 50,
        run: checks::stationary_block_equality,
    },
    CheckSpec {
        name: "shift_invariance",
        anchor: "H^sd(Sh_*mu,P) = H^sd(mu,P); finite n: E(Sh_*mu,P^(n-1)) <= E(mu,P^n) <= E(Sh_*mu,P^(n-1)) + log|P|",
        tolerance: 1e-10,
        default_instances: 100,
        run: checks::shift_invariance,
    },
    CheckSpec {
        name: "convexity",
        anchor: "H^sd(t mu + (1-t) rho) <= t H^sd(mu) + (1-t) H^sd(rho); finite n sandwich with slack log 2",
        tolerance: 1e-10,
        default_instances: 100,
        run: checks::convexity,
    },
    CheckSpec {
        name: "restriction",
        anchor: "r_n <= (n+1)k - 1 implies H^sd(R_*mu) <= k H^sd(mu); finite n: E(R_*mu,P^n) <= E(mu,P^(kn))",
        tolerance: 1e-10,
        default_instances: 100,
        run: checks::restriction,
    },
    CheckSpec {
        name: "dilation",
        anchor: "H^sd(D_*mu) = H^sd(mu)/k for the k-dilation D; finite n: E(D_*mu,P^n) = E(mu,P^ceil(n/k))",
        tolerance: 1e-12,
        default_instances: 50,
        run: checks::dilation,
    },
    CheckSpec {
        name: "factor",
        anchor: "H^sd(f_*mu) <= H^sd(mu) for the coordinatewise map f; finite n: E(f_*mu,Q^n) = E(mu,(f^-1 Q)^n)",
        tolerance: 1e-10,
        default_instances: 50,
        run: checks::factor,
    },
    CheckSpec {
        name: "marginals",
        anchor: "pi on (XxY)^inf with marginals mu, rho: max(H^sd(mu),H^sd(rho)) <= H^sd(pi) <= H^sd(mu) + H^sd(rho); finite n with P x Q",
        tolerance: 1e-10,
        default_instances: 100,
        run: checks::marginals,
    },
    CheckSpec {
        name: "product_additivity",
        anchor: "one of mu, rho stationary: H^sd(mu x rho) = H^sd(mu) + H^sd(rho); finite n: E(mu x rho,(PxQ)^n) = E(mu,P^n) + E(rho,Q^n)",
        tolerance: 1e-10,
        default_instances: 50,
        run: checks::product_additivity,
    },
    CheckSpec {
        name: "block_recode",
        anchor: "mu read on (X^k)^inf: H^sd = k H^sd_X(mu); finite n: E_{X^k}(mu,singletons^n) = E_X(mu,singletons^(nk))",
        tolerance: 1e-10,
        default_instances: 50,
        run: checks::block_recode,
    },
    CheckSpec {
        name: "transformation_equality",
        anchor: "T preserving nu: H^sd(mu_(T,nu)) = E(T,nu); finite n: E(mu_(T,nu),P^n) = E(nu, join of T^-i P for i < n)",
        tolerance: 1e-12,
        default_instances: 50,
        run: checks::transformation_equality,
    },
    CheckSpec {
        name: "conditional_lemma",
        anchor: "stationary mu: H^sd(mu,P) <= H^sd(mu,Q) + H_mu(P^1|Q^1); finite n: E(mu,P^n) <= E(mu,Q^n) + n H_mu(P^1|Q^1)",
        tolerance: 1e-10,
        default_instances: 100,
        run: checks::conditional_lemma,
    },
    CheckSpec {
        name: "variational",
        anchor: "stationary mu with supp(mu) in S: H^sd(mu) <= H^t(S); Parry measure attains equality",
        tolerance: 1e-9,
        default_instances: 50,
        run: checks::variational,
    },
];

pub fn registry() -> &'static [CheckSpec] {
    REGISTRY
}

pub fn check_names() -> Vec<String> {
    REGISTRY.iter().map(|c| c.name.to_string()).collect()
}

fn lookup(name: &str) -> Result<&'static CheckSpec> {
    REGISTRY
        .iter()
        .find(|c| c.name == name)
        .ok_or_else(|| Error::UnknownCheck {
            name: name.to_string(),
            registry: check_names(),
        })
}

/// FNV-1a, so each check draws from its own stream for a given seed.
fn name_hash(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    })
}

pub(crate) struct Ctx<'a> {
    pub rng: Rng64,
    pub config: &'a CheckConfig,
    pub instances: usize,
    pub enumerator: Enumerator,
    evaluated: usize,
    max_violation: f64,
    witnesses: Vec<Witness>,
}

impl Ctx<'_> {
    pub fn entropy(&self, mu: &dyn CylinderOracle, p: &Partition, n: usize) -> Result<f64> {
        self.enumerator.block_entropy(mu, p, n)
    }

    /// Counts one generated instance.
    pub fn instance(&mut self) {
        self.evaluated += 1;
    }

    /// Records `lhs ≤ rhs`.
    pub fn le(&mut self, lhs: f64, rhs: f64, inputs: impl FnOnce() -> String) {
        let violation = if lhs.is_nan() || rhs.is_nan() {
            f64::INFINITY
        } else {
            (lhs - rhs).max(0.0)
        };
        self.record(lhs, rhs, violation, inputs);
    }

    /// Records `lhs = rhs`.
    pub fn eq(&mut self, lhs: f64, rhs: f64, inputs: impl FnOnce() -> String) {
        let violation = if lhs.is_nan() || rhs.is_nan() {
            f64::INFINITY
        } else {
            (lhs - rhs).abs()
        };
        self.record(lhs, rhs, violation, inputs);
    }

    fn record(&mut self, lhs: f64, rhs: f64, violation: f64, inputs: impl FnOnce() -> String) {
        self.max_violation = self.max_violation.max(violation);
        let full = self.witnesses.len() == MAX_WITNESSES;
        if full && violation <= self.witnesses[MAX_WITNESSES - 1].violation {
            return;
        }
        let at = self.witnesses.partition_point(|w| w.violation >= violation);
        self.witnesses.insert(
            at,
            Witness {
                inputs: inputs(),
                lhs,
                rhs,
                violation,
            },
        );
        self.witnesses.truncate(MAX_WITNESSES);
    }
}

/// Runs one registered check. Deterministic in `(name, config, seed)`.
pub fn run_check(name: &str, config: &CheckConfig, seed: u64) -> Result<CheckReport> {
    let spec = lookup(name)?;
    Ok(execute(spec, config, seed))
}

fn execute(spec: &CheckSpec, config: &CheckConfig, seed: u64) -> CheckReport {
    let mut ctx = Ctx {
        rng: Rng64::seed_from_u64(seed ^ name_hash(spec.name)),
        config,
        instances: config.instances.unwrap_or(spec.default_instances),
        enumerator: Enumerator {
            budget: config.budget,
            parallel: false,
        },
        evaluated: 0,
        max_violation: 0.0,
        witnesses: Vec::new(),
    };
    let outcome = (spec.run)(&mut ctx);
    let verdict = match outcome {
        Err(e) => Verdict::Error(e.to_string()),
        Ok(()) if ctx.max_violation <= spec.tolerance => Verdict::Pass,
        Ok(()) => Verdict::Fail,
    };
    CheckReport {
        name: spec.name.to_string(),
        anchor: spec.anchor.to_string(),
        instances: ctx.evaluated,
        max_violation: ctx.max_violation,
        tolerance: spec.tolerance,
        witnesses: ctx.witnesses,
        verdict,
    }
}

/// Runs the named checks in parallel; reports come back in registry order.
pub fn run_selected(names: &[String], config: &CheckConfig, seed: u64) -> Result<Vec<CheckReport>> {
    if names.is_empty() {
        return Err(Error::InvalidArgument("empty check filter".into()));
    }
    let mut specs = names
        .iter()
        .map(|n| lookup(n))
        .collect::<Result<Vec<_>>>()?;
    specs.sort_by_key(|s| REGISTRY.iter().position(|r| r.name == s.name));
    specs.dedup_by_key(|s| s.name);
    Ok(specs
        .par_iter()
        .map(|spec| execute(spec, config, seed))
        .collect())
}

/// Runs every registered check.
pub fn run_all(config: &CheckConfig, seed: u64) -> Vec<CheckReport> {
    REGISTRY
        .par_iter()
        .map(|spec| execute(spec, config, seed))
        .collect()
}

#[cfg(test)]
mod tests;
