//! Subshifts of finite type: admissible word counts, their exponential growth rate,
//! the Perron eigenvalue of the transition matrix and the Parry measure.
//!
//! For a finite discrete alphabet the cover by single states refines every open
//! cover, so the minimal subcover of `S` by length-`n` cylinders is the set of
//! admissible `n`-words and its growth rate is the topological entropy.

use log::warn;
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::entropy::DEFAULT_BUDGET;
use crate::error::{Error, Result};
use crate::measures::{cursor, Cursor, CylinderOracle, MarkovSpec};
use crate::space::{state_set, Distribution, StateSpace};

/// Relative gap between the Collatz–Wielandt bounds at which power iteration stops.
pub const POWER_TOL: f64 = 1e-12;
/// Iteration cap for power iteration.
pub const POWER_MAX_ITER: usize = 10_000;

/// The set of paths `x` with `allowed[x_i][x_{i+1}]` for every `i`.
///
/// States with no outgoing or no incoming edge inside the surviving graph are
/// removed on construction. Indices keep referring to the original state space; a
/// removed state has an all-zero row and column.
#[derive(Debug, Clone, PartialEq)]
pub struct Sft {
    space: StateSpace,
    allowed: Vec<Vec<bool>>,
    alive: Vec<bool>,
}

impl Sft {
    pub fn new(space: StateSpace, allowed: Vec<Vec<u8>>) -> Result<Self> {
        let k = space.size();
        if allowed.len() != k {
            return Err(Error::SpaceMismatch {
                left: k,
                right: allowed.len(),
            });
        }
        let mut matrix = Vec::with_capacity(k);
        for (i, row) in allowed.iter().enumerate() {
            if row.len() != k {
                return Err(Error::InvalidMatrix(format!(
                    "row {i} has {} entries, expected {k}",
                    row.len()
                )));
            }
            let mut bits = Vec::with_capacity(k);
            for (j, &a) in row.iter().enumerate() {
                match a {
                    0 => bits.push(false),
                    1 => bits.push(true),
                    _ => {
                        return Err(Error::InvalidMatrix(format!(
                            "entry ({i},{j}) is {a}, expected 0 or 1"
                        )))
                    }
                }
            }
            matrix.push(bits);
        }

        let mut alive = vec![true; k];
        loop {
            let stranded: Vec<usize> = (0..k)
                .filter(|&i| alive[i])
                .filter(|&i| {
                    let out = (0..k).any(|j| alive[j] && matrix[i][j]);
                    let inc = (0..k).any(|j| alive[j] && matrix[j][i]);
                    !(out && inc)
                })
                .collect();
            if stranded.is_empty() {
                break;
            }
            for i in stranded {
                warn!("removing stranded state {}", space.label(i));
                alive[i] = false;
            }
        }
        if !alive.iter().any(|&a| a) {
            return Err(Error::EmptySubshift);
        }
        for i in 0..k {
            for j in 0..k {
                matrix[i][j] &= alive[i] && alive[j];
            }
        }
        Ok(Sft {
            space,
            allowed: matrix,
            alive,
        })
    }

    /// Full shift on `space`.
    pub fn full(space: StateSpace) -> Self {
        let k = space.size();
        Sft::new(space, vec![vec![1; k]; k]).expect("full shift is nonempty")
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn size(&self) -> usize {
        self.allowed.len()
    }

    pub fn allows(&self, i: usize, j: usize) -> bool {
        self.allowed[i][j]
    }

    /// Whether state `i` survived trimming.
    pub fn is_alive(&self, i: usize) -> bool {
        self.alive[i]
    }

    pub fn alive_states(&self) -> Vec<usize> {
        (0..self.size()).filter(|&i| self.alive[i]).collect()
    }

    /// The trimmed transition matrix as `0.0`/`1.0` entries.
    pub fn matrix(&self) -> Vec<Vec<f64>> {
        self.allowed
            .iter()
            .map(|row| row.iter().map(|&a| if a { 1.0 } else { 0.0 }).collect())
            .collect()
    }

    /// Whether every consecutive pair in `word` is allowed and every state survived trimming.
    pub fn admits(&self, word: &[usize]) -> bool {
        word.iter().all(|&s| s < self.size() && self.alive[s])
            && word.windows(2).all(|w| self.allowed[w[0]][w[1]])
    }

    /// Strongly connected components of the trimmed graph, each sorted, ordered by
    /// smallest state.
    pub fn components(&self) -> Vec<Vec<usize>> {
        strong_components(&self.matrix())
            .into_iter()
            .filter(|c| c.iter().all(|&i| self.alive[i]))
            .collect()
    }

    pub fn is_irreducible(&self) -> bool {
        self.components().len() == 1
    }
}

/// `N_S(n)`: number of admissible words of length `n`, the sum of the entries of
/// `allowed^(n-1)`.
pub fn word_complexity(s: &Sft, n: usize) -> Result<u128> {
    if n == 0 {
        return Err(Error::InvalidArgument("word length must be at least 1".into()));
    }
    let k = s.size();
    let mut counts: Vec<u128> = (0..k).map(|i| u128::from(s.alive[i])).collect();
    for _ in 1..n {
        let mut next = vec![0u128; k];
        for (i, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (j, slot) in next.iter_mut().enumerate() {
                if s.allowed[i][j] {
                    *slot = slot.checked_add(c).ok_or(Error::Overflow { n })?;
                }
            }
        }
        counts = next;
    }
    counts
        .iter()
        .try_fold(0u128, |acc, &c| acc.checked_add(c))
        .ok_or(Error::Overflow { n })
}

/// Perron root of one strongly connected block.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentRadius {
    pub states: Vec<usize>,
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Largest eigenvalue modulus of a nonnegative matrix, taken over its strongly
/// connected blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralRadius {
    pub value: f64,
    pub converged: bool,
    pub components: Vec<ComponentRadius>,
}

fn validate_nonnegative(m: &[Vec<f64>]) -> Result<usize> {
    let k = m.len();
    if k == 0 {
        return Err(Error::InvalidMatrix("empty matrix".into()));
    }
    for (i, row) in m.iter().enumerate() {
        if row.len() != k {
            return Err(Error::InvalidMatrix(format!(
                "matrix is not square: row {i} has {} entries, expected {k}",
                row.len()
            )));
        }
        if let Some(j) = row.iter().position(|&x| !(x.is_finite() && x >= 0.0)) {
            return Err(Error::InvalidMatrix(format!(
                "entry ({i},{j}) is {}, expected a finite nonnegative number",
                row[j]
            )));
        }
    }
    Ok(k)
}

fn strong_components(m: &[Vec<f64>]) -> Vec<Vec<usize>> {
    let k = m.len();
    let mut graph = DiGraph::<(), ()>::with_capacity(k, 0);
    let nodes: Vec<_> = (0..k).map(|_| graph.add_node(())).collect();
    for (i, row) in m.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            if x > 0.0 {
                graph.add_edge(nodes[i], nodes[j], ());
            }
        }
    }
    let mut comps: Vec<Vec<usize>> = tarjan_scc(&graph)
        .into_iter()
        .map(|c| {
            let mut states: Vec<usize> = c.into_iter().map(|n| n.index()).collect();
            states.sort_unstable();
            states
        })
        .collect();
    comps.sort();
    comps
}

struct PowerResult {
    value: f64,
    vector: Vec<f64>,
    converged: bool,
    iterations: usize,
}

/// Power iteration on `B + I` for an irreducible block `B`; `B + I` is primitive, so
/// the iteration converges from the all-ones vector. Stops when the Collatz–Wielandt
/// bounds `min_i (Mx)_i/x_i ≤ ρ(M) ≤ max_i (Mx)_i/x_i` agree to [`POWER_TOL`].
fn power_iterate(b: &[Vec<f64>]) -> PowerResult {
    let k = b.len();
    let mut x = vec![1.0; k];
    let (mut lo, mut hi) = (0.0, f64::INFINITY);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < POWER_MAX_ITER {
        iterations += 1;
        let y: Vec<f64> = (0..k)
            .map(|i| x[i] + b[i].iter().zip(&x).map(|(a, v)| a * v).sum::<f64>())
            .collect();
        lo = f64::INFINITY;
        hi = 0.0;
        for (yi, xi) in y.iter().zip(&x) {
            let r = yi / xi;
            lo = f64::min(lo, r);
            hi = f64::max(hi, r);
        }
        let top = y.iter().cloned().fold(0.0, f64::max);
        x = y.into_iter().map(|v| v / top).collect();
        if hi - lo <= POWER_TOL * hi {
            converged = true;
            break;
        }
    }
    let total: f64 = x.iter().sum();
    PowerResult {
        value: 0.5 * (lo + hi) - 1.0,
        vector: x.into_iter().map(|v| v / total).collect(),
        converged,
        iterations,
    }
}

fn submatrix(m: &[Vec<f64>], states: &[usize]) -> Vec<Vec<f64>> {
    states
        .iter()
        .map(|&i| states.iter().map(|&j| m[i][j]).collect())
        .collect()
}

fn transpose(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    (0..m.len())
        .map(|j| m.iter().map(|row| row[j]).collect())
        .collect()
}

/// Spectral radius of a square nonnegative matrix. Each strongly connected block is
/// handled by power iteration; a single state without a self-loop contributes 0.
pub fn spectral_radius(m: &[Vec<f64>]) -> Result<SpectralRadius> {
    validate_nonnegative(m)?;
    let mut components = Vec::new();
    for states in strong_components(m) {
        let radius = if states.len() == 1 && m[states[0]][states[0]] == 0.0 {
            ComponentRadius {
                states,
                value: 0.0,
                converged: true,
                iterations: 0,
            }
        } else {
            let r = power_iterate(&submatrix(m, &states));
            ComponentRadius {
                states,
                value: r.value,
                converged: r.converged,
                iterations: r.iterations,
            }
        };
        components.push(radius);
    }
    Ok(SpectralRadius {
        value: components.iter().map(|c| c.value).fold(0.0, f64::max),
        converged: components.iter().all(|c| c.converged),
        components,
    })
}

/// Perron root with right (`Mv = λv`) and left (`uM = λu`) eigenvectors, each
/// normalized to sum 1.
#[derive(Debug, Clone, PartialEq)]
pub struct PerronPair {
    pub value: f64,
    pub right: Vec<f64>,
    pub left: Vec<f64>,
    pub converged: bool,
}

/// Perron data of an irreducible nonnegative matrix.
pub fn perron_vectors(m: &[Vec<f64>]) -> Result<PerronPair> {
    validate_nonnegative(m)?;
    let components = strong_components(m);
    if components.len() != 1 {
        return Err(Error::Reducible { components });
    }
    let right = power_iterate(m);
    let left = power_iterate(&transpose(m));
    Ok(PerronPair {
        value: right.value,
        right: right.vector,
        left: left.vector,
        converged: right.converged && left.converged,
    })
}

/// Finite-horizon growth rates `(1/n) ln N_S(n)` alongside the limit `ln λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct TopologicalEstimate {
    /// `(n, N_S(n), ln N_S(n) / n)` for `n = 1..=horizon`.
    pub rows: Vec<(usize, u128, f64)>,
    pub spectral_radius: SpectralRadius,
    /// `ln λ`, the topological entropy.
    pub value: f64,
}

pub fn ht_estimate(s: &Sft, horizon: usize) -> Result<TopologicalEstimate> {
    if horizon < 2 {
        return Err(Error::InvalidArgument("horizon must be at least 2".into()));
    }
    let rows = (1..=horizon)
        .map(|n| {
            let count = word_complexity(s, n)?;
            Ok((n, count, (count as f64).ln() / n as f64))
        })
        .collect::<Result<Vec<_>>>()?;
    let spectral_radius = spectral_radius(&s.matrix())?;
    Ok(TopologicalEstimate {
        rows,
        value: spectral_radius.value.ln(),
        spectral_radius,
    })
}

/// The maximal-entropy Markov chain on an irreducible SFT:
/// `p_ij = a_ij v_j / (λ v_i)` started from `u_i v_i / Σ u v`.
///
/// States removed by trimming carry no initial mass and are never entered; they get
/// a self-loop row so the matrix stays stochastic.
pub fn parry_measure(s: &Sft) -> Result<MarkovSpec> {
    let alive = s.alive_states();
    let comps = s.components();
    if comps.len() != 1 {
        return Err(Error::Reducible { components: comps });
    }
    let sub = submatrix(&s.matrix(), &alive);
    let perron = perron_vectors(&sub)?;
    if !perron.converged {
        warn!("Perron iteration did not reach tolerance; Parry chain may be inexact");
    }
    let k = s.size();
    let lambda = perron.value;
    let mut transition = vec![vec![0.0; k]; k];
    let mut initial = vec![0.0; k];
    for (i, row) in transition.iter_mut().enumerate() {
        if !s.alive[i] {
            row[i] = 1.0;
        }
    }
    for (a, &i) in alive.iter().enumerate() {
        let row: Vec<f64> = alive
            .iter()
            .enumerate()
            .map(|(b, _)| sub[a][b] * perron.right[b] / (lambda * perron.right[a]))
            .collect();
        let total: f64 = row.iter().sum();
        for (b, &j) in alive.iter().enumerate() {
            transition[i][j] = row[b] / total;
        }
        initial[i] = perron.left[a] * perron.right[a];
    }
    let total: f64 = initial.iter().sum();
    initial.iter_mut().for_each(|x| *x /= total);
    MarkovSpec::new(transition, Distribution::new(initial)?, true)
}

/// Result of [`support_check`]: a positive-mass inadmissible word, if one was found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportReport {
    pub supported: bool,
    pub witness: Option<Vec<usize>>,
    pub words_checked: u64,
}

/// Whether every single-state word of length `≤ horizon` with positive mass is
/// admissible in `s`. Only admissible positive-mass words are extended, so the
/// search visits at most `Σ N_S(n)` words; more than [`DEFAULT_BUDGET`] is a budget error.
pub fn support_check(mu: &dyn CylinderOracle, s: &Sft, horizon: usize) -> Result<SupportReport> {
    let k = s.size();
    if mu.space().size() != k {
        return Err(Error::SpaceMismatch {
            left: mu.space().size(),
            right: k,
        });
    }
    let singles: Vec<_> = (0..k).map(|i| state_set(k, [i])).collect();
    let mut report = SupportReport {
        supported: true,
        witness: None,
        words_checked: 0,
    };
    let mut word = Vec::with_capacity(horizon);
    let mut c = cursor(mu);
    search(c.as_mut(), s, &singles, horizon, &mut word, &mut report)?;
    Ok(report)
}

fn search(
    c: &mut dyn Cursor<f64>,
    s: &Sft,
    singles: &[crate::space::StateSet],
    horizon: usize,
    word: &mut Vec<usize>,
    report: &mut SupportReport,
) -> Result<()> {
    if word.len() == horizon {
        return Ok(());
    }
    for (x, cell) in singles.iter().enumerate() {
        report.words_checked += 1;
        if report.words_checked > DEFAULT_BUDGET {
            return Err(Error::Budget {
                cap: DEFAULT_BUDGET,
            });
        }
        let m = c.push(cell)?;
        word.push(x);
        if m > 0.0 {
            let step_ok = word.len() < 2 || s.allowed[word[word.len() - 2]][x];
            if !(s.alive[x] && step_ok) {
                report.supported = false;
                report.witness = Some(word.clone());
                return Ok(());
            }
            search(c, s, singles, horizon, word, report)?;
            if !report.supported {
                return Ok(());
            }
        }
        word.pop();
        c.pop();
    }
    Ok(())
}
