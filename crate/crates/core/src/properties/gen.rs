//! Seeded random instances: distributions, stochastic matrices, partitions, maps,
//! subshifts and a zoo of path-space measures.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::error::Result;
use crate::measures::{
    block_recode, convex_mix, dilation_pushforward, factor_pushforward, from_transformation, iid,
    markov, product_measure, product_sequence, restriction_pushforward, shift_pushforward,
    stationary_vector, IndexSequence, MarkovSpec, Oracle, TransformationSpec,
};
use crate::space::{Distribution, Partition, StateSpace};
use crate::topological::Sft;

pub type Rng64 = ChaCha8Rng;

/// A generated measure with a short description for witnesses.
#[derive(Debug, Clone)]
pub struct Instance {
    pub oracle: Oracle,
    pub label: String,
}

/// Uniform point of the simplex: normalized i.i.d. exponentials.
pub fn dirichlet(rng: &mut Rng64, k: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

/// Like [`dirichlet`] but each entry is dropped with probability `zero_prob`,
/// keeping at least one.
pub fn sparse_dirichlet(rng: &mut Rng64, k: usize, zero_prob: f64) -> Vec<f64> {
    let mut w = dirichlet(rng, k);
    let keep = rng.random_range(0..k);
    for (i, x) in w.iter_mut().enumerate() {
        if i != keep && rng.random_bool(zero_prob) {
            *x = 0.0;
        }
    }
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

pub fn distribution(rng: &mut Rng64, k: usize) -> Distribution {
    let w = if rng.random_bool(0.25) {
        sparse_dirichlet(rng, k, 0.5)
    } else {
        dirichlet(rng, k)
    };
    Distribution::new(w).expect("normalized weights")
}

/// Row-stochastic matrix with Dirichlet rows; `zero_prob > 0` makes it sparse.
pub fn stochastic_matrix(rng: &mut Rng64, k: usize, zero_prob: f64) -> Vec<Vec<f64>> {
    (0..k)
        .map(|_| {
            if zero_prob > 0.0 {
                sparse_dirichlet(rng, k, zero_prob)
            } else {
                dirichlet(rng, k)
            }
        })
        .collect()
}

/// Stationary chain with a dense (hence irreducible and aperiodic) matrix.
pub fn stationary_markov(rng: &mut Rng64, k: usize) -> Result<MarkovSpec> {
    MarkovSpec::with_stationary_initial(stochastic_matrix(rng, k, 0.0))
}

/// Random partition of `k` states into `m ≤ max_cells` nonempty cells: a uniformly
/// random surjection onto a uniformly chosen number of cells.
pub fn partition(rng: &mut Rng64, k: usize, max_cells: usize) -> Partition {
    let m = rng.random_range(1..=k.min(max_cells).max(1));
    let mut order: Vec<usize> = (0..k).collect();
    order.shuffle(rng);
    let mut assignment = vec![0; k];
    for (pos, &s) in order.iter().enumerate() {
        assignment[s] = if pos < m { pos } else { rng.random_range(0..m) };
    }
    Partition::from_assignment(&assignment).expect("surjective assignment")
}

pub fn map(rng: &mut Rng64, from: usize, to: usize) -> Vec<usize> {
    (0..from).map(|_| rng.random_range(0..to)).collect()
}

/// A measure invariant under `t`: random weights on its cycles, uniform within each.
pub fn invariant_measure(rng: &mut Rng64, t: &[usize]) -> Distribution {
    let k = t.len();
    let mut cycle_of = vec![usize::MAX; k];
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    for start in 0..k {
        // iterating k times from any state lands on a cycle
        let mut x = start;
        for _ in 0..k {
            x = t[x];
        }
        if cycle_of[x] != usize::MAX {
            continue;
        }
        let mut cycle = vec![x];
        let mut y = t[x];
        while y != x {
            cycle.push(y);
            y = t[y];
        }
        for &c in &cycle {
            cycle_of[c] = cycles.len();
        }
        cycles.push(cycle);
    }
    let weights = dirichlet(rng, cycles.len());
    let mut w = vec![0.0; k];
    for (cycle, cw) in cycles.iter().zip(weights) {
        for &c in cycle {
            w[c] = cw / cycle.len() as f64;
        }
    }
    Distribution::new(w).expect("normalized weights")
}

pub fn preserving_transformation(rng: &mut Rng64, k: usize) -> Result<TransformationSpec> {
    let t = map(rng, k, k);
    let nu = invariant_measure(rng, &t);
    TransformationSpec::new(t, nu, true)
}

/// Irreducible 0/1 matrix on `k` states: a random Hamiltonian cycle plus random
/// extra edges with probability `density`.
pub fn irreducible_sft(rng: &mut Rng64, k: usize, density: f64) -> Sft {
    let mut order: Vec<usize> = (0..k).collect();
    order.shuffle(rng);
    let mut a = vec![vec![0u8; k]; k];
    for i in 0..k {
        a[order[i]][order[(i + 1) % k]] = 1;
    }
    for row in a.iter_mut() {
        for x in row.iter_mut() {
            if rng.random_bool(density) {
                *x = 1;
            }
        }
    }
    Sft::new(StateSpace::indexed(k).expect("k ≥ 1"), a).expect("cycle keeps every state")
}

/// Stationary chain whose transitions are exactly the allowed edges of `s`, with
/// random positive weights on them.
pub fn supported_markov(rng: &mut Rng64, s: &Sft) -> Result<MarkovSpec> {
    let k = s.size();
    let transition: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            let allowed: Vec<usize> = (0..k).filter(|&j| s.allows(i, j)).collect();
            let mut row = vec![0.0; k];
            if allowed.is_empty() {
                row[i] = 1.0;
            } else {
                for (j, w) in allowed.iter().zip(dirichlet(rng, allowed.len())) {
                    row[*j] = w;
                }
            }
            row
        })
        .collect();
    let mut initial = stationary_vector(&transition)?;
    for (i, x) in initial.iter_mut().enumerate() {
        if !s.is_alive(i) {
            *x = 0.0;
        }
    }
    let total: f64 = initial.iter().sum();
    initial.iter_mut().for_each(|x| *x /= total);
    MarkovSpec::new(transition, Distribution::new(initial)?, true)
}

fn space(k: usize) -> StateSpace {
    StateSpace::indexed(k).expect("k ≥ 1")
}

/// A measure drawn from the basic constructors: i.i.d., independent sequences,
/// Markov chains (stationary or from an arbitrary initial law) and orbits of maps.
pub fn basic_oracle(rng: &mut Rng64, k: usize) -> Result<Instance> {
    Ok(match rng.random_range(0..6) {
        0 => Instance {
            oracle: iid(space(k), distribution(rng, k))?,
            label: format!("iid(k={k})"),
        },
        1 => {
            let prefix = (0..rng.random_range(0..=3))
                .map(|_| distribution(rng, k))
                .collect::<Vec<_>>();
            let tail = (0..rng.random_range(1..=2))
                .map(|_| distribution(rng, k))
                .collect::<Vec<_>>();
            let label = format!("product_sequence(k={k},prefix={},tail={})", prefix.len(), tail.len());
            Instance {
                oracle: product_sequence(space(k), prefix, tail)?,
                label,
            }
        }
        2 => Instance {
            oracle: markov(space(k), stationary_markov(rng, k)?)?,
            label: format!("markov(k={k},stationary)"),
        },
        3 => {
            let spec = MarkovSpec::new(stochastic_matrix(rng, k, 0.4), distribution(rng, k), false)?;
            Instance {
                oracle: markov(space(k), spec)?,
                label: format!("markov(k={k},sparse)"),
            }
        }
        4 => {
            let spec = TransformationSpec::new(map(rng, k, k), distribution(rng, k), false)?;
            Instance {
                oracle: from_transformation(space(k), spec)?,
                label: format!("transformation(k={k})"),
            }
        }
        _ => Instance {
            oracle: from_transformation(space(k), preserving_transformation(rng, k)?)?,
            label: format!("transformation(k={k},preserving)"),
        },
    })
}

/// [`basic_oracle`] plus convex mixtures and shifts of basic measures.
pub fn oracle(rng: &mut Rng64, k: usize) -> Result<Instance> {
    match rng.random_range(0..8) {
        6 => {
            let a = basic_oracle(rng, k)?;
            let b = basic_oracle(rng, k)?;
            let t: f64 = rng.random();
            Ok(Instance {
                oracle: convex_mix(t, a.oracle, b.oracle)?,
                label: format!("mix({t:.3};{};{})", a.label, b.label),
            })
        }
        7 => {
            let a = basic_oracle(rng, k)?;
            Ok(Instance {
                oracle: shift_pushforward(a.oracle),
                label: format!("shift({})", a.label),
            })
        }
        _ => basic_oracle(rng, k),
    }
}

/// A declared-stationary measure: stationary chain, i.i.d., invariant orbit measure,
/// or a mixture of two of these.
pub fn stationary_oracle(rng: &mut Rng64, k: usize) -> Result<Instance> {
    fn simple(rng: &mut Rng64, k: usize) -> Result<Instance> {
        Ok(match rng.random_range(0..3) {
            0 => Instance {
                oracle: iid(space(k), distribution(rng, k))?,
                label: format!("iid(k={k})"),
            },
            1 => Instance {
                oracle: markov(space(k), stationary_markov(rng, k)?)?,
                label: format!("markov(k={k},stationary)"),
            },
            _ => Instance {
                oracle: from_transformation(space(k), preserving_transformation(rng, k)?)?,
                label: format!("transformation(k={k},preserving)"),
            },
        })
    }
    if rng.random_bool(0.2) {
        let a = simple(rng, k)?;
        let b = simple(rng, k)?;
        let t: f64 = rng.random();
        Ok(Instance {
            oracle: convex_mix(t, a.oracle, b.oracle)?,
            label: format!("mix({t:.3};{};{})", a.label, b.label),
        })
    } else {
        simple(rng, k)
    }
}

/// One instance of every constructor, built over random basic measures on `k`
/// states (the product and block recoding use smaller factors).
pub fn constructor_zoo(rng: &mut Rng64, k: usize) -> Result<Vec<Instance>> {
    let mut zoo = Vec::with_capacity(11);
    zoo.push(Instance {
        oracle: iid(space(k), distribution(rng, k))?,
        label: format!("iid(k={k})"),
    });
    let prefix = vec![distribution(rng, k), distribution(rng, k)];
    zoo.push(Instance {
        oracle: product_sequence(space(k), prefix, vec![distribution(rng, k)])?,
        label: format!("product_sequence(k={k})"),
    });
    let spec = MarkovSpec::new(stochastic_matrix(rng, k, 0.3), distribution(rng, k), false)?;
    zoo.push(Instance {
        oracle: markov(space(k), spec)?,
        label: format!("markov(k={k})"),
    });
    let spec = TransformationSpec::new(map(rng, k, k), distribution(rng, k), false)?;
    zoo.push(Instance {
        oracle: from_transformation(space(k), spec)?,
        label: format!("transformation(k={k})"),
    });
    let (a, b) = (basic_oracle(rng, k)?, basic_oracle(rng, k)?);
    let t: f64 = rng.random();
    zoo.push(Instance {
        oracle: convex_mix(t, a.oracle, b.oracle)?,
        label: format!("mix({t:.3};{};{})", a.label, b.label),
    });
    let (kx, ky) = (rng.random_range(1..=3), rng.random_range(1..=2));
    let (a, b) = (basic_oracle(rng, kx)?, basic_oracle(rng, ky)?);
    zoo.push(Instance {
        oracle: product_measure(a.oracle, b.oracle)?,
        label: format!("product({};{})", a.label, b.label),
    });
    let a = basic_oracle(rng, k)?;
    zoo.push(Instance {
        oracle: shift_pushforward(a.oracle),
        label: format!("shift({})", a.label),
    });
    let a = basic_oracle(rng, k)?;
    let first = rng.random_range(0..3);
    let indices = IndexSequence::new(vec![first, first + rng.random_range(1..=3)], rng.random_range(1..=3))?;
    zoo.push(Instance {
        oracle: restriction_pushforward(a.oracle, indices),
        label: format!("restriction({})", a.label),
    });
    let a = basic_oracle(rng, k)?;
    let d = rng.random_range(1..=3);
    zoo.push(Instance {
        oracle: dilation_pushforward(a.oracle, d)?,
        label: format!("dilation(k={d};{})", a.label),
    });
    let a = basic_oracle(rng, k)?;
    let ky = rng.random_range(1..=k);
    zoo.push(Instance {
        oracle: factor_pushforward(map(rng, k, ky), space(ky), a.oracle)?,
        label: format!("factor(to={ky};{})", a.label),
    });
    let a = basic_oracle(rng, 2)?;
    zoo.push(Instance {
        oracle: block_recode(a.oracle, 2)?,
        label: format!("block_recode(k=2;{})", a.label),
    });
    Ok(zoo)
}

/// Cells written as `{0,2|1}`.
pub fn describe_partition(p: &Partition) -> String {
    let cells: Vec<String> = (0..p.len())
        .map(|i| {
            p.cell_states(i)
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect();
    format!("{{{}}}", cells.join("|"))
}
