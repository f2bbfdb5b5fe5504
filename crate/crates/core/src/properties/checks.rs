use rand::Rng;

use super::gen::{self, describe_partition};
use super::{golden_mean, Ctx};
use crate::entropy::{conditional_entropy_first_coord, markov_closed_form, transformation_block_entropy};
use crate::error::{Error, Result};
use crate::measures::{
    block_recode as recode, dilation_pushforward, factor_pushforward, from_transformation,
    markov, product_measure, restriction_pushforward, shift_pushforward, IndexSequence,
    TransformationSpec,
};
use crate::measures::convex_mix;
use crate::space::{join, preimage_partition, product_partition, refines, Partition, StateSpace};
use crate::topological::{ht_estimate, parry_measure, support_check, word_complexity};

fn states(ctx: &mut Ctx) -> usize {
    let max = ctx.config.max_states.max(2);
    ctx.rng.random_range(2..=max)
}

fn space(k: usize) -> StateSpace {
    StateSpace::indexed(k).expect("k ≥ 1")
}

pub(super) fn bound_log_cells(ctx: &mut Ctx) -> Result<()> {
    for i in 0..ctx.instances {
        ctx.instance();
        let k = states(ctx);
        let mu = gen::oracle(&mut ctx.rng, k)?;
        let p = gen::partition(&mut ctx.rng, k, k);
        let bound = (p.len() as f64).ln();
        for n in 1..=ctx.config.max_len {
            let e = ctx.entropy(mu.oracle.as_ref(), &p, n)?;
            let at = || format!("#{i} {} P={} n={n}", mu.label, describe_partition(&p));
            ctx.le(e, n as f64 * bound, at);
            ctx.le(0.0, e, at);
        }
    }
    Ok(())
}

pub(super) fn refinement_monotone(ctx: &mut Ctx) -> Result<()> {
    for i in 0..ctx.instances {
        ctx.instance();
        let k = states(ctx);
        let mu = gen::oracle(&mut ctx.rng, k)?;
        let p = gen::partition(&mut ctx.rng, k, 3);
        let r = gen::partition(&mut ctx.rng, k, 3);
        let q = join(&p, &r)?;
        if !refines(&q, &p)? {
            return Err(Error::InvalidPartition("join does not refine its factor".into()));
        }
        for n in 1..=ctx.config.max_len {
            let ep = ctx.entropy(mu.oracle.as_ref(), &p, n)?;
            let eq = ctx.entropy(mu.oracle.as_ref(), &q, n)?;
            ctx.le(ep, eq, || {
                format!(
                    "#{i} {} P={} Q={} n={n}",
                    mu.label,
                    describe_partition(&p),
                    describe_partition(&q)
                )
            });
        }
    }
    Ok(())
}

pub(super) fn join_subadditive(ctx: &mut Ctx) -> Result<()> {
    for i in 0..ctx.instances {
        ctx.instance();
        let k = states(ctx);
        let mu = gen::oracle(&mut ctx.rng, k)?;
        let p = gen::partition(&mut ctx.rng, k, 3);
        let q = gen::partition(&mut ctx.rng, k, 3);
        let pq = join(&p, &q)?;
        for n in 1..=ctx.config.max_len {
            let ej = ctx.entropy(mu.oracle.as_ref(), &pq, n)?;
            let ep = ctx.entropy(mu.oracle.as_ref(), &p, n)?;
            let eq = ctx.entropy(mu.oracle.as_ref(), &q, n)?;
            ctx.le(ej, ep + eq, || {
                format!(
                    "#{i} {} P={} Q={} n={n}",
                    mu.label,
                    describe_partition(&p),
                    describe_partition(&q)
                )
            });
        }
    }
    Ok(())
}

/// `E(Sh, μ, P̄^m)` is the limit of the increments of `n ↦ E(μ, ∨_{i<n} Sh^{-i} P̄^m)`
/// and that join is `P̄^{m+n-1}`, so its `N`-th increment is
/// `E(μ, P̄^{m+N-1}) - E(μ, P̄^{m+N-2})`. The estimates for `m = 1, 2, 3` must agree.
pub(super) fn stationary_block_equality(ctx: &mut Ctx) -> Result<()> {
    let horizon = ctx.config.horizon.max(2);
    let p = Partition::singletons(2);
    for i in 0..ctx.instances {
        ctx.instance();
        let spec = gen::stationary_markov(&mut ctx.rng, 2)?;
        let label = format!("#{i} markov{:?}", spec.transition());
        let mu = markov(space(2), spec)?;
        let mut blocks = Vec::new();
        for len in horizon - 1..=horizon + 2 {
            blocks.push(ctx.entropy(mu.as_ref(), &p, len)?);
        }
        let estimate = |m: usize| blocks[m] - blocks[m - 1];
        let first = estimate(1);
        for m in 2..=3 {
            ctx.eq(estimate(m), first, || format!("{label} N={horizon} m={m} vs m=1"));
        }
    }
    Ok(())
}

pub(super) fn shift_invariance(ctx: &mut Ctx) -> Result<()> {
    for i in 0..ctx.instances {
        ctx.instance();
        let k = states(ctx);
        let mu = gen::oracle(&mut ctx.rng, k)?;
        let sh = shift_pushforward(mu.oracle.clone());
        let p = gen::partition(&mut ctx.rng, k, k);
        let slack = (p.len() as f64).ln();
        for n in 2..=ctx.config.max_len {
            let e = ctx.entropy(mu.oracle.as_ref(), &p, n)?;
            let es = ctx.entropy(sh.as_ref(), &p, n - 1)?;
            let at = || format!("#{i} {} P={} n={n}", mu.label, describe_partition(&p));
            ctx.le(es, e, at);
            ctx.le(e, es + slack, at);
        }
    }
    Ok(())
}

pub(super) fn convexity(ctx: &mut Ctx) -> Result<()> {
    let ln2 = std::f64::consts::LN_2;
    for i in 0..ctx.instances {
        ctx.instance();
        let k = states(ctx);
        let mu = gen::oracle(&mut ctx.rng, k)?;
        let rho = gen::oracle(&mut ctx.rng, k)?;
        let t: f64 = ctx.rng.random();
        let mix = convex_mix(t, mu.oracle.clone(), rho.oracle.clone())?;
        let p = gen::partition(&mut ctx.rng, k, 3);
        for n in 1..=ctx.config.max_len {
            let em = ctx.entropy(mix.as_ref(), &p, n)?;
            let lo = t * ctx.entropy(mu.oracle.as_ref(), &p, n)?
                + (1.0 - t) * ctx.entropy(rho.oracle.as_ref(), &p, n)?;
            let at = || {
                format!(
                    "#{i} t={t:.4} {} / {} P={} n={n}",
                    mu.label,
                    rho.label,
                    describe_partition(&p)
                )
            };
            ctx.le(lo, em, at);
            ctx.le(em, lo + ln2, at);
        }
    }
    Ok(())
}

/// Index sequence with `r_n ≤ (n+1)k - 1`: a short prefix, each term drawn within
/// its bound, continued with a step of at most `k`.
fn index_sequence(ctx: &mut Ctx, k: usize) -> Result<IndexSequence> {
    let len = ctx.rng.random_range(1..=3);
    let mut prefix: Vec<usize> = Vec::with_capacity(len);
    for j in 0..len {
        let lo = prefix.last().map_or(0, |&r| r + 1);
        prefix.push(ctx.rng.random_range(lo..=(j + 1) * k - 1));
    }
    let step = ctx.rng.random_range(1..=k);
    IndexSequence::new(prefix, step)
}

pub(super) fn restriction(ctx: &mut Ctx) -> Result<()> {
    for i in 0..ctx.instances {
        ctx.instance();
        let k = states(ctx);
        let mu = gen::oracle(&mut ctx.rng, k)?;
        let rate = ctx.rng.random_range(1..=3);
        let seq = index_sequence(ctx, rate)?;
        if !seq.within_rate(rate) {
            return Err(Error::InvalidArgument(format!(
                "generated index sequence {seq:?} exceeds rate {rate}"
            )));
        }
        let r = restriction_pushforward(mu.oracle.clone(), seq.clone());
        let p = gen::partition(&mut ctx.rng, k, 3);
        for n in (1..).take_while(|n| n * rate <= ctx.config.max_len) {
            let er = ctx.entropy(r.as_ref(), &p, n)?;
            let e = ctx.entropy(mu.oracle.as_ref(), &p, rate * n)?;
            ctx.le(er, e, || {
                format!(
                    "#{i} {} r={:?} k={rate} P={} n={n}",
                    mu.label,
                    (0..4).map(|j| seq.term(j)).collect::<Vec<_>>(),
                    describe_partition(&p)
                )
            });
        }
    }
    Ok(())
}

pub(super) fn dilation(ctx: &mut Ctx) -> Result<()> {
    for i in 0..ctx.instances {
        ctx.instance();
        let k = states(ctx);
        let mu = gen::oracle(&mut ctx.rng, k)?;
        let d = ctx.rng.random_range(1..=3);
        let dil = dilation_pushforward(mu.oracle.clone(), d)?;
        let p = gen::partition(&mut ctx.rng, k, 3);
        for n in 1..=ctx.config.dilation_len {
            let ed = ctx.entropy(dil.as_ref(), &p, n)?;
            let e = ctx.entropy(mu.oracle.as_ref(), &p, n.div_ceil(d))?;
            ctx.eq(ed, e, || {
                format!("#{i} {} k={d} P={} n={n}", mu.label, describe_partition(&p))
            });
        }
    }
    Ok(())
}

pub(super) fn factor(ctx: &mut Ctx) -> Result<()> {
    for i in 0..ctx.instances {
        ctx.instance();
        let k = states(ctx);
        let mu = gen::oracle(&mut ctx.rng, k)?;
        let ky = ctx.rng.random_range(1..=k);
        let f = gen::map(&mut ctx.rng, k, ky);
        let image = factor_pushforward(f.clone(), space(ky), mu.oracle.clone())?;
        let q = gen::partition(&mut ctx.rng, ky, 3);
        let pulled = preimage_partition(&f, &q)?;
        for n in 1..=ctx.config.max_len {
            let ef = ctx.entropy(image.as_ref(), &q, n)?;
            let e = ctx.entropy(mu.oracle.as_ref(), &pulled, n)?;
            ctx.eq(ef, e, || {
                format!("#{i} {} f={f:?} Q={} n={n}", mu.label, describe_partition(&q))
            });
        }
    }
    Ok(())
}

pub(super) fn marginals(ctx: &mut Ctx) -> Result<()> {
    for i in 0..ctx.instances {
        ctx.instance();
        let kx = ctx.rng.random_range(2..=3);
        let ky = ctx.rng.random_range(2..=3);
        let pi = gen::oracle(&mut ctx.rng, kx * ky)?;
        let proj_x: Vec<usize> = (0..kx * ky).map(|s| s / ky).collect();
        let proj_y: Vec<usize> = (0..kx * ky).map(|s| s % ky).collect();
        let mu = factor_pushforward(proj_x, space(kx), pi.oracle.clone())?;
        let rho = factor_pushforward(proj_y, space(ky), pi.oracle.clone())?;
        let p = gen::partition(&mut ctx.rng, kx, 2);
        let q = gen::partition(&mut ctx.rng, ky, 2);
        let pq = product_partition(&p, &q);
        for n in 1..=ctx.config.max_len {
            let e_pi = ctx.entropy(pi.oracle.as_ref(), &pq, n)?;
            let e_mu = ctx.entropy(mu.as_ref(), &p, n)?;
            let e_rho = ctx.entropy(rho.as_ref(), &q, n)?;
            let at = || {
                format!(
                    "#{i} {} |X|={kx} |Y|={ky} P={} Q={} n={n}",
                    pi.label,
                    describe_partition(&p),
                    describe_partition(&q)
                )
            };
            ctx.le(e_mu.max(e_rho), e_pi, at);
            ctx.le(e_pi, e_mu + e_rho, at);
        }
    }
    Ok(())
}

pub(super) fn product_additivity(ctx: &mut Ctx) -> Result<()> {
    for i in 0..ctx.instances {
        ctx.instance();
        let kx = ctx.rng.random_range(2..=3);
        let ky = ctx.rng.random_range(2..=3);
        let mu = gen::stationary_oracle(&mut ctx.rng, kx)?;
        let rho = gen::oracle(&mut ctx.rng, ky)?;
        let prod = product_measure(mu.oracle.clone(), rho.oracle.clone())?;
        let p = gen::partition(&mut ctx.rng, kx, 2);
        let q = gen::partition(&mut ctx.rng, ky, 2);
        let pq = product_partition(&p, &q);
        for n in 1..=ctx.config.max_len {
            let e = ctx.entropy(prod.as_ref(), &pq, n)?;
            let sum = ctx.entropy(mu.oracle.as_ref(), &p, n)? + ctx.entropy(rho.oracle.as_ref(), &q, n)?;
            ctx.eq(e, sum, || {
                format!(
                    "#{i} {} x {} P={} Q={} n={n}",
                    mu.label,
                    rho.label,
                    describe_partition(&p),
                    describe_partition(&q)
                )
            });
        }
    }
    Ok(())
}

/// The identity at the singleton partition, plus the coarser inequality
/// `E_{X^k}(μ, (P_1⊙..⊙P_k)ⁿ) ≤ E_X(μ, (P_1∨..∨P_k)^{nk})`.
pub(super) fn block_recode(ctx: &mut Ctx) -> Result<()> {
    for i in 0..ctx.instances {
        ctx.instance();
        let k = ctx.rng.random_range(2..=3);
        let x = if k == 3 { 2 } else { ctx.rng.random_range(2..=3) };
        let mu = gen::oracle(&mut ctx.rng, x)?;
        let rec = recode(mu.oracle.clone(), k)?;
        let singles_k = Partition::singletons(rec.space().size());
        let singles = Partition::singletons(x);
        let parts: Vec<Partition> = (0..k).map(|_| gen::partition(&mut ctx.rng, x, 2)).collect();
        let odot = parts[1..]
            .iter()
            .fold(parts[0].clone(), |acc, p| product_partition(&acc, p));
        let mut joined = parts[0].clone();
        for p in &parts[1..] {
            joined = join(&joined, p)?;
        }
        for n in (1..).take_while(|n| n * k <= ctx.config.max_len) {
            let er = ctx.entropy(rec.as_ref(), &singles_k, n)?;
            let e = ctx.entropy(mu.oracle.as_ref(), &singles, n * k)?;
            ctx.eq(er, e, || format!("#{i} {} k={k} singletons n={n}", mu.label));
            let eo = ctx.entropy(rec.as_ref(), &odot, n)?;
            let ej = ctx.entropy(mu.oracle.as_ref(), &joined, n * k)?;
            ctx.le(eo, ej, || {
                let cells: Vec<String> = parts.iter().map(describe_partition).collect();
                format!("#{i} {} k={k} parts={} n={n}", mu.label, cells.join(" "))
            });
        }
    }
    Ok(())
}

pub(super) fn transformation_equality(ctx: &mut Ctx) -> Result<()> {
    for i in 0..ctx.instances {
        ctx.instance();
        let k = ctx.rng.random_range(1..=ctx.config.max_states.max(1));
        let spec = if ctx.rng.random_bool(0.5) {
            gen::preserving_transformation(&mut ctx.rng, k)?
        } else {
            let t = gen::map(&mut ctx.rng, k, k);
            TransformationSpec::new(t, gen::distribution(&mut ctx.rng, k), false)?
        };
        let p = gen::partition(&mut ctx.rng, k, k);
        let mu = from_transformation(space(k), spec.clone())?;
        for n in 1..=ctx.config.max_len {
            let e = ctx.entropy(mu.as_ref(), &p, n)?;
            let direct = transformation_block_entropy(&spec, &p, n)?;
            ctx.eq(e, direct, || {
                format!(
                    "#{i} T={:?} nu={:?} P={} n={n}",
                    spec.map(),
                    spec.measure().weights(),
                    describe_partition(&p)
                )
            });
        }
    }
    Ok(())
}

/// For stationary `μ`, `E(P̄ⁿ) ≤ E(P̄ⁿ ∨ Q̄ⁿ) = E(Q̄ⁿ) + H(P̄ⁿ | Q̄ⁿ)` and the conditional
/// term is at most `Σ_{i<n} H(P at i | Q at i) = n·H_μ(P̄¹|Q̄¹)`.
pub(super) fn conditional_lemma(ctx: &mut Ctx) -> Result<()> {
    for i in 0..ctx.instances {
        ctx.instance();
        let k = states(ctx);
        let mu = gen::stationary_oracle(&mut ctx.rng, k)?;
        let p = gen::partition(&mut ctx.rng, k, 3);
        let q = gen::partition(&mut ctx.rng, k, 3);
        let h = conditional_entropy_first_coord(mu.oracle.as_ref(), &p, &q)?;
        for n in 1..=ctx.config.max_len {
            let ep = ctx.entropy(mu.oracle.as_ref(), &p, n)?;
            let eq = ctx.entropy(mu.oracle.as_ref(), &q, n)?;
            ctx.le(ep, eq + n as f64 * h, || {
                format!(
                    "#{i} {} P={} Q={} H(P|Q)={h:.6} n={n}",
                    mu.label,
                    describe_partition(&p),
                    describe_partition(&q)
                )
            });
        }
    }
    Ok(())
}

/// For each subshift: the Parry chain's entropy equals `ln λ`; random stationary
/// chains supported on it satisfy `h ≤ ln λ` and, at every `n`, the finite-`n`
/// counting bound `E(μ, singletonsⁿ) ≤ ln N_S(n)`.
pub(super) fn variational(ctx: &mut Ctx) -> Result<()> {
    let sfts = if ctx.config.sfts.is_empty() {
        let mut v = vec![("golden_mean".to_string(), golden_mean())];
        for j in 0..2 {
            let k = ctx.rng.random_range(2..=4);
            v.push((format!("random_{j}"), gen::irreducible_sft(&mut ctx.rng, k, 0.4)));
        }
        v
    } else {
        ctx.config.sfts.clone()
    };
    let max_len = ctx.config.max_len;
    for (name, s) in &sfts {
        let describe = || format!("{name}{:?}", s.matrix());
        let est = ht_estimate(s, ctx.config.horizon.max(2))?;
        let ln_lambda = est.value;
        let counts = (1..=max_len)
            .map(|n| word_complexity(s, n).map(|c| (c as f64).ln()))
            .collect::<Result<Vec<_>>>()?;

        let parry = parry_measure(s)?;
        let parry_h = markov_closed_form(&parry)?;
        ctx.eq(parry_h, ln_lambda, || format!("{} parry", describe()));
        let parry_mu = markov(s.space().clone(), parry)?;
        let supported = support_check(parry_mu.as_ref(), s, max_len)?;
        if !supported.supported {
            return Err(Error::InvalidArgument(format!(
                "Parry chain of {name} leaves the subshift: {:?}",
                supported.witness
            )));
        }

        for i in 0..ctx.instances {
            ctx.instance();
            let spec = gen::supported_markov(&mut ctx.rng, s)?;
            let h = markov_closed_form(&spec)?;
            let label = format!("{} #{i} markov{:?}", describe(), spec.transition());
            let mu = markov(s.space().clone(), spec)?;
            let support = support_check(mu.as_ref(), s, max_len)?;
            if !support.supported {
                return Err(Error::InvalidArgument(format!(
                    "generated chain leaves the subshift: {:?}",
                    support.witness
                )));
            }
            ctx.le(h, ln_lambda, || format!("{label} closed form"));
            let singles = Partition::singletons(s.size());
            for n in 1..=max_len {
                let e = ctx.entropy(mu.as_ref(), &singles, n)?;
                ctx.le(e, counts[n - 1], || format!("{label} n={n}"));
            }
        }
    }
    Ok(())
}
