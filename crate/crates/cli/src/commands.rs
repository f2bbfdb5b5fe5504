//! The `entropy`, `topological`, `verify` and `sweep` commands. Each writes CSV to
//! `out`; `verify` also writes a readable summary to `diag`.

use std::io::Write;

use hsd_core::entropy::{
    hsd_estimate, iid_closed_form, markov_closed_form, EntropySeries, Enumerator, EstimatePolicy,
};
use hsd_core::properties::{run_all, run_selected, CheckConfig, CheckReport};
use hsd_core::topological::{ht_estimate, parry_measure, spectral_radius, Sft};
use hsd_core::Partition;
use log::warn;

use crate::error::CliError;
use crate::output::{num, writer};
use crate::spec::{ClosedForm, LogBase, Model, Process, RunParams};

/// Run parameters after applying command-line overrides to the spec's `[run]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub horizon: usize,
    pub budget: u64,
    pub log_base: LogBase,
    pub seed: u64,
}

impl Settings {
    pub fn new(
        run: RunParams,
        horizon: Option<usize>,
        budget: Option<u64>,
        log_base: Option<LogBase>,
        seed: Option<u64>,
    ) -> Result<Self, CliError> {
        let s = Settings {
            horizon: horizon.unwrap_or(run.horizon),
            budget: budget.unwrap_or(run.budget),
            log_base: log_base.unwrap_or(run.log_base),
            seed: seed.unwrap_or(run.seed),
        };
        if s.horizon == 0 {
            return Err(CliError::Usage("horizon must be at least 1".into()));
        }
        Ok(s)
    }
}

fn pick<'a, T>(
    what: &str,
    requested: Option<&str>,
    items: &'a [T],
    name: impl Fn(&T) -> &str,
) -> Result<&'a T, CliError> {
    let names = || items.iter().map(&name).collect::<Vec<_>>().join(", ");
    match requested {
        Some(r) => items.iter().find(|x| name(x) == r).ok_or_else(|| {
            CliError::Usage(format!("unknown {what} `{r}`; declared: {}", names()))
        }),
        None if items.len() == 1 => Ok(&items[0]),
        None if items.is_empty() => Err(CliError::Usage(format!("the spec declares no {what}"))),
        None => Err(CliError::Usage(format!(
            "the spec declares more than one {what}; pick one with --{what}: {}",
            names()
        ))),
    }
}

fn partition_of(model: &Model, process: &Process, requested: Option<&str>) -> Result<(String, Partition), CliError> {
    let name = requested
        .or(process.partition.as_deref())
        .unwrap_or("singletons");
    Ok((name.to_string(), model.partition_for(process, name)?))
}

fn closed_form(process: &Process, p: &Partition) -> Option<f64> {
    match process.closed_form.as_ref()? {
        ClosedForm::Iid(d) => iid_closed_form(d, p).ok(),
        ClosedForm::Markov(spec) if p.same_cells(&Partition::singletons(spec.size())) => {
            markov_closed_form(spec).ok()
        }
        ClosedForm::Markov(_) => None,
    }
}

/// Block entropies `E_n`, `a_n = E_n/n` and increments for `n ≤ horizon`, then the
/// estimate, its policy and, when known, the closed form and the gap to it.
pub fn entropy(
    model: &Model,
    process: Option<&str>,
    partition: Option<&str>,
    settings: &Settings,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let process = pick("process", process, &model.processes, |p| &p.name)?;
    let (_, p) = partition_of(model, process, partition)?;
    let enumerator = Enumerator::with_budget(settings.budget);
    let (series, failure) = enumerator.series_until_error(process.oracle.as_ref(), &p, settings.horizon);
    let s = settings.log_base.scale();

    let mut w = writer(out);
    w.write_record(["n", "E_n", "a_n", "delta_E"])?;
    for (i, (e, d)) in series.block_values.iter().zip(series.increments()).enumerate() {
        let n = i + 1;
        w.write_record([n.to_string(), num(e * s), num(series.values[i] * s), num(d * s)])?;
    }
    if let Some(e) = failure {
        w.flush()?;
        return Err(e.into());
    }
    let est = hsd_estimate(&series, EstimatePolicy::Auto)?;
    w.write_record(["estimate", &num(est.value * s)])?;
    w.write_record(["policy", &est.policy.to_string()])?;
    if let Some(h) = closed_form(process, &p) {
        w.write_record(["closed_form", &num(h * s)])?;
        w.write_record(["gap", &num((est.value - h) * s)])?;
    }
    w.flush()?;
    Ok(())
}

/// Word counts `N_S(n)` and rates `ln N_S(n)/n`, then the log spectral radius and
/// either the Parry chain or, for a reducible subshift, one row per component.
pub fn topological(
    model: &Model,
    sft: Option<&str>,
    settings: &Settings,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let named = pick("sft", sft, &model.sfts, |s| &s.name)?;
    let s = settings.log_base.scale();
    let mut w = writer(out);
    w.write_record(["n", "N_S", "rate"])?;
    let Some(sft) = &named.sft else {
        w.write_record(["empty"])?;
        w.flush()?;
        return Ok(());
    };
    let est = ht_estimate(sft, settings.horizon.max(2))?;
    for (n, count, rate) in est.rows.iter().take(settings.horizon) {
        w.write_record([n.to_string(), count.to_string(), num(rate * s)])?;
    }
    w.write_record(["ln_spectral_radius", &num(est.value * s)])?;
    if !est.spectral_radius.converged {
        warn!("power iteration did not converge for sft `{}`", named.name);
        w.write_record(["converged", "false"])?;
    }
    if sft.is_irreducible() {
        write_parry(&mut w, sft, s)?;
    } else {
        for states in sft.components() {
            let block: Vec<Vec<f64>> = states
                .iter()
                .map(|&i| states.iter().map(|&j| if sft.allows(i, j) { 1.0 } else { 0.0 }).collect())
                .collect();
            let rho = spectral_radius(&block)?.value;
            let labels: Vec<&str> = states.iter().map(|&i| sft.space().label(i)).collect();
            w.write_record(["component", &labels.join(" "), &num(rho.ln() * s)])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn write_parry<W: Write>(w: &mut csv::Writer<W>, sft: &Sft, scale: f64) -> Result<(), CliError> {
    let parry = parry_measure(sft)?;
    let alive = sft.alive_states();
    for &i in &alive {
        for &j in &alive {
            let p = parry.transition()[i][j];
            if p > 0.0 {
                let edge = format!("{}->{}", sft.space().label(i), sft.space().label(j));
                w.write_record(["parry", &edge, &num(p)])?;
            }
        }
    }
    w.write_record(["parry_entropy", &num(markov_closed_form(&parry)? * scale)])?;
    Ok(())
}

/// Runs the verification suite. The report is CSV on `out`; a summary with the
/// worst witnesses of failing checks goes to `diag`.
pub fn verify(
    model: Option<&Model>,
    filter: &[String],
    settings: &Settings,
    out: &mut dyn Write,
    diag: &mut dyn Write,
) -> Result<(), CliError> {
    let mut config = CheckConfig {
        budget: settings.budget,
        horizon: settings.horizon,
        ..CheckConfig::default()
    };
    if let Some(model) = model {
        for named in &model.sfts {
            match &named.sft {
                Some(sft) if sft.is_irreducible() => config.sfts.push((named.name.clone(), sft.clone())),
                _ => warn!("sft `{}` is empty or reducible; the variational check skips it", named.name),
            }
        }
    }
    let reports = if filter.is_empty() {
        run_all(&config, settings.seed)
    } else {
        run_selected(filter, &config, settings.seed)?
    };

    let mut w = writer(out);
    w.write_record(["check", "verdict", "instances", "max_violation", "tolerance", "statement"])?;
    for r in &reports {
        w.write_record([
            r.name.clone(),
            r.verdict.to_string(),
            r.instances.to_string(),
            num(r.max_violation),
            num(r.tolerance),
            r.anchor.clone(),
        ])?;
    }
    w.flush()?;

    for r in &reports {
        summarize(r, diag)?;
    }
    let passed = reports.iter().filter(|r| r.verdict.is_pass()).count();
    writeln!(diag, "{passed}/{} checks passed (seed {})", reports.len(), settings.seed)?;
    if passed == reports.len() {
        Ok(())
    } else {
        Err(CliError::VerificationFailed {
            failed: reports.len() - passed,
        })
    }
}

fn summarize(r: &CheckReport, diag: &mut dyn Write) -> std::io::Result<()> {
    writeln!(
        diag,
        "{:<5} {:<28} max violation {:.3e} (tolerance {:.0e}, {} instances)",
        r.verdict.to_string(),
        r.name,
        r.max_violation,
        r.tolerance,
        r.instances
    )?;
    if let hsd_core::properties::Verdict::Error(msg) = &r.verdict {
        writeln!(diag, "      {msg}")?;
    }
    if !r.verdict.is_pass() {
        for wit in &r.witnesses {
            writeln!(
                diag,
                "      lhs {} rhs {} violation {:.3e}: {}",
                num(wit.lhs),
                num(wit.rhs),
                wit.violation,
                wit.inputs
            )?;
        }
    }
    Ok(())
}

/// Entropy series of every process up to the horizon, each on its default
/// partition, with the estimate available at each `n`.
pub fn sweep(model: &Model, settings: &Settings, out: &mut dyn Write) -> Result<(), CliError> {
    if model.processes.is_empty() {
        return Err(CliError::Usage("the spec declares no process".into()));
    }
    let s = settings.log_base.scale();
    let enumerator = Enumerator::with_budget(settings.budget);
    let mut w = writer(out);
    w.write_record(["process", "partition", "n", "E_n", "a_n", "delta_E", "estimate"])?;
    let mut first_failure = None;
    for process in &model.processes {
        let (pname, p) = partition_of(model, process, None)?;
        let (series, failure) =
            enumerator.series_until_error(process.oracle.as_ref(), &p, settings.horizon);
        let increments = series.increments();
        for n in 1..=series.values.len() {
            let prefix = EntropySeries::from_blocks(series.block_values[..n].to_vec(), series.stationary);
            let est = hsd_estimate(&prefix, EstimatePolicy::Auto)?;
            w.write_record([
                process.name.clone(),
                pname.clone(),
                n.to_string(),
                num(series.block_values[n - 1] * s),
                num(series.values[n - 1] * s),
                num(increments[n - 1] * s),
                num(est.value * s),
            ])?;
        }
        if let Some(e) = failure {
            warn!("process `{}` stopped after n = {}: {e}", process.name, series.values.len());
            first_failure.get_or_insert(e);
        }
    }
    w.flush()?;
    match first_failure {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}
