//! Spec files: a TOML document declaring a state space, processes, partitions,
//! subshifts and run parameters. Processes may refer to earlier or later blocks by
//! name; [`parse_spec`] resolves the reference graph and builds every oracle.
//!
//! ```toml
//! [space]
//! labels = ["a", "b"]
//!
//! [run]
//! horizon = 12
//!
//! [process.chain]
//! kind = "markov"
//! transition = [[0.9, 0.1], [0.5, 0.5]]
//!
//! [process.slow]
//! kind = "dilation"
//! of = "chain"
//! k = 2
//! ```

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::Range;

use hsd_core::entropy::DEFAULT_BUDGET;
use hsd_core::measures::{
    block_recode, convex_mix, dilation_pushforward, factor_pushforward, from_transformation,
    iid, markov, product_measure, product_sequence, restriction_pushforward, shift_pushforward,
    IndexSequence, MarkovSpec, TransformationSpec,
};
use hsd_core::topological::Sft;
use hsd_core::{Distribution, Oracle, Partition, StateSpace};
use serde::Deserialize;
use toml::Spanned;

/// Rows and distributions must sum to one within this before renormalization.
pub const STOCHASTIC_TOL: f64 = 1e-9;

pub const DEFAULT_HORIZON: usize = 12;

pub const KINDS: [&str; 11] = [
    "iid",
    "product_sequence",
    "markov",
    "transformation",
    "mix",
    "product",
    "shift",
    "restriction",
    "dilation",
    "factor",
    "block_recode",
];

/// A spec error with the position of the offending field, when known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecError {
    pub location: Option<(usize, usize)>,
    pub field: String,
    pub message: String,
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some((line, col)) = self.location {
            write!(f, "line {line}, column {col}: ")?;
        }
        if !self.field.is_empty() {
            write!(f, "{}: ", self.field)?;
        }
        f.write_str(&self.message)
    }
}

impl std::error::Error for SpecError {}

pub type SpecResult<T> = Result<T, SpecError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogBase {
    #[default]
    E,
    Two,
}

impl LogBase {
    /// Multiplier taking nats to the display unit.
    pub fn scale(self) -> f64 {
        match self {
            LogBase::E => 1.0,
            LogBase::Two => 1.0 / std::f64::consts::LN_2,
        }
    }
}

impl std::str::FromStr for LogBase {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "e" => Ok(LogBase::E),
            "2" => Ok(LogBase::Two),
            other => Err(format!("log base must be `e` or `2`, got `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunParams {
    pub horizon: usize,
    pub budget: u64,
    pub log_base: LogBase,
    pub seed: u64,
}

impl Default for RunParams {
    fn default() -> Self {
        RunParams {
            horizon: DEFAULT_HORIZON,
            budget: DEFAULT_BUDGET,
            log_base: LogBase::E,
            seed: 0,
        }
    }
}

/// Exact entropy of a process when it has a closed form.
#[derive(Debug, Clone)]
pub enum ClosedForm {
    Markov(MarkovSpec),
    Iid(Distribution),
}

#[derive(Debug, Clone)]
pub struct Process {
    pub name: String,
    pub kind: String,
    pub oracle: Oracle,
    pub closed_form: Option<ClosedForm>,
    /// Partition used when a command names none.
    pub partition: Option<String>,
    /// Names of the processes this one is built from.
    pub inputs: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct NamedPartition {
    pub name: String,
    cells: Vec<Vec<StateRef>>,
    location: Option<(usize, usize)>,
}

impl NamedPartition {
    /// Cells resolved against the labels of `space`.
    pub fn resolve(&self, space: &StateSpace) -> SpecResult<Partition> {
        let field = format!("partition.{}.cells", self.name);
        let located = |message: String| SpecError {
            location: self.location,
            field: field.clone(),
            message,
        };
        let cells = self
            .cells
            .iter()
            .map(|cell| cell.iter().map(|r| r.resolve(space)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(located)?;
        Partition::new(space.size(), cells).map_err(|e| located(e.to_string()))
    }
}

/// A subshift block. `None` when trimming stranded states leaves nothing.
#[derive(Debug, Clone)]
pub struct NamedSft {
    pub name: String,
    pub sft: Option<Sft>,
}

#[derive(Debug, Clone)]
pub struct Model {
    pub space: Option<StateSpace>,
    pub run: RunParams,
    /// Processes in declaration order.
    pub processes: Vec<Process>,
    pub partitions: Vec<NamedPartition>,
    pub sfts: Vec<NamedSft>,
}

impl Model {
    pub fn process(&self, name: &str) -> Option<&Process> {
        self.processes.iter().find(|p| p.name == name)
    }

    pub fn partition(&self, name: &str) -> Option<&NamedPartition> {
        self.partitions.iter().find(|p| p.name == name)
    }

    pub fn sft(&self, name: &str) -> Option<&NamedSft> {
        self.sfts.iter().find(|s| s.name == name)
    }

    /// The partition called `name` on the space of `process`; `singletons` and
    /// `trivial` are built in.
    pub fn partition_for(&self, process: &Process, name: &str) -> SpecResult<Partition> {
        let space = process.oracle.space();
        match name {
            "singletons" => Ok(Partition::singletons(space.size())),
            "trivial" => Ok(Partition::trivial(space.size())),
            _ => self
                .partition(name)
                .ok_or_else(|| SpecError {
                    location: None,
                    field: "partition".into(),
                    message: format!(
                        "unknown partition `{name}`; available: {}",
                        list(self.partitions.iter().map(|p| p.name.as_str()))
                    ),
                })?
                .resolve(space),
        }
    }
}

fn list<'a>(names: impl Iterator<Item = &'a str>) -> String {
    let mut v: Vec<&str> = names.collect();
    v.extend(["singletons", "trivial"]);
    v.join(", ")
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
enum StateRef {
    Index(usize),
    Label(String),
}

impl StateRef {
    fn resolve(&self, space: &StateSpace) -> Result<usize, String> {
        match self {
            StateRef::Index(i) if *i < space.size() => Ok(*i),
            StateRef::Index(i) => Err(format!(
                "state index {i} out of range for {} states",
                space.size()
            )),
            StateRef::Label(l) => space
                .index_of(l)
                .ok_or_else(|| format!("unknown state `{l}`")),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    space: Option<Spanned<RawSpace>>,
    run: Option<Spanned<RawRun>>,
    #[serde(default)]
    partition: BTreeMap<String, Spanned<RawPartition>>,
    #[serde(default)]
    process: BTreeMap<String, Spanned<RawProcess>>,
    #[serde(default)]
    sft: BTreeMap<String, Spanned<RawSft>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpace {
    labels: Option<Spanned<Vec<String>>>,
    size: Option<Spanned<usize>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    horizon: Option<Spanned<usize>>,
    budget: Option<Spanned<u64>>,
    log_base: Option<Spanned<String>>,
    seed: Option<Spanned<u64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPartition {
    cells: Spanned<Vec<Vec<StateRef>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSft {
    allowed: Spanned<Vec<Vec<u8>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProcess {
    kind: Spanned<String>,
    partition: Option<Spanned<String>>,
    distribution: Option<Spanned<Vec<f64>>>,
    prefix: Option<Spanned<Vec<Vec<f64>>>>,
    tail: Option<Spanned<Vec<Vec<f64>>>>,
    transition: Option<Spanned<Vec<Vec<f64>>>>,
    initial: Option<Spanned<Vec<f64>>>,
    stationary: Option<Spanned<bool>>,
    map: Option<Spanned<Vec<StateRef>>>,
    measure: Option<Spanned<Vec<f64>>>,
    preserving: Option<Spanned<bool>>,
    weight: Option<Spanned<f64>>,
    first: Option<Spanned<String>>,
    second: Option<Spanned<String>>,
    left: Option<Spanned<String>>,
    right: Option<Spanned<String>>,
    of: Option<Spanned<String>>,
    indices: Option<Spanned<Vec<usize>>>,
    step: Option<Spanned<usize>>,
    k: Option<Spanned<usize>>,
    target: Option<Spanned<Vec<String>>>,
}

impl RawProcess {
    /// Fields that are set, other than `kind` and `partition`.
    fn present(&self) -> Vec<(&'static str, Range<usize>)> {
        macro_rules! fields {
            ($($f:ident),*) => {{
                let mut v = Vec::new();
                $(if let Some(x) = &self.$f { v.push((stringify!($f), x.span())); })*
                v
            }};
        }
        fields!(
            distribution, prefix, tail, transition, initial, stationary, map, measure,
            preserving, weight, first, second, left, right, of, indices, step, k, target
        )
    }

    /// Names of the processes this block refers to, with their spans.
    fn references(&self) -> Vec<(&'static str, &Spanned<String>)> {
        [
            ("first", &self.first),
            ("second", &self.second),
            ("left", &self.left),
            ("right", &self.right),
            ("of", &self.of),
        ]
        .into_iter()
        .filter_map(|(f, r)| r.as_ref().map(|r| (f, r)))
        .collect()
    }
}

fn kind_fields(kind: &str) -> &'static [&'static str] {
    match kind {
        "iid" => &["distribution"],
        "product_sequence" => &["prefix", "tail"],
        "markov" => &["transition", "initial", "stationary"],
        "transformation" => &["map", "measure", "preserving"],
        "mix" => &["weight", "first", "second"],
        "product" => &["left", "right"],
        "shift" => &["of"],
        "restriction" => &["of", "indices", "step"],
        "dilation" | "block_recode" => &["of", "k"],
        "factor" => &["of", "map", "target"],
        _ => &[],
    }
}

/// Maps byte offsets to 1-based line and column.
struct Locator<'a> {
    text: &'a str,
}

impl Locator<'_> {
    fn at(&self, offset: usize) -> (usize, usize) {
        let before = &self.text[..offset.min(self.text.len())];
        let line = before.matches('\n').count() + 1;
        let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        (line, col)
    }

    fn err(&self, span: Range<usize>, field: impl Into<String>, message: impl Into<String>) -> SpecError {
        SpecError {
            location: Some(self.at(span.start)),
            field: field.into(),
            message: message.into(),
        }
    }
}

/// Parse and fully resolve a spec document.
pub fn parse_spec(text: &str) -> SpecResult<Model> {
    let loc = Locator { text };
    let raw: RawSpec = toml::from_str(text).map_err(|e| SpecError {
        location: e.span().map(|s| loc.at(s.start)),
        field: String::new(),
        message: e.message().trim().to_string(),
    })?;

    let space = raw.space.as_ref().map(|s| resolve_space(&loc, s)).transpose()?;
    let run = raw.run.as_ref().map(|r| resolve_run(&loc, r.get_ref())).transpose()?.unwrap_or_default();

    let partitions: Vec<NamedPartition> = by_position(&raw.partition)
        .into_iter()
        .map(|(name, p)| NamedPartition {
            name: name.clone(),
            cells: p.get_ref().cells.get_ref().clone(),
            location: Some(loc.at(p.get_ref().cells.span().start)),
        })
        .collect();

    let mut sfts = Vec::new();
    for (name, s) in by_position(&raw.sft) {
        let field = format!("sft.{name}.allowed");
        let allowed = &s.get_ref().allowed;
        let space = space
            .clone()
            .ok_or_else(|| loc.err(s.span(), format!("sft.{name}"), "subshifts need a [space] block"))?;
        let sft = match Sft::new(space, allowed.get_ref().clone()) {
            Ok(sft) => Some(sft),
            Err(hsd_core::Error::EmptySubshift) => None,
            Err(e) => return Err(loc.err(allowed.span(), field, e.to_string())),
        };
        sfts.push(NamedSft { name: name.clone(), sft });
    }

    let mut resolver = Resolver {
        loc: &loc,
        raw: &raw.process,
        space: space.as_ref(),
        partitions: &partitions,
        built: HashMap::new(),
        stack: Vec::new(),
    };
    let order = by_position(&raw.process);
    for (name, _) in &order {
        resolver.build(name)?;
    }
    let mut built = resolver.built;
    let processes = order
        .iter()
        .map(|(name, _)| built.remove(*name).expect("every process was built"))
        .collect();

    Ok(Model {
        space,
        run,
        processes,
        partitions,
        sfts,
    })
}

/// Table entries in document order.
fn by_position<T>(table: &BTreeMap<String, Spanned<T>>) -> Vec<(&String, &Spanned<T>)> {
    let mut v: Vec<_> = table.iter().collect();
    v.sort_by_key(|(_, s)| s.span().start);
    v
}

fn resolve_space(loc: &Locator, raw: &Spanned<RawSpace>) -> SpecResult<StateSpace> {
    let s = raw.get_ref();
    let built = match (&s.labels, &s.size) {
        (Some(labels), None) => StateSpace::new(labels.get_ref().iter().cloned())
            .map_err(|e| loc.err(labels.span(), "space.labels", e.to_string())),
        (None, Some(size)) => StateSpace::indexed(*size.get_ref())
            .map_err(|e| loc.err(size.span(), "space.size", e.to_string())),
        _ => Err(loc.err(raw.span(), "space", "give exactly one of `labels` and `size`")),
    }?;
    Ok(built)
}

fn resolve_run(loc: &Locator, raw: &RawRun) -> SpecResult<RunParams> {
    let mut run = RunParams::default();
    if let Some(h) = &raw.horizon {
        if *h.get_ref() == 0 {
            return Err(loc.err(h.span(), "run.horizon", "horizon must be at least 1"));
        }
        run.horizon = *h.get_ref();
    }
    if let Some(b) = &raw.budget {
        run.budget = *b.get_ref();
    }
    if let Some(base) = &raw.log_base {
        run.log_base = base
            .get_ref()
            .parse()
            .map_err(|e: String| loc.err(base.span(), "run.log_base", e))?;
    }
    if let Some(seed) = &raw.seed {
        run.seed = *seed.get_ref();
    }
    Ok(run)
}

struct Resolver<'a> {
    loc: &'a Locator<'a>,
    raw: &'a BTreeMap<String, Spanned<RawProcess>>,
    space: Option<&'a StateSpace>,
    partitions: &'a [NamedPartition],
    built: HashMap<String, Process>,
    stack: Vec<String>,
}

impl Resolver<'_> {
    fn build(&mut self, name: &str) -> SpecResult<Oracle> {
        if let Some(p) = self.built.get(name) {
            return Ok(p.oracle.clone());
        }
        let block = &self.raw[name];
        if let Some(pos) = self.stack.iter().position(|n| n == name) {
            let mut cycle = self.stack[pos..].to_vec();
            cycle.push(name.to_string());
            return Err(self.loc.err(
                block.span(),
                format!("process.{name}"),
                format!("reference cycle: {}", cycle.join(" -> ")),
            ));
        }
        self.stack.push(name.to_string());
        let process = self.build_block(name, block.get_ref(), block.span())?;
        self.stack.pop();
        let oracle = process.oracle.clone();
        self.built.insert(name.to_string(), process);
        Ok(oracle)
    }

    fn build_block(&mut self, name: &str, raw: &RawProcess, span: Range<usize>) -> SpecResult<Process> {
        let loc = self.loc;
        let field = |f: &str| format!("process.{name}.{f}");
        let kind = raw.kind.get_ref().as_str();
        if !KINDS.contains(&kind) {
            return Err(loc.err(
                raw.kind.span(),
                field("kind"),
                format!("unknown kind `{kind}`; expected one of {}", KINDS.join(", ")),
            ));
        }
        let allowed = kind_fields(kind);
        if let Some((f, s)) = raw.present().into_iter().find(|(f, _)| !allowed.contains(f)) {
            return Err(loc.err(s, field(f), format!("not a parameter of kind `{kind}`")));
        }
        let need = |f: &'static str| loc.err(span.clone(), format!("process.{name}"), format!("kind `{kind}` needs `{f}`"));

        let mut inputs = Vec::new();
        for (f, r) in raw.references() {
            if !self.raw.contains_key(r.get_ref()) {
                return Err(loc.err(
                    r.span(),
                    field(f),
                    format!("unknown process `{}`", r.get_ref()),
                ));
            }
            inputs.push(r.get_ref().clone());
        }
        let input = |this: &mut Self, r: &Option<Spanned<String>>, f: &'static str| -> SpecResult<Oracle> {
            this.build(r.as_ref().ok_or_else(|| need(f))?.get_ref())
        };
        let base = || {
            self.space
                .cloned()
                .ok_or_else(|| loc.err(span.clone(), format!("process.{name}"), format!("kind `{kind}` needs a [space] block")))
        };
        let core = |e: hsd_core::Error, f: &str| loc.err(span.clone(), field(f), e.to_string());

        let mut closed_form = None;
        let oracle = match kind {
            "iid" => {
                let space = base()?;
                let d = distribution(loc, raw.distribution.as_ref().ok_or_else(|| need("distribution"))?, &field("distribution"), space.size())?;
                closed_form = Some(ClosedForm::Iid(d.clone()));
                iid(space, d).map_err(|e| core(e, "distribution"))?
            }
            "product_sequence" => {
                let space = base()?;
                let rows = |r: &Option<Spanned<Vec<Vec<f64>>>>, f: &str| -> SpecResult<Vec<Distribution>> {
                    match r {
                        None => Ok(Vec::new()),
                        Some(r) => r
                            .get_ref()
                            .iter()
                            .enumerate()
                            .map(|(i, w)| weights(loc, w, r.span(), &format!("{}[{i}]", field(f)), space.size()))
                            .collect(),
                    }
                };
                let prefix = rows(&raw.prefix, "prefix")?;
                let tail = rows(&raw.tail, "tail")?;
                if prefix.is_empty() && tail.is_empty() {
                    return Err(need("prefix"));
                }
                product_sequence(space, prefix, tail).map_err(|e| core(e, "prefix"))?
            }
            "markov" => {
                let space = base()?;
                let t = raw.transition.as_ref().ok_or_else(|| need("transition"))?;
                if t.get_ref().len() != space.size() {
                    return Err(loc.err(t.span(), field("transition"), format!("expected {} rows, got {}", space.size(), t.get_ref().len())));
                }
                let rows = t
                    .get_ref()
                    .iter()
                    .enumerate()
                    .map(|(i, w)| weights(loc, w, t.span(), &format!("{}[{i}]", field("transition")), space.size()).map(|d| d.weights().to_vec()))
                    .collect::<SpecResult<Vec<_>>>()?;
                let spec = match &raw.initial {
                    None => MarkovSpec::with_stationary_initial(rows),
                    Some(init) => {
                        let d = distribution(loc, init, &field("initial"), space.size())?;
                        let declared = raw.stationary.as_ref().is_some_and(|s| *s.get_ref());
                        MarkovSpec::new(rows, d, declared)
                    }
                }
                .map_err(|e| core(e, "initial"))?;
                closed_form = Some(ClosedForm::Markov(spec.clone()));
                markov(space, spec).map_err(|e| core(e, "transition"))?
            }
            "transformation" => {
                let space = base()?;
                let m = raw.map.as_ref().ok_or_else(|| need("map"))?;
                let map = state_map(loc, m, &field("map"), &space, &space)?;
                let d = distribution(loc, raw.measure.as_ref().ok_or_else(|| need("measure"))?, &field("measure"), space.size())?;
                let declared = raw.preserving.as_ref().is_some_and(|s| *s.get_ref());
                let spec = TransformationSpec::new(map, d, declared).map_err(|e| core(e, "measure"))?;
                from_transformation(space, spec).map_err(|e| core(e, "map"))?
            }
            "mix" => {
                let w = raw.weight.as_ref().ok_or_else(|| need("weight"))?;
                let mu = input(self, &raw.first, "first")?;
                let rho = input(self, &raw.second, "second")?;
                convex_mix(*w.get_ref(), mu, rho).map_err(|e| loc.err(w.span(), field("weight"), e.to_string()))?
            }
            "product" => {
                let mu = input(self, &raw.left, "left")?;
                let rho = input(self, &raw.right, "right")?;
                product_measure(mu, rho).map_err(|e| core(e, "right"))?
            }
            "shift" => shift_pushforward(input(self, &raw.of, "of")?),
            "restriction" => {
                let mu = input(self, &raw.of, "of")?;
                let idx = raw.indices.as_ref().ok_or_else(|| need("indices"))?;
                let prefix = idx.get_ref().clone();
                let step = match &raw.step {
                    Some(s) => *s.get_ref(),
                    None if prefix.len() >= 2 => prefix[prefix.len() - 1] - prefix[prefix.len() - 2],
                    None => 1,
                };
                let seq = IndexSequence::new(prefix, step).map_err(|e| loc.err(idx.span(), field("indices"), e.to_string()))?;
                restriction_pushforward(mu, seq)
            }
            "dilation" | "block_recode" => {
                let mu = input(self, &raw.of, "of")?;
                let k = raw.k.as_ref().ok_or_else(|| need("k"))?;
                let built = if kind == "dilation" {
                    dilation_pushforward(mu, *k.get_ref())
                } else {
                    block_recode(mu, *k.get_ref())
                };
                built.map_err(|e| loc.err(k.span(), field("k"), e.to_string()))?
            }
            "factor" => {
                let mu = input(self, &raw.of, "of")?;
                let t = raw.target.as_ref().ok_or_else(|| need("target"))?;
                let target = StateSpace::new(t.get_ref().iter().cloned())
                    .map_err(|e| loc.err(t.span(), field("target"), e.to_string()))?;
                let m = raw.map.as_ref().ok_or_else(|| need("map"))?;
                let map = state_map(loc, m, &field("map"), mu.space(), &target)?;
                factor_pushforward(map, target, mu).map_err(|e| core(e, "map"))?
            }
            _ => unreachable!("kind was validated"),
        };

        let partition = match &raw.partition {
            None => None,
            Some(p) => {
                let pname = p.get_ref();
                if !matches!(pname.as_str(), "singletons" | "trivial") {
                    let named = self.partitions.iter().find(|q| &q.name == pname).ok_or_else(|| {
                        loc.err(p.span(), field("partition"), format!("unknown partition `{pname}`"))
                    })?;
                    named.resolve(oracle.space()).map_err(|e| SpecError {
                        message: format!("{} (referenced from process.{name}.partition)", e.message),
                        ..e
                    })?;
                }
                Some(pname.clone())
            }
        };

        Ok(Process {
            name: name.to_string(),
            kind: kind.to_string(),
            oracle,
            closed_form,
            partition,
            inputs,
        })
    }
}

/// Nonnegative weights summing to one within [`STOCHASTIC_TOL`], renormalized.
fn weights(loc: &Locator, w: &[f64], span: Range<usize>, field: &str, size: usize) -> SpecResult<Distribution> {
    let bad = |m: String| loc.err(span.clone(), field, m);
    if w.len() != size {
        return Err(bad(format!("expected {size} entries, got {}", w.len())));
    }
    if let Some(x) = w.iter().find(|x| !x.is_finite() || **x < 0.0) {
        return Err(bad(format!("entry {x} is not a nonnegative number")));
    }
    let total: f64 = w.iter().sum();
    if (total - 1.0).abs() > STOCHASTIC_TOL {
        return Err(bad(format!("entries sum to {total}, not 1")));
    }
    Distribution::new(w.iter().map(|x| x / total).collect()).map_err(|e| bad(e.to_string()))
}

fn distribution(loc: &Locator, w: &Spanned<Vec<f64>>, field: &str, size: usize) -> SpecResult<Distribution> {
    weights(loc, w.get_ref(), w.span(), field, size)
}

fn state_map(
    loc: &Locator,
    m: &Spanned<Vec<StateRef>>,
    field: &str,
    domain: &StateSpace,
    target: &StateSpace,
) -> SpecResult<Vec<usize>> {
    if m.get_ref().len() != domain.size() {
        return Err(loc.err(
            m.span(),
            field,
            format!("expected {} entries, got {}", domain.size(), m.get_ref().len()),
        ));
    }
    m.get_ref()
        .iter()
        .map(|r| r.resolve(target).map_err(|e| loc.err(m.span(), field, e)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const CHAIN: &str = r#"
[space]
labels = ["a", "b"]

[process.chain]
kind = "markov"
transition = [[0.9, 0.1], [0.5, 0.5]]
"#;

    #[test]
    fn minimal_iid_spec_uses_default_run() {
        let m = parse_spec("[space]\nsize = 2\n[process.coin]\nkind = \"iid\"\ndistribution = [0.5, 0.5]\n").unwrap();
        assert_eq!(m.processes.len(), 1);
        assert_eq!(m.run, RunParams::default());
        assert!(matches!(m.processes[0].closed_form, Some(ClosedForm::Iid(_))));
    }

    #[test]
    fn markov_without_initial_starts_stationary() {
        let m = parse_spec(CHAIN).unwrap();
        let p = &m.processes[0];
        assert!(p.oracle.is_stationary());
        let Some(ClosedForm::Markov(spec)) = &p.closed_form else { panic!() };
        assert!((spec.initial().weights()[0] - 5.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn undefined_partition_names_the_field() {
        let text = format!("{CHAIN}partition = \"coarse\"\n");
        let e = parse_spec(&text).unwrap_err();
        assert_eq!(e.field, "process.chain.partition");
        assert_eq!(e.location.unwrap().0, 8);
        assert!(e.message.contains("coarse"));
    }

    #[test]
    fn dilation_of_markov_resolves_both_blocks() {
        let text = format!("{CHAIN}\n[process.slow]\nkind = \"dilation\"\nof = \"chain\"\nk = 2\n");
        let m = parse_spec(&text).unwrap();
        let names: Vec<&str> = m.processes.iter().map(|p| p.name.as_str()).collect();
        assert_eq!(names, ["chain", "slow"]);
        assert_eq!(m.process("slow").unwrap().inputs, ["chain"]);
    }

    #[test]
    fn forward_references_resolve() {
        let text = "[space]\nsize = 2\n[process.late]\nkind = \"shift\"\nof = \"coin\"\n[process.coin]\nkind = \"iid\"\ndistribution = [0.5, 0.5]\n";
        let m = parse_spec(text).unwrap();
        assert_eq!(m.processes[0].name, "late");
    }

    #[test]
    fn cycles_are_rejected() {
        let text = "[process.a]\nkind = \"shift\"\nof = \"b\"\n[process.b]\nkind = \"shift\"\nof = \"a\"\n";
        let e = parse_spec(text).unwrap_err();
        assert!(e.message.contains("cycle"), "{e}");
    }

    #[test]
    fn rows_must_be_stochastic() {
        let e = parse_spec(&CHAIN.replace("0.5, 0.5]]", "0.5, 0.6]]")).unwrap_err();
        assert_eq!(e.field, "process.chain.transition[1]");
        assert_eq!(e.location.unwrap().0, 7);
    }

    #[test]
    fn near_stochastic_rows_are_renormalized() {
        let m = parse_spec(&CHAIN.replace("0.5, 0.5]]", "0.5, 0.5000000001]]")).unwrap();
        let Some(ClosedForm::Markov(spec)) = &m.processes[0].closed_form else { panic!() };
        assert!((spec.transition()[1].iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bad_partition_is_located() {
        let text = format!("{CHAIN}partition = \"p\"\n[partition.p]\ncells = [[\"a\"], [\"a\", \"b\"]]\n");
        let e = parse_spec(&text).unwrap_err();
        assert_eq!(e.field, "partition.p.cells");
        assert_eq!(e.location.unwrap().0, 10);
    }

    #[test]
    fn stray_parameters_are_rejected() {
        let e = parse_spec(&format!("{CHAIN}k = 3\n")).unwrap_err();
        assert_eq!(e.field, "process.chain.k");
    }

    #[test]
    fn syntax_errors_carry_a_line() {
        let e = parse_spec("[space]\nsize = \n").unwrap_err();
        assert_eq!(e.location.unwrap().0, 2);
    }

    #[test]
    fn all_kinds_build() {
        let text = r#"
[space]
labels = ["a", "b"]

[partition.all]
cells = [["x", "y"]]

[process.coin]
kind = "iid"
distribution = [0.25, 0.75]

[process.seq]
kind = "product_sequence"
prefix = [[1.0, 0.0]]
tail = [[0.5, 0.5]]

[process.chain]
kind = "markov"
transition = [[0.9, 0.1], [0.5, 0.5]]
initial = [1.0, 0.0]

[process.swap]
kind = "transformation"
map = ["b", "a"]
measure = [0.5, 0.5]
preserving = true

[process.mixed]
kind = "mix"
weight = 0.3
first = "coin"
second = "chain"

[process.pair]
kind = "product"
left = "coin"
right = "swap"
partition = "singletons"

[process.later]
kind = "shift"
of = "seq"

[process.sub]
kind = "restriction"
of = "chain"
indices = [0, 2]

[process.slow]
kind = "dilation"
of = "coin"
k = 3

[process.image]
kind = "factor"
of = "pair"
map = ["x", "y", "y", "x"]
target = ["x", "y"]
partition = "all"

[process.blocks]
kind = "block_recode"
of = "chain"
k = 2

[sft.golden]
allowed = [[1, 1], [1, 0]]
"#;
        let m = parse_spec(text).unwrap();
        assert_eq!(m.processes.len(), 11);
        assert_eq!(m.process("blocks").unwrap().oracle.space().size(), 4);
        assert!(m.sft("golden").unwrap().sft.is_some());
    }

    #[test]
    fn empty_subshift_is_kept_as_none() {
        let m = parse_spec("[space]\nsize = 2\n[sft.none]\nallowed = [[0, 1], [0, 0]]\n").unwrap();
        assert!(m.sft("none").unwrap().sft.is_none());
    }
}
