//! Command-line front end: reads spec files, runs entropy computations and the
//! verification suite, and writes CSV.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

pub mod commands;
pub mod error;
pub mod output;
pub mod spec;

pub use error::CliError;
use commands::Settings;
use spec::{parse_spec, LogBase, Model, RunParams};

#[derive(Debug, Parser)]
#[command(name = "hsd", version, about = "Entropy of stochastic processes and subshifts")]
pub struct Cli {
    /// Worker threads for enumeration and the verification suite; 0 uses all cores.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Block entropy series and estimate for one process.
    Entropy {
        #[command(flatten)]
        common: Common,
        /// Process to evaluate; may be omitted when the spec declares only one.
        #[arg(long)]
        process: Option<String>,
        /// Partition name, or `singletons` / `trivial`.
        #[arg(long)]
        partition: Option<String>,
    },
    /// Word counts, growth rate and Parry chain of a subshift.
    Topological {
        #[command(flatten)]
        common: Common,
        /// Subshift to evaluate; may be omitted when the spec declares only one.
        #[arg(long)]
        sft: Option<String>,
    },
    /// Run the seeded verification suite.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seed: Option<u64>,
        /// Checks to run, comma separated.
        #[arg(long, value_delimiter = ',')]
        filter: Vec<String>,
    },
    /// Entropy series of every declared process across horizons.
    Sweep {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Largest number of words enumerated at one block length.
    #[arg(long)]
    pub budget: Option<u64>,
    /// Unit of displayed entropies: `e` (nats) or `2` (bits).
    #[arg(long)]
    pub log_base: Option<LogBase>,
}

impl Common {
    fn model(&self) -> Result<Option<Model>, CliError> {
        self.spec.as_deref().map(load).transpose()
    }

    fn required_model(&self) -> Result<Model, CliError> {
        self.model()?
            .ok_or_else(|| CliError::Usage("this command needs --spec <path>".into()))
    }

    fn settings(&self, model: Option<&Model>, seed: Option<u64>) -> Result<Settings, CliError> {
        let run = model.map_or_else(RunParams::default, |m| m.run);
        Settings::new(run, self.horizon, self.budget, self.log_base, seed)
    }
}

pub fn load(path: &Path) -> Result<Model, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    parse_spec(&text).map_err(|e| {
        CliError::Usage(format!("{}: {e}", path.display()))
    })
}

/// Runs one command, writing CSV to `out` and diagnostics to `diag`.
pub fn run(cli: &Cli, out: &mut dyn Write, diag: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Entropy {
            common,
            process,
            partition,
        } => {
            let model = common.required_model()?;
            let settings = common.settings(Some(&model), None)?;
            commands::entropy(&model, process.as_deref(), partition.as_deref(), &settings, out)
        }
        Command::Topological { common, sft } => {
            let model = common.required_model()?;
            let settings = common.settings(Some(&model), None)?;
            commands::topological(&model, sft.as_deref(), &settings, out)
        }
        Command::Verify {
            common,
            seed,
            filter,
        } => {
            let model = common.model()?;
            let settings = common.settings(model.as_ref(), *seed)?;
            commands::verify(model.as_ref(), filter, &settings, out, diag)
        }
        Command::Sweep { common } => {
            let model = common.required_model()?;
            let settings = common.settings(Some(&model), None)?;
            commands::sweep(&model, &settings, out)
        }
    }
}
