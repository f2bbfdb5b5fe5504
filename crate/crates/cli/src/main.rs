use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use hsd_cli::{run, Cli};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            eprintln!("hsd: cannot start {} worker threads: {e}", cli.threads);
            return ExitCode::from(2);
        }
    }
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let stderr = std::io::stderr();
    let mut diag = stderr.lock();
    let result = run(&cli, &mut out, &mut diag);
    let _ = out.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = writeln!(diag, "hsd: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
