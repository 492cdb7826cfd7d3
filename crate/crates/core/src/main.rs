use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use sasremap::config::RunConfig;
use sasremap::{io, run};

#[derive(Parser)]
#[command(name = "sasremap", version, about = "Conservative remap experiments on quadrilateral meshes")]
struct Cli {
    /// Override the mesh seed from the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (results are identical for any count).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a remap experiment and write fields, diagnostics and report.
    Run { config: PathBuf },
    /// Write the mesh series only.
    Mesh { config: PathBuf },
    /// Recompute the report of a finished run from its CSV files.
    Report { dir: PathBuf },
}

fn load(path: &Path, seed: Option<u64>) -> anyhow::Result<RunConfig> {
    let text = io::read_file(path)?;
    let mut cfg: RunConfig = text
        .parse()
        .with_context(|| format!("parsing {}", path.display()))?;
    if let Some(seed) = seed {
        cfg.mesh.seed = seed;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    match real_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn real_main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config } => {
            let cfg = load(&config, cli.seed)?;
            let sim = run::run(&cfg, cli.threads)?;
            print!("{}", sim.report.to_key_value());
            eprintln!("wrote {}", cfg.output.dir.display());
        }
        Command::Mesh { config } => {
            let cfg = load(&config, cli.seed)?;
            for path in run::emit_mesh_series(&cfg)? {
                println!("{}", path.display());
            }
        }
        Command::Report { dir } => {
            let report = run::report_from_dir(&dir)?;
            print!("{}", report.to_key_value());
        }
    }
    Ok(())
}
