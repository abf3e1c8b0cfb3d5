use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cusp_cli::{cmd_charge, cmd_construct, cmd_dual, cmd_monodromy, cmd_render, cmd_verify, RunOptions};

/// Type III anticanonical pairs from toric models and surgery recipes.
#[derive(Parser)]
#[command(name = "cusp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dual cycle of a negative-definite cycle, with both charges.
    Dual { cycle: String },
    /// Charge 12 + sum(d - 3) of a cycle.
    Charge { cycle: String },
    /// Monodromy matrix, trace and R/L word of a cycle.
    Monodromy { cycle: String },
    /// Run a recipe through surgery, compactification and triangulation.
    Construct {
        #[arg(long)]
        recipe: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// First boundary vertex of the cone's fundamental domain.
        #[arg(long)]
        anchor: Option<usize>,
        /// Periods of the boundary to develop on each side.
        #[arg(long, default_value_t = 1)]
        periods: usize,
        /// Also write base.svg and complex.svg.
        #[arg(long)]
        svg: bool,
        /// Let blow-up triangles share sides with earlier cuts.
        #[arg(long)]
        relaxed_cuts: bool,
    },
    /// Check a complex JSON file against an expected dual cycle.
    Verify {
        complex: PathBuf,
        #[arg(long)]
        dual: String,
    },
    /// Draw a base, surface or complex JSON file as SVG.
    Render {
        artifact: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("CUSP_LOG")).init();
    let cli = Cli::parse();
    let mut target = None;
    let result = match cli.command {
        Command::Dual { cycle } => cmd_dual(&cycle),
        Command::Charge { cycle } => cmd_charge(&cycle),
        Command::Monodromy { cycle } => cmd_monodromy(&cycle),
        Command::Construct { recipe, out, anchor, periods, svg, relaxed_cuts } => {
            cmd_construct(&recipe, &out, RunOptions { anchor, periods, relaxed_cuts }, svg)
        }
        Command::Verify { complex, dual } => cmd_verify(&complex, &dual),
        Command::Render { artifact, out } => {
            target = out;
            cmd_render(&artifact)
        }
    };
    match result {
        Ok(o) => {
            match target {
                Some(p) => {
                    if let Err(e) = std::fs::write(&p, &o.stdout) {
                        eprintln!("{}: {e}", p.display());
                        return ExitCode::from(2);
                    }
                }
                None => {
                    let mut out = std::io::stdout().lock();
                    match out.write_all(o.stdout.as_bytes()).and_then(|_| out.flush()) {
                        // a closed pipe (`cusp ... | head`) is not an error
                        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                            eprintln!("stdout: {e}");
                            return ExitCode::from(2);
                        }
                        _ => {}
                    }
                }
            }
            ExitCode::from(o.code as u8)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
