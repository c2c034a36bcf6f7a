use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dnorm_cli::commands::{
    run_compute, run_convert, ComputeOptions, Method, Mode, OutputFormat, Representation,
    EXIT_FAILURE, EXIT_OK,
};
use dnorm_cli::selftest::{run_all, Scale};
use dnorm_core::solver::FaultInjection;

#[derive(Parser)]
#[command(name = "dnorm", version, about = "Approximate the diamond norm of a super-operator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Fault {
    CorruptConstants,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the diamond norm of the map in a channel file.
    Compute {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, value_enum, default_value = "convex")]
        method: Method,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "json")]
        output: OutputFormat,
        /// Oracle model for the convex method.
        #[arg(long, value_enum, default_value = "separation-cuts")]
        mode: Mode,
        #[arg(long)]
        max_iterations: Option<usize>,
        /// Report wall time (makes output run-dependent).
        #[arg(long)]
        timing: bool,
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<Fault>,
    },
    /// Convert between Stinespring, natural and Choi representations.
    Convert {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        from: Representation,
        #[arg(long, value_enum)]
        to: Representation,
        #[arg(long)]
        output: PathBuf,
    },
    /// Run the acceptance suite.
    Selftest {
        #[arg(long, value_enum, default_value = "quick")]
        scale: Scale,
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<Fault>,
    },
}

fn fault(f: Option<Fault>) -> Option<FaultInjection> {
    f.map(|Fault::CorruptConstants| FaultInjection::CorruptConstants)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let code = match cli.command {
        Command::Compute {
            input,
            epsilon,
            method,
            seed,
            output,
            mode,
            max_iterations,
            timing,
            inject_fault,
        } => {
            let opts = ComputeOptions {
                epsilon,
                method,
                seed,
                mode,
                max_iterations,
                timing,
                fault: fault(inject_fault),
            };
            run_compute(&input, &opts, output, &mut io::stdout(), &mut io::stderr())
        }
        Command::Convert {
            input,
            from,
            to,
            output,
        } => run_convert(&input, from, to, &output, &mut io::stderr()),
        Command::Selftest {
            scale,
            inject_fault,
        } => {
            if run_all(scale, fault(inject_fault), &mut io::stdout()) == 0 {
                EXIT_OK
            } else {
                EXIT_FAILURE
            }
        }
    };
    ExitCode::from(code as u8)
}
