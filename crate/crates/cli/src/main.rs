use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod manifest;

use commands::{CliError, Rendered};

#[derive(Parser, Debug)]
#[command(name = "leafspace", version, about = "Exact characteristic classes of foliations and leaf-space cohomology")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Write the result here instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Write a run manifest (digests, seed, timing) to this file
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Cohomology of W_n, WO_n or WGL_n
    Gf {
        #[arg(long)]
        variant: String,
        #[arg(long)]
        n: u32,
        /// Defaults to the top degree of the model
        #[arg(long)]
        max_degree: Option<u32>,
        /// Allow n above 4 (the basis grows exponentially in n)
        #[arg(long)]
        uncapped: bool,
    },
    /// Maps on cohomology along WGL_n -> WO_n -> W_n, with kernels
    Compare {
        #[arg(long)]
        n: u32,
        /// Defaults to every degree
        #[arg(long)]
        degree: Option<u32>,
        /// Allow n above 4 (the basis grows exponentially in n)
        #[arg(long)]
        uncapped: bool,
    },
    /// Differential form realizing a cocycle on jets
    Realize {
        #[arg(long)]
        class: String,
        #[arg(long, default_value_t = 1)]
        n: u32,
        /// Jet truncation order, defaults to max(2, degree)
        #[arg(long = "K")]
        k: Option<usize>,
        /// Model the cocycle lives in
        #[arg(long, default_value = "WO")]
        variant: String,
    },
    /// Residuals of a form under the standard one-dimensional family
    Invariance {
        /// Cocycle to realize first
        #[arg(long, conflicts_with = "form", required_unless_present = "form")]
        class: Option<String>,
        /// Form with constant coefficients such as "2 * dx0^dx1", or "chern"
        #[arg(long)]
        form: Option<String>,
        #[arg(long = "K", default_value_t = 3)]
        k: usize,
        #[arg(long, default_value = "WO")]
        variant: String,
    },
    /// Total cohomology of a chart category
    Cdr {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 2)]
        max_degree: usize,
        /// Print class representatives
        #[arg(long)]
        representatives: bool,
        /// Push a family of the model through the j map
        #[arg(long)]
        family: Option<String>,
    },
    /// Check the homotopy between a cover and its refinement
    VerifyHomotopy {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 3)]
        max_degree: usize,
    },
}

fn run(cli: &Cli) -> Result<(Rendered, Vec<PathBuf>, Option<u64>), CliError> {
    let format = cli.common.format;
    Ok(match &cli.command {
        Command::Gf {
            variant,
            n,
            max_degree,
            uncapped,
        } => (commands::gf(variant, *n, *max_degree, *uncapped, format)?, vec![], None),
        Command::Compare { n, degree, uncapped } => (commands::compare(*n, *degree, *uncapped, format)?, vec![], None),
        Command::Realize { class, n, k, variant } => (commands::realize(class, variant, *n, *k, format)?, vec![], None),
        Command::Invariance { class, form, k, variant } => (
            commands::invariance(class.as_deref(), form.as_deref(), variant, *k, format)?,
            vec![],
            None,
        ),
        Command::Cdr {
            model,
            max_degree,
            representatives,
            family,
        } => (
            commands::cdr(model, *max_degree, *representatives, family.as_deref(), format)?,
            vec![model.clone()],
            None,
        ),
        Command::VerifyHomotopy {
            model,
            seed,
            trials,
            max_degree,
        } => (
            commands::verify_homotopy(model, *seed, *trials, *max_degree, format)?,
            vec![model.clone()],
            Some(*seed),
        ),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let start = Instant::now();
    let (rendered, inputs, seed) = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    if let Some(path) = &cli.common.output {
        if let Err(e) = std::fs::write(path, &rendered.text) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    } else {
        print!("{}", rendered.text);
    }
    if let Some(path) = &cli.common.manifest {
        let args: Vec<String> = std::env::args().skip(1).collect();
        let m = manifest::build(&args, &inputs, seed, start.elapsed(), &rendered.text);
        if let Err(e) = std::fs::write(path, m) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    if rendered.failed {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
