//! `sparsiqc`: generate benchmark instances, analyze them on a frequency
//! grid, time the two LMI forms and export single-frequency SDPs.

mod cmd;
mod error;
mod files;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use sparsiqc::lmi::LmiForm;
use sparsiqc::lti::{Frequency, FrequencyGrid};
use sparsiqc::sdp::SolverPath;

#[derive(Parser)]
#[command(
    name = "sparsiqc",
    version,
    about = "Robust stability analysis of interconnected uncertain systems"
)]
struct Cli {
    /// Worker threads for per-instance and per-frequency work (0 = all cores).
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FormArg {
    Lumped,
    Sparse,
    Both,
}

impl FormArg {
    fn forms(self) -> Vec<LmiForm> {
        match self {
            FormArg::Lumped => vec![LmiForm::Lumped],
            FormArg::Sparse => vec![LmiForm::Sparse],
            FormArg::Both => vec![LmiForm::Lumped, LmiForm::Sparse],
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate instances from a generator config.
    Generate {
        #[arg(long)]
        config: PathBuf,
        /// Output directory for instance files and the manifest.
        #[arg(long)]
        out: PathBuf,
    },
    /// Per-frequency robustness analysis of one instance.
    Analyze {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = FormArg::Sparse)]
        form: FormArg,
        /// `log:LO:HI:N` (adds 0 and inf), `single:W` or `list:W1,W2,...`.
        #[arg(long, default_value = "log:1e-2:1e2:20")]
        grid: FrequencyGrid,
        #[arg(long, default_value_t = SolverPath::Auto)]
        solver_path: SolverPath,
        /// Output directory for certificates and the manifest.
        #[arg(long)]
        out: PathBuf,
    },
    /// Time LMI construction and solution over a sweep of network sizes.
    Benchmark {
        #[arg(long)]
        config: PathBuf,
        /// Output directory for the CSV and the manifest.
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the single-frequency SDP of an instance in SDPA sparse format.
    Export {
        instance: PathBuf,
        #[arg(long)]
        freq: Frequency,
        #[arg(long, value_enum)]
        form: FormArg,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(2);
        }
    };
    let result = pool.install(|| match cli.command {
        Command::Generate { config, out } => cmd::generate::run(&config, &out),
        Command::Analyze {
            instance,
            form,
            grid,
            solver_path,
            out,
        } => cmd::analyze::run(&instance, &form.forms(), &grid, solver_path, &out),
        Command::Benchmark { config, out } => cmd::benchmark::run(&config, &out),
        Command::Export {
            instance,
            freq,
            form,
            out,
        } => match form {
            FormArg::Both => Err(error::CliError::Usage("export needs a single form".into())),
            f => cmd::export::run(&instance, freq, f.forms()[0], &out),
        },
    });
    match result {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
