use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tfapprox::io::{read_signals, write_error_curve, write_eigenvalue_field, write_result, write_signals};
use tfapprox::{
    approximation_error, optimal_generators, project, random_subspace_sweep, zak, DataSet,
    Result, TFSubspace, TfError,
};

#[derive(Parser)]
#[command(
    name = "tfapprox",
    version,
    about = "Optimal time-frequency subspace approximation of finite signal sets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Signal file (header `d=<int>,m=<int>`, then m*d lines `re,im`).
    #[arg(long)]
    input: PathBuf,
    /// Period of the time lattice generator; must divide d.
    #[arg(long)]
    p: usize,
    /// Size of the frequency lattice; must divide p.
    #[arg(long)]
    s: usize,
    /// Output directory.
    #[arg(long, default_value = ".")]
    output_dir: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the optimal subspace with n generators and persist the
    /// result.
    Approx {
        #[command(flatten)]
        common: CommonArgs,
        /// Number of generators, 1 <= n <= m.
        #[arg(long)]
        n: usize,
    },
    /// Project the input signals onto the span of a generator file.
    Project {
        #[command(flatten)]
        common: CommonArgs,
        /// Generator file in the signal file format.
        #[arg(long)]
        generators: PathBuf,
    },
    /// Emit the Zak grid of every input signal.
    Zak {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Emit the full per-fiber eigenvalue field of the input data.
    Spectrum {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Emit the error curve (n, error) for n = 0..=n_max.
    Curve {
        #[command(flatten)]
        common: CommonArgs,
        /// Largest n to tabulate; defaults to m.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Run the random-subspace oracle sweep and emit the report.
    Validate {
        #[command(flatten)]
        common: CommonArgs,
        /// Number of generators for the optimal subspace.
        #[arg(long)]
        n: usize,
        /// RNG seed for the sampled subspaces.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of sampled subspaces.
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
}

fn main() -> ExitCode {
    if let Err(code) = check_thread_env() {
        return code;
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                TfError::ConvergenceFailure { .. } => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}

/// Optional worker cap; the current implementation is sequential, so the
/// value only gets validated.
fn check_thread_env() -> std::result::Result<(), ExitCode> {
    if let Ok(raw) = std::env::var("TFAPPROX_THREADS") {
        if raw.parse::<usize>().is_err() {
            eprintln!("error: TFAPPROX_THREADS must be a nonnegative integer (0 = auto)");
            return Err(ExitCode::from(2));
        }
    }
    Ok(())
}

fn load(common: &CommonArgs) -> Result<DataSet> {
    read_signals(&common.input, common.p, common.s)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Approx { common, n } => {
            let data = load(&common)?;
            let result = optimal_generators(&data, n)?;
            write_result(&common.output_dir, &result, None)?;
            println!("{:.12e}", result.error);
            Ok(ExitCode::SUCCESS)
        }
        Command::Project { common, generators } => {
            let data = load(&common)?;
            let gens = read_signals(&generators, common.p, common.s)?;
            let space = TFSubspace::new(gens.signals)?;
            let projected = data
                .signals
                .iter()
                .map(|f| project(f, &space))
                .collect::<Result<Vec<_>>>()?;
            std::fs::create_dir_all(&common.output_dir)?;
            write_signals(&common.output_dir.join("projections.csv"), &projected)?;
            let error = approximation_error(&data, &space)?;
            println!("{:.12e}", error);
            Ok(ExitCode::SUCCESS)
        }
        Command::Zak { common } => {
            let data = load(&common)?;
            let mut out = String::from("signal,omega,ell,re,im\n");
            for (idx, f) in data.signals.iter().enumerate() {
                let grid = zak(f);
                for (omega, row) in grid.values.iter().enumerate() {
                    for (ell, z) in row.iter().enumerate() {
                        out.push_str(&format!(
                            "{},{},{},{:.16e},{:.16e}\n",
                            idx, omega, ell, z.re, z.im
                        ));
                    }
                }
            }
            std::fs::create_dir_all(&common.output_dir)?;
            std::fs::write(common.output_dir.join("zak.csv"), out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Spectrum { common } => {
            let data = load(&common)?;
            let m = data.len();
            let result = optimal_generators(&data, m)?;
            std::fs::create_dir_all(&common.output_dir)?;
            write_eigenvalue_field(
                &common.output_dir.join("eigenvalues.csv"),
                &result.eigenvalues,
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Curve { common, n } => {
            let data = load(&common)?;
            let m = data.len();
            let n_max = n.unwrap_or(m);
            if n_max > m {
                return Err(TfError::InvalidRank { n: n_max, m });
            }
            let result = optimal_generators(&data, m)?;
            std::fs::create_dir_all(&common.output_dir)?;
            write_error_curve(&common.output_dir.join("curve.csv"), &result.eigenvalues, n_max)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate {
            common,
            n,
            seed,
            trials,
        } => {
            let data = load(&common)?;
            let reports = random_subspace_sweep(&data, n, trials, seed)?;
            std::fs::create_dir_all(&common.output_dir)?;
            let json = serde_json::to_string_pretty(&reports)
                .expect("report serialization cannot fail");
            std::fs::write(common.output_dir.join("report.json"), json)?;
            let failures = reports.iter().filter(|r| !r.pass).count();
            if failures == 0 {
                println!("ok: {} trials, no violations", reports.len());
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!("FAIL: {failures} of {} trials violated optimality", reports.len());
                Ok(ExitCode::from(1))
            }
        }
    }
}
