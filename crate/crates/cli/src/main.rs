use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mdp_cli::{
    cmd_bell_table, cmd_hom_scan, cmd_pdc_report, cmd_purity_surface, cmd_self_test, parse_kernel, parse_spec,
    CliError, CliResult, Format,
};

#[derive(Parser)]
#[command(name = "mdp", version, about = "Multi-DOF few-photon scenarios")]
struct Cli {
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reduced-state purity over a (K_A, K_B) grid, closed form against numeric.
    PuritySurface {
        #[arg(long, default_value_t = 0.05)]
        kmin: f64,
        #[arg(long, default_value_t = 1.0)]
        kmax: f64,
        #[arg(long, default_value_t = 20)]
        steps: usize,
    },
    /// Beamsplitter outcomes while mixing the symmetric and antisymmetric kernel parts.
    HomScan {
        #[arg(long)]
        kernel: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        r: f64,
        #[arg(long, default_value_t = 11)]
        steps: usize,
    },
    /// Four-photon decomposition, purity, alpha and visibility for two Schmidt specs (JSON).
    PdcReport {
        #[arg(long)]
        spec_a: PathBuf,
        #[arg(long)]
        spec_b: PathBuf,
    },
    /// Outcome probabilities of the four Bell states behind one beamsplitter.
    BellTable {
        #[arg(long, default_value_t = 0.5)]
        r: f64,
    },
    /// Randomized invariant checks (JSON).
    SelfTest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn run(cli: &Cli) -> CliResult<String> {
    match &cli.command {
        Command::PuritySurface { kmin, kmax, steps } => cmd_purity_surface(*kmin, *kmax, *steps, cli.format),
        Command::HomScan { kernel, r, steps } => cmd_hom_scan(&parse_kernel(&read(kernel)?)?, *r, *steps, cli.format),
        Command::PdcReport { spec_a, spec_b } => {
            cmd_pdc_report(&parse_spec(&read(spec_a)?)?, &parse_spec(&read(spec_b)?)?)
        }
        Command::BellTable { r } => cmd_bell_table(*r, cli.format),
        Command::SelfTest { seed, trials } => cmd_self_test(*seed, *trials),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|text| match &cli.out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mdp: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
