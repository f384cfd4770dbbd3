use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lti_pmp_cli::{run, write_outputs, AnalysisConfig, Command, LemmaOptions, EXIT_IO};

#[derive(Parser)]
#[command(name = "lti-pmp", version, about = "Periodic monotonicity certificates for stable SISO LTI systems")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Certify the autocorrelation kernel (exit 0 certified, 1 failed, 2 inconclusive)
    Certify(Common),
    /// Harmonic dominance, octave chain and a gain sweep written as CSV
    VerifyGain(Common),
    /// Positive-domination certificate cross-checked on a frequency sweep
    Posdom(Common),
    /// Largest two-harmonic amplitude passing the curve test
    LemmaInput(Lemma),
}

#[derive(Args)]
struct Common {
    /// System description file
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Time horizon of the certificate grid
    #[arg(long)]
    t_max: Option<f64>,
    /// Number of grid intervals
    #[arg(long)]
    grid_n: Option<usize>,
    /// Decision tolerance
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    sweep_lo: Option<f64>,
    #[arg(long)]
    sweep_hi: Option<f64>,
    #[arg(long)]
    sweep_points: Option<usize>,
    /// Highest harmonic compared in verify-gain
    #[arg(long)]
    k_max: Option<u32>,
    /// Directory for the report and CSV files
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Lemma {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    #[arg(long, default_value_t = 2)]
    k: u32,
    /// Bisection tolerance on the amplitude
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    /// Samples per period (default 256 k)
    #[arg(long)]
    samples: Option<usize>,
}

impl Common {
    fn config(&self) -> AnalysisConfig {
        AnalysisConfig {
            t_max: self.t_max,
            grid_n: self.grid_n,
            eps: self.eps,
            sweep_lo: self.sweep_lo,
            sweep_hi: self.sweep_hi,
            sweep_points: self.sweep_points,
            k_max: self.k_max,
            out: self.out.clone(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_IO } else { 0 });
        }
    };
    let (command, common) = match &cli.command {
        Cmd::Certify(c) => (Command::Certify, c),
        Cmd::VerifyGain(c) => (Command::VerifyGain, c),
        Cmd::Posdom(c) => (Command::Posdom, c),
        Cmd::LemmaInput(l) => (
            Command::LemmaInput(LemmaOptions {
                omega: l.omega,
                k: l.k,
                tol: l.tol,
                samples: l.samples,
            }),
            &l.common,
        ),
    };
    let cfg = common.config();
    let outcome = match run(&command, common.spec.as_deref(), &cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    print!("{}", outcome.report.render());
    if let Some(dir) = &cfg.out {
        if let Err(e) = write_outputs(dir, &command, &outcome) {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    }
    ExitCode::from(outcome.exit_code)
}
