mod config;
mod error;
mod output;
mod run;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use bunching_core::{Frame, PhysicalParams};
use clap::{Args, Parser, Subcommand};

use config::{Lambdas, Layer, StateKind};
use error::CliError;
use output::Format;

/// Decoherence factor and photon correlations of an Ising chain coupled to two
/// resonator modes.
#[derive(Parser)]
#[command(name = "bunching", version)]
struct Cli {
    /// Worker threads (default: one per core)
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// |r(t)|² of the (1,0)/(0,1) sectors, one file per scenario
    Rscan(ScanArgs),
    /// g²(t) of the combined mode, one file per scenario
    G2scan(ScanArgs),
    /// Short-time Gaussian bound against |r(t)|²
    Bound(ScanArgs),
    /// Run the oracle cross-checks; exit status 2 on failure
    Verify(VerifyArgs),
    /// Coupling constants and energy scale from circuit parameters
    Params(ParamsArgs),
}

#[derive(Args)]
struct ScanArgs {
    /// Built-in parameter set: fig2, fig3 or fig4
    #[arg(long)]
    preset: Option<String>,
    /// TOML file of settings; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of spins
    #[arg(long)]
    n: Option<usize>,
    /// Reference coupling(s), comma separated; one scenario each
    #[arg(long, value_delimiter = ',')]
    lambda: Vec<f64>,
    /// Coupling of mode 2; mode 1 follows from the frequency ratio
    #[arg(long)]
    eta2: Option<f64>,
    #[arg(long)]
    tmax: Option<f64>,
    /// Time steps; the grid has steps + 1 points
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long, value_enum)]
    state: Option<StateKind>,
    /// Coherent amplitude (real)
    #[arg(long)]
    alpha: Option<f64>,
    /// Highest Fock index kept for coherent states
    #[arg(long)]
    truncation: Option<usize>,
    /// as-printed or lab-frame
    #[arg(long)]
    frame: Option<Frame>,
    /// Also write ⟨A†(t)A⟩ (g2scan)
    #[arg(long)]
    first_order: bool,
    /// Momentum cutoff of the bound
    #[arg(long)]
    k_c: Option<f64>,
    /// Output directory
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

impl ScanArgs {
    fn layer(&self) -> Layer {
        Layer {
            n: self.n,
            lambda: (!self.lambda.is_empty()).then(|| Lambdas::Many(self.lambda.clone())),
            eta2: self.eta2,
            tmax: self.tmax,
            steps: self.steps,
            state: self.state,
            alpha: self.alpha,
            truncation: self.truncation,
            frame: self.frame,
            first_order: self.first_order.then_some(true),
            k_c: self.k_c,
            ..Layer::default()
        }
    }

    fn scenarios(&self) -> Result<Vec<config::Scenario>, CliError> {
        let preset = self.preset.as_deref().map(Layer::preset).transpose()?;
        let file = self.config.as_deref().map(Layer::read).transpose()?;
        config::resolve(preset.as_ref(), file.as_ref(), &self.layer())
    }
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long, default_value_t = 0.1)]
    eta2: f64,
    /// Random samples for the per-momentum check (others use a tenth)
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    /// Ring size of the exact-diagonalization check
    #[arg(long, default_value_t = 10)]
    ed_n: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Flip the sign of C_-- to confirm the checks catch it
    #[arg(long)]
    mutate: bool,
}

#[derive(Args)]
struct ParamsArgs {
    #[arg(long)]
    josephson_hz: Option<f64>,
    #[arg(long)]
    c_m: Option<f64>,
    #[arg(long)]
    c_sigma: Option<f64>,
    #[arg(long)]
    loop_area: Option<f64>,
    #[arg(long)]
    loop_distance: Option<f64>,
    #[arg(long)]
    tlr_length: Option<f64>,
    /// Resonator inductance per unit length, H/m
    #[arg(long)]
    inductance_per_length: Option<f64>,
    /// Mode-2 frequency in Hz
    #[arg(long)]
    f2_hz: Option<f64>,
    /// ω₁/ω₂
    #[arg(long, default_value_t = 3.0)]
    frequency_ratio: f64,
    /// Also write the report to this directory
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

impl ParamsArgs {
    fn circuit(&self) -> PhysicalParams {
        let mut p = PhysicalParams::reference_circuit();
        let set = |field: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *field = v;
            }
        };
        set(&mut p.josephson_hz, self.josephson_hz);
        set(&mut p.c_m, self.c_m);
        set(&mut p.c_sigma, self.c_sigma);
        set(&mut p.loop_area, self.loop_area);
        set(&mut p.loop_distance, self.loop_distance);
        set(&mut p.tlr_length, self.tlr_length);
        set(&mut p.inductance_per_length, self.inductance_per_length);
        set(&mut p.omega2, self.f2_hz.map(|f| 2.0 * std::f64::consts::PI * f));
        p.omega1 = self.frequency_ratio * p.omega2;
        p
    }
}

fn report(written: Vec<run::Written>) {
    for w in written {
        println!("wrote {}  {}", w.path.display(), w.summary);
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Usage(format!("--jobs: {e}")))?;
    }
    match cli.command {
        Command::Rscan(args) => report(run::rscan(&args.scenarios()?, &args.out, args.format)?),
        Command::G2scan(args) => report(run::g2scan(&args.scenarios()?, &args.out, args.format)?),
        Command::Bound(args) => report(run::bound(&args.scenarios()?, &args.out, args.format)?),
        Command::Verify(args) => {
            let opts = verify::Options {
                lambda: args.lambda,
                eta2: args.eta2,
                samples: args.samples,
                ed_n: args.ed_n,
                seed: args.seed,
                mutate: args.mutate,
            };
            let checks = verify::run(&opts)?;
            let mut failed = Vec::new();
            for c in &checks {
                let status = match (c.pass, c.informational) {
                    (true, _) => "PASS",
                    (false, false) => "FAIL",
                    (false, true) => "INFO",
                };
                println!("{status} {:<24} {}", c.name, c.detail);
                if !c.pass && !c.informational {
                    failed.push(c.name);
                }
            }
            if !failed.is_empty() {
                return Err(CliError::Verification(failed.join(", ")));
            }
        }
        Command::Params(args) => {
            let p = args.circuit();
            let values = run::params(&p)?;
            for (k, v) in &values {
                println!("{k} = {}", output::number(*v));
            }
            if let Some(dir) = &args.out {
                let path = run::write_params(&p, &values, dir, args.format)?;
                println!("wrote {}", path.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
