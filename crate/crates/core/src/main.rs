use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use relay_secrecy::closed_form::Metric;
use relay_secrecy::fading_model::LinkSnrDb;
use relay_secrecy::sweep::{
    check_preset, figure_preset, run_sweeps, validate, write_csv, Axis, Oracle, SweepSpec, Template, Tolerances,
};
use relay_secrecy::{CsiMode, Error, Scheme};

const EXIT_USAGE: u8 = 2;
const EXIT_NUMERIC: u8 = 3;
const EXIT_VALIDATION: u8 = 4;

#[derive(Parser)]
#[command(name = "relay-secrecy", version, about = "Secrecy outage and ergodic secrecy rate of a threshold DF relay link")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate closed forms along a parameter axis and write CSV.
    Sweep(SweepArgs),
    /// Compare closed forms against quadrature and Monte Carlo on a random grid.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct SweepArgs {
    /// Figure preset (fig2..fig7); replaces the axis, range, link and set flags.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long, default_value = "balanced")]
    axis: Axis,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    from_db: f64,
    #[arg(long, default_value_t = 40.0, allow_negative_numbers = true)]
    to_db: f64,
    #[arg(long, default_value_t = 2.0)]
    step_db: f64,
    #[arg(long, value_delimiter = ',', default_value = "MRC-SC,MRC-MRC,SC-SC,SC-MRC")]
    scheme: Vec<Scheme>,
    #[arg(long, value_delimiter = ',', default_value = "NOCSI,CSI")]
    csi: Vec<CsiMode>,
    #[arg(long, value_delimiter = ',', default_value = "SOP,ESR")]
    metric: Vec<Metric>,
    /// Add a Monte Carlo column with this many trials per point.
    #[arg(long, conflicts_with = "quad_tol")]
    mc_trials: Option<u64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Add a quadrature column at this tolerance.
    #[arg(long)]
    quad_tol: Option<f64>,
    /// Add asymptote and saturation columns.
    #[arg(long)]
    asymptote: bool,
    /// Run the preset's qualitative checks; failures exit with code 4.
    #[arg(long, requires = "preset")]
    check: bool,
    /// Output path (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "custom")]
    series: String,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    alpha_se_db: f64,
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    alpha_re_db: f64,
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    beta_sd_db: f64,
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    beta_sr_db: f64,
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    beta_rd_db: f64,
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    gamma_th_db: f64,
    /// Target secrecy rate in bits per channel use.
    #[arg(long, default_value_t = 1.0)]
    rate_rs: f64,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long, default_value_t = 200)]
    grid_size: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    mc_trials: u64,
    #[arg(long, default_value_t = 3.0)]
    mc_sigmas: f64,
    #[arg(long, default_value_t = 1e-4)]
    mc_abs: f64,
    #[arg(long, default_value_t = 1e-6)]
    quad_abs: f64,
    #[arg(long, default_value_t = 1e-9)]
    quad_tol: f64,
    /// Report path (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Error(Error),
    Validation,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, Error> {
    Ok(match path {
        Some(p) => {
            let f = File::create(p).map_err(|e| Error::Usage(format!("cannot create {}: {e}", p.display())))?;
            Box::new(BufWriter::new(f))
        }
        None => Box::new(io::stdout().lock()),
    })
}

fn oracle(mc_trials: Option<u64>, seed: u64, quad_tol: Option<f64>) -> Option<Oracle> {
    match (mc_trials, quad_tol) {
        (Some(trials), _) => Some(Oracle::MonteCarlo { trials, seed }),
        (None, Some(tol)) => Some(Oracle::Quadrature { tol }),
        (None, None) => None,
    }
}

fn sweep(args: SweepArgs) -> Result<(), Failure> {
    let oracle = oracle(args.mc_trials, args.seed, args.quad_tol);
    let specs = match &args.preset {
        Some(name) => {
            let mut specs = figure_preset(name)?;
            for s in &mut specs {
                s.oracle = oracle;
                s.asymptote |= args.asymptote;
            }
            specs
        }
        None => vec![SweepSpec {
            series: args.series.clone(),
            axis: args.axis,
            start_db: args.from_db,
            stop_db: args.to_db,
            step_db: args.step_db,
            fixed: Template {
                snr_db: LinkSnrDb {
                    alpha_se: args.alpha_se_db,
                    alpha_re: args.alpha_re_db,
                    beta_sd: args.beta_sd_db,
                    beta_sr: args.beta_sr_db,
                    beta_rd: args.beta_rd_db,
                },
                gamma_th_db: args.gamma_th_db,
                rate_rs: args.rate_rs,
            },
            schemes: args.scheme.clone(),
            modes: args.csi.clone(),
            metrics: args.metric.clone(),
            oracle,
            asymptote: args.asymptote,
        }],
    };
    for s in &specs {
        s.check()?;
    }
    let rows = run_sweeps(&specs)?;
    eprintln!("{} rows", rows.len());
    write_csv(&rows, output(&args.out)?)?;
    if let (true, Some(name)) = (args.check, &args.preset) {
        let outcomes = check_preset(name, &rows)?;
        for c in &outcomes {
            eprintln!("{} {name} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
        if outcomes.iter().any(|c| !c.passed) {
            return Err(Failure::Validation);
        }
    }
    Ok(())
}

fn validate_cmd(args: ValidateArgs) -> Result<(), Failure> {
    if args.grid_size == 0 {
        return Err(Error::Usage("grid size must be at least 1".into()).into());
    }
    if args.mc_trials == 0 {
        return Err(Error::Usage("Monte Carlo needs at least one trial".into()).into());
    }
    let tol = Tolerances {
        quadrature_abs: args.quad_abs,
        quadrature_tol: args.quad_tol,
        mc_trials: args.mc_trials,
        mc_sigmas: args.mc_sigmas,
        mc_abs: args.mc_abs,
    };
    eprintln!("validating {} points with {} trials each", args.grid_size, args.mc_trials);
    let report = validate(args.grid_size, args.seed, &tol)?;
    let mut out = output(&args.out)?;
    out.write_all(report.render().as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| Error::Usage(format!("cannot write report: {e}")))?;
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Validation)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let result = match cli.command {
        Command::Sweep(a) => sweep(a),
        Command::Validate(a) => validate_cmd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation) => {
            eprintln!("validation failed");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            match e {
                Error::Usage(_) => ExitCode::from(EXIT_USAGE),
                _ => ExitCode::from(EXIT_NUMERIC),
            }
        }
    }
}
