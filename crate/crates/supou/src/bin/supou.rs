//! Command-line front end: classify scaling regimes, run path ensembles,
//! and run verification suites from a JSON experiment config.
//!
//! Exit codes: 0 success / all checks passed, 1 invalid parameters or
//! config, 2 boundary regime, 3 simulation failure, 4 verification failures.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use supou::asymptotics::classify_regime;
use supou::config::ExperimentConfig;
use supou::error::Error;
use supou::simulate::{run_ensemble, write_paths_csv};
use supou::verify::verify_regime;

#[derive(Parser)]
#[command(name = "supou", version, about = "supOU process simulation and scaling-regime analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the long-horizon regime from the bare exponents.
    Classify(ClassifyArgs),
    /// Simulate a path ensemble and write it as CSV.
    Simulate(RunArgs),
    /// Run the verification suite against the classified limit law.
    Verify(RunArgs),
}

#[derive(Args)]
struct ClassifyArgs {
    /// Marginal tail index, in (0,2).
    #[arg(long)]
    gamma: f64,
    /// Mixing-density exponent (correlation decays like (1+t)^{-alpha}).
    #[arg(long)]
    alpha: f64,
    /// Growth index of the jump measure at the origin, in [0,2).
    #[arg(long, conflicts_with = "bg_index")]
    beta: Option<f64>,
    /// Blumenthal-Getoor index, accepted in place of --beta when no power
    /// law holds at the origin.
    #[arg(long)]
    bg_index: Option<f64>,
    /// Presence of a Gaussian component.
    #[arg(long)]
    gaussian: bool,
}

#[derive(Args)]
struct RunArgs {
    /// Path to the JSON experiment config.
    config: PathBuf,
    /// Output file (CSV for simulate, JSON for verify); overrides the
    /// config's output block. Verify prints to stdout when neither is set.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed; overrides the config. When neither is present a seed is
    /// generated and printed to stderr.
    #[arg(long)]
    seed: Option<u64>,
}

const EXIT_INVALID: u8 = 1;
const EXIT_BOUNDARY: u8 = 2;
const EXIT_SIM_FAILURE: u8 = 3;
const EXIT_VERIFY_FAILED: u8 = 4;

fn main() -> ExitCode {
    init_thread_pool();
    match Cli::parse().command {
        Command::Classify(args) => cmd_classify(&args),
        Command::Simulate(args) => cmd_simulate(&args),
        Command::Verify(args) => cmd_verify(&args),
    }
}

/// SUPOU_THREADS caps the rayon pool; rayon's own RAYON_NUM_THREADS also
/// works. Thread count never affects output bytes, only wall time.
fn init_thread_pool() {
    if let Ok(v) = std::env::var("SUPOU_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => eprintln!("warning: ignoring invalid SUPOU_THREADS value {v:?}"),
        }
    }
}

fn cmd_classify(args: &ClassifyArgs) -> ExitCode {
    let beta = args.beta.or(args.bg_index).unwrap_or(0.0);
    let report = match classify_regime(args.gamma, args.alpha, beta, args.gaussian) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INVALID);
        }
    };
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    if report.boundary {
        ExitCode::from(EXIT_BOUNDARY)
    } else {
        ExitCode::SUCCESS
    }
}

fn load_config(args: &RunArgs) -> Result<(ExperimentConfig, u64), ExitCode> {
    let cfg = ExperimentConfig::from_path(&args.config).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(EXIT_INVALID)
    })?;
    let seed = match args.seed.or(cfg.seed) {
        Some(s) => s,
        None => {
            let s: u64 = rand::random();
            eprintln!("generated seed: {s}");
            s
        }
    };
    Ok((cfg, seed))
}

fn cmd_simulate(args: &RunArgs) -> ExitCode {
    let (cfg, seed) = match load_config(args) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let started = Instant::now();
    let run = (|| {
        let quad = cfg.model.to_quadruple()?;
        let sim = cfg.simulation.to_sim_config(seed)?;
        let ensemble = run_ensemble(&quad, &sim)?;
        Ok::<_, Error>(ensemble)
    })();
    let ensemble = match run {
        Ok(e) => e,
        Err(e @ (Error::InvalidParameter { .. } | Error::Unsupported(_))) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INVALID);
        }
        Err(e) => {
            eprintln!("simulation failed: {e} (no output written)");
            return ExitCode::from(EXIT_SIM_FAILURE);
        }
    };

    let out = args.out.clone().or(cfg.output.paths_csv.clone());
    let write_result = match &out {
        Some(path) => std::fs::File::create(path)
            .map_err(Error::from)
            .and_then(|f| write_paths_csv(&ensemble, std::io::BufWriter::new(f))),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            let r = write_paths_csv(&ensemble, &mut lock);
            let _ = lock.flush();
            r
        }
    };
    if let Err(e) = write_result {
        eprintln!("error writing output: {e}");
        return ExitCode::from(EXIT_SIM_FAILURE);
    }

    let ok = ensemble.replications.len();
    let failed = ensemble.failures.len();
    eprintln!(
        "simulated {ok} replication(s) on a {}-point grid (seed {seed}) in {:.2}s",
        ensemble.config.grid.len(),
        started.elapsed().as_secs_f64()
    );
    if failed > 0 {
        eprintln!(
            "note: partial output — {failed} replication(s) failed: {}",
            ensemble
                .failures
                .iter()
                .map(|(id, msg)| format!("#{id}: {msg}"))
                .collect::<Vec<_>>()
                .join("; ")
        );
        return ExitCode::from(EXIT_SIM_FAILURE);
    }
    ExitCode::SUCCESS
}

fn cmd_verify(args: &RunArgs) -> ExitCode {
    let (cfg, seed) = match load_config(args) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let started = Instant::now();
    let run = (|| {
        let quad = cfg.model.to_quadruple()?;
        let sim = cfg.simulation.to_sim_config(seed)?;
        verify_regime(&quad, &sim, &cfg.simulation.t_ladder, &cfg.thresholds)
    })();
    let report = match run {
        Ok(r) => r,
        Err(Error::BoundaryRegime(c)) => {
            eprintln!("boundary regime: {c} (no limit theorem applies; nothing to verify)");
            return ExitCode::from(EXIT_BOUNDARY);
        }
        Err(e @ (Error::InvalidParameter { .. } | Error::Unsupported(_))) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INVALID);
        }
        Err(e) => {
            eprintln!("verification run failed: {e}");
            return ExitCode::from(EXIT_SIM_FAILURE);
        }
    };

    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    let out = args.out.clone().or(cfg.output.report_json.clone());
    match &out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, json.as_bytes()) {
                eprintln!("error writing report: {e}");
                return ExitCode::from(EXIT_SIM_FAILURE);
            }
        }
        None => println!("{json}"),
    }
    let scored = report.verdicts.iter().filter(|v| v.scored).count();
    let passed = report.verdicts.iter().filter(|v| v.scored && v.pass).count();
    eprintln!(
        "verification {} ({passed}/{scored} checks passed, seed {seed}) in {:.2}s",
        if report.pass { "passed" } else { "FAILED" },
        started.elapsed().as_secs_f64()
    );
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VERIFY_FAILED)
    }
}
