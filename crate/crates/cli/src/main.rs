use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use curveflow::parse::{parse_f64_list, parse_usize_list};
use curveflow::reduced::CircleSystemState;
use curveflow::run::{run_scenario, validate_forces, ReducedRun};
use curveflow::scenario::{load_scenario, presets};
use curveflow::Error;

/// Output directory override, below `--out` and above the scenario's own.
const OUTPUT_ENV: &str = "CURVEFLOW_OUTPUT_DIR";

#[derive(Parser)]
#[command(name = "curveflow", version, about = "Evolve families of interacting closed curves in 3D")]
struct Cli {
    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for force evaluation (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Integrator tolerance, overriding the scenario
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file or built-in preset
    Run { scenario: String },
    /// Integrate the reduced system of coaxial circles
    RunReduced {
        /// Number of circles
        #[arg(long)]
        n: usize,
        /// Radii, comma separated
        #[arg(long)]
        r: String,
        /// Consecutive plane gaps z_12, z_23, ..., comma separated
        #[arg(long, default_value = "")]
        z: String,
        #[arg(long, default_value_t = 50.0)]
        t_end: f64,
        #[arg(long, default_value_t = 0.1)]
        output_dt: f64,
    },
    /// Compare the polygonal force on coaxial circles with the exact formula
    ValidateForces {
        #[arg(long)]
        ri: f64,
        #[arg(long)]
        rj: f64,
        #[arg(long)]
        z: f64,
        #[arg(long, default_value = "100,200,400")]
        m_list: String,
    },
    /// List built-in scenarios
    ListPresets,
}

fn exit_code(e: &Error) -> u8 {
    if e.is_validation() {
        2
    } else if e.is_numerical() {
        3
    } else {
        1
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::Integration { t, .. } = &e {
                eprintln!("last good time: {t}");
            }
            ExitCode::from(exit_code(&e))
        }
    }
}

fn output_dir(cli_out: Option<PathBuf>, scenario_out: Option<PathBuf>, name: &str) -> PathBuf {
    cli_out
        .or_else(|| std::env::var_os(OUTPUT_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
        .or(scenario_out)
        .unwrap_or_else(|| PathBuf::from("out").join(name))
}

fn execute(cli: Cli) -> Result<(), Error> {
    if let Some(k) = cli.threads {
        if k == 0 {
            return Err(Error::Validation(vec!["--threads: must be >= 1".into()]));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| Error::Domain(format!("thread pool: {e}")))?;
    }
    if let Some(tol) = cli.tol {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::Validation(vec![format!("--tol: must be > 0, got {tol}")]));
        }
    }

    match cli.command {
        Command::Run { scenario } => {
            let mut s = load_scenario(&scenario)?;
            if let Some(tol) = cli.tol {
                s.tol = tol;
            }
            let dir = output_dir(cli.out, s.output_dir.clone(), &s.name);
            let summary = run_scenario(&s, &dir)?;
            println!(
                "{}: {} frames, {} accepted / {} rejected steps, output in {}",
                s.name,
                summary.frames,
                summary.stats.accepted,
                summary.stats.rejected,
                dir.display()
            );
        }
        Command::RunReduced {
            n,
            r,
            z,
            t_end,
            output_dt,
        } => {
            let radii = parse_f64_list(&r)?;
            let gaps = if z.trim().is_empty() { Vec::new() } else { parse_f64_list(&z)? };
            let mut problems = Vec::new();
            if radii.len() != n {
                problems.push(format!("--r: expected {n} radii, got {}", radii.len()));
            }
            if gaps.len() + 1 != n.max(1) {
                problems.push(format!("--z: expected {} gaps, got {}", n.saturating_sub(1), gaps.len()));
            }
            if !problems.is_empty() {
                return Err(Error::Validation(problems));
            }
            let run = ReducedRun {
                initial: CircleSystemState::new(radii, gaps)?,
                t_end,
                output_dt,
                tol: cli.tol.unwrap_or(1e-6),
            };
            let dir = output_dir(cli.out, None, "reduced");
            let traj = run.run_to(&dir)?;
            println!("{} rows written to {}", traj.rows.len(), dir.display());
        }
        Command::ValidateForces { ri, rj, z, m_list } => {
            let ms = parse_usize_list(&m_list)?;
            print!("{}", validate_forces(ri, rj, z, &ms)?);
        }
        Command::ListPresets => {
            for (name, about) in presets() {
                println!("{name:<18} {about}");
            }
        }
    }
    Ok(())
}
