use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use nlsx_cli::output::{with_metadata, write_atomic};
use nlsx_cli::runner::{kappa_sequence, mt_csv};
use nlsx_cli::{cache, presets, sweep, ExperimentReport, ExperimentSpec, Selection};
use nlsx_core::ground_state::ShootingConfig;
use nlsx_core::{make_grid, Mu};

#[derive(Parser)]
#[command(name = "nlsx", version, about = "Ground states, invariant sets and split-step runs for 2D NLS with exponential nonlinearity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve (or load from cache) and certify the ground state.
    GroundState {
        #[arg(long, value_parser = parse_mu)]
        mu: Mu,
        #[arg(long, default_value_t = nlsx_core::ground_state::DEFAULT_R_MAX)]
        r_max: f64,
        #[arg(long, default_value = "nlsx-out")]
        out: PathBuf,
    },
    /// Classify the datum of a spec.
    Classify(SpecArgs),
    /// Run the evolution of a spec with its evolution analyses.
    Evolve(SpecArgs),
    /// Sample the scaling curve of a spec's datum.
    Curve(SpecArgs),
    /// Run every stage of a spec.
    Run(SpecArgs),
    /// Estimate the Moser-Trudinger constant from the first N family members.
    MtProbe {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 256)]
        grid_n: usize,
        #[arg(long = "half-width", default_value_t = 8.0)]
        half_width: f64,
        #[arg(long, default_value = "nlsx-out")]
        out: PathBuf,
    },
    /// Run every *.spec file in a directory concurrently.
    Sweep {
        #[arg(long)]
        dir: PathBuf,
        /// Defaults to DIR/out.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// List built-in presets, or write them as spec files.
    Presets {
        #[arg(long)]
        write: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SpecArgs {
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    spec: Option<PathBuf>,
    #[arg(long)]
    preset: Option<String>,
    /// Defaults to nlsx-out/<name>.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_mu(s: &str) -> std::result::Result<Mu, String> {
    match s {
        "0" => Ok(Mu::Zero),
        "1" => Ok(Mu::One),
        _ => Err(format!("mu must be 0 or 1, got `{s}`")),
    }
}

fn load_spec(args: &SpecArgs) -> Result<ExperimentSpec> {
    match (&args.spec, &args.preset) {
        (Some(path), _) => ExperimentSpec::from_file(path),
        (None, Some(name)) => {
            let Some(text) = presets::preset(name) else {
                bail!("unknown preset `{name}`; available: {}", presets::names().join(", "));
            };
            ExperimentSpec::parse(text, None)
        }
        (None, None) => bail!("pass --spec FILE or --preset NAME"),
    }
}

fn print_report(r: &ExperimentReport, out: &Path) {
    for c in &r.claims {
        let tag = if c.pass { "PASS" } else { "FAIL" };
        println!("{tag} {}: {} (required {})", c.name, c.observed, c.requirement);
    }
    for (k, v) in &r.verdicts {
        println!("{k} = {v}");
    }
    println!("report: {}", out.join("report.txt").display());
}

fn run_spec(args: &SpecArgs, selection: Selection) -> Result<i32> {
    let spec = load_spec(args)?;
    let out = args.out.clone().unwrap_or_else(|| Path::new("nlsx-out").join(&spec.name));
    let report = nlsx_cli::run_selected(&spec, &out, selection)?;
    print_report(&report, &out);
    Ok(report.exit_code())
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::GroundState { mu, r_max, out } => {
            let cfg = ShootingConfig { r_max, ..ShootingConfig::default() };
            let gs = cache::ground_state(mu, &cfg)?;
            let c = &gs.certificate;
            let path = out.join(format!("ground_state_mu{mu}.csv"));
            write_atomic(&path, gs.profile.to_csv(Some(c.s_threshold)).as_bytes())?;
            println!("mu = {}", c.mu);
            println!("shoot_value = {:.16e}", c.shoot_value);
            println!("s_threshold = {:.16e}", c.s_threshold);
            println!("grad_q_sq = {:.16e}", c.grad_q_sq);
            println!("mass_q = {:.16e}", c.mass_q);
            println!("energy = {:.16e}", c.energy);
            println!("pohozaev1_residual = {:e}", c.pohozaev1_residual);
            println!("pohozaev2_residual = {:e}", c.pohozaev2_residual);
            println!("ode_residual_sup = {:e}", c.ode_residual_sup);
            println!("profile: {}", path.display());
            Ok(0)
        }
        Command::Classify(a) => run_spec(&a, Selection::Classify),
        Command::Evolve(a) => run_spec(&a, Selection::Evolve),
        Command::Curve(a) => run_spec(&a, Selection::Curve),
        Command::Run(a) => run_spec(&a, Selection::All),
        Command::MtProbe { n, grid_n, half_width, out } => {
            let grid = make_grid(grid_n, half_width)?;
            let (kappas, estimate) = kappa_sequence(n, &grid).context("mt-probe")?;
            let violations = estimate.refined_violations().len();
            for (j, k) in kappas.iter().enumerate() {
                println!("size {:>3}  kappa {k:.10e}", j + 1);
            }
            println!("refined violations = {violations}");
            let meta = [("grid_n", grid_n.to_string()), ("L", half_width.to_string())];
            let path = out.join("mt_probe.csv");
            write_atomic(&path, with_metadata(&meta, &mt_csv(&kappas, &estimate)).as_bytes())?;
            println!("table: {}", path.display());
            Ok(if violations == 0 { 0 } else { 1 })
        }
        Command::Sweep { dir, out, jobs } => {
            let out = out.unwrap_or_else(|| dir.join("out"));
            let jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let entries = sweep::sweep(&dir, &out, jobs)?;
            if entries.is_empty() {
                bail!("no *.{} files in {}", sweep::SPEC_EXTENSION, dir.display());
            }
            let mut code = 0;
            for e in &entries {
                let status = match &e.outcome {
                    Ok(r) if r.passed() => "pass".to_string(),
                    Ok(r) => format!("fail ({} claims failed)", r.claims.iter().filter(|c| !c.pass).count()),
                    Err(err) => format!("error: {err:#}"),
                };
                println!("{}: {status} -> {}", e.spec_path.display(), e.out_dir.display());
                code = code.max(e.exit_code());
            }
            Ok(code)
        }
        Command::Presets { write } => {
            match write {
                None => {
                    for name in presets::names() {
                        println!("{name}");
                    }
                }
                Some(dir) => {
                    for (name, text) in presets::PRESETS {
                        let path = dir.join(format!("{name}.{}", sweep::SPEC_EXTENSION));
                        write_atomic(&path, text.as_bytes())?;
                        println!("{}", path.display());
                    }
                }
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
