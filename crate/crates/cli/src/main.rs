//! `blochsim`: run scenarios, tabulate spectra and evaluate the analytic oracles.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use blochsim_core::experiments::bundle::write_atomic;
use blochsim_core::experiments::{preset, run_scenario, write_bundle, RunOptions, ScenarioConfig, PRESET_NAMES};
use blochsim_core::linalg::{blas_self_check, eigen::eigvals_hermitian};
use blochsim_core::models::bessel::bessel_j_table;
use blochsim_core::models::{Branch, DrivenHo, DrivenHoSpec, Hamiltonian, LzGrid, LzGridSpec};
use blochsim_core::propagator::coherent_amplitude;
use blochsim_core::{Error, C64};

const OUT_ENV: &str = "BLOCHSIM_OUT";

#[derive(Parser)]
#[command(name = "blochsim", version, about = "Energy Bloch oscillations in driven quantum systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its output bundle.
    Run(RunArgs),
    /// Tabulate diabatic and adiabatic energies of a scenario's model.
    Spectrum(SpectrumArgs),
    /// Evaluate an analytic oracle on a grid.
    #[command(subcommand)]
    Oracle(Oracle),
    /// Print the names of the built-in presets.
    ListPresets,
}

#[derive(Args)]
struct Source {
    /// Built-in scenario name.
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// Scenario file (JSON); a bundle's metadata file is accepted too.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a config field, e.g. `--set model.J=0.3`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: Source,
    /// Bundle directory; defaults to `output.dir`, then `$BLOCHSIM_OUT/<name>`, then `out/<name>`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed of the disorder ensemble.
    #[arg(long)]
    seed: Option<u64>,
    /// Integration step.
    #[arg(long)]
    dt: Option<f64>,
    /// Worker threads for the ensemble loop.
    #[arg(long)]
    threads: Option<usize>,
    /// Print the resolved scenario as JSON and exit.
    #[arg(long)]
    dump_preset: bool,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, allow_hyphen_values = true)]
    t0: f64,
    #[arg(long, allow_hyphen_values = true)]
    t1: f64,
    #[arg(long, default_value_t = 201)]
    points: usize,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Grid {
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    t0: f64,
    #[arg(long, allow_hyphen_values = true)]
    t1: f64,
    #[arg(long, default_value_t = 201)]
    points: usize,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Oracle {
    /// `J_k(2J/omega)` for `k = 0..=kmax`, the Wannier-Stark amplitudes.
    Bessel {
        #[arg(long = "J")]
        hopping: f64,
        #[arg(long)]
        omega: f64,
        #[arg(long, default_value_t = 60)]
        kmax: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form coherent amplitude of the driven oscillator.
    HoCoherent {
        /// Real initial amplitude at `t0`.
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        alpha_im: f64,
        #[arg(long)]
        omega: f64,
        #[arg(long = "Omega")]
        drive_frequency: f64,
        #[arg(long = "J", allow_hyphen_values = true)]
        drive_amplitude: f64,
        #[command(flatten)]
        grid: Grid,
    },
    /// Closed-form adiabatic energies of the infinite Landau-Zener grid.
    LzEnergies {
        #[arg(long)]
        omega: f64,
        #[arg(long)]
        lambda: f64,
        #[arg(long = "J", allow_hyphen_values = true)]
        coupling: f64,
        /// Levels `m = -m_max..=m_max` on each branch.
        #[arg(long, default_value_t = 3)]
        m_max: usize,
        #[command(flatten)]
        grid: Grid,
    },
}

fn load(source: &Source) -> Result<ScenarioConfig, Error> {
    let base = match (&source.preset, &source.config) {
        (Some(name), None) => preset(name)?,
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::config("config", format!("{}: {e}", path.display())))?;
            ScenarioConfig::from_json_str(&text)?
        }
        _ => return Err(Error::config("config", "give exactly one of --preset or --config")),
    };
    base.with_overrides(&source.overrides)
}

fn grid_times(t0: f64, t1: f64, points: usize) -> Result<Vec<f64>, Error> {
    if points < 2 || !(t1 > t0) {
        return Err(Error::config("grid", "need t1 > t0 and at least 2 points"));
    }
    let h = (t1 - t0) / (points - 1) as f64;
    Ok((0..points).map(|k| t0 + k as f64 * h).collect())
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            write_atomic(p, text.as_bytes())
        }
        None => {
            use std::io::Write;
            match std::io::stdout().lock().write_all(text.as_bytes()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
                _ => Ok(()),
            }
        }
    }
}

fn cmd_run(args: &RunArgs) -> Result<(), Error> {
    let mut sets = Vec::new();
    if let Some(s) = args.seed {
        sets.push(format!("ensemble.master_seed={s}"));
    }
    if let Some(dt) = args.dt {
        sets.push(format!("plan.dt={dt:e}"));
    }
    let cfg = load(&args.source)?.with_overrides(&sets)?;
    if args.dump_preset {
        println!("{}", serde_json::to_string_pretty(&cfg.resolved()?.to_value())?);
        return Ok(());
    }
    let dir = match (&args.out, &cfg.output.dir) {
        (Some(d), _) => d.clone(),
        (None, Some(d)) => PathBuf::from(d),
        (None, None) => std::env::var_os(OUT_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("out"))
            .join(&cfg.name),
    };
    let out = run_scenario(&cfg, &RunOptions { threads: args.threads })?;
    write_bundle(&out, &dir)?;
    let r = &out.report;
    println!("scenario {} hash {} dt {:e}", r.scenario, r.scenario_hash, r.dt);
    for v in &r.revivals {
        println!("revival t={:.6} fidelity={:.9}", v.t, v.fidelity);
    }
    if let Some(p) = &r.period {
        match &p.estimate {
            Some(e) => println!("period {:.6} +- {:.3e}", e.period, e.uncertainty),
            None => println!("period: {}", p.failure.as_deref().unwrap_or("none")),
        }
    }
    if let Some(f) = r.power_law.as_ref().and_then(|p| p.fit) {
        println!("exponent {:.4} residual {:.3e}", f.exponent, f.residual);
    }
    println!("bundle {}", dir.display());
    Ok(())
}

fn cmd_spectrum(args: &SpectrumArgs) -> Result<(), Error> {
    let cfg = load(&args.source)?;
    let model = cfg.model.build()?;
    let mut s = String::from("t,kind,n,E\n");
    for t in grid_times(args.t0, args.t1, args.points)? {
        let mut diabatic = model.diagonal(t).to_vec();
        diabatic.sort_by(f64::total_cmp);
        let adiabatic = eigvals_hermitian(&model.matrix(t))?;
        for (kind, values) in [("diabatic", diabatic.as_slice()), ("adiabatic", adiabatic.as_slice().expect("contiguous"))] {
            for (n, e) in values.iter().enumerate() {
                writeln!(s, "{t:.16e},{kind},{n},{e:.16e}").expect("write to string");
            }
        }
    }
    emit(args.out.as_deref(), &s)
}

fn cmd_oracle(o: &Oracle) -> Result<(), Error> {
    match o {
        Oracle::Bessel { hopping, omega, kmax, out } => {
            if !(*omega > 0.0) {
                return Err(Error::config("omega", "must be > 0"));
            }
            let x = 2.0 * hopping / omega;
            let mut s = String::from("k,x,J_k\n");
            for (k, v) in bessel_j_table(*kmax, x).iter().enumerate() {
                writeln!(s, "{k},{x:.16e},{v:.16e}").expect("write to string");
            }
            emit(out.as_deref(), &s)
        }
        Oracle::HoCoherent {
            alpha,
            alpha_im,
            omega,
            drive_frequency,
            drive_amplitude,
            grid,
        } => {
            let m = DrivenHo::new(DrivenHoSpec {
                omega: *omega,
                drive_frequency: *drive_frequency,
                drive_amplitude: *drive_amplitude,
                n_fock: 2,
                disorder: None,
            })?;
            let a0 = C64::new(*alpha, *alpha_im);
            let mut s = String::from("t,re,im,abs\n");
            for t in grid_times(grid.t0, grid.t1, grid.points)? {
                let a = coherent_amplitude(&m, a0, grid.t0, t);
                writeln!(s, "{t:.16e},{:.16e},{:.16e},{:.16e}", a.re, a.im, a.norm()).expect("write to string");
            }
            emit(grid.out.as_deref(), &s)
        }
        Oracle::LzEnergies {
            omega,
            lambda,
            coupling,
            m_max,
            grid,
        } => {
            let g = LzGrid::new(LzGridSpec {
                omega: *omega,
                lambda: *lambda,
                coupling: *coupling,
                n_levels: 2 * m_max + 1,
            })?;
            let mut s = String::from("t,m,branch,E\n");
            let mm = *m_max as i64;
            for t in grid_times(grid.t0, grid.t1, grid.points)? {
                for (b, name) in [(Branch::Plus, "+"), (Branch::Minus, "-")] {
                    for m in -mm..=mm {
                        writeln!(s, "{t:.16e},{m},{name},{:.16e}", g.adiabatic_energy(m, b, t)).expect("write to string");
                    }
                }
            }
            emit(grid.out.as_deref(), &s)
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        e if e.is_config_error() => 2,
        Error::Io(_) => 1,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = blas_self_check() {
        eprintln!("error: {e}");
        return ExitCode::from(3);
    }
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Oracle(o) => cmd_oracle(o),
        Command::ListPresets => {
            for name in PRESET_NAMES {
                println!("{name}");
            }
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
