//! `fhsim` — fronthaul co-simulation experiments on the command line.
//!
//! Every command reads a scenario (the bundled testbed catalog unless
//! `--scenario` is given) and writes CSV, or `key = value` lines for
//! `rates`, to standard output or `--out`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fhsim::phy::{access_capacity, PerDirection};
use fhsim::report::{rates_report, write_curve, write_events, write_grid, write_sweep, write_timeseries};
use fhsim::scenario::{bundled, dump_scenario, load_scenario, parse_scenario};
use fhsim::sim::{curve_access_vs_fh, run, sweep_capacity, with_jobs, Scenario};
use fhsim::validate::{run_checks, write_checks};
use fhsim::{offered_load, Direction, Error};

#[derive(Parser)]
#[command(name = "fhsim", version, about = "Radio access and fronthaul co-simulation experiments")]
struct Cli {
    /// Scenario file; defaults to the bundled three-configuration testbed.
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,
    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sweep and curve points.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Also write the scheduled occupancy grid of one configuration as CSV.
    #[arg(long, global = true)]
    grid_dump: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Required fronthaul rates, access capacities and threshold of a configuration.
    Rates {
        /// Configuration name; every configuration when omitted.
        #[arg(long)]
        cell: Option<String>,
    },
    /// Achieved throughput of every configuration over a range of capacities.
    Sweep {
        /// First capacity, Mbps.
        #[arg(long)]
        min: f64,
        /// Capacity bound (exclusive), Mbps.
        #[arg(long)]
        max: f64,
        /// Capacity increment, Mbps.
        #[arg(long)]
        step: f64,
        /// Saturate this direction instead of using the scenario traffic.
        #[arg(long)]
        direction: Option<Direction>,
    },
    /// Fronthaul load against offered access rate on an unconstrained link.
    Curve {
        #[arg(long)]
        direction: Direction,
        /// Largest offered rate, Mbps.
        #[arg(long)]
        demand_max: f64,
        #[arg(long, default_value_t = 10)]
        points: usize,
    },
    /// Time-stepped run with the reconfiguration controller.
    Simulate {
        /// Also write reconfiguration events as CSV.
        #[arg(long)]
        events: Option<PathBuf>,
    },
    /// Run the model self-checks; exits non-zero if any fails.
    Validate,
    /// Print the scenario with every default spelled out.
    Dump,
}

fn mbps(v: f64) -> u64 {
    (v * 1e6).round().max(0.0) as u64
}

fn load(path: Option<&Path>) -> fhsim::Result<Scenario> {
    match path {
        Some(p) => load_scenario(p),
        None => parse_scenario(bundled::TABLE_I, &bundled::dir()),
    }
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> fhsim::Result<()> {
    match out {
        Some(path) => fs::write(path, bytes).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(bytes)
                .and_then(|_| stdout.flush())
                .map_err(|source| Error::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

fn dump_grid(path: &Path, scenario: &Scenario, cell_name: Option<&str>) -> fhsim::Result<()> {
    let Scenario { ue, tdd, params, .. } = scenario;
    let cell = match cell_name {
        Some(name) => scenario.catalog.get(name)?,
        None => &scenario.catalog.configs()[0],
    };
    let demand = PerDirection::new(
        scenario.traffic.dl_demand_bps.min(access_capacity(cell, ue, Direction::Dl, tdd)),
        scenario.traffic.ul_demand_bps.min(access_capacity(cell, ue, Direction::Ul, tdd)),
    );
    let scheduled = offered_load(cell, ue, tdd, params, demand)?;
    let mut buf = Vec::new();
    write_grid(&mut buf, &scheduled.grid)?;
    emit(Some(path), &buf)
}

/// Runs the command; the returned flag is false when the run succeeded but
/// reported a failed check or an infeasible step.
fn execute(cli: &Cli) -> fhsim::Result<bool> {
    let scenario = load(cli.scenario.as_deref())?;
    let mut buf = Vec::new();
    let mut ok = true;
    let mut grid_cell = None;
    match &cli.command {
        Command::Rates { cell } => {
            let names: Vec<String> = match cell {
                Some(name) => vec![name.clone()],
                None => scenario.catalog.configs().iter().map(|c| c.name.clone()).collect(),
            };
            for (i, name) in names.iter().enumerate() {
                if i > 0 {
                    buf.push(b'\n');
                }
                buf.extend(rates_report(&scenario, name)?.into_bytes());
            }
            grid_cell = cell.clone();
        }
        Command::Sweep { min, max, step, direction } => {
            let rows = with_jobs(cli.jobs, || sweep_capacity(&scenario, mbps(*min), mbps(*max), mbps(*step), *direction))?;
            write_sweep(&mut buf, &rows)?;
        }
        Command::Curve {
            direction,
            demand_max,
            points,
        } => {
            let rows = with_jobs(cli.jobs, || curve_access_vs_fh(&scenario, *direction, demand_max * 1e6, *points))?;
            write_curve(&mut buf, &rows)?;
        }
        Command::Simulate { events } => {
            let series = run(&scenario)?;
            write_timeseries(&mut buf, &series)?;
            if let Some(path) = events {
                let mut ev = Vec::new();
                write_events(&mut ev, &series)?;
                emit(Some(path), &ev)?;
            }
            ok = series.rows.iter().all(|r| r.feasible);
            if !ok {
                eprintln!("fhsim: no configuration fit the fronthaul capacity at some steps");
            }
        }
        Command::Validate => {
            let checks = with_jobs(cli.jobs, || run_checks(&scenario))?;
            write_checks(&mut buf, &checks)?;
            ok = checks.iter().all(|c| c.passed);
        }
        Command::Dump => buf = dump_scenario(&scenario)?.into_bytes(),
    }
    emit(cli.out.as_deref(), &buf)?;
    if let Some(path) = &cli.grid_dump {
        dump_grid(path, &scenario, grid_cell.as_deref())?;
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("fhsim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
