//! Time-stepped co-simulation and the two batch experiments: the capacity
//! sweep and the access-versus-fronthaul curve.

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::controller::{step, ConfigCatalog, ControllerState, Objective, ReconfigEvent};
use crate::error::{Error, Result};
use crate::fronthaul::{offered_load, throttle, CapacityProfile};
use crate::params::ModelParams;
use crate::phy::{access_capacity, CellConfig, Direction, PerDirection, TddPattern, UeProfile};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Traffic {
    pub dl_demand_bps: f64,
    pub ul_demand_bps: f64,
    /// Apply seeded ±5% uniform jitter to the demand at every step.
    pub jitter: bool,
}

impl Default for Traffic {
    fn default() -> Self {
        Self {
            dl_demand_bps: 1e9,
            ul_demand_bps: 0.0,
            jitter: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerSettings {
    pub hysteresis_margin: f64,
    pub min_dwell_s: f64,
    pub objective: Objective,
}

impl Default for ControllerSettings {
    fn default() -> Self {
        Self {
            hysteresis_margin: 0.1,
            min_dwell_s: 2.0,
            objective: Objective::Dl,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSettings {
    pub step_s: f64,
    pub duration_s: f64,
    pub seed: u64,
}

impl Default for SimSettings {
    fn default() -> Self {
        Self {
            step_s: 0.1,
            duration_s: 10.0,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub catalog: ConfigCatalog,
    pub ue: UeProfile,
    pub tdd: TddPattern,
    pub capacity: CapacityProfile,
    /// Where `capacity` was read from, if it came from a trace.
    pub trace_file: Option<PathBuf>,
    pub traffic: Traffic,
    pub params: ModelParams,
    pub controller: ControllerSettings,
    pub sim: SimSettings,
}

const JITTER: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesRow {
    pub t: f64,
    pub capacity: PerDirection<u64>,
    pub config: String,
    pub offered: PerDirection<f64>,
    pub achieved: PerDirection<f64>,
    pub fh: PerDirection<u64>,
    pub event: Option<ReconfigEvent>,
    /// The controller found a configuration that fits the capacity.
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TimeSeries {
    pub rows: Vec<TimeSeriesRow>,
}

impl TimeSeries {
    pub fn events(&self) -> impl Iterator<Item = &ReconfigEvent> {
        self.rows.iter().filter_map(|r| r.event.as_ref())
    }
}

fn step_times(sim: &SimSettings) -> Result<Vec<f64>> {
    let valid = sim.step_s > 0.0 && sim.duration_s >= sim.step_s;
    if !valid {
        return Err(Error::OutOfRange {
            what: "simulation timing",
            detail: format!("step_s = {} and duration_s = {}", sim.step_s, sim.duration_s),
        });
    }
    let n = (sim.duration_s / sim.step_s + 1e-9).floor() as u64;
    // snap to a nanosecond grid so that k * step lands exactly on trace boundaries
    Ok((0..n).map(|k| (k as f64 * sim.step_s * 1e9).round() / 1e9).collect())
}

/// Runs the scenario step by step: sample capacity, let the controller
/// react, then throttle the offered demand on the selected configuration.
pub fn run(scenario: &Scenario) -> Result<TimeSeries> {
    let times = step_times(&scenario.sim)?;
    let Scenario {
        catalog, ue, tdd, params, ..
    } = scenario;
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.sim.seed);
    let ctl = &scenario.controller;
    let mut state = ControllerState::initial(
        times[0],
        scenario.capacity.capacity_at(times[0])?,
        catalog,
        ue,
        tdd,
        params,
        ctl.hysteresis_margin,
        ctl.min_dwell_s,
        ctl.objective,
    );
    let mut rows = Vec::with_capacity(times.len());
    for t in times {
        let capacity = scenario.capacity.capacity_at(t)?;
        let (next, event) = step(&state, t, capacity, catalog, ue, tdd, params)?;
        state = next;
        let mut offered = PerDirection::new(scenario.traffic.dl_demand_bps, scenario.traffic.ul_demand_bps);
        if scenario.traffic.jitter {
            offered.dl *= 1.0 + rng.random_range(-JITTER..=JITTER);
            offered.ul *= 1.0 + rng.random_range(-JITTER..=JITTER);
        }
        let cell = catalog.get(&state.current)?;
        let got = throttle(cell, ue, tdd, offered, capacity, params.throttle, params)?;
        rows.push(TimeSeriesRow {
            t,
            capacity,
            config: state.current.clone(),
            offered,
            achieved: PerDirection::new(got.dl_access_bps, got.ul_access_bps),
            fh: got.fh,
            event,
            feasible: state.feasible,
        });
    }
    Ok(TimeSeries { rows })
}

/// Runs `f` on a dedicated pool of `jobs` threads, or the global pool when
/// `jobs` is `None`.
pub fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("thread pool")
            .install(f),
        None => f(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub capacity_bps: u64,
    pub config: String,
    pub achieved_dl_bps: f64,
    pub achieved_ul_bps: f64,
    pub fh: PerDirection<u64>,
}

fn saturating_demand(cell: &CellConfig, ue: &UeProfile, tdd: &TddPattern, direction: Direction) -> PerDirection<f64> {
    let cap = access_capacity(cell, ue, direction, tdd);
    match direction {
        Direction::Dl => PerDirection::new(cap, 0.0),
        Direction::Ul => PerDirection::new(0.0, cap),
    }
}

/// Throttles every catalog configuration at symmetric capacities
/// `cap_min, cap_min + step, ...` below `cap_max`. Demand comes from the
/// scenario traffic, or saturates one direction when `saturate` is set.
pub fn sweep_capacity(
    scenario: &Scenario,
    cap_min_bps: u64,
    cap_max_bps: u64,
    step_bps: u64,
    saturate: Option<Direction>,
) -> Result<Vec<SweepRow>> {
    if step_bps == 0 {
        return Err(Error::OutOfRange {
            what: "sweep step",
            detail: "must be positive".into(),
        });
    }
    let capacities: Vec<u64> = (cap_min_bps..cap_max_bps).step_by(step_bps as usize).collect();
    let configs = scenario.catalog.configs();
    let points: Vec<(u64, &CellConfig)> = capacities
        .iter()
        .flat_map(|&c| configs.iter().map(move |cell| (c, cell)))
        .collect();
    let Scenario { ue, tdd, params, .. } = scenario;
    points
        .par_iter()
        .map(|&(cap, cell)| {
            let demand = match saturate {
                Some(direction) => saturating_demand(cell, ue, tdd, direction),
                None => PerDirection::new(scenario.traffic.dl_demand_bps, scenario.traffic.ul_demand_bps),
            };
            let got = throttle(cell, ue, tdd, demand, PerDirection::symmetric(cap), params.throttle, params)?;
            Ok(SweepRow {
                capacity_bps: cap,
                config: cell.name.clone(),
                achieved_dl_bps: got.dl_access_bps,
                achieved_ul_bps: got.ul_access_bps,
                fh: got.fh,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow {
    pub offered_bps: f64,
    pub config: String,
    pub access_bps: f64,
    /// Fronthaul load of user data and signaling, without control overhead.
    pub fh: PerDirection<u64>,
}

/// Sweeps demand in `direction` linearly from 0 to `demand_max_bps` on an
/// unconstrained fronthaul and records the load each point puts on it.
pub fn curve_access_vs_fh(
    scenario: &Scenario,
    direction: Direction,
    demand_max_bps: f64,
    n_points: usize,
) -> Result<Vec<CurveRow>> {
    if n_points < 2 {
        return Err(Error::OutOfRange {
            what: "curve points",
            detail: format!("{n_points} is fewer than 2"),
        });
    }
    let configs = scenario.catalog.configs();
    let points: Vec<(f64, &CellConfig)> = (0..n_points)
        .map(|i| demand_max_bps * i as f64 / (n_points - 1) as f64)
        .flat_map(|d| configs.iter().map(move |cell| (d, cell)))
        .collect();
    let Scenario { ue, tdd, params, .. } = scenario;
    points
        .par_iter()
        .map(|&(offered, cell)| {
            let access = offered.min(access_capacity(cell, ue, direction, tdd));
            let demand = match direction {
                Direction::Dl => PerDirection::new(access, 0.0),
                Direction::Ul => PerDirection::new(0.0, access),
            };
            let load = offered_load(cell, ue, tdd, params, demand)?.load;
            Ok(CurveRow {
                offered_bps: offered,
                config: cell.name.clone(),
                access_bps: access,
                fh: load,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phy::{fmt_mbps, Numerology};

    fn scenario(capacity: CapacityProfile) -> Scenario {
        let catalog = ConfigCatalog::new(
            [("config1", 200, 4), ("config2", 100, 4), ("config3", 100, 8)]
                .iter()
                .map(|&(n, bw, p)| CellConfig::new(n, bw, Numerology::fr2(), p).unwrap())
                .collect(),
        )
        .unwrap();
        Scenario {
            catalog,
            ue: UeProfile::default(),
            tdd: TddPattern::dddsu(),
            capacity,
            trace_file: None,
            traffic: Traffic::default(),
            params: ModelParams::default(),
            controller: ControllerSettings::default(),
            sim: SimSettings {
                step_s: 0.5,
                duration_s: 5.0,
                seed: 7,
            },
        }
    }

    #[test]
    fn steady_state_at_high_capacity() {
        let ts = run(&scenario(CapacityProfile::constant(PerDirection::symmetric(3_500_000_000)))).unwrap();
        assert_eq!(ts.rows.len(), 10);
        assert!(ts.rows.iter().all(|r| r.config == "config1" && r.event.is_none()));
        assert!(ts.rows.iter().all(|r| fmt_mbps(r.achieved.dl) == "845.9"));
    }

    #[test]
    fn step_down_triggers_one_downgrade() {
        let mut sc = scenario(CapacityProfile::steps(&[(0.0, 3_500_000_000), (2.0, 1_800_000_000)]).unwrap());
        sc.sim.duration_s = 4.0;
        let ts = run(&sc).unwrap();
        let events: Vec<_> = ts.events().collect();
        assert_eq!(events.len(), 1);
        assert_eq!((events[0].from.as_str(), events[0].to.as_str()), ("config1", "config2"));
        assert_eq!(events[0].t, 2.0);
        assert_eq!(fmt_mbps(ts.rows.last().unwrap().achieved.dl), "422.9");
    }

    #[test]
    fn zero_demand_leaves_floor() {
        let mut sc = scenario(CapacityProfile::constant(PerDirection::symmetric(3_500_000_000)));
        sc.traffic = Traffic {
            dl_demand_bps: 0.0,
            ul_demand_bps: 0.0,
            jitter: false,
        };
        let ts = run(&sc).unwrap();
        let row = &ts.rows[0];
        assert_eq!(row.fh.dl, sc.params.control_overhead_bps);
        // 8 of 56 uplink symbols carry signaling
        let cell = sc.catalog.get("config1").unwrap();
        let floor = crate::phy::fh_rate_ul(cell, 1.0, sc.tdd.duty(Direction::Ul)) / 7;
        assert_eq!(row.fh.ul, floor + sc.params.control_overhead_bps);
    }

    #[test]
    fn jitter_is_seeded() {
        let mut sc = scenario(CapacityProfile::constant(PerDirection::symmetric(3_500_000_000)));
        sc.traffic.dl_demand_bps = 400e6;
        sc.traffic.jitter = true;
        let a = run(&sc).unwrap();
        assert_eq!(a, run(&sc).unwrap());
        assert!(a.rows.iter().any(|r| r.offered.dl != 400e6));
        assert!(a.rows.iter().all(|r| (r.offered.dl / 400e6 - 1.0).abs() <= JITTER + 1e-12));
        sc.sim.seed += 1;
        assert_ne!(a, run(&sc).unwrap());
    }

    #[test]
    fn bad_timing_rejected() {
        let mut sc = scenario(CapacityProfile::constant(PerDirection::symmetric(1)));
        sc.sim.step_s = 0.0;
        assert!(run(&sc).is_err());
        sc.sim.step_s = 2.0;
        sc.sim.duration_s = 1.0;
        assert!(run(&sc).is_err());
    }

    #[test]
    fn sweep_jumps_at_threshold() {
        let sc = scenario(CapacityProfile::constant(PerDirection::symmetric(0)));
        let rows = sweep_capacity(&sc, 500_000_000, 4_000_000_000, 100_000_000, Some(Direction::Dl)).unwrap();
        assert_eq!(rows.len(), 35 * 3);
        let first_on = |name: &str| {
            rows.iter()
                .find(|r| r.config == name && r.achieved_dl_bps > 0.0)
                .map(|r| r.capacity_bps)
        };
        assert_eq!(first_on("config1"), Some(2_900_000_000));
        assert_eq!(first_on("config2"), Some(1_600_000_000));
        assert!(sweep_capacity(&sc, 10, 10, 1, None).unwrap().is_empty());
    }

    #[test]
    fn sweep_order_independent_of_jobs() {
        let sc = scenario(CapacityProfile::constant(PerDirection::symmetric(0)));
        let a = with_jobs(Some(1), || sweep_capacity(&sc, 1_000_000_000, 3_000_000_000, 250_000_000, None)).unwrap();
        let b = with_jobs(Some(4), || sweep_capacity(&sc, 1_000_000_000, 3_000_000_000, 250_000_000, None)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn dl_curve_endpoints() {
        let sc = scenario(CapacityProfile::constant(PerDirection::symmetric(0)));
        let rows = curve_access_vs_fh(&sc, Direction::Dl, 900e6, 10).unwrap();
        assert_eq!(rows.len(), 30);
        let last = |name: &str| rows.iter().rev().find(|r| r.config == name).unwrap().clone();
        assert_eq!(fmt_mbps(last("config1").fh.dl as f64), "1277.3");
        assert_eq!(fmt_mbps(last("config2").access_bps), "422.9");
        for (a, b) in rows.iter().filter(|r| r.config == "config2").zip(rows.iter().filter(|r| r.config == "config3")) {
            assert_eq!(a.fh.dl, b.fh.dl);
        }
        assert!(rows.iter().filter(|r| r.offered_bps == 0.0).all(|r| r.fh.ul > 0));
        assert!(curve_access_vs_fh(&sc, Direction::Dl, 900e6, 1).is_err());
    }
}
