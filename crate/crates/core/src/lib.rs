//! Co-simulation of a disaggregated 5G radio site: how radio-access
//! resource allocation drives fronthaul load under the I_D (downlink) and
//! I_U (uplink) eCPRI splits, and how a controller reconfigures the cell
//! when fronthaul capacity varies.
//!
//! * [`phy`] — numerology, resource-block tables and closed-form rates.
//! * [`grid`] — the slot/symbol/RB/layer occupancy grid and its scheduler.
//! * [`fronthaul`] — capacity profiles and throttling.
//! * [`controller`] — configuration selection with hysteresis.
//! * [`sim`] — time-stepped runs, capacity sweeps and access-vs-fronthaul
//!   curves.
//! * [`scenario`], [`report`], [`validate`] — file input, CSV output and
//!   self-checks.

pub mod controller;
pub mod error;
pub mod fronthaul;
pub mod grid;
pub mod params;
pub mod phy;
pub mod report;
pub mod scenario;
pub mod sim;
pub mod validate;

pub use controller::{select_config, step, ConfigCatalog, ControllerState, Objective, ReconfigEvent, Selection, SwitchKind};
pub use error::{Error, Result};
pub use fronthaul::{offered_load, threshold_capacity, throttle, CapacityProfile, ThrottlePolicy, Throughput};
pub use grid::{baseline_signaling, build_grid, fh_load_from_grid, schedule_demand, ul_transport_symbols, FrameGrid, SchedulingPolicy};
pub use params::ModelParams;
pub use phy::{
    access_capacity, fh_rate_dl, fh_rate_ul, required_fh, CellConfig, Direction, Numerology, PerDirection, SplitOption,
    TddPattern, UeProfile,
};
pub use scenario::{dump_scenario, load_scenario, parse_scenario};
pub use sim::{curve_access_vs_fh, run, sweep_capacity, Scenario, TimeSeries};
