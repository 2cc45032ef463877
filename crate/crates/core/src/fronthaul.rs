//! Fronthaul capacity profiles and the coupling between access throughput
//! and the capacity actually available on the link.

use std::fmt;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::{ack_traffic, baseline_signaling, build_grid, fh_load_from_grid, schedule_demand, Allocation, FrameGrid};
use crate::params::ModelParams;
use crate::phy::{access_capacity, CellConfig, Direction, PerDirection, TddPattern, UeProfile};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start_s: f64,
    pub capacity: PerDirection<u64>,
}

/// Piecewise-constant fronthaul capacity over time.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityProfile {
    segments: Vec<Segment>,
}

impl CapacityProfile {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        match segments.first() {
            None => return Err(Error::BadProfile("no segments".into())),
            Some(first) if first.start_s != 0.0 => {
                return Err(Error::BadProfile(format!("first segment starts at {} instead of 0", first.start_s)))
            }
            _ => {}
        }
        if let Some(w) = segments.windows(2).find(|w| w[1].start_s.partial_cmp(&w[0].start_s) != Some(std::cmp::Ordering::Greater)) {
            return Err(Error::BadProfile(format!(
                "start times must increase strictly ({} then {})",
                w[0].start_s, w[1].start_s
            )));
        }
        Ok(Self { segments })
    }

    pub fn constant(capacity: PerDirection<u64>) -> Self {
        Self {
            segments: vec![Segment { start_s: 0.0, capacity }],
        }
    }

    /// Builds a symmetric step profile from `(start_s, bps)` pairs.
    pub fn steps(steps: &[(f64, u64)]) -> Result<Self> {
        Self::new(
            steps
                .iter()
                .map(|&(start_s, bps)| Segment {
                    start_s,
                    capacity: PerDirection::symmetric(bps),
                })
                .collect(),
        )
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn is_symmetric(&self) -> bool {
        self.segments.iter().all(|s| s.capacity.dl == s.capacity.ul)
    }

    /// Capacity of the segment containing `t`; segments are closed on the left.
    pub fn capacity_at(&self, t: f64) -> Result<PerDirection<u64>> {
        if t.is_nan() || t < 0.0 {
            return Err(Error::NegativeTime(t));
        }
        let idx = self.segments.partition_point(|s| s.start_s <= t);
        Ok(self.segments[idx - 1].capacity)
    }

    /// Reads a trace with header `time_s,capacity_dl_mbps,capacity_ul_mbps`.
    pub fn from_trace_reader(reader: impl Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let header = rdr.headers()?.clone();
        let expected = ["time_s", "capacity_dl_mbps", "capacity_ul_mbps"];
        if header.iter().ne(expected) {
            return Err(Error::Parse {
                line: 1,
                message: format!("trace header must be `{}`", expected.join(",")),
            });
        }
        let mut segments = Vec::new();
        for (i, record) in rdr.records().enumerate() {
            let record = record?;
            let line = i + 2;
            let field = |k: usize| -> Result<f64> {
                record[k].parse::<f64>().map_err(|e| Error::Parse {
                    line,
                    message: format!("{}: {e}", expected[k]),
                })
            };
            let (t, dl, ul) = (field(0)?, field(1)?, field(2)?);
            if !(dl >= 0.0 && ul >= 0.0 && dl.is_finite() && ul.is_finite()) {
                return Err(Error::BadProfile(format!("line {line}: capacities must be finite and non-negative")));
            }
            segments.push(Segment {
                start_s: t,
                capacity: PerDirection::new(mbps_to_bps(dl), mbps_to_bps(ul)),
            });
        }
        Self::new(segments)
    }

    pub fn from_trace_file(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_trace_reader(file)
    }
}

pub(crate) fn mbps_to_bps(mbps: f64) -> u64 {
    (mbps * 1e6).round() as u64
}

/// How access throughput reacts when the fronthaul cannot carry the load.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThrottlePolicy {
    /// Traffic either flows in full or stalls.
    #[default]
    AllOrNothing,
    /// Traffic is scaled down to the largest fraction the link can carry.
    Proportional,
}

impl ThrottlePolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            ThrottlePolicy::AllOrNothing => "all_or_nothing",
            ThrottlePolicy::Proportional => "proportional",
        }
    }
}

impl fmt::Display for ThrottlePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ThrottlePolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all_or_nothing" => Ok(ThrottlePolicy::AllOrNothing),
            "proportional" => Ok(ThrottlePolicy::Proportional),
            other => Err(format!("unknown throttle policy `{other}` (expected all_or_nothing or proportional)")),
        }
    }
}

/// Access throughput and fronthaul load reached under a capacity limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Throughput {
    pub dl_access_bps: f64,
    pub ul_access_bps: f64,
    /// Fronthaul load including control overhead.
    pub fh: PerDirection<u64>,
}

/// A scheduled grid and the fronthaul load it implies.
#[derive(Debug, Clone)]
pub struct GridLoad {
    pub grid: FrameGrid,
    pub allocation: Allocation,
    /// Fronthaul load without control overhead.
    pub load: PerDirection<u64>,
}

/// Schedules user demand plus the acknowledgment traffic it induces in the
/// reverse direction, and returns the resulting fronthaul load.
pub fn offered_load(
    cell: &CellConfig,
    ue: &UeProfile,
    tdd: &TddPattern,
    params: &ModelParams,
    demand: PerDirection<f64>,
) -> Result<GridLoad> {
    let grid = build_grid(cell, tdd, params.horizon_slots)?;
    let mut grid = baseline_signaling(grid, params.signaling.ul_symbols_per_slot, params.signaling.ul_rbs)?;
    let dl = demand.dl + ack_traffic(demand.ul, params.ack_ratio);
    let ul = demand.ul + ack_traffic(demand.dl, params.ack_ratio);
    let allocation = schedule_demand(&mut grid, dl, ul, params.scheduling, cell, ue);
    let load = fh_load_from_grid(&grid, &allocation, cell, 0);
    Ok(GridLoad { grid, allocation, load })
}

fn link_load(
    cell: &CellConfig,
    ue: &UeProfile,
    tdd: &TddPattern,
    params: &ModelParams,
    demand: PerDirection<f64>,
) -> Result<PerDirection<u64>> {
    let load = offered_load(cell, ue, tdd, params, demand)?.load;
    Ok(load.map(|l| l + params.control_overhead_bps))
}

fn servable(cell: &CellConfig, ue: &UeProfile, tdd: &TddPattern, demand: PerDirection<f64>) -> PerDirection<f64> {
    PerDirection::new(
        demand.dl.max(0.0).min(access_capacity(cell, ue, Direction::Dl, tdd)),
        demand.ul.max(0.0).min(access_capacity(cell, ue, Direction::Ul, tdd)),
    )
}

const BISECTION_RESOLUTION_BPS: f64 = 1e6;
const BISECTION_MAX_ITERATIONS: u32 = 40;

/// Access throughput achieved for `demand` when the fronthaul offers
/// `capacity`.
///
/// A binding uplink stalls both directions, because downlink traffic cannot
/// be acknowledged without the uplink fronthaul.
pub fn throttle(
    cell: &CellConfig,
    ue: &UeProfile,
    tdd: &TddPattern,
    demand: PerDirection<f64>,
    capacity: PerDirection<u64>,
    policy: ThrottlePolicy,
    params: &ModelParams,
) -> Result<Throughput> {
    let wanted = servable(cell, ue, tdd, demand);
    let full = link_load(cell, ue, tdd, params, wanted)?;
    if full.fits_within(&capacity) {
        return Ok(Throughput {
            dl_access_bps: wanted.dl,
            ul_access_bps: wanted.ul,
            fh: full,
        });
    }
    let achieved = match policy {
        ThrottlePolicy::AllOrNothing => {
            if full.ul > capacity.ul {
                PerDirection::new(0.0, 0.0)
            } else {
                PerDirection::new(0.0, wanted.ul)
            }
        }
        ThrottlePolicy::Proportional => {
            let scale = wanted.dl.max(wanted.ul);
            let at = |alpha: f64| wanted.map(|d| d * alpha);
            let mut lo = 0.0;
            let mut hi = 1.0;
            if !link_load(cell, ue, tdd, params, at(0.0))?.fits_within(&capacity) {
                hi = 0.0;
            }
            let mut iterations = 0;
            while (hi - lo) * scale > BISECTION_RESOLUTION_BPS && iterations < BISECTION_MAX_ITERATIONS {
                let mid = 0.5 * (lo + hi);
                if link_load(cell, ue, tdd, params, at(mid))?.fits_within(&capacity) {
                    lo = mid;
                } else {
                    hi = mid;
                }
                iterations += 1;
            }
            at(lo)
        }
    };
    Ok(Throughput {
        dl_access_bps: achieved.dl,
        ul_access_bps: achieved.ul,
        fh: link_load(cell, ue, tdd, params, achieved)?,
    })
}

/// Smallest symmetric capacity at which saturating traffic in `direction`
/// flows in full.
pub fn threshold_capacity(
    cell: &CellConfig,
    ue: &UeProfile,
    tdd: &TddPattern,
    params: &ModelParams,
    direction: Direction,
) -> Result<u64> {
    let cap = access_capacity(cell, ue, direction, tdd);
    let demand = match direction {
        Direction::Dl => PerDirection::new(cap, 0.0),
        Direction::Ul => PerDirection::new(0.0, cap),
    };
    Ok(link_load(cell, ue, tdd, params, demand)?.max())
}
