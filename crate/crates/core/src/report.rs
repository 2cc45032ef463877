//! CSV and key-value output. Rates are written in Mbps with one decimal so
//! that identical runs produce byte-identical files.

use std::fmt::Write as _;
use std::io::Write;

use crate::controller::ReconfigEvent;
use crate::error::Result;
use crate::fronthaul::{offered_load, threshold_capacity};
use crate::grid::FrameGrid;
use crate::phy::{access_capacity, effective_layers, fh_rate_dl, fh_rate_ul, fmt_mbps, required_fh, Direction, Duty, PerDirection, SYMBOLS_PER_SLOT};
use crate::sim::{CurveRow, Scenario, SweepRow, TimeSeries};

pub const SWEEP_HEADER: [&str; 6] = [
    "capacity_mbps",
    "config",
    "achieved_dl_mbps",
    "achieved_ul_mbps",
    "fh_dl_mbps",
    "fh_ul_mbps",
];
pub const CURVE_HEADER: [&str; 5] = ["offered_mbps", "config", "access_mbps", "fh_dl_mbps", "fh_ul_mbps"];
pub const TIMESERIES_HEADER: [&str; 11] = [
    "t_s",
    "capacity_dl_mbps",
    "capacity_ul_mbps",
    "config",
    "offered_dl_mbps",
    "offered_ul_mbps",
    "achieved_dl_mbps",
    "achieved_ul_mbps",
    "fh_dl_mbps",
    "fh_ul_mbps",
    "event",
];
pub const EVENTS_HEADER: [&str; 4] = ["time_s", "event", "from_config", "to_config"];
pub const GRID_HEADER: [&str; 5] = ["slot", "symbol", "direction", "occupied_rbs", "transported"];

fn mbps(bps: u64) -> String {
    fmt_mbps(bps as f64)
}

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out)
}

/// Seconds in shortest round-trip form; simulation times sit on a
/// nanosecond grid, so this prints `0.3` rather than `0.30000000000000004`.
fn seconds(t: f64) -> String {
    format!("{t}")
}

pub fn write_sweep<W: Write>(out: W, rows: &[SweepRow]) -> Result<()> {
    let mut w = writer(out);
    w.write_record(SWEEP_HEADER)?;
    for r in rows {
        w.write_record([
            mbps(r.capacity_bps),
            r.config.clone(),
            fmt_mbps(r.achieved_dl_bps),
            fmt_mbps(r.achieved_ul_bps),
            mbps(r.fh.dl),
            mbps(r.fh.ul),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_curve<W: Write>(out: W, rows: &[CurveRow]) -> Result<()> {
    let mut w = writer(out);
    w.write_record(CURVE_HEADER)?;
    for r in rows {
        w.write_record([
            fmt_mbps(r.offered_bps),
            r.config.clone(),
            fmt_mbps(r.access_bps),
            mbps(r.fh.dl),
            mbps(r.fh.ul),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Compact event label used in the time-series `event` column.
pub fn event_label(e: &ReconfigEvent) -> String {
    format!("{}:{}->{}", e.kind.as_str(), e.from, e.to)
}

pub fn write_timeseries<W: Write>(out: W, series: &TimeSeries) -> Result<()> {
    let mut w = writer(out);
    w.write_record(TIMESERIES_HEADER)?;
    for r in &series.rows {
        w.write_record([
            seconds(r.t),
            mbps(r.capacity.dl),
            mbps(r.capacity.ul),
            r.config.clone(),
            fmt_mbps(r.offered.dl),
            fmt_mbps(r.offered.ul),
            fmt_mbps(r.achieved.dl),
            fmt_mbps(r.achieved.ul),
            mbps(r.fh.dl),
            mbps(r.fh.ul),
            r.event.as_ref().map(event_label).unwrap_or_default(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_events<W: Write>(out: W, series: &TimeSeries) -> Result<()> {
    let mut w = writer(out);
    w.write_record(EVENTS_HEADER)?;
    for e in series.events() {
        w.write_record([seconds(e.t), e.kind.as_str().to_owned(), e.from.clone(), e.to.clone()])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// One row per symbol of the horizon.
pub fn write_grid<W: Write>(out: W, grid: &FrameGrid) -> Result<()> {
    let mut w = writer(out);
    w.write_record(GRID_HEADER)?;
    for slot in 0..grid.horizon_slots() {
        for symbol in 0..SYMBOLS_PER_SLOT {
            w.write_record([
                slot.to_string(),
                symbol.to_string(),
                grid.symbol_kind(slot, symbol).as_str().to_owned(),
                grid.occupied_rbs(slot, symbol).to_string(),
                u8::from(grid.is_transported(slot, symbol)).to_string(),
            ])?;
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Dimensioning figures of one catalog configuration as `key = value`
/// lines. Rates carry an `_mbps` suffix.
pub fn rates_report(scenario: &Scenario, cell_name: &str) -> Result<String> {
    let Scenario { ue, tdd, params, .. } = scenario;
    let cell = scenario.catalog.get(cell_name)?;
    let duty = PerDirection::new(tdd.duty(Direction::Dl), tdd.duty(Direction::Ul));
    let access = PerDirection::new(
        access_capacity(cell, ue, Direction::Dl, tdd),
        access_capacity(cell, ue, Direction::Ul, tdd),
    );
    let layers_dl = effective_layers(cell, ue, Direction::Dl);
    let data = PerDirection::new(
        fh_rate_dl(cell, layers_dl, cell.n_rb(), duty.dl)?,
        fh_rate_ul(cell, 1.0, duty.ul),
    );
    let required = required_fh(cell, ue, tdd, params.control_overhead_bps);
    let threshold = threshold_capacity(cell, ue, tdd, params, Direction::Dl)?;
    let saturated = offered_load(cell, ue, tdd, params, PerDirection::new(access.dl, 0.0))?.load;
    let binding = if saturated.ul >= saturated.dl { Direction::Ul } else { Direction::Dl };
    let floor = offered_load(cell, ue, tdd, params, PerDirection::new(0.0, 0.0))?.load;
    let ratio = |d: Duty| format!("{}/{}", d.symbols, d.period_symbols);

    let mut s = String::new();
    let w = &mut s;
    let _ = writeln!(w, "cell = {}", cell.name);
    let _ = writeln!(w, "bandwidth_mhz = {}", cell.bandwidth_mhz);
    let _ = writeln!(w, "scs_khz = {}", cell.numerology.scs_khz());
    let _ = writeln!(w, "n_rb = {}", cell.n_rb());
    let _ = writeln!(w, "gnb_ports = {}", cell.gnb_ports);
    let _ = writeln!(w, "dl_layers = {layers_dl}");
    let _ = writeln!(w, "ul_layers = {}", effective_layers(cell, ue, Direction::Ul));
    let _ = writeln!(w, "tdd_pattern = {}", tdd.pattern_string());
    let _ = writeln!(w, "duty_dl = {}", ratio(duty.dl));
    let _ = writeln!(w, "duty_ul = {}", ratio(duty.ul));
    let _ = writeln!(w, "dl_access_mbps = {}", fmt_mbps(access.dl));
    let _ = writeln!(w, "ul_access_mbps = {}", fmt_mbps(access.ul));
    let _ = writeln!(w, "dl_fh_data_mbps = {}", mbps(data.dl));
    let _ = writeln!(w, "ul_fh_data_mbps = {}", mbps(data.ul));
    let _ = writeln!(w, "control_overhead_mbps = {}", mbps(params.control_overhead_bps));
    let _ = writeln!(w, "dl_fh_required_mbps = {}", mbps(required.dl));
    let _ = writeln!(w, "ul_fh_required_mbps = {}", mbps(required.ul));
    let _ = writeln!(w, "ul_fh_floor_mbps = {}", mbps(floor.ul + params.control_overhead_bps));
    let _ = writeln!(w, "threshold_mbps = {}", mbps(threshold));
    let _ = writeln!(w, "binding_direction = {binding}");
    Ok(s)
}

/// Parses a `key = value` report back into pairs, in order.
pub fn parse_report(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter_map(|l| l.split_once(" = "))
        .map(|(k, v)| (k.trim().to_owned(), v.trim().to_owned()))
        .collect()
}
