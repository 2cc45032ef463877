//! Self-checks of the model on a scenario. Each check holds for any valid
//! scenario; `validate` on the bundled files must come out all green.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::controller::select_config;
use crate::error::Result;
use crate::fronthaul::{offered_load, threshold_capacity, ThrottlePolicy};
use crate::grid::{cell_quantum_bits, ul_transport_symbols, FrameGrid, SymbolKind};
use crate::phy::{
    access_capacity, effective_layers, effective_qm, fh_rate_dl, required_fh, Direction, PerDirection,
    SUBCARRIERS_PER_RB, SYMBOLS_PER_SLOT,
};
use crate::report::write_timeseries;
use crate::scenario::{dump_scenario, parse_scenario};
use crate::sim::{curve_access_vs_fh, run, sweep_capacity, Scenario};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// Counts uplink symbols that carry at least one used resource element,
/// walking every subcarrier of every layer.
pub fn transported_symbols_by_enumeration(grid: &FrameGrid) -> u64 {
    let mut count = 0;
    for slot in 0..grid.horizon_slots() {
        for symbol in 0..SYMBOLS_PER_SLOT {
            if grid.symbol_kind(slot, symbol) != SymbolKind::Uplink {
                continue;
            }
            let used = (0..grid.n_rb() * SUBCARRIERS_PER_RB).any(|sc| {
                (0..grid.n_layers()).any(|layer| grid.is_occupied(slot, symbol, sc / SUBCARRIERS_PER_RB, layer))
            });
            count += u64::from(used);
        }
    }
    count
}

/// First symbol without a data direction that holds user data.
fn illegal_occupancy(grid: &FrameGrid) -> Option<(u32, u32)> {
    for slot in 0..grid.horizon_slots() {
        for symbol in 0..SYMBOLS_PER_SLOT {
            if grid.symbol_kind(slot, symbol).direction().is_some() {
                continue;
            }
            let used = (0..grid.n_rb()).any(|rb| (0..grid.n_layers()).any(|l| grid.is_occupied(slot, symbol, rb, l)));
            if used {
                return Some((slot, symbol));
            }
        }
    }
    None
}

fn demand(direction: Direction, bps: f64) -> PerDirection<f64> {
    match direction {
        Direction::Dl => PerDirection::new(bps, 0.0),
        Direction::Ul => PerDirection::new(0.0, bps),
    }
}

/// Runs every check against `scenario`.
pub fn run_checks(scenario: &Scenario) -> Result<Vec<Check>> {
    let Scenario { ue, tdd, params, .. } = scenario;
    let mut out = Vec::new();

    let (dl, ul) = (tdd.duty(Direction::Dl), tdd.duty(Direction::Ul));
    out.push(Check::new(
        "duty_bounds",
        dl.symbols + ul.symbols <= dl.period_symbols,
        format!("dl {}/{} ul {}/{}", dl.symbols, dl.period_symbols, ul.symbols, ul.period_symbols),
    ));

    for cell in scenario.catalog.configs() {
        let name = &cell.name;
        let access = PerDirection::new(
            access_capacity(cell, ue, Direction::Dl, tdd),
            access_capacity(cell, ue, Direction::Ul, tdd),
        );

        // Saturated DL on the grid against the closed form.
        let sat = offered_load(cell, ue, tdd, params, demand(Direction::Dl, access.dl))?;
        let layers = effective_layers(cell, ue, Direction::Dl);
        let formula = fh_rate_dl(cell, layers, cell.n_rb(), dl)?;
        // one RB-symbol cell of DL data expressed as a rate
        let quantum = (f64::from(SUBCARRIERS_PER_RB * sat.allocation.qm.dl) / sat.grid.horizon_seconds()).ceil() as u64;
        let gap = sat.load.dl.abs_diff(formula);
        out.push(Check::new(
            format!("dl_grid_matches_formula[{name}]"),
            gap <= quantum,
            format!("grid {} formula {} quantum {}", sat.load.dl, formula, quantum),
        ));

        // Bits carried never fall short of demand unless the grid is full.
        let carried = sat.allocation.dl_bits_carried / sat.grid.horizon_seconds();
        let q = cell_quantum_bits(cell, effective_qm(cell, ue, Direction::Dl)) / sat.grid.horizon_seconds();
        out.push(Check::new(
            format!("dl_saturation_carried[{name}]"),
            carried + q >= access.dl,
            format!("carried {carried:.0} access {:.0}", access.dl),
        ));

        // Transport rule against the element-wise oracle, on several loads.
        let mut agree = true;
        let mut legal = true;
        let mut ul_curve = Vec::new();
        let mut detail = String::new();
        for i in 0..=10 {
            let d = access.ul * f64::from(i) / 10.0;
            let g = offered_load(cell, ue, tdd, params, demand(Direction::Ul, d))?;
            let fast = ul_transport_symbols(&g.grid);
            let slow = transported_symbols_by_enumeration(&g.grid);
            if fast != slow && agree {
                agree = false;
                detail = format!("demand {d:.0}: {fast} vs {slow}");
            }
            if let Some((slot, symbol)) = illegal_occupancy(&g.grid) {
                legal = false;
                detail = format!("user data in slot {slot} symbol {symbol}");
            }
            ul_curve.push((g.load.ul, fast));
        }
        out.push(Check::new(format!("ul_transport_oracle[{name}]"), agree, detail.clone()));
        out.push(Check::new(format!("legal_occupancy[{name}]"), legal, detail));

        let monotone = ul_curve.windows(2).all(|w| w[0].0 <= w[1].0);
        let floor_ok = params.signaling.ul_symbols_per_slot == 0 || ul_curve[0].0 > 0;
        out.push(Check::new(
            format!("ul_load_monotone[{name}]"),
            monotone && floor_ok,
            format!("floor {} max {}", ul_curve[0].0, ul_curve[10].0),
        ));

        // Doubling ports doubles the UL load but not the symbols sent.
        let doubled = cell.clone().with_ports(cell.gnb_ports * 2);
        let d = access.ul * 0.3;
        let a = offered_load(cell, ue, tdd, params, demand(Direction::Ul, d))?;
        let b = offered_load(&doubled, ue, tdd, params, demand(Direction::Ul, d))?;
        let same_symbols = ul_transport_symbols(&a.grid) == ul_transport_symbols(&b.grid);
        out.push(Check::new(
            format!("port_independence[{name}]"),
            same_symbols && b.load.ul == 2 * a.load.ul,
            format!("load {} -> {}", a.load.ul, b.load.ul),
        ));

        // Threshold equals the closed-form requirement and the sweep jumps there.
        let threshold = threshold_capacity(cell, ue, tdd, params, Direction::Dl)?;
        let required = required_fh(cell, ue, tdd, params.control_overhead_bps);
        if params.throttle == ThrottlePolicy::AllOrNothing {
            let step = 100_000_000;
            let lo = threshold.saturating_sub(5 * step) / step * step;
            let mut single = scenario.clone();
            single.catalog = crate::controller::ConfigCatalog::new(vec![cell.clone()])?;
            let rows = sweep_capacity(&single, lo, lo + 11 * step, step, Some(Direction::Dl))?;
            let jumps: Vec<u64> = rows
                .windows(2)
                .filter(|w| (w[0].achieved_dl_bps > 0.0) != (w[1].achieved_dl_bps > 0.0))
                .map(|w| w[1].capacity_bps)
                .collect();
            let ok = jumps.len() == 1 && jumps[0] >= threshold && jumps[0] - threshold < step;
            out.push(Check::new(
                format!("sweep_jump_at_threshold[{name}]"),
                ok,
                format!("threshold {threshold} jumps {jumps:?} required dl {} ul {}", required.dl, required.ul),
            ));
        }
    }

    // Curve UL column never decreases.
    let curve = curve_access_vs_fh(scenario, Direction::Ul, scenario.catalog.configs().iter().map(|c| access_capacity(c, ue, Direction::Ul, tdd)).fold(0.0, f64::max), 12)?;
    let n = scenario.catalog.len();
    let monotone = (0..n).all(|c| {
        let col: Vec<u64> = curve.iter().skip(c).step_by(n).map(|r| r.fh.ul).collect();
        col.windows(2).all(|w| w[0] <= w[1])
    });
    out.push(Check::new("curve_ul_monotone", monotone, format!("{} rows", curve.len())));

    // Selection against exhaustive enumeration.
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.sim.seed);
    let top = scenario
        .catalog
        .configs()
        .iter()
        .map(|c| required_fh(c, ue, tdd, params.control_overhead_bps).max())
        .max()
        .unwrap_or(0);
    let objective = scenario.controller.objective;
    let mut mismatch = None;
    for _ in 0..100 {
        let cap = PerDirection::new(rng.random_range(0..=top * 3 / 2), rng.random_range(0..=top * 3 / 2));
        let sel = select_config(&scenario.catalog, cap, ue, tdd, params, objective);
        let feasible: Vec<_> = scenario
            .catalog
            .configs()
            .iter()
            .filter(|c| required_fh(c, ue, tdd, params.control_overhead_bps).fits_within(&cap))
            .collect();
        let best = feasible.iter().map(|c| objective.score(c, ue, tdd)).fold(f64::NEG_INFINITY, f64::max);
        let ok = if feasible.is_empty() {
            !sel.feasible
        } else {
            sel.feasible
                && feasible
                    .iter()
                    .any(|c| c.name == sel.name && objective.score(c, ue, tdd) == best)
        };
        if !ok && mismatch.is_none() {
            mismatch = Some(format!("capacity {cap:?} picked {}", sel.name));
        }
    }
    out.push(Check::new(
        "selection_exhaustive",
        mismatch.is_none(),
        mismatch.unwrap_or_else(|| "100 capacities".into()),
    ));

    // Simulation invariants and determinism.
    let series = run(scenario)?;
    let mut bad = None;
    for r in &series.rows {
        let cell = scenario.catalog.get(&r.config)?;
        let caps = PerDirection::new(
            access_capacity(cell, ue, Direction::Dl, tdd),
            access_capacity(cell, ue, Direction::Ul, tdd),
        );
        let conserve = r.achieved.dl <= r.offered.dl.min(caps.dl) + 1e-6 && r.achieved.ul <= r.offered.ul.min(caps.ul) + 1e-6;
        let fits = !r.feasible
            || required_fh(cell, ue, tdd, params.control_overhead_bps).fits_within(&r.capacity);
        if !(conserve && fits) && bad.is_none() {
            bad = Some(format!("t = {}", r.t));
        }
    }
    let increasing = series.rows.windows(2).all(|w| w[0].t < w[1].t);
    out.push(Check::new(
        "simulation_invariants",
        bad.is_none() && increasing,
        bad.unwrap_or_else(|| format!("{} steps", series.rows.len())),
    ));
    let mut first = Vec::new();
    let mut second = Vec::new();
    write_timeseries(&mut first, &series)?;
    write_timeseries(&mut second, &run(scenario)?)?;
    out.push(Check::new("simulation_deterministic", first == second, format!("{} bytes", first.len())));

    // Canonical dump reloads to the same scenario.
    let round_trip = match dump_scenario(scenario) {
        Ok(text) => match parse_scenario(&text, std::path::Path::new(".")) {
            Ok(again) => Check::new("scenario_round_trip", &again == scenario, "reloaded"),
            Err(e) => Check::new("scenario_round_trip", false, e.to_string()),
        },
        Err(e) => Check::new("scenario_round_trip", false, e.to_string()),
    };
    out.push(round_trip);

    Ok(out)
}

/// Writes `check,status,detail` lines.
pub fn write_checks<W: Write>(out: W, checks: &[Check]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(["check", "status", "detail"])?;
    for c in checks {
        w.write_record([c.name.as_str(), if c.passed { "pass" } else { "fail" }, c.detail.as_str()])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
