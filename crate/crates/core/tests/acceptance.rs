//! Acceptance checks for the fronthaul model. Prints one PASS/FAIL line per
//! criterion and exits non-zero if any fails.

use std::collections::HashSet;
use std::process::ExitCode;

use fhsim::controller::select_config;
use fhsim::grid::{baseline_signaling, build_grid, ul_transport_symbols};
use fhsim::phy::{
    access_capacity, fh_rate_dl, fh_rate_ul, required_fh, CellConfig, Direction, Numerology, PerDirection, SlotType,
    TddPattern, SUBCARRIERS_PER_RB, SYMBOLS_PER_SLOT,
};
use fhsim::report::write_timeseries;
use fhsim::scenario::{bundled, load_scenario, parse_scenario};
use fhsim::sim::{curve_access_vs_fh, run, sweep_capacity, Scenario};
use fhsim::{threshold_capacity, SwitchKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn table_i() -> Scenario {
    parse_scenario(bundled::TABLE_I, &bundled::dir()).expect("bundled scenario")
}

fn cell<'a>(sc: &'a Scenario, name: &str) -> &'a CellConfig {
    sc.catalog.get(name).expect("catalog entry")
}

fn mbps(bps: f64) -> f64 {
    bps / 1e6
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn uplink_rate_invariance() -> Outcome {
    let sc = table_i();
    let duty = sc.tdd.duty(Direction::Ul);
    let r1 = fh_rate_ul(cell(&sc, "config1"), 1.0, duty);
    let r3 = fh_rate_ul(cell(&sc, "config3"), 1.0, duty);
    ensure(r1 == r3, format!("config1 {r1} bps vs config3 {r3} bps"))?;
    let q1 = required_fh(cell(&sc, "config1"), &sc.ue, &sc.tdd, sc.params.control_overhead_bps).ul;
    let q3 = required_fh(cell(&sc, "config3"), &sc.ue, &sc.tdd, sc.params.control_overhead_bps).ul;
    ensure(q1 == q3, format!("required {q1} vs {q3}"))?;
    Ok(format!("UL fronthaul {r1} bps for both"))
}

fn factor_two_scaling() -> Outcome {
    let sc = table_i();
    let duty = sc.tdd.duty(Direction::Dl);
    let (c1, c2) = (cell(&sc, "config1"), cell(&sc, "config2"));
    let fh1 = fh_rate_dl(c1, 2, c1.n_rb(), duty).map_err(|e| e.to_string())?;
    let fh2 = fh_rate_dl(c2, 2, c2.n_rb(), duty).map_err(|e| e.to_string())?;
    ensure(fh1 == 2 * fh2, format!("DL fronthaul {fh1} vs 2 x {fh2}"))?;
    let a1 = access_capacity(c1, &sc.ue, Direction::Dl, &sc.tdd);
    let a2 = access_capacity(c2, &sc.ue, Direction::Dl, &sc.tdd);
    ensure(a1 == 2.0 * a2, format!("DL access {a1} vs 2 x {a2}"))?;
    Ok(format!("DL fronthaul {fh1} = 2 x {fh2}; access {a1} = 2 x {a2}"))
}

fn calibrated_reproduction() -> Outcome {
    let sc = table_i();
    let (ue, tdd, p) = (&sc.ue, &sc.tdd, &sc.params);
    let c1 = cell(&sc, "config1");
    let c2 = cell(&sc, "config2");
    let c3 = cell(&sc, "config3");
    let dl = tdd.duty(Direction::Dl);
    let ul = tdd.duty(Direction::Ul);
    ensure(
        dl.as_f64() == 0.6 && ul.as_f64() == 0.2,
        format!("duties {} / {}", dl.as_f64(), ul.as_f64()),
    )?;
    let th = |c: &CellConfig| threshold_capacity(c, ue, tdd, p, Direction::Dl).map(|t| mbps(t as f64));
    let fh_dl1 = fh_rate_dl(c1, 2, c1.n_rb(), dl).map_err(|e| e.to_string())? as f64;
    let rows: [(&str, f64, f64, f64); 7] = [
        ("DL access config1", mbps(access_capacity(c1, ue, Direction::Dl, tdd)), 845.9, 850.0),
        ("DL fronthaul config1", mbps(fh_dl1), 1277.3, 1240.0),
        ("UL fronthaul config2", mbps(fh_rate_ul(c2, 1.0, ul) as f64), 1277.3, 1300.0),
        ("UL fronthaul config3", mbps(fh_rate_ul(c3, 1.0, ul) as f64), 2554.7, 2630.0),
        ("threshold config1 vs DL jump", th(c1).map_err(|e| e.to_string())?, 2854.7, 3100.0),
        ("threshold config1 vs UL jump", th(c1).map_err(|e| e.to_string())?, 2854.7, 2700.0),
        ("threshold config2", th(c2).map_err(|e| e.to_string())?, 1577.3, 1600.0),
    ];
    let mut summary = Vec::new();
    for (what, got, model, measured) in rows {
        ensure(format!("{got:.1}") == format!("{model:.1}"), format!("{what}: {got:.1} Mbps, expected {model:.1}"))?;
        let dev = (got - measured) / measured;
        ensure(dev.abs() <= 0.15, format!("{what}: {got:.1} vs measured {measured} ({:+.1}%)", dev * 100.0))?;
        summary.push(format!("{what} {got:.1} ({:+.1}%)", dev * 100.0));
    }
    Ok(summary.join("; "))
}

fn uplink_binds_threshold() -> Outcome {
    let sc = table_i();
    let mut out = Vec::new();
    for c in sc.catalog.configs() {
        let req = required_fh(c, &sc.ue, &sc.tdd, sc.params.control_overhead_bps);
        for dir in Direction::BOTH {
            let th = threshold_capacity(c, &sc.ue, &sc.tdd, &sc.params, dir).map_err(|e| e.to_string())?;
            ensure(
                req.ul > req.dl && th == req.ul,
                format!("{} saturating {dir}: threshold {th}, requirement dl {} ul {}", c.name, req.dl, req.ul),
            )?;
        }
        out.push(format!("{} {:.1}", c.name, mbps(req.ul as f64)));
    }
    Ok(format!("UL sets every threshold: {}", out.join(", ")))
}

fn on_off_sweep() -> Outcome {
    let sc = table_i();
    let step = 100_000_000;
    let rows = sweep_capacity(&sc, 500_000_000, 4_000_000_000, step, Some(Direction::Dl)).map_err(|e| e.to_string())?;
    ensure(rows.len() == 35 * 3, format!("{} rows", rows.len()))?;
    let mut out = Vec::new();
    for c in sc.catalog.configs() {
        let mine: Vec<_> = rows.iter().filter(|r| r.config == c.name).collect();
        let access = access_capacity(c, &sc.ue, Direction::Dl, &sc.tdd);
        ensure(
            mine.iter().all(|r| r.achieved_dl_bps == 0.0 || r.achieved_dl_bps == access),
            format!("{} has intermediate throughput", c.name),
        )?;
        let jumps: Vec<u64> = mine
            .windows(2)
            .filter(|w| w[0].achieved_dl_bps != w[1].achieved_dl_bps)
            .map(|w| w[1].capacity_bps)
            .collect();
        let th = threshold_capacity(c, &sc.ue, &sc.tdd, &sc.params, Direction::Dl).map_err(|e| e.to_string())?;
        ensure(
            jumps.len() == 1 && jumps[0] >= th && jumps[0] - th < step,
            format!("{} jumps at {jumps:?}, threshold {th}", c.name),
        )?;
        out.push(format!("{} at {:.1}", c.name, mbps(jumps[0] as f64)));
    }
    Ok(format!("single jump per config: {}", out.join(", ")))
}

/// Random small TDD frames with random user data, checked against a
/// resource-element tally kept outside the grid.
fn transport_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let trials = 250;
    for trial in 0..trials {
        let len = rng.random_range(1..=5);
        let slots: Vec<SlotType> = (0..len)
            .map(|_| match rng.random_range(0..3) {
                0 => SlotType::Downlink,
                1 => SlotType::Special,
                _ => SlotType::Uplink,
            })
            .collect();
        let d = rng.random_range(0..=14);
        let g = rng.random_range(0..=14 - d);
        let split = (d, g, 14 - d - g);
        let carries = rng.random_bool(0.5);
        let tdd = TddPattern::new(slots.clone(), split, carries).map_err(|e| e.to_string())?;
        let n_rb = rng.random_range(1..=6);
        let ports = rng.random_range(1..=4);
        let cell = CellConfig::with_explicit_rb_count("t", 50, Numerology::fr2(), ports, n_rb);
        let horizon = (len * rng.random_range(1..=3)) as u32;
        let sig_syms = rng.random_range(0..=3);
        let sig_rbs = rng.random_range(0..=n_rb);
        let grid = build_grid(&cell, &tdd, horizon).map_err(|e| e.to_string())?;
        let mut grid = baseline_signaling(grid, sig_syms, sig_rbs).map_err(|e| e.to_string())?;

        let uplink = |slot: u32, symbol: u32| match slots[slot as usize % len] {
            SlotType::Uplink => true,
            SlotType::Special => carries && symbol >= d + g,
            SlotType::Downlink => false,
        };
        let downlink = |slot: u32, symbol: u32| match slots[slot as usize % len] {
            SlotType::Downlink => true,
            SlotType::Special => carries && symbol < d,
            SlotType::Uplink => false,
        };
        // (slot, symbol, subcarrier, layer)
        let mut used: HashSet<(u32, u32, u32, u32)> = HashSet::new();
        for slot in 0..horizon {
            if slots[slot as usize % len] != SlotType::Uplink {
                continue;
            }
            for symbol in SYMBOLS_PER_SLOT.saturating_sub(sig_syms)..SYMBOLS_PER_SLOT {
                for sc in 0..sig_rbs * SUBCARRIERS_PER_RB {
                    used.insert((slot, symbol, sc, 0));
                }
            }
        }
        let fill = rng.random_range(0.0..0.3);
        for slot in 0..horizon {
            for symbol in 0..SYMBOLS_PER_SLOT {
                for rb in 0..n_rb {
                    for layer in 0..ports {
                        if !rng.random_bool(fill) {
                            continue;
                        }
                        let dir = if uplink(slot, symbol) {
                            Direction::Ul
                        } else if downlink(slot, symbol) {
                            Direction::Dl
                        } else {
                            continue;
                        };
                        grid.occupy(slot, symbol, rb, layer, dir).map_err(|e| e.to_string())?;
                        for sc in rb * SUBCARRIERS_PER_RB..(rb + 1) * SUBCARRIERS_PER_RB {
                            used.insert((slot, symbol, sc, layer));
                        }
                    }
                }
            }
        }
        let mut expected = 0u64;
        for slot in 0..horizon {
            for symbol in 0..SYMBOLS_PER_SLOT {
                if uplink(slot, symbol)
                    && (0..n_rb * SUBCARRIERS_PER_RB)
                        .any(|sc| (0..ports).any(|l| used.contains(&(slot, symbol, sc, l))))
                {
                    expected += 1;
                }
            }
        }
        let got = ul_transport_symbols(&grid);
        ensure(
            got == expected,
            format!("trial {trial}: pattern {} split {split:?} got {got} expected {expected}", tdd.pattern_string()),
        )?;
    }
    Ok(format!("{trials} random grids agree"))
}

fn two_region_curve() -> Outcome {
    let sc = table_i();
    let max = sc
        .catalog
        .configs()
        .iter()
        .map(|c| access_capacity(c, &sc.ue, Direction::Ul, &sc.tdd))
        .fold(0.0, f64::max);
    let rows = curve_access_vs_fh(&sc, Direction::Ul, max * 1.1, 41).map_err(|e| e.to_string())?;
    let col = |name: &str| -> Vec<u64> { rows.iter().filter(|r| r.config == name).map(|r| r.fh.ul).collect() };
    let (c1, c2, c3) = (col("config1"), col("config2"), col("config3"));
    for (name, c) in [("config1", &c1), ("config2", &c2), ("config3", &c3)] {
        ensure(c[0] > 0, format!("{name}: zero floor"))?;
        ensure(c.windows(2).all(|w| w[0] <= w[1]), format!("{name}: UL load decreases"))?;
    }
    for i in 0..c1.len() {
        ensure(c3[i] == 2 * c2[i], format!("point {i}: config3 {} vs 2 x config2 {}", c3[i], c2[i]))?;
        ensure(c1[i] == c3[i], format!("point {i}: config1 {} vs config3 {}", c1[i], c3[i]))?;
    }
    Ok(format!(
        "{} points; config3 floor {:.1} -> peak {:.1} Mbps",
        c1.len(),
        mbps(c3[0] as f64),
        mbps(*c3.last().unwrap() as f64)
    ))
}

fn controller_scenario() -> Outcome {
    let sc = load_scenario(&bundled::dir().join("reconfig.scenario")).map_err(|e| e.to_string())?;
    let series = run(&sc).map_err(|e| e.to_string())?;
    let events: Vec<_> = series.events().map(|e| (e.kind, e.from.as_str(), e.to.as_str())).collect();
    ensure(
        events
            == [
                (SwitchKind::Downgrade, "config1", "config2"),
                (SwitchKind::Upgrade, "config2", "config1"),
            ],
        format!("events {events:?}"),
    )?;
    ensure(series.rows[0].config == "config1", format!("starts in {}", series.rows[0].config))?;
    for r in &series.rows {
        let req = required_fh(cell(&sc, &r.config), &sc.ue, &sc.tdd, sc.params.control_overhead_bps);
        ensure(r.feasible && req.fits_within(&r.capacity), format!("t = {}: {} does not fit", r.t, r.config))?;
        ensure(r.fh.fits_within(&r.capacity), format!("t = {}: load exceeds capacity", r.t))?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..100 {
        let cap = PerDirection::new(rng.random_range(0..4_000_000_000u64), rng.random_range(0..4_000_000_000u64));
        let sel = select_config(&sc.catalog, cap, &sc.ue, &sc.tdd, &sc.params, sc.controller.objective);
        let mut best: Option<(f64, &CellConfig)> = None;
        for c in sc.catalog.configs() {
            if !required_fh(c, &sc.ue, &sc.tdd, sc.params.control_overhead_bps).fits_within(&cap) {
                continue;
            }
            let score = access_capacity(c, &sc.ue, Direction::Dl, &sc.tdd);
            if best.is_none_or(|(s, _)| score > s) {
                best = Some((score, c));
            }
        }
        match best {
            Some((score, _)) => {
                let picked = access_capacity(cell(&sc, &sel.name), &sc.ue, Direction::Dl, &sc.tdd);
                ensure(sel.feasible && picked == score, format!("{cap:?}: picked {}", sel.name))?;
            }
            None => ensure(!sel.feasible, format!("{cap:?}: nothing fits but {} reported feasible", sel.name))?,
        }
    }
    Ok(format!("{} steps, events downgrade@5 s upgrade@10 s; 100 selections match", series.rows.len()))
}

fn determinism() -> Outcome {
    let mut sc = load_scenario(&bundled::dir().join("reconfig.scenario")).map_err(|e| e.to_string())?;
    sc.traffic.jitter = true;
    let csv = |sc: &Scenario| -> Result<Vec<u8>, String> {
        let mut buf = Vec::new();
        write_timeseries(&mut buf, &run(sc).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        Ok(buf)
    };
    let (a, b) = (csv(&sc)?, csv(&sc)?);
    ensure(a == b, "two runs differ")?;
    sc.sim.seed += 1;
    ensure(csv(&sc)? != a, "seed has no effect on jittered demand")?;
    Ok(format!("{} identical bytes", a.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("uplink rate invariance across port/bandwidth trade", uplink_rate_invariance),
        ("factor-two scaling with bandwidth", factor_two_scaling),
        ("calibrated reproduction within 15%", calibrated_reproduction),
        ("uplink sets the capacity threshold", uplink_binds_threshold),
        ("on/off sweep shape", on_off_sweep),
        ("uplink symbol transport oracle", transport_oracle),
        ("two-region uplink curve", two_region_curve),
        ("controller reconfiguration scenario", controller_scenario),
        ("simulation determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {} PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} FAIL {name}: {detail}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
