//! Scenario files.
//!
//! A scenario is a TOML document with bracketed sections and `key = value`
//! lines:
//!
//! ```text
//! [cell.config1]
//! bandwidth_mhz = 200
//! ports = 4
//!
//! [tdd]
//! pattern = "DDDSU"
//! s_split = "10,2,2"
//! ```
//!
//! Every key other than `bandwidth_mhz` and `ports` has a default. Unknown
//! sections and keys are rejected. Grammar errors map to [`Error::Parse`];
//! everything else to [`Error::Validation`] naming the section, key and line.

use std::fmt::Write as _;
use std::ops::Range;
use std::path::{Path, PathBuf};

use toml::de::{DeTable, DeValue};
use toml::Spanned;

use crate::controller::{ConfigCatalog, Objective};
use crate::error::{Error, Result};
use crate::fronthaul::{mbps_to_bps, CapacityProfile, ThrottlePolicy};
use crate::grid::{SchedulingPolicy, SignalingConfig};
use crate::params::ModelParams;
use crate::phy::{CellConfig, Numerology, PerDirection, SlotPattern, TddPattern, UeProfile, SYMBOLS_PER_SLOT};
use crate::sim::{ControllerSettings, Scenario, SimSettings, Traffic};

/// Scenarios shipped with the crate.
pub mod bundled {
    /// The three-configuration testbed catalog.
    pub const TABLE_I: &str = include_str!("../scenarios/tableI.scenario");
    /// A two-slot, four-RB cell small enough for exhaustive checks.
    pub const TINY: &str = include_str!("../scenarios/tiny.scenario");

    /// Directory holding the bundled scenario and trace files.
    pub fn dir() -> std::path::PathBuf {
        std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios")
    }
}

/// Default symmetric capacity when neither a constant nor a trace is given.
pub const DEFAULT_CAPACITY_MBPS: f64 = 10_000.0;

fn line_of(src: &str, offset: usize) -> usize {
    src[..offset.min(src.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

struct Section<'a, 'i> {
    src: &'a str,
    name: String,
    table: Option<&'a DeTable<'i>>,
    header: Range<usize>,
}

impl<'a, 'i> Section<'a, 'i> {
    fn invalid(&self, key: &str, span: Range<usize>, message: impl Into<String>) -> Error {
        Error::Validation {
            section: self.name.clone(),
            key: key.to_owned(),
            line: line_of(self.src, span.start),
            message: message.into(),
        }
    }

    fn reject_unknown(&self, allowed: &[&str]) -> Result<()> {
        if let Some(table) = self.table {
            for (key, _) in table.iter() {
                if !allowed.contains(&key.get_ref().as_ref()) {
                    return Err(self.invalid(key.get_ref(), key.span(), format!("unknown key (allowed: {})", allowed.join(", "))));
                }
            }
        }
        Ok(())
    }

    fn value(&self, key: &str) -> Option<&'a Spanned<DeValue<'i>>> {
        self.table.and_then(|t| t.get(key))
    }

    fn span_of(&self, key: &str) -> Range<usize> {
        self.value(key).map(|v| v.span()).unwrap_or(self.header.clone())
    }

    fn opt_f64(&self, key: &str) -> Result<Option<f64>> {
        let Some(v) = self.value(key) else { return Ok(None) };
        let parsed = match v.get_ref() {
            DeValue::Float(f) => f.as_str().parse::<f64>().ok(),
            DeValue::Integer(i) => i64::from_str_radix(i.as_str(), i.radix()).ok().map(|i| i as f64),
            _ => None,
        };
        match parsed {
            Some(x) if x.is_finite() => Ok(Some(x)),
            _ => Err(self.invalid(key, v.span(), "expected a finite number")),
        }
    }

    fn opt_u64(&self, key: &str) -> Result<Option<u64>> {
        let Some(v) = self.value(key) else { return Ok(None) };
        match v.get_ref() {
            DeValue::Integer(i) => u64::from_str_radix(i.as_str(), i.radix())
                .map(Some)
                .map_err(|_| self.invalid(key, v.span(), "expected a non-negative integer")),
            _ => Err(self.invalid(key, v.span(), "expected a non-negative integer")),
        }
    }

    fn opt_u32(&self, key: &str) -> Result<Option<u32>> {
        match self.opt_u64(key)? {
            None => Ok(None),
            Some(x) => u32::try_from(x)
                .map(Some)
                .map_err(|_| self.invalid(key, self.span_of(key), "integer too large")),
        }
    }

    fn opt_bool(&self, key: &str) -> Result<Option<bool>> {
        let Some(v) = self.value(key) else { return Ok(None) };
        v.get_ref()
            .as_bool()
            .map(Some)
            .ok_or_else(|| self.invalid(key, v.span(), "expected true or false"))
    }

    fn opt_str(&self, key: &str) -> Result<Option<&'a str>> {
        let Some(v) = self.value(key) else { return Ok(None) };
        v.get_ref()
            .as_str()
            .map(Some)
            .ok_or_else(|| self.invalid(key, v.span(), "expected a quoted string"))
    }

    fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.opt_f64(key)?.unwrap_or(default))
    }

    fn u32_or(&self, key: &str, default: u32) -> Result<u32> {
        Ok(self.opt_u32(key)?.unwrap_or(default))
    }

    fn require_u32(&self, key: &str) -> Result<u32> {
        self.opt_u32(key)?
            .ok_or_else(|| self.invalid(key, self.header.clone(), "required key is missing"))
    }

    fn parsed<T: std::str::FromStr<Err = String>>(&self, key: &str, default: T) -> Result<T> {
        match self.opt_str(key)? {
            None => Ok(default),
            Some(s) => s.parse().map_err(|e: String| self.invalid(key, self.span_of(key), e)),
        }
    }

    fn check(&self, key: &str, ok: bool, message: impl Into<String>) -> Result<()> {
        if ok {
            Ok(())
        } else {
            Err(self.invalid(key, self.span_of(key), message))
        }
    }
}

const CELL_KEYS: &[&str] = &[
    "bandwidth_mhz",
    "scs_khz",
    "ports",
    "qm_dl",
    "qm_ul",
    "n_iq",
    "code_rate",
    "overhead",
    "rb_count_override",
    "dl_split",
    "ul_split",
];
const UE_KEYS: &[&str] = &["max_layers_dl", "max_layers_ul", "max_qm_dl", "max_qm_ul"];
const TDD_KEYS: &[&str] = &["pattern", "s_split", "s_carries_data"];
const FRONTHAUL_KEYS: &[&str] = &[
    "control_overhead_mbps",
    "policy",
    "capacity_mbps",
    "capacity_dl_mbps",
    "capacity_ul_mbps",
    "trace_file",
];
const TRAFFIC_KEYS: &[&str] = &["dl_mbps", "ul_mbps", "ack_ratio", "jitter"];
const CONTROLLER_KEYS: &[&str] = &["hysteresis", "dwell_s", "objective"];
const SCHEDULER_KEYS: &[&str] = &["policy", "signaling_symbols", "signaling_rbs", "horizon_slots"];
const SIM_KEYS: &[&str] = &["step_s", "duration_s", "seed"];
const SECTIONS: &[&str] = &["cell", "ue", "tdd", "fronthaul", "traffic", "controller", "scheduler", "sim"];

fn parse_cell(sec: &Section) -> Result<CellConfig> {
    sec.reject_unknown(CELL_KEYS)?;
    let bandwidth = sec.require_u32("bandwidth_mhz")?;
    let ports = sec.require_u32("ports")?;
    let scs = sec.u32_or("scs_khz", 120)?;
    let numerology = Numerology::from_scs_khz(scs).map_err(|e| sec.invalid("scs_khz", sec.span_of("scs_khz"), e.to_string()))?;
    let cell_name = sec.name.trim_start_matches("cell.").to_owned();
    let mut cell = match sec.opt_u32("rb_count_override")? {
        Some(n_rb) => CellConfig::with_explicit_rb_count(cell_name, bandwidth, numerology, ports, n_rb),
        None => CellConfig::new(cell_name, bandwidth, numerology, ports)
            .map_err(|e| sec.invalid("bandwidth_mhz", sec.span_of("bandwidth_mhz"), e.to_string()))?,
    };
    cell.qm_dl = sec.u32_or("qm_dl", CellConfig::DEFAULT_QM)?;
    cell.qm_ul = sec.u32_or("qm_ul", CellConfig::DEFAULT_QM)?;
    cell.n_iq = sec.u32_or("n_iq", CellConfig::DEFAULT_N_IQ)?;
    cell.code_rate = sec.f64_or("code_rate", CellConfig::DEFAULT_CODE_RATE)?;
    cell.overhead = sec.f64_or("overhead", CellConfig::DEFAULT_OVERHEAD)?;
    cell.dl_split = sec.parsed("dl_split", cell.dl_split)?;
    cell.ul_split = sec.parsed("ul_split", cell.ul_split)?;
    cell.check().map_err(|(key, msg)| sec.invalid(key, sec.span_of(key), msg))?;
    Ok(cell)
}

fn parse_ue(sec: &Section) -> Result<UeProfile> {
    sec.reject_unknown(UE_KEYS)?;
    let d = UeProfile::default();
    let ue = UeProfile {
        max_layers_dl: sec.u32_or("max_layers_dl", d.max_layers_dl)?,
        max_layers_ul: sec.u32_or("max_layers_ul", d.max_layers_ul)?,
        max_qm_dl: sec.u32_or("max_qm_dl", d.max_qm_dl)?,
        max_qm_ul: sec.u32_or("max_qm_ul", d.max_qm_ul)?,
    };
    ue.check().map_err(|(key, msg)| sec.invalid(key, sec.span_of(key), msg))?;
    Ok(ue)
}

fn parse_tdd(sec: &Section) -> Result<TddPattern> {
    sec.reject_unknown(TDD_KEYS)?;
    let pattern: SlotPattern = sec.parsed("pattern", "DDDSU".parse().expect("default pattern"))?;
    let split_text = sec.opt_str("s_split")?.unwrap_or("10,2,2");
    let split: Vec<u32> = split_text
        .split(',')
        .map(|p| p.trim().parse::<u32>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| sec.invalid("s_split", sec.span_of("s_split"), "expected three comma-separated integers"))?;
    sec.check("s_split", split.len() == 3, "expected three comma-separated integers")?;
    sec.check(
        "s_split",
        split.iter().sum::<u32>() == SYMBOLS_PER_SLOT,
        format!("symbols must sum to {SYMBOLS_PER_SLOT}"),
    )?;
    let carries = sec.opt_bool("s_carries_data")?.unwrap_or(false);
    TddPattern::new(pattern.0, (split[0], split[1], split[2]), carries)
        .map_err(|e| sec.invalid("pattern", sec.span_of("pattern"), e.to_string()))
}

/// Parses scenario text. Relative trace paths resolve against `base_dir`.
pub fn parse_scenario(text: &str, base_dir: &Path) -> Result<Scenario> {
    let doc = DeTable::parse(text).map_err(|e| Error::Parse {
        line: e.span().map(|s| line_of(text, s.start)).unwrap_or(1),
        message: e.message().to_owned(),
    })?;
    let root = doc.get_ref();
    for (key, _) in root.iter() {
        if !SECTIONS.contains(&key.get_ref().as_ref()) {
            return Err(Error::Validation {
                section: key.get_ref().to_string(),
                key: String::new(),
                line: line_of(text, key.span().start),
                message: format!("unknown section (allowed: {})", SECTIONS.join(", ")),
            });
        }
    }
    let section = |name: &str| -> Result<Section> {
        match root.get(name) {
            None => Ok(Section {
                src: text,
                name: name.to_owned(),
                table: None,
                header: 0..0,
            }),
            Some(v) => match v.get_ref().as_table() {
                Some(t) => Ok(Section {
                    src: text,
                    name: name.to_owned(),
                    table: Some(t),
                    header: v.span(),
                }),
                None => Err(Error::Validation {
                    section: name.to_owned(),
                    key: String::new(),
                    line: line_of(text, v.span().start),
                    message: "expected a section".into(),
                }),
            },
        }
    };

    let cell_root = section("cell")?;
    let mut cells = Vec::new();
    if let Some(table) = cell_root.table {
        for (name, value) in table.iter() {
            let sec = Section {
                src: text,
                name: format!("cell.{}", name.get_ref()),
                table: value.get_ref().as_table(),
                header: name.span(),
            };
            if sec.table.is_none() {
                return Err(sec.invalid("", name.span(), "expected a [cell.<name>] section"));
            }
            cells.push(parse_cell(&sec)?);
        }
    }
    let catalog = ConfigCatalog::new(cells).map_err(|e| cell_root.invalid("", cell_root.header.clone(), e.to_string()))?;
    let ue = parse_ue(&section("ue")?)?;
    let tdd = parse_tdd(&section("tdd")?)?;

    let sched = section("scheduler")?;
    sched.reject_unknown(SCHEDULER_KEYS)?;
    let defaults = ModelParams::default();
    let signaling = SignalingConfig {
        ul_symbols_per_slot: sched.u32_or("signaling_symbols", defaults.signaling.ul_symbols_per_slot)?,
        ul_rbs: sched.u32_or("signaling_rbs", defaults.signaling.ul_rbs)?,
    };
    sched.check(
        "signaling_symbols",
        signaling.ul_symbols_per_slot <= SYMBOLS_PER_SLOT,
        format!("at most {SYMBOLS_PER_SLOT} symbols per slot"),
    )?;
    let min_rb = catalog.configs().iter().map(|c| c.n_rb()).min().unwrap_or(0);
    sched.check(
        "signaling_rbs",
        signaling.ul_rbs <= min_rb,
        format!("exceeds the {min_rb} RBs of the narrowest cell"),
    )?;
    let horizon_slots = sched.u32_or("horizon_slots", defaults.horizon_slots)?;
    sched.check(
        "horizon_slots",
        horizon_slots > 0 && (horizon_slots as usize).is_multiple_of(tdd.len()),
        format!("must be a positive multiple of the {}-slot TDD period", tdd.len()),
    )?;
    let scheduling: SchedulingPolicy = sched.parsed("policy", defaults.scheduling)?;

    let fh = section("fronthaul")?;
    fh.reject_unknown(FRONTHAUL_KEYS)?;
    let control_mbps = fh.f64_or("control_overhead_mbps", defaults.control_overhead_bps as f64 / 1e6)?;
    fh.check("control_overhead_mbps", control_mbps >= 0.0, "must be non-negative")?;
    let throttle: ThrottlePolicy = fh.parsed("policy", defaults.throttle)?;
    let (capacity, trace_file) = match fh.opt_str("trace_file")? {
        Some(p) => {
            for key in ["capacity_mbps", "capacity_dl_mbps", "capacity_ul_mbps"] {
                fh.check(key, fh.value(key).is_none(), "cannot be combined with trace_file")?;
            }
            let path = base_dir.join(p);
            let profile = CapacityProfile::from_trace_file(&path)
                .map_err(|e| fh.invalid("trace_file", fh.span_of("trace_file"), e.to_string()))?;
            (profile, Some(path))
        }
        None => {
            let sym = fh.f64_or("capacity_mbps", DEFAULT_CAPACITY_MBPS)?;
            let dl = fh.f64_or("capacity_dl_mbps", sym)?;
            let ul = fh.f64_or("capacity_ul_mbps", sym)?;
            for (key, v) in [("capacity_mbps", sym), ("capacity_dl_mbps", dl), ("capacity_ul_mbps", ul)] {
                fh.check(key, v >= 0.0, "must be non-negative")?;
            }
            (
                CapacityProfile::constant(PerDirection::new(mbps_to_bps(dl), mbps_to_bps(ul))),
                None,
            )
        }
    };

    let tr = section("traffic")?;
    tr.reject_unknown(TRAFFIC_KEYS)?;
    let td = Traffic::default();
    let dl_mbps = tr.f64_or("dl_mbps", td.dl_demand_bps / 1e6)?;
    let ul_mbps = tr.f64_or("ul_mbps", td.ul_demand_bps / 1e6)?;
    tr.check("dl_mbps", dl_mbps >= 0.0, "must be non-negative")?;
    tr.check("ul_mbps", ul_mbps >= 0.0, "must be non-negative")?;
    let ack_ratio = tr.f64_or("ack_ratio", defaults.ack_ratio)?;
    tr.check("ack_ratio", (0.0..=0.2).contains(&ack_ratio), "must be within [0, 0.2]")?;
    let traffic = Traffic {
        dl_demand_bps: dl_mbps * 1e6,
        ul_demand_bps: ul_mbps * 1e6,
        jitter: tr.opt_bool("jitter")?.unwrap_or(false),
    };

    let ctl = section("controller")?;
    ctl.reject_unknown(CONTROLLER_KEYS)?;
    let cd = ControllerSettings::default();
    let controller = ControllerSettings {
        hysteresis_margin: ctl.f64_or("hysteresis", cd.hysteresis_margin)?,
        min_dwell_s: ctl.f64_or("dwell_s", cd.min_dwell_s)?,
        objective: ctl.parsed::<Objective>("objective", cd.objective)?,
    };
    ctl.check("hysteresis", controller.hysteresis_margin >= 0.0, "must be non-negative")?;
    ctl.check("dwell_s", controller.min_dwell_s >= 0.0, "must be non-negative")?;

    let simsec = section("sim")?;
    simsec.reject_unknown(SIM_KEYS)?;
    let sd = SimSettings::default();
    let sim = SimSettings {
        step_s: simsec.f64_or("step_s", sd.step_s)?,
        duration_s: simsec.f64_or("duration_s", sd.duration_s)?,
        seed: simsec.opt_u64("seed")?.unwrap_or(sd.seed),
    };
    simsec.check("step_s", sim.step_s > 0.0, "must be positive")?;
    simsec.check("duration_s", sim.duration_s >= sim.step_s, "must be at least step_s")?;

    Ok(Scenario {
        catalog,
        ue,
        tdd,
        capacity,
        trace_file,
        traffic,
        params: ModelParams {
            control_overhead_bps: mbps_to_bps(control_mbps),
            ack_ratio,
            throttle,
            scheduling,
            signaling,
            horizon_slots,
        },
        controller,
        sim,
    })
}

/// Reads and validates a scenario file.
pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
    parse_scenario(&text, &base)
}

fn quoted(s: &str) -> String {
    toml::Value::String(s.to_owned()).to_string()
}

/// Writes the scenario back out with every key spelled out. Loading the
/// result reproduces an identical scenario.
pub fn dump_scenario(sc: &Scenario) -> Result<String> {
    let mut out = String::new();
    let w = &mut out;
    for c in sc.catalog.configs() {
        let name = toml::Value::String(c.name.clone()).to_string();
        let bare = c.name.chars().all(|ch| ch.is_ascii_alphanumeric() || ch == '_' || ch == '-');
        let _ = writeln!(w, "[cell.{}]", if bare { c.name.clone() } else { name });
        let _ = writeln!(w, "bandwidth_mhz = {}", c.bandwidth_mhz);
        let _ = writeln!(w, "scs_khz = {}", c.numerology.scs_khz());
        let _ = writeln!(w, "ports = {}", c.gnb_ports);
        let _ = writeln!(w, "qm_dl = {}\nqm_ul = {}\nn_iq = {}", c.qm_dl, c.qm_ul, c.n_iq);
        let _ = writeln!(w, "code_rate = {:?}\noverhead = {:?}", c.code_rate, c.overhead);
        if let Some(n) = c.rb_count_override {
            let _ = writeln!(w, "rb_count_override = {n}");
        }
        let _ = writeln!(w, "dl_split = {}\nul_split = {}\n", quoted(c.dl_split.as_str()), quoted(c.ul_split.as_str()));
    }
    let ue = &sc.ue;
    let _ = writeln!(
        w,
        "[ue]\nmax_layers_dl = {}\nmax_layers_ul = {}\nmax_qm_dl = {}\nmax_qm_ul = {}\n",
        ue.max_layers_dl, ue.max_layers_ul, ue.max_qm_dl, ue.max_qm_ul
    );
    let (d, g, u) = sc.tdd.s_split();
    let _ = writeln!(
        w,
        "[tdd]\npattern = {}\ns_split = \"{d},{g},{u}\"\ns_carries_data = {}\n",
        quoted(&sc.tdd.pattern_string()),
        sc.tdd.s_carries_data()
    );
    let p = &sc.params;
    let _ = writeln!(w, "[fronthaul]\ncontrol_overhead_mbps = {:?}", p.control_overhead_bps as f64 / 1e6);
    let _ = writeln!(w, "policy = {}", quoted(p.throttle.as_str()));
    match (&sc.trace_file, sc.capacity.segments()) {
        (Some(path), _) => {
            let _ = writeln!(w, "trace_file = {}\n", quoted(&path.to_string_lossy()));
        }
        (None, [only]) => {
            let _ = writeln!(
                w,
                "capacity_dl_mbps = {:?}\ncapacity_ul_mbps = {:?}\n",
                only.capacity.dl as f64 / 1e6,
                only.capacity.ul as f64 / 1e6
            );
        }
        (None, _) => {
            return Err(Error::BadProfile(
                "a multi-segment capacity profile can only be written with a trace file".into(),
            ))
        }
    }
    let t = &sc.traffic;
    let _ = writeln!(
        w,
        "[traffic]\ndl_mbps = {:?}\nul_mbps = {:?}\nack_ratio = {:?}\njitter = {}\n",
        t.dl_demand_bps / 1e6,
        t.ul_demand_bps / 1e6,
        p.ack_ratio,
        t.jitter
    );
    let c = &sc.controller;
    let _ = writeln!(
        w,
        "[controller]\nhysteresis = {:?}\ndwell_s = {:?}\nobjective = {}\n",
        c.hysteresis_margin,
        c.min_dwell_s,
        quoted(c.objective.as_str())
    );
    let _ = writeln!(
        w,
        "[scheduler]\npolicy = {}\nsignaling_symbols = {}\nsignaling_rbs = {}\nhorizon_slots = {}\n",
        quoted(p.scheduling.as_str()),
        p.signaling.ul_symbols_per_slot,
        p.signaling.ul_rbs,
        p.horizon_slots
    );
    let s = &sc.sim;
    let _ = writeln!(w, "[sim]\nstep_s = {:?}\nduration_s = {:?}\nseed = {}", s.step_s, s.duration_s, s.seed);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Scenario> {
        parse_scenario(text, Path::new("."))
    }

    fn validation(text: &str) -> (String, String, usize) {
        match parse(text) {
            Err(Error::Validation { section, key, line, .. }) => (section, key, line),
            other => panic!("expected a validation error, got {other:?}"),
        }
    }

    #[test]
    fn bundled_table_i() {
        let sc = parse(bundled::TABLE_I).unwrap();
        let names: Vec<_> = sc.catalog.configs().iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, ["config1", "config2", "config3"]);
        let shape: Vec<_> = sc.catalog.configs().iter().map(|c| (c.bandwidth_mhz, c.gnb_ports, c.n_rb())).collect();
        assert_eq!(shape, [(200, 4, 132), (100, 4, 66), (100, 8, 66)]);
        assert_eq!(sc.tdd, TddPattern::dddsu());
        assert_eq!(sc.ue, UeProfile::default());
        assert_eq!(sc.params, ModelParams::default());
    }

    #[test]
    fn bundled_tiny() {
        let sc = parse(bundled::TINY).unwrap();
        assert_eq!(sc.tdd.pattern_string(), "DU");
        assert_eq!(sc.catalog.configs()[0].n_rb(), 4);
    }

    #[test]
    fn minimal_file_uses_defaults() {
        let sc = parse("[cell.a]\nbandwidth_mhz = 100\nports = 4\n\n[controller]\n").unwrap();
        assert_eq!(sc.controller.hysteresis_margin, 0.1);
        assert_eq!(sc.controller.min_dwell_s, 2.0);
        assert_eq!(sc.params.control_overhead_bps, 300_000_000);
        assert_eq!(sc.sim, SimSettings::default());
    }

    #[test]
    fn unknown_bandwidth_names_key_and_line() {
        let text = "[cell.a]\nports = 4\nbandwidth_mhz = 70\n";
        assert_eq!(validation(text), ("cell.a".into(), "bandwidth_mhz".into(), 3));
    }

    #[test]
    fn override_allows_other_numerologies() {
        let sc = parse("[cell.a]\nbandwidth_mhz = 70\nscs_khz = 30\nports = 2\nrb_count_override = 189\n").unwrap();
        let cell = &sc.catalog.configs()[0];
        assert_eq!((cell.n_rb(), cell.numerology.scs_khz(), cell.bandwidth_mhz), (189, 30, 70));
    }

    #[test]
    fn unknown_keys_and_sections() {
        assert_eq!(validation("[cell.a]\nbandwidth_mhz = 100\nports = 4\ncolour = 1\n").1, "colour");
        assert_eq!(validation("[cell.a]\nbandwidth_mhz = 100\nports = 4\n[extra]\nx = 1\n").0, "extra");
        assert_eq!(validation("[cell.a]\nbandwidth_mhz = 100\nports = 4\n[sim]\nsteps = 3\n").1, "steps");
    }

    #[test]
    fn value_checks() {
        let base = "[cell.a]\nbandwidth_mhz = 100\nports = 4\n";
        assert_eq!(validation(&format!("{base}[traffic]\nack_ratio = 0.5\n")).1, "ack_ratio");
        assert_eq!(validation(&format!("{base}[tdd]\ns_split = \"10,2,3\"\n")).1, "s_split");
        assert_eq!(validation(&format!("{base}[scheduler]\nhorizon_slots = 7\n")).1, "horizon_slots");
        assert_eq!(validation(&format!("{base}[sim]\nstep_s = \"fast\"\n")).1, "step_s");
        assert_eq!(validation(&format!("{base}[fronthaul]\npolicy = \"maybe\"\n")).1, "policy");
        assert_eq!(validation("[cell.a]\nbandwidth_mhz = 100\nports = 4\nqm_dl = 5\n").1, "qm_dl");
        assert_eq!(validation("[cell.a]\nbandwidth_mhz = 100\n").1, "ports");
        assert_eq!(validation("[ue]\nmax_layers_dl = 2\n").0, "cell");
    }

    #[test]
    fn grammar_errors_are_parse_errors() {
        let err = parse("[cell.a]\nbandwidth_mhz = = 100\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err:?}");
        assert_eq!(err.exit_code(), 2);
        assert_eq!(parse("[cell.a]\nbandwidth_mhz = 70\nports = 4\n").unwrap_err().exit_code(), 1);
    }

    #[test]
    fn trace_file_resolves_relative_to_scenario() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("t.csv"), "time_s,capacity_dl_mbps,capacity_ul_mbps\n0,3500,3500\n5,1800,1800\n").unwrap();
        let path = dir.path().join("s.scenario");
        std::fs::write(&path, "[cell.a]\nbandwidth_mhz = 100\nports = 4\n[fronthaul]\ntrace_file = \"t.csv\"\n").unwrap();
        let sc = load_scenario(&path).unwrap();
        assert_eq!(sc.capacity.segments().len(), 2);
        assert_eq!(sc.trace_file.as_deref(), Some(dir.path().join("t.csv").as_path()));
        let again = parse(&dump_scenario(&sc).unwrap()).unwrap();
        assert_eq!(again, sc);

        std::fs::write(&path, "[cell.a]\nbandwidth_mhz = 100\nports = 4\n[fronthaul]\ntrace_file = \"missing.csv\"\n").unwrap();
        assert!(matches!(load_scenario(&path), Err(Error::Validation { .. })));
    }

    #[test]
    fn dump_round_trips_bundled() {
        for text in [bundled::TABLE_I, bundled::TINY] {
            let sc = parse(text).unwrap();
            assert_eq!(parse(&dump_scenario(&sc).unwrap()).unwrap(), sc);
        }
    }
}
