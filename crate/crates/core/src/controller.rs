//! Cell reconfiguration: pick, over time, the most capable configuration of
//! the catalog whose fronthaul requirement fits the available capacity.
//!
//! Downgrades happen at the first step where the current configuration no
//! longer fits. Upgrades need `(1 + hysteresis_margin)` headroom over the
//! new requirement and at least `min_dwell_s` since the last switch.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::phy::{access_capacity, required_fh, CellConfig, Direction, PerDirection, TddPattern, UeProfile};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigCatalog {
    configs: Vec<CellConfig>,
}

impl ConfigCatalog {
    pub fn new(configs: Vec<CellConfig>) -> Result<Self> {
        if configs.is_empty() {
            return Err(Error::OutOfRange {
                what: "catalog",
                detail: "needs at least one cell configuration".into(),
            });
        }
        let mut seen = HashSet::new();
        if let Some(dup) = configs.iter().find(|c| !seen.insert(c.name.as_str())) {
            return Err(Error::OutOfRange {
                what: "catalog",
                detail: format!("duplicate configuration name `{}`", dup.name),
            });
        }
        Ok(Self { configs })
    }

    pub fn configs(&self) -> &[CellConfig] {
        &self.configs
    }

    pub fn get(&self, name: &str) -> Result<&CellConfig> {
        self.configs
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| Error::UnknownCell(name.to_owned()))
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }
}

/// Quantity the controller maximises among feasible configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Objective {
    #[default]
    Dl,
    Ul,
    Sum,
}

impl Objective {
    pub fn as_str(self) -> &'static str {
        match self {
            Objective::Dl => "dl",
            Objective::Ul => "ul",
            Objective::Sum => "sum",
        }
    }

    pub fn score(self, cell: &CellConfig, ue: &UeProfile, tdd: &TddPattern) -> f64 {
        let dl = || access_capacity(cell, ue, Direction::Dl, tdd);
        let ul = || access_capacity(cell, ue, Direction::Ul, tdd);
        match self {
            Objective::Dl => dl(),
            Objective::Ul => ul(),
            Objective::Sum => dl() + ul(),
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Objective {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dl" => Ok(Objective::Dl),
            "ul" => Ok(Objective::Ul),
            "sum" => Ok(Objective::Sum),
            other => Err(format!("unknown objective `{other}` (expected dl, ul or sum)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Selection {
    pub name: String,
    pub feasible: bool,
}

/// Chooses the configuration for `capacity`. When nothing fits, the one with
/// the smallest requirement is returned with `feasible = false`.
pub fn select_config(
    catalog: &ConfigCatalog,
    capacity: PerDirection<u64>,
    ue: &UeProfile,
    tdd: &TddPattern,
    params: &ModelParams,
    objective: Objective,
) -> Selection {
    let required = |c: &CellConfig| required_fh(c, ue, tdd, params.control_overhead_bps);
    let best = catalog
        .configs()
        .iter()
        .filter(|c| required(c).fits_within(&capacity))
        .map(|c| (c, objective.score(c, ue, tdd)))
        .reduce(|best, cand| {
            let better = cand.1 > best.1
                || (cand.1 == best.1
                    && (cand.0.gnb_ports, cand.0.bandwidth_mhz) < (best.0.gnb_ports, best.0.bandwidth_mhz));
            if better {
                cand
            } else {
                best
            }
        });
    match best {
        Some((cell, _)) => Selection {
            name: cell.name.clone(),
            feasible: true,
        },
        None => {
            let cell = catalog
                .configs()
                .iter()
                .min_by_key(|c| {
                    let r = required(c);
                    (r.max(), r.dl + r.ul)
                })
                .expect("catalog is never empty");
            Selection {
                name: cell.name.clone(),
                feasible: false,
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwitchKind {
    Upgrade,
    Downgrade,
}

impl SwitchKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SwitchKind::Upgrade => "upgrade",
            SwitchKind::Downgrade => "downgrade",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconfigEvent {
    pub t: f64,
    pub kind: SwitchKind,
    pub from: String,
    pub to: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControllerState {
    pub current: String,
    pub hysteresis_margin: f64,
    pub min_dwell_s: f64,
    pub last_switch_t: f64,
    pub objective: Objective,
    /// Whether `current` fit the capacity seen at the last step.
    pub feasible: bool,
}

impl ControllerState {
    /// Starts in whatever configuration `select_config` picks at `t`.
    #[allow(clippy::too_many_arguments)]
    pub fn initial(
        t: f64,
        capacity: PerDirection<u64>,
        catalog: &ConfigCatalog,
        ue: &UeProfile,
        tdd: &TddPattern,
        params: &ModelParams,
        hysteresis_margin: f64,
        min_dwell_s: f64,
        objective: Objective,
    ) -> Self {
        let sel = select_config(catalog, capacity, ue, tdd, params, objective);
        Self {
            current: sel.name,
            hysteresis_margin,
            min_dwell_s,
            last_switch_t: t,
            objective,
            feasible: sel.feasible,
        }
    }
}

fn with_margin(required: PerDirection<u64>, margin: f64) -> PerDirection<u64> {
    required.map(|r| (r as f64 * (1.0 + margin)).ceil() as u64)
}

/// Advances the controller to time `t`.
#[allow(clippy::too_many_arguments)]
pub fn step(
    state: &ControllerState,
    t: f64,
    capacity: PerDirection<u64>,
    catalog: &ConfigCatalog,
    ue: &UeProfile,
    tdd: &TddPattern,
    params: &ModelParams,
) -> Result<(ControllerState, Option<ReconfigEvent>)> {
    let current = catalog.get(&state.current)?;
    let current_fits = required_fh(current, ue, tdd, params.control_overhead_bps).fits_within(&capacity);
    let sel = select_config(catalog, capacity, ue, tdd, params, state.objective);
    let mut next = state.clone();
    next.feasible = current_fits;
    if sel.name == state.current {
        return Ok((next, None));
    }

    let kind = if !current_fits {
        SwitchKind::Downgrade
    } else {
        let target = catalog.get(&sel.name)?;
        let needed = with_margin(required_fh(target, ue, tdd, params.control_overhead_bps), state.hysteresis_margin);
        if !needed.fits_within(&capacity) || t - state.last_switch_t < state.min_dwell_s {
            return Ok((next, None));
        }
        SwitchKind::Upgrade
    };
    let event = ReconfigEvent {
        t,
        kind,
        from: state.current.clone(),
        to: sel.name.clone(),
    };
    next.current = sel.name;
    next.last_switch_t = t;
    next.feasible = sel.feasible;
    Ok((next, Some(event)))
}
