//! OFDM occupancy grid over a scheduling horizon.
//!
//! The grid is indexed by (slot, symbol, resource block, layer). A cell of the
//! grid is the allocation quantum: one RB on one layer for one symbol. User
//! data and always-on uplink signaling are tracked separately so the
//! allocation accounting only counts user cells, while the fronthaul
//! transport rule sees both.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::phy::{
    effective_layers, effective_qm, CellConfig, Direction, PerDirection, SlotType, TddPattern,
    SUBCARRIERS_PER_RB, SYMBOLS_PER_SLOT,
};

/// What a symbol position may carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolKind {
    Downlink,
    Uplink,
    /// Switching gap of a special slot.
    Guard,
    /// Special-slot symbols that carry no shared-channel data.
    Reserved,
}

impl SymbolKind {
    pub fn direction(self) -> Option<Direction> {
        match self {
            SymbolKind::Downlink => Some(Direction::Dl),
            SymbolKind::Uplink => Some(Direction::Ul),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SymbolKind::Downlink => "DL",
            SymbolKind::Uplink => "UL",
            SymbolKind::Guard => "GAP",
            SymbolKind::Reserved => "RSV",
        }
    }
}

/// Order in which the scheduler fills free cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SchedulingPolicy {
    /// Fill every RB and layer of a symbol before moving to the next symbol.
    FrequencyFirst,
    /// Within each slot, fill one RB across all symbols before the next RB.
    TimeFirst,
    /// Round-robin over every symbol of the horizon before deepening.
    #[default]
    Spread,
}

impl SchedulingPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            SchedulingPolicy::FrequencyFirst => "frequency_first",
            SchedulingPolicy::TimeFirst => "time_first",
            SchedulingPolicy::Spread => "spread",
        }
    }
}

impl fmt::Display for SchedulingPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchedulingPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "frequency_first" => Ok(SchedulingPolicy::FrequencyFirst),
            "time_first" => Ok(SchedulingPolicy::TimeFirst),
            "spread" => Ok(SchedulingPolicy::Spread),
            other => Err(format!(
                "unknown scheduling policy `{other}` (expected frequency_first, time_first or spread)"
            )),
        }
    }
}

/// Always-on uplink signaling reserved in every uplink slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignalingConfig {
    pub ul_symbols_per_slot: u32,
    pub ul_rbs: u32,
}

impl Default for SignalingConfig {
    fn default() -> Self {
        Self {
            ul_symbols_per_slot: 2,
            ul_rbs: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameGrid {
    horizon_slots: u32,
    slot_types: Vec<SlotType>,
    kinds: Vec<SymbolKind>,
    n_rb: u32,
    n_layers: u32,
    slots_per_second: u64,
    occupancy: Vec<bool>,
    signaling: Vec<bool>,
}

impl FrameGrid {
    pub fn horizon_slots(&self) -> u32 {
        self.horizon_slots
    }

    pub fn slot_type(&self, slot: u32) -> SlotType {
        self.slot_types[slot as usize]
    }

    pub fn n_rb(&self) -> u32 {
        self.n_rb
    }

    pub fn n_layers(&self) -> u32 {
        self.n_layers
    }

    pub fn n_symbols(&self) -> usize {
        self.kinds.len()
    }

    pub fn symbol_kind(&self, slot: u32, symbol: u32) -> SymbolKind {
        self.kinds[self.symbol_index(slot, symbol)]
    }

    /// Horizon length in seconds, as the rational `horizon_slots / slots_per_second`.
    pub fn horizon_seconds(&self) -> f64 {
        f64::from(self.horizon_slots) / self.slots_per_second as f64
    }

    fn symbol_index(&self, slot: u32, symbol: u32) -> usize {
        (slot * SYMBOLS_PER_SLOT + symbol) as usize
    }

    fn cells_per_symbol(&self) -> usize {
        (self.n_rb * self.n_layers) as usize
    }

    fn cell_index(&self, sym: usize, rb: u32, layer: u32) -> usize {
        sym * self.cells_per_symbol() + (layer * self.n_rb + rb) as usize
    }

    fn check_position(&self, slot: u32, symbol: u32, rb: u32, layer: u32) -> Result<usize> {
        if slot >= self.horizon_slots || symbol >= SYMBOLS_PER_SLOT || rb >= self.n_rb || layer >= self.n_layers {
            return Err(Error::OutOfRange {
                what: "grid position",
                detail: format!("(slot {slot}, symbol {symbol}, rb {rb}, layer {layer})"),
            });
        }
        let sym = self.symbol_index(slot, symbol);
        Ok(self.cell_index(sym, rb, layer))
    }

    /// Marks one cell as carrying user data. Guard, reserved and
    /// opposite-direction positions are rejected by `direction`.
    pub fn occupy(&mut self, slot: u32, symbol: u32, rb: u32, layer: u32, direction: Direction) -> Result<()> {
        let idx = self.check_position(slot, symbol, rb, layer)?;
        let kind = self.symbol_kind(slot, symbol);
        if kind.direction() != Some(direction) {
            return Err(Error::OutOfRange {
                what: "grid position",
                detail: format!("symbol {symbol} of slot {slot} is {} and cannot carry {direction} data", kind.as_str()),
            });
        }
        self.occupancy[idx] = true;
        Ok(())
    }

    pub fn clear(&mut self, slot: u32, symbol: u32, rb: u32, layer: u32) -> Result<()> {
        let idx = self.check_position(slot, symbol, rb, layer)?;
        self.occupancy[idx] = false;
        self.signaling[idx] = false;
        Ok(())
    }

    /// Clears every user-data cell, keeping signaling.
    pub fn clear_user_data(&mut self) {
        self.occupancy.iter_mut().for_each(|c| *c = false);
    }

    pub fn is_occupied(&self, slot: u32, symbol: u32, rb: u32, layer: u32) -> bool {
        let idx = self.cell_index(self.symbol_index(slot, symbol), rb, layer);
        self.occupancy[idx] || self.signaling[idx]
    }

    pub fn is_signaling(&self, slot: u32, symbol: u32, rb: u32, layer: u32) -> bool {
        self.signaling[self.cell_index(self.symbol_index(slot, symbol), rb, layer)]
    }

    fn symbol_cells(&self, sym: usize) -> std::ops::Range<usize> {
        let n = self.cells_per_symbol();
        sym * n..(sym + 1) * n
    }

    fn symbol_in_use(&self, sym: usize) -> bool {
        let range = self.symbol_cells(sym);
        self.occupancy[range.clone()].iter().any(|&c| c) || self.signaling[range].iter().any(|&c| c)
    }

    /// RBs with at least one occupied layer in the given symbol.
    pub fn occupied_rbs(&self, slot: u32, symbol: u32) -> u32 {
        (0..self.n_rb)
            .filter(|&rb| (0..self.n_layers).any(|layer| self.is_occupied(slot, symbol, rb, layer)))
            .count() as u32
    }

    /// User-data cells occupied in `direction`.
    pub fn occupied_cells(&self, direction: Direction) -> u64 {
        self.kinds
            .iter()
            .enumerate()
            .filter(|(_, k)| k.direction() == Some(direction))
            .map(|(sym, _)| self.occupancy[self.symbol_cells(sym)].iter().filter(|&&c| c).count() as u64)
            .sum()
    }

    /// Whether the symbol is sent over the fronthaul in its direction.
    pub fn is_transported(&self, slot: u32, symbol: u32) -> bool {
        let sym = self.symbol_index(slot, symbol);
        self.kinds[sym].direction().is_some() && self.symbol_in_use(sym)
    }

    /// Data-capable symbol positions of `direction`, in time order.
    fn legal_symbols(&self, direction: Direction) -> Vec<usize> {
        self.kinds
            .iter()
            .enumerate()
            .filter(|(_, k)| k.direction() == Some(direction))
            .map(|(i, _)| i)
            .collect()
    }
}

pub fn build_grid(cell: &CellConfig, tdd: &TddPattern, horizon_slots: u32) -> Result<FrameGrid> {
    let period = tdd.len();
    if horizon_slots == 0 || !(horizon_slots as usize).is_multiple_of(period) {
        return Err(Error::BadHorizon {
            horizon: horizon_slots,
            period,
        });
    }
    let (s_dl, s_gap, _) = tdd.s_split();
    let slot_types: Vec<SlotType> = tdd.slots().iter().copied().cycle().take(horizon_slots as usize).collect();
    let mut kinds = Vec::with_capacity(horizon_slots as usize * SYMBOLS_PER_SLOT as usize);
    for &slot in &slot_types {
        for symbol in 0..SYMBOLS_PER_SLOT {
            kinds.push(match slot {
                SlotType::Downlink => SymbolKind::Downlink,
                SlotType::Uplink => SymbolKind::Uplink,
                SlotType::Special if symbol >= s_dl && symbol < s_dl + s_gap => SymbolKind::Guard,
                SlotType::Special if !tdd.s_carries_data() => SymbolKind::Reserved,
                SlotType::Special if symbol < s_dl => SymbolKind::Downlink,
                SlotType::Special => SymbolKind::Uplink,
            });
        }
    }
    let n_cells = kinds.len() * (cell.n_rb() * cell.gnb_ports) as usize;
    Ok(FrameGrid {
        horizon_slots,
        slot_types,
        kinds,
        n_rb: cell.n_rb(),
        n_layers: cell.gnb_ports,
        slots_per_second: cell.numerology.slots_per_second(),
        occupancy: vec![false; n_cells],
        signaling: vec![false; n_cells],
    })
}

/// Reserves the last `ul_symbols_per_slot` symbols of every uplink slot over
/// the lowest `ul_rbs` resource blocks of layer 0.
pub fn baseline_signaling(mut grid: FrameGrid, ul_symbols_per_slot: u32, ul_rbs: u32) -> Result<FrameGrid> {
    if ul_symbols_per_slot > SYMBOLS_PER_SLOT {
        return Err(Error::OutOfRange {
            what: "signaling symbols",
            detail: format!("{ul_symbols_per_slot} exceeds {SYMBOLS_PER_SLOT} symbols per slot"),
        });
    }
    if ul_rbs > grid.n_rb {
        return Err(Error::OutOfRange {
            what: "signaling RBs",
            detail: format!("{ul_rbs} exceeds the cell's {} RBs", grid.n_rb),
        });
    }
    if ul_symbols_per_slot == 0 || ul_rbs == 0 {
        return Ok(grid);
    }
    for slot in 0..grid.horizon_slots {
        if grid.slot_type(slot) != SlotType::Uplink {
            continue;
        }
        for symbol in SYMBOLS_PER_SLOT - ul_symbols_per_slot..SYMBOLS_PER_SLOT {
            let sym = grid.symbol_index(slot, symbol);
            for rb in 0..ul_rbs {
                let idx = grid.cell_index(sym, rb, 0);
                grid.signaling[idx] = true;
            }
        }
    }
    Ok(grid)
}

/// Bits carried by the scheduled user data and the cells it used.
#[derive(Debug, Clone, PartialEq)]
pub struct Allocation {
    pub dl_bits_carried: f64,
    pub ul_bits_carried: f64,
    /// Occupied user (rb, symbol, layer) cells per direction.
    pub rb_symbol_usage: PerDirection<u64>,
    pub qm: PerDirection<u32>,
    pub layers: PerDirection<u32>,
}

/// Bits one cell carries: 12 subcarriers at the effective modulation order,
/// after coding and control overhead.
pub fn cell_quantum_bits(cell: &CellConfig, qm: u32) -> f64 {
    f64::from(SUBCARRIERS_PER_RB * qm) * cell.code_rate * (1.0 - cell.overhead)
}

fn cells_needed(bits: f64, quantum: f64) -> u64 {
    if bits <= 0.0 || quantum <= 0.0 {
        return 0;
    }
    let ratio = bits / quantum;
    // Ratios that are integral up to rounding noise must not spill a cell.
    (ratio - ratio * 1e-12).ceil() as u64
}

/// Fills free cells in policy order until each direction carries its
/// demand over the horizon or runs out of cells. Any earlier user data on
/// the grid is discarded first.
pub fn schedule_demand(
    grid: &mut FrameGrid,
    dl_demand_bps: f64,
    ul_demand_bps: f64,
    policy: SchedulingPolicy,
    cell: &CellConfig,
    ue: &crate::phy::UeProfile,
) -> Allocation {
    grid.clear_user_data();
    let horizon = grid.horizon_seconds();
    let mut usage = PerDirection::new(0u64, 0u64);
    let mut qm_used = PerDirection::new(0u32, 0u32);
    let mut layers_used = PerDirection::new(0u32, 0u32);
    for (direction, demand) in [(Direction::Dl, dl_demand_bps), (Direction::Ul, ul_demand_bps)] {
        let qm = effective_qm(cell, ue, direction);
        let layers = effective_layers(cell, ue, direction).min(grid.n_layers);
        let quantum = cell_quantum_bits(cell, qm);
        let wanted = cells_needed(demand.max(0.0) * horizon, quantum);
        let taken = fill(grid, direction, layers, policy, wanted);
        match direction {
            Direction::Dl => {
                usage.dl = taken;
                qm_used.dl = qm;
                layers_used.dl = layers;
            }
            Direction::Ul => {
                usage.ul = taken;
                qm_used.ul = qm;
                layers_used.ul = layers;
            }
        }
    }
    Allocation {
        dl_bits_carried: usage.dl as f64 * cell_quantum_bits(cell, qm_used.dl),
        ul_bits_carried: usage.ul as f64 * cell_quantum_bits(cell, qm_used.ul),
        rb_symbol_usage: usage,
        qm: qm_used,
        layers: layers_used,
    }
}

fn fill(grid: &mut FrameGrid, direction: Direction, layers: u32, policy: SchedulingPolicy, wanted: u64) -> u64 {
    if wanted == 0 || layers == 0 {
        return 0;
    }
    let symbols = grid.legal_symbols(direction);
    // depth index enumerates RBs within a layer, then layers
    let depth = (layers * grid.n_rb) as usize;
    let per_slot = SYMBOLS_PER_SLOT as usize;
    let order: Box<dyn Iterator<Item = (usize, usize)> + '_> = match policy {
        SchedulingPolicy::FrequencyFirst => {
            Box::new(symbols.iter().flat_map(move |&sym| (0..depth).map(move |d| (sym, d))))
        }
        SchedulingPolicy::TimeFirst => Box::new(
            symbols
                .chunk_by(move |a, b| a / per_slot == b / per_slot)
                .flat_map(move |group| (0..depth).flat_map(move |d| group.iter().map(move |&sym| (sym, d)))),
        ),
        SchedulingPolicy::Spread => {
            Box::new((0..depth).flat_map(|d| symbols.iter().map(move |&sym| (sym, d))))
        }
    };
    let per_symbol = grid.cells_per_symbol();
    let mut taken = 0u64;
    for (sym, d) in order {
        let idx = sym * per_symbol + d;
        if !grid.signaling[idx] && !grid.occupancy[idx] {
            grid.occupancy[idx] = true;
            taken += 1;
            if taken >= wanted {
                break;
            }
        }
    }
    taken
}

/// Uplink symbols that must cross the fronthaul: any symbol with at least
/// one occupied cell or signaling RE is sent whole.
pub fn ul_transport_symbols(grid: &FrameGrid) -> u64 {
    grid.kinds
        .iter()
        .enumerate()
        .filter(|(sym, k)| **k == SymbolKind::Uplink && grid.symbol_in_use(*sym))
        .count() as u64
}

/// Fronthaul load implied by a scheduled grid, plus `control_overhead_bps`
/// in each direction.
pub fn fh_load_from_grid(
    grid: &FrameGrid,
    alloc: &Allocation,
    cell: &CellConfig,
    control_overhead_bps: u64,
) -> PerDirection<u64> {
    let per_second = u128::from(grid.slots_per_second);
    let horizon = u128::from(grid.horizon_slots);
    let dl_bits = u128::from(grid.occupied_cells(Direction::Dl))
        * u128::from(SUBCARRIERS_PER_RB)
        * u128::from(alloc.qm.dl);
    let ul_bits = u128::from(ul_transport_symbols(grid))
        * u128::from(cell.n_rb())
        * u128::from(SUBCARRIERS_PER_RB)
        * u128::from(cell.gnb_ports)
        * u128::from(cell.n_iq);
    PerDirection::new(
        crate::phy::div_round(dl_bits * per_second, horizon) + control_overhead_bps,
        crate::phy::div_round(ul_bits * per_second, horizon) + control_overhead_bps,
    )
}

/// Uplink demand generated by acknowledgments of downlink traffic.
pub fn ack_traffic(dl_access_bps: f64, ack_ratio: f64) -> f64 {
    dl_access_bps.max(0.0) * ack_ratio
}
