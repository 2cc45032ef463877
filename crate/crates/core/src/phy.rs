//! Numerology, resource-block tables and the closed-form rate model.
//!
//! The downlink fronthaul under split I_D carries coded data bits, so its
//! rate scales with the modulation order. The uplink under split I_U carries
//! bit-encoded IQ samples of every transported OFDM symbol across the whole
//! band and every antenna port, so its rate scales with the IQ bit width and
//! is independent of how many resource blocks the scheduler actually used.
//!
//! Fronthaul rates are exact integers in bits per second. Access capacity
//! involves the real-valued code rate and control overhead, so it is carried
//! as `f64` bits per second.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// OFDM symbols per slot with normal cyclic prefix.
pub const SYMBOLS_PER_SLOT: u32 = 14;
/// Subcarriers per resource block.
pub const SUBCARRIERS_PER_RB: u32 = 12;

/// Maximum transmission bandwidth configuration for FR2 at 120 kHz
/// (TS 38.104 Table 5.3.2-1): (channel bandwidth MHz, N_RB).
const FR2_120KHZ_RB_TABLE: [(u32, u32); 4] = [(50, 32), (100, 66), (200, 132), (400, 264)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Dl,
    Ul,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::Dl, Direction::Ul];

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Dl => "dl",
            Direction::Ul => "ul",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dl" | "downlink" => Ok(Direction::Dl),
            "ul" | "uplink" => Ok(Direction::Ul),
            other => Err(format!("unknown direction `{other}` (expected dl or ul)")),
        }
    }
}

/// A pair of values, one per transmission direction.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PerDirection<T> {
    pub dl: T,
    pub ul: T,
}

impl<T: Copy> PerDirection<T> {
    pub fn new(dl: T, ul: T) -> Self {
        Self { dl, ul }
    }

    pub fn symmetric(value: T) -> Self {
        Self { dl: value, ul: value }
    }

    pub fn get(&self, direction: Direction) -> T {
        match direction {
            Direction::Dl => self.dl,
            Direction::Ul => self.ul,
        }
    }

    pub fn map<U>(self, mut f: impl FnMut(T) -> U) -> PerDirection<U> {
        PerDirection {
            dl: f(self.dl),
            ul: f(self.ul),
        }
    }
}

impl PerDirection<u64> {
    /// True when both directions of `self` fit within `capacity`.
    pub fn fits_within(&self, capacity: &PerDirection<u64>) -> bool {
        self.dl <= capacity.dl && self.ul <= capacity.ul
    }

    pub fn max(&self) -> u64 {
        self.dl.max(self.ul)
    }
}

/// Subcarrier spacing and the slot timing derived from it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Numerology {
    scs_khz: u32,
    mu: u32,
}

impl Numerology {
    pub fn from_scs_khz(scs_khz: u32) -> Result<Self> {
        let mu = match scs_khz {
            15 => 0,
            30 => 1,
            60 => 2,
            120 => 3,
            other => return Err(Error::UnsupportedScs(other)),
        };
        Ok(Self { scs_khz, mu })
    }

    /// FR2 numerology used by the testbed.
    pub fn fr2() -> Self {
        Self { scs_khz: 120, mu: 3 }
    }

    pub fn scs_khz(&self) -> u32 {
        self.scs_khz
    }

    pub fn symbols_per_slot(&self) -> u32 {
        SYMBOLS_PER_SLOT
    }

    pub fn slots_per_subframe(&self) -> u32 {
        1 << self.mu
    }

    pub fn slots_per_second(&self) -> u64 {
        u64::from(self.slots_per_subframe()) * 1000
    }

    pub fn n_sc_per_rb(&self) -> u32 {
        SUBCARRIERS_PER_RB
    }

    /// OFDM symbols per second, the reciprocal of the symbol duration.
    pub fn symbol_rate(&self) -> u64 {
        u64::from(SYMBOLS_PER_SLOT) * self.slots_per_second()
    }
}

/// Looks up the maximum number of resource blocks for a channel bandwidth.
pub fn rb_count(bandwidth_mhz: u32, numerology: Numerology) -> Result<u32> {
    if numerology.scs_khz() == 120 {
        if let Some(&(_, rbs)) = FR2_120KHZ_RB_TABLE
            .iter()
            .find(|(bw, _)| *bw == bandwidth_mhz)
        {
            return Ok(rbs);
        }
    }
    Err(Error::UnknownBandwidth {
        bandwidth_mhz,
        scs_khz: numerology.scs_khz(),
    })
}

pub fn symbol_rate(numerology: Numerology) -> u64 {
    numerology.symbol_rate()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PayloadKind {
    DataBits,
    IqSamples,
}

/// eCPRI functional split options. Only I_D and I_U have rate models.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitOption {
    ID,
    IID,
    D,
    IU,
    E,
}

impl SplitOption {
    pub fn direction(self) -> Direction {
        match self {
            SplitOption::ID | SplitOption::IID | SplitOption::D => Direction::Dl,
            SplitOption::IU | SplitOption::E => Direction::Ul,
        }
    }

    pub fn payload_kind(self) -> PayloadKind {
        match self {
            SplitOption::ID => PayloadKind::DataBits,
            _ => PayloadKind::IqSamples,
        }
    }

    pub fn has_rate_model(self) -> bool {
        matches!(self, SplitOption::ID | SplitOption::IU)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SplitOption::ID => "I_D",
            SplitOption::IID => "II_D",
            SplitOption::D => "D",
            SplitOption::IU => "I_U",
            SplitOption::E => "E",
        }
    }
}

impl FromStr for SplitOption {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "I_D" => Ok(SplitOption::ID),
            "II_D" => Ok(SplitOption::IID),
            "D" => Ok(SplitOption::D),
            "I_U" => Ok(SplitOption::IU),
            "E" => Ok(SplitOption::E),
            other => Err(format!("unknown split option `{other}`")),
        }
    }
}

fn valid_qm(qm: u32) -> bool {
    matches!(qm, 2 | 4 | 6 | 8)
}

/// One radio access configuration of the cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellConfig {
    pub name: String,
    pub bandwidth_mhz: u32,
    pub numerology: Numerology,
    /// Antenna ports, also the maximum number of MIMO layers at the gNB.
    pub gnb_ports: u32,
    pub qm_dl: u32,
    pub qm_ul: u32,
    /// Bits per IQ sample on the uplink fronthaul.
    pub n_iq: u32,
    pub code_rate: f64,
    pub overhead: f64,
    pub dl_split: SplitOption,
    pub ul_split: SplitOption,
    /// Explicit resource-block count replacing the built-in table.
    pub rb_count_override: Option<u32>,
    n_rb: u32,
}

impl CellConfig {
    pub const DEFAULT_QM: u32 = 6;
    pub const DEFAULT_N_IQ: u32 = 18;
    pub const DEFAULT_CODE_RATE: f64 = 0.77;
    pub const DEFAULT_OVERHEAD: f64 = 0.14;

    /// Builds a configuration with the calibrated defaults, resolving the
    /// resource-block count from the built-in table.
    pub fn new(
        name: impl Into<String>,
        bandwidth_mhz: u32,
        numerology: Numerology,
        gnb_ports: u32,
    ) -> Result<Self> {
        let n_rb = rb_count(bandwidth_mhz, numerology)?;
        Ok(Self {
            name: name.into(),
            bandwidth_mhz,
            numerology,
            gnb_ports,
            qm_dl: Self::DEFAULT_QM,
            qm_ul: Self::DEFAULT_QM,
            n_iq: Self::DEFAULT_N_IQ,
            code_rate: Self::DEFAULT_CODE_RATE,
            overhead: Self::DEFAULT_OVERHEAD,
            dl_split: SplitOption::ID,
            ul_split: SplitOption::IU,
            rb_count_override: None,
            n_rb,
        })
    }

    /// Builds a configuration with an explicit resource-block count, for
    /// bandwidth/numerology pairs outside the built-in table.
    pub fn with_explicit_rb_count(
        name: impl Into<String>,
        bandwidth_mhz: u32,
        numerology: Numerology,
        gnb_ports: u32,
        n_rb: u32,
    ) -> Self {
        Self {
            name: name.into(),
            bandwidth_mhz,
            numerology,
            gnb_ports,
            qm_dl: Self::DEFAULT_QM,
            qm_ul: Self::DEFAULT_QM,
            n_iq: Self::DEFAULT_N_IQ,
            code_rate: Self::DEFAULT_CODE_RATE,
            overhead: Self::DEFAULT_OVERHEAD,
            dl_split: SplitOption::ID,
            ul_split: SplitOption::IU,
            rb_count_override: Some(n_rb),
            n_rb,
        }
    }

    /// Replaces the table lookup with an explicit resource-block count.
    pub fn with_rb_count(mut self, n_rb: u32) -> Self {
        self.rb_count_override = Some(n_rb);
        self.n_rb = n_rb;
        self
    }

    pub fn with_modulation(mut self, qm_dl: u32, qm_ul: u32) -> Self {
        self.qm_dl = qm_dl;
        self.qm_ul = qm_ul;
        self
    }

    pub fn with_iq_bits(mut self, n_iq: u32) -> Self {
        self.n_iq = n_iq;
        self
    }

    pub fn with_coding(mut self, code_rate: f64, overhead: f64) -> Self {
        self.code_rate = code_rate;
        self.overhead = overhead;
        self
    }

    pub fn with_ports(mut self, gnb_ports: u32) -> Self {
        self.gnb_ports = gnb_ports;
        self
    }

    /// Maximum number of resource blocks of the channel.
    pub fn n_rb(&self) -> u32 {
        self.n_rb
    }

    pub fn qm(&self, direction: Direction) -> u32 {
        match direction {
            Direction::Dl => self.qm_dl,
            Direction::Ul => self.qm_ul,
        }
    }

    /// Checks the value constraints. Returns the offending field name and a
    /// message on failure.
    pub fn check(&self) -> std::result::Result<(), (&'static str, String)> {
        if self.gnb_ports == 0 {
            return Err(("ports", "must be at least 1".into()));
        }
        if !valid_qm(self.qm_dl) {
            return Err(("qm_dl", format!("{} is not one of 2, 4, 6, 8", self.qm_dl)));
        }
        if !valid_qm(self.qm_ul) {
            return Err(("qm_ul", format!("{} is not one of 2, 4, 6, 8", self.qm_ul)));
        }
        if self.n_iq < self.qm_ul {
            return Err((
                "n_iq",
                format!("{} is smaller than qm_ul = {}", self.n_iq, self.qm_ul),
            ));
        }
        if !(self.code_rate > 0.0 && self.code_rate <= 1.0) {
            return Err(("code_rate", format!("{} is not in (0, 1]", self.code_rate)));
        }
        if !(0.0..1.0).contains(&self.overhead) {
            return Err(("overhead", format!("{} is not in [0, 1)", self.overhead)));
        }
        if self.n_rb == 0 {
            return Err(("rb_count_override", "must be at least 1".into()));
        }
        for (key, split, dir) in [
            ("dl_split", self.dl_split, Direction::Dl),
            ("ul_split", self.ul_split, Direction::Ul),
        ] {
            if split.direction() != dir {
                return Err((key, format!("{} is not a {dir} split", split.as_str())));
            }
            if !split.has_rate_model() {
                return Err((key, format!("{} has no rate model", split.as_str())));
            }
        }
        Ok(())
    }
}

/// Capabilities of the aggregate user equipment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UeProfile {
    pub max_layers_dl: u32,
    pub max_layers_ul: u32,
    pub max_qm_dl: u32,
    pub max_qm_ul: u32,
}

impl Default for UeProfile {
    /// 2T-2R CPE with 64-QAM in both directions.
    fn default() -> Self {
        Self {
            max_layers_dl: 2,
            max_layers_ul: 2,
            max_qm_dl: 6,
            max_qm_ul: 6,
        }
    }
}

impl UeProfile {
    pub fn max_layers(&self, direction: Direction) -> u32 {
        match direction {
            Direction::Dl => self.max_layers_dl,
            Direction::Ul => self.max_layers_ul,
        }
    }

    pub fn max_qm(&self, direction: Direction) -> u32 {
        match direction {
            Direction::Dl => self.max_qm_dl,
            Direction::Ul => self.max_qm_ul,
        }
    }

    pub fn check(&self) -> std::result::Result<(), (&'static str, String)> {
        if self.max_layers_dl == 0 {
            return Err(("max_layers_dl", "must be at least 1".into()));
        }
        if self.max_layers_ul == 0 {
            return Err(("max_layers_ul", "must be at least 1".into()));
        }
        if !valid_qm(self.max_qm_dl) {
            return Err(("max_qm_dl", format!("{} is not one of 2, 4, 6, 8", self.max_qm_dl)));
        }
        if !valid_qm(self.max_qm_ul) {
            return Err(("max_qm_ul", format!("{} is not one of 2, 4, 6, 8", self.max_qm_ul)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotType {
    Downlink,
    Special,
    Uplink,
}

impl SlotType {
    pub fn as_char(self) -> char {
        match self {
            SlotType::Downlink => 'D',
            SlotType::Special => 'S',
            SlotType::Uplink => 'U',
        }
    }
}

/// A ratio of symbol counts, kept exact so rate products stay integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Duty {
    pub symbols: u64,
    pub period_symbols: u64,
}

impl Duty {
    pub const FULL: Duty = Duty {
        symbols: 1,
        period_symbols: 1,
    };

    pub fn as_f64(&self) -> f64 {
        self.symbols as f64 / self.period_symbols as f64
    }
}

/// Periodic TDD slot pattern, e.g. `DDDSU`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TddPattern {
    slots: Vec<SlotType>,
    /// Symbols of the special slot: (downlink, guard, uplink).
    s_split: (u32, u32, u32),
    s_carries_data: bool,
}

impl TddPattern {
    pub fn new(slots: Vec<SlotType>, s_split: (u32, u32, u32), s_carries_data: bool) -> Result<Self> {
        if slots.is_empty() {
            return Err(Error::OutOfRange {
                what: "tdd pattern",
                detail: "needs at least one slot".into(),
            });
        }
        let (d, g, u) = s_split;
        if d + g + u != SYMBOLS_PER_SLOT {
            return Err(Error::OutOfRange {
                what: "special slot split",
                detail: format!("{d}+{g}+{u} does not sum to {SYMBOLS_PER_SLOT}"),
            });
        }
        Ok(Self {
            slots,
            s_split,
            s_carries_data,
        })
    }

    /// The testbed frame: DDDSU with a 10:2:2 special slot that carries no
    /// shared-channel data.
    pub fn dddsu() -> Self {
        Self::new(
            "DDDSU".parse::<SlotPattern>().unwrap().0,
            (10, 2, 2),
            false,
        )
        .unwrap()
    }

    pub fn slots(&self) -> &[SlotType] {
        &self.slots
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn s_split(&self) -> (u32, u32, u32) {
        self.s_split
    }

    pub fn s_carries_data(&self) -> bool {
        self.s_carries_data
    }

    pub fn pattern_string(&self) -> String {
        self.slots.iter().map(|s| s.as_char()).collect()
    }

    fn count(&self, kind: SlotType) -> u64 {
        self.slots.iter().filter(|&&s| s == kind).count() as u64
    }

    /// Fraction of the period's symbols usable for data in `direction`.
    pub fn duty(&self, direction: Direction) -> Duty {
        let per_slot = u64::from(SYMBOLS_PER_SLOT);
        let (full, s_part) = match direction {
            Direction::Dl => (SlotType::Downlink, self.s_split.0),
            Direction::Ul => (SlotType::Uplink, self.s_split.2),
        };
        let s_symbols = if self.s_carries_data {
            self.count(SlotType::Special) * u64::from(s_part)
        } else {
            0
        };
        Duty {
            symbols: self.count(full) * per_slot + s_symbols,
            period_symbols: self.slots.len() as u64 * per_slot,
        }
    }

    /// Fraction of symbols that carry no data in either direction.
    pub fn idle_fraction(&self) -> f64 {
        let dl = self.duty(Direction::Dl);
        let ul = self.duty(Direction::Ul);
        (dl.period_symbols - dl.symbols - ul.symbols) as f64 / dl.period_symbols as f64
    }
}

/// Parsed `D`/`S`/`U` slot string.
pub struct SlotPattern(pub Vec<SlotType>);

impl FromStr for SlotPattern {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c.to_ascii_uppercase() {
                'D' => Ok(SlotType::Downlink),
                'S' => Ok(SlotType::Special),
                'U' => Ok(SlotType::Uplink),
                other => Err(format!("unknown slot type `{other}`")),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(SlotPattern)
    }
}

pub fn duty(tdd: &TddPattern, direction: Direction) -> Duty {
    tdd.duty(direction)
}

pub fn effective_layers(cell: &CellConfig, ue: &UeProfile, direction: Direction) -> u32 {
    cell.gnb_ports.min(ue.max_layers(direction))
}

pub fn effective_qm(cell: &CellConfig, ue: &UeProfile, direction: Direction) -> u32 {
    cell.qm(direction).min(ue.max_qm(direction))
}

/// `n / d` rounded half up, on u128 to keep the products exact.
pub(crate) fn div_round(n: u128, d: u128) -> u64 {
    ((n + d / 2) / d) as u64
}

fn data_bit_rate(n_rb: u32, layers: u32, qm: u32, numerology: Numerology, duty: Duty) -> u64 {
    let n = u128::from(n_rb)
        * u128::from(SUBCARRIERS_PER_RB)
        * u128::from(layers)
        * u128::from(qm)
        * u128::from(numerology.symbol_rate())
        * u128::from(duty.symbols);
    div_round(n, u128::from(duty.period_symbols))
}

/// Downlink fronthaul rate under split I_D for `rb_used` resource blocks on
/// `layers` layers, scaled by the downlink duty cycle.
pub fn fh_rate_dl(cell: &CellConfig, layers: u32, rb_used: u32, duty_dl: Duty) -> Result<u64> {
    if rb_used > cell.n_rb() {
        return Err(Error::RbOverflow {
            used: rb_used,
            available: cell.n_rb(),
        });
    }
    if layers > cell.gnb_ports {
        return Err(Error::LayerOverflow {
            used: layers,
            available: cell.gnb_ports,
        });
    }
    Ok(data_bit_rate(rb_used, layers, cell.qm_dl, cell.numerology, duty_dl))
}

/// Uplink fronthaul rate under split I_U.
///
/// Every transported symbol is sent across the full band on every antenna
/// port, so the cell's total RB count and port count enter here rather than
/// the user allocation. `occupied_symbol_fraction` is the share of uplink
/// symbols that carry anything at all.
pub fn fh_rate_ul(cell: &CellConfig, occupied_symbol_fraction: f64, duty_ul: Duty) -> u64 {
    let fraction = occupied_symbol_fraction.clamp(0.0, 1.0);
    let full = data_bit_rate(cell.n_rb(), cell.gnb_ports, cell.n_iq, cell.numerology, duty_ul);
    if fraction == 1.0 {
        full
    } else {
        (full as f64 * fraction).round() as u64
    }
}

/// Radio access capacity in bits per second.
pub fn access_capacity(cell: &CellConfig, ue: &UeProfile, direction: Direction, tdd: &TddPattern) -> f64 {
    let duty = tdd.duty(direction);
    let exact = u128::from(cell.n_rb())
        * u128::from(SUBCARRIERS_PER_RB)
        * u128::from(effective_layers(cell, ue, direction))
        * u128::from(effective_qm(cell, ue, direction))
        * u128::from(cell.numerology.symbol_rate())
        * u128::from(duty.symbols);
    exact as f64 / duty.period_symbols as f64 * cell.code_rate * (1.0 - cell.overhead)
}

/// Fronthaul capacity a configuration needs at full allocation, including
/// the constant antenna-control traffic.
pub fn required_fh(cell: &CellConfig, ue: &UeProfile, tdd: &TddPattern, control_overhead_bps: u64) -> PerDirection<u64> {
    let dl = data_bit_rate(
        cell.n_rb(),
        effective_layers(cell, ue, Direction::Dl),
        effective_qm(cell, ue, Direction::Dl),
        cell.numerology,
        tdd.duty(Direction::Dl),
    );
    let ul = fh_rate_ul(cell, 1.0, tdd.duty(Direction::Ul));
    PerDirection::new(dl + control_overhead_bps, ul + control_overhead_bps)
}

/// Converts bits per second to Mbps with one decimal, the external unit.
pub fn fmt_mbps(bps: f64) -> String {
    format!("{:.1}", bps / 1e6)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fr2_cell(name: &str, bw: u32, ports: u32) -> CellConfig {
        CellConfig::new(name, bw, Numerology::fr2(), ports).unwrap()
    }

    fn mbps(bps: u64) -> String {
        fmt_mbps(bps as f64)
    }

    #[test]
    fn rb_table_fr2() {
        let n = Numerology::fr2();
        assert_eq!(rb_count(100, n).unwrap(), 66);
        assert_eq!(rb_count(200, n).unwrap(), 132);
        assert_eq!(rb_count(50, n).unwrap(), 32);
        assert_eq!(rb_count(400, n).unwrap(), 264);
        assert!(matches!(rb_count(70, n), Err(Error::UnknownBandwidth { .. })));
        let fr1 = Numerology::from_scs_khz(30).unwrap();
        assert!(matches!(rb_count(100, fr1), Err(Error::UnknownBandwidth { .. })));
    }

    #[test]
    fn symbol_rates() {
        let fr2 = Numerology::fr2();
        let fr1 = Numerology::from_scs_khz(15).unwrap();
        assert_eq!(symbol_rate(fr2), 112_000);
        assert_eq!(symbol_rate(fr1), 14_000);
        assert_eq!(symbol_rate(fr2) / symbol_rate(fr1), 8);
        assert!(Numerology::from_scs_khz(240).is_err());
    }

    #[test]
    fn duty_cycles() {
        let tdd = TddPattern::dddsu();
        assert_eq!(tdd.duty(Direction::Dl), Duty { symbols: 42, period_symbols: 70 });
        assert_eq!(tdd.duty(Direction::Ul), Duty { symbols: 14, period_symbols: 70 });

        let with_data = TddPattern::new(tdd.slots().to_vec(), (10, 2, 2), true).unwrap();
        assert_eq!(with_data.duty(Direction::Dl).symbols, 52);
        assert!((with_data.duty(Direction::Dl).as_f64() - 0.742857).abs() < 1e-6);

        let all_d = TddPattern::new(vec![SlotType::Downlink; 4], (10, 2, 2), false).unwrap();
        assert_eq!(all_d.duty(Direction::Dl).as_f64(), 1.0);
        assert_eq!(all_d.duty(Direction::Ul).as_f64(), 0.0);
    }

    #[test]
    fn bad_tdd_rejected() {
        assert!(TddPattern::new(vec![], (10, 2, 2), false).is_err());
        assert!(TddPattern::new(vec![SlotType::Special], (10, 2, 3), false).is_err());
        assert!("DDXU".parse::<SlotPattern>().is_err());
    }

    #[test]
    fn layers_limited_by_ue() {
        let ue = UeProfile::default();
        assert_eq!(effective_layers(&fr2_cell("a", 100, 8), &ue, Direction::Dl), 2);
        let wide_ue = UeProfile { max_layers_dl: 4, ..ue };
        assert_eq!(effective_layers(&fr2_cell("b", 100, 4), &wide_ue, Direction::Dl), 4);
        assert_eq!(effective_layers(&fr2_cell("c", 100, 1), &ue, Direction::Ul), 1);
    }

    #[test]
    fn dl_fronthaul_rate() {
        let cell = fr2_cell("config1", 200, 4);
        let duty = TddPattern::dddsu().duty(Direction::Dl);
        let full = fh_rate_dl(&cell, 2, 132, duty).unwrap();
        assert_eq!(full, 1_277_337_600);
        assert_eq!(mbps(full), "1277.3");
        assert_eq!(fh_rate_dl(&cell, 2, 0, duty).unwrap(), 0);
        assert_eq!(fh_rate_dl(&cell, 2, 66, duty).unwrap() * 2, full);
        assert!(matches!(fh_rate_dl(&cell, 2, 133, duty), Err(Error::RbOverflow { .. })));
        assert!(matches!(fh_rate_dl(&cell, 5, 10, duty), Err(Error::LayerOverflow { .. })));
    }

    #[test]
    fn ul_fronthaul_rate() {
        let duty = TddPattern::dddsu().duty(Direction::Ul);
        let c1 = fr2_cell("config1", 200, 4);
        let c2 = fr2_cell("config2", 100, 4);
        let c3 = fr2_cell("config3", 100, 8);
        assert_eq!(fh_rate_ul(&c3, 1.0, duty), 2_554_675_200);
        assert_eq!(mbps(fh_rate_ul(&c2, 1.0, duty)), "1277.3");
        assert_eq!(fh_rate_ul(&c1, 1.0, duty), fh_rate_ul(&c3, 1.0, duty));
        assert_eq!(fh_rate_ul(&c3, 0.0, duty), 0);
    }

    #[test]
    fn access_capacities() {
        let tdd = TddPattern::dddsu();
        let ue = UeProfile::default();
        let c1 = fr2_cell("config1", 200, 4);
        let c2 = fr2_cell("config2", 100, 4);
        let dl1 = access_capacity(&c1, &ue, Direction::Dl, &tdd);
        let dl2 = access_capacity(&c2, &ue, Direction::Dl, &tdd);
        assert_eq!(fmt_mbps(dl1), "845.9");
        assert_eq!(fmt_mbps(dl2), "422.9");
        assert_eq!(dl1, 2.0 * dl2);

        let saturated = c1.clone().with_coding(0.77, 1.0);
        assert_eq!(access_capacity(&saturated, &ue, Direction::Dl, &tdd), 0.0);
    }

    #[test]
    fn required_rates() {
        let tdd = TddPattern::dddsu();
        let ue = UeProfile::default();
        let ctrl = 300_000_000;
        let r1 = required_fh(&fr2_cell("config1", 200, 4), &ue, &tdd, ctrl);
        assert_eq!((mbps(r1.dl), mbps(r1.ul)), ("1577.3".into(), "2854.7".into()));
        let r2 = required_fh(&fr2_cell("config2", 100, 4), &ue, &tdd, ctrl);
        assert_eq!(r2.dl, 938_668_800);
        assert_eq!(mbps(r2.ul), "1577.3");

        let empty = fr2_cell("empty", 100, 4).with_rb_count(0);
        assert_eq!(required_fh(&empty, &ue, &tdd, 0), PerDirection::new(0, 0));
    }

    #[test]
    fn split_payloads() {
        assert_eq!(SplitOption::ID.payload_kind(), PayloadKind::DataBits);
        assert_eq!(SplitOption::IU.payload_kind(), PayloadKind::IqSamples);
        assert_eq!(SplitOption::E.direction(), Direction::Ul);
        assert_eq!("II_D".parse::<SplitOption>().unwrap(), SplitOption::IID);
    }

    #[test]
    fn cell_checks() {
        let cell = fr2_cell("x", 100, 4);
        assert!(cell.check().is_ok());
        assert_eq!(cell.clone().with_ports(0).check().unwrap_err().0, "ports");
        assert_eq!(cell.clone().with_modulation(5, 6).check().unwrap_err().0, "qm_dl");
        assert_eq!(cell.clone().with_iq_bits(4).check().unwrap_err().0, "n_iq");
        assert_eq!(cell.clone().with_coding(0.0, 0.1).check().unwrap_err().0, "code_rate");
        let mut split = cell.clone();
        split.dl_split = SplitOption::IID;
        assert_eq!(split.check().unwrap_err().0, "dl_split");
    }
}
