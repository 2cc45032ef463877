use crate::fronthaul::ThrottlePolicy;
use crate::grid::{SchedulingPolicy, SignalingConfig};

/// Calibration knobs shared by the grid, fronthaul and controller models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Antenna-control traffic added to each fronthaul direction.
    pub control_overhead_bps: u64,
    /// Reverse-direction traffic per unit of forward access rate.
    pub ack_ratio: f64,
    pub throttle: ThrottlePolicy,
    pub scheduling: SchedulingPolicy,
    pub signaling: SignalingConfig,
    /// Scheduling horizon; a multiple of the TDD period.
    pub horizon_slots: u32,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            control_overhead_bps: 300_000_000,
            ack_ratio: 0.02,
            throttle: ThrottlePolicy::AllOrNothing,
            scheduling: SchedulingPolicy::Spread,
            signaling: SignalingConfig::default(),
            horizon_slots: 20,
        }
    }
}
