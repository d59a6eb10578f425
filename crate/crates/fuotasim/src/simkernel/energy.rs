//! Per-device radio-state time ledger and energy arithmetic.

/// Power draw per radio state, in milliwatts, plus the battery budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerModel {
    pub tx_mw: f64,
    pub rx_mw: f64,
    pub idle_mw: f64,
    pub battery_j: f64,
}

impl Default for PowerModel {
    fn default() -> Self {
        PowerModel {
            tx_mw: 132.0,
            rx_mw: 48.0,
            idle_mw: 0.018,
            battery_j: 11_100.0,
        }
    }
}

/// Cumulative seconds spent in each active radio state. Idle time is the
/// remainder of any observation window and is derived, never accumulated,
/// so state times always sum to the elapsed lifetime.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RadioTimes {
    pub tx_s: f64,
    /// Empty class-A receive windows (preamble listen).
    pub rx_window_s: f64,
    /// Downlink or fragment payload reception.
    pub rx_payload_s: f64,
    /// Continuous class-C session receive.
    pub rx_session_s: f64,
    /// Class-B beacon reception.
    pub rx_beacon_s: f64,
    /// Class-B empty ping-slot checks.
    pub rx_empty_slot_s: f64,
}

impl RadioTimes {
    pub fn rx_total_s(&self) -> f64 {
        self.rx_window_s + self.rx_payload_s + self.rx_session_s + self.rx_beacon_s + self.rx_empty_slot_s
    }

    pub fn active_s(&self) -> f64 {
        self.tx_s + self.rx_total_s()
    }

    pub fn delta(&self, earlier: &RadioTimes) -> RadioTimes {
        RadioTimes {
            tx_s: self.tx_s - earlier.tx_s,
            rx_window_s: self.rx_window_s - earlier.rx_window_s,
            rx_payload_s: self.rx_payload_s - earlier.rx_payload_s,
            rx_session_s: self.rx_session_s - earlier.rx_session_s,
            rx_beacon_s: self.rx_beacon_s - earlier.rx_beacon_s,
            rx_empty_slot_s: self.rx_empty_slot_s - earlier.rx_empty_slot_s,
        }
    }
}

/// Energy spent over an observation window, split by radio state.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EnergyBreakdown {
    pub tx_j: f64,
    pub rx_j: f64,
    pub idle_j: f64,
    /// Class-B listening overhead: beacons plus empty ping slots plus idle.
    /// This is the component that varies with the ping periodicity; payload
    /// reception is common to every periodicity.
    pub overhead_j: f64,
}

impl EnergyBreakdown {
    pub fn total_j(&self) -> f64 {
        self.tx_j + self.rx_j + self.idle_j
    }
}

/// Energy over a window of `span_s` seconds in which the active-state deltas
/// were `times`. The idle remainder is the span minus all active time.
pub fn energy_over(times: &RadioTimes, span_s: f64, power: &PowerModel) -> EnergyBreakdown {
    let idle_s = (span_s - times.active_s()).max(0.0);
    let mw_to_j = |mw: f64, s: f64| mw * s / 1000.0;
    EnergyBreakdown {
        tx_j: mw_to_j(power.tx_mw, times.tx_s),
        rx_j: mw_to_j(power.rx_mw, times.rx_total_s()),
        idle_j: mw_to_j(power.idle_mw, idle_s),
        overhead_j: mw_to_j(power.rx_mw, times.rx_beacon_s + times.rx_empty_slot_s)
            + mw_to_j(power.idle_mw, idle_s),
    }
}
