//! Per-channel duty-cycle bookkeeping.
//!
//! After a transmission of `airtime` ending at `t_end` on a channel with
//! duty cycle `d`, the transmitter stays silent on that channel until
//! `t_end + airtime * (1/d - 1)`; a 1 s transmission on a 1% channel buys
//! 99 s of silence.

use super::engine::SimTime;

#[derive(Debug, Clone)]
pub struct DutyCycleTracker {
    next_allowed: Vec<SimTime>,
}

impl DutyCycleTracker {
    pub fn new(num_channels: usize) -> Self {
        DutyCycleTracker {
            next_allowed: vec![0; num_channels],
        }
    }

    /// Earliest instant at or after `now` at which a transmission on
    /// `channel` may start.
    pub fn transmit_at(&self, channel: usize, now: SimTime) -> SimTime {
        now.max(self.next_allowed[channel])
    }

    pub fn is_free(&self, channel: usize, at: SimTime) -> bool {
        self.next_allowed[channel] <= at
    }

    pub fn next_allowed(&self, channel: usize) -> SimTime {
        self.next_allowed[channel]
    }

    /// Record a transmission starting at `start` lasting `airtime_us` on a
    /// channel with the given duty cycle.
    pub fn record(&mut self, channel: usize, start: SimTime, airtime_us: u64, duty_cycle: f64) {
        let end = start + airtime_us;
        let off = (airtime_us as f64 * (1.0 / duty_cycle - 1.0)).round() as u64;
        self.next_allowed[channel] = self.next_allowed[channel].max(end + off);
    }
}
