//! Class-B beacon and ping-slot arithmetic.
//!
//! Beacons tick every 128 s on the GPS time grid. The window between two
//! beacons is divided into 4096 slots of 30 ms; a device (or multicast
//! group) with ping periodicity `p` is assigned `2^(7-p)` of them, spaced
//! `2^(5+p)` slots apart from a per-window random offset.

use super::engine::{secs_to_us, SimTime};

pub const BEACON_PERIOD_US: SimTime = 128_000_000;
pub const PING_SLOT_US: SimTime = 30_000;
pub const SLOTS_PER_BEACON_WINDOW: u64 = 4096;

/// PHY payload length of a beacon frame.
pub const BEACON_PHY_BYTES: usize = 17;

/// First part of a beacon window reserved for the beacon itself.
pub const BEACON_RESERVED_S: f64 = 2.120;
/// Tail of a beacon window guarded before the next beacon.
pub const BEACON_GUARD_S: f64 = 3.000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassBSchedule {
    pub ping_periodicity: u8,
}

impl ClassBSchedule {
    pub fn new(ping_periodicity: u8) -> Self {
        assert!(ping_periodicity <= 7, "ping periodicity must be 0..=7");
        ClassBSchedule { ping_periodicity }
    }

    /// Assigned ping slots per beacon window: 2^(7-p).
    pub fn slots_per_window(&self) -> u64 {
        1 << (7 - self.ping_periodicity)
    }

    /// Ping period in slots: 2^(5+p) (0.96 s * 2^p at 30 ms slots).
    pub fn ping_period_slots(&self) -> u64 {
        1 << (5 + self.ping_periodicity)
    }

    pub fn ping_period_us(&self) -> SimTime {
        self.ping_period_slots() * PING_SLOT_US
    }

    /// Upper bound (inclusive) for the per-window random slot offset.
    pub fn max_ping_offset(&self) -> u64 {
        self.ping_period_slots() - 1
    }
}

/// Slot open times for one beacon window:
/// `beacon_time + (offset + k * 2^(5+p)) * 30 ms` for `k = 0..2^(7-p)`.
pub fn ping_slot_times(schedule: &ClassBSchedule, beacon_time: SimTime, ping_offset: u64) -> Vec<SimTime> {
    debug_assert!(ping_offset <= schedule.max_ping_offset());
    (0..schedule.slots_per_window())
        .map(|k| beacon_time + (ping_offset + k * schedule.ping_period_slots()) * PING_SLOT_US)
        .collect()
}

/// Deterministic per-window ping offset: a hash of (seed, window index)
/// reduced to the valid offset range, so any component can recompute the
/// grid without shared state.
pub fn ping_offset_for_window(seed: u64, window: u64, schedule: &ClassBSchedule) -> u64 {
    splitmix64(seed ^ window.wrapping_mul(0x9e37_79b9_7f4a_7c15)) % schedule.ping_period_slots()
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Regions of a beacon window usable for scheduled downlinks, honoring the
/// beacon reserved head and the guard tail.
pub fn usable_window(beacon_time: SimTime) -> (SimTime, SimTime) {
    (
        beacon_time + secs_to_us(BEACON_RESERVED_S),
        beacon_time + BEACON_PERIOD_US - secs_to_us(BEACON_GUARD_S),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slot_counts_per_periodicity() {
        assert_eq!(ClassBSchedule::new(7).slots_per_window(), 1);
        assert_eq!(ClassBSchedule::new(0).slots_per_window(), 128);
        assert_eq!(ClassBSchedule::new(0).ping_period_us(), 960_000);
        assert_eq!(ClassBSchedule::new(5).ping_period_us(), 30_720_000);
    }

    #[test]
    fn slot_times_match_formula() {
        let s = ClassBSchedule::new(0);
        let slots = ping_slot_times(&s, 0, 0);
        assert_eq!(slots.len(), 128);
        assert_eq!(slots[1] - slots[0], 960_000);
        assert!(*slots.last().unwrap() < BEACON_PERIOD_US);

        // Maximum offset at p=0 puts the first slot 31 * 30 ms in.
        assert_eq!(s.max_ping_offset(), 31);
        let shifted = ping_slot_times(&s, 0, 31);
        assert_eq!(shifted[0], 930_000);

        let p7 = ClassBSchedule::new(7);
        let one = ping_slot_times(&p7, BEACON_PERIOD_US, 100);
        assert_eq!(one.len(), 1);
        assert_eq!(one[0], BEACON_PERIOD_US + 100 * PING_SLOT_US);
    }

    #[test]
    fn all_slots_fit_inside_the_window() {
        for p in 0..=7 {
            let s = ClassBSchedule::new(p);
            let slots = ping_slot_times(&s, 0, s.max_ping_offset());
            assert_eq!(slots.len() as u64, s.slots_per_window());
            assert!(slots.iter().all(|&t| t < BEACON_PERIOD_US));
        }
    }

    #[test]
    fn window_offsets_are_deterministic_and_in_range() {
        let s = ClassBSchedule::new(3);
        for w in 0..1000 {
            let o = ping_offset_for_window(42, w, &s);
            assert_eq!(o, ping_offset_for_window(42, w, &s));
            assert!(o <= s.max_ping_offset());
        }
        // Different windows spread across the range.
        let distinct: std::collections::HashSet<u64> =
            (0..200).map(|w| ping_offset_for_window(42, w, &s)).collect();
        assert!(distinct.len() > 20);
    }
}
