//! Deterministic event queue: events dispatch in (time, sequence) order,
//! with the sequence counter breaking ties in insertion order.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

/// Simulated time in integer microseconds.
pub type SimTime = u64;

pub const US_PER_SEC: u64 = 1_000_000;

pub fn secs_to_us(s: f64) -> SimTime {
    (s * 1e6).round() as SimTime
}

pub fn us_to_secs(us: SimTime) -> f64 {
    us as f64 / 1e6
}

#[derive(Debug)]
struct Scheduled<K> {
    time: SimTime,
    seq: u64,
    kind: K,
}

impl<K> PartialEq for Scheduled<K> {
    fn eq(&self, other: &Self) -> bool {
        self.time == other.time && self.seq == other.seq
    }
}
impl<K> Eq for Scheduled<K> {}
impl<K> PartialOrd for Scheduled<K> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl<K> Ord for Scheduled<K> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.time, self.seq).cmp(&(other.time, other.seq))
    }
}

/// Priority queue of simulation events.
#[derive(Debug)]
pub struct EventQueue<K> {
    heap: BinaryHeap<Reverse<Scheduled<K>>>,
    seq: u64,
}

impl<K> Default for EventQueue<K> {
    fn default() -> Self {
        EventQueue {
            heap: BinaryHeap::new(),
            seq: 0,
        }
    }
}

impl<K> EventQueue<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, time: SimTime, kind: K) {
        let seq = self.seq;
        self.seq += 1;
        self.heap.push(Reverse(Scheduled { time, seq, kind }));
    }

    pub fn pop(&mut self) -> Option<(SimTime, K)> {
        self.heap.pop().map(|Reverse(s)| (s.time, s.kind))
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }
}
