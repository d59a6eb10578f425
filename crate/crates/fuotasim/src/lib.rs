//! Discrete-event simulator for firmware updates over LoRaWAN.
//!
//! The crate models the class A/B/C MAC timing rules, per-channel duty-cycle
//! budgets, the multicast / fragmentation / clock-synchronization
//! application-layer protocols, an XOR forward-error-correction fragment
//! codec, and the two-phase update routine (session setup over class-A
//! unicast, then multicast fragment distribution), together with a CLI for
//! parameter sweeps.
//!
//! Crate layout:
//! - [`radio`] — time-on-air, path loss, link budgets, reception and capture
//! - [`protocol`] — command codecs and device/server session state machines
//! - [`fec`] — fragmentation and XOR redundancy coding
//! - [`simkernel`] — event engine, device/gateway/server actors, both phases
//! - [`metrics`] — per-phase reports and cross-seed aggregation
//! - [`config`] — scenario files, defaults and validation
//! - [`sweep`] — Cartesian parameter sweeps with parallel execution

pub mod config;
pub mod fec;
pub mod metrics;
pub mod protocol;
pub mod radio;
pub mod simkernel;
pub mod sweep;
