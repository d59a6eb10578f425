//! Application-layer command codecs and session state machines for the
//! multicast (port 200), fragmentation (port 201) and clock-synchronization
//! (port 202) protocols.
//!
//! Wire format, bit-exact:
//!
//! | Port | Command               | CID  | Payload after CID                                         |
//! |------|-----------------------|------|-----------------------------------------------------------|
//! | 200  | McGroupSetupReq       | 0x02 | group_id(1) addr(4 LE) key(16)                            |
//! | 200  | McGroupSetupAns       | 0x02 | status(1): bits0-1 group, bit2 error                      |
//! | 200  | McClassCSessionReq    | 0x04 | group_id(1) time(4 LE) timeout(4 LE) dr(1) freq(3 LE)     |
//! | 200  | McClassCSessionAns    | 0x04 | status(1)                                                 |
//! | 200  | McClassBSessionReq    | 0x05 | group_id(1) time(4 LE) timeout(4 LE) periodicity(1) dr(1) freq(3 LE) |
//! | 200  | McClassBSessionAns    | 0x05 | status(1)                                                 |
//! | 201  | FragSessionSetupReq   | 0x02 | ctrl(1): bits4-5 id, bits0-3 group mask; nb_frag(2 LE) frag_size(1) frag_algo(1) padding(1) |
//! | 201  | FragSessionSetupAns   | 0x02 | status(1): bits4-5 id, bit0 unsupported algo, bit1 error  |
//! | 202  | AppTimeReq            | 0x01 | device_time(4 LE) token(1)                                |
//! | 202  | AppTimeAns            | 0x01 | time_correction(4 LE, signed) token(1)                    |
//!
//! Requests and answers share CIDs and are told apart by link direction.
//! All times are seconds since the GPS epoch modulo 2^32; frequencies are
//! encoded in units of 100 Hz.

use crate::fec::{Decoder, FragmentPlan};
use thiserror::Error;

pub const MULTICAST_PORT: u8 = 200;
pub const FRAGMENTATION_PORT: u8 = 201;
pub const CLOCK_SYNC_PORT: u8 = 202;

const CID_MC_GROUP_SETUP: u8 = 0x02;
const CID_MC_CLASS_C_SESSION: u8 = 0x04;
const CID_MC_CLASS_B_SESSION: u8 = 0x05;
const CID_FRAG_SESSION_SETUP: u8 = 0x02;
const CID_APP_TIME: u8 = 0x01;

/// Only fragmentation algorithm defined by the session setup.
pub const FRAG_ALGO_XOR: u8 = 0;

pub const MAX_MULTICAST_GROUPS: usize = 4;

// ============================================================================
// Errors
// ============================================================================

#[derive(Debug, Error, PartialEq)]
pub enum ProtocolError {
    #[error("unknown port {0}")]
    UnknownPort(u8),

    #[error("unknown command identifier 0x{cid:02x} on port {port}")]
    UnknownCommand { port: u8, cid: u8 },

    #[error("payload truncated: expected {expected} bytes, got {got}")]
    Truncated { expected: usize, got: usize },

    #[error("trailing bytes after command")]
    TrailingBytes,

    #[error("invalid field: {0}")]
    InvalidField(&'static str),

    #[error("command is not a request")]
    NotARequest,
}

// ============================================================================
// Domain types
// ============================================================================

/// Direction of a frame on the link, used to disambiguate Req/Ans pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkDirection {
    /// Network to device.
    Downlink,
    /// Device to network.
    Uplink,
}

/// Wrap an arbitrary seconds count onto the GPS-epoch u32 wire form.
pub fn gps_time_mod32(seconds: u64) -> u32 {
    (seconds % (1u64 << 32)) as u32
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct McGroupSetup {
    pub group_id: u8,
    pub mc_addr: u32,
    pub mc_key: [u8; 16],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McClassCSession {
    pub group_id: u8,
    /// Seconds since the GPS epoch modulo 2^32.
    pub session_time: u32,
    /// Maximum session length in seconds.
    pub session_timeout: u32,
    pub dr: u8,
    pub frequency_hz: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McClassBSession {
    pub session: McClassCSession,
    /// Ping-slot periodicity exponent, 0..=7.
    pub ping_periodicity: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FragSessionSetup {
    pub frag_session_id: u8,
    /// Bitmask over multicast group ids allowed as transport.
    pub allowed_mc_groups: u8,
    pub nb_frag: u16,
    pub frag_size: u8,
    pub frag_algo: u8,
    pub padding: u8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    McGroupSetupReq(McGroupSetup),
    McGroupSetupAns { group_id: u8, error: bool },
    McClassCSessionReq(McClassCSession),
    McClassCSessionAns { group_id: u8, error: bool },
    McClassBSessionReq(McClassBSession),
    McClassBSessionAns { group_id: u8, error: bool },
    FragSessionSetupReq(FragSessionSetup),
    FragSessionSetupAns { frag_session_id: u8, unsupported_algo: bool, error: bool },
    AppTimeReq { device_time: u32, token: u8 },
    AppTimeAns { time_correction: i32, token: u8 },
}

impl Command {
    pub fn port(&self) -> u8 {
        match self {
            Command::McGroupSetupReq(_)
            | Command::McGroupSetupAns { .. }
            | Command::McClassCSessionReq(_)
            | Command::McClassCSessionAns { .. }
            | Command::McClassBSessionReq(_)
            | Command::McClassBSessionAns { .. } => MULTICAST_PORT,
            Command::FragSessionSetupReq(_) | Command::FragSessionSetupAns { .. } => FRAGMENTATION_PORT,
            Command::AppTimeReq { .. } | Command::AppTimeAns { .. } => CLOCK_SYNC_PORT,
        }
    }

    pub fn is_request(&self) -> bool {
        matches!(
            self,
            Command::McGroupSetupReq(_)
                | Command::McClassCSessionReq(_)
                | Command::McClassBSessionReq(_)
                | Command::FragSessionSetupReq(_)
                | Command::AppTimeReq { .. }
        )
    }

    /// Direction the command travels in: session commands are downlinks,
    /// their answers uplinks; clock sync is the other way around.
    pub fn direction(&self) -> LinkDirection {
        match self {
            Command::McGroupSetupReq(_)
            | Command::McClassCSessionReq(_)
            | Command::McClassBSessionReq(_)
            | Command::FragSessionSetupReq(_)
            | Command::AppTimeAns { .. } => LinkDirection::Downlink,
            _ => LinkDirection::Uplink,
        }
    }
}

// ============================================================================
// Codec
// ============================================================================

fn put_u32(buf: &mut Vec<u8>, v: u32) {
    buf.extend_from_slice(&v.to_le_bytes());
}

fn get_u32(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([bytes[at], bytes[at + 1], bytes[at + 2], bytes[at + 3]])
}

fn put_freq(buf: &mut Vec<u8>, hz: u32) {
    let units = hz / 100;
    buf.extend_from_slice(&units.to_le_bytes()[..3]);
}

fn get_freq(bytes: &[u8], at: usize) -> u32 {
    let units = u32::from_le_bytes([bytes[at], bytes[at + 1], bytes[at + 2], 0]);
    units * 100
}

/// Encode a command to its port and byte sequence.
pub fn encode_command(cmd: &Command) -> Result<(u8, Vec<u8>), ProtocolError> {
    let mut out = Vec::new();
    match cmd {
        Command::McGroupSetupReq(g) => {
            if g.group_id as usize >= MAX_MULTICAST_GROUPS {
                return Err(ProtocolError::InvalidField("group_id must be < 4"));
            }
            out.push(CID_MC_GROUP_SETUP);
            out.push(g.group_id);
            put_u32(&mut out, g.mc_addr);
            out.extend_from_slice(&g.mc_key);
        }
        Command::McGroupSetupAns { group_id, error } => {
            out.push(CID_MC_GROUP_SETUP);
            out.push((group_id & 0x03) | if *error { 0x04 } else { 0 });
        }
        Command::McClassCSessionReq(s) => {
            if s.group_id as usize >= MAX_MULTICAST_GROUPS {
                return Err(ProtocolError::InvalidField("group_id must be < 4"));
            }
            if s.session_timeout == 0 {
                return Err(ProtocolError::InvalidField("session_timeout must be positive"));
            }
            out.push(CID_MC_CLASS_C_SESSION);
            out.push(s.group_id);
            put_u32(&mut out, s.session_time);
            put_u32(&mut out, s.session_timeout);
            out.push(s.dr);
            put_freq(&mut out, s.frequency_hz);
        }
        Command::McClassCSessionAns { group_id, error } => {
            out.push(CID_MC_CLASS_C_SESSION);
            out.push((group_id & 0x03) | if *error { 0x04 } else { 0 });
        }
        Command::McClassBSessionReq(b) => {
            if b.ping_periodicity > 7 {
                return Err(ProtocolError::InvalidField("ping periodicity must be <= 7"));
            }
            if b.session.group_id as usize >= MAX_MULTICAST_GROUPS {
                return Err(ProtocolError::InvalidField("group_id must be < 4"));
            }
            if b.session.session_timeout == 0 {
                return Err(ProtocolError::InvalidField("session_timeout must be positive"));
            }
            out.push(CID_MC_CLASS_B_SESSION);
            out.push(b.session.group_id);
            put_u32(&mut out, b.session.session_time);
            put_u32(&mut out, b.session.session_timeout);
            out.push(b.ping_periodicity & 0x0f);
            out.push(b.session.dr);
            put_freq(&mut out, b.session.frequency_hz);
        }
        Command::McClassBSessionAns { group_id, error } => {
            out.push(CID_MC_CLASS_B_SESSION);
            out.push((group_id & 0x03) | if *error { 0x04 } else { 0 });
        }
        Command::FragSessionSetupReq(f) => {
            if f.frag_session_id > 3 {
                return Err(ProtocolError::InvalidField("frag_session_id must be < 4"));
            }
            if f.nb_frag == 0 {
                return Err(ProtocolError::InvalidField("nb_frag must be >= 1"));
            }
            if f.frag_size == 0 || f.padding >= f.frag_size {
                return Err(ProtocolError::InvalidField("padding must be < frag_size"));
            }
            out.push(CID_FRAG_SESSION_SETUP);
            out.push(((f.frag_session_id & 0x03) << 4) | (f.allowed_mc_groups & 0x0f));
            out.extend_from_slice(&f.nb_frag.to_le_bytes());
            out.push(f.frag_size);
            out.push(f.frag_algo);
            out.push(f.padding);
        }
        Command::FragSessionSetupAns { frag_session_id, unsupported_algo, error } => {
            out.push(CID_FRAG_SESSION_SETUP);
            out.push(
                ((frag_session_id & 0x03) << 4)
                    | if *unsupported_algo { 0x01 } else { 0 }
                    | if *error { 0x02 } else { 0 },
            );
        }
        Command::AppTimeReq { device_time, token } => {
            out.push(CID_APP_TIME);
            put_u32(&mut out, *device_time);
            out.push(token & 0x0f);
        }
        Command::AppTimeAns { time_correction, token } => {
            out.push(CID_APP_TIME);
            out.extend_from_slice(&time_correction.to_le_bytes());
            out.push(token & 0x0f);
        }
    }
    Ok((cmd.port(), out))
}

fn need(bytes: &[u8], expected: usize) -> Result<(), ProtocolError> {
    match bytes.len().cmp(&expected) {
        std::cmp::Ordering::Less => Err(ProtocolError::Truncated { expected, got: bytes.len() }),
        std::cmp::Ordering::Greater => Err(ProtocolError::TrailingBytes),
        std::cmp::Ordering::Equal => Ok(()),
    }
}

/// Decode a command from its port, byte sequence and link direction.
pub fn decode_command(port: u8, bytes: &[u8], direction: LinkDirection) -> Result<Command, ProtocolError> {
    if bytes.is_empty() {
        return Err(ProtocolError::Truncated { expected: 1, got: 0 });
    }
    let cid = bytes[0];
    let body = &bytes[1..];
    match (port, cid, direction) {
        (MULTICAST_PORT, CID_MC_GROUP_SETUP, LinkDirection::Downlink) => {
            need(body, 21)?;
            let mut key = [0u8; 16];
            key.copy_from_slice(&body[5..21]);
            Ok(Command::McGroupSetupReq(McGroupSetup {
                group_id: body[0],
                mc_addr: get_u32(body, 1),
                mc_key: key,
            }))
        }
        (MULTICAST_PORT, CID_MC_GROUP_SETUP, LinkDirection::Uplink) => {
            need(body, 1)?;
            Ok(Command::McGroupSetupAns {
                group_id: body[0] & 0x03,
                error: body[0] & 0x04 != 0,
            })
        }
        (MULTICAST_PORT, CID_MC_CLASS_C_SESSION, LinkDirection::Downlink) => {
            need(body, 13)?;
            Ok(Command::McClassCSessionReq(McClassCSession {
                group_id: body[0],
                session_time: get_u32(body, 1),
                session_timeout: get_u32(body, 5),
                dr: body[9],
                frequency_hz: get_freq(body, 10),
            }))
        }
        (MULTICAST_PORT, CID_MC_CLASS_C_SESSION, LinkDirection::Uplink) => {
            need(body, 1)?;
            Ok(Command::McClassCSessionAns {
                group_id: body[0] & 0x03,
                error: body[0] & 0x04 != 0,
            })
        }
        (MULTICAST_PORT, CID_MC_CLASS_B_SESSION, LinkDirection::Downlink) => {
            need(body, 14)?;
            Ok(Command::McClassBSessionReq(McClassBSession {
                session: McClassCSession {
                    group_id: body[0],
                    session_time: get_u32(body, 1),
                    session_timeout: get_u32(body, 5),
                    dr: body[10],
                    frequency_hz: get_freq(body, 11),
                },
                ping_periodicity: body[9] & 0x0f,
            }))
        }
        (MULTICAST_PORT, CID_MC_CLASS_B_SESSION, LinkDirection::Uplink) => {
            need(body, 1)?;
            Ok(Command::McClassBSessionAns {
                group_id: body[0] & 0x03,
                error: body[0] & 0x04 != 0,
            })
        }
        (FRAGMENTATION_PORT, CID_FRAG_SESSION_SETUP, LinkDirection::Downlink) => {
            need(body, 6)?;
            Ok(Command::FragSessionSetupReq(FragSessionSetup {
                frag_session_id: (body[0] >> 4) & 0x03,
                allowed_mc_groups: body[0] & 0x0f,
                nb_frag: u16::from_le_bytes([body[1], body[2]]),
                frag_size: body[3],
                frag_algo: body[4],
                padding: body[5],
            }))
        }
        (FRAGMENTATION_PORT, CID_FRAG_SESSION_SETUP, LinkDirection::Uplink) => {
            need(body, 1)?;
            Ok(Command::FragSessionSetupAns {
                frag_session_id: (body[0] >> 4) & 0x03,
                unsupported_algo: body[0] & 0x01 != 0,
                error: body[0] & 0x02 != 0,
            })
        }
        (CLOCK_SYNC_PORT, CID_APP_TIME, LinkDirection::Uplink) => {
            need(body, 5)?;
            Ok(Command::AppTimeReq {
                device_time: get_u32(body, 0),
                token: body[4] & 0x0f,
            })
        }
        (CLOCK_SYNC_PORT, CID_APP_TIME, LinkDirection::Downlink) => {
            need(body, 5)?;
            Ok(Command::AppTimeAns {
                time_correction: i32::from_le_bytes([body[0], body[1], body[2], body[3]]),
                token: body[4] & 0x0f,
            })
        }
        (MULTICAST_PORT | FRAGMENTATION_PORT | CLOCK_SYNC_PORT, cid, _) => {
            Err(ProtocolError::UnknownCommand { port, cid })
        }
        (port, _, _) => Err(ProtocolError::UnknownPort(port)),
    }
}

// ============================================================================
// Clock correction
// ============================================================================

/// Signed correction delta such that `(device_time + delta) mod 2^32`
/// equals `network_time`, taking the shortest wrap direction.
pub fn clock_correction(device_time: u32, network_time: u32) -> i64 {
    let diff = network_time.wrapping_sub(device_time) as u32 as i64;
    if diff > (1i64 << 31) {
        diff - (1i64 << 32)
    } else {
        diff
    }
}

// ============================================================================
// Device-side session table
// ============================================================================

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SessionClass {
    ClassC,
    ClassB { ping_periodicity: u8 },
}

/// A class-B/C session recorded against an installed multicast group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PendingSession {
    pub class: SessionClass,
    pub session_time: u32,
    pub session_timeout: u32,
    pub dr: u8,
    pub frequency_hz: u32,
}

#[derive(Debug, Clone)]
pub struct GroupEntry {
    pub setup: McGroupSetup,
    pub session: Option<PendingSession>,
}

/// One fragmentation session: the negotiated parameters plus the running
/// decoder fed from received fragments.
#[derive(Debug)]
pub struct FragSessionState {
    pub setup: FragSessionSetup,
    pub plan: FragmentPlan,
    pub decoder: Decoder,
}

/// Per-device protocol state: multicast groups, fragmentation sessions and
/// the accumulated clock correction.
#[derive(Debug, Default)]
pub struct DeviceSessionTable {
    groups: [Option<GroupEntry>; MAX_MULTICAST_GROUPS],
    frag_sessions: [Option<FragSessionState>; 4],
    /// Sum of applied corrections in seconds.
    pub clock_offset: i64,
    next_token: u8,
}

impl DeviceSessionTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn group(&self, id: u8) -> Option<&GroupEntry> {
        self.groups.get(id as usize).and_then(Option::as_ref)
    }

    pub fn frag_session(&self, id: u8) -> Option<&FragSessionState> {
        self.frag_sessions.get(id as usize).and_then(Option::as_ref)
    }

    pub fn frag_session_mut(&mut self, id: u8) -> Option<&mut FragSessionState> {
        self.frag_sessions.get_mut(id as usize).and_then(Option::as_mut)
    }

    /// Earliest recorded pending session, if any group has one.
    pub fn pending_session(&self) -> Option<&PendingSession> {
        self.groups
            .iter()
            .flatten()
            .filter_map(|g| g.session.as_ref())
            .next()
    }

    pub fn next_token(&mut self) -> u8 {
        self.next_token = (self.next_token + 1) & 0x0f;
        self.next_token
    }

    /// Handle a request command addressed to this device, returning the
    /// updated state's answer. Every request yields exactly one answer;
    /// errors are signalled in-band through the answer's error flag.
    pub fn handle_command(&mut self, cmd: &Command) -> Result<Command, ProtocolError> {
        match cmd {
            Command::McGroupSetupReq(setup) => {
                if setup.group_id as usize >= MAX_MULTICAST_GROUPS {
                    return Ok(Command::McGroupSetupAns { group_id: setup.group_id & 0x03, error: true });
                }
                // Re-setup overwrites: simplest recovery under retransmission.
                self.groups[setup.group_id as usize] = Some(GroupEntry {
                    setup: setup.clone(),
                    session: None,
                });
                Ok(Command::McGroupSetupAns { group_id: setup.group_id, error: false })
            }
            Command::McClassCSessionReq(s) => {
                let ans = |error| Command::McClassCSessionAns { group_id: s.group_id & 0x03, error };
                match self.groups.get_mut(s.group_id as usize).and_then(Option::as_mut) {
                    Some(entry) => {
                        entry.session = Some(PendingSession {
                            class: SessionClass::ClassC,
                            session_time: s.session_time,
                            session_timeout: s.session_timeout,
                            dr: s.dr,
                            frequency_hz: s.frequency_hz,
                        });
                        Ok(ans(false))
                    }
                    None => Ok(ans(true)),
                }
            }
            Command::McClassBSessionReq(b) => {
                let s = &b.session;
                let ans = |error| Command::McClassBSessionAns { group_id: s.group_id & 0x03, error };
                if b.ping_periodicity > 7 {
                    return Ok(ans(true));
                }
                match self.groups.get_mut(s.group_id as usize).and_then(Option::as_mut) {
                    Some(entry) => {
                        entry.session = Some(PendingSession {
                            class: SessionClass::ClassB { ping_periodicity: b.ping_periodicity },
                            session_time: s.session_time,
                            session_timeout: s.session_timeout,
                            dr: s.dr,
                            frequency_hz: s.frequency_hz,
                        });
                        Ok(ans(false))
                    }
                    None => Ok(ans(true)),
                }
            }
            Command::FragSessionSetupReq(f) => {
                let id = f.frag_session_id & 0x03;
                if f.frag_algo != FRAG_ALGO_XOR {
                    return Ok(Command::FragSessionSetupAns {
                        frag_session_id: id,
                        unsupported_algo: true,
                        error: false,
                    });
                }
                if f.nb_frag == 0 || f.frag_size == 0 || f.padding >= f.frag_size {
                    return Ok(Command::FragSessionSetupAns {
                        frag_session_id: id,
                        unsupported_algo: false,
                        error: true,
                    });
                }
                let plan = FragmentPlan {
                    frag_size: f.frag_size as usize,
                    nb_frag: f.nb_frag as usize,
                    padding: f.padding as usize,
                    nb_redundancy: 0,
                };
                self.frag_sessions[id as usize] = Some(FragSessionState {
                    setup: *f,
                    plan,
                    decoder: Decoder::new(&plan),
                });
                Ok(Command::FragSessionSetupAns {
                    frag_session_id: id,
                    unsupported_algo: false,
                    error: false,
                })
            }
            Command::AppTimeReq { .. } => Err(ProtocolError::NotARequest),
            _ => Err(ProtocolError::NotARequest),
        }
    }

    /// Apply a clock correction received in an `AppTimeAns`.
    pub fn apply_clock_correction(&mut self, delta: i64) {
        self.clock_offset += delta;
    }
}

// ============================================================================
// Tests
// ============================================================================
