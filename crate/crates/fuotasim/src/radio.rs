//! Physical-layer models: LoRa time-on-air, dual-slope log-distance path
//! loss with shadowing, link budgets, probabilistic packet reception, and
//! inter-SF capture resolution.
//!
//! Everything here is a pure function of its inputs (plus an explicit RNG
//! stream for the stochastic pieces), so the simulation kernel can call it
//! from anywhere without hidden state.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

// ============================================================================
// Errors
// ============================================================================

#[derive(Debug, Error, PartialEq)]
pub enum RadioError {
    /// Payload does not fit the data rate's PHY cap (max app payload + MAC header).
    #[error("payload of {len} bytes exceeds {max} byte cap for DR{dr}")]
    PayloadTooLarge { dr: u8, len: usize, max: usize },

    #[error("payload must be at least one byte")]
    EmptyPayload,

    #[error("distance must be strictly positive, got {0}")]
    NonPositiveDistance(f64),

    #[error("invalid data rate index {0} (expected 0..=5)")]
    InvalidDataRate(u8),
}

// ============================================================================
// Data rates (EU868, Table-style regional parameters)
// ============================================================================

/// Number of LoRaWAN data rates modelled (DR0..DR5, all 125 kHz).
pub const NUM_DATA_RATES: usize = 6;

/// MAC header + MIC overhead added on top of the application payload.
pub const MAC_HEADER_BYTES: usize = 8;

const MAX_APP_PAYLOAD: [usize; NUM_DATA_RATES] = [51, 51, 51, 115, 222, 222];

/// A LoRaWAN data rate index. DR0 maps to SF12 (slowest, longest range),
/// DR5 to SF7 (fastest, shortest range). Bandwidth is 125 kHz throughout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DataRate(u8);

impl DataRate {
    pub fn new(index: u8) -> Result<Self, RadioError> {
        if (index as usize) < NUM_DATA_RATES {
            Ok(DataRate(index))
        } else {
            Err(RadioError::InvalidDataRate(index))
        }
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// Spreading factor: SF12 for DR0 down to SF7 for DR5.
    pub fn spreading_factor(self) -> u32 {
        12 - self.0 as u32
    }

    pub fn bandwidth_hz(self) -> u32 {
        125_000
    }

    /// Maximum application payload in bytes for this data rate.
    pub fn max_app_payload(self) -> usize {
        MAX_APP_PAYLOAD[self.index()]
    }

    /// Symbol duration in seconds: 2^SF / BW.
    pub fn symbol_time(self) -> f64 {
        (1u64 << self.spreading_factor()) as f64 / self.bandwidth_hz() as f64
    }

    /// Low data rate optimization is mandated for SF11/SF12 at 125 kHz.
    pub fn low_data_rate_optimized(self) -> bool {
        self.spreading_factor() >= 11
    }

    pub fn all() -> [DataRate; NUM_DATA_RATES] {
        [
            DataRate(0),
            DataRate(1),
            DataRate(2),
            DataRate(3),
            DataRate(4),
            DataRate(5),
        ]
    }
}

impl std::fmt::Display for DataRate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "DR{}", self.0)
    }
}

// ============================================================================
// Channels
// ============================================================================

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelDirection {
    UplinkAndDownlink,
    DownlinkOnly,
}

/// One radio channel with its regulatory duty-cycle budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Channel {
    pub frequency_hz: u32,
    pub duty_cycle: f64,
    pub direction: ChannelDirection,
}

/// Frequency of the downlink-only 10% duty-cycle channel (also Rx2).
pub const RX2_FREQUENCY_HZ: u32 = 869_525_000;

/// Default EU channel plan: three 1% uplink/downlink channels plus the
/// 10% downlink-only channel used for Rx2 and multicast transmissions.
pub fn default_channels() -> Vec<Channel> {
    vec![
        Channel {
            frequency_hz: 868_100_000,
            duty_cycle: 0.01,
            direction: ChannelDirection::UplinkAndDownlink,
        },
        Channel {
            frequency_hz: 868_300_000,
            duty_cycle: 0.01,
            direction: ChannelDirection::UplinkAndDownlink,
        },
        Channel {
            frequency_hz: 868_500_000,
            duty_cycle: 0.01,
            direction: ChannelDirection::UplinkAndDownlink,
        },
        Channel {
            frequency_hz: RX2_FREQUENCY_HZ,
            duty_cycle: 0.10,
            direction: ChannelDirection::DownlinkOnly,
        },
    ]
}

// ============================================================================
// Time on air
// ============================================================================

/// Number of programmed preamble symbols; the radio adds 4.25 symbols of
/// sync word on top (so 12.25 symbols total).
pub const PREAMBLE_SYMBOLS: f64 = 8.0;

/// Payload symbol count for an explicit-header, CRC-on, CR 4/5 LoRa frame.
fn payload_symbols(sf: u32, phy_payload_len: usize, lowdr: bool) -> u32 {
    let de = if lowdr { 1i64 } else { 0 };
    let numerator = 8 * phy_payload_len as i64 - 4 * sf as i64 + 28 + 16;
    let denominator = 4 * (sf as i64 - 2 * de);
    let blocks = if numerator > 0 {
        (numerator + denominator - 1) / denominator
    } else {
        0
    };
    8 + (blocks.max(0) as u32) * 5
}

/// Transmission duration in seconds of a PHY payload at the given data rate.
///
/// Standard Semtech formula: 12.25 preamble symbols plus
/// `8 + ceil((8 PL - 4 SF + 28 + 16) / (4 (SF - 2 DE))) * 5` payload
/// symbols, each lasting `2^SF / BW` seconds. DE = 1 for SF11/SF12.
pub fn time_on_air(dr: DataRate, phy_payload_len: usize) -> Result<f64, RadioError> {
    if phy_payload_len == 0 {
        return Err(RadioError::EmptyPayload);
    }
    let max = dr.max_app_payload() + MAC_HEADER_BYTES;
    if phy_payload_len > max {
        return Err(RadioError::PayloadTooLarge {
            dr: dr.0,
            len: phy_payload_len,
            max,
        });
    }
    Ok(time_on_air_unchecked(dr, phy_payload_len))
}

/// Same as [`time_on_air`] but without the payload cap check; used for
/// fixed-format frames such as beacons.
pub fn time_on_air_unchecked(dr: DataRate, phy_payload_len: usize) -> f64 {
    let t_sym = dr.symbol_time();
    let n_payload = payload_symbols(dr.spreading_factor(), phy_payload_len, dr.low_data_rate_optimized());
    (PREAMBLE_SYMBOLS + 4.25) * t_sym + n_payload as f64 * t_sym
}

/// Duration of the preamble alone; devices checking an empty ping slot stay
/// in receive mode for this long.
pub fn preamble_duration(dr: DataRate) -> f64 {
    (PREAMBLE_SYMBOLS + 4.25) * dr.symbol_time()
}

// ============================================================================
// Path loss
// ============================================================================

/// One slope of the dual-component log-distance model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLossSlope {
    pub d0_m: f64,
    pub pl_d0_db: f64,
    pub gamma: f64,
    pub sigma_db: f64,
}

/// Dual-slope log-distance path loss fitted to real LoRaWAN measurements:
/// a near component below the breakpoint and a far component beyond it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLossParams {
    pub breakpoint_m: f64,
    pub near: PathLossSlope,
    pub far: PathLossSlope,
}

impl Default for PathLossParams {
    fn default() -> Self {
        PathLossParams {
            breakpoint_m: 400.0,
            near: PathLossSlope {
                d0_m: 92.67,
                pl_d0_db: 128.63,
                gamma: 1.05,
                sigma_db: 8.72,
            },
            far: PathLossSlope {
                d0_m: 37.27,
                pl_d0_db: 132.54,
                gamma: 0.8,
                sigma_db: 3.34,
            },
        }
    }
}

impl PathLossParams {
    fn slope(&self, d: f64) -> &PathLossSlope {
        if d < self.breakpoint_m {
            &self.near
        } else {
            &self.far
        }
    }
}

/// Mean path loss in dB at distance `d` meters.
pub fn path_loss_mean(d: f64, params: &PathLossParams) -> Result<f64, RadioError> {
    if d <= 0.0 {
        return Err(RadioError::NonPositiveDistance(d));
    }
    let s = params.slope(d);
    Ok(s.pl_d0_db + 10.0 * s.gamma * (d / s.d0_m).log10())
}

/// Path loss sample with log-normal shadowing of the branch sigma.
pub fn path_loss_sample<R: Rng + ?Sized>(
    d: f64,
    params: &PathLossParams,
    rng: &mut R,
) -> Result<f64, RadioError> {
    let mean = path_loss_mean(d, params)?;
    let sigma = params.slope(d).sigma_db;
    if sigma == 0.0 {
        return Ok(mean);
    }
    let normal = Normal::new(0.0, sigma).expect("sigma must be finite and non-negative");
    Ok(mean + normal.sample(rng))
}

/// Link-budget sum: received power in dBm.
pub fn received_power(tx_power_dbm: f64, tx_gain_db: f64, rx_gain_db: f64, path_loss_db: f64) -> f64 {
    tx_power_dbm + tx_gain_db + rx_gain_db - path_loss_db
}

// ============================================================================
// Link budget & reception model
// ============================================================================

/// Transmit powers, antenna gains and receiver sensitivities.
///
/// Sensitivities default to SX1276 datasheet values at 125 kHz; they are
/// configurable through the scenario file.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkBudget {
    pub tx_power_dbm: f64,
    pub device_antenna_gain_db: f64,
    pub gateway_antenna_gain_db: f64,
    pub sensitivity_dbm: [f64; NUM_DATA_RATES],
}

impl Default for LinkBudget {
    fn default() -> Self {
        LinkBudget {
            tx_power_dbm: 14.0,
            device_antenna_gain_db: 2.2,
            gateway_antenna_gain_db: 8.0,
            sensitivity_dbm: [-137.0, -134.5, -132.0, -129.0, -126.0, -123.0],
        }
    }
}

impl LinkBudget {
    pub fn sensitivity(&self, dr: DataRate) -> f64 {
        self.sensitivity_dbm[dr.index()]
    }
}

/// Bit-error model: a logistic function of the link margin, raised to the
/// number of payload bits. Slope and offset are calibrated so that a margin
/// of +10 dB is near-certain reception and -10 dB near-certain loss for
/// realistic packet sizes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReceptionModel {
    pub ber_slope_per_db: f64,
    pub ber_offset: f64,
}

impl Default for ReceptionModel {
    fn default() -> Self {
        ReceptionModel {
            ber_slope_per_db: 0.9,
            ber_offset: 10.0,
        }
    }
}

impl ReceptionModel {
    fn bit_error_rate(&self, margin_db: f64) -> f64 {
        1.0 / (1.0 + (self.ber_slope_per_db * margin_db + self.ber_offset).exp())
    }
}

/// Probability that a packet of `phy_payload_len` bytes is successfully
/// received at `rx_power_dbm` on data rate `dr`.
///
/// Per-packet success is `(1 - BER)^(8 L)` with BER a logistic function of
/// the margin above sensitivity, so it is nondecreasing in power and
/// nonincreasing in packet length.
pub fn reception_probability(
    rx_power_dbm: f64,
    dr: DataRate,
    phy_payload_len: usize,
    budget: &LinkBudget,
    model: &ReceptionModel,
) -> f64 {
    let margin = rx_power_dbm - budget.sensitivity(dr);
    let ber = model.bit_error_rate(margin);
    (1.0 - ber).powi(8 * phy_payload_len as i32)
}

// ============================================================================
// Collision resolution
// ============================================================================

/// Signal-to-interference thresholds in dB, indexed `[frame SF][interferer SF]`
/// with SF7 at index 0 through SF12 at index 5.
///
/// A frame survives when its power exceeds the aggregate interferer power of
/// every SF group by the matching threshold. Defaults: 6 dB against the same
/// SF (capture effect) and -8 dB against other SFs (quasi-orthogonality:
/// cross-SF interference only destructive when 8 dB stronger).
#[derive(Debug, Clone, PartialEq)]
pub struct SirMatrix {
    pub thresholds_db: [[f64; 6]; 6],
}

impl Default for SirMatrix {
    fn default() -> Self {
        let mut t = [[-8.0; 6]; 6];
        for (i, row) in t.iter_mut().enumerate() {
            row[i] = 6.0;
        }
        SirMatrix { thresholds_db: t }
    }
}

impl SirMatrix {
    pub fn uniform(same_sf_db: f64, cross_sf_db: f64) -> Self {
        let mut t = [[cross_sf_db; 6]; 6];
        for (i, row) in t.iter_mut().enumerate() {
            row[i] = same_sf_db;
        }
        SirMatrix { thresholds_db: t }
    }

    pub fn threshold(&self, frame_sf: u32, interferer_sf: u32) -> f64 {
        self.thresholds_db[(frame_sf - 7) as usize][(interferer_sf - 7) as usize]
    }
}

/// A frame participating in collision resolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContendingFrame {
    pub spreading_factor: u32,
    pub rx_power_dbm: f64,
}

fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

fn mw_to_dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}

/// Whether `frame` survives the aggregate interference of `interferers`
/// (all overlapping it in time on the same channel).
pub fn frame_survives(frame: &ContendingFrame, interferers: &[ContendingFrame], sir: &SirMatrix) -> bool {
    let mut aggregate_mw = [0.0f64; 6];
    for intf in interferers {
        aggregate_mw[(intf.spreading_factor - 7) as usize] += dbm_to_mw(intf.rx_power_dbm);
    }
    for sf in 7..=12u32 {
        let agg = aggregate_mw[(sf - 7) as usize];
        if agg > 0.0 {
            let required = mw_to_dbm(agg) + sir.threshold(frame.spreading_factor, sf);
            if frame.rx_power_dbm < required {
                return false;
            }
        }
    }
    true
}

/// Resolve a set of mutually overlapping frames on one channel. Returns a
/// survival flag per input frame; the surviving set may be empty.
pub fn resolve_collisions(frames: &[ContendingFrame], sir: &SirMatrix) -> Vec<bool> {
    frames
        .iter()
        .enumerate()
        .map(|(i, frame)| {
            let interferers: Vec<ContendingFrame> = frames
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, f)| *f)
                .collect();
            frame_survives(frame, &interferers, sir)
        })
        .collect()
}

// ============================================================================
// Tests
// ============================================================================

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Independent time-on-air oracle working in integer microseconds and
    /// a literal transcription of the symbol-count formula.
    fn toa_oracle_us(sf: u64, phy_len: u64) -> u64 {
        let t_sym_us = (1u64 << sf) as f64 * 1e6 / 125_000.0;
        let de = if sf >= 11 { 1 } else { 0 };
        let num = 8 * phy_len as i64 - 4 * sf as i64 + 28 + 16;
        let den = 4 * (sf as i64 - 2 * de);
        let ceil = if num > 0 { (num + den - 1) / den } else { 0 };
        let n_sym = 8.0 + ceil as f64 * 5.0;
        ((12.25 + n_sym) * t_sym_us).round() as u64
    }

    #[test]
    fn data_rate_table_matches_regional_parameters() {
        let caps = [51, 51, 51, 115, 222, 222];
        let sfs = [12, 11, 10, 9, 8, 7];
        for (i, dr) in DataRate::all().iter().enumerate() {
            assert_eq!(dr.index(), i);
            assert_eq!(dr.max_app_payload(), caps[i]);
            assert_eq!(dr.spreading_factor(), sfs[i]);
            assert_eq!(dr.bandwidth_hz(), 125_000);
        }
        assert!(DataRate::new(6).is_err());
    }

    #[test]
    fn default_channel_plan() {
        let chans = default_channels();
        assert_eq!(chans.len(), 4);
        let uplink: Vec<u32> = chans
            .iter()
            .filter(|c| c.direction == ChannelDirection::UplinkAndDownlink)
            .map(|c| c.frequency_hz)
            .collect();
        assert_eq!(uplink, vec![868_100_000, 868_300_000, 868_500_000]);
        for c in &chans[..3] {
            assert_relative_eq!(c.duty_cycle, 0.01);
        }
        assert_eq!(chans[3].frequency_hz, 869_525_000);
        assert_relative_eq!(chans[3].duty_cycle, 0.10);
        assert_eq!(chans[3].direction, ChannelDirection::DownlinkOnly);
    }

    #[test]
    fn time_on_air_reference_values() {
        // DR0/SF12, 59 byte PHY payload: 12.25 + 68 symbols at 32.768 ms.
        let dr0 = DataRate::new(0).unwrap();
        let t = time_on_air(dr0, 59).unwrap();
        assert_relative_eq!(t, 2.629632, epsilon = 1e-9);
        assert_eq!((t * 1e6).round() as u64, toa_oracle_us(12, 59));

        // DR5/SF7, 230 byte PHY payload.
        let dr5 = DataRate::new(5).unwrap();
        let t5 = time_on_air(dr5, 230).unwrap();
        assert_relative_eq!(t5, 0.363776, epsilon = 1e-9);
        assert_eq!((t5 * 1e6).round() as u64, toa_oracle_us(7, 230));

        // DR5 airtime is roughly half the DR4 airtime for the same payload.
        let dr4 = DataRate::new(4).unwrap();
        let t4 = time_on_air(dr4, 230).unwrap();
        let ratio = t5 / t4;
        assert!(ratio > 0.45 && ratio < 0.65, "DR5/DR4 airtime ratio {ratio}");
    }

    #[test]
    fn time_on_air_matches_oracle_on_grid() {
        for dr in DataRate::all() {
            let max = dr.max_app_payload() + MAC_HEADER_BYTES;
            for len in (1..=max).step_by(7) {
                let t = time_on_air(dr, len).unwrap();
                let us = (t * 1e6).round() as u64;
                assert_eq!(us, toa_oracle_us(dr.spreading_factor() as u64, len as u64));
            }
        }
    }

    #[test]
    fn time_on_air_monotonicity() {
        for dr in DataRate::all() {
            let mut prev = 0.0;
            for len in 1..=dr.max_app_payload() + MAC_HEADER_BYTES {
                let t = time_on_air(dr, len).unwrap();
                assert!(t > 0.0);
                assert!(t >= prev, "airtime must be nondecreasing in length");
                prev = t;
            }
        }
        // Strictly increasing in SF at fixed payload.
        for len in [1usize, 13, 23, 51] {
            for i in 0..5 {
                let slower = time_on_air(DataRate::new(i).unwrap(), len).unwrap();
                let faster = time_on_air(DataRate::new(i + 1).unwrap(), len).unwrap();
                assert!(slower > faster);
            }
        }
    }

    #[test]
    fn time_on_air_rejects_oversize() {
        let dr0 = DataRate::new(0).unwrap();
        assert!(time_on_air(dr0, 59).is_ok());
        assert_eq!(
            time_on_air(dr0, 60),
            Err(RadioError::PayloadTooLarge {
                dr: 0,
                len: 60,
                max: 59
            })
        );
        assert_eq!(time_on_air(dr0, 0), Err(RadioError::EmptyPayload));
    }

    #[test]
    fn path_loss_reference_values() {
        let p = PathLossParams::default();
        assert_relative_eq!(path_loss_mean(92.67, &p).unwrap(), 128.63, epsilon = 1e-9);
        assert_relative_eq!(path_loss_mean(100.0, &p).unwrap(), 128.977, epsilon = 1e-3);
        // Far branch from the breakpoint onwards.
        assert_relative_eq!(path_loss_mean(400.0, &p).unwrap(), 140.7856, epsilon = 1e-3);
        assert!(path_loss_mean(0.0, &p).is_err());
        assert!(path_loss_mean(-5.0, &p).is_err());
    }

    #[test]
    fn path_loss_monotone_within_branches() {
        let p = PathLossParams::default();
        let mut prev = f64::MIN;
        for d in (1..400).step_by(3) {
            let pl = path_loss_mean(d as f64, &p).unwrap();
            assert!(pl > prev);
            prev = pl;
        }
        prev = f64::MIN;
        for d in (400..100_000).step_by(997) {
            let pl = path_loss_mean(d as f64, &p).unwrap();
            assert!(pl > prev);
            prev = pl;
        }
    }

    #[test]
    fn shadowing_statistics_converge() {
        let p = PathLossParams::default();
        let mean = path_loss_mean(100.0, &p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 100_000;
        let samples: Vec<f64> = (0..n)
            .map(|_| path_loss_sample(100.0, &p, &mut rng).unwrap())
            .collect();
        let sample_mean = samples.iter().sum::<f64>() / n as f64;
        let var = samples.iter().map(|s| (s - sample_mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let std = var.sqrt();
        assert!((sample_mean - mean).abs() < 0.1, "mean {sample_mean} vs {mean}");
        assert!((std - 8.72).abs() / 8.72 < 0.02, "std {std} vs 8.72");
    }

    #[test]
    fn shadowing_degenerate_and_deterministic() {
        let mut p = PathLossParams::default();
        p.near.sigma_db = 0.0;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        assert_relative_eq!(
            path_loss_sample(100.0, &p, &mut rng).unwrap(),
            path_loss_mean(100.0, &p).unwrap()
        );

        let p = PathLossParams::default();
        let mut a = ChaCha8Rng::seed_from_u64(9);
        let mut b = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            assert_eq!(
                path_loss_sample(250.0, &p, &mut a).unwrap(),
                path_loss_sample(250.0, &p, &mut b).unwrap()
            );
        }
    }

    #[test]
    fn received_power_arithmetic() {
        assert_relative_eq!(received_power(14.0, 2.2, 8.0, 128.63), -104.43, epsilon = 1e-9);
        assert_relative_eq!(received_power(-3.5, 0.0, 0.0, 0.0), -3.5);
        // Gain symmetry.
        assert_relative_eq!(
            received_power(14.0, 2.2, 8.0, 120.0),
            received_power(14.0, 8.0, 2.2, 120.0)
        );
    }

    #[test]
    fn reception_probability_limits() {
        let budget = LinkBudget::default();
        let model = ReceptionModel::default();
        for dr in DataRate::all() {
            let sens = budget.sensitivity(dr);
            let deep = reception_probability(sens - 30.0, dr, 23, &budget, &model);
            assert!(deep < 0.001, "deep fade must fail, got {deep}");
            let strong = reception_probability(sens + 30.0, dr, 230.min(dr.max_app_payload() + 8), &budget, &model);
            assert!(strong > 0.999, "strong link must succeed, got {strong}");
            // +/-10 dB calibration points.
            assert!(reception_probability(sens + 10.0, dr, 59, &budget, &model) > 0.99);
            assert!(reception_probability(sens - 10.0, dr, 59, &budget, &model) < 0.01);
        }
    }

    #[test]
    fn reception_probability_monotone() {
        let budget = LinkBudget::default();
        let model = ReceptionModel::default();
        let dr = DataRate::new(2).unwrap();
        let sens = budget.sensitivity(dr);
        let mut prev = 0.0;
        for step in -40..=40 {
            let p = reception_probability(sens + step as f64, dr, 59, &budget, &model);
            assert!((0.0..=1.0).contains(&p));
            assert!(p >= prev);
            prev = p;
        }
        // Longer packets never more likely than shorter at equal power.
        for step in -10..=10 {
            let power = sens + step as f64;
            let long = reception_probability(power, dr, 59, &budget, &model);
            let short = reception_probability(power, dr, 23, &budget, &model);
            assert!(long <= short);
        }
    }

    #[test]
    fn collision_capture_cases() {
        let sir = SirMatrix::default();
        // Single frame with no interferers survives.
        let lone = ContendingFrame {
            spreading_factor: 9,
            rx_power_dbm: -120.0,
        };
        assert!(frame_survives(&lone, &[], &sir));

        // Equal-power same-SF frames are both lost.
        let a = ContendingFrame {
            spreading_factor: 7,
            rx_power_dbm: -121.0,
        };
        let b = a;
        assert_eq!(resolve_collisions(&[a, b], &sir), vec![false, false]);

        // 20 dB apart: the stronger captures, the weaker is lost.
        let strong = ContendingFrame {
            spreading_factor: 7,
            rx_power_dbm: -101.0,
        };
        let weak = ContendingFrame {
            spreading_factor: 7,
            rx_power_dbm: -121.0,
        };
        assert_eq!(resolve_collisions(&[strong, weak], &sir), vec![true, false]);

        // Cross-SF interference is tolerated unless the interferer is at
        // least 8 dB stronger.
        let sf9 = ContendingFrame {
            spreading_factor: 9,
            rx_power_dbm: -125.0,
        };
        let sf12 = ContendingFrame {
            spreading_factor: 12,
            rx_power_dbm: -130.0,
        };
        assert_eq!(resolve_collisions(&[sf9, sf12], &sir), vec![true, true]);
        let sf12_weak = ContendingFrame {
            spreading_factor: 12,
            rx_power_dbm: -135.0,
        };
        assert_eq!(resolve_collisions(&[sf9, sf12_weak], &sir), vec![true, false]);
    }

    #[test]
    fn collision_permutation_invariance() {
        let sir = SirMatrix::default();
        let frames = vec![
            ContendingFrame { spreading_factor: 7, rx_power_dbm: -104.0 },
            ContendingFrame { spreading_factor: 8, rx_power_dbm: -118.0 },
            ContendingFrame { spreading_factor: 7, rx_power_dbm: -123.0 },
            ContendingFrame { spreading_factor: 12, rx_power_dbm: -135.0 },
        ];
        let base = resolve_collisions(&frames, &sir);
        let perm = vec![frames[2], frames[0], frames[3], frames[1]];
        let got = resolve_collisions(&perm, &sir);
        assert_eq!(got, vec![base[2], base[0], base[3], base[1]]);
    }
}
