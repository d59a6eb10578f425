//! Device placement around a single gateway so the deployment attains a
//! target data-rate distribution.
//!
//! A device assigned DR k is placed uniformly (by area) inside the annulus
//! where the mean link budget clears DR k's sensitivity but not the
//! next-faster rate's; devices on the fastest rate fill the inner disk.

use crate::radio::{path_loss_mean, DataRate, LinkBudget, PathLossParams, NUM_DATA_RATES};
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PlacementError {
    #[error("data-rate distribution must sum to 1, got {0}")]
    BadDistribution(f64),

    #[error("distribution entries must be non-negative")]
    NegativeMass,

    #[error("link budget gives no room for DR{0} (annulus is empty)")]
    EmptyAnnulus(u8),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlacedDevice {
    pub x_m: f64,
    pub y_m: f64,
    pub distance_m: f64,
    pub dr: DataRate,
}

/// Largest distance at which the mean path loss stays within `budget_db`.
/// The dual-slope model jumps upward at the breakpoint; targets falling in
/// the gap clamp to the breakpoint.
fn max_distance_for_loss(target_db: f64, params: &PathLossParams) -> f64 {
    let near_at_break = params.near.pl_d0_db
        + 10.0 * params.near.gamma * (params.breakpoint_m / params.near.d0_m).log10();
    let far_at_break = params.far.pl_d0_db
        + 10.0 * params.far.gamma * (params.breakpoint_m / params.far.d0_m).log10();
    if target_db >= far_at_break {
        params.far.d0_m * 10f64.powf((target_db - params.far.pl_d0_db) / (10.0 * params.far.gamma))
    } else if target_db <= near_at_break {
        params.near.d0_m * 10f64.powf((target_db - params.near.pl_d0_db) / (10.0 * params.near.gamma))
    } else {
        params.breakpoint_m
    }
}

/// Coverage radius per data rate under the mean path loss: the largest
/// distance whose mean received power still clears the DR's sensitivity.
pub fn coverage_radii(budget: &LinkBudget, params: &PathLossParams) -> [f64; NUM_DATA_RATES] {
    let gains = budget.tx_power_dbm + budget.device_antenna_gain_db + budget.gateway_antenna_gain_db;
    let mut radii = [0.0; NUM_DATA_RATES];
    for dr in DataRate::all() {
        let max_loss = gains - budget.sensitivity(dr);
        radii[dr.index()] = max_distance_for_loss(max_loss, params);
    }
    radii
}

/// Integer device counts per data rate by largest-remainder apportionment,
/// so `n = 100` under the default distribution yields exactly 45 DR5
/// devices.
pub fn apportion(n: usize, distribution: &[f64; NUM_DATA_RATES]) -> [usize; NUM_DATA_RATES] {
    let mut counts = [0usize; NUM_DATA_RATES];
    let mut remainders: Vec<(usize, f64)> = Vec::with_capacity(NUM_DATA_RATES);
    let mut assigned = 0;
    for (i, &mass) in distribution.iter().enumerate() {
        let exact = mass * n as f64;
        counts[i] = exact.floor() as usize;
        assigned += counts[i];
        remainders.push((i, exact - exact.floor()));
    }
    remainders.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    for (i, _) in remainders.into_iter().take(n - assigned) {
        counts[i] += 1;
    }
    counts
}

/// Place `n` devices to attain the target data-rate distribution.
pub fn place_devices<R: Rng + ?Sized>(
    n: usize,
    distribution: &[f64; NUM_DATA_RATES],
    budget: &LinkBudget,
    params: &PathLossParams,
    rng: &mut R,
) -> Result<Vec<PlacedDevice>, PlacementError> {
    if distribution.iter().any(|&m| m < 0.0) {
        return Err(PlacementError::NegativeMass);
    }
    let total: f64 = distribution.iter().sum();
    if (total - 1.0).abs() > 1e-6 {
        return Err(PlacementError::BadDistribution(total));
    }
    let radii = coverage_radii(budget, params);
    let counts = apportion(n, distribution);

    let mut devices = Vec::with_capacity(n);
    for dr in DataRate::all() {
        let k = dr.index();
        if counts[k] == 0 {
            continue;
        }
        let outer = radii[k];
        let inner = if k + 1 < NUM_DATA_RATES { radii[k + 1] } else { 0.0 };
        if outer <= inner {
            return Err(PlacementError::EmptyAnnulus(k as u8));
        }
        for _ in 0..counts[k] {
            // Uniform by area over the annulus.
            let u: f64 = rng.gen();
            let r = (inner * inner + u * (outer * outer - inner * inner)).sqrt();
            let theta = rng.gen range_marker();
            devices.push(PlacedDevice {
                x_m: r * theta.cos(),
                y_m: r * theta.sin(),
                distance_m: r,
                dr,
            });
        }
    }
    Ok(devices)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radio::received_power;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    pub const DEFAULT_DISTRIBUTION: [f64; 6] = [0.06, 0.08, 0.08, 0.11, 0.22, 0.45];

    #[test]
    fn apportionment_hits_exact_counts() {
        assert_eq!(apportion(100, &DEFAULT_DISTRIBUTION), [6, 8, 8, 11, 22, 45]);
        let c = apportion(137, &DEFAULT_DISTRIBUTION);
        assert_eq!(c.iter().sum::<usize>(), 137);
    }

    #[test]
    fn radii_decrease_with_data_rate() {
        let radii = coverage_radii(&LinkBudget::default(), &PathLossParams::default());
        for k in 0..5 {
            assert!(radii[k] > radii[k + 1], "radius must shrink with faster DRs");
        }
    }

    #[test]
    fn devices_land_in_their_annulus_with_positive_margin() {
        let budget = LinkBudget::default();
        let params = PathLossParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let devices = place_devices(100, &DEFAULT_DISTRIBUTION, &budget, &params, &mut rng).unwrap();
        assert_eq!(devices.len(), 100);
        let counts = devices.iter().filter(|d| d.dr.index() == 5).count();
        assert_eq!(counts, 45);

        let gains = budget.tx_power_dbm + budget.device_antenna_gain_db + budget.gateway_antenna_gain_db;
        for d in &devices {
            let pl = path_loss_mean(d.distance_m, &params).unwrap();
            let rx = received_power(budget.tx_power_dbm, budget.device_antenna_gain_db, budget.gateway_antenna_gain_db, pl);
            assert_eq!(rx, gains - budget.tx_power_dbm + budget.tx_power_dbm - pl);
            // Clears own sensitivity...
            assert!(
                rx >= budget.sensitivity(d.dr) - 1e-9,
                "DR{} at {:.0} m has negative margin",
                d.dr.index(),
                d.distance_m
            );
            // ...but not the next-faster rate's.
            if d.dr.index() < 5 {
                let faster = DataRate::new(d.dr.index() as u8 + 1).unwrap();
                assert!(rx < budget.sensitivity(faster) + 1e-9);
            }
            assert!((d.x_m.hypot(d.y_m) - d.distance_m).abs() < 1e-6);
        }
    }

    #[test]
    fn all_mass_on_dr0_is_feasible() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let dist = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        let devices =
            place_devices(50, &dist, &LinkBudget::default(), &PathLossParams::default(), &mut rng).unwrap();
        assert!(devices.iter().all(|d| d.dr.index() == 0));
    }

    #[test]
    fn invalid_distributions_are_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let bad = [0.5, 0.0, 0.0, 0.0, 0.0, 0.0];
        assert_eq!(
            place_devices(10, &bad, &LinkBudget::default(), &PathLossParams::default(), &mut rng),
            Err(PlacementError::BadDistribution(0.5))
        );
        // A sensitivity table that orders DR4 above DR5 leaves DR4 no room.
        let mut budget = LinkBudget::default();
        budget.sensitivity_dbm[4] = budget.sensitivity_dbm[5];
        let dist = [0.0, 0.0, 0.0, 0.0, 0.5, 0.5];
        assert_eq!(
            place_devices(10, &dist, &budget, &PathLossParams::default(), &mut rng),
            Err(PlacementError::EmptyAnnulus(4))
        );
    }
}
