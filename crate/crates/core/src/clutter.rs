//! Geometry-based stochastic clutter.
//!
//! Clusters follow the familiar drop-in recipe: exponential excess delays
//! with a delay-scaling factor, shadowed exponential powers normalized to a
//! scenario power budget, and wrapped-Gaussian cluster angles around the
//! link bearing. Each cluster is backed by discrete scatterer positions on
//! the bistatic ellipsoid of its excess delay so that interaction paths have
//! real geometry to work with.

use crate::channel::{PathKind, PathSource, PropagationPath};
use crate::math::{angles_of_direction, direction_from_angles, Vec3, SPEED_OF_LIGHT};
use crate::rng::{domain, stream_rng};
use crate::semantics::{MaterialClass, ScenarioClass};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;
use thiserror::Error;

/// Ratio of intra-cluster ray spread to the cluster-level angle spread.
pub const INTRA_CLUSTER_SPREAD_RATIO: f64 = 1.0 / 8.0;

#[derive(Debug, Error)]
pub enum ClutterError {
    #[error("invalid clutter parameters: {0}")]
    InvalidParams(String),
    #[error("no ellipsoid intersection for excess delay {excess_delay_s}")]
    NoIntersection { excess_delay_s: f64 },
}

/// Scenario-level clutter statistics (linear units, radians, seconds).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClutterParams {
    pub n_clusters: usize,
    /// Delay scaling factor r_tau > 1.
    pub delay_scaling: f64,
    /// RMS delay spread sigma_tau in seconds.
    pub delay_spread_s: f64,
    /// Per-cluster shadowing standard deviation in dB.
    pub shadowing_std_db: f64,
    pub azimuth_spread_arrival_rad: f64,
    pub azimuth_spread_departure_rad: f64,
    pub elevation_spread_arrival_rad: f64,
    pub elevation_spread_departure_rad: f64,
    /// Total integrated clutter power (linear).
    pub total_power: f64,
    pub rays_per_cluster: usize,
}

impl ClutterParams {
    pub fn validate(&self) -> Result<(), ClutterError> {
        if self.delay_scaling <= 1.0 || !self.delay_scaling.is_finite() {
            return Err(ClutterError::InvalidParams(format!(
                "delay_scaling must exceed 1, got {}",
                self.delay_scaling
            )));
        }
        if !(self.delay_spread_s.is_finite() && self.delay_spread_s > 0.0) {
            return Err(ClutterError::InvalidParams(format!(
                "delay_spread_s must be positive, got {}",
                self.delay_spread_s
            )));
        }
        if !(self.shadowing_std_db.is_finite() && self.shadowing_std_db >= 0.0) {
            return Err(ClutterError::InvalidParams(format!(
                "shadowing_std_db must be non-negative, got {}",
                self.shadowing_std_db
            )));
        }
        for (name, v) in [
            ("azimuth_spread_arrival_rad", self.azimuth_spread_arrival_rad),
            ("azimuth_spread_departure_rad", self.azimuth_spread_departure_rad),
            ("elevation_spread_arrival_rad", self.elevation_spread_arrival_rad),
            ("elevation_spread_departure_rad", self.elevation_spread_departure_rad),
        ] {
            if !(v.is_finite() && v >= 0.0 && v <= std::f64::consts::PI) {
                return Err(ClutterError::InvalidParams(format!(
                    "{name} must lie in [0, pi], got {v}"
                )));
            }
        }
        if !(self.total_power.is_finite() && self.total_power > 0.0) {
            return Err(ClutterError::InvalidParams(format!(
                "total_power must be positive, got {}",
                self.total_power
            )));
        }
        if self.n_clusters > 0 && self.rays_per_cluster == 0 {
            return Err(ClutterError::InvalidParams(
                "rays_per_cluster must be positive when clusters exist".into(),
            ));
        }
        Ok(())
    }
}

/// One sampled cluster with normalized power and backing scatterers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClutterCluster {
    pub excess_delay_s: f64,
    /// Linear power after normalization to the scenario budget.
    pub power: f64,
    pub aoa_az_rad: f64,
    pub aoa_el_rad: f64,
    pub aod_az_rad: f64,
    pub aod_el_rad: f64,
    pub scatterers: Vec<Vec3>,
}

/// Raw cluster delays before sorting and shifting: `-r_tau sigma_tau ln(u)`,
/// an exponential with mean `r_tau * sigma_tau`.
pub fn sample_raw_delays(params: &ClutterParams, rng: &mut ChaCha12Rng) -> Vec<f64> {
    (0..params.n_clusters)
        .map(|_| {
            let u = 1.0 - rng.random::<f64>(); // (0, 1], keeps ln finite
            -params.delay_scaling * params.delay_spread_s * u.ln()
        })
        .collect()
}

/// Places a scatterer on the bistatic ellipsoid of `excess_delay_s` along the
/// arrival ray `(aoa_az, aoa_el)` leaving the receiver. Closed form: with
/// `v = tx - rx`, total range `R = |v| + c * excess`, and unit ray `d`, the
/// distance from rx is `t = (R^2 - |v|^2) / (2 (R - v . d))`.
pub fn place_scatterer(
    excess_delay_s: f64,
    aoa_az_rad: f64,
    aoa_el_rad: f64,
    tx: Vec3,
    rx: Vec3,
) -> Result<Vec3, ClutterError> {
    if !excess_delay_s.is_finite() || excess_delay_s < 0.0 {
        return Err(ClutterError::NoIntersection {
            excess_delay_s,
        });
    }
    let v = tx - rx;
    let base = v.norm();
    let d = direction_from_angles(aoa_az_rad, aoa_el_rad);
    let total_range = base + SPEED_OF_LIGHT * excess_delay_s;

    if SPEED_OF_LIGHT * excess_delay_s < 1e-9 {
        // Degenerate ellipsoid: the segment between the arrays. Only a ray
        // aimed at the transmitter touches it; we return the midpoint.
        if base < 1e-9 {
            return Ok(rx); // monostatic with zero excess: the array itself
        }
        if v.dot(d) >= base * (1.0 - 1e-9) {
            return Ok(rx + d * (base / 2.0));
        }
        return Err(ClutterError::NoIntersection { excess_delay_s });
    }

    let denom = 2.0 * (total_range - v.dot(d));
    if denom <= 1e-12 {
        return Err(ClutterError::NoIntersection { excess_delay_s });
    }
    let t = (total_range * total_range - base * base) / denom;
    if !(t.is_finite() && t > 0.0) {
        return Err(ClutterError::NoIntersection { excess_delay_s });
    }
    Ok(rx + d * t)
}

fn wrapped_normal(rng: &mut ChaCha12Rng, mean: f64, std: f64) -> f64 {
    let n = Normal::new(0.0, 1.0).expect("valid normal");
    crate::math::wrap_angle(mean + std * n.sample(rng))
}

fn clamped_elevation(rng: &mut ChaCha12Rng, mean: f64, std: f64) -> f64 {
    let n = Normal::new(0.0, 1.0).expect("valid normal");
    (mean + std * n.sample(rng)).clamp(
        -std::f64::consts::FRAC_PI_2 + 1e-6,
        std::f64::consts::FRAC_PI_2 - 1e-6,
    )
}

/// Samples the cluster set for a link. Delays are sorted and shifted so the
/// first cluster sits at zero excess delay; powers follow the shadowed
/// exponential profile `exp(-tau (r-1)/(r sigma)) * 10^(-Z/10)` normalized to
/// `total_power`. Deterministic in `(params, tx, rx, seed)`.
pub fn sample_clusters(
    params: &ClutterParams,
    tx: Vec3,
    rx: Vec3,
    seed: u64,
) -> Result<Vec<ClutterCluster>, ClutterError> {
    params.validate()?;
    if params.n_clusters == 0 {
        return Ok(Vec::new());
    }
    let mut rng = stream_rng(seed, &[domain::CLUTTER]);

    let mut delays = sample_raw_delays(params, &mut rng);
    delays.sort_by(|a, b| a.total_cmp(b));
    let min = delays[0];
    for d in delays.iter_mut() {
        *d -= min;
    }

    let shadow = Normal::new(0.0, params.shadowing_std_db.max(1e-12)).expect("valid normal");
    let mut powers: Vec<f64> = delays
        .iter()
        .map(|&tau| {
            let z = if params.shadowing_std_db > 0.0 {
                shadow.sample(&mut rng)
            } else {
                0.0
            };
            (-tau * (params.delay_scaling - 1.0)
                / (params.delay_scaling * params.delay_spread_s))
                .exp()
                * 10f64.powf(-z / 10.0)
        })
        .collect();
    let sum: f64 = powers.iter().sum();
    for p in powers.iter_mut() {
        *p *= params.total_power / sum;
    }

    let (bearing_aoa_az, bearing_aoa_el) = if (tx - rx).norm() > 1e-9 {
        angles_of_direction(tx - rx)
    } else {
        (0.0, 0.0)
    };
    let (bearing_aod_az, bearing_aod_el) = if (rx - tx).norm() > 1e-9 {
        angles_of_direction(rx - tx)
    } else {
        (0.0, 0.0)
    };

    let mut clusters = Vec::with_capacity(params.n_clusters);
    for (&excess, &power) in delays.iter().zip(powers.iter()) {
        let aoa_az = wrapped_normal(&mut rng, bearing_aoa_az, params.azimuth_spread_arrival_rad);
        let aoa_el = clamped_elevation(
            &mut rng,
            bearing_aoa_el,
            params.elevation_spread_arrival_rad,
        );
        let aod_az = wrapped_normal(&mut rng, bearing_aod_az, params.azimuth_spread_departure_rad);
        let aod_el = clamped_elevation(
            &mut rng,
            bearing_aod_el,
            params.elevation_spread_departure_rad,
        );

        let ray_az_std = params.azimuth_spread_arrival_rad * INTRA_CLUSTER_SPREAD_RATIO;
        let ray_el_std = params.elevation_spread_arrival_rad * INTRA_CLUSTER_SPREAD_RATIO;
        let mut scatterers = Vec::with_capacity(params.rays_per_cluster);
        for ri in 0..params.rays_per_cluster {
            let ray_az = wrapped_normal(&mut rng, aoa_az, ray_az_std);
            let ray_el = clamped_elevation(&mut rng, aoa_el, ray_el_std);
            let placed = place_scatterer(excess, ray_az, ray_el, tx, rx).unwrap_or_else(|_| {
                // Zero-excess cluster with a ray that misses the degenerate
                // ellipsoid: spread scatterers along the direct segment.
                let frac = (ri as f64 + 1.0) / (params.rays_per_cluster as f64 + 1.0);
                rx + (tx - rx) * frac
            });
            scatterers.push(placed);
        }
        clusters.push(ClutterCluster {
            excess_delay_s: excess,
            power,
            aoa_az_rad: aoa_az,
            aoa_el_rad: aoa_el,
            aod_az_rad: aod_az,
            aod_el_rad: aod_el,
            scatterers,
        });
    }
    Ok(clusters)
}

/// Expands clusters into per-ray propagation paths. Each ray carries power
/// `cluster.power / rays`, a uniform random phase, zero Doppler, and angles
/// taken from its actual scatterer geometry. Deterministic in
/// `(clusters, tx, rx, seed)`.
pub fn clutter_paths(
    clusters: &[ClutterCluster],
    tx: Vec3,
    rx: Vec3,
    seed: u64,
) -> Vec<PropagationPath> {
    let mut rng = stream_rng(seed, &[domain::CLUTTER_PHASE]);
    // Scatterers sit on ellipsoids of non-negative excess delay, so the true
    // bounce range is never shorter than the direct range; re-deriving it
    // from the placed position can round an ulp under for a zero-excess
    // cluster, so clamp to keep causality exact.
    let direct_delay = (rx - tx).norm() / SPEED_OF_LIGHT;
    let mut paths = Vec::new();
    for (ci, cluster) in clusters.iter().enumerate() {
        if cluster.scatterers.is_empty() {
            continue;
        }
        let ray_amp = (cluster.power / cluster.scatterers.len() as f64).sqrt();
        for (ri, &s) in cluster.scatterers.iter().enumerate() {
            let phase = rng.random_range(0.0..2.0 * std::f64::consts::PI);
            let d_tx = (s - tx).norm();
            let d_rx = (s - rx).norm();
            let (aod_az, aod_el) = angles_of_direction(s - tx);
            let (aoa_az, aoa_el) = angles_of_direction(s - rx);
            paths.push(PropagationPath {
                kind: PathKind::Clutter,
                delay_s: ((d_tx + d_rx) / SPEED_OF_LIGHT).max(direct_delay),
                amplitude: Complex64::from_polar(ray_amp, phase),
                doppler_hz: 0.0,
                freq_exponent: 0.0,
                aod_az_rad: aod_az,
                aod_el_rad: aod_el,
                aoa_az_rad: aoa_az,
                aoa_el_rad: aoa_el,
                waypoints: vec![tx, s, rx],
                source: PathSource {
                    target: None,
                    center: None,
                    cluster: Some(ci),
                    ray: Some(ri),
                },
            });
        }
    }
    paths
}

#[derive(Debug, Deserialize)]
struct ScenarioTableEntry {
    n_clusters: usize,
    delay_scaling: f64,
    delay_spread_ns: f64,
    shadowing_std_db: f64,
    azimuth_spread_arrival_deg: f64,
    azimuth_spread_departure_deg: f64,
    elevation_spread_arrival_deg: f64,
    elevation_spread_departure_deg: f64,
    total_power_db: f64,
    rays_per_cluster: usize,
}

#[derive(Debug, Deserialize)]
struct MaterialTable {
    concrete_db: f64,
    glass_db: f64,
    metal_db: f64,
    foliage_db: f64,
    other_db: f64,
}

#[derive(Debug, Deserialize)]
struct DefaultsFile {
    urban_street: ScenarioTableEntry,
    highway: ScenarioTableEntry,
    indoor: ScenarioTableEntry,
    open_field: ScenarioTableEntry,
    other: ScenarioTableEntry,
    materials: MaterialTable,
}

fn defaults() -> &'static DefaultsFile {
    static TABLE: OnceLock<DefaultsFile> = OnceLock::new();
    TABLE.get_or_init(|| {
        toml::from_str(include_str!("../../../configs/scenario_clutter.toml"))
            .expect("embedded scenario table is well-formed")
    })
}

impl From<&ScenarioTableEntry> for ClutterParams {
    fn from(e: &ScenarioTableEntry) -> Self {
        let deg = std::f64::consts::PI / 180.0;
        ClutterParams {
            n_clusters: e.n_clusters,
            delay_scaling: e.delay_scaling,
            delay_spread_s: e.delay_spread_ns * 1e-9,
            shadowing_std_db: e.shadowing_std_db,
            azimuth_spread_arrival_rad: e.azimuth_spread_arrival_deg * deg,
            azimuth_spread_departure_rad: e.azimuth_spread_departure_deg * deg,
            elevation_spread_arrival_rad: e.elevation_spread_arrival_deg * deg,
            elevation_spread_departure_rad: e.elevation_spread_departure_deg * deg,
            total_power: 10f64.powf(e.total_power_db / 10.0),
            rays_per_cluster: e.rays_per_cluster,
        }
    }
}

/// Default clutter statistics for a scenario class.
pub fn scenario_params(class: ScenarioClass) -> ClutterParams {
    let t = defaults();
    match class {
        ScenarioClass::UrbanStreet => (&t.urban_street).into(),
        ScenarioClass::Highway => (&t.highway).into(),
        ScenarioClass::Indoor => (&t.indoor).into(),
        ScenarioClass::OpenField => (&t.open_field).into(),
        ScenarioClass::Other => (&t.other).into(),
    }
}

/// One-way penetration loss in dB for an occluding material.
pub fn material_loss_db(material: MaterialClass) -> f64 {
    let m = &defaults().materials;
    match material {
        MaterialClass::Concrete => m.concrete_db,
        MaterialClass::Glass => m.glass_db,
        MaterialClass::Metal => m.metal_db,
        MaterialClass::Foliage => m.foliage_db,
        MaterialClass::Other => m.other_db,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params() -> ClutterParams {
        ClutterParams {
            n_clusters: 12,
            delay_scaling: 2.3,
            delay_spread_s: 100e-9,
            shadowing_std_db: 3.0,
            azimuth_spread_arrival_rad: 0.5,
            azimuth_spread_departure_rad: 0.4,
            elevation_spread_arrival_rad: 0.1,
            elevation_spread_departure_rad: 0.08,
            total_power: 1e-12,
            rays_per_cluster: 20,
        }
    }

    #[test]
    fn raw_delays_follow_the_exponential_law() {
        // One-sample Kolmogorov-Smirnov against Exp(mean = r_tau sigma_tau);
        // 1.63/sqrt(n) is the alpha = 0.01 critical value.
        let mut p = params();
        p.n_clusters = 4000;
        let mut rng = stream_rng(99, &[domain::CLUTTER]);
        let mut xs = sample_raw_delays(&p, &mut rng);
        xs.sort_by(|a, b| a.total_cmp(b));
        let mean = p.delay_scaling * p.delay_spread_s;
        let n = xs.len() as f64;
        let mut d_max: f64 = 0.0;
        for (i, &x) in xs.iter().enumerate() {
            let cdf = 1.0 - (-x / mean).exp();
            let hi = (i as f64 + 1.0) / n - cdf;
            let lo = cdf - i as f64 / n;
            d_max = d_max.max(hi).max(lo);
        }
        assert!(d_max < 1.63 / n.sqrt(), "KS statistic {d_max}");
    }

    #[test]
    fn cluster_powers_sum_to_budget_and_delays_start_at_zero() {
        let p = params();
        let tx = Vec3::new(-40.0, 0.0, 5.0);
        let rx = Vec3::new(40.0, 0.0, 5.0);
        let clusters = sample_clusters(&p, tx, rx, 5).unwrap();
        assert_eq!(clusters.len(), p.n_clusters);
        let total: f64 = clusters.iter().map(|c| c.power).sum();
        assert_relative_eq!(total, p.total_power, max_relative = 1e-12);
        assert_eq!(clusters[0].excess_delay_s, 0.0);
        for w in clusters.windows(2) {
            assert!(w[0].excess_delay_s <= w[1].excess_delay_s);
        }
    }

    #[test]
    fn single_cluster_without_shadowing_takes_all_power() {
        let mut p = params();
        p.n_clusters = 1;
        p.shadowing_std_db = 0.0;
        let clusters = sample_clusters(&p, Vec3::ZERO, Vec3::new(10.0, 0.0, 0.0), 1).unwrap();
        assert_eq!(clusters[0].power, p.total_power);
    }

    #[test]
    fn ellipse_placement_broadside_fixture() {
        // tx=(-50,0,0), rx=(50,0,0), excess range 30 m, ray along +y from rx:
        // distance from rx must be (130^2 - 100^2) / (2 * 130).
        let tx = Vec3::new(-50.0, 0.0, 0.0);
        let rx = Vec3::new(50.0, 0.0, 0.0);
        let excess = 30.0 / SPEED_OF_LIGHT;
        let p = place_scatterer(excess, std::f64::consts::FRAC_PI_2, 0.0, tx, rx).unwrap();
        assert_relative_eq!(p.y(), 26.53846153846154, max_relative = 1e-12);
        assert_relative_eq!(p.x(), 50.0, epsilon = 1e-9);
        let range = (p - tx).norm() + (p - rx).norm();
        assert_relative_eq!(range, 130.0, max_relative = 1e-12);
    }

    #[test]
    fn ellipse_placement_preserves_total_range_for_random_rays() {
        let tx = Vec3::new(-30.0, 12.0, 4.0);
        let rx = Vec3::new(55.0, -8.0, 6.0);
        let base = (tx - rx).norm();
        let mut rng = stream_rng(3, &[domain::CLUTTER, 7]);
        for _ in 0..200 {
            let az = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
            let el = rng.random_range(-1.4..1.4);
            let excess = rng.random_range(1e-9..2e-6);
            let p = place_scatterer(excess, az, el, tx, rx).unwrap();
            let want = base + SPEED_OF_LIGHT * excess;
            let got = (p - tx).norm() + (p - rx).norm();
            assert_relative_eq!(got, want, max_relative = 1e-9);
        }
    }

    #[test]
    fn monostatic_placement_is_half_range() {
        let radar = Vec3::new(1.0, 2.0, 3.0);
        let excess = 200.0 / SPEED_OF_LIGHT;
        let p = place_scatterer(excess, 0.3, 0.1, radar, radar).unwrap();
        assert_relative_eq!((p - radar).norm(), 100.0, max_relative = 1e-12);
    }

    #[test]
    fn zero_excess_needs_ray_toward_transmitter() {
        let tx = Vec3::new(100.0, 0.0, 0.0);
        let rx = Vec3::ZERO;
        let mid = place_scatterer(0.0, 0.0, 0.0, tx, rx).unwrap();
        assert_relative_eq!(mid.x(), 50.0, epsilon = 1e-9);
        let err = place_scatterer(0.0, 1.0, 0.0, tx, rx).unwrap_err();
        assert!(matches!(err, ClutterError::NoIntersection { .. }));
    }

    #[test]
    fn negative_excess_is_rejected() {
        assert!(place_scatterer(-1e-9, 0.0, 0.0, Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn clutter_path_delays_match_scatterer_geometry_and_budget() {
        let p = params();
        let tx = Vec3::new(-40.0, 0.0, 5.0);
        let rx = Vec3::new(40.0, 0.0, 5.0);
        let clusters = sample_clusters(&p, tx, rx, 5).unwrap();
        let paths = clutter_paths(&clusters, tx, rx, 5);
        assert_eq!(paths.len(), p.n_clusters * p.rays_per_cluster);

        let los = (tx - rx).norm() / SPEED_OF_LIGHT;
        let total: f64 = paths.iter().map(|p| p.amplitude.norm_sqr()).sum();
        assert_relative_eq!(total, p.total_power, max_relative = 1e-12);
        for path in &paths {
            assert!(path.delay_s >= los - 1e-15, "clutter must not precede line of sight");
            assert_eq!(path.doppler_hz, 0.0);
            let s = path.waypoints[1];
            let geo = ((s - tx).norm() + (s - rx).norm()) / SPEED_OF_LIGHT;
            assert_relative_eq!(path.delay_s, geo, max_relative = 1e-12);
        }
    }

    #[test]
    fn clutter_sampling_is_deterministic() {
        let p = params();
        let a = sample_clusters(&p, Vec3::ZERO, Vec3::new(10.0, 0.0, 0.0), 42).unwrap();
        let b = sample_clusters(&p, Vec3::ZERO, Vec3::new(10.0, 0.0, 0.0), 42).unwrap();
        assert_eq!(a, b);
        let c = sample_clusters(&p, Vec3::ZERO, Vec3::new(10.0, 0.0, 0.0), 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn invalid_params_are_rejected() {
        let mut p = params();
        p.delay_scaling = 1.0;
        assert!(p.validate().is_err());
        let mut p = params();
        p.delay_spread_s = 0.0;
        assert!(p.validate().is_err());
        let mut p = params();
        p.total_power = 0.0;
        assert!(p.validate().is_err());
        let mut p = params();
        p.rays_per_cluster = 0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn scenario_table_loads_and_converts_units() {
        let urban = scenario_params(ScenarioClass::UrbanStreet);
        urban.validate().unwrap();
        assert_eq!(urban.n_clusters, 12);
        assert_relative_eq!(urban.delay_spread_s, 120e-9, max_relative = 1e-12);
        assert_relative_eq!(
            urban.azimuth_spread_arrival_rad,
            35.0 * std::f64::consts::PI / 180.0,
            max_relative = 1e-12
        );
        for class in [
            ScenarioClass::Highway,
            ScenarioClass::Indoor,
            ScenarioClass::OpenField,
            ScenarioClass::Other,
        ] {
            scenario_params(class).validate().unwrap();
        }
    }

    #[test]
    fn material_losses_follow_the_table() {
        assert_eq!(material_loss_db(MaterialClass::Concrete), 25.0);
        assert_eq!(material_loss_db(MaterialClass::Glass), 8.0);
        assert!(material_loss_db(MaterialClass::Metal).is_infinite());
        assert_eq!(material_loss_db(MaterialClass::Foliage), 12.0);
        assert_eq!(material_loss_db(MaterialClass::Other), 15.0);
    }
}
