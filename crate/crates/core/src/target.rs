//! Attributed scattering-center target model.
//!
//! A target is a small set of scattering centers attached to a rigid body
//! frame. Each center carries a complex-free amplitude envelope, a frequency
//! dependence exponent, and a Gaussian aspect window; centers may reference a
//! rotating part (wheel, rotor) whose lever arm adds micro-motion on top of
//! the bulk translation. Libraries are per-class collections of center sets
//! indexed by view direction.

use crate::channel::{PathKind, PathSource, PropagationPath};
use crate::math::{angle_between, angles_of_direction, Vec3, SPEED_OF_LIGHT};
use crate::rng::{domain, stream_rng};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::str::FromStr;
use thiserror::Error;

/// Number of scattering centers in every synthesized set.
pub const CENTERS_PER_SET: usize = 10;
/// Maximum rotating parts tracked per target.
pub const MAX_PARTS: usize = 4;
/// Admissible frequency dependence exponents (half-integer steps).
pub const ALPHA_VALUES: [f64; 5] = [-1.0, -0.5, 0.0, 0.5, 1.0];

#[derive(Debug, Error)]
pub enum TargetError {
    #[error("unsupported target class `{0}`")]
    UnsupportedClass(String),
    #[error("scattering center references unknown part id {0}")]
    UnknownPartId(usize),
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),
    #[error("invalid scattering center: {0}")]
    InvalidCenter(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Supported target classes in the scattering library.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetClass {
    Vehicle,
    Uav,
}

impl TargetClass {
    pub const ALL: [TargetClass; 2] = [TargetClass::Vehicle, TargetClass::Uav];

    pub fn label(&self) -> &'static str {
        match self {
            TargetClass::Vehicle => "vehicle",
            TargetClass::Uav => "uav",
        }
    }

    fn domain_word(&self) -> u64 {
        match self {
            TargetClass::Vehicle => 0,
            TargetClass::Uav => 1,
        }
    }
}

impl FromStr for TargetClass {
    type Err = TargetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "vehicle" => Ok(TargetClass::Vehicle),
            "uav" => Ok(TargetClass::Uav),
            other => Err(TargetError::UnsupportedClass(other.to_string())),
        }
    }
}

/// One attributed scattering center in the target body frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatteringCenter {
    pub local_position: Vec3,
    /// Real amplitude envelope at the carrier; strictly positive.
    pub amplitude: f64,
    /// Frequency dependence exponent, one of [`ALPHA_VALUES`].
    pub alpha: f64,
    /// Unit direction of maximum response in the body frame.
    pub aspect_center: Vec3,
    /// Gaussian aspect window width in radians.
    pub aspect_width: f64,
    /// Rotating part this center rides on, if any.
    pub part_id: Option<usize>,
}

impl ScatteringCenter {
    pub fn validate(&self) -> Result<(), TargetError> {
        if !(self.amplitude.is_finite() && self.amplitude > 0.0) {
            return Err(TargetError::InvalidCenter(format!(
                "amplitude must be positive, got {}",
                self.amplitude
            )));
        }
        if !ALPHA_VALUES.iter().any(|a| *a == self.alpha) {
            return Err(TargetError::InvalidCenter(format!(
                "alpha {} is not an admissible exponent",
                self.alpha
            )));
        }
        if !(self.aspect_width.is_finite() && self.aspect_width > 0.0) {
            return Err(TargetError::InvalidCenter(format!(
                "aspect width must be positive, got {}",
                self.aspect_width
            )));
        }
        if self.aspect_center.normalized(1e-9).is_none() {
            return Err(TargetError::InvalidCenter(
                "aspect center direction must be non-zero".into(),
            ));
        }
        if !self.local_position.is_finite() {
            return Err(TargetError::InvalidCenter("position must be finite".into()));
        }
        Ok(())
    }
}

/// Rotating sub-structure; the lever arm spins about `axis` (body frame) at
/// `rate_hz` revolutions per second.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotatingPart {
    pub part_id: usize,
    pub axis: Vec3,
    pub rate_hz: f64,
    pub phase_rad: f64,
    pub lever_arm: Vec3,
}

/// Bulk kinematics plus rotating parts for one target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotionState {
    pub position: Vec3,
    pub velocity: Vec3,
    pub heading_rad: f64,
    pub parts: Vec<RotatingPart>,
}

impl MotionState {
    /// A static pose with no rotating parts.
    pub fn stationary(position: Vec3) -> Self {
        MotionState {
            position,
            velocity: Vec3::ZERO,
            heading_rad: 0.0,
            parts: Vec::new(),
        }
    }
}

/// One library entry: a center set valid around a view direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McsSet {
    pub class: TargetClass,
    pub view_direction: Vec3,
    pub centers: Vec<ScatteringCenter>,
}

fn part_offset(part: &RotatingPart, time_s: f64) -> Vec3 {
    let axis = part
        .axis
        .normalized(1e-12)
        .unwrap_or(Vec3::new(0.0, 0.0, 1.0));
    let angle = 2.0 * std::f64::consts::PI * part.rate_hz * time_s + part.phase_rad;
    part.lever_arm.rotate_about(axis, angle)
}

/// World position of a center at `time_s`, including part micro-motion and
/// the heading rotation of the body frame.
pub fn center_position(
    center: &ScatteringCenter,
    motion: &MotionState,
    time_s: f64,
) -> Result<Vec3, TargetError> {
    let mut body = center.local_position;
    if let Some(pid) = center.part_id {
        let part = motion
            .parts
            .iter()
            .find(|p| p.part_id == pid)
            .ok_or(TargetError::UnknownPartId(pid))?;
        body += part_offset(part, time_s);
    }
    Ok(motion.position + motion.velocity * time_s + body.rotate_z(motion.heading_rad))
}

/// Analytic world velocity of a center at `time_s`.
pub fn center_velocity(
    center: &ScatteringCenter,
    motion: &MotionState,
    time_s: f64,
) -> Result<Vec3, TargetError> {
    let mut v = motion.velocity;
    if let Some(pid) = center.part_id {
        let part = motion
            .parts
            .iter()
            .find(|p| p.part_id == pid)
            .ok_or(TargetError::UnknownPartId(pid))?;
        let axis = part
            .axis
            .normalized(1e-12)
            .unwrap_or(Vec3::new(0.0, 0.0, 1.0));
        let omega = axis * (2.0 * std::f64::consts::PI * part.rate_hz);
        let spinning = omega.cross(part_offset(part, time_s));
        v += spinning.rotate_z(motion.heading_rad);
    }
    Ok(v)
}

/// Amplitude response of a center seen from `view_dir` (world frame, pointing
/// from the center toward the sensor) at frequency `f_hz`:
/// `amplitude * (f/f_c)^alpha * exp(-angle^2 / (2 width^2))`.
pub fn asc_gain(
    center: &ScatteringCenter,
    f_hz: f64,
    carrier_hz: f64,
    view_dir: Vec3,
    heading_rad: f64,
) -> f64 {
    let aspect_world = center.aspect_center.rotate_z(heading_rad);
    let angle = angle_between(view_dir, aspect_world);
    let freq_scale = if center.alpha == 0.0 {
        1.0
    } else {
        (f_hz / carrier_hz).powf(center.alpha)
    };
    center.amplitude * freq_scale * (-angle * angle / (2.0 * center.aspect_width.powi(2))).exp()
}

/// Projects a center set into discrete propagation paths for a tx/rx pair at
/// `time_s`. Aspect gain is evaluated along the bistatic bisector; Doppler is
/// the analytic range-rate of the total path length.
#[allow(clippy::too_many_arguments)]
pub fn target_paths(
    centers: &[ScatteringCenter],
    motion: &MotionState,
    tx: Vec3,
    rx: Vec3,
    carrier_hz: f64,
    time_s: f64,
    target_index: usize,
) -> Result<Vec<PropagationPath>, TargetError> {
    let mut paths = Vec::with_capacity(centers.len());
    for (ci, center) in centers.iter().enumerate() {
        let p = center_position(center, motion, time_s)?;
        let to_tx = tx - p;
        let to_rx = rx - p;
        let d_tx = to_tx.norm();
        let d_rx = to_rx.norm();
        if d_tx < 1e-6 || d_rx < 1e-6 {
            return Err(TargetError::DegenerateGeometry(format!(
                "scattering center {ci} coincides with an array position"
            )));
        }
        let v = center_velocity(center, motion, time_s)?;
        // d/dt (|p - tx| + |p - rx|) with static arrays.
        let range_rate = (p - tx) * (1.0 / d_tx) + (p - rx) * (1.0 / d_rx);
        let doppler_hz = -(carrier_hz / SPEED_OF_LIGHT) * range_rate.dot(v);

        let bisector = (to_tx * (1.0 / d_tx) + to_rx * (1.0 / d_rx))
            .normalized(1e-9)
            .unwrap_or(to_rx * (1.0 / d_rx));
        let gain = asc_gain(center, carrier_hz, carrier_hz, bisector, motion.heading_rad);
        let spread = crate::channel::spreading(&[d_tx, d_rx], carrier_hz)
            .map_err(|e| TargetError::DegenerateGeometry(e.to_string()))?;

        let (aod_az, aod_el) = angles_of_direction(p - tx);
        let (aoa_az, aoa_el) = angles_of_direction(p - rx);
        paths.push(PropagationPath {
            kind: PathKind::Target,
            delay_s: (d_tx + d_rx) / SPEED_OF_LIGHT,
            amplitude: Complex64::new(gain * spread, 0.0),
            doppler_hz,
            freq_exponent: center.alpha,
            aod_az_rad: aod_az,
            aod_el_rad: aod_el,
            aoa_az_rad: aoa_az,
            aoa_el_rad: aoa_el,
            waypoints: vec![tx, p, rx],
            source: PathSource {
                target: Some(target_index),
                center: Some(ci),
                cluster: None,
                ray: None,
            },
        });
    }
    Ok(paths)
}

/// Body-frame bounding box of a class (min, max corners).
pub fn class_extent(class: TargetClass) -> (Vec3, Vec3) {
    match class {
        TargetClass::Vehicle => (Vec3::new(-2.25, -0.9, 0.0), Vec3::new(2.25, 0.9, 1.5)),
        TargetClass::Uav => (Vec3::new(-0.3, -0.3, -0.1), Vec3::new(0.3, 0.3, 0.15)),
    }
}

/// Default rotating-part fixtures for a class, one per supplied rate (up to
/// [`MAX_PARTS`]): wheels spin about the body y axis, rotors about z.
pub fn default_parts(class: TargetClass, rates_hz: &[f64]) -> Vec<RotatingPart> {
    let (axis, lever) = match class {
        TargetClass::Vehicle => (Vec3::new(0.0, 1.0, 0.0), Vec3::new(0.3, 0.0, 0.0)),
        TargetClass::Uav => (Vec3::new(0.0, 0.0, 1.0), Vec3::new(0.15, 0.0, 0.0)),
    };
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    rates_hz
        .iter()
        .take(MAX_PARTS)
        .enumerate()
        .map(|(i, &rate)| RotatingPart {
            part_id: i,
            axis,
            rate_hz: rate.max(0.0),
            phase_rad: golden * i as f64,
            lever_arm: lever,
        })
        .collect()
}

fn part_hubs(class: TargetClass) -> [Vec3; MAX_PARTS] {
    match class {
        TargetClass::Vehicle => [
            Vec3::new(1.4, 0.75, 0.3),
            Vec3::new(1.4, -0.75, 0.3),
            Vec3::new(-1.4, 0.75, 0.3),
            Vec3::new(-1.4, -0.75, 0.3),
        ],
        TargetClass::Uav => [
            Vec3::new(0.15, 0.15, 0.05),
            Vec3::new(0.15, -0.15, 0.05),
            Vec3::new(-0.15, 0.15, 0.05),
            Vec3::new(-0.15, -0.15, 0.05),
        ],
    }
}

fn random_unit(rng: &mut ChaCha12Rng) -> Vec3 {
    let normal = Normal::new(0.0, 1.0).expect("valid normal");
    loop {
        let v = Vec3::new(
            normal.sample(rng),
            normal.sample(rng),
            normal.sample(rng),
        );
        if let Some(u) = v.normalized(1e-6) {
            return u;
        }
    }
}

/// Draws a fresh center set from the class prior. The first [`MAX_PARTS`]
/// centers sit on part hubs and carry `part_id 0..MAX_PARTS`; the rest are
/// static body centers.
pub fn sample_center_set(class: TargetClass, rng: &mut ChaCha12Rng) -> Vec<ScatteringCenter> {
    let (lo, hi) = class_extent(class);
    let mid = (lo + hi) * 0.5;
    let log_amp: Normal<f64> = Normal::new(0.0, 0.35).expect("valid normal");
    let (part_amp_scale, body_amp_scale) = match class {
        TargetClass::Vehicle => (0.5, 1.0),
        TargetClass::Uav => (0.35, 0.5),
    };
    let mut centers = Vec::with_capacity(CENTERS_PER_SET);

    for (i, hub) in part_hubs(class).into_iter().enumerate() {
        let aspect = (random_unit(rng) + Vec3::new(0.0, 0.0, 0.4))
            .normalized(1e-9)
            .expect("biased unit vector is non-zero");
        centers.push(ScatteringCenter {
            local_position: hub,
            amplitude: part_amp_scale * log_amp.sample(rng).exp(),
            alpha: ALPHA_VALUES[rng.random_range(0..ALPHA_VALUES.len())],
            aspect_center: aspect,
            aspect_width: rng.random_range(0.8..1.6),
            part_id: Some(i),
        });
    }

    while centers.len() < CENTERS_PER_SET {
        let pos = Vec3::new(
            rng.random_range(lo.x()..hi.x()),
            rng.random_range(lo.y()..hi.y()),
            rng.random_range(lo.z()..hi.z()),
        );
        let outward = (pos - mid + random_unit(rng) * 0.2)
            .normalized(1e-9)
            .unwrap_or(Vec3::new(1.0, 0.0, 0.0));
        centers.push(ScatteringCenter {
            local_position: pos,
            amplitude: body_amp_scale * log_amp.sample(rng).exp(),
            alpha: ALPHA_VALUES[rng.random_range(0..ALPHA_VALUES.len())],
            aspect_center: outward,
            aspect_width: rng.random_range(0.3..1.2),
            part_id: None,
        });
    }
    centers
}

/// Direction of view `v` on the Fibonacci sphere lattice of `n` points.
pub fn fibonacci_view(v: usize, n: usize) -> Vec3 {
    let n = n.max(1) as f64;
    let z = 1.0 - 2.0 * (v as f64 + 0.5) / n;
    let r = (1.0 - z * z).max(0.0).sqrt();
    let phi = std::f64::consts::PI * (3.0 - 5f64.sqrt()) * v as f64;
    Vec3::new(r * phi.cos(), r * phi.sin(), z)
}

struct Modulator {
    freq: f64,
    phase: f64,
}

impl Modulator {
    fn draw(rng: &mut ChaCha12Rng) -> Self {
        Modulator {
            freq: rng.random_range(1..4) as f64,
            phase: rng.random_range(0.0..2.0 * std::f64::consts::PI),
        }
    }

    fn value(&self, frac: f64) -> f64 {
        (2.0 * std::f64::consts::PI * self.freq * frac + self.phase).sin()
    }
}

struct CenterModulation {
    position: [Modulator; 3],
    amplitude: Modulator,
    width: Modulator,
    aspect_turn: Modulator,
}

/// Synthesizes a per-class library of `n_views` center sets. Views lie on a
/// Fibonacci sphere; attributes are a base draw from the class prior plus a
/// low-amplitude sinusoidal modulation over the view index, so adjacent
/// views differ smoothly. Deterministic in `(class, n_views, seed)`.
pub fn synth_library(
    class: TargetClass,
    n_views: usize,
    seed: u64,
) -> Result<Vec<McsSet>, TargetError> {
    if n_views == 0 {
        return Err(TargetError::InvalidArgument(
            "library needs at least one view".into(),
        ));
    }
    let mut rng = stream_rng(seed, &[domain::LIBRARY, class.domain_word()]);
    let base = sample_center_set(class, &mut rng);
    let mods: Vec<CenterModulation> = (0..base.len())
        .map(|_| CenterModulation {
            position: [
                Modulator::draw(&mut rng),
                Modulator::draw(&mut rng),
                Modulator::draw(&mut rng),
            ],
            amplitude: Modulator::draw(&mut rng),
            width: Modulator::draw(&mut rng),
            aspect_turn: Modulator::draw(&mut rng),
        })
        .collect();

    let (lo, hi) = class_extent(class);
    let extent = hi - lo;
    let mut library = Vec::with_capacity(n_views);
    for v in 0..n_views {
        let frac = v as f64 / n_views as f64;
        let centers = base
            .iter()
            .zip(mods.iter())
            .map(|(c, m)| {
                let mut pos = c.local_position;
                // Part hubs stay put; body centers wander within the box.
                if c.part_id.is_none() {
                    pos += Vec3::new(
                        0.05 * extent.x() * m.position[0].value(frac),
                        0.05 * extent.y() * m.position[1].value(frac),
                        0.05 * extent.z() * m.position[2].value(frac),
                    );
                    pos = Vec3::new(
                        pos.x().clamp(lo.x(), hi.x()),
                        pos.y().clamp(lo.y(), hi.y()),
                        pos.z().clamp(lo.z(), hi.z()),
                    );
                }
                ScatteringCenter {
                    local_position: pos,
                    amplitude: c.amplitude * (0.15 * m.amplitude.value(frac)).exp(),
                    alpha: c.alpha,
                    aspect_center: c
                        .aspect_center
                        .rotate_z(0.15 * m.aspect_turn.value(frac)),
                    aspect_width: (c.aspect_width * (1.0 + 0.1 * m.width.value(frac)))
                        .clamp(0.1, 2.0),
                    part_id: c.part_id,
                }
            })
            .collect();
        library.push(McsSet {
            class,
            view_direction: fibonacci_view(v, n_views),
            centers,
        });
    }
    Ok(library)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn plain_center() -> ScatteringCenter {
        ScatteringCenter {
            local_position: Vec3::ZERO,
            amplitude: 1.0,
            alpha: 0.0,
            aspect_center: Vec3::new(1.0, 0.0, 0.0),
            aspect_width: 0.5,
            part_id: None,
        }
    }

    #[test]
    fn gain_at_three_sigma_aspect_offset() {
        let c = plain_center();
        // Angle of exactly 3 widths off the aspect peak: exp(-9/2).
        let w = c.aspect_width;
        let view = Vec3::new((3.0 * w).cos(), (3.0 * w).sin(), 0.0);
        let g = asc_gain(&c, 10e9, 10e9, view, 0.0);
        assert_relative_eq!(g, 0.011108996538242306, max_relative = 1e-9);
    }

    #[test]
    fn gain_frequency_scaling_follows_alpha() {
        let mut c = plain_center();
        c.alpha = 1.0;
        let g_lo = asc_gain(&c, 9.75e9, 10e9, Vec3::new(1.0, 0.0, 0.0), 0.0);
        let g_hi = asc_gain(&c, 10.25e9, 10e9, Vec3::new(1.0, 0.0, 0.0), 0.0);
        assert_relative_eq!(g_lo, 0.975, max_relative = 1e-12);
        assert_relative_eq!(g_hi, 1.025, max_relative = 1e-12);
        c.alpha = -0.5;
        let g = asc_gain(&c, 9e9, 10e9, Vec3::new(1.0, 0.0, 0.0), 0.0);
        assert_relative_eq!(g, (0.9f64).powf(-0.5), max_relative = 1e-12);
    }

    #[test]
    fn heading_rotates_aspect_window() {
        let c = plain_center();
        // Body looks along +x; heading pi/2 turns it to +y.
        let g = asc_gain(&c, 10e9, 10e9, Vec3::new(0.0, 1.0, 0.0), std::f64::consts::FRAC_PI_2);
        assert_relative_eq!(g, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn monostatic_closing_doppler_matches_two_v_over_lambda() {
        let c = plain_center();
        let motion = MotionState {
            position: Vec3::new(100.0, 0.0, 0.0),
            velocity: Vec3::new(-30.0, 0.0, 0.0),
            heading_rad: 0.0,
            parts: Vec::new(),
        };
        let radar = Vec3::ZERO;
        let paths = target_paths(&[c], &motion, radar, radar + Vec3::new(0.0, 0.0, 1e-5), 10e9, 0.0, 0)
            .unwrap();
        // 2 v f_c / c for 30 m/s at 10 GHz.
        assert_relative_eq!(paths[0].doppler_hz, 2001.3845711889123, max_relative = 1e-6);
        assert!(paths[0].doppler_hz > 0.0, "closing target has positive Doppler");
    }

    #[test]
    fn rotating_part_doppler_matches_finite_difference() {
        let mut c = plain_center();
        c.part_id = Some(0);
        c.local_position = Vec3::new(0.5, 0.2, 0.1);
        let motion = MotionState {
            position: Vec3::new(60.0, -20.0, 5.0),
            velocity: Vec3::new(12.0, 3.0, 0.0),
            heading_rad: 0.7,
            parts: default_parts(TargetClass::Uav, &[90.0]),
        };
        let tx = Vec3::new(0.0, 0.0, 8.0);
        let rx = Vec3::new(4.0, 0.0, 8.0);

        let total_len = |t: f64| {
            let p = center_position(&c, &motion, t).unwrap();
            (p - tx).norm() + (p - rx).norm()
        };
        for &t in &[0.0, 1.3e-3, 0.011, 0.4] {
            let h = 1e-7;
            let fd = (total_len(t + h) - total_len(t - h)) / (2.0 * h);
            let paths = target_paths(&[c.clone()], &motion, tx, rx, 10e9, t, 0).unwrap();
            let analytic = -paths[0].doppler_hz * SPEED_OF_LIGHT / 10e9;
            let tol = 1e-6 * fd.abs().max(1.0);
            assert!(
                (fd - analytic).abs() < tol,
                "t={t}: fd={fd} analytic={analytic}"
            );
        }
    }

    #[test]
    fn missing_part_is_an_error() {
        let mut c = plain_center();
        c.part_id = Some(3);
        let motion = MotionState::stationary(Vec3::ZERO);
        let err = center_position(&c, &motion, 0.0).unwrap_err();
        assert!(matches!(err, TargetError::UnknownPartId(3)));
    }

    #[test]
    fn coincident_center_and_array_is_degenerate() {
        let c = plain_center();
        let motion = MotionState::stationary(Vec3::new(10.0, 0.0, 0.0));
        let err = target_paths(
            &[c],
            &motion,
            Vec3::new(10.0, 0.0, 0.0),
            Vec3::new(0.0, 0.0, 0.0),
            10e9,
            0.0,
            0,
        )
        .unwrap_err();
        assert!(matches!(err, TargetError::DegenerateGeometry(_)));
    }

    #[test]
    fn bistatic_delay_is_sum_of_legs() {
        let c = plain_center();
        let motion = MotionState::stationary(Vec3::new(0.0, 40.0, 0.0));
        let tx = Vec3::new(-30.0, 0.0, 0.0);
        let rx = Vec3::new(30.0, 0.0, 0.0);
        let paths = target_paths(&[c], &motion, tx, rx, 10e9, 0.0, 0).unwrap();
        let want = ((30f64.powi(2) + 40f64.powi(2)).sqrt() * 2.0) / SPEED_OF_LIGHT;
        assert_relative_eq!(paths[0].delay_s, want, max_relative = 1e-12);
    }

    #[test]
    fn library_is_deterministic_in_seed() {
        let a = synth_library(TargetClass::Vehicle, 16, 7).unwrap();
        let b = synth_library(TargetClass::Vehicle, 16, 7).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        let c = synth_library(TargetClass::Vehicle, 16, 8).unwrap();
        assert_ne!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&c).unwrap()
        );
    }

    #[test]
    fn library_centers_stay_in_class_box_and_validate() {
        for class in TargetClass::ALL {
            let lib = synth_library(class, 48, 3).unwrap();
            assert_eq!(lib.len(), 48);
            let (lo, hi) = class_extent(class);
            for set in &lib {
                assert_eq!(set.centers.len(), CENTERS_PER_SET);
                assert_relative_eq!(set.view_direction.norm(), 1.0, epsilon = 1e-12);
                for c in &set.centers {
                    c.validate().unwrap();
                    assert!(c.local_position.x() >= lo.x() - 1e-12);
                    assert!(c.local_position.x() <= hi.x() + 1e-12);
                    assert!(c.local_position.y() >= lo.y() - 1e-12);
                    assert!(c.local_position.y() <= hi.y() + 1e-12);
                    assert!(c.local_position.z() >= lo.z() - 1e-12);
                    assert!(c.local_position.z() <= hi.z() + 1e-12);
                }
            }
        }
    }

    #[test]
    fn adjacent_library_views_differ_smoothly() {
        let lib = synth_library(TargetClass::Vehicle, 64, 11).unwrap();
        let (lo, hi) = class_extent(TargetClass::Vehicle);
        let scale = (hi - lo).norm();
        for w in lib.windows(2) {
            for (a, b) in w[0].centers.iter().zip(w[1].centers.iter()) {
                assert!(
                    (a.local_position - b.local_position).norm() < 0.1 * scale,
                    "adjacent views moved a center too far"
                );
                let ratio = a.amplitude / b.amplitude;
                assert!(ratio > 0.8 && ratio < 1.25, "amplitude jump {ratio}");
                assert_eq!(a.alpha, b.alpha, "alpha is a per-center constant");
            }
        }
    }

    #[test]
    fn first_centers_ride_on_parts() {
        let lib = synth_library(TargetClass::Uav, 4, 1).unwrap();
        for (i, c) in lib[0].centers.iter().take(MAX_PARTS).enumerate() {
            assert_eq!(c.part_id, Some(i));
        }
        for c in lib[0].centers.iter().skip(MAX_PARTS) {
            assert_eq!(c.part_id, None);
        }
    }

    #[test]
    fn class_parse_round_trip_and_unknown() {
        assert_eq!("vehicle".parse::<TargetClass>().unwrap(), TargetClass::Vehicle);
        assert_eq!("UAV".parse::<TargetClass>().unwrap(), TargetClass::Uav);
        assert!(matches!(
            "boat".parse::<TargetClass>(),
            Err(TargetError::UnsupportedClass(_))
        ));
    }

    #[test]
    fn zero_views_is_an_error() {
        assert!(matches!(
            synth_library(TargetClass::Uav, 0, 1),
            Err(TargetError::InvalidArgument(_))
        ));
    }
}
