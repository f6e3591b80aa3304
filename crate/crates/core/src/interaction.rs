//! Path interactions: occlusion by axis-aligned boxes and second-order
//! coupling between target scattering centers and clutter scatterers.

use crate::channel::{PathKind, PathSource, PropagationPath, TargetInstance};
use crate::math::{angles_of_direction, db_to_amplitude, Vec3, SPEED_OF_LIGHT};
use crate::target::{asc_gain, center_position, center_velocity, TargetError};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Axis-aligned occluding box with a one-way penetration loss.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Occluder {
    pub min: Vec3,
    pub max: Vec3,
    /// Amplitude attenuation in dB per traversal; infinite means opaque.
    pub loss_db: f64,
}

/// Budget and extra loss for target-clutter multibounce paths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiBounceSpec {
    /// Number of (center, scatterer) pairs kept, ranked by coupling strength.
    pub pair_budget: usize,
    /// Extra bounce loss in dB applied to every multibounce path.
    pub loss_db: f64,
}

impl Default for MultiBounceSpec {
    fn default() -> Self {
        MultiBounceSpec {
            pair_budget: 32,
            loss_db: 10.0,
        }
    }
}

/// Clutter scatterer view used for interaction coupling, carrying the ray
/// amplitude and phase it contributes to the first-order clutter layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScattererRef {
    pub position: Vec3,
    pub amplitude: f64,
    pub phase_rad: f64,
    pub cluster: usize,
    pub ray: usize,
}

/// Extracts scatterer references from first-order clutter paths.
pub fn scatterer_refs(clutter_paths: &[PropagationPath]) -> Vec<ScattererRef> {
    clutter_paths
        .iter()
        .filter(|p| p.kind == PathKind::Clutter && p.waypoints.len() == 3)
        .map(|p| ScattererRef {
            position: p.waypoints[1],
            amplitude: p.amplitude.norm(),
            phase_rad: p.amplitude.arg(),
            cluster: p.source.cluster.unwrap_or(0),
            ray: p.source.ray.unwrap_or(0),
        })
        .collect()
}

/// True when the open segment (a, b) passes through the interior of the box.
/// Grazing a face, edge or corner exactly does not count, and neither does an
/// endpoint sitting on the surface: only strictly interior traversal blocks.
pub fn segment_intersects_box(a: Vec3, b: Vec3, occ: &Occluder) -> bool {
    let d = b - a;
    let mut t_enter = 0.0f64;
    let mut t_exit = 1.0f64;
    for axis in 0..3 {
        let da = d.0[axis];
        let lo = occ.min.0[axis];
        let hi = occ.max.0[axis];
        if da.abs() < 1e-15 {
            // Parallel to the slab: outside or on the boundary plane misses.
            if a.0[axis] <= lo || a.0[axis] >= hi {
                return false;
            }
            continue;
        }
        let inv = 1.0 / da;
        let (t1, t2) = {
            let t1 = (lo - a.0[axis]) * inv;
            let t2 = (hi - a.0[axis]) * inv;
            if t1 <= t2 {
                (t1, t2)
            } else {
                (t2, t1)
            }
        };
        t_enter = t_enter.max(t1);
        t_exit = t_exit.min(t2);
        if t_enter >= t_exit {
            return false;
        }
    }
    // Strict interior overlap of (t_enter, t_exit) with the open segment.
    t_enter < 1.0 && t_exit > 0.0
}

/// Amplitude factor a straight segment picks up from all occluders.
pub fn segment_visibility(a: Vec3, b: Vec3, occluders: &[Occluder]) -> f64 {
    let mut factor = 1.0;
    for occ in occluders {
        if segment_intersects_box(a, b, occ) {
            if occ.loss_db.is_infinite() {
                return 0.0;
            }
            factor *= db_to_amplitude(occ.loss_db);
        }
    }
    factor
}

/// Applies occlusion losses along every path's waypoint polyline. Fully
/// blocked paths (zero remaining amplitude) are removed.
pub fn apply_visibility(
    paths: Vec<PropagationPath>,
    occluders: &[Occluder],
) -> Vec<PropagationPath> {
    if occluders.is_empty() {
        return paths;
    }
    paths
        .into_iter()
        .filter_map(|mut p| {
            let mut factor = 1.0;
            for w in p.waypoints.windows(2) {
                factor *= segment_visibility(w[0], w[1], occluders);
                if factor == 0.0 {
                    return None;
                }
            }
            p.amplitude *= factor;
            Some(p)
        })
        .collect()
}

struct RankedPair {
    target: usize,
    center: usize,
    scatterer: usize,
    strength: f64,
}

/// Second-order paths coupling target centers with clutter scatterers.
///
/// Pairs are ranked by `center amplitude * scatterer ray power` and the top
/// `pair_budget` kept; each pair yields two paths (tx-center-scatterer-rx
/// and tx-scatterer-center-rx), so at most `2 * pair_budget` paths return.
/// The bounce amplitude is the center's aspect gain along the leg bisector
/// times the scatterer ray amplitude, three-leg spreading, and the extra
/// bounce loss; the phase reuses the scatterer's clutter-ray phase.
#[allow(clippy::too_many_arguments)]
pub fn multibounce_paths(
    targets: &[TargetInstance],
    scatterers: &[ScattererRef],
    tx: Vec3,
    rx: Vec3,
    carrier_hz: f64,
    time_s: f64,
    spec: &MultiBounceSpec,
) -> Result<Vec<PropagationPath>, TargetError> {
    if spec.pair_budget == 0 || targets.is_empty() || scatterers.is_empty() {
        return Ok(Vec::new());
    }

    let mut ranked: Vec<RankedPair> = Vec::new();
    for (ti, t) in targets.iter().enumerate() {
        for (ci, c) in t.centers.iter().enumerate() {
            for (si, s) in scatterers.iter().enumerate() {
                ranked.push(RankedPair {
                    target: ti,
                    center: ci,
                    scatterer: si,
                    strength: c.amplitude * s.amplitude * s.amplitude,
                });
            }
        }
    }
    ranked.sort_by(|a, b| {
        b.strength
            .total_cmp(&a.strength)
            .then(a.target.cmp(&b.target))
            .then(a.center.cmp(&b.center))
            .then(a.scatterer.cmp(&b.scatterer))
    });
    ranked.truncate(spec.pair_budget);

    let bounce_loss = db_to_amplitude(spec.loss_db);
    let mut paths = Vec::with_capacity(2 * ranked.len());
    for pair in &ranked {
        let t = &targets[pair.target];
        let center = &t.centers[pair.center];
        let s = &scatterers[pair.scatterer];
        let c_pos = center_position(center, &t.motion, time_s)?;
        let c_vel = center_velocity(center, &t.motion, time_s)?;

        // Legs shorter than a millimeter make the spreading product blow up;
        // skip such degenerate pairs instead of failing the whole assembly.
        let geom = [
            (tx, c_pos, s.position, rx),
            (tx, s.position, c_pos, rx),
        ];
        for (order, &(w0, w1, w2, w3)) in geom.iter().enumerate() {
            let legs = [(w1 - w0).norm(), (w2 - w1).norm(), (w3 - w2).norm()];
            if legs.iter().any(|&l| l < 1e-3) {
                continue;
            }
            // The center is the moving element (w1 in the first ordering, w2
            // in the second); its Doppler comes from the two legs incident
            // on it.
            let (prev, next) = if order == 0 { (w0, w2) } else { (w1, w3) };
            let u_prev = (c_pos - prev).normalized(1e-9).unwrap_or(Vec3::ZERO);
            let u_next = (c_pos - next).normalized(1e-9).unwrap_or(Vec3::ZERO);
            let range_rate = (u_prev + u_next).dot(c_vel);
            let doppler_hz = -(carrier_hz / SPEED_OF_LIGHT) * range_rate;

            let to_prev = (prev - c_pos).normalized(1e-9).unwrap_or(Vec3::ZERO);
            let to_next = (next - c_pos).normalized(1e-9).unwrap_or(Vec3::ZERO);
            let bisector = (to_prev + to_next)
                .normalized(1e-9)
                .unwrap_or(to_prev);
            let gain = asc_gain(center, carrier_hz, carrier_hz, bisector, t.motion.heading_rad);
            let spread = crate::channel::spreading(&legs, carrier_hz)
                .map_err(|e| TargetError::DegenerateGeometry(e.to_string()))?;
            let amp = gain * s.amplitude * spread * bounce_loss;

            let (aod_az, aod_el) = angles_of_direction(w1 - w0);
            let (aoa_az, aoa_el) = angles_of_direction(w2 - w3);
            paths.push(PropagationPath {
                kind: PathKind::MultiBounce,
                delay_s: legs.iter().sum::<f64>() / SPEED_OF_LIGHT,
                amplitude: Complex64::from_polar(amp, s.phase_rad),
                doppler_hz,
                freq_exponent: center.alpha,
                aod_az_rad: aod_az,
                aod_el_rad: aod_el,
                aoa_az_rad: aoa_az,
                aoa_el_rad: aoa_el,
                waypoints: vec![w0, w1, w2, w3],
                source: PathSource {
                    target: Some(pair.target),
                    center: Some(pair.center),
                    cluster: Some(s.cluster),
                    ray: Some(s.ray),
                },
            });
        }
    }
    Ok(paths)
}
