//! Hybrid channel synthesizer.
//!
//! A channel realization is a list of discrete propagation paths drawn from
//! three layers: deterministic target scattering centers, stochastic clutter
//! clusters, and interaction paths (occlusion losses, target-clutter
//! multibounce). [`render_cfr`] turns a path list into a frequency-domain
//! tensor over (rx element, tx element, subcarrier); [`simulate`] runs the
//! whole pipeline for a semantic scene over a snapshot sequence.

use crate::clutter::{self, ClutterCluster, ClutterError, ClutterParams};
use crate::generator::{self, DecodedTheta, GeneratorError};
use crate::interaction::{self, MultiBounceSpec, Occluder, ScattererRef};
use crate::math::{angles_of_direction, Vec3, SPEED_OF_LIGHT};
use crate::rng::{domain, stream_rng};
use crate::semantics::SemanticScene;
use crate::target::{self, MotionState, TargetError};
use num_complex::Complex64;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("spreading factor needs at least one propagation leg")]
    EmptyLegs,
    #[error("non-positive propagation leg length {0}")]
    BadLegLength(f64),
    #[error(transparent)]
    Target(#[from] TargetError),
    #[error(transparent)]
    Clutter(#[from] ClutterError),
    #[error(transparent)]
    Generator(#[from] GeneratorError),
}

/// Path taxonomy; `freq_exponent` is only nonzero for target returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathKind {
    LineOfSight,
    Target,
    Clutter,
    MultiBounce,
}

impl PathKind {
    pub fn label(&self) -> &'static str {
        match self {
            PathKind::LineOfSight => "los",
            PathKind::Target => "target",
            PathKind::Clutter => "clutter",
            PathKind::MultiBounce => "multibounce",
        }
    }
}

/// Provenance indices of a path in the scene realization.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathSource {
    pub target: Option<usize>,
    pub center: Option<usize>,
    pub cluster: Option<usize>,
    pub ray: Option<usize>,
}

/// One discrete multipath component.
///
/// `amplitude` is the complex gain at the carrier; the renderer applies the
/// per-subcarrier factor `(f_k / f_c)^freq_exponent` on top of it, together
/// with the delay and Doppler phase terms. `waypoints` lists the geometric
/// polyline tx -> bounce points -> rx and is what occlusion tests walk.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagationPath {
    pub kind: PathKind,
    pub delay_s: f64,
    pub amplitude: Complex64,
    pub doppler_hz: f64,
    pub freq_exponent: f64,
    pub aod_az_rad: f64,
    pub aod_el_rad: f64,
    pub aoa_az_rad: f64,
    pub aoa_el_rad: f64,
    pub waypoints: Vec<Vec3>,
    pub source: PathSource,
}

/// Antenna geometry at one end of the link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArrayGeometry {
    Siso,
    Ula { elements: usize, spacing_wl: f64 },
}

impl ArrayGeometry {
    pub fn len(&self) -> usize {
        match self {
            ArrayGeometry::Siso => 1,
            ArrayGeometry::Ula { elements, .. } => *elements,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Steering vector for an azimuth angle; element n carries phase
    /// `2*pi*spacing_wl*n*sin(az)`.
    pub fn steering(&self, azimuth_rad: f64) -> Vec<Complex64> {
        match self {
            ArrayGeometry::Siso => vec![Complex64::new(1.0, 0.0)],
            ArrayGeometry::Ula {
                elements,
                spacing_wl,
            } => {
                let step = 2.0 * std::f64::consts::PI * spacing_wl * azimuth_rad.sin();
                (0..*elements)
                    .map(|n| Complex64::from_polar(1.0, step * n as f64))
                    .collect()
            }
        }
    }
}

fn default_carrier() -> f64 {
    10e9
}
fn default_bandwidth() -> f64 {
    500e6
}
fn default_subcarriers() -> usize {
    256
}
fn default_interval() -> f64 {
    1e-3
}
fn default_snapshots() -> usize {
    1
}
fn default_rx_position() -> Vec3 {
    Vec3::new(0.0, 0.0, 10.0)
}
fn default_array() -> ArrayGeometry {
    ArrayGeometry::Siso
}
fn default_rx_array() -> ArrayGeometry {
    ArrayGeometry::Ula {
        elements: 8,
        spacing_wl: 0.5,
    }
}

/// Synthesizer configuration; `noise_power` is the per-sample complex noise
/// variance in linear units (0 disables noise).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    #[serde(rename = "carrier_hz")]
    pub carrier_hz: f64,
    pub bandwidth_hz: f64,
    pub n_subcarriers: usize,
    pub snapshot_interval_s: f64,
    pub n_snapshots: usize,
    pub tx_position: Vec3,
    pub rx_position: Vec3,
    pub tx_array: ArrayGeometry,
    pub rx_array: ArrayGeometry,
    pub noise_power: f64,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            carrier_hz: default_carrier(),
            bandwidth_hz: default_bandwidth(),
            n_subcarriers: default_subcarriers(),
            snapshot_interval_s: default_interval(),
            n_snapshots: default_snapshots(),
            tx_position: default_rx_position(),
            rx_position: default_rx_position(),
            tx_array: default_array(),
            rx_array: default_rx_array(),
            noise_power: 0.0,
            seed: 0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        if !(self.carrier_hz.is_finite() && self.carrier_hz > 0.0) {
            return Err(SynthError::InvalidConfig(format!(
                "carrier_hz must be positive, got {}",
                self.carrier_hz
            )));
        }
        if !(self.bandwidth_hz.is_finite() && self.bandwidth_hz > 0.0) {
            return Err(SynthError::InvalidConfig(format!(
                "bandwidth_hz must be positive, got {}",
                self.bandwidth_hz
            )));
        }
        if self.bandwidth_hz >= 2.0 * self.carrier_hz {
            return Err(SynthError::InvalidConfig(format!(
                "bandwidth {} exceeds the band supported by carrier {}",
                self.bandwidth_hz, self.carrier_hz
            )));
        }
        if self.n_subcarriers < 2 {
            return Err(SynthError::InvalidConfig(format!(
                "need at least 2 subcarriers, got {}",
                self.n_subcarriers
            )));
        }
        if self.n_snapshots == 0 {
            return Err(SynthError::InvalidConfig("n_snapshots must be >= 1".into()));
        }
        if !(self.snapshot_interval_s.is_finite() && self.snapshot_interval_s > 0.0) {
            return Err(SynthError::InvalidConfig(format!(
                "snapshot_interval_s must be positive, got {}",
                self.snapshot_interval_s
            )));
        }
        if !(self.noise_power.is_finite() && self.noise_power >= 0.0) {
            return Err(SynthError::InvalidConfig(format!(
                "noise_power must be non-negative, got {}",
                self.noise_power
            )));
        }
        if !self.tx_position.is_finite() || !self.rx_position.is_finite() {
            return Err(SynthError::InvalidConfig("array positions must be finite".into()));
        }
        for (name, arr) in [("tx_array", &self.tx_array), ("rx_array", &self.rx_array)] {
            match arr {
                ArrayGeometry::Siso => {}
                ArrayGeometry::Ula {
                    elements,
                    spacing_wl,
                } => {
                    if *elements == 0 {
                        return Err(SynthError::InvalidConfig(format!(
                            "{name} must have at least one element"
                        )));
                    }
                    if !(spacing_wl.is_finite() && *spacing_wl > 0.0) {
                        return Err(SynthError::InvalidConfig(format!(
                            "{name} spacing must be positive, got {spacing_wl}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Subcarrier frequency on the inclusive grid `f_c - B/2 .. f_c + B/2`.
    pub fn subcarrier_hz(&self, k: usize) -> f64 {
        let step = self.bandwidth_hz / (self.n_subcarriers as f64 - 1.0);
        self.carrier_hz - 0.5 * self.bandwidth_hz + step * k as f64
    }

    /// SHA-256 over the canonical JSON serialization of the config.
    pub fn config_hash(&self) -> [u8; 32] {
        let json = serde_json::to_vec(self).expect("config serialization cannot fail");
        let digest = Sha256::digest(&json);
        let mut out = [0u8; 32];
        out.copy_from_slice(&digest);
        out
    }
}

/// Frequency-domain channel over (rx element, tx element, subcarrier), with
/// the subcarrier axis contiguous in memory.
#[derive(Debug, Clone, PartialEq)]
pub struct CfrTensor {
    n_rx: usize,
    n_tx: usize,
    n_subcarriers: usize,
    data: Vec<Complex64>,
}

impl CfrTensor {
    pub fn zeros(n_rx: usize, n_tx: usize, n_subcarriers: usize) -> Self {
        CfrTensor {
            n_rx,
            n_tx,
            n_subcarriers,
            data: vec![Complex64::new(0.0, 0.0); n_rx * n_tx * n_subcarriers],
        }
    }

    pub fn from_data(
        n_rx: usize,
        n_tx: usize,
        n_subcarriers: usize,
        data: Vec<Complex64>,
    ) -> Result<Self, SynthError> {
        if data.len() != n_rx * n_tx * n_subcarriers {
            return Err(SynthError::InvalidConfig(format!(
                "tensor data length {} does not match {}x{}x{}",
                data.len(),
                n_rx,
                n_tx,
                n_subcarriers
            )));
        }
        Ok(CfrTensor {
            n_rx,
            n_tx,
            n_subcarriers,
            data,
        })
    }

    pub fn n_rx(&self) -> usize {
        self.n_rx
    }

    pub fn n_tx(&self) -> usize {
        self.n_tx
    }

    pub fn n_subcarriers(&self) -> usize {
        self.n_subcarriers
    }

    fn offset(&self, rx: usize, tx: usize) -> usize {
        (rx * self.n_tx + tx) * self.n_subcarriers
    }

    pub fn at(&self, rx: usize, tx: usize, k: usize) -> Complex64 {
        self.data[self.offset(rx, tx) + k]
    }

    pub fn at_mut(&mut self, rx: usize, tx: usize, k: usize) -> &mut Complex64 {
        let i = self.offset(rx, tx) + k;
        &mut self.data[i]
    }

    /// Subcarrier row for one (rx, tx) antenna pair.
    pub fn row(&self, rx: usize, tx: usize) -> &[Complex64] {
        let o = self.offset(rx, tx);
        &self.data[o..o + self.n_subcarriers]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn total_power(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// One rendered snapshot with its path list and reproducibility metadata.
#[derive(Debug, Clone)]
pub struct ChannelSnapshot {
    pub time_s: f64,
    pub paths: Vec<PropagationPath>,
    pub cfr: CfrTensor,
    pub seed: u64,
    pub config_hash: [u8; 32],
}

/// Free-space spreading amplitude over a chain of propagation legs:
/// `(lambda / (4 pi)^((L+1)/2)) / prod(d_l)` for L legs at carrier `f_c`.
pub fn spreading(leg_lengths_m: &[f64], carrier_hz: f64) -> Result<f64, SynthError> {
    if leg_lengths_m.is_empty() {
        return Err(SynthError::EmptyLegs);
    }
    if !(carrier_hz.is_finite() && carrier_hz > 0.0) {
        return Err(SynthError::InvalidConfig(format!(
            "carrier_hz must be positive, got {carrier_hz}"
        )));
    }
    let mut product = 1.0;
    for &d in leg_lengths_m {
        if !(d.is_finite() && d > 0.0) {
            return Err(SynthError::BadLegLength(d));
        }
        product *= d;
    }
    let lambda = SPEED_OF_LIGHT / carrier_hz;
    let l = leg_lengths_m.len() as f64;
    Ok(lambda / ((4.0 * std::f64::consts::PI).powf((l + 1.0) / 2.0) * product))
}

/// Renders the channel frequency response at observation time `time_s`:
///
/// `H[r,s,k] = sum_p amp_p (f_k/f_c)^alpha_p e^{-j 2 pi f_k tau_p}
///             e^{+j 2 pi f_D,p t} a_rx(aoa_p)[r] a_tx(aod_p)[s]`
///
/// plus circular Gaussian noise of variance `noise_power` per sample when a
/// noise stream is supplied.
pub fn render_cfr(
    paths: &[PropagationPath],
    cfg: &SimConfig,
    time_s: f64,
    mut noise: Option<&mut ChaCha12Rng>,
) -> CfrTensor {
    let n_rx = cfg.rx_array.len();
    let n_tx = cfg.tx_array.len();
    let k_total = cfg.n_subcarriers;
    let mut tensor = CfrTensor::zeros(n_rx, n_tx, k_total);
    let mut coeff = vec![Complex64::new(0.0, 0.0); k_total];

    for path in paths {
        let steer_rx = cfg.rx_array.steering(path.aoa_az_rad);
        let steer_tx = cfg.tx_array.steering(path.aod_az_rad);
        let doppler =
            Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * path.doppler_hz * time_s);
        for (k, c) in coeff.iter_mut().enumerate() {
            let f_k = cfg.subcarrier_hz(k);
            let scale = if path.freq_exponent == 0.0 {
                1.0
            } else {
                (f_k / cfg.carrier_hz).powf(path.freq_exponent)
            };
            let delay_phase =
                Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * f_k * path.delay_s);
            *c = path.amplitude * scale * delay_phase * doppler;
        }
        for (r, sr) in steer_rx.iter().enumerate() {
            for (s, st) in steer_tx.iter().enumerate() {
                let gain = sr * st;
                let o = tensor.offset(r, s);
                for (k, c) in coeff.iter().enumerate() {
                    tensor.data[o + k] += gain * c;
                }
            }
        }
    }

    if let Some(rng) = noise.as_deref_mut() {
        if cfg.noise_power > 0.0 {
            let sigma = (cfg.noise_power / 2.0).sqrt();
            for v in tensor.data.iter_mut() {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                *v += Complex64::new(re * sigma, im * sigma);
            }
        }
    }
    tensor
}

/// Unitary inverse DFT of one subcarrier row; satisfies Parseval exactly:
/// `sum |h[n]|^2 == sum |H[k]|^2` up to rounding.
pub fn cir_from_cfr(row: &[Complex64]) -> Vec<Complex64> {
    let k = row.len();
    if k == 0 {
        return Vec::new();
    }
    let mut buf = row.to_vec();
    FftPlanner::new().plan_fft_inverse(k).process(&mut buf);
    let scale = 1.0 / (k as f64).sqrt();
    for v in buf.iter_mut() {
        *v *= scale;
    }
    buf
}

/// Extra knobs merged on top of scene/parameter-derived settings.
#[derive(Debug, Clone, Default)]
pub struct SimOverrides {
    pub clutter: Option<ClutterParams>,
    pub multibounce: Option<MultiBounceSpec>,
}

/// One concrete target with its scattering centers and kinematics.
#[derive(Debug, Clone)]
pub struct TargetInstance {
    pub centers: Vec<target::ScatteringCenter>,
    pub motion: MotionState,
}

/// A sampled, fully concrete scene: everything `assemble` needs to produce
/// the path list at any observation time.
#[derive(Debug, Clone)]
pub struct SceneRealization {
    pub targets: Vec<TargetInstance>,
    pub clusters: Vec<ClutterCluster>,
    pub clutter_paths: Vec<PropagationPath>,
    pub scatterers: Vec<ScattererRef>,
    pub occluders: Vec<Occluder>,
    pub multibounce: MultiBounceSpec,
}

/// Instantiates a semantic scene into a concrete realization. When `theta`
/// is given, its target block replaces the first scene target's scattering
/// centers and kinematics and its clutter block replaces the scenario
/// defaults; remaining targets are sampled from their class priors.
pub fn instantiate(
    scene: &SemanticScene,
    theta: Option<&DecodedTheta>,
    cfg: &SimConfig,
    overrides: &SimOverrides,
) -> Result<SceneRealization, SynthError> {
    let mut targets = Vec::with_capacity(scene.targets.len());
    for (i, spec) in scene.targets.iter().enumerate() {
        let instance = match (i, theta) {
            (0, Some(dt)) => {
                let velocity = Vec3::new(
                    dt.speed * dt.heading_rad.cos(),
                    dt.speed * dt.heading_rad.sin(),
                    0.0,
                );
                let parts = target::default_parts(spec.class, &dt.part_rates);
                TargetInstance {
                    centers: reconcile_part_ids(dt.centers.clone(), parts.len()),
                    motion: MotionState {
                        position: spec.position,
                        velocity,
                        heading_rad: dt.heading_rad,
                        parts,
                    },
                }
            }
            _ => {
                let mut rng = stream_rng(cfg.seed, &[domain::TARGET_SAMPLE, i as u64]);
                let centers = target::sample_center_set(spec.class, &mut rng);
                let rates = spec.part_rates();
                let parts = target::default_parts(spec.class, &rates);
                TargetInstance {
                    centers: reconcile_part_ids(centers, parts.len()),
                    motion: MotionState {
                        position: spec.position,
                        velocity: spec.velocity,
                        heading_rad: spec.heading_rad,
                        parts,
                    },
                }
            }
        };
        targets.push(instance);
    }

    let clutter_params = overrides
        .clutter
        .clone()
        .or_else(|| theta.map(|dt| dt.clutter.clone()))
        .unwrap_or_else(|| clutter::scenario_params(scene.scenario_class));
    clutter_params.validate()?;

    let clusters = clutter::sample_clusters(
        &clutter_params,
        cfg.tx_position,
        cfg.rx_position,
        cfg.seed,
    )?;
    let clutter_paths = clutter::clutter_paths(
        &clusters,
        cfg.tx_position,
        cfg.rx_position,
        cfg.seed,
    );
    let scatterers = interaction::scatterer_refs(&clutter_paths);

    let occluders = scene
        .background
        .iter()
        .filter(|b| b.occluder)
        .map(|b| Occluder {
            min: b.box_min,
            max: b.box_max,
            loss_db: clutter::material_loss_db(b.material),
        })
        .collect();

    let multibounce = overrides.multibounce.clone().unwrap_or_else(|| {
        theta
            .map(|dt| MultiBounceSpec {
                pair_budget: dt.mb_pairs,
                loss_db: dt.mb_loss_db,
            })
            .unwrap_or_default()
    });

    Ok(SceneRealization {
        targets,
        clusters,
        clutter_paths,
        scatterers,
        occluders,
        multibounce,
    })
}

fn reconcile_part_ids(
    mut centers: Vec<target::ScatteringCenter>,
    n_parts: usize,
) -> Vec<target::ScatteringCenter> {
    for c in centers.iter_mut() {
        if let Some(pid) = c.part_id {
            if pid >= n_parts {
                c.part_id = None;
            }
        }
    }
    centers
}

/// Builds the full path list at observation time `time_s`: line of sight,
/// per-target scattering returns, static clutter, and multibounce, with
/// occlusion applied last. Paths are sorted by delay.
pub fn assemble(
    real: &SceneRealization,
    cfg: &SimConfig,
    time_s: f64,
) -> Result<Vec<PropagationPath>, SynthError> {
    let tx = cfg.tx_position;
    let rx = cfg.rx_position;
    let mut paths = Vec::new();

    let los_vec = rx - tx;
    let los_d = los_vec.norm();
    if los_d > 1e-9 {
        let (aod_az, aod_el) = angles_of_direction(los_vec);
        let (aoa_az, aoa_el) = angles_of_direction(tx - rx);
        paths.push(PropagationPath {
            kind: PathKind::LineOfSight,
            delay_s: los_d / SPEED_OF_LIGHT,
            amplitude: Complex64::new(spreading(&[los_d], cfg.carrier_hz)?, 0.0),
            doppler_hz: 0.0,
            freq_exponent: 0.0,
            aod_az_rad: aod_az,
            aod_el_rad: aod_el,
            aoa_az_rad: aoa_az,
            aoa_el_rad: aoa_el,
            waypoints: vec![tx, rx],
            source: PathSource::default(),
        });
    }

    for (ti, t) in real.targets.iter().enumerate() {
        paths.extend(target::target_paths(
            &t.centers,
            &t.motion,
            tx,
            rx,
            cfg.carrier_hz,
            time_s,
            ti,
        )?);
    }

    paths.extend(real.clutter_paths.iter().cloned());

    if real.multibounce.pair_budget > 0 && !real.scatterers.is_empty() {
        paths.extend(interaction::multibounce_paths(
            &real.targets,
            &real.scatterers,
            tx,
            rx,
            cfg.carrier_hz,
            time_s,
            &real.multibounce,
        )?);
    }

    let mut paths = interaction::apply_visibility(paths, &real.occluders);
    paths.sort_by(|a, b| a.delay_s.total_cmp(&b.delay_s));
    Ok(paths)
}

/// Runs the synthesizer for a scene over the configured snapshot sequence.
///
/// Snapshots are rendered in parallel; every random draw comes from a stream
/// keyed by `(cfg.seed, domain, index)`, so the output is byte-identical
/// regardless of thread count.
pub fn simulate(
    scene: &SemanticScene,
    theta: Option<&generator::ParameterVector>,
    cfg: &SimConfig,
    overrides: &SimOverrides,
) -> Result<Vec<ChannelSnapshot>, SynthError> {
    cfg.validate()?;
    let decoded = theta.map(generator::decode_theta).transpose()?;
    let real = instantiate(scene, decoded.as_ref(), cfg, overrides)?;
    let hash = cfg.config_hash();

    (0..cfg.n_snapshots)
        .into_par_iter()
        .map(|i| {
            let time_s = i as f64 * cfg.snapshot_interval_s;
            let paths = assemble(&real, cfg, time_s)?;
            let mut noise_rng = if cfg.noise_power > 0.0 {
                Some(stream_rng(cfg.seed, &[domain::NOISE, i as u64]))
            } else {
                None
            };
            let cfr = render_cfr(&paths, cfg, time_s, noise_rng.as_mut());
            Ok(ChannelSnapshot {
                time_s,
                paths,
                cfr,
                seed: cfg.seed,
                config_hash: hash,
            })
        })
        .collect()
}
