//! Benchmark orchestration: scene families, dataset builders, observation
//! synthesis, and the two evaluation protocols the acceptance studies run
//! (single-observation identification and the multi-station distribution
//! check).
//!
//! Everything here is deterministic in `StudyConfig::seed`: per-instance
//! randomness comes from counter-keyed streams, and instance loops use
//! rayon only through those streams, so thread count never changes results.

use crate::channel::{
    simulate, ArrayGeometry, ChannelSnapshot, PropagationPath, SimConfig, SimOverrides,
    SynthError,
};
use crate::clutter::{scenario_params, ClutterError, ClutterParams};
use crate::fidelity::extract::{beamwidth_sin, coalesce_paths};
use crate::fidelity::{
    calibrate_threshold, ccdf, extract_paths, ks_two_sample, tms, wasserstein_1d,
    ExtractedPath, FidelityError, FidelityReport, TmsScales,
};
use crate::generator::{
    self, encode_theta, GeneratorError, GeneratorModel, ParameterVector, TrainingPair,
};
use crate::math::{fnv1a_words, Vec3};
use crate::rng::{domain, stream_rng};
use crate::semantics::{
    encode_scene, ComponentSpec, ScenarioClass, SemanticScene, TargetSpec,
};
use crate::target::{
    default_parts, synth_library, target_paths, McsSet, MotionState, TargetClass, TargetError,
};
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Rolling-contact wheel radius used to tie wheel rotation to speed.
pub const WHEEL_RADIUS_M: f64 = 0.3;
/// Reference projections drop paths this far below the strongest one,
/// matching roughly what extraction can pull out of a ten-path return at
/// the study SNR. Keeping dimmer paths than the observation can contain
/// only dilutes the match denominator.
pub const REFERENCE_CUT_DB: f64 = 20.0;
/// Snapshots scored per observation. Averaging the match over separated
/// times ties the score to the scene kinematics: a constellation that
/// lines up by accident at one instant drifts off the reference trajectory
/// at the others.
pub const SCORE_SNAPSHOTS: usize = 3;
/// Spacing of the scored snapshots. Wide enough that a wrong radial rate
/// drifts a path by whole delay cells across the window, short enough that
/// a near-miss rate keeps its paths inside a cell.
pub const SCORE_INTERVAL_S: f64 = 1.5e-2;
/// Extraction budget multiplier over the kept path count. The extra
/// iterations let the deconvolution pull returns outside the target gate
/// (close-in clutter, multibounce) without starving the gated set.
const EXTRACT_SLACK: usize = 2;
const TRAINING_MB_PAIRS: usize = 16;
const TRAINING_MB_LOSS_DB: f64 = 12.0;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error(transparent)]
    Fidelity(#[from] FidelityError),
    #[error(transparent)]
    Target(#[from] TargetError),
    #[error(transparent)]
    Clutter(#[from] ClutterError),
    #[error("study configuration: {0}")]
    InvalidStudy(String),
}

/// Sizes and knobs shared by the evaluation studies. Defaults are the
/// full-size benchmark settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub seed: u64,
    /// Library views synthesized per target class.
    pub n_views: usize,
    pub n_training: usize,
    pub n_eval: usize,
    pub knn_k: usize,
    pub jitter: f64,
    pub snr_db: f64,
    pub max_extract: usize,
    pub n_stations: usize,
    pub station_radius_m: f64,
    pub station_height_m: f64,
    /// Exceedance coverage the identification threshold is calibrated to.
    pub coverage: f64,
    /// Acceptance level for per-instance distribution tests.
    pub p_accept: f64,
    pub n_subcarriers: usize,
}

impl Default for StudyConfig {
    fn default() -> Self {
        StudyConfig {
            seed: 7,
            n_views: 200,
            n_training: 2560,
            n_eval: 100,
            knn_k: 4,
            jitter: 0.1,
            snr_db: 30.0,
            max_extract: 12,
            n_stations: 10,
            station_radius_m: 40.0,
            station_height_m: 8.0,
            coverage: 0.95,
            p_accept: 0.05,
            n_subcarriers: 512,
        }
    }
}

impl StudyConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.n_views == 0 || self.n_eval == 0 || self.max_extract == 0 {
            return Err(HarnessError::InvalidStudy(
                "all study sizes must be positive".into(),
            ));
        }
        if self.knn_k == 0 || self.n_training < self.knn_k {
            return Err(HarnessError::InvalidStudy(format!(
                "need n_training >= knn_k >= 1, got {} and {}",
                self.n_training, self.knn_k
            )));
        }
        if self.n_stations < 2 {
            return Err(HarnessError::InvalidStudy(
                "distribution checks need at least 2 stations".into(),
            ));
        }
        if !(self.coverage > 0.0 && self.coverage <= 1.0) {
            return Err(HarnessError::InvalidStudy(format!(
                "coverage must be in (0, 1], got {}",
                self.coverage
            )));
        }
        if !(self.p_accept > 0.0 && self.p_accept < 1.0) {
            return Err(HarnessError::InvalidStudy(format!(
                "p_accept must be in (0, 1), got {}",
                self.p_accept
            )));
        }
        if self.n_subcarriers < 2 || !(self.station_radius_m > 0.0) {
            return Err(HarnessError::InvalidStudy(
                "need at least 2 subcarriers and a positive station radius".into(),
            ));
        }
        Ok(())
    }

    /// Radar config template for one monostatic station at `position`.
    /// Wideband on purpose: the benchmark targets put ten-odd centers
    /// inside a few metres, and a 1 GHz sweep is what keeps neighbouring
    /// centers in separate delay cells.
    pub fn radar_at(&self, position: Vec3, seed: u64) -> SimConfig {
        SimConfig {
            carrier_hz: 10e9,
            bandwidth_hz: 1e9,
            n_subcarriers: self.n_subcarriers,
            snapshot_interval_s: 1e-3,
            n_snapshots: 1,
            tx_position: position,
            rx_position: position,
            tx_array: ArrayGeometry::Siso,
            rx_array: ArrayGeometry::Ula {
                elements: 8,
                spacing_wl: 0.5,
            },
            noise_power: 0.0,
            seed,
        }
    }

    /// The fixed ring of monostatic stations used by the collaborative
    /// protocol.
    pub fn station_ring(&self) -> Vec<SimConfig> {
        (0..self.n_stations)
            .map(|s| {
                let angle = std::f64::consts::TAU * s as f64 / self.n_stations as f64;
                let pos = Vec3::new(
                    self.station_radius_m * angle.cos(),
                    self.station_radius_m * angle.sin(),
                    self.station_height_m,
                );
                self.radar_at(pos, 0)
            })
            .collect()
    }
}

/// Both class libraries flattened, vehicles first.
pub fn build_library(n_views: usize, seed: u64) -> Result<Vec<McsSet>, HarnessError> {
    let mut all = synth_library(TargetClass::Vehicle, n_views, seed)?;
    all.extend(synth_library(TargetClass::Uav, n_views, seed)?);
    Ok(all)
}

/// Draws one scene from the benchmark family: a single moving target of a
/// random class in a random scenario, with motion-consistent articulated
/// components and no occluders.
pub fn sample_scene(index: usize, rng: &mut ChaCha12Rng) -> SemanticScene {
    let class = if rng.random::<bool>() {
        TargetClass::Vehicle
    } else {
        TargetClass::Uav
    };
    let scenario = ScenarioClass::ALL[rng.random_range(0..ScenarioClass::ALL.len())];
    let (speed, height, components) = match class {
        TargetClass::Vehicle => {
            let speed = rng.random_range(5.0..30.0);
            let rate = speed / (std::f64::consts::TAU * WHEEL_RADIUS_M);
            (
                speed,
                0.6,
                vec![ComponentSpec {
                    part: "wheel".into(),
                    count: 4,
                    rate_hz: rate,
                }],
            )
        }
        TargetClass::Uav => (
            rng.random_range(3.0..15.0),
            rng.random_range(8.0..20.0),
            vec![ComponentSpec {
                part: "rotor".into(),
                count: 4,
                rate_hz: rng.random_range(40.0..90.0),
            }],
        ),
    };
    let heading = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
    let ring = rng.random_range(8.0..25.0);
    let bearing = rng.random_range(0.0..std::f64::consts::TAU);
    SemanticScene {
        scene_id: format!("family-{}-{index:04}", class.label()),
        scenario_class: scenario,
        horizon_s: Some(10.0),
        targets: vec![TargetSpec {
            id: "t0".into(),
            class,
            components,
            position: Vec3::new(ring * bearing.cos(), ring * bearing.sin(), height),
            velocity: Vec3::new(speed * heading.cos(), speed * heading.sin(), 0.0),
            heading_rad: heading,
        }],
        background: Vec::new(),
        relations: Vec::new(),
        events: Vec::new(),
    }
}

/// True channel parameters for a scene: a library center set of the scene's
/// class plus scene kinematics and the scenario clutter table.
pub fn theta_for_scene(
    scene: &SemanticScene,
    library: &[McsSet],
    rng: &mut ChaCha12Rng,
) -> Result<ParameterVector, HarnessError> {
    let spec = scene
        .targets
        .first()
        .ok_or_else(|| HarnessError::InvalidStudy("scene has no targets".into()))?;
    let candidates: Vec<&McsSet> = library.iter().filter(|e| e.class == spec.class).collect();
    if candidates.is_empty() {
        return Err(HarnessError::InvalidStudy(format!(
            "library has no {} entries",
            spec.class.label()
        )));
    }
    let entry = candidates[rng.random_range(0..candidates.len())];
    let theta = encode_theta(
        &entry.centers,
        spec.velocity.norm(),
        spec.heading_rad,
        &spec.part_rates(),
        &scenario_params(scene.scenario_class),
        TRAINING_MB_PAIRS,
        TRAINING_MB_LOSS_DB,
    )?;
    Ok(theta)
}

/// Builds the paired dataset the generator trains on: scenes drawn from the
/// family, each paired with true parameters for that scene.
pub fn build_training_set(
    study: &StudyConfig,
    library: &[McsSet],
) -> Result<Vec<TrainingPair>, HarnessError> {
    let mut rng = stream_rng(study.seed, &[domain::HARNESS]);
    (0..study.n_training)
        .map(|i| {
            let scene = sample_scene(i, &mut rng);
            let theta = theta_for_scene(&scene, library, &mut rng)?;
            Ok(TrainingPair {
                code: encode_scene(&scene),
                theta,
            })
        })
        .collect()
}

fn mean_power(snapshot: &ChannelSnapshot) -> f64 {
    let (n_rx, n_tx, k) = (
        snapshot.cfr.n_rx(),
        snapshot.cfr.n_tx(),
        snapshot.cfr.n_subcarriers(),
    );
    let mut total = 0.0;
    for r in 0..n_rx {
        for t in 0..n_tx {
            for ki in 0..k {
                total += snapshot.cfr.at(r, t, ki).norm_sqr();
            }
        }
    }
    total / (n_rx * n_tx * k) as f64
}

/// Clutter parameters that generate no clusters at all. The scalar fields
/// still have to pass validation, so they carry harmless dummies.
fn no_clutter() -> ClutterParams {
    ClutterParams {
        n_clusters: 0,
        delay_scaling: 2.0,
        delay_spread_s: 1e-9,
        shadowing_std_db: 0.0,
        azimuth_spread_arrival_rad: 0.0,
        azimuth_spread_departure_rad: 0.0,
        elevation_spread_arrival_rad: 0.0,
        elevation_spread_departure_rad: 0.0,
        total_power: 1.0,
        rays_per_cluster: 1,
    }
}

/// Renders a noisy observation of a scene under `theta`, one snapshot per
/// `radar.n_snapshots`. The noise floor is set `snr_db` below the mean
/// power of the target return alone (clutter suppressed), the usual radar
/// reading of SNR; a weak target gets a proportionally lower floor instead
/// of drowning under a clutter-dominated one.
pub fn synth_observation(
    scene: &SemanticScene,
    theta: &ParameterVector,
    radar: &SimConfig,
    snr_db: f64,
) -> Result<(Vec<ChannelSnapshot>, SimConfig), HarnessError> {
    let mut cfg = radar.clone();
    cfg.noise_power = 0.0;
    let target_only = SimOverrides {
        clutter: Some(no_clutter()),
        ..SimOverrides::default()
    };
    let clean = simulate(scene, Some(theta), &cfg, &target_only)?;
    let p_signal =
        clean.iter().map(mean_power).sum::<f64>() / clean.len() as f64;
    if !(p_signal > 0.0) {
        return Err(HarnessError::InvalidStudy(
            "scene renders a silent channel; cannot set a noise floor".into(),
        ));
    }
    cfg.noise_power = p_signal * 10f64.powf(-snr_db / 10.0);
    let noisy = simulate(scene, Some(theta), &cfg, &SimOverrides::default())?;
    Ok((noisy, cfg))
}

/// Motion state implied by a scene target, with standard part placement.
pub fn spec_motion(spec: &TargetSpec) -> MotionState {
    MotionState {
        position: spec.position,
        velocity: spec.velocity,
        heading_rad: spec.heading_rad,
        parts: default_parts(spec.class, &spec.part_rates()),
    }
}

/// Projects a library entry through a concrete geometry at `time_s` into
/// reference paths for matching. Sub-resolution centers are coalesced into
/// the single responses a matched extractor would report, so the reference
/// lists what the sensor can resolve rather than raw center structure.
/// Strongest first, cut [`REFERENCE_CUT_DB`] below the peak, at most `keep`
/// paths.
pub fn entry_reference(
    entry: &McsSet,
    motion: &MotionState,
    radar: &SimConfig,
    keep: usize,
    time_s: f64,
) -> Result<Vec<ExtractedPath>, HarnessError> {
    let paths = target_paths(
        &entry.centers,
        motion,
        radar.tx_position,
        radar.rx_position,
        radar.carrier_hz,
        time_s,
        0,
    )?;
    // The renderer rotates every path by its doppler at the snapshot time;
    // the relative rotation decides how sub-cell neighbours interfere.
    let rotated: Vec<ExtractedPath> = paths
        .iter()
        .map(|p| ExtractedPath {
            delay_s: p.delay_s,
            sin_az: p.aoa_az_rad.sin(),
            amplitude: p.amplitude.norm(),
            phase_rad: p.amplitude.arg()
                + 2.0 * std::f64::consts::PI * p.doppler_hz * time_s,
        })
        .collect();
    let mut projected = coalesce_paths(&rotated, radar);
    let peak = projected.iter().map(|p| p.amplitude).fold(0.0, f64::max);
    let floor = peak * 10f64.powf(-REFERENCE_CUT_DB / 20.0);
    projected.retain(|p| p.amplitude > floor);
    projected.truncate(keep);
    Ok(projected)
}

/// Power-weighted RMS delay spread of a path list.
pub fn delay_spread_s(paths: &[PropagationPath]) -> f64 {
    let mut power = 0.0;
    let mut first = 0.0;
    for p in paths {
        let w = p.amplitude.norm_sqr();
        power += w;
        first += w * p.delay_s;
    }
    if power <= 0.0 {
        return 0.0;
    }
    let mean = first / power;
    let mut second = 0.0;
    for p in paths {
        let w = p.amplitude.norm_sqr();
        second += w * (p.delay_s - mean) * (p.delay_s - mean);
    }
    (second / power).sqrt()
}

fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.sort_by(|a, b| a.total_cmp(b));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Fitted models shared by the studies.
pub struct FittedModels {
    pub library: Vec<McsSet>,
    pub model: GeneratorModel,
    pub baseline: GeneratorModel,
}

/// Builds the library and training set, then fits the conditional model and
/// the marginal baseline.
pub fn fit_models(study: &StudyConfig) -> Result<FittedModels, HarnessError> {
    let library = build_library(study.n_views, study.seed)?;
    let training = build_training_set(study, &library)?;
    let model = generator::fit(training.clone(), study.knn_k, study.jitter)?;
    let baseline = generator::fit_baseline(training)?;
    Ok(FittedModels {
        library,
        model,
        baseline,
    })
}

/// Outcome of the single-observation identification study.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SingleObservationOutcome {
    /// Identification-score threshold calibrated on the reference arm.
    pub threshold: f64,
    pub reference_scores: Vec<f64>,
    pub model_scores: Vec<f64>,
    pub baseline_scores: Vec<f64>,
    pub reference_exceedance: f64,
    pub model_exceedance: f64,
    pub baseline_exceedance: f64,
    /// Fraction of model-arm instances whose best match has the scene's
    /// target class.
    pub model_class_accuracy: f64,
}

struct InstanceScores {
    reference: f64,
    model: f64,
    baseline: f64,
    model_class_ok: bool,
}

/// Delay and angle span any library entry can occupy in one geometry.
/// Returns outside it are clutter by construction; dropping them before
/// matching keeps them from diluting the match denominator, the way a
/// tracker gates returns around a detected object.
struct ReferenceGate {
    delay: std::ops::RangeInclusive<f64>,
    sin_az: std::ops::RangeInclusive<f64>,
}

impl ReferenceGate {
    fn from_references(references: &[Vec<Vec<ExtractedPath>>], cfg: &SimConfig) -> Self {
        let mut delay = (f64::INFINITY, f64::NEG_INFINITY);
        let mut sin_az = (f64::INFINITY, f64::NEG_INFINITY);
        for path in references.iter().flatten().flatten() {
            delay = (delay.0.min(path.delay_s), delay.1.max(path.delay_s));
            sin_az = (sin_az.0.min(path.sin_az), sin_az.1.max(path.sin_az));
        }
        // Guards cover extraction error on weak paths.
        let guard_delay = 2.0 / cfg.bandwidth_hz;
        let guard_sin = 0.75 * beamwidth_sin(cfg);
        ReferenceGate {
            delay: delay.0 - guard_delay..=delay.1 + guard_delay,
            sin_az: sin_az.0 - guard_sin..=sin_az.1 + guard_sin,
        }
    }

    fn contains(&self, path: &ExtractedPath) -> bool {
        self.delay.contains(&path.delay_s) && self.sin_az.contains(&path.sin_az)
    }
}

/// Identification score of one observed channel against per-snapshot
/// library references (`references[snapshot][entry]`). Each library entry
/// is scored by its mean match over the observation's snapshots, so an
/// entry must track the scene kinematics across time, not just line up at
/// one instant. Returns the best mean score and that entry's class; ties
/// keep the earliest entry.
fn observation_score(
    scene: &SemanticScene,
    theta: &ParameterVector,
    radar: &SimConfig,
    study: &StudyConfig,
    classes: &[TargetClass],
    references: &[Vec<Vec<ExtractedPath>>],
) -> Result<(f64, TargetClass), HarnessError> {
    let (snapshots, cfg) = synth_observation(scene, theta, radar, study.snr_db)?;
    debug_assert_eq!(snapshots.len(), references.len());
    let scales = TmsScales::from_config(&cfg);
    let gate = ReferenceGate::from_references(references, &cfg);
    let mut totals = vec![0.0f64; classes.len()];
    for (snapshot, refs_at_time) in snapshots.iter().zip(references) {
        let mut estimated =
            extract_paths(&snapshot.cfr, &cfg, EXTRACT_SLACK * study.max_extract)?;
        estimated.retain(|p| gate.contains(p));
        // Fuse split artifacts the same way the references fuse sub-cell
        // centers, then apply the same dynamic-range cut, so deconvolution
        // residue does not pad the set size.
        estimated = coalesce_paths(&estimated, &cfg);
        let peak = estimated.iter().map(|p| p.amplitude).fold(0.0, f64::max);
        let floor = peak * 10f64.powf(-REFERENCE_CUT_DB / 20.0);
        estimated.retain(|p| p.amplitude > floor);
        estimated.truncate(study.max_extract);
        for (total, reference) in totals.iter_mut().zip(refs_at_time) {
            *total += tms(&estimated, reference, &scales)?;
        }
    }
    let best = totals
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
        .map(|(e, _)| e)
        .ok_or_else(|| HarnessError::InvalidStudy("no reference entries to score".into()))?;
    Ok((totals[best] / snapshots.len() as f64, classes[best]))
}

/// Runs the single-observation identification protocol.
///
/// Per instance, three short observations ([`SCORE_SNAPSHOTS`] snapshots,
/// [`SCORE_INTERVAL_S`] apart) are synthesized for the same scene and
/// geometry: the true parameters, a conditional model draw, and a marginal
/// baseline draw. Each is extracted and scored against the library with
/// per-snapshot references; the reference arm calibrates the score
/// threshold at `coverage`, and the model and baseline arms report how
/// often they exceed it.
pub fn single_observation_study(
    study: &StudyConfig,
    models: &FittedModels,
) -> Result<SingleObservationOutcome, HarnessError> {
    study.validate()?;
    let classes: Vec<TargetClass> = models.library.iter().map(|e| e.class).collect();
    let per_instance: Vec<InstanceScores> = (0..study.n_eval)
        .into_par_iter()
        .map(|i| -> Result<InstanceScores, HarnessError> {
            let mut rng = stream_rng(study.seed, &[domain::EVAL, i as u64, 1]);
            let scene = sample_scene(i, &mut rng);
            let true_theta = theta_for_scene(&scene, &models.library, &mut rng)?;
            let code = encode_scene(&scene);

            let bearing = rng.random_range(0.0..std::f64::consts::TAU);
            let position = Vec3::new(
                study.station_radius_m * bearing.cos(),
                study.station_radius_m * bearing.sin(),
                study.station_height_m,
            );

            let motion = spec_motion(&scene.targets[0]);
            let mut geometry = study.radar_at(position, 0);
            geometry.n_snapshots = SCORE_SNAPSHOTS;
            geometry.snapshot_interval_s = SCORE_INTERVAL_S;
            let references: Vec<Vec<Vec<ExtractedPath>>> = (0..SCORE_SNAPSHOTS)
                .map(|si| {
                    let time = si as f64 * SCORE_INTERVAL_S;
                    models
                        .library
                        .iter()
                        .map(|entry| {
                            entry_reference(entry, &motion, &geometry, study.max_extract, time)
                        })
                        .collect::<Result<Vec<_>, HarnessError>>()
                })
                .collect::<Result<_, _>>()?;

            let seed_of = |arm: u64| fnv1a_words(&[study.seed, i as u64, arm]);
            let radar_for = |seed: u64| {
                let mut cfg = geometry.clone();
                cfg.seed = seed;
                cfg
            };
            let model_theta = generator::generate(&models.model, &code, seed_of(10), 1)?
                .pop()
                .expect("asked for one draw");
            let baseline_theta = generator::generate(&models.baseline, &code, seed_of(11), 1)?
                .pop()
                .expect("asked for one draw");

            let (reference, _) = observation_score(
                &scene,
                &true_theta,
                &radar_for(seed_of(1)),
                study,
                &classes,
                &references,
            )?;
            let (model, model_class) = observation_score(
                &scene,
                &model_theta,
                &radar_for(seed_of(2)),
                study,
                &classes,
                &references,
            )?;
            let (baseline, _) = observation_score(
                &scene,
                &baseline_theta,
                &radar_for(seed_of(3)),
                study,
                &classes,
                &references,
            )?;
            Ok(InstanceScores {
                reference,
                model,
                baseline,
                model_class_ok: model_class == scene.targets[0].class,
            })
        })
        .collect::<Result<_, _>>()?;

    let reference_scores: Vec<f64> = per_instance.iter().map(|s| s.reference).collect();
    let model_scores: Vec<f64> = per_instance.iter().map(|s| s.model).collect();
    let baseline_scores: Vec<f64> = per_instance.iter().map(|s| s.baseline).collect();
    let threshold = calibrate_threshold(&reference_scores, study.coverage)?;
    let class_hits = per_instance.iter().filter(|s| s.model_class_ok).count();

    Ok(SingleObservationOutcome {
        threshold,
        reference_exceedance: ccdf(&reference_scores, threshold),
        model_exceedance: ccdf(&model_scores, threshold),
        baseline_exceedance: ccdf(&baseline_scores, threshold),
        model_class_accuracy: class_hits as f64 / per_instance.len() as f64,
        reference_scores,
        model_scores,
        baseline_scores,
    })
}

/// Outcome of the multi-station distribution check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CollaborativeOutcome {
    pub model_p_values: Vec<f64>,
    pub baseline_p_values: Vec<f64>,
    /// Fraction of instances where the model population is not rejected.
    pub model_pass_rate: f64,
    pub baseline_pass_rate: f64,
    pub model_median_p: f64,
    pub baseline_median_p: f64,
}

/// Runs the collaborative distribution check.
///
/// Per instance, one true parameter vector, one conditional model draw,
/// and one marginal baseline draw each observe the scene from every
/// station of the ring; each view is reduced to its identification score,
/// giving one score vector per arm across the stations. The model and
/// baseline vectors are compared against the true-parameter vector with a
/// two-sample test, one p-value per instance and arm. A generator whose
/// draws light up the stations the way the true parameters do leaves the
/// p-value large; mismatched draws are rejected at `p_accept`.
pub fn collaborative_study(
    study: &StudyConfig,
    models: &FittedModels,
) -> Result<CollaborativeOutcome, HarnessError> {
    study.validate()?;
    let stations = study.station_ring();
    let classes: Vec<TargetClass> = models.library.iter().map(|e| e.class).collect();

    let per_instance: Vec<(f64, f64)> = (0..study.n_eval)
        .into_par_iter()
        .map(|i| -> Result<(f64, f64), HarnessError> {
            let mut rng = stream_rng(study.seed, &[domain::EVAL, i as u64, 2]);
            let scene = sample_scene(i, &mut rng);
            let true_theta = theta_for_scene(&scene, &models.library, &mut rng)?;
            let code = encode_scene(&scene);
            let seed_of = |arm: u64| fnv1a_words(&[study.seed, i as u64, 100 + arm]);
            let model_theta = generator::generate(&models.model, &code, seed_of(1), 1)?
                .pop()
                .expect("asked for one draw");
            let baseline_theta = generator::generate(&models.baseline, &code, seed_of(2), 1)?
                .pop()
                .expect("asked for one draw");
            let motion = spec_motion(&scene.targets[0]);

            let mut scores: [Vec<f64>; 3] = Default::default();
            for (s, station) in stations.iter().enumerate() {
                let mut geometry = station.clone();
                geometry.n_snapshots = SCORE_SNAPSHOTS;
                geometry.snapshot_interval_s = SCORE_INTERVAL_S;
                let references: Vec<Vec<Vec<ExtractedPath>>> = (0..SCORE_SNAPSHOTS)
                    .map(|si| {
                        let time = si as f64 * SCORE_INTERVAL_S;
                        models
                            .library
                            .iter()
                            .map(|entry| {
                                entry_reference(entry, &motion, &geometry, study.max_extract, time)
                            })
                            .collect::<Result<Vec<_>, HarnessError>>()
                    })
                    .collect::<Result<_, _>>()?;
                for (arm, theta) in
                    [&true_theta, &model_theta, &baseline_theta].iter().enumerate()
                {
                    let mut radar = geometry.clone();
                    radar.seed =
                        fnv1a_words(&[study.seed, i as u64, 1 + arm as u64, s as u64]);
                    let (score, _) =
                        observation_score(&scene, theta, &radar, study, &classes, &references)?;
                    scores[arm].push(score);
                }
            }

            let p_model = ks_two_sample(&scores[0], &scores[1])?.p_value;
            let p_baseline = ks_two_sample(&scores[0], &scores[2])?.p_value;
            Ok((p_model, p_baseline))
        })
        .collect::<Result<_, _>>()?;

    let mut model_p_values: Vec<f64> = per_instance.iter().map(|p| p.0).collect();
    let mut baseline_p_values: Vec<f64> = per_instance.iter().map(|p| p.1).collect();
    let pass = |ps: &[f64]| ps.iter().filter(|p| **p >= study.p_accept).count() as f64 / ps.len() as f64;
    let outcome = CollaborativeOutcome {
        model_pass_rate: pass(&model_p_values),
        baseline_pass_rate: pass(&baseline_p_values),
        model_median_p: median(&mut model_p_values.clone()),
        baseline_median_p: median(&mut baseline_p_values.clone()),
        model_p_values: {
            model_p_values.sort_by(|a, b| a.total_cmp(b));
            model_p_values
        },
        baseline_p_values: {
            baseline_p_values.sort_by(|a, b| a.total_cmp(b));
            baseline_p_values
        },
    };
    Ok(outcome)
}

fn snapshot_feature_row(snapshot: &ChannelSnapshot) -> (f64, f64, f64) {
    let (n_rx, k) = (snapshot.cfr.n_rx(), snapshot.cfr.n_subcarriers());
    let mut profile = vec![0.0f64; k];
    for r in 0..n_rx {
        let row: Vec<_> = (0..k).map(|ki| snapshot.cfr.at(r, 0, ki)).collect();
        for (n, v) in crate::channel::cir_from_cfr(&row).iter().enumerate() {
            profile[n] += v.norm_sqr();
        }
    }
    let total: f64 = profile.iter().sum();
    if total <= 0.0 {
        return (-300.0, 0.0, 0.0);
    }
    let power_db = 10.0 * (total / (n_rx * k) as f64).log10();
    let centroid = profile
        .iter()
        .enumerate()
        .map(|(n, p)| n as f64 * p)
        .sum::<f64>()
        / total;
    let spread = (profile
        .iter()
        .enumerate()
        .map(|(n, p)| (n as f64 - centroid) * (n as f64 - centroid) * p)
        .sum::<f64>()
        / total)
        .sqrt();
    (power_db, centroid, spread)
}

/// Compares two snapshot sets feature by feature: mean delay-profile power
/// in dB, profile centroid and RMS width in delay bins. Inputs must share
/// one tensor shape per set; the sets may differ in size.
pub fn report_from_snapshots(
    reference: &[ChannelSnapshot],
    model: &[ChannelSnapshot],
) -> Result<FidelityReport, HarnessError> {
    if reference.is_empty() || model.is_empty() {
        return Err(HarnessError::InvalidStudy(
            "fidelity reports need snapshots on both sides".into(),
        ));
    }
    let features = |snaps: &[ChannelSnapshot]| -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let rows: Vec<(f64, f64, f64)> = snaps.iter().map(snapshot_feature_row).collect();
        (
            rows.iter().map(|r| r.0).collect(),
            rows.iter().map(|r| r.1).collect(),
            rows.iter().map(|r| r.2).collect(),
        )
    };
    let (rp, rc, rs) = features(reference);
    let (mp, mc, ms) = features(model);

    let mut report = FidelityReport {
        n_reference: reference.len(),
        n_model: model.len(),
        ..FidelityReport::default()
    };
    for (name, a, b) in [
        ("power_db", &rp, &mp),
        ("delay_centroid_bins", &rc, &mc),
        ("delay_spread_bins", &rs, &ms),
    ] {
        report
            .wasserstein
            .insert(name.to_string(), wasserstein_1d(a, b)?);
        report.ks.insert(name.to_string(), ks_two_sample(a, b)?);
    }
    Ok(report)
}

/// Mean best-match score of `snapshots` against library references in a
/// fixed geometry; a convenience for CLI-level comparisons.
pub fn mean_identification_score(
    snapshots: &[ChannelSnapshot],
    cfg: &SimConfig,
    references: &[Vec<ExtractedPath>],
    max_extract: usize,
) -> Result<f64, HarnessError> {
    if snapshots.is_empty() || references.is_empty() {
        return Err(HarnessError::InvalidStudy(
            "need snapshots and references".into(),
        ));
    }
    let scales = TmsScales::from_config(cfg);
    let mut total = 0.0;
    for snap in snapshots {
        let estimated = extract_paths(&snap.cfr, cfg, max_extract)?;
        let mut best = 0.0f64;
        for reference in references {
            best = best.max(tms(&estimated, reference, &scales)?);
        }
        total += best;
    }
    Ok(total / snapshots.len() as f64)
}
