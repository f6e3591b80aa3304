//! Conditional channel-parameter generation.
//!
//! Training pairs associate a semantic conditioning code with a flat
//! parameter vector theta describing one channel realization (target block,
//! motion block, clutter block, interaction block). The default sampler is
//! k-nearest-neighbour resampling in code space with per-dimension kernel
//! jitter; a marginal Gaussian baseline that ignores the code entirely is
//! fitted alongside for comparison studies.

use crate::clutter::ClutterParams;
use crate::math::{wrap_angle, Vec3};
use crate::rng::{domain, stream_rng};
use crate::semantics::{scene_distance, SemanticCode};
use crate::target::{ScatteringCenter, ALPHA_VALUES, CENTERS_PER_SET, MAX_PARTS};
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;
use thiserror::Error;

/// Layout tag carried by every parameter vector and model file.
pub const THETA_LAYOUT: &str = "stcm-theta-v1";
/// Latent driver width.
pub const LATENT_DIM: usize = 16;
/// Values per scattering center in the target block.
pub const CENTER_DIMS: usize = 9;
/// Width of the target block.
pub const TARGET_BLOCK: usize = CENTERS_PER_SET * CENTER_DIMS;
/// Width of the motion block: speed, heading, one rate per part slot.
pub const MOTION_BLOCK: usize = 2 + MAX_PARTS;
/// Width of the clutter block.
pub const CLUTTER_BLOCK: usize = 9;
/// Width of the interaction block.
pub const INTERACTION_BLOCK: usize = 2;
/// Total parameter vector width.
pub const THETA_DIM: usize = TARGET_BLOCK + MOTION_BLOCK + CLUTTER_BLOCK + INTERACTION_BLOCK;

/// Rays per cluster are structural, not part of theta.
pub const DECODED_RAYS_PER_CLUSTER: usize = 20;

const MODEL_MAGIC: &str = "stcm-generator-model v1";
const MAX_RESAMPLES: usize = 100;

#[derive(Debug, Error)]
pub enum GeneratorError {
    #[error("need at least {needed} training pairs, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("degenerate model: {0}")]
    DegenerateModel(String),
    #[error("version mismatch: {0}")]
    VersionMismatch(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("model file is corrupt: {0}")]
    Corrupt(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Flat channel-parameter vector with its layout tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterVector {
    pub layout: String,
    pub values: Vec<f64>,
}

impl ParameterVector {
    pub fn new(values: Vec<f64>) -> Result<Self, GeneratorError> {
        if values.len() != THETA_DIM {
            return Err(GeneratorError::DimensionMismatch {
                expected: THETA_DIM,
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(GeneratorError::NonFinite(format!("theta[{i}]")));
        }
        Ok(ParameterVector {
            layout: THETA_LAYOUT.to_string(),
            values,
        })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }
}

/// Standard-normal latent driver for one generated sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatentVector {
    pub values: Vec<f64>,
}

impl LatentVector {
    pub fn sample(rng: &mut ChaCha12Rng) -> Self {
        LatentVector {
            values: (0..LATENT_DIM).map(|_| StandardNormal.sample(rng)).collect(),
        }
    }
}

/// One conditioning-code / parameter-vector training example.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingPair {
    pub code: SemanticCode,
    pub theta: ParameterVector,
}

/// How a fitted model turns a code into parameter draws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SamplerMode {
    /// Resample among the k nearest training pairs with kernel jitter.
    KnnResample,
    /// Per-dimension Gaussian marginals; ignores the conditioning code.
    MarginalBaseline { means: Vec<f64>, stds: Vec<f64> },
}

/// A fitted conditional generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorModel {
    pub layout: String,
    pub k: usize,
    pub jitter: f64,
    /// Per-dimension kernel bandwidths (Silverman rule times `jitter`).
    pub bandwidths: Vec<f64>,
    pub pairs: Vec<TrainingPair>,
    pub mode: SamplerMode,
}

fn check_pairs(pairs: &[TrainingPair]) -> Result<usize, GeneratorError> {
    let code_dim = pairs[0].code.dim();
    for p in pairs {
        if p.theta.layout != THETA_LAYOUT {
            return Err(GeneratorError::VersionMismatch(format!(
                "training pair carries layout `{}`",
                p.theta.layout
            )));
        }
        if p.theta.dim() != THETA_DIM {
            return Err(GeneratorError::DimensionMismatch {
                expected: THETA_DIM,
                got: p.theta.dim(),
            });
        }
        if p.code.dim() != code_dim {
            return Err(GeneratorError::DimensionMismatch {
                expected: code_dim,
                got: p.code.dim(),
            });
        }
    }
    Ok(code_dim)
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = q * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

fn sample_std(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    if n < 2.0 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// Fits the k-nearest-neighbour resampler. Bandwidths follow the Silverman
/// rule per dimension, `0.9 min(std, iqr/1.34) n^(-1/5)`, scaled by
/// `jitter`.
pub fn fit(pairs: Vec<TrainingPair>, k: usize, jitter: f64) -> Result<GeneratorModel, GeneratorError> {
    if k == 0 {
        return Err(GeneratorError::InvalidArgument("k must be at least 1".into()));
    }
    if !(jitter.is_finite() && jitter >= 0.0) {
        return Err(GeneratorError::InvalidArgument(format!(
            "jitter must be non-negative, got {jitter}"
        )));
    }
    if pairs.len() < k {
        return Err(GeneratorError::TooFewSamples {
            needed: k,
            got: pairs.len(),
        });
    }
    check_pairs(&pairs)?;

    let n = pairs.len() as f64;
    let mut bandwidths = Vec::with_capacity(THETA_DIM);
    let mut column = vec![0.0; pairs.len()];
    for d in 0..THETA_DIM {
        for (i, p) in pairs.iter().enumerate() {
            column[i] = p.theta.values[d];
        }
        let std = sample_std(&column);
        let mut sorted = column.clone();
        sorted.sort_by(|a, b| a.total_cmp(b));
        let iqr = quantile(&sorted, 0.75) - quantile(&sorted, 0.25);
        let scale = if iqr > 0.0 {
            std.min(iqr / 1.34)
        } else {
            std
        };
        bandwidths.push(jitter * 0.9 * scale * n.powf(-0.2));
    }

    Ok(GeneratorModel {
        layout: THETA_LAYOUT.to_string(),
        k,
        jitter,
        bandwidths,
        pairs,
        mode: SamplerMode::KnnResample,
    })
}

/// Fits the coarse baseline: independent Gaussian marginals per dimension,
/// discarding the conditioning codes.
pub fn fit_baseline(pairs: Vec<TrainingPair>) -> Result<GeneratorModel, GeneratorError> {
    if pairs.is_empty() {
        return Err(GeneratorError::TooFewSamples { needed: 1, got: 0 });
    }
    check_pairs(&pairs)?;
    let mut means = Vec::with_capacity(THETA_DIM);
    let mut stds = Vec::with_capacity(THETA_DIM);
    let mut column = vec![0.0; pairs.len()];
    for d in 0..THETA_DIM {
        for (i, p) in pairs.iter().enumerate() {
            column[i] = p.theta.values[d];
        }
        means.push(column.iter().sum::<f64>() / column.len() as f64);
        stds.push(sample_std(&column));
    }
    Ok(GeneratorModel {
        layout: THETA_LAYOUT.to_string(),
        k: 1,
        jitter: 0.0,
        bandwidths: Vec::new(),
        pairs,
        mode: SamplerMode::MarginalBaseline { means, stds },
    })
}

/// Draws `n` parameter vectors conditioned on `code` (the baseline mode
/// ignores the code). Every draw is decode-validated; a draw that cannot be
/// made valid within 100 resamples fails with `DegenerateModel`.
pub fn generate(
    model: &GeneratorModel,
    code: &SemanticCode,
    seed: u64,
    n: usize,
) -> Result<Vec<ParameterVector>, GeneratorError> {
    if model.layout != THETA_LAYOUT {
        return Err(GeneratorError::VersionMismatch(format!(
            "model layout `{}`",
            model.layout
        )));
    }
    let mut rng = stream_rng(seed, &[domain::GENERATOR]);
    let mut out = Vec::with_capacity(n);

    let neighbors: Vec<usize> = match &model.mode {
        SamplerMode::KnnResample => {
            if model.pairs.is_empty() {
                return Err(GeneratorError::TooFewSamples { needed: 1, got: 0 });
            }
            let expected = model.pairs[0].code.dim();
            if code.dim() != expected {
                return Err(GeneratorError::DimensionMismatch {
                    expected,
                    got: code.dim(),
                });
            }
            let mut dists: Vec<(f64, usize)> = model
                .pairs
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    let d = scene_distance(code, &p.code)
                        .expect("dimensions checked above");
                    (d, i)
                })
                .collect();
            dists.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            dists
                .into_iter()
                .take(model.k.min(model.pairs.len()))
                .map(|(_, i)| i)
                .collect()
        }
        SamplerMode::MarginalBaseline { means, stds } => {
            if means.len() != THETA_DIM || stds.len() != THETA_DIM {
                return Err(GeneratorError::DimensionMismatch {
                    expected: THETA_DIM,
                    got: means.len(),
                });
            }
            Vec::new()
        }
    };

    for _ in 0..n {
        let mut accepted = None;
        for _ in 0..MAX_RESAMPLES {
            let values: Vec<f64> = match &model.mode {
                SamplerMode::KnnResample => {
                    let pick = neighbors[rng.random_range(0..neighbors.len())];
                    let base = &model.pairs[pick].theta.values;
                    base.iter()
                        .zip(model.bandwidths.iter())
                        .map(|(v, bw)| {
                            let z: f64 = StandardNormal.sample(&mut rng);
                            v + bw * z
                        })
                        .collect()
                }
                SamplerMode::MarginalBaseline { means, stds } => means
                    .iter()
                    .zip(stds.iter())
                    .map(|(m, s)| {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        m + s * z
                    })
                    .collect(),
            };
            let theta = match ParameterVector::new(values) {
                Ok(t) => t,
                Err(_) => continue,
            };
            if decode_theta(&theta).is_ok() {
                accepted = Some(theta);
                break;
            }
        }
        match accepted {
            Some(t) => out.push(t),
            None => {
                return Err(GeneratorError::DegenerateModel(format!(
                    "no decodable draw within {MAX_RESAMPLES} resamples"
                )))
            }
        }
    }
    Ok(out)
}

/// Fully decoded, validated view of a parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodedTheta {
    /// Scattering centers; the first [`MAX_PARTS`] carry `part_id 0..`.
    pub centers: Vec<ScatteringCenter>,
    pub speed: f64,
    pub heading_rad: f64,
    pub part_rates: Vec<f64>,
    pub clutter: ClutterParams,
    pub mb_pairs: usize,
    pub mb_loss_db: f64,
}

/// Packs submodule parameters into a flat vector. `centers` must hold
/// exactly [`CENTERS_PER_SET`] entries; `part_rates` is zero-padded to
/// [`MAX_PARTS`].
pub fn encode_theta(
    centers: &[ScatteringCenter],
    speed: f64,
    heading_rad: f64,
    part_rates: &[f64],
    clutter: &ClutterParams,
    mb_pairs: usize,
    mb_loss_db: f64,
) -> Result<ParameterVector, GeneratorError> {
    if centers.len() != CENTERS_PER_SET {
        return Err(GeneratorError::DimensionMismatch {
            expected: CENTERS_PER_SET,
            got: centers.len(),
        });
    }
    if part_rates.len() > MAX_PARTS {
        return Err(GeneratorError::DimensionMismatch {
            expected: MAX_PARTS,
            got: part_rates.len(),
        });
    }
    let mut v = Vec::with_capacity(THETA_DIM);
    for c in centers {
        let alpha_index = ALPHA_VALUES
            .iter()
            .position(|a| *a == c.alpha)
            .ok_or_else(|| {
                GeneratorError::InvalidArgument(format!("alpha {} is not admissible", c.alpha))
            })?;
        v.extend_from_slice(&[
            c.local_position.x(),
            c.local_position.y(),
            c.local_position.z(),
            c.amplitude,
            alpha_index as f64,
            c.aspect_center.x(),
            c.aspect_center.y(),
            c.aspect_center.z(),
            c.aspect_width,
        ]);
    }
    v.push(speed);
    v.push(heading_rad);
    for i in 0..MAX_PARTS {
        v.push(part_rates.get(i).copied().unwrap_or(0.0));
    }
    v.push(clutter.n_clusters as f64);
    v.push(clutter.delay_scaling);
    v.push(clutter.delay_spread_s);
    v.push(clutter.shadowing_std_db);
    v.push(clutter.azimuth_spread_arrival_rad);
    v.push(clutter.azimuth_spread_departure_rad);
    v.push(clutter.elevation_spread_arrival_rad);
    v.push(clutter.elevation_spread_departure_rad);
    v.push(clutter.total_power);
    v.push(mb_pairs as f64);
    v.push(mb_loss_db);
    ParameterVector::new(v)
}

/// Decodes a parameter vector into validated submodule types.
///
/// Decoding clamps rather than rejects out-of-range values so that jittered
/// and baseline draws always map into the model's admissible space: center
/// coordinates to +-5 m, amplitudes to [1e-6, 1e3], alpha to the nearest
/// admissible exponent, aspect directions renormalized, widths to
/// [1e-3, pi]; speed to [0, 100] m/s, heading wrapped, rates to [0, 200] Hz;
/// clutter counts to [0, 64], delay scaling to [1.05, 10], delay spread to
/// [0.1 ns, 10 us], shadowing to [0, 12] dB, angle spreads to [1e-3, pi],
/// total power to [1e-18, 1]; multibounce pairs to [0, 256] and loss to
/// [0, 60] dB. Counts round half-to-even.
pub fn decode_theta(theta: &ParameterVector) -> Result<DecodedTheta, GeneratorError> {
    if theta.layout != THETA_LAYOUT {
        return Err(GeneratorError::VersionMismatch(format!(
            "parameter vector carries layout `{}`",
            theta.layout
        )));
    }
    if theta.dim() != THETA_DIM {
        return Err(GeneratorError::DimensionMismatch {
            expected: THETA_DIM,
            got: theta.dim(),
        });
    }
    if let Some(i) = theta.values.iter().position(|v| !v.is_finite()) {
        return Err(GeneratorError::NonFinite(format!("theta[{i}]")));
    }
    let v = &theta.values;

    let mut centers = Vec::with_capacity(CENTERS_PER_SET);
    for i in 0..CENTERS_PER_SET {
        let o = i * CENTER_DIMS;
        let alpha_idx = v[o + 4]
            .round_ties_even()
            .clamp(0.0, (ALPHA_VALUES.len() - 1) as f64) as usize;
        let aspect = Vec3::new(v[o + 5], v[o + 6], v[o + 7])
            .normalized(1e-9)
            .unwrap_or(Vec3::new(1.0, 0.0, 0.0));
        centers.push(ScatteringCenter {
            local_position: Vec3::new(
                v[o].clamp(-5.0, 5.0),
                v[o + 1].clamp(-5.0, 5.0),
                v[o + 2].clamp(-5.0, 5.0),
            ),
            amplitude: v[o + 3].abs().clamp(1e-6, 1e3),
            alpha: ALPHA_VALUES[alpha_idx],
            aspect_center: aspect,
            aspect_width: v[o + 8].abs().clamp(1e-3, std::f64::consts::PI),
            part_id: if i < MAX_PARTS { Some(i) } else { None },
        });
    }
    for c in &centers {
        c.validate()
            .map_err(|e| GeneratorError::DegenerateModel(e.to_string()))?;
    }

    let m = TARGET_BLOCK;
    let speed = v[m].abs().clamp(0.0, 100.0);
    let heading_rad = wrap_angle(v[m + 1]);
    let part_rates: Vec<f64> = (0..MAX_PARTS)
        .map(|i| v[m + 2 + i].abs().clamp(0.0, 200.0))
        .collect();

    let c = TARGET_BLOCK + MOTION_BLOCK;
    let clutter = ClutterParams {
        n_clusters: v[c].abs().round_ties_even().clamp(0.0, 64.0) as usize,
        delay_scaling: v[c + 1].abs().clamp(1.05, 10.0),
        delay_spread_s: v[c + 2].abs().clamp(1e-10, 1e-5),
        shadowing_std_db: v[c + 3].abs().clamp(0.0, 12.0),
        azimuth_spread_arrival_rad: v[c + 4].abs().clamp(1e-3, std::f64::consts::PI),
        azimuth_spread_departure_rad: v[c + 5].abs().clamp(1e-3, std::f64::consts::PI),
        elevation_spread_arrival_rad: v[c + 6].abs().clamp(1e-3, std::f64::consts::PI),
        elevation_spread_departure_rad: v[c + 7].abs().clamp(1e-3, std::f64::consts::PI),
        total_power: v[c + 8].abs().clamp(1e-18, 1.0),
        rays_per_cluster: DECODED_RAYS_PER_CLUSTER,
    };
    clutter
        .validate()
        .map_err(|e| GeneratorError::DegenerateModel(e.to_string()))?;

    let b = c + CLUTTER_BLOCK;
    let mb_pairs = v[b].abs().round_ties_even().clamp(0.0, 256.0) as usize;
    let mb_loss_db = v[b + 1].abs().clamp(0.0, 60.0);

    Ok(DecodedTheta {
        centers,
        speed,
        heading_rad,
        part_rates,
        clutter,
        mb_pairs,
        mb_loss_db,
    })
}

/// Writes a model file: a magic header line followed by the JSON body.
pub fn save_model(model: &GeneratorModel, path: &Path) -> Result<(), GeneratorError> {
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "{MODEL_MAGIC}")?;
    let body = serde_json::to_string(model)
        .map_err(|e| GeneratorError::Corrupt(e.to_string()))?;
    f.write_all(body.as_bytes())?;
    f.write_all(b"\n")?;
    Ok(())
}

/// Reads a model file, checking the magic header and layout tag.
pub fn load_model(path: &Path) -> Result<GeneratorModel, GeneratorError> {
    let text = std::fs::read_to_string(path)?;
    let (first, rest) = text
        .split_once('\n')
        .ok_or_else(|| GeneratorError::Corrupt("missing header line".into()))?;
    if first.trim_end() != MODEL_MAGIC {
        return Err(GeneratorError::VersionMismatch(format!(
            "expected `{MODEL_MAGIC}`, found `{first}`"
        )));
    }
    let model: GeneratorModel =
        serde_json::from_str(rest).map_err(|e| GeneratorError::Corrupt(e.to_string()))?;
    if model.layout != THETA_LAYOUT {
        return Err(GeneratorError::VersionMismatch(format!(
            "model layout `{}`",
            model.layout
        )));
    }
    Ok(model)
}
