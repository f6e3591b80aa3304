//! Distribution-level and path-level fidelity measures.
//!
//! The distribution side compares scalar feature samples (exact 1D
//! Wasserstein, sliced Wasserstein for vector ensembles, two-sample
//! Kolmogorov-Smirnov with the classic asymptotic p-value) and calibrates
//! exceedance thresholds from reference score samples. The path side lives
//! in [`extract`] (deconvolution and matching) on top of the assignment
//! solver in [`assignment`].

pub mod assignment;
pub mod extract;

pub use assignment::{solve as solve_assignment, Assignment, CostMatrix};
pub use extract::{
    extract_paths, identify, project_paths, tms, ExtractedPath, TmsScales,
};

use crate::rng::{domain, stream_rng};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FidelityError {
    #[error("empty sample set: {0}")]
    EmptySample(String),
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

fn check_samples(name: &str, xs: &[f64]) -> Result<(), FidelityError> {
    if xs.is_empty() {
        return Err(FidelityError::EmptySample(name.into()));
    }
    if xs.iter().any(|v| !v.is_finite()) {
        return Err(FidelityError::NonFinite(name.into()));
    }
    Ok(())
}

/// Exact 1D Wasserstein-1 distance between two empirical distributions,
/// by integrating the quantile-function gap. Sample sizes may differ;
/// breakpoints are compared with integer cross-multiplication so no mass
/// is lost to rounding.
pub fn wasserstein_1d(a: &[f64], b: &[f64]) -> Result<f64, FidelityError> {
    check_samples("first sample", a)?;
    check_samples("second sample", b)?;
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(|p, q| p.total_cmp(q));
    ys.sort_by(|p, q| p.total_cmp(q));
    let (n, m) = (xs.len() as u64, ys.len() as u64);
    let scale = (n * m) as f64;

    let mut acc = 0.0;
    let mut prev = 0u64; // breakpoint numerator over n*m
    let (mut i, mut j) = (0u64, 0u64);
    while i < n && j < m {
        let next_a = (i + 1) * m;
        let next_b = (j + 1) * n;
        let next = next_a.min(next_b);
        acc += (xs[i as usize] - ys[j as usize]).abs() * ((next - prev) as f64 / scale);
        prev = next;
        if next_a == next {
            i += 1;
        }
        if next_b == next {
            j += 1;
        }
    }
    Ok(acc)
}

/// Sliced Wasserstein distance between two point clouds in R^d: the mean
/// 1D Wasserstein distance over random unit projections. Deterministic in
/// `seed`.
pub fn sliced_wasserstein(
    a: &[Vec<f64>],
    b: &[Vec<f64>],
    n_projections: usize,
    seed: u64,
) -> Result<f64, FidelityError> {
    if a.is_empty() || b.is_empty() {
        return Err(FidelityError::EmptySample("point cloud".into()));
    }
    if n_projections == 0 {
        return Err(FidelityError::InvalidArgument(
            "need at least one projection".into(),
        ));
    }
    let d = a[0].len();
    if d == 0 {
        return Err(FidelityError::Shape("zero-dimensional points".into()));
    }
    for (label, cloud) in [("first", a), ("second", b)] {
        for p in cloud.iter() {
            if p.len() != d {
                return Err(FidelityError::Shape(format!(
                    "{label} cloud mixes dimensions {d} and {}",
                    p.len()
                )));
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(FidelityError::NonFinite(format!("{label} cloud")));
            }
        }
    }

    let mut rng = stream_rng(seed, &[domain::PROJECTIONS]);
    let mut pa = vec![0.0; a.len()];
    let mut pb = vec![0.0; b.len()];
    let mut total = 0.0;
    for _ in 0..n_projections {
        // Direction on the unit sphere; renormalized Gaussian.
        let dir = loop {
            let v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-12 {
                break v.into_iter().map(|x| x / norm).collect::<Vec<f64>>();
            }
        };
        for (out, p) in pa.iter_mut().zip(a.iter()) {
            *out = p.iter().zip(dir.iter()).map(|(x, u)| x * u).sum();
        }
        for (out, p) in pb.iter_mut().zip(b.iter()) {
            *out = p.iter().zip(dir.iter()).map(|(x, u)| x * u).sum();
        }
        total += wasserstein_1d(&pa, &pb)?;
    }
    Ok(total / n_projections as f64)
}

/// Outcome of a two-sample Kolmogorov-Smirnov test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    /// `n*m / (n+m)`, the effective sample size of the pair.
    pub n_effective: f64,
}

/// Survival function of the Kolmogorov distribution,
/// `Q(lambda) = 2 sum_{k>=1} (-1)^(k-1) exp(-2 k^2 lambda^2)`.
fn kolmogorov_sf(lambda: f64) -> f64 {
    // Below 0.2 the series needs thousands of terms while the true value
    // differs from 1 by under 1e-12.
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let term = (-2.0 * (k as f64) * (k as f64) * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-16 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Two-sample Kolmogorov-Smirnov test. The p-value uses the asymptotic
/// Kolmogorov distribution with the finite-sample argument
/// `(sqrt(n_e) + 0.12 + 0.11/sqrt(n_e)) * D`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult, FidelityError> {
    check_samples("first sample", a)?;
    check_samples("second sample", b)?;
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(|p, q| p.total_cmp(q));
    ys.sort_by(|p, q| p.total_cmp(q));
    let (n, m) = (xs.len(), ys.len());
    let (fn_, fm) = (n as f64, m as f64);

    let mut d: f64 = 0.0;
    let (mut i, mut j) = (0usize, 0usize);
    while i < n && j < m {
        let (x, y) = (xs[i], ys[j]);
        if x < y {
            i += 1;
        } else if y < x {
            j += 1;
        } else {
            // Move both pointers past the tie before comparing CDFs.
            while i < n && xs[i] == x {
                i += 1;
            }
            while j < m && ys[j] == y {
                j += 1;
            }
        }
        d = d.max((i as f64 / fn_ - j as f64 / fm).abs());
    }

    let n_effective = fn_ * fm / (fn_ + fm);
    let root = n_effective.sqrt();
    let lambda = (root + 0.12 + 0.11 / root) * d;
    Ok(KsResult {
        statistic: d,
        p_value: kolmogorov_sf(lambda),
        n_effective,
    })
}

/// Fraction of samples at or above `x`.
pub fn ccdf(samples: &[f64], x: f64) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    samples.iter().filter(|v| **v >= x).count() as f64 / samples.len() as f64
}

/// Largest threshold whose empirical exceedance over `samples` is at least
/// `coverage`: sort ascending and take the element at
/// `floor((1 - coverage) * (n - 1))`.
pub fn calibrate_threshold(samples: &[f64], coverage: f64) -> Result<f64, FidelityError> {
    check_samples("calibration sample", samples)?;
    if !(coverage > 0.0 && coverage <= 1.0) {
        return Err(FidelityError::InvalidArgument(format!(
            "coverage must be in (0, 1], got {coverage}"
        )));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|p, q| p.total_cmp(q));
    let idx = ((1.0 - coverage) * (sorted.len() - 1) as f64).floor() as usize;
    Ok(sorted[idx.min(sorted.len() - 1)])
}

/// Summary emitted by the evaluation studies: named scalar distances,
/// named two-sample tests, and optional path-matching aggregates.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct FidelityReport {
    pub wasserstein: BTreeMap<String, f64>,
    pub ks: BTreeMap<String, KsResult>,
    pub sliced_wasserstein_theta: Option<f64>,
    pub mean_tms: Option<f64>,
    pub n_reference: usize,
    pub n_model: usize,
}
