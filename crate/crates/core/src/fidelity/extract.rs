//! Path extraction from rendered frequency responses and the
//! target-matching score built on top of it.
//!
//! Extraction is a deconvolution loop: beamform the zero-padded delay
//! transform onto a sin-space angle grid, take the strongest peak, refine it
//! parabolically, estimate its complex amplitude by matched-filter inner
//! product, subtract, repeat. Matching compares two path sets with a
//! minimum-cost assignment over per-pair scores `exp(-cost)` where cost
//! blends delay, angle and log-amplitude mismatch in resolution units.

use super::{assignment, FidelityError};
use crate::channel::{ArrayGeometry, CfrTensor, PropagationPath, SimConfig};
use num_complex::Complex64;
use rustfft::FftPlanner;

/// Zero-padding factor of the delay transform; the grid step is
/// `1 / (pad * bandwidth)`.
pub const DELAY_PAD: usize = 4;
/// Angle grid step as a fraction of the array beamwidth.
pub const ANGLE_GRID_FRACTION: f64 = 0.25;
/// Residual-to-initial peak power ratio at which extraction stops early.
pub const RESIDUAL_FLOOR: f64 = 1e-12;

/// One extracted (or projected reference) propagation path.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtractedPath {
    pub delay_s: f64,
    /// Sine of the arrival azimuth; a linear array cannot tell front from
    /// back, so comparisons happen in sin space.
    pub sin_az: f64,
    pub amplitude: f64,
    pub phase_rad: f64,
}

fn rx_layout(cfg: &SimConfig) -> (usize, f64) {
    match cfg.rx_array {
        ArrayGeometry::Siso => (1, 0.5),
        ArrayGeometry::Ula {
            elements,
            spacing_wl,
        } => (elements, spacing_wl),
    }
}

/// Delay grid step of the extractor for this config.
pub fn delay_step_s(cfg: &SimConfig) -> f64 {
    1.0 / (DELAY_PAD as f64 * cfg.bandwidth_hz)
}

/// Half-power beamwidth proxy in sin space: `1 / (elements * spacing)`.
/// A single-element array has no angle resolution; the whole visible range
/// counts as one beam.
pub fn beamwidth_sin(cfg: &SimConfig) -> f64 {
    let (n, d) = rx_layout(cfg);
    if n <= 1 {
        2.0
    } else {
        1.0 / (n as f64 * d)
    }
}

/// Sin-space search grid, symmetric about zero.
pub fn angle_grid(cfg: &SimConfig) -> Vec<f64> {
    let (n, _) = rx_layout(cfg);
    if n <= 1 {
        return vec![0.0];
    }
    let step = beamwidth_sin(cfg) * ANGLE_GRID_FRACTION;
    let half = (1.0 / step).floor() as i64;
    (-half..=half).map(|m| m as f64 * step).collect()
}

fn parabolic_offset(left: f64, center: f64, right: f64) -> f64 {
    let denom = left - 2.0 * center + right;
    if denom >= 0.0 || !denom.is_finite() {
        return 0.0;
    }
    (0.5 * (left - right) / denom).clamp(-0.5, 0.5)
}

/// Cyclic re-estimation sweeps after the greedy pass. Each sweep restores
/// one path into the residual and re-fits it with the others removed, which
/// undoes most of the mutual bias between closer-than-Rayleigh arrivals.
const REFINE_PASSES: usize = 2;

struct Searcher<'a> {
    cfg: &'a SimConfig,
    n_rx: usize,
    spacing_wl: f64,
    k_total: usize,
    pad: usize,
    tau_step: f64,
    grid: Vec<f64>,
    /// Steering weights per grid angle, conjugated for beamforming.
    weights: Vec<Vec<Complex64>>,
    ifft: std::sync::Arc<dyn rustfft::Fft<f64>>,
}

struct Candidate {
    delay_s: f64,
    sin_az: f64,
    amp: Complex64,
}

impl<'a> Searcher<'a> {
    fn new(cfg: &'a SimConfig) -> Self {
        let (n_rx, spacing_wl) = rx_layout(cfg);
        let k_total = cfg.n_subcarriers;
        let pad = DELAY_PAD * (k_total - 1);
        let grid = angle_grid(cfg);
        let weights = grid
            .iter()
            .map(|s| {
                (0..n_rx)
                    .map(|r| {
                        Complex64::from_polar(
                            1.0,
                            -2.0 * std::f64::consts::PI * spacing_wl * r as f64 * s,
                        )
                    })
                    .collect()
            })
            .collect();
        Searcher {
            cfg,
            n_rx,
            spacing_wl,
            k_total,
            pad,
            tau_step: delay_step_s(cfg),
            grid,
            weights,
            ifft: FftPlanner::new().plan_fft_inverse(pad),
        }
    }

    /// Location and power of the strongest beamformed delay-map peak, with
    /// quadratic interpolation clamped to half a bin on each axis.
    fn strongest(&self, residual: &[Vec<Complex64>]) -> (f64, f64, f64) {
        let mut delay_rows: Vec<Vec<Complex64>> = Vec::with_capacity(self.n_rx);
        for row in residual {
            let mut buf = vec![Complex64::new(0.0, 0.0); self.pad];
            buf[..self.k_total].copy_from_slice(row);
            self.ifft.process(&mut buf);
            delay_rows.push(buf);
        }

        let mut best = (0usize, 0usize, f64::MIN);
        let mut power = vec![vec![0.0f64; self.pad]; self.grid.len()];
        for (m, w_row) in self.weights.iter().enumerate() {
            let mut acc = vec![Complex64::new(0.0, 0.0); self.pad];
            for (r, w) in w_row.iter().enumerate() {
                for (a, g) in acc.iter_mut().zip(delay_rows[r].iter()) {
                    *a += *w * *g;
                }
            }
            for (n, a) in acc.iter().enumerate() {
                let p = a.norm_sqr();
                power[m][n] = p;
                if p > best.2 {
                    best = (m, n, p);
                }
            }
        }
        let (m0, n0, peak) = best;

        let dn = if n0 > 0 && n0 + 1 < self.pad {
            parabolic_offset(power[m0][n0 - 1], peak, power[m0][n0 + 1])
        } else {
            0.0
        };
        let dm = if m0 > 0 && m0 + 1 < self.grid.len() {
            parabolic_offset(power[m0 - 1][n0], peak, power[m0 + 1][n0])
        } else {
            0.0
        };
        let delay_s = (n0 as f64 + dn) * self.tau_step;
        let sin_az = if self.grid.len() == 1 {
            0.0
        } else {
            (self.grid[m0] + dm * beamwidth_sin(self.cfg) * ANGLE_GRID_FRACTION).clamp(-1.0, 1.0)
        };
        (delay_s, sin_az, peak)
    }

    fn template_at(&self, r: usize, k: usize, delay_s: f64, sin_az: f64) -> Complex64 {
        let steer = Complex64::from_polar(
            1.0,
            2.0 * std::f64::consts::PI * self.spacing_wl * r as f64 * sin_az,
        );
        let f_k = self.cfg.subcarrier_hz(k);
        steer * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * f_k * delay_s)
    }

    fn matched_amp(&self, residual: &[Vec<Complex64>], delay_s: f64, sin_az: f64) -> Complex64 {
        let mut inner = Complex64::new(0.0, 0.0);
        for (r, row) in residual.iter().enumerate() {
            for (k, v) in row.iter().enumerate() {
                inner += *v * self.template_at(r, k, delay_s, sin_az).conj();
            }
        }
        inner / (self.n_rx * self.k_total) as f64
    }

    /// Adds `amp` times the path template to the residual; negate to
    /// subtract.
    fn apply(&self, residual: &mut [Vec<Complex64>], c: &Candidate, amp: Complex64) {
        for (r, row) in residual.iter_mut().enumerate() {
            for (k, v) in row.iter_mut().enumerate() {
                *v += amp * self.template_at(r, k, c.delay_s, c.sin_az);
            }
        }
    }
}

/// Deconvolves up to `max_paths` paths from the first transmit column of a
/// snapshot. Paths come back strongest first. The greedy pass stops early
/// once the residual peak falls below [`RESIDUAL_FLOOR`] times the initial
/// peak; [`REFINE_PASSES`] back-fitting sweeps then re-estimate each path
/// against the residual with only that path restored.
pub fn extract_paths(
    cfr: &CfrTensor,
    cfg: &SimConfig,
    max_paths: usize,
) -> Result<Vec<ExtractedPath>, FidelityError> {
    let k_total = cfg.n_subcarriers;
    if cfr.n_subcarriers() != k_total || cfr.n_rx() != cfg.rx_array.len() {
        return Err(FidelityError::Shape(format!(
            "snapshot is {}x{}x{}, config expects {}x{}x{}",
            cfr.n_rx(),
            cfr.n_tx(),
            cfr.n_subcarriers(),
            cfg.rx_array.len(),
            cfg.tx_array.len(),
            k_total
        )));
    }
    if k_total < 2 {
        return Err(FidelityError::Shape(
            "extraction needs at least 2 subcarriers".into(),
        ));
    }
    let searcher = Searcher::new(cfg);

    // Residual, one row per rx element, first tx column only.
    let mut residual: Vec<Vec<Complex64>> = (0..searcher.n_rx)
        .map(|r| (0..k_total).map(|k| cfr.at(r, 0, k)).collect())
        .collect();

    let mut out: Vec<Candidate> = Vec::new();
    let mut initial_peak = None;
    for _ in 0..max_paths {
        let (delay_s, sin_az, peak) = searcher.strongest(&residual);
        match initial_peak {
            None => initial_peak = Some(peak),
            Some(p0) => {
                if peak <= p0 * RESIDUAL_FLOOR {
                    break;
                }
            }
        }
        let amp = searcher.matched_amp(&residual, delay_s, sin_az);
        let cand = Candidate {
            delay_s,
            sin_az,
            amp,
        };
        searcher.apply(&mut residual, &cand, -amp);
        out.push(cand);
    }

    for _ in 0..REFINE_PASSES {
        for i in 0..out.len() {
            searcher.apply(&mut residual, &out[i], out[i].amp);
            let (delay_s, sin_az, _) = searcher.strongest(&residual);
            let amp = searcher.matched_amp(&residual, delay_s, sin_az);
            let cand = Candidate {
                delay_s,
                sin_az,
                amp,
            };
            searcher.apply(&mut residual, &cand, -amp);
            out[i] = cand;
        }
    }

    out.sort_by(|a, b| b.amp.norm_sqr().total_cmp(&a.amp.norm_sqr()));
    Ok(out
        .into_iter()
        .map(|c| ExtractedPath {
            delay_s: c.delay_s,
            sin_az: c.sin_az,
            amplitude: c.amp.norm(),
            phase_rad: c.amp.arg(),
        })
        .collect())
}

/// Projects assembled propagation paths into the extractor's observation
/// space. Useful for turning a library entry placed in a concrete geometry
/// into reference paths for matching.
pub fn project_paths(paths: &[PropagationPath]) -> Vec<ExtractedPath> {
    paths
        .iter()
        .map(|p| ExtractedPath {
            delay_s: p.delay_s,
            sin_az: p.aoa_az_rad.sin(),
            amplitude: p.amplitude.norm(),
            phase_rad: p.amplitude.arg(),
        })
        .collect()
}

/// Fuses paths that fall inside one resolution cell (half a delay cell and
/// half a beamwidth) into the single path the deconvolver would report for
/// them: the matched-filter response of their coherent sum at the power
/// centroid. Clusters grow greedily around the strongest remaining path.
/// Output comes back strongest first.
pub fn coalesce_paths(paths: &[ExtractedPath], cfg: &SimConfig) -> Vec<ExtractedPath> {
    let (n_rx, spacing_wl) = rx_layout(cfg);
    let k_total = cfg.n_subcarriers;
    let dtau_max = 0.5 / cfg.bandwidth_hz;
    let dsin_max = 0.5 * beamwidth_sin(cfg);

    // Matched-filter gain of a unit path offset from the template; carrier
    // phase rides along in the delay kernel because the grid is absolute.
    let delay_kernel = |dt: f64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..k_total {
            let f_k = cfg.subcarrier_hz(k);
            acc += Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * f_k * dt);
        }
        acc / k_total as f64
    };
    let angle_kernel = |ds: f64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for r in 0..n_rx {
            acc += Complex64::from_polar(
                1.0,
                2.0 * std::f64::consts::PI * spacing_wl * r as f64 * ds,
            );
        }
        acc / n_rx as f64
    };

    let mut order: Vec<usize> = (0..paths.len()).collect();
    order.sort_by(|&a, &b| {
        paths[b]
            .amplitude
            .total_cmp(&paths[a].amplitude)
            .then(a.cmp(&b))
    });

    let mut used = vec![false; paths.len()];
    let mut out = Vec::new();
    for &seed in &order {
        if used[seed] {
            continue;
        }
        let members: Vec<usize> = order
            .iter()
            .copied()
            .filter(|&j| {
                !used[j]
                    && (paths[j].delay_s - paths[seed].delay_s).abs() <= dtau_max
                    && (paths[j].sin_az - paths[seed].sin_az).abs() <= dsin_max
            })
            .collect();
        let mut w_total = 0.0;
        let mut tau = 0.0;
        let mut sin = 0.0;
        for &j in &members {
            used[j] = true;
            let w = paths[j].amplitude * paths[j].amplitude;
            w_total += w;
            tau += w * paths[j].delay_s;
            sin += w * paths[j].sin_az;
        }
        if w_total <= 0.0 {
            continue;
        }
        tau /= w_total;
        sin /= w_total;
        let mut amp = Complex64::new(0.0, 0.0);
        for &j in &members {
            let b = Complex64::from_polar(paths[j].amplitude, paths[j].phase_rad);
            amp += b * delay_kernel(paths[j].delay_s - tau) * angle_kernel(paths[j].sin_az - sin);
        }
        out.push(ExtractedPath {
            delay_s: tau,
            sin_az: sin,
            amplitude: amp.norm(),
            phase_rad: amp.arg(),
        });
    }
    out.sort_by(|a, b| b.amplitude.total_cmp(&a.amplitude));
    out
}

/// Mismatch normalization for the matching cost: one delay resolution cell,
/// one beamwidth, and a 6 dB amplitude ratio each contribute unit cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TmsScales {
    pub bandwidth_hz: f64,
    pub beamwidth_sin: f64,
    pub amp_scale_db: f64,
}

impl TmsScales {
    pub fn from_config(cfg: &SimConfig) -> Self {
        TmsScales {
            bandwidth_hz: cfg.bandwidth_hz,
            beamwidth_sin: beamwidth_sin(cfg),
            amp_scale_db: 6.0,
        }
    }
}

fn pair_score(e: &ExtractedPath, r: &ExtractedPath, s: &TmsScales) -> f64 {
    let d_tau = (e.delay_s - r.delay_s) * s.bandwidth_hz;
    let d_sin = (e.sin_az - r.sin_az) / s.beamwidth_sin;
    let d_amp = if e.amplitude == 0.0 && r.amplitude == 0.0 {
        0.0
    } else if e.amplitude == 0.0 || r.amplitude == 0.0 {
        return 0.0;
    } else {
        20.0 * (e.amplitude / r.amplitude).log10() / s.amp_scale_db
    };
    let cost = d_tau * d_tau + d_sin * d_sin + d_amp * d_amp;
    (-cost).exp()
}

/// Target-matching score in [0, 1]: the assignment that maximizes the sum
/// of per-pair scores, normalized by the larger set size. Two empty sets
/// match perfectly; an empty set against a non-empty one scores zero.
pub fn tms(
    estimated: &[ExtractedPath],
    reference: &[ExtractedPath],
    scales: &TmsScales,
) -> Result<f64, FidelityError> {
    if estimated.is_empty() && reference.is_empty() {
        return Ok(1.0);
    }
    if estimated.is_empty() || reference.is_empty() {
        return Ok(0.0);
    }
    let costs = assignment::CostMatrix::from_fn(estimated.len(), reference.len(), |i, j| {
        -pair_score(&estimated[i], &reference[j], scales)
    })?;
    let sol = assignment::solve(&costs)?;
    Ok(-sol.total_cost / estimated.len().max(reference.len()) as f64)
}

/// Scores an observation against every candidate and returns the index of
/// the best match along with all scores. Ties keep the earliest candidate.
pub fn identify(
    estimated: &[ExtractedPath],
    candidates: &[Vec<ExtractedPath>],
    scales: &TmsScales,
) -> Result<(usize, Vec<f64>), FidelityError> {
    if candidates.is_empty() {
        return Err(FidelityError::Shape("no candidates to identify against".into()));
    }
    let mut scores = Vec::with_capacity(candidates.len());
    for cand in candidates {
        scores.push(tms(estimated, cand, scales)?);
    }
    let mut best = 0;
    for (i, s) in scores.iter().enumerate() {
        if *s > scores[best] {
            best = i;
        }
    }
    Ok((best, scores))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{render_cfr, PathKind, PathSource};
    use approx::assert_relative_eq;

    fn test_cfg() -> SimConfig {
        SimConfig {
            carrier_hz: 10e9,
            bandwidth_hz: 500e6,
            n_subcarriers: 64,
            rx_array: ArrayGeometry::Ula {
                elements: 8,
                spacing_wl: 0.5,
            },
            tx_array: ArrayGeometry::Siso,
            noise_power: 0.0,
            ..SimConfig::default()
        }
    }

    fn path(delay_s: f64, sin_az: f64, amp: f64) -> PropagationPath {
        PropagationPath {
            kind: PathKind::LineOfSight,
            delay_s,
            amplitude: Complex64::new(amp, 0.0),
            doppler_hz: 0.0,
            freq_exponent: 0.0,
            aod_az_rad: 0.0,
            aod_el_rad: 0.0,
            aoa_az_rad: sin_az.asin(),
            aoa_el_rad: 0.0,
            waypoints: Vec::new(),
            source: PathSource::default(),
        }
    }

    #[test]
    fn on_grid_path_is_recovered_exactly() {
        let cfg = test_cfg();
        let tau = 16.0 * delay_step_s(&cfg);
        let sin_az = 4.0 * beamwidth_sin(&cfg) * ANGLE_GRID_FRACTION;
        let cfr = render_cfr(&[path(tau, sin_az, 2.5)], &cfg, 0.0, None);
        let got = extract_paths(&cfr, &cfg, 1).unwrap();
        assert_eq!(got.len(), 1);
        assert_relative_eq!(got[0].delay_s, tau, max_relative = 1e-9);
        assert_relative_eq!(got[0].sin_az, sin_az, max_relative = 1e-9);
        assert_relative_eq!(got[0].amplitude, 2.5, max_relative = 1e-9);
        assert!(got[0].phase_rad.abs() < 1e-9);
    }

    #[test]
    fn two_separated_paths_are_both_recovered() {
        let cfg = test_cfg();
        let step = delay_step_s(&cfg);
        let bw = beamwidth_sin(&cfg);
        let p1 = path(16.0 * step, 4.0 * bw * ANGLE_GRID_FRACTION, 3.0);
        let p2 = path(60.0 * step, -8.0 * bw * ANGLE_GRID_FRACTION, 1.0);
        let cfr = render_cfr(&[p1.clone(), p2.clone()], &cfg, 0.0, None);
        let got = extract_paths(&cfr, &cfg, 2).unwrap();
        assert_eq!(got.len(), 2);
        // Strongest first. Sidelobe cross-talk between non-orthogonal
        // templates bounds single-pass accuracy near 1e-6 relative.
        assert_relative_eq!(got[0].delay_s, p1.delay_s, max_relative = 1e-4);
        assert_relative_eq!(got[0].amplitude, 3.0, max_relative = 1e-4);
        assert_relative_eq!(got[1].delay_s, p2.delay_s, max_relative = 1e-4);
        assert_relative_eq!(got[1].amplitude, 1.0, max_relative = 1e-4);
    }

    #[test]
    fn off_grid_delay_is_refined_within_a_quarter_bin() {
        let cfg = test_cfg();
        let step = delay_step_s(&cfg);
        let tau = 16.37 * step;
        let cfr = render_cfr(&[path(tau, 0.0, 1.0)], &cfg, 0.0, None);
        let got = extract_paths(&cfr, &cfg, 1).unwrap();
        assert!(
            (got[0].delay_s - tau).abs() < 0.25 * step,
            "refined delay {} vs true {}",
            got[0].delay_s,
            tau
        );
    }

    #[test]
    fn residual_floor_stops_extraction_early() {
        let cfg = test_cfg();
        let tau = 16.0 * delay_step_s(&cfg);
        let cfr = render_cfr(&[path(tau, 0.0, 1.0)], &cfg, 0.0, None);
        // Ask for many more paths than exist; the exact subtraction pushes
        // the residual to rounding level after one pass.
        let got = extract_paths(&cfr, &cfg, 10).unwrap();
        assert!(got.len() < 10, "extraction must stop at the residual floor");
    }

    #[test]
    fn single_element_array_pins_angle_to_zero() {
        let cfg = SimConfig {
            rx_array: ArrayGeometry::Siso,
            ..test_cfg()
        };
        let tau = 20.0 * delay_step_s(&cfg);
        let cfr = render_cfr(&[path(tau, 0.3, 1.5)], &cfg, 0.0, None);
        let got = extract_paths(&cfr, &cfg, 1).unwrap();
        assert_eq!(got[0].sin_az, 0.0);
        assert_relative_eq!(got[0].delay_s, tau, max_relative = 1e-9);
    }

    #[test]
    fn projection_maps_angles_to_sin_space() {
        let p = path(5e-9, 0.6, 0.5);
        let got = project_paths(&[p]);
        assert_relative_eq!(got[0].sin_az, 0.6, max_relative = 1e-12);
        assert_eq!(got[0].delay_s, 5e-9);
        assert_eq!(got[0].amplitude, 0.5);
    }

    fn scales() -> TmsScales {
        TmsScales::from_config(&test_cfg())
    }

    fn xp(delay_ns: f64, sin_az: f64, amp: f64) -> ExtractedPath {
        ExtractedPath {
            delay_s: delay_ns * 1e-9,
            sin_az,
            amplitude: amp,
            phase_rad: 0.0,
        }
    }

    #[test]
    fn identical_sets_score_one() {
        let a = vec![xp(10.0, 0.2, 1.0), xp(25.0, -0.4, 0.5)];
        assert_relative_eq!(tms(&a, &a, &scales()).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn empty_set_rules() {
        let a = vec![xp(10.0, 0.2, 1.0)];
        assert_eq!(tms(&[], &[], &scales()).unwrap(), 1.0);
        assert_eq!(tms(&a, &[], &scales()).unwrap(), 0.0);
        assert_eq!(tms(&[], &a, &scales()).unwrap(), 0.0);
    }

    #[test]
    fn score_decays_with_growing_mismatch() {
        let reference = vec![xp(10.0, 0.0, 1.0)];
        let s = scales();
        let exact = tms(&reference, &reference, &s).unwrap();
        let near = tms(&[xp(10.5, 0.0, 1.0)], &reference, &s).unwrap();
        let far = tms(&[xp(14.0, 0.0, 1.0)], &reference, &s).unwrap();
        assert!(exact > near && near > far, "{exact} > {near} > {far}");
        assert!(far < 0.02);
    }

    #[test]
    fn surplus_paths_dilute_the_score() {
        let reference = vec![xp(10.0, 0.0, 1.0)];
        let padded = vec![xp(10.0, 0.0, 1.0), xp(90.0, 0.5, 1.0)];
        let s = tms(&padded, &reference, &scales()).unwrap();
        assert!(s <= 0.5 + 1e-12, "one of two paths matches: {s}");
        assert!(s > 0.45);
    }

    #[test]
    fn zero_amplitude_paths_cannot_match() {
        let a = vec![xp(10.0, 0.0, 0.0)];
        let b = vec![xp(10.0, 0.0, 1.0)];
        assert_eq!(tms(&a, &b, &scales()).unwrap(), 0.0);
        // Two silent paths agree.
        assert_eq!(tms(&a, &a, &scales()).unwrap(), 1.0);
    }

    #[test]
    fn identify_prefers_the_generating_candidate() {
        let truth = vec![xp(10.0, 0.1, 1.0), xp(22.0, -0.3, 0.4)];
        let other = vec![xp(55.0, 0.5, 1.0), xp(70.0, -0.1, 0.4)];
        let observed = vec![xp(10.2, 0.11, 0.95), xp(21.9, -0.29, 0.42)];
        let (best, all) = identify(&observed, &[other, truth], &scales()).unwrap();
        assert_eq!(best, 1);
        assert_eq!(all.len(), 2);
        assert!(all[1] > all[0]);
    }

    #[test]
    fn identify_needs_candidates() {
        assert!(identify(&[], &[], &scales()).is_err());
    }
}
