//! Many independent process paths: sector occupancy, origin flux and
//! emission statistics, with the acceptance tests built on them.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::jump::{
    sample_emission_angles, simulate_path, Configuration, JumpError, JumpEvent, ModelFamily, PathPiece, ProcessPath,
};
use crate::rng::path_rng;
use crate::stats::{chi_square_uniform, ks_test, ChiSquareResult, KsResult};
use crate::track::CoefficientTrack;
use crate::wavefunction::ModelWavefunction;

pub const ANGLE_BINS: usize = 10;
const TIME_BINS: usize = 50;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnsembleError {
    #[error("|psi0|^2 + int rho = {0}, not 1")]
    Normalization(f64),
    #[error("need at least {need} emission events, got {got}")]
    InsufficientEvents { got: u64, need: u64 },
    #[error("path {index}: {source}")]
    Path { index: u64, source: JumpError },
    #[error("{0}")]
    Domain(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleConfig {
    pub n_paths: u64,
    pub t_span: (f64, f64),
    pub seed: u64,
    /// Times at which the vacuum occupancy is recorded.
    pub grid: Vec<f64>,
    pub r_probe: f64,
    pub normalization_tol: f64,
}

impl EnsembleConfig {
    pub fn new(n_paths: u64, t_span: (f64, f64), seed: u64, grid_points: usize, r_probe: f64) -> Self {
        let n = grid_points.max(2);
        let grid = (0..n).map(|i| t_span.0 + (t_span.1 - t_span.0) * i as f64 / (n - 1) as f64).collect();
        EnsembleConfig { n_paths, t_span, seed, grid, r_probe, normalization_tol: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn new(lo: f64, hi: f64, bins: usize) -> Self {
        Histogram { lo, hi, counts: vec![0; bins] }
    }

    pub fn add(&mut self, x: f64) {
        let n = self.counts.len();
        let k = ((x - self.lo) / (self.hi - self.lo) * n as f64).floor();
        self.counts[(k.max(0.0) as usize).min(n - 1)] += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    fn merge(&mut self, other: &Histogram) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }
}

/// Mergeable accumulator over paths.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleStats {
    pub n_paths: u64,
    pub t_span: (f64, f64),
    pub grid: Vec<f64>,
    pub vacuum_counts: Vec<u64>,
    pub emission_times: Histogram,
    pub absorption_times: Histogram,
    /// Row-major `ANGLE_BINS x ANGLE_BINS` counts in `(cos theta0, phi0)`.
    pub angle_counts: Vec<u64>,
    pub emission_cos: Vec<f64>,
    pub r_probe: f64,
    pub crossings_out: u64,
    pub crossings_in: u64,
    /// Radii at the end of the window of particles still in the inner region.
    pub final_radii: Vec<f64>,
}

impl EnsembleStats {
    pub fn empty(cfg: &EnsembleConfig) -> Self {
        let (a, b) = cfg.t_span;
        EnsembleStats {
            n_paths: 0,
            t_span: cfg.t_span,
            grid: cfg.grid.clone(),
            vacuum_counts: vec![0; cfg.grid.len()],
            emission_times: Histogram::new(a, b, TIME_BINS),
            absorption_times: Histogram::new(a, b, TIME_BINS),
            angle_counts: vec![0; ANGLE_BINS * ANGLE_BINS],
            emission_cos: Vec::new(),
            r_probe: cfg.r_probe,
            crossings_out: 0,
            crossings_in: 0,
            final_radii: Vec::new(),
        }
    }

    pub fn add_path(&mut self, path: &ProcessPath, inner_radius: f64) {
        self.n_paths += 1;
        for (k, &t) in self.grid.iter().enumerate() {
            if path.is_vacuum_at(t) {
                self.vacuum_counts[k] += 1;
            }
        }
        for ev in &path.events {
            match *ev {
                JumpEvent::Emission { t0, theta0, phi0 } => {
                    self.emission_times.add(t0);
                    self.add_angles(theta0.cos(), phi0);
                }
                JumpEvent::Absorption { t0 } => self.absorption_times.add(t0),
            }
        }
        for piece in &path.pieces {
            if let PathPiece::Flight { segment, .. } = piece {
                for w in segment.samples.windows(2) {
                    let (a, b) = (w[0].r - self.r_probe, w[1].r - self.r_probe);
                    if a < 0.0 && b >= 0.0 {
                        self.crossings_out += 1;
                    } else if a >= 0.0 && b < 0.0 {
                        self.crossings_in += 1;
                    }
                }
            }
        }
        // parked particles sit on the inner boundary and are not part of the inner distribution
        let in_flight = matches!(path.pieces.last(), Some(PathPiece::Flight { .. }));
        if let (true, Configuration::Particle(x)) = (in_flight, path.configuration_at(self.t_span.1)) {
            let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
            if r < inner_radius {
                self.final_radii.push(r);
            }
        }
    }

    pub fn add_angles(&mut self, cos_theta: f64, phi: f64) {
        let n = ANGLE_BINS as f64;
        let i = (((cos_theta + 1.0) / 2.0 * n).floor().max(0.0) as usize).min(ANGLE_BINS - 1);
        let j = ((phi.rem_euclid(2.0 * PI) / (2.0 * PI) * n).floor().max(0.0) as usize).min(ANGLE_BINS - 1);
        self.angle_counts[i * ANGLE_BINS + j] += 1;
        self.emission_cos.push(cos_theta);
    }

    /// Associative merge; `other` must come from the same configuration.
    pub fn merge(mut self, other: EnsembleStats) -> EnsembleStats {
        self.n_paths += other.n_paths;
        for (a, b) in self.vacuum_counts.iter_mut().zip(&other.vacuum_counts) {
            *a += b;
        }
        self.emission_times.merge(&other.emission_times);
        self.absorption_times.merge(&other.absorption_times);
        for (a, b) in self.angle_counts.iter_mut().zip(&other.angle_counts) {
            *a += b;
        }
        self.emission_cos.extend(other.emission_cos);
        self.crossings_out += other.crossings_out;
        self.crossings_in += other.crossings_in;
        self.final_radii.extend(other.final_radii);
        self
    }

    /// `(t, p0_hat, binomial standard error)` on the grid.
    pub fn vacuum_occupancy(&self) -> Vec<(f64, f64, f64)> {
        let n = self.n_paths.max(1) as f64;
        self.grid
            .iter()
            .zip(&self.vacuum_counts)
            .map(|(&t, &c)| {
                let p = c as f64 / n;
                (t, p, (p * (1.0 - p) / n).sqrt())
            })
            .collect()
    }

    pub fn emission_count(&self) -> u64 {
        self.emission_times.total()
    }
}

/// Draws the initial configuration from `|psi0|^2` and `|psi^(1)|^2`.
pub fn sample_initial<R: Rng + ?Sized>(model: &ModelWavefunction, vacuum_prob: f64, rng: &mut R) -> Configuration {
    if rng.random::<f64>() < vacuum_prob {
        return Configuration::Vacuum;
    }
    let mass = rng.random::<f64>() * model.norm_sqr();
    let r = model.radius_for_mass(mass).max(f64::MIN_POSITIVE);
    let (theta, phi) = sample_emission_angles(rng);
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Configuration::Particle([r * st * cp, r * st * sp, r * ct])
}

pub fn run_ensemble(
    family: &ModelFamily,
    track: &CoefficientTrack,
    cfg: &EnsembleConfig,
) -> Result<EnsembleStats, EnsembleError> {
    let (t0, _) = cfg.t_span;
    let model = family.model(track, t0).map_err(|e| EnsembleError::Path { index: 0, source: e })?;
    let p_vac = track.vacuum_probability(t0);
    let total = p_vac + model.norm_sqr();
    if !((total - 1.0).abs() <= cfg.normalization_tol) {
        return Err(EnsembleError::Normalization(total));
    }
    let inner = model.inner_radius();
    (0..cfg.n_paths)
        .into_par_iter()
        .try_fold(
            || EnsembleStats::empty(cfg),
            |mut acc, index| {
                let mut rng = path_rng(cfg.seed, index);
                let q0 = sample_initial(&model, p_vac, &mut rng);
                let path = simulate_path(family, track, q0, cfg.t_span, &mut rng)
                    .map_err(|source| EnsembleError::Path { index, source })?;
                acc.add_path(&path, inner);
                Ok(acc)
            },
        )
        .try_reduce(|| EnsembleStats::empty(cfg), |a, b| Ok(a.merge(b)))
        .map(|mut s| {
            // parallel reduction order is not fixed; sorting restores reproducibility
            s.emission_cos.sort_by(f64::total_cmp);
            s.final_radii.sort_by(f64::total_cmp);
            s
        })
}

/// Vacuum probability from `dp/dt = -Gamma(t) p + 4 pi max(0, -C_r(t))` by
/// classical RK4, evaluated on `grid`.
pub fn solve_master_equation(track: &CoefficientTrack, p_init: f64, grid: &[f64], substeps: usize) -> Vec<f64> {
    let rhs = |t: f64, p: f64| {
        let cr = track.c_r(t);
        let gain = 4.0 * PI * (-cr).max(0.0);
        let loss = if cr > 0.0 { 4.0 * PI * cr / track.vacuum_probability(t) } else { 0.0 };
        -loss * p + gain
    };
    let mut out = Vec::with_capacity(grid.len());
    let mut p = p_init;
    for (k, &t) in grid.iter().enumerate() {
        if k > 0 {
            let t_prev = grid[k - 1];
            let h = (t - t_prev) / substeps as f64;
            for j in 0..substeps {
                let s = t_prev + j as f64 * h;
                let k1 = rhs(s, p);
                let k2 = rhs(s + 0.5 * h, p + 0.5 * h * k1);
                let k3 = rhs(s + 0.5 * h, p + 0.5 * h * k2);
                let k4 = rhs(s + h, p + h * k3);
                p += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
            }
        }
        out.push(p);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OccupancyReport {
    pub z_scores: Vec<(f64, f64)>,
    pub n_outside: usize,
    pub fraction_outside: f64,
    pub pass: bool,
}

/// z-scores of the empirical vacuum occupancy against `reference` on the grid;
/// passes iff at most 1% of grid times exceed `|z| = 3`.
pub fn occupancy_comparison(stats: &EnsembleStats, reference: &[f64]) -> OccupancyReport {
    let n = stats.n_paths.max(1) as f64;
    let z_scores: Vec<(f64, f64)> = stats
        .vacuum_occupancy()
        .iter()
        .zip(reference)
        .map(|(&(t, p_hat, _), &p)| {
            let var = (p * (1.0 - p)).max(1.0 / n) / n;
            (t, (p_hat - p) / var.sqrt())
        })
        .collect();
    let n_outside = z_scores.iter().filter(|z| z.1.abs() > 3.0).count();
    let fraction_outside = n_outside as f64 / z_scores.len().max(1) as f64;
    OccupancyReport { z_scores, n_outside, fraction_outside, pass: fraction_outside <= 0.01 }
}

/// Empirical vacuum occupancy against `|psi0(t)|^2`.
pub fn sector0_comparison(stats: &EnsembleStats, track: &CoefficientTrack) -> OccupancyReport {
    let reference: Vec<f64> = stats.grid.iter().map(|&t| track.vacuum_probability(t)).collect();
    occupancy_comparison(stats, &reference)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FluxEstimate {
    /// Net outward crossings per path per unit time.
    pub rate: f64,
    pub std_err: f64,
}

impl FluxEstimate {
    pub fn z_score(&self, expected: f64) -> f64 {
        (self.rate - expected) / self.std_err.max(f64::MIN_POSITIVE)
    }
}

pub fn flux_estimate(stats: &EnsembleStats) -> FluxEstimate {
    let norm = stats.n_paths.max(1) as f64 * (stats.t_span.1 - stats.t_span.0);
    let net = stats.crossings_out as f64 - stats.crossings_in as f64;
    let total = (stats.crossings_out + stats.crossings_in) as f64;
    FluxEstimate { rate: net / norm, std_err: total.max(1.0).sqrt() / norm }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AngleReport {
    pub chi_square: ChiSquareResult,
    pub ks_cos_theta: KsResult,
    pub pass: bool,
}

pub fn angle_uniformity_test(stats: &EnsembleStats) -> Result<AngleReport, EnsembleError> {
    let got = stats.emission_cos.len() as u64;
    if got < 1000 {
        return Err(EnsembleError::InsufficientEvents { got, need: 1000 });
    }
    let chi_square = chi_square_uniform(&stats.angle_counts);
    let ks_cos_theta = ks_test(&stats.emission_cos, |c| ((c + 1.0) / 2.0).clamp(0.0, 1.0));
    let pass = chi_square.p_value >= 0.01 && ks_cos_theta.p_value >= 0.01;
    Ok(AngleReport { chi_square, ks_cos_theta, pass })
}

/// KS test of end-of-window radii inside the inner region against `|psi^(1)|^2`,
/// meaningful for windows with constant coefficients.
pub fn radial_density_test(stats: &EnsembleStats, model: &ModelWavefunction) -> KsResult {
    let inner = model.radial_mass(model.inner_radius());
    ks_test(&stats.final_radii, |r| (model.radial_mass(r) / inner).clamp(0.0, 1.0))
}
