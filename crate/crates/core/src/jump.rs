//! The Markov jump process: creation rates, waiting times by thinning,
//! emission angles, absorption, and the probability balance between sectors.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::params::PhysParams;
use crate::track::CoefficientTrack;
use crate::trajectory::{
    emit_with, integrate_with, seed_offset, CoefficientSource, Frozen, IntegrateOptions, SphericalState, Terminal,
    TrajectoryError, TrajectorySegment,
};
use crate::wavefunction::{current_coeffs, ModelError, ModelWavefunction};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JumpError {
    #[error("vacuum amplitude vanishes at t = {0} while the creation rate is positive")]
    VacuumEmpty(f64),
    #[error("rate {rate} exceeds the thinning majorant {bound} at t = {t}")]
    Majorant { t: f64, rate: f64, bound: f64 },
    #[error(transparent)]
    Trajectory(#[from] TrajectoryError),
    #[error("{0}")]
    Domain(String),
}

impl From<ModelError> for JumpError {
    fn from(e: ModelError) -> Self {
        JumpError::Trajectory(e.into())
    }
}

/// Emission rate density per `dtheta0 dphi0` for given coefficients.
pub fn rate_density(
    params: &PhysParams,
    c_minus: Complex64,
    c_plus: Complex64,
    vacuum_prob: f64,
    theta0: f64,
) -> Option<f64> {
    let im = (c_minus.conj() * c_plus).im;
    if im <= 0.0 {
        return Some(0.0);
    }
    if vacuum_prob <= 0.0 {
        return None;
    }
    let k = 2.0 * params.one_plus_q() * params.b() / PI;
    Some(k * im * theta0.sin().max(0.0) / vacuum_prob)
}

/// Total rate of leaving the vacuum for given coefficients.
pub fn total_rate(params: &PhysParams, c_minus: Complex64, c_plus: Complex64, vacuum_prob: f64) -> Option<f64> {
    let im = (c_minus.conj() * c_plus).im;
    if im <= 0.0 {
        return Some(0.0);
    }
    if vacuum_prob <= 0.0 {
        return None;
    }
    Some(8.0 * params.one_plus_q() * params.b() * im / vacuum_prob)
}

pub fn jump_rate_density(track: &CoefficientTrack, t0: f64, theta0: f64) -> Result<f64, JumpError> {
    let (cm, cp) = track.c_at(t0);
    rate_density(track.params(), cm, cp, track.vacuum_probability(t0), theta0).ok_or(JumpError::VacuumEmpty(t0))
}

pub fn total_jump_rate(track: &CoefficientTrack, t0: f64) -> Result<f64, JumpError> {
    let (cm, cp) = track.c_at(t0);
    total_rate(track.params(), cm, cp, track.vacuum_probability(t0)).ok_or(JumpError::VacuumEmpty(t0))
}

const MAJORANT_SAMPLES: usize = 8;
const MAJORANT_FACTOR: f64 = 1.1;

/// First jump time after `t_start`, or `None` if none occurs before the track ends.
pub fn sample_waiting_time<R: Rng + ?Sized>(
    track: &CoefficientTrack,
    t_start: f64,
    rng: &mut R,
) -> Result<Option<f64>, JumpError> {
    sample_waiting_time_until(track, t_start, track.span().1, rng)
}

/// Thinning against a per-grid-interval majorant, restricted to `[t_start, t_stop]`.
pub fn sample_waiting_time_until<R: Rng + ?Sized>(
    track: &CoefficientTrack,
    t_start: f64,
    t_stop: f64,
    rng: &mut R,
) -> Result<Option<f64>, JumpError> {
    let times = track.times();
    for w in times.windows(2) {
        let (a, b) = (w[0].max(t_start), w[1].min(t_stop));
        if b <= a {
            continue;
        }
        let mut bound = 0.0f64;
        for k in 0..=MAJORANT_SAMPLES {
            let t = w[0] + (w[1] - w[0]) * k as f64 / MAJORANT_SAMPLES as f64;
            bound = bound.max(total_jump_rate(track, t)?);
        }
        bound *= MAJORANT_FACTOR;
        if !bound.is_finite() {
            return Err(JumpError::Majorant { t: w[0], rate: bound, bound });
        }
        if bound == 0.0 {
            continue;
        }
        let mut t = a;
        loop {
            let u: f64 = rng.random();
            t += -(1.0 - u).ln() / bound;
            if t > b {
                break;
            }
            let rate = total_jump_rate(track, t)?;
            if rate > bound {
                return Err(JumpError::Majorant { t, rate, bound });
            }
            if rng.random::<f64>() * bound < rate {
                return Ok(Some(t));
            }
        }
    }
    Ok(None)
}

/// Uniform direction on the sphere, poles excluded.
pub fn sample_emission_angles<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    loop {
        let u: f64 = rng.random();
        let v: f64 = rng.random();
        let theta = (1.0 - 2.0 * u).clamp(-1.0, 1.0).acos();
        if theta.sin() > 0.0 {
            return (theta, 2.0 * PI * v);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Configuration {
    Vacuum,
    Particle([f64; 3]),
}

impl Configuration {
    pub fn particle(x: [f64; 3]) -> Result<Self, JumpError> {
        if x == [0.0; 3] || x.iter().any(|v| !v.is_finite()) {
            return Err(JumpError::Domain("particle position must be finite and nonzero".into()));
        }
        Ok(Configuration::Particle(x))
    }

    pub fn is_vacuum(&self) -> bool {
        matches!(self, Configuration::Vacuum)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum JumpEvent {
    Emission { t0: f64, theta0: f64, phi0: f64 },
    Absorption { t0: f64 },
}

impl JumpEvent {
    pub fn time(&self) -> f64 {
        match *self {
            JumpEvent::Emission { t0, .. } | JumpEvent::Absorption { t0 } => t0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PathPiece {
    Vacuum {
        t_start: f64,
        t_end: f64,
    },
    /// Bohmian flight; before the first sample the particle is closer to the
    /// origin than any recorded point.
    Flight {
        t_start: f64,
        t_end: f64,
        segment: TrajectorySegment,
    },
    /// Outside the inner region, where the near-source model has no dynamics.
    Parked {
        t_start: f64,
        t_end: f64,
        position: [f64; 3],
    },
}

impl PathPiece {
    pub fn span(&self) -> (f64, f64) {
        match *self {
            PathPiece::Vacuum { t_start, t_end }
            | PathPiece::Flight { t_start, t_end, .. }
            | PathPiece::Parked { t_start, t_end, .. } => (t_start, t_end),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessPath {
    pub t_span: (f64, f64),
    pub initial: Configuration,
    pub pieces: Vec<PathPiece>,
    pub events: Vec<JumpEvent>,
}

impl ProcessPath {
    fn piece_at(&self, t: f64) -> Option<&PathPiece> {
        self.pieces.iter().rev().find(|p| p.span().0 <= t)
    }

    pub fn is_vacuum_at(&self, t: f64) -> bool {
        matches!(self.piece_at(t), Some(PathPiece::Vacuum { .. }))
    }

    /// Configuration at `t`; inside a flight the position comes from the
    /// nearest recorded sample at or before `t`.
    pub fn configuration_at(&self, t: f64) -> Configuration {
        match self.piece_at(t) {
            None | Some(PathPiece::Vacuum { .. }) => Configuration::Vacuum,
            Some(PathPiece::Parked { position, .. }) => Configuration::Particle(*position),
            Some(PathPiece::Flight { segment, .. }) => {
                let k = segment.samples.partition_point(|s| s.t <= t);
                let s = segment.samples[k.saturating_sub(1)];
                Configuration::Particle(s.position())
            }
        }
    }
}

/// Everything besides the coefficient track needed to run the process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelFamily {
    pub r_cut: f64,
    pub r_min: f64,
    pub r_seed: f64,
    pub tol: f64,
    pub subleading: [Complex64; 2],
    /// Hold coefficients fixed during each flight at their value at its start.
    pub frozen: bool,
    pub sample_every: usize,
}

impl ModelFamily {
    pub fn new(r_cut: f64) -> Self {
        let r_min = 1e-8 * r_cut;
        ModelFamily {
            r_cut,
            r_min,
            r_seed: 10.0 * r_min,
            tol: 1e-9,
            subleading: [Complex64::new(0.0, 0.0); 2],
            frozen: false,
            sample_every: 1,
        }
    }

    pub fn model(&self, track: &CoefficientTrack, t: f64) -> Result<ModelWavefunction, JumpError> {
        let (cm, cp) = track.c_at(t);
        Ok(ModelWavefunction::new(*track.params(), cm, cp, self.r_cut)?
            .with_subleading(self.subleading[0], self.subleading[1]))
    }

    fn options(&self, t_end: f64) -> IntegrateOptions {
        IntegrateOptions::new(t_end, self.tol, self.r_min).sample_every(self.sample_every)
    }
}

/// Runs a flight with coefficients either refreshed from the track or frozen at `t_start`.
fn fly(
    family: &ModelFamily,
    track: &CoefficientTrack,
    t_start: f64,
    run: impl FnOnce(&dyn CoefficientSource) -> Result<TrajectorySegment, TrajectoryError>,
) -> Result<TrajectorySegment, JumpError> {
    if family.frozen {
        let (cm, cp) = track.c_at(t_start);
        Ok(run(&Frozen(cm, cp))?)
    } else {
        Ok(run(track)?)
    }
}

/// Appends the flight and what follows it; returns the absorption time if the
/// particle reaches the origin inside the window.
fn record_flight(path: &mut ProcessPath, t_start: f64, t_end: f64, segment: TrajectorySegment) -> Option<f64> {
    let last = *segment.last();
    match segment.terminal {
        Terminal::Absorbed { t0 } if t0 <= t_end => {
            path.pieces.push(PathPiece::Flight { t_start, t_end: t0, segment });
            path.events.push(JumpEvent::Absorption { t0 });
            Some(t0)
        }
        Terminal::LeftInnerRegion if last.t < t_end => {
            path.pieces.push(PathPiece::Flight { t_start, t_end: last.t, segment });
            path.pieces.push(PathPiece::Parked { t_start: last.t, t_end, position: last.position() });
            None
        }
        _ => {
            path.pieces.push(PathPiece::Flight { t_start, t_end, segment });
            None
        }
    }
}

/// One realization of the process on `t_span`.
pub fn simulate_path<R: Rng + ?Sized>(
    family: &ModelFamily,
    track: &CoefficientTrack,
    q_init: Configuration,
    t_span: (f64, f64),
    rng: &mut R,
) -> Result<ProcessPath, JumpError> {
    let (t_begin, t_end) = t_span;
    if !(t_end > t_begin) || !track.covers(t_begin, t_end) {
        return Err(JumpError::Domain(format!(
            "window ({t_begin}, {t_end}) not covered by the track span {:?}",
            track.span()
        )));
    }
    let mut path = ProcessPath { t_span, initial: q_init, pieces: Vec::new(), events: Vec::new() };
    let mut vacuum_from = match q_init {
        Configuration::Vacuum => Some(t_begin),
        Configuration::Particle(x) => start_particle(family, track, &mut path, x, t_begin, t_end)?,
    };
    while let Some(t_v) = vacuum_from {
        let Some(t_jump) = sample_waiting_time_until(track, t_v, t_end, rng)? else {
            path.pieces.push(PathPiece::Vacuum { t_start: t_v, t_end });
            break;
        };
        path.pieces.push(PathPiece::Vacuum { t_start: t_v, t_end: t_jump });
        let (theta0, phi0) = sample_emission_angles(rng);
        path.events.push(JumpEvent::Emission { t0: t_jump, theta0, phi0 });
        let model = family.model(track, t_jump)?;
        let (cm, cp) = track.c_at(t_jump);
        let dt = seed_offset(track.params(), cm, cp, family.r_seed)?;
        let segment = if t_jump + dt >= t_end {
            let seed = SphericalState::new(t_jump + dt, family.r_seed, theta0, phi0);
            TrajectorySegment { samples: vec![seed], terminal: Terminal::TimeExhausted, accepted: 0, rejected: 0 }
        } else {
            let opts = family.options(t_end);
            fly(family, track, t_jump, |src| emit_with(&model, src, t_jump, theta0, phi0, family.r_seed, &opts))?
        };
        vacuum_from = record_flight(&mut path, t_jump, t_end, segment);
    }
    Ok(path)
}

fn start_particle(
    family: &ModelFamily,
    track: &CoefficientTrack,
    path: &mut ProcessPath,
    x: [f64; 3],
    t_begin: f64,
    t_end: f64,
) -> Result<Option<f64>, JumpError> {
    let Configuration::Particle(x) = Configuration::particle(x)? else { unreachable!() };
    let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    let theta = (x[2] / r).clamp(-1.0, 1.0).acos();
    let phi = x[1].atan2(x[0]);
    if r <= family.r_min {
        path.events.push(JumpEvent::Absorption { t0: t_begin });
        return Ok(Some(t_begin));
    }
    if r >= 0.5 * family.r_cut {
        path.pieces.push(PathPiece::Parked { t_start: t_begin, t_end, position: x });
        return Ok(None);
    }
    let model = family.model(track, t_begin)?;
    let start = SphericalState::new(t_begin, r, theta, phi);
    let opts = family.options(t_end);
    let segment = fly(family, track, t_begin, |src| integrate_with(&model, src, start, &opts))?;
    Ok(record_flight(path, t_begin, t_end, segment))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BalanceReport {
    /// Largest `|d|psi0|^2/dt + 4 pi C_r|` over the grid.
    pub max_residual: f64,
    /// Normalization used for the relative test.
    pub scale: f64,
    /// Up to five grid times with the largest residuals, worst first.
    pub worst: Vec<(f64, f64)>,
}

impl BalanceReport {
    pub fn relative(&self) -> f64 {
        self.max_residual / self.scale
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("probability balance violated: relative residual {relative:.3e} (worst at t = {:?})", report.worst.first().map(|w| w.0))]
pub struct BalanceViolation {
    pub relative: f64,
    pub report: BalanceReport,
}

/// Checks `d|psi0|^2/dt = -4 pi C_r` at the grid times by finite differences.
pub fn validate_balance(track: &CoefficientTrack, balance_tol: f64) -> Result<BalanceReport, BalanceViolation> {
    let report = balance_report(track);
    if report.relative() <= balance_tol {
        Ok(report)
    } else {
        Err(BalanceViolation { relative: report.relative(), report })
    }
}

/// Derivative at `x` of the quadratic through three points.
fn quadratic_slope(t: &[f64], p: &[f64], x: f64) -> f64 {
    let (a, b, c) = (t[0], t[1], t[2]);
    p[0] * ((x - b) + (x - c)) / ((a - b) * (a - c))
        + p[1] * ((x - a) + (x - c)) / ((b - a) * (b - c))
        + p[2] * ((x - a) + (x - b)) / ((c - a) * (c - b))
}

pub fn balance_report(track: &CoefficientTrack) -> BalanceReport {
    let pts = track.points();
    let n = pts.len();
    let p: Vec<f64> = pts.iter().map(|x| x.psi0.norm_sqr()).collect();
    let flux: Vec<f64> =
        pts.iter().map(|x| 4.0 * PI * current_coeffs(track.params(), x.c_minus, x.c_plus).c_r).collect();
    let t: Vec<f64> = pts.iter().map(|x| x.t).collect();
    let mut res: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let d = if n < 3 {
                (p[n - 1] - p[0]) / (t[n - 1] - t[0])
            } else {
                let k = i.clamp(1, n - 2) - 1;
                quadratic_slope(&t[k..k + 3], &p[k..k + 3], t[i])
            };
            (t[i], (d + flux[i]).abs())
        })
        .collect();
    let scale = flux.iter().map(|f| f.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    res.sort_by(|x, y| y.1.total_cmp(&x.1));
    let max_residual = res.first().map_or(0.0, |r| r.1);
    res.truncate(5);
    BalanceReport { max_residual, scale, worst: res }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::path_rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn params() -> PhysParams {
        PhysParams::canonical(0.96, 0.5, 1).unwrap()
    }

    fn constant(cm: Complex64, cp: Complex64, psi0: f64) -> CoefficientTrack {
        CoefficientTrack::constant(params(), cm, cp, c(psi0, 0.0), 0.0, 10.0).unwrap()
    }

    #[test]
    fn rate_examples() {
        let tr = constant(c(1.0, 0.0), c(0.0, 1.0), 1.0);
        let want = 2.0 * 1.96 * 0.28 / PI;
        assert!((jump_rate_density(&tr, 0.0, PI / 2.0).unwrap() - want).abs() < 1e-15);
        assert_eq!(jump_rate_density(&tr, 0.0, 0.0).unwrap(), 0.0);
        assert!((total_jump_rate(&tr, 1.0).unwrap() - 4.3904).abs() < 1e-12);
        let half = constant(c(1.0, 0.0), c(0.0, 1.0), 2.0);
        assert!((total_jump_rate(&half, 1.0).unwrap() - 4.3904 / 4.0).abs() < 1e-12);
        let ingoing = constant(c(1.0, 0.0), c(0.0, -1.0), 1.0);
        assert_eq!(jump_rate_density(&ingoing, 0.0, 1.0).unwrap(), 0.0);
        let empty = constant(c(1.0, 0.0), c(0.0, 1.0), 0.0);
        assert_eq!(total_jump_rate(&empty, 0.0), Err(JumpError::VacuumEmpty(0.0)));
    }

    #[test]
    fn waiting_time_mean() {
        let tr = CoefficientTrack::constant(params(), c(1.0, 0.0), c(0.0, 1.0), c(1.0, 0.0), 0.0, 1e3).unwrap();
        let gamma = 4.3904;
        let mut rng = path_rng(11, 0);
        let n = 100_000;
        let mean = (0..n).map(|_| sample_waiting_time(&tr, 0.0, &mut rng).unwrap().unwrap()).sum::<f64>() / n as f64;
        let sigma = 1.0 / gamma / (n as f64).sqrt();
        assert!((mean - 1.0 / gamma).abs() < 3.0 * sigma);
        let zero = constant(c(1.0, 0.0), c(2.0, 0.0), 1.0);
        assert_eq!(sample_waiting_time(&zero, 0.0, &mut rng).unwrap(), None);
    }

    #[test]
    fn angles_cover_sphere() {
        let mut rng = path_rng(5, 1);
        let n = 100_000;
        let (mut cos_sum, mut upper) = (0.0, 0usize);
        for _ in 0..n {
            let (th, ph) = sample_emission_angles(&mut rng);
            assert!(th > 0.0 && th < PI && (0.0..2.0 * PI).contains(&ph));
            cos_sum += th.cos();
            upper += usize::from(th < PI / 2.0);
        }
        let nf = n as f64;
        assert!((cos_sum / nf).abs() < 3.0 * (1.0 / 3.0f64 / nf).sqrt());
        assert!((upper as f64 / nf - 0.5).abs() < 3.0 * 0.5 / nf.sqrt());
    }

    #[test]
    fn degenerate_track_stays_vacuum() {
        let tr = constant(c(1.0, 0.0), c(2.0, 0.0), 1.0);
        let fam = ModelFamily::new(1.0);
        let p = simulate_path(&fam, &tr, Configuration::Vacuum, (0.0, 5.0), &mut path_rng(1, 0)).unwrap();
        assert!(p.events.is_empty());
        assert_eq!(p.pieces, vec![PathPiece::Vacuum { t_start: 0.0, t_end: 5.0 }]);
    }

    #[test]
    fn ingoing_particle_absorbed_once() {
        let tr = constant(c(1.0, 0.0), c(0.0, -1.0), 1.0);
        let fam = ModelFamily::new(1.0);
        let start = Configuration::particle([0.01, 0.0, 0.005]).unwrap();
        let p = simulate_path(&fam, &tr, start, (0.0, 10.0), &mut path_rng(2, 0)).unwrap();
        assert_eq!(p.events.len(), 1);
        assert!(matches!(p.events[0], JumpEvent::Absorption { .. }));
        assert!(p.is_vacuum_at(9.9));
        assert!(!p.is_vacuum_at(0.0));
    }

    #[test]
    fn events_alternate_and_repeat() {
        let tr = CoefficientTrack::balanced_constant(params(), c(0.1, 0.0), c(0.0, 0.1), 0.95, 0.0, 3.0, 31).unwrap();
        let fam = ModelFamily::new(1.0);
        let run = |i| simulate_path(&fam, &tr, Configuration::Vacuum, (0.0, 3.0), &mut path_rng(9, i)).unwrap();
        let mut emitted = 0;
        for i in 0..200 {
            let p = run(i);
            assert!(p.events.len() <= 1);
            for w in p.events.windows(2) {
                assert_ne!(matches!(w[0], JumpEvent::Emission { .. }), matches!(w[1], JumpEvent::Emission { .. }));
            }
            emitted += p.events.len();
            assert_eq!(p, run(i));
        }
        assert!(emitted > 0);
    }

    #[test]
    fn balance_checks() {
        let good = CoefficientTrack::balanced_constant(params(), c(0.1, 0.0), c(0.0, 0.1), 0.9, 0.0, 2.0, 21).unwrap();
        assert!(validate_balance(&good, 1e-6).is_ok());
        let bad = constant(c(0.1, 0.0), c(0.0, 0.1), 0.9);
        let err = validate_balance(&bad, 1e-6).unwrap_err();
        assert!((err.relative - 1.0).abs() < 1e-12);
    }

    #[test]
    fn balance_residual_is_second_order() {
        // exact vacuum probability sampled on grids of spacing h
        let cm = |t: f64| c(0.1 + 0.02 * t.sin(), 0.0);
        let cp = |t: f64| c(0.0, 0.1 + 0.03 * t);
        let p = params();
        let flux = |t: f64| 4.0 * PI * current_coeffs(&p, cm(t), cp(t)).c_r;
        // closed-form integral of the flux
        let k = 4.0 * PI * 2.0 * 1.96 * 0.28 / PI;
        let integral =
            |t: f64| k * (0.01 * t + 0.0015 * t * t + 0.002 * (1.0 - t.cos()) + 0.0006 * (t.sin() - t * t.cos()));
        assert!((integral(1e-4) - integral(0.0) - flux(0.5e-4) * 1e-4).abs() < 1e-10);
        let residual = |n: usize| {
            let pts = (0..=n)
                .map(|i| {
                    let t = 2.0 * i as f64 / n as f64;
                    crate::track::TrackPoint {
                        t,
                        c_minus: cm(t),
                        c_plus: cp(t),
                        psi0: c((0.9 - integral(t)).sqrt(), 0.0),
                    }
                })
                .collect();
            let tr = CoefficientTrack::new(p, pts).unwrap();
            // interior nodes only; the one-sided ends are first order
            let pts = tr.points();
            (1..n)
                .map(|i| {
                    let d = (pts[i + 1].psi0.norm_sqr() - pts[i - 1].psi0.norm_sqr()) / (pts[i + 1].t - pts[i - 1].t);
                    (d + flux(pts[i].t)).abs()
                })
                .fold(0.0, f64::max)
        };
        let ratio = residual(20) / residual(40);
        assert!((ratio - 4.0).abs() < 0.5, "{ratio}");
    }

    #[test]
    fn rate_integrates_to_total() {
        let tr = constant(c(0.7, 0.2), c(-0.1, 0.9), 0.8);
        let total = total_jump_rate(&tr, 0.0).unwrap();
        let integral = crate::spinor::sphere_quadrature(
            |pt| {
                let s = pt.theta().sin();
                Complex64::new(jump_rate_density(&tr, 0.0, pt.theta()).unwrap() / s, 0.0)
            },
            32,
        );
        assert!((integral.re - total).abs() < 1e-10 * total);
    }
}
