//! Bohmian trajectories of the one-particle sector near the source.
//!
//! The integrator works in `(s, theta, phi)` with `s = r^{1-2B}`, in which the
//! leading radial motion is linear in time, so absorption at the origin is
//! reached in finitely many steps and its time can be extrapolated.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ode::{dopri5_step, error_norm, step_factor, Hermite, Vec3};
use crate::params::PhysParams;
use crate::spinor::SpherePoint;
use crate::wavefunction::{ModelError, ModelWavefunction};

const SIN_FLOOR: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrajectoryError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("step control failed at t = {t} (h = {h})")]
    StepFailure { t: f64, h: f64 },
    #[error("{0}")]
    Domain(String),
    #[error("sign of t - t0 must match sign of Im[c_-^* c_+]")]
    Sign,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphericalState {
    pub t: f64,
    pub r: f64,
    pub theta: f64,
    /// Unwrapped azimuth.
    pub phi: f64,
}

impl SphericalState {
    pub fn new(t: f64, r: f64, theta: f64, phi: f64) -> Self {
        SphericalState { t, r, theta, phi }
    }

    pub fn position(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [self.r * st * cp, self.r * st * sp, self.r * ct]
    }

    pub fn direction(&self) -> SpherePoint {
        SpherePoint::new(self.theta.clamp(0.0, PI), self.phi.rem_euclid(2.0 * PI)).expect("clamped angles are in range")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Terminal {
    /// Reached `r_min`; `t0` is the extrapolated arrival time at the origin.
    Absorbed {
        t0: f64,
    },
    LeftInnerRegion,
    TimeExhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySegment {
    pub samples: Vec<SphericalState>,
    pub terminal: Terminal,
    pub accepted: usize,
    pub rejected: usize,
}

impl TrajectorySegment {
    pub fn last(&self) -> &SphericalState {
        self.samples.last().expect("segments hold at least one sample")
    }

    pub fn absorption_time(&self) -> Option<f64> {
        match self.terminal {
            Terminal::Absorbed { t0 } => Some(t0),
            _ => None,
        }
    }
}

/// Supplies the short-distance coefficients in effect at time `t`.
pub trait CoefficientSource: Sync {
    fn coefficients(&self, t: f64) -> (Complex64, Complex64);

    /// True if the coefficients never change, so no refresh is needed.
    fn is_constant(&self) -> bool {
        false
    }
}

/// Coefficients held fixed.
#[derive(Debug, Clone, Copy)]
pub struct Frozen(pub Complex64, pub Complex64);

impl CoefficientSource for Frozen {
    fn coefficients(&self, _t: f64) -> (Complex64, Complex64) {
        (self.0, self.1)
    }

    fn is_constant(&self) -> bool {
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrateOptions {
    pub t_end: f64,
    pub tol: f64,
    pub r_min: f64,
    /// Keep every n-th accepted step; the terminal state is always kept.
    pub sample_every: usize,
    pub max_steps: usize,
}

impl IntegrateOptions {
    pub fn new(t_end: f64, tol: f64, r_min: f64) -> Self {
        IntegrateOptions { t_end, tol, r_min, sample_every: 1, max_steps: 2_000_000 }
    }

    pub fn sample_every(mut self, n: usize) -> Self {
        self.sample_every = n.max(1);
        self
    }
}

/// `(dr/dt, dtheta/dt, dphi/dt)` of the full model velocity field at `(r, theta, phi)`.
pub fn model_rhs(model: &ModelWavefunction, r: f64, theta: f64, phi: f64) -> Result<Vec3, ModelError> {
    if !(r > 0.0) {
        return Err(ModelError::Origin);
    }
    let point = SpherePoint::new(theta.clamp(0.0, PI), phi.rem_euclid(2.0 * PI)).map_err(|_| ModelError::Origin)?;
    let f = model.field_at(r, point)?;
    if !(f.rho > 0.0) || !f.rho.is_finite() {
        return Err(ModelError::ZeroDensity(r));
    }
    let v = f.j.map(|c| c / f.rho);
    let st = theta.sin().abs();
    if st < SIN_FLOOR && v[2].abs() > SIN_FLOOR {
        return Err(ModelError::Pole(theta));
    }
    Ok([v[0], v[1] / r, v[2] / (r * st.max(SIN_FLOOR))])
}

/// Velocity field in spherical coordinates for given coefficients, no cutoff
/// and no subleading terms.
pub fn ode_rhs(
    params: &PhysParams,
    c_minus: Complex64,
    c_plus: Complex64,
    state: &SphericalState,
) -> Result<Vec3, TrajectoryError> {
    if (c_minus.conj() * c_plus).im == 0.0 {
        return Err(ModelError::Degenerate.into());
    }
    let model = ModelWavefunction::new(*params, c_minus, c_plus, f64::MAX)?;
    Ok(model_rhs(&model, state.r, state.theta, state.phi)?)
}

pub fn integrate(
    model: &ModelWavefunction,
    initial: SphericalState,
    opts: &IntegrateOptions,
) -> Result<TrajectorySegment, TrajectoryError> {
    let src = Frozen(model.c_minus(), model.c_plus());
    integrate_with(model, &src, initial, opts)
}

/// Integrates with coefficients re-read from `source` at the start of every step.
pub fn integrate_with(
    model: &ModelWavefunction,
    source: &dyn CoefficientSource,
    initial: SphericalState,
    opts: &IntegrateOptions,
) -> Result<TrajectorySegment, TrajectoryError> {
    let e = 1.0 - 2.0 * model.params().b();
    let r_in = model.inner_radius();
    if !(initial.r > opts.r_min && initial.r < r_in) {
        return Err(TrajectoryError::Domain(format!("initial r = {} outside ({}, {})", initial.r, opts.r_min, r_in)));
    }
    if !(opts.t_end > initial.t) {
        return Err(TrajectoryError::Domain("t_end must exceed the initial time".into()));
    }
    if !(opts.tol > 0.0 && opts.r_min > 0.0) {
        return Err(TrajectoryError::Domain("tol and r_min must be positive".into()));
    }
    let s_min = opts.r_min.powf(e);
    let s_out = r_in.powf(e);
    let atol = [opts.tol * s_min, opts.tol, opts.tol];
    let to_state = |t: f64, y: &Vec3| SphericalState::new(t, y[0].powf(1.0 / e), y[1], y[2]);

    let mut current = {
        let (cm, cp) = source.coefficients(initial.t);
        model.with_coefficients(cm, cp)
    };
    let rhs = |m: &ModelWavefunction, y: &Vec3| -> Result<Vec3, ModelError> {
        if !(y[0] > 0.0) {
            return Err(ModelError::Origin);
        }
        let r = y[0].powf(1.0 / e);
        let d = model_rhs(m, r, y[1], y[2])?;
        Ok([e * d[0] * y[0] / r, d[1], d[2]])
    };

    let mut t = initial.t;
    let mut y = [initial.r.powf(e), initial.theta, initial.phi];
    let mut dy = rhs(&current, &y)?;
    let mut h = {
        let ts = y[0] / dy[0].abs().max(f64::MIN_POSITIVE);
        let tp = 1.0 / dy[2].abs().max(f64::MIN_POSITIVE);
        (0.01 * ts.min(tp)).min(opts.t_end - t)
    };
    let mut samples = vec![initial];
    let (mut accepted, mut rejected) = (0usize, 0usize);

    let terminal = loop {
        if accepted + rejected >= opts.max_steps {
            return Err(TrajectoryError::StepFailure { t, h });
        }
        if !source.is_constant() {
            let (cm, cp) = source.coefficients(t);
            if (cm, cp) != (current.c_minus(), current.c_plus()) {
                current = current.with_coefficients(cm, cp);
                dy = rhs(&current, &y)?;
            }
        }
        h = h.min(opts.t_end - t);
        if dy[0] < 0.0 {
            h = h.min((y[0] - 0.5 * s_min) / -dy[0]);
        }
        if !(h > 1e-15 * t.abs().max(1e-300)) || !h.is_finite() {
            return Err(TrajectoryError::StepFailure { t, h });
        }
        let mut f = |_t: f64, yy: &Vec3| rhs(&current, yy);
        let trial = match dopri5_step(&mut f, t, &y, &dy, h) {
            Ok(tr) if tr.y[0] > 0.0 && tr.y.iter().all(|v| v.is_finite()) => tr,
            Ok(_) | Err(ModelError::Origin) | Err(ModelError::ZeroDensity(_)) => {
                rejected += 1;
                h *= 0.25;
                continue;
            }
            Err(other) => return Err(other.into()),
        };
        let err = error_norm(&trial.err, &y, &trial.y, &atol, opts.tol);
        if !(err <= 1.0) {
            rejected += 1;
            h *= step_factor(err);
            continue;
        }
        accepted += 1;
        let herm = Hermite { t0: t, h, y0: y, y1: trial.y, d0: dy, d1: trial.dy };
        let t_new = t + h;

        let crossing = if trial.y[0] <= s_min {
            Some((s_min, true))
        } else if trial.y[0] >= s_out {
            Some((s_out, false))
        } else {
            None
        };
        if let Some((level, absorbed)) = crossing {
            let tc = herm.crossing(0, level);
            let mut yc = herm.eval(tc);
            yc[0] = level;
            push_sample(&mut samples, to_state(tc, &yc));
            if absorbed {
                let sdot = herm.derivative(tc)[0];
                let t0 = if sdot < 0.0 { tc - level / sdot } else { tc };
                break Terminal::Absorbed { t0 };
            }
            break Terminal::LeftInnerRegion;
        }

        t = t_new;
        y = trial.y;
        dy = trial.dy;
        let at_end = t >= opts.t_end;
        if at_end || accepted % opts.sample_every == 0 {
            push_sample(&mut samples, to_state(t, &y));
        }
        if at_end {
            break Terminal::TimeExhausted;
        }
        h *= step_factor(err);
    };
    Ok(TrajectorySegment { samples, terminal, accepted, rejected })
}

fn push_sample(samples: &mut Vec<SphericalState>, s: SphericalState) {
    match samples.last() {
        Some(last) if s.t <= last.t => {
            let n = samples.len();
            if n > 1 {
                samples[n - 1] = s;
            }
        }
        _ => samples.push(s),
    }
}

/// Outgoing trajectory emitted from the origin at `t0` with labels `(theta0, phi0)`,
/// seeded at `r_seed` from the closed-form asymptotics.
pub fn emit_trajectory(
    model: &ModelWavefunction,
    t0: f64,
    theta0: f64,
    phi0: f64,
    r_seed: f64,
    opts: &IntegrateOptions,
) -> Result<TrajectorySegment, TrajectoryError> {
    let src = Frozen(model.c_minus(), model.c_plus());
    emit_with(model, &src, t0, theta0, phi0, r_seed, opts)
}

pub fn emit_with(
    model: &ModelWavefunction,
    source: &dyn CoefficientSource,
    t0: f64,
    theta0: f64,
    phi0: f64,
    r_seed: f64,
    opts: &IntegrateOptions,
) -> Result<TrajectorySegment, TrajectoryError> {
    let (cm, cp) = source.coefficients(t0);
    let im = (cm.conj() * cp).im;
    if !(im > 0.0) {
        return Err(ModelError::Degenerate.into());
    }
    let params = model.params();
    let dt = seed_offset(params, cm, cp, r_seed)?;
    let seed = asymptotic_solution(params, cm, cp, theta0, phi0, dt)?;
    let start = SphericalState::new(t0 + dt, r_seed, seed.theta, seed.phi);
    integrate_with(model, source, start, opts)
}

/// `|t - t0|` at which the leading asymptotic radius equals `r`.
pub fn seed_offset(params: &PhysParams, c_minus: Complex64, c_plus: Complex64, r: f64) -> Result<f64, TrajectoryError> {
    let (_, g) = radial_rate(params, c_minus, c_plus)?;
    let e = 1.0 - 2.0 * params.b();
    Ok(r.powf(e) / g)
}

/// `(sgn Im, G)` with `G = 2B(1-2B)|Im[c_-^* c_+]|/|c_-|^2`, so `r^{1-2B} ~ G |t - t0|`.
fn radial_rate(params: &PhysParams, c_minus: Complex64, c_plus: Complex64) -> Result<(f64, f64), TrajectoryError> {
    let im = (c_minus.conj() * c_plus).im;
    if im == 0.0 {
        return Err(ModelError::Degenerate.into());
    }
    let n = c_minus.norm_sqr();
    if n == 0.0 {
        return Err(TrajectoryError::Domain("c_- = 0: no leading singular mode".into()));
    }
    let b = params.b();
    Ok((im.signum(), 2.0 * b * (1.0 - 2.0 * b) * im.abs() / n))
}

/// Leading-order time to reach the origin from radius `r0` on an ingoing path.
pub fn absorption_time_estimate(
    params: &PhysParams,
    c_minus: Complex64,
    c_plus: Complex64,
    r0: f64,
) -> Result<f64, TrajectoryError> {
    seed_offset(params, c_minus, c_plus, r0)
}

/// Coefficient of `r^{2B-1}` in `dphi/dt`, next to the leading `-q sgn(m kappa)/r`.
pub fn azimuthal_correction(params: &PhysParams, c_minus: Complex64, c_plus: Complex64) -> f64 {
    let b = params.b();
    -2.0 * b * b * params.label_sign() * (c_minus.conj() * c_plus).re / c_minus.norm_sqr()
}

/// Coefficient of `log|t - t0|` in the azimuthal asymptotics.
pub fn log_coefficient(params: &PhysParams, c_minus: Complex64, c_plus: Complex64) -> f64 {
    let b = params.b();
    let cross = c_minus.conj() * c_plus;
    -params.label_sign() * cross.re / (b * (1.0 - 2.0 * b) * cross.im)
}

/// Closed-form asymptotic state at `t = t_rel` relative to the emission or
/// absorption time (`t_rel > 0` for emission, `< 0` for absorption).
pub fn asymptotic_solution(
    params: &PhysParams,
    c_minus: Complex64,
    c_plus: Complex64,
    theta0: f64,
    phi0: f64,
    t_rel: f64,
) -> Result<SphericalState, TrajectoryError> {
    let (sign, g) = radial_rate(params, c_minus, c_plus)?;
    if t_rel == 0.0 || t_rel.signum() != sign {
        return Err(TrajectoryError::Sign);
    }
    let b = params.b();
    let e = 1.0 - 2.0 * b;
    let at = t_rel.abs();
    let amp = g.powf(1.0 / e);
    let r = amp * at.powf(1.0 / e);
    let k = e / (2.0 * b * amp);
    let lead = sign * params.q() * params.label_sign() * k * at.powf(-2.0 * b / e);
    let phi = phi0 + lead + log_coefficient(params, c_minus, c_plus) * at.ln();
    Ok(SphericalState::new(t_rel, r, theta0, phi))
}
