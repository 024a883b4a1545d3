//! Time-dependent short-distance coefficients and vacuum amplitude.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::params::PhysParams;
use crate::trajectory::CoefficientSource;
use crate::wavefunction::current_coeffs;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrackError {
    #[error("track needs at least two grid points")]
    TooShort,
    #[error("grid times must be finite and strictly increasing (index {0})")]
    NotIncreasing(usize),
    #[error("balanced track runs out of vacuum probability at t = {0}")]
    NegativeVacuum(f64),
    #[error("line {line}: {msg}")]
    Csv { line: usize, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackPoint {
    pub t: f64,
    pub c_minus: Complex64,
    pub c_plus: Complex64,
    pub psi0: Complex64,
}

/// Natural cubic spline through `(x_i, y_i)`.
#[derive(Debug, Clone, PartialEq)]
struct Spline {
    y: Vec<f64>,
    m: Vec<f64>,
}

impl Spline {
    fn new(x: &[f64], y: Vec<f64>) -> Self {
        let n = x.len();
        let mut m = vec![0.0; n];
        if n > 2 {
            // Thomas algorithm on the interior second derivatives
            let mut c = vec![0.0; n];
            let mut d = vec![0.0; n];
            for i in 1..n - 1 {
                let h0 = x[i] - x[i - 1];
                let h1 = x[i + 1] - x[i];
                let diag = 2.0 * (h0 + h1);
                let rhs = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
                let denom = diag - h0 * c[i - 1];
                c[i] = h1 / denom;
                d[i] = (rhs - h0 * d[i - 1]) / denom;
            }
            for i in (1..n - 1).rev() {
                m[i] = d[i] - c[i] * m[i + 1];
            }
        }
        Spline { y, m }
    }

    fn eval(&self, x: &[f64], i: usize, t: f64) -> f64 {
        let h = x[i + 1] - x[i];
        let a = (x[i + 1] - t) / h;
        let b = (t - x[i]) / h;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTrack {
    params: PhysParams,
    points: Vec<TrackPoint>,
    times: Vec<f64>,
    splines: Vec<Spline>,
}

impl CoefficientTrack {
    pub fn new(params: PhysParams, points: Vec<TrackPoint>) -> Result<Self, TrackError> {
        if points.len() < 2 {
            return Err(TrackError::TooShort);
        }
        for (i, w) in points.windows(2).enumerate() {
            if !(w[1].t > w[0].t) || !w[1].t.is_finite() || !w[0].t.is_finite() {
                return Err(TrackError::NotIncreasing(i + 1));
            }
        }
        let times: Vec<f64> = points.iter().map(|p| p.t).collect();
        let comps: [fn(&TrackPoint) -> f64; 7] = [
            |p| p.c_minus.re,
            |p| p.c_minus.im,
            |p| p.c_plus.re,
            |p| p.c_plus.im,
            |p| p.psi0.re,
            |p| p.psi0.im,
            |p| p.psi0.norm_sqr(),
        ];
        let splines = comps.iter().map(|f| Spline::new(&times, points.iter().map(f).collect())).collect();
        Ok(CoefficientTrack { params, points, times, splines })
    }

    /// Constant coefficients and vacuum amplitude over `[t_start, t_end]`.
    pub fn constant(
        params: PhysParams,
        c_minus: Complex64,
        c_plus: Complex64,
        psi0: Complex64,
        t_start: f64,
        t_end: f64,
    ) -> Result<Self, TrackError> {
        let pts = [t_start, t_end].iter().map(|&t| TrackPoint { t, c_minus, c_plus, psi0 }).collect();
        Self::new(params, pts)
    }

    /// Coefficients from `coeffs(t)` on `times`, with the real vacuum amplitude
    /// chosen so that `d|psi0|^2/dt = -4 pi C_r(t)` and `|psi0(times[0])|^2 = p0`.
    pub fn balanced<F>(params: PhysParams, times: &[f64], p0: f64, coeffs: F) -> Result<Self, TrackError>
    where
        F: Fn(f64) -> (Complex64, Complex64),
    {
        if times.len() < 2 {
            return Err(TrackError::TooShort);
        }
        let flux = |t: f64| {
            let (cm, cp) = coeffs(t);
            4.0 * PI * current_coeffs(&params, cm, cp).c_r
        };
        let mut vac = p0;
        let mut pts = Vec::with_capacity(times.len());
        for (i, &t) in times.iter().enumerate() {
            if i > 0 {
                // composite Simpson on 16 panels per grid interval
                let (a, b) = (times[i - 1], t);
                let n = 16;
                let h = (b - a) / n as f64;
                let mut s = flux(a) + flux(b);
                for k in 1..n {
                    s += if k % 2 == 1 { 4.0 } else { 2.0 } * flux(a + k as f64 * h);
                }
                vac -= s * h / 3.0;
            }
            if vac < 0.0 {
                return Err(TrackError::NegativeVacuum(t));
            }
            let (c_minus, c_plus) = coeffs(t);
            pts.push(TrackPoint { t, c_minus, c_plus, psi0: Complex64::new(vac.sqrt(), 0.0) });
        }
        Self::new(params, pts)
    }

    /// Constant coefficients on an `n`-point uniform grid over `[t_start, t_end]`, balanced.
    pub fn balanced_constant(
        params: PhysParams,
        c_minus: Complex64,
        c_plus: Complex64,
        p0: f64,
        t_start: f64,
        t_end: f64,
        n: usize,
    ) -> Result<Self, TrackError> {
        let n = n.max(2);
        let times: Vec<f64> = (0..n).map(|i| t_start + (t_end - t_start) * i as f64 / (n - 1) as f64).collect();
        Self::balanced(params, &times, p0, |_| (c_minus, c_plus))
    }

    /// Parses rows `t, c-re, c-im, c+re, c+im, psi0re, psi0im`; `#` starts a comment.
    pub fn from_csv(params: PhysParams, text: &str) -> Result<Self, TrackError> {
        let mut pts = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() || line.starts_with('t') {
                continue;
            }
            let vals: Result<Vec<f64>, _> = line.split(',').map(|v| v.trim().parse::<f64>()).collect();
            let vals = vals.map_err(|e| TrackError::Csv { line: k + 1, msg: e.to_string() })?;
            if vals.len() != 7 {
                return Err(TrackError::Csv { line: k + 1, msg: format!("expected 7 columns, found {}", vals.len()) });
            }
            pts.push(TrackPoint {
                t: vals[0],
                c_minus: Complex64::new(vals[1], vals[2]),
                c_plus: Complex64::new(vals[3], vals[4]),
                psi0: Complex64::new(vals[5], vals[6]),
            });
        }
        Self::new(params, pts)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,c_minus_re,c_minus_im,c_plus_re,c_plus_im,psi0_re,psi0_im\n");
        for p in &self.points {
            s.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                p.t, p.c_minus.re, p.c_minus.im, p.c_plus.re, p.c_plus.im, p.psi0.re, p.psi0.im
            ));
        }
        s
    }

    pub fn params(&self) -> &PhysParams {
        &self.params
    }

    pub fn points(&self) -> &[TrackPoint] {
        &self.points
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn span(&self) -> (f64, f64) {
        (self.times[0], *self.times.last().unwrap())
    }

    pub fn covers(&self, t0: f64, t1: f64) -> bool {
        let (a, b) = self.span();
        t0 >= a && t1 <= b
    }

    fn interval(&self, t: f64) -> usize {
        let n = self.times.len();
        match self.times.partition_point(|&x| x <= t) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        }
    }

    fn component(&self, k: usize, t: f64) -> f64 {
        let t = t.clamp(self.times[0], *self.times.last().unwrap());
        self.splines[k].eval(&self.times, self.interval(t), t)
    }

    pub fn c_at(&self, t: f64) -> (Complex64, Complex64) {
        (
            Complex64::new(self.component(0, t), self.component(1, t)),
            Complex64::new(self.component(2, t), self.component(3, t)),
        )
    }

    pub fn psi0_at(&self, t: f64) -> Complex64 {
        Complex64::new(self.component(4, t), self.component(5, t))
    }

    /// `|psi0(t)|^2`, interpolated directly so that a linear vacuum
    /// probability is reproduced exactly between grid points.
    pub fn vacuum_probability(&self, t: f64) -> f64 {
        self.component(6, t).max(0.0)
    }

    pub fn c_r(&self, t: f64) -> f64 {
        let (cm, cp) = self.c_at(t);
        current_coeffs(&self.params, cm, cp).c_r
    }
}

impl CoefficientSource for CoefficientTrack {
    fn coefficients(&self, t: f64) -> (Complex64, Complex64) {
        self.c_at(t)
    }

    fn is_constant(&self) -> bool {
        self.points.windows(2).all(|w| w[0].c_minus == w[1].c_minus && w[0].c_plus == w[1].c_plus)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> PhysParams {
        PhysParams::canonical(0.96, 0.5, 1).unwrap()
    }

    #[test]
    fn spline_reproduces_linear_and_nodes() {
        let pts: Vec<_> = (0..6)
            .map(|i| {
                let t = f64::from(i) * 0.3 + 0.1 * f64::from(i * i);
                TrackPoint {
                    t,
                    c_minus: Complex64::new(2.0 * t - 1.0, 0.5),
                    c_plus: Complex64::new(t.sin(), t.cos()),
                    psi0: Complex64::new(1.0 - 0.1 * t, 0.0),
                }
            })
            .collect();
        let tr = CoefficientTrack::new(params(), pts.clone()).unwrap();
        for p in &pts {
            let (cm, cp) = tr.c_at(p.t);
            assert!((cm - p.c_minus).norm() < 1e-13 && (cp - p.c_plus).norm() < 1e-13);
        }
        let t = 0.77;
        assert!((tr.c_at(t).0.re - (2.0 * t - 1.0)).abs() < 1e-12);
        assert!((tr.psi0_at(t).re - (1.0 - 0.1 * t)).abs() < 1e-12);
        assert!((tr.c_at(t).1.re - t.sin()).abs() < 1e-2);
    }

    #[test]
    fn grid_validation() {
        let p = TrackPoint {
            t: 0.0,
            c_minus: Complex64::new(1.0, 0.0),
            c_plus: Complex64::new(0.0, 1.0),
            psi0: Complex64::new(1.0, 0.0),
        };
        assert_eq!(CoefficientTrack::new(params(), vec![p]), Err(TrackError::TooShort));
        assert_eq!(CoefficientTrack::new(params(), vec![p, p]), Err(TrackError::NotIncreasing(1)));
    }

    #[test]
    fn balanced_constant_is_linear() {
        let (cm, cp) = (Complex64::new(0.1, 0.0), Complex64::new(0.0, 0.1));
        let tr = CoefficientTrack::balanced_constant(params(), cm, cp, 0.9, 0.0, 2.0, 11).unwrap();
        let cr = current_coeffs(&params(), cm, cp).c_r;
        for t in [0.0, 0.33, 1.0, 2.0] {
            assert!((tr.vacuum_probability(t) - (0.9 - 4.0 * PI * cr * t)).abs() < 1e-6);
        }
        assert!(tr.is_constant());
        let err = CoefficientTrack::balanced_constant(params(), cm * 10.0, cp * 10.0, 0.1, 0.0, 2.0, 11);
        assert!(matches!(err, Err(TrackError::NegativeVacuum(_))));
    }

    #[test]
    fn csv_round_trip() {
        let tr = CoefficientTrack::balanced(params(), &[0.0, 0.5, 1.0, 1.7], 0.8, |t| {
            (Complex64::new(0.1, 0.01 * t), Complex64::new(0.02, 0.05))
        })
        .unwrap();
        let back = CoefficientTrack::from_csv(params(), &tr.to_csv()).unwrap();
        assert_eq!(back.points(), tr.points());
        let bad = CoefficientTrack::from_csv(params(), "0,1,2\n");
        assert!(matches!(bad, Err(TrackError::Csv { line: 1, .. })));
    }
}
