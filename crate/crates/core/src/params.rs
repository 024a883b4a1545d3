//! Hamiltonian parameters and the constants derived from them.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Lower edge of the admissible Coulomb strength, `sqrt(3)/2`.
pub const Q_MIN: f64 = 0.866_025_403_784_438_6;

const CONSTRAINT_RTOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamsError {
    #[error("coupling strength q = {0} outside sqrt(3)/2 < |q| < 1")]
    Range(f64),
    #[error("a1*a4 - a2*a3 = {got} but must equal 4B(1+q) = {want}")]
    Constraint { got: f64, want: f64 },
    #[error("(m_tilde, kappa_tilde) = ({m}, {kappa}) not in {{-1/2, 1/2}} x {{-1, 1}}")]
    Set { m: f64, kappa: i32 },
    #[error("coupling g must be nonzero")]
    ZeroCoupling,
}

/// A half-integer stored as twice its value, so `HalfInt(1)` is `1/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HalfInt(pub i32);

impl HalfInt {
    pub const HALF: HalfInt = HalfInt(1);
    pub const MINUS_HALF: HalfInt = HalfInt(-1);

    /// Returns `None` unless `x` is an odd multiple of 1/2.
    pub fn from_f64(x: f64) -> Option<Self> {
        let twice = 2.0 * x;
        let r = twice.round();
        if (twice - r).abs() > 1e-12 || (r as i64).rem_euclid(2) != 1 {
            return None;
        }
        Some(HalfInt(r as i32))
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    pub fn twice(self) -> i32 {
        self.0
    }
}

/// Validated parameters of the creation/annihilation Hamiltonian.
///
/// `q` carries its sign; `b = sqrt(1 - q^2)` lies in `(0, 1/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysParams {
    q: f64,
    b: f64,
    g: Complex64,
    a: [f64; 4],
    m_tilde: HalfInt,
    kappa_tilde: i32,
}

/// The admissible sector labels `(m_tilde, kappa_tilde)`.
pub const SECTOR_LABELS: [(HalfInt, i32); 4] = [(HalfInt(-1), -1), (HalfInt(-1), 1), (HalfInt(1), -1), (HalfInt(1), 1)];

/// `B = sqrt(1 - q^2)`.
pub fn singularity_exponent(q: f64) -> f64 {
    (1.0 - q * q).sqrt()
}

pub fn make_params(
    q: f64,
    g: Complex64,
    a: [f64; 4],
    m_tilde: f64,
    kappa_tilde: i32,
) -> Result<PhysParams, ParamsError> {
    let aq = q.abs();
    if !(aq > Q_MIN && aq < 1.0) || !q.is_finite() {
        return Err(ParamsError::Range(q));
    }
    let b = singularity_exponent(q);
    let want = 4.0 * b * (1.0 + q);
    let got = a[0] * a[3] - a[1] * a[2];
    if !((got - want).abs() <= CONSTRAINT_RTOL * want.abs()) {
        return Err(ParamsError::Constraint { got, want });
    }
    let m = HalfInt::from_f64(m_tilde)
        .filter(|m| m.0.abs() == 1)
        .ok_or(ParamsError::Set { m: m_tilde, kappa: kappa_tilde })?;
    if kappa_tilde.abs() != 1 {
        return Err(ParamsError::Set { m: m_tilde, kappa: kappa_tilde });
    }
    if g.norm() == 0.0 || !g.is_finite() {
        return Err(ParamsError::ZeroCoupling);
    }
    Ok(PhysParams { q, b, g, a, m_tilde: m, kappa_tilde })
}

impl PhysParams {
    /// Convenience constructor with `g = 1` and `a = (1, 0, 0, 4B(1+q))`.
    pub fn canonical(q: f64, m_tilde: f64, kappa_tilde: i32) -> Result<Self, ParamsError> {
        let b = singularity_exponent(q);
        make_params(q, Complex64::new(1.0, 0.0), [1.0, 0.0, 0.0, 4.0 * b * (1.0 + q)], m_tilde, kappa_tilde)
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn g(&self) -> Complex64 {
        self.g
    }

    pub fn a(&self) -> [f64; 4] {
        self.a
    }

    pub fn m_tilde(&self) -> HalfInt {
        self.m_tilde
    }

    pub fn kappa_tilde(&self) -> i32 {
        self.kappa_tilde
    }

    /// `sgn(m_tilde * kappa_tilde)`, always `+1` or `-1`.
    pub fn label_sign(&self) -> f64 {
        f64::from((self.m_tilde.0 * self.kappa_tilde).signum())
    }

    /// Radial exponent of the asymptotic law `r ~ |t - t0|^{1/(1-2B)}`.
    pub fn radial_exponent(&self) -> f64 {
        1.0 / (1.0 - 2.0 * self.b)
    }

    /// `1 + q`, the prefactor shared by all boundary-spinor identities.
    pub fn one_plus_q(&self) -> f64 {
        1.0 + self.q
    }

    /// Same parameters, different sector label.
    pub fn with_labels(&self, m_tilde: f64, kappa_tilde: i32) -> Result<Self, ParamsError> {
        make_params(self.q, self.g, self.a, m_tilde, kappa_tilde)
    }
}

/// Sign of the leading azimuthal velocity near the source: `-sgn(q) sgn(m_tilde kappa_tilde)`.
pub fn circling_sign(params: &PhysParams) -> f64 {
    -params.q.signum() * params.label_sign()
}
