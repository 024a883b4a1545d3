//! Spherical harmonics, Dirac spinor spherical harmonics and the boundary
//! spinors `f±` that carry the short-distance singularity of the wave function.
//!
//! Conventions: standard Dirac representation, `alpha_k = [[0, sigma_k], [sigma_k, 0]]`,
//! Condon–Shortley phase included in `P_l^m`, inner products antilinear in the
//! first argument.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use thiserror::Error;

use crate::params::{HalfInt, PhysParams};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BasisError {
    #[error("invalid quantum numbers: {0}")]
    Domain(String),
}

/// A direction on the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePoint {
    theta: f64,
    phi: f64,
}

impl SpherePoint {
    /// `theta` must lie in `[0, pi]`; `phi` is reduced to `[0, 2pi)`.
    pub fn new(theta: f64, phi: f64) -> Result<Self, BasisError> {
        if !(0.0..=PI).contains(&theta) || !phi.is_finite() {
            return Err(BasisError::Domain(format!("theta = {theta}, phi = {phi}")));
        }
        let mut phi = phi.rem_euclid(2.0 * PI);
        if phi >= 2.0 * PI {
            phi = 0.0;
        }
        Ok(SpherePoint { theta, phi })
    }

    /// Direction of a nonzero vector.
    pub fn from_vector(x: [f64; 3]) -> Option<Self> {
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        if r == 0.0 || !r.is_finite() {
            return None;
        }
        let theta = (x[2] / r).clamp(-1.0, 1.0).acos();
        let phi = x[1].atan2(x[0]);
        SpherePoint::new(theta, phi).ok()
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Unit vector `e_k` of the spherical frame. At the poles the vectors are
    /// the continuous extension at fixed `phi`.
    pub fn unit(&self, axis: Axis) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        match axis {
            Axis::R => [st * cp, st * sp, ct],
            Axis::Theta => [ct * cp, ct * sp, -st],
            Axis::Phi => [-sp, cp, 0.0],
        }
    }
}

/// Spherical frame directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    R,
    Theta,
    Phi,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::R, Axis::Theta, Axis::Phi];

    pub fn name(self) -> &'static str {
        match self {
            Axis::R => "r",
            Axis::Theta => "theta",
            Axis::Phi => "phi",
        }
    }
}

/// Which of the pair `Phi^+`, `Phi^-` (or `f^+`, `f^-`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

/// Orbital branch of the two-spinor `Psi^{m_j}_{j -/+ 1/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// `l = j - 1/2`
    Lower,
    /// `l = j + 1/2`
    Upper,
}

/// Four-component spinor in the standard representation.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Spinor4(pub [Complex64; 4]);

impl Spinor4 {
    pub fn zero() -> Self {
        Spinor4([ZERO; 4])
    }

    pub fn from_halves(upper: [Complex64; 2], lower: [Complex64; 2]) -> Self {
        Spinor4([upper[0], upper[1], lower[0], lower[1]])
    }

    /// `<self, other>`, antilinear in `self`.
    pub fn inner(&self, other: &Spinor4) -> Complex64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn scale(&self, c: Complex64) -> Spinor4 {
        Spinor4(self.0.map(|a| a * c))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|a| a.is_finite())
    }
}

impl Add for Spinor4 {
    type Output = Spinor4;
    fn add(self, rhs: Spinor4) -> Spinor4 {
        Spinor4(std::array::from_fn(|i| self.0[i] + rhs.0[i]))
    }
}

impl Sub for Spinor4 {
    type Output = Spinor4;
    fn sub(self, rhs: Spinor4) -> Spinor4 {
        Spinor4(std::array::from_fn(|i| self.0[i] - rhs.0[i]))
    }
}

impl Neg for Spinor4 {
    type Output = Spinor4;
    fn neg(self) -> Spinor4 {
        Spinor4(self.0.map(|a| -a))
    }
}

impl Mul<Spinor4> for f64 {
    type Output = Spinor4;
    fn mul(self, rhs: Spinor4) -> Spinor4 {
        Spinor4(rhs.0.map(|a| a * self))
    }
}

impl Mul<Spinor4> for Complex64 {
    type Output = Spinor4;
    fn mul(self, rhs: Spinor4) -> Spinor4 {
        rhs.scale(self)
    }
}

/// Dense complex 4x4 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat4(pub [[Complex64; 4]; 4]);

impl Mat4 {
    pub fn apply(&self, v: &Spinor4) -> Spinor4 {
        Spinor4(std::array::from_fn(|i| (0..4).map(|k| self.0[i][k] * v.0[k]).sum()))
    }

    /// `<u, M v>`.
    pub fn sandwich(&self, u: &Spinor4, v: &Spinor4) -> Complex64 {
        u.inner(&self.apply(v))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (0..4).all(|i| (0..4).all(|k| (self.0[i][k] - self.0[k][i].conj()).norm() <= tol))
    }
}

/// `n . sigma` for a real 3-vector `n`.
fn pauli_dot(n: [f64; 3]) -> [[Complex64; 2]; 2] {
    [[Complex64::new(n[2], 0.0), Complex64::new(n[0], -n[1])], [Complex64::new(n[0], n[1]), Complex64::new(-n[2], 0.0)]]
}

/// `n . alpha` for a real 3-vector `n`.
pub fn alpha_dot(n: [f64; 3]) -> Mat4 {
    let s = pauli_dot(n);
    let mut m = [[ZERO; 4]; 4];
    for i in 0..2 {
        for k in 0..2 {
            m[i][k + 2] = s[i][k];
            m[i + 2][k] = s[i][k];
        }
    }
    Mat4(m)
}

/// `alpha_k = e_k . alpha` in the spherical frame at `point`.
pub fn alpha_component(axis: Axis, point: SpherePoint) -> Mat4 {
    alpha_dot(point.unit(axis))
}

/// `<u, alpha_k v>` without forming the matrix.
pub fn alpha_sandwich(axis: Axis, point: SpherePoint, u: &Spinor4, v: &Spinor4) -> Complex64 {
    let s = pauli_dot(point.unit(axis));
    let sv_up = [s[0][0] * v.0[2] + s[0][1] * v.0[3], s[1][0] * v.0[2] + s[1][1] * v.0[3]];
    let sv_lo = [s[0][0] * v.0[0] + s[0][1] * v.0[1], s[1][0] * v.0[0] + s[1][1] * v.0[1]];
    u.0[0].conj() * sv_up[0] + u.0[1].conj() * sv_up[1] + u.0[2].conj() * sv_lo[0] + u.0[3].conj() * sv_lo[1]
}

fn check_lm(l: i32, m: i32) -> Result<(), BasisError> {
    if l < 0 || m.abs() > l {
        return Err(BasisError::Domain(format!("l = {l}, m = {m}")));
    }
    Ok(())
}

/// `(l - m)! / (l + m)!` for `|m| <= l`.
fn factorial_ratio(l: i32, m: i32) -> f64 {
    let (lo, hi) = if m >= 0 { (l - m, l + m) } else { (l + m, l - m) };
    let prod: f64 = ((lo + 1)..=hi).map(f64::from).product();
    if m >= 0 {
        1.0 / prod
    } else {
        prod
    }
}

/// Associated Legendre function `P_l^m(x)` including the `(-1)^m` phase.
pub fn assoc_legendre(l: i32, m: i32, x: f64) -> Result<f64, BasisError> {
    check_lm(l, m)?;
    if !(-1.0..=1.0).contains(&x) {
        return Err(BasisError::Domain(format!("x = {x} outside [-1, 1]")));
    }
    let ma = m.abs();
    // P_ma^ma = (-1)^ma (2ma - 1)!! (1 - x^2)^{ma/2}
    let somx2 = ((1.0 - x) * (1.0 + x)).sqrt();
    let mut pmm = 1.0;
    let mut fact = 1.0;
    for _ in 0..ma {
        pmm *= -fact * somx2;
        fact += 2.0;
    }
    let plm = if l == ma {
        pmm
    } else {
        let mut p_prev = pmm;
        let mut p = x * f64::from(2 * ma + 1) * pmm;
        for ll in (ma + 2)..=l {
            let next = (x * f64::from(2 * ll - 1) * p - f64::from(ll + ma - 1) * p_prev) / f64::from(ll - ma);
            p_prev = p;
            p = next;
        }
        p
    };
    if m >= 0 {
        Ok(plm)
    } else {
        let phase = if ma % 2 == 0 { 1.0 } else { -1.0 };
        Ok(phase * factorial_ratio(l, ma) * plm)
    }
}

/// Spherical harmonic `Y_l^m(theta, phi)`.
pub fn sph_harmonic(l: i32, m: i32, point: SpherePoint) -> Result<Complex64, BasisError> {
    check_lm(l, m)?;
    let norm = (f64::from(2 * l + 1) / (4.0 * PI) * factorial_ratio(l, m)).sqrt();
    let p = assoc_legendre(l, m, point.theta.cos())?;
    Ok(Complex64::from_polar(norm * p, f64::from(m) * point.phi))
}

/// `Y_l^m` when the prefactor in front of it vanishes the harmonic may not exist.
fn weighted_harmonic(weight: f64, l: i32, m: i32, point: SpherePoint) -> Result<Complex64, BasisError> {
    if weight == 0.0 {
        return Ok(ZERO);
    }
    Ok(weight * sph_harmonic(l, m, point)?)
}

/// Two-spinor `Psi^{m_j}_{j -/+ 1/2}(omega)` for half-integer `j`, `m_j`.
pub fn psi_two_spinor(
    j: HalfInt,
    branch: Branch,
    m_j: HalfInt,
    point: SpherePoint,
) -> Result<[Complex64; 2], BasisError> {
    let (j2, m2) = (j.twice(), m_j.twice());
    if j2 <= 0 || j2 % 2 == 0 || m2.abs() > j2 || (m2 - j2) % 2 != 0 {
        return Err(BasisError::Domain(format!("j = {}, m_j = {}", j.value(), m_j.value())));
    }
    let (jf, mf) = (j.value(), m_j.value());
    // m_j -/+ 1/2 as integers
    let m_lo = (m2 - 1) / 2;
    let m_hi = (m2 + 1) / 2;
    match branch {
        Branch::Lower => {
            let l = (j2 - 1) / 2;
            let n = 1.0 / (2.0 * jf).sqrt();
            Ok([
                n * weighted_harmonic((jf + mf).sqrt(), l, m_lo, point)?,
                n * weighted_harmonic((jf - mf).sqrt(), l, m_hi, point)?,
            ])
        }
        Branch::Upper => {
            let l = (j2 + 1) / 2;
            let n = 1.0 / (2.0 * jf + 2.0).sqrt();
            Ok([
                n * weighted_harmonic((jf + 1.0 - mf).sqrt(), l, m_lo, point)?,
                -n * weighted_harmonic((jf + 1.0 + mf).sqrt(), l, m_hi, point)?,
            ])
        }
    }
}

/// Spinor spherical harmonic `Phi^±_{m_j, kappa_j}(omega)`, with
/// `j = |kappa_j| - 1/2`.
pub fn phi_basis(sign: Sign, m_j: HalfInt, kappa_j: i32, point: SpherePoint) -> Result<Spinor4, BasisError> {
    if kappa_j == 0 {
        return Err(BasisError::Domain("kappa_j = 0".into()));
    }
    let j = HalfInt(2 * kappa_j.abs() - 1);
    // kappa = -(j + 1/2): Phi+ carries l = j - 1/2 on top, Phi- carries l = j + 1/2 below.
    let (top, bottom) = if kappa_j < 0 { (Branch::Lower, Branch::Upper) } else { (Branch::Upper, Branch::Lower) };
    match sign {
        Sign::Plus => {
            let p = psi_two_spinor(j, top, m_j, point)?;
            Ok(Spinor4::from_halves([I * p[0], I * p[1]], [ZERO, ZERO]))
        }
        Sign::Minus => {
            let p = psi_two_spinor(j, bottom, m_j, point)?;
            Ok(Spinor4::from_halves([ZERO, ZERO], p))
        }
    }
}

/// Weights `(w_plus, w_minus)` with `f = w_plus Phi^+ - w_minus Phi^-`.
///
/// `f^+` puts `1+q+B` on `Phi^+` and `1+q-B` on `Phi^-`; `f^-` the reverse.
/// This assignment is the one for which `<f^-, alpha_r f^+> = -i(1+q)B/pi`,
/// i.e. for which positive `Im[c_-^* c_+]` means outgoing radial current.
pub fn boundary_weights(sign: Sign, params: &PhysParams) -> (f64, f64) {
    let big = 1.0 + params.q() + params.b();
    let small = 1.0 + params.q() - params.b();
    match sign {
        Sign::Plus => (big, small),
        Sign::Minus => (small, big),
    }
}

/// Boundary spinor `f^±_{m_j kappa_j}(omega)`.
pub fn f_boundary(
    sign: Sign,
    m_j: HalfInt,
    kappa_j: i32,
    point: SpherePoint,
    params: &PhysParams,
) -> Result<Spinor4, BasisError> {
    let (wp, wm) = boundary_weights(sign, params);
    let plus = phi_basis(Sign::Plus, m_j, kappa_j, point)?;
    let minus = phi_basis(Sign::Minus, m_j, kappa_j, point)?;
    Ok(wp * plus - wm * minus)
}

/// Both boundary spinors `(f^-, f^+)` for the Hamiltonian's own sector label.
pub fn boundary_pair(params: &PhysParams, point: SpherePoint) -> (Spinor4, Spinor4) {
    let (m, k) = (params.m_tilde(), params.kappa_tilde());
    let plus = phi_basis(Sign::Plus, m, k, point).expect("admissible label");
    let minus = phi_basis(Sign::Minus, m, k, point).expect("admissible label");
    let (ap, am) = boundary_weights(Sign::Minus, params);
    let (bp, bm) = boundary_weights(Sign::Plus, params);
    (ap * plus - am * minus, bp * plus - bm * minus)
}

/// Closed forms of the pointwise spinor identities used by the current asymptotics.
pub mod identities {
    use super::*;

    /// `<Phi^+, alpha_k Phi^->` for a sector with `sgn(m_j kappa_j) = label_sign`.
    pub fn phi_cross(axis: Axis, point: SpherePoint, label_sign: f64) -> Complex64 {
        match axis {
            Axis::R => Complex64::new(0.0, -1.0 / (4.0 * PI)),
            Axis::Theta => ZERO,
            Axis::Phi => Complex64::new(label_sign * point.theta().sin() / (4.0 * PI), 0.0),
        }
    }

    /// `<f^-, alpha_k f^-> = <f^+, alpha_k f^+>`.
    pub fn f_diagonal(axis: Axis, point: SpherePoint, params: &PhysParams) -> Complex64 {
        match axis {
            Axis::R | Axis::Theta => ZERO,
            Axis::Phi => {
                Complex64::new(-params.q() * params.one_plus_q() * params.label_sign() * point.theta().sin() / PI, 0.0)
            }
        }
    }

    /// `<f^-, alpha_k f^+>`.
    pub fn f_cross(axis: Axis, point: SpherePoint, params: &PhysParams) -> Complex64 {
        let opq = params.one_plus_q();
        match axis {
            Axis::R => Complex64::new(0.0, -opq * params.b() / PI),
            Axis::Theta => ZERO,
            Axis::Phi => Complex64::new(-opq * params.label_sign() * point.theta().sin() / PI, 0.0),
        }
    }

    /// `|Phi^±|^2`.
    pub const PHI_NORM_SQR: f64 = 1.0 / (4.0 * PI);

    /// `|f^-|^2 = |f^+|^2 = (1+q)/pi`.
    pub fn f_norm_sqr(params: &PhysParams) -> f64 {
        params.one_plus_q() / PI
    }

    /// `<f^-, f^+> = q(1+q)/pi`.
    pub fn f_overlap(params: &PhysParams) -> f64 {
        params.q() * params.one_plus_q() / PI
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp;
        loop {
            // Legendre recurrence: p1 = P_n(x), p2 = P_{n-1}(x)
            let (mut p1, mut p2) = (1.0, 0.0);
            for k in 1..=n {
                let kf = k as f64;
                let p3 = p2;
                p2 = p1;
                p1 = ((2.0 * kf - 1.0) * x * p2 - (kf - 1.0) * p3) / kf;
            }
            dp = nf * (x * p1 - p2) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() <= 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `∫_{S^2} f dΩ` with `order` Gauss–Legendre nodes in `cos(theta)` and
/// `2 * order` trapezoid nodes in `phi`.
pub fn sphere_quadrature<F>(f: F, order: usize) -> Complex64
where
    F: Fn(SpherePoint) -> Complex64,
{
    let order = order.max(1);
    let (xs, ws) = gauss_legendre(order);
    let nphi = 2 * order;
    let dphi = 2.0 * PI / nphi as f64;
    let mut acc = ZERO;
    for (x, w) in xs.iter().zip(&ws) {
        let theta = x.clamp(-1.0, 1.0).acos();
        let mut ring = ZERO;
        for k in 0..nphi {
            let p = SpherePoint { theta, phi: k as f64 * dphi };
            ring += f(p);
        }
        acc += ring * (w * dphi);
    }
    acc
}

/// Default quadrature order (32 x 64 nodes).
pub const DEFAULT_QUADRATURE_ORDER: usize = 32;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::SECTOR_LABELS;

    fn pt(theta: f64, phi: f64) -> SpherePoint {
        SpherePoint::new(theta, phi).unwrap()
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn legendre_low_orders() {
        for &x in &[-1.0, -0.3, 0.0, 0.7, 1.0] {
            assert_eq!(assoc_legendre(0, 0, x).unwrap(), 1.0);
            assert!((assoc_legendre(1, 0, x).unwrap() - x).abs() < 1e-15);
        }
        assert!((assoc_legendre(1, 1, 0.0).unwrap() + 1.0).abs() < 1e-15);
        assert!(assoc_legendre(1, 2, 0.0).is_err());
        assert!(assoc_legendre(1, 0, 1.5).is_err());
        assert!(assoc_legendre(-1, 0, 0.5).is_err());
    }

    #[test]
    fn harmonic_reference_values() {
        let y00 = sph_harmonic(0, 0, pt(1.0, 2.0)).unwrap();
        assert!(close(y00, Complex64::new(1.0 / (4.0 * PI).sqrt(), 0.0), 1e-15));
        let y10 = sph_harmonic(1, 0, pt(0.0, 0.0)).unwrap();
        assert!(close(y10, Complex64::new((3.0 / (4.0 * PI)).sqrt(), 0.0), 1e-15));
        let y11 = sph_harmonic(1, 1, pt(PI / 2.0, 0.0)).unwrap();
        assert!(close(y11, Complex64::new(-(3.0 / (8.0 * PI)).sqrt(), 0.0), 1e-15));
        let y1m1 = sph_harmonic(1, -1, pt(PI / 2.0, 0.0)).unwrap();
        assert!(close(y1m1, Complex64::new((3.0 / (8.0 * PI)).sqrt(), 0.0), 1e-15));
    }

    #[test]
    fn psi_j_half_reference() {
        let p = pt(0.4, 1.1);
        let psi = psi_two_spinor(HalfInt::HALF, Branch::Lower, HalfInt::HALF, p).unwrap();
        assert!(close(psi[0], sph_harmonic(0, 0, p).unwrap(), 1e-15));
        assert_eq!(psi[1], ZERO);
        // <Psi_1^{1/2}, sigma_3 Psi_0^{1/2}> = cos(theta)/(4 pi)
        let up = psi_two_spinor(HalfInt::HALF, Branch::Upper, HalfInt::HALF, p).unwrap();
        let s3 = up[0].conj() * psi[0] - up[1].conj() * psi[1];
        assert!(close(s3, Complex64::new(p.theta().cos() / (4.0 * PI), 0.0), 1e-15));
        assert!(psi_two_spinor(HalfInt::HALF, Branch::Lower, HalfInt(3), p).is_err());
        assert!(psi_two_spinor(HalfInt(2), Branch::Lower, HalfInt(0), p).is_err());
    }

    #[test]
    fn psi_orthonormal_on_sphere() {
        for j2 in [1, 3, 5] {
            let j = HalfInt(j2);
            for m2 in (-j2..=j2).step_by(2) {
                for br in [Branch::Lower, Branch::Upper] {
                    let n = sphere_quadrature(
                        |p| {
                            let v = psi_two_spinor(j, br, HalfInt(m2), p).unwrap();
                            Complex64::new(v[0].norm_sqr() + v[1].norm_sqr(), 0.0)
                        },
                        DEFAULT_QUADRATURE_ORDER,
                    );
                    assert!((n.re - 1.0).abs() < 1e-12, "j2={j2} m2={m2} {br:?}: {n}");
                }
            }
        }
    }

    #[test]
    fn phi_pointwise_identities() {
        for &(m, k) in &SECTOR_LABELS {
            for i in 0..20 {
                let p = pt(0.05 + 3.0 * f64::from(i) / 20.0, 0.37 * f64::from(i));
                let plus = phi_basis(Sign::Plus, m, k, p).unwrap();
                let minus = phi_basis(Sign::Minus, m, k, p).unwrap();
                assert!((plus.norm_sqr() - 1.0 / (4.0 * PI)).abs() < 1e-15);
                assert!((minus.norm_sqr() - 1.0 / (4.0 * PI)).abs() < 1e-15);
                assert!(plus.inner(&minus).norm() < 1e-15);
                let r = alpha_component(Axis::R, p).sandwich(&plus, &minus);
                assert!(close(r, Complex64::new(0.0, -1.0 / (4.0 * PI)), 1e-15));
            }
        }
    }

    #[test]
    fn phi_orthonormal_basis() {
        let order = DEFAULT_QUADRATURE_ORDER;
        let mut labels = Vec::new();
        for &(m, k) in &SECTOR_LABELS {
            for s in [Sign::Plus, Sign::Minus] {
                labels.push((s, m, k));
            }
        }
        for a in &labels {
            for b in &labels {
                let v = sphere_quadrature(
                    |p| {
                        let u = phi_basis(a.0, a.1, a.2, p).unwrap();
                        let w = phi_basis(b.0, b.1, b.2, p).unwrap();
                        u.inner(&w)
                    },
                    order,
                );
                let want = if a == b { 1.0 } else { 0.0 };
                assert!(close(v, Complex64::new(want, 0.0), 1e-10), "{a:?} {b:?}: {v}");
            }
        }
    }

    #[test]
    fn alpha_frame_checks() {
        let pole = pt(0.0, 0.0);
        assert_eq!(alpha_component(Axis::R, pole), alpha_dot([0.0, 0.0, 1.0]));
        assert_eq!(alpha_component(Axis::Phi, pt(1.2, 0.0)), alpha_dot([0.0, 1.0, 0.0]));
        for i in 0..10 {
            let p = pt(0.3 * f64::from(i), 0.7 * f64::from(i));
            for ax in Axis::ALL {
                assert!(alpha_component(ax, p).is_hermitian(1e-15));
            }
        }
    }

    #[test]
    fn alpha_sandwich_matches_matrix() {
        let p = pt(0.9, 4.0);
        let u = Spinor4([
            Complex64::new(0.3, -1.0),
            Complex64::new(2.0, 0.1),
            Complex64::new(-0.5, 0.5),
            Complex64::new(1.0, 1.0),
        ]);
        let v = Spinor4([
            Complex64::new(1.3, 0.2),
            Complex64::new(-0.2, 0.7),
            Complex64::new(0.0, -1.5),
            Complex64::new(0.4, 0.0),
        ]);
        for ax in Axis::ALL {
            let a = alpha_component(ax, p).sandwich(&u, &v);
            let b = alpha_sandwich(ax, p, &u, &v);
            assert!(close(a, b, 1e-14));
        }
    }

    #[test]
    fn boundary_spinor_norms() {
        let params = PhysParams::canonical(0.93, -0.5, 1).unwrap();
        for i in 0..10 {
            let p = pt(0.1 + 0.3 * f64::from(i), 0.6 * f64::from(i));
            let (fm, fp) = boundary_pair(&params, p);
            assert!((fm.norm_sqr() - identities::f_norm_sqr(&params)).abs() < 1e-14);
            assert!((fp.norm_sqr() - identities::f_norm_sqr(&params)).abs() < 1e-14);
            assert!(close(fm.inner(&fp), Complex64::new(identities::f_overlap(&params), 0.0), 1e-14));
            let direct = f_boundary(Sign::Minus, params.m_tilde(), params.kappa_tilde(), p, &params).unwrap();
            assert_eq!(direct, fm);
            let r = alpha_component(Axis::R, p).sandwich(&fm, &fp);
            assert!(close(r, identities::f_cross(Axis::R, p, &params), 1e-14));
        }
    }

    #[test]
    fn quadrature_basics() {
        let v = sphere_quadrature(|_| Complex64::new(1.0, 0.0), 8);
        assert!((v.re - 4.0 * PI).abs() < 1e-13);
        let y10 = sphere_quadrature(|p| sph_harmonic(1, 0, p).unwrap(), 8);
        assert!(y10.norm() < 1e-14);
        let y11 = sphere_quadrature(|p| Complex64::new(sph_harmonic(1, 1, p).unwrap().norm_sqr(), 0.0), 32);
        assert!((y11.re - 1.0).abs() < 1e-13);
        let (x, w) = gauss_legendre(1);
        assert!(x[0].abs() < 1e-15);
        assert!((w[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn sphere_point_validation() {
        assert!(SpherePoint::new(-0.1, 0.0).is_err());
        assert!(SpherePoint::new(3.2, 0.0).is_err());
        let p = SpherePoint::new(1.0, -0.5).unwrap();
        assert!((p.phi() - (2.0 * PI - 0.5)).abs() < 1e-15);
        let q = SpherePoint::from_vector([0.0, 1.0, 0.0]).unwrap();
        assert!((q.theta() - PI / 2.0).abs() < 1e-15 && (q.phi() - PI / 2.0).abs() < 1e-15);
        assert!(SpherePoint::from_vector([0.0; 3]).is_none());
    }
}
