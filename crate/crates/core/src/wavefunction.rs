//! The one-particle wave function near the source, built from its
//! short-distance expansion, together with the exact current `psi^† alpha psi`,
//! the density `|psi|^2` and the closed-form coefficients of their expansions.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::params::PhysParams;
use crate::spinor::{alpha_sandwich, boundary_pair, gauss_legendre, Axis, SpherePoint, Spinor4};

/// Exponent offset of the optional injected subleading terms: they scale as
/// `r^{-1/2 + SUBLEADING_DELTA}`.
pub const SUBLEADING_DELTA: f64 = 0.1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("wave function is singular at the origin")]
    Origin,
    #[error("density vanishes at r = {0}")]
    ZeroDensity(f64),
    #[error("r = {r} is outside the inner region r < {limit}")]
    OutsideInnerRegion { r: f64, limit: f64 },
    #[error("Im[c_-^* c_+] = 0: Bohmian dynamics is degenerate")]
    Degenerate,
    #[error("velocity field has a nonzero azimuthal part at the pole (theta = {0})")]
    Pole(f64),
    #[error("cutoff radius must be positive and finite, got {0}")]
    Cutoff(f64),
}

/// Model wave function
/// `psi(x) = chi(r) [c_- f^-(w) r^{-1-B} + c_+ f^+(w) r^{-1+B} + (s_- f^- + s_+ f^+) r^{-1/2+delta}]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelWavefunction {
    params: PhysParams,
    c_minus: Complex64,
    c_plus: Complex64,
    r_cut: f64,
    subleading: [Complex64; 2],
}

/// Density and current at one point, components in the spherical frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalField {
    pub rho: f64,
    pub j: [f64; 3],
}

impl ModelWavefunction {
    pub fn new(params: PhysParams, c_minus: Complex64, c_plus: Complex64, r_cut: f64) -> Result<Self, ModelError> {
        if !(r_cut > 0.0 && r_cut.is_finite()) {
            return Err(ModelError::Cutoff(r_cut));
        }
        Ok(ModelWavefunction { params, c_minus, c_plus, r_cut, subleading: [Complex64::new(0.0, 0.0); 2] })
    }

    /// Adds `o(r^{-1/2})` perturbations along `f^-` and `f^+`.
    pub fn with_subleading(mut self, amp_minus: Complex64, amp_plus: Complex64) -> Self {
        self.subleading = [amp_minus, amp_plus];
        self
    }

    pub fn with_coefficients(mut self, c_minus: Complex64, c_plus: Complex64) -> Self {
        self.c_minus = c_minus;
        self.c_plus = c_plus;
        self
    }

    pub fn params(&self) -> &PhysParams {
        &self.params
    }

    pub fn c_minus(&self) -> Complex64 {
        self.c_minus
    }

    pub fn c_plus(&self) -> Complex64 {
        self.c_plus
    }

    pub fn r_cut(&self) -> f64 {
        self.r_cut
    }

    /// Outer edge of the region where the cutoff is identically one.
    pub fn inner_radius(&self) -> f64 {
        0.5 * self.r_cut
    }

    pub fn subleading(&self) -> [Complex64; 2] {
        self.subleading
    }

    pub fn has_subleading(&self) -> bool {
        self.subleading.iter().any(|a| a.norm() != 0.0)
    }

    /// `Im[c_-^* c_+]`.
    pub fn im_cross(&self) -> f64 {
        (self.c_minus.conj() * self.c_plus).im
    }

    pub fn coeffs(&self) -> CurrentCoeffs {
        current_coeffs(&self.params, self.c_minus, self.c_plus)
    }

    /// C^1 cutoff: one below `r_cut/2`, zero above `r_cut`, cubic smoothstep between.
    pub fn cutoff(&self, r: f64) -> f64 {
        let half = 0.5 * self.r_cut;
        if r <= half {
            1.0
        } else if r >= self.r_cut {
            0.0
        } else {
            let u = (r - half) / half;
            1.0 - u * u * (3.0 - 2.0 * u)
        }
    }

    /// Radial amplitudes `(a_-, a_+)` with `psi = a_- f^- + a_+ f^+` at radius `r`.
    fn radial_amplitudes(&self, r: f64) -> (Complex64, Complex64) {
        let b = self.params.b();
        let chi = self.cutoff(r);
        let mut am = self.c_minus * r.powf(-1.0 - b);
        let mut ap = self.c_plus * r.powf(-1.0 + b);
        if self.has_subleading() {
            let s = r.powf(-0.5 + SUBLEADING_DELTA);
            am += self.subleading[0] * s;
            ap += self.subleading[1] * s;
        }
        (am * chi, ap * chi)
    }

    /// `psi^(1)` at radius `r > 0` in direction `point`.
    pub fn psi_at(&self, r: f64, point: SpherePoint) -> Result<Spinor4, ModelError> {
        if !(r > 0.0) {
            return Err(ModelError::Origin);
        }
        let (fm, fp) = boundary_pair(&self.params, point);
        let (am, ap) = self.radial_amplitudes(r);
        Ok(am * fm + ap * fp)
    }

    pub fn eval_psi1(&self, x: [f64; 3]) -> Result<Spinor4, ModelError> {
        let (r, point) = split(x)?;
        self.psi_at(r, point)
    }

    /// Density and all three current components from a single spinor evaluation.
    pub fn field_at(&self, r: f64, point: SpherePoint) -> Result<LocalField, ModelError> {
        let psi = self.psi_at(r, point)?;
        Ok(LocalField { rho: psi.norm_sqr(), j: Axis::ALL.map(|ax| alpha_sandwich(ax, point, &psi, &psi).re) })
    }

    /// `(j_r, j_theta, j_phi)` at the Cartesian point `x`.
    pub fn current_exact(&self, x: [f64; 3]) -> Result<[f64; 3], ModelError> {
        let (r, point) = split(x)?;
        Ok(self.field_at(r, point)?.j)
    }

    pub fn density_exact(&self, x: [f64; 3]) -> Result<f64, ModelError> {
        let (r, point) = split(x)?;
        Ok(self.psi_at(r, point)?.norm_sqr())
    }

    /// `j / rho` in the spherical frame, inside the inner region.
    pub fn velocity_at(&self, r: f64, point: SpherePoint) -> Result<[f64; 3], ModelError> {
        if !(r > 0.0) {
            return Err(ModelError::Origin);
        }
        if r >= self.inner_radius() {
            return Err(ModelError::OutsideInnerRegion { r, limit: self.inner_radius() });
        }
        let f = self.field_at(r, point)?;
        if !(f.rho > 0.0) {
            return Err(ModelError::ZeroDensity(r));
        }
        Ok(f.j.map(|c| c / f.rho))
    }

    pub fn velocity_field(&self, x: [f64; 3]) -> Result<[f64; 3], ModelError> {
        let (r, point) = split(x)?;
        self.velocity_at(r, point)
    }

    /// Radial probability density `4 pi r^2 rho(r)` (the angular dependence
    /// of `rho` drops out for this ansatz).
    pub fn radial_density(&self, r: f64) -> f64 {
        if r <= 0.0 || r >= self.r_cut {
            return 0.0;
        }
        let (am, ap) = self.radial_amplitudes(r);
        let opq = self.params.one_plus_q();
        let rho = (opq / PI) * (am.norm_sqr() + ap.norm_sqr() + 2.0 * self.params.q() * (am.conj() * ap).re);
        4.0 * PI * r * r * rho
    }

    /// `(coefficient, power)` pairs of `a_-` and `a_+` inside the inner region.
    fn amplitude_terms(&self) -> [[(Complex64, f64); 2]; 2] {
        let b = self.params.b();
        let p = -0.5 + SUBLEADING_DELTA;
        [[(self.c_minus, -1.0 - b), (self.subleading[0], p)], [(self.c_plus, -1.0 + b), (self.subleading[1], p)]]
    }

    /// Probability in the ball `|x| < r`.
    pub fn radial_mass(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let half = self.inner_radius();
        let inner = r.min(half);
        let [am, ap] = self.amplitude_terms();
        let q = self.params.q();
        let mut total = 0.0;
        let mut add = |x: &[(Complex64, f64); 2], y: &[(Complex64, f64); 2], w: f64| {
            for &(cx, px) in x {
                for &(cy, py) in y {
                    let k = (cx.conj() * cy).re;
                    if k != 0.0 {
                        let e = px + py + 3.0;
                        total += w * k * inner.powf(e) / e;
                    }
                }
            }
        };
        add(&am, &am, 1.0);
        add(&ap, &ap, 1.0);
        add(&am, &ap, 2.0 * q);
        let mut mass = 4.0 * self.params.one_plus_q() * total;
        if r > half {
            let (x, w) = gauss_legendre(48);
            let top = r.min(self.r_cut);
            let (mid, rad) = (0.5 * (top + half), 0.5 * (top - half));
            mass += rad * x.iter().zip(&w).map(|(xi, wi)| wi * self.radial_density(mid + rad * xi)).sum::<f64>();
        }
        mass
    }

    /// Total one-particle probability `int |psi^(1)|^2`.
    pub fn norm_sqr(&self) -> f64 {
        self.radial_mass(self.r_cut)
    }

    /// Radius `r` with `radial_mass(r) = m`, for `0 <= m < norm_sqr()`.
    pub fn radius_for_mass(&self, m: f64) -> f64 {
        let (mut lo, mut hi) = (1e-300f64.ln(), self.r_cut.ln());
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.radial_mass(mid.exp()) < m {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-15 {
                break;
            }
        }
        (0.5 * (lo + hi)).exp()
    }
}

fn split(x: [f64; 3]) -> Result<(f64, SpherePoint), ModelError> {
    let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    if r == 0.0 {
        return Err(ModelError::Origin);
    }
    let point = SpherePoint::from_vector(x).ok_or(ModelError::Origin)?;
    Ok((r, point))
}

/// Closed-form coefficients of the near-source expansions
///
/// ```text
/// r^2 j_r                = C_r
/// j_phi / sin(theta)     = Cphi_l r^{-2-2B} + Cphi_m r^{-2} + Cphi_s r^{-2+2B}
/// rho                    = rho_l  r^{-2-2B} + rho_m  r^{-2} + rho_s  r^{-2+2B}
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurrentCoeffs {
    pub c_r: f64,
    pub cphi_leading: f64,
    pub cphi_mid: f64,
    pub cphi_sub: f64,
    pub rho_leading: f64,
    pub rho_mid: f64,
    pub rho_sub: f64,
}

pub fn current_coeffs(params: &PhysParams, c_minus: Complex64, c_plus: Complex64) -> CurrentCoeffs {
    let q = params.q();
    let b = params.b();
    let opq = params.one_plus_q();
    let sgn = params.label_sign();
    let cross = c_minus.conj() * c_plus;
    let nm = c_minus.norm_sqr();
    let np = c_plus.norm_sqr();
    CurrentCoeffs {
        c_r: 2.0 * opq * b * cross.im / PI,
        cphi_leading: -q * opq * nm * sgn / PI,
        cphi_mid: -2.0 * opq * cross.re * sgn / PI,
        cphi_sub: -q * opq * np * sgn / PI,
        rho_leading: nm * opq / PI,
        rho_mid: 2.0 * cross.re * q * opq / PI,
        rho_sub: np * opq / PI,
    }
}

impl CurrentCoeffs {
    /// `r^{2+2B} j_phi / sin(theta)` from the three-term series.
    pub fn azimuthal_series(&self, r: f64, b: f64) -> f64 {
        let x = r.powf(2.0 * b);
        self.cphi_leading + x * (self.cphi_mid + x * self.cphi_sub)
    }

    /// `r^{2+2B} rho` from the three-term series.
    pub fn density_series(&self, r: f64, b: f64) -> f64 {
        let x = r.powf(2.0 * b);
        self.rho_leading + x * (self.rho_mid + x * self.rho_sub)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(c_minus: Complex64, c_plus: Complex64) -> ModelWavefunction {
        let p = PhysParams::canonical(0.96, 0.5, 1).unwrap();
        ModelWavefunction::new(p, c_minus, c_plus, 1.0).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn coefficient_examples() {
        let p = PhysParams::canonical(0.96, 0.5, 1).unwrap();
        let k = current_coeffs(&p, c(1.0, 0.0), c(0.0, 1.0));
        assert!((k.c_r - 2.0 * 1.96 * 0.28 / PI).abs() < 1e-15);
        assert!((k.c_r - 0.349_376_931_075_328_7).abs() < 1e-12);
        let k = current_coeffs(&p, c(0.3, -1.2), c(0.3, -1.2) * 2.5);
        assert!(k.c_r.abs() < 1e-15);
        let k = current_coeffs(&p, c(0.7, 0.2), c(0.0, 0.0));
        assert_eq!(k.c_r, 0.0);
        assert_eq!(k.cphi_mid, 0.0);
        assert_eq!(k.cphi_sub, 0.0);
        assert_eq!(k.rho_mid, 0.0);
        assert!(k.cphi_leading != 0.0 && k.rho_leading != 0.0);
    }

    #[test]
    fn pure_singular_mode() {
        let m = model(c(0.8, -0.3), c(0.0, 0.0));
        let p = SpherePoint::new(1.1, 0.4).unwrap();
        let (fm, _) = boundary_pair(m.params(), p);
        for &r in &[1e-6, 1e-3, 0.2, 0.5] {
            let psi = m.psi_at(r, p).unwrap();
            let want = (c(0.8, -0.3) * r.powf(-1.28)) * fm;
            assert!((psi - want).norm_sqr().sqrt() <= 1e-15 * want.norm_sqr().sqrt());
            let rho = psi.norm_sqr();
            let lead = m.coeffs().rho_leading * r.powf(-2.56);
            assert!((rho - lead).abs() <= 1e-13 * lead);
        }
    }

    #[test]
    fn origin_rejected() {
        let m = model(c(1.0, 0.0), c(0.0, 1.0));
        assert_eq!(m.eval_psi1([0.0; 3]), Err(ModelError::Origin));
        assert_eq!(m.current_exact([0.0; 3]), Err(ModelError::Origin));
        assert_eq!(m.density_exact([0.0; 3]), Err(ModelError::Origin));
        assert!(matches!(m.velocity_field([0.6, 0.0, 0.0]), Err(ModelError::OutsideInnerRegion { .. })));
        assert!(ModelWavefunction::new(*m.params(), c(1.0, 0.0), c(0.0, 0.0), 0.0).is_err());
    }

    #[test]
    fn cutoff_shape() {
        let m = model(c(1.0, 0.0), c(0.0, 1.0));
        assert_eq!(m.cutoff(0.5), 1.0);
        assert_eq!(m.cutoff(1.0), 0.0);
        assert!((m.cutoff(0.75) - 0.5).abs() < 1e-15);
        let mut prev = 1.0;
        for i in 0..=100 {
            let v = m.cutoff(0.5 + 0.5 * f64::from(i) / 100.0);
            assert!(v <= prev);
            prev = v;
        }
        // C^1 at both joins
        let h = 1e-7;
        assert!(((m.cutoff(0.5 + h) - 1.0) / h).abs() < 1e-5);
        assert!((m.cutoff(1.0 - h) / h).abs() < 1e-5);
    }

    #[test]
    fn psi_in_boundary_span() {
        let m = model(c(0.4, 0.2), c(-0.3, 1.0)).with_subleading(c(0.1, 0.0), c(0.0, -0.2));
        let p = SpherePoint::new(2.0, 5.0).unwrap();
        let (fm, fp) = boundary_pair(m.params(), p);
        let psi = m.psi_at(0.01, p).unwrap();
        // least squares in span{f-, f+} leaves no residual
        let g = [[fm.inner(&fm), fm.inner(&fp)], [fp.inner(&fm), fp.inner(&fp)]];
        let rhs = [fm.inner(&psi), fp.inner(&psi)];
        let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
        let x0 = (rhs[0] * g[1][1] - g[0][1] * rhs[1]) / det;
        let x1 = (g[0][0] * rhs[1] - g[1][0] * rhs[0]) / det;
        let resid = psi - (x0 * fm + x1 * fp);
        assert!(resid.norm_sqr().sqrt() < 1e-12 * psi.norm_sqr().sqrt());
    }

    #[test]
    fn norm_integral_finite() {
        let m = model(c(1.0, 0.0), c(0.0, 1.0));
        // int_0^{r_cut} 4 pi r^2 rho dr, with the r^{-2B} endpoint singularity
        // removed by substituting r = u^{1/(1-2B)}.
        let b = m.params().b();
        let e = 1.0 / (1.0 - 2.0 * b);
        let n = 20000;
        let mut total = 0.0;
        for i in 0..n {
            let u = (i as f64 + 0.5) / n as f64;
            let r = u.powf(e);
            let drdu = e * u.powf(e - 1.0);
            total += m.radial_density(r) * drdu / n as f64;
        }
        assert!(total.is_finite() && total > 0.0);
        let k = m.coeffs();
        let inner = 4.0
            * PI
            * (k.rho_leading * 0.5f64.powf(1.0 - 2.0 * b) / (1.0 - 2.0 * b)
                + k.rho_mid * 0.5
                + k.rho_sub * 0.5f64.powf(1.0 + 2.0 * b) / (1.0 + 2.0 * b));
        assert!(total > inner);
    }

    #[test]
    fn velocity_for_pure_singular_mode() {
        let m = model(c(1.0, 0.5), c(0.0, 0.0));
        let p = SpherePoint::new(0.8, 1.0).unwrap();
        let v = m.velocity_at(1e-3, p).unwrap();
        assert!(v[0].abs() < 1e-15);
        let want = -0.96 * 0.8f64.sin();
        assert!((v[2] - want).abs() < 1e-13);
    }

    #[test]
    fn radial_mass_against_quadrature() {
        let m = model(c(0.3, 0.1), c(-0.2, 0.4)).with_subleading(c(0.05, 0.0), c(0.0, 0.02));
        let b = m.params().b();
        let e = 1.0 / (1.0 - 2.0 * b);
        // midpoint rule in u = r^{1-2B} on (0, 0.3)
        let n = 200_000;
        let top = 0.3f64.powf(1.0 - 2.0 * b);
        let mut q = 0.0;
        for i in 0..n {
            let u = top * (i as f64 + 0.5) / n as f64;
            q += m.radial_density(u.powf(e)) * e * u.powf(e - 1.0) * top / n as f64;
        }
        assert!((m.radial_mass(0.3) - q).abs() < 1e-6 * q);
        let total = m.norm_sqr();
        assert!(total > m.radial_mass(0.5) && total > 0.0);
        for frac in [0.001, 0.3, 0.9, 0.999] {
            let r = m.radius_for_mass(frac * total);
            assert!((m.radial_mass(r) - frac * total).abs() < 1e-10 * total);
        }
    }
}
