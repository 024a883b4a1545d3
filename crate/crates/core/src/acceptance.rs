//! The acceptance suite: nine end-to-end checks with fixed seeds, each with
//! its tolerance and a wall-clock budget.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::ensemble::{
    angle_uniformity_test, flux_estimate, occupancy_comparison, run_ensemble, sector0_comparison,
    solve_master_equation, EnsembleConfig, EnsembleStats,
};
use crate::fit::fit_power_law;
use crate::jump::{jump_rate_density, sample_emission_angles, total_jump_rate, ModelFamily};
use crate::params::{circling_sign, singularity_exponent, HalfInt, PhysParams, Q_MIN, SECTOR_LABELS};
use crate::rng::path_rng;
use crate::spinor::{alpha_sandwich, f_boundary, identities, phi_basis, sphere_quadrature, Axis, Sign, SpherePoint};
use crate::track::CoefficientTrack;
use crate::trajectory::{integrate, IntegrateOptions, SphericalState, TrajectorySegment};
use crate::wavefunction::{current_coeffs, ModelWavefunction};

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "[{}] criterion {} {}: {} ({:.2}s of {:.0}s)",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs_f64()
        )
    }
}

fn timed(id: u32, name: &'static str, budget_s: u64, body: impl FnOnce() -> (bool, String)) -> CriterionResult {
    let start = Instant::now();
    let (ok, detail) = body();
    let elapsed = start.elapsed();
    let budget = Duration::from_secs(budget_s);
    CriterionResult { id, name, pass: ok && elapsed <= budget, detail, elapsed, budget }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_point<R: Rng>(rng: &mut R) -> SpherePoint {
    let (theta, phi) = sample_emission_angles(rng);
    SpherePoint::new(theta, phi).expect("sampled angles are in range")
}

fn random_q<R: Rng>(rng: &mut R, hi: f64) -> f64 {
    let mag = Q_MIN + (hi - Q_MIN) * rng.random_range(0.01..0.99);
    if rng.random::<bool>() {
        mag
    } else {
        -mag
    }
}

pub fn lemma_identities() -> CriterionResult {
    timed(1, "lemma identities", 5, || {
        let mut rng = path_rng(101, 0);
        let mut worst = 0.0f64;
        for _ in 0..5 {
            let q = random_q(&mut rng, 1.0);
            for &(m, k) in &SECTOR_LABELS {
                let p = PhysParams::canonical(q, m.value(), k).expect("valid");
                for _ in 0..100 {
                    let w = random_point(&mut rng);
                    worst = worst.max(identity_residual(&p, m, k, w));
                }
            }
        }
        (worst < 1e-10, format!("max residual {worst:.2e} (< 1e-10)"))
    })
}

/// Largest deviation between brute-force spinor algebra and the closed forms at one point.
pub fn identity_residual(p: &PhysParams, m: HalfInt, k: i32, w: SpherePoint) -> f64 {
    let sgn = p.label_sign();
    let pp = phi_basis(Sign::Plus, m, k, w).expect("valid");
    let pm = phi_basis(Sign::Minus, m, k, w).expect("valid");
    let fp = f_boundary(Sign::Plus, m, k, w, p).expect("valid");
    let fm = f_boundary(Sign::Minus, m, k, w, p).expect("valid");
    let mut worst = 0.0f64;
    for ax in Axis::ALL {
        let checks = [
            (alpha_sandwich(ax, w, &pp, &pm), identities::phi_cross(ax, w, sgn)),
            (alpha_sandwich(ax, w, &pp, &pp), c(0.0, 0.0)),
            (alpha_sandwich(ax, w, &pm, &pm), c(0.0, 0.0)),
            (alpha_sandwich(ax, w, &fm, &fm), identities::f_diagonal(ax, w, p)),
            (alpha_sandwich(ax, w, &fp, &fp), identities::f_diagonal(ax, w, p)),
            (alpha_sandwich(ax, w, &fm, &fp), identities::f_cross(ax, w, p)),
        ];
        for (a, b) in checks {
            worst = worst.max((a - b).norm());
        }
    }
    let norms = [
        (pp.norm_sqr(), identities::PHI_NORM_SQR),
        (fm.norm_sqr(), identities::f_norm_sqr(p)),
        (fp.norm_sqr(), identities::f_norm_sqr(p)),
        (fm.inner(&fp).re, identities::f_overlap(p)),
    ];
    for (a, b) in norms {
        worst = worst.max((a - b).abs());
    }
    worst
}

pub fn current_expansion() -> CriterionResult {
    timed(2, "current expansion", 5, || {
        let mut rng = path_rng(102, 0);
        let (mut radial, mut polar, mut azim) = (0.0f64, 0.0f64, 0.0f64);
        for _ in 0..20 {
            let q = random_q(&mut rng, 1.0);
            let (m, k) = SECTOR_LABELS[rng.random_range(0..4)];
            let p = PhysParams::canonical(q, m.value(), k).expect("valid");
            let cm = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let cp = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let model = ModelWavefunction::new(p, cm, cp, 1.0).expect("valid");
            let kc = current_coeffs(&p, cm, cp);
            let b = p.b();
            for i in 0..=30 {
                let r = 10f64.powf(-6.0 + 3.0 * f64::from(i) / 30.0);
                let w = random_point(&mut rng);
                let f = model.field_at(r, w).expect("r > 0");
                radial = radial.max((r * r * f.j[0] - kc.c_r).abs() / kc.c_r.abs());
                polar = polar.max(f.j[1].abs() / f.rho);
                let lhs = r.powf(2.0 + 2.0 * b) * f.j[2] / w.theta().sin();
                let rhs = kc.azimuthal_series(r, b);
                azim = azim.max((lhs - rhs).abs() / rhs.abs());
            }
        }
        let ok = radial < 1e-9 && polar < 1e-13 && azim < 1e-8;
        (
            ok,
            format!(
                "r^2 j_r rel {radial:.1e} (< 1e-9), |j_theta|/rho {polar:.1e} (< 1e-13), j_phi rel {azim:.1e} (< 1e-8)"
            ),
        )
    })
}

fn random_ingoing<R: Rng>(rng: &mut R, ratio: f64) -> (Complex64, Complex64) {
    loop {
        let cm = Complex64::from_polar(rng.random_range(0.5..1.5), rng.random_range(0.0..2.0 * PI));
        let cp = Complex64::from_polar(cm.norm() * rng.random_range(0.1..ratio), rng.random_range(0.0..2.0 * PI));
        // keep the flow clearly ingoing
        if (cm.conj() * cp).im < -0.2 * cm.norm() * cp.norm() {
            return (cm, cp);
        }
    }
}

fn absorb<R: Rng>(rng: &mut R, model: &ModelWavefunction, r_min: f64, tol: f64) -> TrajectorySegment {
    let r0 = rng.random_range(0.05..0.4);
    let w = random_point(rng);
    let start = SphericalState::new(0.0, r0, w.theta(), w.phi());
    integrate(model, start, &IntegrateOptions::new(1e12, tol, r_min)).expect("integration succeeds")
}

pub fn radial_exponent() -> CriterionResult {
    timed(3, "radial exponent", 30, || {
        let q = (187.0f64 / 196.0).sqrt();
        let b = singularity_exponent(q);
        let want = 1.0 / (1.0 - 2.0 * b);
        let mut rng = path_rng(103, 0);
        let (mut worst_e, mut worst_a) = (0.0f64, 0.0f64);
        for _ in 0..10 {
            let (m, k) = SECTOR_LABELS[rng.random_range(0..4)];
            let p = PhysParams::canonical(q, m.value(), k).expect("valid");
            let (cm, cp) = random_ingoing(&mut rng, 1.0);
            let model = ModelWavefunction::new(p, cm, cp, 1.0).expect("valid");
            let r_min = 1e-8;
            let seg = absorb(&mut rng, &model, r_min, 1e-11);
            let Some(t0) = seg.absorption_time() else {
                return (false, "trajectory not absorbed".into());
            };
            let pts: Vec<(f64, f64)> =
                seg.samples.iter().filter(|s| s.r <= 100.0 * r_min).map(|s| (t0 - s.t, s.r)).collect();
            let fit = match fit_power_law(&pts) {
                Ok(f) => f,
                Err(e) => return (false, format!("fit failed: {e}")),
            };
            let g = 2.0 * b * (1.0 - 2.0 * b) * (cm.conj() * cp).im.abs() / cm.norm_sqr();
            let amp = g.powf(want);
            worst_e = worst_e.max((fit.exponent - want).abs());
            worst_a = worst_a.max((fit.prefactor - amp).abs() / amp);
        }
        let ok = worst_e <= 0.018 && worst_a <= 0.02;
        (ok, format!("max |exponent - 7/4| {worst_e:.2e} (<= 0.018), max prefactor rel err {worst_a:.2e} (<= 0.02)"))
    })
}

pub fn azimuthal_law() -> CriterionResult {
    timed(4, "azimuthal law", 30, || {
        let mut rng = path_rng(104, 0);
        let (mut worst, mut min_wind, mut signs_ok) = (0.0f64, f64::INFINITY, true);
        for _ in 0..5 {
            let q = random_q(&mut rng, 0.99);
            let (m, k) = SECTOR_LABELS[rng.random_range(0..4)];
            let p = PhysParams::canonical(q, m.value(), k).expect("valid");
            let (cm, cp) = random_ingoing(&mut rng, 0.5);
            let model = ModelWavefunction::new(p, cm, cp, 1.0).expect("valid");
            let r_min = 1e-12;
            let seg = absorb(&mut rng, &model, r_min, 1e-10);
            let s = &seg.samples;
            min_wind = min_wind.min((s.last().unwrap().phi - s[0].phi).abs());
            let near: Vec<_> = s.iter().filter(|x| x.r <= 1e4 * r_min).collect();
            let want_sign = circling_sign(&p);
            let mut pts = Vec::new();
            for w in near.windows(2) {
                let (dphi, dt) = (w[1].phi - w[0].phi, w[1].t - w[0].t);
                if dt > 0.0 && dphi != 0.0 && dphi.signum() != want_sign {
                    signs_ok = false;
                }
                let dl = (w[1].r / w[0].r).ln();
                if dl.abs() > 1e-3 {
                    pts.push(((w[0].r * w[1].r).sqrt(), (dphi / dl).abs()));
                }
            }
            match fit_power_law(&pts) {
                Ok(f) => worst = worst.max((f.exponent + 2.0 * p.b()).abs() / (2.0 * p.b())),
                Err(e) => return (false, format!("fit failed: {e}")),
            }
        }
        let ok = worst <= 0.01 && min_wind > 20.0 * PI && signs_ok;
        (
            ok,
            format!(
                "max rel exponent err {worst:.2e} (<= 1%), min winding {min_wind:.3e} rad (> 20 pi), circling sign {}",
                if signs_ok { "ok" } else { "violated" }
            ),
        )
    })
}

pub fn cone_law() -> CriterionResult {
    timed(5, "cone law", 10, || {
        let mut rng = path_rng(105, 0);
        let (mut clean, mut perturbed) = (0.0f64, 0.0f64);
        for i in 0..6 {
            let q = random_q(&mut rng, 0.99);
            let (m, k) = SECTOR_LABELS[rng.random_range(0..4)];
            let p = PhysParams::canonical(q, m.value(), k).expect("valid");
            let (cm, cp) = random_ingoing(&mut rng, 1.0);
            let mut model = ModelWavefunction::new(p, cm, cp, 1.0).expect("valid");
            let perturb = i % 2 == 1;
            if perturb {
                model = model.with_subleading(cm * c(0.05, 0.02), cp * c(-0.03, 0.04));
            }
            let r_min = 1e-10;
            let seg = absorb(&mut rng, &model, r_min, 1e-10);
            if seg.absorption_time().is_none() {
                return (false, "trajectory not absorbed".into());
            }
            let theta0 = seg.last().theta;
            let dev = seg
                .samples
                .iter()
                .filter(|s| s.r <= 10.0 * r_min)
                .map(|s| (s.theta - theta0).abs())
                .fold(0.0, f64::max);
            if perturb {
                perturbed = perturbed.max(dev);
            } else {
                clean = clean.max(dev);
            }
        }
        let ok = clean < 1e-8 && perturbed < 1e-2;
        (ok, format!("max |theta - theta0| {clean:.1e} unperturbed (< 1e-8), {perturbed:.1e} perturbed (< 1e-2)"))
    })
}

pub fn rate_law() -> CriterionResult {
    timed(6, "rate law", 1, || {
        let mut rng = path_rng(106, 0);
        let mut worst = 0.0f64;
        for _ in 0..5 {
            let q = random_q(&mut rng, 1.0);
            let p = PhysParams::canonical(q, 0.5, 1).expect("valid");
            let cm = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let cp = cm * c(rng.random_range(-1.0..1.0), rng.random_range(0.1..1.0));
            let psi0 = c(rng.random_range(0.2..1.0), rng.random_range(-0.5..0.5));
            let tr = CoefficientTrack::constant(p, cm, cp, psi0, 0.0, 1.0).expect("valid");
            let total = total_jump_rate(&tr, 0.5).expect("vacuum nonempty");
            let integral = sphere_quadrature(
                |w| c(jump_rate_density(&tr, 0.5, w.theta()).expect("vacuum nonempty") / w.theta().sin(), 0.0),
                32,
            );
            worst = worst.max((integral.re - total).abs() / total);
        }
        let p = PhysParams::canonical(0.96, 0.5, 1).expect("valid");
        let tr = CoefficientTrack::constant(p, c(1.0, 0.0), c(0.0, 1.0), c(1.0, 0.0), 0.0, 1.0).expect("valid");
        let total = total_jump_rate(&tr, 0.0).expect("vacuum nonempty");
        let flux = 4.0 * PI * tr.c_r(0.0);
        let ok = worst < 1e-10 && (total - 4.3904).abs() < 1e-12 && (total - flux).abs() < 1e-12 * total;
        (ok, format!("angular integral rel err {worst:.1e} (< 1e-10), total rate {total:.12} (4.3904), |total - 4 pi C_r| {:.1e}", (total - flux).abs()))
    })
}

/// Emission angles in a pre-registered run; shared by the `ensemble` tests.
pub fn emission_sample(n: usize, seed: u64) -> EnsembleStats {
    let cfg = EnsembleConfig::new(0, (0.0, 1.0), seed, 2, 1e-4);
    let mut stats = EnsembleStats::empty(&cfg);
    let mut rng = path_rng(seed, 0);
    for _ in 0..n {
        let (theta, phi) = sample_emission_angles(&mut rng);
        stats.add_angles(theta.cos(), phi);
    }
    stats
}

pub fn emission_angles() -> CriterionResult {
    timed(7, "emission angles", 10, || {
        let stats = emission_sample(100_000, 107);
        match angle_uniformity_test(&stats) {
            Ok(rep) => (
                rep.pass,
                format!(
                    "chi2 = {:.1} on {} dof, p = {:.3}; KS D = {:.4}, p = {:.3} (both >= 0.01)",
                    rep.chi_square.statistic,
                    rep.chi_square.dof,
                    rep.chi_square.p_value,
                    rep.ks_cos_theta.statistic,
                    rep.ks_cos_theta.p_value
                ),
            ),
            Err(e) => (false, e.to_string()),
        }
    })
}

/// Parameters of the desk-scale equivariance runs: `q = 0.96`, `c_+ = i c_-`,
/// `r_cut = 1`, with `|c_-|` fixed by normalization against `p0`.
pub struct EquivarianceSetup {
    pub family: ModelFamily,
    pub balanced: CoefficientTrack,
    pub unbalanced: CoefficientTrack,
    pub t_end: f64,
}

pub fn equivariance_setup(p0: f64, t_end: f64) -> EquivarianceSetup {
    let p = PhysParams::canonical(0.96, 0.5, 1).expect("valid");
    let unit = ModelWavefunction::new(p, c(1.0, 0.0), c(0.0, 1.0), 1.0).expect("valid");
    let a = ((1.0 - p0) / unit.norm_sqr()).sqrt();
    let (cm, cp) = (c(a, 0.0), c(0.0, a));
    let balanced = CoefficientTrack::balanced_constant(p, cm, cp, p0, 0.0, t_end, 31).expect("enough vacuum");
    let unbalanced = CoefficientTrack::constant(p, cm, cp, c(p0.sqrt(), 0.0), 0.0, t_end).expect("valid");
    let mut family = ModelFamily::new(1.0);
    family.tol = 1e-8;
    EquivarianceSetup { family, balanced, unbalanced, t_end }
}

pub fn equivariance() -> CriterionResult {
    timed(8, "equivariance", 180, || {
        let setup = equivariance_setup(0.5, 3.0);
        let run = |track: &CoefficientTrack, seed| {
            let cfg = EnsembleConfig::new(10_000, (0.0, setup.t_end), seed, 101, 1e-4);
            run_ensemble(&setup.family, track, &cfg)
        };
        let stats = match run(&setup.balanced, 108) {
            Ok(s) => s,
            Err(e) => return (false, e.to_string()),
        };
        let oracle = solve_master_equation(&setup.balanced, 0.5, &stats.grid, 64);
        let vs_oracle = occupancy_comparison(&stats, &oracle);
        let vs_psi0 = sector0_comparison(&stats, &setup.balanced);
        let control = match run(&setup.unbalanced, 109) {
            Ok(s) => sector0_comparison(&s, &setup.unbalanced),
            Err(e) => return (false, e.to_string()),
        };
        let ok = vs_oracle.pass && vs_psi0.pass && !control.pass;
        (
            ok,
            format!(
                "outside 3 sigma: {}/{} vs master equation, {}/{} vs |psi0|^2; unbalanced control {}/{} ({})",
                vs_oracle.n_outside,
                vs_oracle.z_scores.len(),
                vs_psi0.n_outside,
                vs_psi0.z_scores.len(),
                control.n_outside,
                control.z_scores.len(),
                if control.pass { "not detected" } else { "rejected" }
            ),
        )
    })
}

pub fn flux_balance() -> CriterionResult {
    timed(9, "flux balance", 120, || {
        let setup = equivariance_setup(0.5, 3.0);
        let cfg = EnsembleConfig::new(10_000, (0.0, setup.t_end), 110, 11, 1e-4);
        let stats = match run_ensemble(&setup.family, &setup.balanced, &cfg) {
            Ok(s) => s,
            Err(e) => return (false, e.to_string()),
        };
        let est = flux_estimate(&stats);
        let want = 4.0 * PI * setup.balanced.c_r(0.0);
        let z = est.z_score(want);
        (
            z.abs() <= 3.0,
            format!("crossing rate {:.5} +- {:.5}, 4 pi C_r = {want:.5}, z = {z:.2}", est.rate, est.std_err),
        )
    })
}

/// The criteria in order; entry `k` is criterion `k + 1`.
pub const CRITERIA: [fn() -> CriterionResult; 9] = [
    lemma_identities,
    current_expansion,
    radial_exponent,
    azimuthal_law,
    cone_law,
    rate_law,
    emission_angles,
    equivariance,
    flux_balance,
];

pub fn run_all() -> Vec<CriterionResult> {
    CRITERIA.iter().map(|run| run()).collect()
}
