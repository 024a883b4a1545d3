use dirac_ibc::jump::{jump_rate_density, simulate_path, Configuration, ModelFamily};
use dirac_ibc::params::{circling_sign, make_params, singularity_exponent, PhysParams, Q_MIN};
use dirac_ibc::rng::path_rng;
use dirac_ibc::spinor::SpherePoint;
use dirac_ibc::track::CoefficientTrack;
use dirac_ibc::trajectory::{integrate, IntegrateOptions, SphericalState, Terminal};
use dirac_ibc::wavefunction::{current_coeffs, ModelWavefunction};
use num_complex::Complex64;
use proptest::prelude::*;

fn q_strategy() -> impl Strategy<Value = f64> {
    (Q_MIN + 1e-6..0.999_999f64, any::<bool>()).prop_map(|(q, neg)| if neg { -q } else { q })
}

fn labels() -> impl Strategy<Value = (f64, i32)> {
    (prop_oneof![Just(-0.5), Just(0.5)], prop_oneof![Just(-1), Just(1)])
}

fn coeff() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64)
        .prop_filter("nonzero", |(a, b)| a.hypot(*b) > 1e-3)
        .prop_map(|(a, b)| Complex64::new(a, b))
}

fn point() -> impl Strategy<Value = SpherePoint> {
    (-0.999..0.999f64, 0.0..std::f64::consts::TAU).prop_map(|(c, p)| SpherePoint::new(c.acos(), p).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn current_never_exceeds_density(
        q in q_strategy(), (m, k) in labels(), cm in coeff(), cp in coeff(),
        sm in coeff(), sp in coeff(), lr in -7.0..-0.31f64, w in point(),
    ) {
        let p = PhysParams::canonical(q, m, k).unwrap();
        let model = ModelWavefunction::new(p, cm, cp, 1.0).unwrap().with_subleading(sm, sp);
        let f = model.field_at(10f64.powf(lr), w).unwrap();
        let j = (f.j[0] * f.j[0] + f.j[1] * f.j[1] + f.j[2] * f.j[2]).sqrt();
        prop_assert!(j <= f.rho * (1.0 + 1e-12), "|j| = {j}, rho = {}", f.rho);
    }

    #[test]
    fn current_matches_series(
        q in q_strategy(), (m, k) in labels(), cm in coeff(), cp in coeff(),
        lr in -8.0..-0.31f64, w in point(),
    ) {
        let p = PhysParams::canonical(q, m, k).unwrap();
        let model = ModelWavefunction::new(p, cm, cp, 1.0).unwrap();
        let kc = current_coeffs(&p, cm, cp);
        let r = 10f64.powf(lr);
        let x = r * w.theta().sin();
        let pos = [x * w.phi().cos(), x * w.phi().sin(), r * w.theta().cos()];
        let j = model.current_exact(pos).unwrap();
        let rho = model.density_exact(pos).unwrap();
        let b = p.b();
        let scale = r.powf(2.0 + 2.0 * b);
        let rho_scale = kc.rho_leading.abs() + kc.rho_mid.abs() * r.powf(2.0 * b) + kc.rho_sub.abs() * r.powf(4.0 * b);
        // rounding in the spinor sandwich scales with r^2 rho, not with C_r
        prop_assert!((r * r * j[0] - kc.c_r).abs() <= 1e-9 * kc.c_r.abs() + 1e-14 * r * r * rho);
        prop_assert!((scale * rho - kc.density_series(r, b)).abs() <= 1e-10 * rho_scale);
        let series = kc.azimuthal_series(r, b) * w.theta().sin();
        prop_assert!((scale * j[2] - series).abs() <= 1e-10 * rho_scale);
        prop_assert!(j[1].abs() <= 1e-13 * rho);
    }

    #[test]
    fn circling_sign_ignores_coupling_and_coefficients(
        q in q_strategy(), (m, k) in labels(), cm in coeff(), cp in coeff(),
        g_re in 0.1..3.0f64, g_im in -3.0..3.0f64, a1 in 0.2..5.0f64, a2 in -2.0..2.0f64, a3 in -2.0..2.0f64,
        w in point(),
    ) {
        let b = singularity_exponent(q);
        let det = 4.0 * b * (1.0 + q);
        let a4 = (det + a2 * a3) / a1;
        let p = make_params(q, Complex64::new(g_re, g_im), [a1, a2, a3, a4], m, k).unwrap();
        let base = PhysParams::canonical(q, m, k).unwrap();
        prop_assert_eq!(circling_sign(&p), circling_sign(&base));
        prop_assert_eq!(circling_sign(&p), -q.signum() * (m * f64::from(k)).signum());
        // close enough to the source the leading mode fixes the sense of rotation
        let model = ModelWavefunction::new(p, cm, cp.scale(0.1 * cm.norm() / cp.norm()), 1.0).unwrap();
        let v = model.velocity_at(1e-12, w).unwrap();
        prop_assert_eq!(v[2].signum(), circling_sign(&p));
    }

    #[test]
    fn rate_density_nonnegative_and_gated(
        q in q_strategy(), cm in coeff(), cp in coeff(), th in 0.01..3.13f64, vac in 0.05..1.0f64,
    ) {
        let p = PhysParams::canonical(q, 0.5, 1).unwrap();
        let tr = CoefficientTrack::constant(p, cm, cp, Complex64::new(vac.sqrt(), 0.0), 0.0, 1.0).unwrap();
        let s = jump_rate_density(&tr, 0.5, th).unwrap();
        prop_assert!(s >= 0.0);
        prop_assert_eq!(s == 0.0, (cm.conj() * cp).im <= 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn time_reversal_retraces(
        q in q_strategy(), (m, k) in labels(), cm in coeff(), cp in coeff(),
        r0 in 0.01..0.3f64, w in point(), frac in 0.05..0.5f64,
    ) {
        let p = PhysParams::canonical(q, m, k).unwrap();
        let fwd = ModelWavefunction::new(p, cm, cp, 1.0).unwrap();
        let rev = ModelWavefunction::new(p.with_labels(m, -k).unwrap(), cm.conj(), cp.conj(), 1.0).unwrap();
        let v = fwd.velocity_at(r0, w).unwrap();
        let t_end = frac * r0 / v[0].abs().max(1e-12);
        let opts = IntegrateOptions::new(t_end, 1e-12, 1e-9);
        let out = integrate(&fwd, SphericalState::new(0.0, r0, w.theta(), w.phi()), &opts).unwrap();
        prop_assume!(out.terminal == Terminal::TimeExhausted);
        let end = *out.last();
        let back = integrate(&rev, SphericalState::new(0.0, end.r, end.theta, end.phi), &IntegrateOptions::new(end.t, 1e-12, 1e-9)).unwrap();
        prop_assert_eq!(back.terminal, Terminal::TimeExhausted);
        let home = back.last();
        prop_assert!((home.r - r0).abs() <= 1e-6 * r0, "r {} vs {}", home.r, r0);
        prop_assert!((home.theta - w.theta()).abs() <= 1e-8);
        let dphi = (home.phi - w.phi()).abs();
        prop_assert!(dphi <= 1e-6 * (1.0 + (end.phi - w.phi()).abs()), "phi off by {dphi}");
    }

    #[test]
    fn paths_are_deterministic(seed in any::<u64>(), index in 0u64..1000) {
        let p = PhysParams::canonical(0.96, 0.5, 1).unwrap();
        let (cm, cp) = (Complex64::new(0.17, 0.0), Complex64::new(0.0, 0.17));
        let tr = CoefficientTrack::balanced_constant(p, cm, cp, 0.5, 0.0, 2.0, 11).unwrap();
        let fam = ModelFamily::new(1.0);
        let run = || simulate_path(&fam, &tr, Configuration::Vacuum, (0.0, 2.0), &mut path_rng(seed, index)).unwrap();
        let a = run();
        prop_assert_eq!(&a, &run());
        for pair in a.events.windows(2) {
            prop_assert!(pair[0].time() <= pair[1].time());
        }
    }
}
