//! An ingoing trajectory and the 7/4 law of its final approach.

use dirac_ibc::fit::fit_power_law;
use dirac_ibc::params::PhysParams;
use dirac_ibc::trajectory::{integrate, IntegrateOptions, SphericalState, Terminal};
use dirac_ibc::wavefunction::ModelWavefunction;
use num_complex::Complex64;

fn main() {
    let q = (187.0f64 / 196.0).sqrt();
    let p = PhysParams::canonical(q, 0.5, 1).unwrap();
    let model = ModelWavefunction::new(p, Complex64::new(1.0, 0.0), Complex64::new(0.2, -0.5), 1.0).unwrap();
    let seg =
        integrate(&model, SphericalState::new(0.0, 0.3, 1.0, 0.0), &IntegrateOptions::new(1e6, 1e-11, 1e-9)).unwrap();
    let Terminal::Absorbed { t0 } = seg.terminal else {
        println!("not absorbed: {:?}", seg.terminal);
        return;
    };
    let last = seg.last();
    println!(
        "absorbed at t0 = {t0:.9} after {} steps, theta = {:.6}, winding = {:.3e} rad",
        seg.accepted, last.theta, last.phi
    );
    let pts: Vec<(f64, f64)> = seg.samples.iter().filter(|s| s.r < 1e-7).map(|s| (t0 - s.t, s.r)).collect();
    let fit = fit_power_law(&pts).unwrap();
    println!(
        "r ~ {:.4e} |t - t0|^{:.5}  (expected exponent {:.5})",
        fit.prefactor,
        fit.exponent,
        1.0 / (1.0 - 2.0 * p.b())
    );
}
