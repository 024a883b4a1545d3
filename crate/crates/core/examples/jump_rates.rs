//! Emission rate density, total rate and sampled waiting times.

use dirac_ibc::jump::{jump_rate_density, sample_emission_angles, sample_waiting_time, total_jump_rate};
use dirac_ibc::params::PhysParams;
use dirac_ibc::rng::path_rng;
use dirac_ibc::track::CoefficientTrack;
use num_complex::Complex64;

fn main() {
    let p = PhysParams::canonical(0.96, 0.5, 1).unwrap();
    let one = Complex64::new(1.0, 0.0);
    let track = CoefficientTrack::constant(p, one, Complex64::new(0.0, 1.0), one, 0.0, 100.0).unwrap();
    let total = total_jump_rate(&track, 0.0).unwrap();
    println!("total rate {total:.6}");
    for theta in [0.1, 0.8, std::f64::consts::FRAC_PI_2] {
        println!("sigma(theta = {theta}) = {:.6}", jump_rate_density(&track, 0.0, theta).unwrap());
    }
    let mut rng = path_rng(1, 0);
    let n = 20_000;
    let mean =
        (0..n).map(|_| sample_waiting_time(&track, 0.0, &mut rng).unwrap().expect("rate is positive")).sum::<f64>()
            / n as f64;
    println!("mean waiting time {mean:.5} vs 1/rate {:.5}", 1.0 / total);
    let (theta, phi) = sample_emission_angles(&mut rng);
    println!("one emission direction: theta = {theta:.4}, phi = {phi:.4}");
}
