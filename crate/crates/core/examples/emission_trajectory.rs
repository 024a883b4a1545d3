//! A trajectory emitted from the source, written as CSV to stdout.

use dirac_ibc::params::{circling_sign, PhysParams};
use dirac_ibc::trajectory::{emit_trajectory, IntegrateOptions};
use dirac_ibc::wavefunction::ModelWavefunction;
use num_complex::Complex64;

fn main() {
    let p = PhysParams::canonical(-0.93, -0.5, 1).unwrap();
    let model = ModelWavefunction::new(p, Complex64::new(1.0, 0.0), Complex64::new(0.1, 0.4), 1.0).unwrap();
    let opts = IntegrateOptions::new(50.0, 1e-10, 1e-10).sample_every(20);
    let seg = emit_trajectory(&model, 0.0, 0.7, 0.0, 1e-9, &opts).unwrap();
    eprintln!("{:?} after {} samples, sense of circling {}", seg.terminal, seg.samples.len(), circling_sign(&p));
    println!("t,r,theta,phi,x,y,z");
    for s in &seg.samples {
        let [x, y, z] = s.position();
        println!("{},{},{},{},{},{},{}", s.t, s.r, s.theta, s.phi, x, y, z);
    }
}
