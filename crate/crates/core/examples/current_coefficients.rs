//! Current coefficients near the source and the flux through a small sphere.

use std::f64::consts::PI;

use dirac_ibc::params::PhysParams;
use dirac_ibc::spinor::{sphere_quadrature, SpherePoint};
use dirac_ibc::wavefunction::{current_coeffs, ModelWavefunction};
use num_complex::Complex64;

fn main() {
    let p = PhysParams::canonical(0.96, 0.5, 1).unwrap();
    let (cm, cp) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0));
    let k = current_coeffs(&p, cm, cp);
    println!("{}", serde_json::to_string_pretty(&k).unwrap());

    let model = ModelWavefunction::new(p, cm, cp, 1.0).unwrap();
    for r in [1e-6, 1e-4, 1e-2] {
        // r^2 j_r is independent of r and direction, so the flux is 4 pi C_r at every radius
        let flux =
            sphere_quadrature(|w: SpherePoint| Complex64::new(r * r * model.field_at(r, w).unwrap().j[0], 0.0), 16);
        println!("r = {r:e}: flux = {:.12}, 4 pi C_r = {:.12}", flux.re, 4.0 * PI * k.c_r);
    }
}
