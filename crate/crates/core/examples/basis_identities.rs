//! Checks the boundary-spinor identities at a few points on the sphere.

use dirac_ibc::params::PhysParams;
use dirac_ibc::spinor::{alpha_sandwich, boundary_pair, identities, Axis, SpherePoint};

fn main() {
    let p = PhysParams::canonical(0.95, 0.5, -1).unwrap();
    println!("B = {:.6}, |f|^2 = {:.6}, <f-,f+> = {:.6}", p.b(), identities::f_norm_sqr(&p), identities::f_overlap(&p));
    for (theta, phi) in [(0.4, 0.0), (1.3, 2.0), (2.8, 5.5)] {
        let w = SpherePoint::new(theta, phi).unwrap();
        let (fm, fp) = boundary_pair(&p, w);
        for ax in Axis::ALL {
            let got = alpha_sandwich(ax, w, &fm, &fp);
            let want = identities::f_cross(ax, w, &p);
            println!(
                "theta={theta:.1} <f-, a_{:<5} f+> = {:+.6} {:+.6}i  (closed form {:+.6} {:+.6}i)",
                ax.name(),
                got.re,
                got.im,
                want.re,
                want.im
            );
        }
    }
}
