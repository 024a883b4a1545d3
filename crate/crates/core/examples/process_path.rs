//! One realization of the jump process starting in the vacuum.

use dirac_ibc::jump::{simulate_path, Configuration, ModelFamily, PathPiece};
use dirac_ibc::params::PhysParams;
use dirac_ibc::rng::path_rng;
use dirac_ibc::track::CoefficientTrack;
use num_complex::Complex64;

fn main() {
    let p = PhysParams::canonical(0.96, 0.5, 1).unwrap();
    let (cm, cp) = (Complex64::new(0.17, 0.0), Complex64::new(0.0, 0.17));
    let track = CoefficientTrack::balanced_constant(p, cm, cp, 0.5, 0.0, 3.0, 31).unwrap();
    let family = ModelFamily::new(1.0);
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(4);
    let path = simulate_path(&family, &track, Configuration::Vacuum, (0.0, 3.0), &mut path_rng(seed, 0)).unwrap();
    for piece in &path.pieces {
        match piece {
            PathPiece::Vacuum { t_start, t_end } => println!("[{t_start:8.4}, {t_end:8.4}] vacuum"),
            PathPiece::Flight { t_start, t_end, segment } => {
                println!(
                    "[{t_start:8.4}, {t_end:8.4}] flight, {} samples, {:?}",
                    segment.samples.len(),
                    segment.terminal
                )
            }
            PathPiece::Parked { t_start, t_end, position } => {
                println!("[{t_start:8.4}, {t_end:8.4}] outside the inner region at {position:?}")
            }
        }
    }
    for ev in &path.events {
        println!("{}", serde_json::to_string(ev).unwrap());
    }
}
