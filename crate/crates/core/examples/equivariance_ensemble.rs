//! Vacuum occupancy of an ensemble against |psi0|^2 and the master equation.

use dirac_ibc::acceptance::equivariance_setup;
use dirac_ibc::ensemble::{
    flux_estimate, occupancy_comparison, run_ensemble, sector0_comparison, solve_master_equation, EnsembleConfig,
};

fn main() {
    let n = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(4000);
    let setup = equivariance_setup(0.5, 3.0);
    let cfg = EnsembleConfig::new(n, (0.0, 3.0), 2024, 31, 1e-4);
    let stats = run_ensemble(&setup.family, &setup.balanced, &cfg).unwrap();
    let master = solve_master_equation(&setup.balanced, 0.5, &stats.grid, 64);
    println!("   t     p0_hat   +-      master   |psi0|^2");
    for (k, (t, p, s)) in stats.vacuum_occupancy().into_iter().enumerate().step_by(5) {
        println!("{t:5.2}  {p:.4}  {s:.4}  {:.4}   {:.4}", master[k], setup.balanced.vacuum_probability(t));
    }
    let a = occupancy_comparison(&stats, &master);
    let b = sector0_comparison(&stats, &setup.balanced);
    println!("outside 3 sigma: {} (master), {} (|psi0|^2) of {}", a.n_outside, b.n_outside, stats.grid.len());
    let f = flux_estimate(&stats);
    println!(
        "crossing rate at r = 1e-4: {:.4} +- {:.4}, 4 pi C_r = {:.4}",
        f.rate,
        f.std_err,
        4.0 * std::f64::consts::PI * setup.balanced.c_r(0.0)
    );
}
