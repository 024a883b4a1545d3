//! Command-line front end. Exit codes: 0 success, 1 validation failure,
//! 2 runtime error, 64 usage error.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::acceptance::{self, identity_residual};
use crate::config::{load_config, ConfigError, RunConfig, TraceMode};
use crate::ensemble::{
    angle_uniformity_test, flux_estimate, occupancy_comparison, radial_density_test, run_ensemble, sector0_comparison,
    solve_master_equation, EnsembleConfig, EnsembleError, ANGLE_BINS,
};
use crate::jump::{simulate_path, PathPiece};
use crate::params::{circling_sign, PhysParams, SECTOR_LABELS};
use crate::rng::path_rng;
use crate::spinor::{gauss_legendre, phi_basis, sphere_quadrature, Sign, SpherePoint};
use crate::trajectory::{
    emit_trajectory, integrate, log_coefficient, IntegrateOptions, SphericalState, Terminal, TrajectorySegment,
};
use crate::wavefunction::current_coeffs;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

/// Overrides the output directory of every command.
pub const OUT_DIR_ENV: &str = "DIRAC_IBC_OUT_DIR";

const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Residual threshold for `validate-basis`.
const BASIS_TOL: f64 = 1e-10;

#[derive(Debug, Parser)]
#[command(name = "dirac-ibc", version, about = "Jump process for Dirac particle creation at a point source")]
#[command(arg_required_else_help = true)]
struct Cli {
    /// Output directory; beats $DIRAC_IBC_OUT_DIR and run.output_dir.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the spinor identities and orthonormality on a quadrature grid.
    ValidateBasis {
        #[arg(long, default_value_t = 32)]
        order: usize,
    },
    /// Print the current coefficients as JSON.
    Coeffs {
        #[arg(short, long)]
        config: PathBuf,
    },
    /// Integrate one trajectory and write it as CSV.
    Trace {
        #[arg(short, long)]
        config: PathBuf,
    },
    /// Simulate one process path and write its events as JSON lines.
    Simulate {
        #[arg(short, long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run an ensemble and write a JSON summary plus CSV histograms.
    Ensemble {
        #[arg(short, long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        n_paths: Option<u64>,
    },
    /// Run the acceptance suite.
    Selftest {
        /// Run only these criteria (repeatable).
        #[arg(long = "criterion")]
        only: Vec<u32>,
    },
}

#[derive(Debug)]
enum CliError {
    Validation(String),
    Runtime(String),
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Validation(e.to_string())
    }
}

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

/// Parses `argv` (program name first) and runs the command.
pub fn dispatch<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    let out = cli.out_dir.clone();
    let result = match cli.command {
        Command::ValidateBasis { order } => validate_basis(order, out),
        Command::Coeffs { config } => coeffs(&config),
        Command::Trace { config } => trace(&config, out),
        Command::Simulate { config, seed } => simulate(&config, seed, out),
        Command::Ensemble { config, seed, n_paths } => ensemble(&config, seed, n_paths, out),
        Command::Selftest { only } => selftest(&only),
    };
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_VALIDATION,
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            EXIT_VALIDATION
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            EXIT_RUNTIME
        }
    }
}

#[derive(Debug, Serialize)]
struct Header<'a> {
    program: &'static str,
    version: &'static str,
    command: &'a str,
    seed: Option<u64>,
    config: Option<&'a RunConfig>,
}

impl<'a> Header<'a> {
    fn new(command: &'a str, seed: Option<u64>, config: Option<&'a RunConfig>) -> Self {
        Header { program: "dirac-ibc", version: VERSION, command, seed, config }
    }

    /// `#`-prefixed comment block for CSV files.
    fn csv_comment(&self) -> String {
        let mut s = format!("# {} {}\n# command: {}\n", self.program, self.version, self.command);
        match self.seed {
            Some(seed) => writeln!(s, "# seed: {seed}").unwrap(),
            None => s.push_str("# seed: none\n"),
        }
        if let Some(cfg) = self.config {
            writeln!(s, "# config: {}", serde_json::to_string(cfg).unwrap()).unwrap();
        }
        s
    }
}

fn output_dir(flag: Option<PathBuf>, cfg: Option<&RunConfig>) -> Result<PathBuf, CliError> {
    let dir = flag
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .or_else(|| cfg.and_then(|c| c.run.output_dir.clone()))
        .unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).map_err(|e| CliError::Runtime(format!("{}: {e}", dir.display())))?;
    Ok(dir)
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

fn basis_rows(params: &PhysParams, order: usize) -> Vec<(&'static str, f64)> {
    let (m, k) = (params.m_tilde(), params.kappa_tilde());
    let (xs, _) = gauss_legendre(order);
    let nphi = 2 * order;
    let mut pointwise = 0.0f64;
    for x in &xs {
        for j in 0..nphi {
            let w = SpherePoint::new(x.clamp(-1.0, 1.0).acos(), 2.0 * PI * j as f64 / nphi as f64).unwrap();
            pointwise = pointwise.max(identity_residual(params, m, k, w));
        }
    }
    let mut ortho = 0.0f64;
    for a in [Sign::Plus, Sign::Minus] {
        for &(m2, k2) in &SECTOR_LABELS {
            for b in [Sign::Plus, Sign::Minus] {
                let v = sphere_quadrature(
                    |w| {
                        let u = phi_basis(a, m, k, w).unwrap();
                        u.inner(&phi_basis(b, m2, k2, w).unwrap())
                    },
                    order,
                );
                let delta = if a == b && m == m2 && k == k2 { 1.0 } else { 0.0 };
                ortho = ortho.max((v - delta).norm());
            }
        }
    }
    vec![("pointwise_identities", pointwise), ("orthonormality", ortho)]
}

fn validate_basis(order: usize, out: Option<PathBuf>) -> Result<bool, CliError> {
    if order == 0 {
        return Err(CliError::Validation("--order must be positive".into()));
    }
    let dir = output_dir(out, None)?;
    let mut csv = Header::new("validate-basis", None, None).csv_comment();
    writeln!(csv, "# order: {order}").unwrap();
    csv.push_str("q,m_tilde,kappa_tilde,check,residual\n");
    let mut worst = 0.0f64;
    for q in [-0.97, 0.9, 0.96, 0.99] {
        for &(m, k) in &SECTOR_LABELS {
            let p = PhysParams::canonical(q, m.value(), k).map_err(runtime)?;
            for (name, r) in basis_rows(&p, order) {
                worst = worst.max(r);
                writeln!(csv, "{q},{},{k},{name},{r:e}", m.value()).unwrap();
            }
        }
    }
    let path = dir.join("basis_residuals.csv");
    write(&path, &csv)?;
    let pass = worst < BASIS_TOL;
    println!("max |residual| = {worst:e} ({}); table in {}", if pass { "ok" } else { "FAILED" }, path.display());
    Ok(pass)
}

fn coeffs(config: &Path) -> Result<bool, CliError> {
    let cfg = load_config(config)?.resolved();
    let params = cfg.physical()?;
    let (cm, cp) = cfg.coefficients();
    let cc = current_coeffs(&params, cm, cp);
    let report = json!({
        "header": Header::new("coeffs", None, Some(&cfg)),
        "b": params.b(),
        "radial_exponent": params.radial_exponent(),
        "circling_sign": circling_sign(&params),
        "log_coefficient": log_coefficient(&params, cm, cp),
        "coeffs": cc,
        "flux_4pi_c_r": 4.0 * PI * cc.c_r,
    });
    println!("{}", serde_json::to_string_pretty(&report).map_err(runtime)?);
    Ok(true)
}

fn trajectory_csv(header: &Header, seg: &TrajectorySegment) -> String {
    let mut csv = header.csv_comment();
    csv.push_str("t,r,theta,phi,x,y,z\n");
    for s in &seg.samples {
        let [x, y, z] = s.position();
        writeln!(csv, "{},{},{},{},{},{},{}", s.t, s.r, s.theta, s.phi, x, y, z).unwrap();
    }
    writeln!(csv, "# terminal: {}", describe(&seg.terminal)).unwrap();
    csv
}

fn describe(terminal: &Terminal) -> String {
    match terminal {
        Terminal::Absorbed { t0 } => format!("absorbed, t0 = {t0}"),
        Terminal::LeftInnerRegion => "left the inner region".into(),
        Terminal::TimeExhausted => "reached the end of the window".into(),
    }
}

fn trace(config: &Path, out: Option<PathBuf>) -> Result<bool, CliError> {
    let cfg = load_config(config)?.resolved();
    let model = cfg.model()?;
    let (t0, t1) = cfg.t_span();
    let tr = &cfg.run.trace;
    let opts = IntegrateOptions::new(t1, cfg.run.tol, cfg.r_min()).sample_every(cfg.run.sample_every);
    let seg = match tr.mode {
        TraceMode::Absorb => integrate(&model, SphericalState::new(t0, tr.r0, tr.theta0, tr.phi0), &opts),
        TraceMode::Emit => emit_trajectory(&model, t0, tr.theta0, tr.phi0, cfg.r_seed(), &opts),
    }
    .map_err(runtime)?;
    let dir = output_dir(out, Some(&cfg))?;
    let path = dir.join("trace.csv");
    write(&path, &trajectory_csv(&Header::new("trace", None, Some(&cfg)), &seg))?;
    println!("{} samples, {}; written to {}", seg.samples.len(), describe(&seg.terminal), path.display());
    Ok(true)
}

fn simulate(config: &Path, seed: Option<u64>, out: Option<PathBuf>) -> Result<bool, CliError> {
    let mut cfg = load_config(config)?;
    if seed.is_some() {
        cfg.run.seed = seed;
    }
    let seed = cfg.seed()?;
    let cfg = cfg.resolved();
    let track = cfg.track()?;
    let family = cfg.family();
    let span = cfg.t_span();
    let mut rng = path_rng(seed, 0);
    let initial = cfg.initial(&track, &mut rng)?;
    let path = simulate_path(&family, &track, initial, span, &mut rng).map_err(runtime)?;

    let header = Header::new("simulate", Some(seed), Some(&cfg));
    let mut lines = vec![json!({ "header": &header }).to_string()];
    lines.push(json!({ "kind": "initial", "t": span.0, "configuration": path.initial }).to_string());
    for ev in &path.events {
        lines.push(serde_json::to_string(ev).map_err(runtime)?);
    }
    lines.push(json!({ "kind": "final", "t": span.1, "configuration": path.configuration_at(span.1) }).to_string());
    let dir = output_dir(out, Some(&cfg))?;
    let events = dir.join("events.jsonl");
    write(&events, &(lines.join("\n") + "\n"))?;
    if cfg.run.dense_trace {
        let mut csv = header.csv_comment();
        csv.push_str("piece,t,r,theta,phi,x,y,z\n");
        for (k, piece) in path.pieces.iter().enumerate() {
            if let PathPiece::Flight { segment, .. } = piece {
                for s in &segment.samples {
                    let [x, y, z] = s.position();
                    writeln!(csv, "{k},{},{},{},{},{},{},{}", s.t, s.r, s.theta, s.phi, x, y, z).unwrap();
                }
            }
        }
        write(&dir.join("path_trace.csv"), &csv)?;
    }
    println!("{} events; written to {}", path.events.len(), events.display());
    Ok(true)
}

fn ensemble(config: &Path, seed: Option<u64>, n_paths: Option<u64>, out: Option<PathBuf>) -> Result<bool, CliError> {
    let mut cfg = load_config(config)?;
    if seed.is_some() {
        cfg.run.seed = seed;
    }
    if let Some(n) = n_paths {
        cfg.run.n_paths = n;
        cfg.validate()?;
    }
    let seed = cfg.seed()?;
    let cfg = cfg.resolved();
    let track = cfg.track()?;
    let family = cfg.family();
    let span = cfg.t_span();
    let ecfg = EnsembleConfig::new(cfg.run.n_paths, span, seed, cfg.run.grid_points, cfg.run.r_probe);
    let stats = run_ensemble(&family, &track, &ecfg).map_err(|e| match e {
        EnsembleError::Normalization(_) => {
            CliError::Validation(format!("{e}; set model.normalize = true or rescale the coefficients"))
        }
        e => runtime(e),
    })?;

    let master = solve_master_equation(&track, track.vacuum_probability(span.0), &stats.grid, 64);
    let vs_master = occupancy_comparison(&stats, &master);
    let vs_psi0 = sector0_comparison(&stats, &track);
    let flux = flux_estimate(&stats);
    let expected = stats.grid.iter().map(|&t| 4.0 * PI * track.c_r(t)).sum::<f64>() / stats.grid.len() as f64;
    let angles = angle_uniformity_test(&stats);
    let end_model = family.model(&track, span.1).map_err(runtime)?;
    let radial = radial_density_test(&stats, &end_model);
    let summarize = |r: &crate::ensemble::OccupancyReport| json!({ "n_outside_3sigma": r.n_outside, "fraction_outside": r.fraction_outside, "pass": r.pass });
    let header = Header::new("ensemble", Some(seed), Some(&cfg));
    let summary = json!({
        "header": &header,
        "n_paths": stats.n_paths,
        "emissions": stats.emission_count(),
        "absorptions": stats.absorption_times.total(),
        "occupancy_vs_master_equation": summarize(&vs_master),
        "occupancy_vs_psi0": summarize(&vs_psi0),
        "flux": { "r_probe": stats.r_probe, "rate": flux.rate, "std_err": flux.std_err,
                  "expected_4pi_c_r": expected, "z": flux.z_score(expected) },
        "angles": match &angles {
            Ok(a) => serde_json::to_value(a).map_err(runtime)?,
            Err(e) => json!({ "error": e.to_string() }),
        },
        "final_radii_ks": radial,
    });
    let dir = output_dir(out, Some(&cfg))?;
    write(&dir.join("ensemble.json"), &(serde_json::to_string_pretty(&summary).map_err(runtime)? + "\n"))?;

    let mut occ = header.csv_comment();
    occ.push_str("t,p0_hat,std_err,master,psi0_sq\n");
    for (k, (t, p, s)) in stats.vacuum_occupancy().into_iter().enumerate() {
        writeln!(occ, "{t},{p},{s},{},{}", master[k], track.vacuum_probability(t)).unwrap();
    }
    write(&dir.join("occupancy.csv"), &occ)?;

    let mut times = header.csv_comment();
    times.push_str("t_lo,t_hi,emissions,absorptions\n");
    let h = &stats.emission_times;
    let width = (h.hi - h.lo) / h.counts.len() as f64;
    for (k, (e, a)) in h.counts.iter().zip(&stats.absorption_times.counts).enumerate() {
        let lo = h.lo + k as f64 * width;
        writeln!(times, "{lo},{},{e},{a}", lo + width).unwrap();
    }
    write(&dir.join("event_times.csv"), &times)?;

    let mut ang = header.csv_comment();
    ang.push_str("cos_lo,cos_hi,phi_lo,phi_hi,count\n");
    let (dc, dp) = (2.0 / ANGLE_BINS as f64, 2.0 * PI / ANGLE_BINS as f64);
    for i in 0..ANGLE_BINS {
        for j in 0..ANGLE_BINS {
            let (c0, p0) = (-1.0 + i as f64 * dc, j as f64 * dp);
            writeln!(ang, "{c0},{},{p0},{},{}", c0 + dc, p0 + dp, stats.angle_counts[i * ANGLE_BINS + j]).unwrap();
        }
    }
    write(&dir.join("angles.csv"), &ang)?;

    println!(
        "{} paths, {} emissions; p0 vs master: {}/{} outside 3 sigma; flux z = {:.2}; output in {}",
        stats.n_paths,
        stats.emission_count(),
        vs_master.n_outside,
        stats.grid.len(),
        flux.z_score(expected),
        dir.display()
    );
    Ok(true)
}

fn selftest(only: &[u32]) -> Result<bool, CliError> {
    let mut all = true;
    for (k, run) in acceptance::CRITERIA.iter().enumerate() {
        if !only.is_empty() && !only.contains(&(k as u32 + 1)) {
            continue;
        }
        let r = run();
        println!("{}", r.line());
        all &= r.pass;
    }
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_and_help() {
        assert_eq!(dispatch(["dirac-ibc"]), EXIT_USAGE);
        assert_eq!(dispatch(["dirac-ibc", "frobnicate"]), EXIT_USAGE);
        assert_eq!(dispatch(["dirac-ibc", "--help"]), EXIT_OK);
    }

    #[test]
    fn basis_rows_small() {
        let p = PhysParams::canonical(0.95, -0.5, 1).unwrap();
        for (_, r) in basis_rows(&p, 8) {
            assert!(r < 1e-12, "{r}");
        }
    }

    #[test]
    fn header_comment_lines() {
        let cfg = crate::config::parse_config("[params]\nq = 0.96\n[run]\nseed = 3\n").unwrap();
        let h = Header::new("trace", Some(3), Some(&cfg));
        let text = h.csv_comment();
        assert!(text.lines().all(|l| l.starts_with('#')));
        assert!(text.contains("# seed: 3"));
        assert!(text.contains(VERSION));
    }
}
