//! Parses a run configuration and prints it with every default filled in.

use dirac_ibc::config::parse_config;

const TEXT: &str = r#"
[params]
q = -0.95
kappa_tilde = -1

[model]
c_minus = [0.8, 0.1]
c_plus = [0.0, 0.5]
normalize = true

[run]
seed = 17
t_span = [0.0, 2.0]

[run.trace]
mode = "emit"
theta0 = 0.9
"#;

fn main() {
    let cfg = parse_config(TEXT).unwrap();
    let model = cfg.model().unwrap();
    println!("one-particle norm {:.6}", model.norm_sqr());
    print!("{}", cfg.resolved().to_toml());
    match parse_config("[params]\nq = 0.96\n[run]\ntol = 1e-9\ntol = 1e-8\n") {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!(),
    }
}
