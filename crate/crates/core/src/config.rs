//! Run configuration: a TOML document with `[params]`, `[model]`, `[track]`
//! and `[run]` tables. Unknown keys are errors.

use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::jump::{Configuration, ModelFamily};
use crate::params::{make_params, singularity_exponent, ParamsError, PhysParams};
use crate::track::{CoefficientTrack, TrackPoint};
use crate::wavefunction::ModelWavefunction;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid parameters: {0}")]
    Params(#[from] ParamsError),
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError::Invalid(msg.into()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub params: ParamsBlock,
    #[serde(default)]
    pub model: ModelBlock,
    #[serde(default)]
    pub track: TrackBlock,
    #[serde(default)]
    pub run: RunBlock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsBlock {
    pub q: f64,
    /// `[re, im]`
    #[serde(default = "unit_coupling")]
    pub g: [f64; 2],
    /// Defaults to `(1, 0, 0, 4B(1+q))`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<[f64; 4]>,
    #[serde(default = "half")]
    pub m_tilde: f64,
    #[serde(default = "one")]
    pub kappa_tilde: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelBlock {
    #[serde(default = "unit")]
    pub r_cut: f64,
    /// Absorption radius; defaults to `1e-8 r_cut`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_min: Option<f64>,
    /// Emission seed radius; defaults to `10 r_min`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_seed: Option<f64>,
    #[serde(default = "default_c_minus")]
    pub c_minus: [f64; 2],
    #[serde(default = "default_c_plus")]
    pub c_plus: [f64; 2],
    /// Rescale `c_minus, c_plus` jointly so the state has unit norm at the window start.
    #[serde(default)]
    pub normalize: bool,
    #[serde(default)]
    pub subleading: bool,
    /// Relative amplitudes `[re, im]` of the two correction modes when `subleading` is on.
    #[serde(default = "default_subleading")]
    pub subleading_amplitudes: [[f64; 2]; 2],
}

/// Exactly one source may be given; with none, a balanced constant track with `p0 = 0.5`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrackBlock {
    /// CSV with columns `t, c-re, c-im, c+re, c+im, psi0re, psi0im`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
    /// Inline rows in the same column order as `file`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<[f64; 7]>>,
    /// Constant coefficients from `[model]` with this vacuum amplitude.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi0: Option<[f64; 2]>,
    /// Constant coefficients from `[model]`, vacuum amplitude generated to balance the flux.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_span")]
    pub t_span: [f64; 2],
    #[serde(default = "default_paths")]
    pub n_paths: u64,
    #[serde(default = "default_grid")]
    pub grid_points: usize,
    #[serde(default = "default_probe")]
    pub r_probe: f64,
    #[serde(default = "one_usize")]
    pub sample_every: usize,
    #[serde(default)]
    pub frozen: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// `"vacuum"`, `"sample"` (draw from `|psi|^2`) or a position `[x, y, z]`.
    #[serde(default)]
    pub initial: InitialSpec,
    /// Also write every flight sample of `simulate` as CSV.
    #[serde(default)]
    pub dense_trace: bool,
    #[serde(default)]
    pub trace: TraceBlock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialSpec {
    Named(String),
    Position([f64; 3]),
}

impl Default for InitialSpec {
    fn default() -> Self {
        InitialSpec::Named("sample".into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceMode {
    #[default]
    Absorb,
    Emit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceBlock {
    #[serde(default)]
    pub mode: TraceMode,
    /// Starting radius for `absorb`; ignored for `emit`.
    #[serde(default = "default_r0")]
    pub r0: f64,
    #[serde(default = "default_theta")]
    pub theta0: f64,
    #[serde(default)]
    pub phi0: f64,
}

fn unit_coupling() -> [f64; 2] {
    [1.0, 0.0]
}
fn half() -> f64 {
    0.5
}
fn one() -> i32 {
    1
}
fn one_usize() -> usize {
    1
}
fn unit() -> f64 {
    1.0
}
fn default_c_minus() -> [f64; 2] {
    [1.0, 0.0]
}
fn default_c_plus() -> [f64; 2] {
    [0.0, 1.0]
}
fn default_subleading() -> [[f64; 2]; 2] {
    [[0.05, 0.0], [0.05, 0.0]]
}
fn default_tol() -> f64 {
    1e-9
}
fn default_span() -> [f64; 2] {
    [0.0, 1.0]
}
fn default_paths() -> u64 {
    1000
}
fn default_grid() -> usize {
    101
}
fn default_probe() -> f64 {
    1e-4
}
fn default_r0() -> f64 {
    0.2
}
fn default_theta() -> f64 {
    FRAC_PI_2
}

impl Default for ModelBlock {
    fn default() -> Self {
        ModelBlock {
            r_cut: 1.0,
            r_min: None,
            r_seed: None,
            c_minus: default_c_minus(),
            c_plus: default_c_plus(),
            normalize: false,
            subleading: false,
            subleading_amplitudes: default_subleading(),
        }
    }
}

impl Default for RunBlock {
    fn default() -> Self {
        RunBlock {
            seed: None,
            tol: default_tol(),
            t_span: default_span(),
            n_paths: default_paths(),
            grid_points: default_grid(),
            r_probe: default_probe(),
            sample_every: 1,
            frozen: false,
            output_dir: None,
            initial: InitialSpec::default(),
            dense_trace: false,
            trace: TraceBlock::default(),
        }
    }
}

impl Default for TraceBlock {
    fn default() -> Self {
        TraceBlock { mode: TraceMode::Absorb, r0: default_r0(), theta0: default_theta(), phi0: 0.0 }
    }
}

fn complex(v: [f64; 2]) -> Complex64 {
    Complex64::new(v[0], v[1])
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |s| s.chars().count()) + 1;
    (line, column)
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((0, 0), |s| line_column(text, s.start));
        ConfigError::Parse { line, column, message: e.message().trim().to_string() }
    })?;
    cfg.validate()?;
    Ok(cfg)
}

/// Reads `path` and resolves a relative track file against its directory.
pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::Io { path: path.display().to_string(), message: e.to_string() })?;
    let mut cfg = parse_config(&text)?;
    if let Some(file) = &cfg.track.file {
        if file.is_relative() {
            let base = path.parent().unwrap_or(Path::new("."));
            cfg.track.file = Some(base.join(file));
        }
    }
    if let Some(file) = &cfg.track.file {
        if !file.is_file() {
            return Err(ConfigError::Io { path: file.display().to_string(), message: "track file not found".into() });
        }
    }
    Ok(cfg)
}

impl RunConfig {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration is always representable")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.physical()?;
        let m = &self.model;
        if !(m.r_cut > 0.0 && m.r_cut.is_finite()) {
            return invalid(format!("model.r_cut = {} must be positive", m.r_cut));
        }
        let (r_min, r_seed) = (self.r_min(), self.r_seed());
        if !(r_min > 0.0 && r_min < 0.5 * m.r_cut) {
            return invalid(format!("model.r_min = {r_min} must lie in (0, r_cut/2)"));
        }
        if !(r_seed > r_min && r_seed < 0.5 * m.r_cut) {
            return invalid(format!("model.r_seed = {r_seed} must lie in (r_min, r_cut/2)"));
        }
        let sources = [
            self.track.file.is_some(),
            self.track.points.is_some(),
            self.track.psi0.is_some(),
            self.track.p0.is_some(),
        ];
        if sources.iter().filter(|&&s| s).count() > 1 {
            return invalid("track: give at most one of file, points, psi0, p0");
        }
        if let Some(p0) = self.track.p0 {
            if !(0.0..=1.0).contains(&p0) {
                return invalid(format!("track.p0 = {p0} must lie in [0, 1]"));
            }
        }
        if self.track.nodes.is_some_and(|n| n < 2) {
            return invalid("track.nodes must be at least 2");
        }
        let r = &self.run;
        if !(r.tol > 0.0 && r.tol <= 1e-3) {
            return invalid(format!("run.tol = {} must lie in (0, 1e-3]", r.tol));
        }
        let [a, b] = r.t_span;
        if !(a.is_finite() && b.is_finite() && b > a) {
            return invalid(format!("run.t_span = [{a}, {b}] must be increasing"));
        }
        if r.n_paths == 0 {
            return invalid("run.n_paths must be positive");
        }
        if r.grid_points < 2 {
            return invalid("run.grid_points must be at least 2");
        }
        if r.sample_every == 0 {
            return invalid("run.sample_every must be positive");
        }
        if !(r.r_probe > r_min && r.r_probe < 0.5 * m.r_cut) {
            return invalid(format!("run.r_probe = {} must lie in (r_min, r_cut/2)", r.r_probe));
        }
        match &r.initial {
            InitialSpec::Named(s) if s == "vacuum" || s == "sample" => {}
            InitialSpec::Named(s) => {
                return invalid(format!("run.initial = {s:?}: expected \"vacuum\", \"sample\" or [x, y, z]"))
            }
            InitialSpec::Position(x) => {
                Configuration::particle(*x).map_err(|e| ConfigError::Invalid(format!("run.initial: {e}")))?;
            }
        }
        let t = &r.trace;
        if !(t.r0 > r_min && t.r0 < 0.5 * m.r_cut) {
            return invalid(format!("run.trace.r0 = {} must lie in (r_min, r_cut/2)", t.r0));
        }
        if !(0.0..=std::f64::consts::PI).contains(&t.theta0) || !t.phi0.is_finite() {
            return invalid("run.trace: theta0 must lie in [0, pi] and phi0 must be finite");
        }
        Ok(())
    }

    pub fn physical(&self) -> Result<PhysParams, ConfigError> {
        let p = &self.params;
        let a = p.a.unwrap_or_else(|| {
            let b = singularity_exponent(p.q);
            [1.0, 0.0, 0.0, 4.0 * b * (1.0 + p.q)]
        });
        Ok(make_params(p.q, complex(p.g), a, p.m_tilde, p.kappa_tilde)?)
    }

    pub fn r_min(&self) -> f64 {
        self.model.r_min.unwrap_or(1e-8 * self.model.r_cut)
    }

    pub fn r_seed(&self) -> f64 {
        self.model.r_seed.unwrap_or(10.0 * self.r_min())
    }

    pub fn t_span(&self) -> (f64, f64) {
        (self.run.t_span[0], self.run.t_span[1])
    }

    /// `(c_minus, c_plus)` after the optional normalization.
    pub fn coefficients(&self) -> (Complex64, Complex64) {
        let (cm, cp) = (complex(self.model.c_minus), complex(self.model.c_plus));
        if !self.model.normalize {
            return (cm, cp);
        }
        let vacuum = match (self.track.psi0, self.track.p0) {
            (Some(psi0), _) => complex(psi0).norm_sqr(),
            (None, Some(p0)) => p0,
            _ if self.track.file.is_none() && self.track.points.is_none() => 0.5,
            _ => return (cm, cp),
        };
        let Ok(params) = self.physical() else { return (cm, cp) };
        let [a, b] = self.model.subleading_amplitudes;
        let Ok(mut model) = ModelWavefunction::new(params, cm, cp, self.model.r_cut) else { return (cm, cp) };
        if self.model.subleading {
            model = model.with_subleading(cm * complex(a), cp * complex(b));
        }
        let k = ((1.0 - vacuum).max(0.0) / model.norm_sqr()).sqrt();
        (cm * k, cp * k)
    }

    /// The configuration with every defaulted quantity written out.
    pub fn resolved(&self) -> RunConfig {
        let mut cfg = self.clone();
        cfg.model.r_min = Some(self.r_min());
        cfg.model.r_seed = Some(self.r_seed());
        if cfg.params.a.is_none() {
            cfg.params.a = self.physical().ok().map(|p| p.a());
        }
        let t = &cfg.track;
        if t.file.is_none() && t.points.is_none() && t.psi0.is_none() && t.p0.is_none() {
            cfg.track.p0 = Some(0.5);
        }
        if cfg.track.psi0.is_some() || cfg.track.p0.is_some() {
            cfg.track.nodes.get_or_insert(31);
        }
        cfg
    }

    /// Seed for a stochastic command; absent seeds are an error.
    pub fn seed(&self) -> Result<u64, ConfigError> {
        self.run.seed.ok_or_else(|| ConfigError::Invalid("run.seed is required for stochastic commands".into()))
    }

    fn subleading(&self) -> [Complex64; 2] {
        if !self.model.subleading {
            return [Complex64::new(0.0, 0.0); 2];
        }
        let (cm, cp) = self.coefficients();
        let [a, b] = self.model.subleading_amplitudes;
        [cm * complex(a), cp * complex(b)]
    }

    /// Wave function with the `[model]` coefficients.
    pub fn model(&self) -> Result<ModelWavefunction, ConfigError> {
        let (cm, cp) = self.coefficients();
        let [sm, sp] = self.subleading();
        ModelWavefunction::new(self.physical()?, cm, cp, self.model.r_cut)
            .map(|m| m.with_subleading(sm, sp))
            .map_err(|e| ConfigError::Invalid(format!("model: {e}")))
    }

    pub fn family(&self) -> ModelFamily {
        let mut f = ModelFamily::new(self.model.r_cut);
        f.r_min = self.r_min();
        f.r_seed = self.r_seed();
        f.tol = self.run.tol;
        f.frozen = self.run.frozen;
        f.sample_every = self.run.sample_every;
        if self.model.subleading {
            let [a, b] = self.model.subleading_amplitudes;
            f.subleading = [complex(a), complex(b)];
        }
        f
    }

    pub fn track(&self) -> Result<CoefficientTrack, ConfigError> {
        let params = self.physical()?;
        let (t0, t1) = self.t_span();
        let (cm, cp) = self.coefficients();
        let nodes = self.track.nodes.unwrap_or(31);
        let bad = |e: crate::track::TrackError| ConfigError::Invalid(format!("track: {e}"));
        if let Some(file) = &self.track.file {
            let text = std::fs::read_to_string(file)
                .map_err(|e| ConfigError::Io { path: file.display().to_string(), message: e.to_string() })?;
            return CoefficientTrack::from_csv(params, &text).map_err(bad);
        }
        if let Some(rows) = &self.track.points {
            let pts = rows
                .iter()
                .map(|r| TrackPoint {
                    t: r[0],
                    c_minus: Complex64::new(r[1], r[2]),
                    c_plus: Complex64::new(r[3], r[4]),
                    psi0: Complex64::new(r[5], r[6]),
                })
                .collect();
            return CoefficientTrack::new(params, pts).map_err(bad);
        }
        if let Some(psi0) = self.track.psi0 {
            return CoefficientTrack::constant(params, cm, cp, complex(psi0), t0, t1).map_err(bad);
        }
        let p0 = self.track.p0.unwrap_or(0.5);
        CoefficientTrack::balanced_constant(params, cm, cp, p0, t0, t1, nodes).map_err(bad)
    }

    /// Initial configuration for `simulate`; `"sample"` draws from `|psi|^2` at the window start.
    pub fn initial<R: rand::Rng + ?Sized>(
        &self,
        track: &CoefficientTrack,
        rng: &mut R,
    ) -> Result<Configuration, ConfigError> {
        match &self.run.initial {
            InitialSpec::Position(x) => Ok(Configuration::Particle(*x)),
            InitialSpec::Named(s) if s == "vacuum" => Ok(Configuration::Vacuum),
            _ => {
                let t0 = self.run.t_span[0];
                let model = self.family().model(track, t0).map_err(|e| ConfigError::Invalid(e.to_string()))?;
                Ok(crate::ensemble::sample_initial(&model, track.vacuum_probability(t0), rng))
            }
        }
    }
}
