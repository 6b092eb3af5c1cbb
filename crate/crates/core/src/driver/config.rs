use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use crate::bench::{Benchmark, BenchmarkSpec};
use crate::error::{Error, Result};
use crate::evolve::ConvectionScheme;
use crate::filter::{FilterConfig, FilterKind};
use crate::relax::RelaxParams;
use crate::thermo::Constants;

const KEYS: &[&str] = &[
    "benchmark",
    "h",
    "dt",
    "t_final",
    "filter.kind",
    "filter.alpha",
    "filter.deconv_alpha",
    "relax.chi",
    "relax.xi",
    "solver.tol",
    "convection_scheme",
    "snapshot_times",
    "diagnostic_stride",
    "gravity",
    "R",
    "cv",
];

const REQUIRED: &[&str] = &["benchmark", "h", "filter.kind", "filter.alpha"];

/// Resolved run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub benchmark: Benchmark,
    pub h: f64,
    pub dt: f64,
    pub t_final: f64,
    pub filter: FilterConfig<f64>,
    pub relax: RelaxParams<f64>,
    pub solver_tol: f64,
    pub convection_scheme: ConvectionScheme,
    pub snapshot_times: Vec<f64>,
    pub diagnostic_stride: usize,
    pub constants: Constants<f64>,
    pub output_dir: Option<PathBuf>,
}

impl RunConfig {
    /// Configuration with every optional key at its default.
    pub fn new(benchmark: Benchmark, h: f64, kind: FilterKind, alpha: f64) -> Result<Self> {
        let spec = BenchmarkSpec::<f64>::of(benchmark);
        let cfg = Self {
            benchmark,
            h,
            dt: 0.1,
            t_final: spec.t_final,
            filter: FilterConfig::new(kind, alpha, default_deconv_alpha(alpha, h))?,
            relax: RelaxParams::default(),
            solver_tol: 1e-8,
            convection_scheme: ConvectionScheme::default(),
            snapshot_times: default_snapshots(benchmark, spec.t_final),
            diagnostic_stride: 10,
            constants: Constants::default(),
            output_dir: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn spec(&self) -> BenchmarkSpec<f64> {
        BenchmarkSpec { t_final: self.t_final, ..BenchmarkSpec::of(self.benchmark) }
    }

    /// Number of time steps to reach `t_final`.
    pub fn n_steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }

    /// Step index at which `t` is reached.
    pub fn step_of(&self, t: f64) -> usize {
        (t / self.dt).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |key: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(key, format!("must be positive, got {v}")))
            }
        };
        positive("h", self.h)?;
        positive("dt", self.dt)?;
        positive("t_final", self.t_final)?;
        positive("solver.tol", self.solver_tol)?;
        if !on_step_grid(self.t_final, self.dt) {
            return Err(Error::config(
                "t_final",
                format!("t_final = {} is not a whole number of time steps of {}", self.t_final, self.dt),
            ));
        }
        for &t in &self.snapshot_times {
            if !(0.0..=self.t_final * (1.0 + 1e-12)).contains(&t) || !on_step_grid(t, self.dt) {
                return Err(Error::config(
                    "snapshot_times",
                    format!("snapshot time {t} is not a time step in [0, {}]", self.t_final),
                ));
            }
        }
        if self.diagnostic_stride == 0 {
            return Err(Error::config("diagnostic_stride", "must be at least 1"));
        }
        self.filter.validate()?;
        RelaxParams::new(self.relax.chi, self.relax.xi)?;
        Constants::new(self.constants.r, self.constants.cv, self.constants.g, self.constants.p0)?;
        self.spec().build_grid(self.h)?;
        Ok(())
    }

    /// The resolved configuration in the input format, defaults included.
    pub fn to_config_text(&self) -> String {
        let mut s = String::new();
        let times: Vec<String> = self.snapshot_times.iter().map(|t| t.to_string()).collect();
        let _ = writeln!(s, "benchmark = {}", self.benchmark);
        let _ = writeln!(s, "h = {}", self.h);
        let _ = writeln!(s, "dt = {}", self.dt);
        let _ = writeln!(s, "t_final = {}", self.t_final);
        let _ = writeln!(s, "filter.kind = {}", self.filter.kind);
        let _ = writeln!(s, "filter.alpha = {}", self.filter.alpha);
        let _ = writeln!(s, "filter.deconv_alpha = {}", self.filter.deconv_alpha);
        let _ = writeln!(s, "relax.chi = {}", self.relax.chi);
        let _ = writeln!(s, "relax.xi = {}", self.relax.xi);
        let _ = writeln!(s, "solver.tol = {}", self.solver_tol);
        let _ = writeln!(s, "convection_scheme = {}", self.convection_scheme);
        let _ = writeln!(s, "snapshot_times = {}", times.join(", "));
        let _ = writeln!(s, "diagnostic_stride = {}", self.diagnostic_stride);
        let _ = writeln!(s, "gravity = {}", self.constants.g);
        let _ = writeln!(s, "R = {}", self.constants.r);
        let _ = writeln!(s, "cv = {}", self.constants.cv);
        s
    }
}

fn on_step_grid(t: f64, dt: f64) -> bool {
    let n = (t / dt).round();
    (t - n * dt).abs() <= 1e-9 * t.abs().max(dt)
}

fn default_deconv_alpha(alpha: f64, h: f64) -> f64 {
    if alpha > 0.0 {
        alpha
    } else {
        h
    }
}

fn default_snapshots(benchmark: Benchmark, t_final: f64) -> Vec<f64> {
    let frames: &[f64] = match benchmark {
        Benchmark::RisingBubble => &[1020.0],
        Benchmark::DensityCurrent => &[300.0, 600.0, 750.0, 900.0],
    };
    frames.iter().copied().filter(|&t| t <= t_final).collect()
}

struct Entry {
    value: String,
    line: usize,
}

fn at_line(err: Error, line: usize) -> Error {
    match err {
        Error::Config { key, message, .. } => Error::Config { key, line: Some(line), message },
        other => other,
    }
}

fn number(key: &str, e: &Entry) -> Result<f64> {
    e.value
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| at_line(Error::config(key, format!("`{}` is not a number", e.value)), e.line))
}

/// Parses the `key = value` configuration format.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut entries: HashMap<&str, Entry> = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| Error::Config {
            key: None,
            line: Some(line),
            message: format!("expected `key = value`, found `{content}`"),
        })?;
        let key = key.trim();
        let Some(&known) = KEYS.iter().find(|&&k| k == key) else {
            return Err(at_line(Error::config(key, "unknown key"), line));
        };
        if entries.contains_key(known) {
            return Err(at_line(Error::config(key, "key given twice"), line));
        }
        entries.insert(known, Entry { value: value.trim().to_string(), line });
    }
    for key in REQUIRED {
        if !entries.contains_key(key) {
            return Err(Error::config(*key, "required key is missing"));
        }
    }
    let get = |key: &str| entries.get(key);
    let num = |key: &str| get(key).map(|e| number(key, e)).transpose();
    let with_line = |key: &str, e: Error| at_line(e, entries[key].line);

    let benchmark: Benchmark = entries["benchmark"].value.parse().map_err(|e| with_line("benchmark", e))?;
    let h = num("h")?.unwrap_or_default();
    let kind: FilterKind = entries["filter.kind"].value.parse().map_err(|e| with_line("filter.kind", e))?;
    let alpha = num("filter.alpha")?.unwrap_or_default();
    let mut cfg = RunConfig {
        benchmark,
        h,
        dt: 0.1,
        t_final: BenchmarkSpec::<f64>::of(benchmark).t_final,
        filter: FilterConfig { kind, alpha, eps_grad: 1e-12, deconv_alpha: default_deconv_alpha(alpha, h) },
        relax: RelaxParams::default(),
        solver_tol: 1e-8,
        convection_scheme: ConvectionScheme::default(),
        snapshot_times: Vec::new(),
        diagnostic_stride: 10,
        constants: Constants::default(),
        output_dir: None,
    };
    if let Some(v) = num("dt")? {
        cfg.dt = v;
    }
    if let Some(v) = num("t_final")? {
        cfg.t_final = v;
    }
    if let Some(v) = num("filter.deconv_alpha")? {
        cfg.filter.deconv_alpha = v;
    }
    if let Some(v) = num("relax.chi")? {
        cfg.relax.chi = v;
    }
    if let Some(v) = num("relax.xi")? {
        cfg.relax.xi = v;
    }
    if let Some(v) = num("solver.tol")? {
        cfg.solver_tol = v;
    }
    if let Some(e) = get("convection_scheme") {
        cfg.convection_scheme = e.value.parse().map_err(|err| with_line("convection_scheme", err))?;
    }
    if let Some(e) = get("diagnostic_stride") {
        cfg.diagnostic_stride = e.value.parse::<usize>().map_err(|_| {
            at_line(Error::config("diagnostic_stride", format!("`{}` is not a step count", e.value)), e.line)
        })?;
    }
    if let Some(v) = num("gravity")? {
        cfg.constants.g = v;
    }
    if let Some(v) = num("R")? {
        cfg.constants.r = v;
    }
    if let Some(v) = num("cv")? {
        cfg.constants.cv = v;
    }
    cfg.constants.cp = cfg.constants.r + cfg.constants.cv;
    cfg.snapshot_times = match get("snapshot_times") {
        Some(e) if e.value.is_empty() => Vec::new(),
        Some(e) => e
            .value
            .split(',')
            .map(|t| {
                let t = t.trim();
                t.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| {
                    at_line(Error::config("snapshot_times", format!("`{t}` is not a time")), e.line)
                })
            })
            .collect::<Result<_>>()?,
        None => default_snapshots(benchmark, cfg.t_final),
    };

    cfg.validate().map_err(|e| match &e {
        Error::Config { key: Some(k), line: None, .. } if entries.contains_key(k.as_str()) => {
            let line = entries[k.as_str()].line;
            at_line(e, line)
        }
        _ => e,
    })?;
    Ok(cfg)
}
