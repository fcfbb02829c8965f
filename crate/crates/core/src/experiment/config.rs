//! Run parameters and their flat `key = value` text form.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::chemo::ShiftInterpolation;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::kinetic::{Peak, VelocityRule};
use crate::macro_ks::DriftFlux;
use crate::radial::RadialFlux;
use crate::solver1d::{DtPolicy, Model1D, SchemeConfig, SchemeOrder, TransportScheme};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    Nonlocal1D,
    Local1D,
    LocalRadial,
    Ks1D,
    KsRadial,
}

impl ModelKind {
    pub fn is_1d(self) -> bool {
        matches!(self, ModelKind::Nonlocal1D | ModelKind::Local1D | ModelKind::Ks1D)
    }

    pub fn is_kinetic(self) -> bool {
        matches!(self, ModelKind::Nonlocal1D | ModelKind::Local1D | ModelKind::LocalRadial)
    }

    fn name(self) -> &'static str {
        match self {
            ModelKind::Nonlocal1D => "nonlocal1d",
            ModelKind::Local1D => "local1d",
            ModelKind::LocalRadial => "local2d_radial",
            ModelKind::Ks1D => "ks1d",
            ModelKind::KsRadial => "ks2d_radial",
        }
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "nonlocal1d" => ModelKind::Nonlocal1D,
            "local1d" => ModelKind::Local1D,
            "local2d_radial" => ModelKind::LocalRadial,
            "ks1d" => ModelKind::Ks1D,
            "ks2d_radial" => ModelKind::KsRadial,
            _ => return Err(Error::Config(format!("unknown model `{s}`"))),
        })
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Every parameter of a run. Fields that do not apply to the chosen model
/// are ignored.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub model: ModelKind,
    pub eps: f64,
    pub mass: f64,
    pub t_max: f64,

    pub x_min: f64,
    pub x_max: f64,
    pub n_x: usize,
    pub n_half: usize,
    pub velocity_rule: VelocityRule,
    pub v_max: f64,
    pub peaks: Vec<Peak>,

    pub r_max: f64,
    pub n_r: usize,
    pub n_omega: usize,
    pub n_theta: usize,
    /// `a` in `ρ̃^I = C r exp(-a r²)`.
    pub radial_width: f64,
    pub radial_flux: RadialFlux,

    pub order: SchemeOrder,
    /// Overrides the transport scheme implied by `order`.
    pub transport: Option<TransportScheme>,
    /// Overrides the shift interpolation implied by `order`.
    pub interpolation: Option<ShiftInterpolation>,
    pub dt_policy: DtPolicy,
    /// Fraction of the explicit limit for the radial and Keller-Segel solvers.
    pub cfl_safety: f64,
    pub ks_drift: DriftFlux,

    pub adaptive: bool,
    pub max_levels: usize,

    /// A timeseries row every this many steps (the last step is always kept).
    pub record_every: usize,
    pub profile_times: Vec<f64>,
    /// Rescaled positions `x/ε` at which `F̃` is reported after the run.
    pub stations: Vec<f64>,
    /// Store density snapshots for the self-similar analysis.
    pub selfsim: bool,
    pub selfsim_every: usize,
    pub exec: Exec,
    pub output: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            name: "custom".into(),
            model: ModelKind::Nonlocal1D,
            eps: 0.1,
            mass: std::f64::consts::PI,
            t_max: 0.025,
            x_min: -1.0,
            x_max: 1.0,
            n_x: 400,
            n_half: 32,
            velocity_rule: VelocityRule::GaussLegendre,
            v_max: 1.0,
            peaks: vec![Peak::new(1.0, 0.0, 80.0)],
            r_max: 2.0,
            n_r: 250,
            n_omega: 16,
            n_theta: 16,
            radial_width: 15.0,
            radial_flux: RadialFlux::default(),
            order: SchemeOrder::Second,
            transport: None,
            interpolation: None,
            dt_policy: DtPolicy::EpsOrParabolic,
            cfl_safety: 0.9,
            ks_drift: DriftFlux::Average,
            adaptive: false,
            max_levels: 4,
            record_every: 1,
            profile_times: Vec::new(),
            stations: Vec::new(),
            selfsim: false,
            selfsim_every: 50,
            exec: Exec::default(),
            output: None,
        }
    }
}

fn cfg_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| cfg_err(format!("`{key}`: cannot parse `{value}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(cfg_err(format!("`{key}`: expected a boolean, got `{value}`"))),
    }
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_num(key, s))
        .collect()
}

fn join(values: &[f64]) -> String {
    values.iter().map(f64::to_string).collect::<Vec<_>>().join(", ")
}

/// `eps_or_parabolic`, `parabolic`, `eps_dx`, `half_eps_dx`, `cfl:<c>`, `fixed:<dt>`.
pub fn parse_dt_policy(value: &str) -> Result<DtPolicy> {
    let (head, arg) = match value.split_once(':') {
        Some((h, a)) => (h.trim(), Some(a.trim())),
        None => (value, None),
    };
    let policy = match (head, arg) {
        ("eps_or_parabolic", None) => DtPolicy::EpsOrParabolic,
        ("parabolic", None) => DtPolicy::Parabolic,
        ("eps_dx", None) => DtPolicy::EpsDxOverV,
        ("half_eps_dx", None) => DtPolicy::HalfEpsDxOverV,
        ("cfl", Some(a)) => DtPolicy::KineticCfl(parse_num("dt_policy", a)?),
        ("fixed", Some(a)) => DtPolicy::Fixed(parse_num("dt_policy", a)?),
        _ => return Err(cfg_err(format!("unknown dt_policy `{value}`"))),
    };
    Ok(policy)
}

fn dt_policy_str(p: DtPolicy) -> String {
    match p {
        DtPolicy::EpsOrParabolic => "eps_or_parabolic".into(),
        DtPolicy::Parabolic => "parabolic".into(),
        DtPolicy::EpsDxOverV => "eps_dx".into(),
        DtPolicy::HalfEpsDxOverV => "half_eps_dx".into(),
        DtPolicy::KineticCfl(c) => format!("cfl:{c}"),
        DtPolicy::Fixed(dt) => format!("fixed:{dt}"),
    }
}

impl ExperimentConfig {
    /// Reads `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut config = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| cfg_err(format!("line {}: expected `key = value`", lineno + 1)))?;
            config
                .set(key.trim(), value.trim())
                .map_err(|e| cfg_err(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    /// Applies one `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "name" => self.name = value.to_string(),
            "model" => self.model = value.parse()?,
            "eps" => self.eps = parse_num(key, value)?,
            "mass" => self.mass = parse_num(key, value)?,
            "t_max" => self.t_max = parse_num(key, value)?,
            "x_min" => self.x_min = parse_num(key, value)?,
            "x_max" => self.x_max = parse_num(key, value)?,
            "n_x" => self.n_x = parse_num(key, value)?,
            "n_half" => self.n_half = parse_num(key, value)?,
            "velocity_rule" => {
                self.velocity_rule = match value {
                    "gauss_legendre" => VelocityRule::GaussLegendre,
                    "midpoint" => VelocityRule::Midpoint,
                    _ => return Err(cfg_err(format!("unknown velocity_rule `{value}`"))),
                }
            }
            "v_max" => self.v_max = parse_num(key, value)?,
            "peaks" => {
                self.peaks = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(Peak::from_str)
                    .collect::<Result<_>>()?
            }
            "r_max" => self.r_max = parse_num(key, value)?,
            "n_r" => self.n_r = parse_num(key, value)?,
            "n_omega" => self.n_omega = parse_num(key, value)?,
            "n_theta" => self.n_theta = parse_num(key, value)?,
            "radial_width" => self.radial_width = parse_num(key, value)?,
            "radial_flux" => {
                self.radial_flux = match value {
                    "area_weighted" => RadialFlux::AreaWeighted,
                    "reflect" => RadialFlux::Reflect,
                    _ => return Err(cfg_err(format!("unknown radial_flux `{value}`"))),
                }
            }
            "order" => {
                self.order = match value {
                    "1" => SchemeOrder::First,
                    "2" => SchemeOrder::Second,
                    _ => return Err(cfg_err(format!("order must be 1 or 2, got `{value}`"))),
                }
            }
            "transport" => {
                self.transport = Some(match value {
                    "upwind" => TransportScheme::Upwind,
                    "lax_wendroff" => TransportScheme::LaxWendroff,
                    "tvd" => TransportScheme::Tvd,
                    _ => return Err(cfg_err(format!("unknown transport `{value}`"))),
                })
            }
            "interpolation" => {
                self.interpolation = Some(match value {
                    "linear" => ShiftInterpolation::Linear,
                    "fourier" => ShiftInterpolation::Fourier,
                    _ => return Err(cfg_err(format!("unknown interpolation `{value}`"))),
                })
            }
            "dt_policy" => self.dt_policy = parse_dt_policy(value)?,
            "cfl_safety" => self.cfl_safety = parse_num(key, value)?,
            "ks_drift" => {
                self.ks_drift = match value {
                    "average" => DriftFlux::Average,
                    "upwind" => DriftFlux::Upwind,
                    "limited" => DriftFlux::Limited,
                    _ => return Err(cfg_err(format!("unknown ks_drift `{value}`"))),
                }
            }
            "adaptive" => self.adaptive = parse_bool(key, value)?,
            "max_levels" => self.max_levels = parse_num(key, value)?,
            "record_every" => self.record_every = parse_num(key, value)?,
            "profile_times" => self.profile_times = parse_list(key, value)?,
            "stations" => self.stations = parse_list(key, value)?,
            "selfsim" => self.selfsim = parse_bool(key, value)?,
            "selfsim_every" => self.selfsim_every = parse_num(key, value)?,
            "exec" => {
                self.exec = match value {
                    "sequential" => Exec::Sequential,
                    "parallel" => Exec::Parallel,
                    _ => return Err(cfg_err(format!("unknown exec `{value}`"))),
                }
            }
            "output" => self.output = Some(PathBuf::from(value)),
            _ => return Err(cfg_err(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Applies `key=value` overrides such as those given on the command line.
    pub fn apply_overrides<S: AsRef<str>>(&mut self, overrides: &[S]) -> Result<()> {
        for o in overrides {
            let o = o.as_ref();
            let (k, v) = o
                .split_once('=')
                .ok_or_else(|| cfg_err(format!("override `{o}` is not key=value")))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(cfg_err(format!("{name} must be positive, got {v}")))
            }
        };
        positive("mass", self.mass)?;
        positive("t_max", self.t_max)?;
        positive("v_max", self.v_max)?;
        positive("cfl_safety", self.cfl_safety)?;
        if self.model.is_kinetic() {
            positive("eps", self.eps)?;
        }
        if self.record_every == 0 || self.selfsim_every == 0 {
            return Err(cfg_err("record_every and selfsim_every must be at least 1"));
        }
        if let DtPolicy::Fixed(v) | DtPolicy::KineticCfl(v) = self.dt_policy {
            positive("dt_policy parameter", v)?;
        }
        if self.model.is_1d() {
            if !(self.x_max > self.x_min) {
                return Err(cfg_err(format!("need x_min < x_max, got [{}, {}]", self.x_min, self.x_max)));
            }
            if self.n_x < 4 {
                return Err(cfg_err(format!("n_x must be at least 4, got {}", self.n_x)));
            }
            if self.peaks.is_empty() {
                return Err(cfg_err("peaks must not be empty"));
            }
            if self.model != ModelKind::Ks1D && self.n_half == 0 {
                return Err(cfg_err("n_half must be positive"));
            }
        } else {
            positive("r_max", self.r_max)?;
            positive("radial_width", self.radial_width)?;
            if self.n_r < 2 {
                return Err(cfg_err(format!("n_r must be at least 2, got {}", self.n_r)));
            }
            if self.model == ModelKind::LocalRadial && (self.n_omega == 0 || self.n_theta < 2 || self.n_theta % 2 != 0) {
                return Err(cfg_err("need n_omega ≥ 1 and an even n_theta ≥ 2"));
            }
        }
        if self.adaptive && !matches!(self.model, ModelKind::Nonlocal1D | ModelKind::Local1D) {
            return Err(cfg_err("adaptive refinement applies to the 1D kinetic models only"));
        }
        if self.selfsim && (self.adaptive || !self.model.is_1d()) {
            return Err(cfg_err("selfsim needs a fixed 1D grid"));
        }
        if self.profile_times.iter().any(|t| !(*t >= 0.0)) {
            return Err(cfg_err("profile_times must be non-negative"));
        }
        Ok(())
    }

    /// Scheme settings for the 1D kinetic solvers.
    pub fn scheme(&self) -> SchemeConfig {
        let model = if self.model == ModelKind::Local1D {
            Model1D::Local
        } else {
            Model1D::Nonlocal
        };
        let mut s = match self.order {
            SchemeOrder::First => SchemeConfig::first_order(model),
            SchemeOrder::Second => SchemeConfig::second_order(model),
        };
        if let Some(t) = self.transport {
            s.transport = t;
        }
        if let Some(i) = self.interpolation {
            s.interpolation = i;
        }
        s.dt_policy = self.dt_policy;
        s.exec = self.exec;
        s
    }

    /// The configuration as text accepted by [`ExperimentConfig::parse`].
    pub fn to_text(&self) -> String {
        let mut lines = vec![
            format!("name = {}", self.name),
            format!("model = {}", self.model),
            format!("eps = {}", self.eps),
            format!("mass = {}", self.mass),
            format!("t_max = {}", self.t_max),
        ];
        if self.model.is_1d() {
            lines.push(format!("x_min = {}", self.x_min));
            lines.push(format!("x_max = {}", self.x_max));
            lines.push(format!("n_x = {}", self.n_x));
            let peaks: Vec<String> = self.peaks.iter().map(Peak::to_string).collect();
            lines.push(format!("peaks = {}", peaks.join(", ")));
        } else {
            lines.push(format!("r_max = {}", self.r_max));
            lines.push(format!("n_r = {}", self.n_r));
            lines.push(format!("radial_width = {}", self.radial_width));
        }
        if self.model.is_kinetic() {
            lines.push(format!("v_max = {}", self.v_max));
        }
        match self.model {
            ModelKind::Nonlocal1D | ModelKind::Local1D => {
                lines.push(format!("n_half = {}", self.n_half));
                let rule = match self.velocity_rule {
                    VelocityRule::GaussLegendre => "gauss_legendre",
                    VelocityRule::Midpoint => "midpoint",
                };
                lines.push(format!("velocity_rule = {rule}"));
                lines.push(format!("order = {}", if self.order == SchemeOrder::First { 1 } else { 2 }));
                if let Some(t) = self.transport {
                    let t = match t {
                        TransportScheme::Upwind => "upwind",
                        TransportScheme::LaxWendroff => "lax_wendroff",
                        TransportScheme::Tvd => "tvd",
                    };
                    lines.push(format!("transport = {t}"));
                }
                if let Some(i) = self.interpolation {
                    let i = match i {
                        ShiftInterpolation::Linear => "linear",
                        ShiftInterpolation::Fourier => "fourier",
                    };
                    lines.push(format!("interpolation = {i}"));
                }
                lines.push(format!("dt_policy = {}", dt_policy_str(self.dt_policy)));
                lines.push(format!("adaptive = {}", self.adaptive));
                lines.push(format!("max_levels = {}", self.max_levels));
            }
            ModelKind::LocalRadial => {
                lines.push(format!("n_omega = {}", self.n_omega));
                lines.push(format!("n_theta = {}", self.n_theta));
                let f = match self.radial_flux {
                    RadialFlux::AreaWeighted => "area_weighted",
                    RadialFlux::Reflect => "reflect",
                };
                lines.push(format!("radial_flux = {f}"));
                lines.push(format!("cfl_safety = {}", self.cfl_safety));
            }
            ModelKind::Ks1D | ModelKind::KsRadial => {
                let d = match self.ks_drift {
                    DriftFlux::Average => "average",
                    DriftFlux::Upwind => "upwind",
                    DriftFlux::Limited => "limited",
                };
                lines.push(format!("ks_drift = {d}"));
                lines.push(format!("cfl_safety = {}", self.cfl_safety));
            }
        }
        lines.push(format!("record_every = {}", self.record_every));
        if !self.profile_times.is_empty() {
            lines.push(format!("profile_times = {}", join(&self.profile_times)));
        }
        if !self.stations.is_empty() {
            lines.push(format!("stations = {}", join(&self.stations)));
        }
        if self.selfsim {
            lines.push("selfsim = true".into());
            lines.push(format!("selfsim_every = {}", self.selfsim_every));
        }
        lines.join("\n") + "\n"
    }
}
