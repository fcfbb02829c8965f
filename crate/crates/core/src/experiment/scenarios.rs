//! Named experiments. Each ships at desk scale under its plain name and at
//! full resolution under `<name>-full`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::kinetic::Peak;
use crate::macro_ks::DriftFlux;
use crate::solver1d::{DtPolicy, SchemeOrder, TransportScheme};

use super::config::{ExperimentConfig, ModelKind};

pub struct Scenario {
    pub name: String,
    pub summary: &'static str,
    pub config: ExperimentConfig,
}

fn base(name: &str, model: ModelKind) -> ExperimentConfig {
    ExperimentConfig {
        name: name.to_string(),
        model,
        ..ExperimentConfig::default()
    }
}

fn two_peaks(left: f64, right: f64) -> Vec<Peak> {
    vec![Peak::new(right, 0.3, 80.0), Peak::new(left, -0.3, 80.0)]
}

fn five_peaks() -> Vec<Peak> {
    let w = [0.5, 1.2, 0.8, 0.6, 1.0];
    let c = [0.4, -0.2, -0.6, 0.0, 0.2];
    w.iter().zip(c).map(|(&w, c)| Peak::new(w, c, 160.0)).collect()
}

fn radial(mass: f64) -> ExperimentConfig {
    let mut c = base(&format!("radial-2d-m{mass}"), ModelKind::LocalRadial);
    c.eps = 1.0;
    c.mass = mass;
    c.t_max = 2.0;
    c.r_max = 2.0;
    c.n_r = 250;
    c.record_every = 50;
    c
}

/// Desk-scale and full-resolution variants.
fn catalog() -> Vec<(Scenario, ExperimentConfig)> {
    let mut out = Vec::new();
    let mut push = |summary: &'static str, desk: ExperimentConfig, full: ExperimentConfig| {
        out.push((
            Scenario {
                name: desk.name.clone(),
                summary,
                config: desk,
            },
            full,
        ))
    };

    let mut c = base("conv-sub-pi", ModelKind::Nonlocal1D);
    c.mass = PI;
    c.t_max = 0.025;
    c.n_x = 100;
    c.transport = Some(TransportScheme::LaxWendroff);
    c.dt_policy = DtPolicy::Parabolic;
    c.record_every = 100;
    let full = c.clone();
    push("nonlocal 1D, M = π: second-order convergence study (use `converge`)", c, full);

    let mut c = base("conv-super-4pi", ModelKind::Nonlocal1D);
    c.mass = 4.0 * PI;
    c.t_max = 0.0025;
    c.n_x = 100;
    c.transport = Some(TransportScheme::LaxWendroff);
    c.dt_policy = DtPolicy::Parabolic;
    c.record_every = 100;
    let full = c.clone();
    push("nonlocal 1D, M = 4π before the Keller-Segel blow-up (use `converge`)", c, full);

    let mut c = base("ks1d-4pi", ModelKind::Ks1D);
    c.mass = 4.0 * PI;
    c.t_max = 0.006;
    c.n_x = 1000;
    c.ks_drift = DriftFlux::Limited;
    c.record_every = 20;
    let mut full = c.clone();
    full.n_x = 4000;
    push("Keller-Segel 1D, M = 4π: finite-time blow-up", c, full);

    let mut c = base("kin-vs-ks-4pi", ModelKind::Nonlocal1D);
    c.mass = 4.0 * PI;
    c.t_max = 0.1;
    c.n_x = 1000;
    c.record_every = 50;
    c.profile_times = vec![0.002, 0.01, 0.1];
    c.stations = vec![-1.0, -0.5, 0.0, 0.5, 1.0];
    let mut full = c.clone();
    full.n_x = 4000;
    push("nonlocal 1D, M = 4π, ε = 0.1: bounded kinetic density and its stationary profile", c, full);

    let mut c = base("eps-conv-4pi", ModelKind::Nonlocal1D);
    c.mass = 4.0 * PI;
    c.t_max = 0.002;
    c.n_x = 1000;
    let mut full = c.clone();
    full.n_x = 4000;
    push("ε-convergence at M = 4π, t = 0.002 (use `eps-sweep`)", c, full);

    let mut c = base("eps-conv-pi", ModelKind::Nonlocal1D);
    c.mass = PI;
    c.t_max = 0.01;
    c.n_x = 1000;
    let mut full = c.clone();
    full.n_x = 4000;
    push("ε-convergence at M = π, t = 0.01 (use `eps-sweep`)", c, full);

    let mut c = base("two-peaks-sym-3pi", ModelKind::Nonlocal1D);
    c.mass = 3.0 * PI;
    c.eps = 0.1;
    c.peaks = two_peaks(0.5, 0.5);
    c.n_x = 400;
    c.t_max = 0.6;
    c.record_every = 10;
    let full = c.clone();
    push("Case I: two subcritical peaks diffuse, merge, then concentrate", c, full);

    let mut c = base("two-peaks-sym-5pi", ModelKind::Nonlocal1D);
    c.mass = 5.0 * PI;
    c.eps = 0.05;
    c.peaks = two_peaks(0.5, 0.5);
    c.n_x = 400;
    c.t_max = 0.4;
    c.record_every = 10;
    let full = c.clone();
    push("Case II: two supercritical peaks, metastable pair, then merge", c, full);

    let mut c = base("two-peaks-asym-5pi", ModelKind::Nonlocal1D);
    c.mass = 5.0 * PI;
    c.eps = 0.05;
    c.peaks = two_peaks(2.8, 2.2);
    c.n_x = 400;
    c.t_max = 0.4;
    c.record_every = 10;
    let full = c.clone();
    push("Case III: asymmetric pair concentrating near the centre of mass", c, full);

    let mut c = base("five-peaks-11pi", ModelKind::Nonlocal1D);
    c.mass = 11.0 * PI;
    c.eps = 0.05;
    c.peaks = five_peaks();
    c.n_x = 400;
    c.t_max = 0.3;
    c.record_every = 10;
    let full = c.clone();
    push("Case IV: five peaks merging into one", c, full);

    let mut c = base("local-blowup-5pi", ModelKind::Local1D);
    c.mass = 5.0 * PI;
    c.eps = 0.4;
    c.order = SchemeOrder::First;
    c.dt_policy = DtPolicy::EpsDxOverV;
    c.n_x = 1000;
    c.t_max = 0.2;
    c.adaptive = true;
    c.max_levels = 4;
    c.record_every = 20;
    let mut full = c.clone();
    full.max_levels = 8;
    push("local 1D, M = 5π, ε = 0.4: adaptive run towards the blow-up", c, full);

    let mut c = base("local-sub-selfsim", ModelKind::Local1D);
    c.mass = PI;
    c.eps = 0.2;
    c.x_min = -10.0;
    c.x_max = 10.0;
    c.n_x = 1000;
    c.t_max = 10.0;
    c.selfsim = true;
    c.selfsim_every = 200;
    c.record_every = 200;
    let mut full = c.clone();
    full.n_x = 2000;
    push("local 1D, M = π on [-10, 10]: self-similar decay", c, full);

    for m in [1.0, 9.0, 17.0, 29.0, 33.0] {
        let c = radial(m);
        let mut full = c.clone();
        full.n_r = 1000;
        full.n_omega = 32;
        full.n_theta = 32;
        push("local radial 2D, ε = 1: bounded for small M, concentrating for large M", c, full);
    }

    let mut c = base("ks2d-radial-m20", ModelKind::KsRadial);
    c.mass = 20.0;
    c.t_max = 0.5;
    c.r_max = 2.0;
    c.n_r = 250;
    c.ks_drift = DriftFlux::Limited;
    c.record_every = 50;
    let mut full = c.clone();
    full.n_r = 1000;
    push("radial Keller-Segel above its critical mass 16", c, full);

    out
}

/// `(name, summary)` for every scenario, desk variants first.
pub fn scenario_names() -> Vec<(String, &'static str)> {
    let cat = catalog();
    let mut names: Vec<(String, &'static str)> = cat.iter().map(|(s, _)| (s.name.clone(), s.summary)).collect();
    names.extend(cat.iter().map(|(s, _)| (format!("{}-full", s.name), s.summary)));
    names
}

pub fn scenario(name: &str) -> Result<ExperimentConfig> {
    let (stem, full) = match name.strip_suffix("-full") {
        Some(s) => (s, true),
        None => (name, false),
    };
    catalog()
        .into_iter()
        .find(|(s, _)| s.name == stem)
        .map(|(s, p)| {
            if full {
                ExperimentConfig {
                    name: name.to_string(),
                    ..p
                }
            } else {
                s.config
            }
        })
        .ok_or_else(|| Error::Config(format!("unknown scenario `{name}`")))
}
