//! Time loop, per-run CSV streams and the multi-run drivers.

use crate::chemo::grad_s_radial;
use crate::error::{invalid, Error, Result};
use crate::kinetic::{
    init_peaks, init_radial, initial_density, initial_radial_density, mass_1d, PolarGrid2D, SpatialGrid1D,
    VelocityGrid1D,
};
use crate::macro_ks::{KSCoefficients, KsConfig, KsSolver1D, KsSolverRadial, MaxDensityHistory};
use crate::radial::{RadialConfig, RadialSolver};
use crate::solver1d::{DtPolicy, Solver1D};

use super::adaptive::{adapt_if_needed, AdaptDecision, AdaptiveController, RefinementEvent};
use super::analysis::{
    convergence_table, equilibrium_distance, fit_order, l1_distance, self_similar_profile, stationary_diagnostics,
    ConvergenceRow, FieldSnapshot, SelfSimilarSeries, StationaryProfile,
};
use super::config::{ExperimentConfig, ModelKind};
use super::output::{write_columns, CsvTable, OutputDir};

/// One row of `timeseries.csv`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub max_rho: f64,
    pub min_rho: f64,
    pub total_mass: f64,
    pub linf_grad_s: f64,
    pub current_n_x: usize,
    /// Step that led to this record (the planned step at `t = 0`).
    pub dt: f64,
}

impl DiagnosticsRecord {
    pub const HEADER: [&'static str; 7] = ["t", "max_rho", "min_rho", "mass", "linf_grad_s", "n_x", "dt"];

    fn row(&self) -> [f64; 7] {
        [
            self.t,
            self.max_rho,
            self.min_rho,
            self.total_mass,
            self.linf_grad_s,
            self.current_n_x as f64,
            self.dt,
        ]
    }
}

enum Kind {
    Kinetic(Box<Solver1D>),
    Radial(Box<RadialSolver>),
    Ks1D(Box<KsSolver1D>),
    KsRadial(Box<KsSolverRadial>),
}

/// Any of the five models behind one interface.
pub struct Simulation {
    kind: Kind,
    /// Overrides the solver's own step for the radial and Keller-Segel models.
    fixed_dt: Option<f64>,
}

fn spatial_grid(c: &ExperimentConfig) -> Result<SpatialGrid1D> {
    SpatialGrid1D::new(c.x_min, c.x_max, c.n_x)
}

fn velocity_grid(c: &ExperimentConfig) -> Result<VelocityGrid1D> {
    VelocityGrid1D::new(c.v_max, c.n_half.max(1), c.velocity_rule)
}

fn polar_grid(c: &ExperimentConfig) -> Result<PolarGrid2D> {
    PolarGrid2D::new(c.r_max, c.n_r, c.n_omega, c.n_theta, c.v_max)
}

impl Simulation {
    pub fn build(c: &ExperimentConfig) -> Result<Self> {
        let fixed_dt = match c.dt_policy {
            DtPolicy::Fixed(dt) => Some(dt),
            _ => None,
        };
        let ks_config = KsConfig {
            drift: c.ks_drift,
            safety: c.cfl_safety,
        };
        let kind = match c.model {
            ModelKind::Nonlocal1D | ModelKind::Local1D => {
                let grid = spatial_grid(c)?;
                let vgrid = velocity_grid(c)?;
                let state = init_peaks(&grid, &c.peaks, c.mass, &vgrid, c.eps)?;
                Kind::Kinetic(Box::new(Solver1D::new(grid, vgrid, state, c.scheme())?))
            }
            ModelKind::LocalRadial => {
                let grid = polar_grid(c)?;
                let state = init_radial(&grid, c.radial_width, c.mass, c.eps)?;
                let config = RadialConfig {
                    dt: fixed_dt,
                    cfl_safety: c.cfl_safety,
                    cfl_check: true,
                    flux: c.radial_flux,
                    exec: c.exec,
                };
                Kind::Radial(Box::new(RadialSolver::new(grid, state, config)?))
            }
            ModelKind::Ks1D => {
                let grid = spatial_grid(c)?;
                let coeffs = KSCoefficients::from_velocity_grid(&velocity_grid(c)?);
                let rho = initial_density(&grid, &c.peaks, c.mass)?;
                Kind::Ks1D(Box::new(KsSolver1D::new(grid, rho, coeffs, ks_config)?))
            }
            ModelKind::KsRadial => {
                let grid = polar_grid(c)?;
                let coeffs = KSCoefficients::from_polar_grid(&grid);
                let rho = initial_radial_density(&grid, c.radial_width, c.mass)?;
                Kind::KsRadial(Box::new(KsSolverRadial::new(grid, rho, coeffs, ks_config)?))
            }
        };
        Ok(Self { kind, fixed_dt })
    }

    pub fn time(&self) -> f64 {
        match &self.kind {
            Kind::Kinetic(s) => s.time(),
            Kind::Radial(s) => s.time(),
            Kind::Ks1D(s) => s.time(),
            Kind::KsRadial(s) => s.time(),
        }
    }

    pub fn steps(&self) -> u64 {
        match &self.kind {
            Kind::Kinetic(s) => s.steps(),
            Kind::Radial(s) => s.steps(),
            Kind::Ks1D(s) => s.steps(),
            Kind::KsRadial(s) => s.steps(),
        }
    }

    /// Step on the current grid.
    pub fn dt(&self) -> f64 {
        match &self.kind {
            Kind::Kinetic(s) => s.dt(),
            Kind::Radial(s) => s.dt(),
            Kind::Ks1D(s) => self.fixed_dt.unwrap_or_else(|| s.dt()),
            Kind::KsRadial(s) => self.fixed_dt.unwrap_or_else(|| s.dt()),
        }
    }

    pub fn step(&mut self, dt: f64) -> Result<()> {
        match &mut self.kind {
            Kind::Kinetic(s) => s.step(dt)?,
            Kind::Radial(s) => s.step(dt)?,
            Kind::Ks1D(s) => s.step(dt)?,
            Kind::KsRadial(s) => s.step(dt)?,
        }
        if self.density().iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                step: self.steps(),
                time: self.time(),
                what: "density".into(),
            });
        }
        Ok(())
    }

    /// Cell size along the resolved axis.
    pub fn dx(&self) -> f64 {
        match &self.kind {
            Kind::Kinetic(s) => s.grid().dx(),
            Kind::Radial(s) => s.grid().dr(),
            Kind::Ks1D(s) => s.grid().dx(),
            Kind::KsRadial(s) => s.grid().dr(),
        }
    }

    pub fn n_cells(&self) -> usize {
        match &self.kind {
            Kind::Kinetic(s) => s.grid().n_x(),
            Kind::Radial(s) => s.grid().n_r(),
            Kind::Ks1D(s) => s.grid().n_x(),
            Kind::KsRadial(s) => s.grid().n_r(),
        }
    }

    /// Cell centres in `x` or `r`.
    pub fn coordinates(&self) -> Vec<f64> {
        match &self.kind {
            Kind::Kinetic(s) => s.grid().centers(),
            Kind::Radial(s) => s.grid().radii(),
            Kind::Ks1D(s) => s.grid().centers(),
            Kind::KsRadial(s) => s.grid().radii(),
        }
    }

    /// `ρ`; for the radial models `ρ = ρ̃/r`.
    pub fn density(&self) -> Vec<f64> {
        match &self.kind {
            Kind::Kinetic(s) => s.density(),
            Kind::Radial(s) => s.rho(),
            Kind::Ks1D(s) => s.rho().to_vec(),
            Kind::KsRadial(s) => s.rho(),
        }
    }

    pub fn mass(&self) -> f64 {
        match &self.kind {
            Kind::Kinetic(s) => mass_1d(&s.density(), s.grid()),
            Kind::Radial(s) => s.mass(),
            Kind::Ks1D(s) => s.mass(),
            Kind::KsRadial(s) => s.mass(),
        }
    }

    pub fn grad_s(&self) -> Vec<f64> {
        match &self.kind {
            Kind::Kinetic(s) => s.chemo().grad_s.clone(),
            Kind::Radial(s) => s.grad_s(),
            Kind::Ks1D(s) => s.grad_s(),
            Kind::KsRadial(s) => grad_s_radial(s.rho_tilde(), s.grid()),
        }
    }

    /// `S` at the cell centres. In the radial case `S` is integrated inwards
    /// from the far-field value `-(M/2π) log r` at the last cell.
    pub fn s_values(&self) -> Vec<f64> {
        match &self.kind {
            Kind::Kinetic(s) => s.chemo().s_values.clone(),
            Kind::Ks1D(s) => s.s_values().to_vec(),
            Kind::Radial(_) | Kind::KsRadial(_) => {
                let g = self.grad_s();
                let r = self.coordinates();
                let n = g.len();
                let mut s = vec![0.0; n];
                s[n - 1] = -self.mass() / (2.0 * std::f64::consts::PI) * r[n - 1].ln();
                for i in (0..n - 1).rev() {
                    s[i] = s[i + 1] - 0.5 * (g[i] + g[i + 1]) * (r[i + 1] - r[i]);
                }
                s
            }
        }
    }

    pub fn linf_grad_s(&self) -> f64 {
        match &self.kind {
            Kind::Kinetic(s) => s.chemo().linf_grad(),
            _ => self.grad_s().iter().fold(0.0, |m, g| m.max(g.abs())),
        }
    }

    /// Everything the convergence metric compares: `f` for the kinetic
    /// models, the density otherwise (`ρ̃` in the radial case).
    pub fn snapshot(&self) -> FieldSnapshot {
        match &self.kind {
            Kind::Kinetic(s) => FieldSnapshot::kinetic_1d(s.state(), s.vgrid(), s.grid()),
            Kind::Radial(s) => FieldSnapshot::radial(s.state(), s.grid()),
            Kind::Ks1D(s) => FieldSnapshot::density(s.rho(), s.grid().dx()),
            Kind::KsRadial(s) => FieldSnapshot::density(s.rho_tilde(), s.grid().dr()),
        }
    }

    pub fn kinetic_1d(&self) -> Option<&Solver1D> {
        match &self.kind {
            Kind::Kinetic(s) => Some(s),
            _ => None,
        }
    }

    pub fn record(&self, dt: f64) -> DiagnosticsRecord {
        let rho = self.density();
        DiagnosticsRecord {
            t: self.time(),
            max_rho: rho.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b)),
            min_rho: rho.iter().fold(f64::INFINITY, |a, &b| a.min(b)),
            total_mass: self.mass(),
            linf_grad_s: self.linf_grad_s(),
            current_n_x: self.n_cells(),
            dt,
        }
    }

    fn write_profile(&self, out: &OutputDir, t: f64) -> Result<()> {
        let axis = if matches!(self.kind, Kind::Radial(_) | Kind::KsRadial(_)) {
            "r"
        } else {
            "x"
        };
        write_columns(
            &out.profile(t),
            &[axis, "rho", "s", "grad_s"],
            &[&self.coordinates(), &self.density(), &self.s_values(), &self.grad_s()],
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunStatus {
    Completed,
    /// The refinement trigger fired after `max_levels` refinements.
    RefinementCap,
}

#[derive(Clone, Debug)]
pub struct RunSummary {
    pub status: RunStatus,
    pub records: Vec<DiagnosticsRecord>,
    pub refinements: Vec<RefinementEvent>,
    /// `max ρ` after every step on the initial grid's `Δx`.
    pub history: MaxDensityHistory,
    pub final_record: DiagnosticsRecord,
    pub stationary: Option<StationaryProfile>,
    pub selfsim: Option<SelfSimilarSeries>,
}

impl RunSummary {
    pub fn max_rho_series(&self) -> (Vec<f64>, Vec<f64>) {
        self.records.iter().map(|r| (r.t, r.max_rho)).unzip()
    }
}

/// Relative tolerance on time comparisons.
fn close_to(t: f64, target: f64) -> bool {
    (t - target).abs() <= 1e-12 * target.abs().max(1.0)
}

/// Runs one configuration to `t_max`. CSV streams go to `config.output`
/// when it is set.
pub fn run_scenario(config: &ExperimentConfig) -> Result<RunSummary> {
    config.validate()?;
    let out = config.output.as_ref().map(OutputDir::create).transpose()?;
    if let Some(o) = &out {
        std::fs::write(o.config(), config.to_text())?;
    }
    let mut sim = Simulation::build(config)?;
    let mut controller = config
        .adaptive
        .then(|| AdaptiveController::new(sim.linf_grad_s(), config.max_levels));
    let dt0 = sim.dt();

    let mut series = out
        .as_ref()
        .map(|o| CsvTable::create(&o.timeseries(), &DiagnosticsRecord::HEADER))
        .transpose()?;
    let mut refine_log = None;
    let mut profile_times = config.profile_times.clone();
    profile_times.sort_by(f64::total_cmp);
    profile_times.dedup();
    let mut next_profile = 0;

    let mut records = Vec::new();
    let mut refinements = Vec::new();
    let mut history = MaxDensityHistory {
        dx: sim.dx(),
        times: Vec::new(),
        max_rho: Vec::new(),
    };
    let mut ss_times = Vec::new();
    let mut ss_rhos = Vec::new();

    let first = sim.record(dt0);
    history.times.push(first.t);
    history.max_rho.push(first.max_rho);
    if let Some(s) = series.as_mut() {
        s.row(&first.row())?;
    }
    records.push(first);
    if config.selfsim {
        ss_times.push(0.0);
        ss_rhos.push(sim.density());
    }
    while next_profile < profile_times.len() && profile_times[next_profile] <= 0.0 {
        if let Some(o) = &out {
            sim.write_profile(o, profile_times[next_profile])?;
        }
        next_profile += 1;
    }

    let mut status = RunStatus::Completed;
    let mut last = first;
    let mut since_record = 0usize;
    while sim.time() < config.t_max && !close_to(sim.time(), config.t_max) {
        let nominal = match &controller {
            Some(c) => dt0 / 2f64.powi(c.levels as i32),
            None => sim.dt(),
        };
        let target = profile_times
            .get(next_profile)
            .copied()
            .unwrap_or(f64::INFINITY)
            .min(config.t_max);
        let remaining = target - sim.time();
        let dt = if remaining < nominal * (1.0 + 1e-9) { remaining } else { nominal };
        sim.step(dt)?;
        since_record += 1;

        let t = sim.time();
        let rec = sim.record(dt);
        history.times.push(t);
        history.max_rho.push(rec.max_rho);
        let mut force = false;

        while next_profile < profile_times.len()
            && (profile_times[next_profile] <= t || close_to(t, profile_times[next_profile]))
        {
            if let Some(o) = &out {
                sim.write_profile(o, profile_times[next_profile])?;
            }
            next_profile += 1;
        }

        if let (Some(c), Kind::Kinetic(solver)) = (controller.as_mut(), &mut sim.kind) {
            match adapt_if_needed(c, solver)? {
                (AdaptDecision::Refine, Some(event)) => {
                    if let Some(o) = &out {
                        let log = match refine_log.as_mut() {
                            Some(l) => l,
                            None => refine_log.insert(CsvTable::create(&o.refinements(), &["t", "step", "n_x", "s_ref"])?),
                        };
                        log.row(&[event.t, event.step as f64, event.n_x as f64, event.s_ref])?;
                    }
                    refinements.push(event);
                    force = true;
                }
                (AdaptDecision::Cap, _) => {
                    log::warn!("refinement cap reached at t = {t}; blow-up suspected");
                    status = RunStatus::RefinementCap;
                }
                _ => {}
            }
        }
        let done = status != RunStatus::Completed || sim.time() >= config.t_max || close_to(sim.time(), config.t_max);
        if force || done || since_record >= config.record_every {
            // A refinement changes the grid, so the record is taken after it.
            let rec = if force { sim.record(dt) } else { rec };
            if let Some(s) = series.as_mut() {
                s.row(&rec.row())?;
            }
            records.push(rec);
            since_record = 0;
        }
        last = rec;
        if config.selfsim && (sim.steps() % config.selfsim_every as u64 == 0 || done) {
            ss_times.push(t);
            ss_rhos.push(sim.density());
        }
        if status != RunStatus::Completed {
            break;
        }
    }
    if let Some(s) = series {
        s.finish()?;
    }
    if let Some(l) = refine_log {
        l.finish()?;
    }

    let stationary = match sim.kinetic_1d() {
        Some(s) if !config.stations.is_empty() => {
            let p = stationary_diagnostics(s.state(), s.vgrid(), s.grid(), &config.stations, 1e-10);
            if let Some(o) = &out {
                write_columns(&o.stationary(p.eps), &["x_rescaled", "eps_rho_eps"], &[&p.y, &p.eps_rho])?;
                for st in &p.stations {
                    write_columns(&o.ftilde(st.y), &["v", "ftilde"], &[&st.v, &st.ftilde])?;
                }
            }
            Some(p)
        }
        _ => None,
    };
    let selfsim = if config.selfsim {
        let grid = spatial_grid(config)?;
        let s = self_similar_profile(&ss_times, &ss_rhos, &grid)?;
        if let Some(o) = &out {
            write_columns(&o.selfsim(), &["tau", "l1_to_final"], &[&s.tau, &s.l1_to_final])?;
        }
        Some(s)
    } else {
        None
    };

    Ok(RunSummary {
        status,
        records,
        refinements,
        history,
        final_record: last,
        stationary,
        selfsim,
    })
}

/// Snapshots of one grid level at `t = 0` and at each evaluation time.
#[derive(Clone, Debug)]
pub struct LevelRun {
    pub initial: FieldSnapshot,
    pub snapshots: Vec<FieldSnapshot>,
    pub densities: Vec<Vec<f64>>,
    pub history: MaxDensityHistory,
}

/// `config` with `n` cells along the resolved axis, no output and no
/// adaptivity.
pub fn with_cells(config: &ExperimentConfig, n: usize) -> ExperimentConfig {
    let mut c = config.clone();
    if c.model.is_1d() {
        c.n_x = n;
    } else {
        c.n_r = n;
    }
    c.output = None;
    c.adaptive = false;
    c.profile_times.clear();
    c.stations.clear();
    c.selfsim = false;
    c
}

fn base_cells(config: &ExperimentConfig) -> usize {
    if config.model.is_1d() {
        config.n_x
    } else {
        config.n_r
    }
}

/// Advances to each of `times` in equal steps no longer than the solver's
/// step as measured at the start of each segment.
pub fn run_level(config: &ExperimentConfig, times: &[f64]) -> Result<LevelRun> {
    let mut sim = Simulation::build(config)?;
    let mut run = LevelRun {
        initial: sim.snapshot(),
        snapshots: Vec::with_capacity(times.len()),
        densities: Vec::with_capacity(times.len()),
        history: MaxDensityHistory {
            dx: sim.dx(),
            times: vec![0.0],
            max_rho: vec![sim.record(0.0).max_rho],
        },
    };
    for &t in times {
        let start = sim.time();
        let span = t - start;
        if span < -1e-12 {
            return Err(invalid("evaluation times must be increasing"));
        }
        if span > 0.0 {
            let n = (span / sim.dt() - 1e-9).ceil().max(1.0) as u64;
            let dt = span / n as f64;
            for _ in 0..n {
                sim.step(dt)?;
                run.history.times.push(sim.time());
                run.history.max_rho.push(sim.record(dt).max_rho);
            }
        }
        run.snapshots.push(sim.snapshot());
        run.densities.push(sim.density());
    }
    Ok(run)
}

/// Grid sizes `n, 2n, 4n, …` starting from the configured one.
pub fn level_sizes(config: &ExperimentConfig, levels: usize) -> Vec<usize> {
    (0..levels).map(|l| base_cells(config) << l).collect()
}

/// Convergence tables at several times from one set of runs.
pub fn converge_at(config: &ExperimentConfig, levels: usize, times: &[f64]) -> Result<Vec<(f64, Vec<ConvergenceRow>)>> {
    config.validate()?;
    if levels < 3 {
        return Err(Error::Config(format!("convergence needs at least 3 levels, got {levels}")));
    }
    let sizes = level_sizes(config, levels);
    let runs = config
        .exec
        .map(&sizes, |&n| run_level(&with_cells(config, n), times))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let initial: Vec<FieldSnapshot> = runs.iter().map(|r| r.initial.clone()).collect();
    times
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let finals: Vec<FieldSnapshot> = runs.iter().map(|r| r.snapshots[k].clone()).collect();
            Ok((t, convergence_table(&finals, &initial)?))
        })
        .collect()
}

/// Convergence table at `t_max`; written to `convergence.csv` when an
/// output directory is configured.
pub fn converge(config: &ExperimentConfig, levels: usize) -> Result<Vec<ConvergenceRow>> {
    let (_, rows) = converge_at(config, levels, &[config.t_max])?.remove(0);
    if let Some(dir) = &config.output {
        let out = OutputDir::create(dir)?;
        let mut t = CsvTable::create(&out.convergence(), &["dx", "e1", "order"])?;
        for r in &rows {
            let order = r.order.map(super::output::fmt_f64).unwrap_or_default();
            t.raw(&[super::output::fmt_f64(r.dx), super::output::fmt_f64(r.e1), order])?;
        }
        t.finish()?;
    }
    Ok(rows)
}

/// `max ρ` after every step up to `t_max`, with the solver's own step
/// recomputed each time. A non-finite state ends the history early.
fn blowup_history(config: &ExperimentConfig) -> Result<MaxDensityHistory> {
    let mut sim = Simulation::build(config)?;
    let mut history = MaxDensityHistory {
        dx: sim.dx(),
        times: vec![0.0],
        max_rho: vec![sim.record(0.0).max_rho],
    };
    while !close_to(sim.time(), config.t_max) && sim.time() < config.t_max {
        let dt = sim.dt().min(config.t_max - sim.time());
        match sim.step(dt) {
            Ok(()) => {}
            Err(e @ Error::NonFinite { .. }) => {
                log::warn!("{e}; history truncated");
                break;
            }
            Err(e) => return Err(e),
        }
        history.times.push(sim.time());
        history.max_rho.push(sim.record(dt).max_rho);
    }
    Ok(history)
}

/// `max ρ` histories on successive grids, for [`crate::macro_ks::detect_blowup`].
pub fn blowup_histories(config: &ExperimentConfig, sizes: &[usize]) -> Result<Vec<MaxDensityHistory>> {
    config.validate()?;
    config
        .exec
        .map(sizes, |&n| blowup_history(&with_cells(config, n)))
        .into_iter()
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpsRow {
    pub eps: f64,
    /// `‖f_ε - ρ_ε F‖₂`.
    pub dist_f_rho_f: f64,
    /// `‖ρ_ε - ρ_0‖₁` against the Keller-Segel density on the same grid.
    pub dist_rho_rho0: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpsSweep {
    pub rows: Vec<EpsRow>,
    /// Fitted order of `‖f_ε - ρ_ε F‖₂` in `ε`.
    pub order_f: Option<f64>,
    pub order_rho: Option<f64>,
}

/// Kinetic runs for each `ε` on the configured grid, compared at `t_max`
/// with their local equilibrium and with the Keller-Segel solution.
pub fn eps_convergence(config: &ExperimentConfig, eps: &[f64]) -> Result<EpsSweep> {
    config.validate()?;
    if !matches!(config.model, ModelKind::Nonlocal1D | ModelKind::Local1D) {
        return Err(Error::Config("the ε sweep applies to the 1D kinetic models".into()));
    }
    if eps.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::Config("every ε must be positive".into()));
    }
    let mut macro_cfg = with_cells(config, config.n_x);
    macro_cfg.model = ModelKind::Ks1D;
    let rho0 = run_level(&macro_cfg, &[config.t_max])?.densities.remove(0);
    let dx = spatial_grid(config)?.dx();
    let rows = config
        .exec
        .map(eps, |&e| -> Result<EpsRow> {
            let mut c = with_cells(config, config.n_x);
            c.eps = e;
            let mut sim = Simulation::build(&c)?;
            let span = c.t_max;
            let n = (span / sim.dt() - 1e-9).ceil().max(1.0) as u64;
            for _ in 0..n {
                sim.step(span / n as f64)?;
            }
            let s = sim.kinetic_1d().expect("kinetic model");
            Ok(EpsRow {
                eps: e,
                dist_f_rho_f: equilibrium_distance(s.state(), s.vgrid(), s.grid()),
                dist_rho_rho0: l1_distance(&s.density(), &rho0, dx)?,
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = rows.iter().map(|r| r.eps).collect();
    let fit = |ys: Vec<f64>| fit_order(&xs, &ys).ok();
    let sweep = EpsSweep {
        order_f: fit(rows.iter().map(|r| r.dist_f_rho_f).collect()),
        order_rho: fit(rows.iter().map(|r| r.dist_rho_rho0).collect()),
        rows,
    };
    if let Some(dir) = &config.output {
        let out = OutputDir::create(dir)?;
        let mut t = CsvTable::create(&out.eps_sweep(), &["eps", "dist_f_rhoF_l2", "dist_rho_rho0_l1"])?;
        for r in &sweep.rows {
            t.row(&[r.eps, r.dist_f_rho_f, r.dist_rho_rho0])?;
        }
        t.finish()?;
    }
    Ok(sweep)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MassRow {
    pub mass: f64,
    pub status: RunStatus,
    pub t_end: f64,
    /// `‖ρ‖∞ / M` at the start, the end and its largest value.
    pub initial: f64,
    pub last: f64,
    pub peak: f64,
    pub records: Vec<DiagnosticsRecord>,
}

/// One run per mass; each writes into `mass_<M>/` under the output
/// directory and `mass_sweep.csv` collects the summary.
pub fn sweep_mass(config: &ExperimentConfig, masses: &[f64]) -> Result<Vec<MassRow>> {
    let out = config.output.as_ref().map(OutputDir::create).transpose()?;
    let rows = config
        .exec
        .map(masses, |&m| -> Result<MassRow> {
            let mut c = config.clone();
            c.mass = m;
            c.output = out.as_ref().map(|o| o.path().join(format!("mass_{}", super::output::tag(m))));
            let summary = run_scenario(&c)?;
            let ratio: Vec<f64> = summary.records.iter().map(|r| r.max_rho / m).collect();
            Ok(MassRow {
                mass: m,
                status: summary.status,
                t_end: summary.final_record.t,
                initial: ratio[0],
                last: *ratio.last().expect("at least one record"),
                peak: ratio.iter().fold(0.0, |a, &b| a.max(b)),
                records: summary.records,
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    if let Some(o) = &out {
        let header = [
            "mass",
            "t_end",
            "max_rho_over_mass_initial",
            "max_rho_over_mass_final",
            "max_rho_over_mass_peak",
        ];
        let mut t = CsvTable::create(&o.mass_sweep(), &header)?;
        for r in &rows {
            t.row(&[r.mass, r.t_end, r.initial, r.last, r.peak])?;
        }
        t.finish()?;
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Exec;

    fn small(model: &str) -> ExperimentConfig {
        let mut c = ExperimentConfig::parse(&format!("model = {model}\nt_max = 0.002")).unwrap();
        c.n_x = 64;
        c.n_half = 4;
        c.n_r = 32;
        c.n_omega = 4;
        c.n_theta = 8;
        c.exec = Exec::Sequential;
        c
    }

    #[test]
    fn every_model_runs_and_keeps_its_mass() {
        for model in ["nonlocal1d", "local1d", "local2d_radial", "ks1d", "ks2d_radial"] {
            let c = small(model);
            let s = run_scenario(&c).unwrap();
            assert_eq!(s.status, RunStatus::Completed);
            assert!((s.final_record.t - c.t_max).abs() < 1e-14, "{model}");
            let m0 = s.records[0].total_mass;
            for r in &s.records {
                assert!((r.total_mass - m0).abs() <= 1e-9 * m0, "{model}: {r:?}");
            }
            assert_eq!(s.history.times.len(), s.history.max_rho.len());
        }
    }

    #[test]
    fn zero_mass_is_rejected() {
        let mut c = small("nonlocal1d");
        c.mass = 0.0;
        assert!(matches!(run_scenario(&c), Err(Error::Config(_))));
    }

    #[test]
    fn profiles_land_on_requested_times() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = small("ks1d");
        c.profile_times = vec![0.0, 0.00123];
        c.record_every = 5;
        c.output = Some(dir.path().to_path_buf());
        let s = run_scenario(&c).unwrap();
        assert!(s.records.iter().any(|r| (r.t - 0.00123).abs() < 1e-15) || s.records.len() > 1);
        assert!(dir.path().join("profile_0.0.csv").exists());
        assert!(dir.path().join("profile_0.00123.csv").exists());
        let text = std::fs::read_to_string(dir.path().join("timeseries.csv")).unwrap();
        assert!(text.starts_with("t,max_rho,min_rho,mass,linf_grad_s,n_x,dt\n"));
        assert!(dir.path().join("config.txt").exists());
    }

    #[test]
    fn radial_profile_integrates_the_far_field() {
        let c = small("ks2d_radial");
        let sim = Simulation::build(&c).unwrap();
        let s = sim.s_values();
        let g = sim.grad_s();
        let r = sim.coordinates();
        // S increases towards the origin where the gradient is negative.
        assert!(s.windows(2).all(|w| w[0] >= w[1]));
        let k = s.len() - 2;
        let fd = (s[k + 1] - s[k]) / (r[k + 1] - r[k]);
        assert!((fd - 0.5 * (g[k] + g[k + 1])).abs() < 1e-12);
    }

    #[test]
    fn heat_equation_levels_converge_at_second_order() {
        // Keller-Segel with a vanishing mass is the heat equation; the
        // three-point scheme converges at second order.
        let mut c = small("ks1d");
        c.mass = 1e-12;
        c.n_x = 40;
        c.t_max = 0.01;
        c.peaks = vec![crate::kinetic::Peak::new(1.0, 0.0, 10.0)];
        let rows = converge(&c, 4).unwrap();
        for r in &rows[1..] {
            let p = r.order.unwrap();
            assert!((p - 2.0).abs() < 0.1, "{rows:?}");
        }
    }
}
