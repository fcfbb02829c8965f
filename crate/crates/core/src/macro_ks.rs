//! Explicit finite-volume solvers for the Keller-Segel limits
//!
//! ```text
//! ∂ₜρ = ∂ₓ(D ∂ₓρ - χ ρ ∂ₓS)                 (1D, logarithmic S)
//! ∂ₜρ̃ = ∂ᵣ(D r ∂ᵣ(ρ̃/r) - χ ρ̃ ∂ᵣS)          (2D radial, ρ̃ = rρ)
//! ```
//!
//! with zero-flux walls, plus a blow-up detector that cross-checks the
//! crossing time of a density threshold over several grids.

use std::f64::consts::PI;

use crate::chemo::{grad_s_1d, grad_s_radial_faces, LogConvolver};
use crate::error::{invalid, Error, Result};
use crate::kinetic::moments::{diffusion_1d, radial_diffusion, radial_sensitivity, sensitivity_1d};
use crate::kinetic::{make_uniform_equilibrium, mass_1d, mass_2d, radial_equilibrium, PolarGrid2D, SpatialGrid1D, VelocityGrid1D};

/// Diffusion and sensitivity of a Keller-Segel limit with its critical mass.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KSCoefficients {
    pub d_coef: f64,
    pub chi_coef: f64,
    pub critical_mass: f64,
}

impl KSCoefficients {
    /// `M_c = 2πD/χ`.
    pub fn one_d(d_coef: f64, chi_coef: f64) -> Result<Self> {
        Self::checked(d_coef, chi_coef, 2.0 * PI)
    }

    /// `M_KS = 8πD/χ`.
    pub fn radial(d_coef: f64, chi_coef: f64) -> Result<Self> {
        Self::checked(d_coef, chi_coef, 8.0 * PI)
    }

    fn checked(d_coef: f64, chi_coef: f64, factor: f64) -> Result<Self> {
        if !(d_coef > 0.0 && d_coef.is_finite()) || !(chi_coef >= 0.0 && chi_coef.is_finite()) {
            return Err(invalid(format!("need D > 0 and χ ≥ 0, got D = {d_coef}, χ = {chi_coef}")));
        }
        let critical_mass = if chi_coef > 0.0 {
            factor * d_coef / chi_coef
        } else {
            f64::INFINITY
        };
        Ok(Self {
            d_coef,
            chi_coef,
            critical_mass,
        })
    }

    /// Limit of the 1D kinetic model with uniform equilibrium.
    pub fn from_velocity_grid(vgrid: &VelocityGrid1D) -> Self {
        let d = diffusion_1d(vgrid, &make_uniform_equilibrium(vgrid));
        Self::one_d(d, sensitivity_1d(vgrid)).expect("quadrature moments are positive")
    }

    /// Limit of the radial kinetic model.
    pub fn from_polar_grid(grid: &PolarGrid2D) -> Self {
        let d = radial_diffusion(grid, radial_equilibrium(grid));
        Self::radial(d, radial_sensitivity(grid)).expect("quadrature moments are positive")
    }
}

/// Interface density in the drift flux.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DriftFlux {
    #[default]
    Average,
    /// Upwind by the sign of the drift velocity; keeps ρ ≥ 0 at any Péclet
    /// number.
    Upwind,
    /// Upwind value corrected by a minmod-limited slope: second order where
    /// ρ is smooth, nonnegative like `Upwind`.
    Limited,
}

impl DriftFlux {
    /// Multiple of `|u|/Δx` in the explicit stability bound.
    fn courant_factor(self) -> f64 {
        match self {
            DriftFlux::Limited => 2.0,
            _ => 1.0,
        }
    }
}

fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a.abs() < b.abs() {
        a
    } else {
        b
    }
}

/// Density on the face between cells `i` and `i + 1`.
fn face_density(rho: &[f64], i: usize, velocity: f64, drift: DriftFlux) -> f64 {
    let (left, right) = (rho[i], rho[i + 1]);
    match drift {
        DriftFlux::Average => 0.5 * (left + right),
        DriftFlux::Upwind if velocity > 0.0 => left,
        DriftFlux::Upwind => right,
        DriftFlux::Limited if velocity > 0.0 => {
            let back = if i > 0 { left - rho[i - 1] } else { 0.0 };
            left + 0.5 * minmod(back, right - left)
        }
        DriftFlux::Limited => {
            let ahead = if i + 2 < rho.len() { rho[i + 2] - right } else { 0.0 };
            right - 0.5 * minmod(right - left, ahead)
        }
    }
}

/// Largest step with `dt (2D/Δx² + k max|u|/Δx) ≤ safety`, `u` the face
/// drift velocities.
fn stable_dt(d: f64, dx: f64, max_velocity: f64, drift: DriftFlux, safety: f64) -> f64 {
    safety / (2.0 * d / (dx * dx) + drift.courant_factor() * max_velocity / dx)
}

/// One explicit step of the 1D system for a given `S`. Face `i + 1/2`
/// carries `D(ρ_{i+1} - ρ_i)/Δx - χ ρ_{i+1/2}(S_{i+1} - S_i)/Δx`.
pub fn ks_step_1d(
    rho: &[f64],
    s_values: &[f64],
    grid: &SpatialGrid1D,
    coeffs: &KSCoefficients,
    dt: f64,
    drift: DriftFlux,
) -> Result<Vec<f64>> {
    let n = grid.n_x();
    if rho.len() != n || s_values.len() != n {
        return Err(Error::ShapeMismatch(format!(
            "ρ has {}, S has {} cells, grid has {n}",
            rho.len(),
            s_values.len()
        )));
    }
    let dx = grid.dx();
    if dt > dx * dx / (2.0 * coeffs.d_coef) * (1.0 + 1e-12) {
        log::warn!("KS step dt = {dt:e} exceeds the diffusive limit {:e}", dx * dx / (2.0 * coeffs.d_coef));
    }
    let mut flux = vec![0.0; n + 1];
    for i in 0..n - 1 {
        let u = coeffs.chi_coef * (s_values[i + 1] - s_values[i]) / dx;
        let rf = face_density(rho, i, u, drift);
        flux[i + 1] = coeffs.d_coef * (rho[i + 1] - rho[i]) / dx - u * rf;
    }
    let c = dt / dx;
    Ok((0..n).map(|i| rho[i] + c * (flux[i + 1] - flux[i])).collect())
}

/// One explicit step of the radial system; `∂ᵣS` is evaluated on the faces.
pub fn ks_step_radial(
    rho_tilde: &[f64],
    grid: &PolarGrid2D,
    coeffs: &KSCoefficients,
    dt: f64,
    drift: DriftFlux,
) -> Result<Vec<f64>> {
    let n = grid.n_r();
    if rho_tilde.len() != n {
        return Err(Error::ShapeMismatch(format!("ρ̃ has {} cells, grid has {n}", rho_tilde.len())));
    }
    let dr = grid.dr();
    if dt > dr * dr / (2.0 * coeffs.d_coef) * (1.0 + 1e-12) {
        log::warn!("radial KS step dt = {dt:e} exceeds the diffusive limit {:e}", dr * dr / (2.0 * coeffs.d_coef));
    }
    let grad = grad_s_radial_faces(rho_tilde, grid);
    let mut flux = vec![0.0; n + 1];
    for i in 0..n - 1 {
        let rf = (i + 1) as f64 * dr;
        let diff = coeffs.d_coef * rf * (rho_tilde[i + 1] / grid.r(i + 1) - rho_tilde[i] / grid.r(i)) / dr;
        let u = coeffs.chi_coef * grad[i];
        flux[i + 1] = diff - u * face_density(rho_tilde, i, u, drift);
    }
    let c = dt / dr;
    Ok((0..n).map(|i| rho_tilde[i] + c * (flux[i + 1] - flux[i])).collect())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KsConfig {
    pub drift: DriftFlux,
    /// Fraction of the explicit stability limit used by `advance`.
    pub safety: f64,
}

impl Default for KsConfig {
    fn default() -> Self {
        Self {
            drift: DriftFlux::Average,
            safety: 0.9,
        }
    }
}

/// 1D Keller-Segel solver; `S = -(1/π) log|x| * ρ` is rebuilt every step.
#[derive(Clone, Debug)]
pub struct KsSolver1D {
    grid: SpatialGrid1D,
    coeffs: KSCoefficients,
    config: KsConfig,
    convolver: LogConvolver,
    rho: Vec<f64>,
    s_values: Vec<f64>,
    time: f64,
    steps: u64,
}

impl KsSolver1D {
    pub fn new(grid: SpatialGrid1D, rho: Vec<f64>, coeffs: KSCoefficients, config: KsConfig) -> Result<Self> {
        if rho.len() != grid.n_x() {
            return Err(Error::ShapeMismatch(format!("ρ has {} cells, grid has {}", rho.len(), grid.n_x())));
        }
        if !(config.safety > 0.0 && config.safety <= 1.0) {
            return Err(invalid(format!("safety must lie in (0, 1], got {}", config.safety)));
        }
        let convolver = LogConvolver::new(&grid, 1)?;
        let s_values = convolver.convolve(&rho);
        Ok(Self {
            grid,
            coeffs,
            config,
            convolver,
            rho,
            s_values,
            time: 0.0,
            steps: 0,
        })
    }

    pub fn grid(&self) -> &SpatialGrid1D {
        &self.grid
    }
    pub fn coefficients(&self) -> &KSCoefficients {
        &self.coeffs
    }
    pub fn rho(&self) -> &[f64] {
        &self.rho
    }
    pub fn s_values(&self) -> &[f64] {
        &self.s_values
    }
    pub fn grad_s(&self) -> Vec<f64> {
        grad_s_1d(&self.s_values, &self.grid)
    }
    pub fn time(&self) -> f64 {
        self.time
    }
    pub fn steps(&self) -> u64 {
        self.steps
    }
    pub fn mass(&self) -> f64 {
        mass_1d(&self.rho, &self.grid)
    }
    pub fn max_rho(&self) -> f64 {
        self.rho.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
    }

    /// Stable step for the current `S`.
    pub fn dt(&self) -> f64 {
        let dx = self.grid.dx();
        let u = self
            .s_values
            .windows(2)
            .fold(0.0f64, |m, w| m.max((w[1] - w[0]).abs() / dx));
        stable_dt(self.coeffs.d_coef, dx, self.coeffs.chi_coef * u, self.config.drift, self.config.safety)
    }

    pub fn step(&mut self, dt: f64) -> Result<()> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(invalid(format!("dt must be positive, got {dt}")));
        }
        self.rho = ks_step_1d(&self.rho, &self.s_values, &self.grid, &self.coeffs, dt, self.config.drift)?;
        self.steps += 1;
        self.time += dt;
        if self.rho.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                step: self.steps,
                time: self.time,
                what: "Keller-Segel density".into(),
            });
        }
        self.s_values = self.convolver.convolve(&self.rho);
        Ok(())
    }

    pub fn advance(&mut self) -> Result<f64> {
        let dt = self.dt();
        self.step(dt)?;
        Ok(dt)
    }

    /// Advances with stable steps, shortening the last one to land on `t_end`.
    pub fn advance_to(&mut self, t_end: f64) -> Result<()> {
        while self.time < t_end {
            let dt = self.dt().min(t_end - self.time);
            self.step(dt)?;
            if t_end - self.time < 1e-14 * t_end.abs().max(1.0) {
                self.time = t_end;
            }
        }
        Ok(())
    }
}

/// Radial Keller-Segel solver for `ρ̃ = rρ`.
#[derive(Clone, Debug)]
pub struct KsSolverRadial {
    grid: PolarGrid2D,
    coeffs: KSCoefficients,
    config: KsConfig,
    rho_tilde: Vec<f64>,
    time: f64,
    steps: u64,
}

impl KsSolverRadial {
    pub fn new(grid: PolarGrid2D, rho_tilde: Vec<f64>, coeffs: KSCoefficients, config: KsConfig) -> Result<Self> {
        if rho_tilde.len() != grid.n_r() {
            return Err(Error::ShapeMismatch(format!(
                "ρ̃ has {} cells, grid has {}",
                rho_tilde.len(),
                grid.n_r()
            )));
        }
        if !(config.safety > 0.0 && config.safety <= 1.0) {
            return Err(invalid(format!("safety must lie in (0, 1], got {}", config.safety)));
        }
        Ok(Self {
            grid,
            coeffs,
            config,
            rho_tilde,
            time: 0.0,
            steps: 0,
        })
    }

    pub fn grid(&self) -> &PolarGrid2D {
        &self.grid
    }
    pub fn rho_tilde(&self) -> &[f64] {
        &self.rho_tilde
    }
    pub fn rho(&self) -> Vec<f64> {
        self.rho_tilde.iter().enumerate().map(|(i, p)| p / self.grid.r(i)).collect()
    }
    pub fn time(&self) -> f64 {
        self.time
    }
    pub fn steps(&self) -> u64 {
        self.steps
    }
    pub fn mass(&self) -> f64 {
        mass_2d(&self.rho_tilde, &self.grid)
    }
    pub fn max_rho(&self) -> f64 {
        self.rho().into_iter().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn dt(&self) -> f64 {
        let u = grad_s_radial_faces(&self.rho_tilde, &self.grid)
            .iter()
            .fold(0.0f64, |m, g| m.max(g.abs()));
        stable_dt(
            self.coeffs.d_coef,
            self.grid.dr(),
            self.coeffs.chi_coef * u,
            self.config.drift,
            self.config.safety,
        )
    }

    pub fn step(&mut self, dt: f64) -> Result<()> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(invalid(format!("dt must be positive, got {dt}")));
        }
        self.rho_tilde = ks_step_radial(&self.rho_tilde, &self.grid, &self.coeffs, dt, self.config.drift)?;
        self.steps += 1;
        self.time += dt;
        if self.rho_tilde.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                step: self.steps,
                time: self.time,
                what: "radial Keller-Segel density".into(),
            });
        }
        Ok(())
    }

    pub fn advance(&mut self) -> Result<f64> {
        let dt = self.dt();
        self.step(dt)?;
        Ok(dt)
    }

    pub fn advance_to(&mut self, t_end: f64) -> Result<()> {
        while self.time < t_end {
            let dt = self.dt().min(t_end - self.time);
            self.step(dt)?;
            if t_end - self.time < 1e-14 * t_end.abs().max(1.0) {
                self.time = t_end;
            }
        }
        Ok(())
    }
}

/// `max ρ` history of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct MaxDensityHistory {
    /// Cell size of the run.
    pub dx: f64,
    pub times: Vec<f64>,
    pub max_rho: Vec<f64>,
}

/// Thresholds of [`detect_blowup`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlowupCriterion {
    /// `θ_b = factor · M / |Ω|`.
    pub factor: f64,
    /// A run also counts as collapsed once `max ρ · Δx ≥ saturation · M`,
    /// i.e. that share of the mass sits in one cell and the grid can no
    /// longer resolve further growth.
    pub saturation: f64,
    /// Relative slack when checking that crossing times do not increase
    /// under refinement.
    pub slack: f64,
}

impl Default for BlowupCriterion {
    fn default() -> Self {
        Self {
            factor: 1e3,
            saturation: 0.25,
            slack: 0.01,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlowupStatus {
    BlowUp,
    Bounded,
    Indeterminate,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlowupReport {
    pub status: BlowupStatus,
    /// Crossing time on the finest grid when a blow-up is declared.
    pub t_b: Option<f64>,
    pub threshold: f64,
    /// Crossing time per level, ordered from coarse to fine.
    pub crossing_times: Vec<Option<f64>>,
    /// Successive differences of the crossing times shrink.
    pub converging: bool,
}

/// First recorded time at which `max ρ` reaches `threshold` or saturates
/// the grid.
fn crossing_time(h: &MaxDensityHistory, threshold: f64, saturated: f64) -> Option<f64> {
    h.times
        .iter()
        .zip(&h.max_rho)
        .find(|(_, &m)| m >= threshold || m * h.dx >= saturated)
        .map(|(&t, _)| t)
}

/// Declares a blow-up when the threshold crossing time exists on the finest
/// grid and does not increase under refinement; `t_b` is the finest value.
/// Fewer than two levels give [`BlowupStatus::Indeterminate`].
pub fn detect_blowup(
    levels: &[MaxDensityHistory],
    mass: f64,
    domain_size: f64,
    criterion: &BlowupCriterion,
) -> Result<BlowupReport> {
    if !(mass > 0.0) || !(domain_size > 0.0) {
        return Err(invalid("mass and domain size must be positive"));
    }
    for h in levels {
        if h.times.len() != h.max_rho.len() {
            return Err(Error::ShapeMismatch("times and max_rho differ in length".into()));
        }
        if h.times.windows(2).any(|w| w[1] < w[0]) {
            return Err(invalid("history times must be non-decreasing"));
        }
    }
    let mut sorted: Vec<&MaxDensityHistory> = levels.iter().collect();
    sorted.sort_by(|a, b| b.dx.total_cmp(&a.dx));
    let threshold = criterion.factor * mass / domain_size;
    let saturated = criterion.saturation * mass;
    let crossing_times: Vec<Option<f64>> = sorted.iter().map(|h| crossing_time(h, threshold, saturated)).collect();
    let crossed: Vec<f64> = crossing_times.iter().flatten().copied().collect();
    let diffs: Vec<f64> = crossed.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let converging = diffs.windows(2).all(|w| w[1] <= w[0] * (1.0 + criterion.slack));
    let mut report = BlowupReport {
        status: BlowupStatus::Indeterminate,
        t_b: None,
        threshold,
        crossing_times: crossing_times.clone(),
        converging,
    };
    if sorted.len() < 2 {
        return Ok(report);
    }
    match crossing_times.last().copied().flatten() {
        None => {
            if crossing_times.iter().all(Option::is_none) {
                report.status = BlowupStatus::Bounded;
            }
        }
        Some(t_fine) => {
            let monotone = crossed.windows(2).all(|w| w[1] <= w[0] * (1.0 + criterion.slack));
            // A coarse run that never crossed while a finer one did is the
            // expected picture for a grid-limited singularity.
            let tail_complete = crossing_times
                .iter()
                .skip_while(|t| t.is_none())
                .all(Option::is_some);
            if monotone && tail_complete {
                report.status = BlowupStatus::BlowUp;
                report.t_b = Some(t_fine);
            }
        }
    }
    Ok(report)
}
