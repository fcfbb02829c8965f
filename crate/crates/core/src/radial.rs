//! Spherically symmetric 2D local model in `(R, J)` parity form.
//!
//! The unknown is `h = r f(r, ω, θ)`, split into the parts even and odd under
//! `θ ↦ π - θ`. Transport uses `P = (R + J)/2` and `Q = (R - J)/2`, which
//! move along opposite characteristics of the `(r, θ)` plane and are
//! upwinded separately. Each ω-slice is independent in both stages.

use std::f64::consts::PI;

use crate::chemo::grad_s_radial;
use crate::error::{invalid, Error, Result};
use crate::exec::Exec;
use crate::kinetic::moments::radial_drift_loss;
use crate::kinetic::{density_2d, mass_2d, radial_equilibrium, PolarGrid2D, RadialState2D};

/// Frozen coefficients of the collision stage.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialSourceCoefficients {
    /// `F(ω)`, constant in ω.
    pub equilibrium: f64,
    /// `c₂ = ∫∫ ω²|cos θ| dω dθ`.
    pub c2: f64,
    /// Ratio of `c₂` to its value under the cell-centred θ rule. Scaling the
    /// chemotactic gain by it makes the collision stage conserve `ρ̃` exactly.
    pub kappa: f64,
    pub grad_s: Vec<f64>,
}

impl RadialSourceCoefficients {
    pub fn new(grid: &PolarGrid2D, rho_tilde: &[f64]) -> Result<Self> {
        if rho_tilde.len() != grid.n_r() {
            return Err(Error::ShapeMismatch(format!(
                "ρ̃ has {} cells, grid has {}",
                rho_tilde.len(),
                grid.n_r()
            )));
        }
        let c2 = radial_drift_loss(grid);
        let dtheta = grid.dtheta();
        let speed: f64 = grid
            .omegas()
            .iter()
            .zip(grid.omega_weights())
            .map(|(o, w)| w * o * o)
            .sum();
        let angle = Trig::new(grid).abs_cos_sum(dtheta);
        Ok(Self {
            equilibrium: radial_equilibrium(grid),
            c2,
            kappa: c2 / (speed * angle),
            grad_s: grad_s_radial(rho_tilde, grid),
        })
    }
}

/// `cos θ_j` at cell centres and `sin θ` on the θ faces (exactly zero at 0, π).
struct Trig {
    cos: Vec<f64>,
    sin_face: Vec<f64>,
}

impl Trig {
    fn new(grid: &PolarGrid2D) -> Self {
        // Tabulated so that cos(π - θ) = -cos θ and sin(π - θ) = sin θ hold
        // exactly; the axis and angular fluxes then cancel to round-off.
        let m = grid.n_theta();
        let mut sin_face = vec![0.0; m + 1];
        for j in 1..=m / 2 {
            sin_face[j] = (j as f64 * grid.dtheta()).sin();
            sin_face[m - j] = sin_face[j];
        }
        let mut cos = vec![0.0; m];
        for j in 0..m / 2 {
            cos[j] = grid.theta(j).cos();
            cos[m - 1 - j] = -cos[j];
        }
        Self { cos, sin_face }
    }

    /// `Σ_j Δθ |cos θ_j|`.
    fn abs_cos_sum(&self, dtheta: f64) -> f64 {
        self.cos.iter().map(|c| dtheta * c.abs()).sum()
    }
}

/// Treatment of the radial fluxes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RadialFlux {
    /// Upwinds `h/r` and multiplies by the face radius; nothing crosses the
    /// axis face, which has zero length. Exact for spatially uniform `f`.
    #[default]
    AreaWeighted,
    /// Upwinds `h` directly; at the axis the inflow of a direction is the
    /// outflow of its mirror `π - θ`.
    Reflect,
}

impl RadialFlux {
    /// Sign of the ghost `R₋₁ = ±R₀` used by the centred drift operator.
    fn axis_ghost(self) -> f64 {
        match self {
            RadialFlux::AreaWeighted => -1.0,
            RadialFlux::Reflect => 1.0,
        }
    }
}

/// Discrete `∂ᵣ(cos θ R) - ∂_θ(sin θ R / r)` with an axis ghost `±R₀`,
/// zero-gradient ghosts at `r_max`, and copied θ ghosts.
fn drift_operator(r: &[f64], grid: &PolarGrid2D, trig: &Trig, axis_ghost: f64, out: &mut [f64]) {
    let (nr, nt) = (grid.n_r(), grid.n_theta());
    let inv2dr = 0.5 / grid.dr();
    let inv2dt = 0.5 / grid.dtheta();
    for i in 0..nr {
        let ri = grid.r(i);
        let lo = i.saturating_sub(1);
        let hi = (i + 1).min(nr - 1);
        for j in 0..nt {
            let c = trig.cos[j];
            let s = grid.theta(j).sin();
            let up = r[i * nt + (j + 1).min(nt - 1)];
            let down = r[i * nt + j.saturating_sub(1)];
            let below = if i == 0 { axis_ghost * r[j] } else { r[lo * nt + j] };
            let dr = (r[hi * nt + j] - below) * inv2dr;
            let dth = (up - down) * inv2dt;
            out[i * nt + j] = c * dr - (c * r[i * nt + j] + s * dth) / ri;
        }
    }
}

/// Implicit-Euler collision stage with `ρ̃` and `∂ᵣS` frozen.
pub fn radial_source_step(
    state: &mut RadialState2D,
    grid: &PolarGrid2D,
    coeffs: &RadialSourceCoefficients,
    dt: f64,
    flux: RadialFlux,
    exec: Exec,
) -> Result<()> {
    if state.shape() != (grid.n_omega(), grid.n_r(), grid.n_theta()) {
        return Err(Error::ShapeMismatch("state does not match the polar grid".into()));
    }
    if coeffs.grad_s.len() != grid.n_r() {
        return Err(Error::ShapeMismatch("coefficients do not match the polar grid".into()));
    }
    if !(dt >= 0.0) {
        return Err(invalid(format!("dt must be non-negative, got {dt}")));
    }
    let eps = state.eps();
    let eps2 = eps * eps;
    let rho = density_2d(state, grid);
    let trig = Trig::new(grid);
    let (nr, nt) = (grid.n_r(), grid.n_theta());
    let omegas = grid.omegas();
    let (big_r, big_j) = state.parts_mut();
    exec.for_each_chunk_pair(big_r, big_j, grid.slice_len(), |m, rs, js| {
        let om = omegas[m];
        for i in 0..nr {
            let g = coeffs.grad_s[i];
            let loss = 1.0 + eps * coeffs.c2 * g.abs();
            let denom = eps2 + dt * loss;
            for j in 0..nt {
                let c = trig.cos[j];
                let gain = coeffs.equilibrium + coeffs.kappa * eps * 0.5 * om * c.abs() * g.abs();
                let q = i * nt + j;
                rs[q] = (eps2 * rs[q] + dt * gain * rho[i]) / denom;
            }
        }
        let mut drift = vec![0.0; nr * nt];
        drift_operator(rs, grid, &trig, flux.axis_ghost(), &mut drift);
        for i in 0..nr {
            let g = coeffs.grad_s[i];
            let denom = eps2 + dt * (1.0 + eps * coeffs.c2 * g.abs());
            for j in 0..nt {
                let q = i * nt + j;
                let gain = 0.5 * om * trig.cos[j] * g;
                js[q] = (eps2 * js[q] + dt * (gain * rho[i] + (eps2 - 1.0) * om * drift[q])) / denom;
            }
        }
    });
    Ok(())
}

/// Largest stable step, scaled by `safety`: the angular speed is largest in
/// the first cell, `r_1 = Δr/2`. Area weighting lets the first cell empty
/// through a face twice its centre radius, hence the factor 2.
pub fn radial_cfl_dt(grid: &PolarGrid2D, flux: RadialFlux, safety: f64) -> f64 {
    safety / radial_courant(grid, flux, 1.0)
}

fn radial_courant(grid: &PolarGrid2D, flux: RadialFlux, dt: f64) -> f64 {
    let radial = match flux {
        RadialFlux::AreaWeighted => 2.0,
        RadialFlux::Reflect => 1.0,
    };
    grid.v_max() * dt * (radial / grid.dr() + 1.0 / (grid.r(0) * grid.dtheta()))
}

/// Upwind update of one ω-slice of `(P, Q)` in place.
fn transport_slice(
    p: &mut [f64],
    q: &mut [f64],
    omega: f64,
    grid: &PolarGrid2D,
    trig: &Trig,
    flux: RadialFlux,
    dt: f64,
) {
    let (nr, nt) = (grid.n_r(), grid.n_theta());
    let half = nt / 2;
    let cr = omega * dt / grid.dr();
    let ct = omega * dt / grid.dtheta();
    // weight[face][cell side]: multiplies an upwind value taken from a cell.
    let weight = |face: usize, cell: usize| match flux {
        RadialFlux::AreaWeighted => face as f64 * grid.dr() / grid.r(cell),
        RadialFlux::Reflect => 1.0,
    };
    // Radial fluxes on faces 0..=nr (face i is the left face of cell i).
    let mut fp = vec![0.0; (nr + 1) * nt];
    let mut fq = vec![0.0; (nr + 1) * nt];
    for j in 0..nt {
        let c = trig.cos[j];
        let outward = j < half;
        if flux == RadialFlux::Reflect {
            let mj = grid.mirror(j);
            fp[j] = c * if outward { p[mj] } else { p[j] };
            fq[j] = -c * if outward { q[j] } else { q[mj] };
        }
        for face in 1..=nr {
            let left = face - 1;
            let right = face.min(nr - 1);
            let (pu, qu) = if outward {
                (p[left * nt + j] * weight(face, left), q[right * nt + j] * weight(face, right))
            } else {
                (p[right * nt + j] * weight(face, right), q[left * nt + j] * weight(face, left))
            };
            fp[face * nt + j] = c * pu;
            fq[face * nt + j] = -c * qu;
        }
    }
    let mut new_p = vec![0.0; nr * nt];
    let mut new_q = vec![0.0; nr * nt];
    for i in 0..nr {
        let inv_r = 1.0 / grid.r(i);
        for j in 0..nt {
            let k = i * nt + j;
            // P drifts toward θ = 0 and Q toward θ = π.
            let gp_hi = if j + 1 < nt { -trig.sin_face[j + 1] * inv_r * p[k + 1] } else { 0.0 };
            let gp_lo = if j > 0 { -trig.sin_face[j] * inv_r * p[k] } else { 0.0 };
            let gq_hi = if j + 1 < nt { trig.sin_face[j + 1] * inv_r * q[k] } else { 0.0 };
            let gq_lo = if j > 0 { trig.sin_face[j] * inv_r * q[k - 1] } else { 0.0 };
            new_p[k] = p[k] - cr * (fp[(i + 1) * nt + j] - fp[i * nt + j]) - ct * (gp_hi - gp_lo);
            new_q[k] = q[k] - cr * (fq[(i + 1) * nt + j] - fq[i * nt + j]) - ct * (gq_hi - gq_lo);
        }
    }
    p.copy_from_slice(&new_p);
    q.copy_from_slice(&new_q);
}

/// Transport stage on the `(r, θ)` plane for every ω-slice.
pub fn radial_transport_step(
    state: &mut RadialState2D,
    grid: &PolarGrid2D,
    dt: f64,
    flux: RadialFlux,
    cfl_check: bool,
    exec: Exec,
) -> Result<()> {
    if state.shape() != (grid.n_omega(), grid.n_r(), grid.n_theta()) {
        return Err(Error::ShapeMismatch("state does not match the polar grid".into()));
    }
    if cfl_check {
        let courant = radial_courant(grid, flux, dt);
        if courant > 1.0 + 1e-12 {
            return Err(Error::Cfl {
                courant,
                context: "radial transport".into(),
            });
        }
    }
    let trig = Trig::new(grid);
    let omegas = grid.omegas();
    let (big_r, big_j) = state.parts_mut();
    exec.for_each_chunk_pair(big_r, big_j, grid.slice_len(), |m, rs, js| {
        let mut p: Vec<f64> = rs.iter().zip(js.iter()).map(|(r, j)| 0.5 * (r + j)).collect();
        let mut q: Vec<f64> = rs.iter().zip(js.iter()).map(|(r, j)| 0.5 * (r - j)).collect();
        transport_slice(&mut p, &mut q, omegas[m], grid, &trig, flux, dt);
        for (k, (r, j)) in rs.iter_mut().zip(js.iter_mut()).enumerate() {
            *r = p[k] + q[k];
            *j = p[k] - q[k];
        }
    });
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialConfig {
    /// Explicit step; when `None`, `cfl_safety` times the stability limit.
    pub dt: Option<f64>,
    pub cfl_safety: f64,
    pub cfl_check: bool,
    pub flux: RadialFlux,
    pub exec: Exec,
}

impl Default for RadialConfig {
    fn default() -> Self {
        Self {
            dt: None,
            cfl_safety: 0.9,
            cfl_check: true,
            flux: RadialFlux::default(),
            exec: Exec::default(),
        }
    }
}

/// Time integrator for the radial model: collision, then transport, then
/// `ρ̃` and `∂ᵣS` are rebuilt.
#[derive(Clone, Debug)]
pub struct RadialSolver {
    grid: PolarGrid2D,
    config: RadialConfig,
    state: RadialState2D,
    rho_tilde: Vec<f64>,
    mass: f64,
    steps: u64,
}

impl RadialSolver {
    pub fn new(grid: PolarGrid2D, state: RadialState2D, config: RadialConfig) -> Result<Self> {
        if state.shape() != (grid.n_omega(), grid.n_r(), grid.n_theta()) {
            return Err(Error::ShapeMismatch("state does not match the polar grid".into()));
        }
        if let Some(dt) = config.dt {
            if !(dt > 0.0) {
                return Err(invalid(format!("dt must be positive, got {dt}")));
            }
        }
        if !(config.cfl_safety > 0.0) {
            return Err(invalid("cfl_safety must be positive"));
        }
        let rho_tilde = density_2d(&state, &grid);
        let mass = mass_2d(&rho_tilde, &grid);
        Ok(Self {
            grid,
            config,
            state,
            rho_tilde,
            mass,
            steps: 0,
        })
    }

    pub fn grid(&self) -> &PolarGrid2D {
        &self.grid
    }
    pub fn state(&self) -> &RadialState2D {
        &self.state
    }
    pub fn time(&self) -> f64 {
        self.state.time
    }
    pub fn steps(&self) -> u64 {
        self.steps
    }
    pub fn rho_tilde(&self) -> &[f64] {
        &self.rho_tilde
    }
    pub fn grad_s(&self) -> Vec<f64> {
        grad_s_radial(&self.rho_tilde, &self.grid)
    }
    /// Total mass `2π Δr Σ ρ̃`.
    pub fn mass(&self) -> f64 {
        mass_2d(&self.rho_tilde, &self.grid)
    }
    /// Initial mass, the normalisation of [`RadialSolver::max_rho_over_mass`].
    pub fn initial_mass(&self) -> f64 {
        self.mass
    }

    /// `ρ = ρ̃ / r` at the cell centres.
    pub fn rho(&self) -> Vec<f64> {
        self.rho_tilde
            .iter()
            .enumerate()
            .map(|(i, p)| p / self.grid.r(i))
            .collect()
    }

    pub fn max_rho_over_mass(&self) -> f64 {
        let m = if self.mass > 0.0 { self.mass } else { 1.0 };
        self.rho().iter().fold(0.0f64, |a, &b| a.max(b)) / m
    }

    pub fn dt(&self) -> f64 {
        self.config
            .dt
            .unwrap_or_else(|| radial_cfl_dt(&self.grid, self.config.flux, self.config.cfl_safety))
    }

    pub fn step(&mut self, dt: f64) -> Result<()> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(invalid(format!("dt must be positive, got {dt}")));
        }
        let coeffs = RadialSourceCoefficients::new(&self.grid, &self.rho_tilde)?;
        let (flux, exec) = (self.config.flux, self.config.exec);
        radial_source_step(&mut self.state, &self.grid, &coeffs, dt, flux, exec)?;
        radial_transport_step(&mut self.state, &self.grid, dt, flux, self.config.cfl_check, exec)?;
        self.rho_tilde = density_2d(&self.state, &self.grid);
        self.steps += 1;
        self.state.time += dt;
        if !self.state.is_finite() {
            return Err(Error::NonFinite {
                step: self.steps,
                time: self.state.time,
                what: "radial state".into(),
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
        let span = t_end - self.state.time;
        if span <= 0.0 {
            return Ok(());
        }
        let n = (span / self.dt() - 1e-9).ceil().max(1.0) as u64;
        let dt = span / n as f64;
        let start = self.state.time;
        for s in 1..=n {
            self.step(dt)?;
            self.state.time = start + s as f64 * dt;
        }
        self.state.time = t_end;
        Ok(())
    }
}

/// `D = π ∫ ω³ F dω` and `χ = π v_max⁴ / 8` for the radial Keller-Segel limit.
pub fn radial_limit_coefficients(grid: &PolarGrid2D) -> (f64, f64) {
    let f = radial_equilibrium(grid);
    let m3: f64 = grid
        .omegas()
        .iter()
        .zip(grid.omega_weights())
        .map(|(o, w)| w * o.powi(3))
        .sum();
    (PI * m3 * f, 0.125 * PI * grid.v_max().powi(4))
}
