//! Splitting schemes for the 1D nonlocal and local kinetic models in parity
//! form.
//!
//! A step consists of a stiff source stage, where `ρ` and `S` are frozen and
//! every `(x_i, v_k)` relaxes independently, and a transport stage for
//! `∂ₜr + v∂ₓj = 0`, `∂ₜj + v∂ₓr = 0`. The transport is solved on the
//! characteristic variables `u± = r ± j` (speeds `±v`), with ghost cells
//! realising `∂ₓr = 0` and `j = 0` at the walls.

use crate::chemo::{ChemoBuilder, ChemoField, ShiftInterpolation};
use crate::error::{invalid, Error, Result};
use crate::exec::Exec;
use crate::kinetic::{density_1d, make_uniform_equilibrium, mass_1d, KineticState1D, SpatialGrid1D, VelocityGrid1D};

/// Turning kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Model1D {
    /// Cells sense `δᵉS(x, v) = (S(x + εv) - S(x))₊`.
    #[default]
    Nonlocal,
    /// First-order expansion of the nonlocal kernel in `ε`.
    Local,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SchemeOrder {
    /// Implicit-Euler source followed by transport.
    First,
    /// Strang splitting with the exact source solution.
    #[default]
    Second,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TransportScheme {
    Upwind,
    /// Unlimited second-order slopes.
    LaxWendroff,
    /// Minmod-limited second-order slopes.
    #[default]
    Tvd,
}

/// Rule for the time step as a function of `Δx`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DtPolicy {
    /// `max{εΔx/(2v_max), Δx²/2}`.
    EpsOrParabolic,
    /// `Δx²/2`.
    Parabolic,
    /// `εΔx/v_max`.
    EpsDxOverV,
    /// `εΔx/(2v_max)`.
    HalfEpsDxOverV,
    /// `courant · Δx / v_max`.
    KineticCfl(f64),
    Fixed(f64),
}

impl DtPolicy {
    pub fn dt(&self, dx: f64, eps: f64, v_max: f64) -> f64 {
        match *self {
            DtPolicy::EpsOrParabolic => (eps * dx / (2.0 * v_max)).max(0.5 * dx * dx),
            DtPolicy::Parabolic => 0.5 * dx * dx,
            DtPolicy::EpsDxOverV => eps * dx / v_max,
            DtPolicy::HalfEpsDxOverV => eps * dx / (2.0 * v_max),
            DtPolicy::KineticCfl(c) => c * dx / v_max,
            DtPolicy::Fixed(dt) => dt,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchemeConfig {
    pub order: SchemeOrder,
    pub model: Model1D,
    pub transport: TransportScheme,
    pub dt_policy: DtPolicy,
    pub cfl_check: bool,
    pub interpolation: ShiftInterpolation,
    pub exec: Exec,
}

impl SchemeConfig {
    /// Implicit source, upwind transport, linear shift interpolation.
    pub fn first_order(model: Model1D) -> Self {
        Self {
            order: SchemeOrder::First,
            model,
            transport: TransportScheme::Upwind,
            dt_policy: DtPolicy::EpsOrParabolic,
            cfl_check: true,
            interpolation: ShiftInterpolation::Linear,
            exec: Exec::default(),
        }
    }

    /// Strang splitting, exact source, TVD transport, Fourier shifts.
    pub fn second_order(model: Model1D) -> Self {
        Self {
            order: SchemeOrder::Second,
            model,
            transport: TransportScheme::Tvd,
            dt_policy: DtPolicy::EpsOrParabolic,
            cfl_check: true,
            interpolation: ShiftInterpolation::Fourier,
            exec: Exec::default(),
        }
    }
}

/// Relaxation coefficients of the source stage,
/// `ε²∂ₜr = gain_even·ρ - loss·r`, `ε²∂ₜj = gain_odd·ρ - loss·j + …`.
///
/// `gain_even` and `gain_odd` are velocity-major like the state; `loss`
/// depends on `x` only.
#[derive(Clone, Debug, PartialEq)]
pub struct SourceCoefficients {
    n_x: usize,
    pub gain_even: Vec<f64>,
    pub gain_odd: Vec<f64>,
    pub loss: Vec<f64>,
    /// `½∫_V |v| dv`.
    pub c1: f64,
}

impl SourceCoefficients {
    /// Nonlocal kernel. The even gain is `F + κ R[δᵉS]` with `κ(x)` chosen
    /// so that `2 Σ_k w_k gain_even = loss` holds exactly on the discrete
    /// velocity grid; without it the trapezoidal bracket and the node
    /// quadrature disagree and the source stage would create mass.
    pub fn nonlocal(chemo: &ChemoField, vgrid: &VelocityGrid1D, eps: f64) -> Result<Self> {
        let tables = chemo
            .shifts
            .as_ref()
            .ok_or_else(|| invalid("nonlocal coefficients need the shift tables"))?;
        let n_x = chemo.s_values.len();
        let n_half = vgrid.n_half();
        let f_eq = make_uniform_equilibrium(vgrid);
        let mut gain_even = vec![0.0; n_x * n_half];
        let mut gain_odd = vec![0.0; n_x * n_half];
        let mut node_bracket = vec![0.0; n_x];
        let inv = 0.5 / eps;
        for k in 0..n_half {
            let w2 = 2.0 * vgrid.weights()[k];
            for i in 0..n_x {
                let p = tables.plus[k * n_x + i];
                let m = tables.minus[k * n_x + i];
                let even = 0.5 * (p + m);
                gain_even[k * n_x + i] = even;
                gain_odd[k * n_x + i] = inv * (p - m);
                node_bracket[i] += w2 * even;
            }
        }
        let mut loss = vec![1.0; n_x];
        for i in 0..n_x {
            let kappa = if node_bracket[i] > 0.0 {
                loss[i] += tables.bracket[i];
                tables.bracket[i] / node_bracket[i]
            } else {
                0.0
            };
            for k in 0..n_half {
                let g = &mut gain_even[k * n_x + i];
                *g = f_eq[k] + kappa * *g;
            }
        }
        Ok(Self {
            n_x,
            gain_even,
            gain_odd,
            loss,
            c1: c1(vgrid),
        })
    }

    /// Local kernel: `F + (ε/2)|v∂ₓS|`, `½v∂ₓS`, `1 + c₁ε|∂ₓS|`.
    pub fn local(grad_s: &[f64], vgrid: &VelocityGrid1D, eps: f64) -> Self {
        let n_x = grad_s.len();
        let f_eq = make_uniform_equilibrium(vgrid);
        let c1 = c1(vgrid);
        let mut gain_even = Vec::with_capacity(n_x * vgrid.n_half());
        let mut gain_odd = Vec::with_capacity(n_x * vgrid.n_half());
        for (&v, &f) in vgrid.nodes().iter().zip(&f_eq) {
            gain_even.extend(grad_s.iter().map(|g| f + 0.5 * eps * (v * g).abs()));
            gain_odd.extend(grad_s.iter().map(|g| 0.5 * v * g));
        }
        let loss = grad_s.iter().map(|g| 1.0 + c1 * eps * g.abs()).collect();
        Self {
            n_x,
            gain_even,
            gain_odd,
            loss,
            c1,
        }
    }

    pub fn for_model(model: Model1D, chemo: &ChemoField, vgrid: &VelocityGrid1D, eps: f64) -> Result<Self> {
        match model {
            Model1D::Nonlocal => Self::nonlocal(chemo, vgrid, eps),
            Model1D::Local => Ok(Self::local(&chemo.grad_s, vgrid, eps)),
        }
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }
}

fn c1(vgrid: &VelocityGrid1D) -> f64 {
    vgrid.nodes().iter().zip(vgrid.weights()).map(|(v, w)| v * w).sum()
}

fn check_shapes(state: &KineticState1D, coeffs: &SourceCoefficients, vgrid: &VelocityGrid1D) -> Result<()> {
    if state.n_x() != coeffs.n_x || state.n_half() != vgrid.n_half() || coeffs.gain_even.len() != state.r().len() {
        return Err(Error::ShapeMismatch(format!(
            "state {}x{}, coefficients for {} cells, velocity grid {}",
            state.n_x(),
            state.n_half(),
            coeffs.n_x,
            vgrid.n_half()
        )));
    }
    Ok(())
}

/// Central difference with the mirror ghost `u_{-1} = u_0`, `u_n = u_{n-1}`.
fn central_even(u: &[f64], i: usize, inv2dx: f64) -> f64 {
    let n = u.len();
    let left = if i == 0 { u[0] } else { u[i - 1] };
    let right = if i + 1 == n { u[n - 1] } else { u[i + 1] };
    (right - left) * inv2dx
}

/// Implicit-Euler source stage over `dt`, solved in closed form.
pub fn source_step_first_order(
    state: &mut KineticState1D,
    coeffs: &SourceCoefficients,
    vgrid: &VelocityGrid1D,
    dx: f64,
    dt: f64,
    exec: Exec,
) -> Result<()> {
    check_shapes(state, coeffs, vgrid)?;
    if !(dt >= 0.0) {
        return Err(invalid(format!("dt must be non-negative, got {dt}")));
    }
    let eps2 = state.eps() * state.eps();
    let rho = density_1d(state, vgrid);
    let n_x = state.n_x();
    let nodes = vgrid.nodes();
    let inv2dx = 0.5 / dx;
    let (r, j) = state.parts_mut();
    exec.for_each_chunk_pair(r, j, n_x, |k, r, j| {
        let v = nodes[k];
        let ge = &coeffs.gain_even[k * n_x..(k + 1) * n_x];
        let go = &coeffs.gain_odd[k * n_x..(k + 1) * n_x];
        for i in 0..n_x {
            r[i] = (eps2 * r[i] + dt * ge[i] * rho[i]) / (eps2 + dt * coeffs.loss[i]);
        }
        for i in 0..n_x {
            let dr = central_even(r, i, inv2dx);
            j[i] = (eps2 * j[i] + dt * (go[i] * rho[i] + (eps2 - 1.0) * v * dr)) / (eps2 + dt * coeffs.loss[i]);
        }
    });
    Ok(())
}

/// `∫_0^T e^{-a(T-s)} e^{-b s} ds`, stable for any `a, b ≥ 0`.
fn overlap(a: f64, b: f64, t: f64) -> f64 {
    let d = (a - b).abs();
    let e = (-a.min(b) * t).exp();
    if d * t < 1e-300 || e == 0.0 {
        t * e
    } else {
        e * (-(-d * t).exp_m1()) / d
    }
}

/// Exact solution of the frozen-coefficient source stage over `dt_half`.
///
/// `r` relaxes as `r(s) = r_eq + (rⁿ - r_eq) e^{-a s}` with `a = loss/ε²`.
/// The odd part integrates the central difference of `r(s)` against the
/// decay at its own cell, `∫_0^T e^{-a_i (T-s)} r_m(s) ds`; when `loss` is
/// uniform in `x` this equals `v ∂ₓ r̃` with the single-cell weight `r̃`.
pub fn source_step_exact(
    state: &mut KineticState1D,
    coeffs: &SourceCoefficients,
    vgrid: &VelocityGrid1D,
    dx: f64,
    dt_half: f64,
    exec: Exec,
) -> Result<()> {
    check_shapes(state, coeffs, vgrid)?;
    if !(dt_half >= 0.0) {
        return Err(invalid(format!("dt must be non-negative, got {dt_half}")));
    }
    let eps2 = state.eps() * state.eps();
    let rho = density_1d(state, vgrid);
    let n_x = state.n_x();
    let nodes = vgrid.nodes();
    let inv2dx = 0.5 / dx;
    let weight = 1.0 - 1.0 / eps2;
    let t = dt_half;
    let rate: Vec<f64> = coeffs.loss.iter().map(|l| l / eps2).collect();
    let decay: Vec<f64> = rate.iter().map(|a| (-a * t).exp()).collect();
    // ∫_0^T e^{-a(T-s)} ds, written so that a → ∞ stays finite.
    let memory: Vec<f64> = rate
        .iter()
        .map(|&a| if a * t < 1e-300 { t } else { -(-a * t).exp_m1() / a })
        .collect();
    let (r, j) = state.parts_mut();
    exec.for_each_chunk_pair(r, j, n_x, |k, r, j| {
        let v = nodes[k];
        let ge = &coeffs.gain_even[k * n_x..(k + 1) * n_x];
        let go = &coeffs.gain_odd[k * n_x..(k + 1) * n_x];
        let r_eq: Vec<f64> = (0..n_x).map(|i| ge[i] * rho[i] / coeffs.loss[i]).collect();
        let integral = |i: usize, m: usize| -> f64 {
            r_eq[m] * memory[i] + (r[m] - r_eq[m]) * overlap(rate[i], rate[m], t)
        };
        let mut drift = vec![0.0; n_x];
        for (i, d) in drift.iter_mut().enumerate() {
            let left = integral(i, i.saturating_sub(1));
            let right = integral(i, (i + 1).min(n_x - 1));
            *d = weight * v * (right - left) * inv2dx;
        }
        for i in 0..n_x {
            let l = coeffs.loss[i];
            let lambda = decay[i];
            r[i] = lambda * r[i] + (1.0 - lambda) * r_eq[i];
            j[i] = lambda * j[i] + (1.0 - lambda) * go[i] * rho[i] / l + drift[i];
        }
    });
    Ok(())
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

/// Largest `v_max Δt / Δx` allowed.
pub fn check_cfl(v_max: f64, dt: f64, dx: f64, context: &str) -> Result<()> {
    let courant = v_max * dt / dx;
    if courant > 1.0 + 1e-12 {
        return Err(Error::Cfl {
            courant,
            context: context.to_string(),
        });
    }
    Ok(())
}

const GHOST: usize = 2;

/// One transport step for a single velocity row, in place.
fn transport_row(r: &mut [f64], j: &mut [f64], v: f64, dx: f64, dt: f64, scheme: TransportScheme) {
    let n = r.len();
    let c = v * dt / dx;
    // u± on cells -2..n+2; the wall maps u+ ↔ u- since r is even, j odd.
    let mut up = vec![0.0; n + 2 * GHOST];
    let mut um = vec![0.0; n + 2 * GHOST];
    for i in 0..n {
        up[i + GHOST] = r[i] + j[i];
        um[i + GHOST] = r[i] - j[i];
    }
    for g in 0..GHOST {
        up[GHOST - 1 - g] = um[GHOST + g];
        um[GHOST - 1 - g] = up[GHOST + g];
        up[n + GHOST + g] = um[n + GHOST - 1 - g];
        um[n + GHOST + g] = up[n + GHOST - 1 - g];
    }
    let slope = |u: &[f64], p: usize, forward: bool| -> f64 {
        match scheme {
            TransportScheme::Upwind => 0.0,
            TransportScheme::LaxWendroff => {
                if forward {
                    u[p + 1] - u[p]
                } else {
                    u[p] - u[p - 1]
                }
            }
            TransportScheme::Tvd => minmod(u[p + 1] - u[p], u[p] - u[p - 1]),
        }
    };
    let half = 0.5 * (1.0 - c);
    // Face f sits between padded cells f and f + 1, for f = GHOST-1 ..= n+GHOST-1.
    let faces = n + 1;
    let mut flux_p = vec![0.0; faces];
    let mut flux_m = vec![0.0; faces];
    for (q, (fp, fm)) in flux_p.iter_mut().zip(flux_m.iter_mut()).enumerate() {
        let left = q + GHOST - 1;
        let right = left + 1;
        *fp = v * (up[left] + half * slope(&up, left, true));
        *fm = -v * (um[right] - half * slope(&um, right, false));
    }
    let ratio = dt / dx;
    for i in 0..n {
        let dup = -ratio * (flux_p[i + 1] - flux_p[i]);
        let dum = -ratio * (flux_m[i + 1] - flux_m[i]);
        let u_p = up[i + GHOST] + dup;
        let u_m = um[i + GHOST] + dum;
        r[i] = 0.5 * (u_p + u_m);
        j[i] = 0.5 * (u_p - u_m);
    }
}

/// Transport stage `∂ₜr + v∂ₓj = 0`, `∂ₜj + v∂ₓr = 0` over `dt`.
pub fn transport_step(
    state: &mut KineticState1D,
    vgrid: &VelocityGrid1D,
    dx: f64,
    dt: f64,
    scheme: TransportScheme,
    cfl_check: bool,
    exec: Exec,
) -> Result<()> {
    if state.n_half() != vgrid.n_half() {
        return Err(Error::ShapeMismatch("velocity grid does not match state".into()));
    }
    if cfl_check {
        check_cfl(vgrid.v_max(), dt, dx, "1D transport")?;
    }
    let n_x = state.n_x();
    let nodes = vgrid.nodes();
    let (r, j) = state.parts_mut();
    exec.for_each_chunk_pair(r, j, n_x, |k, r, j| transport_row(r, j, nodes[k], dx, dt, scheme));
    Ok(())
}

pub fn transport_step_upwind(
    state: &mut KineticState1D,
    vgrid: &VelocityGrid1D,
    dx: f64,
    dt: f64,
    exec: Exec,
) -> Result<()> {
    transport_step(state, vgrid, dx, dt, TransportScheme::Upwind, true, exec)
}

pub fn transport_step_tvd(
    state: &mut KineticState1D,
    vgrid: &VelocityGrid1D,
    dx: f64,
    dt: f64,
    exec: Exec,
) -> Result<()> {
    transport_step(state, vgrid, dx, dt, TransportScheme::Tvd, true, exec)
}

/// Prolongs one row onto a grid with twice the cells using minmod-limited
/// linear reconstruction. Each coarse cell's two children average to the
/// parent value, so mass and positivity are preserved. `ghosts` are the
/// values just outside the left and right walls.
fn prolong_row(u: &[f64], ghosts: (f64, f64), out: &mut [f64]) {
    let n = u.len();
    for i in 0..n {
        let left = if i == 0 { ghosts.0 } else { u[i - 1] };
        let right = if i + 1 == n { ghosts.1 } else { u[i + 1] };
        let s = minmod(right - u[i], u[i] - left);
        out[2 * i] = u[i] - 0.25 * s;
        out[2 * i + 1] = u[i] + 0.25 * s;
    }
}

/// The state on a grid with twice the cells. `f(x, ±v)` is reconstructed
/// rather than `(r, j)`, with the wall reflecting `+v` into `-v`.
pub fn refine_state(state: &KineticState1D) -> Result<KineticState1D> {
    let n = state.n_x();
    let nh = state.n_half();
    let eps = state.eps();
    let (fp, fm) = state.to_full();
    let mut fine_p = vec![0.0; 2 * n * nh];
    let mut fine_m = vec![0.0; 2 * n * nh];
    for k in 0..nh {
        let p = &fp[k * n..(k + 1) * n];
        let m = &fm[k * n..(k + 1) * n];
        prolong_row(p, (m[0], m[n - 1]), &mut fine_p[2 * k * n..2 * (k + 1) * n]);
        prolong_row(m, (p[0], p[n - 1]), &mut fine_m[2 * k * n..2 * (k + 1) * n]);
    }
    let mut fine = KineticState1D::from_full(2 * n, nh, &fine_p, &fine_m, eps)?;
    fine.time = state.time;
    Ok(fine)
}

/// Time integrator owning the state, its chemoattractant and the grids.
#[derive(Clone, Debug)]
pub struct Solver1D {
    grid: SpatialGrid1D,
    vgrid: VelocityGrid1D,
    config: SchemeConfig,
    builder: ChemoBuilder,
    state: KineticState1D,
    chemo: ChemoField,
    steps: u64,
    aliasing_reported: bool,
}

impl Solver1D {
    pub fn new(
        grid: SpatialGrid1D,
        vgrid: VelocityGrid1D,
        state: KineticState1D,
        config: SchemeConfig,
    ) -> Result<Self> {
        if state.n_x() != grid.n_x() || state.n_half() != vgrid.n_half() {
            return Err(Error::ShapeMismatch(format!(
                "state {}x{} on grid {}x{}",
                state.n_x(),
                state.n_half(),
                grid.n_x(),
                vgrid.n_half()
            )));
        }
        if let DtPolicy::Fixed(dt) | DtPolicy::KineticCfl(dt) = config.dt_policy {
            if !(dt > 0.0) {
                return Err(invalid(format!("time-step parameter must be positive, got {dt}")));
            }
        }
        let builder = ChemoBuilder::new(&grid, config.interpolation)?;
        let chemo = Self::build_chemo(&builder, &state, &vgrid, config.model)?;
        Ok(Self {
            grid,
            vgrid,
            config,
            builder,
            state,
            chemo,
            steps: 0,
            aliasing_reported: false,
        })
    }

    fn build_chemo(
        builder: &ChemoBuilder,
        state: &KineticState1D,
        vgrid: &VelocityGrid1D,
        model: Model1D,
    ) -> Result<ChemoField> {
        let rho = density_1d(state, vgrid);
        builder.build(&rho, vgrid, state.eps(), model == Model1D::Nonlocal)
    }

    fn refresh_chemo(&mut self) -> Result<()> {
        self.chemo = Self::build_chemo(&self.builder, &self.state, &self.vgrid, self.config.model)?;
        if self.chemo.aliasing_risk && !self.aliasing_reported {
            log::warn!(
                "density reaches the boundary cells at t = {}; the convolution may alias",
                self.state.time
            );
            self.aliasing_reported = true;
        }
        Ok(())
    }

    pub fn grid(&self) -> &SpatialGrid1D {
        &self.grid
    }
    pub fn vgrid(&self) -> &VelocityGrid1D {
        &self.vgrid
    }
    pub fn state(&self) -> &KineticState1D {
        &self.state
    }
    pub fn chemo(&self) -> &ChemoField {
        &self.chemo
    }
    pub fn config(&self) -> &SchemeConfig {
        &self.config
    }
    pub fn time(&self) -> f64 {
        self.state.time
    }
    pub fn steps(&self) -> u64 {
        self.steps
    }
    pub fn density(&self) -> Vec<f64> {
        density_1d(&self.state, &self.vgrid)
    }

    pub fn set_dt_policy(&mut self, policy: DtPolicy) {
        self.config.dt_policy = policy;
    }

    /// Time step prescribed by the policy on the current grid.
    pub fn dt(&self) -> f64 {
        self.config
            .dt_policy
            .dt(self.grid.dx(), self.state.eps(), self.vgrid.v_max())
    }

    /// One split step of length `dt`.
    pub fn step(&mut self, dt: f64) -> Result<()> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(invalid(format!("dt must be positive, got {dt}")));
        }
        let cfg = self.config;
        let dx = self.grid.dx();
        let eps = self.state.eps();
        let coeffs = SourceCoefficients::for_model(cfg.model, &self.chemo, &self.vgrid, eps)?;
        match cfg.order {
            SchemeOrder::First => {
                source_step_first_order(&mut self.state, &coeffs, &self.vgrid, dx, dt, cfg.exec)?;
                transport_step(&mut self.state, &self.vgrid, dx, dt, cfg.transport, cfg.cfl_check, cfg.exec)?;
                self.refresh_chemo()?;
            }
            SchemeOrder::Second => {
                source_step_exact(&mut self.state, &coeffs, &self.vgrid, dx, 0.5 * dt, cfg.exec)?;
                transport_step(&mut self.state, &self.vgrid, dx, dt, cfg.transport, cfg.cfl_check, cfg.exec)?;
                self.refresh_chemo()?;
                let coeffs = SourceCoefficients::for_model(cfg.model, &self.chemo, &self.vgrid, eps)?;
                source_step_exact(&mut self.state, &coeffs, &self.vgrid, dx, 0.5 * dt, cfg.exec)?;
            }
        }
        self.steps += 1;
        self.state.time += dt;
        if !self.state.is_finite() {
            return Err(Error::NonFinite {
                step: self.steps,
                time: self.state.time,
                what: "kinetic state".into(),
            });
        }
        Ok(())
    }

    /// One step at the policy time step; returns the step taken.
    pub fn advance(&mut self) -> Result<f64> {
        let dt = self.dt();
        self.step(dt)?;
        Ok(dt)
    }

    /// Advances to `t_end` in equal steps no longer than the policy step.
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

    /// Doubles the spatial resolution in place. The prolongation conserves
    /// mass up to round-off; the remainder is scaled away.
    pub fn refine(&mut self) -> Result<()> {
        let before = mass_1d(&self.density(), &self.grid);
        let mut fine = refine_state(&self.state)?;
        let grid = self.grid.refined();
        let after = mass_1d(&density_1d(&fine, &self.vgrid), &grid);
        if before > 0.0 && after > 0.0 {
            let drift = (after - before).abs() / before;
            if drift > 1e-8 {
                return Err(invalid(format!("refinement changed the mass by {drift:e}")));
            }
            let scale = before / after;
            let (r, j) = fine.parts_mut();
            r.iter_mut().chain(j.iter_mut()).for_each(|v| *v *= scale);
        }
        self.state = fine;
        self.grid = grid;
        self.builder = ChemoBuilder::new(&self.grid, self.config.interpolation)?;
        self.refresh_chemo()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinetic::{init_peaks, mass_1d, Peak, VelocityRule};
    use proptest::prelude::*;

    fn vgrid(n: usize) -> VelocityGrid1D {
        VelocityGrid1D::new(1.0, n, VelocityRule::GaussLegendre).unwrap()
    }

    fn random_state(n_x: usize, n_half: usize, seed: &[f64], eps: f64) -> KineticState1D {
        let len = n_x * n_half;
        let r: Vec<f64> = (0..len).map(|q| 0.2 + seed[q % seed.len()].abs() + 0.01 * q as f64).collect();
        let j: Vec<f64> = (0..len).map(|q| seed[(q * 7 + 3) % seed.len()]).collect();
        KineticState1D::from_parts(n_x, n_half, r, j, eps).unwrap()
    }

    fn smooth_chemo(grid: &SpatialGrid1D, vg: &VelocityGrid1D, eps: f64, model: Model1D) -> ChemoField {
        let b = ChemoBuilder::new(grid, ShiftInterpolation::Fourier).unwrap();
        let rho: Vec<f64> = grid
            .centers()
            .iter()
            .map(|x| (-20.0 * (x - 0.1) * (x - 0.1)).exp() * 5.0)
            .collect();
        b.build(&rho, vg, eps, model == Model1D::Nonlocal).unwrap()
    }

    #[test]
    fn zero_dt_source_is_identity() {
        let g = SpatialGrid1D::new(-1.0, 1.0, 40).unwrap();
        let vg = vgrid(6);
        let seed: Vec<f64> = (0..17).map(|i| (i as f64 * 0.7).sin()).collect();
        let s0 = random_state(40, 6, &seed, 0.3);
        let chemo = smooth_chemo(&g, &vg, 0.3, Model1D::Nonlocal);
        let c = SourceCoefficients::nonlocal(&chemo, &vg, 0.3).unwrap();
        let mut s = s0.clone();
        source_step_first_order(&mut s, &c, &vg, g.dx(), 0.0, Exec::Sequential).unwrap();
        for (a, b) in s.r().iter().chain(s.j()).zip(s0.r().iter().chain(s0.j())) {
            assert!((a - b).abs() < 1e-14);
        }
        let mut s = s0.clone();
        source_step_exact(&mut s, &c, &vg, g.dx(), 0.0, Exec::Sequential).unwrap();
        for (a, b) in s.r().iter().chain(s.j()).zip(s0.r().iter().chain(s0.j())) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn relaxation_to_equilibrium() {
        let g = SpatialGrid1D::new(-1.0, 1.0, 30).unwrap();
        let vg = vgrid(4);
        let seed: Vec<f64> = (0..11).map(|i| (i as f64).cos()).collect();
        let s0 = random_state(30, 4, &seed, 0.5);
        let rho = density_1d(&s0, &vg);
        let c = SourceCoefficients::local(&vec![0.0; 30], &vg, 0.5);
        let mut s = s0.clone();
        source_step_first_order(&mut s, &c, &vg, g.dx(), 1e12, Exec::Sequential).unwrap();
        for k in 0..4 {
            for i in 0..30 {
                assert!((s.r()[k * 30 + i] - 0.5 * rho[i]).abs() < 1e-10);
            }
        }
        // With no chemotactic drift the exact step is e^{-T/ε²} relaxation.
        let mut s = s0.clone();
        let t = 0.25;
        source_step_exact(&mut s, &c, &vg, g.dx(), t, Exec::Sequential).unwrap();
        let lambda = (-1.0f64).exp();
        for q in 0..120 {
            let expect = lambda * s0.r()[q] + (1.0 - lambda) * 0.5 * rho[q % 30];
            assert!((s.r()[q] - expect).abs() < 1e-14);
        }
    }

    proptest! {
        #[test]
        fn source_steps_preserve_density(
            seed in prop::collection::vec(-1.0f64..1.0, 13),
            dt in 1e-6f64..10.0,
            eps in prop::sample::select(vec![1.0, 0.3, 1e-3, 1e-6]),
            nonlocal in any::<bool>(),
        ) {
            let g = SpatialGrid1D::new(-1.0, 1.0, 48).unwrap();
            let vg = vgrid(8);
            let model = if nonlocal { Model1D::Nonlocal } else { Model1D::Local };
            let chemo = smooth_chemo(&g, &vg, eps, model);
            let c = SourceCoefficients::for_model(model, &chemo, &vg, eps).unwrap();
            let s0 = random_state(48, 8, &seed, eps);
            let rho0 = density_1d(&s0, &vg);
            let scale = rho0.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            for exact in [false, true] {
                let mut s = s0.clone();
                if exact {
                    source_step_exact(&mut s, &c, &vg, g.dx(), dt, Exec::Sequential).unwrap();
                } else {
                    source_step_first_order(&mut s, &c, &vg, g.dx(), dt, Exec::Sequential).unwrap();
                }
                let rho = density_1d(&s, &vg);
                for (a, b) in rho.iter().zip(&rho0) {
                    prop_assert!((a - b).abs() <= 1e-13 * scale);
                }
            }
        }
    }

    #[test]
    fn coefficient_invariants() {
        let g = SpatialGrid1D::new(-1.0, 1.0, 64).unwrap();
        let vg = vgrid(8);
        for model in [Model1D::Nonlocal, Model1D::Local] {
            let chemo = smooth_chemo(&g, &vg, 0.2, model);
            let c = SourceCoefficients::for_model(model, &chemo, &vg, 0.2).unwrap();
            assert!(c.loss.iter().all(|&l| l >= 1.0));
            assert!(c.gain_even.iter().all(|&x| x >= 0.0));
            assert!((c.c1 - 0.5).abs() < 1e-14);
            for i in 0..64 {
                let q: f64 = (0..8).map(|k| 2.0 * vg.weights()[k] * c.gain_even[k * 64 + i]).sum();
                assert!((q - c.loss[i]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn local_kernel_is_the_small_eps_expansion() {
        // Kernel differences scale as ε²; the odd gain carries a 1/ε.
        let g = SpatialGrid1D::new(-1.0, 1.0, 256).unwrap();
        let vg = vgrid(8);
        let diff = |eps: f64| {
            let chemo = smooth_chemo(&g, &vg, eps, Model1D::Nonlocal);
            let a = SourceCoefficients::nonlocal(&chemo, &vg, eps).unwrap();
            let b = SourceCoefficients::local(&chemo.grad_s, &vg, eps);
            let mut e = 0.0f64;
            let mut o = 0.0f64;
            for i in 40..216 {
                for k in 0..8 {
                    let q = k * 256 + i;
                    e = e.max((a.gain_even[q] - b.gain_even[q]).abs());
                    o = o.max(eps * (a.gain_odd[q] - b.gain_odd[q]).abs());
                }
                e = e.max((a.loss[i] - b.loss[i]).abs());
            }
            (e, o)
        };
        let (e1, o1) = diff(0.02);
        let (e2, o2) = diff(0.01);
        assert!(e1 / e2 > 3.0, "even ratio {}", e1 / e2);
        assert!(o1 / o2 > 3.0, "odd ratio {}", o1 / o2);
    }

    #[test]
    fn exact_source_matches_substepped_implicit_euler() {
        let g = SpatialGrid1D::new(-1.0, 1.0, 32).unwrap();
        let vg = vgrid(4);
        let eps = 0.5;
        let chemo = smooth_chemo(&g, &vg, eps, Model1D::Nonlocal);
        let c = SourceCoefficients::nonlocal(&chemo, &vg, eps).unwrap();
        let seed: Vec<f64> = (0..9).map(|i| (i as f64 * 1.3).sin()).collect();
        let s0 = random_state(32, 4, &seed, eps);
        let t = 0.2;
        let mut exact = s0.clone();
        source_step_exact(&mut exact, &c, &vg, g.dx(), t, Exec::Sequential).unwrap();
        let err = |n: usize| {
            let mut s = s0.clone();
            for _ in 0..n {
                source_step_first_order(&mut s, &c, &vg, g.dx(), t / n as f64, Exec::Sequential).unwrap();
            }
            s.r()
                .iter()
                .chain(s.j())
                .zip(exact.r().iter().chain(exact.j()))
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
        };
        let scale = exact.r().iter().chain(exact.j()).fold(0.0f64, |m, x| m.max(x.abs()));
        let (e1, e2) = (err(400), err(800));
        assert!(e2 < 1e-2 * scale, "{e2} vs {scale}");
        let ratio = e1 / e2;
        assert!(ratio > 1.8 && ratio < 2.2, "ratio {ratio}");
    }

    #[test]
    fn exact_source_with_uniform_loss_matches_closed_form() {
        // Constant ∂ₓS makes the loss uniform; then the odd drift term is
        // v ∂ₓ r̃ with r̃ = (1 - 1/ε²)(Tλ rⁿ + r_eq (ε²(1-λ)/L - Tλ)).
        let n = 24;
        let g = SpatialGrid1D::new(-1.0, 1.0, n).unwrap();
        let vg = vgrid(3);
        let eps = 0.4;
        let c = SourceCoefficients::local(&vec![0.7; n], &vg, eps);
        let seed: Vec<f64> = (0..7).map(|i| (i as f64 * 0.9).cos()).collect();
        let s0 = random_state(n, 3, &seed, eps);
        let rho = density_1d(&s0, &vg);
        let t = 0.03;
        let mut s = s0.clone();
        source_step_exact(&mut s, &c, &vg, g.dx(), t, Exec::Sequential).unwrap();
        let e2 = eps * eps;
        let l = c.loss[0];
        let lambda = (-t * l / e2).exp();
        for k in 0..3 {
            let v = vg.nodes()[k];
            let rt: Vec<f64> = (0..n)
                .map(|i| {
                    let q = c.gain_even[k * n + i] * rho[i] / l;
                    (1.0 - 1.0 / e2) * (t * lambda * s0.r()[k * n + i] + q * (e2 * (1.0 - lambda) / l - t * lambda))
                })
                .collect();
            for i in 0..n {
                let left = rt[i.saturating_sub(1)];
                let right = rt[(i + 1).min(n - 1)];
                let expect = lambda * s0.j()[k * n + i]
                    + (1.0 - lambda) * c.gain_odd[k * n + i] * rho[i] / l
                    + v * (right - left) / (2.0 * g.dx());
                assert!((s.j()[k * n + i] - expect).abs() < 1e-12 * (1.0 + expect.abs()));
            }
        }
    }

    #[test]
    fn transport_preserves_constants() {
        let vg = vgrid(5);
        for scheme in [TransportScheme::Upwind, TransportScheme::LaxWendroff, TransportScheme::Tvd] {
            let mut s = KineticState1D::from_parts(20, 5, vec![0.7; 100], vec![0.0; 100], 0.1).unwrap();
            transport_step(&mut s, &vg, 0.1, 0.05, scheme, true, Exec::Sequential).unwrap();
            assert!(s.r().iter().all(|&x| (x - 0.7).abs() < 1e-15));
            assert!(s.j().iter().all(|&x| x.abs() < 1e-15));
        }
    }

    #[test]
    fn upwind_stencil_by_hand() {
        let vg = VelocityGrid1D::new(1.0, 1, VelocityRule::Midpoint).unwrap();
        let v = 0.5;
        let (dx, dt) = (0.1, 0.08);
        let r0 = [1.0, 1.0, 1.0, 0.0, 0.0, 0.0];
        let mut s = KineticState1D::from_parts(6, 1, r0.to_vec(), vec![0.0; 6], 1.0).unwrap();
        transport_step_upwind(&mut s, &vg, dx, dt, Exec::Sequential).unwrap();
        let a = v * dt / (2.0 * dx);
        // r_i' = r_i + a (r_{i+1} - 2 r_i + r_{i-1}), j_i' = -a (r_{i+1} - r_{i-1}).
        let expect_r = [1.0, 1.0, 1.0 - a, a, 0.0, 0.0];
        let expect_j = [0.0, 0.0, a, a, 0.0, 0.0];
        for i in 0..6 {
            assert!((s.r()[i] - expect_r[i]).abs() < 1e-15, "r[{i}]");
            assert!((s.j()[i] - expect_j[i]).abs() < 1e-15, "j[{i}]");
        }
        // A plateau-and-jump profile has zero minmod slopes everywhere.
        let mut t = KineticState1D::from_parts(6, 1, r0.to_vec(), vec![0.0; 6], 1.0).unwrap();
        transport_step_tvd(&mut t, &vg, dx, dt, Exec::Sequential).unwrap();
        assert_eq!(s, t);
    }

    #[test]
    fn transport_conserves_mass_with_reflecting_walls() {
        let vg = vgrid(6);
        let n = 50;
        let seed: Vec<f64> = (0..23).map(|i| (i as f64 * 2.1).sin()).collect();
        for scheme in [TransportScheme::Upwind, TransportScheme::LaxWendroff, TransportScheme::Tvd] {
            let mut s = random_state(n, 6, &seed, 0.7);
            let m0: f64 = density_1d(&s, &vg).iter().sum();
            for _ in 0..50 {
                transport_step(&mut s, &vg, 0.02, 0.015, scheme, true, Exec::Sequential).unwrap();
            }
            let m1: f64 = density_1d(&s, &vg).iter().sum();
            assert!((m1 - m0).abs() < 1e-13 * m0.abs(), "{scheme:?}: {m0} -> {m1}");
        }
    }

    #[test]
    fn cfl_violation_is_reported() {
        let vg = vgrid(3);
        let mut s = KineticState1D::zeros(10, 3, 1.0).unwrap();
        let e = transport_step_upwind(&mut s, &vg, 0.1, 0.2, Exec::Sequential);
        assert!(matches!(e, Err(Error::Cfl { .. })));
        assert!(transport_step(&mut s, &vg, 0.1, 0.2, TransportScheme::Upwind, false, Exec::Sequential).is_ok());
    }

    proptest! {
        #[test]
        fn tvd_creates_no_new_extrema(
            steps in prop::collection::vec(0.0f64..1.0, 30),
            c in 0.05f64..1.0,
        ) {
            // Monotone u+ and u- and one velocity; check bounds over one step.
            let vg = VelocityGrid1D::new(1.0, 1, VelocityRule::Midpoint).unwrap();
            let n = steps.len();
            let mut up = Vec::with_capacity(n);
            let mut acc = 0.0;
            for s in &steps {
                acc += s;
                up.push(acc);
            }
            let um: Vec<f64> = up.iter().map(|x| 2.0 * x + 1.0).collect();
            let r: Vec<f64> = up.iter().zip(&um).map(|(a, b)| 0.5 * (a + b)).collect();
            let j: Vec<f64> = up.iter().zip(&um).map(|(a, b)| 0.5 * (a - b)).collect();
            let mut s = KineticState1D::from_parts(n, 1, r, j, 1.0).unwrap();
            let dx = 0.1;
            transport_step_tvd(&mut s, &vg, dx, c * dx / vg.v_max(), Exec::Sequential).unwrap();
            for i in 2..n - 2 {
                let (a, b) = (s.r()[i] + s.j()[i], s.r()[i] - s.j()[i]);
                prop_assert!(a >= up[i - 1].min(up[i]) - 1e-12 && a <= up[i - 1].max(up[i]) + 1e-12);
                prop_assert!(b >= um[i].min(um[i + 1]) - 1e-12 && b <= um[i].max(um[i + 1]) + 1e-12);
            }
        }
    }

    /// l¹ error after transporting a bump, against the exact translation.
    fn transport_error(n: usize, scheme: TransportScheme) -> f64 {
        let vg = VelocityGrid1D::new(1.0, 1, VelocityRule::Midpoint).unwrap();
        let v = vg.nodes()[0];
        let g = SpatialGrid1D::new(-1.0, 1.0, n).unwrap();
        let bump = |x: f64| (-40.0 * x * x).exp();
        let r: Vec<f64> = g.centers().iter().map(|&x| bump(x)).collect();
        let mut s = KineticState1D::from_parts(n, 1, r.clone(), vec![0.0; n], 1.0).unwrap();
        let dt = 0.4 * g.dx() / v;
        let t_end = 0.2;
        let steps = (t_end / dt).round() as usize;
        for _ in 0..steps {
            transport_step(&mut s, &vg, g.dx(), dt, scheme, true, Exec::Sequential).unwrap();
        }
        let t = steps as f64 * dt;
        g.centers()
            .iter()
            .enumerate()
            .map(|(i, &x)| (s.r()[i] - 0.5 * (bump(x - v * t) + bump(x + v * t))).abs() * g.dx())
            .sum()
    }

    #[test]
    fn second_order_transport_converges() {
        for (scheme, lo) in [(TransportScheme::LaxWendroff, 1.8), (TransportScheme::Tvd, 1.5)] {
            let e1 = transport_error(200, scheme);
            let e2 = transport_error(400, scheme);
            let order = (e1 / e2).log2();
            assert!(order > lo, "{scheme:?}: order {order}");
        }
        let e1 = transport_error(200, TransportScheme::Upwind);
        let e2 = transport_error(400, TransportScheme::Upwind);
        assert!((e1 / e2).log2() > 0.8);
    }

    #[test]
    fn asymptotic_limit_is_keller_segel() {
        // One first-order step at ε → 0 on well-prepared data equals one
        // explicit step of the discrete Keller-Segel operator with the
        // numerical diffusion Δx·(v_max/4)∂ₓₓρ.
        let eps = 1e-8;
        let n = 100;
        let g = SpatialGrid1D::new(-1.0, 1.0, n).unwrap();
        let vg = vgrid(16);
        let peaks = [Peak::new(1.0, 0.05, 30.0)];
        let state = init_peaks(&g, &peaks, std::f64::consts::PI, &vg, eps).unwrap();
        let mut cfg = SchemeConfig::first_order(Model1D::Local);
        cfg.dt_policy = DtPolicy::Parabolic;
        cfg.exec = Exec::Sequential;
        let mut solver = Solver1D::new(g.clone(), vg.clone(), state, cfg).unwrap();
        let rho0 = solver.density();
        let grad_s = solver.chemo().grad_s.clone();
        let dt = solver.dt();
        solver.step(dt).unwrap();
        let rho1 = solver.density();

        let dx = g.dx();
        let (d, chi, c_v) = (1.0 / 3.0, 1.0 / 3.0, 0.25);
        let at = |u: &[f64], i: isize, odd: bool| -> f64 {
            let n = u.len() as isize;
            if i < 0 {
                if odd { -u[(-i - 1) as usize] } else { u[(-i - 1) as usize] }
            } else if i >= n {
                if odd { -u[(2 * n - 1 - i) as usize] } else { u[(2 * n - 1 - i) as usize] }
            } else {
                u[i as usize]
            }
        };
        let flux: Vec<f64> = (0..n as isize)
            .map(|i| {
                let drho = (at(&rho0, i + 1, false) - at(&rho0, i - 1, false)) / (2.0 * dx);
                d * drho - chi * rho0[i as usize] * grad_s[i as usize]
            })
            .collect();
        let mut max_update = 0.0f64;
        let mut max_err = 0.0f64;
        for i in 0..n as isize {
            let div = (at(&flux, i + 1, true) - at(&flux, i - 1, true)) / (2.0 * dx);
            let lap = (at(&rho0, i + 1, false) - 2.0 * rho0[i as usize] + at(&rho0, i - 1, false)) / (dx * dx);
            let expect = div + dx * c_v * lap;
            let got = (rho1[i as usize] - rho0[i as usize]) / dt;
            max_update = max_update.max(expect.abs());
            max_err = max_err.max((got - expect).abs());
        }
        assert!(max_err <= 1e-6 * max_update, "err {max_err}, scale {max_update}");
    }

    #[test]
    fn solver_conserves_mass_and_is_deterministic() {
        let g = SpatialGrid1D::new(-1.0, 1.0, 120).unwrap();
        let vg = vgrid(8);
        for model in [Model1D::Nonlocal, Model1D::Local] {
            let run = |exec: Exec| {
                let state = init_peaks(&g, &[Peak::new(1.0, 0.0, 80.0)], 4.0, &vg, 0.1).unwrap();
                let mut cfg = SchemeConfig::second_order(model);
                cfg.exec = exec;
                let mut s = Solver1D::new(g.clone(), vg.clone(), state, cfg).unwrap();
                for _ in 0..100 {
                    s.advance().unwrap();
                }
                s
            };
            let a = run(Exec::Sequential);
            let b = run(Exec::Parallel);
            assert_eq!(a.state(), b.state());
            let m = mass_1d(&a.density(), &g);
            assert!((m - 4.0).abs() < 1e-11 * 4.0, "{model:?}: {m}");
        }
    }

    #[test]
    fn zero_data_stays_zero_and_small_steps_are_near_identity() {
        let g = SpatialGrid1D::new(-1.0, 1.0, 40).unwrap();
        let vg = vgrid(4);
        let mut s = Solver1D::new(
            g.clone(),
            vg.clone(),
            KineticState1D::zeros(40, 4, 1.0).unwrap(),
            SchemeConfig::second_order(Model1D::Nonlocal),
        )
        .unwrap();
        for _ in 0..5 {
            s.advance().unwrap();
        }
        assert!(s.state().r().iter().chain(s.state().j()).all(|&x| x == 0.0));

        let state = init_peaks(&g, &[Peak::new(1.0, 0.0, 20.0)], 1.0, &vg, 1.0).unwrap();
        let mut s = Solver1D::new(g, vg, state.clone(), SchemeConfig::second_order(Model1D::Nonlocal)).unwrap();
        s.step(1e-7).unwrap();
        let diff = s
            .state()
            .r()
            .iter()
            .zip(state.r())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(diff < 1e-4);
    }

    #[test]
    fn advance_to_lands_on_target() {
        let g = SpatialGrid1D::new(-1.0, 1.0, 40).unwrap();
        let vg = vgrid(4);
        let state = init_peaks(&g, &[Peak::new(1.0, 0.0, 20.0)], 1.0, &vg, 0.5).unwrap();
        let mut s = Solver1D::new(g, vg, state, SchemeConfig::first_order(Model1D::Local)).unwrap();
        s.advance_to(0.0123).unwrap();
        assert_eq!(s.time(), 0.0123);
        assert!(s.steps() >= 1);
    }

    #[test]
    fn refinement_preserves_mass_and_positivity() {
        let g = SpatialGrid1D::new(-1.0, 1.0, 64).unwrap();
        let vg = vgrid(6);
        let state = init_peaks(&g, &[Peak::new(1.0, 0.3, 50.0)], 2.0, &vg, 0.2).unwrap();
        let mut s = Solver1D::new(g, vg.clone(), state, SchemeConfig::second_order(Model1D::Nonlocal)).unwrap();
        for _ in 0..10 {
            s.advance().unwrap();
        }
        let m0 = mass_1d(&s.density(), s.grid());
        let (p, m) = s.state().to_full();
        let floor = p.iter().chain(&m).fold(0.0f64, |a, &x| a.min(x));
        let dt0 = s.dt();
        s.refine().unwrap();
        assert_eq!(s.grid().n_x(), 128);
        assert!(s.dt() < dt0);
        let m1 = mass_1d(&s.density(), s.grid());
        assert!((m1 - m0).abs() < 1e-13 * m0);
        let (p, m) = s.state().to_full();
        assert!(p.iter().chain(&m).all(|&x| x >= floor - 1e-15));
        s.advance().unwrap();
    }
}
