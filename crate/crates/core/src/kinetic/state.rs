//! Kinetic unknowns in even/odd parity form.
//!
//! In 1D, `f(x, ±v)` is stored as `r = (f(v) + f(-v)) / 2` and
//! `j = (f(v) - f(-v)) / (2ε)` on the positive velocity nodes. In the radial
//! 2D model the same split is applied to `h = r f` under the reflection
//! `θ ↦ π - θ`.

use super::grid::{PolarGrid2D, SpatialGrid1D, VelocityGrid1D};
use crate::error::{invalid, Error, Result};

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("eps must be positive, got {eps}")))
    }
}

/// Split `f` given on `+v_k` (`f_plus`) and `-v_k` (`f_minus`) into `(r, j)`.
pub fn parity_split(f_plus: &[f64], f_minus: &[f64], eps: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    check_eps(eps)?;
    if f_plus.len() != f_minus.len() {
        return Err(Error::ShapeMismatch(format!(
            "f(+v) has {} values, f(-v) has {}",
            f_plus.len(),
            f_minus.len()
        )));
    }
    let inv = 0.5 / eps;
    let r = f_plus.iter().zip(f_minus).map(|(a, b)| 0.5 * (a + b)).collect();
    let j = f_plus.iter().zip(f_minus).map(|(a, b)| inv * (a - b)).collect();
    Ok((r, j))
}

/// Recover `(f(+v), f(-v)) = (r + εj, r - εj)`.
pub fn parity_merge(r: &[f64], j: &[f64], eps: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if r.len() != j.len() {
        return Err(Error::ShapeMismatch(format!(
            "r has {} values, j has {}",
            r.len(),
            j.len()
        )));
    }
    let plus = r.iter().zip(j).map(|(r, j)| r + eps * j).collect();
    let minus = r.iter().zip(j).map(|(r, j)| r - eps * j).collect();
    Ok((plus, minus))
}

/// `F(v) = 1/|V|` on every positive node.
pub fn make_uniform_equilibrium(vgrid: &VelocityGrid1D) -> Vec<f64> {
    vec![1.0 / vgrid.volume(); vgrid.n_half()]
}

/// 1D kinetic state. Both components are stored velocity-major: entry
/// `k * n_x + i` holds the value at `(x_i, v_k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct KineticState1D {
    n_x: usize,
    n_half: usize,
    r: Vec<f64>,
    j: Vec<f64>,
    pub time: f64,
    eps: f64,
}

impl KineticState1D {
    pub fn from_parts(n_x: usize, n_half: usize, r: Vec<f64>, j: Vec<f64>, eps: f64) -> Result<Self> {
        check_eps(eps)?;
        let len = n_x * n_half;
        if r.len() != len || j.len() != len {
            return Err(Error::ShapeMismatch(format!(
                "expected {n_x} x {n_half} = {len} values, got r: {}, j: {}",
                r.len(),
                j.len()
            )));
        }
        Ok(Self {
            n_x,
            n_half,
            r,
            j,
            time: 0.0,
            eps,
        })
    }

    pub fn zeros(n_x: usize, n_half: usize, eps: f64) -> Result<Self> {
        Self::from_parts(n_x, n_half, vec![0.0; n_x * n_half], vec![0.0; n_x * n_half], eps)
    }

    /// Build from the full distribution, laid out like the state itself.
    pub fn from_full(n_x: usize, n_half: usize, f_plus: &[f64], f_minus: &[f64], eps: f64) -> Result<Self> {
        let (r, j) = parity_split(f_plus, f_minus, eps)?;
        Self::from_parts(n_x, n_half, r, j, eps)
    }

    /// `(f(x_i, +v_k), f(x_i, -v_k))` in the state layout.
    pub fn to_full(&self) -> (Vec<f64>, Vec<f64>) {
        parity_merge(&self.r, &self.j, self.eps).expect("state components share a shape")
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }
    pub fn n_half(&self) -> usize {
        self.n_half
    }
    pub fn eps(&self) -> f64 {
        self.eps
    }
    pub fn r(&self) -> &[f64] {
        &self.r
    }
    pub fn j(&self) -> &[f64] {
        &self.j
    }
    pub fn r_mut(&mut self) -> &mut [f64] {
        &mut self.r
    }
    pub fn j_mut(&mut self) -> &mut [f64] {
        &mut self.j
    }
    pub fn parts_mut(&mut self) -> (&mut [f64], &mut [f64]) {
        (&mut self.r, &mut self.j)
    }
    pub fn r_row(&self, k: usize) -> &[f64] {
        &self.r[k * self.n_x..(k + 1) * self.n_x]
    }
    pub fn j_row(&self, k: usize) -> &[f64] {
        &self.j[k * self.n_x..(k + 1) * self.n_x]
    }

    pub fn is_finite(&self) -> bool {
        self.r.iter().chain(&self.j).all(|x| x.is_finite())
    }

    pub fn density(&self, vgrid: &VelocityGrid1D) -> Vec<f64> {
        density_1d(self, vgrid)
    }
}

/// `ρ_i = 2 Σ_k w_k r(x_i, v_k)`; the odd part does not contribute.
pub fn density_1d(state: &KineticState1D, vgrid: &VelocityGrid1D) -> Vec<f64> {
    let n = state.n_x();
    let mut rho = vec![0.0; n];
    for (k, &w) in vgrid.weights().iter().enumerate() {
        let w2 = 2.0 * w;
        for (acc, r) in rho.iter_mut().zip(state.r_row(k)) {
            *acc += w2 * r;
        }
    }
    rho
}

/// `Δx Σ_i ρ_i`.
pub fn mass_1d(rho: &[f64], grid: &SpatialGrid1D) -> f64 {
    grid.dx() * rho.iter().sum::<f64>()
}

/// Radial 2D state. Entry `(m * n_r + i) * n_theta + j` holds the value at
/// `(ω_m, r_i, θ_j)`; both components live on the full `θ ∈ (0, π)` grid.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialState2D {
    n_omega: usize,
    n_r: usize,
    n_theta: usize,
    big_r: Vec<f64>,
    big_j: Vec<f64>,
    pub time: f64,
    eps: f64,
}

impl RadialState2D {
    pub fn from_parts(grid: &PolarGrid2D, big_r: Vec<f64>, big_j: Vec<f64>, eps: f64) -> Result<Self> {
        check_eps(eps)?;
        if big_r.len() != grid.len() || big_j.len() != grid.len() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} values, got R: {}, J: {}",
                grid.len(),
                big_r.len(),
                big_j.len()
            )));
        }
        Ok(Self {
            n_omega: grid.n_omega(),
            n_r: grid.n_r(),
            n_theta: grid.n_theta(),
            big_r,
            big_j,
            time: 0.0,
            eps,
        })
    }

    pub fn zeros(grid: &PolarGrid2D, eps: f64) -> Result<Self> {
        Self::from_parts(grid, vec![0.0; grid.len()], vec![0.0; grid.len()], eps)
    }

    /// `R = (h(θ) + h(π-θ)) / 2`, `J = (h(θ) - h(π-θ)) / (2ε)`.
    pub fn from_h(grid: &PolarGrid2D, h: &[f64], eps: f64) -> Result<Self> {
        check_eps(eps)?;
        if h.len() != grid.len() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} values of h, got {}",
                grid.len(),
                h.len()
            )));
        }
        let nt = grid.n_theta();
        let mut big_r = vec![0.0; h.len()];
        let mut big_j = vec![0.0; h.len()];
        for (row, (rr, jj)) in h
            .chunks(nt)
            .zip(big_r.chunks_mut(nt).zip(big_j.chunks_mut(nt)))
        {
            for t in 0..nt {
                let a = row[t];
                let b = row[nt - 1 - t];
                rr[t] = 0.5 * (a + b);
                jj[t] = 0.5 * (a - b) / eps;
            }
        }
        Self::from_parts(grid, big_r, big_j, eps)
    }

    /// `h = R + εJ` on the full θ grid.
    pub fn to_h(&self) -> Vec<f64> {
        self.big_r
            .iter()
            .zip(&self.big_j)
            .map(|(r, j)| r + self.eps * j)
            .collect()
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }
    pub fn big_r(&self) -> &[f64] {
        &self.big_r
    }
    pub fn big_j(&self) -> &[f64] {
        &self.big_j
    }
    pub fn parts_mut(&mut self) -> (&mut [f64], &mut [f64]) {
        (&mut self.big_r, &mut self.big_j)
    }
    pub fn shape(&self) -> (usize, usize, usize) {
        (self.n_omega, self.n_r, self.n_theta)
    }
    pub fn is_finite(&self) -> bool {
        self.big_r.iter().chain(&self.big_j).all(|x| x.is_finite())
    }
}

/// `ρ̃_i = 2 Σ_{m,j} w_m Δθ ω_m R(ω_m, r_i, θ_j)`.
pub fn density_2d(state: &RadialState2D, grid: &PolarGrid2D) -> Vec<f64> {
    let nr = grid.n_r();
    let nt = grid.n_theta();
    let dtheta = grid.dtheta();
    let mut rho = vec![0.0; nr];
    for (m, (&om, &w)) in grid.omegas().iter().zip(grid.omega_weights()).enumerate() {
        let c = 2.0 * w * om * dtheta;
        let slice = &state.big_r()[m * nr * nt..(m + 1) * nr * nt];
        for (acc, row) in rho.iter_mut().zip(slice.chunks(nt)) {
            *acc += c * row.iter().sum::<f64>();
        }
    }
    rho
}

/// `M = 2π Δr Σ_i ρ̃_i`.
pub fn mass_2d(rho_tilde: &[f64], grid: &PolarGrid2D) -> f64 {
    2.0 * std::f64::consts::PI * grid.dr() * rho_tilde.iter().sum::<f64>()
}
