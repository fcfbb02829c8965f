use std::str::FromStr;

use super::grid::{PolarGrid2D, SpatialGrid1D, VelocityGrid1D};
use super::state::{make_uniform_equilibrium, mass_2d, KineticState1D, RadialState2D};
use crate::error::{invalid, Error, Result};

/// One Gaussian-like bump `weight · exp(-width (x - center)²)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Peak {
    pub weight: f64,
    pub center: f64,
    pub width: f64,
}

impl Peak {
    pub const fn new(weight: f64, center: f64, width: f64) -> Self {
        Self {
            weight,
            center,
            width,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let d = x - self.center;
        self.weight * (-self.width * d * d).exp()
    }
}

/// Parses `w:c:width`.
impl FromStr for Peak {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Config(format!("peak `{s}` is not of the form w:c:width")));
        }
        let num = |p: &str| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("bad number `{p}` in peak `{s}`")))
        };
        Ok(Peak::new(num(parts[0])?, num(parts[1])?, num(parts[2])?))
    }
}

impl std::fmt::Display for Peak {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}:{}", self.weight, self.center, self.width)
    }
}

/// Sampled initial density `C Σ_j w_j exp(-width_j (x - c_j)²)` with `C`
/// fixed by the discrete mass `Δx Σ ρ_i = M`.
pub fn initial_density(grid: &SpatialGrid1D, peaks: &[Peak], mass: f64) -> Result<Vec<f64>> {
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(invalid(format!("mass must be positive, got {mass}")));
    }
    if peaks.is_empty() {
        return Err(invalid("at least one peak is required"));
    }
    if let Some(p) = peaks.iter().find(|p| !(p.width > 0.0)) {
        return Err(invalid(format!("peak width must be positive, got {}", p.width)));
    }
    let raw: Vec<f64> = grid
        .centers()
        .iter()
        .map(|&x| peaks.iter().map(|p| p.eval(x)).sum())
        .collect();
    let raw_mass = grid.dx() * raw.iter().sum::<f64>();
    if !(raw_mass > 0.0) || !raw_mass.is_finite() {
        return Err(invalid(format!(
            "unnormalised initial mass is {raw_mass}; cannot normalise to {mass}"
        )));
    }
    let c = mass / raw_mass;
    Ok(raw.into_iter().map(|x| c * x).collect())
}

/// Well-prepared 1D data `f^I = ρ^I(x) F(v)`, so `j = 0`.
pub fn init_peaks(
    grid: &SpatialGrid1D,
    peaks: &[Peak],
    mass: f64,
    vgrid: &VelocityGrid1D,
    eps: f64,
) -> Result<KineticState1D> {
    let rho = initial_density(grid, peaks, mass)?;
    let f_eq = make_uniform_equilibrium(vgrid);
    let n_x = grid.n_x();
    let mut r = Vec::with_capacity(n_x * vgrid.n_half());
    for &fk in &f_eq {
        r.extend(rho.iter().map(|&p| p * fk));
    }
    KineticState1D::from_parts(n_x, vgrid.n_half(), r, vec![0.0; n_x * vgrid.n_half()], eps)
}

/// Radial equilibrium `F(ω) = 1 / (π v_max²)`, so that `2π ∫ ω F dω = 1`.
pub fn radial_equilibrium(grid: &PolarGrid2D) -> f64 {
    1.0 / (std::f64::consts::PI * grid.v_max() * grid.v_max())
}

/// `ρ̃^I(r) = C r exp(-width r²)` normalised to `2π Δr Σ ρ̃_i = M`.
pub fn initial_radial_density(grid: &PolarGrid2D, width: f64, mass: f64) -> Result<Vec<f64>> {
    if !(mass >= 0.0 && mass.is_finite()) {
        return Err(invalid(format!("mass must be non-negative, got {mass}")));
    }
    if !(width > 0.0) {
        return Err(invalid(format!("width must be positive, got {width}")));
    }
    let raw: Vec<f64> = grid.radii().iter().map(|&r| r * (-width * r * r).exp()).collect();
    let c = mass / mass_2d(&raw, grid);
    Ok(raw.into_iter().map(|x| c * x).collect())
}

/// Well-prepared radial data `h^I = ρ̃^I(r) F(ω)`.
pub fn init_radial(grid: &PolarGrid2D, width: f64, mass: f64, eps: f64) -> Result<RadialState2D> {
    let rho = initial_radial_density(grid, width, mass)?;
    let f = radial_equilibrium(grid);
    let nt = grid.n_theta();
    let mut big_r = Vec::with_capacity(grid.len());
    for _ in 0..grid.n_omega() {
        for &p in &rho {
            big_r.extend(std::iter::repeat_n(p * f, nt));
        }
    }
    RadialState2D::from_parts(grid, big_r, vec![0.0; grid.len()], eps)
}
