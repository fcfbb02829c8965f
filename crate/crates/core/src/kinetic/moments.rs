//! Velocity moments that set the macroscopic coefficients.

use std::f64::consts::{FRAC_PI_2, PI};

use super::grid::{PolarGrid2D, VelocityGrid1D};
use super::quadrature::gauss_legendre_on;

/// `D = ∫_V v² F(v) dv` for an isotropic profile given on the positive nodes.
pub fn diffusion_1d(vgrid: &VelocityGrid1D, equilibrium: &[f64]) -> f64 {
    vgrid
        .nodes()
        .iter()
        .zip(vgrid.weights())
        .zip(equilibrium)
        .map(|((v, w), f)| 2.0 * w * v * v * f)
        .sum()
}

/// `χ = ½ ∫_V v² dv`.
pub fn sensitivity_1d(vgrid: &VelocityGrid1D) -> f64 {
    0.5 * vgrid.integrate_full(|v| v * v)
}

/// `c₁ = ½ ∫_V |v| dv`, the loss rate of the local kernel per unit `ε|∂ₓS|`.
pub fn drift_loss_1d(vgrid: &VelocityGrid1D) -> f64 {
    0.5 * vgrid.integrate_full(f64::abs)
}

/// Number of Gauss-Legendre nodes per half of `[0, π]` used for the angular
/// moments below; `|cos θ|` is smooth on each half.
const ANGULAR_NODES: usize = 32;

/// `∫_0^π g(θ) dθ` with the integrand split at `π/2`.
pub fn angular_integral(g: impl Fn(f64) -> f64) -> f64 {
    [(0.0, FRAC_PI_2), (FRAC_PI_2, PI)]
        .iter()
        .map(|&(a, b)| {
            let (t, w) = gauss_legendre_on(ANGULAR_NODES, a, b);
            t.iter().zip(&w).map(|(&t, &w)| w * g(t)).sum::<f64>()
        })
        .sum()
}

/// `∫_0^π ∫_0^{v_max} ω^p g(θ) dω dθ` with the speed rule of `grid`.
fn speed_angle_moment(grid: &PolarGrid2D, power: i32, g: impl Fn(f64) -> f64) -> f64 {
    let speed: f64 = grid
        .omegas()
        .iter()
        .zip(grid.omega_weights())
        .map(|(o, w)| w * o.powi(power))
        .sum();
    speed * angular_integral(g)
}

/// `c₂ = ∫_0^π ∫_0^{v_max} ω² |cos θ| dω dθ` (analytically `2 v_max³ / 3`).
pub fn radial_drift_loss(grid: &PolarGrid2D) -> f64 {
    speed_angle_moment(grid, 2, |t| t.cos().abs())
}

/// `D = 2 ∫∫ ω³ cos²θ F dω dθ = π ∫ ω³ F dω` for constant `F`.
pub fn radial_diffusion(grid: &PolarGrid2D, equilibrium: f64) -> f64 {
    2.0 * equilibrium * speed_angle_moment(grid, 3, |t| t.cos().powi(2))
}

/// `χ = ∫∫ ω³ cos²θ dω dθ` (analytically `π v_max⁴ / 8`).
pub fn radial_sensitivity(grid: &PolarGrid2D) -> f64 {
    speed_angle_moment(grid, 3, |t| t.cos().powi(2))
}
