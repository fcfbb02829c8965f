use std::f64::consts::PI;

use super::quadrature::gauss_legendre_on;
use crate::error::{invalid, Result};

/// Placement of the positive velocity nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum VelocityRule {
    /// Cell-centred nodes `(k + 1/2) v_max / n`, equal weights.
    Midpoint,
    /// Gauss-Legendre nodes on (0, v_max); exact for polynomials of degree `2n - 1`.
    #[default]
    GaussLegendre,
}

/// Positive half `V+ = (0, v_max]` of a symmetric velocity space, with a
/// quadrature rule. Integrals over `V = [-v_max, v_max]` are taken by
/// pairing each node `v_k` with its mirror `-v_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct VelocityGrid1D {
    v_max: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    rule: VelocityRule,
}

impl VelocityGrid1D {
    pub fn new(v_max: f64, n_half: usize, rule: VelocityRule) -> Result<Self> {
        if !(v_max > 0.0 && v_max.is_finite()) {
            return Err(invalid(format!("v_max must be positive, got {v_max}")));
        }
        if n_half == 0 {
            return Err(invalid("velocity grid needs at least one positive node"));
        }
        let (nodes, weights) = match rule {
            VelocityRule::Midpoint => {
                let dv = v_max / n_half as f64;
                (
                    (0..n_half).map(|k| (k as f64 + 0.5) * dv).collect(),
                    vec![dv; n_half],
                )
            }
            VelocityRule::GaussLegendre => gauss_legendre_on(n_half, 0.0, v_max),
        };
        Ok(Self {
            v_max,
            nodes,
            weights,
            rule,
        })
    }

    pub fn v_max(&self) -> f64 {
        self.v_max
    }

    pub fn n_half(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn rule(&self) -> VelocityRule {
        self.rule
    }

    /// `|V|`, the measure of the full velocity interval.
    pub fn volume(&self) -> f64 {
        2.0 * self.v_max
    }

    /// Quadrature of `g` over the full interval `V`.
    pub fn integrate_full(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&v, &w)| w * (g(v) + g(-v)))
            .sum()
    }
}

/// Uniform cell-centred grid on `[x_min, x_max]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpatialGrid1D {
    x_min: f64,
    x_max: f64,
    n_x: usize,
}

impl SpatialGrid1D {
    pub fn new(x_min: f64, x_max: f64, n_x: usize) -> Result<Self> {
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(invalid(format!("bad domain [{x_min}, {x_max}]")));
        }
        if n_x < 3 {
            return Err(invalid(format!("need at least 3 cells, got {n_x}")));
        }
        Ok(Self { x_min, x_max, n_x })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn dx(&self) -> f64 {
        self.length() / self.n_x as f64
    }

    pub fn center(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.dx()
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n_x).map(|i| self.center(i)).collect()
    }

    /// The grid with twice as many cells on the same domain.
    pub fn refined(&self) -> Self {
        Self {
            n_x: 2 * self.n_x,
            ..self.clone()
        }
    }
}

/// Cell-centred `(r, θ)` grid with a Gauss-Legendre speed rule on `(0, v_max)`
/// for the spherically symmetric 2D model.
///
/// `r_i = (i + 1/2) Δr` and `θ_j = (j + 1/2) Δθ` (zero-based), so `r_0 = Δr/2`
/// and `θ_0 = Δθ/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolarGrid2D {
    r_max: f64,
    n_r: usize,
    n_theta: usize,
    speeds: VelocityGrid1D,
}

impl PolarGrid2D {
    pub fn new(r_max: f64, n_r: usize, n_omega: usize, n_theta: usize, v_max: f64) -> Result<Self> {
        if !(r_max > 0.0) {
            return Err(invalid(format!("r_max must be positive, got {r_max}")));
        }
        if n_r < 3 {
            return Err(invalid(format!("need at least 3 radial cells, got {n_r}")));
        }
        if n_theta < 2 || n_theta % 2 != 0 {
            return Err(invalid(format!("n_theta must be even and >= 2, got {n_theta}")));
        }
        let speeds = VelocityGrid1D::new(v_max, n_omega, VelocityRule::GaussLegendre)?;
        Ok(Self {
            r_max,
            n_r,
            n_theta,
            speeds,
        })
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }
    pub fn n_r(&self) -> usize {
        self.n_r
    }
    pub fn n_theta(&self) -> usize {
        self.n_theta
    }
    pub fn n_omega(&self) -> usize {
        self.speeds.n_half()
    }
    pub fn v_max(&self) -> f64 {
        self.speeds.v_max()
    }
    pub fn dr(&self) -> f64 {
        self.r_max / self.n_r as f64
    }
    pub fn dtheta(&self) -> f64 {
        PI / self.n_theta as f64
    }
    pub fn r(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.dr()
    }
    pub fn theta(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.dtheta()
    }
    pub fn radii(&self) -> Vec<f64> {
        (0..self.n_r).map(|i| self.r(i)).collect()
    }
    pub fn omegas(&self) -> &[f64] {
        self.speeds.nodes()
    }
    pub fn omega_weights(&self) -> &[f64] {
        self.speeds.weights()
    }
    /// Index of the direction `π - θ_j`.
    pub fn mirror(&self, j: usize) -> usize {
        self.n_theta - 1 - j
    }
    /// Number of nodes in one ω-slice.
    pub fn slice_len(&self) -> usize {
        self.n_r * self.n_theta
    }
    pub fn len(&self) -> usize {
        self.n_omega() * self.slice_len()
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
    pub fn refined(&self) -> Self {
        Self {
            n_r: 2 * self.n_r,
            ..self.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn velocity_grid_invariants() {
        for rule in [VelocityRule::Midpoint, VelocityRule::GaussLegendre] {
            let g = VelocityGrid1D::new(1.5, 64, rule).unwrap();
            assert!(g.nodes().iter().all(|&v| v > 0.0 && v <= 1.5));
            assert!(g.nodes().windows(2).all(|p| p[0] < p[1]));
            let sw: f64 = g.weights().iter().sum();
            assert!((sw - 1.5).abs() < 1e-14);
            let f = 1.0 / g.volume();
            assert!((g.integrate_full(|_| f) - 1.0).abs() < 1e-14);
        }
        assert!(VelocityGrid1D::new(0.0, 4, VelocityRule::Midpoint).is_err());
        assert!(VelocityGrid1D::new(1.0, 0, VelocityRule::Midpoint).is_err());
    }

    #[test]
    fn spatial_grid() {
        let g = SpatialGrid1D::new(-1.0, 1.0, 100).unwrap();
        assert_eq!(g.dx(), 0.02);
        assert!((g.center(0) + 0.99).abs() < 1e-15);
        let c = g.centers();
        assert!(c.windows(2).all(|p| ((p[1] - p[0]) - 0.02).abs() < 1e-14));
        assert_eq!(g.refined().n_x(), 200);
        assert!(SpatialGrid1D::new(1.0, -1.0, 10).is_err());
    }

    #[test]
    fn polar_grid_offsets() {
        let g = PolarGrid2D::new(2.0, 250, 16, 16, 1.0).unwrap();
        assert_eq!(g.r(0), g.dr() / 2.0);
        assert_eq!(g.theta(0), g.dtheta() / 2.0);
        assert!((0..16).all(|j| g.theta(j) > 0.0 && g.theta(j) < PI));
        assert!((g.theta(3) + g.theta(g.mirror(3)) - PI).abs() < 1e-14);
        assert!(PolarGrid2D::new(2.0, 250, 16, 15, 1.0).is_err());
    }
}
