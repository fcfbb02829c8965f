//! Chemoattractant: logarithmic-kernel convolution in 1D, the radial integral
//! form in 2D, gradients, and the shifted increments `δᵉS(x, v)` sensed by
//! the nonlocal turning kernel.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{invalid, Result};
use crate::kinetic::{PolarGrid2D, SpatialGrid1D, VelocityGrid1D};

/// Fraction of the mass sitting in the two outermost cells above which the
/// convolution is flagged as an aliasing risk.
const BOUNDARY_MASS_TOLERANCE: f64 = 1e-12;

/// How the kernel `-(1/Nπ) log|x|` is turned into grid weights.
///
/// `Sampled` takes point values at `m Δx` and the exact average only in the
/// singular cell. Its quadrature error near the singularity is `O(Δx) ρ(x)`,
/// which leaves the gradient of S, and every drift built on it, first-order
/// accurate. `CellAverage` integrates the kernel over every cell, so a
/// piecewise-constant density is convolved exactly and S is second order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KernelQuadrature {
    Sampled,
    #[default]
    CellAverage,
}

/// Mean of `log|x|` over `[(m - 1/2)Δx, (m + 1/2)Δx]`.
fn log_cell_average(m: usize, dx: f64) -> f64 {
    if m == 0 {
        return (0.5 * dx).ln() - 1.0;
    }
    let m = m as f64;
    let u = 0.5 / m;
    (m * dx).ln() + (m + 0.5) * u.ln_1p() - (m - 0.5) * (-u).ln_1p() - 1.0
}

fn log_kernel(m: usize, dx: f64, dimension: u32, quadrature: KernelQuadrature) -> f64 {
    let scale = -1.0 / (dimension as f64 * PI);
    match quadrature {
        KernelQuadrature::Sampled if m > 0 => scale * (m as f64 * dx).ln(),
        _ => scale * log_cell_average(m, dx),
    }
}

/// FFT convolution with the logarithmic kernel on a fixed grid.
///
/// The density is zero-extended to twice the grid length, which makes the
/// circular convolution equal to the linear one on the original cells.
#[derive(Clone)]
pub struct LogConvolver {
    n: usize,
    dx: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    kernel_hat: Vec<Complex<f64>>,
}

impl std::fmt::Debug for LogConvolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LogConvolver")
            .field("n", &self.n)
            .field("dx", &self.dx)
            .finish()
    }
}

impl LogConvolver {
    pub fn new(grid: &SpatialGrid1D, dimension: u32) -> Result<Self> {
        Self::with_quadrature(grid, dimension, KernelQuadrature::default())
    }

    pub fn with_quadrature(grid: &SpatialGrid1D, dimension: u32, quadrature: KernelQuadrature) -> Result<Self> {
        if dimension == 0 {
            return Err(invalid("kernel dimension must be at least 1"));
        }
        let n = grid.n_x();
        let dx = grid.dx();
        let len = 2 * n;
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(len);
        let inverse = planner.plan_fft_inverse(len);
        let mut kernel_hat = vec![Complex::new(0.0, 0.0); len];
        kernel_hat[0].re = log_kernel(0, dx, dimension, quadrature);
        for m in 1..n {
            let k = log_kernel(m, dx, dimension, quadrature);
            kernel_hat[m].re = k;
            kernel_hat[len - m].re = k;
        }
        forward.process(&mut kernel_hat);
        Ok(Self {
            n,
            dx,
            forward,
            inverse,
            kernel_hat,
        })
    }

    /// `S_i = Δx Σ_j K(x_i - x_j) ρ_j`.
    pub fn convolve(&self, rho: &[f64]) -> Vec<f64> {
        assert_eq!(rho.len(), self.n, "density does not match the convolution grid");
        let len = 2 * self.n;
        let mut buf = vec![Complex::new(0.0, 0.0); len];
        for (b, &r) in buf.iter_mut().zip(rho) {
            b.re = r * self.dx;
        }
        self.forward.process(&mut buf);
        for (b, k) in buf.iter_mut().zip(&self.kernel_hat) {
            *b *= k;
        }
        self.inverse.process(&mut buf);
        let scale = 1.0 / len as f64;
        buf[..self.n].iter().map(|c| c.re * scale).collect()
    }
}

/// One-shot version of [`LogConvolver::convolve`].
pub fn convolve_log(rho: &[f64], grid: &SpatialGrid1D, dimension: u32) -> Result<Vec<f64>> {
    if rho.len() != grid.n_x() {
        return Err(invalid(format!(
            "density has {} cells, grid has {}",
            rho.len(),
            grid.n_x()
        )));
    }
    Ok(LogConvolver::new(grid, dimension)?.convolve(rho))
}

/// Mass fraction carried by the first and last cell.
pub fn boundary_mass_fraction(rho: &[f64]) -> f64 {
    let total: f64 = rho.iter().map(|x| x.abs()).sum();
    if total == 0.0 {
        return 0.0;
    }
    (rho[0].abs() + rho[rho.len() - 1].abs()) / total
}

/// How `S(x ± εv)` is reconstructed between cell centres.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ShiftInterpolation {
    /// Piecewise-linear between centres.
    Linear,
    /// Trigonometric interpolation of the mirror-extended samples.
    #[default]
    Fourier,
}

/// Evaluates shifted increments `S(x_i + s) - S(x_i)` of cell-centred data.
///
/// Outside the domain `S` is continued by mirror reflection about the
/// boundary faces, which is the even extension compatible with
/// `∂ₓS = 0` there.
///
/// The Fourier mode interpolates `S - g`, where the quadratic `g` carries
/// the one-sided wall slopes of `S`, and adds `g` back at the mirrored
/// point. The mirrored samples of `S` itself have a slope jump at each
/// wall whenever `∂ₓS ≠ 0` there, and the trigonometric interpolant of such
/// data has gradient errors of order `Δx` across the whole interior.
#[derive(Clone)]
pub struct ShiftInterpolator {
    n: usize,
    dx: f64,
    length: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for ShiftInterpolator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ShiftInterpolator").field("n", &self.n).finish()
    }
}

fn reflect(m: i64, n: i64) -> usize {
    let p = m.rem_euclid(2 * n);
    (if p < n { p } else { 2 * n - 1 - p }) as usize
}

/// Quadratic `g(y) = a y + b y²/2` in the distance `y` from the left wall,
/// with `g'` equal to the second-order one-sided slopes of the samples at
/// both walls.
#[derive(Clone, Copy, Debug)]
struct WallTrend {
    a: f64,
    b: f64,
    length: f64,
}

impl WallTrend {
    fn new(s: &[f64], dx: f64) -> Self {
        let n = s.len();
        let length = n as f64 * dx;
        if n < 3 {
            return Self { a: 0.0, b: 0.0, length };
        }
        let left = (-2.0 * s[0] + 3.0 * s[1] - s[2]) / dx;
        let right = (2.0 * s[n - 1] - 3.0 * s[n - 2] + s[n - 3]) / dx;
        Self {
            a: left,
            b: (right - left) / length,
            length,
        }
    }

    /// `g` at the mirror image of `y` in `[0, length]`.
    fn at(&self, y: f64) -> f64 {
        let period = 2.0 * self.length;
        let q = y.rem_euclid(period);
        let y = if q > self.length { period - q } else { q };
        y * (self.a + 0.5 * self.b * y)
    }
}

impl ShiftInterpolator {
    pub fn new(grid: &SpatialGrid1D) -> Self {
        let n = grid.n_x();
        let mut planner = FftPlanner::new();
        Self {
            n,
            dx: grid.dx(),
            length: grid.length(),
            forward: planner.plan_fft_forward(2 * n),
            inverse: planner.plan_fft_inverse(2 * n),
        }
    }

    fn check_shift(&self, s: f64) -> Result<()> {
        if !(s.is_finite() && s.abs() <= self.length) {
            return Err(invalid(format!(
                "shift {s} exceeds the reflection margin {}",
                self.length
            )));
        }
        Ok(())
    }

    /// For every `s` in `shifts`, returns `(S(x + s) - S(x), S(x - s) - S(x))`.
    pub fn differences(
        &self,
        s_values: &[f64],
        shifts: &[f64],
        mode: ShiftInterpolation,
    ) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
        assert_eq!(s_values.len(), self.n);
        for &s in shifts {
            self.check_shift(s)?;
        }
        Ok(match mode {
            ShiftInterpolation::Linear => shifts
                .iter()
                .map(|&s| (self.linear(s_values, s), self.linear(s_values, -s)))
                .collect(),
            ShiftInterpolation::Fourier => self.fourier(s_values, shifts),
        })
    }

    fn linear(&self, s_values: &[f64], shift: f64) -> Vec<f64> {
        let n = self.n as i64;
        let p = shift / self.dx;
        let m = p.floor();
        let theta = p - m;
        let m = m as i64;
        (0..n)
            .map(|i| {
                let si = s_values[i as usize];
                let a = s_values[reflect(i + m, n)] - si;
                let b = s_values[reflect(i + m + 1, n)] - si;
                (1.0 - theta) * a + theta * b
            })
            .collect()
    }

    fn fourier(&self, s_values: &[f64], shifts: &[f64]) -> Vec<(Vec<f64>, Vec<f64>)> {
        let n = self.n;
        let len = 2 * n;
        let trend = WallTrend::new(s_values, self.dx);
        let y: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * self.dx).collect();
        let mut spectrum = vec![Complex::new(0.0, 0.0); len];
        for i in 0..n {
            let d = s_values[i] - trend.at(y[i]);
            spectrum[i].re = d;
            spectrum[len - 1 - i].re = d;
        }
        self.forward.process(&mut spectrum);
        let wave = 2.0 * PI / (len as f64 * self.dx);
        let scale = 1.0 / len as f64;
        let mut buf = vec![Complex::new(0.0, 0.0); len];
        shifts
            .iter()
            .map(|&s| {
                // Both shifted fields are real, so +s rides in the real part and
                // -s in the imaginary part of a single inverse transform.
                for (k, (b, &c)) in buf.iter_mut().zip(&spectrum).enumerate() {
                    let (plus, minus) = if k == n {
                        let re = (PI * s / self.dx).cos() - 1.0;
                        (Complex::new(re, 0.0), Complex::new(re, 0.0))
                    } else {
                        let kk = if k < n { k as f64 } else { k as f64 - len as f64 };
                        let (sn, cs) = (wave * kk * s).sin_cos();
                        (Complex::new(cs - 1.0, sn), Complex::new(cs - 1.0, -sn))
                    };
                    *b = c * plus + Complex::new(0.0, 1.0) * c * minus;
                }
                self.inverse.process(&mut buf);
                let p = (0..n)
                    .map(|i| buf[i].re * scale + trend.at(y[i] + s) - trend.at(y[i]))
                    .collect();
                let m = (0..n)
                    .map(|i| buf[i].im * scale + trend.at(y[i] - s) - trend.at(y[i]))
                    .collect();
                (p, m)
            })
            .collect()
    }
}

/// Direct evaluation of the Fourier-mode reconstruction used by
/// [`ShiftInterpolator`] at arbitrary points (O(n) per point).
pub fn fourier_interpolant(s_values: &[f64], grid: &SpatialGrid1D, points: &[f64]) -> Vec<f64> {
    let n = s_values.len();
    let len = 2 * n;
    let trend = WallTrend::new(s_values, grid.dx());
    let detrended: Vec<f64> = s_values
        .iter()
        .enumerate()
        .map(|(i, &v)| v - trend.at((i as f64 + 0.5) * grid.dx()))
        .collect();
    let ext: Vec<f64> = detrended.iter().chain(detrended.iter().rev()).copied().collect();
    // Real DFT coefficients of the even sequence.
    let x0 = grid.center(0);
    let dx = grid.dx();
    let coeffs: Vec<Complex<f64>> = (0..=n)
        .map(|k| {
            ext.iter()
                .enumerate()
                .map(|(m, &e)| {
                    let a = -2.0 * PI * (k * m) as f64 / len as f64;
                    Complex::new(a.cos(), a.sin()) * e
                })
                .sum()
        })
        .collect();
    points
        .iter()
        .map(|&x| {
            let p = (x - x0) / dx;
            let mut acc = coeffs[0].re;
            for (k, c) in coeffs.iter().enumerate().take(n).skip(1) {
                let a = 2.0 * PI * k as f64 * p / len as f64;
                acc += 2.0 * (c * Complex::new(a.cos(), a.sin())).re;
            }
            acc += coeffs[n].re * (PI * p).cos();
            acc / len as f64 + trend.at(x - grid.x_min())
        })
        .collect()
}

/// Positive increments `(S(x ± εv_k) - S(x))₊` and their velocity integral.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftTables {
    /// `δᵉS(x_i, v_k)`, velocity-major.
    pub plus: Vec<f64>,
    /// `δᵉS(x_i, -v_k)`, velocity-major.
    pub minus: Vec<f64>,
    /// `⟨δᵉS⟩(x_i) = ∫_V δᵉS(x_i, v') dv'` by the trapezoidal rule.
    pub bracket: Vec<f64>,
}

/// Builds [`ShiftTables`] for the velocity nodes of `vgrid`.
///
/// The bracket uses the trapezoidal rule on the nodes
/// `-v_max, -v_n, …, -v_1, 0, v_1, …, v_n, v_max`, with `δᵉS(x, 0) = 0`.
pub fn shift_tables(
    s_values: &[f64],
    interp: &ShiftInterpolator,
    vgrid: &VelocityGrid1D,
    eps: f64,
    mode: ShiftInterpolation,
) -> Result<ShiftTables> {
    if !(eps > 0.0) {
        return Err(invalid(format!("eps must be positive, got {eps}")));
    }
    let n = s_values.len();
    let nodes = vgrid.nodes();
    let v_max = vgrid.v_max();
    let add_end = v_max - nodes[nodes.len() - 1] > 1e-14 * v_max;
    let mut shifts: Vec<f64> = nodes.iter().map(|v| eps * v).collect();
    if add_end {
        shifts.push(eps * v_max);
    }
    let diffs = interp.differences(s_values, &shifts, mode)?;
    let n_half = nodes.len();
    let mut plus = Vec::with_capacity(n * n_half);
    let mut minus = Vec::with_capacity(n * n_half);
    for (p, m) in diffs.iter().take(n_half) {
        plus.extend(p.iter().map(|d| d.max(0.0)));
        minus.extend(m.iter().map(|d| d.max(0.0)));
    }
    // Speeds and values on the positive half including 0 (and v_max).
    let mut speeds = Vec::with_capacity(n_half + 2);
    speeds.push(0.0);
    speeds.extend_from_slice(nodes);
    if add_end {
        speeds.push(v_max);
    }
    let mut bracket = vec![0.0; n];
    for side in 0..2 {
        let value = |idx: usize, i: usize| -> f64 {
            if idx == 0 {
                0.0
            } else {
                let (p, m) = &diffs[idx - 1];
                if side == 0 {
                    p[i].max(0.0)
                } else {
                    m[i].max(0.0)
                }
            }
        };
        for seg in 0..speeds.len() - 1 {
            let h = 0.5 * (speeds[seg + 1] - speeds[seg]);
            for (i, b) in bracket.iter_mut().enumerate() {
                *b += h * (value(seg, i) + value(seg + 1, i));
            }
        }
    }
    Ok(ShiftTables {
        plus,
        minus,
        bracket,
    })
}

/// Centred differences in the interior; the two boundary cells carry the
/// Neumann value 0.
pub fn grad_s_1d(s_values: &[f64], grid: &SpatialGrid1D) -> Vec<f64> {
    let n = s_values.len();
    let inv = 0.5 / grid.dx();
    let mut g = vec![0.0; n];
    for i in 1..n - 1 {
        g[i] = (s_values[i + 1] - s_values[i - 1]) * inv;
    }
    g
}

/// `∂ᵣS(r_i) = -(1/r_i) ∫_0^{r_i} ρ̃ dr` with a cumulative midpoint sum.
pub fn grad_s_radial(rho_tilde: &[f64], grid: &PolarGrid2D) -> Vec<f64> {
    let dr = grid.dr();
    let mut acc = 0.0;
    rho_tilde
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let inside = acc + 0.5 * p * dr;
            acc += p * dr;
            -inside / grid.r(i)
        })
        .collect()
}

/// `∂ᵣS` on the faces `r_{i+1/2} = (i + 1) Δr`, where the enclosed mass is
/// an exact partial sum. Entry `i` is the face between cells `i` and `i + 1`.
pub fn grad_s_radial_faces(rho_tilde: &[f64], grid: &PolarGrid2D) -> Vec<f64> {
    let dr = grid.dr();
    let mut acc = 0.0;
    rho_tilde
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            acc += p * dr;
            -acc / ((i + 1) as f64 * dr)
        })
        .collect()
}

/// Chemoattractant and derived quantities on a 1D grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ChemoField {
    pub s_values: Vec<f64>,
    pub grad_s: Vec<f64>,
    /// Present for the nonlocal kernel only.
    pub shifts: Option<ShiftTables>,
    /// Set when the density touches the boundary cells.
    pub aliasing_risk: bool,
}

impl ChemoField {
    pub fn linf_grad(&self) -> f64 {
        self.grad_s.iter().fold(0.0, |m, g| m.max(g.abs()))
    }
}

/// Caches the transforms needed to rebuild [`ChemoField`]s on one grid.
#[derive(Clone, Debug)]
pub struct ChemoBuilder {
    grid: SpatialGrid1D,
    convolver: LogConvolver,
    interp: ShiftInterpolator,
    pub mode: ShiftInterpolation,
}

impl ChemoBuilder {
    pub fn new(grid: &SpatialGrid1D, mode: ShiftInterpolation) -> Result<Self> {
        Ok(Self {
            grid: grid.clone(),
            convolver: LogConvolver::new(grid, 1)?,
            interp: ShiftInterpolator::new(grid),
            mode,
        })
    }

    pub fn grid(&self) -> &SpatialGrid1D {
        &self.grid
    }

    pub fn convolve(&self, rho: &[f64]) -> Vec<f64> {
        self.convolver.convolve(rho)
    }

    /// `S = S[ρ]`, its gradient, and (if `with_shifts`) the shift tables.
    pub fn build(&self, rho: &[f64], vgrid: &VelocityGrid1D, eps: f64, with_shifts: bool) -> Result<ChemoField> {
        let s_values = self.convolver.convolve(rho);
        let grad_s = grad_s_1d(&s_values, &self.grid);
        let shifts = if with_shifts {
            Some(shift_tables(&s_values, &self.interp, vgrid, eps, self.mode)?)
        } else {
            None
        };
        Ok(ChemoField {
            s_values,
            grad_s,
            shifts,
            aliasing_risk: boundary_mass_fraction(rho) > BOUNDARY_MASS_TOLERANCE,
        })
    }
}
