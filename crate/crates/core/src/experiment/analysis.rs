//! Post-processing: grid convergence, distance to equilibrium, stationary
//! rescaling and self-similar variables.

use crate::error::{invalid, Error, Result};
use crate::exec::Exec;
use crate::kinetic::{density_1d, make_uniform_equilibrium, KineticState1D, PolarGrid2D, RadialState2D, SpatialGrid1D, VelocityGrid1D};

/// A field stored as `[outer][cell][inner]`, where `cell` runs along the
/// refined axis. `weights` holds one quadrature weight per `(outer, inner)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldSnapshot {
    pub cells: usize,
    pub inner: usize,
    pub dx: f64,
    pub values: Vec<f64>,
    pub weights: Vec<f64>,
}

impl FieldSnapshot {
    pub fn new(cells: usize, inner: usize, dx: f64, values: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if cells == 0 || inner == 0 || values.len() % (cells * inner) != 0 {
            return Err(Error::ShapeMismatch(format!(
                "{} values do not tile {cells} cells × {inner}",
                values.len()
            )));
        }
        if weights.len() * cells != values.len() {
            return Err(Error::ShapeMismatch("one weight per (outer, inner) pair is required".into()));
        }
        Ok(Self {
            cells,
            inner,
            dx,
            values,
            weights,
        })
    }

    /// A density on a 1D grid.
    pub fn density(rho: &[f64], dx: f64) -> Self {
        Self::new(rho.len(), 1, dx, rho.to_vec(), vec![1.0]).expect("one row")
    }

    /// `f(x, ±v_k)`, rows `+v_k` then `-v_k`, weighted by `w_k`.
    pub fn kinetic_1d(state: &KineticState1D, vgrid: &VelocityGrid1D, grid: &SpatialGrid1D) -> Self {
        let (fp, fm) = state.to_full();
        let mut values = fp;
        values.extend(fm);
        let mut weights = vgrid.weights().to_vec();
        weights.extend_from_slice(vgrid.weights());
        Self::new(grid.n_x(), 1, grid.dx(), values, weights).expect("state matches its grid")
    }

    /// `h(r, ω, θ)` weighted by `w_ω Δθ`.
    pub fn radial(state: &RadialState2D, grid: &PolarGrid2D) -> Self {
        let nt = grid.n_theta();
        let weights = grid
            .omega_weights()
            .iter()
            .flat_map(|w| std::iter::repeat_n(w * grid.dtheta(), nt))
            .collect();
        Self::new(grid.n_r(), nt, grid.dr(), state.to_h(), weights).expect("state matches its grid")
    }

    fn outer(&self) -> usize {
        self.values.len() / (self.cells * self.inner)
    }

    /// Averages cell pairs onto the grid with half as many cells.
    pub fn restrict(&self) -> Result<Self> {
        if self.cells % 2 != 0 {
            return Err(invalid(format!("cannot restrict {} cells", self.cells)));
        }
        let half = self.cells / 2;
        let (outer, inner) = (self.outer(), self.inner);
        let mut values = vec![0.0; outer * half * inner];
        for o in 0..outer {
            for c in 0..half {
                for k in 0..inner {
                    let a = self.values[(o * self.cells + 2 * c) * inner + k];
                    let b = self.values[(o * self.cells + 2 * c + 1) * inner + k];
                    values[(o * half + c) * inner + k] = 0.5 * (a + b);
                }
            }
        }
        Self::new(half, inner, 2.0 * self.dx, values, self.weights.clone())
    }

    /// Grid-weighted `l¹` norm of `self - other` (or of `self` alone).
    pub fn l1(&self, other: Option<&Self>) -> Result<f64> {
        if let Some(o) = other {
            if o.values.len() != self.values.len() || o.cells != self.cells || o.inner != self.inner {
                return Err(Error::ShapeMismatch("snapshots have different shapes".into()));
            }
        }
        let (cells, inner) = (self.cells, self.inner);
        let mut acc = 0.0;
        for (q, v) in self.values.iter().enumerate() {
            let o = q / (cells * inner);
            let w = self.weights[o * inner + q % inner];
            let d = v - other.map_or(0.0, |s| s.values[q]);
            acc += w * d.abs();
        }
        Ok(self.dx * acc)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub dx: f64,
    /// `‖f_Δx - f_2Δx‖₁ / ‖f_2Δx(0)‖₁`.
    pub e1: f64,
    /// `log₂(e_2Δx / e_Δx)`, absent on the first row.
    pub order: Option<f64>,
}

/// Relative `l¹` differences between successive levels, coarse to fine.
/// `final_states[l]` and `initial_states[l]` belong to level `l`, each level
/// doubling the previous one.
pub fn convergence_table(final_states: &[FieldSnapshot], initial_states: &[FieldSnapshot]) -> Result<Vec<ConvergenceRow>> {
    if final_states.len() < 3 {
        return Err(invalid(format!(
            "convergence needs at least 3 levels, got {}",
            final_states.len()
        )));
    }
    if initial_states.len() != final_states.len() {
        return Err(Error::ShapeMismatch("one initial snapshot per level is required".into()));
    }
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(final_states.len() - 1);
    for l in 1..final_states.len() {
        let (coarse, fine) = (&final_states[l - 1], &final_states[l]);
        if fine.cells != 2 * coarse.cells {
            return Err(invalid(format!(
                "levels must double: {} cells after {}",
                fine.cells, coarse.cells
            )));
        }
        let norm = initial_states[l - 1].l1(None)?;
        let e1 = if norm > 0.0 {
            fine.restrict()?.l1(Some(coarse))? / norm
        } else {
            0.0
        };
        let order = rows.last().map(|p| (p.e1 / e1).log2());
        rows.push(ConvergenceRow { dx: fine.dx, e1, order });
    }
    Ok(rows)
}

/// Runs `run(n)` for every level (concurrently when `exec` is parallel) and
/// tabulates the differences. `run` returns the snapshots at `t = 0` and at
/// the evaluation time.
pub fn convergence_order<F>(levels: &[usize], exec: Exec, run: F) -> Result<Vec<ConvergenceRow>>
where
    F: Fn(usize) -> Result<(FieldSnapshot, FieldSnapshot)> + Sync + Send,
{
    if levels.len() < 3 {
        return Err(invalid(format!("convergence needs at least 3 levels, got {}", levels.len())));
    }
    let results = exec.map(levels, |&n| run(n));
    let mut initial = Vec::with_capacity(levels.len());
    let mut finals = Vec::with_capacity(levels.len());
    for r in results {
        let (i, f) = r?;
        initial.push(i);
        finals.push(f);
    }
    convergence_table(&finals, &initial)
}

/// Least-squares slope of `log y` against `log x`.
pub fn fit_order(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(invalid("need at least two (x, y) pairs"));
    }
    if x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return Err(invalid("log-log fit needs positive data"));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return Err(invalid("x values must not all coincide"));
    }
    Ok(sxy / sxx)
}

/// `‖f - ρF‖₂ = (Δx Σ_i Σ_{±,k} w_k (f(x_i, ±v_k) - ρ_i F_k)²)^{1/2}`.
pub fn equilibrium_distance(state: &KineticState1D, vgrid: &VelocityGrid1D, grid: &SpatialGrid1D) -> f64 {
    let rho = density_1d(state, vgrid);
    let f_eq = make_uniform_equilibrium(vgrid);
    let (fp, fm) = state.to_full();
    let n = grid.n_x();
    let mut acc = 0.0;
    for (k, (&w, &fk)) in vgrid.weights().iter().zip(&f_eq).enumerate() {
        for i in 0..n {
            let e = rho[i] * fk;
            acc += w * ((fp[k * n + i] - e).powi(2) + (fm[k * n + i] - e).powi(2));
        }
    }
    (grid.dx() * acc).sqrt()
}

/// `Δx Σ |a - b|`.
pub fn l1_distance(a: &[f64], b: &[f64], dx: f64) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch(format!("{} vs {} cells", a.len(), b.len())));
    }
    Ok(dx * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>())
}

/// `F̃ = f/ρ` at one station with its two velocity moments.
#[derive(Clone, Debug, PartialEq)]
pub struct Station {
    /// Rescaled position `(x - x_c)/ε` of the requested station.
    pub y: f64,
    /// Cell centre actually used.
    pub x: f64,
    pub v: Vec<f64>,
    pub ftilde: Vec<f64>,
    /// `∫ F̃ dv`.
    pub zeroth: f64,
    /// `∫ v F̃ dv`.
    pub first: f64,
}

/// `ερ_ε(x_c + εy)` on `y = (x - x_c)/ε` and the stations.
#[derive(Clone, Debug, PartialEq)]
pub struct StationaryProfile {
    pub eps: f64,
    pub center: f64,
    pub y: Vec<f64>,
    pub eps_rho: Vec<f64>,
    pub stations: Vec<Station>,
}

/// Rescales a long-time 1D kinetic state about its centre of mass. Stations
/// where `ρ < rho_floor` are skipped.
pub fn stationary_diagnostics(
    state: &KineticState1D,
    vgrid: &VelocityGrid1D,
    grid: &SpatialGrid1D,
    stations: &[f64],
    rho_floor: f64,
) -> StationaryProfile {
    let eps = state.eps();
    let rho = density_1d(state, vgrid);
    let xs = grid.centers();
    let mass: f64 = rho.iter().sum();
    let center = if mass > 0.0 {
        rho.iter().zip(&xs).map(|(r, x)| r * x).sum::<f64>() / mass
    } else {
        0.0
    };
    let y: Vec<f64> = xs.iter().map(|x| (x - center) / eps).collect();
    let eps_rho: Vec<f64> = rho.iter().map(|r| eps * r).collect();
    let (fp, fm) = state.to_full();
    let n = grid.n_x();
    let nodes = vgrid.nodes();
    let weights = vgrid.weights();
    let nh = vgrid.n_half();
    let mut out = Vec::new();
    for &ys in stations {
        let x = center + eps * ys;
        let i = (((x - grid.x_min()) / grid.dx()).floor().max(0.0) as usize).min(n - 1);
        if !(rho[i] >= rho_floor) || rho[i] <= 0.0 {
            continue;
        }
        let mut v = Vec::with_capacity(2 * nh);
        let mut ft = Vec::with_capacity(2 * nh);
        let mut w = Vec::with_capacity(2 * nh);
        for k in (0..nh).rev() {
            v.push(-nodes[k]);
            ft.push(fm[k * n + i] / rho[i]);
            w.push(weights[k]);
        }
        for k in 0..nh {
            v.push(nodes[k]);
            ft.push(fp[k * n + i] / rho[i]);
            w.push(weights[k]);
        }
        let zeroth = ft.iter().zip(&w).map(|(f, w)| f * w).sum();
        let first = ft.iter().zip(&w).zip(&v).map(|((f, w), v)| f * w * v).sum();
        out.push(Station {
            y: ys,
            x: xs[i],
            v,
            ftilde: ft,
            zeroth,
            first,
        });
    }
    StationaryProfile {
        eps,
        center,
        y,
        eps_rho,
        stations: out,
    }
}

/// Linear interpolation of `(xs, ys)` at `x`, zero outside.
fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if xs.is_empty() || x < xs[0] || x > xs[xs.len() - 1] {
        return 0.0;
    }
    let k = xs.partition_point(|&p| p <= x);
    if k == 0 {
        return ys[0];
    }
    if k == xs.len() {
        return ys[xs.len() - 1];
    }
    let (x0, x1) = (xs[k - 1], xs[k]);
    let t = (x - x0) / (x1 - x0);
    ys[k - 1] * (1.0 - t) + ys[k] * t
}

/// `∫|a - b| / ∫|a|` on the part of `a`'s axis covered by `b`, with `b`
/// interpolated linearly.
pub fn overlay_l1(a: &StationaryProfile, b: &StationaryProfile) -> f64 {
    let (lo, hi) = (b.y[0], b.y[b.y.len() - 1]);
    let mut num = 0.0;
    let mut den = 0.0;
    for (y, ra) in a.y.iter().zip(&a.eps_rho) {
        if *y < lo || *y > hi {
            continue;
        }
        num += (ra - interpolate(&b.y, &b.eps_rho, *y)).abs();
        den += ra.abs();
    }
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// Profiles in `y = x/R`, `τ = log R`, `R = √(1 + 2t)`, with the decay of
/// `‖ρ̃(τ) - ρ̃_final‖₁`.
#[derive(Clone, Debug, PartialEq)]
pub struct SelfSimilarSeries {
    pub tau: Vec<f64>,
    pub y: Vec<f64>,
    pub profiles: Vec<Vec<f64>>,
    pub l1_to_final: Vec<f64>,
}

/// `ρ̃(τ, y) = R ρ(t, R y)` on the original cell centres, interpolated
/// linearly in `x`.
pub fn self_similar_profile(times: &[f64], rhos: &[Vec<f64>], grid: &SpatialGrid1D) -> Result<SelfSimilarSeries> {
    if times.len() != rhos.len() || times.is_empty() {
        return Err(invalid("need one density per time and at least one time"));
    }
    if rhos.iter().any(|r| r.len() != grid.n_x()) {
        return Err(Error::ShapeMismatch("densities must live on the grid".into()));
    }
    let xs = grid.centers();
    let mut tau = Vec::with_capacity(times.len());
    let mut profiles = Vec::with_capacity(times.len());
    for (&t, rho) in times.iter().zip(rhos) {
        if !(t >= 0.0) {
            return Err(invalid(format!("times must be non-negative, got {t}")));
        }
        let r = (1.0 + 2.0 * t).sqrt();
        tau.push(r.ln());
        profiles.push(xs.iter().map(|&y| r * interpolate(&xs, rho, r * y)).collect::<Vec<f64>>());
    }
    let last = profiles.last().expect("non-empty").clone();
    let l1_to_final = profiles
        .iter()
        .map(|p| l1_distance(p, &last, grid.dx()))
        .collect::<Result<Vec<f64>>>()?;
    Ok(SelfSimilarSeries {
        tau,
        y: xs,
        profiles,
        l1_to_final,
    })
}
