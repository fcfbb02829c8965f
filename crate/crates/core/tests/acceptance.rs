//! Acceptance gate. Prints one `criterion N: PASS|FAIL` line per criterion
//! and exits with status 1 if any of them fails.
//!
//! Run with `cargo test --release --test acceptance`. Set
//! `ACCEPTANCE_ONLY=2,5` to run a subset.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use chemotaxis_ap::chemo::{ChemoBuilder, KernelQuadrature, LogConvolver, ShiftInterpolation};
use chemotaxis_ap::experiment::run::{level_sizes, with_cells};
use chemotaxis_ap::experiment::{
    adapt_if_needed, blowup_histories, converge_at, eps_convergence, overlay_l1, run_scenario, scenario, AdaptDecision,
    AdaptiveController, ExperimentConfig, RunStatus, RunSummary,
};
use chemotaxis_ap::kinetic::moments::radial_drift_loss;
use chemotaxis_ap::kinetic::{
    init_peaks, init_radial, mass_1d, mass_2d, parity_merge, parity_split, KineticState1D, Peak, PolarGrid2D,
    SpatialGrid1D, VelocityGrid1D, VelocityRule,
};
use chemotaxis_ap::macro_ks::{detect_blowup, BlowupCriterion, BlowupStatus, KSCoefficients, KsConfig, KsSolver1D};
use chemotaxis_ap::radial::{RadialConfig, RadialSolver};
use chemotaxis_ap::solver1d::{
    source_step_exact, source_step_first_order, Model1D, SchemeConfig, Solver1D, SourceCoefficients,
};
use chemotaxis_ap::{Exec, Result};
use proptest::prelude::*;
use proptest::test_runner::{Config as PropConfig, TestCaseError, TestRunner};

type Outcome = Result<(bool, String)>;

fn ok(pass: bool, detail: String) -> Outcome {
    Ok((pass, detail))
}

fn all(results: &[(bool, String)]) -> (bool, String) {
    let pass = results.iter().all(|r| r.0);
    let detail = results.iter().map(|r| r.1.as_str()).collect::<Vec<_>>().join("; ");
    (pass, detail)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn sc(name: &str) -> ExperimentConfig {
    scenario(name).expect("built-in scenario")
}

fn orders(rows: &[chemotaxis_ap::experiment::ConvergenceRow]) -> Vec<f64> {
    rows.iter().filter_map(|r| r.order).collect()
}

fn fmt_list(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>().join(", ")
}

/// Runs shared by criteria 5 and 7, keyed by `(ε, n_x)`.
#[derive(Default)]
struct Shared {
    kinetic_4pi: BTreeMap<(u64, usize), RunSummary>,
    ks_blowup_time: Option<Option<f64>>,
}

impl Shared {
    fn kinetic(&mut self, eps: f64, n_x: usize) -> Result<&RunSummary> {
        let key = (eps.to_bits(), n_x);
        if !self.kinetic_4pi.contains_key(&key) {
            let mut c = sc("kin-vs-ks-4pi");
            c.eps = eps;
            c.n_x = n_x;
            let summary = run_scenario(&c)?;
            self.kinetic_4pi.insert(key, summary);
        }
        Ok(&self.kinetic_4pi[&key])
    }

    fn ks_blowup(&mut self) -> Result<Option<f64>> {
        if let Some(t) = self.ks_blowup_time {
            return Ok(t);
        }
        let mut c = sc("ks1d-4pi");
        c.n_x = 500;
        let hist = blowup_histories(&c, &[500, 1000, 2000])?;
        let report = detect_blowup(&hist, c.mass, c.x_max - c.x_min, &BlowupCriterion::default())?;
        let t = (report.status == BlowupStatus::BlowUp).then_some(report.t_b).flatten();
        self.ks_blowup_time = Some(t);
        Ok(t)
    }
}

fn criterion_1() -> Outcome {
    let vgrid = VelocityGrid1D::new(1.0, 32, VelocityRule::GaussLegendre)?;
    let one = KSCoefficients::from_velocity_grid(&vgrid);
    let grid = PolarGrid2D::new(1.0, 16, 16, 16, 1.0)?;
    let two = KSCoefficients::from_polar_grid(&grid);
    let c2 = radial_drift_loss(&grid);
    let checks = [
        (one.d_coef, 1.0 / 3.0),
        (one.chi_coef, 1.0 / 3.0),
        (two.d_coef, 0.25),
        (two.chi_coef, PI / 8.0),
        (c2, 2.0 / 3.0),
    ];
    let worst = checks.iter().fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let mc = (one.critical_mass - 2.0 * PI).abs();
    let mks = (two.critical_mass - 16.0).abs();
    ok(
        worst <= 1e-8 && mc <= 1e-12 && mks <= 1e-12,
        format!(
            "max |coef - exact| = {worst:.1e}, M_c = {:.15}, M_KS = {:.15}",
            one.critical_mass, two.critical_mass
        ),
    )
}

fn convergence_sweep(name: &str) -> Outcome {
    let mut parts = Vec::new();
    for eps in [1e-6, 1e-2, 1e-1] {
        let mut c = sc(name);
        c.eps = eps;
        c.n_x = 100;
        let (_, rows) = converge_at(&c, 4, &[c.t_max])?.remove(0);
        let o = orders(&rows);
        let pass = o.iter().all(|p| (1.7..=2.3).contains(p));
        parts.push((pass, format!("eps {eps:e}: orders [{}]", fmt_list(&o))));
    }
    let (pass, detail) = all(&parts);
    ok(pass, format!("{detail} (band [1.7, 2.3])"))
}

fn criterion_4(shared: &mut Shared) -> Outcome {
    let t_b = shared.ks_blowup()?;
    let pass = t_b.is_some_and(|t| (0.0031..=0.0047).contains(&t));
    ok(pass, format!("t_b = {t_b:?} on n_x = 500, 1000, 2000 (window [0.0031, 0.0047])"))
}

fn peak_max(s: &RunSummary) -> f64 {
    s.history.max_rho.iter().fold(0.0, |m: f64, &x| m.max(x))
}

fn criterion_5(shared: &mut Shared) -> Outcome {
    let mut parts = Vec::new();
    for eps in [0.1, 0.05] {
        let (coarse_final, coarse_peak) = {
            let s = shared.kinetic(eps, 1000)?;
            (s.final_record.max_rho, peak_max(s))
        };
        let fine = shared.kinetic(eps, 2000)?;
        let (fine_final, fine_peak) = (fine.final_record.max_rho, peak_max(fine));
        let finite = [coarse_final, coarse_peak, fine_final, fine_peak].iter().all(|x| x.is_finite());
        let d_final = rel(coarse_final, fine_final);
        let d_peak = rel(coarse_peak, fine_peak);
        parts.push((
            finite && d_final <= 0.05 && d_peak <= 0.05,
            format!(
                "eps {eps}: max rho(0.1) = {coarse_final:.4} / {fine_final:.4} (diff {:.2}%), peak diff {:.2}%",
                100.0 * d_final,
                100.0 * d_peak
            ),
        ));
    }
    let t_b = shared.ks_blowup()?;
    parts.push((
        t_b.is_some_and(|t| t < 0.005),
        format!("KS blow-up at {t_b:?} < 0.005"),
    ));
    let (pass, detail) = all(&parts);
    ok(pass, detail)
}

fn criterion_6() -> Outcome {
    let eps = [0.1, 0.05, 0.025, 0.0125];
    let mut parts = Vec::new();
    for name in ["eps-conv-4pi", "eps-conv-pi"] {
        let sweep = eps_convergence(&sc(name), &eps)?;
        let dists: Vec<f64> = sweep.rows.iter().map(|r| r.dist_f_rho_f).collect();
        let order = sweep.order_f.unwrap_or(f64::NAN);
        parts.push((
            order >= 0.7,
            format!("{name}: order {order:.3} from |f - rho F|_2 = [{}]", fmt_list(&dists)),
        ));
    }
    let (pass, detail) = all(&parts);
    ok(pass, format!("{detail} (need >= 0.7)"))
}

fn criterion_7(shared: &mut Shared) -> Outcome {
    let mut profiles = Vec::new();
    let mut parts = Vec::new();
    for eps in [0.1, 0.05] {
        let s = shared.kinetic(eps, 1000)?;
        let p = s.stationary.clone().expect("stations configured");
        let zeroth = p.stations.iter().fold(0.0f64, |m, st| m.max((st.zeroth - 1.0).abs()));
        let first = p.stations.iter().fold(0.0f64, |m, st| m.max(st.first.abs()));
        parts.push((
            zeroth <= 1e-6 && first <= 5e-3,
            format!("eps {eps}: max |int F - 1| = {zeroth:.1e}, max |int vF| = {first:.1e}"),
        ));
        profiles.push(p);
    }
    let d = overlay_l1(&profiles[0], &profiles[1]);
    parts.push((d <= 0.1, format!("overlay l1 = {d:.4}")));
    let (pass, detail) = all(&parts);
    ok(pass, detail)
}

/// Linear interpolation of `(ts, ys)` at `t` inside the sampled range.
fn interp(ts: &[f64], ys: &[f64], t: f64) -> f64 {
    let k = ts.partition_point(|&s| s < t).clamp(1, ts.len() - 1);
    let w = (t - ts[k - 1]) / (ts[k] - ts[k - 1]);
    ys[k - 1] + w * (ys[k] - ys[k - 1])
}

fn criterion_8() -> Outcome {
    let base = sc("local-blowup-5pi");
    let mut fixed = with_cells(&base, 250);
    fixed.adaptive = false;
    let times: Vec<f64> = (1..=20).map(|k| k as f64 * base.t_max / 20.0).collect();
    let tables = converge_at(&fixed, 4, &times)?;
    let finest: Vec<(f64, f64)> = tables
        .iter()
        .map(|(t, rows)| (*t, rows.last().and_then(|r| r.order).unwrap_or(f64::NAN)))
        .collect();
    let early_ok = finest.iter().filter(|(t, _)| *t <= 0.10 + 1e-12).all(|(_, o)| *o > 0.0);
    let late_ok = finest.iter().filter(|(t, _)| *t >= 0.18 - 1e-12).all(|(_, o)| *o <= 0.0);
    let listing = finest
        .iter()
        .filter(|(t, _)| [0.05, 0.1, 0.12, 0.14, 0.16, 0.18, 0.2].iter().any(|s| (s - t).abs() < 1e-9))
        .map(|(t, o)| format!("{t:.2}:{o:.2}"))
        .collect::<Vec<_>>()
        .join(" ");

    let mut adaptive = Vec::new();
    for n in [500usize, 1000] {
        let mut c = base.clone();
        c.n_x = n;
        adaptive.push(run_scenario(&c)?);
    }
    let first: Vec<Option<f64>> = adaptive.iter().map(|s| s.refinements.first().map(|e| e.t)).collect();
    let onset_ok = first.iter().all(|t| t.is_some_and(|t| t > 0.08 && t < 0.20));
    let (coarse, fine) = (&adaptive[0].history, &adaptive[1].history);
    let until = first[0].unwrap_or(base.t_max);
    let agree = coarse
        .times
        .iter()
        .zip(&coarse.max_rho)
        .filter(|(t, _)| **t <= until && **t <= *fine.times.last().unwrap())
        .map(|(&t, &m)| rel(m, interp(&fine.times, &fine.max_rho, t)))
        .fold(0.0f64, f64::max);
    ok(
        early_ok && late_ok && onset_ok && agree <= 0.1,
        format!(
            "finest fixed-grid order by t [{listing}]; first refinement {first:?}; history gap {:.2}% before it",
            100.0 * agree
        ),
    )
}

fn criterion_9() -> Outcome {
    let s = run_scenario(&sc("local-sub-selfsim"))?;
    let series = s.selfsim.expect("self-similar series configured");
    let d = &series.l1_to_final;
    let half = d.len() / 2;
    let decreasing = d[half..].windows(2).all(|w| w[1] < w[0]);
    ok(
        decreasing && d.len() >= 4,
        format!(
            "{} snapshots to tau = {:.3}; last-half distances {:.3e} .. {:.3e}, strictly decreasing: {decreasing}",
            d.len(),
            series.tau.last().copied().unwrap_or(0.0),
            d[half],
            d[d.len() - 2]
        ),
    )
}

fn radial_series(mass: f64, n_r: usize) -> Result<(Vec<f64>, RunSummary)> {
    let mut c = sc(&format!("radial-2d-m{mass}"));
    c.n_r = n_r;
    let s = run_scenario(&c)?;
    let ratio = s.records.iter().map(|r| r.max_rho / mass).collect();
    Ok((ratio, s))
}

fn criterion_10() -> Outcome {
    let mut parts = Vec::new();
    for mass in [1.0, 9.0, 17.0] {
        let (a, _) = radial_series(mass, 250)?;
        let (b, _) = radial_series(mass, 500)?;
        let peak = |x: &[f64]| x.iter().fold(0.0f64, |m, &v| m.max(v));
        let d_peak = rel(peak(&a), peak(&b));
        let d_final = rel(*a.last().unwrap(), *b.last().unwrap());
        let bounded = a.iter().chain(&b).all(|x| x.is_finite());
        parts.push((
            bounded && d_peak <= 0.1 && d_final <= 0.1,
            format!(
                "M {mass}: peak max rho/M {:.3} / {:.3} (diff {:.1}%), final diff {:.1}%",
                peak(&a),
                peak(&b),
                100.0 * d_peak,
                100.0 * d_final
            ),
        ));
    }
    for mass in [29.0, 33.0] {
        let (a, _) = radial_series(mass, 250)?;
        let monotone = a.windows(2).all(|w| w[1] >= w[0]);
        let c = with_cells(&sc(&format!("radial-2d-m{mass}")), 250);
        let (_, rows) = converge_at(&c, 3, &[c.t_max])?.remove(0);
        let o = orders(&rows);
        let last = *o.last().unwrap_or(&f64::NAN);
        parts.push((
            monotone && last <= 0.0,
            format!(
                "M {mass}: max rho/M {:.3} -> {:.1}, monotone {monotone}, order on n_r = {:?}: [{}]",
                a[0],
                a.last().unwrap(),
                level_sizes(&c, 3),
                fmt_list(&o)
            ),
        ));
    }
    let (pass, detail) = all(&parts);
    ok(pass, format!("{detail} (grid tolerance 10%)"))
}

fn prop_check<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> std::result::Result<f64, TestCaseError>,
) -> std::result::Result<f64, String> {
    let mut runner = TestRunner::new(PropConfig {
        cases,
        failure_persistence: None,
        rng_algorithm: proptest::test_runner::RngAlgorithm::ChaCha,
        ..PropConfig::default()
    });
    let worst = std::cell::Cell::new(0.0f64);
    runner
        .run(&strategy, |v| {
            let e = test(v)?;
            worst.set(worst.get().max(e));
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(worst.get())
}

fn state_strategy(n_x: usize, n_half: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>, f64)> {
    let len = n_x * n_half;
    (
        prop::collection::vec(0.0f64..10.0, len),
        prop::collection::vec(0.0f64..10.0, len),
        prop_oneof![Just(1e-6), Just(1e-2), 0.05f64..1.0],
    )
}

fn direct_log_convolution(rho: &[f64], dx: f64) -> Vec<f64> {
    let antiderivative = |x: f64| if x == 0.0 { 0.0 } else { x * x.abs().ln() - x };
    (0..rho.len())
        .map(|i| {
            rho.iter()
                .enumerate()
                .map(|(j, r)| {
                    let d = (i as f64 - j as f64).abs() * dx;
                    -(antiderivative(d + 0.5 * dx) - antiderivative(d - 0.5 * dx)) / PI * r
                })
                .sum()
        })
        .collect()
}

fn files_of(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .expect("output directory")
        .map(|e| {
            let p = e.expect("entry").path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).expect("file"))
        })
        .collect()
}

fn criterion_11() -> Outcome {
    let mut parts = Vec::new();
    let (n_x, n_half) = (24, 6);

    let parity = prop_check(256, state_strategy(n_x, n_half), |(fp, fm, eps)| {
        let (r, j) = parity_split(&fp, &fm, eps).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let (p, m) = parity_merge(&r, &j, eps).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let scale = fp.iter().chain(&fm).fold(1.0f64, |a, &b| a.max(b.abs()));
        Ok(p.iter().zip(&fp).chain(m.iter().zip(&fm)).fold(0.0f64, |a, (x, y)| a.max((x - y).abs())) / scale)
    });
    parts.push(match parity {
        Ok(e) => (e <= 1e-13, format!("parity round trip {e:.1e}")),
        Err(e) => (false, format!("parity round trip: {e}")),
    });

    let grid = SpatialGrid1D::new(-1.0, 1.0, n_x)?;
    let vgrid = VelocityGrid1D::new(1.0, n_half, VelocityRule::GaussLegendre)?;
    let builder = ChemoBuilder::new(&grid, ShiftInterpolation::Fourier)?;
    let invariance = prop_check(128, (state_strategy(n_x, n_half), 1e-5f64..1e-2), |((fp, fm, eps), dt)| {
        let fail = |e: chemotaxis_ap::Error| TestCaseError::fail(e.to_string());
        let state = KineticState1D::from_full(n_x, n_half, &fp, &fm, eps).map_err(fail)?;
        let rho = state.density(&vgrid);
        let chemo = builder.build(&rho, &vgrid, eps, true).map_err(fail)?;
        let coeffs = SourceCoefficients::nonlocal(&chemo, &vgrid, eps).map_err(fail)?;
        let mut worst = 0.0f64;
        for exact in [false, true] {
            let mut s = state.clone();
            if exact {
                source_step_exact(&mut s, &coeffs, &vgrid, grid.dx(), dt, Exec::Sequential).map_err(fail)?;
            } else {
                source_step_first_order(&mut s, &coeffs, &vgrid, grid.dx(), dt, Exec::Sequential).map_err(fail)?;
            }
            let after = s.density(&vgrid);
            worst = rho.iter().zip(&after).fold(worst, |m, (a, b)| m.max(rel(*b, *a)));
        }
        Ok(worst)
    });
    parts.push(match invariance {
        Ok(e) => (e <= 1e-12, format!("source density invariance {e:.1e}")),
        Err(e) => (false, format!("source density invariance: {e}")),
    });

    let mut drift = 0.0f64;
    let grid = SpatialGrid1D::new(-1.0, 1.0, 200)?;
    let vgrid = VelocityGrid1D::new(1.0, 16, VelocityRule::GaussLegendre)?;
    let peaks = [Peak::new(1.0, 0.2, 80.0), Peak::new(0.5, -0.3, 80.0)];
    for (model, second) in [(Model1D::Nonlocal, true), (Model1D::Nonlocal, false), (Model1D::Local, true)] {
        let state = init_peaks(&grid, &peaks, 4.0 * PI, &vgrid, 0.1)?;
        let config = if second {
            SchemeConfig::second_order(model)
        } else {
            SchemeConfig::first_order(model)
        };
        let mut solver = Solver1D::new(grid.clone(), vgrid.clone(), state, config)?;
        let m0 = mass_1d(&solver.density(), &grid);
        for _ in 0..100 {
            solver.advance()?;
        }
        drift = drift.max(rel(mass_1d(&solver.density(), &grid), m0));
    }
    let pgrid = PolarGrid2D::new(2.0, 100, 8, 16, 1.0)?;
    let mut radial = RadialSolver::new(pgrid.clone(), init_radial(&pgrid, ExperimentConfig::default().radial_width, 20.0, 1.0)?, RadialConfig::default())?;
    let m0 = radial.mass();
    for _ in 0..100 {
        radial.advance()?;
    }
    drift = drift.max(rel(mass_2d(radial.rho_tilde(), &pgrid), m0));
    let rho = chemotaxis_ap::kinetic::initial_density(&grid, &peaks, PI)?;
    let coeffs = KSCoefficients::one_d(1.0 / 3.0, 1.0 / 3.0)?;
    let mut ks = KsSolver1D::new(grid.clone(), rho, coeffs, KsConfig::default())?;
    let m0 = ks.mass();
    for _ in 0..100 {
        ks.advance()?;
    }
    drift = drift.max(rel(ks.mass(), m0));
    parts.push((drift <= 1e-11, format!("relative mass drift per 100 steps {drift:.1e}")));

    let mut conv = 0.0f64;
    for n in [16usize, 101, 256] {
        let g = SpatialGrid1D::new(-1.0, 1.0, n)?;
        let rho: Vec<f64> = g
            .centers()
            .iter()
            .map(|x| (-30.0 * (x - 0.2) * (x - 0.2)).exp() + 0.5 * (-50.0 * (x + 0.4f64).powi(2)).exp())
            .collect();
        let fast = LogConvolver::with_quadrature(&g, 1, KernelQuadrature::CellAverage)?.convolve(&rho);
        let slow = direct_log_convolution(&rho, g.dx());
        let scale = slow.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        conv = fast.iter().zip(&slow).fold(conv, |m, (a, b)| m.max((a - b).abs() / scale));
    }
    parts.push((conv <= 1e-8, format!("convolution vs direct sum {conv:.1e}")));

    parts.push(trigger_exactness()?);

    let dir = tempfile::tempdir()?;
    let mut c = sc("two-peaks-sym-3pi");
    c.t_max = 0.02;
    c.n_x = 128;
    c.profile_times = vec![0.01];
    c.output = Some(dir.path().join("a"));
    run_scenario(&c)?;
    c.output = Some(dir.path().join("b"));
    run_scenario(&c)?;
    let (a, b) = (files_of(&dir.path().join("a")), files_of(&dir.path().join("b")));
    parts.push((a == b && !a.is_empty(), format!("{} CSV/config files byte-identical: {}", a.len(), a == b)));

    let (pass, detail) = all(&parts);
    ok(pass, detail)
}

/// The controller against an independent statement of the rule, on a
/// synthetic gradient sequence and along a real blow-up run.
fn trigger_exactness() -> Result<(bool, String)> {
    let mut ctl = AdaptiveController::new(1.0, 2);
    let seq = [1.5, 1.999_999, 2.0, 3.0, 3.999, 4.0, 7.9, 8.0];
    let got: Vec<AdaptDecision> = seq.iter().map(|&g| ctl.check(g)).collect();
    use AdaptDecision::{Cap, Keep, Refine};
    let want = [Keep, Keep, Refine, Keep, Keep, Refine, Keep, Cap];
    let synthetic = got == want;

    let c = sc("local-blowup-5pi");
    let grid = SpatialGrid1D::new(c.x_min, c.x_max, 500)?;
    let vgrid = VelocityGrid1D::new(c.v_max, c.n_half, c.velocity_rule)?;
    let state = init_peaks(&grid, &c.peaks, c.mass, &vgrid, c.eps)?;
    let mut solver = Solver1D::new(grid, vgrid, state, c.scheme())?;
    let mut ctl = AdaptiveController::new(solver.chemo().linf_grad(), c.max_levels);
    let mut dt = solver.dt();
    let mut mismatches = 0;
    let mut events = 0;
    while solver.time() < c.t_max {
        solver.step(dt.min(c.t_max - solver.time()))?;
        let g = solver.chemo().linf_grad();
        let expect_fire = g >= 2.0 * ctl.s_ref;
        let cells = solver.grid().n_x();
        let (decision, _) = adapt_if_needed(&mut ctl, &mut solver)?;
        match decision {
            Refine => {
                events += 1;
                dt *= 0.5;
                if !expect_fire || solver.grid().n_x() != 2 * cells || ctl.s_ref != g {
                    mismatches += 1;
                }
            }
            Keep if expect_fire => mismatches += 1,
            Cap if !expect_fire => mismatches += 1,
            Cap => break,
            Keep => {}
        }
    }
    Ok((
        synthetic && mismatches == 0 && events > 0,
        format!("trigger rule: synthetic {synthetic}, {events} refinements along a run, {mismatches} mismatches"),
    ))
}

fn increasing_segment(ts: &[f64], ys: &[f64]) -> String {
    ts.iter().zip(ys).step_by((ys.len() / 8).max(1)).map(|(t, y)| format!("{t:.3}:{y:.1}")).collect::<Vec<_>>().join(" ")
}

fn criterion_12() -> Outcome {
    let mut parts = Vec::new();
    for name in ["two-peaks-sym-3pi", "two-peaks-sym-5pi", "two-peaks-asym-5pi", "five-peaks-11pi"] {
        let dir = tempfile::tempdir()?;
        let mut c = sc(name);
        c.output = Some(dir.path().to_path_buf());
        let s = run_scenario(&c)?;
        let (ts, ys) = s.max_rho_series();
        let completed = s.status == RunStatus::Completed && (s.final_record.t - c.t_max).abs() < 1e-9;
        let first = ys[0];
        let last = *ys.last().unwrap();
        let (i_min, min) = ys.iter().enumerate().fold((0, f64::INFINITY), |b, (i, &y)| if y < b.1 { (i, y) } else { b });
        let signature = match name {
            // diffusion first, concentration after the merge
            "two-peaks-sym-3pi" => min < 0.9 * first && i_min > 0 && last > 1.5 * min,
            // a window of at least 0.05 in which max ρ varies by under 10%,
            // followed by a rise to at least twice that level
            "two-peaks-sym-5pi" => {
                let mut found = false;
                for a in 0..ys.len() {
                    let (mut lo, mut hi) = (ys[a], ys[a]);
                    for b in a..ys.len() {
                        lo = lo.min(ys[b]);
                        hi = hi.max(ys[b]);
                        if hi > 1.1 * lo {
                            break;
                        }
                        if ts[b] - ts[a] >= 0.05 && ys[b + 1..].iter().any(|&y| y >= 2.0 * hi) {
                            found = true;
                        }
                    }
                }
                found
            }
            _ => last > 2.0 * first,
        };
        parts.push((
            completed && signature,
            format!("{name}: completed {completed}, signature {signature} [{}]", increasing_segment(&ts, &ys)),
        ));
    }
    let (pass, detail) = all(&parts);
    ok(pass, detail)
}

fn main() -> ExitCode {
    let only: Option<Vec<usize>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|v| v.split(',').filter_map(|s| s.trim().parse().ok()).collect());
    let wanted = |n: usize| only.as_ref().is_none_or(|o| o.contains(&n));
    let mut shared = Shared::default();
    let mut failures = 0;
    for n in 1..=12 {
        if !wanted(n) {
            continue;
        }
        let start = Instant::now();
        let outcome = match n {
            1 => criterion_1(),
            2 => convergence_sweep("conv-sub-pi"),
            3 => convergence_sweep("conv-super-4pi"),
            4 => criterion_4(&mut shared),
            5 => criterion_5(&mut shared),
            6 => criterion_6(),
            7 => criterion_7(&mut shared),
            8 => criterion_8(),
            9 => criterion_9(),
            10 => criterion_10(),
            11 => criterion_11(),
            _ => criterion_12(),
        };
        let (pass, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
        if !pass {
            failures += 1;
        }
        println!(
            "criterion {n}: {} ({:.1} s) {detail}",
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    }
}
