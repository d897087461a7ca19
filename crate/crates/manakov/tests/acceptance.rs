//! System-level acceptance checks, one test per numbered criterion.
//!
//! Each test prints a single `ACCEPTANCE <n>: PASS/FAIL (<details>)` line
//! (visible with `--nocapture` or on failure) and asserts every clause of
//! its criterion at the stated tolerance.

use std::time::Instant;

use num_complex::Complex64;

use manakov::config::Scenario;
use manakov::ctc::{init_ctc_state, integrate_ctc, positions_from_state, CtcOptions};
use manakov::harness::{
    classify_scenario, preset, preset_doc, run_scenario, DEFAULT_COMPARISON_THRESHOLD,
};
use manakov::io::ConservedSample;
use manakov::lax::{
    build_lax, classify_regime, critical_delta_nu, default_cluster_tol, eigenvalues, RegimeLabel,
};
use manakov::potential::quadrature::{kernel_oracle, Kernel};
use manakov::potential::{kernels, PotentialSpec};
use manakov::soliton::{Grid, PolarizationVector, SolitonParams, TrainConfig};
use manakov::tracking::{
    associate_tracks, default_min_height, find_peaks, Peak, TrajectorySet, DEFAULT_GATE,
    DEFAULT_MIN_SEPARATION,
};
use manakov::vnlse::{run_vnlse, ControlFlow, SolverOptions};

/// Accumulates a criterion's clause results and prints the verdict line.
struct Criterion {
    n: u32,
    failures: Vec<String>,
    details: String,
    started: Instant,
}

impl Criterion {
    fn new(n: u32) -> Self {
        Criterion { n, failures: Vec::new(), details: String::new(), started: Instant::now() }
    }

    fn check(&mut self, ok: bool, clause: String) {
        if !ok {
            self.failures.push(clause);
        }
    }

    fn detail(&mut self, text: impl AsRef<str>) {
        if !self.details.is_empty() {
            self.details.push_str("; ");
        }
        self.details.push_str(text.as_ref());
    }

    fn finish(self) {
        let elapsed = self.started.elapsed().as_secs_f64();
        if self.failures.is_empty() {
            println!("ACCEPTANCE {}: PASS ({}; {:.1}s)", self.n, self.details, elapsed);
        } else {
            println!(
                "ACCEPTANCE {}: FAIL ({}; {:.1}s)",
                self.n,
                self.failures.join(" | "),
                elapsed
            );
            panic!("acceptance criterion {} failed: {}", self.n, self.failures.join(" | "));
        }
    }
}

// ---------- shared scenario builders ----------

/// The three-soliton alternating-phase train used by the `afr_*` presets,
/// with a configurable amplitude split.
fn alternating_train(delta_nu: f64) -> TrainConfig {
    let solitons = (1..=3i64)
        .map(|k| SolitonParams {
            nu: 0.5 + (2 - k) as f64 * delta_nu,
            mu: 0.0,
            xi: -8.0 + (k - 1) as f64 * 8.0,
            delta: if k == 2 { std::f64::consts::PI } else { 0.0 },
            pol: PolarizationVector::from_angles((4 - k) as f64 * std::f64::consts::PI / 10.0, 0.0),
        })
        .collect();
    TrainConfig::new(solitons).unwrap()
}

fn single_soliton(nu: f64, mu: f64) -> TrainConfig {
    TrainConfig::new(vec![SolitonParams {
        nu,
        mu,
        xi: 0.0,
        delta: 0.0,
        pol: PolarizationVector::from_angles(0.4, 0.0),
    }])
    .unwrap()
}

/// Evolve the PDE, tracking peaks at every sample. `stop` may end the run
/// early based on the refined peaks and the sample time.
fn run_pde_tracked(
    train: &TrainConfig,
    spec: &PotentialSpec,
    grid: &Grid,
    t_end: f64,
    opts: SolverOptions,
    sample_every: f64,
    mut stop: impl FnMut(&[Peak], f64) -> bool,
) -> (TrajectorySet, Vec<ConservedSample>) {
    let min_height = default_min_height(train.nu0());
    let mut times = Vec::new();
    let mut lists: Vec<Vec<f64>> = Vec::new();
    let mut conserved = Vec::new();
    run_vnlse(train, spec, grid, t_end, opts, sample_every, |field, cq| {
        let profile = field.intensity_profile();
        let peaks = find_peaks(&profile, &field.grid, min_height, DEFAULT_MIN_SEPARATION);
        times.push(field.t);
        lists.push(peaks.iter().map(|p| p.position).collect());
        conserved.push(ConservedSample { t: field.t, norm: cq.norm, energy: cq.energy });
        if stop(&peaks, field.t) {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })
    .unwrap();
    let ts = associate_tracks(&times, &lists, train.len(), DEFAULT_GATE).unwrap();
    (ts, conserved)
}

/// Chain-engine trajectory set of a scenario (positions only).
fn run_pctc_tracks(scenario: &Scenario) -> TrajectorySet {
    let state0 = init_ctc_state(&scenario.train);
    let traj = integrate_ctc(&state0, &scenario.potential, scenario.t_end, &scenario.ctc).unwrap();
    let tracks = (0..scenario.train.len())
        .map(|k| traj.states.iter().map(|s| Some(positions_from_state(s)[k].xi)).collect())
        .collect();
    TrajectorySet::new(traj.times, tracks).unwrap()
}

/// Worst relative norm drift and absolute energy drift over a run.
fn drifts(conserved: &[ConservedSample]) -> (f64, f64) {
    let first = conserved[0];
    conserved.iter().fold((0.0f64, 0.0f64), |(n, e), c| {
        (
            n.max(((c.norm - first.norm) / first.norm).abs()),
            e.max((c.energy - first.energy).abs()),
        )
    })
}

// ---------- criteria ----------

#[test]
fn acceptance_1_kernels_match_quadrature_oracle() {
    let mut c = Criterion::new(1);
    let mut worst: f64 = 0.0;
    for &d in &[1e-3, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0] {
        let k = kernels(d);
        for (kind, closed) in
            [(Kernel::P, k.p), (Kernel::R, k.r), (Kernel::N, k.n), (Kernel::Q, k.q)]
        {
            let oracle = kernel_oracle(kind, d).unwrap();
            let err = (closed - oracle).abs();
            worst = worst.max(err);
            c.check(err < 1e-9, format!("{kind:?}({d}) off by {err:.2e}"));
        }
    }
    let at_zero = kernels(0.0);
    c.check((at_zero.r - 0.5).abs() < 1e-10, format!("R(0) = {}", at_zero.r));
    c.check((at_zero.n - 2.0 / 3.0).abs() < 1e-10, format!("N(0) = {}", at_zero.n));
    c.detail(format!("worst closed-vs-oracle gap {worst:.2e} across 28 points"));
    c.detail("R(0), N(0) limits within 1e-10");
    c.finish();
}

#[test]
fn acceptance_2_lax_spectrum_of_free_train() {
    let mut c = Criterion::new(2);
    let report = classify_scenario(&preset("afr_free").unwrap()).unwrap();
    c.check(report.kappa.len() == 3, format!("expected 3 eigenvalues, got {}", report.kappa.len()));
    let expected = [-0.0116, 0.0, 0.0116];
    for (k, (&got, &want)) in report.kappa.iter().zip(&expected).enumerate() {
        c.check(
            (got - want).abs() < 2e-4,
            format!("kappa[{k}] = {got:.6}, expected {want} within 2e-4"),
        );
    }
    // independent closed form: the coupling magnitudes of this geometry
    // give kappa_outer = sqrt(2 a^2 - (delta_nu/2)^2) exactly
    let a_sq = 0.25 * (std::f64::consts::PI / 10.0).cos() * (-8.0f64).exp();
    let kappa_closed = (2.0 * a_sq - 0.005f64.powi(2)).sqrt();
    let gap = (report.kappa[2] - kappa_closed).abs();
    c.check(gap < 1e-9, format!("outer kappa {:.12} vs closed form {kappa_closed:.12}", report.kappa[2]));
    c.check(report.label == RegimeLabel::Afr, format!("label {:?}", report.label));
    c.detail(format!(
        "kappa = ({:.6}, {:.6}, {:.6}), closed-form gap {gap:.1e}, label AFR",
        report.kappa[0], report.kappa[1], report.kappa[2]
    ));
    c.finish();
}

#[test]
fn acceptance_3_critical_amplitude_and_classifier_flip() {
    let mut c = Criterion::new(3);
    let crit = critical_delta_nu(0.5, 8.0, (std::f64::consts::PI / 10.0).cos()).unwrap();
    c.check((crit - 0.02526).abs() < 1e-4, format!("critical amplitude {crit:.6} vs 0.02526"));

    // sweep the amplitude split in 1e-4 steps across the critical value;
    // the classification must flip exactly once, within one step of it
    let mut flips: Vec<f64> = Vec::new();
    let mut prev: Option<RegimeLabel> = None;
    let mut dn = 0.024;
    while dn <= 0.0270001 {
        let state = init_ctc_state(&alternating_train(dn));
        let zetas = eigenvalues(&build_lax(&state)).unwrap();
        let kappa: Vec<f64> = zetas.iter().map(|z| z.re).collect();
        let label = classify_regime(&zetas, default_cluster_tol(&kappa)).label;
        if let Some(p) = prev {
            if p != label {
                flips.push(dn);
            }
        }
        prev = Some(label);
        dn += 1e-4;
    }
    c.check(flips.len() == 1, format!("expected one AFR flip, saw {}", flips.len()));
    if let Some(&flip) = flips.first() {
        c.check(
            (flip - crit).abs() <= 1.0001e-4,
            format!("flip at {flip:.6}, critical value {crit:.6}"),
        );
        // the alternative value 0.0246 sometimes quoted for this geometry
        // is inside the sweep and shows no transition there
        c.check((flip - 0.0246).abs() > 5e-4, format!("flip at {flip:.6} too close to 0.0246"));
        c.detail(format!(
            "critical amplitude {crit:.6}; classifier flips AFR->BSR between {:.4} and {flip:.4}; no flip near 0.0246",
            flip - 1e-4
        ));
    }
    c.finish();
}

#[test]
fn acceptance_4_pde_single_soliton_fidelity() {
    let mut c = Criterion::new(4);
    let grid = Grid::new(-40.0, 40.0, 1601).unwrap();
    let train = single_soliton(0.5, 0.1);
    let (ts, conserved) = run_pde_tracked(
        &train,
        &PotentialSpec::free(),
        &grid,
        50.0,
        SolverOptions::default(),
        0.5,
        |_, _| false,
    );
    let last = ts.tracks[0].last().copied().flatten().unwrap();
    c.check((last - 10.0).abs() <= 0.1, format!("final position {last:.4} vs 10.0 +- 0.1"));

    // re-derive the refined height at the final sample
    let mut height = f64::NAN;
    run_vnlse(
        &train,
        &PotentialSpec::free(),
        &grid,
        50.0,
        SolverOptions::default(),
        50.0,
        |field, _| {
            if field.t >= 50.0 {
                let profile = field.intensity_profile();
                let peaks = find_peaks(&profile, &field.grid, 0.1, 1.0);
                height = peaks[0].height;
            }
            ControlFlow::Continue(())
        },
    )
    .unwrap();
    c.check((height - 1.0).abs() <= 0.005, format!("peak height {height:.5} vs 1.0 +- 0.005"));

    let (norm_drift, energy_drift) = drifts(&conserved);
    c.check(norm_drift < 1e-7, format!("relative norm drift {norm_drift:.2e}"));
    c.check(energy_drift < 1e-5, format!("energy drift {energy_drift:.2e}"));
    c.detail(format!(
        "position {last:.4}, height {height:.5}, norm drift {norm_drift:.1e}, energy drift {energy_drift:.1e}"
    ));
    c.finish();
}

#[test]
fn acceptance_5_ctc_isospectrality() {
    let mut c = Criterion::new(5);
    let train = alternating_train(0.01);
    let state0 = init_ctc_state(&train);
    let opts = CtcOptions::default(); // fixed step 0.05, sample every 0.5
    let traj = integrate_ctc(&state0, &PotentialSpec::free(), 100.0, &opts).unwrap();
    let zeta0 = eigenvalues(&build_lax(&traj.states[0])).unwrap();
    let sum0: Complex64 = traj.states[0].lambda.iter().sum();
    let mut worst_eig: f64 = 0.0;
    let mut worst_sum: f64 = 0.0;
    for state in &traj.states {
        let zeta = eigenvalues(&build_lax(state)).unwrap();
        for (z, z0) in zeta.iter().zip(&zeta0) {
            worst_eig = worst_eig.max((z - z0).norm());
        }
        let sum: Complex64 = state.lambda.iter().sum();
        worst_sum = worst_sum.max((sum - sum0).norm());
    }
    c.check(worst_eig < 1e-6, format!("eigenvalue drift {worst_eig:.2e} over t in [0, 100]"));
    c.check(worst_sum < 1e-10, format!("sum-of-lambda drift {worst_sum:.2e}"));
    c.detail(format!("max eigenvalue drift {worst_eig:.1e}, sum drift {worst_sum:.1e} over 201 samples"));
    c.finish();
}

#[test]
fn acceptance_6_engine_agreement_on_free_train() {
    let mut c = Criterion::new(6);
    let scenario = preset("afr_free").unwrap();
    assert_eq!(scenario.t_end, 300.0);
    let dir = std::env::temp_dir().join(format!("manakov-acc6-{}", std::process::id()));
    let bundle = run_scenario(&scenario, &dir).unwrap();
    c.check(bundle.engines_ok(), "an engine failed".to_string());
    let metrics = bundle.metrics.expect("both engines ran");
    assert_eq!(metrics.threshold, DEFAULT_COMPARISON_THRESHOLD);
    for (k, tm) in metrics.tracks.iter().enumerate() {
        let max = tm.max_deviation.unwrap_or(f64::INFINITY);
        c.check(max < 1.0, format!("track {k} max deviation {max:.3}"));
        c.check(
            tm.n_common > 500,
            format!("track {k} only {} common samples", tm.n_common),
        );
    }
    let worst = metrics.worst_max().unwrap();
    c.detail(format!("max PDE-vs-chain deviation {worst:.3} space units over t in [0, 300]"));
    std::fs::remove_dir_all(&dir).ok();
    c.finish();
}

/// Sign changes of the windowed displacement of one track: velocity
/// reversals robust to sub-grid refinement jitter.
fn count_reversals(times: &[f64], track: &[Option<f64>], window: f64, deadband: f64) -> usize {
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(track)
        .filter_map(|(&t, &x)| x.map(|x| (t, x)))
        .collect();
    let mut signs: Vec<f64> = Vec::new();
    let mut anchor = 0usize;
    for i in 0..pts.len() {
        if pts[i].0 - pts[anchor].0 >= window {
            let d = pts[i].1 - pts[anchor].1;
            if d.abs() > deadband {
                signs.push(d.signum());
            }
            anchor = i;
        }
    }
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

fn bounds_of(ts: &TrajectorySet) -> f64 {
    ts.tracks
        .iter()
        .flat_map(|track| track.iter().flatten())
        .fold(0.0f64, |acc, &x| acc.max(x.abs()))
}

#[test]
fn acceptance_7_regime_transitions_under_potentials() {
    let mut c = Criterion::new(7);
    // coarser PDE resolution: these are qualitative containment/escape
    // properties over a long horizon, second-order accurate at h = 0.1
    let coarse = SolverOptions { dt: 0.01, ..Default::default() };

    // (a) confining wells on the free-regime train: everything stays
    // inside [-20, 20] and the outer tracks oscillate
    {
        let scenario = preset("afr_well").unwrap();
        let grid = Grid::new(-40.0, 40.0, 801).unwrap();
        let (pde, _) = run_pde_tracked(
            &scenario.train,
            &scenario.potential,
            &grid,
            500.0,
            coarse,
            0.5,
            |_, _| false,
        );
        let pctc = run_pctc_tracks(&scenario);
        for (name, ts) in [("pde", &pde), ("pctc", &pctc)] {
            let worst = bounds_of(ts);
            c.check(worst <= 20.0, format!("(a) {name} track reached |x| = {worst:.2}"));
            for k in [0usize, 2] {
                let rev = count_reversals(&ts.times, &ts.tracks[k], 5.0, 0.05);
                c.check(
                    rev >= 2,
                    format!("(a) {name} lateral track {k} reversed {rev} times, need >= 2"),
                );
            }
        }
        let rev0 = count_reversals(&pde.times, &pde.tracks[0], 5.0, 0.05);
        c.detail(format!("(a) wells confine; left PDE track reverses {rev0} times"));
    }

    // (b) repulsive humps on the bound train: the outer solitons are
    // expelled past |x| = 20 well before t = 500
    {
        let doc = preset_doc("bsr_hump").unwrap();
        let scenario = doc.resolve().unwrap();
        let grid = Grid::new(-80.0, 80.0, 1601).unwrap();
        let (pde, _) = run_pde_tracked(
            &scenario.train,
            &scenario.potential,
            &grid,
            500.0,
            coarse,
            0.5,
            // stop once both lateral solitons are clearly out
            |peaks, _| peaks.iter().filter(|p| p.position.abs() > 22.0).count() >= 2,
        );
        let pctc = run_pctc_tracks(&scenario);
        for (name, ts) in [("pde", &pde), ("pctc", &pctc)] {
            for k in [0usize, 2] {
                let exit = ts
                    .times
                    .iter()
                    .zip(&ts.tracks[k])
                    .find(|(_, x)| x.is_some_and(|x| x.abs() > 20.0))
                    .map(|(&t, _)| t);
                c.check(
                    exit.is_some_and(|t| t < 500.0),
                    format!("(b) {name} lateral track {k} never left [-20, 20]"),
                );
                if name == "pde" {
                    if let Some(t) = exit {
                        c.detail(format!("(b) PDE track {k} exits at t = {t:.0}"));
                    }
                }
            }
        }
    }

    // (c) shallow wells on the bound train: still bound, nothing escapes
    {
        let scenario = preset("mar_well").unwrap();
        let grid = Grid::new(-40.0, 40.0, 801).unwrap();
        let (pde, _) = run_pde_tracked(
            &scenario.train,
            &scenario.potential,
            &grid,
            500.0,
            coarse,
            0.5,
            |_, _| false,
        );
        let pctc = run_pctc_tracks(&scenario);
        for (name, ts) in [("pde", &pde), ("pctc", &pctc)] {
            let worst = bounds_of(ts);
            c.check(worst <= 20.0, format!("(c) {name} track reached |x| = {worst:.2}"));
        }
        c.detail(format!("(c) shallow wells keep everything within |x| <= {:.1}", bounds_of(&pde)));
    }
    c.finish();
}

/// Final tracked position of the criterion-4 soliton at the given
/// resolutions.
fn criterion4_position(dt: f64, n_points: usize) -> f64 {
    let grid = Grid::new(-40.0, 40.0, n_points).unwrap();
    let train = single_soliton(0.5, 0.1);
    let opts = SolverOptions { dt, ..Default::default() };
    let (ts, _) = run_pde_tracked(
        &train,
        &PotentialSpec::free(),
        &grid,
        50.0,
        opts,
        0.5,
        |_, _| false,
    );
    ts.tracks[0].last().copied().flatten().unwrap()
}

#[test]
fn acceptance_8_second_order_convergence() {
    let mut c = Criterion::new(8);
    // spatial axis: the h^2 terms dominate the absolute position error at
    // the reference resolutions, so halving h must shrink the error vs
    // the exact position 10.0 by ~4x
    let e_h = (criterion4_position(0.005, 1601) - 10.0).abs();
    let e_h2 = (criterion4_position(0.005, 3201) - 10.0).abs();
    let ratio_h = e_h / e_h2;
    c.check(
        (3.0..=5.0).contains(&ratio_h),
        format!("h-halving error ratio {ratio_h:.2} (errors {e_h:.2e} -> {e_h2:.2e})"),
    );

    // temporal axis: the dt-induced position error is isolated against a
    // dt -> 0 reference at the same grid (dt/8, temporal error 64x below
    // the base run), since the spatial floor would otherwise mask it
    let x_ref = criterion4_position(0.000625, 1601);
    let e_dt = (criterion4_position(0.005, 1601) - x_ref).abs();
    let e_dt2 = (criterion4_position(0.0025, 1601) - x_ref).abs();
    let ratio_dt = e_dt / e_dt2;
    c.check(
        (3.0..=5.0).contains(&ratio_dt),
        format!("dt-halving error ratio {ratio_dt:.2} (errors {e_dt:.2e} -> {e_dt2:.2e})"),
    );
    c.detail(format!(
        "h-halving ratio {ratio_h:.2}, dt-halving ratio {ratio_dt:.2} (both second order)"
    ));
    c.finish();
}

#[test]
fn acceptance_9_gauge_invariance_of_both_engines() {
    let mut c = Criterion::new(9);
    // a fixed unitary polarization rotation: |a|^2 = |b|^2 = 1/2
    let a = Complex64::new(3.0, 4.0) / 50f64.sqrt();
    let b = Complex64::new(5.0, 1.0) / 52f64.sqrt();
    let u = [[a, b], [-b.conj(), a.conj()]];
    let rotate = |train: &TrainConfig| {
        TrainConfig::new(
            train
                .solitons()
                .iter()
                .map(|s| SolitonParams { pol: s.pol.transform(&u), ..*s })
                .collect(),
        )
        .unwrap()
    };

    let train = alternating_train(0.01);
    let rotated = rotate(&train);

    // chain engine to t = 100
    let opts = CtcOptions::default();
    let t1 = integrate_ctc(&init_ctc_state(&train), &PotentialSpec::free(), 100.0, &opts).unwrap();
    let t2 =
        integrate_ctc(&init_ctc_state(&rotated), &PotentialSpec::free(), 100.0, &opts).unwrap();
    let mut worst_ctc: f64 = 0.0;
    for (s1, s2) in t1.states.iter().zip(&t2.states) {
        let (p1, p2) = (positions_from_state(s1), positions_from_state(s2));
        for (a, b) in p1.iter().zip(&p2) {
            worst_ctc = worst_ctc.max((a.xi - b.xi).abs());
        }
    }
    c.check(worst_ctc < 1e-10, format!("chain trajectories moved {worst_ctc:.2e}"));

    // PDE engine to t = 50
    let grid = Grid::new(-40.0, 40.0, 1601).unwrap();
    let free = PotentialSpec::free();
    let run = |tr: &TrainConfig| {
        run_pde_tracked(tr, &free, &grid, 50.0, SolverOptions::default(), 0.5, |_, _| false).0
    };
    let p1 = run(&train);
    let p2 = run(&rotated);
    let mut worst_pde: f64 = 0.0;
    for (a, b) in p1.tracks.iter().zip(&p2.tracks) {
        for (x, y) in a.iter().zip(b) {
            match (x, y) {
                (Some(x), Some(y)) => worst_pde = worst_pde.max((x - y).abs()),
                (None, None) => {}
                _ => c.check(false, "missing-sample pattern changed under rotation".into()),
            }
        }
    }
    c.check(worst_pde < 1e-6, format!("PDE trajectories moved {worst_pde:.2e}"));
    c.detail(format!(
        "chain deviation {worst_ctc:.1e} (t <= 100), PDE deviation {worst_pde:.1e} (t <= 50)"
    ));
    c.finish();
}
