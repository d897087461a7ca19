//! Scenario orchestration: named presets, running both engines on
//! identical initial data, trajectory comparison metrics, and the result
//! directory layout consumed by the CLI.

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::{
    Engine, GeneratorDoc, GridDoc, PotentialDoc, RunDoc, Scenario, ScenarioDoc, SolitonDoc,
    TrainDoc,
};
use crate::ctc::{init_ctc_state, integrate_ctc, positions_from_state, TrajectoryStatus};
use crate::error::{Error, Result};
use crate::io::{
    regime_json_string, write_conserved_csv, write_ctc_trajectories_csv, write_trajectories_csv,
    ConservedSample,
};
use crate::lax::{build_lax, classify_regime, default_cluster_tol, eigenvalues, RegimeReport};
use crate::tracking::{
    associate_tracks, default_min_height, find_peaks, TrajectorySet, DEFAULT_GATE,
    DEFAULT_MIN_SEPARATION,
};
use crate::vnlse::{run_vnlse, ControlFlow};

/// Valid preset names, in documentation order.
pub const PRESET_NAMES: [&str; 6] =
    ["afr_free", "afr_well", "bsr_free", "bsr_hump", "mar_free", "mar_well"];

/// Deviation threshold (space units) above which two engines are
/// considered to have diverged, for the `exceed_time` metric.
pub const DEFAULT_COMPARISON_THRESHOLD: f64 = 1.0;

/// Result-directory file names.
pub mod files {
    pub const TRAJECTORIES_PDE: &str = "trajectories_pde.csv";
    pub const TRAJECTORIES_PCTC: &str = "trajectories_pctc.csv";
    pub const REGIME: &str = "regime.json";
    pub const CONSERVED: &str = "conserved.csv";
    pub const METRICS: &str = "metrics.json";
    pub const RESOLVED_SCENARIO: &str = "scenario.resolved.toml";
}

/// Root directory for result bundles: `$MANAKOV_RESULT_ROOT` when set,
/// `./results` otherwise.
pub fn result_root() -> PathBuf {
    std::env::var_os("MANAKOV_RESULT_ROOT")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("results"))
}

/// Build the named benchmark scenario.
///
/// All presets share the same three-soliton geometry: positions
/// (−8, 0, 8), zero initial velocities, polarization angles
/// θ_k = (4−k)π/10 with γ = 0, and amplitudes (0.5+Δν, 0.5, 0.5−Δν).
/// The `afr_*` pair uses alternating phases (0, π, 0) with Δν = 0.01 —
/// just below the critical amplitude split, so the free train is
/// asymptotically free. The `bsr_*`/`mar_*` presets use equal phases
/// with Δν = 0.02, a bound-state train. Potentials:
///
/// * `afr_well`: 33 wells, c = −0.1, centers −16..16 step 1 — traps the
///   free train into oscillation.
/// * `bsr_hump`: 13 humps, c = +0.01, centers −10 + 5s/3 — breaks the
///   bound train apart (run on a wider grid so escapers stay inside).
/// * `mar_well`: 33 shallow wells, c = −0.01 — the bound train survives,
///   illustrating the mixed/intermediate response.
///
/// Naming note: the labels follow the regime each potential *induces or
/// preserves* in the figures they reproduce; the free-train classifier
/// at t = 0 sees only the train (AFR for `afr_*`, BSR for the rest).
pub fn preset(name: &str) -> Result<Scenario> {
    preset_doc(name)?.resolve()
}

/// Document form of [`preset`], ready to serialize.
pub fn preset_doc(name: &str) -> Result<ScenarioDoc> {
    let (delta_nu, deltas) = match name {
        "afr_free" | "afr_well" => (0.01, [0.0, std::f64::consts::PI, 0.0]),
        "bsr_free" | "bsr_hump" | "mar_free" | "mar_well" => (0.02, [0.0, 0.0, 0.0]),
        _ => {
            return Err(Error::InvalidScenario(format!(
                "unknown preset `{name}`; valid presets: {}",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    let solitons = (1..=3usize)
        .map(|k| SolitonDoc {
            nu: 0.5 + (2 - k as i64) as f64 * delta_nu,
            mu: 0.0,
            xi: -8.0 + (k as f64 - 1.0) * 8.0,
            delta: deltas[k - 1],
            theta: (4 - k as i64) as f64 * std::f64::consts::PI / 10.0,
            gamma: 0.0,
        })
        .collect();
    let generator = match name {
        "afr_well" => Some(GeneratorDoc { c: -0.1, x0: -16.0, spacing: 1.0, count: 33, inv_width: 1.0 }),
        "bsr_hump" => Some(GeneratorDoc {
            c: 0.01,
            x0: -10.0,
            spacing: 5.0 / 3.0,
            count: 13,
            inv_width: 1.0,
        }),
        "mar_well" => Some(GeneratorDoc { c: -0.01, x0: -16.0, spacing: 1.0, count: 33, inv_width: 1.0 }),
        _ => None,
    };
    // escaping solitons need room: the hump scenario runs on a domain
    // twice as wide at the same resolution
    let grid = if name == "bsr_hump" {
        GridDoc { x_min: -80.0, x_max: 80.0, n_points: 3201 }
    } else {
        GridDoc { x_min: -40.0, x_max: 40.0, n_points: 1601 }
    };
    let t_end = if name == "afr_free" { 300.0 } else { 500.0 };
    Ok(ScenarioDoc {
        train: TrainDoc { solitons },
        potential: PotentialDoc { terms: Vec::new(), generator },
        grid,
        run: RunDoc {
            t_end,
            dt: 0.005,
            sample_every: 0.5,
            engines: vec![Engine::Pde, Engine::Pctc],
            ctc_dt: 0.05,
            inner_tol: 1e-12,
            inner_max: 20,
        },
    })
}

/// Deviation statistics for one track pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackMetrics {
    /// Samples where both series had a position.
    pub n_common: usize,
    /// Largest |ξ_a − ξ_b| over common samples; absent when none.
    pub max_deviation: Option<f64>,
    /// Root-mean-square deviation over common samples; absent when none.
    pub rms_deviation: Option<f64>,
    /// First sample time at which the deviation exceeded the threshold.
    pub exceed_time: Option<f64>,
}

/// Per-track deviation metrics between two trajectory sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonMetrics {
    pub threshold: f64,
    pub tracks: Vec<TrackMetrics>,
}

impl ComparisonMetrics {
    /// Largest per-track max deviation, when any track had common samples.
    pub fn worst_max(&self) -> Option<f64> {
        self.tracks.iter().filter_map(|t| t.max_deviation).fold(None, |acc, d| {
            Some(acc.map_or(d, |a: f64| a.max(d)))
        })
    }
}

/// Compare two trajectory sets track by track.
///
/// The denser series is linearly interpolated onto the sparser one's
/// sample instants (ties broken by the lexicographically earlier time
/// axis, so the result is symmetric in its arguments); a deviation
/// counts only where the sparse sample is present and the dense series
/// has both interpolation neighbours.
pub fn compare_trajectories(
    a: &TrajectorySet,
    b: &TrajectorySet,
    threshold: f64,
) -> Result<ComparisonMetrics> {
    if a.n_tracks() != b.n_tracks() {
        return Err(Error::Comparison(format!(
            "track counts differ: {} vs {}",
            a.n_tracks(),
            b.n_tracks()
        )));
    }
    if !(threshold > 0.0 && threshold.is_finite()) {
        return Err(Error::Comparison(format!("threshold must be positive, got {threshold}")));
    }
    // canonical (sparse, dense) orientation, independent of argument order
    let a_first = match a.n_samples().cmp(&b.n_samples()) {
        std::cmp::Ordering::Less => true,
        std::cmp::Ordering::Greater => false,
        std::cmp::Ordering::Equal => {
            let mut pick = true;
            for (ta, tb) in a.times.iter().zip(&b.times) {
                match ta.total_cmp(tb) {
                    std::cmp::Ordering::Less => break,
                    std::cmp::Ordering::Greater => {
                        pick = false;
                        break;
                    }
                    std::cmp::Ordering::Equal => {}
                }
            }
            pick
        }
    };
    let (sparse, dense) = if a_first { (a, b) } else { (b, a) };

    let mut tracks = Vec::with_capacity(sparse.n_tracks());
    for k in 0..sparse.n_tracks() {
        let mut max_dev: f64 = 0.0;
        let mut sum_sq = 0.0;
        let mut n_common = 0usize;
        let mut exceed_time = None;
        for (j, &t) in sparse.times.iter().enumerate() {
            let Some(xs) = sparse.tracks[k][j] else { continue };
            let Some(xd) = interpolate_track(dense, k, t) else { continue };
            let d = (xs - xd).abs();
            n_common += 1;
            max_dev = max_dev.max(d);
            sum_sq += d * d;
            if exceed_time.is_none() && d > threshold {
                exceed_time = Some(t);
            }
        }
        tracks.push(if n_common == 0 {
            TrackMetrics { n_common, max_deviation: None, rms_deviation: None, exceed_time }
        } else {
            TrackMetrics {
                n_common,
                max_deviation: Some(max_dev),
                rms_deviation: Some((sum_sq / n_common as f64).sqrt()),
                exceed_time,
            }
        });
    }
    Ok(ComparisonMetrics { threshold, tracks })
}

/// Linear interpolation of track `k` at time `t`; `None` when `t` is
/// outside the series or a needed neighbour sample is missing.
fn interpolate_track(ts: &TrajectorySet, k: usize, t: f64) -> Option<f64> {
    let times = &ts.times;
    let track = &ts.tracks[k];
    let i = times.partition_point(|&u| u < t);
    if i < times.len() && times[i] == t {
        return track[i];
    }
    if i == 0 || i == times.len() {
        return None;
    }
    let (t0, t1) = (times[i - 1], times[i]);
    let (x0, x1) = (track[i - 1]?, track[i]?);
    Some(x0 + (x1 - x0) * (t - t0) / (t1 - t0))
}

/// Everything a scenario run produced. Engine failures are recorded
/// rather than propagated so one engine's crash never discards the
/// other's results.
#[derive(Debug, Clone)]
pub struct RunBundle {
    pub regime: RegimeReport,
    pub pde: Option<TrajectorySet>,
    pub pde_error: Option<String>,
    pub conserved: Vec<ConservedSample>,
    pub pctc: Option<TrajectorySet>,
    pub pctc_error: Option<String>,
    /// Set when the chain integration stopped early (collision).
    pub pctc_note: Option<String>,
    pub metrics: Option<ComparisonMetrics>,
}

impl RunBundle {
    /// True when every requested engine delivered trajectories.
    pub fn engines_ok(&self) -> bool {
        self.pde_error.is_none() && self.pctc_error.is_none()
    }
}

/// Classify the scenario's initial train (the classifier sees the train
/// only; the potential acts later, during evolution).
pub fn classify_scenario(scenario: &Scenario) -> Result<RegimeReport> {
    let state = init_ctc_state(&scenario.train);
    let lax = build_lax(&state);
    let zetas = eigenvalues(&lax)?;
    let kappa: Vec<f64> = zetas.iter().map(|z| z.re).collect();
    Ok(classify_regime(&zetas, default_cluster_tol(&kappa)))
}

/// Run every engine the scenario selects on identical initial data and
/// write the result bundle into `out_dir`:
/// `scenario.resolved.toml`, `regime.json`, `trajectories_pde.csv` +
/// `conserved.csv` (PDE), `trajectories_pctc.csv` (chain), and
/// `metrics.json` when both engines produced trajectories.
pub fn run_scenario(scenario: &Scenario, out_dir: &Path) -> Result<RunBundle> {
    fs::create_dir_all(out_dir)?;
    fs::write(
        out_dir.join(files::RESOLVED_SCENARIO),
        scenario.resolved_doc().to_toml(),
    )?;

    let regime = classify_scenario(scenario)?;
    fs::write(out_dir.join(files::REGIME), regime_json_string(&regime))?;

    let mut bundle = RunBundle {
        regime,
        pde: None,
        pde_error: None,
        conserved: Vec::new(),
        pctc: None,
        pctc_error: None,
        pctc_note: None,
        metrics: None,
    };

    if scenario.wants(Engine::Pde) {
        match run_pde_engine(scenario) {
            Ok((ts, conserved)) => {
                let f = fs::File::create(out_dir.join(files::TRAJECTORIES_PDE))?;
                write_trajectories_csv(BufWriter::new(f), &ts)?;
                let f = fs::File::create(out_dir.join(files::CONSERVED))?;
                write_conserved_csv(BufWriter::new(f), &conserved)?;
                bundle.pde = Some(ts);
                bundle.conserved = conserved;
            }
            Err(e) => {
                log::error!("PDE engine failed: {e}");
                bundle.pde_error = Some(e.to_string());
            }
        }
    }

    if scenario.wants(Engine::Pctc) {
        let state0 = init_ctc_state(&scenario.train);
        match integrate_ctc(&state0, &scenario.potential, scenario.t_end, &scenario.ctc) {
            Ok(traj) => {
                if let TrajectoryStatus::Truncated { t, reason } = &traj.status {
                    let note = format!("chain integration truncated at t = {t}: {reason}");
                    log::warn!("{note}");
                    bundle.pctc_note = Some(note);
                }
                let f = fs::File::create(out_dir.join(files::TRAJECTORIES_PCTC))?;
                write_ctc_trajectories_csv(BufWriter::new(f), &traj)?;
                let tracks: Vec<Vec<Option<f64>>> = (0..scenario.train.len())
                    .map(|k| {
                        traj.states
                            .iter()
                            .map(|s| Some(positions_from_state(s)[k].xi))
                            .collect()
                    })
                    .collect();
                bundle.pctc = Some(TrajectorySet::new(traj.times, tracks)?);
            }
            Err(e) => {
                log::error!("chain engine failed: {e}");
                bundle.pctc_error = Some(e.to_string());
            }
        }
    }

    if let (Some(pde), Some(pctc)) = (&bundle.pde, &bundle.pctc) {
        let metrics = compare_trajectories(pde, pctc, DEFAULT_COMPARISON_THRESHOLD)?;
        fs::write(
            out_dir.join(files::METRICS),
            serde_json::to_string_pretty(&metrics).expect("metrics serialize"),
        )?;
        bundle.metrics = Some(metrics);
    }
    Ok(bundle)
}

/// PDE leg of a scenario: evolve, peak-find every sample, associate.
fn run_pde_engine(scenario: &Scenario) -> Result<(TrajectorySet, Vec<ConservedSample>)> {
    let min_height = default_min_height(scenario.train.nu0());
    let mut times = Vec::new();
    let mut peak_lists: Vec<Vec<f64>> = Vec::new();
    let mut conserved = Vec::new();
    run_vnlse(
        &scenario.train,
        &scenario.potential,
        &scenario.grid,
        scenario.t_end,
        scenario.solver,
        scenario.sample_every,
        |field, cq| {
            let profile = field.intensity_profile();
            let peaks = find_peaks(&profile, &field.grid, min_height, DEFAULT_MIN_SEPARATION);
            times.push(field.t);
            peak_lists.push(peaks.iter().map(|p| p.position).collect());
            conserved.push(ConservedSample { t: field.t, norm: cq.norm, energy: cq.energy });
            ControlFlow::Continue(())
        },
    )?;
    let ts = associate_tracks(&times, &peak_lists, scenario.train.len(), DEFAULT_GATE)?;
    Ok((ts, conserved))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ScenarioDoc;
    use crate::lax::RegimeLabel;
    use approx::assert_abs_diff_eq;

    #[test]
    fn preset_names_all_build() {
        for name in PRESET_NAMES {
            let sc = preset(name).unwrap();
            assert_eq!(sc.train.len(), 3);
            assert_eq!(sc.grid.h(), 0.05);
            assert!(sc.wants(Engine::Pde) && sc.wants(Engine::Pctc));
        }
        assert!(preset("afr_wall").is_err());
    }

    #[test]
    fn preset_geometry() {
        let sc = preset("afr_free").unwrap();
        assert!(sc.potential.is_free());
        let s = sc.train.solitons();
        assert_abs_diff_eq!(s[0].nu, 0.51);
        assert_abs_diff_eq!(s[1].nu, 0.5);
        assert_abs_diff_eq!(s[2].nu, 0.49);
        assert_abs_diff_eq!(s[0].xi, -8.0);
        assert_abs_diff_eq!(s[2].xi, 8.0);
        assert_abs_diff_eq!(s[1].delta, std::f64::consts::PI);
        assert_eq!(sc.t_end, 300.0);
    }

    #[test]
    fn preset_potentials() {
        let wells = preset("afr_well").unwrap();
        let terms = wells.potential.terms();
        assert_eq!(terms.len(), 33);
        assert_abs_diff_eq!(terms[0].center, -16.0);
        assert_abs_diff_eq!(terms[32].center, 16.0);
        assert!(terms.iter().all(|t| t.c == -0.1 && t.inv_width == 1.0));

        let humps = preset("bsr_hump").unwrap();
        let terms = humps.potential.terms();
        assert_eq!(terms.len(), 13);
        assert_abs_diff_eq!(terms[0].center, -10.0);
        assert_abs_diff_eq!(terms[12].center, 10.0, epsilon = 1e-12);
        assert!(terms.iter().all(|t| t.c == 0.01));
        assert_eq!(humps.grid.x_max(), 80.0);

        let shallow = preset("mar_well").unwrap();
        assert_eq!(shallow.potential.terms().len(), 33);
        assert!(shallow.potential.terms().iter().all(|t| t.c == -0.01));
    }

    #[test]
    fn presets_round_trip_through_toml() {
        for name in PRESET_NAMES {
            let doc = preset_doc(name).unwrap();
            let text = doc.to_toml();
            let back = ScenarioDoc::from_toml(&text).unwrap();
            assert_eq!(back, doc, "preset {name} changed across serialization");
            // and the resolved form is itself stable
            let resolved = back.resolve().unwrap();
            let text2 = resolved.resolved_doc().to_toml();
            let resolved2 = ScenarioDoc::from_toml(&text2).unwrap().resolve().unwrap();
            assert_eq!(resolved2.resolved_doc().to_toml(), text2);
        }
    }

    #[test]
    fn preset_initial_regimes() {
        let afr = classify_scenario(&preset("afr_free").unwrap()).unwrap();
        assert_eq!(afr.label, RegimeLabel::Afr);
        // the well preset's t=0 train is identical: the classifier sees
        // AFR even though the wells will confine it
        let afr_well = classify_scenario(&preset("afr_well").unwrap()).unwrap();
        assert_eq!(afr_well.label, RegimeLabel::Afr);
        for name in ["bsr_free", "bsr_hump", "mar_free", "mar_well"] {
            let report = classify_scenario(&preset(name).unwrap()).unwrap();
            assert_eq!(report.label, RegimeLabel::Bsr, "{name}");
        }
    }

    #[test]
    fn compare_identical_is_zero() {
        let ts = TrajectorySet::new(
            vec![0.0, 1.0, 2.0],
            vec![vec![Some(1.0), Some(2.0), Some(3.0)]],
        )
        .unwrap();
        let m = compare_trajectories(&ts, &ts, 1.0).unwrap();
        assert_eq!(m.tracks[0].max_deviation, Some(0.0));
        assert_eq!(m.tracks[0].rms_deviation, Some(0.0));
        assert_eq!(m.tracks[0].exceed_time, None);
        assert_eq!(m.tracks[0].n_common, 3);
    }

    #[test]
    fn compare_constant_offset() {
        let a = TrajectorySet::new(
            vec![0.0, 1.0, 2.0],
            vec![vec![Some(1.0), Some(2.0), Some(3.0)]],
        )
        .unwrap();
        let b = TrajectorySet::new(
            vec![0.0, 1.0, 2.0],
            vec![vec![Some(1.5), Some(2.5), Some(3.5)]],
        )
        .unwrap();
        let m = compare_trajectories(&a, &b, 1.0).unwrap();
        assert_abs_diff_eq!(m.tracks[0].max_deviation.unwrap(), 0.5);
        assert_abs_diff_eq!(m.tracks[0].rms_deviation.unwrap(), 0.5);
        assert_eq!(m.tracks[0].exceed_time, None);
    }

    #[test]
    fn compare_is_symmetric_and_interpolates() {
        // dense series sampled 4x finer, quadratic path so interpolation
        // actually matters
        let path = |t: f64| 0.3 * t * t - t;
        let sparse_times: Vec<f64> = (0..6).map(|i| i as f64).collect();
        let dense_times: Vec<f64> = (0..21).map(|i| i as f64 * 0.25).collect();
        let a = TrajectorySet::new(
            sparse_times.clone(),
            vec![sparse_times.iter().map(|&t| Some(path(t))).collect()],
        )
        .unwrap();
        let b = TrajectorySet::new(
            dense_times.clone(),
            vec![dense_times.iter().map(|&t| Some(path(t) + 0.25)).collect()],
        )
        .unwrap();
        let ab = compare_trajectories(&a, &b, 1.0).unwrap();
        let ba = compare_trajectories(&b, &a, 1.0).unwrap();
        assert_eq!(ab, ba);
        // common instants are exactly the sparse ones, where the dense
        // series needs no interpolation: the offset comes through exactly
        assert_abs_diff_eq!(ab.tracks[0].max_deviation.unwrap(), 0.25, epsilon = 1e-12);
        assert_eq!(ab.tracks[0].n_common, 6);
    }

    #[test]
    fn compare_skips_missing_and_flags_threshold() {
        let a = TrajectorySet::new(
            vec![0.0, 1.0, 2.0, 3.0],
            vec![vec![Some(0.0), None, Some(0.0), Some(0.0)]],
        )
        .unwrap();
        let b = TrajectorySet::new(
            vec![0.0, 1.0, 2.0, 3.0],
            vec![vec![Some(0.1), Some(5.0), Some(0.2), Some(1.7)]],
        )
        .unwrap();
        let m = compare_trajectories(&a, &b, 1.0).unwrap();
        let tm = m.tracks[0];
        assert_eq!(tm.n_common, 3);
        assert_abs_diff_eq!(tm.max_deviation.unwrap(), 1.7);
        assert_eq!(tm.exceed_time, Some(3.0));
    }

    #[test]
    fn compare_track_count_mismatch() {
        let a = TrajectorySet::new(vec![0.0], vec![vec![Some(0.0)]]).unwrap();
        let b = TrajectorySet::new(vec![0.0], vec![vec![Some(0.0)], vec![Some(1.0)]]).unwrap();
        assert!(compare_trajectories(&a, &b, 1.0).is_err());
    }

    #[test]
    fn run_scenario_writes_bundle() {
        // tiny single-soliton scenario, both engines, short horizon
        let text = r#"
            [[train.solitons]]
            nu = 0.5
            mu = 0.05
            xi = 0.0

            [grid]
            x_min = -20.0
            x_max = 20.0
            n_points = 401

            [run]
            t_end = 2.0
            dt = 0.01
            sample_every = 0.5
        "#;
        let sc = ScenarioDoc::from_toml(text).unwrap().resolve().unwrap();
        let dir = std::env::temp_dir().join(format!("manakov-bundle-{}", std::process::id()));
        let bundle = run_scenario(&sc, &dir).unwrap();
        assert!(bundle.engines_ok());
        for f in [
            files::TRAJECTORIES_PDE,
            files::TRAJECTORIES_PCTC,
            files::REGIME,
            files::CONSERVED,
            files::METRICS,
            files::RESOLVED_SCENARIO,
        ] {
            assert!(dir.join(f).exists(), "{f} missing");
        }
        let metrics = bundle.metrics.unwrap();
        assert!(metrics.worst_max().unwrap() < 0.2);
        // single soliton: chain and PDE must agree almost exactly
        let pde = bundle.pde.unwrap();
        assert_eq!(pde.n_tracks(), 1);
        let regime_text = fs::read_to_string(dir.join(files::REGIME)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&regime_text).unwrap();
        assert!(v["label"].is_string());
        fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn run_scenario_pctc_only() {
        let text = r#"
            [[train.solitons]]
            nu = 0.5
            xi = -4.0

            [[train.solitons]]
            nu = 0.5
            xi = 4.0

            [grid]
            x_min = -20.0
            x_max = 20.0
            n_points = 401

            [run]
            t_end = 2.0
            engines = ["pctc"]
        "#;
        let sc = ScenarioDoc::from_toml(text).unwrap().resolve().unwrap();
        let dir = std::env::temp_dir().join(format!("manakov-pctc-only-{}", std::process::id()));
        let bundle = run_scenario(&sc, &dir).unwrap();
        assert!(bundle.pde.is_none());
        assert!(bundle.pctc.is_some());
        assert!(bundle.metrics.is_none());
        assert!(!dir.join(files::TRAJECTORIES_PDE).exists());
        assert!(!dir.join(files::METRICS).exists());
        assert!(dir.join(files::TRAJECTORIES_PCTC).exists());
        assert!(dir.join(files::REGIME).exists());
        fs::remove_dir_all(&dir).ok();
    }
}
