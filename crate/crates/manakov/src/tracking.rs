//! Peak extraction and trajectory association for PDE fields.
//!
//! The PDE engine produces intensity profiles; solitons appear as local
//! maxima of the total intensity. [`find_peaks`] locates and refines the
//! maxima of one profile; [`associate_tracks`] threads per-sample peak
//! lists into continuous labelled trajectories, tolerating transient
//! merges during collisions by marking samples missing rather than
//! guessing positions.

use crate::error::{Error, Result};
use crate::soliton::Grid;

/// One refined intensity maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    /// Sub-grid position from quadratic refinement.
    pub position: f64,
    /// Interpolated intensity at the refined position.
    pub height: f64,
}

/// Default peak-height floor: a tenth of a reference soliton's crest
/// intensity `(2 nu0)^2`.
pub fn default_min_height(nu0: f64) -> f64 {
    0.1 * (2.0 * nu0) * (2.0 * nu0)
}

/// Default minimum spacing between reported peaks, in space units.
pub const DEFAULT_MIN_SEPARATION: f64 = 1.0;

/// Default association displacement gate, in space units per sample
/// interval. Train speeds in the intended regimes stay below ~0.2 per
/// unit time and sampling is at most one time unit apart, so the gate
/// has severalfold headroom.
pub const DEFAULT_GATE: f64 = 1.0;

/// Locate local maxima of `profile` (values on `grid`) that rise above
/// `min_height`, refine each by a quadratic fit through the three nodes
/// around the discrete maximum, and thin the result so surviving peaks
/// are at least `min_separation` apart (greedy, keeping taller peaks).
/// Peaks come back sorted by position. Sub-cell plateaus of bitwise-equal
/// values count once, at their left node.
pub fn find_peaks(profile: &[f64], grid: &Grid, min_height: f64, min_separation: f64) -> Vec<Peak> {
    assert_eq!(profile.len(), grid.n_points(), "profile length must match the grid");
    assert!(min_height > 0.0, "min_height must be positive");
    let n = profile.len();
    let mut candidates: Vec<Peak> = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        let (lo, mid, hi) = (profile[i - 1], profile[i], profile[i + 1]);
        let is_max = mid >= lo && mid >= hi && (mid > lo || mid > hi);
        if is_max && mid > min_height {
            candidates.push(refine_peak(grid, i, lo, mid, hi));
            // skip a flat crest so a two-node plateau is reported once
            while i + 2 < n && profile[i + 1] == profile[i] {
                i += 1;
            }
        }
        i += 1;
    }
    // greedy separation thinning: taller peaks win, ties resolved by
    // position so the outcome is deterministic
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&a, &b| {
        candidates[b]
            .height
            .total_cmp(&candidates[a].height)
            .then(candidates[a].position.total_cmp(&candidates[b].position))
    });
    let mut kept: Vec<Peak> = Vec::new();
    for idx in order {
        let p = candidates[idx];
        if kept.iter().all(|q| (q.position - p.position).abs() >= min_separation) {
            kept.push(p);
        }
    }
    kept.sort_by(|a, b| a.position.total_cmp(&b.position));
    kept
}

/// Vertex of the parabola through `(x_{i-1}, lo), (x_i, mid), (x_{i+1}, hi)`.
///
/// The curvature is computed as `(lo + hi) - 2 mid` — symmetric in
/// `lo`/`hi` at the bit level — so mirroring a profile mirrors refined
/// offsets exactly.
fn refine_peak(grid: &Grid, i: usize, lo: f64, mid: f64, hi: f64) -> Peak {
    let h = grid.h();
    let curv = (lo + hi) - 2.0 * mid;
    if curv >= 0.0 {
        // flat or degenerate three-point stencil: keep the node itself
        return Peak { position: grid.x(i), height: mid };
    }
    let slope = lo - hi;
    let offset = 0.5 * h * slope / curv;
    let height = mid - slope * slope / (8.0 * curv);
    Peak { position: grid.x(i) + offset, height }
}

/// Labelled trajectories on a common time axis. `tracks[k][j]` is the
/// position of track `k` at `times[j]`, or `None` while that soliton's
/// peak is unresolvable (merged with a neighbour during a collision).
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySet {
    pub times: Vec<f64>,
    pub tracks: Vec<Vec<Option<f64>>>,
}

impl TrajectorySet {
    /// Validated constructor: every track spans every sample instant and
    /// present positions are finite.
    pub fn new(times: Vec<f64>, tracks: Vec<Vec<Option<f64>>>) -> Result<Self> {
        if times.iter().any(|t| !t.is_finite()) {
            return Err(Error::Tracking("sample times must be finite".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Tracking("sample times must be strictly increasing".into()));
        }
        for (k, track) in tracks.iter().enumerate() {
            if track.len() != times.len() {
                return Err(Error::Tracking(format!(
                    "track {k} has {} samples, expected {}",
                    track.len(),
                    times.len()
                )));
            }
            if track.iter().flatten().any(|x| !x.is_finite()) {
                return Err(Error::Tracking(format!("track {k} contains non-finite positions")));
            }
        }
        Ok(TrajectorySet { times, tracks })
    }

    pub fn n_tracks(&self) -> usize {
        self.tracks.len()
    }

    pub fn n_samples(&self) -> usize {
        self.times.len()
    }
}

/// Thread per-sample peak positions into `n_expected` labelled tracks.
///
/// The first sample must resolve exactly `n_expected` peaks; they seed
/// the tracks in ascending position order. At each later sample every
/// track predicts its position by linear extrapolation from its last two
/// observations (or holds still with only one) and claims the nearest
/// unclaimed peak within `gate` space units per elapsed sample interval
/// — a track unseen for several samples searches proportionally wider.
/// Claims are resolved globally nearest-first; exact distance ties fall
/// back to track index (logged). Tracks that claim nothing are marked
/// missing for that sample; surplus peaks are ignored.
pub fn associate_tracks(
    times: &[f64],
    peak_lists: &[Vec<f64>],
    n_expected: usize,
    gate: f64,
) -> Result<TrajectorySet> {
    if n_expected == 0 {
        return Err(Error::Tracking("n_expected must be at least 1".into()));
    }
    if !(gate > 0.0 && gate.is_finite()) {
        return Err(Error::Tracking(format!("gate must be positive, got {gate}")));
    }
    if times.len() != peak_lists.len() {
        return Err(Error::Tracking(format!(
            "{} sample times but {} peak lists",
            times.len(),
            peak_lists.len()
        )));
    }
    if times.is_empty() {
        return Err(Error::Tracking("no samples to associate".into()));
    }
    if peak_lists[0].len() != n_expected {
        return Err(Error::Tracking(format!(
            "first sample resolves {} peaks, expected {}",
            peak_lists[0].len(),
            n_expected
        )));
    }

    let mut tracks: Vec<Vec<Option<f64>>> = vec![Vec::with_capacity(times.len()); n_expected];
    let mut first: Vec<f64> = peak_lists[0].clone();
    first.sort_by(|a, b| a.total_cmp(b));
    for (k, track) in tracks.iter_mut().enumerate() {
        track.push(Some(first[k]));
    }
    // per-track association state: the last two observed (sample index,
    // position) pairs, newest first
    let mut last: Vec<(usize, f64)> = first.iter().map(|&x| (0, x)).collect();
    let mut prev: Vec<Option<(usize, f64)>> = vec![None; n_expected];

    for (j, peaks) in peak_lists.iter().enumerate().skip(1) {
        // candidate (distance, track, peak) triples within each track's gate
        let mut cands: Vec<(f64, usize, usize)> = Vec::new();
        for (k, &(j_last, p_last)) in last.iter().enumerate() {
            let elapsed = (j - j_last) as f64;
            let velocity = match prev[k] {
                Some((j_prev, p_prev)) => (p_last - p_prev) / (j_last - j_prev) as f64,
                None => 0.0,
            };
            let predicted = p_last + velocity * elapsed;
            let reach = gate * elapsed;
            for (pi, &x) in peaks.iter().enumerate() {
                let d = (x - predicted).abs();
                if d <= reach {
                    cands.push((d, k, pi));
                }
            }
        }
        cands.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut track_done = vec![false; n_expected];
        let mut peak_done = vec![false; peaks.len()];
        let mut assigned: Vec<Option<f64>> = vec![None; n_expected];
        for w in cands.windows(2) {
            if w[0].0 == w[1].0 && w[0].1 != w[1].1 && w[0].2 == w[1].2 {
                log::debug!(
                    "sample {j}: tracks {} and {} tie for peak {} at distance {}; lower index wins",
                    w[0].1,
                    w[1].1,
                    w[0].2,
                    w[0].0
                );
            }
        }
        for (_, k, pi) in cands {
            if !track_done[k] && !peak_done[pi] {
                track_done[k] = true;
                peak_done[pi] = true;
                assigned[k] = Some(peaks[pi]);
            }
        }
        for k in 0..n_expected {
            tracks[k].push(assigned[k]);
            if let Some(x) = assigned[k] {
                prev[k] = Some(last[k]);
                last[k] = (j, x);
            }
        }
    }
    TrajectorySet::new(times.to_vec(), tracks)
}
