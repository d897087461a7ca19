//! Soliton-train description, polarization algebra, grid/field containers,
//! and exact sampling of a train onto a grid.
//!
//! A train member `k` contributes, to each field component `c`,
//!
//! ```text
//! u_c(x, t) = 2 nu_k sech(z_k) exp(i phi_k) n_{k,c}
//! z_k   = 2 nu_k (x - xi_k(t))
//! phi_k = (mu_k / nu_k) z_k + delta_k(t)
//! xi_k(t)    = 2 mu_k t + xi_k(0)
//! delta_k(t) = 2 (mu_k^2 + nu_k^2) t + delta_k(0)
//! ```
//!
//! where `n_k` is a unit polarization 2-vector. Amplitude `nu`, velocity
//! `mu`, position `xi`, and phase `delta` are the per-soliton parameters;
//! the train means `nu0`, `mu0`, `delta0` anchor the reduced (Toda) model.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Unit polarization 2-vector `(e^{i gamma} cos theta, e^{-i gamma} sin theta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationVector {
    c: [Complex64; 2],
}

impl PolarizationVector {
    /// Build from polarization angles. `theta` controls the population split
    /// between the two components, `gamma` their relative phase.
    pub fn from_angles(theta: f64, gamma: f64) -> Self {
        let (s, c) = theta.sin_cos();
        PolarizationVector {
            c: [
                Complex64::from_polar(1.0, gamma) * c,
                Complex64::from_polar(1.0, -gamma) * s,
            ],
        }
    }

    /// Build from raw components: the overall mean phase
    /// `(arg c1 + arg c2) / 2` is divided out and the result is scaled to
    /// unit norm. Errors on a (numerically) zero vector.
    pub fn from_components(c1: Complex64, c2: Complex64) -> Result<Self> {
        let norm = (c1.norm_sqr() + c2.norm_sqr()).sqrt();
        if !norm.is_finite() || norm < 1e-300 {
            return Err(Error::InvalidTrain(
                "polarization vector must be nonzero and finite".into(),
            ));
        }
        let mean_phase = 0.5 * (c1.arg() + c2.arg());
        let rot = Complex64::from_polar(1.0 / norm, -mean_phase);
        Ok(PolarizationVector {
            c: [c1 * rot, c2 * rot],
        })
    }

    /// Crate-internal constructor that takes components as they are —
    /// no normalization, no phase fixing. Used by integrators that carry
    /// polarization as dynamic state and must not touch its gauge.
    pub(crate) fn from_raw_unchecked(c1: Complex64, c2: Complex64) -> Self {
        PolarizationVector { c: [c1, c2] }
    }

    /// The two components `(n_1, n_2)`.
    pub fn components(&self) -> [Complex64; 2] {
        self.c
    }

    /// Hermitian inner product `<self, other> = conj(self) . other`
    /// (conjugation on the first argument).
    pub fn inner(&self, other: &PolarizationVector) -> Complex64 {
        self.c[0].conj() * other.c[0] + self.c[1].conj() * other.c[1]
    }

    /// Squared Euclidean norm; 1 up to rounding by construction.
    pub fn norm_sqr(&self) -> f64 {
        self.c[0].norm_sqr() + self.c[1].norm_sqr()
    }

    /// Apply a 2x2 matrix (rows-of-columns layout, `m[row][col]`).
    /// Intended for unitary gauge rotations in invariance checks.
    pub fn transform(&self, m: &[[Complex64; 2]; 2]) -> Self {
        PolarizationVector {
            c: [
                m[0][0] * self.c[0] + m[0][1] * self.c[1],
                m[1][0] * self.c[0] + m[1][1] * self.c[1],
            ],
        }
    }
}

/// Parameters of one soliton in a train.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolitonParams {
    /// Amplitude / inverse width (`nu > 0`); peak field amplitude is `2 nu`.
    pub nu: f64,
    /// Velocity parameter; the peak moves at `2 mu`.
    pub mu: f64,
    /// Initial center position.
    pub xi: f64,
    /// Initial phase.
    pub delta: f64,
    /// Unit polarization vector.
    pub pol: PolarizationVector,
}

/// A validated train of solitons, ordered by initial position.
///
/// Stores the train means `nu0 = mean(nu_k)`, `mu0 = mean(mu_k)`,
/// `delta0 = mean(delta_k)` that the reduced model treats as frozen
/// reference values.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    solitons: Vec<SolitonParams>,
    nu0: f64,
    mu0: f64,
    delta0: f64,
}

impl TrainConfig {
    /// Validate and freeze a train. Requirements: at least one soliton,
    /// all parameters finite, every `nu_k > 0`, positions strictly
    /// increasing.
    pub fn new(solitons: Vec<SolitonParams>) -> Result<Self> {
        if solitons.is_empty() {
            return Err(Error::InvalidTrain("train must contain at least one soliton".into()));
        }
        for (k, s) in solitons.iter().enumerate() {
            let finite = s.nu.is_finite()
                && s.mu.is_finite()
                && s.xi.is_finite()
                && s.delta.is_finite()
                && s.pol.c.iter().all(|z| z.re.is_finite() && z.im.is_finite());
            if !finite {
                return Err(Error::InvalidTrain(format!(
                    "soliton {} has a non-finite parameter",
                    k + 1
                )));
            }
            if s.nu <= 0.0 {
                return Err(Error::InvalidTrain(format!(
                    "soliton {} has nu = {}, expected nu > 0",
                    k + 1,
                    s.nu
                )));
            }
        }
        for w in solitons.windows(2) {
            if !(w[0].xi < w[1].xi) {
                return Err(Error::InvalidTrain(format!(
                    "initial positions must be strictly increasing, got {} then {}",
                    w[0].xi, w[1].xi
                )));
            }
        }
        let n = solitons.len() as f64;
        let nu0 = solitons.iter().map(|s| s.nu).sum::<f64>() / n;
        let mu0 = solitons.iter().map(|s| s.mu).sum::<f64>() / n;
        let delta0 = solitons.iter().map(|s| s.delta).sum::<f64>() / n;
        Ok(TrainConfig { solitons, nu0, mu0, delta0 })
    }

    /// Number of solitons.
    pub fn len(&self) -> usize {
        self.solitons.len()
    }

    /// True when the train is empty — never, by construction.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// The ordered solitons.
    pub fn solitons(&self) -> &[SolitonParams] {
        &self.solitons
    }

    /// Mean amplitude, the frozen reference of the reduced model.
    pub fn nu0(&self) -> f64 {
        self.nu0
    }

    /// Mean velocity.
    pub fn mu0(&self) -> f64 {
        self.mu0
    }

    /// Mean initial phase.
    pub fn delta0(&self) -> f64 {
        self.delta0
    }

    /// Smallest initial neighbor separation. For a single soliton this is
    /// infinite (there is no neighbor to overlap with).
    pub fn r_min(&self) -> f64 {
        self.solitons
            .windows(2)
            .map(|w| w[1].xi - w[0].xi)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Uniform 1-D grid with `n_points` nodes spanning `[x_min, x_max]`
/// inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n_points: usize,
}

impl Grid {
    /// Validate a grid: finite bounds, `x_min < x_max`, at least 3 nodes.
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::InvalidGrid("grid bounds must be finite".into()));
        }
        if !(x_min < x_max) {
            return Err(Error::InvalidGrid(format!(
                "need x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        if n_points < 3 {
            return Err(Error::InvalidGrid(format!(
                "need at least 3 grid points, got {n_points}"
            )));
        }
        Ok(Grid { x_min, x_max, n_points })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    /// Node spacing.
    pub fn h(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    /// Coordinate of node `i`.
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + self.h() * i as f64
    }

    /// All node coordinates.
    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |i| self.x(i))
    }
}

/// A two-component complex field sampled on a [`Grid`] at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub grid: Grid,
    pub u1: Vec<Complex64>,
    pub u2: Vec<Complex64>,
    pub t: f64,
}

impl Field {
    /// Zero field at time `t`.
    pub fn zeros(grid: Grid, t: f64) -> Self {
        let n = grid.n_points();
        Field {
            grid,
            u1: vec![Complex64::ZERO; n],
            u2: vec![Complex64::ZERO; n],
            t,
        }
    }

    /// Total intensity `|u1|^2 + |u2|^2` at node `i`.
    pub fn intensity(&self, i: usize) -> f64 {
        self.u1[i].norm_sqr() + self.u2[i].norm_sqr()
    }

    /// Total intensity profile over the whole grid.
    pub fn intensity_profile(&self) -> Vec<f64> {
        (0..self.grid.n_points()).map(|i| self.intensity(i)).collect()
    }

    /// True when every sample of both components is finite.
    pub fn is_finite(&self) -> bool {
        self.u1
            .iter()
            .chain(self.u2.iter())
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Exact superposed train profile at time `t`, sampled on `grid`.
///
/// This is the sum of the per-soliton profiles with their free-motion
/// positions and phases advanced to `t`; it is exact for one soliton and a
/// good initial/reference profile for well-separated trains.
pub fn sample_train(config: &TrainConfig, grid: &Grid, t: f64) -> Field {
    let mut field = Field::zeros(*grid, t);
    for s in config.solitons() {
        let xi_t = 2.0 * s.mu * t + s.xi;
        let delta_t = 2.0 * (s.mu * s.mu + s.nu * s.nu) * t + s.delta;
        let [n1, n2] = s.pol.components();
        for (i, x) in grid.points().enumerate() {
            let z = 2.0 * s.nu * (x - xi_t);
            let phi = (s.mu / s.nu) * z + delta_t;
            // sech via exp to avoid overflow for large |z|
            let sech = 2.0 / (z.exp() + (-z).exp());
            let amp = Complex64::from_polar(2.0 * s.nu * sech, phi);
            field.u1[i] += amp * n1;
            field.u2[i] += amp * n2;
        }
    }
    field
}

/// Result of [`check_grid_tails`]: how deeply the domain boundaries sit in
/// every soliton's exponential tail at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailReport {
    /// Smallest `|2 nu_k (x_bound - xi_k)|` over solitons and both bounds.
    pub min_tail_arg: f64,
    /// True when `min_tail_arg >= 10` (boundary intensity below ~1e-8 of
    /// the peak).
    pub adequate: bool,
}

/// Check that both domain boundaries are far out on every soliton's tail.
/// Inadequate tails are reported (and logged), not rejected: short domains
/// are occasionally useful for quick looks.
pub fn check_grid_tails(config: &TrainConfig, grid: &Grid) -> TailReport {
    let mut min_tail_arg = f64::INFINITY;
    for s in config.solitons() {
        for bound in [grid.x_min(), grid.x_max()] {
            min_tail_arg = min_tail_arg.min((2.0 * s.nu * (bound - s.xi)).abs());
        }
    }
    let adequate = min_tail_arg >= 10.0;
    if !adequate {
        log::warn!(
            "grid boundaries reach only {min_tail_arg:.2} tail widths from the nearest soliton \
             (want >= 10); boundary values are not negligible"
        );
    }
    TailReport { min_tail_arg, adequate }
}

/// Quantities controlling how well a train fits the near-identical,
/// well-separated assumptions behind the reduced model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticityReport {
    /// Largest relative amplitude deviation `max_k |nu_k - nu0| / nu0`.
    pub amp_spread_rel: f64,
    /// Largest velocity deviation `max_k |mu_k - mu0|`.
    pub vel_spread_abs: f64,
    /// Smallest initial neighbor separation.
    pub r_min: f64,
    /// Overlap parameter `exp(-nu0 * r_min)`; the reduced model is built
    /// from terms of this order.
    pub eps0: f64,
    /// Smallest `|nu_k - nu0| * (xi_{k+1} - xi_k)` over neighbor pairs —
    /// reported for reference only, not used for flagging.
    pub spread_separation_min: f64,
    /// Set when the assumptions look strained: `eps0 > 0.1` or
    /// `amp_spread_rel > 0.2`.
    pub flagged: bool,
}

/// Quantify the separation-of-scales assumptions for `config`.
pub fn adiabaticity_report(config: &TrainConfig) -> AdiabaticityReport {
    let nu0 = config.nu0();
    let mu0 = config.mu0();
    let amp_spread_rel = config
        .solitons()
        .iter()
        .map(|s| (s.nu - nu0).abs() / nu0)
        .fold(0.0, f64::max);
    let vel_spread_abs = config
        .solitons()
        .iter()
        .map(|s| (s.mu - mu0).abs())
        .fold(0.0, f64::max);
    let r_min = config.r_min();
    let eps0 = (-nu0 * r_min).exp();
    let spread_separation_min = config
        .solitons()
        .windows(2)
        .map(|w| {
            let gap = w[1].xi - w[0].xi;
            ((w[0].nu - nu0).abs() * gap).min((w[1].nu - nu0).abs() * gap)
        })
        .fold(f64::INFINITY, f64::min);
    let flagged = eps0 > 0.1 || amp_spread_rel > 0.2;
    if flagged {
        log::warn!(
            "train strains the reduced-model assumptions: overlap eps0 = {eps0:.3}, \
             relative amplitude spread = {amp_spread_rel:.3}"
        );
    }
    AdiabaticityReport {
        amp_spread_rel,
        vel_spread_abs,
        r_min,
        eps0,
        spread_separation_min,
        flagged,
    }
}
