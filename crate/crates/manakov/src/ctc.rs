//! The reduced-order engine: a perturbed complex Toda chain whose sites are
//! solitons.
//!
//! Each soliton is represented by one complex eigenvalue
//! `lambda_k = mu_k + i nu_k` (velocity and amplitude) and one complex
//! coordinate `q_k` whose real part encodes the position and whose
//! imaginary part encodes the phase:
//!
//! ```text
//! q_k = -2 nu0 xi_k + k ln(4 nu0^2) - i (delta_k + delta0 + k pi - 2 mu0 xi_k)
//! ```
//!
//! Nearest neighbors couple through `exp(q_{k+1} - q_k)` weighted by the
//! polarization overlap; a sech^2 potential enters through the closed-form
//! kernels of [`crate::potential`]. With no potential the flow reduces to
//! the free (open-ended) complex Toda chain.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::potential::{kernels, PotentialSpec};
use crate::soliton::{PolarizationVector, TrainConfig};

/// Dynamic state of the chain at one instant.
///
/// The train means `nu0`, `mu0`, `delta0` are *frozen*: they are reference
/// scales fixed by the initial train and are never updated during
/// integration (recomputing them would silently change what `q_k` means).
#[derive(Debug, Clone, PartialEq)]
pub struct CtcState {
    pub t: f64,
    /// `lambda_k = mu_k + i nu_k`; the imaginary parts stay positive for
    /// any state describing real solitons.
    pub lambda: Vec<Complex64>,
    /// Complex chain coordinates `q_k`.
    pub q: Vec<Complex64>,
    /// Unit polarization vectors.
    pub pol: Vec<PolarizationVector>,
    /// Frozen mean amplitude.
    pub nu0: f64,
    /// Frozen mean velocity.
    pub mu0: f64,
    /// Frozen mean initial phase.
    pub delta0: f64,
}

impl CtcState {
    /// Number of solitons.
    pub fn len(&self) -> usize {
        self.lambda.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda.is_empty()
    }
}

/// Position, amplitude, and velocity of one soliton, as read back from the
/// chain coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolitonCoordinates {
    pub xi: f64,
    pub nu: f64,
    pub mu: f64,
}

/// Map a train description to its initial chain state.
pub fn init_ctc_state(config: &TrainConfig) -> CtcState {
    let nu0 = config.nu0();
    let mu0 = config.mu0();
    let delta0 = config.delta0();
    let log_scale = (4.0 * nu0 * nu0).ln();
    let mut lambda = Vec::with_capacity(config.len());
    let mut q = Vec::with_capacity(config.len());
    let mut pol = Vec::with_capacity(config.len());
    for (i, s) in config.solitons().iter().enumerate() {
        let k = (i + 1) as f64;
        lambda.push(Complex64::new(s.mu, s.nu));
        q.push(Complex64::new(
            -2.0 * nu0 * s.xi + k * log_scale,
            -(s.delta + delta0 + k * std::f64::consts::PI - 2.0 * mu0 * s.xi),
        ));
        pol.push(s.pol);
    }
    CtcState { t: 0.0, lambda, q, pol, nu0, mu0, delta0 }
}

/// Invert the coordinate map: physical positions plus `(nu_k, mu_k)`.
pub fn positions_from_state(state: &CtcState) -> Vec<SolitonCoordinates> {
    let log_scale = (4.0 * state.nu0 * state.nu0).ln();
    state
        .lambda
        .iter()
        .zip(&state.q)
        .enumerate()
        .map(|(i, (l, q))| SolitonCoordinates {
            xi: ((i + 1) as f64 * log_scale - q.re) / (2.0 * state.nu0),
            nu: l.im,
            mu: l.re,
        })
        .collect()
}

/// Phase-like observable for soliton `k` (0-based): `-Im q_k` with the
/// constant offsets of the coordinate map removed,
/// `-Im q_k - delta0 - (k+1) pi + 2 mu0 xi_k`. At `t = 0` this equals the
/// soliton's `delta_k`; afterwards it tracks the chain's own phase
/// evolution (which deliberately omits the fast common rotation).
pub fn delta_proxy(state: &CtcState, k: usize) -> f64 {
    let log_scale = (4.0 * state.nu0 * state.nu0).ln();
    let xi = ((k + 1) as f64 * log_scale - state.q[k].re) / (2.0 * state.nu0);
    -state.q[k].im - state.delta0 - (k + 1) as f64 * std::f64::consts::PI + 2.0 * state.mu0 * xi
}

/// Per-soliton force terms a sech^2 potential exerts on the chain.
///
/// For pure sech^2 potentials the `n` and `xi` entries vanish identically
/// (the corresponding integrals are odd); they are kept so the structure of
/// the flow stays visible.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationForces {
    /// Velocity forcing `m_k = sum_s 2 c_s nu_k P(d_{k,s})`.
    pub m: Vec<f64>,
    /// Amplitude forcing; identically zero here.
    pub n: Vec<f64>,
    /// Position-equation forcing; identically zero here.
    pub xi: Vec<f64>,
    /// Phase forcing `d_k = sum_s c_s R(d_{k,s})`.
    pub d: Vec<f64>,
    /// Combined phase forcing `x_k = 2 mu_k xi_k + d_k` (= `d_k` here).
    pub x: Vec<f64>,
}

/// Evaluate the potential's forces on every soliton of `state`.
///
/// The kernel separation is `d_{k,s} = 2 nu0 (xi_k - center_s)`: the
/// closed-form kernels assume each term's width matches the reference
/// soliton width (`inv_width = 2 nu0`), so centers are scaled by `2 nu0`
/// regardless of the term's own `inv_width`. [`validate_widths`] reports
/// mismatches.
pub fn perturbation_forces(state: &CtcState, spec: &PotentialSpec) -> PerturbationForces {
    let coords = positions_from_state(state);
    let n_sol = state.len();
    let mut f = PerturbationForces {
        m: vec![0.0; n_sol],
        n: vec![0.0; n_sol],
        xi: vec![0.0; n_sol],
        d: vec![0.0; n_sol],
        x: vec![0.0; n_sol],
    };
    for (k, c) in coords.iter().enumerate() {
        for term in spec.terms() {
            let sep = 2.0 * state.nu0 * (c.xi - term.center);
            let kv = kernels(sep);
            f.m[k] += 2.0 * term.c * c.nu * kv.p;
            f.d[k] += term.c * kv.r;
        }
        f.x[k] = 2.0 * c.mu * f.xi[k] + f.d[k];
    }
    f
}

/// Warn when potential terms are not width-matched to the train
/// (`inv_width != 2 nu0`); the reduced model's kernels are exact only for
/// matched widths. Returns true when all terms match.
pub fn validate_widths(spec: &PotentialSpec, nu0: f64) -> bool {
    let matched = spec
        .terms()
        .iter()
        .all(|t| (t.inv_width - 2.0 * nu0).abs() <= 1e-9 * (2.0 * nu0));
    if !matched {
        log::warn!(
            "potential terms are not width-matched to the train (inv_width != 2*nu0 = {}); \
             the reduced model treats every term as width-matched",
            2.0 * nu0
        );
    }
    matched
}

/// Whether polarization vectors evolve or stay frozen at their initial
/// values (the reduced model's default: their drift is of the same order
/// as terms already neglected).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PolarizationMode {
    #[default]
    Frozen,
    Evolving,
}

/// Time derivative of a [`CtcState`].
#[derive(Debug, Clone, PartialEq)]
pub struct CtcDerivative {
    pub dlambda: Vec<Complex64>,
    pub dq: Vec<Complex64>,
    /// Component derivatives of each polarization vector (zero when
    /// frozen).
    pub dpol: Vec<[Complex64; 2]>,
}

/// Right-hand side of the (perturbed) chain. With `spec` empty this is the
/// free chain; the open ends carry no coupling
/// (`exp(q_0 - q_1) = exp(q_{N+1} - q_N) = 0`).
pub fn pctc_rhs(state: &CtcState, spec: &PotentialSpec, mode: PolarizationMode) -> CtcDerivative {
    let n = state.len();
    let nu0 = state.nu0;
    // nearest-neighbor couplings, each computed once so the pairwise terms
    // telescope exactly (sum of dlambda is the pure force sum, bit for bit)
    let coupling: Vec<Complex64> = (0..n.saturating_sub(1))
        .map(|k| (state.q[k + 1] - state.q[k]).exp() * state.pol[k + 1].inner(&state.pol[k]))
        .collect();
    let forces = if spec.is_free() {
        None
    } else {
        Some(perturbation_forces(state, spec))
    };
    let mut dlambda = Vec::with_capacity(n);
    let mut dq = Vec::with_capacity(n);
    for k in 0..n {
        let up = if k + 1 < n { coupling[k] } else { Complex64::ZERO };
        let down = if k > 0 { coupling[k - 1] } else { Complex64::ZERO };
        let mut dl = (up - down) * (-4.0 * nu0);
        if let Some(f) = &forces {
            dl += Complex64::new(f.m[k], f.n[k]);
        }
        dlambda.push(dl);
        let mut dqk = state.lambda[k] * (-4.0 * nu0);
        if let Some(f) = &forces {
            dqk += Complex64::new(0.0, 2.0 * f.xi[k]) * Complex64::new(state.mu0, nu0)
                - Complex64::new(0.0, f.x[k]);
        }
        dq.push(dqk);
    }
    let dpol = match mode {
        PolarizationMode::Frozen => vec![[Complex64::ZERO; 2]; n],
        PolarizationMode::Evolving => polarization_rhs(state),
    };
    CtcDerivative { dlambda, dq, dpol }
}

/// Unperturbed polarization flow (nearest-neighbor exchange). The common
/// (gauge) rotation is omitted; only the exchange terms that can reorient
/// vectors relative to each other are kept. Exactly norm-preserving.
fn polarization_rhs(state: &CtcState) -> Vec<[Complex64; 2]> {
    let n = state.len();
    let nu0 = state.nu0;
    let coords = positions_from_state(state);
    let mut out = vec![[Complex64::ZERO; 2]; n];
    for k in 0..n {
        for j in [k.wrapping_sub(1), k + 1] {
            if j >= n {
                continue;
            }
            // relative slow phase between sites, read off the chain coords
            let theta = -(state.q[j].im - state.q[k].im)
                - (j as f64 - k as f64) * std::f64::consts::PI;
            let phase = Complex64::from_polar(1.0, theta);
            let overlap = (-2.0 * nu0 * (coords[k].xi - coords[j].xi).abs()).exp();
            let r = phase * state.pol[k].inner(&state.pol[j]);
            let [nj1, nj2] = state.pol[j].components();
            let [nk1, nk2] = state.pol[k].components();
            let pref = Complex64::new(0.0, 4.0 * nu0 * nu0) * overlap;
            let exch = Complex64::new(0.0, -2.0 * r.im);
            out[k][0] += pref * (2.0 * phase * nj1 + exch * nk1);
            out[k][1] += pref * (2.0 * phase * nj2 + exch * nk2);
        }
    }
    out
}

/// Step-size control for [`integrate_ctc`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepControl {
    /// Classical 4th-order Runge–Kutta with a fixed step.
    Fixed { dt: f64 },
    /// Embedded 5(4) pair with automatic step size at the given relative
    /// tolerance.
    Adaptive { rel_tol: f64 },
}

/// Options for [`integrate_ctc`].
#[derive(Debug, Clone, PartialEq)]
pub struct CtcOptions {
    pub step: StepControl,
    /// Sampling cadence of the returned trajectory.
    pub sample_every: f64,
    pub polarization: PolarizationMode,
    /// Neighbor gap in `Re q` below which the trajectory is truncated:
    /// the chain coordinates stop describing separated solitons.
    pub collision_gap: f64,
}

impl Default for CtcOptions {
    fn default() -> Self {
        CtcOptions {
            step: StepControl::Fixed { dt: 0.05 },
            sample_every: 0.5,
            polarization: PolarizationMode::Frozen,
            collision_gap: 0.5,
        }
    }
}

/// Why a trajectory ended.
#[derive(Debug, Clone, PartialEq)]
pub enum TrajectoryStatus {
    Completed,
    /// Integration stopped early (soliton collision / model breakdown);
    /// the samples collected so far are kept.
    Truncated { t: f64, reason: String },
}

/// A sampled chain trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct CtcTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<CtcState>,
    pub status: TrajectoryStatus,
}

// ---- flattened-vector plumbing for the integrators ----

struct ChainSystem<'a> {
    spec: &'a PotentialSpec,
    mode: PolarizationMode,
    n: usize,
    nu0: f64,
    mu0: f64,
    delta0: f64,
    frozen_pol: Vec<PolarizationVector>,
}

impl ChainSystem<'_> {
    fn flatten(&self, state: &CtcState) -> Vec<Complex64> {
        let mut y = Vec::with_capacity(self.dim());
        y.extend_from_slice(&state.lambda);
        y.extend_from_slice(&state.q);
        if self.mode == PolarizationMode::Evolving {
            for p in &state.pol {
                let [c1, c2] = p.components();
                y.push(c1);
                y.push(c2);
            }
        }
        y
    }

    fn dim(&self) -> usize {
        match self.mode {
            PolarizationMode::Frozen => 2 * self.n,
            PolarizationMode::Evolving => 4 * self.n,
        }
    }

    fn unflatten(&self, t: f64, y: &[Complex64]) -> CtcState {
        let n = self.n;
        let pol = match self.mode {
            PolarizationMode::Frozen => self.frozen_pol.clone(),
            PolarizationMode::Evolving => (0..n)
                .map(|k| {
                    PolarizationVector::from_raw_unchecked(y[2 * n + 2 * k], y[2 * n + 2 * k + 1])
                })
                .collect(),
        };
        CtcState {
            t,
            lambda: y[..n].to_vec(),
            q: y[n..2 * n].to_vec(),
            pol,
            nu0: self.nu0,
            mu0: self.mu0,
            delta0: self.delta0,
        }
    }

    fn rhs(&self, y: &[Complex64]) -> Vec<Complex64> {
        let state = self.unflatten(0.0, y); // autonomous flow
        let d = pctc_rhs(&state, self.spec, self.mode);
        let mut out = Vec::with_capacity(self.dim());
        out.extend_from_slice(&d.dlambda);
        out.extend_from_slice(&d.dq);
        if self.mode == PolarizationMode::Evolving {
            for dp in &d.dpol {
                out.push(dp[0]);
                out.push(dp[1]);
            }
        }
        out
    }

    /// Smallest neighbor gap in Re q, infinite for a single soliton.
    fn min_gap(&self, y: &[Complex64]) -> f64 {
        let q = &y[self.n..2 * self.n];
        q.windows(2)
            .map(|w| (w[1].re - w[0].re).abs())
            .fold(f64::INFINITY, f64::min)
    }
}

fn rk4_step(sys: &ChainSystem, y: &[Complex64], h: f64) -> Vec<Complex64> {
    let k1 = sys.rhs(y);
    let y2: Vec<_> = y.iter().zip(&k1).map(|(a, b)| a + b * (0.5 * h)).collect();
    let k2 = sys.rhs(&y2);
    let y3: Vec<_> = y.iter().zip(&k2).map(|(a, b)| a + b * (0.5 * h)).collect();
    let k3 = sys.rhs(&y3);
    let y4: Vec<_> = y.iter().zip(&k3).map(|(a, b)| a + b * h).collect();
    let k4 = sys.rhs(&y4);
    y.iter()
        .enumerate()
        .map(|(i, a)| a + (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0))
        .collect()
}

/// Cash–Karp embedded 5(4) step: returns (5th-order solution, scaled error).
fn ck45_step(sys: &ChainSystem, y: &[Complex64], h: f64, rel_tol: f64) -> (Vec<Complex64>, f64) {
    const A: [[f64; 5]; 5] = [
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0],
        [3.0 / 10.0, -9.0 / 10.0, 6.0 / 5.0, 0.0, 0.0],
        [-11.0 / 54.0, 5.0 / 2.0, -70.0 / 27.0, 35.0 / 27.0, 0.0],
        [
            1631.0 / 55296.0,
            175.0 / 512.0,
            575.0 / 13824.0,
            44275.0 / 110592.0,
            253.0 / 4096.0,
        ],
    ];
    const B5: [f64; 6] = [37.0 / 378.0, 0.0, 250.0 / 621.0, 125.0 / 594.0, 0.0, 512.0 / 1771.0];
    const B4: [f64; 6] = [
        2825.0 / 27648.0,
        0.0,
        18575.0 / 48384.0,
        13525.0 / 55296.0,
        277.0 / 14336.0,
        1.0 / 4.0,
    ];
    let dim = y.len();
    let mut k: Vec<Vec<Complex64>> = Vec::with_capacity(6);
    k.push(sys.rhs(y));
    for s in 0..5 {
        let mut ys = y.to_vec();
        for (j, kj) in k.iter().enumerate() {
            let a = A[s][j];
            if a != 0.0 {
                for i in 0..dim {
                    ys[i] += kj[i] * (a * h);
                }
            }
        }
        k.push(sys.rhs(&ys));
    }
    let mut y5 = y.to_vec();
    let mut y4 = y.to_vec();
    for (j, kj) in k.iter().enumerate() {
        for i in 0..dim {
            y5[i] += kj[i] * (B5[j] * h);
            y4[i] += kj[i] * (B4[j] * h);
        }
    }
    let abs_tol = 1e-12;
    let mut err: f64 = 0.0;
    for i in 0..dim {
        let scale = abs_tol + rel_tol * y[i].norm().max(y5[i].norm());
        err = err.max((y5[i] - y4[i]).norm() / scale);
    }
    (y5, err)
}

/// Integrate the chain to `t_end`, sampling every `options.sample_every`
/// (plus the initial state and the final time). On a detected collision
/// the trajectory is truncated and returned with the samples collected so
/// far rather than failing.
pub fn integrate_ctc(
    state0: &CtcState,
    spec: &PotentialSpec,
    t_end: f64,
    options: &CtcOptions,
) -> Result<CtcTrajectory> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidScenario(format!("t_end must be positive, got {t_end}")));
    }
    if !(options.sample_every > 0.0 && options.sample_every.is_finite()) {
        return Err(Error::InvalidScenario(format!(
            "sample_every must be positive, got {}",
            options.sample_every
        )));
    }
    match options.step {
        StepControl::Fixed { dt } if !(dt > 0.0 && dt.is_finite()) => {
            return Err(Error::InvalidScenario(format!("dt must be positive, got {dt}")));
        }
        StepControl::Adaptive { rel_tol } if !(rel_tol > 0.0 && rel_tol.is_finite()) => {
            return Err(Error::InvalidScenario(format!(
                "rel_tol must be positive, got {rel_tol}"
            )));
        }
        _ => {}
    }
    validate_widths(spec, state0.nu0);
    let sys = ChainSystem {
        spec,
        mode: options.polarization,
        n: state0.len(),
        nu0: state0.nu0,
        mu0: state0.mu0,
        delta0: state0.delta0,
        frozen_pol: state0.pol.clone(),
    };
    let mut y = sys.flatten(state0);
    let mut t = 0.0;
    let mut times = vec![0.0];
    let mut states = vec![CtcState { t: 0.0, ..state0.clone() }];
    let mut status = TrajectoryStatus::Completed;
    let mut h_adaptive = match options.step {
        StepControl::Fixed { dt } => dt,
        StepControl::Adaptive { .. } => options.sample_every.min(0.05),
    };

    'outer: while t < t_end - 1e-12 * t_end {
        let t_next = (t + options.sample_every).min(t_end);
        match options.step {
            StepControl::Fixed { dt } => {
                let span = t_next - t;
                let n_sub = (span / dt).round().max(1.0) as usize;
                let h = span / n_sub as f64;
                for _ in 0..n_sub {
                    y = rk4_step(&sys, &y, h);
                    t += h;
                    if sys.min_gap(&y) < options.collision_gap {
                        status = TrajectoryStatus::Truncated {
                            t,
                            reason: "neighbor gap in Re q fell below the collision threshold"
                                .into(),
                        };
                        times.push(t);
                        states.push(sys.unflatten(t, &y));
                        break 'outer;
                    }
                    if y.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                        status = TrajectoryStatus::Truncated {
                            t,
                            reason: "state became non-finite".into(),
                        };
                        break 'outer;
                    }
                }
                t = t_next; // absorb rounding drift
            }
            StepControl::Adaptive { rel_tol } => {
                while t < t_next - 1e-12 * t_end.max(1.0) {
                    let h = h_adaptive.min(t_next - t);
                    let (y_new, err) = ck45_step(&sys, &y, h, rel_tol);
                    if err <= 1.0 {
                        y = y_new;
                        t += h;
                        if sys.min_gap(&y) < options.collision_gap {
                            status = TrajectoryStatus::Truncated {
                                t,
                                reason: "neighbor gap in Re q fell below the collision threshold"
                                    .into(),
                            };
                            times.push(t);
                            states.push(sys.unflatten(t, &y));
                            break 'outer;
                        }
                        if y.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                            status = TrajectoryStatus::Truncated {
                                t,
                                reason: "state became non-finite".into(),
                            };
                            break 'outer;
                        }
                    }
                    let grow = 0.9 * err.powf(-0.2);
                    h_adaptive = (h * grow.clamp(0.2, 5.0)).min(options.sample_every);
                    if h_adaptive < 1e-12 {
                        return Err(Error::Solver(format!(
                            "adaptive step collapsed below 1e-12 at t = {t}"
                        )));
                    }
                }
                t = t_next;
            }
        }
        times.push(t);
        states.push(sys.unflatten(t, &y));
    }
    Ok(CtcTrajectory { times, states, status })
}
