//! Lax matrix of the free chain, its complex eigenvalues, and regime
//! classification.
//!
//! The free chain is integrable: the eigenvalues `zeta_k` of a complex
//! symmetric tridiagonal matrix built from the chain state are conserved,
//! and their real parts `kappa_k` are (half) the asymptotic soliton
//! velocities. Comparing the `kappa_k` therefore predicts the fate of the
//! train without integrating anything:
//!
//! * all distinct — every soliton escapes with its own velocity (AFR,
//!   asymptotically free regime);
//! * all equal — the train stays bound together (BSR, bound-state regime);
//! * anything else — some subsets travel together (MAR, mixed asymptotic
//!   regime).

use num_complex::Complex64;

use crate::ctc::CtcState;
use crate::error::{Error, Result};

/// Complex symmetric tridiagonal matrix: entries `(k, k) = b_k` and
/// `(k, k+1) = (k+1, k) = a_k`. Not Hermitian — eigenvalues are genuinely
/// complex.
#[derive(Debug, Clone, PartialEq)]
pub struct LaxMatrix {
    /// Diagonal `b_k = lambda_k / 2`.
    pub diag: Vec<Complex64>,
    /// Off-diagonal couplings `a_k` (length one less than `diag`).
    pub offdiag: Vec<Complex64>,
}

/// Build the Lax matrix from a chain state:
/// `a_k = (1/2) sqrt(<n_{k+1}, n_k>) exp((q_{k+1} - q_k)/2)`,
/// `b_k = lambda_k / 2`. The square root takes the principal branch — any
/// branch gives the same eigenvalues since only `a_k^2` enters the
/// characteristic polynomial.
pub fn build_lax(state: &CtcState) -> LaxMatrix {
    let n = state.len();
    let diag = state.lambda.iter().map(|l| 0.5 * l).collect();
    let offdiag = (0..n.saturating_sub(1))
        .map(|k| {
            0.5 * state.pol[k + 1].inner(&state.pol[k]).sqrt()
                * (0.5 * (state.q[k + 1] - state.q[k])).exp()
        })
        .collect();
    LaxMatrix { diag, offdiag }
}

impl LaxMatrix {
    /// Number of rows.
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Max row sum of absolute entries (infinity norm).
    fn norm_inf(&self) -> f64 {
        let n = self.len();
        (0..n)
            .map(|k| {
                let mut s = self.diag[k].norm();
                if k > 0 {
                    s += self.offdiag[k - 1].norm();
                }
                if k + 1 < n {
                    s += self.offdiag[k].norm();
                }
                s
            })
            .fold(0.0, f64::max)
    }

    /// Characteristic polynomial `det(L - z I)` and its `z`-derivative via
    /// the standard three-term recurrence for tridiagonal determinants.
    fn char_poly(&self, z: Complex64) -> (Complex64, Complex64) {
        let n = self.len();
        let mut p_prev = Complex64::ONE; // p_0
        let mut p = self.diag[0] - z; // p_1
        let mut dp_prev = Complex64::ZERO;
        let mut dp = -Complex64::ONE;
        for k in 1..n {
            let a2 = self.offdiag[k - 1] * self.offdiag[k - 1];
            let pk = (self.diag[k] - z) * p - a2 * p_prev;
            let dpk = (self.diag[k] - z) * dp - p - a2 * dp_prev;
            p_prev = p;
            p = pk;
            dp_prev = dp;
            dp = dpk;
        }
        (p, dp)
    }
}

/// Eigenvalues of the Lax matrix, sorted by real part (then imaginary part)
/// for determinism.
///
/// Roots of the characteristic polynomial are found by simultaneous
/// Aberth–Ehrlich iteration from a deterministic circle of starting points;
/// every returned root is verified against a normalized residual gate.
/// Coinciding eigenvalues (the chain's degenerate configurations) converge
/// linearly instead of cubically but still pass the residual gate.
pub fn eigenvalues(m: &LaxMatrix) -> Result<Vec<Complex64>> {
    let n = m.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let finite = m
        .diag
        .iter()
        .chain(m.offdiag.iter())
        .all(|z| z.re.is_finite() && z.im.is_finite());
    if !finite {
        return Err(Error::Eigen("matrix has non-finite entries".into()));
    }
    if n == 1 {
        return Ok(vec![m.diag[0]]);
    }
    let mut roots = if n == 2 {
        // stable closed form, exact for double roots
        let sum = m.diag[0] + m.diag[1];
        let prod = m.diag[0] * m.diag[1] - m.offdiag[0] * m.offdiag[0];
        let disc = ((m.diag[0] - m.diag[1]) * (m.diag[0] - m.diag[1])
            + 4.0 * m.offdiag[0] * m.offdiag[0])
            .sqrt();
        // pick the branch that avoids cancellation in sum +/- disc
        let s = if (sum + disc).norm() >= (sum - disc).norm() { disc } else { -disc };
        let r1 = 0.5 * (sum + s);
        let r2 = if r1.norm() > 1e-300 { prod / r1 } else { 0.5 * (sum - s) };
        vec![r1, r2]
    } else {
        aberth(m)?
    };
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(roots)
}

fn aberth(m: &LaxMatrix) -> Result<Vec<Complex64>> {
    let n = m.len();
    let center = m.diag.iter().sum::<Complex64>() / n as f64;
    let radius = m
        .diag
        .iter()
        .enumerate()
        .map(|(k, b)| {
            let mut r = (b - center).norm();
            if k > 0 {
                r += m.offdiag[k - 1].norm();
            }
            if k + 1 < n {
                r += m.offdiag[k].norm();
            }
            r
        })
        .fold(0.0f64, f64::max)
        .max(1e-12)
        * 1.1;
    // deterministic starting circle; the angular offset keeps the start
    // away from symmetry axes of typical spectra
    let mut z: Vec<Complex64> = (0..n)
        .map(|i| {
            let ang = 2.0 * std::f64::consts::PI * (i as f64 + 0.3183) / n as f64;
            center + Complex64::from_polar(radius, ang)
        })
        .collect();
    let mut converged = false;
    for _ in 0..400 {
        let mut max_move: f64 = 0.0;
        // Gauss–Seidel sweep: each root update sees the already-updated
        // positions of the earlier roots
        for i in 0..n {
            let (p, dp) = m.char_poly(z[i]);
            if p == Complex64::ZERO {
                continue;
            }
            let ratio = if dp == Complex64::ZERO { Complex64::new(radius, 0.0) } else { p / dp };
            let mut sum = Complex64::ZERO;
            for (j, zj) in z.iter().enumerate() {
                if j != i {
                    let d = z[i] - zj;
                    if d.norm() > 1e-300 {
                        sum += d.inv();
                    }
                }
            }
            let denom = Complex64::ONE - ratio * sum;
            let mut w = if denom.norm() > 1e-300 { ratio / denom } else { ratio };
            let cap = 0.5 * (radius + z[i].norm());
            if !w.re.is_finite() || !w.im.is_finite() {
                // no usable direction; deterministic small kick
                w = Complex64::from_polar(0.05 * cap, (i as f64) * 0.7);
            } else if w.norm() > cap {
                // keep the direction, limit the stride
                w *= cap / w.norm();
            }
            z[i] -= w;
            max_move = max_move.max(w.norm() / (1.0 + z[i].norm()));
        }
        if max_move < 1e-14 {
            converged = true;
            break;
        }
    }
    // residual verification, normalized by the natural matrix scale
    let mut worst: f64 = 0.0;
    for zi in &z {
        let (p, _) = m.char_poly(*zi);
        let s = m.norm_inf().max(zi.norm()).max(1e-30);
        worst = worst.max(p.norm() / s.powi(n as i32));
    }
    if !converged || worst > 1e-12 {
        return Err(Error::Eigen(format!(
            "root finder did not verify: normalized residual {worst:.3e} \
             (converged = {converged})"
        )));
    }
    Ok(z)
}

/// Asymptotic label of a train.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegimeLabel {
    /// Asymptotically free: all velocities distinct, the train spreads.
    Afr,
    /// Bound state: one common velocity, the train holds together.
    Bsr,
    /// Mixed: some groups travel together, others separate.
    Mar,
}

impl RegimeLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegimeLabel::Afr => "AFR",
            RegimeLabel::Bsr => "BSR",
            RegimeLabel::Mar => "MAR",
        }
    }
}

/// Classification of a spectrum into an asymptotic regime.
#[derive(Debug, Clone, PartialEq)]
pub struct RegimeReport {
    /// Eigenvalues sorted by real part.
    pub eigenvalues: Vec<Complex64>,
    /// Real parts (half asymptotic velocities), same order.
    pub kappa: Vec<f64>,
    /// Imaginary parts (asymptotic amplitudes), same order.
    pub eta: Vec<f64>,
    /// Partition of indices (into the sorted arrays) by equal velocity.
    pub clusters: Vec<Vec<usize>>,
    pub label: RegimeLabel,
    /// Velocity gap below which two eigenvalues count as co-moving.
    pub tol: f64,
    /// True when some eigenvalues coincide entirely (both parts within
    /// `tol`): the train sits on a regime boundary and the classification
    /// is fragile there.
    pub degenerate: bool,
}

/// Default clustering tolerance: generous against root-finder noise but
/// far below the smallest physically meaningful velocity splits,
/// `max(1e-4, 0.02 * spread of kappa)`.
pub fn default_cluster_tol(kappa: &[f64]) -> f64 {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &k in kappa {
        lo = lo.min(k);
        hi = hi.max(k);
    }
    if hi > lo {
        (0.02 * (hi - lo)).max(1e-4)
    } else {
        1e-4
    }
}

/// Group eigenvalues by asymptotic velocity and label the regime.
///
/// The mean of the `kappa` is subtracted before clustering (the bound
/// regime is defined up to a common drift), then values closer than `tol`
/// chain into clusters.
///
/// # Panics
/// When `tol` is not a positive finite number — a caller bug, not a data
/// condition.
pub fn classify_regime(zetas: &[Complex64], tol: f64) -> RegimeReport {
    assert!(tol > 0.0 && tol.is_finite(), "cluster tolerance must be positive, got {tol}");
    let mut eigenvalues = zetas.to_vec();
    eigenvalues.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let n = eigenvalues.len();
    let mean = eigenvalues.iter().map(|z| z.re).sum::<f64>() / n.max(1) as f64;
    let kappa: Vec<f64> = eigenvalues.iter().map(|z| z.re - mean).collect();
    let eta: Vec<f64> = eigenvalues.iter().map(|z| z.im).collect();
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        match clusters.last_mut() {
            Some(c) if kappa[i] - kappa[*c.last().unwrap()] < tol => c.push(i),
            _ => clusters.push(vec![i]),
        }
    }
    let label = if clusters.len() == n {
        RegimeLabel::Afr
    } else if clusters.len() == 1 && n > 0 {
        RegimeLabel::Bsr
    } else {
        RegimeLabel::Mar
    };
    let mut degenerate = false;
    for i in 0..n {
        for j in i + 1..n {
            if (eigenvalues[i] - eigenvalues[j]).norm() < tol {
                degenerate = true;
            }
        }
    }
    RegimeReport { eigenvalues, kappa, eta, clusters, label, tol, degenerate }
}

/// Critical amplitude deviation separating the free regime from the bound
/// one for the symmetric three-soliton configuration with neighbor gap
/// `r0` and polarization mismatch angle `theta1 - theta2`:
/// `2 sqrt(2 cos_angle) nu0 exp(-nu0 r0)`.
///
/// Errors when `cos_angle <= 0`: the formula leaves the real domain
/// (orthogonal or obtuse polarizations give no real transition point).
pub fn critical_delta_nu(nu0: f64, r0: f64, cos_angle: f64) -> Result<f64> {
    if !(cos_angle > 0.0) {
        return Err(Error::InvalidTrain(format!(
            "critical amplitude needs a positive polarization overlap, got cos_angle = {cos_angle}"
        )));
    }
    if !(nu0 > 0.0 && nu0.is_finite() && r0.is_finite() && cos_angle.is_finite()) {
        return Err(Error::InvalidTrain(
            "critical amplitude needs finite nu0 > 0, r0, cos_angle".into(),
        ));
    }
    Ok(2.0 * (2.0 * cos_angle).sqrt() * nu0 * (-nu0 * r0).exp())
}
