//! External sech^2 potentials and the interaction kernels that convert a
//! potential term into forces on a soliton's parameters.
//!
//! A potential is a finite sum of localized terms
//! `V(x) = sum_s c_s / cosh^2(w_s (x - y_s))` — wells for `c_s < 0`, humps
//! for `c_s > 0`. The kernels [`kernels`] and [`k_integral`] are averages of
//! such a term against a soliton profile centered a (scaled) distance
//! `delta` away; they drive the reduced model's velocity and phase
//! equations. Closed forms are used everywhere except a small-`delta`
//! neighborhood where they lose digits to cancellation and a Taylor series
//! takes over. [`quadrature`] re-derives the same values by direct numerical
//! integration and exists to cross-check the closed forms.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// One localized `c / cosh^2(inv_width * (x - center))` term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialTerm {
    /// Signed strength: negative digs a well, positive raises a hump.
    pub c: f64,
    /// Center position.
    pub center: f64,
    /// Inverse width `w`; larger is narrower.
    pub inv_width: f64,
}

impl PotentialTerm {
    /// Full width at half maximum of `|V|`: `2 acosh(sqrt(2)) / inv_width`.
    pub fn half_width(&self) -> f64 {
        2.0 * (2.0f64.sqrt()).acosh() / self.inv_width
    }

    /// Value of this term at `x`.
    pub fn eval(&self, x: f64) -> f64 {
        let s = sech(self.inv_width * (x - self.center));
        self.c * s * s
    }
}

/// A validated external potential: a finite list of sech^2 terms.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PotentialSpec {
    terms: Vec<PotentialTerm>,
}

/// Largest number of terms a potential may carry; guards against
/// pathological generator counts in untrusted scenario files.
pub const MAX_TERMS: usize = 100_000;

impl PotentialSpec {
    /// Validate a list of terms: finite strengths and centers, positive
    /// finite inverse widths, at most [`MAX_TERMS`] terms.
    pub fn new(terms: Vec<PotentialTerm>) -> Result<Self> {
        if terms.len() > MAX_TERMS {
            return Err(Error::InvalidPotential(format!(
                "{} terms exceeds the limit of {MAX_TERMS}",
                terms.len()
            )));
        }
        for (s, t) in terms.iter().enumerate() {
            if !t.c.is_finite() || !t.center.is_finite() || !t.inv_width.is_finite() {
                return Err(Error::InvalidPotential(format!(
                    "term {s} has a non-finite parameter"
                )));
            }
            if t.inv_width <= 0.0 {
                return Err(Error::InvalidPotential(format!(
                    "term {s} has inv_width = {}, expected > 0",
                    t.inv_width
                )));
            }
        }
        Ok(PotentialSpec { terms })
    }

    /// The free case: no potential at all.
    pub fn free() -> Self {
        PotentialSpec::default()
    }

    /// Uniform array of `count` identical terms at
    /// `center = x0 + s * spacing`, `s = 0 .. count-1`.
    pub fn uniform_array(c: f64, x0: f64, spacing: f64, count: usize, inv_width: f64) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidPotential("generator count must be at least 1".into()));
        }
        if !x0.is_finite() || !spacing.is_finite() {
            return Err(Error::InvalidPotential("generator x0 and spacing must be finite".into()));
        }
        if count > MAX_TERMS {
            return Err(Error::InvalidPotential(format!(
                "generator count {count} exceeds the limit of {MAX_TERMS}"
            )));
        }
        let terms = (0..count)
            .map(|s| PotentialTerm { c, center: x0 + s as f64 * spacing, inv_width })
            .collect();
        PotentialSpec::new(terms)
    }

    pub fn terms(&self) -> &[PotentialTerm] {
        &self.terms
    }

    /// True when there is no potential.
    pub fn is_free(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total potential value at `x`.
    pub fn eval(&self, x: f64) -> f64 {
        self.terms.iter().map(|t| t.eval(x)).sum()
    }
}

/// Overflow-safe `1 / cosh(z)`; underflows to 0 for large `|z|`.
fn sech(z: f64) -> f64 {
    2.0 / (z.exp() + (-z).exp())
}

/// The four real interaction kernels evaluated at a common scaled
/// separation `delta` between a soliton center and a potential term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValues {
    /// Odd kernel driving amplitude change (restoring toward `delta = 0`
    /// for a well).
    pub p: f64,
    /// Even kernel driving the position/phase coordinate.
    pub r: f64,
    /// Even kernel: plain overlap of the two sech^2 profiles.
    pub n: f64,
    /// Odd kernel `q = -delta * n` (exact identity).
    pub q: f64,
}

/// Below this `|delta|` the closed forms lose enough digits to cancellation
/// that the Taylor series is the more accurate branch; both branches agree
/// to better than 1e-10 at the switchover.
const SERIES_SWITCHOVER: f64 = 0.05;

/// Beyond this `|delta|` every kernel is far below f64 underflow.
const KERNEL_CUTOFF: f64 = 300.0;

fn kernels_series(d: f64) -> KernelValues {
    let d2 = d * d;
    let p = d * (4.0 / 15.0 + d2 * (-8.0 / 63.0 + d2 * (8.0 / 225.0)));
    let r = 0.5 + d2 * (-1.0 / 3.0 + d2 * (1.0 / 9.0 + d2 * (-8.0 / 315.0)));
    let n = 2.0 / 3.0 + d2 * (-4.0 / 15.0 + d2 * (4.0 / 63.0 + d2 * (-8.0 / 675.0)));
    KernelValues { p, r, n, q: -d * n }
}

fn kernels_closed(d: f64) -> KernelValues {
    let sh = d.sinh();
    let ch = d.cosh();
    let sh2 = sh * sh;
    let sh4 = sh2 * sh2;
    let p = (d + 2.0 * d * ch * ch - 3.0 * sh * ch) / sh4;
    let r = (6.0 * d * sh * ch - (2.0 * d * d + 3.0) * sh2 - 3.0 * d * d) / (2.0 * sh4);
    let n = (2.0 * d * ch - 2.0 * sh) / (sh2 * sh);
    KernelValues { p, r, n, q: -d * n }
}

/// Evaluate all four interaction kernels at scaled separation `delta`.
///
/// `p` and `q` are odd, `r` and `n` even; all decay like
/// `delta^2 exp(-2 |delta|)` for large separations. At `delta = 0`:
/// `p = q = 0`, `r = 1/2`, `n = 2/3`.
pub fn kernels(delta: f64) -> KernelValues {
    let a = delta.abs();
    if a < SERIES_SWITCHOVER {
        kernels_series(delta)
    } else if a <= KERNEL_CUTOFF {
        kernels_closed(delta)
    } else {
        KernelValues { p: 0.0, r: 0.0, n: 0.0, q: 0.0 }
    }
}

/// `x / sin(x)`'s companion: `sin(x) / x`, continuous at 0.
fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

/// `x / sinh(x)`, continuous at 0 and underflowing cleanly for large `|x|`.
fn x_over_sinh(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x / x.sinh()
    }
}

/// Complex oscillatory kernel weighting a plane wave of wavenumber `a`
/// against two sech profiles separated by `delta`:
///
/// ```text
/// K(a, delta) = pi sin(a delta / 2) / (sinh(delta) sinh(pi a / 2))
///               * exp(-i a delta / 2)
/// ```
///
/// evaluated in a product form that stays finite and accurate through both
/// removable singularities (`a -> 0` gives `delta / sinh(delta)`;
/// `K(0, 0) = 1`).
pub fn k_integral(a: f64, delta: f64) -> Complex64 {
    let half = 0.5 * a * delta;
    let modulus = sinc(half) * x_over_sinh(std::f64::consts::FRAC_PI_2 * a) * x_over_sinh(delta);
    Complex64::from_polar(1.0, -half).scale(modulus)
}

/// Independent numerical evaluation of the kernels by adaptive quadrature.
///
/// Each kernel equals an integral of a smooth, exponentially localized
/// integrand built from two sech^2 humps a distance `delta` apart. These
/// routines integrate that directly — no closed forms, no series — and are
/// the reference the analytic branch is tested against.
pub mod quadrature {
    use super::sech;
    use crate::error::{Error, Result};

    /// Which kernel to evaluate.
    #[derive(Debug, Clone, Copy, PartialEq, Eq)]
    pub enum Kernel {
        P,
        R,
        N,
        Q,
    }

    /// Adaptive Simpson integration of `f` over `[a, b]` to absolute
    /// tolerance `tol`. Errors if the recursion cannot meet the tolerance
    /// (non-integrable or too-rough integrand).
    pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::Quadrature(format!("bad interval [{a}, {b}]")));
        }
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Error::Quadrature(format!("bad tolerance {tol}")));
        }
        let m = 0.5 * (a + b);
        let (fa, fm, fb) = (f(a), f(m), f(b));
        let whole = simpson(a, b, fa, fm, fb);
        adaptive(f, a, b, fa, fm, fb, whole, tol, 60, 3)
    }

    fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }

    #[allow(clippy::too_many_arguments)]
    fn adaptive(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
        min_depth: u32,
    ) -> Result<f64> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(a, m, fa, flm, fm);
        let right = simpson(m, b, fm, frm, fb);
        let delta = left + right - whole;
        if !delta.is_finite() {
            return Err(Error::Quadrature(format!(
                "non-finite integrand near [{a}, {b}]"
            )));
        }
        // the minimum depth stops coincidental agreement of the coarse
        // estimates (symmetric features, undersampled humps) from being
        // accepted before the panel has actually been looked at
        if min_depth == 0 && delta.abs() <= 15.0 * tol {
            return Ok(left + right + delta / 15.0);
        }
        if depth == 0 {
            return Err(Error::Quadrature(format!(
                "tolerance not reached on [{a}, {b}] (residual {:.3e})",
                delta.abs()
            )));
        }
        let md = min_depth.saturating_sub(1);
        let l = adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, md)?;
        let r = adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, md)?;
        Ok(l + r)
    }

    /// Integrate an exponentially localized `f` over `[lo, hi]` by
    /// pre-splitting into uniform panels no longer than `max_panel` and
    /// running the adaptive pass on each. The pre-split stops a feature
    /// much narrower than the interval from being missed by the first
    /// coarse Simpson comparison.
    pub fn integrate_localized(
        f: &dyn Fn(f64) -> f64,
        lo: f64,
        hi: f64,
        tol: f64,
        max_panel: f64,
    ) -> Result<f64> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Quadrature(format!("bad interval [{lo}, {hi}]")));
        }
        if !(max_panel.is_finite() && max_panel > 0.0) {
            return Err(Error::Quadrature(format!("bad panel length {max_panel}")));
        }
        let n = ((hi - lo) / max_panel).ceil() as usize;
        let n = n.clamp(1, 100_000);
        let step = (hi - lo) / n as f64;
        let mut total = 0.0;
        for i in 0..n {
            let a = lo + i as f64 * step;
            let b = if i + 1 == n { hi } else { a + step };
            total += integrate(f, a, b, tol / n as f64)?;
        }
        Ok(total)
    }

    fn integrand(kernel: Kernel, delta: f64, z: f64) -> f64 {
        let s = sech(z);
        let sd = sech(z - delta);
        let w = sd * sd;
        match kernel {
            Kernel::P => 0.5 * z.sinh() * s * s * s * w,
            Kernel::R => 0.5 * (1.0 - z * z.tanh()) * s * s * w,
            Kernel::N => 0.5 * s * s * w,
            Kernel::Q => -z * s * s * w,
        }
    }

    /// Evaluate one kernel by quadrature to absolute tolerance ~1e-12.
    ///
    /// The window covers both humps with a generous margin and doubles on
    /// demand if the integrand is not yet negligible at the edges.
    pub fn kernel_oracle(kernel: Kernel, delta: f64) -> Result<f64> {
        if !delta.is_finite() {
            return Err(Error::Quadrature(format!("bad separation {delta}")));
        }
        let f = move |z: f64| integrand(kernel, delta, z);
        let mut margin = 25.0;
        for _ in 0..5 {
            let lo = delta.min(0.0) - margin;
            let hi = delta.max(0.0) + margin;
            if f(lo).abs() < 1e-16 && f(hi).abs() < 1e-16 {
                // the tolerance carries an order of margin over the 1e-12
                // target: the Richardson acceptance can underestimate the
                // error on panels where the local errors nearly cancel
                return integrate_localized(&f, lo, hi, 1e-13, 1.7);
            }
            margin *= 2.0;
        }
        Err(Error::Quadrature(format!(
            "integrand for delta = {delta} does not decay within the window"
        )))
    }
}
