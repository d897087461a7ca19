//! Scenario configuration: the TOML document schema shared by the CLI,
//! the presets, and the result-directory round trip.
//!
//! A scenario document has four sections — `train`, `potential`, `grid`,
//! `run` — with these keys:
//!
//! ```toml
//! [[train.solitons]]
//! nu = 0.5        # amplitude (required, > 0)
//! mu = 0.0        # half velocity (default 0)
//! xi = -8.0       # initial position (required)
//! delta = 0.0     # initial phase (default 0)
//! theta = 0.9     # polarization angle (default 0)
//! gamma = 0.0     # polarization phase (default 0)
//!
//! [[potential.terms]]          # explicit sech^2 terms (optional)
//! c = -0.1
//! center = -16.0
//! inv_width = 1.0
//!
//! [potential.generator]        # evenly spaced array, expanded on load
//! c = -0.1
//! x0 = -16.0
//! spacing = 1.0
//! count = 33
//! inv_width = 1.0
//!
//! [grid]
//! x_min = -40.0
//! x_max = 40.0
//! n_points = 1601
//!
//! [run]
//! t_end = 500.0
//! dt = 0.005                   # PDE time step
//! sample_every = 0.5
//! engines = ["pde", "pctc"]
//! ctc_dt = 0.05                # chain integrator step
//! inner_tol = 1e-12            # PDE inner-iteration tolerance
//! inner_max = 20               # PDE inner-iteration cap
//! ```
//!
//! Unknown keys are rejected so typos cannot silently change a run.
//! [`ScenarioDoc::resolve`] validates everything into a [`Scenario`] of
//! domain types; [`Scenario::resolved_doc`] goes back to a self-contained
//! document (generator expanded into explicit terms, defaults filled in)
//! whose serialization is byte-stable.

use serde::{Deserialize, Serialize};

use crate::ctc::{CtcOptions, StepControl};
use crate::error::{Error, Result};
use crate::potential::{PotentialSpec, PotentialTerm};
use crate::soliton::{Grid, PolarizationVector, SolitonParams, TrainConfig};
use crate::vnlse::SolverOptions;

/// Hard cap on grid size: 2 million nodes keeps a field comfortably in
/// memory and a malformed config from looking like an allocator bug.
pub const MAX_GRID_POINTS: usize = 2_000_000;
/// Hard cap on train length.
pub const MAX_SOLITONS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDoc {
    pub train: TrainDoc,
    #[serde(default, skip_serializing_if = "PotentialDoc::is_empty")]
    pub potential: PotentialDoc,
    pub grid: GridDoc,
    pub run: RunDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainDoc {
    pub solitons: Vec<SolitonDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolitonDoc {
    pub nu: f64,
    #[serde(default)]
    pub mu: f64,
    pub xi: f64,
    #[serde(default)]
    pub delta: f64,
    #[serde(default)]
    pub theta: f64,
    #[serde(default)]
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialDoc {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub terms: Vec<TermDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorDoc>,
}

impl PotentialDoc {
    fn is_empty(&self) -> bool {
        self.terms.is_empty() && self.generator.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDoc {
    pub c: f64,
    pub center: f64,
    pub inv_width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorDoc {
    pub c: f64,
    pub x0: f64,
    pub spacing: f64,
    pub count: usize,
    pub inv_width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridDoc {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Pde,
    Pctc,
}

impl Engine {
    pub fn as_str(&self) -> &'static str {
        match self {
            Engine::Pde => "pde",
            Engine::Pctc => "pctc",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunDoc {
    pub t_end: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_sample_every")]
    pub sample_every: f64,
    #[serde(default = "default_engines")]
    pub engines: Vec<Engine>,
    #[serde(default = "default_ctc_dt")]
    pub ctc_dt: f64,
    #[serde(default = "default_inner_tol")]
    pub inner_tol: f64,
    #[serde(default = "default_inner_max")]
    pub inner_max: usize,
}

fn default_dt() -> f64 {
    0.005
}
fn default_sample_every() -> f64 {
    0.5
}
fn default_engines() -> Vec<Engine> {
    vec![Engine::Pde, Engine::Pctc]
}
fn default_ctc_dt() -> f64 {
    0.05
}
fn default_inner_tol() -> f64 {
    1e-12
}
fn default_inner_max() -> usize {
    20
}

/// Fully validated scenario, ready to run.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub train: TrainConfig,
    pub potential: PotentialSpec,
    pub grid: Grid,
    pub t_end: f64,
    pub sample_every: f64,
    pub engines: Vec<Engine>,
    pub solver: SolverOptions,
    pub ctc: CtcOptions,
    /// The document this scenario was resolved from, with the generator
    /// expanded; serializing it reproduces the run exactly.
    doc: ScenarioDoc,
}

impl ScenarioDoc {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(format!("scenario document: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("scenario documents always serialize")
    }

    /// Validate into domain types. Generator terms come before explicit
    /// terms in the expanded potential.
    pub fn resolve(&self) -> Result<Scenario> {
        if self.train.solitons.len() > MAX_SOLITONS {
            return Err(Error::InvalidScenario(format!(
                "{} solitons exceeds the limit of {MAX_SOLITONS}",
                self.train.solitons.len()
            )));
        }
        let solitons: Vec<SolitonParams> = self
            .train
            .solitons
            .iter()
            .map(|s| {
                if !(s.theta.is_finite() && s.gamma.is_finite()) {
                    return Err(Error::InvalidTrain(
                        "polarization angles must be finite".into(),
                    ));
                }
                Ok(SolitonParams {
                    nu: s.nu,
                    mu: s.mu,
                    xi: s.xi,
                    delta: s.delta,
                    pol: PolarizationVector::from_angles(s.theta, s.gamma),
                })
            })
            .collect::<Result<_>>()?;
        let train = TrainConfig::new(solitons)?;

        let mut terms: Vec<PotentialTerm> = Vec::new();
        if let Some(g) = &self.potential.generator {
            let expanded = PotentialSpec::uniform_array(g.c, g.x0, g.spacing, g.count, g.inv_width)?;
            terms.extend_from_slice(expanded.terms());
        }
        for t in &self.potential.terms {
            terms.push(PotentialTerm { c: t.c, center: t.center, inv_width: t.inv_width });
        }
        let potential = PotentialSpec::new(terms)?;

        if self.grid.n_points > MAX_GRID_POINTS {
            return Err(Error::InvalidGrid(format!(
                "{} grid points exceeds the limit of {MAX_GRID_POINTS}",
                self.grid.n_points
            )));
        }
        let grid = Grid::new(self.grid.x_min, self.grid.x_max, self.grid.n_points)?;

        let run = &self.run;
        if !(run.t_end > 0.0 && run.t_end.is_finite()) {
            return Err(Error::InvalidScenario(format!(
                "run.t_end must be positive, got {}",
                run.t_end
            )));
        }
        if !(run.sample_every > 0.0 && run.sample_every.is_finite()) {
            return Err(Error::InvalidScenario(format!(
                "run.sample_every must be positive, got {}",
                run.sample_every
            )));
        }
        if !(run.ctc_dt > 0.0 && run.ctc_dt.is_finite()) {
            return Err(Error::InvalidScenario(format!(
                "run.ctc_dt must be positive, got {}",
                run.ctc_dt
            )));
        }
        if run.engines.is_empty() {
            return Err(Error::InvalidScenario(
                "run.engines must select at least one engine".into(),
            ));
        }
        let mut engines = run.engines.clone();
        engines.sort();
        engines.dedup();

        let solver = SolverOptions {
            dt: run.dt,
            inner_tol: run.inner_tol,
            inner_max: run.inner_max,
            ..Default::default()
        };
        let ctc = CtcOptions {
            step: StepControl::Fixed { dt: run.ctc_dt },
            sample_every: run.sample_every,
            ..Default::default()
        };

        // canonical resolved document: generator expanded, defaults
        // materialized, so the file in a result directory stands alone
        let doc = ScenarioDoc {
            train: self.train.clone(),
            potential: PotentialDoc {
                terms: potential
                    .terms()
                    .iter()
                    .map(|t| TermDoc { c: t.c, center: t.center, inv_width: t.inv_width })
                    .collect(),
                generator: None,
            },
            grid: self.grid.clone(),
            run: RunDoc { engines: engines.clone(), ..run.clone() },
        };

        Ok(Scenario {
            train,
            potential,
            grid,
            t_end: run.t_end,
            sample_every: run.sample_every,
            engines,
            solver,
            ctc,
            doc,
        })
    }
}

impl Scenario {
    /// Self-contained document reproducing this scenario.
    pub fn resolved_doc(&self) -> &ScenarioDoc {
        &self.doc
    }

    pub fn wants(&self, engine: Engine) -> bool {
        self.engines.contains(&engine)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const MINIMAL: &str = r#"
        [[train.solitons]]
        nu = 0.5
        xi = 0.0

        [grid]
        x_min = -40.0
        x_max = 40.0
        n_points = 1601

        [run]
        t_end = 10.0
    "#;

    #[test]
    fn minimal_document_resolves_with_defaults() {
        let doc = ScenarioDoc::from_toml(MINIMAL).unwrap();
        let sc = doc.resolve().unwrap();
        assert_eq!(sc.train.len(), 1);
        assert!(sc.potential.is_free());
        assert_eq!(sc.solver.dt, 0.005);
        assert_eq!(sc.solver.inner_tol, 1e-12);
        assert_eq!(sc.solver.inner_max, 20);
        assert_eq!(sc.ctc.step, StepControl::Fixed { dt: 0.05 });
        assert_eq!(sc.sample_every, 0.5);
        assert_eq!(sc.engines, vec![Engine::Pde, Engine::Pctc]);
    }

    #[test]
    fn generator_expands_before_explicit_terms() {
        let text = r#"
            [[train.solitons]]
            nu = 0.5
            xi = 0.0

            [[potential.terms]]
            c = 0.5
            center = 100.0
            inv_width = 2.0

            [potential.generator]
            c = -0.1
            x0 = -16.0
            spacing = 1.0
            count = 33
            inv_width = 1.0

            [grid]
            x_min = -40.0
            x_max = 40.0
            n_points = 1601

            [run]
            t_end = 10.0
        "#;
        let sc = ScenarioDoc::from_toml(text).unwrap().resolve().unwrap();
        let terms = sc.potential.terms();
        assert_eq!(terms.len(), 34);
        assert_abs_diff_eq!(terms[0].center, -16.0);
        assert_abs_diff_eq!(terms[32].center, 16.0);
        assert_abs_diff_eq!(terms[33].center, 100.0);
        // resolved document is generator-free but equivalent
        let rd = sc.resolved_doc();
        assert!(rd.potential.generator.is_none());
        assert_eq!(rd.potential.terms.len(), 34);
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = MINIMAL.replace("t_end = 10.0", "t_end = 10.0\nt_emd = 3.0");
        let err = ScenarioDoc::from_toml(&text).unwrap_err();
        assert!(err.to_string().contains("t_emd"), "{err}");
    }

    #[test]
    fn validation_failures_surface() {
        let bad_nu = MINIMAL.replace("nu = 0.5", "nu = -0.5");
        assert!(ScenarioDoc::from_toml(&bad_nu).unwrap().resolve().is_err());
        let bad_t = MINIMAL.replace("t_end = 10.0", "t_end = 0.0");
        assert!(ScenarioDoc::from_toml(&bad_t).unwrap().resolve().is_err());
        let bad_engines = MINIMAL.replace("t_end = 10.0", "t_end = 1.0\nengines = []");
        assert!(ScenarioDoc::from_toml(&bad_engines).unwrap().resolve().is_err());
        let bad_engine_name = MINIMAL.replace("t_end = 10.0", "t_end = 1.0\nengines = [\"pdq\"]");
        assert!(ScenarioDoc::from_toml(&bad_engine_name).is_err());
        let bad_grid = MINIMAL.replace("n_points = 1601", "n_points = 2000001");
        assert!(ScenarioDoc::from_toml(&bad_grid).unwrap().resolve().is_err());
    }

    #[test]
    fn toml_round_trip_is_stable() {
        let doc = ScenarioDoc::from_toml(MINIMAL).unwrap();
        let sc = doc.resolve().unwrap();
        let text1 = sc.resolved_doc().to_toml();
        let again = ScenarioDoc::from_toml(&text1).unwrap();
        let text2 = again.resolve().unwrap().resolved_doc().to_toml();
        assert_eq!(text1, text2);
    }

    #[test]
    fn engines_deduplicated_and_ordered() {
        let text = MINIMAL.replace(
            "t_end = 10.0",
            "t_end = 1.0\nengines = [\"pctc\", \"pde\", \"pctc\"]",
        );
        let sc = ScenarioDoc::from_toml(&text).unwrap().resolve().unwrap();
        assert_eq!(sc.engines, vec![Engine::Pde, Engine::Pctc]);
    }
}
