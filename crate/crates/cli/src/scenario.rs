//! Scenario files: a TOML document with `[variety]`, `[hypersurfaces]`,
//! `[curve]` and `[params]` tables whose polynomial values are strings.
//!
//! ```toml
//! name = "p1-four-points"
//!
//! [variety]
//! ambient = 1
//! generators = []
//!
//! [hypersurfaces]
//! members = ["x1", "x1 - x0", "x1 + x0", "x1 - i*x0"]
//!
//! [curve]
//! components = ["1", "z"]
//! second = ["1", "z"]
//!
//! [params]
//! epsilon = 0.1
//! ```

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use smtlab_core::algebra::Variety;
use smtlab_core::curve::{Curve, CurveError};
use smtlab_core::family::{FamilyError, HypersurfaceFamily};
use smtlab_core::nevanlinna::{default_radii, Instance, NevanlinnaError, DEFAULT_NODES};
use smtlab_core::poly::{parse_homogeneous, parse_univariate, MultiPoly, ParseError, UniPoly};
use smtlab_core::stochastic::StepPolicy;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Toml(#[from] toml::de::Error),
    #[error("{field}: {source} in `{text}`")]
    Poly { field: String, text: String, source: ParseError },
    #[error("{field}: declared degree {declared} but the polynomial has degree {actual}")]
    DeclaredDegree { field: String, declared: u32, actual: u32 },
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("variety: {0}")]
    Variety(String),
    #[error("curve: {0}")]
    Curve(#[from] CurveError),
    #[error("second curve: {0}")]
    SecondCurve(CurveError),
    #[error("hypersurfaces: {0}")]
    Family(#[from] FamilyError),
    #[error("{0}")]
    Instance(#[from] NevanlinnaError),
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub variety: VarietySection,
    pub hypersurfaces: HypersurfaceSection,
    pub curve: CurveSection,
    #[serde(default)]
    pub params: Params,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct VarietySection {
    /// `n` in `P^n`.
    pub ambient: usize,
    #[serde(default)]
    pub generators: Vec<String>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct HypersurfaceSection {
    pub members: Vec<String>,
    /// Optional declared degrees, checked against the parsed members.
    #[serde(default)]
    pub degrees: Option<Vec<u32>>,
    /// `N` for the subgeneral-position bound, when the family is claimed to be
    /// in `N`-subgeneral position.
    #[serde(default)]
    pub subgeneral: Option<usize>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSection {
    pub components: Vec<String>,
    #[serde(default)]
    pub second: Option<Vec<String>>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum RadiiSpec {
    List(Vec<f64>),
    Geometric { start: f64, stop: f64, count: usize },
}

impl RadiiSpec {
    pub fn values(&self) -> Result<Vec<f64>, ScenarioError> {
        let values = match *self {
            RadiiSpec::List(ref v) => v.clone(),
            RadiiSpec::Geometric { start, stop, count } => {
                if count < 2 || !(start > 0.0 && stop > start) {
                    return Err(ScenarioError::Param(format!("radii {start}..{stop} x{count}")));
                }
                let ratio = (stop / start).ln() / (count - 1) as f64;
                (0..count).map(|i| start * (ratio * i as f64).exp()).collect()
            }
        };
        if values.len() < 2 || values.iter().any(|&r| r.is_nan() || r < 1.0) {
            return Err(ScenarioError::Param("need at least two radii, all ≥ 1".into()));
        }
        Ok(values)
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub epsilon: f64,
    pub delta: f64,
    /// The large constant in the sum-product estimate; must exceed 1.
    pub delta_big: f64,
    pub radii: RadiiSpec,
    pub nodes: usize,
    /// Sample points for the curvature and sum-product checks.
    pub points: usize,
    pub point_radius: f64,
    pub samples: usize,
    pub seed: u64,
    pub workers: usize,
    /// Disc radius for the Monte Carlo checks.
    pub mc_radius: f64,
    pub min_step: f64,
    pub step_scale: f64,
    pub max_step: f64,
    /// Check names or glob patterns.
    pub checks: Vec<String>,
}

impl Default for Params {
    fn default() -> Self {
        let policy = StepPolicy::default();
        Params {
            epsilon: 0.1,
            delta: 0.1,
            delta_big: 2.0,
            radii: RadiiSpec::List(default_radii()),
            nodes: DEFAULT_NODES,
            points: 100,
            point_radius: 3.0,
            samples: 100_000,
            seed: 20240601,
            workers: 1,
            mc_radius: 2.0,
            min_step: policy.min_step,
            step_scale: policy.scale,
            max_step: policy.max_step,
            checks: vec!["*".into()],
        }
    }
}

impl Params {
    pub fn step_policy(&self) -> StepPolicy {
        StepPolicy { min_step: self.min_step, scale: self.step_scale, max_step: self.max_step, ..StepPolicy::default() }
    }

    fn validate(&self) -> Result<(), ScenarioError> {
        let bad = |what: &str| Err(ScenarioError::Param(what.into()));
        if !(self.epsilon > 0.0 && self.delta > 0.0) {
            return bad("epsilon and delta must be positive");
        }
        if self.delta_big.is_nan() || self.delta_big <= 1.0 {
            return bad("delta_big must exceed 1");
        }
        if self.nodes < 256 || !self.nodes.is_power_of_two() {
            return bad("nodes must be a power of two ≥ 256");
        }
        if self.samples < 2 || self.workers == 0 {
            return bad("samples ≥ 2 and workers ≥ 1 required");
        }
        if !(self.mc_radius > 0.0 && self.point_radius > 0.0 && self.min_step > 0.0 && self.step_scale > 0.0 && self.max_step >= self.min_step) {
            return bad("radii and step parameters must be positive");
        }
        self.radii.values().map(|_| ())
    }
}

/// A validated scenario.
#[derive(Debug)]
pub struct Scenario {
    pub file: ScenarioFile,
    pub variety: Arc<Variety>,
    pub family: HypersurfaceFamily,
    pub curve: Curve,
    pub second: Option<Curve>,
    /// Curve, family, distributive constant and associated data at the lifted degree.
    pub instance: Instance,
}

impl Scenario {
    pub fn name(&self) -> &str {
        &self.file.name
    }

    pub fn params(&self) -> &Params {
        &self.file.params
    }
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|source| ScenarioError::Io { path: path.display().to_string(), source })?;
    parse_scenario(&text)
}

pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let file: ScenarioFile = toml::from_str(text)?;
    build(file)
}

fn homogeneous(field: String, text: &str, names: &[String]) -> Result<MultiPoly, ScenarioError> {
    parse_homogeneous(text, names).map_err(|source| ScenarioError::Poly { field, text: text.into(), source })
}

fn components(field: &str, texts: &[String]) -> Result<Vec<UniPoly>, ScenarioError> {
    texts
        .iter()
        .enumerate()
        .map(|(i, t)| {
            parse_univariate(t).map_err(|source| ScenarioError::Poly {
                field: format!("{field}[{i}]"),
                text: t.clone(),
                source,
            })
        })
        .collect()
}

/// Parses every polynomial, then checks that the curve lies on the variety,
/// that the family is admissible and that the curve is nondegenerate over
/// forms of the lifted degree.
pub fn build(file: ScenarioFile) -> Result<Scenario, ScenarioError> {
    file.params.validate()?;
    let n = file.variety.ambient;
    if n == 0 {
        return Err(ScenarioError::Variety("ambient dimension must be at least 1".into()));
    }
    let names = MultiPoly::default_names(n + 1);
    let generators = file
        .variety
        .generators
        .iter()
        .enumerate()
        .map(|(i, g)| homogeneous(format!("variety.generators[{i}]"), g, &names))
        .collect::<Result<Vec<_>, _>>()?;
    let variety = Arc::new(Variety::new(n, generators).map_err(|e| ScenarioError::Variety(e.to_string()))?);
    if variety.is_empty() {
        return Err(ScenarioError::Variety("the variety is empty".into()));
    }
    let members = file
        .hypersurfaces
        .members
        .iter()
        .enumerate()
        .map(|(i, q)| homogeneous(format!("hypersurfaces.members[{i}]"), q, &names))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(declared) = &file.hypersurfaces.degrees {
        if declared.len() != members.len() {
            return Err(ScenarioError::Param(format!(
                "{} declared degrees for {} members",
                declared.len(),
                members.len()
            )));
        }
        for (i, (q, &d)) in members.iter().zip(declared).enumerate() {
            if q.degree() != d {
                return Err(ScenarioError::DeclaredDegree {
                    field: format!("hypersurfaces.members[{i}]"),
                    declared: d,
                    actual: q.degree(),
                });
            }
        }
    }
    let family = HypersurfaceFamily::on_variety(members, &variety)?;
    let curve = Curve::new(components("curve.components", &file.curve.components)?, variety.clone())?;
    let d = family.lifted_degree();
    if let Err(witness) = curve.nondegeneracy_check(d)? {
        return Err(CurveError::Degenerate { degree: d, witness: witness.to_string() }.into());
    }
    let second = match &file.curve.second {
        Some(texts) => {
            let c = components("curve.second", texts)?;
            Some(Curve::new(c, variety.clone()).map_err(ScenarioError::SecondCurve)?)
        }
        None => None,
    };
    let instance = Instance::new(curve.clone(), family.clone())?;
    Ok(Scenario { file, variety, family, curve, second, instance })
}
