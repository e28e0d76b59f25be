use std::path::Path;
use std::sync::OnceLock;

use glob::Pattern;
use num_complex::Complex64;
use serde::Serialize;
use smtlab_core::curve::WedgeTower;
use smtlab_core::nevanlinna::{
    curvature_check, divisor_inequality_check, fmt_residual, jensen_residual, lemma31_empirical, lemma41_sweep,
    safe_radii, sample_points, smt_margin, smt_wronskian_margin, sum_product_check, uniqueness_certificate, CheckReport,
    CurvatureOptions, Verdict,
};
use smtlab_core::poly::UniPoly;
use smtlab_core::stochastic::{
    characteristic_reference, disc_green_integral, exit_angle_ks, exit_log_check, exit_time_check,
    jensen_expectation_check, lemma24_check, occupation_check, quadrant_check, Batch, Lemma24Input, McConfig,
};
use thiserror::Error;

use crate::scenario::Scenario;

/// Every check the runner knows, in report order.
pub const CHECK_NAMES: &[&str] = &[
    "fmt",
    "jensen",
    "divisor-inequality",
    "smt",
    "smt-wronskian",
    "curvature",
    "sum-product",
    "lemma31",
    "lemma41",
    "uniqueness",
    "mc-exit",
    "mc-coarea",
    "mc-jensen",
    "mc-characteristic",
    "lemma24",
    "jensen-expectation",
];

/// Checks that draw Brownian paths.
pub const STOCHASTIC_CHECKS: &[&str] =
    &["mc-exit", "mc-coarea", "mc-jensen", "mc-characteristic", "lemma24", "jensen-expectation"];

#[derive(Debug, Error, PartialEq)]
pub enum SelectError {
    #[error("unknown check `{0}`; valid checks: {list}", list = CHECK_NAMES.join(", "))]
    Unknown(String),
    #[error("bad pattern `{0}`")]
    Pattern(String),
}

/// Resolves names and glob patterns (`mc-*`) to check names in report order.
pub fn select_checks(filters: &[String]) -> Result<Vec<&'static str>, SelectError> {
    let mut selected = vec![false; CHECK_NAMES.len()];
    for filter in filters {
        let filter = filter.trim();
        if filter.is_empty() {
            continue;
        }
        let pattern = Pattern::new(filter).map_err(|_| SelectError::Pattern(filter.into()))?;
        let mut hit = false;
        for (flag, name) in selected.iter_mut().zip(CHECK_NAMES) {
            if pattern.matches(name) {
                *flag = true;
                hit = true;
            }
        }
        if !hit {
            return Err(SelectError::Unknown(filter.into()));
        }
    }
    Ok(CHECK_NAMES.iter().zip(selected).filter(|(_, s)| *s).map(|(n, _)| *n).collect())
}

/// Command-line overrides of scenario parameters.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub checks: Option<Vec<String>>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub nodes: Option<usize>,
    pub workers: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Vacuous,
    Inconclusive,
    Error,
}

impl From<Verdict> for Status {
    fn from(v: Verdict) -> Status {
        match v {
            Verdict::Pass => Status::Pass,
            Verdict::Fail => Status::Fail,
            Verdict::Vacuous => Status::Vacuous,
            Verdict::Inconclusive => Status::Inconclusive,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<CheckReport>,
}

impl CheckOutcome {
    pub fn csv(&self) -> String {
        match &self.report {
            Some(r) => r.to_csv(),
            None => "check,r,value,margin\n".into(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Environment {
    pub version: &'static str,
    pub seed: u64,
    pub samples: usize,
    pub workers: usize,
    pub nodes: usize,
    pub radii: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScenarioSummary {
    pub q: usize,
    pub d: u32,
    pub truncation: usize,
    pub delta: String,
    pub delta_witness: Vec<usize>,
    pub smt_coefficient: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub scenario: String,
    /// Pass iff every selected check passed or was vacuous.
    pub summary: Status,
    pub data: ScenarioSummary,
    pub checks: Vec<CheckOutcome>,
    pub environment: Environment,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.summary == Status::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// Writes `<name>.summary.json` and one `<name>.<check>.csv` per check.
    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(format!("{}.summary.json", self.scenario)), self.to_json())?;
        for c in &self.checks {
            std::fs::write(dir.join(format!("{}.{}.csv", self.scenario, c.name)), c.csv())?;
        }
        Ok(())
    }
}

/// Parameters after applying overrides.
struct Settings {
    radii: Vec<f64>,
    nodes: usize,
    config: McConfig,
}

/// One Monte Carlo batch per run, shared by all stochastic checks. Registered
/// integrands: 1, |y|², a wave, `h_k` of the curve for each level, and
/// `|Q_1(f̃)|^{0.1}`.
struct SharedBatch {
    batch: Batch,
    levels: usize,
}

const WAVE: fn(Complex64) -> f64 = |y| 1.0 + (3.0 * y.re).cos() * y.im;
const POWER: f64 = 0.1;

impl SharedBatch {
    fn level_index(&self, k: usize) -> usize {
        3 + k
    }

    fn power_index(&self) -> usize {
        3 + self.levels
    }
}

struct Context<'a> {
    scenario: &'a Scenario,
    settings: Settings,
    tower: WedgeTower,
    first_member: UniPoly,
    batch: OnceLock<Result<SharedBatch, String>>,
}

impl<'a> Context<'a> {
    fn power_integrand(&self) -> impl Fn(Complex64) -> f64 + Sync + '_ {
        let p = self.first_member.to_numeric();
        move |y| p.eval(y).norm().powf(POWER)
    }

    fn batch(&self) -> Result<&SharedBatch, String> {
        self.batch
            .get_or_init(|| {
                let one = |_: Complex64| 1.0;
                let sq = |y: Complex64| y.norm_sqr();
                let levels: Vec<_> = (0..=self.tower.top())
                    .map(|k| move |y: Complex64| self.tower.curvature(k, y).unwrap_or(0.0))
                    .collect();
                let power = self.power_integrand();
                let mut integrands: Vec<&(dyn Fn(Complex64) -> f64 + Sync)> = vec![&one, &sq, &WAVE];
                integrands.extend(levels.iter().map(|f| f as &(dyn Fn(Complex64) -> f64 + Sync)));
                integrands.push(&power);
                let r = self.mc_radius()?;
                Batch::simulate(r, self.settings.config, &integrands)
                    .map(|batch| SharedBatch { batch, levels: levels.len() })
                    .map_err(|e| e.to_string())
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    /// The configured Monte Carlo radius, nudged off the zeros of every `Q_j(f̃)`.
    fn mc_radius(&self) -> Result<f64, String> {
        let divisors: Vec<_> = self.scenario.instance.divisors.iter().collect();
        let r = safe_radii(&[self.scenario.params().mc_radius], &divisors).map_err(|e| e.to_string())?;
        Ok(r[0])
    }

    fn sample_points(&self) -> Vec<Complex64> {
        let inst = &self.scenario.instance;
        let tower = inst.data.tower();
        let mut avoid: Vec<Complex64> =
            inst.divisors.iter().flat_map(|d| d.points().iter().map(|p| p.root)).collect();
        for p in 0..=tower.top() {
            avoid.extend_from_slice(tower.singular_points(p));
        }
        let p = self.scenario.params();
        sample_points(p.points, p.point_radius, self.settings.config.seed, &avoid, 1e-2)
    }

    fn run(&self, name: &str) -> Result<CheckReport, String> {
        let inst = &self.scenario.instance;
        let p = self.scenario.params();
        let Settings { radii, nodes, .. } = &self.settings;
        let nodes = *nodes;
        let e = |err: &dyn std::fmt::Display| err.to_string();
        match name {
            "fmt" => fmt_residual(inst, radii, nodes).map_err(|x| e(&x)),
            "jensen" => {
                let mut parts = Vec::new();
                for c in &inst.composed {
                    parts.push(jensen_residual(c, radii, nodes).map_err(|x| e(&x))?);
                }
                Ok(merge("jensen", parts, |j| format!("Q{}", j + 1)))
            }
            "divisor-inequality" => divisor_inequality_check(inst).map_err(|x| e(&x)),
            "smt" => smt_margin(inst, p.epsilon, p.delta, radii, nodes).map_err(|x| e(&x)),
            "smt-wronskian" => smt_wronskian_margin(inst, p.epsilon, p.delta, radii, nodes).map_err(|x| e(&x)),
            "curvature" => Ok(curvature_check(inst.data.tower(), &self.sample_points(), CurvatureOptions::default())),
            "sum-product" => sum_product_check(inst, p.delta_big, &self.sample_points()).map_err(|x| e(&x)),
            "lemma31" => {
                let mut parts = Vec::new();
                for k in 0..=self.tower.top() {
                    parts.push(lemma31_empirical(&self.scenario.curve, k, p.delta, radii, nodes).map_err(|x| e(&x))?);
                }
                Ok(merge("lemma31", parts, |k| format!("k={k}")))
            }
            "lemma41" => Ok(lemma41_sweep()),
            "uniqueness" => match &self.scenario.second {
                Some(g) => uniqueness_certificate(&self.scenario.curve, g, &inst.family, &inst.delta.value)
                    .map(|(_, _, report)| report)
                    .map_err(|x| e(&x)),
                None => {
                    let mut report = CheckReport::new("uniqueness");
                    report.verdict = Verdict::Vacuous;
                    report.note("no second curve");
                    Ok(report)
                }
            },
            "mc-exit" => {
                let b = &self.batch()?.batch;
                Ok(merge("mc-exit", vec![exit_time_check(&[b]), exit_angle_ks(b), quadrant_check(b)], |i| {
                    ["tau", "ks", "quadrants"][i].to_string()
                }))
            }
            "mc-coarea" => {
                let shared = self.batch()?;
                let b = &shared.batch;
                let r = b.r;
                let h0 = |y: Complex64| self.tower.curvature(0, y).unwrap_or(0.0);
                let rows = vec![
                    ("one".to_string(), b.occupation(0), r * r / 2.0),
                    ("abs2".to_string(), b.occupation(1), r.powi(4) / 8.0),
                    ("wave".to_string(), b.occupation(2), disc_green_integral(r, WAVE)),
                    ("h0".to_string(), b.occupation(shared.level_index(0)), disc_green_integral(r, h0)),
                    (
                        "Q1^0.1".to_string(),
                        b.occupation(shared.power_index()),
                        disc_green_integral(r, self.power_integrand()),
                    ),
                ];
                Ok(occupation_check("mc-coarea", r, &rows, 0.02))
            }
            "mc-jensen" => {
                let b = &self.batch()?.batch;
                let mut polys: Vec<(String, UniPoly)> =
                    inst.composed.iter().enumerate().map(|(j, c)| (format!("Q{}", j + 1), c.clone())).collect();
                polys.push(("2z-1".into(), UniPoly::from_ints(&[-1, 2])));
                polys.push(("z-3r".into(), UniPoly::from_ints(&[-(3.0 * b.r).ceil() as i64, 1])));
                exit_log_check(b, &polys).map_err(|x| e(&x))
            }
            "mc-characteristic" => {
                let shared = self.batch()?;
                let b = &shared.batch;
                let mut rows = Vec::new();
                for k in 0..=self.tower.top() {
                    let est = b.occupation(shared.level_index(k));
                    for (label, exact) in characteristic_reference(&self.tower, k, b.r) {
                        rows.push((format!("k={k}:{label}"), est, exact));
                    }
                }
                Ok(occupation_check("mc-characteristic", b.r, &rows, 0.02))
            }
            "lemma24" => {
                let shared = self.batch()?;
                let b = &shared.batch;
                let (r, delta) = (b.r, 0.5);
                let input = |label: &str, exit, occupation| Lemma24Input { label: label.into(), r, delta, exit, occupation };
                let power = self.power_integrand();
                Ok(lemma24_check(&[
                    input("one", b.exit_estimate(|_| 1.0), b.exit_time()),
                    input("abs2", b.exit_estimate(|y| y.norm_sqr()), b.occupation(1)),
                    input("Q1^0.1", b.exit_estimate(power), b.occupation(shared.power_index())),
                ]))
            }
            "jensen-expectation" => Ok(jensen_expectation_check(&self.batch()?.batch, Complex64::new(0.5, 0.25))),
            other => Err(format!("unknown check {other}")),
        }
    }
}

/// Concatenates reports under one name, prefixing series with `label(i)`.
fn merge(name: &str, parts: Vec<CheckReport>, label: impl Fn(usize) -> String) -> CheckReport {
    let mut out = CheckReport::new(name);
    let verdicts: Vec<Verdict> = parts.iter().map(|r| r.verdict).collect();
    for (i, part) in parts.into_iter().enumerate() {
        let prefix = label(i);
        for row in part.rows {
            let series = if row.series.is_empty() { prefix.clone() } else { format!("{prefix}:{}", row.series) };
            out.push(series, row.r, row.value, row.margin);
        }
        if i == 0 {
            out.fitted_constant = part.fitted_constant;
            out.slope_estimate = part.slope_estimate;
        } else {
            out.fitted_constant = out.fitted_constant.max(part.fitted_constant);
            out.slope_estimate = out.slope_estimate.min(part.slope_estimate);
        }
        out.note(format!("{prefix}: {} {}", part.verdict, part.details));
    }
    out.verdict = if verdicts.contains(&Verdict::Fail) {
        Verdict::Fail
    } else if verdicts.contains(&Verdict::Inconclusive) {
        Verdict::Inconclusive
    } else if !verdicts.is_empty() && verdicts.iter().all(|v| *v == Verdict::Vacuous) {
        Verdict::Vacuous
    } else {
        Verdict::Pass
    };
    out
}

/// Runs the selected checks in report order. Check errors are recorded in
/// their outcome; the run itself only fails on a bad selection.
pub fn run(scenario: &Scenario, options: &RunOptions) -> Result<Report, SelectError> {
    let p = scenario.params();
    let names = select_checks(options.checks.as_deref().unwrap_or(&p.checks))?;
    let nodes = options.nodes.unwrap_or(p.nodes);
    let config = McConfig {
        samples: options.samples.unwrap_or(p.samples),
        seed: options.seed.unwrap_or(p.seed),
        workers: options.workers.unwrap_or(p.workers),
        policy: p.step_policy(),
    };
    let base = p.radii.values().expect("validated at load");
    let radii = scenario.instance.safe_radii(&base).unwrap_or(base);
    let context = Context {
        scenario,
        settings: Settings { radii: radii.clone(), nodes, config },
        tower: WedgeTower::new(scenario.curve.components().to_vec()),
        first_member: scenario.instance.composed[0].clone(),
        batch: OnceLock::new(),
    };
    let checks: Vec<CheckOutcome> = names
        .iter()
        .map(|&name| match context.run(name) {
            Ok(report) => CheckOutcome { name: name.into(), status: report.verdict.into(), error: None, report: Some(report) },
            Err(error) => CheckOutcome { name: name.into(), status: Status::Error, error: Some(error), report: None },
        })
        .collect();
    let summary = if checks.iter().all(|c| matches!(c.status, Status::Pass | Status::Vacuous)) {
        Status::Pass
    } else if checks.iter().any(|c| matches!(c.status, Status::Fail | Status::Error)) {
        Status::Fail
    } else {
        Status::Inconclusive
    };
    let inst = &scenario.instance;
    Ok(Report {
        scenario: scenario.name().to_string(),
        summary,
        data: ScenarioSummary {
            q: inst.q(),
            d: inst.d(),
            truncation: inst.truncation(),
            delta: inst.delta.value.to_string(),
            delta_witness: inst.delta.witness.iter().map(|j| j + 1).collect(),
            smt_coefficient: inst.smt_coefficient(p.epsilon),
        },
        checks,
        environment: Environment {
            version: env!("CARGO_PKG_VERSION"),
            seed: config.seed,
            samples: config.samples,
            workers: config.workers,
            nodes,
            radii,
        },
    })
}
