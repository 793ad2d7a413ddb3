//! Suite selection, validation and execution behind `rumin run`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::chartfile::load_chart;
use crate::error::{Error, Result};
use crate::frame::{build_frame_with_tol, is_sasakian, ChartSpec, DEFAULT_FRAME_TOL};
use crate::fuzz::{random_complex_function, random_real_function, rng_for};
use crate::glcomplex::{Bidegree, GLComplex, GLForm};
use crate::immersion::{
    classify, cylinder_identities, harmonicity_chain, integrability_check, isometry_check, isotropy_check,
    pluriharmonic_check, sphere_constants, weierstrass_check, Immersion, ImmersionMap, Shape,
};
use crate::models::{model, ModelName, ModelParams};
use crate::report::{to_csv, to_json, to_text, ConditionReport, RunReport, ScoreKind, SuiteReport};
use crate::sampling::{SampleSet, DEFAULT_POINTS};

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_RUN_ORDER: usize = 5;
pub const MAX_ORDER: usize = 8;

/// Keeps the random test functions of the complex suite independent of the
/// sample points drawn from the same seed.
const FUNCTION_STREAM: u64 = 0xc0ff_ee00;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Frame,
    Complex,
    Weierstrass,
    Pluriharmonic,
    Harmonicity,
    Classify,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Frame,
        Suite::Complex,
        Suite::Weierstrass,
        Suite::Pluriharmonic,
        Suite::Harmonicity,
        Suite::Classify,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Frame => "frame",
            Suite::Complex => "complex",
            Suite::Weierstrass => "weierstrass",
            Suite::Pluriharmonic => "pluriharmonic",
            Suite::Harmonicity => "harmonicity",
            Suite::Classify => "classify",
        }
    }

    /// Smallest jet order at which every quantity of the suite is exact.
    pub fn min_order(self) -> usize {
        match self {
            Suite::Frame | Suite::Weierstrass | Suite::Pluriharmonic => 3,
            Suite::Complex | Suite::Harmonicity => 4,
            Suite::Classify => 5,
        }
    }

    pub fn needs_immersion(self) -> bool {
        !matches!(self, Suite::Frame | Suite::Complex)
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.as_str() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::Config {
                field: "suite".into(),
                message: format!(
                    "unknown suite `{s}` (expected one of {})",
                    Suite::ALL.map(Suite::as_str).join(", ")
                ),
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

impl Format {
    pub fn render(self, report: &RunReport) -> String {
        match self {
            Format::Json => to_json(report),
            Format::Csv => to_csv(report),
            Format::Text => to_text(report),
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" => Ok(Format::Text),
            _ => Err(Error::Config {
                field: "format".into(),
                message: format!("unknown format `{s}` (expected json, csv or text)"),
            }),
        }
    }
}

/// A resolved chart and its optional immersion.
#[derive(Debug, Clone, PartialEq)]
pub struct Target {
    pub name: String,
    pub chart: ChartSpec,
    pub embedding: Option<ImmersionMap>,
}

impl Target {
    pub fn model(name: ModelName) -> Result<Self> {
        let d = model(name, &ModelParams::default())?;
        Ok(Target {
            name: d.chart.name.clone(),
            chart: d.chart,
            embedding: d.embedding,
        })
    }

    pub fn chart_file(path: &Path) -> Result<Self> {
        let loaded = load_chart(path)?;
        Ok(Target {
            name: loaded.chart.name.clone(),
            chart: loaded.chart,
            embedding: loaded.embedding,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub target: Target,
    /// `None` selects every suite applicable to the target.
    pub suites: Option<Vec<Suite>>,
    pub points: usize,
    pub seed: u64,
    pub tolerances: BTreeMap<Suite, f64>,
    pub order: usize,
    pub format: Format,
}

impl RunConfig {
    pub fn new(target: Target) -> Self {
        RunConfig {
            target,
            suites: None,
            points: DEFAULT_POINTS,
            seed: 0,
            tolerances: BTreeMap::new(),
            order: DEFAULT_RUN_ORDER,
            format: Format::Json,
        }
    }

    pub fn tol(&self, suite: Suite) -> f64 {
        self.tolerances.get(&suite).copied().unwrap_or(DEFAULT_TOL)
    }

    /// The suites that will run, in canonical order and without duplicates.
    pub fn selected_suites(&self) -> Vec<Suite> {
        match &self.suites {
            Some(list) => Suite::ALL.into_iter().filter(|s| list.contains(s)).collect(),
            None => {
                let dim = self.target.embedding.as_ref().map(ImmersionMap::dim);
                Suite::ALL
                    .into_iter()
                    .filter(|s| match s {
                        Suite::Frame | Suite::Complex => true,
                        Suite::Classify => dim == Some(4),
                        _ => dim.is_some(),
                    })
                    .collect()
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let config = |field: &str, message: String| {
            Err(Error::Config {
                field: field.into(),
                message,
            })
        };
        if self.points == 0 {
            return config("points", "needs at least one sample point".into());
        }
        if let Some(list) = &self.suites {
            if list.is_empty() {
                return config("suite", "no suite selected".into());
            }
        }
        for (suite, tol) in &self.tolerances {
            if !(tol.is_finite() && *tol > 0.0) {
                return config("tol", format!("tolerance for {suite} must be positive, got {tol}"));
            }
        }
        if self.order > MAX_ORDER {
            return config(
                "order",
                format!("jet order {} exceeds the maximum {MAX_ORDER}", self.order),
            );
        }
        for suite in self.selected_suites() {
            if self.order < suite.min_order() {
                return config(
                    "order",
                    format!(
                        "jet order {} is below the minimum {} required by suite {suite}",
                        self.order,
                        suite.min_order()
                    ),
                );
            }
            if suite.needs_immersion() && self.target.embedding.is_none() {
                return config(
                    "suite",
                    format!(
                        "suite {suite} needs an immersion but target {} has none",
                        self.target.name
                    ),
                );
            }
        }
        Ok(())
    }
}

/// Validates and executes every selected suite. Only configuration errors are
/// returned; failures inside a suite become failed conditions.
pub fn run(config: &RunConfig) -> Result<RunReport> {
    config.validate()?;
    let samples = SampleSet::halton(&config.target.chart.domain, config.points, config.seed);
    let suites = config
        .selected_suites()
        .into_iter()
        .map(|suite| run_suite(config, suite, &samples))
        .collect();
    Ok(RunReport {
        target: config.target.name.clone(),
        seed: config.seed,
        points: config.points,
        order: config.order,
        suites,
    })
}

fn run_suite(config: &RunConfig, suite: Suite, samples: &SampleSet) -> SuiteReport {
    let tol = config.tol(suite);
    let mut labels = BTreeMap::new();
    let outcome = match suite {
        Suite::Frame => frame_suite(config, samples, tol, &mut labels),
        Suite::Complex => complex_suite(config, samples, tol),
        _ => {
            let map = config.target.embedding.as_ref().expect("validated");
            let imm = Immersion::new(&config.target.chart, map).with_order(config.order);
            match suite {
                Suite::Weierstrass => weierstrass_suite(config, &imm, samples, tol),
                Suite::Pluriharmonic => pluriharmonic_check(&imm, samples, tol),
                Suite::Harmonicity => harmonicity_suite(&imm, samples, tol),
                _ => classify_suite(&imm, samples, tol, &mut labels),
            }
        }
    };
    let conditions = outcome.unwrap_or_else(|e| vec![failed_condition(suite.as_str(), &e, tol, samples)]);
    let mut report = SuiteReport::new(suite.as_str(), tol, conditions);
    report.labels = labels;
    report
}

fn failed_condition(prefix: &str, e: &Error, tol: f64, samples: &SampleSet) -> ConditionReport {
    let kind = if matches!(e, Error::PrerequisiteFailed(_)) {
        "prerequisite"
    } else {
        "error"
    };
    ConditionReport::from_residuals(format!("{prefix}.{kind}"), e.to_string(), Vec::new(), tol, samples)
        .with_score(f64::INFINITY, ScoreKind::Max)
}

fn per_point<T: Send>(samples: &SampleSet, g: impl Fn(usize, [f64; 3]) -> Result<T> + Sync) -> Result<Vec<T>> {
    samples
        .points
        .par_iter()
        .enumerate()
        .map(|(k, p)| g(k, *p))
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

fn column<const N: usize>(rows: &[[f64; N]], k: usize) -> Vec<f64> {
    rows.iter().map(|r| r[k]).collect()
}

const FRAME_DESCRIPTIONS: [&str; 8] = [
    "L(Z, Zbar) = 1",
    "theta(T) = 1, i_T dtheta = 0",
    "coframe dual to frame",
    "dtheta = i zeta ^ zetabar",
    "dzeta = i a zeta^zetabar - b zeta^theta - c zetabar^theta",
    "b + conj(b) = 0",
    "iZc - iZbar b + Ta - ab - conj(a)c = 0",
    "bracket expansion in the frame",
];

fn frame_suite(
    config: &RunConfig,
    samples: &SampleSet,
    tol: f64,
    labels: &mut BTreeMap<String, String>,
) -> Result<Vec<ConditionReport>> {
    let rows = per_point(samples, |_, p| {
        let frame = build_frame_with_tol(&config.target.chart, p, config.order, DEFAULT_FRAME_TOL)?;
        let r = frame.verify()?;
        let named = r.named();
        let mut row = [0.0; 9];
        for (k, (_, v)) in named.iter().enumerate() {
            row[k] = *v;
        }
        row[8] = frame.c.value().norm();
        Ok(row)
    })?;
    let max_abs_c = column(&rows, 8).into_iter().fold(0.0, f64::max);
    let sasakian = is_sasakian(max_abs_c, tol);
    labels.insert("sasakian".into(), sasakian.to_string());
    let names = crate::frame::StructureResiduals::default().named();
    Ok(names
        .iter()
        .enumerate()
        .map(|(k, (name, _))| {
            let r = ConditionReport::from_residuals(
                format!("frame.{name}"),
                FRAME_DESCRIPTIONS[k],
                column(&rows, k),
                tol,
                samples,
            );
            if k == 0 {
                r.with_measured("max_abs_c", max_abs_c)
            } else {
                r
            }
        })
        .collect())
}

fn complex_suite(config: &RunConfig, samples: &SampleSet, tol: f64) -> Result<Vec<ConditionReport>> {
    let order = config.order;
    let rows = per_point(samples, |k, p| {
        let frame = build_frame_with_tol(&config.target.chart, p, order, DEFAULT_FRAME_TOL)?;
        let cx = GLComplex::new(&frame);
        let mut rng = rng_for(config.seed ^ FUNCTION_STREAM, k);
        let f = random_real_function(&mut rng, 1.0).eval(p, order)?;
        let g = random_complex_function(&mut rng, 1.0).eval(p, order)?;
        let h = random_complex_function(&mut rng, 1.0).eval(p, order)?;
        let ids = cx.identity_residuals(&f, &g, &h)?;
        let n = ids.named();
        Ok([
            n[0].1,
            n[1].1,
            n[2].1,
            n[3].1,
            n[4].1,
            ids.rumin_closure(),
            cx.laplacian_residual(&f)?,
            cx.reeb_residual(&f)?,
        ])
    })?;
    let ids = [
        ("complex.mixed_functions", "D'd''f + D''d'f = 0"),
        ("complex.pure_functions", "D'd'f + D+d''f = 0"),
        ("complex.on_e10", "d'D'' + d''D' = 0 on E(1,0)"),
        ("complex.on_e01", "d'D' + d''D+ = 0 on E(0,1)"),
        ("complex.d_after_d", "d D = 0 on one-forms"),
        ("complex.rumin_closure", "D(df) = 0"),
        ("complex.laplacian", "Lap_R f = 2 Lap_GL f - iTf"),
        ("complex.reeb", "Tf = i delta'd'f - i delta''d''f"),
    ];
    Ok(ids
        .iter()
        .enumerate()
        .map(|(k, (id, desc))| ConditionReport::from_residuals(*id, *desc, column(&rows, k), tol, samples))
        .collect())
}

fn weierstrass_suite(
    config: &RunConfig,
    imm: &Immersion,
    samples: &SampleSet,
    tol: f64,
) -> Result<Vec<ConditionReport>> {
    let mut out = weierstrass_check(imm, samples, tol)?;
    out.push(isometry_check(imm, samples, tol)?);
    let map = imm.map;
    let order = config.order;
    out.extend(integrability_check(
        imm.chart,
        order,
        |frame| {
            let comps = map.eval(frame.point, order, imm.frame_tol)?;
            let phi = comps.iter().map(|c| frame.zf(c)).collect::<Result<Vec<_>>>()?;
            Ok(GLForm::vector(Bidegree::E10, phi))
        },
        samples,
        tol,
    )?);
    Ok(out)
}

fn harmonicity_suite(imm: &Immersion, samples: &SampleSet, tol: f64) -> Result<Vec<ConditionReport>> {
    let chain = harmonicity_chain(imm, samples, tol)?;
    let mut out = chain.reports;
    out.push(
        ConditionReport::from_residuals(
            "harmonicity.implications",
            "outcomes respect (1) => (2) => (3) and (3) <=> (4)",
            Vec::new(),
            tol,
            samples,
        )
        .with_pass(chain.implications_consistent),
    );
    if imm.dim() == 4 {
        match isotropy_check(imm, samples, tol) {
            Ok(r) => out.extend(r),
            Err(e) => out.push(failed_condition("harmonicity.isotropy", &e, tol, samples)),
        }
    }
    Ok(out)
}

fn classify_suite(
    imm: &Immersion,
    samples: &SampleSet,
    tol: f64,
    labels: &mut BTreeMap<String, String>,
) -> Result<Vec<ConditionReport>> {
    let c = classify(imm, samples, tol)?;
    labels.insert("shape".into(), c.shape.to_string());
    let mut out =
        vec![
            ConditionReport::from_residuals("classify.label", "classification is definite", Vec::new(), tol, samples)
                .with_pass(c.shape != Shape::Inconclusive)
                .with_measured("max_abs_c", c.max_abs_c)
                .with_measured("sphere_constancy", c.sphere_constancy)
                .with_measured("sphere_deviation", c.sphere_deviation)
                .with_measured("cylinder_deviation", c.cylinder_deviation)
                .with_measured("gauge_residual", c.gauge_residual)
                .with_measured("kappa_1", c.spectrum.mean[0])
                .with_measured("kappa_2", c.spectrum.mean[1])
                .with_measured("kappa_3", c.spectrum.mean[2]),
        ];
    match c.shape {
        Shape::Sphere => out.extend(sphere_constants(imm, samples, tol)?),
        Shape::Cylinder => out.extend(cylinder_identities(imm, samples, tol)?),
        Shape::Inconclusive => {}
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(name: ModelName) -> RunConfig {
        let mut c = RunConfig::new(Target::model(name).unwrap());
        c.points = 20;
        c
    }

    fn condition<'a>(r: &'a RunReport, id: &str) -> &'a ConditionReport {
        r.suites
            .iter()
            .flat_map(|s| &s.conditions)
            .find(|c| c.id == id)
            .unwrap_or_else(|| panic!("no condition {id}"))
    }

    #[test]
    fn default_suites_follow_the_target() {
        assert_eq!(config(ModelName::Sphere).selected_suites(), Suite::ALL.to_vec());
        assert_eq!(
            config(ModelName::Heisenberg).selected_suites(),
            vec![Suite::Frame, Suite::Complex]
        );
        let mut c = config(ModelName::Sphere);
        c.suites = Some(vec![Suite::Classify, Suite::Frame, Suite::Frame]);
        assert_eq!(c.selected_suites(), vec![Suite::Frame, Suite::Classify]);
    }

    #[test]
    fn validation_rejects_bad_configs() {
        let field = |c: &RunConfig| match c.validate() {
            Err(Error::Config { field, .. }) => field,
            other => panic!("{other:?}"),
        };
        let mut c = config(ModelName::Sphere);
        c.order = 2;
        c.suites = Some(vec![Suite::Classify]);
        assert_eq!(field(&c), "order");
        let mut c = config(ModelName::Sphere);
        c.order = 9;
        assert_eq!(field(&c), "order");
        let mut c = config(ModelName::Sphere);
        c.points = 0;
        assert_eq!(field(&c), "points");
        let mut c = config(ModelName::Sphere);
        c.tolerances.insert(Suite::Frame, -1.0);
        assert_eq!(field(&c), "tol");
        let mut c = config(ModelName::Heisenberg);
        c.suites = Some(vec![Suite::Weierstrass]);
        assert_eq!(field(&c), "suite");
        assert!(matches!("bogus".parse::<Suite>(), Err(Error::Config { .. })));
        let mut c = config(ModelName::Sphere);
        c.order = 3;
        c.suites = Some(vec![Suite::Frame, Suite::Weierstrass]);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn sphere_and_cylinder_pass_everything() {
        for (name, shape) in [(ModelName::Sphere, "sphere"), (ModelName::Cylinder, "cylinder")] {
            let r = run(&config(name)).unwrap();
            for s in &r.suites {
                for c in &s.conditions {
                    assert!(c.pass, "{name} {} {:e} {}", c.id, c.score, c.description);
                }
            }
            let classify = r.suites.iter().find(|s| s.suite == "classify").unwrap();
            assert_eq!(classify.labels["shape"], shape);
        }
    }

    #[test]
    fn sasakian_label() {
        let r = run(&config(ModelName::Heisenberg)).unwrap();
        assert!(r.pass());
        assert_eq!(r.suites[0].labels["sasakian"], "true");
        let r = run(&config(ModelName::Sphere)).unwrap();
        assert_eq!(r.suites[0].labels["sasakian"], "true");
        let r = run(&config(ModelName::Cylinder)).unwrap();
        assert_eq!(r.suites[0].labels["sasakian"], "false");
    }

    #[test]
    fn suite_failures_are_reported_not_thrown() {
        let mut t = Target::model(ModelName::Sphere).unwrap();
        t.embedding = Some(t.embedding.unwrap().scaled(1.1));
        let mut c = RunConfig::new(t);
        c.points = 10;
        let r = run(&c).unwrap();
        assert!(!r.pass());
        let w3 = condition(&r, "weierstrass.3");
        assert!(!w3.pass);
        assert!((w3.measured["phi_norm2"] - 1.21).abs() < 1e-9);
        assert!(!condition(&r, "harmonicity.prerequisite").pass);
        assert!(!condition(&r, "classify.prerequisite").pass);
    }

    #[test]
    fn suites_pass_at_their_minimum_order() {
        for name in [ModelName::Sphere, ModelName::Cylinder] {
            for suite in Suite::ALL {
                let mut c = config(name);
                c.points = 8;
                c.order = suite.min_order();
                c.suites = Some(vec![suite]);
                let r = run(&c).unwrap();
                assert!(r.pass(), "{name} {suite} at order {}: {}", c.order, to_text(&r));
            }
        }
    }

    #[test]
    fn runs_are_deterministic() {
        let c = config(ModelName::Cylinder);
        assert_eq!(to_json(&run(&c).unwrap()), to_json(&run(&c).unwrap()));
    }
}
