//! Per-condition results and their serialization.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io;

use serde::Serialize;

use crate::sampling::SampleSet;

/// How the score of a condition is aggregated from per-point residuals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreKind {
    /// Largest residual over the sample.
    Max,
    /// Sample standard deviation of a quantity that should be constant.
    StdDev,
    /// Largest of several aggregated scores.
    Combined,
}

/// Outcome of one checked condition over a sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub id: String,
    pub description: String,
    pub tol: f64,
    pub pass: bool,
    pub score: f64,
    pub score_kind: ScoreKind,
    pub max: f64,
    pub mean: f64,
    pub seed: u64,
    pub count: usize,
    /// Named measured quantities (sample means unless noted in the key).
    pub measured: BTreeMap<String, f64>,
    pub residuals: Vec<f64>,
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population standard deviation; zero for fewer than two values.
pub fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64).sqrt()
}

fn max_of(xs: &[f64]) -> f64 {
    // NaN propagates so that a broken evaluation cannot pass
    xs.iter()
        .copied()
        .fold(0.0, |a, b| if a.is_nan() || b.is_nan() { f64::NAN } else { a.max(b) })
}

fn passes(score: f64, tol: f64) -> bool {
    score.is_finite() && score < tol
}

impl ConditionReport {
    /// Report scored by the largest residual.
    pub fn from_residuals(
        id: impl Into<String>,
        description: impl Into<String>,
        residuals: Vec<f64>,
        tol: f64,
        samples: &SampleSet,
    ) -> Self {
        let max = max_of(&residuals);
        ConditionReport {
            id: id.into(),
            description: description.into(),
            tol,
            pass: passes(max, tol),
            score: max,
            score_kind: ScoreKind::Max,
            max,
            mean: mean(&residuals),
            seed: samples.seed,
            count: residuals.len(),
            measured: BTreeMap::new(),
            residuals,
        }
    }

    /// Report on the constancy of `values`: residuals are deviations from the
    /// sample mean and the score is the standard deviation.
    pub fn from_constancy(
        id: impl Into<String>,
        description: impl Into<String>,
        values: &[f64],
        tol: f64,
        samples: &SampleSet,
    ) -> Self {
        let m = mean(values);
        let residuals = values.iter().map(|v| (v - m).abs()).collect();
        let mut r = Self::from_residuals(id, description, residuals, tol, samples);
        r.measured.insert("value_mean".into(), m);
        r.with_score(std_dev(values), ScoreKind::StdDev)
    }

    pub fn with_score(mut self, score: f64, kind: ScoreKind) -> Self {
        self.score = score;
        self.score_kind = kind;
        self.pass = passes(score, self.tol);
        self
    }

    pub fn with_measured(mut self, key: impl Into<String>, value: f64) -> Self {
        self.measured.insert(key.into(), value);
        self
    }

    /// Overrides the pass flag, e.g. for conditions that are logical outcomes.
    pub fn with_pass(mut self, pass: bool) -> Self {
        self.pass = pass;
        self
    }
}

/// A whole run: configuration echo plus every condition in suite order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub target: String,
    pub seed: u64,
    pub points: usize,
    pub order: usize,
    pub suites: Vec<SuiteReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub tol: f64,
    pub pass: bool,
    pub conditions: Vec<ConditionReport>,
    /// Free-form labelled outcomes such as a classification label.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub labels: BTreeMap<String, String>,
}

impl SuiteReport {
    pub fn new(suite: impl Into<String>, tol: f64, conditions: Vec<ConditionReport>) -> Self {
        let pass = conditions.iter().all(|c| c.pass);
        SuiteReport {
            suite: suite.into(),
            tol,
            pass,
            conditions,
            labels: BTreeMap::new(),
        }
    }
}

impl RunReport {
    pub fn pass(&self) -> bool {
        self.suites.iter().all(|s| s.pass)
    }
}

/// JSON formatter writing every float as `{:.16e}` so reports are
/// byte-identical across runs and platforms.
#[derive(Debug, Default)]
struct FixedFloatFormatter {
    inner: serde_json::ser::PrettyFormatter<'static>,
}

macro_rules! delegate {
    ($($name:ident($($arg:ident: $ty:ty),*)),* $(,)?) => {
        $(
            fn $name<W: ?Sized + io::Write>(&mut self, w: &mut W $(, $arg: $ty)*) -> io::Result<()> {
                self.inner.$name(w $(, $arg)*)
            }
        )*
    };
}

impl serde_json::ser::Formatter for FixedFloatFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        // serde_json emits non-finite values as `null` before reaching here
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    delegate!(
        begin_array(),
        end_array(),
        begin_array_value(first: bool),
        end_array_value(),
        begin_object(),
        end_object(),
        begin_object_key(first: bool),
        begin_object_value(),
        end_object_value(),
    );
}

pub fn to_json(report: &RunReport) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedFloatFormatter::default());
    report.serialize(&mut ser).expect("report serializes");
    out.push(b'\n');
    String::from_utf8(out).expect("JSON is UTF-8")
}

/// One row per condition.
pub fn to_csv(report: &RunReport) -> String {
    let mut out = String::from("suite,condition,pass,score,score_kind,tol,max,mean,count,seed\n");
    for s in &report.suites {
        for c in &s.conditions {
            let kind = match c.score_kind {
                ScoreKind::Max => "max",
                ScoreKind::StdDev => "std_dev",
                ScoreKind::Combined => "combined",
            };
            let _ = writeln!(
                out,
                "{},{},{},{:.16e},{},{:.16e},{:.16e},{:.16e},{},{}",
                s.suite, c.id, c.pass, c.score, kind, c.tol, c.max, c.mean, c.count, c.seed
            );
        }
    }
    out
}

pub fn to_text(report: &RunReport) -> String {
    let mut out = format!(
        "target {}  points {}  seed {}  order {}\n",
        report.target, report.points, report.seed, report.order
    );
    for s in &report.suites {
        let _ = writeln!(out, "\n[{}] {} (tol {:e})", s.suite, verdict(s.pass), s.tol);
        for (k, v) in &s.labels {
            let _ = writeln!(out, "  {k}: {v}");
        }
        for c in &s.conditions {
            let _ = writeln!(
                out,
                "  {:4}  {:<28} {:.3e}  {}",
                verdict(c.pass),
                c.id,
                c.score,
                c.description
            );
        }
    }
    let _ = writeln!(out, "\noverall: {}", verdict(report.pass()));
    out
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}
