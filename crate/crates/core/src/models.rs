//! Built-in model manifolds: the sphere, the cylinder and the Heisenberg group.
//!
//! Each model ships a chart (domain box, raw `T¹⁰` generator and contact form)
//! and, for the two hypersurfaces of `ℂ² ≅ ℝ⁴`, the inclusion as an immersion
//! with coordinates ordered `(Re z, Im z, Re w, Im w)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::ChartSpec;
use crate::immersion::ImmersionMap;
use crate::sampling::Domain;

/// `|z|² + |w|²` on the model sphere.
pub const SPHERE_RADIUS_SQ: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelName {
    Sphere,
    Cylinder,
    Heisenberg,
}

impl ModelName {
    pub const ALL: [ModelName; 3] = [ModelName::Sphere, ModelName::Cylinder, ModelName::Heisenberg];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelName::Sphere => "sphere",
            ModelName::Cylinder => "cylinder",
            ModelName::Heisenberg => "heisenberg",
        }
    }
}

impl fmt::Display for ModelName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sphere" => Ok(ModelName::Sphere),
            "cylinder" => Ok(ModelName::Cylinder),
            "heisenberg" => Ok(ModelName::Heisenberg),
            _ => Err(Error::UnknownModel(s.to_string())),
        }
    }
}

/// Which of the two sphere charts to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SphereChart {
    /// `z = u1 + i u2`, `w = R e^{i u3}`; misses `w = 0`.
    #[default]
    A,
    /// The same with `z` and `w` exchanged; misses `z = 0`.
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CylinderGauge {
    /// Frame with `b = c = i/2`.
    #[default]
    Fixed,
    /// `e^{i u2}` times the fixed frame; `c = (i/2) e^{-2i u2}`.
    Pre,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ModelParams {
    pub sphere_chart: SphereChart,
    pub cylinder_gauge: CylinderGauge,
    /// Overrides the default domain box.
    pub domain: Option<Domain>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelDescriptor {
    pub name: ModelName,
    pub chart: ChartSpec,
    pub embedding: Option<ImmersionMap>,
    pub notes: &'static str,
}

const SPHERE_NOTES: &str = "\
Sphere |z|^2 + |w|^2 = 4 in C^2 (radius 2 in R^4). Chart A uses u1 + i u2 = z and \
w = R e^{i u3} with R = sqrt(4 - u1^2 - u2^2). The contact form is one half of the \
restriction of x dy - y dx over both complex coordinates, \
theta = (u1 du2 - u2 du1 + R^2 du3)/2. Z_raw is the pullback of the tangential \
field conj(w) d/dz - conj(z) d/dw: (R e^{-i u3}/2, -i R e^{-i u3}/2, \
i (u1 - i u2) e^{-i u3} / (2R)). Then L(Z_raw, Z_raw) = 2, the Reeb field is the \
Hopf field, a = 0, b = i, c = 0, and the inclusion is isometric for the Webster \
metric. Chart B exchanges z and w; its Z_raw is minus the same tangential field, \
a gauge change by v = pi.";

const CYLINDER_NOTES: &str = "\
Cylinder (Re z)^2 + (Re w)^2 = 1 with complex structure J e1 = e2, J e3 = e4. \
Coordinates (s, y1, y3) give z = cos s + i y1, w = sin s + i y3. Z_raw = -2 times \
the tangential field sin(s) d/dz - cos(s) d/dw, i.e. (1, i sin s, -i cos s). \
theta = cos(s) dy1 + sin(s) dy3. Then L(Z_raw, Z_raw) = 2, T = cos(s) d/dy1 + \
sin(s) d/dy3, a = 0 and b = c = i/2. The pre-gauge frame multiplies Z by e^{i y1}; \
the gauge v = y1 restores b = c = i/2.";

const HEISENBERG_NOTES: &str = "\
Heisenberg group in coordinates (x, y, t): theta = dt + 2(x dy - y dx) and \
Z_raw = d/dz + i conj(z) d/dt = (1/2, -i/2, i (x - i y)). L(Z_raw, Z_raw) = 2, \
T = d/dt and a = b = c = 0. No embedding is provided.";

fn sphere_chart(domain: Domain, which: SphereChart) -> Result<(ChartSpec, ImmersionMap)> {
    for p in domain.corners() {
        let r2 = p[0] * p[0] + p[1] * p[1];
        if r2 >= SPHERE_RADIUS_SQ {
            return Err(Error::DomainOutOfChart(format!(
                "u1^2 + u2^2 = {r2} reaches the radius squared {SPHERE_RADIUS_SQ}"
            )));
        }
    }
    let r = "sqrt(4 - u1^2 - u2^2)";
    let z = [
        format!("{r}*exp(-i*u3)/2"),
        format!("-i*{r}*exp(-i*u3)/2"),
        format!("i*(u1 - i*u2)*exp(-i*u3)/(2*{r})"),
    ];
    let theta = ["-u2/2", "u1/2", "(4 - u1^2 - u2^2)/2"];
    let name = match which {
        SphereChart::A => "sphere (chart A)",
        SphereChart::B => "sphere (chart B)",
    };
    let chart = ChartSpec::from_sources(name, domain, [&z[0], &z[1], &z[2]], theta)?;
    let polar = [format!("{r}*cos(u3)"), format!("{r}*sin(u3)")];
    let components = match which {
        SphereChart::A => ["u1".to_string(), "u2".to_string(), polar[0].clone(), polar[1].clone()],
        SphereChart::B => [polar[0].clone(), polar[1].clone(), "u1".to_string(), "u2".to_string()],
    };
    Ok((chart, ImmersionMap::from_sources(&components)?))
}

fn cylinder_chart(domain: Domain, gauge: CylinderGauge) -> Result<(ChartSpec, ImmersionMap)> {
    let fixed = ["1", "i*sin(u1)", "-i*cos(u1)"];
    let theta = ["0", "cos(u1)", "sin(u1)"];
    let chart = match gauge {
        CylinderGauge::Fixed => ChartSpec::from_sources("cylinder", domain, fixed, theta)?,
        CylinderGauge::Pre => {
            let z = fixed.map(|s| format!("exp(i*u2)*{s}"));
            ChartSpec::from_sources("cylinder (pre-gauge)", domain, [&z[0], &z[1], &z[2]], theta)?
        }
    };
    let embedding = ImmersionMap::from_sources(&["cos(u1)", "u2", "sin(u1)", "u3"])?;
    Ok((chart, embedding))
}

fn heisenberg_chart(domain: Domain) -> Result<ChartSpec> {
    ChartSpec::from_sources(
        "heisenberg",
        domain,
        ["1/2", "-i/2", "i*(u1 - i*u2)"],
        ["-2*u2", "2*u1", "1"],
    )
}

pub fn default_domain(name: ModelName) -> Domain {
    match name {
        ModelName::Sphere => Domain::new([-1.2, -1.2, -3.0], [1.2, 1.2, 3.0]),
        ModelName::Cylinder => Domain::new([-3.0, -2.0, -2.0], [3.0, 2.0, 2.0]),
        ModelName::Heisenberg => Domain::cube(1.0),
    }
}

pub fn model(name: ModelName, params: &ModelParams) -> Result<ModelDescriptor> {
    let domain = params.domain.unwrap_or_else(|| default_domain(name));
    if !domain.is_valid() {
        return Err(Error::DomainOutOfChart(format!("invalid box {domain:?}")));
    }
    let (chart, embedding, notes) = match name {
        ModelName::Sphere => {
            let (c, e) = sphere_chart(domain, params.sphere_chart)?;
            (c, Some(e), SPHERE_NOTES)
        }
        ModelName::Cylinder => {
            let (c, e) = cylinder_chart(domain, params.cylinder_gauge)?;
            (c, Some(e), CYLINDER_NOTES)
        }
        ModelName::Heisenberg => (heisenberg_chart(domain)?, None, HEISENBERG_NOTES),
    };
    Ok(ModelDescriptor {
        name,
        chart,
        embedding,
        notes,
    })
}

/// Looks a model up by name with default parameters.
pub fn model_by_name(name: &str) -> Result<ModelDescriptor> {
    model(name.parse()?, &ModelParams::default())
}

/// Chart B coordinates of a sphere point given in chart A coordinates.
pub fn sphere_a_to_b(p: [f64; 3]) -> [f64; 3] {
    let r = (SPHERE_RADIUS_SQ - p[0] * p[0] - p[1] * p[1]).sqrt();
    [r * p[2].cos(), r * p[2].sin(), p[1].atan2(p[0])]
}
