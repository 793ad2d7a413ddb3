//! TOML chart files.
//!
//! ```toml
//! name = "heisenberg"
//!
//! [domain]
//! u1 = [-1.0, 1.0]
//! u2 = [-1.0, 1.0]
//! u3 = [-1.0, 1.0]
//!
//! [Z]            # raw generator of T¹⁰, normalized automatically
//! u1 = "1/2"
//! u2 = "-i/2"
//! u3 = "i*(u1 - i*u2)"
//!
//! [theta]        # contact form θ = Σ θ_k du_k
//! u1 = "-2*u2"
//! u2 = "2*u1"
//! u3 = "1"
//!
//! [immersion]    # optional, real components of f: M → ℝⁿ
//! components = ["u1", "u2", "u3"]
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::ChartSpec;
use crate::immersion::ImmersionMap;
use crate::sampling::Domain;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DomainTable {
    u1: [f64; 2],
    u2: [f64; 2],
    u3: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Triple {
    u1: String,
    u2: String,
    u3: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ImmersionTable {
    components: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChartFile {
    name: String,
    domain: DomainTable,
    #[serde(rename = "Z")]
    z: Triple,
    theta: Triple,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    immersion: Option<ImmersionTable>,
}

/// A chart read from a file, with its optional immersion.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedChart {
    pub chart: ChartSpec,
    pub embedding: Option<ImmersionMap>,
}

/// Parses chart-file text. Expression errors name the offending key.
pub fn parse_chart(text: &str) -> Result<LoadedChart> {
    let file: ChartFile = toml::from_str(text).map_err(|e| Error::ChartParse {
        field: "toml".into(),
        message: e.to_string().trim_end().to_string(),
    })?;
    let d = &file.domain;
    let domain = Domain::new([d.u1[0], d.u2[0], d.u3[0]], [d.u1[1], d.u2[1], d.u3[1]]);
    for (k, axis) in [d.u1, d.u2, d.u3].iter().enumerate() {
        if !(axis[0].is_finite() && axis[1].is_finite() && axis[0] < axis[1]) {
            return Err(Error::ChartParse {
                field: format!("domain.u{}", k + 1),
                message: format!("expected [lo, hi] with lo < hi, got {axis:?}"),
            });
        }
    }
    let chart = ChartSpec::from_sources(
        file.name,
        domain,
        [&file.z.u1, &file.z.u2, &file.z.u3],
        [&file.theta.u1, &file.theta.u2, &file.theta.u3],
    )?;
    let embedding = match file.immersion {
        Some(t) if t.components.is_empty() => {
            return Err(Error::ChartParse {
                field: "immersion.components".into(),
                message: "needs at least one component".into(),
            })
        }
        Some(t) => Some(ImmersionMap::from_sources(&t.components)?),
        None => None,
    };
    Ok(LoadedChart { chart, embedding })
}

pub fn load_chart(path: &std::path::Path) -> Result<LoadedChart> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::ChartParse {
        field: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_chart(&text)
}

/// Writes a chart in the file format; `parse_chart` reads it back unchanged.
pub fn chart_to_toml(chart: &ChartSpec, embedding: Option<&ImmersionMap>) -> String {
    let triple = |e: &[crate::expr::Expr; 3]| Triple {
        u1: e[0].to_string(),
        u2: e[1].to_string(),
        u3: e[2].to_string(),
    };
    let d = &chart.domain;
    let file = ChartFile {
        name: chart.name.clone(),
        domain: DomainTable {
            u1: [d.lo[0], d.hi[0]],
            u2: [d.lo[1], d.hi[1]],
            u3: [d.lo[2], d.hi[2]],
        },
        z: triple(&chart.z),
        theta: triple(&chart.theta),
        immersion: embedding.map(|m| ImmersionTable {
            components: m.components.iter().map(ToString::to_string).collect(),
        }),
    };
    toml::to_string(&file).expect("chart serializes")
}
