use crate::error::{Error, Result};
use crate::expr::{self, Expr};
use crate::jet::Jet;
use crate::scalar::Real;

/// A candidate map `f: chart → ℝⁿ` given by real component expressions.
#[derive(Debug, Clone, PartialEq)]
pub struct ImmersionMap {
    pub components: Vec<Expr>,
}

impl ImmersionMap {
    pub fn new(components: Vec<Expr>) -> Self {
        ImmersionMap { components }
    }

    pub fn from_sources<T: AsRef<str>>(sources: &[T]) -> Result<Self> {
        let components = sources
            .iter()
            .enumerate()
            .map(|(k, src)| {
                expr::parse(src.as_ref()).map_err(|source| Error::Expr {
                    field: format!("immersion.components[{k}]"),
                    source,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ImmersionMap { components })
    }

    /// Target dimension `n`.
    pub fn dim(&self) -> usize {
        self.components.len()
    }

    /// Multiplies every component by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        ImmersionMap::new(self.components.iter().map(|e| Expr::real(s).mul(e.clone())).collect())
    }

    /// Component jets at `point`. Components must be real at the point.
    pub fn eval<S: Real>(&self, point: [S; 3], order: usize, tol: f64) -> Result<Vec<Jet<S>>> {
        self.components
            .iter()
            .enumerate()
            .map(|(component, e)| {
                let j = e.eval(point, order)?;
                let imag = j.value().im.to_f64_lossy().abs();
                if imag > tol {
                    return Err(Error::NonRealImmersion { component, imag });
                }
                Ok(j.re())
            })
            .collect()
    }
}
