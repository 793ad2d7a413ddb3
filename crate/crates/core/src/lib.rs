pub mod chartfile;
pub mod error;
pub mod expr;
pub mod frame;
pub mod fuzz;
pub mod glcomplex;
pub mod immersion;
pub mod jet;
pub mod models;
pub mod report;
pub mod runner;
pub mod sampling;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{Cplx, Real};

pub type Jet64 = jet::Jet<f64>;
pub type Jet32 = jet::Jet<f32>;
pub type Frame64 = frame::FrameData<f64>;
pub type Frame32 = frame::FrameData<f32>;
