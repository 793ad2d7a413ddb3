//! Candidate immersions `f: M → ℝⁿ` and their verifiers.

mod checks;
mod map;
mod shape;

pub use checks::{
    bilinear, harmonicity_chain, hermitian, integrability_check, isometry_check, isotropy_check, norm2,
    pluriharmonic_check, values, weierstrass_check, HarmonicityChain, Immersion, PointJets, DEFAULT_ORDER,
};
pub use map::ImmersionMap;
pub use shape::{
    classify, cylinder_gauge_residual, cylinder_identities, second_fundamental_form, shape_spectrum, sphere_constants,
    symmetric_eigenvalues, Classification, Shape, ShapeSpectrum, NOISE_FLOOR, PREREQ_TOL,
};
