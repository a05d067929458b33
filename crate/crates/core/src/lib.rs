//! Numerical laboratory for free-boundary surface geometry in warped
//! half de Sitter-Schwarzschild backgrounds: profile ODE, ambient curvature,
//! discrete graph surfaces, quasi-local mass functionals, Robin-boundary
//! stability spectra, variation formulas and CMC free-boundary foliations.

pub mod ambient;
pub mod cmc;
pub mod error;
pub mod flow;
pub mod grid;
pub mod linalg;
pub mod mass;
pub mod profile;
pub mod report;
pub mod rng;
pub mod scalar;
pub mod spectral;
pub mod surface;
pub mod variation;

pub use error::{Error, Result};
pub use scalar::{fl, Scalar};

/// Working precision used by the CLI and the verification suites.
pub type Real = f64;

pub type RealProfile = profile::Profile<Real>;
pub type RealAmbient = ambient::AmbientMetric<Real>;
pub type RealGrid = grid::HemisphereGrid<Real>;
pub type RealSurface<'a> = surface::GraphSurface<'a, Real>;
pub type RealGeometry = surface::SurfaceGeometry<Real>;
