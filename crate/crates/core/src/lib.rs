//! Numerical verification toolkit for resolutions of identity built from
//! biorthogonal eigenfunction systems of two exactly solvable one-dimensional
//! Schroedinger operators with complex-shifted potentials.
//!
//! The first model (`models::EdgeModel`) carries a spectral singularity at the
//! edge of its continuous spectrum (k = 0); the second (`models::InnerModel`)
//! carries a pair of singular points inside the continuous spectrum
//! (k = +alpha and k = -alpha).  For both models the completeness relation is
//! realized as a limit of deformed contour integrals over products of
//! eigenfunctions, and this crate checks the pieces of that story numerically:
//!
//! * `testspace` - smooth test functions with weighted-L2 growth control,
//!   window functions, and cutoff splittings;
//! * `models` - eigenfunction evaluation (exact rational-coefficient plane
//!   waves for the edge model, trigonometric/rational closed forms for the
//!   inner model) with independent recursion cross-checks;
//! * `contours` - deformed integration paths in the complex wavenumber plane
//!   and adaptive quadrature along them;
//! * `kernels` - closed-form kernel decompositions (boundary, sinc, cosine and
//!   log-band terms) against direct contour quadrature;
//! * `limits` - convergence probes: delta-family limits, slow-growth limits,
//!   vanishing families, boundary weak limits, and functionals supported at
//!   infinity;
//! * `verify` - the named check catalog and suite runner;
//! * `cli` - configuration and the command-line front end.
//!
//! Everything is computed in double precision with `num_complex::Complex64`.

pub mod quad;
pub mod ser;
pub mod special;
pub mod testspace;
pub mod models;
pub mod contours;
pub mod kernels;
pub mod limits;
pub mod verify;
pub mod cli;

pub use num_complex::Complex64;

/// The imaginary unit, used pervasively.
pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

/// 1/sqrt(2 pi), the plane-wave normalization.
pub(crate) const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
