//! Numerical kernels: complex values, dense eigenvalues, Lambert W.

mod eigen;
mod lambert;

pub use eigen::{eigenvalues, EigenResult};
pub use lambert::{lambert_w, lambert_w0_real, RESIDUAL_TOL};

/// Complex scalar used throughout the analysis surface.
pub type Complex = num_complex::Complex64;
