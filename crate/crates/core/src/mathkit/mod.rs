//! Numerical building blocks shared by every other module.
//!
//! Chi-square variables follow the communications convention throughout:
//! a "χ²₂ₛ" draw is a unit-scale gamma variable with shape `s`, so its mean is
//! `s`, not `2s`.

mod linalg;
pub mod quad;
mod random;
mod special;
pub mod stats;

pub use linalg::{hermitian_solve, nullspace_project, Cholesky, ComplexVec, HermitianMat};
pub use num_complex::Complex64;
pub use random::{sample_channel, sample_chi2, sample_complex_normal, StreamFactory};
pub use special::{
    chi2_moment, chi2_variance, digamma, gamma_cdf, gamma_ratio, gamma_ratio_tail_sum, hurwitz_zeta,
    ln_gamma, ln_gamma_ratio, power_series_tail, EULER_GAMMA,
};
