//! Special functions and transforms: quadrature, Γ and ζ, Bessel functions,
//! the smooth weight, Mellin machinery and the ω transforms.

pub mod bessel;
pub mod gamma;
pub mod kernels;
pub mod mellin;
pub mod omega;
pub mod quad;
pub mod weight;

pub use bessel::{bessel, BesselKind};
pub use gamma::{digamma, euler_gamma, ln_gamma as log_gamma_complex, zeta};
pub use kernels::{gamma_quotient, GammaQuotient};
pub use mellin::{mellin_barnes_check, mellin_psi, parseval_contour, IdentityCheck, MellinLine};
pub use omega::{omega_direct, omega_mellin, OmegaContour, OmegaKind, OmegaTable};
pub use weight::SmoothWeight;
