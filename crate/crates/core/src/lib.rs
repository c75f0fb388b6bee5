#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN
//! Numerical laboratory for variances of Hecke eigenvalues and of the
//! divisor function in arithmetic progressions.

pub mod arith;
pub mod cache;
pub mod checks;
pub mod error;
pub mod forms;
pub mod specfun;
pub mod shifted;
pub mod variance;
pub mod voronoi;

pub use arith::ArithTables;
pub use error::{Error, Result};
pub use forms::HeckeTable;
pub use specfun::{MellinLine, OmegaKind, SmoothWeight};
pub use shifted::{Coefficients, KernelPair, MoebiusPrefix, OffDiagKind};
pub use variance::{Regime, VarianceReport};
pub use voronoi::{Sequence, VoronoiReport};
