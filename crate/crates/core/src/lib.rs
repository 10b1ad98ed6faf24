//! Exact socle intersection numbers on moduli spaces of curves, and
//! machine checks of the necklace relation that reproduces them.
//!
//! Modules, bottom up:
//! - [`exact`]: rationals, Bernoulli numbers, factorials, divisor sums
//! - [`qseries`]: truncated q-series, Eisenstein series, `q d/dq`
//! - [`modfit`]: polynomials in `G2, G4, G6` and fitting series against them
//! - [`elliptic`]: the propagator, the shifted Weierstrass expansion, necklace series
//! - [`drcycle`]: DR-cycle integrals with `lambda_g` and psi powers
//! - [`socle`]: the closed socle formula, wheels, and the necklace path
//! - [`verify`]: named verification suites with serializable reports

pub mod drcycle;
pub mod elliptic;
mod error;
pub mod exact;
pub mod linalg;
pub mod modfit;
pub mod qseries;
pub mod socle;
pub mod verify;

pub use error::{Error, Result};
pub use exact::Scalar;
pub use modfit::QuasimodularPoly;
pub use qseries::QSeries;
pub use socle::{Method, SocleQuery, Wheel};
