//! Bound states of a quantum particle on a cone with a regularized apex.
//!
//! The apex is replaced by a small cap of radius `a`; everything the cap
//! does to the outer region is folded into one Robin constant at `rho = a`.
//! From there the spectrum follows by closed form, by the small-argument
//! matching condition, by exact matching of `K_nu`, or by a finite-difference
//! solve of the radial equation. [`verify`] cross-checks all of them.

pub mod quadrature;
pub mod special;
pub mod cone;
pub mod radial;
pub mod roots;
pub mod spectrum;
pub mod discrepancy;
pub mod verify;

pub use cone::{classify, nu_squared, Channel, ConeParams, Coupling, ModelError, Regime};
pub use radial::{GridSpec, OracleError, Spacing};
pub use special::{ExpansionForm, SpecialFnError};
pub use spectrum::{
    full_spectrum, BoundState, BoundaryCondition, Convention, ExactOptions, Method, OracleOptions, SpectrumError,
    SpectrumOptions, SpectrumReport,
};
