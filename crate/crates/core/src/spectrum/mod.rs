//! Bound-state energies by closed form, by the small-argument transcendental
//! condition, and by exact matching of the `K` log-derivative at the core.
//!
//! The core shell enters only through the Robin constant
//! `c = a Phi'(a) / Phi(a)`. Two readings of that constant are kept side by
//! side (see [`Convention`]); the exact matching in [`exact`] is what
//! decides between them.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cone::{Channel, ConeParams, Coupling, ModelError};
use crate::special::SpecialFnError;

pub mod closed_form;
pub mod exact;
pub mod report;

pub use closed_form::{
    closed_form_anticone, closed_form_cone_ground, cot_residual, dirichlet_tower, solve_cot_condition,
    AntiConeOutcome,
};
pub use exact::{real_order_root_exists, solve_exact, tower_branch, ExactOptions};
pub use report::{
    full_spectrum, Adjudication, Candidate, ChannelReport, Deviation, OracleOptions, SpectrumOptions, SpectrumReport,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectrumError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Special(#[from] SpecialFnError),
    #[error("operation needs {expected}, got alpha = {alpha}, l = {l}")]
    WrongChannel { expected: &'static str, alpha: f64, l: i64 },
    #[error("invalid option {name} = {value}")]
    InvalidOption { name: &'static str, value: f64 },
    #[error("could not isolate a sign change of the matching function in [{lo}, {hi}] ({points} grid points)")]
    BracketFailure { lo: f64, hi: f64, points: usize },
}

/// How the ν² term enters the Robin constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// `c = lambda (1 - alpha) / alpha - nu^2 / 2` with the signed `nu^2`,
    /// as obtained by integrating the radial equation across the shell.
    Integral,
    /// `c = lambda (1 - alpha) / alpha - |nu^2| / 2`, the reading under which
    /// the printed cone closed form follows from the cot condition.
    Literal,
}

impl Convention {
    pub fn as_str(&self) -> &'static str {
        match self {
            Convention::Integral => "integral",
            Convention::Literal => "literal",
        }
    }
}

impl std::fmt::Display for Convention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Convention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "integral" => Ok(Convention::Integral),
            "literal" => Ok(Convention::Literal),
            other => Err(format!("unknown convention '{other}' (expected integral|literal)")),
        }
    }
}

/// Dimensionless matching constant `a Phi'(a) / Phi(a)`; `+inf` in the
/// Dirichlet limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobinConstant {
    pub value: f64,
    pub convention: Convention,
}

impl RobinConstant {
    pub fn boundary(&self) -> BoundaryCondition {
        if self.value.is_finite() {
            BoundaryCondition::Robin(self.value)
        } else {
            BoundaryCondition::Dirichlet
        }
    }
}

pub fn robin_constant(params: &ConeParams, channel: &Channel, convention: Convention) -> RobinConstant {
    let value = match params.coupling() {
        Coupling::Dirichlet => f64::INFINITY,
        Coupling::Finite(lambda) => {
            let shell = lambda * params.shell_factor();
            match convention {
                Convention::Integral => shell - 0.5 * channel.nu_squared,
                Convention::Literal => shell - 0.5 * channel.nu_squared.abs(),
            }
        }
    };
    RobinConstant { value, convention }
}

/// Condition imposed on the radial function at the core radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryCondition {
    /// `a Phi'(a) = c Phi(a)`.
    Robin(f64),
    /// `Phi(a) = 0`.
    Dirichlet,
}

impl BoundaryCondition {
    /// `c`, or `+inf` for Dirichlet.
    pub fn constant(&self) -> f64 {
        match self {
            BoundaryCondition::Robin(c) => *c,
            BoundaryCondition::Dirichlet => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Ground state of the cone channel from the inverted cot condition.
    ClosedFormCone,
    /// Tower of the cone channel with `Phi(a) = 0`.
    ClosedFormDirichlet,
    /// Anti-cone shell-bound state from the real-order two-term expansion.
    #[serde(rename = "closed_form_anticone")]
    ClosedFormAntiCone,
    CotCondition,
    ExactBessel,
    RadialFd,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ClosedFormCone => "closed_form_cone",
            Method::ClosedFormDirichlet => "closed_form_dirichlet",
            Method::ClosedFormAntiCone => "closed_form_anticone",
            Method::CotCondition => "cot_condition",
            Method::ExactBessel => "exact_bessel",
            Method::RadialFd => "radial_fd",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One bound state. `epsilon = |E| M a^2 / (2 hbar^2)` and `kappa = k a = 2 sqrt(epsilon)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundState {
    pub l: i64,
    /// Tower index; 0 for the single real-order state.
    pub branch: u32,
    pub epsilon: f64,
    pub kappa: f64,
    pub method: Method,
    /// Size of the defining equation's mismatch, expressed as the step in
    /// `ln kappa` that would remove it (for the finite-difference oracle:
    /// the Richardson error estimate relative to `epsilon`).
    pub residual: f64,
}

impl BoundState {
    pub fn from_kappa(l: i64, branch: u32, kappa: f64, method: Method, residual: f64) -> Self {
        Self {
            l,
            branch,
            epsilon: 0.25 * kappa * kappa,
            kappa,
            method,
            residual,
        }
    }

    pub fn from_epsilon(l: i64, branch: u32, epsilon: f64, method: Method, residual: f64) -> Self {
        Self {
            l,
            branch,
            epsilon,
            kappa: 2.0 * epsilon.sqrt(),
            method,
            residual,
        }
    }

    /// Physical energy for core radius `a`, with `hbar = M = 1`.
    pub fn energy(&self, core_radius: f64) -> f64 {
        crate::cone::physical_energy(self.epsilon, core_radius, 1.0, 1.0)
    }
}

/// `|a - b| / |b|`.
pub fn relative_deviation(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// `cot^-1` on the principal branch `(0, pi)`.
pub fn acot(y: f64) -> f64 {
    std::f64::consts::FRAC_PI_2 - y.atan()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn robin_constant_examples() {
        let p = ConeParams::unit(0.5).unwrap();
        let ch = p.channel(0).unwrap();
        assert_eq!(robin_constant(&p, &ch, Convention::Integral).value, 1.375);
        assert_eq!(robin_constant(&p, &ch, Convention::Literal).value, 0.625);
    }

    #[test]
    fn robin_constant_conventions_coincide_for_real_order() {
        let p = ConeParams::unit(2.0).unwrap();
        let ch = p.channel(1).unwrap();
        let a = robin_constant(&p, &ch, Convention::Integral).value;
        let b = robin_constant(&p, &ch, Convention::Literal).value;
        assert_eq!(a, b);
        assert_eq!(a, -0.71875);
    }

    #[test]
    fn robin_constant_vanishes_in_flat_limit() {
        for alpha in [0.999_999, 1.000_001] {
            let p = ConeParams::unit(alpha).unwrap();
            let ch = p.channel(0).unwrap();
            for conv in [Convention::Integral, Convention::Literal] {
                assert!(robin_constant(&p, &ch, conv).value.abs() < 1e-5);
            }
        }
    }

    #[test]
    fn dirichlet_coupling_gives_infinite_constant() {
        let p = ConeParams::new(0.5, 1.0, Coupling::Dirichlet).unwrap();
        let rc = robin_constant(&p, &p.channel(0).unwrap(), Convention::Integral);
        assert_eq!(rc.boundary(), BoundaryCondition::Dirichlet);
    }

    #[test]
    fn kappa_and_epsilon_round_trip() {
        let s = BoundState::from_kappa(0, 1, 0.3, Method::ExactBessel, 0.0);
        assert!((s.epsilon - 0.0225).abs() < 1e-17);
        let t = BoundState::from_epsilon(0, 1, s.epsilon, Method::ExactBessel, 0.0);
        assert!((t.kappa - 0.3).abs() < 1e-15);
        assert_eq!(s.energy(2.0), -2.0 * 0.0225 / 4.0);
    }

    #[test]
    fn method_names_match_serde() {
        for m in [
            Method::ClosedFormCone,
            Method::ClosedFormDirichlet,
            Method::ClosedFormAntiCone,
            Method::CotCondition,
            Method::ExactBessel,
            Method::RadialFd,
        ] {
            let json = serde_json::to_string(&m).unwrap();
            assert_eq!(json, format!("\"{}\"", m.as_str()));
        }
    }
}
