//! Cone and anti-cone geometry: curvatures, the effective inverse-square
//! channels and their regime classification.
//!
//! Natural units `hbar = M = 1` are used throughout. Energies are reported
//! as the dimensionless `epsilon = |E| M a^2 / (2 hbar^2)`; see
//! [`physical_energy`] for the way back.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::special::{BesselOrder, SpecialFnError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("alpha must be positive and finite, got {0}")]
    InvalidAlpha(f64),
    #[error("alpha = 1 is the flat plane and lies outside the model")]
    FlatSpace,
    #[error("this operation needs an anti-cone (alpha > 1), got alpha = {0}")]
    NotAntiCone(f64),
    #[error("core radius must be positive and finite, got {0}")]
    InvalidCoreRadius(f64),
    #[error("curvature coupling lambda must be >= 0 (or +inf), got {0}")]
    InvalidCoupling(f64),
    #[error("rho must be positive and finite, got {0}")]
    InvalidRadius(f64),
    #[error("channel alpha = {alpha}, l = {l} has nu^2 = 0")]
    ZeroOrder { alpha: f64, l: i64 },
}

/// Strength of the curvature shell at the core radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coupling {
    Finite(f64),
    /// Infinite barrier at the core: the wavefunction vanishes at `rho = a`.
    Dirichlet,
}

impl Coupling {
    /// Accepts `+inf` as the Dirichlet limit.
    pub fn from_lambda(lambda: f64) -> Result<Self, ModelError> {
        if lambda == f64::INFINITY {
            Ok(Coupling::Dirichlet)
        } else if lambda >= 0.0 && lambda.is_finite() {
            Ok(Coupling::Finite(lambda))
        } else {
            Err(ModelError::InvalidCoupling(lambda))
        }
    }

    pub fn lambda(&self) -> f64 {
        match self {
            Coupling::Finite(l) => *l,
            Coupling::Dirichlet => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeParams {
    alpha: f64,
    core_radius: f64,
    coupling: Coupling,
}

impl ConeParams {
    pub fn new(alpha: f64, core_radius: f64, coupling: Coupling) -> Result<Self, ModelError> {
        check_alpha(alpha)?;
        if !(core_radius > 0.0 && core_radius.is_finite()) {
            return Err(ModelError::InvalidCoreRadius(core_radius));
        }
        if let Coupling::Finite(l) = coupling {
            Coupling::from_lambda(l)?;
        }
        Ok(Self {
            alpha,
            core_radius,
            coupling,
        })
    }

    /// Unit core radius, `lambda = 1`.
    pub fn unit(alpha: f64) -> Result<Self, ModelError> {
        Self::new(alpha, 1.0, Coupling::Finite(1.0))
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn core_radius(&self) -> f64 {
        self.core_radius
    }

    pub fn coupling(&self) -> Coupling {
        self.coupling
    }

    pub fn with_core_radius(&self, core_radius: f64) -> Result<Self, ModelError> {
        Self::new(self.alpha, core_radius, self.coupling)
    }

    pub fn with_coupling(&self, coupling: Coupling) -> Result<Self, ModelError> {
        Self::new(self.alpha, self.core_radius, coupling)
    }

    pub fn is_cone(&self) -> bool {
        self.alpha < 1.0
    }

    pub fn is_anti_cone(&self) -> bool {
        self.alpha > 1.0
    }

    /// `(1 - alpha) / alpha`, the shell strength per unit coupling.
    pub fn shell_factor(&self) -> f64 {
        (1.0 - self.alpha) / self.alpha
    }

    pub fn channel(&self, l: i64) -> Result<Channel, ModelError> {
        Channel::new(self.alpha, l)
    }
}

fn check_alpha(alpha: f64) -> Result<f64, ModelError> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        Err(ModelError::InvalidAlpha(alpha))
    } else if alpha == 1.0 {
        Err(ModelError::FlatSpace)
    } else {
        Ok(alpha)
    }
}

/// Squared effective order of the angular channel `l`:
/// `l^2 / alpha^2 - (1 - alpha^2) / (4 alpha^2)`.
pub fn nu_squared(alpha: f64, l: i64) -> f64 {
    let a2 = alpha * alpha;
    let l2 = (l * l) as f64;
    l2 / a2 - (1.0 - a2) / (4.0 * a2)
}

/// One angular-momentum sector of the radial problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    pub l: i64,
    pub nu_squared: f64,
    pub order: BesselOrder,
}

impl Channel {
    pub fn new(alpha: f64, l: i64) -> Result<Self, ModelError> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(ModelError::InvalidAlpha(alpha));
        }
        let nu2 = nu_squared(alpha, l);
        if nu2 == 0.0 {
            return Err(ModelError::ZeroOrder { alpha, l });
        }
        let order = BesselOrder::from_squared(nu2).map_err(|_| ModelError::ZeroOrder { alpha, l })?;
        Ok(Self {
            l,
            nu_squared: nu2,
            order,
        })
    }

    /// Channel with a prescribed signed `nu^2`, detached from any geometry.
    pub fn from_nu_squared(l: i64, nu_squared: f64) -> Result<Self, SpecialFnError> {
        Ok(Self {
            l,
            nu_squared,
            order: BesselOrder::from_squared(nu_squared)?,
        })
    }

    /// `sqrt(|nu^2|)`.
    pub fn nu_abs(&self) -> f64 {
        self.order.magnitude()
    }

    pub fn is_imaginary(&self) -> bool {
        self.nu_squared < 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `nu^2 < 0`: attractive inverse-square channel with a log-periodic tower.
    BoundTowerChannel,
    /// Anti-cone with `0 < nu^2 < 1`: bound by the attractive curvature shell.
    BoundByDelta,
    /// Cone with `l != 0`: both contributions repulsive.
    Scattering,
    /// `nu^2 >= 1` on the anti-cone: no extension is needed, no bound state.
    EssentiallySelfAdjoint,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::BoundTowerChannel => "bound_tower",
            Regime::BoundByDelta => "bound_by_delta",
            Regime::Scattering => "scattering",
            Regime::EssentiallySelfAdjoint => "essentially_self_adjoint",
        }
    }

    pub fn supports_bound_states(&self) -> bool {
        matches!(self, Regime::BoundTowerChannel | Regime::BoundByDelta)
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn classify(alpha: f64, l: i64) -> Result<Regime, ModelError> {
    check_alpha(alpha)?;
    let nu2 = nu_squared(alpha, l);
    Ok(if nu2 < 0.0 {
        Regime::BoundTowerChannel
    } else if alpha < 1.0 {
        // l != 0 here; nu^2 > 1 for every such channel on the cone.
        Regime::Scattering
    } else if nu2 < 1.0 {
        Regime::BoundByDelta
    } else {
        Regime::EssentiallySelfAdjoint
    })
}

/// Largest `|l|` with `l^2 < (3 alpha^2 + 1) / 4`.
pub fn max_allowed_l(alpha: f64) -> Result<i64, ModelError> {
    if !(alpha > 1.0 && alpha.is_finite()) {
        return Err(ModelError::NotAntiCone(alpha));
    }
    let bound = (3.0 * alpha * alpha + 1.0) / 4.0;
    let mut l = bound.sqrt().floor() as i64;
    while (l * l) as f64 >= bound {
        l -= 1;
    }
    while (((l + 1) * (l + 1)) as f64) < bound {
        l += 1;
    }
    Ok(l)
}

/// Angular momenta of the anti-cone channels with `0 < nu^2 < 1`.
pub fn allowed_l_window(alpha: f64) -> Result<Vec<i64>, ModelError> {
    let m = max_allowed_l(alpha)?;
    Ok((-m..=m).collect())
}

/// Closed form of the anti-cone `alpha` at which the window first admits `|l| = l_max`.
pub fn window_threshold(l_max: u32) -> f64 {
    let l2 = f64::from(l_max * l_max);
    ((4.0 * l2 - 1.0) / 3.0).sqrt()
}

/// Locates by bisection the `alpha` in `(lo, hi)` where [`max_allowed_l`]
/// steps up. Requires exactly one step inside the bracket.
pub fn locate_window_jump(lo: f64, hi: f64, tol: f64) -> Result<f64, ModelError> {
    let below = max_allowed_l(lo)?;
    let above = max_allowed_l(hi)?;
    if above <= below {
        return Err(ModelError::NotAntiCone(hi));
    }
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if max_allowed_l(mid)? > below {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Curvatures {
    /// `H^2 = (1 - alpha^2) / (4 alpha^2 rho^2)`. Negative on the anti-cone,
    /// where `H` itself would be imaginary; only the square enters the
    /// Hamiltonian.
    pub mean_curvature_squared: f64,
    /// Coefficient `lambda (1 - alpha) / alpha` of the shell at the core;
    /// infinite in the Dirichlet limit.
    pub shell_coefficient: f64,
}

pub fn curvatures(params: &ConeParams, rho: f64) -> Result<Curvatures, ModelError> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(ModelError::InvalidRadius(rho));
    }
    let a2 = params.alpha * params.alpha;
    let shell_coefficient = match params.coupling {
        Coupling::Finite(l) => l * params.shell_factor(),
        Coupling::Dirichlet => f64::INFINITY,
    };
    Ok(Curvatures {
        mean_curvature_squared: (1.0 - a2) / (4.0 * a2 * rho * rho),
        shell_coefficient,
    })
}

/// `nu^2 / (2 rho^2)`: centripetal term plus the mean-curvature attraction.
pub fn effective_potential(channel: &Channel, rho: f64) -> Result<f64, ModelError> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(ModelError::InvalidRadius(rho));
    }
    Ok(channel.nu_squared / (2.0 * rho * rho))
}

/// `E = -(2 hbar^2 / (M a^2)) epsilon`.
pub fn physical_energy(epsilon: f64, core_radius: f64, mass: f64, hbar: f64) -> f64 {
    -2.0 * hbar * hbar * epsilon / (mass * core_radius * core_radius)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn nu_squared_examples() {
        assert_eq!(nu_squared(1.0, 0), 0.0);
        assert_eq!(nu_squared(0.5, 0), -0.75);
        assert_eq!(nu_squared(2.0, 1), 7.0 / 16.0);
        assert_eq!(nu_squared(2.0, 0), 3.0 / 16.0);
    }

    #[test]
    fn channel_rejects_zero_order() {
        assert!(matches!(Channel::new(1.0, 0), Err(ModelError::ZeroOrder { .. })));
        let c = Channel::new(0.5, 0).unwrap();
        assert!(c.is_imaginary());
        assert!((c.nu_abs() - 3.0_f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn curvature_examples() {
        let flat_ish = curvatures(&ConeParams::unit(0.5).unwrap(), 1.0).unwrap();
        assert!((flat_ish.mean_curvature_squared - 0.75).abs() < 1e-15);
        assert!((flat_ish.shell_coefficient - 1.0).abs() < 1e-15);

        let anti = curvatures(&ConeParams::unit(2.0).unwrap(), 1.0).unwrap();
        assert!((anti.shell_coefficient + 0.5).abs() < 1e-15);
        assert!(anti.mean_curvature_squared < 0.0);

        let dirichlet = ConeParams::new(0.5, 1.0, Coupling::Dirichlet).unwrap();
        assert!(curvatures(&dirichlet, 1.0).unwrap().shell_coefficient.is_infinite());
        assert!(curvatures(&dirichlet, 0.0).is_err());
    }

    #[test]
    fn curvature_vanishes_in_flat_limit() {
        let near = ConeParams::unit(1.0 - 1e-12).unwrap();
        let c = curvatures(&near, 1.0).unwrap();
        assert!(c.mean_curvature_squared.abs() < 1e-11);
        assert!(c.shell_coefficient.abs() < 1e-11);
    }

    #[test]
    fn effective_potential_examples() {
        let c = Channel::new(0.5, 0).unwrap();
        assert!((effective_potential(&c, 1.0).unwrap() + 0.375).abs() < 1e-15);
        let c1 = Channel::new(0.5, 1).unwrap();
        assert!(effective_potential(&c1, 3.0).unwrap() > 0.0);
        assert!(effective_potential(&c1, -1.0).is_err());
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(0.5, 0).unwrap(), Regime::BoundTowerChannel);
        assert_eq!(classify(0.5, 1).unwrap(), Regime::Scattering);
        assert_eq!(classify(2.0, 0).unwrap(), Regime::BoundByDelta);
        assert_eq!(classify(2.0, 3).unwrap(), Regime::EssentiallySelfAdjoint);
        assert_eq!(classify(1.0, 0), Err(ModelError::FlatSpace));
        assert!(classify(-0.5, 0).is_err());
    }

    #[test]
    fn window_examples() {
        assert_eq!(allowed_l_window(2.0).unwrap(), vec![-1, 0, 1]);
        assert_eq!(allowed_l_window(3.0).unwrap(), vec![-2, -1, 0, 1, 2]);
        assert_eq!(allowed_l_window(1.0 + 1e-9).unwrap(), vec![-1, 0, 1]);
        assert!(allowed_l_window(1.0).is_err());
        assert!(allowed_l_window(0.7).is_err());
    }

    #[test]
    fn window_jumps_by_bisection() {
        let j2 = locate_window_jump(2.0, 2.5, 1e-12).unwrap();
        assert!((j2 - 5.0_f64.sqrt()).abs() < 1e-9);
        let j3 = locate_window_jump(3.0, 3.6, 1e-12).unwrap();
        assert!((j3 - (35.0_f64 / 3.0).sqrt()).abs() < 1e-9);
        let j4 = locate_window_jump(4.0, 5.0, 1e-12).unwrap();
        assert!((j4 - 21.0_f64.sqrt()).abs() < 1e-9);
        assert!((window_threshold(3) - (35.0_f64 / 3.0).sqrt()).abs() < 1e-15);
        // Equality sits outside the window.
        assert_eq!(max_allowed_l(5.0_f64.sqrt()).unwrap(), 1);
    }

    #[test]
    fn physical_energy_scales_as_inverse_square_radius() {
        let e1 = physical_energy(0.3, 1.0, 1.0, 1.0);
        let e2 = physical_energy(0.3, 10.0, 1.0, 1.0);
        assert_eq!(e1, -0.6);
        assert!((e1 / e2 - 100.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn nu_squared_grows_with_l(alpha in 0.05f64..6.0, l in 0i64..20) {
            prop_assert!(nu_squared(alpha, l + 1) > nu_squared(alpha, l));
            prop_assert_eq!(nu_squared(alpha, l), nu_squared(alpha, -l));
        }

        #[test]
        fn nu_squared_grows_with_alpha_at_l0(a in 0.05f64..6.0, b in 0.05f64..6.0) {
            prop_assume!(a < b);
            prop_assert!(nu_squared(a, 0) < nu_squared(b, 0));
        }

        #[test]
        fn tower_channel_iff_cone_and_l0(alpha in 0.01f64..0.999, l in -6i64..6) {
            let tower = classify(alpha, l).unwrap() == Regime::BoundTowerChannel;
            prop_assert_eq!(tower, l == 0);
        }

        #[test]
        fn window_matches_nu_squared(alpha in 1.0001f64..12.0, l in -8i64..8) {
            let inside = allowed_l_window(alpha).unwrap().contains(&l);
            let nu2 = nu_squared(alpha, l);
            if inside {
                prop_assert!(nu2 > 0.0 && nu2 < 1.0);
                prop_assert_eq!(classify(alpha, l).unwrap(), Regime::BoundByDelta);
            } else {
                prop_assert!(nu2 >= 1.0);
                prop_assert_eq!(classify(alpha, l).unwrap(), Regime::EssentiallySelfAdjoint);
            }
        }
    }
}
