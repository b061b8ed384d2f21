//! Energies from the two-term small-argument forms of `K`.
//!
//! Cone channel (`nu^2 < 0`): matching `x K'/K = |nu| cot(theta)` with
//! `theta = |nu| ln(kappa/2) + theta0` gives one state per branch `n` of
//! `cot^-1`. Anti-cone channel (`0 < nu^2 < 1`): matching the real-order
//! form gives a single state in closed form.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{acot, robin_constant, BoundState, BoundaryCondition, Convention, Method, SpectrumError};
use crate::cone::{Channel, ConeParams, Coupling};
use crate::special::{gamma_ratio, imaginary_expansion_phase, ExpansionForm, EULER_GAMMA};

/// Relative distance of `c` from `±nu` below which the anti-cone forms are
/// reported as threshold cases instead of numbers.
const THRESHOLD_TOL: f64 = 1e-12;

fn require_imaginary(channel: &Channel, alpha_hint: f64) -> Result<f64, SpectrumError> {
    if channel.is_imaginary() {
        Ok(channel.nu_abs())
    } else {
        Err(SpectrumError::WrongChannel {
            expected: "an imaginary-order channel (nu^2 < 0)",
            alpha: alpha_hint,
            l: channel.l,
        })
    }
}

/// Newton step in `ln kappa` for the cot condition at `kappa`.
pub fn cot_residual(nu_abs: f64, bc: BoundaryCondition, kappa: f64, form: ExpansionForm) -> f64 {
    let theta = nu_abs * (0.5 * kappa).ln() + imaginary_expansion_phase(nu_abs, form);
    let (s, co) = theta.sin_cos();
    let (h, dh) = match bc {
        BoundaryCondition::Robin(c) => (nu_abs * co - c * s, -nu_abs * (nu_abs * s + c * co)),
        BoundaryCondition::Dirichlet => (s, nu_abs * co),
    };
    if dh == 0.0 {
        h.abs()
    } else {
        (h / dh).abs()
    }
}

/// Branch-`n` solution of `|nu| cot(|nu| ln(kappa/2) + theta0) = c`:
/// `kappa_n = 2 exp((cot^-1(c/|nu|) - n pi - theta0) / |nu|)`, with
/// `cot^-1 -> 0` for Dirichlet. `theta0` is `|nu| gamma` for the literal form
/// and `-arg Gamma(1 + i|nu|)` for the standard one.
pub fn solve_cot_condition(
    channel: &Channel,
    bc: BoundaryCondition,
    n: u32,
    form: ExpansionForm,
) -> Result<BoundState, SpectrumError> {
    let nu = require_imaginary(channel, f64::NAN)?;
    let target = match bc {
        BoundaryCondition::Robin(c) => acot(c / nu),
        BoundaryCondition::Dirichlet => 0.0,
    };
    let theta0 = imaginary_expansion_phase(nu, form);
    let kappa = 2.0 * ((target - f64::from(n) * PI - theta0) / nu).exp();
    let residual = cot_residual(nu, bc, kappa, form);
    Ok(BoundState::from_kappa(channel.l, n, kappa, Method::CotCondition, residual))
}

/// `epsilon = exp[(2/|nu|) cot^-1(lambda q/|nu| - |nu|/2) - 2 gamma]` for the
/// `l = 0` cone channel, `q = (1 - alpha)/alpha`.
pub fn closed_form_cone_ground(params: &ConeParams) -> Result<BoundState, SpectrumError> {
    let lambda = match params.coupling() {
        Coupling::Finite(l) if params.is_cone() => l,
        _ => {
            return Err(SpectrumError::WrongChannel {
                expected: "a cone (alpha < 1) with finite coupling",
                alpha: params.alpha(),
                l: 0,
            })
        }
    };
    let channel = params.channel(0)?;
    let nu = channel.nu_abs();
    let q = params.shell_factor();
    let epsilon = ((2.0 / nu) * acot(lambda * q / nu - 0.5 * nu) - 2.0 * EULER_GAMMA).exp();
    let c = robin_constant(params, &channel, Convention::Literal).value;
    let kappa = 2.0 * epsilon.sqrt();
    let residual = cot_residual(nu, BoundaryCondition::Robin(c), kappa, ExpansionForm::Literal);
    Ok(BoundState::from_epsilon(0, 0, epsilon, Method::ClosedFormCone, residual))
}

/// `epsilon_n = exp(-2 n pi / |nu| - 2 gamma)`, `n >= 1`.
pub fn dirichlet_tower(channel: &Channel, n: u32) -> Result<BoundState, SpectrumError> {
    let nu = require_imaginary(channel, f64::NAN)?;
    if n == 0 {
        return Err(SpectrumError::InvalidOption {
            name: "n (Dirichlet tower starts at 1)",
            value: 0.0,
        });
    }
    let epsilon = (-2.0 * f64::from(n) * PI / nu - 2.0 * EULER_GAMMA).exp();
    let kappa = 2.0 * epsilon.sqrt();
    let residual = cot_residual(nu, BoundaryCondition::Dirichlet, kappa, ExpansionForm::Literal);
    Ok(BoundState::from_epsilon(channel.l, n, epsilon, Method::ClosedFormDirichlet, residual))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum AntiConeOutcome {
    Bound { state: BoundState, bracket: f64 },
    NoBoundState { bracket: f64, reason: String },
    /// `c` sits on `±nu`, where the bracket vanishes or diverges.
    Threshold { bracket: f64 },
}

impl AntiConeOutcome {
    pub fn state(&self) -> Option<&BoundState> {
        match self {
            AntiConeOutcome::Bound { state, .. } => Some(state),
            _ => None,
        }
    }

    pub fn bracket(&self) -> f64 {
        match self {
            AntiConeOutcome::Bound { bracket, .. }
            | AntiConeOutcome::NoBoundState { bracket, .. }
            | AntiConeOutcome::Threshold { bracket } => *bracket,
        }
    }
}

/// Log-derivative of the two-term real-order form at `kappa` and its
/// derivative in `ln kappa`. `sign` is `-1` for the standard form, `+1` for
/// the literal one.
fn two_term_log_derivative(nu: f64, kappa: f64, sign: f64) -> (f64, f64) {
    let half = 0.5 * kappa;
    let a = half.powf(-nu) / crate::special::gamma(1.0 - nu);
    let b = half.powf(nu) / crate::special::gamma(1.0 + nu);
    let den = a + sign * b;
    let l = -nu * (a - sign * b) / den;
    let dl = sign * 4.0 * nu * nu * a * b / (den * den);
    (l, dl)
}

/// Closed-form anti-cone energy for a channel with `0 < nu^2 < 1`.
///
/// `Integral`: `epsilon = [G (nu + c) / (c - nu)]^(1/nu)`, `G = Gamma(1+nu)/Gamma(1-nu)`,
/// from the standard two-term form with the integral-convention `c`. A
/// state exists only for `c < -nu`; for `c > nu` the bracket is positive
/// but the root sits past the pole of the two-term form.
///
/// `Literal`: `epsilon = [G (1 + q/nu + nu/2) / (1 - q/nu - nu/2)]^(1/nu)`
/// with `q = lambda (1 - alpha)/alpha`. This is the root of the `+`-sign
/// two-term form with constant `q + nu^2/2`, which is what the residual is
/// measured against.
pub fn closed_form_anticone(
    params: &ConeParams,
    channel: &Channel,
    convention: Convention,
) -> Result<AntiConeOutcome, SpectrumError> {
    if !params.is_anti_cone() || channel.is_imaginary() || channel.nu_squared >= 1.0 {
        return Err(SpectrumError::WrongChannel {
            expected: "an anti-cone channel with 0 < nu^2 < 1",
            alpha: params.alpha(),
            l: channel.l,
        });
    }
    let lambda = match params.coupling() {
        Coupling::Finite(l) => l,
        Coupling::Dirichlet => {
            return Ok(AntiConeOutcome::NoBoundState {
                bracket: f64::NAN,
                reason: "K_nu has no zero for real nu, so Phi(a) = 0 admits no state".into(),
            })
        }
    };
    let nu = channel.nu_abs();
    let g = gamma_ratio(nu);
    let (num, den, c_eff, sign) = match convention {
        Convention::Integral => {
            let c = robin_constant(params, channel, Convention::Integral).value;
            (nu + c, c - nu, c, -1.0)
        }
        Convention::Literal => {
            let q = lambda * params.shell_factor();
            (1.0 + q / nu + 0.5 * nu, 1.0 - q / nu - 0.5 * nu, q + 0.5 * nu * nu, 1.0)
        }
    };
    let scale = num.abs().max(den.abs()).max(1.0);
    if num.abs() <= THRESHOLD_TOL * scale || den.abs() <= THRESHOLD_TOL * scale {
        return Ok(AntiConeOutcome::Threshold { bracket: g * num / den });
    }
    let bracket = g * num / den;
    if bracket <= 0.0 {
        return Ok(AntiConeOutcome::NoBoundState {
            bracket,
            reason: "bracket is non-positive".into(),
        });
    }
    if convention == Convention::Integral && c_eff > nu {
        return Ok(AntiConeOutcome::NoBoundState {
            bracket,
            reason: "root lies past the pole of the two-term form (c > nu)".into(),
        });
    }
    let epsilon = bracket.powf(1.0 / nu);
    let kappa = 2.0 * epsilon.sqrt();
    let (l, dl) = two_term_log_derivative(nu, kappa, sign);
    let residual = if dl == 0.0 {
        (l - c_eff).abs()
    } else {
        ((l - c_eff) / dl).abs()
    };
    Ok(AntiConeOutcome::Bound {
        state: BoundState::from_epsilon(channel.l, 0, epsilon, Method::ClosedFormAntiCone, residual),
        bracket,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::relative_deviation;
    use proptest::prelude::*;

    fn tower_channel() -> Channel {
        Channel::new(0.5, 0).unwrap()
    }

    #[test]
    fn large_constant_limit_reproduces_dirichlet_tower() {
        let ch = tower_channel();
        for n in 1..6 {
            let d = dirichlet_tower(&ch, n).unwrap();
            let cot = solve_cot_condition(&ch, BoundaryCondition::Dirichlet, n, ExpansionForm::Literal).unwrap();
            assert!(relative_deviation(cot.epsilon, d.epsilon) < 1e-13);
            let big = solve_cot_condition(&ch, BoundaryCondition::Robin(1e12), n, ExpansionForm::Literal).unwrap();
            assert!(relative_deviation(big.epsilon, d.epsilon) < 1e-11);
        }
    }

    #[test]
    fn dirichlet_tower_zeros_of_literal_form() {
        let ch = tower_channel();
        let nu = ch.nu_abs();
        for n in 1..5 {
            let d = dirichlet_tower(&ch, n).unwrap();
            let k = crate::special::small_x_expansion_imaginary(nu, d.kappa, ExpansionForm::Literal).unwrap();
            assert!(k.abs() < 1e-13);
            assert!(d.residual < 1e-13);
            let expected = 2.0 * (-f64::from(n) * PI / nu - EULER_GAMMA).exp();
            assert!(relative_deviation(d.kappa, expected) < 1e-14);
        }
        assert!(dirichlet_tower(&ch, 0).is_err());
    }

    #[test]
    fn closed_form_cone_equals_literal_cot_branch_zero() {
        for alpha in [0.3, 0.5, 0.8] {
            let p = ConeParams::unit(alpha).unwrap();
            let ch = p.channel(0).unwrap();
            let c = robin_constant(&p, &ch, Convention::Literal).value;
            let cf = closed_form_cone_ground(&p).unwrap();
            let cot = solve_cot_condition(&ch, BoundaryCondition::Robin(c), 0, ExpansionForm::Literal).unwrap();
            assert!(relative_deviation(cf.epsilon, cot.epsilon) < 1e-14, "alpha {alpha}");
            assert!(cf.residual < 1e-12);
        }
    }

    #[test]
    fn closed_form_cone_needs_cone_and_finite_coupling() {
        assert!(closed_form_cone_ground(&ConeParams::unit(2.0).unwrap()).is_err());
        let d = ConeParams::new(0.5, 1.0, Coupling::Dirichlet).unwrap();
        assert!(closed_form_cone_ground(&d).is_err());
    }

    #[test]
    fn cot_condition_rejects_real_order() {
        let ch = Channel::new(2.0, 0).unwrap();
        assert!(solve_cot_condition(&ch, BoundaryCondition::Robin(1.0), 0, ExpansionForm::Standard).is_err());
    }

    #[test]
    fn anticone_integral_form_inverts_standard_two_term_matching() {
        let p = ConeParams::unit(2.0).unwrap();
        let ch = p.channel(0).unwrap();
        let out = closed_form_anticone(&p, &ch, Convention::Integral).unwrap();
        let s = out.state().unwrap();
        assert!(s.residual < 1e-12);
        let nu = ch.nu_abs();
        let c = robin_constant(&p, &ch, Convention::Integral).value;
        let (l, _) = two_term_log_derivative(nu, s.kappa, -1.0);
        assert!((l - c).abs() < 1e-12);
    }

    #[test]
    fn anticone_literal_form_inverts_plus_sign_matching() {
        for (alpha, l) in [(1.5, 0), (2.0, 0), (2.0, 1), (3.0, 2)] {
            let p = ConeParams::unit(alpha).unwrap();
            let ch = p.channel(l).unwrap();
            if let AntiConeOutcome::Bound { state, .. } = closed_form_anticone(&p, &ch, Convention::Literal).unwrap() {
                assert!(state.residual < 1e-12, "alpha {alpha} l {l}");
            }
        }
    }

    #[test]
    fn anticone_literal_matches_bracket() {
        let p = ConeParams::unit(2.0).unwrap();
        let ch = p.channel(0).unwrap();
        let nu = ch.nu_abs();
        let q = -0.5;
        let expected = (gamma_ratio(nu) * (1.0 + q / nu + nu / 2.0) / (1.0 - q / nu - nu / 2.0)).powf(1.0 / nu);
        let got = closed_form_anticone(&p, &ch, Convention::Literal).unwrap();
        assert!(relative_deviation(got.state().unwrap().epsilon, expected) < 1e-15);
    }

    #[test]
    fn anticone_dirichlet_has_no_state() {
        let p = ConeParams::new(2.0, 1.0, Coupling::Dirichlet).unwrap();
        let ch = p.channel(0).unwrap();
        for conv in [Convention::Integral, Convention::Literal] {
            assert!(matches!(
                closed_form_anticone(&p, &ch, conv).unwrap(),
                AntiConeOutcome::NoBoundState { .. }
            ));
        }
    }

    #[test]
    fn anticone_rejects_tower_and_self_adjoint_channels() {
        let p = ConeParams::unit(2.0).unwrap();
        assert!(closed_form_anticone(&p, &p.channel(2).unwrap(), Convention::Integral).is_err());
        let cone = ConeParams::unit(0.5).unwrap();
        assert!(closed_form_anticone(&cone, &cone.channel(0).unwrap(), Convention::Integral).is_err());
    }

    #[test]
    fn anticone_threshold_is_flagged() {
        // c = -nu: lambda q - nu^2/2 = -nu  =>  lambda = (nu^2/2 - nu) / q.
        let p = ConeParams::unit(2.0).unwrap();
        let ch = p.channel(0).unwrap();
        let nu = ch.nu_abs();
        let lambda = (0.5 * nu * nu - nu) / p.shell_factor();
        let p = p.with_coupling(Coupling::Finite(lambda)).unwrap();
        let out = closed_form_anticone(&p, &ch, Convention::Integral).unwrap();
        assert!(matches!(out, AntiConeOutcome::Threshold { .. }), "{out:?}");
    }

    proptest! {
        #[test]
        fn cot_branches_are_geometric(alpha in 0.05f64..0.95, c in -50.0f64..50.0, n in 0u32..6) {
            let ch = Channel::new(alpha, 0).unwrap();
            let nu = ch.nu_abs();
            for form in [ExpansionForm::Literal, ExpansionForm::Standard] {
                let a = solve_cot_condition(&ch, BoundaryCondition::Robin(c), n, form).unwrap();
                let b = solve_cot_condition(&ch, BoundaryCondition::Robin(c), n + 1, form).unwrap();
                let ratio = b.epsilon / a.epsilon;
                prop_assert!(relative_deviation(ratio, (-2.0 * PI / nu).exp()) < 1e-10);
                prop_assert!(a.residual < 1e-12);
            }
        }

        #[test]
        fn dirichlet_tower_is_geometric(alpha in 0.05f64..0.95, n in 1u32..8) {
            let ch = Channel::new(alpha, 0).unwrap();
            let nu = ch.nu_abs();
            let a = dirichlet_tower(&ch, n).unwrap();
            let b = dirichlet_tower(&ch, n + 1).unwrap();
            prop_assert!(relative_deviation(b.epsilon / a.epsilon, (-2.0 * PI / nu).exp()) < 1e-12);
        }

        #[test]
        fn closed_forms_are_scale_free(alpha in 0.1f64..0.95, a in 1e-3f64..1e3) {
            let unit = ConeParams::unit(alpha).unwrap();
            let scaled = unit.with_core_radius(a).unwrap();
            let e1 = closed_form_cone_ground(&unit).unwrap().epsilon;
            let e2 = closed_form_cone_ground(&scaled).unwrap().epsilon;
            prop_assert_eq!(e1, e2);
        }

        #[test]
        fn integral_anticone_exists_iff_c_below_minus_nu(alpha in 1.01f64..4.0, lambda in 0.0f64..5.0) {
            let p = ConeParams::new(alpha, 1.0, Coupling::Finite(lambda)).unwrap();
            for l in crate::cone::allowed_l_window(alpha).unwrap() {
                let ch = p.channel(l).unwrap();
                let c = robin_constant(&p, &ch, Convention::Integral).value;
                let out = closed_form_anticone(&p, &ch, Convention::Integral).unwrap();
                match out {
                    AntiConeOutcome::Threshold { .. } => {}
                    _ => prop_assert_eq!(out.state().is_some(), c < -ch.nu_abs()),
                }
            }
        }
    }
}
