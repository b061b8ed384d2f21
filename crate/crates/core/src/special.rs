//! Modified Bessel functions of the second kind for real order in (0, 1)
//! and purely imaginary order, their logarithmic derivatives, and the
//! two-term small-argument forms used by the closed-form spectra.
//!
//! `K` of either kind of order is evaluated from
//!
//! ```text
//! K_mu(x) = ∫_0^∞ exp(-x cosh t) w(t) dt,   w = cosh(|mu| t) or cos(|mu| t)
//! ```
//!
//! with the factor `exp(-x)` pulled out so that ratios stay accurate for
//! large arguments.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

use crate::quadrature::{self, Tolerance};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Beyond this exponent `exp(-x)` is below the smallest normal f64.
const UNDERFLOW_EXPONENT: f64 = 745.0;

/// `|K| / |x K'|` below this ratio is treated as sitting on a zero of `K`.
const POLE_RATIO: f64 = 1e-11;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecialFnError {
    #[error("{quantity} must be positive and finite, got {value}")]
    Domain { quantity: &'static str, value: f64 },
    #[error("order magnitude must be finite and positive (zero allowed for real order), got {0}")]
    InvalidOrder(f64),
    #[error("x = {x} is within tolerance of a zero of K; log-derivative has a pole")]
    Pole { x: f64 },
    #[error("quadrature for K did not converge at x = {x} (order {order:?})")]
    NoConvergence { x: f64, order: BesselOrder },
}

fn check_positive(quantity: &'static str, value: f64) -> Result<f64, SpecialFnError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(SpecialFnError::Domain { quantity, value })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderKind {
    Real,
    Imaginary,
}

/// Order of `K`: either a real `mu` or a purely imaginary `i|nu|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesselOrder {
    kind: OrderKind,
    magnitude: f64,
}

impl BesselOrder {
    pub fn real(magnitude: f64) -> Result<Self, SpecialFnError> {
        Self::with_kind(OrderKind::Real, magnitude)
    }

    pub fn imaginary(magnitude: f64) -> Result<Self, SpecialFnError> {
        Self::with_kind(OrderKind::Imaginary, magnitude)
    }

    fn with_kind(kind: OrderKind, magnitude: f64) -> Result<Self, SpecialFnError> {
        let floor_ok = magnitude > 0.0 || (magnitude == 0.0 && kind == OrderKind::Real);
        if floor_ok && magnitude.is_finite() {
            Ok(Self { kind, magnitude })
        } else {
            Err(SpecialFnError::InvalidOrder(magnitude))
        }
    }

    /// Real order for `mu_squared >= 0`, imaginary order for `mu_squared < 0`.
    pub fn from_squared(mu_squared: f64) -> Result<Self, SpecialFnError> {
        if mu_squared >= 0.0 {
            Self::real(mu_squared.sqrt())
        } else {
            Self::imaginary((-mu_squared).sqrt())
        }
    }

    pub fn kind(&self) -> OrderKind {
        self.kind
    }

    pub fn magnitude(&self) -> f64 {
        self.magnitude
    }

    /// Signed square of the order: `|mu|^2` for real order, `-|nu|^2` for imaginary.
    pub fn squared(&self) -> f64 {
        match self.kind {
            OrderKind::Real => self.magnitude * self.magnitude,
            OrderKind::Imaginary => -self.magnitude * self.magnitude,
        }
    }
}

/// Which two-term small-argument form to use.
///
/// `Standard` is the asymptotic form that follows from
/// `K_mu = pi (I_{-mu} - I_mu) / (2 sin(pi mu))`. `Literal` is the variant
/// that carries a `+` between the two real-order terms and the phase
/// `|nu| * EULER_GAMMA` (instead of `-arg Gamma(1 + i|nu|)`) for imaginary order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpansionForm {
    Standard,
    Literal,
}

/// Value of `K` together with the rescaled quantities the matching needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KPair {
    /// `exp(x) K(x)`.
    pub k_scaled: f64,
    /// `exp(x) x K'(x)`.
    pub x_dk_scaled: f64,
}

impl KPair {
    pub fn log_derivative(&self) -> f64 {
        self.x_dk_scaled / self.k_scaled
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KEvaluation {
    pub value: f64,
    /// Set when `exp(-x)` underflows; `value` is then 0.
    pub underflow: bool,
}

/// Evaluates `exp(x) K` and `exp(x) x K'` in one quadrature pass.
pub fn bessel_k_pair(order: BesselOrder, x: f64) -> Result<KPair, SpecialFnError> {
    let x = check_positive("x", x)?;
    let m = order.magnitude;
    // x (cosh t - 1) reaches the underflow exponent here.
    let t_max = (1.0 + UNDERFLOW_EXPONENT / x).acosh();
    let pieces = ((t_max * (1.0 + m)).ceil() as usize).clamp(4, 64);

    let integrand = |t: f64| {
        let s = (0.5 * t).sinh();
        let damp = (-2.0 * x * s * s).exp();
        let w = match order.kind {
            OrderKind::Real => (m * t).cosh(),
            OrderKind::Imaginary => (m * t).cos(),
        };
        let f = damp * w;
        [f, x * t.cosh() * f]
    };
    let est = quadrature::integrate(integrand, 0.0, t_max, pieces, Tolerance::DEFAULT, 4000);
    if !est.converged || !est.value.iter().all(|v| v.is_finite()) {
        return Err(SpecialFnError::NoConvergence { x, order });
    }
    Ok(KPair {
        k_scaled: est.value[0],
        x_dk_scaled: -est.value[1],
    })
}

/// `K_mu(x)` for real order or `K_{i|nu|}(x)` for imaginary order.
pub fn bessel_k(order: BesselOrder, x: f64) -> Result<KEvaluation, SpecialFnError> {
    let pair = bessel_k_pair(order, x)?;
    let value = pair.k_scaled * (-x).exp();
    let underflow = x >= UNDERFLOW_EXPONENT || (value == 0.0 && pair.k_scaled != 0.0);
    Ok(KEvaluation {
        value: if underflow { 0.0 } else { value },
        underflow,
    })
}

/// `x K'(x) / K(x)`.
pub fn bessel_k_log_derivative(order: BesselOrder, x: f64) -> Result<f64, SpecialFnError> {
    let pair = bessel_k_pair(order, x)?;
    if order.kind == OrderKind::Imaginary
        && pair.k_scaled.abs() <= POLE_RATIO * pair.x_dk_scaled.abs()
    {
        return Err(SpecialFnError::Pole { x });
    }
    Ok(pair.log_derivative())
}

/// Real Gamma function.
pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

/// `Gamma(1 + nu) / Gamma(1 - nu)`.
pub fn gamma_ratio(nu: f64) -> f64 {
    gamma(1.0 + nu) / gamma(1.0 - nu)
}

/// Continuous branch of `arg Gamma(1 + i nu)`.
///
/// Shifts the argument up by `SHIFT` with the recurrence and applies the
/// Stirling series there.
pub fn arg_gamma_one_plus_i(nu: f64) -> f64 {
    const SHIFT: u32 = 16;
    // B_{2k} / (2k (2k-1)) for k = 1..7
    const STIRLING: [f64; 7] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360_360.0,
        1.0 / 156.0,
    ];
    let re = SHIFT as f64 + 1.0;
    let r = re.hypot(nu);
    let theta = nu.atan2(re);
    // Im[(z - 1/2) ln z - z]
    let mut im = (re - 0.5) * theta + nu * r.ln() - nu;
    for (k, c) in STIRLING.iter().enumerate() {
        let p = (2 * k + 1) as f64;
        im -= c * (p * theta).sin() / r.powf(p);
    }
    let recurrence: f64 = (1..=SHIFT).map(|k| (nu / k as f64).atan()).sum();
    im - recurrence
}

/// Constant `theta0` in the small-argument form `sin(|nu| ln(x/2) + theta0)`.
pub fn imaginary_expansion_phase(nu_abs: f64, form: ExpansionForm) -> f64 {
    match form {
        ExpansionForm::Standard => -arg_gamma_one_plus_i(nu_abs),
        ExpansionForm::Literal => nu_abs * EULER_GAMMA,
    }
}

/// Small-argument form of `K_{i|nu|}(x)`.
///
/// `Literal`: `sqrt(pi / (|nu| sinh(pi |nu|))) sin(|nu| ln(x/2) + |nu| gamma)`.
/// `Standard`: the same amplitude with the phase `-arg Gamma(1 + i|nu|)` and
/// an overall minus sign; this one tends to `K` with relative error `O(x^2)`.
pub fn small_x_expansion_imaginary(
    nu_abs: f64,
    x: f64,
    form: ExpansionForm,
) -> Result<f64, SpecialFnError> {
    let nu = check_positive("nu_abs", nu_abs)?;
    let x = check_positive("x", x)?;
    let amplitude = (PI / (nu * (PI * nu).sinh())).sqrt();
    let phase = nu * (0.5 * x).ln() + imaginary_expansion_phase(nu, form);
    Ok(match form {
        ExpansionForm::Standard => -amplitude * phase.sin(),
        ExpansionForm::Literal => amplitude * phase.sin(),
    })
}

/// `x d/dx` of [`small_x_expansion_imaginary`].
pub fn small_x_expansion_imaginary_x_derivative(
    nu_abs: f64,
    x: f64,
    form: ExpansionForm,
) -> Result<f64, SpecialFnError> {
    let nu = check_positive("nu_abs", nu_abs)?;
    let x = check_positive("x", x)?;
    let amplitude = (PI / (nu * (PI * nu).sinh())).sqrt();
    let phase = nu * (0.5 * x).ln() + imaginary_expansion_phase(nu, form);
    Ok(match form {
        ExpansionForm::Standard => -amplitude * nu * phase.cos(),
        ExpansionForm::Literal => amplitude * nu * phase.cos(),
    })
}

/// Phase-independent size of the gap between `K_{i|nu|}` and its
/// small-argument form at `x`.
///
/// The leading correction to the standard form is a log-periodic wave of
/// amplitude `O(x^2)`; pairing the gaps in `K` and in `x K'` recovers that
/// amplitude without the oscillating factor, so the value scales cleanly
/// with `x^2` when the form is correct.
pub fn imaginary_expansion_error_envelope(
    nu_abs: f64,
    x: f64,
    form: ExpansionForm,
) -> Result<f64, SpecialFnError> {
    let order = BesselOrder::imaginary(nu_abs)?;
    let pair = bessel_k_pair(order, x)?;
    let scale = (-x).exp();
    let dk = pair.k_scaled * scale - small_x_expansion_imaginary(nu_abs, x, form)?;
    let dxk = pair.x_dk_scaled * scale - small_x_expansion_imaginary_x_derivative(nu_abs, x, form)?;
    Ok(dk.hypot((dxk - 2.0 * dk) / nu_abs))
}

/// Small-argument form of `K_nu(x)` for `0 < nu < 1`:
/// `pi / (2 sin(pi nu)) [ (x/2)^-nu / Gamma(1-nu) ∓ (x/2)^nu / Gamma(1+nu) ]`,
/// with `-` for `Standard` and `+` for `Literal`.
pub fn small_x_expansion_real(nu: f64, x: f64, form: ExpansionForm) -> Result<f64, SpecialFnError> {
    let nu = check_positive("nu", nu)?;
    if nu >= 1.0 {
        return Err(SpecialFnError::Domain {
            quantity: "nu (< 1)",
            value: nu,
        });
    }
    let x = check_positive("x", x)?;
    let half = 0.5 * x;
    let lead = half.powf(-nu) / gamma(1.0 - nu);
    let next = half.powf(nu) / gamma(1.0 + nu);
    let sign = match form {
        ExpansionForm::Standard => -1.0,
        ExpansionForm::Literal => 1.0,
    };
    Ok(PI / (2.0 * (PI * nu).sin()) * (lead + sign * next))
}

/// `K_{1/2}(x) = sqrt(pi / (2x)) exp(-x)`.
pub fn bessel_k_half(x: f64) -> f64 {
    (PI / (2.0 * x)).sqrt() * (-x).exp()
}
