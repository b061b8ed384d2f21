//! Roots of the exact matching `x K'(x) = c K(x)` at `x = kappa`.
//!
//! The scan works on `g = x K' - c K` (or `g = K` for Dirichlet), which is
//! smooth where the log-derivative has poles.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{acot, BoundState, BoundaryCondition, Method, SpectrumError};
use crate::cone::Channel;
use crate::roots::{bisect_ln, log_grid};
use crate::special::{bessel_k_pair, imaginary_expansion_phase, BesselOrder, ExpansionForm};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactOptions {
    /// Largest number of roots returned, taken from the top of the spectrum.
    pub n_max: usize,
    pub kappa_min: f64,
    pub kappa_max: f64,
    pub points_per_decade: usize,
    /// Bisection stops when the bracket is this narrow in `ln kappa`.
    pub ln_tol: f64,
}

impl Default for ExactOptions {
    fn default() -> Self {
        Self {
            n_max: 8,
            kappa_min: 1e-8,
            kappa_max: 10.0,
            points_per_decade: 200,
            ln_tol: 1e-12,
        }
    }
}

impl ExactOptions {
    fn validate(&self) -> Result<(), SpectrumError> {
        if !(self.kappa_min > 0.0 && self.kappa_min.is_finite()) {
            return Err(SpectrumError::InvalidOption {
                name: "kappa_min",
                value: self.kappa_min,
            });
        }
        if !(self.kappa_max > self.kappa_min && self.kappa_max.is_finite()) {
            return Err(SpectrumError::InvalidOption {
                name: "kappa_max",
                value: self.kappa_max,
            });
        }
        if self.points_per_decade < 2 {
            return Err(SpectrumError::InvalidOption {
                name: "points_per_decade",
                value: self.points_per_decade as f64,
            });
        }
        if !(self.ln_tol > 0.0) {
            return Err(SpectrumError::InvalidOption {
                name: "ln_tol",
                value: self.ln_tol,
            });
        }
        Ok(())
    }
}

/// `g(kappa)` and `dg/d ln kappa`, both scaled by `exp(kappa)`.
fn matching(order: BesselOrder, bc: BoundaryCondition, kappa: f64) -> Result<(f64, f64), SpectrumError> {
    let p = bessel_k_pair(order, kappa)?;
    let (k, xdk) = (p.k_scaled, p.x_dk_scaled);
    // (x d/dx)^2 K = (x^2 + mu^2) K
    let xxk = (kappa * kappa + order.squared()) * k;
    Ok(match bc {
        BoundaryCondition::Robin(c) => (xdk - c * k, xxk - c * xdk),
        BoundaryCondition::Dirichlet => (k, xdk),
    })
}

/// Tower index of an exact root: the branch of the standard-phase cot
/// condition that passes closest to it.
pub fn tower_branch(nu_abs: f64, bc: BoundaryCondition, kappa: f64) -> u32 {
    let target = match bc {
        BoundaryCondition::Robin(c) => acot(c / nu_abs),
        BoundaryCondition::Dirichlet => 0.0,
    };
    let theta0 = imaginary_expansion_phase(nu_abs, ExpansionForm::Standard);
    let n = ((target - nu_abs * (0.5 * kappa).ln() - theta0) / PI).round();
    n.max(0.0) as u32
}

/// For real order `0 < nu < 1`, `x K'/K` decreases from `-nu` to `-inf`,
/// so a root exists exactly when `c < -nu`.
pub fn real_order_root_exists(nu: f64, bc: BoundaryCondition) -> bool {
    match bc {
        BoundaryCondition::Robin(c) => c < -nu,
        BoundaryCondition::Dirichlet => false,
    }
}

/// Below this the asymptotic phase labels a root reliably.
const LABEL_KAPPA: f64 = 0.1;

/// Solves the matching on `[kappa_min, kappa_max]`, scanning downward from
/// `kappa_max` on a log grid and bisecting each sign change. Imaginary-order
/// channels return the top `n_max` roots; real-order channels are scanned fully.
///
/// Tower roots carry consecutive branch labels anchored on the deepest root
/// found. The scan runs past `n_max` if needed so that this anchor lies below
/// `kappa = 0.1`, where the small-argument phase applies.
pub fn solve_exact(
    channel: &Channel,
    bc: BoundaryCondition,
    opts: &ExactOptions,
) -> Result<Vec<BoundState>, SpectrumError> {
    opts.validate()?;
    let order = channel.order;
    let mut grid = log_grid(opts.kappa_min, opts.kappa_max, opts.points_per_decade);
    grid.reverse();

    let g = |x: f64| matching(order, bc, x).map(|v| v.0);
    let mut roots = Vec::new();
    let mut hi = grid[0];
    let mut g_hi = g(hi)?;
    for &lo in &grid[1..] {
        if channel.is_imaginary()
            && roots.len() >= opts.n_max
            && roots.last().is_some_and(|r: &BoundState| r.kappa < LABEL_KAPPA)
        {
            break;
        }
        let g_lo = g(lo)?;
        if g_lo == 0.0 || g_lo.signum() != g_hi.signum() {
            let root = bisect_ln(g, lo, hi, g_lo, g_hi, opts.ln_tol)?;
            let (gr, dgr) = matching(order, bc, root)?;
            let residual = if dgr == 0.0 { gr.abs() } else { (gr / dgr).abs() };
            if !(residual <= 1e3 * opts.ln_tol) {
                return Err(SpectrumError::BracketFailure {
                    lo,
                    hi,
                    points: grid.len(),
                });
            }
            roots.push(BoundState::from_kappa(channel.l, 0, root, Method::ExactBessel, residual));
            if g_lo == 0.0 {
                // Step past the exact zero so it is not counted twice.
                hi = lo;
                g_hi = g(lo * (1.0 - 1e-9))?;
                continue;
            }
        }
        hi = lo;
        g_hi = g_lo;
    }
    if channel.is_imaginary() {
        if let Some(deepest) = roots.last() {
            let anchor = tower_branch(channel.nu_abs(), bc, deepest.kappa);
            let n = roots.len() as u32;
            for (i, r) in roots.iter_mut().enumerate() {
                r.branch = (anchor + i as u32 + 1).saturating_sub(n);
            }
        }
        roots.truncate(opts.n_max);
    } else {
        roots.truncate(opts.n_max.max(1));
    }
    Ok(roots)
}
