//! Finite-difference solve of the radial bound-state problem on `[a, R]`,
//! independent of any Bessel-function identity.
//!
//! On the default log grid `t = ln(rho/a)` the radial equation becomes
//!
//! ```text
//! -Phi_tt + nu^2 Phi = lambda rho^2 Phi,   lambda = -k^2
//! ```
//!
//! which discretizes to a symmetric tridiagonal pencil `(A, M)` with `M`
//! diagonal and positive. The uniform grid works with `u = sqrt(rho) Phi`
//! instead. Eigenvalues are located by Sturm counts of `A - sigma M` and
//! bisection, so each one is bracketed rather than iterated towards.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cone::Channel;
use crate::spectrum::BoundaryCondition;

/// States with `kappa R / a` below this are squeezed by the outer wall.
pub const BOX_KAPPA_R: f64 = 8.0;
/// States with `kappa a` above this are outside the range the oracle is trusted on.
pub const CORE_KAPPA_A: f64 = 0.3;
/// Observed refinement orders below this mark a value as unconverged.
pub const MIN_ORDER: f64 = 1.5;

const MAX_STATES: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("Robin constant must be finite (use the Dirichlet condition for an infinite one), got {0}")]
    InvalidConstant(f64),
    #[error("core radius must be positive and finite, got {0}")]
    InvalidCoreRadius(f64),
    #[error("refinement needs at least 2 levels, got {0}")]
    Levels(usize),
    #[error("bisection for eigenvalue {index} did not close: bracket [{lo}, {hi}]")]
    NoConvergence { index: usize, lo: f64, hi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    LogSpaced,
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n_points: usize,
    pub rho_max_over_a: f64,
    pub spacing: Spacing,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            n_points: 2000,
            rho_max_over_a: 1000.0,
            spacing: Spacing::LogSpaced,
        }
    }
}

impl GridSpec {
    pub fn new(n_points: usize, rho_max_over_a: f64, spacing: Spacing) -> Result<Self, OracleError> {
        let g = Self {
            n_points,
            rho_max_over_a,
            spacing,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), OracleError> {
        if self.n_points < 100 {
            return Err(OracleError::InvalidGrid(format!("n_points must be >= 100, got {}", self.n_points)));
        }
        if !(self.rho_max_over_a > 10.0 && self.rho_max_over_a.is_finite()) {
            return Err(OracleError::InvalidGrid(format!(
                "rho_max_over_a must be > 10, got {}",
                self.rho_max_over_a
            )));
        }
        Ok(())
    }

    /// Same interval with every cell halved.
    pub fn refined(&self) -> Self {
        Self {
            n_points: 2 * (self.n_points - 1) + 1,
            ..*self
        }
    }

    /// Node radii for core radius `a`; the first is `a`, the last `R`.
    pub fn nodes(&self, a: f64) -> Vec<f64> {
        let n = self.n_points;
        let last = n - 1;
        (0..n)
            .map(|i| {
                if i == last {
                    a * self.rho_max_over_a
                } else {
                    let s = i as f64 / last as f64;
                    match self.spacing {
                        Spacing::LogSpaced => a * (s * self.rho_max_over_a.ln()).exp(),
                        Spacing::Uniform => a * (1.0 + s * (self.rho_max_over_a - 1.0)),
                    }
                }
            })
            .collect()
    }
}

/// Tridiagonal `A` (stored row by row) and diagonal `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pencil {
    pub diag: Vec<f64>,
    /// `A[i][i-1]` for `i = 1..n`.
    pub lower: Vec<f64>,
    /// `A[i][i+1]` for `i = 0..n-1`.
    pub upper: Vec<f64>,
    pub mass: Vec<f64>,
}

impl Pencil {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Largest `|A[i][i+1] - A[i+1][i]|` relative to the largest entry.
    pub fn max_asymmetry(&self) -> f64 {
        let scale = self
            .diag
            .iter()
            .chain(&self.upper)
            .fold(0.0_f64, |m, v| m.max(v.abs()));
        self.upper
            .iter()
            .zip(&self.lower)
            .fold(0.0_f64, |m, (u, l)| m.max((u - l).abs()))
            / scale
    }

    /// Number of eigenvalues of `A x = lambda M x` below `sigma`, from the
    /// signs of the `LDL^T` pivots of `A - sigma M`.
    pub fn count_below(&self, sigma: f64) -> usize {
        let mut count = 0;
        let mut d = 1.0;
        for i in 0..self.len() {
            let b2 = if i == 0 { 0.0 } else { self.upper[i - 1] * self.lower[i - 1] };
            d = self.diag[i] - sigma * self.mass[i] - if i == 0 { 0.0 } else { b2 / d };
            if d == 0.0 {
                d = -f64::EPSILON * (self.diag[i].abs() + sigma.abs() * self.mass[i]).max(f64::MIN_POSITIVE);
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Lower bound on the spectrum (Gershgorin on `M^-1/2 A M^-1/2`).
    fn spectral_floor(&self) -> f64 {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut r = 0.0;
                if i > 0 {
                    r += self.lower[i - 1].abs() / (self.mass[i] * self.mass[i - 1]).sqrt();
                }
                if i + 1 < n {
                    r += self.upper[i].abs() / (self.mass[i] * self.mass[i + 1]).sqrt();
                }
                self.diag[i] / self.mass[i] - r
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// The eigenvalues below `sigma`, ascending, at most `max_count` of them.
    pub fn eigenvalues_below(&self, sigma: f64, max_count: usize) -> Result<Vec<f64>, OracleError> {
        let total = self.count_below(sigma).min(max_count);
        let floor = self.spectral_floor().min(sigma) - 1.0;
        let mut out = Vec::with_capacity(total);
        for index in 0..total {
            // Smallest x with count_below(x) > index.
            let (mut lo, mut hi) = (floor, sigma);
            for _ in 0..300 {
                let mid = 0.5 * (lo + hi);
                if !(mid > lo && mid < hi) || hi - lo <= 1e-15 * mid.abs() {
                    break;
                }
                if self.count_below(mid) > index {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            if !(hi - lo <= 1e-13 * hi.abs().max(lo.abs())) {
                return Err(OracleError::NoConvergence { index, lo, hi });
            }
            out.push(0.5 * (lo + hi));
        }
        Ok(out)
    }
}

/// Assembles the pencil for `channel` under `bc` at the core radius `a`.
pub fn assemble(channel: &Channel, bc: BoundaryCondition, grid: &GridSpec, a: f64) -> Result<Pencil, OracleError> {
    grid.validate()?;
    if !(a > 0.0 && a.is_finite()) {
        return Err(OracleError::InvalidCoreRadius(a));
    }
    if let BoundaryCondition::Robin(c) = bc {
        if !c.is_finite() {
            return Err(OracleError::InvalidConstant(c));
        }
    }
    let rho = grid.nodes(a);
    let n = rho.len();
    let mu2 = channel.nu_squared;
    // Unknowns are nodes 0..n-1 (the last node carries Phi = 0); Dirichlet at
    // the core removes node 0 as well.
    let first = match bc {
        BoundaryCondition::Robin(_) => 0,
        BoundaryCondition::Dirichlet => 1,
    };
    let unknowns = first..n - 1;
    let mut p = Pencil {
        diag: Vec::with_capacity(n),
        lower: Vec::with_capacity(n),
        upper: Vec::with_capacity(n),
        mass: Vec::with_capacity(n),
    };
    match grid.spacing {
        Spacing::LogSpaced => {
            let h = grid.rho_max_over_a.ln() / (n - 1) as f64;
            for i in unknowns.clone() {
                if i == 0 {
                    let BoundaryCondition::Robin(c) = bc else { unreachable!() };
                    // Ghost node: Phi_{-1} = Phi_1 - 2 h c Phi_0; row halved.
                    p.diag.push((1.0 + h * c) / h + 0.5 * mu2 * h);
                    p.mass.push(0.5 * h * rho[0] * rho[0]);
                } else {
                    p.diag.push(2.0 / h + mu2 * h);
                    p.mass.push(h * rho[i] * rho[i]);
                }
                if i > first {
                    p.lower.push(-1.0 / h);
                }
                if i + 1 < n - 1 {
                    p.upper.push(-1.0 / h);
                }
            }
        }
        Spacing::Uniform => {
            // u = sqrt(rho) Phi: -u'' + (mu^2 - 1/4)/rho^2 u = lambda u,
            // with a u'(a)/u(a) = c + 1/2.
            let h = a * (grid.rho_max_over_a - 1.0) / (n - 1) as f64;
            let v = |r: f64| (mu2 - 0.25) / (r * r);
            for i in unknowns.clone() {
                if i == 0 {
                    let BoundaryCondition::Robin(c) = bc else { unreachable!() };
                    let beta = (c + 0.5) / a;
                    p.diag.push((1.0 + h * beta) / h + 0.5 * h * v(rho[0]));
                    p.mass.push(0.5 * h);
                } else {
                    p.diag.push(2.0 / h + h * v(rho[i]));
                    p.mass.push(h);
                }
                if i > first {
                    p.lower.push(-1.0 / h);
                }
                if i + 1 < n - 1 {
                    p.upper.push(-1.0 / h);
                }
            }
        }
    }
    Ok(p)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleState {
    pub epsilon: f64,
    pub kappa: f64,
    /// Observed refinement order; absent for a single-grid solve.
    pub order: Option<f64>,
    /// `|extrapolated - finest| / extrapolated`; 0 for a single-grid solve.
    pub error_estimate: f64,
    /// `kappa R / a < 8`.
    pub box_limited: bool,
    /// `kappa a < 0.3` and `kappa R / a > 8`.
    pub in_envelope: bool,
    pub converged: bool,
}

/// Bound states found by the oracle, largest `epsilon` first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub states: Vec<OracleState>,
    pub grid: GridSpec,
    pub levels: usize,
    pub warnings: Vec<String>,
}

impl OracleResult {
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.epsilon).collect()
    }

    pub fn top(&self) -> Option<&OracleState> {
        self.states.first()
    }
}

fn state(epsilon: f64, grid: &GridSpec, order: Option<f64>, error_estimate: f64) -> OracleState {
    let kappa = 2.0 * epsilon.sqrt();
    let box_limited = kappa * grid.rho_max_over_a < BOX_KAPPA_R;
    OracleState {
        epsilon,
        kappa,
        order,
        error_estimate,
        box_limited,
        in_envelope: !box_limited && kappa < CORE_KAPPA_A,
        converged: order.is_none_or(|p| p >= MIN_ORDER),
    }
}

fn warnings_for(states: &[OracleState], grid: &GridSpec) -> Vec<String> {
    let mut w = Vec::new();
    if let Some(last) = states.last() {
        if last.box_limited {
            w.push(format!(
                "lowest state has kappa R / a = {:.3} < {BOX_KAPPA_R}; the outer wall shifts it",
                last.kappa * grid.rho_max_over_a
            ));
        }
    }
    for (i, s) in states.iter().enumerate() {
        if !s.converged {
            w.push(format!("state {i}: observed order {:.3} below {MIN_ORDER}", s.order.unwrap_or(f64::NAN)));
        }
    }
    w
}

/// Negative-energy eigenvalues as `epsilon = -lambda a^2 / 4`, descending.
fn raw_epsilons(channel: &Channel, bc: BoundaryCondition, grid: &GridSpec, a: f64) -> Result<Vec<f64>, OracleError> {
    let p = assemble(channel, bc, grid, a)?;
    let lambdas = p.eigenvalues_below(0.0, MAX_STATES)?;
    Ok(lambdas.into_iter().map(|l| -l * a * a / 4.0).collect())
}

/// Single-grid solve with unit core radius.
pub fn solve_radial(channel: &Channel, bc: BoundaryCondition, grid: &GridSpec) -> Result<OracleResult, OracleError> {
    solve_radial_at(channel, bc, grid, 1.0)
}

/// Single-grid solve at core radius `a`; `epsilon` is dimensionless.
pub fn solve_radial_at(
    channel: &Channel,
    bc: BoundaryCondition,
    grid: &GridSpec,
    a: f64,
) -> Result<OracleResult, OracleError> {
    let states: Vec<OracleState> = raw_epsilons(channel, bc, grid, a)?
        .into_iter()
        .map(|e| state(e, grid, None, 0.0))
        .collect();
    let mut warnings = warnings_for(&states, grid);
    if states.is_empty() {
        warnings.push("no bound state inside the box".into());
    }
    Ok(OracleResult {
        states,
        grid: *grid,
        levels: 1,
        warnings,
    })
}

/// Solves on `levels` nested grids (each halving the cell size of the
/// previous) and Richardson-extrapolates with the second-order exponent.
/// States are matched by rank from the top; only ranks present on every
/// grid are kept. `grid` is the coarsest level.
pub fn refine(
    channel: &Channel,
    bc: BoundaryCondition,
    grid: &GridSpec,
    levels: usize,
) -> Result<OracleResult, OracleError> {
    if levels < 2 {
        return Err(OracleError::Levels(levels));
    }
    let mut grids = vec![*grid];
    for _ in 1..levels {
        let next = grids.last().unwrap().refined();
        grids.push(next);
    }
    let runs: Vec<Vec<f64>> = grids
        .iter()
        .map(|g| raw_epsilons(channel, bc, g, 1.0))
        .collect::<Result<_, _>>()?;
    let common = runs.iter().map(Vec::len).min().unwrap_or(0);
    let finest = grids.last().unwrap();
    let states: Vec<OracleState> = (0..common)
        .map(|j| {
            let e: Vec<f64> = runs.iter().map(|r| r[j]).collect();
            let k = e.len();
            let extrapolated = e[k - 1] + (e[k - 1] - e[k - 2]) / 3.0;
            let order = (k >= 3).then(|| ((e[k - 3] - e[k - 2]) / (e[k - 2] - e[k - 1])).abs().log2());
            let err = ((extrapolated - e[k - 1]) / extrapolated).abs();
            state(extrapolated, finest, order, err)
        })
        .collect();
    let mut warnings = warnings_for(&states, finest);
    if states.is_empty() {
        warnings.push("no bound state inside the box".into());
    }
    Ok(OracleResult {
        states,
        grid: *grid,
        levels,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::EULER_GAMMA;
    use std::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn half_order() -> Channel {
        Channel::from_nu_squared(0, 0.25).unwrap()
    }

    #[test]
    fn grid_nodes_start_at_core_and_increase() {
        for spacing in [Spacing::LogSpaced, Spacing::Uniform] {
            let g = GridSpec::new(101, 50.0, spacing).unwrap();
            let r = g.nodes(2.0);
            assert_eq!(r[0], 2.0);
            assert_eq!(*r.last().unwrap(), 100.0);
            assert!(r.windows(2).all(|w| w[1] > w[0]));
        }
        assert!(GridSpec::new(50, 50.0, Spacing::LogSpaced).is_err());
        assert!(GridSpec::new(500, 5.0, Spacing::LogSpaced).is_err());
    }

    #[test]
    fn pencil_is_symmetric() {
        for spacing in [Spacing::LogSpaced, Spacing::Uniform] {
            for bc in [BoundaryCondition::Robin(1.375), BoundaryCondition::Dirichlet] {
                let g = GridSpec::new(300, 200.0, spacing).unwrap();
                let p = assemble(&Channel::new(0.5, 0).unwrap(), bc, &g, 1.0).unwrap();
                assert!(p.max_asymmetry() < 1e-15);
                assert!(p.mass.iter().all(|m| *m > 0.0));
            }
        }
    }

    #[test]
    fn sturm_count_matches_dense_diagonal_case() {
        // Decoupled rows: eigenvalues are diag/mass.
        let p = Pencil {
            diag: vec![-3.0, 1.0, -1.0, 4.0],
            lower: vec![0.0; 3],
            upper: vec![0.0; 3],
            mass: vec![1.0, 2.0, 0.5, 1.0],
        };
        assert_eq!(p.count_below(0.0), 2);
        let ev = p.eigenvalues_below(0.0, 10).unwrap();
        assert!((ev[0] + 3.0).abs() < 1e-12 && (ev[1] + 2.0).abs() < 1e-12);
    }

    #[test]
    fn half_order_contrived_state_log_grid() {
        // K_{1/2}: c = -1/2 - kappa0 binds exactly at kappa0.
        let g = GridSpec::new(4000, 1000.0, Spacing::LogSpaced).unwrap();
        let r = solve_radial(&half_order(), BoundaryCondition::Robin(-0.8), &g).unwrap();
        assert!(rel(r.top().unwrap().epsilon, 0.0225) < 1e-4, "{:?}", r.top());
    }

    #[test]
    fn half_order_contrived_state_uniform_grid() {
        let g = GridSpec::new(8000, 200.0, Spacing::Uniform).unwrap();
        let r = solve_radial(&half_order(), BoundaryCondition::Robin(-0.8), &g).unwrap();
        assert!(rel(r.top().unwrap().epsilon, 0.0225) < 1e-4, "{:?}", r.top());
    }

    #[test]
    fn refinement_is_second_order_and_improves() {
        let ch = half_order();
        let bc = BoundaryCondition::Robin(-0.8);
        let g = GridSpec::new(500, 1000.0, Spacing::LogSpaced).unwrap();
        let r = refine(&ch, bc, &g, 3).unwrap();
        let s = r.top().unwrap();
        let p = s.order.unwrap();
        assert!((1.8..=2.2).contains(&p), "order {p}");
        let finest = solve_radial(&ch, bc, &g.refined().refined()).unwrap();
        assert!(rel(s.epsilon, 0.0225) < rel(finest.top().unwrap().epsilon, 0.0225));
    }

    #[test]
    fn dirichlet_tower_top_state() {
        // First zero of K_{i sqrt(3)/2}.
        let kappa1: f64 = 0.037_298_403_206_908_89;
        let ch = Channel::new(0.5, 0).unwrap();
        let g = GridSpec::new(2000, 2000.0, Spacing::LogSpaced).unwrap();
        let r = refine(&ch, BoundaryCondition::Dirichlet, &g, 3).unwrap();
        let top = r.top().unwrap();
        assert!(top.in_envelope);
        assert!(rel(top.epsilon, kappa1 * kappa1 / 4.0) < 1e-4, "{}", top.epsilon);
        // The gamma-phase tower misses it by far more than the discretization error.
        let eps1 = (-2.0 * PI / ch.nu_abs() - 2.0 * EULER_GAMMA).exp();
        assert!(rel(top.epsilon, eps1) > 0.3);
    }

    #[test]
    fn flat_limit_has_no_state_in_box() {
        let ch = Channel::new(0.9999, 0).unwrap();
        let r = solve_radial(&ch, BoundaryCondition::Robin(0.0), &GridSpec::default()).unwrap();
        assert!(r.states.is_empty());
    }

    #[test]
    fn core_radius_drops_out() {
        let ch = Channel::new(2.0, 0).unwrap();
        let bc = BoundaryCondition::Robin(-0.59375);
        let g = GridSpec::default();
        let e1 = solve_radial_at(&ch, bc, &g, 1.0).unwrap().top().unwrap().epsilon;
        for a in [1e-3, 1e3] {
            let e = solve_radial_at(&ch, bc, &g, a).unwrap().top().unwrap().epsilon;
            assert!(rel(e, e1) < 1e-9);
        }
    }

    #[test]
    fn refine_needs_two_levels() {
        assert!(refine(&half_order(), BoundaryCondition::Robin(-0.8), &GridSpec::default(), 1).is_err());
    }
}
