use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use conespec::cone::{allowed_l_window, locate_window_jump, max_allowed_l, window_threshold};
use conespec::spectrum::{
    closed_form_anticone, dirichlet_tower, real_order_root_exists, relative_deviation, robin_constant,
    solve_cot_condition, solve_exact,
};
use conespec::{
    classify, discrepancy, full_spectrum, nu_squared, verify, ConeParams, Coupling, ExactOptions, GridSpec,
    OracleOptions, Regime, SpectrumOptions, SpectrumReport,
};

use crate::args::{
    ClassifyArgs, Format, Observable, Physics, ReportArgs, SpectrumArgs, SweepArgs, VerifyArgs, VerifyFormat,
};
use crate::table::{num, opt, Table};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

/// Rendered output plus anything that went wrong numerically on the way.
/// Failures do not suppress the output; they only set the exit status.
pub struct Outcome {
    pub text: String,
    pub warnings: Vec<String>,
    pub failures: Vec<String>,
}

impl Outcome {
    fn clean(text: String) -> Self {
        Self {
            text,
            warnings: Vec::new(),
            failures: Vec::new(),
        }
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn render<R: Row + Serialize>(rows: &[R], format: Format) -> Result<String, CliError> {
    match format {
        Format::Csv => {
            let mut t = Table::new(R::HEADER);
            for r in rows {
                t.push(r.cells());
            }
            t.to_csv().map_err(|e| CliError::Io(e.into()))
        }
        Format::Json => json(rows),
    }
}

fn json<T: Serialize + ?Sized>(v: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| CliError::Numerical(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

trait Row {
    const HEADER: &'static [&'static str];
    fn cells(&self) -> Vec<String>;
}

#[derive(Serialize)]
struct ClassifyRow {
    alpha: f64,
    l: i64,
    nu2: f64,
    regime: Regime,
}

impl Row for ClassifyRow {
    const HEADER: &'static [&'static str] = &["alpha", "l", "nu2", "regime"];

    fn cells(&self) -> Vec<String> {
        vec![num(self.alpha), self.l.to_string(), num(self.nu2), self.regime.to_string()]
    }
}

pub fn classify_cmd(a: &ClassifyArgs) -> Result<Outcome, CliError> {
    let mut rows = Vec::new();
    for alpha in a.alpha.values() {
        for l in a.l_range.clone() {
            rows.push(ClassifyRow {
                alpha,
                l,
                nu2: nu_squared(alpha, l),
                regime: classify(alpha, l).map_err(usage)?,
            });
        }
    }
    Ok(Outcome::clean(render(&rows, a.output.format)?))
}

fn exact_options(p: &Physics) -> Result<ExactOptions, CliError> {
    let o = ExactOptions {
        n_max: p.n_max,
        kappa_min: p.kappa_min,
        ln_tol: p.tol,
        ..ExactOptions::default()
    };
    if p.n_max == 0 {
        return Err(usage("--n-max must be at least 1"));
    }
    if o.kappa_min >= o.kappa_max {
        return Err(usage(format!("--kappa-min must be below {}", o.kappa_max)));
    }
    Ok(o)
}

fn params(alpha: f64, coupling: Coupling, core_radius: f64) -> Result<ConeParams, CliError> {
    ConeParams::new(alpha, core_radius, coupling).map_err(usage)
}

pub fn spectrum_cmd(a: &SpectrumArgs) -> Result<Outcome, CliError> {
    let oracle = if a.oracle {
        let grid = GridSpec::new(a.grid_points, a.grid_extent, a.grid_spacing.into()).map_err(usage)?;
        if a.levels < 2 {
            return Err(usage("--levels must be at least 2"));
        }
        Some(OracleOptions {
            grid,
            levels: a.levels,
        })
    } else {
        None
    };
    let opts = SpectrumOptions {
        convention: a.physics.convention.into(),
        form: a.physics.phase.into(),
        exact: exact_options(&a.physics)?,
        oracle,
    };
    let alphas = a.alpha.values();
    let mut reports = Vec::with_capacity(alphas.len());
    for &alpha in &alphas {
        let p = params(alpha, a.physics.lambda, a.core_radius)?;
        reports.push(full_spectrum(&p, a.l_range.clone(), &opts));
    }

    let mut out = Outcome::clean(String::new());
    for r in &reports {
        let mut errors = Vec::new();
        for c in &r.channels {
            if let Some(e) = &c.error {
                errors.push(format!("l = {}: {e}", c.l));
            }
        }
        // Channel errors are also listed among the warnings; report them once.
        for w in r.warnings.iter().filter(|w| !errors.contains(w)) {
            out.warnings.push(format!("alpha = {}, {w}", num(r.params.alpha())));
        }
        for e in errors {
            out.failures.push(format!("alpha = {}, {e}", num(r.params.alpha())));
        }
    }
    out.text = match a.output.format {
        Format::Json if a.alpha.alpha.is_some() => json(&reports[0])?,
        Format::Json => json(&reports)?,
        Format::Csv => spectrum_csv(&reports)?,
    };
    Ok(out)
}

pub const SPECTRUM_COLUMNS: &[&str] = &[
    "alpha",
    "l",
    "nu2",
    "regime",
    "convention",
    "method",
    "branch_n",
    "epsilon",
    "kappa",
    "residual",
];

fn spectrum_csv(reports: &[SpectrumReport]) -> Result<String, CliError> {
    let mut t = Table::new(SPECTRUM_COLUMNS);
    for r in reports {
        for c in &r.channels {
            for s in &c.states {
                t.push(vec![
                    num(r.params.alpha()),
                    c.l.to_string(),
                    num(c.nu_squared),
                    c.regime.to_string(),
                    r.options.convention.to_string(),
                    s.method.to_string(),
                    s.branch.to_string(),
                    num(s.epsilon),
                    num(s.kappa),
                    num(s.residual),
                ]);
            }
        }
    }
    t.to_csv().map_err(|e| CliError::Io(e.into()))
}

#[derive(Serialize)]
struct LmaxRow {
    alpha: f64,
    lmax: i64,
}

impl Row for LmaxRow {
    const HEADER: &'static [&'static str] = &["alpha", "lmax"];

    fn cells(&self) -> Vec<String> {
        vec![num(self.alpha), self.lmax.to_string()]
    }
}

#[derive(Serialize)]
struct JumpRow {
    lmax_below: i64,
    lmax_above: i64,
    alpha: f64,
    closed_form: f64,
    abs_diff: f64,
}

impl Row for JumpRow {
    const HEADER: &'static [&'static str] = &["lmax_below", "lmax_above", "alpha", "closed_form", "abs_diff"];

    fn cells(&self) -> Vec<String> {
        vec![
            self.lmax_below.to_string(),
            self.lmax_above.to_string(),
            num(self.alpha),
            num(self.closed_form),
            num(self.abs_diff),
        ]
    }
}

#[derive(Serialize)]
struct BoundRow {
    alpha: f64,
    count: usize,
    channels: Vec<i64>,
}

impl Row for BoundRow {
    const HEADER: &'static [&'static str] = &["alpha", "count", "channels"];

    fn cells(&self) -> Vec<String> {
        let ls: Vec<String> = self.channels.iter().map(i64::to_string).collect();
        vec![num(self.alpha), self.count.to_string(), ls.join(";")]
    }
}

#[derive(Serialize)]
struct EpsilonRow {
    alpha: f64,
    l: i64,
    nu2: f64,
    regime: Regime,
    branch_n: Option<u32>,
    epsilon_exact: Option<f64>,
    kappa_exact: Option<f64>,
    epsilon_closed_form: Option<f64>,
    relative_deviation: Option<f64>,
}

impl Row for EpsilonRow {
    const HEADER: &'static [&'static str] = &[
        "alpha",
        "l",
        "nu2",
        "regime",
        "branch_n",
        "epsilon_exact",
        "kappa_exact",
        "epsilon_closed_form",
        "relative_deviation",
    ];

    fn cells(&self) -> Vec<String> {
        vec![
            num(self.alpha),
            self.l.to_string(),
            num(self.nu2),
            self.regime.to_string(),
            self.branch_n.map(|b| b.to_string()).unwrap_or_default(),
            opt(self.epsilon_exact),
            opt(self.kappa_exact),
            opt(self.epsilon_closed_form),
            opt(self.relative_deviation),
        ]
    }
}

pub fn sweep_cmd(a: &SweepArgs) -> Result<Outcome, CliError> {
    let alphas = a.alpha_range.values();
    let format = a.output.format;
    match a.observable {
        Observable::Lmax => {
            let rows = alphas
                .iter()
                .map(|&alpha| {
                    max_allowed_l(alpha)
                        .map(|lmax| LmaxRow { alpha, lmax })
                        .map_err(|e| usage(format!("--observable lmax: {e}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Outcome::clean(render(&rows, format)?))
        }
        Observable::LmaxJumps => {
            let lmax = alphas
                .iter()
                .map(|&x| max_allowed_l(x).map_err(|e| usage(format!("--observable lmax-jumps: {e}"))))
                .collect::<Result<Vec<_>, _>>()?;
            let mut rows = Vec::new();
            for i in 1..alphas.len() {
                if lmax[i] != lmax[i - 1] {
                    let at = locate_window_jump(alphas[i - 1], alphas[i], a.alpha_tol)
                        .map_err(|e| CliError::Numerical(e.to_string()))?;
                    let cf = window_threshold(lmax[i] as u32);
                    rows.push(JumpRow {
                        lmax_below: lmax[i - 1],
                        lmax_above: lmax[i],
                        alpha: at,
                        closed_form: cf,
                        abs_diff: (at - cf).abs(),
                    });
                }
            }
            Ok(Outcome::clean(render(&rows, format)?))
        }
        Observable::BoundChannels => {
            let conv = a.physics.convention.into();
            let rows = alphas
                .iter()
                .map(|&alpha| {
                    let p = params(alpha, a.physics.lambda, 1.0)?;
                    let channels = if p.is_cone() {
                        vec![0]
                    } else {
                        let mut v = Vec::new();
                        for l in allowed_l_window(alpha).map_err(usage)? {
                            let ch = p.channel(l).map_err(usage)?;
                            let bc = robin_constant(&p, &ch, conv).boundary();
                            if real_order_root_exists(ch.nu_abs(), bc) {
                                v.push(l);
                            }
                        }
                        v
                    };
                    Ok(BoundRow {
                        alpha,
                        count: channels.len(),
                        channels,
                    })
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            Ok(Outcome::clean(render(&rows, format)?))
        }
        Observable::Epsilon => {
            let exact = ExactOptions {
                n_max: 1,
                ..exact_options(&a.physics)?
            };
            let cells: Vec<(f64, i64)> = alphas
                .iter()
                .flat_map(|&x| a.l_range.clone().map(move |l| (x, l)))
                .collect();
            for &(x, _) in &cells {
                params(x, a.physics.lambda, 1.0)?;
            }
            let results: Vec<Result<EpsilonRow, String>> =
                cells.par_iter().map(|&(x, l)| epsilon_row(x, l, &a.physics, &exact)).collect();
            let mut rows = Vec::new();
            let mut failures = Vec::new();
            for r in results {
                match r {
                    Ok(row) => rows.push(row),
                    Err(e) => failures.push(e),
                }
            }
            Ok(Outcome {
                text: render(&rows, format)?,
                warnings: Vec::new(),
                failures,
            })
        }
    }
}

fn epsilon_row(alpha: f64, l: i64, phys: &Physics, exact: &ExactOptions) -> Result<EpsilonRow, String> {
    let tag = |e: &dyn std::fmt::Display| format!("alpha = {}, l = {l}: {e}", num(alpha));
    let p = ConeParams::new(alpha, 1.0, phys.lambda).map_err(|e| tag(&e))?;
    let regime = classify(alpha, l).map_err(|e| tag(&e))?;
    let mut row = EpsilonRow {
        alpha,
        l,
        nu2: nu_squared(alpha, l),
        regime,
        branch_n: None,
        epsilon_exact: None,
        kappa_exact: None,
        epsilon_closed_form: None,
        relative_deviation: None,
    };
    if !regime.supports_bound_states() {
        return Ok(row);
    }
    let ch = p.channel(l).map_err(|e| tag(&e))?;
    let bc = robin_constant(&p, &ch, phys.convention.into()).boundary();
    let top = solve_exact(&ch, bc, exact).map_err(|e| tag(&e))?.into_iter().next();
    let cf = match (regime, phys.lambda, top) {
        (Regime::BoundByDelta, _, _) => closed_form_anticone(&p, &ch, phys.convention.into())
            .map_err(|e| tag(&e))?
            .state()
            .map(|s| s.epsilon),
        (_, Coupling::Dirichlet, Some(t)) => Some(dirichlet_tower(&ch, t.branch.max(1)).map_err(|e| tag(&e))?.epsilon),
        (_, Coupling::Finite(_), Some(t)) => {
            Some(solve_cot_condition(&ch, bc, t.branch, phys.phase.into()).map_err(|e| tag(&e))?.epsilon)
        }
        _ => None,
    };
    if let Some(t) = top {
        row.branch_n = Some(t.branch);
        row.epsilon_exact = Some(t.epsilon);
        row.kappa_exact = Some(t.kappa);
        row.relative_deviation = cf.map(|c| relative_deviation(c, t.epsilon));
    }
    row.epsilon_closed_form = cf;
    Ok(row)
}

#[derive(Serialize)]
struct VerifyDump {
    criteria: Vec<verify::CriterionOutcome>,
    invariants: Vec<verify::InvariantOutcome>,
}

pub fn verify_cmd(a: &VerifyArgs) -> Result<Outcome, CliError> {
    let criteria = if a.invariants_only { Vec::new() } else { verify::all_criteria() };
    let invariants = verify::invariant_suite();
    let c_pass = criteria.iter().filter(|c| c.passed).count();
    let i_pass = invariants.iter().filter(|i| i.passed).count();

    let text = match a.format {
        VerifyFormat::Json => json(&VerifyDump {
            criteria: criteria.clone(),
            invariants: invariants.clone(),
        })?,
        VerifyFormat::Text => {
            let mut s = String::new();
            for c in &criteria {
                s.push_str(&format!("{}\n", c.summary_line()));
                for chk in c.failed_checks() {
                    s.push_str(&format!("    failed: {}\n", chk.label));
                }
            }
            for i in &invariants {
                let tag = if i.passed { "PASS" } else { "FAIL" };
                s.push_str(&format!("invariant [{tag}] {}: {}\n", i.name, i.detail));
            }
            if !a.invariants_only {
                s.push_str(&format!("criteria: {c_pass} passed, {} failed\n", criteria.len() - c_pass));
            }
            s.push_str(&format!("invariants: {i_pass} passed, {} failed\n", invariants.len() - i_pass));
            s
        }
    };
    let mut failures = Vec::new();
    if a.strict {
        failures.extend(criteria.iter().filter(|c| !c.passed).map(|c| format!("criterion {} failed", c.id)));
        failures.extend(invariants.iter().filter(|i| !i.passed).map(|i| format!("invariant '{}' failed", i.name)));
    }
    Ok(Outcome {
        text,
        warnings: Vec::new(),
        failures,
    })
}

pub fn report_cmd(_: &ReportArgs) -> Result<Outcome, CliError> {
    let r = discrepancy::build().map_err(|e| CliError::Numerical(e.to_string()))?;
    Ok(Outcome::clean(r.render()))
}
