//! Per-channel spectra from every applicable method, cross-checked against
//! each other.

use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    closed_form_anticone, closed_form_cone_ground, dirichlet_tower, real_order_root_exists, relative_deviation,
    robin_constant, solve_cot_condition, solve_exact, tower_branch, AntiConeOutcome, BoundState, BoundaryCondition,
    Convention, ExactOptions, Method, SpectrumError,
};
use crate::cone::{classify, Channel, ConeParams, Coupling, Regime};
use crate::radial::{refine, GridSpec};
use crate::special::ExpansionForm;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleOptions {
    pub grid: GridSpec,
    pub levels: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            grid: GridSpec::default(),
            levels: 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumOptions {
    pub convention: Convention,
    /// Phase used by the cot condition.
    pub form: ExpansionForm,
    pub exact: ExactOptions,
    /// Adds finite-difference states when set.
    pub oracle: Option<OracleOptions>,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self {
            convention: Convention::Integral,
            form: ExpansionForm::Literal,
            exact: ExactOptions::default(),
            oracle: None,
        }
    }
}

/// Relative gap in `epsilon` between `method` and `reference` on one branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Deviation {
    pub l: i64,
    pub branch: u32,
    pub method: Method,
    pub reference: Method,
    pub relative: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub convention: Convention,
    pub epsilon: Option<f64>,
    pub relative_deviation: Option<f64>,
}

/// Which Robin-constant convention reproduces a closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Adjudication {
    pub l: i64,
    /// What is being reproduced.
    pub subject: Method,
    /// What each candidate is compared against.
    pub reference: Method,
    pub candidates: Vec<Candidate>,
    pub selected: Option<Convention>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelReport {
    pub l: i64,
    pub nu_squared: f64,
    pub regime: Regime,
    /// `None` for the Dirichlet condition.
    pub robin_constant: Option<f64>,
    /// Sorted by branch, then method.
    pub states: Vec<BoundState>,
    pub deviations: Vec<Deviation>,
    pub notes: Vec<String>,
    pub error: Option<String>,
}

impl ChannelReport {
    pub fn states_by(&self, method: Method) -> impl Iterator<Item = &BoundState> {
        self.states.iter().filter(move |s| s.method == method)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub params: ConeParams,
    pub options: SpectrumOptions,
    pub channels: Vec<ChannelReport>,
    pub adjudications: Vec<Adjudication>,
    pub warnings: Vec<String>,
}

impl SpectrumReport {
    pub fn channel(&self, l: i64) -> Option<&ChannelReport> {
        self.channels.iter().find(|c| c.l == l)
    }

    /// Channels holding at least one exact bound state.
    pub fn bound_channels(&self) -> Vec<i64> {
        self.channels
            .iter()
            .filter(|c| c.states_by(Method::ExactBessel).next().is_some())
            .map(|c| c.l)
            .collect()
    }
}

/// Runs every applicable method on each channel of `l_range`. Channels are
/// solved in parallel; the report is ordered by `l`. A failing channel is
/// recorded in its `error` field and in `warnings`.
pub fn full_spectrum(params: &ConeParams, l_range: RangeInclusive<i64>, opts: &SpectrumOptions) -> SpectrumReport {
    let ls: Vec<i64> = l_range.collect();
    let results: Vec<(ChannelReport, Vec<Adjudication>)> =
        ls.par_iter().map(|&l| channel_report(params, l, opts)).collect();
    let mut channels = Vec::with_capacity(results.len());
    let mut adjudications = Vec::new();
    let mut warnings = Vec::new();
    for (ch, adj) in results {
        if let Some(e) = &ch.error {
            warnings.push(format!("l = {}: {e}", ch.l));
        }
        for n in &ch.notes {
            if n.starts_with("warning:") {
                warnings.push(format!("l = {}: {}", ch.l, n.trim_start_matches("warning: ")));
            }
        }
        channels.push(ch);
        adjudications.extend(adj);
    }
    SpectrumReport {
        params: *params,
        options: *opts,
        channels,
        adjudications,
        warnings,
    }
}

fn channel_report(params: &ConeParams, l: i64, opts: &SpectrumOptions) -> (ChannelReport, Vec<Adjudication>) {
    let regime = classify(params.alpha(), l);
    let mut report = ChannelReport {
        l,
        nu_squared: crate::cone::nu_squared(params.alpha(), l),
        regime: regime.clone().unwrap_or(Regime::Scattering),
        robin_constant: None,
        states: Vec::new(),
        deviations: Vec::new(),
        notes: Vec::new(),
        error: None,
    };
    let mut adjudications = Vec::new();
    let result = regime.map_err(SpectrumError::from).and_then(|regime| {
        let channel = params.channel(l)?;
        let bc = robin_constant(params, &channel, opts.convention).boundary();
        report.robin_constant = match bc {
            BoundaryCondition::Robin(c) => Some(c),
            BoundaryCondition::Dirichlet => None,
        };
        match regime {
            Regime::BoundTowerChannel => tower_channel(params, &channel, bc, opts, &mut report, &mut adjudications),
            Regime::BoundByDelta => delta_channel(params, &channel, bc, opts, &mut report, &mut adjudications),
            Regime::Scattering => {
                report
                    .notes
                    .push("cone with l != 0: centrifugal and shell terms both repulsive, no bound state".into());
                Ok(())
            }
            Regime::EssentiallySelfAdjoint => {
                report
                    .notes
                    .push("nu^2 >= 1: no self-adjoint extension needed and no bound state".into());
                Ok(())
            }
        }
    });
    if let Err(e) = result {
        report.error = Some(e.to_string());
    }
    report.states.sort_by(|a, b| a.branch.cmp(&b.branch).then(a.method.cmp(&b.method)));
    (report, adjudications)
}

fn push_deviations(report: &mut ChannelReport, method: Method, reference: Method) {
    let refs: Vec<BoundState> = report.states_by(reference).copied().collect();
    let devs: Vec<Deviation> = report
        .states_by(method)
        .filter_map(|s| {
            refs.iter().find(|r| r.branch == s.branch).map(|r| Deviation {
                l: s.l,
                branch: s.branch,
                method,
                reference,
                relative: relative_deviation(s.epsilon, r.epsilon),
            })
        })
        .collect();
    report.deviations.extend(devs);
}

fn add_oracle(
    channel: &Channel,
    bc: BoundaryCondition,
    opts: &SpectrumOptions,
    report: &mut ChannelReport,
) -> Result<(), SpectrumError> {
    let Some(o) = opts.oracle else { return Ok(()) };
    match refine(channel, bc, &o.grid, o.levels) {
        Ok(res) => {
            for (i, s) in res.states.iter().enumerate() {
                let branch = if channel.is_imaginary() {
                    tower_branch(channel.nu_abs(), bc, s.kappa)
                } else {
                    i as u32
                };
                if !s.in_envelope {
                    report.notes.push(format!(
                        "radial_fd state at kappa = {:.6e} lies outside the validity envelope",
                        s.kappa
                    ));
                }
                report.states.push(BoundState::from_epsilon(
                    channel.l,
                    branch,
                    s.epsilon,
                    Method::RadialFd,
                    s.error_estimate,
                ));
            }
            for w in res.warnings {
                report.notes.push(format!("warning: radial_fd: {w}"));
            }
        }
        Err(e) => report.notes.push(format!("warning: radial_fd failed: {e}")),
    }
    push_deviations(report, Method::RadialFd, Method::ExactBessel);
    Ok(())
}

fn tower_channel(
    params: &ConeParams,
    channel: &Channel,
    bc: BoundaryCondition,
    opts: &SpectrumOptions,
    report: &mut ChannelReport,
    adjudications: &mut Vec<Adjudication>,
) -> Result<(), SpectrumError> {
    let n_max = opts.exact.n_max as u32;
    let exact = solve_exact(channel, bc, &opts.exact)?;
    report.states.extend(exact.iter().copied());

    match params.coupling() {
        Coupling::Dirichlet => {
            for n in 1..=n_max {
                report.states.push(dirichlet_tower(channel, n)?);
            }
            push_deviations(report, Method::ClosedFormDirichlet, Method::ExactBessel);
        }
        Coupling::Finite(_) => {
            for n in 0..n_max {
                report.states.push(solve_cot_condition(channel, bc, n, opts.form)?);
            }
            push_deviations(report, Method::CotCondition, Method::ExactBessel);
            if channel.l == 0 && params.is_cone() {
                let cf = closed_form_cone_ground(params)?;
                report.states.push(cf);
                adjudications.push(adjudicate_cone(params, channel, &cf)?);
                if !exact.iter().any(|s| s.branch == 0) {
                    let top = exact.first().map(|s| s.kappa).unwrap_or(f64::NAN);
                    report.notes.push(format!(
                        "closed-form branch-0 state (kappa = {:.6e}) has no exact counterpart; the top exact root (kappa = {:.6e}) lies on branch 1",
                        cf.kappa, top
                    ));
                }
            }
        }
    }
    add_oracle(channel, bc, opts, report)
}

fn adjudicate_cone(params: &ConeParams, channel: &Channel, cf: &BoundState) -> Result<Adjudication, SpectrumError> {
    let mut candidates = Vec::new();
    for convention in [Convention::Integral, Convention::Literal] {
        let bc = robin_constant(params, channel, convention).boundary();
        let cot = solve_cot_condition(channel, bc, 0, ExpansionForm::Literal)?;
        candidates.push(Candidate {
            convention,
            epsilon: Some(cot.epsilon),
            relative_deviation: Some(relative_deviation(cf.epsilon, cot.epsilon)),
        });
    }
    let selected = select(&candidates);
    Ok(Adjudication {
        l: channel.l,
        subject: Method::ClosedFormCone,
        reference: Method::CotCondition,
        candidates,
        selected,
        note: "closed form compared with branch 0 of the cot condition under each convention".into(),
    })
}

fn select(candidates: &[Candidate]) -> Option<Convention> {
    candidates
        .iter()
        .filter_map(|c| c.relative_deviation.map(|d| (c.convention, d)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(c, _)| c)
}

fn delta_channel(
    params: &ConeParams,
    channel: &Channel,
    bc: BoundaryCondition,
    opts: &SpectrumOptions,
    report: &mut ChannelReport,
    adjudications: &mut Vec<Adjudication>,
) -> Result<(), SpectrumError> {
    let exact = solve_exact(channel, bc, &opts.exact)?;
    report.states.extend(exact.iter().copied());
    let predicted = real_order_root_exists(channel.nu_abs(), bc);
    if predicted != !exact.is_empty() {
        report.notes.push(format!(
            "warning: existence criterion c < -nu predicts {} state(s) but the scan found {}",
            u8::from(predicted),
            exact.len()
        ));
    }
    if exact.is_empty() {
        report.notes.push("no bound state: c >= -nu".into());
    }

    let mut candidates = Vec::new();
    for convention in [Convention::Integral, Convention::Literal] {
        let outcome = closed_form_anticone(params, channel, convention)?;
        let state = outcome.state().copied();
        if convention == opts.convention {
            match &outcome {
                AntiConeOutcome::Bound { state, .. } => report.states.push(*state),
                AntiConeOutcome::NoBoundState { reason, .. } => {
                    report.notes.push(format!("closed form ({convention}): no bound state, {reason}"))
                }
                AntiConeOutcome::Threshold { .. } => report
                    .notes
                    .push(format!("warning: closed form ({convention}) is at threshold c = +-nu")),
            }
        }
        candidates.push(Candidate {
            convention,
            epsilon: state.map(|s| s.epsilon),
            relative_deviation: match (state, exact.first()) {
                (Some(s), Some(e)) => Some(relative_deviation(s.epsilon, e.epsilon)),
                _ => None,
            },
        });
    }
    push_deviations(report, Method::ClosedFormAntiCone, Method::ExactBessel);
    if !exact.is_empty() {
        adjudications.push(Adjudication {
            l: channel.l,
            subject: Method::ClosedFormAntiCone,
            reference: Method::ExactBessel,
            selected: select(&candidates),
            candidates,
            note: "closed form compared with the exact root under each convention".into(),
        });
    }
    add_oracle(channel, bc, opts, report)
}
