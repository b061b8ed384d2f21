use std::ops::RangeInclusive;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use conespec::{Convention, Coupling, ExpansionForm, Spacing};

#[derive(Debug, Parser)]
#[command(name = "conespec", version, about = "Bound states of a particle on a cone")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Regime of each (alpha, l) channel.
    Classify(ClassifyArgs),
    /// Bound states of every channel by all applicable methods.
    Spectrum(SpectrumArgs),
    /// One observable over an alpha grid.
    Sweep(SweepArgs),
    /// Acceptance criteria and property checks.
    Verify(VerifyArgs),
    /// Text report of where the printed formulas and the numerics disagree.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    Integral,
    Literal,
}

impl From<ConventionArg> for Convention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Integral => Convention::Integral,
            ConventionArg::Literal => Convention::Literal,
        }
    }
}

/// Phase of the imaginary-order small-argument form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PhaseArg {
    /// `nu gamma`, as printed.
    Literal,
    /// `-arg Gamma(1 + i nu)`.
    Standard,
}

impl From<PhaseArg> for ExpansionForm {
    fn from(p: PhaseArg) -> Self {
        match p {
            PhaseArg::Literal => ExpansionForm::Literal,
            PhaseArg::Standard => ExpansionForm::Standard,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpacingArg {
    Log,
    Uniform,
}

impl From<SpacingArg> for Spacing {
    fn from(s: SpacingArg) -> Self {
        match s {
            SpacingArg::Log => Spacing::LogSpaced,
            SpacingArg::Uniform => Spacing::Uniform,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Observable {
    /// Largest |l| in the anti-cone window.
    Lmax,
    /// Bisected alpha at which the window widens.
    LmaxJumps,
    /// Channels holding a bound state.
    BoundChannels,
    /// Top exact state against its closed-form counterpart.
    Epsilon,
}

/// `lo:hi:step`, inclusive of `hi` when it lies on the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaRange {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl AlphaRange {
    pub fn values(&self) -> Vec<f64> {
        let n = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize;
        // Rounded so that 1.01 + 3 * 0.01 prints as 1.04.
        (0..=n)
            .map(|i| ((self.lo + i as f64 * self.step) * 1e12).round() / 1e12)
            .collect()
    }
}

pub fn parse_alpha_range(s: &str) -> Result<AlphaRange, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, step] = parts[..] else {
        return Err(format!("expected lo:hi:step, got '{s}'"));
    };
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("'{t}': {e}"));
    let r = AlphaRange {
        lo: num(lo)?,
        hi: num(hi)?,
        step: num(step)?,
    };
    if !(r.lo > 0.0 && r.hi.is_finite()) {
        return Err(format!("alpha bounds must be positive and finite, got '{s}'"));
    }
    if r.hi < r.lo {
        return Err(format!("empty range: hi < lo in '{s}'"));
    }
    if !(r.step > 0.0 && r.step.is_finite()) {
        return Err(format!("step must be > 0, got '{step}'"));
    }
    Ok(r)
}

/// `lo:hi` or a single `l`.
pub fn parse_l_range(s: &str) -> Result<RangeInclusive<i64>, String> {
    let num = |t: &str| t.trim().parse::<i64>().map_err(|e| format!("'{t}': {e}"));
    let (lo, hi) = match s.split_once(':') {
        Some((a, b)) => (num(a)?, num(b)?),
        None => {
            let l = num(s)?;
            (l, l)
        }
    };
    if hi < lo {
        return Err(format!("empty range: hi < lo in '{s}'"));
    }
    Ok(lo..=hi)
}

pub fn parse_positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(v) => Err(format!("must be positive and finite, got {v}")),
        Err(e) => Err(e.to_string()),
    }
}

/// A non-negative float, or `inf` for the Dirichlet limit.
pub fn parse_lambda(s: &str) -> Result<Coupling, String> {
    let v = match s.trim() {
        "inf" | "+inf" | "infinity" => f64::INFINITY,
        t => t.parse::<f64>().map_err(|e| e.to_string())?,
    };
    Coupling::from_lambda(v).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct AlphaSelect {
    /// Cone parameter (deficit alpha < 1, excess alpha > 1).
    #[arg(long, value_parser = parse_positive)]
    pub alpha: Option<f64>,
    /// Grid of alpha values as lo:hi:step.
    #[arg(long, value_parser = parse_alpha_range)]
    pub alpha_range: Option<AlphaRange>,
}

impl AlphaSelect {
    pub fn values(&self) -> Vec<f64> {
        match (self.alpha, self.alpha_range) {
            (Some(a), _) => vec![a],
            (None, Some(r)) => r.values(),
            (None, None) => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct Output {
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Write here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct Physics {
    /// Shell coupling; `inf` imposes Phi(a) = 0.
    #[arg(long, default_value = "1", value_parser = parse_lambda, allow_hyphen_values = true)]
    pub lambda: Coupling,
    #[arg(long, value_enum, default_value = "integral")]
    pub convention: ConventionArg,
    /// Phase used by the small-kappa matching condition.
    #[arg(long, value_enum, default_value = "literal")]
    pub phase: PhaseArg,
    /// Largest number of tower states per channel.
    #[arg(long, default_value_t = 8)]
    pub n_max: usize,
    /// Lower end of the kappa scan.
    #[arg(long, default_value = "1e-8", value_parser = parse_positive)]
    pub kappa_min: f64,
    /// Root tolerance in ln(kappa).
    #[arg(long, default_value = "1e-12", value_parser = parse_positive)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub alpha: AlphaSelect,
    #[arg(long, default_value = "-3:3", value_parser = parse_l_range, allow_hyphen_values = true)]
    pub l_range: RangeInclusive<i64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub alpha: AlphaSelect,
    #[arg(long, default_value = "-3:3", value_parser = parse_l_range, allow_hyphen_values = true)]
    pub l_range: RangeInclusive<i64>,
    #[command(flatten)]
    pub physics: Physics,
    /// Core radius a; the dimensionless spectrum does not depend on it.
    #[arg(long, default_value = "1", value_parser = parse_positive)]
    pub core_radius: f64,
    /// Add finite-difference states.
    #[arg(long)]
    pub oracle: bool,
    #[arg(long, requires = "oracle", default_value_t = 2000)]
    pub grid_points: usize,
    /// Box radius over core radius.
    #[arg(long, requires = "oracle", default_value = "1000", value_parser = parse_positive)]
    pub grid_extent: f64,
    #[arg(long, requires = "oracle", value_enum, default_value = "log")]
    pub grid_spacing: SpacingArg,
    /// Nested grids used for Richardson extrapolation.
    #[arg(long, requires = "oracle", default_value_t = 3)]
    pub levels: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, value_parser = parse_alpha_range)]
    pub alpha_range: AlphaRange,
    #[arg(long, value_enum)]
    pub observable: Observable,
    /// Channels for `epsilon`; other observables use the window.
    #[arg(long, default_value = "0:0", value_parser = parse_l_range, allow_hyphen_values = true)]
    pub l_range: RangeInclusive<i64>,
    #[command(flatten)]
    pub physics: Physics,
    /// Bisection tolerance in alpha for `lmax-jumps`.
    #[arg(long, default_value = "1e-12", value_parser = parse_positive)]
    pub alpha_tol: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Skip the acceptance criteria and run the property checks only.
    #[arg(long)]
    pub invariants_only: bool,
    /// Exit with status 2 when any check fails.
    #[arg(long)]
    pub strict: bool,
    #[arg(long, value_enum, default_value = "text")]
    pub format: VerifyFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_range_is_inclusive_and_rounded() {
        let v = parse_alpha_range("1.01:4.0:0.01").unwrap().values();
        assert_eq!(v.len(), 300);
        assert_eq!(v[3], 1.04);
        assert_eq!(*v.last().unwrap(), 4.0);
    }

    #[test]
    fn alpha_range_rejects_bad_input() {
        assert!(parse_alpha_range("1:2").is_err());
        assert!(parse_alpha_range("2:1:0.1").is_err());
        assert!(parse_alpha_range("1:2:0").is_err());
        assert!(parse_alpha_range("-1:2:0.5").is_err());
        assert!(parse_alpha_range("1:x:0.5").is_err());
    }

    #[test]
    fn l_range_accepts_negatives_and_singletons() {
        assert_eq!(parse_l_range("-2:2").unwrap(), -2..=2);
        assert_eq!(parse_l_range("-1").unwrap(), -1..=-1);
        assert!(parse_l_range("2:-2").is_err());
    }

    #[test]
    fn lambda_accepts_inf() {
        assert_eq!(parse_lambda("inf").unwrap(), Coupling::Dirichlet);
        assert_eq!(parse_lambda("0.5").unwrap(), Coupling::Finite(0.5));
        assert!(parse_lambda("-1").is_err());
        assert!(parse_lambda("nan").is_err());
    }
}
