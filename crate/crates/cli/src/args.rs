//! Command-line flags and their validation into a [`JobSpec`].

use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use dp1kstab_core::alpha::FormulaShift;
use dp1kstab_core::lattice::DivClass;
use dp1kstab_core::rational::Q;
use dp1kstab_core::sample::Stratum;

use crate::model::Normalization;
use crate::parse::{parse_class, ParseError};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Check,
    Decompose,
    Alpha,
    Verdict,
    Scan,
    OracleCompare,
    Selftest,
}

impl Command {
    pub fn label(self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::Decompose => "decompose",
            Command::Alpha => "alpha",
            Command::Verdict => "verdict",
            Command::Scan => "scan",
            Command::OracleCompare => "oracle-compare",
            Command::Selftest => "selftest",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum NormArg {
    #[value(name = "A")]
    A,
    #[value(name = "muA")]
    MuA,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StratumArg {
    BirHigh,
    BirMid,
    BirLow,
    ConicF1,
    ConicP1xp1,
}

impl From<StratumArg> for Stratum {
    fn from(s: StratumArg) -> Self {
        match s {
            StratumArg::BirHigh => Stratum::BirHigh,
            StratumArg::BirMid => Stratum::BirMid,
            StratumArg::BirLow => Stratum::BirLow,
            StratumArg::ConicF1 => Stratum::ConicF1,
            StratumArg::ConicP1xp1 => Stratum::ConicP1xP1,
        }
    }
}

/// Exact alpha-invariant and K-stability checks for polarized degree-1 del Pezzo surfaces.
///
/// Classes are nine rationals `b0,b1,...,b8` in the basis h, e1..e8, or a
/// symbolic sum such as `-K + 1/2*E1 + 1/3*B:(h-e1)`.
#[derive(Debug, Parser)]
#[command(name = "dp1kstab", version)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,

    /// Polarization class; the base point for `scan`.
    #[arg(long, allow_hyphen_values = true)]
    pub class: Option<String>,

    /// Scan direction class; repeat for a two-parameter grid.
    #[arg(long = "scan-dir", allow_hyphen_values = true)]
    pub scan_dir: Vec<String>,

    /// Half-open parameter interval `from:to` for the matching direction.
    #[arg(long, allow_hyphen_values = true)]
    pub range: Vec<String>,

    /// Grid points along the matching direction.
    #[arg(long)]
    pub steps: Vec<usize>,

    /// Also use the 2160 conic classes as oracle pivots.
    #[arg(long)]
    pub extended_oracle: bool,

    /// Normalization of alpha_c and nu [default: alpha_c for muA, nu for A].
    #[arg(long, value_enum)]
    pub normalization: Option<NormArg>,

    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,

    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Add decimal approximations (12 significant digits) next to exact values.
    #[arg(long)]
    pub approx: bool,

    /// oracle-compare: restrict the built-in suite to these strata.
    #[arg(long, value_enum)]
    pub stratum: Vec<StratumArg>,

    /// oracle-compare: random samples per stratum.
    #[arg(long, default_value_t = 4)]
    pub samples: usize,

    /// oracle-compare: sampler seed.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,

    /// Fault injection: keep only this many curves in the count check.
    #[arg(long, hide = true)]
    pub inject_truncate_curves: Option<usize>,

    /// Fault injection: add this rational to every closed-form denominator.
    #[arg(long, hide = true, allow_hyphen_values = true)]
    pub inject_formula_shift: Option<String>,
}

/// One scan direction with its half-open interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Axis {
    pub direction: DivClass,
    pub from: Q,
    pub to: Q,
    pub steps: usize,
}

impl Axis {
    /// `from + i (to - from)/steps` for `i = 0..steps`.
    pub fn points(&self) -> Vec<Q> {
        let n = Q::from_integer(self.steps.into());
        (0..self.steps).map(|i| &self.from + (&self.to - &self.from) * Q::from_integer(i.into()) / &n).collect()
    }
}

/// Deliberate defects for exercising the self-test.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Faults {
    pub truncate_curves: Option<usize>,
    pub formula_shift: FormulaShift,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JobSpec {
    pub command: Command,
    pub class: Option<DivClass>,
    pub axes: Vec<Axis>,
    pub extended_oracle: bool,
    pub normalization: Normalization,
    pub format: Format,
    pub approx: bool,
    pub strata: Vec<Stratum>,
    pub samples: usize,
    pub seed: u64,
    pub faults: Faults,
}

impl JobSpec {
    /// A job with default flags.
    pub fn new(command: Command, class: Option<DivClass>) -> Self {
        JobSpec {
            command,
            class,
            axes: Vec::new(),
            extended_oracle: false,
            normalization: Normalization::Default,
            format: Format::Text,
            approx: false,
            strata: Stratum::ALL.to_vec(),
            samples: 4,
            seed: 1,
            faults: Faults::default(),
        }
    }
}

fn parse_flag(flag: &str, text: &str) -> Result<DivClass, CliError> {
    parse_class(text).map_err(|err| CliError::Parse { flag: flag.to_string(), err })
}

fn parse_rational(flag: &str, text: &str) -> Result<Q, CliError> {
    let t = text.trim();
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let well_formed = {
        let mut parts = body.splitn(2, '/');
        let n = parts.next().unwrap_or("");
        let ok = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
        ok(n) && parts.next().is_none_or(|d| ok(d) && d.bytes().any(|b| b != b'0'))
    };
    if !well_formed {
        return Err(CliError::Parse {
            flag: flag.to_string(),
            err: ParseError::Syntax { pos: 1, msg: format!("'{text}' is not a rational p/q") },
        });
    }
    let x: Q = body.parse().expect("validated rational");
    Ok(if neg { -x } else { x })
}

fn parse_range(text: &str) -> Result<(Q, Q), CliError> {
    let Some((a, b)) = text.split_once(':') else {
        return Err(CliError::Usage(format!("--range '{text}' must look like a/b:c/d")));
    };
    let (from, to) = (parse_rational("--range", a)?, parse_rational("--range", b)?);
    if from >= to {
        return Err(CliError::Usage(format!("--range '{text}' is empty")));
    }
    Ok((from, to))
}

impl TryFrom<&Cli> for JobSpec {
    type Error = CliError;

    fn try_from(cli: &Cli) -> Result<Self, CliError> {
        let needs_class = matches!(
            cli.command,
            Command::Check | Command::Decompose | Command::Alpha | Command::Verdict | Command::Scan
        );
        let class = cli.class.as_deref().map(|t| parse_flag("--class", t)).transpose()?;
        if needs_class && class.is_none() {
            return Err(CliError::Usage(format!("{} requires --class", cli.command.label())));
        }
        if cli.command == Command::Selftest && class.is_some() {
            return Err(CliError::Usage("selftest takes no --class".into()));
        }

        let n = cli.scan_dir.len();
        if cli.range.len() != n || cli.steps.len() != n {
            return Err(CliError::Usage("each --scan-dir needs one --range and one --steps".into()));
        }
        if cli.command == Command::Scan && !(1..=2).contains(&n) {
            return Err(CliError::Usage("scan takes one or two --scan-dir".into()));
        }
        if cli.command != Command::Scan && n > 0 {
            return Err(CliError::Usage("--scan-dir is only valid with scan".into()));
        }
        let mut axes = Vec::with_capacity(n);
        for k in 0..n {
            let direction = parse_flag("--scan-dir", &cli.scan_dir[k])?;
            let (from, to) = parse_range(&cli.range[k])?;
            if cli.steps[k] == 0 {
                return Err(CliError::Usage("--steps must be positive".into()));
            }
            axes.push(Axis { direction, from, to, steps: cli.steps[k] });
        }

        if cli.command == Command::Selftest && cli.format == Format::Csv {
            return Err(CliError::Usage("selftest has no CSV form".into()));
        }
        if cli.command == Command::OracleCompare && class.is_some() && !cli.stratum.is_empty() {
            return Err(CliError::Usage("--stratum and --class are exclusive".into()));
        }

        let formula_shift = match &cli.inject_formula_shift {
            Some(t) => FormulaShift(parse_rational("--inject-formula-shift", t)?),
            None => FormulaShift::default(),
        };
        let strata = if cli.stratum.is_empty() {
            Stratum::ALL.to_vec()
        } else {
            cli.stratum.iter().map(|&s| s.into()).collect()
        };
        Ok(JobSpec {
            command: cli.command,
            class,
            axes,
            extended_oracle: cli.extended_oracle,
            normalization: match cli.normalization {
                None => Normalization::Default,
                Some(NormArg::A) => Normalization::A,
                Some(NormArg::MuA) => Normalization::MuA,
                Some(NormArg::Both) => Normalization::Both,
            },
            format: cli.format,
            approx: cli.approx,
            strata,
            samples: cli.samples,
            seed: cli.seed,
            faults: Faults { truncate_curves: cli.inject_truncate_curves, formula_shift },
        })
    }
}
