//! Run configuration: a TOML document merged with command-line overrides.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, GraphSpec};
use crate::nonlinearity::NonlinearitySpec;
use crate::pde::Problem;
use crate::selfsimilar::ProfileKind;

/// Environment variable overriding the root for relative output directories.
pub const OUTPUT_ROOT_ENV: &str = "NLDIFF_OUTPUT_ROOT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Profile,
    Constant,
    Pde,
    VerifyVaradhan,
    VerifyCurvature,
    VerifyAsympvol,
    VerifyBarriers,
    VerifyStationarity,
    VerifyOrdering,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Profile => "profile",
            Self::Constant => "constant",
            Self::Pde => "pde",
            Self::VerifyVaradhan => "verify-varadhan",
            Self::VerifyCurvature => "verify-curvature",
            Self::VerifyAsympvol => "verify-asympvol",
            Self::VerifyBarriers => "verify-barriers",
            Self::VerifyStationarity => "verify-stationarity",
            Self::VerifyOrdering => "verify-ordering",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum KindArg {
    Half,
    Whole,
}

impl From<KindArg> for ProfileKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Half => ProfileKind::HalfLine,
            KindArg::Whole => ProfileKind::WholeLine,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ProblemArg {
    Ibvp,
    Cauchy,
}

impl From<ProblemArg> for Problem {
    fn from(p: ProblemArg) -> Self {
        match p {
            ProblemArg::Ibvp => Problem::Ibvp,
            ProblemArg::Cauchy => Problem::Cauchy,
        }
    }
}

/// A nonlinearity given either in short form (`"sine:0.1"`) or as a table.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NlEntry {
    Short(String),
    Full(NonlinearitySpec),
}

/// A domain given either in short form (`"parabola:0.5"`) or as a table.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DomainEntry {
    Short(String),
    Full(DomainSpec),
}

/// Keys accepted in a configuration file; every key can also be set by a flag.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub command: Option<Command>,
    pub nonlinearity: Option<NlEntry>,
    pub domain: Option<DomainEntry>,
    pub c: Option<f64>,
    pub kind: Option<KindArg>,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    #[serde(rename = "R")]
    pub radius: Option<f64>,
    pub h: Option<f64>,
    pub pad: Option<f64>,
    pub times: Option<Vec<f64>>,
    pub levels: Option<Vec<f64>>,
    pub band: Option<Vec<f64>>,
    pub region: Option<Vec<f64>>,
    pub x_range: Option<Vec<f64>>,
    pub contact: Option<Vec<f64>>,
    pub epsilon: Option<f64>,
    pub shift: Option<f64>,
    pub tolerance: Option<f64>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub problem: Option<ProblemArg>,
    pub output_dir: Option<PathBuf>,
}

/// Command-line flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// TOML configuration file; flags override its keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// heat | scaled:k | sine:a | ramp[:d1,d2,s0,w] | table:path.csv
    #[arg(long = "nl")]
    pub nonlinearity: Option<String>,
    /// half-space | parabola:rho | sinusoid:a[,k] | affine:slope | ball:r | exterior:r
    #[arg(long)]
    pub domain: Option<String>,
    /// Boundary level c of the self-similar profile.
    #[arg(long)]
    pub c: Option<f64>,
    /// Half-line (IBVP) or whole-line (Cauchy) profile.
    #[arg(long, value_enum)]
    pub kind: Option<KindArg>,
    /// Space dimension.
    #[arg(long = "N")]
    pub n: Option<usize>,
    /// Ball radius.
    #[arg(long = "R")]
    pub radius: Option<f64>,
    /// Grid spacing.
    #[arg(long)]
    pub h: Option<f64>,
    /// Window padding around the region of interest.
    #[arg(long)]
    pub pad: Option<f64>,
    /// Output times, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub times: Option<Vec<f64>>,
    /// Level-set distances s, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub levels: Option<Vec<f64>>,
    /// Probe distance band rho0,rho1.
    #[arg(long, value_delimiter = ',')]
    pub band: Option<Vec<f64>>,
    /// Barrier probe region rho0,rho1.
    #[arg(long, value_delimiter = ',')]
    pub region: Option<Vec<f64>>,
    /// Horizontal sampling range a,b for level-set sampling.
    #[arg(long = "x-range", value_delimiter = ',', allow_hyphen_values = true)]
    pub x_range: Option<Vec<f64>>,
    /// Contact point on the boundary, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub contact: Option<Vec<f64>>,
    /// Barrier parameter ε.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Offset of the nested half-spaces in verify-ordering.
    #[arg(long)]
    pub shift: Option<f64>,
    /// Pass tolerance of the verification report.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Samples along the parallel surface in verify-stationarity.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Random seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Boundary-value problem or Cauchy problem.
    #[arg(long, value_enum)]
    pub problem: Option<ProblemArg>,
    /// Output directory (relative paths resolve under $NLDIFF_OUTPUT_ROOT when set).
    #[arg(long = "out")]
    pub output_dir: Option<PathBuf>,
    /// Worker threads for the compute kernels.
    #[arg(long)]
    pub threads: Option<usize>,
}

/// Validated configuration of one run.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub nonlinearity: NonlinearitySpec,
    pub domain: DomainSpec,
    pub c: f64,
    pub kind: ProfileKind,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "R")]
    pub radius: f64,
    pub h: f64,
    pub pad: Option<f64>,
    pub times: Vec<f64>,
    pub levels: Vec<f64>,
    pub band: (f64, f64),
    pub region: (f64, f64),
    pub x_range: (f64, f64),
    pub contact: Vec<f64>,
    pub epsilon: f64,
    pub shift: f64,
    pub tolerance: Option<f64>,
    pub samples: usize,
    pub seed: u64,
    pub problem: Problem,
    pub output_dir: PathBuf,
}

pub const DEFAULT_SEED: u64 = 20_240_601;

/// Parses the short domain form for dimension `n`.
pub fn parse_domain(text: &str, n: usize) -> Result<DomainSpec> {
    let (head, rest) = match text.split_once(':') {
        Some((h, r)) => (h, Some(r)),
        None => (text, None),
    };
    let nums = |r: Option<&str>| -> Result<Vec<f64>> {
        r.unwrap_or("")
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|v| v.trim().parse::<f64>().map_err(|_| Error::Config(format!("bad number '{v}' in domain '{text}'"))))
            .collect()
    };
    let p = nums(rest)?;
    let one = |name: &str| -> Result<f64> {
        p.first().copied().ok_or_else(|| Error::Config(format!("domain '{name}' needs a parameter, e.g. '{name}:0.5'")))
    };
    let mut up = vec![0.0; n];
    if n > 0 {
        up[n - 1] = 1.0;
    }
    let centre = |r: f64, sign: f64| {
        let mut c = vec![0.0; n];
        c[n - 1] = sign * r;
        c
    };
    Ok(match head {
        "half-space" | "half-plane" => DomainSpec::HalfSpace { normal: up, offset: 0.0 },
        "parabola" | "paraboloid" => DomainSpec::Graph { dim: n, graph: GraphSpec::Paraboloid { rho: one(head)? } },
        "sinusoid" => DomainSpec::Graph {
            dim: n,
            graph: GraphSpec::Sinusoid { amplitude: one(head)?, frequency: p.get(1).copied().unwrap_or(1.0) },
        },
        "affine" => DomainSpec::Graph { dim: n, graph: GraphSpec::Affine { slope: { let mut s = vec![0.0; n.saturating_sub(1)]; if let Some(v) = s.first_mut() { *v = one(head)?; } s }, offset: 0.0 } },
        // balls touching the origin from above (interior) or below (exterior)
        "ball" => { let r = one(head)?; DomainSpec::BallInterior { center: centre(r, 1.0), radius: r } }
        "exterior" => { let r = one(head)?; DomainSpec::BallExterior { center: centre(r, -1.0), radius: r } }
        _ => return Err(Error::Config(format!("unknown domain '{text}'"))),
    })
}

fn pair(v: Option<Vec<f64>>, default: (f64, f64), name: &str) -> Result<(f64, f64)> {
    match v {
        None => Ok(default),
        Some(v) if v.len() == 2 && v[0] < v[1] => Ok((v[0], v[1])),
        Some(v) => Err(Error::Config(format!("{name} must be two increasing numbers, got {v:?}"))),
    }
}

fn resolve_output(dir: PathBuf) -> PathBuf {
    match std::env::var_os(OUTPUT_ROOT_ENV) {
        Some(root) if dir.is_relative() => Path::new(&root).join(dir),
        _ => dir,
    }
}

impl RunConfig {
    /// Merges the optional file with flag overrides and validates the result.
    pub fn from_sources(command: Command, flags: &Flags) -> Result<Self> {
        let file = match &flags.config {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?;
                toml::from_str::<FileConfig>(&text).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?
            }
            None => FileConfig::default(),
        };
        if let Some(c) = file.command {
            if c != command {
                return Err(Error::Config(format!("configuration file is for '{}', not '{}'", c.name(), command.name())));
            }
        }
        let n = flags.n.or(file.n).unwrap_or(2);
        if n < 2 {
            return Err(Error::Config(format!("N must be at least 2, got {n}")));
        }
        let nonlinearity = match (flags.nonlinearity.clone(), file.nonlinearity) {
            (Some(s), _) | (None, Some(NlEntry::Short(s))) => NonlinearitySpec::parse(&s)?,
            (None, Some(NlEntry::Full(spec))) => spec,
            (None, None) => NonlinearitySpec::Heat,
        };
        let domain = match (flags.domain.clone(), file.domain) {
            (Some(s), _) | (None, Some(DomainEntry::Short(s))) => parse_domain(&s, n)?,
            (None, Some(DomainEntry::Full(spec))) => spec,
            (None, None) => parse_domain("half-space", n)?,
        };
        let times = flags.times.clone().or(file.times).unwrap_or_else(|| vec![1e-3, 2e-3, 4e-3]);
        let radius = flags.radius.or(file.radius).unwrap_or(0.25);
        let levels = flags.levels.clone().or(file.levels).unwrap_or_else(|| vec![1e-2 * radius, 1e-3 * radius, 1e-4 * radius]);
        let cfg = Self {
            command,
            nonlinearity,
            domain,
            c: flags.c.or(file.c).unwrap_or(1.0),
            kind: flags.kind.or(file.kind).unwrap_or(KindArg::Half).into(),
            n,
            radius,
            h: flags.h.or(file.h).unwrap_or(5e-3),
            pad: flags.pad.or(file.pad),
            times,
            levels,
            band: pair(flags.band.clone().or(file.band), (0.1, 0.3), "band")?,
            region: pair(flags.region.clone().or(file.region), (0.02, 0.15), "region")?,
            x_range: pair(flags.x_range.clone().or(file.x_range), (-0.5, 0.5), "x-range")?,
            contact: flags.contact.clone().or(file.contact).unwrap_or_else(|| vec![0.0; n]),
            epsilon: flags.epsilon.or(file.epsilon).unwrap_or(0.1),
            shift: flags.shift.or(file.shift).unwrap_or(0.05),
            tolerance: flags.tolerance.or(file.tolerance),
            samples: flags.samples.or(file.samples).unwrap_or(401),
            seed: flags.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            problem: flags.problem.or(file.problem).unwrap_or(ProblemArg::Ibvp).into(),
            output_dir: resolve_output(flags.output_dir.clone().or(file.output_dir).unwrap_or_else(|| PathBuf::from("nldiff-out").join(command.name()))),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        let positive = |v: f64, name: &str| if v > 0.0 && v.is_finite() { Ok(()) } else { Err(Error::Config(format!("{name} must be positive, got {v}"))) };
        positive(self.c, "c")?;
        positive(self.radius, "R")?;
        positive(self.h, "h")?;
        positive(self.epsilon, "epsilon")?;
        positive(self.shift, "shift")?;
        if let Some(t) = self.tolerance {
            positive(t, "tolerance")?;
        }
        if let Some(p) = self.pad {
            positive(p, "pad")?;
        }
        let sorted = |v: &[f64], name: &str, increasing: bool| -> Result<()> {
            if v.is_empty() || v.iter().any(|x| !(*x > 0.0)) {
                return Err(Error::Config(format!("{name} must be a nonempty list of positive numbers")));
            }
            let ok = v.windows(2).all(|w| if increasing { w[1] > w[0] } else { w[1] < w[0] });
            if !ok {
                let order = if increasing { "increasing" } else { "decreasing" };
                return Err(Error::Config(format!("{name} must be strictly {order}, got {v:?}")));
            }
            Ok(())
        };
        sorted(&self.times, "times", true)?;
        sorted(&self.levels, "levels", false)?;
        if self.contact.len() != self.n {
            return Err(Error::Config(format!("contact point needs {} coordinates", self.n)));
        }
        if self.samples < 2 {
            return Err(Error::Config("samples must be at least 2".into()));
        }
        Ok(())
    }
}
