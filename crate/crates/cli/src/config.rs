//! Experiment parameters: flags, optional JSON config file, and the merged
//! record embedded in every output.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use disclab_core::discrepancy::DiscrepancyField;
use disclab_core::hyperbolic::OrliczSpec;
use disclab_core::points::{random_uniform, shifted_van_der_corput, van_der_corput, PointSet};

use crate::CliError;

/// Seed used when a stochastic command is given none.
pub const DEFAULT_SEED: u64 = 2024;

/// Number of random digit-shift masks tried for `--set vdc-shifted`
/// without an explicit `--shift`.
pub const SHIFT_CANDIDATES: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SetKind {
    Vdc,
    VdcShifted,
    Random,
    File,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Signs,
    Gaussian,
}

/// `--norm` argument.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NormSpec {
    L1,
    L2,
    Lp(f64),
    Sup,
    Exp(f64),
    LLogL(f64),
}

impl FromStr for NormSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let param = |v: &str| -> Result<f64, String> {
            let x: f64 = v.parse().map_err(|_| format!("invalid norm parameter {v:?}"))?;
            if x.is_finite() && x > 0.0 {
                Ok(x)
            } else {
                Err(format!("norm parameter must be positive, got {v}"))
            }
        };
        match s.split_once(':') {
            None => match s {
                "l1" => Ok(Self::L1),
                "l2" => Ok(Self::L2),
                "sup" => Ok(Self::Sup),
                _ => Err(format!("unknown norm {s:?}; expected l1|l2|lp:<p>|sup|exp:<q>|llogl:<b>")),
            },
            Some(("lp", v)) => {
                let p = param(v)?;
                if p < 1.0 {
                    return Err(format!("lp needs p >= 1, got {p}"));
                }
                Ok(Self::Lp(p))
            }
            Some(("exp", v)) => Ok(Self::Exp(param(v)?)),
            Some(("llogl", v)) => Ok(Self::LLogL(param(v)?)),
            Some((kind, _)) => Err(format!("unknown norm family {kind:?}")),
        }
    }
}

impl fmt::Display for NormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::L1 => write!(f, "l1"),
            Self::L2 => write!(f, "l2"),
            Self::Lp(p) => write!(f, "lp:{p}"),
            Self::Sup => write!(f, "sup"),
            Self::Exp(q) => write!(f, "exp:{q}"),
            Self::LLogL(b) => write!(f, "llogl:{b}"),
        }
    }
}

impl Serialize for NormSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for NormSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl NormSpec {
    pub fn orlicz(&self) -> Option<OrliczSpec> {
        match *self {
            Self::Exp(alpha) => Some(OrliczSpec::Exp { alpha }),
            Self::LLogL(beta) => Some(OrliczSpec::LLogL { beta }),
            _ => None,
        }
    }
}

/// Parameters shared by all subcommands. Every field is optional so that a
/// config file can supply it; flags given on the command line win.
#[derive(Clone, Debug, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    /// JSON file with default values for any of these parameters.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Point-set source.
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub set: Option<SetKind>,
    /// Point file for `--set file`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<PathBuf>,
    /// Van der Corput size: N = 2^k.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    /// Digit-shift mask for `--set vdc-shifted` (default: best of 16 random masks by exact L²).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shift: Option<u64>,
    /// Number of random points.
    #[arg(long = "N")]
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub big_n: Option<usize>,
    /// Dimension.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    /// Scale |r| = n of hyperbolic sums and dual functions.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    /// Largest n of a series (`mc`).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u32>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Halász's γ in (0,1].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// Constant of the sine test.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    /// l1 | l2 | lp:<p> | sup | exp:<q> | llogl:<b>
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norm: Option<NormSpec>,
    /// Grid level for sampled norms, per axis.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<u32>,
    /// Search method (`smallball`) or certificate variant (`riesz`).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget_seconds: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    /// Coefficient model for random hyperbolic sums.
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<Model>,
    /// Omit the shape (0, n) from Riesz products.
    #[arg(long)]
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub skip_first: bool,
    /// Comma-separated criterion numbers for `suite`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub criteria: Option<String>,
    /// Tolerance override `name=value` for `suite` (repeatable).
    #[arg(long = "tol")]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub tol: Vec<String>,
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($field:ident),*) => {
        $( if $top.$field.is_some() { $base.$field = $top.$field.clone(); } )*
    };
}

impl Params {
    /// Values from `--config` (if any) overridden by the explicit flags.
    pub fn resolve(self) -> Result<Self, CliError> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let mut base = Self::from_file(&path)?;
        let top = self;
        overlay!(base, top; set, points, k, shift, big_n, d, n, n_max, seed, gamma, c, norm, level,
                 method, budget_seconds, restarts, trials, model, criteria);
        base.skip_first |= top.skip_first;
        base.tol.extend(top.tol);
        base.config = Some(path);
        Ok(base)
    }

    fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    /// The point set described by `--set` and its companions, with the shift
    /// actually used for `vdc-shifted`.
    pub fn point_set(&self) -> Result<(PointSet, Option<u64>), CliError> {
        let set = self
            .set
            .ok_or_else(|| CliError::Usage("this command needs --set {vdc|vdc-shifted|random|file}".into()))?;
        let need_k = || self.k.ok_or_else(|| CliError::Usage("--set vdc needs --k".into()));
        match set {
            SetKind::Vdc => Ok((van_der_corput(need_k()?)?, None)),
            SetKind::VdcShifted => {
                let k = need_k()?;
                let shift = match self.shift {
                    Some(s) => s,
                    None => best_shift(k, &shift_masks(self.seed()))?.0,
                };
                Ok((shifted_van_der_corput(k, shift)?, Some(shift)))
            }
            SetKind::Random => {
                let n = self
                    .big_n
                    .ok_or_else(|| CliError::Usage("--set random needs --N".into()))?;
                let d = self.d.unwrap_or(2);
                Ok((random_uniform(n, d, self.seed())?, None))
            }
            SetKind::File => {
                let path = self
                    .points
                    .as_ref()
                    .ok_or_else(|| CliError::Usage("--set file needs --points <path>".into()))?;
                Ok((PointSet::from_file(path)?, None))
            }
        }
    }
}

/// The `SHIFT_CANDIDATES` random 64-bit masks of `seed`; a `k`-bit shift
/// uses the low `k` bits, so every `k` sees the same draws.
pub fn shift_masks(seed: u64) -> Vec<u64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..SHIFT_CANDIDATES).map(|_| rng.random()).collect()
}

/// Among `masks` truncated to `k` bits, the shift with the smallest exact
/// `‖D_N‖₂` (ties to the earlier mask), and that norm.
pub fn best_shift(k: u32, masks: &[u64]) -> Result<(u64, f64), CliError> {
    let low = if k >= 64 { u64::MAX } else { (1u64 << k) - 1 };
    let mut best = (0, f64::INFINITY);
    for &m in masks {
        let shift = m & low;
        let l2 = DiscrepancyField::new(shifted_van_der_corput(k, shift)?).l2_norm_exact()?;
        if l2 < best.1 {
            best = (shift, l2);
        }
    }
    Ok(best)
}
