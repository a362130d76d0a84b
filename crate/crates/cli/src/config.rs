//! Run configuration: command-line flags layered over an optional key-value file.
//!
//! The file holds one `key = value` per line with `#` comments. Keys use the
//! flag names with `_` for `-`:
//!
//! ```text
//! family = cosh        # constant | cosh | rational
//! alpha = 1.5
//! table = mass.csv     # tabulated profile, overrides family
//! z = 0.5+0.2i
//! t = 1.0
//! abs_tol = 1e-10
//! rel_tol = 1e-9
//! quad_min = -12
//! quad_max = 12
//! x_min = -8
//! x_max = 8
//! points = 401
//! p_min = -6
//! p_max = 6
//! p_points = 257
//! out = results
//! format = csv         # csv | json
//! ```
//!
//! A flag given on the command line wins over the file.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use pdmcs_core::{Complex64, MassProfile, QuadConfig};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProfileFamily {
    Constant,
    Cosh,
    Rational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Clone, Debug, Default)]
pub struct RunArgs {
    /// Key-value configuration file; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub family: Option<ProfileFamily>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    /// CSV of `x,2m` samples; replaces the built-in family.
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Complex label, e.g. `0.5`, `1-0.3i`, `2i`.
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<f64>,
    #[arg(long)]
    pub abs_tol: Option<f64>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    /// Lower end of the quadrature window.
    #[arg(long, allow_hyphen_values = true)]
    pub quad_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub quad_max: Option<f64>,
    /// Sample grid in x.
    #[arg(long, allow_hyphen_values = true)]
    pub x_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub x_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    /// Sample grid in p (Wigner only).
    #[arg(long, allow_hyphen_values = true)]
    pub p_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub p_max: Option<f64>,
    #[arg(long)]
    pub p_points: Option<usize>,
    /// Output directory (state, wigner) or file (sweep, oracle).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Record version and wall-clock time in the JSON metadata.
    #[arg(long)]
    pub stamp: bool,
}

const MAX_POINTS: usize = 100_001;

/// Fully resolved configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub profile: MassProfile,
    pub z: Complex64,
    pub t: Option<f64>,
    pub quad: QuadConfig,
    pub x_grid: Option<(f64, f64, usize)>,
    pub p_grid: Option<(f64, f64, usize)>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub stamp: bool,
}

impl RunArgs {
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let file = match &self.config {
            Some(path) => parse_config_file(path)?,
            None => BTreeMap::new(),
        };
        let base = self.config.as_deref().and_then(Path::parent).unwrap_or(Path::new(""));
        let get = |key: &str| file.get(key).map(String::as_str);
        let num = |flag: Option<f64>, key: &str| -> Result<Option<f64>, CliError> {
            match (flag, get(key)) {
                (Some(v), _) => Ok(Some(v)),
                (None, Some(s)) => s
                    .parse()
                    .map(Some)
                    .map_err(|_| CliError::Usage(format!("config key `{key}`: `{s}` is not a number"))),
                (None, None) => Ok(None),
            }
        };
        let count = |flag: Option<usize>, key: &str| -> Result<Option<usize>, CliError> {
            match (flag, get(key)) {
                (Some(v), _) => Ok(Some(v)),
                (None, Some(s)) => s
                    .parse()
                    .map(Some)
                    .map_err(|_| CliError::Usage(format!("config key `{key}`: `{s}` is not a count"))),
                (None, None) => Ok(None),
            }
        };

        let table = self.table.clone().or_else(|| get("table").map(|s| base.join(s)));
        let family = match (self.family, get("family")) {
            (Some(f), _) => Some(f),
            (None, Some(s)) => Some(
                ProfileFamily::from_str(s, true)
                    .map_err(|_| CliError::Usage(format!("config key `family`: unknown family `{s}`")))?,
            ),
            (None, None) => None,
        };
        let alpha = num(self.alpha, "alpha")?;
        let profile = match table {
            Some(path) => {
                if !path.exists() {
                    return Err(CliError::Usage(format!("mass table {} does not exist", path.display())));
                }
                MassProfile::from_csv(&path).map_err(CliError::usage)?
            }
            None => build_profile(family.unwrap_or(ProfileFamily::Constant), alpha)?,
        };

        let z = match self.z.as_deref().or_else(|| get("z")) {
            Some(s) => parse_complex(s)?,
            None => Complex64::new(0.0, 0.0),
        };
        let t = num(self.t, "t")?;

        let mut quad = QuadConfig::default();
        if let Some(v) = num(self.abs_tol, "abs_tol")? {
            quad.abs_tol = v;
        }
        if let Some(v) = num(self.rel_tol, "rel_tol")? {
            quad.rel_tol = v;
        }
        if let Some(v) = num(self.quad_min, "quad_min")? {
            quad.domain.0 = v;
        }
        if let Some(v) = num(self.quad_max, "quad_max")? {
            quad.domain.1 = v;
        }
        quad.validate().map_err(CliError::usage)?;

        let grid = |lo: Option<f64>, hi: Option<f64>, n: Option<usize>, what: &str| {
            resolve_grid(lo, hi, n, what)
        };
        let x_grid = grid(
            num(self.x_min, "x_min")?,
            num(self.x_max, "x_max")?,
            count(self.points, "points")?,
            "x",
        )?;
        let p_grid = grid(
            num(self.p_min, "p_min")?,
            num(self.p_max, "p_max")?,
            count(self.p_points, "p_points")?,
            "p",
        )?;

        let format = match (self.format, get("format")) {
            (Some(f), _) => f,
            (None, Some(s)) => Format::from_str(s, true)
                .map_err(|_| CliError::Usage(format!("config key `format`: unknown format `{s}`")))?,
            (None, None) => Format::Csv,
        };
        let stamp = self.stamp || get("stamp").is_some_and(|s| s == "true");
        Ok(RunConfig {
            profile,
            z,
            t,
            quad,
            x_grid,
            p_grid,
            out: self.out.clone().or_else(|| get("out").map(PathBuf::from)),
            format,
            stamp,
        })
    }
}

/// Missing pieces are `None` and filled by the command's defaults.
type Grid = Option<(f64, f64, usize)>;

fn resolve_grid(lo: Option<f64>, hi: Option<f64>, n: Option<usize>, what: &str) -> Result<Grid, CliError> {
    match (lo, hi) {
        (None, None) if n.is_none() => Ok(None),
        (Some(a), Some(b)) => {
            let n = n.unwrap_or(401);
            if !(a.is_finite() && b.is_finite() && b > a) {
                return Err(CliError::Usage(format!("{what} grid [{a}, {b}] is empty")));
            }
            if !(2..=MAX_POINTS).contains(&n) {
                return Err(CliError::Usage(format!("{what} grid needs 2..={MAX_POINTS} points, got {n}")));
            }
            Ok(Some((a, b, n)))
        }
        _ => Err(CliError::Usage(format!("{what} grid needs both {what}_min and {what}_max"))),
    }
}

fn build_profile(family: ProfileFamily, alpha: Option<f64>) -> Result<MassProfile, CliError> {
    let need = |name| alpha.ok_or_else(|| CliError::Usage(format!("--alpha is required for the {name} family")));
    match family {
        ProfileFamily::Constant => Ok(MassProfile::constant()),
        ProfileFamily::Cosh => MassProfile::cosh(need("cosh")?).map_err(CliError::usage),
        ProfileFamily::Rational => MassProfile::rational(need("rational")?).map_err(CliError::usage),
    }
}

pub fn parse_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    const KEYS: [&str; 19] = [
        "family", "alpha", "table", "z", "t", "abs_tol", "rel_tol", "quad_min", "quad_max", "x_min", "x_max",
        "points", "p_min", "p_max", "p_points", "out", "format", "stamp", "config",
    ];
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (k, v) = body
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected `key = value`", idx + 1)))?;
        let k = k.trim().replace('-', "_");
        if !KEYS.contains(&k.as_str()) || k == "config" {
            return Err(CliError::Usage(format!("config line {}: unknown key `{k}`", idx + 1)));
        }
        map.insert(k, v.trim().to_string());
    }
    Ok(map)
}

/// Parses `re`, `im i`, or `re±im i` (spaces ignored, `j` accepted for `i`).
pub fn parse_complex(text: &str) -> Result<Complex64, CliError> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect::<String>().replace('j', "i");
    let bad = || CliError::Usage(format!("cannot parse complex number `{text}`"));
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix('i') else {
        return s.parse().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    // the split point is the last sign that is not an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |t: &str| -> Result<f64, CliError> {
        match t {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => t.parse().map_err(|_| bad()),
        }
    };
    match split {
        Some(k) => {
            let re: f64 = body[..k].parse().map_err(|_| bad())?;
            Ok(Complex64::new(re, imag(&body[k..])?))
        }
        None => Ok(Complex64::new(0.0, imag(body)?)),
    }
}
