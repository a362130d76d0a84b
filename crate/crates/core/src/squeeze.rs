//! Uncertainty products and squeezing parameters of coherent states, and
//! deterministic `(α, z)` sweeps over them.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coherent::coherent_state;
use crate::error::{Error, Result};
use crate::profiles::MassProfile;
use crate::quad::{moments, MomentReport, QuadConfig};

/// Which spread enters `S = 2Δ − 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// Δ is the variance.
    Variance,
    /// Δ is the standard deviation.
    Stddev,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Cosh,
    Rational,
}

impl Family {
    pub fn profile(self, alpha: f64) -> Result<MassProfile> {
        match self {
            Family::Cosh => MassProfile::cosh(alpha),
            Family::Rational => MassProfile::rational(alpha),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Cosh => "cosh",
            Family::Rational => "rational",
        })
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cosh" => Ok(Family::Cosh),
            "rational" => Ok(Family::Rational),
            other => Err(Error::Domain(format!("unknown sweep family `{other}`"))),
        }
    }
}

/// Grid of `(α, z)` cells for one profile family.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub family: Family,
    pub alphas: Vec<f64>,
    pub z_values: Vec<f64>,
    /// Imaginary part added to every `z`; zero gives the usual real-axis sweep.
    pub z_imag: f64,
    pub cfg: QuadConfig,
}

impl SweepSpec {
    pub fn new(family: Family, alphas: Vec<f64>, z_values: Vec<f64>) -> Self {
        SweepSpec {
            family,
            alphas,
            z_values,
            z_imag: 0.0,
            cfg: QuadConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.alphas.is_empty() || self.z_values.is_empty() {
            return Err(Error::Domain("sweep needs at least one alpha and one z".into()));
        }
        if self.family == Family::Rational && self.alphas.iter().any(|a| !(*a > 0.0)) {
            return Err(Error::Domain("rational sweeps need alpha > 0".into()));
        }
        if self.alphas.iter().chain(&self.z_values).any(|v| !v.is_finite()) || !self.z_imag.is_finite() {
            return Err(Error::Domain("sweep values must be finite".into()));
        }
        self.cfg.validate()
    }

    /// Parses the `key = value` sweep file format:
    ///
    /// ```text
    /// family = cosh
    /// alphas = 1.5, 1.0
    /// z      = 0.1:3.0:0.1     # start:stop:step, or a comma list
    /// z_imag = 0.0             # optional
    /// abs_tol = 1e-10          # optional, likewise rel_tol
    /// ```
    pub fn parse(text: &str) -> Result<Self> {
        let mut family = None;
        let mut alphas = None;
        let mut zs = None;
        let mut spec_cfg = QuadConfig::default();
        let mut z_imag = 0.0;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body.split_once('=').ok_or_else(|| Error::Parse {
                line,
                msg: format!("expected `key = value`, got `{body}`"),
            })?;
            let value = value.trim();
            let perr = |e: Error| match e {
                Error::Parse { msg, .. } | Error::Domain(msg) => Error::Parse { line, msg },
                other => other,
            };
            match key.trim() {
                "family" => family = Some(value.parse::<Family>().map_err(perr)?),
                "alphas" | "alpha" => alphas = Some(parse_values(value).map_err(perr)?),
                "z" | "z_values" => zs = Some(parse_values(value).map_err(perr)?),
                "z_imag" => z_imag = parse_number(value).map_err(perr)?,
                "abs_tol" => spec_cfg.abs_tol = parse_number(value).map_err(perr)?,
                "rel_tol" => spec_cfg.rel_tol = parse_number(value).map_err(perr)?,
                other => {
                    return Err(Error::Parse {
                        line,
                        msg: format!("unknown key `{other}`"),
                    })
                }
            }
        }
        let missing = |k: &str| Error::Parse {
            line: 0,
            msg: format!("missing key `{k}`"),
        };
        let spec = SweepSpec {
            family: family.ok_or_else(|| missing("family"))?,
            alphas: alphas.ok_or_else(|| missing("alphas"))?,
            z_values: zs.ok_or_else(|| missing("z"))?,
            z_imag,
            cfg: spec_cfg,
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn parse_number(s: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|e| Error::Parse {
        line: 0,
        msg: format!("`{}`: {e}", s.trim()),
    })
}

/// Comma list, or an inclusive `start:stop:step` range.
pub fn parse_values(s: &str) -> Result<Vec<f64>> {
    if s.contains(':') {
        let parts: Vec<f64> = s.split(':').map(parse_number).collect::<Result<_>>()?;
        let [start, stop, step] = parts[..] else {
            return Err(Error::Parse {
                line: 0,
                msg: format!("range `{s}` must be start:stop:step"),
            });
        };
        if !(step > 0.0) || stop < start {
            return Err(Error::Parse {
                line: 0,
                msg: format!("range `{s}` is empty or has a non-positive step"),
            });
        }
        // integer stepping keeps the grid free of accumulated drift
        let count = ((stop - start) / step + 1e-9).floor() as usize;
        Ok((0..=count).map(|k| start + step * k as f64).collect())
    } else {
        s.split(',').map(parse_number).collect()
    }
}

/// `var_x · var_p` of the coherent state with label `z`.
pub fn uncertainty_product(profile: &MassProfile, z: Complex64, cfg: &QuadConfig) -> Result<f64> {
    Ok(moments(&coherent_state(profile, z)?, cfg)?.product)
}

/// `(S_x, S_p)` with `S = 2Δ − 1` under the chosen convention.
pub fn squeezing_params(
    profile: &MassProfile,
    z: Complex64,
    convention: Convention,
    cfg: &QuadConfig,
) -> Result<(f64, f64)> {
    let m = moments(&coherent_state(profile, z)?, cfg)?;
    Ok(match convention {
        Convention::Variance => (m.sx_var, m.sp_var),
        Convention::Stddev => (m.sx_std, m.sp_std),
    })
}

/// One `(α, z)` cell of a sweep; failures are kept per row.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub family: Family,
    pub alpha: f64,
    pub z: Complex64,
    pub report: std::result::Result<MomentReport, String>,
}

pub const SWEEP_CSV_HEADER: &str =
    "family,alpha,z_re,z_im,mean_x,var_x,mean_p,var_p,product,sx_var,sp_var,sx_std,sp_std,quad_err";

/// Evaluates every cell in parallel; rows come back α-major, in the order given.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let cells: Vec<(f64, f64)> = spec
        .alphas
        .iter()
        .flat_map(|&a| spec.z_values.iter().map(move |&z| (a, z)))
        .collect();
    Ok(cells
        .par_iter()
        .map(|&(alpha, zr)| {
            let z = Complex64::new(zr, spec.z_imag);
            let report = spec
                .family
                .profile(alpha)
                .and_then(|p| moments(&coherent_state(&p, z)?, &spec.cfg))
                .map_err(|e| e.to_string());
            SweepRow {
                family: spec.family,
                alpha,
                z,
                report,
            }
        })
        .collect())
}

/// CSV with [`SWEEP_CSV_HEADER`]; failed cells carry `NaN` and the error in `quad_err`'s place.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut out: W) -> Result<()> {
    writeln!(out, "{SWEEP_CSV_HEADER}")?;
    for r in rows {
        write!(out, "{},{},{},{},", r.family, r.alpha, r.z.re, r.z.im)?;
        match &r.report {
            Ok(m) => writeln!(
                out,
                "{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
                m.mean_x, m.var_x, m.mean_p, m.var_p, m.product, m.sx_var, m.sp_var, m.sx_std, m.sp_std, m.quad_err
            )?,
            Err(e) => writeln!(out, "NaN,NaN,NaN,NaN,NaN,NaN,NaN,NaN,NaN,\"{}\"", e.replace('"', "'"))?,
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_mass_saturates() {
        let cfg = QuadConfig::default();
        let prod = uncertainty_product(&MassProfile::constant(), Complex64::new(1.0, 0.0), &cfg).unwrap();
        assert!((prod - 0.25).abs() < 1e-6);
        let (sx, sp) =
            squeezing_params(&MassProfile::constant(), Complex64::new(1.0, 0.0), Convention::Stddev, &cfg).unwrap();
        assert!((sp - 0.0).abs() < 1e-6);
        assert!((sx - 1.0).abs() < 1e-6);
        let (sx, sp) =
            squeezing_params(&MassProfile::constant(), Complex64::new(1.0, 0.0), Convention::Variance, &cfg)
                .unwrap();
        assert!((sx - 1.0).abs() < 1e-6 && (sp + 0.5).abs() < 1e-6);
    }

    #[test]
    fn rational_alpha_one_is_constant() {
        let cfg = QuadConfig::default();
        let p = MassProfile::rational(1.0).unwrap();
        for z in [0.0, 0.7, 2.3] {
            let prod = uncertainty_product(&p, Complex64::new(z, 0.0), &cfg).unwrap();
            assert!((prod - 0.25).abs() < 1e-6);
        }
    }

    #[test]
    fn cosh_exceeds_bound_at_small_z() {
        let cfg = QuadConfig::default();
        let prod = uncertainty_product(&MassProfile::cosh(1.5).unwrap(), Complex64::new(0.2, 0.0), &cfg).unwrap();
        assert!(prod > 0.25 + 1e-4, "{prod}");
    }

    #[test]
    fn value_lists_and_ranges() {
        assert_eq!(parse_values("1.5, 1.0").unwrap(), vec![1.5, 1.0]);
        let r = parse_values("0.1:3.0:0.1").unwrap();
        assert_eq!(r.len(), 30);
        assert!((r[29] - 3.0).abs() < 1e-12);
        assert!(parse_values("1:0:0.1").is_err());
        assert!(parse_values("0:1").is_err());
    }

    #[test]
    fn spec_file_parsing() {
        let spec = SweepSpec::parse("# fig\nfamily = rational\nalphas = 0.8, 1.2\nz = 0.5:1.0:0.25\n").unwrap();
        assert_eq!(spec.family, Family::Rational);
        assert_eq!(spec.z_values.len(), 3);
        match SweepSpec::parse("family = cosh\nalphas = x\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(SweepSpec::parse("family = rational\nalphas = -1\nz = 1\n").is_err());
        assert!(SweepSpec::parse("family = cosh\nalphas = 1\n").is_err());
        assert!(SweepSpec::parse("colour = blue\n").is_err());
    }

    #[test]
    fn sweep_rows_are_ordered_and_isolated() {
        let mut spec = SweepSpec::new(Family::Cosh, vec![1.0, 0.5], vec![0.2, 20.0, 0.4]);
        spec.cfg = QuadConfig::default();
        let rows = run_sweep(&spec).unwrap();
        assert_eq!(rows.len(), 6);
        assert_eq!((rows[0].alpha, rows[0].z.re), (1.0, 0.2));
        assert_eq!((rows[4].alpha, rows[4].z.re), (0.5, 20.0));
        // |z| beyond the guard fails alone
        assert!(rows[1].report.is_err());
        assert!(rows[0].report.is_ok() && rows[2].report.is_ok());
        let mut buf = Vec::new();
        write_sweep_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), SWEEP_CSV_HEADER);
        assert_eq!(text.lines().count(), 7);
        assert!(text.lines().all(|l| l.split(',').count() >= 14));
    }
}
