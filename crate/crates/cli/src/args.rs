use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use siegert_core::{Complex64, ScanRegion};

#[derive(Debug, Parser)]
#[command(
    name = "siegert",
    version,
    about = "Siegert states of the square well",
    args_override_self = true
)]
pub struct Cli {
    /// Flat key=value file with the same keys as the long flags. Flags win.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bound, resonant and anti-resonant roots in a region of the K plane.
    #[command(args_override_self = true)]
    Roots(RootsArgs),
    /// Expanding-domain trajectories for a superposition of two resonances.
    #[command(args_override_self = true)]
    Expand(ExpandArgs),
    /// Leak identities, dispersion consistency and the TDSE cross-check.
    #[command(args_override_self = true)]
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ParityArg {
    Even,
    Odd,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Paper,
    TwoEdge,
    Both,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Well depth V0.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub v0: f64,

    /// Root tolerance on the parity residual.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Write the data here (atomically) instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RootsArgs {
    #[command(flatten)]
    pub common: Common,

    /// re_min:re_max:im_min:im_max
    #[arg(long, default_value = "-6:6:-3:-0.1", value_parser = parse_region, allow_hyphen_values = true)]
    pub region: ScanRegion,

    #[arg(long, value_enum, default_value_t = ParityArg::Both)]
    pub parity: ParityArg,
}

#[derive(Debug, Args)]
pub struct ExpandArgs {
    #[command(flatten)]
    pub common: Common,

    /// Superposition coefficients a1,a2 as complex literals x+yi.
    #[arg(long, default_value = "1,1", value_parser = parse_coeffs, allow_hyphen_values = true)]
    pub coeffs: (Complex64, Complex64),

    /// Initial half-width L0.
    #[arg(long, default_value_t = 1.0)]
    pub l0: f64,

    #[arg(long, default_value_t = 2.5)]
    pub t_end: f64,

    /// RK4 step.
    #[arg(long, default_value_t = 1e-3)]
    pub step: f64,

    #[arg(long, value_enum, default_value_t = ModeArg::Both)]
    pub mode: ModeArg,

    /// Use only the n-th lowest resonance (1-based) instead of the pair.
    #[arg(long, value_name = "N")]
    pub pure: Option<usize>,

    /// Emit (x, v̄(x)) at time --time instead of trajectories.
    #[arg(long)]
    pub vbar_profile: bool,

    #[arg(long, default_value_t = 0.0)]
    pub time: f64,

    /// Profile range [-x_max, x_max].
    #[arg(long, default_value_t = 12.0)]
    pub x_max: f64,

    #[arg(long, default_value_t = 1201)]
    pub points: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,

    /// Superposition coefficients a1,a2 as complex literals x+yi.
    #[arg(long, default_value = "1,1", value_parser = parse_coeffs, allow_hyphen_values = true)]
    pub coeffs: (Complex64, Complex64),

    /// Also check this K as if it were a root of --parity.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub inject_k: Option<Complex64>,

    #[arg(long, value_enum, default_value_t = ParityArg::Even)]
    pub parity: ParityArg,

    /// Run the Crank-Nicolson decay-rate check on a V0 = 50 well.
    #[arg(long)]
    pub tdse_deep_well: bool,
}

pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    t.parse::<Complex64>()
        .map_err(|_| format!("`{s}` is not a complex literal like 2.0-1.0i"))
}

pub fn parse_coeffs(s: &str) -> Result<(Complex64, Complex64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [a, b] => Ok((parse_complex(a)?, parse_complex(b)?)),
        _ => Err(format!("expected two coefficients a1,a2, got `{s}`")),
    }
}

pub fn parse_region(s: &str) -> Result<ScanRegion, String> {
    let v: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}")))
        .collect::<Result<_, _>>()?;
    match v.as_slice() {
        [a, b, c, d] => ScanRegion::new(*a, *b, *c, *d).map_err(|e| e.to_string()),
        _ => Err(format!("expected re_min:re_max:im_min:im_max, got `{s}`")),
    }
}

const SWITCHES: &[&str] = &["vbar-profile", "tdse-deep-well"];

/// Turns a key=value file into flags, placed ahead of the command line's
/// own flags so that the latter override.
pub fn config_to_args(text: &str) -> Result<Vec<String>, String> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key=value", n + 1))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        if key == "config" {
            return Err(format!(
                "config line {}: nested config files are not supported",
                n + 1
            ));
        }
        if SWITCHES.contains(&key.as_str()) {
            match value {
                "true" | "1" | "yes" => out.push(format!("--{key}")),
                "false" | "0" | "no" => {}
                _ => {
                    return Err(format!(
                        "config line {}: `{key}` takes true or false",
                        n + 1
                    ))
                }
            }
        } else {
            out.push(format!("--{key}={value}"));
        }
    }
    Ok(out)
}

/// Finds `--config PATH` or `--config=PATH` in raw arguments.
pub fn config_path(args: &[String]) -> Option<String> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        assert_eq!(
            parse_complex("2.0-1.0i").unwrap(),
            Complex64::new(2.0, -1.0)
        );
        assert_eq!(parse_complex("1").unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(
            parse_complex(" -0.5 + 2i").unwrap(),
            Complex64::new(-0.5, 2.0)
        );
        assert!(parse_complex("two").is_err());
    }

    #[test]
    fn regions() {
        let r = parse_region("0:6:-3:0").unwrap();
        assert_eq!((r.re_min, r.im_min), (0.0, -3.0));
        assert!(parse_region("0:6:-3").is_err());
        assert!(parse_region("6:0:-3:0").is_err());
    }

    #[test]
    fn config_lines() {
        let args = config_to_args(
            "# comment\nv0 = 2\nt_end=1.5\nvbar-profile = true\ntdse-deep-well=false\n",
        )
        .unwrap();
        assert_eq!(args, ["--v0=2", "--t-end=1.5", "--vbar-profile"]);
        assert!(config_to_args("v0").is_err());
    }
}
