//! Run configuration. Command-line flags override a `key = value` file, which
//! overrides the built-in defaults. `--replay` takes the configuration echoed
//! in an earlier result in place of the file.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use llr_core::variational::DEFAULT_BRACKET;
use llr_core::{gamma_from_z, Error, FieldConfig, GAMMA_CRITICAL};
use serde::{Deserialize, Serialize};

use crate::exit::Failure;

#[derive(Debug, Parser)]
#[command(name = "llr", version, about = "Ground states of the lowest-Landau-level Brown-Ravenhall operator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Command>,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Tabulate the effective potential V̂0(q) and its constants.
    Potential,
    /// Converged spectral ground state.
    Spectrum,
    /// Optimised trial-state energy, with an optional scan over Z_eff or m.
    Variational,
    /// Field sweep with a power-law fit.
    Sweep,
    /// Invariant suite; exit status 3 on any failure.
    Check,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Potential => "potential",
            Command::Spectrum => "spectrum",
            Command::Variational => "variational",
            Command::Sweep => "sweep",
            Command::Check => "check",
        }
    }

    fn default_format(self) -> Format {
        match self {
            Command::Potential | Command::Sweep => Format::Csv,
            _ => Format::Json,
        }
    }

    fn needs_coupling(self) -> bool {
        self != Command::Potential
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Log-spaced `Z_eff` scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeffScan {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl ZeffScan {
    pub fn values(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.lo];
        }
        (0..self.n)
            .map(|i| self.lo * (self.hi / self.lo).powf(i as f64 / (self.n - 1) as f64))
            .collect()
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Nuclear charge Z; the coupling is Z/137.04.
    #[arg(long = "Z", global = true)]
    pub z: Option<u32>,
    /// Coupling constant, instead of --Z.
    #[arg(long, global = true)]
    pub gamma: Option<f64>,
    /// Reference field eB0 of the scaled problem.
    #[arg(long = "eB0", global = true)]
    pub eb0: Option<f64>,
    /// Particle mass (physical mass for `sweep`).
    #[arg(long, global = true)]
    pub mass: Option<f64>,
    /// Relative energy tolerance of grid refinement.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Starting grid size.
    #[arg(long = "grid-n0", global = true)]
    pub grid_n0: Option<usize>,
    /// Sweep fields B/B0 = 10^lo ..= 10^hi.
    #[arg(long = "B-decades", global = true, value_name = "LO:HI", value_parser = parse_decades)]
    pub b_decades: Option<(i32, i32)>,
    /// Smallest B/B0 included in the power-law fit.
    #[arg(long = "fit-min-B", global = true)]
    pub fit_min_b: Option<f64>,
    /// Z_eff search bracket.
    #[arg(long, global = true, value_name = "LO:HI", value_parser = parse_bracket)]
    pub bracket: Option<(f64, f64)>,
    /// Masses for a trial-energy scan at the optimal Z_eff.
    #[arg(long = "scan-mass", global = true, value_delimiter = ',', num_args = 1)]
    pub scan_mass: Option<Vec<f64>>,
    /// Log-spaced Z_eff scan.
    #[arg(long = "scan-zeff", global = true, value_name = "LO:HI:N", value_parser = parse_zeff_scan)]
    pub scan_zeff: Option<ZeffScan>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// `key = value` configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Re-run the configuration echoed in an earlier JSON or CSV result.
    #[arg(long, global = true)]
    pub replay: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    #[serde(rename = "Z")]
    pub z: Option<u32>,
    pub gamma: Option<f64>,
    #[serde(rename = "eB0")]
    pub eb0: f64,
    pub mass: f64,
    pub grid_n0: usize,
    pub tol: f64,
    pub output_path: Option<String>,
    pub format: Format,
    #[serde(rename = "B_decades")]
    pub b_decades: (i32, i32),
    #[serde(rename = "fit_min_B")]
    pub fit_min_b: Option<f64>,
    pub bracket: (f64, f64),
    pub scan_mass: Option<Vec<f64>>,
    pub scan_zeff: Option<ZeffScan>,
}

impl RunConfig {
    /// The coupling `γ`, zero when neither `Z` nor `gamma` was given.
    pub fn coupling(&self) -> f64 {
        match (self.z, self.gamma) {
            (Some(z), _) => gamma_from_z(z as f64),
            (None, Some(g)) => g,
            (None, None) => 0.0,
        }
    }

    pub fn field(&self) -> Result<FieldConfig, Failure> {
        FieldConfig::new(self.eb0, self.coupling(), self.mass).map_err(|e| match e {
            Error::Supercritical { gamma, limit } => Failure::usage(format!(
                "gamma = {gamma} violates the subcritical condition gamma < 2/pi = {limit} (Z <= 87)"
            )),
            other => Failure::usage(other.to_string()),
        })
    }

    pub fn output_path(&self) -> Option<&Path> {
        self.output_path.as_deref().map(Path::new)
    }
}

/// One configuration source; unset fields fall through to the next.
#[derive(Debug, Clone, Default)]
struct Layer {
    z: Option<u32>,
    gamma: Option<f64>,
    eb0: Option<f64>,
    mass: Option<f64>,
    tol: Option<f64>,
    grid_n0: Option<usize>,
    b_decades: Option<(i32, i32)>,
    fit_min_b: Option<f64>,
    bracket: Option<(f64, f64)>,
    scan_mass: Option<Vec<f64>>,
    scan_zeff: Option<ZeffScan>,
    out: Option<String>,
    format: Option<Format>,
}

impl Layer {
    fn from_flags(f: &Flags) -> Self {
        Layer {
            z: f.z,
            gamma: f.gamma,
            eb0: f.eb0,
            mass: f.mass,
            tol: f.tol,
            grid_n0: f.grid_n0,
            b_decades: f.b_decades,
            fit_min_b: f.fit_min_b,
            bracket: f.bracket,
            scan_mass: f.scan_mass.clone(),
            scan_zeff: f.scan_zeff,
            out: f.out.as_ref().map(|p| p.to_string_lossy().into_owned()),
            format: f.format,
        }
    }

    fn from_config(c: &RunConfig) -> Self {
        Layer {
            z: c.z,
            gamma: c.gamma,
            eb0: Some(c.eb0),
            mass: Some(c.mass),
            tol: Some(c.tol),
            grid_n0: Some(c.grid_n0),
            b_decades: Some(c.b_decades),
            fit_min_b: c.fit_min_b,
            bracket: Some(c.bracket),
            scan_mass: c.scan_mass.clone(),
            scan_zeff: c.scan_zeff,
            out: c.output_path.clone(),
            format: Some(c.format),
        }
    }

    /// `self` over `base`. `Z` and `gamma` name one quantity, so either flag
    /// replaces both entries of the lower layer.
    fn over(self, base: Layer) -> Layer {
        let (z, gamma) = if self.z.is_some() || self.gamma.is_some() {
            (self.z, self.gamma)
        } else {
            (base.z, base.gamma)
        };
        Layer {
            z,
            gamma,
            eb0: self.eb0.or(base.eb0),
            mass: self.mass.or(base.mass),
            tol: self.tol.or(base.tol),
            grid_n0: self.grid_n0.or(base.grid_n0),
            b_decades: self.b_decades.or(base.b_decades),
            fit_min_b: self.fit_min_b.or(base.fit_min_b),
            bracket: self.bracket.or(base.bracket),
            scan_mass: self.scan_mass.or(base.scan_mass),
            scan_zeff: self.scan_zeff.or(base.scan_zeff),
            out: self.out.or(base.out),
            format: self.format.or(base.format),
        }
    }
}

fn parse_pair<T: std::str::FromStr>(s: &str, what: &str) -> Result<(T, T), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("{what} must look like LO:HI, got {s:?}"))?;
    let lo = a.trim().parse().map_err(|_| format!("bad {what} lower value {a:?}"))?;
    let hi = b.trim().parse().map_err(|_| format!("bad {what} upper value {b:?}"))?;
    Ok((lo, hi))
}

pub fn parse_decades(s: &str) -> Result<(i32, i32), String> {
    parse_pair(s, "B-decades")
}

pub fn parse_bracket(s: &str) -> Result<(f64, f64), String> {
    parse_pair(s, "bracket")
}

pub fn parse_zeff_scan(s: &str) -> Result<ZeffScan, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("scan-zeff must look like LO:HI:N, got {s:?}"));
    }
    let num = |p: &str| p.trim().parse::<f64>().map_err(|_| format!("bad number {p:?} in scan-zeff"));
    let n = parts[2]
        .trim()
        .parse()
        .map_err(|_| format!("bad count {:?} in scan-zeff", parts[2]))?;
    Ok(ZeffScan {
        lo: num(parts[0])?,
        hi: num(parts[1])?,
        n,
    })
}

fn parse_file(text: &str, origin: &Path) -> Result<Layer, Failure> {
    let mut layer = Layer::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let at = || format!("{}:{}", origin.display(), lineno + 1);
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Failure::usage(format!("{}: expected key = value", at())))?;
        let (key, value) = (key.trim(), value.trim());
        let bad = |e: String| Failure::usage(format!("{}: {key}: {e}", at()));
        let num = |v: &str| v.parse::<f64>().map_err(|_| bad(format!("not a number: {v:?}")));
        match key.to_ascii_lowercase().replace('-', "_").as_str() {
            "z" => layer.z = Some(value.parse().map_err(|_| bad(format!("not an integer: {value:?}")))?),
            "gamma" => layer.gamma = Some(num(value)?),
            "eb0" => layer.eb0 = Some(num(value)?),
            "mass" => layer.mass = Some(num(value)?),
            "tol" => layer.tol = Some(num(value)?),
            "grid_n0" => layer.grid_n0 = Some(value.parse().map_err(|_| bad(format!("not an integer: {value:?}")))?),
            "b_decades" => layer.b_decades = Some(parse_decades(value).map_err(bad)?),
            "fit_min_b" => layer.fit_min_b = Some(num(value)?),
            "bracket" => layer.bracket = Some(parse_bracket(value).map_err(bad)?),
            "scan_mass" => {
                layer.scan_mass = Some(value.split(',').map(|v| num(v.trim())).collect::<Result<_, _>>()?)
            }
            "scan_zeff" => layer.scan_zeff = Some(parse_zeff_scan(value).map_err(bad)?),
            "out" | "output_path" => layer.out = Some(value.to_string()),
            "format" => {
                layer.format = Some(Format::from_str(value, true).map_err(|_| bad(format!("unknown format {value:?}")))?)
            }
            _ => return Err(Failure::usage(format!("{}: unknown key {key:?}", at()))),
        }
    }
    Ok(layer)
}

/// The configuration echoed in a result file: the `metadata.config` object of
/// a JSON result, or the `# config:` line of a CSV result.
pub fn read_echoed_config(path: &Path) -> Result<RunConfig, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    let bad = |e: String| Failure::usage(format!("{}: {e}", path.display()));
    if let Some(line) = text.lines().find_map(|l| l.strip_prefix("# config: ")) {
        return serde_json::from_str(line).map_err(|e| bad(e.to_string()));
    }
    let doc: serde_json::Value = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
    let cfg = doc
        .get("metadata")
        .and_then(|m| m.get("config"))
        .ok_or_else(|| bad("no metadata.config in result".into()))?;
    serde_json::from_value(cfg.clone()).map_err(|e| bad(e.to_string()))
}

/// Resolves the effective configuration of a parsed command line.
pub fn resolve(cli: &Cli) -> Result<RunConfig, Failure> {
    let flags = &cli.flags;
    if flags.config.is_some() && flags.replay.is_some() {
        return Err(Failure::usage("--config and --replay are mutually exclusive"));
    }
    let (base, replayed) = if let Some(path) = &flags.replay {
        let cfg = read_echoed_config(path)?;
        (Layer::from_config(&cfg), Some(cfg.command))
    } else if let Some(path) = &flags.config {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
        (parse_file(&text, path)?, None)
    } else {
        (Layer::default(), None)
    };
    let command = match (cli.command, replayed) {
        (Some(c), Some(r)) if c != r => {
            return Err(Failure::usage(format!(
                "replayed result is from `{}`, not `{}`",
                r.name(),
                c.name()
            )))
        }
        (Some(c), _) | (None, Some(c)) => c,
        (None, None) => return Err(Failure::usage("no subcommand given (try --help)")),
    };
    if flags.z.is_some() && flags.gamma.is_some() {
        return Err(Failure::usage("--Z and --gamma are mutually exclusive"));
    }
    let l = Layer::from_flags(flags).over(base);
    let cfg = RunConfig {
        command,
        z: l.z,
        gamma: l.gamma,
        eb0: l.eb0.unwrap_or(2.0),
        mass: l.mass.unwrap_or(1.0),
        grid_n0: l.grid_n0.unwrap_or(64),
        tol: l.tol.unwrap_or(1e-6),
        output_path: l.out,
        format: l.format.unwrap_or(command.default_format()),
        b_decades: l.b_decades.unwrap_or((2, 6)),
        fit_min_b: l.fit_min_b,
        bracket: l.bracket.unwrap_or(DEFAULT_BRACKET),
        scan_mass: l.scan_mass,
        scan_zeff: l.scan_zeff,
    };
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(c: &RunConfig) -> Result<(), Failure> {
    match (c.z, c.gamma) {
        (Some(_), Some(_)) => return Err(Failure::usage("Z and gamma are mutually exclusive")),
        (None, None) if c.command.needs_coupling() => {
            return Err(Failure::usage(format!("`{}` needs --Z or --gamma", c.command.name())))
        }
        _ => {}
    }
    if let Some(g) = c.gamma {
        if !(g.is_finite() && g >= 0.0) {
            return Err(Failure::usage(format!("gamma must be non-negative, got {g}")));
        }
    }
    if c.coupling() >= GAMMA_CRITICAL {
        return Err(Failure::usage(format!(
            "gamma = {} violates the subcritical condition gamma < 2/pi = {GAMMA_CRITICAL} (Z <= 87)",
            c.coupling()
        )));
    }
    if !(c.tol.is_finite() && c.tol > 0.0) {
        return Err(Failure::usage(format!("tol must be positive, got {}", c.tol)));
    }
    if c.grid_n0 < 8 {
        return Err(Failure::usage(format!("grid-n0 must be at least 8, got {}", c.grid_n0)));
    }
    let (lo, hi) = c.b_decades;
    if lo > hi || hi - lo > 12 {
        return Err(Failure::usage(format!("B-decades {lo}:{hi} must satisfy lo <= hi <= lo + 12")));
    }
    if let Some(b) = c.fit_min_b {
        if !(b.is_finite() && b > 0.0) {
            return Err(Failure::usage(format!("fit-min-B must be positive, got {b}")));
        }
    }
    let (blo, bhi) = c.bracket;
    if !(blo > 0.0 && bhi > blo && bhi.is_finite()) {
        return Err(Failure::usage(format!("bracket must satisfy 0 < lo < hi, got {blo}:{bhi}")));
    }
    if let Some(s) = &c.scan_zeff {
        if !(s.lo > 0.0 && s.hi >= s.lo && s.hi.is_finite() && s.n >= 1) {
            return Err(Failure::usage("scan-zeff needs 0 < lo <= hi and n >= 1"));
        }
    }
    if let Some(ms) = &c.scan_mass {
        if ms.is_empty() || ms.iter().any(|m| !(m.is_finite() && *m >= 0.0)) {
            return Err(Failure::usage("scan-mass needs non-negative masses"));
        }
    }
    c.field()?;
    Ok(())
}
