//! Run configuration: `key=value` lines with `#` comments.

use std::fmt::{self, Write as _};
use std::path::PathBuf;
use std::str::FromStr;

use a12::family::GeneratingFamily;
use a12::lie::CompactLieAlgebra;
use a12::roots::RootSystem;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    ValidateNorm,
    Tensors,
    SCurvature,
    Vanishing,
    KeyLemma,
    Kvfcl,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::ValidateNorm,
        Command::Tensors,
        Command::SCurvature,
        Command::Vanishing,
        Command::KeyLemma,
        Command::Kvfcl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::ValidateNorm => "validate-norm",
            Command::Tensors => "tensors",
            Command::SCurvature => "scurvature",
            Command::Vanishing => "vanishing",
            Command::KeyLemma => "keylemma",
            Command::Kvfcl => "kvfcl",
        }
    }

    fn default_tol(self) -> f64 {
        match self {
            Command::ValidateNorm => 1e-10,
            Command::Tensors => 1e-6,
            Command::SCurvature => 1e-5,
            Command::Vanishing => 1e-8,
            Command::KeyLemma | Command::Kvfcl => 0.0,
        }
    }
}

impl FromStr for Command {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Command::ALL.iter().map(|c| c.name()).collect();
                format!("expected one of {}", names.join(", "))
            })
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatumKind {
    Cartan,
    Perturbed,
    /// `V₂` spanned by the `v2` key, `V₁` its bi-orthogonal complement.
    Explicit,
}

impl FromStr for DatumKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "cartan" => Ok(Self::Cartan),
            "perturbed" => Ok(Self::Perturbed),
            "explicit" => Ok(Self::Explicit),
            _ => Err("expected cartan, perturbed or explicit".into()),
        }
    }
}

impl fmt::Display for DatumKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Cartan => "cartan",
            Self::Perturbed => "perturbed",
            Self::Explicit => "explicit",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyKind {
    ExhaustiveDirections,
    Random,
}

impl FromStr for StrategyKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exhaustive-directions" => Ok(Self::ExhaustiveDirections),
            "random" => Ok(Self::Random),
            _ => Err("expected exhaustive-directions or random".into()),
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::ExhaustiveDirections => "exhaustive-directions",
            Self::Random => "random",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GPrime {
    /// The datum's `V₂` basis.
    V2,
    None,
}

impl FromStr for GPrime {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "v2" => Ok(Self::V2),
            "none" => Ok(Self::None),
            _ => Err("expected v2 or none".into()),
        }
    }
}

impl fmt::Display for GPrime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::V2 => "v2",
            Self::None => "none",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            _ => Err("expected json or csv".into()),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Json => "json",
            Self::Csv => "csv",
        })
    }
}

/// Keys accepted in config files and on the command line.
pub const KEYS: [&str; 18] = [
    "command", "family", "algebra", "datum", "scalars", "v2", "dims", "type", "strategy", "grid",
    "x", "x_prime", "g_prime", "samples", "seed", "tol", "format", "out",
];

pub const DEFAULT_SAMPLES: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_GRID: usize = 201;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub family: Option<String>,
    pub algebra: Option<String>,
    pub datum: Option<DatumKind>,
    pub scalars: Vec<f64>,
    /// Algebra vectors spanning `V₂` for the explicit datum.
    pub v2: Vec<Vec<f64>>,
    pub dims: Option<(usize, usize)>,
    pub root_type: Option<String>,
    pub strategy: StrategyKind,
    pub grid: usize,
    /// Frame coordinates.
    pub x: Option<Vec<f64>>,
    /// Frame coordinates.
    pub x_prime: Option<Vec<f64>>,
    pub g_prime: GPrime,
    pub samples: u64,
    pub seed: u64,
    pub tol: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
}

/// Raw settings in the order they were given; later entries win.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    entries: Vec<(String, String, Option<usize>)>,
}

impl Settings {
    /// Record `key=value`, with the source line for error messages.
    pub fn set(&mut self, key: &str, value: &str, line: Option<usize>) -> Result<(), CliError> {
        if !KEYS.contains(&key) {
            return Err(CliError::UnknownKey {
                key: key.to_string(),
                line,
            });
        }
        self.entries.retain(|(k, _, _)| k != key);
        self.entries
            .push((key.to_string(), value.to_string(), line));
        Ok(())
    }

    /// Parse a `key=value` argument.
    pub fn set_pair(&mut self, pair: &str) -> Result<(), CliError> {
        let (k, v) = pair.split_once('=').ok_or_else(|| CliError::Syntax {
            line: None,
            msg: format!("expected key=value, got `{pair}`"),
        })?;
        self.set(k.trim(), v.trim(), None)
    }

    pub fn merge(&mut self, other: &Settings) {
        for (k, v, l) in &other.entries {
            self.entries.retain(|(kk, _, _)| kk != k);
            self.entries.push((k.clone(), v.clone(), *l));
        }
    }

    pub fn get(&self, key: &str) -> Option<(&str, Option<usize>)> {
        self.entries
            .iter()
            .find(|(k, _, _)| k == key)
            .map(|(_, v, l)| (v.as_str(), *l))
    }

    pub fn parse_text(text: &str) -> Result<Self, CliError> {
        let mut s = Settings::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            }
            .trim();
            if content.is_empty() {
                continue;
            }
            let (k, v) = content.split_once('=').ok_or_else(|| CliError::Syntax {
                line: Some(line),
                msg: format!("expected key=value, got `{content}`"),
            })?;
            let k = k.trim();
            if k.is_empty() {
                return Err(CliError::Syntax {
                    line: Some(line),
                    msg: "empty key".into(),
                });
            }
            s.set(k, v.trim(), Some(line))?;
        }
        Ok(s)
    }
}

fn value<T: FromStr>(s: &Settings, key: &'static str) -> Result<Option<T>, CliError>
where
    T::Err: fmt::Display,
{
    match s.get(key) {
        None => Ok(None),
        Some((v, line)) => v
            .parse()
            .map(Some)
            .map_err(|e: T::Err| CliError::InvalidValue {
                key,
                value: v.to_string(),
                reason: e.to_string(),
                line,
            }),
    }
}

fn list(s: &Settings, key: &'static str) -> Result<Option<Vec<f64>>, CliError> {
    match s.get(key) {
        None => Ok(None),
        Some((v, line)) => parse_list(v)
            .map(Some)
            .map_err(|reason| CliError::InvalidValue {
                key,
                value: v.to_string(),
                reason,
                line,
            }),
    }
}

fn parse_list(v: &str) -> Result<Vec<f64>, String> {
    if v.trim().is_empty() {
        return Ok(Vec::new());
    }
    v.split(',')
        .map(|t| {
            let x: f64 = t
                .trim()
                .parse()
                .map_err(|_| format!("`{}` is not a number", t.trim()))?;
            if x.is_finite() {
                Ok(x)
            } else {
                Err(format!("`{}` is not finite", t.trim()))
            }
        })
        .collect()
}

fn required<T>(v: Option<T>, field: &'static str, command: Command) -> Result<T, CliError> {
    v.ok_or(CliError::MissingField {
        field,
        command: Some(command),
    })
}

fn invalid(key: &'static str, v: &str, reason: impl fmt::Display, s: &Settings) -> CliError {
    CliError::InvalidValue {
        key,
        value: v.to_string(),
        reason: reason.to_string(),
        line: s.get(key).and_then(|(_, l)| l),
    }
}

impl RunConfig {
    /// Validate settings and fill in defaults.
    pub fn from_settings(s: &Settings) -> Result<Self, CliError> {
        let command: Command = value(s, "command")?.ok_or(CliError::MissingField {
            field: "command",
            command: None,
        })?;

        let family: Option<String> = value(s, "family")?;
        if let Some(f) = &family {
            GeneratingFamily::parse(f).map_err(|e| invalid("family", f, e, s))?;
        }
        let algebra: Option<String> = value(s, "algebra")?;
        if let Some(a) = &algebra {
            CompactLieAlgebra::parse(a).map_err(|e| invalid("algebra", a, e, s))?;
        }
        let root_type: Option<String> = value(s, "type")?;
        if let Some(t) = &root_type {
            RootSystem::parse(t).map_err(|e| invalid("type", t, e, s))?;
        }
        let dims = match s.get("dims") {
            None => None,
            Some((v, _)) => {
                let parts: Vec<&str> = v.split(',').map(str::trim).collect();
                let parsed: Option<Vec<usize>> = parts.iter().map(|p| p.parse().ok()).collect();
                match parsed.as_deref() {
                    Some([a, b]) => Some((*a, *b)),
                    _ => return Err(invalid("dims", v, "expected n1,n2", s)),
                }
            }
        };
        let v2 = match s.get("v2") {
            None => Vec::new(),
            Some((v, _)) => v
                .split(';')
                .map(parse_list)
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| invalid("v2", v, e, s))?,
        };
        let samples: u64 = value(s, "samples")?.unwrap_or(DEFAULT_SAMPLES);
        if samples == 0 {
            return Err(invalid("samples", "0", "must be positive", s));
        }
        let grid: usize = value(s, "grid")?.unwrap_or(DEFAULT_GRID);
        if grid < 2 {
            return Err(invalid("grid", &grid.to_string(), "must be at least 2", s));
        }
        let tol: f64 = value(s, "tol")?.unwrap_or(command.default_tol());
        if !(tol >= 0.0 && tol.is_finite()) {
            return Err(invalid(
                "tol",
                &tol.to_string(),
                "must be finite and non-negative",
                s,
            ));
        }

        let cfg = RunConfig {
            command,
            family,
            algebra,
            datum: value(s, "datum")?,
            scalars: list(s, "scalars")?.unwrap_or_default(),
            v2,
            dims,
            root_type,
            strategy: value(s, "strategy")?.unwrap_or(StrategyKind::ExhaustiveDirections),
            grid,
            x: list(s, "x")?,
            x_prime: list(s, "x_prime")?,
            g_prime: value(s, "g_prime")?.unwrap_or(GPrime::V2),
            samples,
            seed: value(s, "seed")?.unwrap_or(DEFAULT_SEED),
            tol,
            format: value(s, "format")?.unwrap_or(Format::Json),
            out: value::<String>(s, "out")?.map(PathBuf::from),
        };
        cfg.check_required()?;
        Ok(cfg)
    }

    fn check_required(&self) -> Result<(), CliError> {
        let c = self.command;
        match c {
            Command::ValidateNorm => {
                required(self.family.as_ref(), "family", c)?;
            }
            Command::Tensors => {
                required(self.family.as_ref(), "family", c)?;
                required(self.dims, "dims", c)?;
            }
            Command::SCurvature | Command::Vanishing | Command::Kvfcl => {
                required(self.family.as_ref(), "family", c)?;
                required(self.algebra.as_ref(), "algebra", c)?;
                let d = required(self.datum, "datum", c)?;
                if d == DatumKind::Explicit && self.v2.is_empty() {
                    return Err(CliError::MissingField {
                        field: "v2",
                        command: Some(c),
                    });
                }
                if c == Command::Kvfcl && self.x.is_none() && self.x_prime.is_none() {
                    return Err(CliError::MissingField {
                        field: "x",
                        command: Some(c),
                    });
                }
            }
            Command::KeyLemma => {
                required(self.root_type.as_ref(), "type", c)?;
            }
        }
        Ok(())
    }

    /// Serialize as config text; parsing it back yields the same config.
    pub fn to_config_text(&self) -> String {
        let fmt_list = |v: &[f64]| {
            v.iter()
                .map(|x| format!("{x:?}"))
                .collect::<Vec<_>>()
                .join(",")
        };
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k}={v}");
        };
        put("command", self.command.to_string());
        if let Some(f) = &self.family {
            put("family", f.clone());
        }
        if let Some(a) = &self.algebra {
            put("algebra", a.clone());
        }
        if let Some(d) = self.datum {
            put("datum", d.to_string());
        }
        if !self.scalars.is_empty() {
            put("scalars", fmt_list(&self.scalars));
        }
        if !self.v2.is_empty() {
            put(
                "v2",
                self.v2
                    .iter()
                    .map(|v| fmt_list(v))
                    .collect::<Vec<_>>()
                    .join(";"),
            );
        }
        if let Some((a, b)) = self.dims {
            put("dims", format!("{a},{b}"));
        }
        if let Some(t) = &self.root_type {
            put("type", t.clone());
        }
        put("strategy", self.strategy.to_string());
        put("grid", self.grid.to_string());
        if let Some(x) = &self.x {
            put("x", fmt_list(x));
        }
        if let Some(x) = &self.x_prime {
            put("x_prime", fmt_list(x));
        }
        put("g_prime", self.g_prime.to_string());
        put("samples", self.samples.to_string());
        put("seed", self.seed.to_string());
        put("tol", format!("{:?}", self.tol));
        put("format", self.format.to_string());
        if let Some(o) = &self.out {
            put("out", o.display().to_string());
        }
        out
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    RunConfig::from_settings(&Settings::parse_text(text)?)
}
