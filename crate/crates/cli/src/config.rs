use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use qrabi_core::models::SectorIndex;
use qrabi_core::perturbation::linspace;
use qrabi_core::states::{CatKind, RefKind};
use qrabi_core::wigner::PlaneSection;
use qrabi_core::{ModelId, ModelParams};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("invalid value for `{field}`: {reason}")]
    Field { field: String, reason: String },
    #[error("{path}:{line}: {reason}")]
    File {
        path: String,
        line: usize,
        reason: String,
    },
    #[error("cannot read config file {path}: {reason}")]
    Read { path: String, reason: String },
}

fn field_err(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Field {
        field: field.into(),
        reason: reason.into(),
    }
}

/// States that `wigner` and `state` can construct.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateKind {
    /// Ground state of the configured model.
    Ground,
    Cat(CatKind),
    Reference(RefKind),
    /// One-mode `|alpha> +- |-alpha>`.
    Z2 { plus: bool },
}

impl FromStr for StateKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let key = s.to_ascii_lowercase().replace('_', "-");
        match key.as_str() {
            "ground" => Ok(StateKind::Ground),
            "z2-even" | "z2-plus" => Ok(StateKind::Z2 { plus: true }),
            "z2-odd" | "z2-minus" => Ok(StateKind::Z2 { plus: false }),
            "mix" | "q2b-cat" | "product-2b" | "product" => {
                RefKind::from_str(&key).map(StateKind::Reference).map_err(|e| e.to_string())
            }
            _ => CatKind::from_str(&key).map(StateKind::Cat).map_err(|_| {
                format!(
                    "unknown state kind `{s}` (expected ground, qb1, q2b, b2, mix, q2b-cat, \
                     product-2b, z2-even, z2-odd)"
                )
            }),
        }
    }
}

impl StateKind {
    pub fn name(&self) -> &'static str {
        match self {
            StateKind::Ground => "ground",
            StateKind::Cat(CatKind::Qb1) => "qb1",
            StateKind::Cat(CatKind::Q2b) => "q2b",
            StateKind::Cat(CatKind::B2) => "b2",
            StateKind::Reference(RefKind::Q2bCat) => "q2b-cat",
            StateKind::Reference(RefKind::Mix) => "mix",
            StateKind::Reference(RefKind::Product2b) => "product-2b",
            StateKind::Z2 { plus: true } => "z2-even",
            StateKind::Z2 { plus: false } => "z2-odd",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SectionKind {
    Diag,
    Fringe,
}

impl FromStr for SectionKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "diag" | "diagonal" => Ok(SectionKind::Diag),
            "fringe" => Ok(SectionKind::Fringe),
            _ => Err(format!("unknown section `{s}` (expected diag or fringe)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaGrid {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl LambdaGrid {
    pub fn values(&self) -> Vec<f64> {
        linspace(self.start, self.stop, self.steps)
    }
}

impl FromStr for LambdaGrid {
    type Err = String;

    /// `start:stop:steps`.
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, n] = parts[..] else {
            return Err(format!("expected start:stop:steps, got `{s}`"));
        };
        let steps = n
            .trim()
            .parse::<usize>()
            .map_err(|_| format!("steps must be a positive integer, got `{n}`"))?;
        Ok(LambdaGrid {
            start: parse_real(a)?,
            stop: parse_real(b)?,
            steps,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WignerSpec {
    pub kind: StateKind,
    pub k: SectorIndex,
    pub alpha: f64,
    pub section: SectionKind,
    pub b_coord: i64,
    pub diag_scale: f64,
    pub extent: f64,
    pub resolution: usize,
}

impl WignerSpec {
    pub fn plane_section(&self) -> PlaneSection {
        match self.section {
            SectionKind::Diag => PlaneSection::Diagonal {
                scale: self.diag_scale,
            },
            SectionKind::Fringe => PlaneSection::Fringe { b: self.b_coord },
        }
    }
}

/// Everything one command needs; built from defaults, a config file and flags.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelId,
    pub params: ModelParams,
    pub truncation: usize,
    pub lambda_grid: LambdaGrid,
    pub wigner: WignerSpec,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model: ModelId::R1,
            params: ModelParams::default(),
            truncation: 50,
            lambda_grid: LambdaGrid {
                start: 0.0,
                stop: 1.5,
                steps: 16,
            },
            wigner: WignerSpec {
                kind: StateKind::Cat(CatKind::Q2b),
                k: SectorIndex::new(0).expect("sector 0"),
                alpha: 3.0,
                section: SectionKind::Diag,
                b_coord: 0,
                diag_scale: std::f64::consts::FRAC_1_SQRT_2,
                extent: 5.0,
                resolution: 61,
            },
            out: PathBuf::from("."),
        }
    }
}

/// Keys accepted in config files and as overrides, in canonical spelling.
pub const KEYS: [&str; 16] = [
    "model",
    "omega",
    "b-field",
    "phi",
    "lambda",
    "lambda-range",
    "truncation",
    "kind",
    "k",
    "alpha",
    "section",
    "b-coord",
    "diag-scale",
    "extent",
    "resolution",
    "out",
];

fn canonical_key(key: &str) -> Option<&'static str> {
    let k = key.trim().to_ascii_lowercase().replace('_', "-");
    KEYS.iter().copied().find(|&c| c == k)
}

/// Real number with an optional `pi` factor: `1.5`, `-pi`, `7pi/6`, `7*pi/6`, `2.5e-3`.
pub fn parse_real(s: &str) -> Result<f64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let t = t.to_ascii_lowercase();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (t.as_str(), None),
    };
    let term = |x: &str| -> Result<f64, String> {
        if let Some(coef) = x.strip_suffix("pi") {
            let coef = coef.strip_suffix('*').unwrap_or(coef);
            let c = match coef {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => c.parse::<f64>().map_err(|_| format!("not a number: `{s}`"))?,
            };
            Ok(c * PI)
        } else {
            x.parse::<f64>().map_err(|_| format!("not a number: `{s}`"))
        }
    };
    let mut v = term(num)?;
    if let Some(d) = den {
        let d = term(d)?;
        if d == 0.0 {
            return Err(format!("division by zero in `{s}`"));
        }
        v /= d;
    }
    if !v.is_finite() {
        return Err(format!("not a finite number: `{s}`"));
    }
    Ok(v)
}

/// Parses `key = value` lines; `#` starts a comment. Keys are normalized.
pub fn parse_config_text(text: &str, origin: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |reason: String| ConfigError::File {
            path: origin.into(),
            line: i + 1,
            reason,
        };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
        let canon = canonical_key(key).ok_or_else(|| err(format!("unknown key `{}`", key.trim())))?;
        let value = value.trim();
        if value.is_empty() {
            return Err(err(format!("empty value for `{canon}`")));
        }
        if out.insert(canon.to_string(), value.to_string()).is_some() {
            return Err(err(format!("duplicate key `{canon}`")));
        }
    }
    Ok(out)
}

pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    parse_config_text(&text, &path.display().to_string())
}

fn parse_field<T: FromStr>(field: &str, v: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    v.trim().parse::<T>().map_err(|e| field_err(field, e.to_string()))
}

impl RunConfig {
    /// Defaults overridden by `settings` (config-file values first, flags
    /// after), then validated.
    pub fn from_settings<'a, I>(settings: I) -> Result<Self, ConfigError>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut c = RunConfig::default();
        for (key, value) in settings {
            c.apply(key, value)?;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn apply(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let key = canonical_key(key).ok_or_else(|| field_err(key, "unknown setting"))?;
        let real = |v: &str| parse_real(v).map_err(|e| field_err(key, e));
        match key {
            "model" => {
                self.model = value
                    .trim()
                    .parse::<ModelId>()
                    .map_err(|e| field_err(key, e.to_string()))?
            }
            "omega" => self.params.omega = real(value)?,
            "b-field" => self.params.b_field = real(value)?,
            "phi" => self.params.phi = real(value)?,
            "lambda" => self.params.lambda = real(value)?,
            "lambda-range" => self.lambda_grid = parse_field(key, value)?,
            "truncation" => self.truncation = parse_field(key, value)?,
            "kind" => self.wigner.kind = parse_field(key, value)?,
            "k" => {
                let k: usize = parse_field(key, value)?;
                self.wigner.k = SectorIndex::new(k).map_err(|_| field_err(key, "must be 0, 1 or 2"))?;
            }
            "alpha" => self.wigner.alpha = real(value)?,
            "section" => self.wigner.section = parse_field(key, value)?,
            "b-coord" => self.wigner.b_coord = parse_field(key, value)?,
            "diag-scale" => self.wigner.diag_scale = real(value)?,
            "extent" => self.wigner.extent = real(value)?,
            "resolution" => self.wigner.resolution = parse_field(key, value)?,
            "out" => self.out = PathBuf::from(value.trim()),
            _ => unreachable!("canonical keys are exhaustive"),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.params.validate().map_err(|e| field_err("params", e.to_string()))?;
        if self.truncation < 1 {
            return Err(field_err("truncation", "must be >= 1"));
        }
        let g = &self.lambda_grid;
        if g.steps < 1 {
            return Err(field_err("lambda-range", "steps must be >= 1"));
        }
        if g.start < 0.0 || g.stop < 0.0 {
            return Err(field_err("lambda-range", "couplings must be non-negative"));
        }
        let w = &self.wigner;
        if w.resolution < 2 {
            return Err(field_err("resolution", "must be >= 2"));
        }
        if !(w.extent > 0.0) {
            return Err(field_err("extent", "must be > 0"));
        }
        if !(w.diag_scale > 0.0) {
            return Err(field_err("diag-scale", "must be > 0"));
        }
        if !(w.alpha >= 0.0) {
            return Err(field_err("alpha", "must be >= 0"));
        }
        Ok(())
    }
}
