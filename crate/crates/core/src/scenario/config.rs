//! Flat `key = value` scenario files.
//!
//! ```text
//! # '#' starts a comment line
//! scenario = truncation
//! alpha    = pi/25
//! epsilon  = pi/25
//! ```
//!
//! Numeric values accept plain floats and products/quotients of floats and
//! `pi` (`pi/25`, `2*pi/5`, `1e8/20`). Every key except `scenario` has a
//! per-scenario default; see [`ScenarioConfig::defaults`].

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::evolve::{Method, TimeGrid};
use crate::hilbert::{ModeDims, DEFAULT_DIM};
use crate::measures::BellStateId;
use crate::model::{analytic_amplitudes, CouplerParams, TimeUnit};
use crate::series::format_number;
use crate::C64;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: unknown key '{key}'")]
    UnknownKey { line: usize, key: String },

    #[error("invalid '{field}': {message}")]
    Invalid { field: String, message: String },
}

fn invalid(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    /// `1 − F` between numeric and closed-form truncated states.
    Truncation,
    /// Populations of `|2,0⟩`, `|0,2⟩`, `|1,2⟩`.
    Probabilities,
    /// Amplitude fidelities to Bell-like / product states.
    BellFidelities,
    /// Entropy of entanglement in ebits.
    Entropy,
    /// `B(ρ)` and `M(ρ)` of the projected qubit pair.
    Chsh,
    /// Lindblad evolution with Uhlmann fidelities to Bell-like states.
    Damped,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Scenario::Truncation,
        Scenario::Probabilities,
        Scenario::BellFidelities,
        Scenario::Entropy,
        Scenario::Chsh,
        Scenario::Damped,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Truncation => "truncation",
            Scenario::Probabilities => "probabilities",
            Scenario::BellFidelities => "bell_fidelities",
            Scenario::Entropy => "entropy",
            Scenario::Chsh => "chsh",
            Scenario::Damped => "damped",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| format!("unknown scenario '{s}'"))
    }
}

/// An observable target: a Bell-like state or a Fock level `n:m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Bell(BellStateId),
    Fock(usize, usize),
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Bell(id) => write!(f, "{id}"),
            Target::Fock(n, m) => write!(f, "{n}:{m}"),
        }
    }
}

impl FromStr for Target {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some((n, m)) = s.split_once(':') {
            let n = n.trim().parse().map_err(|_| format!("bad Fock level '{s}'"))?;
            let m = m.trim().parse().map_err(|_| format!("bad Fock level '{s}'"))?;
            return Ok(Target::Fock(n, m));
        }
        s.parse().map(Target::Bell)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub params: CouplerParams,
    pub dims: ModeDims,
    pub grid: TimeGrid,
    pub targets: Vec<Target>,
    pub method: Method,
    /// Initial Fock state `|n⟩_a|m⟩_b`.
    pub initial: (usize, usize),
    pub output_path: Option<PathBuf>,
}

/// Lossless defaults: `χ = 25`, `α = ε = π/25`.
pub const UNDAMPED_CHI: f64 = 25.0;
pub const UNDAMPED_COUPLING: f64 = PI / 25.0;
pub const UNDAMPED_WINDOW: f64 = 50.0;
/// Damped defaults: `χ = 1e8` rad/s, `α = χ/20`, `ε = α/2`, `κ = χ/500`.
pub const DAMPED_CHI: f64 = 1e8;
pub const DAMPED_DIM: usize = 6;
pub const DAMPED_WINDOW: f64 = 1e-6;
pub const DEFAULT_STEPS: usize = 2000;

impl ScenarioConfig {
    /// Defaults for `scenario`, already valid.
    pub fn defaults(scenario: Scenario) -> Self {
        let (params, dim, t_end) = if scenario == Scenario::Damped {
            let alpha = DAMPED_CHI / 20.0;
            (
                CouplerParams::damped(DAMPED_CHI, alpha, alpha / 2.0, DAMPED_CHI / 500.0),
                DAMPED_DIM,
                DAMPED_WINDOW,
            )
        } else {
            (
                CouplerParams::undamped(UNDAMPED_CHI, UNDAMPED_COUPLING, UNDAMPED_COUPLING),
                DEFAULT_DIM,
                UNDAMPED_WINDOW,
            )
        };
        let targets = match scenario {
            Scenario::Probabilities => vec![Target::Fock(2, 0), Target::Fock(0, 2), Target::Fock(1, 2)],
            Scenario::BellFidelities => [BellStateId::B1, BellStateId::B2, BellStateId::P1, BellStateId::P2]
                .into_iter()
                .map(Target::Bell)
                .collect(),
            Scenario::Damped => vec![Target::Bell(BellStateId::B1), Target::Bell(BellStateId::B2)],
            _ => Vec::new(),
        };
        Self {
            scenario,
            params,
            dims: ModeDims::square(dim).expect("default dims valid"),
            grid: TimeGrid::new(0.0, t_end, DEFAULT_STEPS).expect("default grid valid"),
            targets,
            method: Method::Integrate,
            initial: (2, 0),
            output_path: None,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.params
            .validate()
            .map_err(|e| invalid("params", e.to_string()))?;
        let (n, m) = self.initial;
        if !self.dims.contains(n, m) {
            return Err(invalid("initial_state", format!("{n}:{m} outside dims")));
        }
        let (bell_ok, fock_ok) = match self.scenario {
            Scenario::Probabilities => (false, true),
            Scenario::BellFidelities | Scenario::Damped => (true, false),
            _ => (false, false),
        };
        if !bell_ok && !fock_ok && !self.targets.is_empty() {
            return Err(invalid("targets", format!("not used by scenario {}", self.scenario)));
        }
        if (bell_ok || fock_ok) && self.targets.is_empty() {
            return Err(invalid("targets", "at least one target required"));
        }
        for t in &self.targets {
            match *t {
                Target::Bell(_) if !bell_ok => {
                    return Err(invalid("targets", format!("{t} is not a Fock level")));
                }
                Target::Fock(..) if !fock_ok => {
                    return Err(invalid("targets", format!("{t} is not a Bell-like state id")));
                }
                Target::Fock(n, m) if !self.dims.contains(n, m) => {
                    return Err(invalid("targets", format!("{t} outside dims")));
                }
                _ => {}
            }
        }
        if self.scenario == Scenario::Truncation {
            if self.initial != (2, 0) {
                return Err(invalid("initial_state", "truncation compares against the |2,0⟩ closed form"));
            }
            analytic_amplitudes(&self.params, 0.0).map_err(|e| invalid("params", e.to_string()))?;
        }
        Ok(())
    }

    /// `(key, value)` pairs in config syntax; parsing them back yields an
    /// identical config.
    pub fn to_pairs(&self) -> Vec<(String, String)> {
        let p = &self.params;
        let mut pairs = vec![
            ("scenario", self.scenario.to_string()),
            ("chi_a", format_number(p.chi_a)),
            ("chi_b", format_number(p.chi_b)),
            ("alpha", format_number(p.alpha.re)),
            ("alpha_im", format_number(p.alpha.im)),
            ("epsilon", format_number(p.epsilon.re)),
            ("epsilon_im", format_number(p.epsilon.im)),
            ("kappa_a", format_number(p.kappa_a)),
            ("kappa_b", format_number(p.kappa_b)),
            ("time_unit", p.time_unit.to_string()),
            ("dim_a", self.dims.dim_a().to_string()),
            ("dim_b", self.dims.dim_b().to_string()),
            ("t_start", format_number(self.grid.t_start())),
            ("t_end", format_number(self.grid.t_end())),
            ("n_steps", self.grid.n_steps().to_string()),
            ("initial_state", format!("{}:{}", self.initial.0, self.initial.1)),
            ("method", self.method.to_string()),
        ];
        if !self.targets.is_empty() {
            let list: Vec<String> = self.targets.iter().map(Target::to_string).collect();
            pairs.push(("targets", list.join(",")));
        }
        if let Some(path) = &self.output_path {
            pairs.push(("output_path", path.display().to_string()));
        }
        pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }

    pub fn to_config_text(&self) -> String {
        self.to_pairs().into_iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

const KNOWN_KEYS: &[&str] = &[
    "scenario",
    "chi",
    "chi_a",
    "chi_b",
    "alpha",
    "alpha_im",
    "epsilon",
    "epsilon_im",
    "kappa",
    "kappa_a",
    "kappa_b",
    "time_unit",
    "dim",
    "dim_a",
    "dim_b",
    "t_start",
    "t_end",
    "n_steps",
    "targets",
    "method",
    "initial_state",
    "output_path",
];

/// Parses a product/quotient of floats and `pi`, with optional leading sign.
pub fn parse_number(text: &str) -> Result<f64, String> {
    let s = text.trim();
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, s.strip_prefix('+').unwrap_or(s)),
    };
    if body.is_empty() {
        return Err(format!("empty number '{text}'"));
    }
    let mut value = sign;
    let mut op = '*';
    let mut start = 0;
    let bytes: Vec<char> = body.chars().collect();
    let mut i = 0;
    let factor = |tok: &str| -> Result<f64, String> {
        let tok = tok.trim();
        if tok.eq_ignore_ascii_case("pi") {
            Ok(PI)
        } else {
            tok.parse::<f64>().map_err(|_| format!("cannot parse '{text}' as a number"))
        }
    };
    while i <= bytes.len() {
        let is_op = i < bytes.len() && (bytes[i] == '*' || bytes[i] == '/');
        if i == bytes.len() || is_op {
            let tok: String = bytes[start..i].iter().collect();
            let f = factor(&tok)?;
            value = if op == '*' { value * f } else { value / f };
            if i < bytes.len() {
                op = bytes[i];
            }
            start = i + 1;
        }
        i += 1;
    }
    if !value.is_finite() {
        return Err(format!("'{text}' is not finite"));
    }
    Ok(value)
}

struct Entry {
    line: usize,
    value: String,
}

fn parse_entries(text: &str) -> Result<HashMap<String, Entry>, ConfigError> {
    let mut entries: HashMap<String, Entry> = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ConfigError::Parse {
                line,
                message: format!("expected 'key = value', found '{content}'"),
            });
        };
        let key = key.trim().to_string();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(ConfigError::UnknownKey { line, key });
        }
        if let Some(prev) = entries.get(&key) {
            return Err(ConfigError::Parse {
                line,
                message: format!("duplicate key '{key}' (first set on line {})", prev.line),
            });
        }
        entries.insert(
            key,
            Entry {
                line,
                value: value.trim().to_string(),
            },
        );
    }
    Ok(entries)
}

struct Reader {
    entries: HashMap<String, Entry>,
}

impl Reader {
    fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.get(key)
    }

    fn parsed<T>(&self, key: &str, parse: impl Fn(&str) -> Result<T, String>) -> Result<Option<T>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some(e) => parse(&e.value)
                .map(Some)
                .map_err(|message| ConfigError::Parse { line: e.line, message }),
        }
    }

    fn number(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        self.parsed(key, parse_number)
    }

    fn count(&self, key: &str) -> Result<Option<usize>, ConfigError> {
        self.parsed(key, |s| s.parse::<usize>().map_err(|_| format!("'{s}' is not a non-negative integer")))
    }

    /// `general` applies to both modes unless a mode-specific key is given;
    /// giving both is ambiguous.
    fn paired<T: Copy>(
        &self,
        general: &str,
        specific: [&str; 2],
        fetch: impl Fn(&Self, &str) -> Result<Option<T>, ConfigError>,
    ) -> Result<[Option<T>; 2], ConfigError> {
        let g = fetch(self, general)?;
        let a = fetch(self, specific[0])?;
        let b = fetch(self, specific[1])?;
        if g.is_some() && (a.is_some() || b.is_some()) {
            let e = self.get(general).expect("present");
            return Err(ConfigError::Parse {
                line: e.line,
                message: format!("'{general}' conflicts with '{}'/'{}'", specific[0], specific[1]),
            });
        }
        Ok([a.or(g), b.or(g)])
    }
}

/// Parses config text, applying scenario defaults and validating.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let r = Reader {
        entries: parse_entries(text)?,
    };
    let scenario: Scenario = r
        .parsed("scenario", |s| s.parse())?
        .ok_or_else(|| invalid("scenario", "required key missing"))?;
    let mut cfg = ScenarioConfig::defaults(scenario);
    let p = &mut cfg.params;

    let [chi_a, chi_b] = r.paired("chi", ["chi_a", "chi_b"], Reader::number)?;
    p.chi_a = chi_a.unwrap_or(p.chi_a);
    p.chi_b = chi_b.unwrap_or(p.chi_b);
    // couplings given relative to nothing: plain values override defaults
    let alpha_re = r.number("alpha")?;
    let alpha_im = r.number("alpha_im")?;
    if alpha_re.is_some() || alpha_im.is_some() {
        p.alpha = C64::new(alpha_re.unwrap_or(p.alpha.re), alpha_im.unwrap_or(0.0));
    }
    let eps_re = r.number("epsilon")?;
    let eps_im = r.number("epsilon_im")?;
    if eps_re.is_some() || eps_im.is_some() {
        p.epsilon = C64::new(eps_re.unwrap_or(p.epsilon.re), eps_im.unwrap_or(0.0));
    }
    let [ka, kb] = r.paired("kappa", ["kappa_a", "kappa_b"], Reader::number)?;
    p.kappa_a = ka.unwrap_or(p.kappa_a);
    p.kappa_b = kb.unwrap_or(p.kappa_b);
    if let Some(unit) = r.parsed("time_unit", |s| s.parse::<TimeUnit>())? {
        p.time_unit = unit;
    }

    let [da, db] = r.paired("dim", ["dim_a", "dim_b"], Reader::count)?;
    cfg.dims = ModeDims::new(da.unwrap_or(cfg.dims.dim_a()), db.unwrap_or(cfg.dims.dim_b()))
        .map_err(|e| invalid("dims", e.to_string()))?;

    let t_start = r.number("t_start")?.unwrap_or(cfg.grid.t_start());
    let t_end = r.number("t_end")?.unwrap_or(cfg.grid.t_end());
    let n_steps = r.count("n_steps")?.unwrap_or(cfg.grid.n_steps());
    cfg.grid = TimeGrid::new(t_start, t_end, n_steps).map_err(|e| invalid("grid", e.to_string()))?;

    if let Some(targets) = r.parsed("targets", |s| {
        s.split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(str::parse::<Target>)
            .collect::<Result<Vec<_>, _>>()
    })? {
        cfg.targets = targets;
    }
    if let Some(method) = r.parsed("method", |s| s.parse::<Method>())? {
        cfg.method = method;
    }
    if let Some(init) = r.parsed("initial_state", |s| match s.parse::<Target>() {
        Ok(Target::Fock(n, m)) => Ok((n, m)),
        _ => Err(format!("initial_state must be a Fock level n:m, got '{s}'")),
    })? {
        cfg.initial = init;
    }
    if let Some(path) = r.get("output_path") {
        cfg.output_path = Some(PathBuf::from(&path.value));
    }

    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}

/// Rebuilds the config echoed in a CSV header (`# key = value` lines).
/// Metadata keys that are not config keys are skipped.
pub fn config_from_csv_header(csv: &str) -> Result<ScenarioConfig, ConfigError> {
    let text: String = csv
        .lines()
        .take_while(|l| l.starts_with('#'))
        .filter_map(|l| {
            let body = l.trim_start_matches('#').trim();
            let key = body.split_once('=')?.0.trim();
            KNOWN_KEYS.contains(&key).then(|| format!("{body}\n"))
        })
        .collect();
    parse_config(&text)
}
