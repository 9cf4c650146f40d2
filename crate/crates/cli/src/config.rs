//! `key = value` run configuration.
//!
//! One pair per line, `#` starts a comment, omitted keys take their defaults. Every error names
//! the line (or `--set` override) it comes from.

use std::collections::HashMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use weinstein_core::grid::{BaseGrid, ScaleGrid};
use weinstein_core::localization::SymbolKind;

/// Where a window comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum WindowSpec {
    /// `lg:K`, the Laguerre-Gaussian window of order `K`.
    LaguerreGaussian(usize),
    /// `csv:PATH`, a field CSV sampled on the grid it is used on.
    Csv(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub enum SymbolSpec {
    Named(SymbolKind),
    /// `csv:PATH`, a scale-field CSV on the operator scale grid, treated as an `L^1(X)` symbol.
    Csv(PathBuf),
}

/// The signal fed to `transform`, `cwt` and `localize`.
#[derive(Debug, Clone, PartialEq)]
pub enum InputSpec {
    /// `gaussian:S`, `exp(-|x|^2 / (2 S^2))`.
    Gaussian(f64),
    /// `mixture`, a seeded random Gaussian mixture.
    Mixture,
    Csv(PathBuf),
}

impl fmt::Display for WindowSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WindowSpec::LaguerreGaussian(k) => write!(f, "lg:{k}"),
            WindowSpec::Csv(p) => write!(f, "csv:{}", p.display()),
        }
    }
}

impl fmt::Display for SymbolSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolSpec::Named(k) => f.write_str(k.name()),
            SymbolSpec::Csv(p) => write!(f, "csv:{}", p.display()),
        }
    }
}

impl fmt::Display for InputSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InputSpec::Gaussian(s) => write!(f, "gaussian:{s}"),
            InputSpec::Mixture => f.write_str("mixture"),
            InputSpec::Csv(p) => write!(f, "csv:{}", p.display()),
        }
    }
}

fn csv_path(v: &str) -> Option<PathBuf> {
    v.strip_prefix("csv:").filter(|p| !p.is_empty()).map(PathBuf::from)
}

impl FromStr for WindowSpec {
    type Err = String;
    fn from_str(v: &str) -> Result<Self, String> {
        if let Some(p) = csv_path(v) {
            return Ok(WindowSpec::Csv(p));
        }
        v.strip_prefix("lg:")
            .and_then(|k| k.parse().ok())
            .map(WindowSpec::LaguerreGaussian)
            .ok_or_else(|| format!("expected lg:K or csv:PATH, got '{v}'"))
    }
}

impl FromStr for SymbolSpec {
    type Err = String;
    fn from_str(v: &str) -> Result<Self, String> {
        if let Some(p) = csv_path(v) {
            return Ok(SymbolSpec::Csv(p));
        }
        SymbolKind::parse(v).map(SymbolSpec::Named).ok_or_else(|| {
            let names: Vec<_> = SymbolKind::ALL.iter().map(|k| k.name()).collect();
            format!("expected one of {} or csv:PATH, got '{v}'", names.join(", "))
        })
    }
}

impl FromStr for InputSpec {
    type Err = String;
    fn from_str(v: &str) -> Result<Self, String> {
        if v == "mixture" {
            return Ok(InputSpec::Mixture);
        }
        if let Some(p) = csv_path(v) {
            return Ok(InputSpec::Csv(p));
        }
        v.strip_prefix("gaussian:")
            .and_then(|s| s.parse().ok())
            .map(InputSpec::Gaussian)
            .ok_or_else(|| format!("expected gaussian:S, mixture or csv:PATH, got '{v}'"))
    }
}

/// Grid extents and sizes: `[-L, L]^d` with `n` nodes per axis, `(0, R]` with `m` nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridParams {
    pub cart_extent: f64,
    pub n: usize,
    pub radial_extent: f64,
    pub m: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub kernel: f64,
    pub fixed_point: f64,
    pub plancherel: f64,
    pub translation: f64,
    pub mass: f64,
    pub convolution: f64,
    pub slack: f64,
    pub refinement: f64,
    pub admissibility: f64,
    pub spread: f64,
    pub wavelet: f64,
    pub exact: f64,
    pub rank_one: f64,
    pub examples: f64,
    pub sv_threshold: f64,
    pub sv_fraction: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            kernel: 1e-12,
            fixed_point: 1e-3,
            plancherel: 1e-3,
            translation: 1e-3,
            mass: 1e-6,
            convolution: 2e-3,
            slack: 0.05,
            refinement: 3.0,
            admissibility: 1e-4,
            spread: 1e-3,
            wavelet: 2e-2,
            exact: 1e-10,
            rank_one: 1e-8,
            examples: 3e-2,
            sv_threshold: 1e-3,
            sv_fraction: 0.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub alpha: f64,
    pub d: usize,
    pub grid: GridParams,
    pub a_min: f64,
    pub a_max: f64,
    pub scales: usize,
    /// Grid on which localization operators are assembled densely.
    pub op_grid: GridParams,
    pub op_scales: usize,
    pub phi: WindowSpec,
    pub psi: WindowSpec,
    pub symbol: SymbolSpec,
    pub input: InputSpec,
    /// Orders swept by `verify` and `convergence`.
    pub alphas: Vec<f64>,
    /// Laguerre-Gaussian order pairs swept by `verify`.
    pub pairs: Vec<(usize, usize)>,
    pub norm_p: Vec<f64>,
    pub kernel_samples: usize,
    pub mixtures: usize,
    pub levels: usize,
    /// Convergence levels with more nodes are skipped and flagged.
    pub max_nodes: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub tol: Tolerances,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            alpha: 0.5,
            d: 1,
            grid: GridParams {
                cart_extent: 12.0,
                n: 65,
                radial_extent: 12.0,
                m: 64,
            },
            a_min: 1.0 / 16.0,
            a_max: 16.0,
            scales: 48,
            op_grid: GridParams {
                cart_extent: 6.0,
                n: 25,
                radial_extent: 6.0,
                m: 24,
            },
            op_scales: 48,
            phi: WindowSpec::LaguerreGaussian(1),
            psi: WindowSpec::LaguerreGaussian(2),
            symbol: SymbolSpec::Named(SymbolKind::GaussianBump),
            input: InputSpec::Gaussian(1.0),
            alphas: vec![0.0, 0.5, 1.5],
            pairs: vec![(1, 2), (1, 1)],
            norm_p: vec![1.0, 2.0, f64::INFINITY, 1.25, 1.5, 3.0],
            kernel_samples: 10_000,
            mixtures: 20,
            levels: 2,
            max_nodes: 70_000,
            seed: 42,
            out: PathBuf::from("out"),
            tol: Tolerances::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    /// `line N`, `--set #N` or `defaults`.
    pub location: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

impl std::error::Error for ConfigError {}

fn num<T: FromStr>(v: &str) -> Result<T, String> {
    v.parse().map_err(|_| format!("malformed value '{v}'"))
}

fn list<T: FromStr>(v: &str) -> Result<Vec<T>, String> {
    v.split(',').map(|s| num(s.trim())).collect()
}

fn join<T: fmt::Display>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn parse_pairs(v: &str) -> Result<Vec<(usize, usize)>, String> {
    v.split(',')
        .map(|p| {
            let (a, b) = p.trim().split_once(':').ok_or_else(|| format!("expected K1:K2, got '{p}'"))?;
            Ok((num(a.trim())?, num(b.trim())?))
        })
        .collect()
}

macro_rules! tolerance_keys {
    ($($key:literal => $field:ident),* $(,)?) => {
        const TOLERANCE_KEYS: &[&str] = &[$($key),*];

        fn set_tolerance(t: &mut Tolerances, key: &str, v: &str) -> Option<Result<(), String>> {
            match key {
                $($key => Some(num(v).map(|x| t.$field = x)),)*
                _ => None,
            }
        }

        fn tolerance_entries(t: &Tolerances) -> Vec<(&'static str, f64)> {
            vec![$(($key, t.$field)),*]
        }
    };
}

tolerance_keys! {
    "tol_kernel" => kernel,
    "tol_fixed_point" => fixed_point,
    "tol_plancherel" => plancherel,
    "tol_translation" => translation,
    "tol_mass" => mass,
    "tol_convolution" => convolution,
    "tol_slack" => slack,
    "tol_refinement" => refinement,
    "tol_admissibility" => admissibility,
    "tol_spread" => spread,
    "tol_wavelet" => wavelet,
    "tol_exact" => exact,
    "tol_rank_one" => rank_one,
    "tol_examples" => examples,
    "tol_sv_threshold" => sv_threshold,
    "tol_sv_fraction" => sv_fraction,
}

/// Every accepted key, in serialization order.
pub const KEYS: &[&str] = &[
    "alpha", "d", "L", "n", "R", "m", "a_min", "a_max", "J", "op_L", "op_n", "op_R", "op_m", "op_J", "phi",
    "psi", "symbol", "input", "alphas", "pairs", "norm_p", "kernel_samples", "mixtures", "levels", "max_nodes", "seed",
    "out",
];

impl RunConfig {
    /// Set one key from its textual value (syntax only; constraints are checked by `validate`).
    pub fn set(&mut self, key: &str, v: &str) -> Result<(), String> {
        match key {
            "alpha" => self.alpha = num(v)?,
            "d" => self.d = num(v)?,
            "L" => self.grid.cart_extent = num(v)?,
            "n" => self.grid.n = num(v)?,
            "R" => self.grid.radial_extent = num(v)?,
            "m" => self.grid.m = num(v)?,
            "a_min" => self.a_min = num(v)?,
            "a_max" => self.a_max = num(v)?,
            "J" => self.scales = num(v)?,
            "op_L" => self.op_grid.cart_extent = num(v)?,
            "op_n" => self.op_grid.n = num(v)?,
            "op_R" => self.op_grid.radial_extent = num(v)?,
            "op_m" => self.op_grid.m = num(v)?,
            "op_J" => self.op_scales = num(v)?,
            "phi" => self.phi = v.parse()?,
            "psi" => self.psi = v.parse()?,
            "symbol" => self.symbol = v.parse()?,
            "input" => self.input = v.parse()?,
            "alphas" => self.alphas = list(v)?,
            "pairs" => self.pairs = parse_pairs(v)?,
            "norm_p" => self.norm_p = list(v)?,
            "kernel_samples" => self.kernel_samples = num(v)?,
            "mixtures" => self.mixtures = num(v)?,
            "levels" => self.levels = num(v)?,
            "max_nodes" => self.max_nodes = num(v)?,
            "seed" => self.seed = num(v)?,
            "out" => {
                if v.is_empty() {
                    return Err("output directory must not be empty".into());
                }
                self.out = PathBuf::from(v)
            }
            _ => match set_tolerance(&mut self.tol, key, v) {
                Some(r) => r?,
                None => return Err(format!("unknown key '{key}'")),
            },
        }
        Ok(())
    }

    /// `(key, value)` for every key, in a form `set` accepts back.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let mut out = vec![
            ("alpha", self.alpha.to_string()),
            ("d", self.d.to_string()),
            ("L", self.grid.cart_extent.to_string()),
            ("n", self.grid.n.to_string()),
            ("R", self.grid.radial_extent.to_string()),
            ("m", self.grid.m.to_string()),
            ("a_min", self.a_min.to_string()),
            ("a_max", self.a_max.to_string()),
            ("J", self.scales.to_string()),
            ("op_L", self.op_grid.cart_extent.to_string()),
            ("op_n", self.op_grid.n.to_string()),
            ("op_R", self.op_grid.radial_extent.to_string()),
            ("op_m", self.op_grid.m.to_string()),
            ("op_J", self.op_scales.to_string()),
            ("phi", self.phi.to_string()),
            ("psi", self.psi.to_string()),
            ("symbol", self.symbol.to_string()),
            ("input", self.input.to_string()),
            ("alphas", join(&self.alphas)),
            (
                "pairs",
                self.pairs.iter().map(|(a, b)| format!("{a}:{b}")).collect::<Vec<_>>().join(","),
            ),
            ("norm_p", join(&self.norm_p)),
            ("kernel_samples", self.kernel_samples.to_string()),
            ("mixtures", self.mixtures.to_string()),
            ("levels", self.levels.to_string()),
            ("max_nodes", self.max_nodes.to_string()),
            ("seed", self.seed.to_string()),
            ("out", self.out.display().to_string()),
        ];
        out.extend(tolerance_entries(&self.tol).into_iter().map(|(k, v)| (k, v.to_string())));
        out
    }

    /// The configuration as parseable text.
    pub fn serialize(&self) -> String {
        self.entries().into_iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    /// Constraint violations as `(offending key, message)`.
    fn violations(&self) -> Vec<(Vec<&'static str>, String)> {
        let mut out: Vec<(Vec<&'static str>, String)> = Vec::new();
        let mut bad = |keys: &[&'static str], msg: String| out.push((keys.to_vec(), msg));
        if !(self.alpha > -0.5) {
            bad(&["alpha"], format!("alpha must satisfy alpha > -1/2, got {}", self.alpha));
        }
        for &a in &self.alphas {
            if !(a > -0.5) {
                bad(&["alphas"], format!("every order must satisfy alpha > -1/2, got {a}"));
            }
        }
        if self.alphas.is_empty() {
            bad(&["alphas"], "at least one order is required".into());
        }
        if self.pairs.is_empty() {
            bad(&["pairs"], "at least one window pair is required".into());
        }
        for &p in &self.norm_p {
            if !(p >= 1.0) {
                bad(&["norm_p"], format!("norm exponents must be >= 1, got {p}"));
            }
        }
        if self.levels < 2 {
            bad(&["levels"], format!("a convergence study needs at least 2 levels, got {}", self.levels));
        }
        if self.max_nodes == 0 {
            bad(&["max_nodes"], "the node limit must be positive".into());
        }
        if self.kernel_samples == 0 {
            bad(&["kernel_samples"], "at least one kernel sample is required".into());
        }
        if self.mixtures < 2 {
            bad(&["mixtures"], format!("at least 2 mixtures are required, got {}", self.mixtures));
        }
        if let InputSpec::Gaussian(s) = self.input {
            if !(s > 0.0 && s.is_finite()) {
                bad(&["input"], format!("Gaussian width must be positive, got {s}"));
            }
        }
        for (k, v) in tolerance_entries(&self.tol) {
            if !(v >= 0.0 && v.is_finite()) {
                let key = TOLERANCE_KEYS.iter().find(|t| **t == k).copied().unwrap_or("tol");
                bad(&[key], format!("tolerance must be finite and nonnegative, got {v}"));
            }
        }
        if !(self.tol.sv_fraction <= 1.0) {
            bad(&["tol_sv_fraction"], "spectrum fraction must lie in [0, 1]".into());
        }
        // the library re-validates the grids
        let alphas: Vec<f64> = std::iter::once(self.alpha).chain(self.alphas.iter().copied()).collect();
        for (g, j, keys) in [
            (self.grid, self.scales, ["L", "n", "R", "m", "J", "d"]),
            (self.op_grid, self.op_scales, ["op_L", "op_n", "op_R", "op_m", "op_J", "d"]),
        ] {
            let alpha = alphas.iter().copied().find(|a| *a > -0.5).unwrap_or(0.0);
            match BaseGrid::new(alpha, self.d, g.cart_extent, g.n, g.radial_extent, g.m) {
                Ok(base) => {
                    if let Err(e) = ScaleGrid::new(&base, self.a_min, self.a_max, j) {
                        bad(&[keys[4], "a_min", "a_max"], format!("{}/a_min/a_max: {e}", keys[4]));
                    }
                }
                Err(e) => bad(&keys, format!("{}: {e}", keys[..4].join("/"))),
            }
        }
        out
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.validate_with(&HashMap::new())
    }

    fn validate_with(&self, origins: &HashMap<String, String>) -> Result<(), ConfigError> {
        match self.violations().into_iter().next() {
            None => Ok(()),
            Some((keys, message)) => {
                // blame the last explicit setting among the keys involved
                let location = keys
                    .iter()
                    .filter_map(|k| origins.get(*k))
                    .max_by_key(|o| origin_rank(o))
                    .cloned()
                    .unwrap_or_else(|| "defaults".into());
                Err(ConfigError { location, message })
            }
        }
    }
}

fn origin_rank(o: &str) -> (u8, usize) {
    let n = o.rsplit(|c: char| !c.is_ascii_digit()).next().and_then(|s| s.parse().ok()).unwrap_or(0);
    (u8::from(o.starts_with("--set")), n)
}

/// Parse configuration text; see the module docs for the format.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    parse_with_overrides(text, &[])
}

/// Parse configuration text, then apply `key=value` overrides in order.
pub fn parse_with_overrides(text: &str, overrides: &[String]) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    let mut origins: HashMap<String, String> = HashMap::new();
    let mut seen: HashMap<String, String> = HashMap::new();
    let lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (format!("line {}", i + 1), l.split('#').next().unwrap_or("").to_string()));
    let sets = overrides.iter().enumerate().map(|(i, l)| (format!("--set #{}", i + 1), l.clone()));
    for (location, raw) in lines.chain(sets) {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| ConfigError {
            location: location.clone(),
            message,
        };
        let (key, value) = line.split_once('=').ok_or_else(|| err(format!("expected key = value, got '{line}'")))?;
        let (key, value) = (key.trim(), value.trim());
        if !location.starts_with("--set") {
            if let Some(prev) = seen.insert(key.to_string(), location.clone()) {
                return Err(err(format!("duplicate key '{key}' (first set on {prev})")));
            }
        }
        cfg.set(key, value).map_err(|m| err(format!("{key}: {m}")))?;
        origins.insert(key.to_string(), location);
    }
    cfg.validate_with(&origins)?;
    Ok(cfg)
}
