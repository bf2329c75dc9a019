//! Flat key-value configuration parsing.
//!
//! The format is line-oriented plain text: `key = value`, `#` comments,
//! blank lines ignored. Keys are the documented names below, values are SI
//! numbers, enum words, or `optimal` for the impedances. Parsing is strict:
//! unknown keys, duplicate keys, and non-finite numbers are errors, never
//! panics, regardless of the input bytes.

use crate::params::PhysicalParams;
use crate::{Error, Result};
use std::collections::HashSet;
use std::path::PathBuf;

#[derive(Debug, Clone)]
struct Entry {
    line: usize,
    key: String,
    value: String,
}

/// Ordered key-value pairs with source line numbers.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    entries: Vec<Entry>,
}

impl RawConfig {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|e| e.key == key)
            .map(|e| e.value.as_str())
    }

    fn line_of(&self, key: &str) -> usize {
        self.entries
            .iter()
            .find(|e| e.key == key)
            .map(|e| e.line)
            .unwrap_or(0)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.key.as_str())
    }

    fn f64(&self, key: &str) -> Result<Option<f64>> {
        match self.get(key) {
            None => Ok(None),
            Some(raw) => {
                let v: f64 = raw.parse().map_err(|_| {
                    Error::config(self.line_of(key), format!("`{key}` is not a number: `{raw}`"))
                })?;
                if !v.is_finite() {
                    return Err(Error::config(
                        self.line_of(key),
                        format!("`{key}` must be finite, got `{raw}`"),
                    ));
                }
                Ok(Some(v))
            }
        }
    }

    fn usize(&self, key: &str) -> Result<Option<usize>> {
        match self.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse().map(Some).map_err(|_| {
                Error::config(
                    self.line_of(key),
                    format!("`{key}` is not a non-negative integer: `{raw}`"),
                )
            }),
        }
    }

    fn u32(&self, key: &str) -> Result<Option<u32>> {
        match self.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse().map(Some).map_err(|_| {
                Error::config(
                    self.line_of(key),
                    format!("`{key}` is not a non-negative integer: `{raw}`"),
                )
            }),
        }
    }

    fn reject_unknown(&self, known: &[&str]) -> Result<()> {
        for e in &self.entries {
            if !known.contains(&e.key.as_str()) {
                return Err(Error::config(e.line, format!("unknown key `{}`", e.key)));
            }
        }
        Ok(())
    }
}

/// Parses `key = value` lines; the syntactic half of every config format.
pub fn parse_key_values(text: &str) -> Result<RawConfig> {
    let mut entries: Vec<Entry> = Vec::new();
    let mut seen = HashSet::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let stripped = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        let stripped = stripped.trim();
        if stripped.is_empty() {
            continue;
        }
        let Some(eq) = stripped.find('=') else {
            return Err(Error::config(line, "expected `key = value`"));
        };
        let key = stripped[..eq].trim();
        let value = stripped[eq + 1..].trim();
        if key.is_empty() {
            return Err(Error::config(line, "empty key"));
        }
        if !key
            .chars()
            .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
        {
            return Err(Error::config(
                line,
                format!("key `{key}` may only contain [a-z0-9_]"),
            ));
        }
        if value.is_empty() {
            return Err(Error::config(line, format!("key `{key}` has no value")));
        }
        if !seen.insert(key.to_string()) {
            return Err(Error::config(line, format!("duplicate key `{key}`")));
        }
        entries.push(Entry {
            line,
            key: key.to_string(),
            value: value.to_string(),
        });
    }
    Ok(RawConfig { entries })
}

/// The physical-parameter keys, matching the field names.
pub const PHYSICAL_KEYS: [&str; 11] = [
    "side_length",
    "half_thickness",
    "mass_density",
    "young_modulus",
    "poisson_ratio",
    "actuator_count",
    "piezo_coupling",
    "piezo_capacitance",
    "ground_capacitance",
    "net_inductance",
    "net_resistance",
];

fn apply_physical_overrides(raw: &RawConfig, p: &mut PhysicalParams) -> Result<()> {
    if let Some(v) = raw.f64("side_length")? {
        p.side_length = v;
    }
    if let Some(v) = raw.f64("half_thickness")? {
        p.half_thickness = v;
    }
    if let Some(v) = raw.f64("mass_density")? {
        p.mass_density = v;
    }
    if let Some(v) = raw.f64("young_modulus")? {
        p.young_modulus = v;
    }
    if let Some(v) = raw.f64("poisson_ratio")? {
        p.poisson_ratio = v;
    }
    if let Some(v) = raw.u32("actuator_count")? {
        p.actuator_count = v;
    }
    if let Some(v) = raw.f64("piezo_coupling")? {
        p.piezo_coupling = v;
    }
    if let Some(v) = raw.f64("piezo_capacitance")? {
        p.piezo_capacitance = v;
    }
    if let Some(v) = raw.f64("ground_capacitance")? {
        p.ground_capacitance = v;
    }
    if let Some(v) = raw.f64("net_inductance")? {
        p.net_inductance = v;
    }
    if let Some(v) = raw.f64("net_resistance")? {
        p.net_resistance = v;
    }
    Ok(())
}

/// Parses a physical-parameter config; keys missing from the text keep their
/// benchmark defaults. The result is validated.
pub fn parse_physical_params(text: &str) -> Result<PhysicalParams> {
    let raw = parse_key_values(text)?;
    raw.reject_unknown(&PHYSICAL_KEYS)?;
    let mut p = PhysicalParams::default();
    apply_physical_overrides(&raw, &mut p)?;
    p.validate().map_err(|e| match e {
        Error::InvalidParameter(msg) => Error::config(0, msg),
        other => other,
    })?;
    Ok(p)
}

/// Mechanical boundary condition of the scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    SimplySupported,
    Clamped,
}

impl Boundary {
    pub fn as_str(&self) -> &'static str {
        match self {
            Boundary::SimplySupported => "simply-supported",
            Boundary::Clamped => "clamped",
        }
    }
}

/// Either a literal impedance value or the optimal one for the tuning mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ImpedanceSpec {
    Optimal,
    Value(f64),
}

/// The study a scenario performs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Experiment {
    /// Undamped (unless overridden) energy exchange over ten beat periods.
    Beat,
    /// Damped decay over five decay constants of the tuned pair.
    DampedDecay,
    /// Frequency-response curves over a pulsation grid.
    Frf,
    /// Point-impulse response with field snapshots.
    Impulse { point: (f64, f64) },
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::Beat => "beat",
            Experiment::DampedDecay => "damped-decay",
            Experiment::Frf => "frf",
            Experiment::Impulse { .. } => "impulse",
        }
    }
}

/// A fully resolved scenario description.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub name: String,
    pub boundary: Boundary,
    pub mode_count: usize,
    /// 1-based tuning target mode.
    pub tuning_mode: usize,
    pub inductance: ImpedanceSpec,
    pub resistance: ImpedanceSpec,
    pub experiment: Experiment,
    /// Parent directory for outputs; artifacts land in `out_parent/name`.
    pub out_parent: PathBuf,
    pub samples: usize,
    pub quad_order: usize,
    pub rel_tol: f64,
    /// Optional horizon override (dimensionless time).
    pub t_end: Option<f64>,
    pub frf_min: Option<f64>,
    pub frf_max: Option<f64>,
    pub frf_points: usize,
    pub field_grid: usize,
    pub snapshots: usize,
    /// Physical parameters with overrides applied; the net impedance fields
    /// are placeholders until the specs above are resolved.
    pub physical: PhysicalParams,
}

const SCENARIO_KEYS: [&str; 17] = [
    "name",
    "boundary",
    "mode_count",
    "tuning_mode",
    "inductance",
    "resistance",
    "experiment",
    "impulse_point",
    "out_dir",
    "samples",
    "quad_order",
    "rel_tol",
    "t_end",
    "frf_min",
    "frf_max",
    "frf_points",
    "field_grid",
];

// snapshots intentionally also accepted
const SCENARIO_EXTRA: [&str; 1] = ["snapshots"];

fn parse_impedance(raw: &RawConfig, key: &str) -> Result<ImpedanceSpec> {
    match raw.get(key) {
        None => Ok(ImpedanceSpec::Optimal),
        Some("optimal") => Ok(ImpedanceSpec::Optimal),
        Some(text) => {
            let v: f64 = text.parse().map_err(|_| {
                Error::config(
                    raw.line_of(key),
                    format!("`{key}` must be `optimal` or a number, got `{text}`"),
                )
            })?;
            if !v.is_finite() || v < 0.0 {
                return Err(Error::config(
                    raw.line_of(key),
                    format!("`{key}` must be finite and non-negative"),
                ));
            }
            Ok(ImpedanceSpec::Value(v))
        }
    }
}

fn parse_point(raw: &RawConfig, key: &str) -> Result<Option<(f64, f64)>> {
    let Some(text) = raw.get(key) else {
        return Ok(None);
    };
    let cleaned = text.replace(',', " ");
    let parts: Vec<&str> = cleaned.split_whitespace().collect();
    if parts.len() != 2 {
        return Err(Error::config(
            raw.line_of(key),
            format!("`{key}` must be two coordinates, got `{text}`"),
        ));
    }
    let mut coords = [0.0; 2];
    for (slot, part) in coords.iter_mut().zip(&parts) {
        let v: f64 = part.parse().map_err(|_| {
            Error::config(
                raw.line_of(key),
                format!("`{key}` coordinate is not a number: `{part}`"),
            )
        })?;
        if !v.is_finite() {
            return Err(Error::config(raw.line_of(key), "coordinates must be finite"));
        }
        *slot = v;
    }
    Ok(Some((coords[0], coords[1])))
}

impl ScenarioConfig {
    /// Directory the scenario writes into (before any environment override).
    pub fn out_dir(&self) -> PathBuf {
        self.out_parent.join(&self.name)
    }
}

/// Parses and validates a scenario config.
pub fn parse_scenario(text: &str) -> Result<ScenarioConfig> {
    let raw = parse_key_values(text)?;
    let known: Vec<&str> = SCENARIO_KEYS
        .iter()
        .chain(SCENARIO_EXTRA.iter())
        .chain(PHYSICAL_KEYS.iter())
        .copied()
        .collect();
    raw.reject_unknown(&known)?;

    let name = raw.get("name").unwrap_or("scenario").to_string();
    if name.contains(['/', '\\']) || name.is_empty() {
        return Err(Error::config(
            raw.line_of("name"),
            "scenario name must be a plain file-system-safe word",
        ));
    }

    let boundary = match raw.get("boundary") {
        None | Some("simply-supported") | Some("ss") => Boundary::SimplySupported,
        Some("clamped") => Boundary::Clamped,
        Some(other) => {
            return Err(Error::config(
                raw.line_of("boundary"),
                format!("`boundary` must be `simply-supported` or `clamped`, got `{other}`"),
            ))
        }
    };

    let experiment_word = raw
        .get("experiment")
        .ok_or_else(|| Error::config(0, "missing required key `experiment`"))?;
    let point = parse_point(&raw, "impulse_point")?;
    let experiment = match experiment_word {
        "beat" => Experiment::Beat,
        "damped-decay" => Experiment::DampedDecay,
        "frf" => Experiment::Frf,
        "impulse" => {
            let point = point.ok_or_else(|| {
                Error::config(
                    raw.line_of("experiment"),
                    "impulse experiments need `impulse_point = x1 x2`",
                )
            })?;
            Experiment::Impulse { point }
        }
        other => {
            return Err(Error::config(
                raw.line_of("experiment"),
                format!(
                    "`experiment` must be beat | damped-decay | frf | impulse, got `{other}`"
                ),
            ))
        }
    };
    if point.is_some() && !matches!(experiment, Experiment::Impulse { .. }) {
        return Err(Error::config(
            raw.line_of("impulse_point"),
            "`impulse_point` only applies to impulse experiments",
        ));
    }

    let default_modes = if matches!(experiment, Experiment::Impulse { .. }) {
        4
    } else {
        1
    };
    let mode_count = raw.usize("mode_count")?.unwrap_or(default_modes);
    if mode_count == 0 || mode_count > 64 {
        return Err(Error::config(
            raw.line_of("mode_count"),
            "`mode_count` must lie in 1..=64",
        ));
    }
    let tuning_mode = raw.usize("tuning_mode")?.unwrap_or(1);
    if tuning_mode == 0 || tuning_mode > mode_count {
        return Err(Error::config(
            raw.line_of("tuning_mode"),
            format!("`tuning_mode` must lie in 1..={mode_count}"),
        ));
    }

    let mut inductance = parse_impedance(&raw, "inductance")?;
    let mut resistance = parse_impedance(&raw, "resistance")?;
    // the raw physical keys double as literal impedance overrides
    if let Some(v) = raw.f64("net_inductance")? {
        if raw.get("inductance").is_some() {
            return Err(Error::config(
                raw.line_of("net_inductance"),
                "give either `inductance` or `net_inductance`, not both",
            ));
        }
        inductance = ImpedanceSpec::Value(v);
    }
    if let Some(v) = raw.f64("net_resistance")? {
        if raw.get("resistance").is_some() {
            return Err(Error::config(
                raw.line_of("net_resistance"),
                "give either `resistance` or `net_resistance`, not both",
            ));
        }
        resistance = ImpedanceSpec::Value(v);
    }

    let samples = raw.usize("samples")?.unwrap_or(2000);
    if !(2..=2_000_000).contains(&samples) {
        return Err(Error::config(
            raw.line_of("samples"),
            "`samples` must lie in 2..=2000000",
        ));
    }
    let quad_order = raw.usize("quad_order")?.unwrap_or(32);
    if !(2..=512).contains(&quad_order) {
        return Err(Error::config(
            raw.line_of("quad_order"),
            "`quad_order` must lie in 2..=512",
        ));
    }
    let rel_tol = raw.f64("rel_tol")?.unwrap_or(1e-9);
    if !(1e-12..=1e-3).contains(&rel_tol) {
        return Err(Error::config(
            raw.line_of("rel_tol"),
            "`rel_tol` must lie in [1e-12, 1e-3]",
        ));
    }
    let t_end = raw.f64("t_end")?;
    if let Some(t) = t_end {
        if t <= 0.0 {
            return Err(Error::config(raw.line_of("t_end"), "`t_end` must be positive"));
        }
    }
    let frf_min = raw.f64("frf_min")?;
    let frf_max = raw.f64("frf_max")?;
    if let (Some(lo), Some(hi)) = (frf_min, frf_max) {
        if !(lo > 0.0 && hi > lo) {
            return Err(Error::config(
                raw.line_of("frf_max"),
                "need 0 < frf_min < frf_max",
            ));
        }
    }
    let frf_points = raw.usize("frf_points")?.unwrap_or(2000);
    if !(2..=1_000_000).contains(&frf_points) {
        return Err(Error::config(
            raw.line_of("frf_points"),
            "`frf_points` must lie in 2..=1000000",
        ));
    }
    let field_grid = raw.usize("field_grid")?.unwrap_or(41);
    if !(2..=4096).contains(&field_grid) {
        return Err(Error::config(
            raw.line_of("field_grid"),
            "`field_grid` must lie in 2..=4096",
        ));
    }
    let snapshots = raw.usize("snapshots")?.unwrap_or(5);
    if !(1..=1000).contains(&snapshots) {
        return Err(Error::config(
            raw.line_of("snapshots"),
            "`snapshots` must lie in 1..=1000",
        ));
    }

    let out_parent = PathBuf::from(raw.get("out_dir").unwrap_or("out").to_string());

    let mut physical = PhysicalParams::default();
    apply_physical_overrides(&raw, &mut physical)?;

    Ok(ScenarioConfig {
        name,
        boundary,
        mode_count,
        tuning_mode,
        inductance,
        resistance,
        experiment,
        out_parent,
        samples,
        quad_order,
        rel_tol,
        t_end,
        frf_min,
        frf_max,
        frf_points,
        field_grid,
        snapshots,
        physical,
    })
}
