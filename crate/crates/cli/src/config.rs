//! Strict TOML run configuration.
//!
//! Every dimensional key carries its unit as a suffix: rates take `_hz`
//! (multiplied by 2π on input) or `_rad_s`, g²N takes `_hz2` or `_rad2_s2`,
//! times `_s`, lengths `_m`. Unknown keys are rejected with their full path.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;
use std::path::{Path, PathBuf};

use lightstore::drive::{DriveSchedule, Envelope, ProbeSpec, RampShape, WEAK_PROBE_LIMIT};
use lightstore::ensemble::QuadratureScheme;
use lightstore::feasibility::{preset, Thresholds};
use lightstore::grid::SimGrid;
use lightstore::material::{collective_cooperativity, MaterialSpec, Medium};
use lightstore::polariton::ReducedMethod;
use toml::Value;

use crate::error::{CliError, Result};

pub const DEFAULT_PRESET: &str = "rare-earth-crystal-typical";
/// Ω0² = 1e17 (rad/s)².
pub const DEFAULT_OMEGA0: f64 = 316_227_766.016_837_9;
pub const DEFAULT_FIELD_RATIO_K: f64 = 3.0;
pub const DEFAULT_RAMP_TIME: f64 = 1e-5;
pub const DEFAULT_PROBE_DURATION: f64 = 1e-6;
pub const DEFAULT_VOLUME: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    SimulateFull,
    SimulateReduced,
    Feasibility,
    Validate,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::SimulateFull => "simulate-full",
            Mode::SimulateReduced => "simulate-reduced",
            Mode::Feasibility => "feasibility",
            Mode::Validate => "validate",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Formats {
    pub csv: bool,
    pub json: bool,
}

impl Default for Formats {
    fn default() -> Self {
        Self { csv: true, json: true }
    }
}

impl Formats {
    pub fn parse<S: AsRef<str>>(items: &[S], key: &str) -> Result<Self> {
        let mut f = Formats { csv: false, json: false };
        for item in items {
            match item.as_ref().trim() {
                "csv" => f.csv = true,
                "json" => f.json = true,
                other => return Err(CliError::invalid(key, format!("unknown format `{other}` (expected csv, json)"))),
            }
        }
        if !f.csv && !f.json {
            return Err(CliError::invalid(key, "at least one format is required"));
        }
        Ok(f)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedConfig {
    pub method: ReducedMethod,
    /// Centre and 1/e half-width of the initial Gaussian Ψ(z); `None` picks
    /// a quarter of the window and a twentieth of its length.
    pub center: Option<f64>,
    pub width: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityConfig {
    pub medium_length: Option<f64>,
    pub thresholds: Thresholds,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub mode: Mode,
    pub source: Option<PathBuf>,
    pub preset: Option<String>,
    pub material: MaterialSpec,
    pub medium: Medium,
    pub drive: DriveSchedule,
    pub probe: ProbeSpec,
    pub grid: Option<SimGrid>,
    pub reduced: ReducedConfig,
    pub feasibility: FeasibilityConfig,
    pub output: PathBuf,
    pub formats: Formats,
}

/// A TOML table whose keys are removed as they are read, so whatever is
/// left at the end is unknown.
struct Section {
    path: String,
    table: BTreeMap<String, Value>,
}

impl Section {
    fn new(path: &str, table: toml::Table) -> Self {
        Self { path: path.to_string(), table: table.into_iter().collect() }
    }

    fn key(&self, k: &str) -> String {
        if self.path.is_empty() {
            k.to_string()
        } else {
            format!("{}.{k}", self.path)
        }
    }

    fn section(&mut self, name: &str) -> Result<Option<Section>> {
        match self.table.remove(name) {
            None => Ok(None),
            Some(Value::Table(t)) => Ok(Some(Section::new(&self.key(name), t))),
            Some(_) => Err(CliError::invalid(self.key(name), "expected a table")),
        }
    }

    fn f64(&mut self, k: &str) -> Result<Option<f64>> {
        let v = match self.table.remove(k) {
            None => return Ok(None),
            Some(Value::Float(x)) => x,
            Some(Value::Integer(i)) => i as f64,
            Some(other) => return Err(CliError::invalid(self.key(k), format!("expected a number, got {}", other.type_str()))),
        };
        if !v.is_finite() {
            return Err(CliError::invalid(self.key(k), "must be finite"));
        }
        Ok(Some(v))
    }

    fn usize(&mut self, k: &str) -> Result<Option<usize>> {
        match self.table.remove(k) {
            None => Ok(None),
            Some(Value::Integer(i)) if i >= 0 => Ok(Some(i as usize)),
            Some(_) => Err(CliError::invalid(self.key(k), "expected a non-negative integer")),
        }
    }

    fn string(&mut self, k: &str) -> Result<Option<String>> {
        match self.table.remove(k) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(_) => Err(CliError::invalid(self.key(k), "expected a string")),
        }
    }

    fn strings(&mut self, k: &str) -> Result<Option<Vec<String>>> {
        match self.table.remove(k) {
            None => Ok(None),
            Some(Value::Array(items)) => items
                .into_iter()
                .map(|v| match v {
                    Value::String(s) => Ok(s),
                    _ => Err(CliError::invalid(self.key(k), "expected an array of strings")),
                })
                .collect::<Result<Vec<_>>>()
                .map(Some),
            Some(_) => Err(CliError::invalid(self.key(k), "expected an array of strings")),
        }
    }

    /// A quantity given under exactly one of several unit suffixes; returns
    /// the value in internal units and the key that supplied it.
    fn with_units(&mut self, base: &str, units: &[(&str, f64)]) -> Result<Option<(f64, String)>> {
        let mut found: Option<(f64, String)> = None;
        for (suffix, scale) in units {
            let k = format!("{base}_{suffix}");
            if let Some(v) = self.f64(&k)? {
                if let Some((_, prev)) = &found {
                    return Err(CliError::invalid(self.key(&k), format!("conflicts with `{prev}`")));
                }
                found = Some((v * scale, self.key(&k)));
            }
        }
        Ok(found)
    }

    fn rate(&mut self, base: &str) -> Result<Option<(f64, String)>> {
        self.with_units(base, &[("rad_s", 1.0), ("hz", TAU)])
    }

    fn rate_squared(&mut self, base: &str) -> Result<Option<(f64, String)>> {
        self.with_units(base, &[("rad2_s2", 1.0), ("hz2", TAU * TAU)])
    }

    /// Piecewise knots as `[[t_s, omega], ...]`.
    fn knots(&mut self) -> Result<Option<Vec<(f64, f64)>>> {
        for (suffix, scale) in [("rad_s", 1.0), ("hz", TAU)] {
            let k = format!("knots_{suffix}");
            let Some(v) = self.table.remove(&k) else { continue };
            let bad = || CliError::invalid(self.key(&k), "expected an array of [time_s, omega] pairs");
            let Value::Array(rows) = v else { return Err(bad()) };
            let mut out = Vec::with_capacity(rows.len());
            for row in rows {
                let Value::Array(pair) = row else { return Err(bad()) };
                let nums: Vec<f64> = pair
                    .iter()
                    .map(|x| match x {
                        Value::Float(f) => Some(*f),
                        Value::Integer(i) => Some(*i as f64),
                        _ => None,
                    })
                    .collect::<Option<_>>()
                    .ok_or_else(bad)?;
                if nums.len() != 2 {
                    return Err(bad());
                }
                out.push((nums[0], nums[1] * scale));
            }
            return Ok(Some(out));
        }
        Ok(None)
    }

    fn finish(self) -> Result<()> {
        match self.table.keys().next() {
            Some(k) => Err(CliError::UnknownKey(self.key(k))),
            None => Ok(()),
        }
    }
}

/// Reads and validates a configuration file. With no path every section
/// takes its defaults.
pub fn parse_config(path: Option<&Path>, mode: Mode) -> Result<RunConfig> {
    let Some(path) = path else {
        return parse_config_str("", mode, None);
    };
    let text = std::fs::read_to_string(path)
        .map_err(|source| CliError::MissingFile { path: path.to_path_buf(), source })?;
    parse_config_str(&text, mode, Some(path))
}

pub fn parse_config_str(text: &str, mode: Mode, source: Option<&Path>) -> Result<RunConfig> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| CliError::Syntax {
        path: source.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("<inline>")),
        message: e.to_string(),
    })?;
    let mut root = Section::new("", table);

    let (preset_name, material, w_keys) = parse_material(root.section("material")?)?;
    let medium = parse_medium(root.section("medium")?, &material)?;
    let drive = parse_drive(root.section("drive")?, &material)?;
    let probe = parse_probe(root.section("probe")?)?;
    let grid = match root.section("grid")? {
        Some(s) => Some(parse_grid(s)?),
        None => None,
    };
    let reduced = parse_reduced(root.section("reduced")?)?;
    let feasibility = parse_feasibility(root.section("feasibility")?)?;
    let (output, formats) = parse_output(root.section("output")?)?;
    root.finish()?;

    if matches!(mode, Mode::SimulateFull | Mode::SimulateReduced) && grid.is_none() {
        return Err(CliError::invalid("grid", format!("section is required for {mode}")));
    }
    if material.w13 < material.w12 {
        return Err(CliError::invalid(
            format!("{} / {}", w_keys.0, w_keys.1),
            format!("W13 = {:e} rad/s must not be smaller than W12 = {:e} rad/s", material.w13, material.w12),
        ));
    }
    if mode == Mode::SimulateReduced {
        material.validate_for_reduced_model().map_err(prefixed("material"))?;
    }
    let epsilon = probe.weak_probe_parameter(medium.coupling, drive.omega0);
    if epsilon > WEAK_PROBE_LIMIT {
        log::warn!("g·E/Omega0 = {epsilon:.3e} exceeds {WEAK_PROBE_LIMIT}; the probe is not weak");
    }

    Ok(RunConfig {
        mode,
        source: source.map(Path::to_path_buf),
        preset: preset_name,
        material,
        medium,
        drive,
        probe,
        grid,
        reduced,
        feasibility,
        output,
        formats,
    })
}

fn prefixed(section: &'static str) -> impl Fn(lightstore::Error) -> CliError {
    move |e| match e {
        lightstore::Error::Invalid { field, reason } if !field.contains('.') => {
            CliError::Invalid { key: format!("{section}.{field}"), reason }
        }
        other => other.into(),
    }
}

fn parse_material(section: Option<Section>) -> Result<(Option<String>, MaterialSpec, (String, String))> {
    let mut s = section.unwrap_or_else(|| Section::new("material", toml::Table::new()));
    let preset_name = s.string("preset")?;
    let mut m = preset(preset_name.as_deref().unwrap_or(DEFAULT_PRESET))
        .map_err(|_| {
            CliError::invalid(
                "material.preset",
                format!("unknown preset `{}`", preset_name.clone().unwrap_or_default()),
            )
        })?
        .material;
    if let Some(name) = s.string("name")? {
        m.name = name;
    }
    let mut w_keys = ("material.w12_rad_s".to_string(), "material.w13_rad_s".to_string());
    for (base, slot) in [
        ("w12", &mut m.w12),
        ("w13", &mut m.w13),
        ("gamma1", &mut m.gamma1),
        ("gamma2", &mut m.gamma2),
        ("gamma3", &mut m.gamma3),
        ("gamma12", &mut m.gamma12),
        ("gamma13", &mut m.gamma13),
        ("gamma23", &mut m.gamma23),
    ] {
        if let Some((v, key)) = s.rate(base)? {
            *slot = v;
            match base {
                "w12" => w_keys.0 = key,
                "w13" => w_keys.1 = key,
                _ => {}
            }
        }
    }
    if let Some(v) = s.f64("d13_c_m")? {
        m.d13 = v;
    }
    if let Some(v) = s.f64("density_m3")? {
        m.density = v;
    }
    if let Some(v) = s.f64("wavelength_m")? {
        m.wavelength = v;
    }
    s.finish()?;
    for w in m.validate().map_err(prefixed("material"))? {
        log::warn!("{w}");
    }
    Ok((preset_name, m, w_keys))
}

fn parse_medium(section: Option<Section>, material: &MaterialSpec) -> Result<Medium> {
    let mut s = section.unwrap_or_else(|| Section::new("medium", toml::Table::new()));
    let g2n = s.rate_squared("g2n")?;
    let light_speed = s.f64("light_speed_m_s")?;
    let coupling = s.rate("coupling")?;
    let volume = s.f64("volume_m3")?;
    s.finish()?;
    if g2n.is_none() && light_speed.is_none() && coupling.is_none() {
        let v = volume.unwrap_or(DEFAULT_VOLUME);
        return Medium::physical(material.clone(), v).map_err(|e| match e {
            lightstore::Error::Invalid { reason, .. } | lightstore::Error::Domain(reason) => {
                CliError::invalid("medium.volume_m3", reason)
            }
            other => other.into(),
        });
    }
    if volume.is_some() {
        return Err(CliError::invalid(
            "medium.volume_m3",
            "cannot be combined with g2n, light_speed or coupling; give the coupling directly",
        ));
    }
    let g2n = g2n.map(|x| x.0).unwrap_or_else(|| collective_cooperativity(material));
    let c = light_speed.unwrap_or(lightstore::constants::SPEED_OF_LIGHT);
    let mut medium = Medium::scaled(material.clone(), g2n, c).map_err(prefixed("medium"))?;
    medium.coupling = match coupling {
        Some((g, _)) if g > 0.0 => g,
        Some((_, key)) => return Err(CliError::invalid(key, "must be positive")),
        None => 1.0,
    };
    Ok(medium)
}

fn parse_drive(section: Option<Section>, material: &MaterialSpec) -> Result<DriveSchedule> {
    let mut s = section.unwrap_or_else(|| Section::new("drive", toml::Table::new()));
    let shape = s.string("shape")?.unwrap_or_else(|| "linear-ramp".into());
    let omega0 = s.rate("omega0")?.map(|x| x.0).unwrap_or(DEFAULT_OMEGA0);
    let omega_tau = s.rate("omega_tau")?;
    let k = s.f64("field_ratio_k")?;
    let t_start = s.f64("t_start_s")?.unwrap_or(0.0);
    let t_end = s.f64("t_end_s")?.unwrap_or(t_start + DEFAULT_RAMP_TIME);
    let hold = s.f64("hold_s")?.unwrap_or(0.0);
    let retrieval = s.f64("retrieval_s")?;
    let retrieval_omega = s.rate("retrieval_omega")?;
    let knots = s.knots()?;
    s.finish()?;

    let omega_tau = match (omega_tau, k) {
        (Some((_, key)), Some(_)) => {
            return Err(CliError::invalid(key, "give either omega_tau or field_ratio_k, not both"))
        }
        (Some((v, _)), None) => v,
        (None, k) => {
            let p = material.width_product();
            if p == 0.0 {
                return Err(CliError::invalid(
                    "drive.field_ratio_k",
                    "W12·W13 = 0, so the final field must be given as drive.omega_tau_*",
                ));
            }
            k.unwrap_or(DEFAULT_FIELD_RATIO_K) * p.sqrt()
        }
    };
    let shape = match shape.as_str() {
        "constant" => RampShape::Constant,
        "linear-ramp" => RampShape::LinearRamp,
        "tanh-ramp" => RampShape::TanhRamp,
        "piecewise" => RampShape::Piecewise {
            knots: knots
                .clone()
                .ok_or_else(|| CliError::invalid("drive.knots_rad_s", "required for the piecewise shape"))?,
        },
        other => {
            return Err(CliError::invalid(
                "drive.shape",
                format!("unknown shape `{other}` (constant, linear-ramp, tanh-ramp, piecewise)"),
            ))
        }
    };
    if knots.is_some() && !matches!(shape, RampShape::Piecewise { .. }) {
        return Err(CliError::invalid("drive.knots_rad_s", "only allowed with shape = \"piecewise\""));
    }
    let mut drive = if shape == RampShape::Constant {
        DriveSchedule::constant(omega0)
    } else {
        DriveSchedule::linear(omega0, omega_tau, t_start, t_end).with_shape(shape).with_hold(hold)
    };
    if let Some(d) = retrieval {
        drive = drive.with_retrieval(d, retrieval_omega.map(|x| x.0).unwrap_or(omega0));
    } else if let Some((_, key)) = retrieval_omega {
        return Err(CliError::invalid(key, "needs drive.retrieval_s"));
    }
    drive.validate().map_err(prefixed("drive"))?;
    Ok(drive)
}

fn parse_probe(section: Option<Section>) -> Result<ProbeSpec> {
    let mut s = section.unwrap_or_else(|| Section::new("probe", toml::Table::new()));
    let envelope = match s.string("envelope")?.as_deref() {
        None | Some("gaussian") => Envelope::Gaussian,
        Some("sech") => Envelope::Sech,
        Some(other) => return Err(CliError::invalid("probe.envelope", format!("unknown envelope `{other}` (gaussian, sech)"))),
    };
    let duration = s.f64("duration_s")?.unwrap_or(DEFAULT_PROBE_DURATION);
    let probe = ProbeSpec {
        envelope,
        peak_amplitude: s.f64("peak_amplitude")?.unwrap_or(1.0),
        duration,
        arrival_time: s.f64("arrival_s")?.unwrap_or(3.0 * duration),
    };
    s.finish()?;
    probe.validate().map_err(prefixed("probe"))?;
    Ok(probe)
}

fn parse_grid(mut s: Section) -> Result<SimGrid> {
    let d = SimGrid::default();
    let scheme = match s.string("scheme")? {
        Some(name) => name.parse::<QuadratureScheme>().map_err(|e| CliError::invalid("grid.scheme", e.to_string()))?,
        None => d.scheme,
    };
    let grid = SimGrid {
        z_min: s.f64("z_min_m")?.unwrap_or(d.z_min),
        z_max: s.f64("z_max_m")?.unwrap_or(d.z_max),
        n_z: s.usize("n_z")?.unwrap_or(d.n_z),
        dt: s.f64("dt_s")?.unwrap_or(d.dt),
        t_max: s.f64("t_max_s")?.unwrap_or(d.t_max),
        n_detuning12: s.usize("n_detuning12")?.unwrap_or(d.n_detuning12),
        n_detuning13: s.usize("n_detuning13")?.unwrap_or(d.n_detuning13),
        lorentz_cutoff: s.f64("lorentz_cutoff")?.unwrap_or(d.lorentz_cutoff),
        scheme,
        n_snapshots: s.usize("n_snapshots")?.unwrap_or(d.n_snapshots),
    };
    s.finish()?;
    grid.validate().map_err(prefixed("grid"))?;
    Ok(grid)
}

fn parse_reduced(section: Option<Section>) -> Result<ReducedConfig> {
    let mut s = section.unwrap_or_else(|| Section::new("reduced", toml::Table::new()));
    let method = match s.string("method")? {
        Some(m) => m.parse().map_err(|e: lightstore::Error| CliError::invalid("reduced.method", e.to_string()))?,
        None => ReducedMethod::Fourier,
    };
    let center = s.f64("center_m")?;
    let width = s.f64("width_m")?;
    s.finish()?;
    if let Some(w) = width {
        if w <= 0.0 {
            return Err(CliError::invalid("reduced.width_m", "must be positive"));
        }
    }
    Ok(ReducedConfig { method, center, width })
}

fn parse_feasibility(section: Option<Section>) -> Result<FeasibilityConfig> {
    let mut s = section.unwrap_or_else(|| Section::new("feasibility", toml::Table::new()));
    let d = Thresholds::default();
    let cfg = FeasibilityConfig {
        medium_length: s.f64("medium_length_m")?,
        thresholds: Thresholds {
            much_greater: s.f64("much_greater")?.unwrap_or(d.much_greater),
            at_least: s.f64("at_least")?.unwrap_or(d.at_least),
        },
    };
    s.finish()?;
    for (k, v) in [("feasibility.much_greater", cfg.thresholds.much_greater), ("feasibility.at_least", cfg.thresholds.at_least)] {
        if v <= 0.0 {
            return Err(CliError::invalid(k, "must be positive"));
        }
    }
    if let Some(l) = cfg.medium_length {
        if l <= 0.0 {
            return Err(CliError::invalid("feasibility.medium_length_m", "must be positive"));
        }
    }
    Ok(cfg)
}

fn parse_output(section: Option<Section>) -> Result<(PathBuf, Formats)> {
    let mut s = section.unwrap_or_else(|| Section::new("output", toml::Table::new()));
    let dir = s.string("dir")?.map(PathBuf::from).unwrap_or_else(|| PathBuf::from("lightstore-out"));
    let formats = match s.strings("formats")? {
        Some(list) => Formats::parse(&list, "output.formats")?,
        None => Formats::default(),
    };
    s.finish()?;
    Ok((dir, formats))
}
