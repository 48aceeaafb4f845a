//! Run configuration: a small TOML document naming the trap, the initial
//! eigenstate and the wall parameter.
//!
//! ```toml
//! geometry = "spherical"      # circular | cylindrical | spherical
//! mode = [0, 1, 0]            # [m, n], [m, n, k] or [l, n, m]
//! alpha = "0.5*alpha_ref"     # a number, or a multiple of alpha_ref
//! ```
//!
//! Optional keys and their defaults are listed in [`DEFAULTS`]. The
//! reference mode `alpha_ref = [order, n]` defaults to the initial mode's
//! radial order and index, so `alpha_ref = x/2` for its Bessel zero `x`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use bohmtrap::specfun::bessel_zero;
use bohmtrap::{ModeIndex, TrapGeometry, TrapKind};
use serde::Serialize;
use serde_json::json;

use crate::error::{CliError, Result};

/// Keys that may be omitted, with the value used in their place.
pub const DEFAULTS: &[(&str, &str)] = &[
    ("radius", "1.0"),
    ("height", "1.0 (cylindrical only)"),
    ("alpha_ref", "the initial mode's [order, n]"),
    ("small_radius_ratio", "1.0"),
    ("n_max", "40"),
    ("rtol", "1e-8"),
    ("atol", "1e-10"),
    ("seed", "0"),
    ("output_dir", "\".\""),
];

const REQUIRED: &[&str] = &["geometry", "mode", "alpha"];

/// Whether a setting was written in the file or filled in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Given,
    Default,
}

/// The wall parameter, either absolute or relative to a reference mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaSpec {
    Value(f64),
    /// `factor · alpha_ref`.
    Multiple(f64),
}

impl AlphaSpec {
    pub fn resolve(self, alpha_ref: f64) -> f64 {
        match self {
            AlphaSpec::Value(v) => v,
            AlphaSpec::Multiple(f) => f * alpha_ref,
        }
    }
}

impl FromStr for AlphaSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        let text: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || CliError::Config(format!("cannot read alpha {s:?}: expected a number, \"F*alpha_ref\" or \"alpha_ref\""));
        if let Some(factor) = text.strip_suffix("alpha_ref") {
            let factor = factor.strip_suffix('*').unwrap_or(factor);
            let f = match factor {
                "" | "+" => 1.0,
                "-" => -1.0,
                f => f.parse::<f64>().map_err(|_| bad())?,
            };
            return finite(f).map(AlphaSpec::Multiple).ok_or_else(bad);
        }
        text.parse::<f64>().ok().and_then(finite).map(AlphaSpec::Value).ok_or_else(bad)
    }
}

impl fmt::Display for AlphaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphaSpec::Value(v) => write!(f, "{v:?}"),
            AlphaSpec::Multiple(m) => write!(f, "{m:?}*alpha_ref"),
        }
    }
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

pub fn parse_kind(s: &str) -> Result<TrapKind> {
    match s.to_ascii_lowercase().as_str() {
        "circular" | "disc" | "disk" => Ok(TrapKind::Circular),
        "cylindrical" | "cylinder" => Ok(TrapKind::Cylindrical),
        "spherical" | "sphere" => Ok(TrapKind::Spherical),
        other => Err(CliError::Config(format!("unknown geometry {other:?} (expected circular, cylindrical or spherical)"))),
    }
}

/// Builds a mode from its integer labels in the order `[m, n]`,
/// `[m, n, k]` or `[l, n, m]`.
pub fn mode_from_labels(kind: TrapKind, labels: &[i64]) -> Result<ModeIndex> {
    let unsigned = |v: i64, what: &str| u32::try_from(v).map_err(|_| CliError::Config(format!("{what} must be a non-negative integer, got {v}")));
    let signed = |v: i64| i32::try_from(v).map_err(|_| CliError::Config(format!("m = {v} is out of range")));
    let mode = match (kind, labels) {
        (TrapKind::Circular, [m, n]) => ModeIndex::Circular { m: signed(*m)?, n: unsigned(*n, "n")? },
        (TrapKind::Cylindrical, [m, n, k]) => ModeIndex::Cylindrical { m: signed(*m)?, n: unsigned(*n, "n")?, k: unsigned(*k, "k")? },
        (TrapKind::Spherical, [l, n, m]) => ModeIndex::Spherical { l: unsigned(*l, "l")?, n: unsigned(*n, "n")?, m: signed(*m)? },
        _ => {
            let shape = match kind {
                TrapKind::Circular => "[m, n]",
                TrapKind::Cylindrical => "[m, n, k]",
                TrapKind::Spherical => "[l, n, m]",
            };
            return Err(CliError::Config(format!("a {} mode is written {shape}, got {labels:?}", kind.name())));
        }
    };
    mode.validate()?;
    Ok(mode)
}

/// Parses `"a,b,c"` into integers.
pub fn parse_labels(s: &str) -> Result<Vec<i64>> {
    s.split(',')
        .map(|p| p.trim().parse::<i64>().map_err(|_| CliError::Config(format!("cannot read mode labels {s:?}"))))
        .collect()
}

/// Labels of a mode in the order used by [`mode_from_labels`].
pub fn mode_labels(mode: ModeIndex) -> Vec<i64> {
    match mode {
        ModeIndex::Circular { m, n } => vec![m as i64, n as i64],
        ModeIndex::Cylindrical { m, n, k } => vec![m as i64, n as i64, k as i64],
        ModeIndex::Spherical { l, n, m } => vec![l as i64, n as i64, m as i64],
    }
}

/// A validated configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub geometry: TrapKind,
    pub radius: f64,
    /// Box height; `Some` exactly for the cylinder.
    pub height: Option<f64>,
    pub mode: ModeIndex,
    pub alpha: AlphaSpec,
    /// `(order, n)` of the reference mode whose `x/2` scales `alpha`.
    pub alpha_ref: (u32, u32),
    pub small_radius_ratio: f64,
    pub n_max: usize,
    pub rtol: f64,
    pub atol: f64,
    pub seed: u64,
    pub output_dir: String,
    pub provenance: BTreeMap<String, Provenance>,
}

/// Provenance is bookkeeping and does not take part in equality.
impl PartialEq for RunConfig {
    fn eq(&self, other: &Self) -> bool {
        self.geometry == other.geometry
            && self.radius == other.radius
            && self.height == other.height
            && self.mode == other.mode
            && self.alpha == other.alpha
            && self.alpha_ref == other.alpha_ref
            && self.small_radius_ratio == other.small_radius_ratio
            && self.n_max == other.n_max
            && self.rtol == other.rtol
            && self.atol == other.atol
            && self.seed == other.seed
            && self.output_dir == other.output_dir
    }
}

const KNOWN: &[&str] = &[
    "geometry",
    "radius",
    "height",
    "mode",
    "alpha",
    "alpha_ref",
    "small_radius_ratio",
    "n_max",
    "rtol",
    "atol",
    "seed",
    "output_dir",
];

fn get_f64(table: &toml::Table, key: &str) -> Result<Option<f64>> {
    match table.get(key) {
        None => Ok(None),
        Some(toml::Value::Float(v)) => Ok(Some(*v)),
        Some(toml::Value::Integer(v)) => Ok(Some(*v as f64)),
        Some(v) => Err(CliError::Config(format!("{key} must be a number, got {v}"))),
    }
}

fn get_int(table: &toml::Table, key: &str) -> Result<Option<i64>> {
    match table.get(key) {
        None => Ok(None),
        Some(toml::Value::Integer(v)) => Ok(Some(*v)),
        Some(v) => Err(CliError::Config(format!("{key} must be an integer, got {v}"))),
    }
}

fn get_labels(table: &toml::Table, key: &str) -> Result<Option<Vec<i64>>> {
    match table.get(key) {
        None => Ok(None),
        Some(toml::Value::Array(items)) => items
            .iter()
            .map(|v| v.as_integer().ok_or_else(|| CliError::Config(format!("{key} must be an array of integers"))))
            .collect::<Result<Vec<_>>>()
            .map(Some),
        Some(v) => Err(CliError::Config(format!("{key} must be an array of integers, got {v}"))),
    }
}

fn positive(key: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{key} must be positive, got {v}")))
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    if text.trim().is_empty() {
        return Err(CliError::Config("configuration is empty; geometry, mode and alpha are required".into()));
    }
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| CliError::Config(format!("malformed configuration: {}", e.message())))?;
    let unknown: Vec<&str> = table.keys().map(String::as_str).filter(|k| !KNOWN.contains(k)).collect();
    if !unknown.is_empty() {
        return Err(CliError::Config(format!("unknown keys: {}", unknown.join(", "))));
    }
    let missing: Vec<&str> = REQUIRED.iter().copied().filter(|k| !table.contains_key(*k)).collect();
    if !missing.is_empty() {
        return Err(CliError::Config(format!("missing required keys: {}", missing.join(", "))));
    }
    let mut provenance = BTreeMap::new();
    for key in KNOWN {
        let p = if table.contains_key(*key) { Provenance::Given } else { Provenance::Default };
        provenance.insert(key.to_string(), p);
    }

    let geometry = match &table["geometry"] {
        toml::Value::String(s) => parse_kind(s)?,
        v => return Err(CliError::Config(format!("geometry must be a string, got {v}"))),
    };
    let labels = get_labels(&table, "mode")?.unwrap_or_default();
    let mode = mode_from_labels(geometry, &labels)?;
    let alpha = match &table["alpha"] {
        toml::Value::String(s) => s.parse()?,
        toml::Value::Float(v) => AlphaSpec::Value(*v),
        toml::Value::Integer(v) => AlphaSpec::Value(*v as f64),
        v => return Err(CliError::Config(format!("alpha must be a number or a string, got {v}"))),
    };
    let alpha_ref = match get_labels(&table, "alpha_ref")? {
        None => (mode.radial_order(), mode.n()),
        Some(l) => match l.as_slice() {
            [order, n] if *order >= 0 && *n >= 1 => (*order as u32, *n as u32),
            _ => return Err(CliError::Config(format!("alpha_ref is written [order, n] with n ≥ 1, got {l:?}"))),
        },
    };
    let height = match (geometry, get_f64(&table, "height")?) {
        (TrapKind::Cylindrical, h) => Some(positive("height", h.unwrap_or(1.0))?),
        (_, Some(_)) => return Err(CliError::Config(format!("height only applies to the cylinder, not a {} trap", geometry.name()))),
        (_, None) => None,
    };
    let n_max = get_int(&table, "n_max")?.unwrap_or(40);
    if n_max < 1 {
        return Err(CliError::Config(format!("n_max must be at least 1, got {n_max}")));
    }
    let seed = get_int(&table, "seed")?.unwrap_or(0);
    let small_radius_ratio = get_f64(&table, "small_radius_ratio")?.unwrap_or(1.0);
    if !(small_radius_ratio > 0.0 && small_radius_ratio <= 1.0) {
        return Err(CliError::Config(format!("small_radius_ratio must lie in (0, 1], got {small_radius_ratio}")));
    }
    let output_dir = match table.get("output_dir") {
        None => ".".to_string(),
        Some(toml::Value::String(s)) => s.clone(),
        Some(v) => return Err(CliError::Config(format!("output_dir must be a string, got {v}"))),
    };
    let config = RunConfig {
        geometry,
        radius: positive("radius", get_f64(&table, "radius")?.unwrap_or(1.0))?,
        height,
        mode,
        alpha,
        alpha_ref,
        small_radius_ratio,
        n_max: n_max as usize,
        rtol: positive("rtol", get_f64(&table, "rtol")?.unwrap_or(1e-8))?,
        atol: positive("atol", get_f64(&table, "atol")?.unwrap_or(1e-10))?,
        seed: u64::try_from(seed).map_err(|_| CliError::Config(format!("seed must be non-negative, got {seed}")))?,
        output_dir,
        provenance,
    };
    config.trap()?;
    Ok(config)
}

impl RunConfig {
    /// `x/2` of the reference mode.
    pub fn alpha_reference(&self) -> Result<f64> {
        let (order, n) = self.alpha_ref;
        Ok(bessel_zero(self.geometry.zero_kind(), order, n)? / 2.0)
    }

    pub fn alpha_value(&self) -> Result<f64> {
        Ok(self.alpha.resolve(self.alpha_reference()?))
    }

    pub fn trap(&self) -> Result<TrapGeometry> {
        Ok(TrapGeometry::from_alpha(self.geometry, self.radius, self.alpha_value()?, self.height)?)
    }

    pub fn expansion_options(&self) -> bohmtrap::expansion::ExpansionOptions {
        let small = (self.small_radius_ratio < 1.0).then_some(self.small_radius_ratio * self.radius);
        bohmtrap::expansion::ExpansionOptions { small_radius: small, n_max: self.n_max, ..Default::default() }
    }

    pub fn trajectory_options(&self) -> bohmtrap::TrajectoryOptions {
        bohmtrap::TrajectoryOptions { rtol: self.rtol, atol: self.atol, ..Default::default() }
    }

    /// Canonical TOML with every setting written out.
    pub fn to_toml(&self) -> String {
        let mut t = toml::Table::new();
        t.insert("geometry".into(), self.geometry.name().into());
        t.insert("radius".into(), self.radius.into());
        if let Some(h) = self.height {
            t.insert("height".into(), h.into());
        }
        t.insert("mode".into(), toml::Value::Array(mode_labels(self.mode).into_iter().map(Into::into).collect()));
        let alpha: toml::Value = match self.alpha {
            AlphaSpec::Value(v) => v.into(),
            spec => spec.to_string().into(),
        };
        t.insert("alpha".into(), alpha);
        t.insert("alpha_ref".into(), toml::Value::Array(vec![(self.alpha_ref.0 as i64).into(), (self.alpha_ref.1 as i64).into()]));
        t.insert("small_radius_ratio".into(), self.small_radius_ratio.into());
        t.insert("n_max".into(), (self.n_max as i64).into());
        t.insert("rtol".into(), self.rtol.into());
        t.insert("atol".into(), self.atol.into());
        t.insert("seed".into(), (self.seed as i64).into());
        t.insert("output_dir".into(), self.output_dir.clone().into());
        toml::to_string(&t).expect("a table of plain values always serialises")
    }

    /// The resolved configuration for output headers.
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "geometry": self.geometry.name(),
            "radius": self.radius,
            "height": self.height,
            "mode": mode_labels(self.mode),
            "alpha": self.alpha.to_string(),
            "alpha_value": self.alpha_value().ok(),
            "alpha_ref": [self.alpha_ref.0, self.alpha_ref.1],
            "small_radius_ratio": self.small_radius_ratio,
            "n_max": self.n_max,
            "rtol": self.rtol,
            "atol": self.atol,
            "seed": self.seed,
            "output_dir": self.output_dir,
            "provenance": self.provenance,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const MINIMAL: &str = "geometry = \"spherical\"\nmode = [0, 1, 0]\nalpha = \"0.5*alpha_ref\"\n";

    #[test]
    fn minimal_sphere_resolves_alpha() {
        let c = parse_config(MINIMAL).unwrap();
        assert!((c.alpha_value().unwrap() - PI / 4.0).abs() < 1e-12);
        assert_eq!(c.n_max, 40);
        assert_eq!(c.provenance["n_max"], Provenance::Default);
        assert_eq!(c.provenance["alpha"], Provenance::Given);
        assert!(c.height.is_none());
    }

    #[test]
    fn negative_multiple_on_a_disc_mode() {
        let c = parse_config("geometry = \"circular\"\nmode = [1, 1]\nalpha = \"-2*alpha_ref\"").unwrap();
        assert!((c.alpha_value().unwrap() + 3.831_705_970_207_512).abs() < 1e-10);
    }

    #[test]
    fn explicit_reference_mode() {
        let c = parse_config("geometry = \"circular\"\nmode = [1, 1]\nalpha = \"alpha_ref\"\nalpha_ref = [0, 1]").unwrap();
        assert!((c.alpha_value().unwrap() - 2.404_825_557_695_773 / 2.0).abs() < 1e-10);
    }

    #[test]
    fn empty_text_is_an_error() {
        assert!(matches!(parse_config(""), Err(CliError::Config(_))));
        assert!(matches!(parse_config("  \n"), Err(CliError::Config(_))));
    }

    #[test]
    fn unknown_keys_are_listed() {
        let err = parse_config(&format!("{MINIMAL}speed = 2\nfoo = 1\n")).unwrap_err().to_string();
        assert!(err.contains("foo") && err.contains("speed"), "{err}");
    }

    #[test]
    fn contradictions_are_rejected() {
        for text in [
            "geometry = \"spherical\"\nmode = [1, 1]\nalpha = 0.1",
            "geometry = \"circular\"\nmode = [1, 1]\nalpha = 0.1\nheight = 2.0",
            "geometry = \"spherical\"\nmode = [1, 1, 2]\nalpha = 0.1",
            "geometry = \"torus\"\nmode = [1, 1]\nalpha = 0.1",
            "geometry = \"circular\"\nmode = [1, 1]\nalpha = \"fast\"",
            "geometry = \"circular\"\nmode = [1, 1]\nalpha = 0.1\nradius = -1",
            "geometry = \"circular\"\nmode = [1, 1]",
        ] {
            assert!(matches!(parse_config(text), Err(CliError::Config(_)) | Err(CliError::Core(_))), "{text}");
        }
    }

    #[test]
    fn round_trip() {
        for text in [
            MINIMAL.to_string(),
            "geometry = \"cylindrical\"\nmode = [-1, 2, 1]\nalpha = -0.3\nheight = 2.5\nseed = 9\nn_max = 12".to_string(),
            "geometry = \"circular\"\nmode = [0, 1]\nalpha = \"-alpha_ref\"\nsmall_radius_ratio = 0.5\noutput_dir = \"runs\"".to_string(),
        ] {
            let a = parse_config(&text).unwrap();
            let b = parse_config(&a.to_toml()).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.to_toml(), b.to_toml());
        }
    }

    #[test]
    fn alpha_spellings() {
        assert_eq!("0.5*alpha_ref".parse::<AlphaSpec>().unwrap(), AlphaSpec::Multiple(0.5));
        assert_eq!("- alpha_ref".parse::<AlphaSpec>().unwrap(), AlphaSpec::Multiple(-1.0));
        assert_eq!("2alpha_ref".parse::<AlphaSpec>().unwrap(), AlphaSpec::Multiple(2.0));
        assert_eq!("0.25".parse::<AlphaSpec>().unwrap(), AlphaSpec::Value(0.25));
        assert!("nan".parse::<AlphaSpec>().is_err());
        assert!("x*alpha_ref".parse::<AlphaSpec>().is_err());
    }
}
