//! Run configuration: a sectioned TOML file.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tpeqw::cavity::{self, CavitySpec, DeviceGeometry};
use tpeqw::{units, MaterialParams, PolarizationGeometry, RateInputs};

/// The shipped configuration, reproducing the reference operating point.
pub const DEFAULT_CONFIG: &str = include_str!("../config/default.toml");

pub const CONFIG_ENV: &str = "TPEQW_CONFIG";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSection {
    pub label: String,
    pub e_gap_ev: f64,
    pub e_c_ev: f64,
    pub delta_c_ev: f64,
    pub p1_ev_nm: f64,
    pub q_ev_nm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    /// Defaults to a half wave at the degenerate wavelength.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cavity_height_nm: Option<f64>,
    pub grating_period_nm: f64,
    pub fill_factor: f64,
    pub device_area_mm2: f64,
    pub refractive_index: f64,
    pub extraction_efficiency: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavitySection {
    pub signal_nm: f64,
    /// Defaults to the energy-conserving partner of the signal.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub idler_nm: Option<f64>,
    pub q_s: f64,
    pub q_i: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub carrier_density_cm3: f64,
    #[serde(default = "default_polarization")]
    pub polarization: PolarizationGeometry,
    pub pdc_baseline_per_s: f64,
    pub seed: u64,
    pub sweep_min_nm: f64,
    pub sweep_max_nm: f64,
    pub sweep_steps: usize,
    #[serde(default = "default_grid")]
    pub quadrature_grid: usize,
    pub duration_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operating_rate_per_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cavity_lifetime_ps: Option<f64>,
}

fn default_polarization() -> PolarizationGeometry {
    PolarizationGeometry::VerticalCircularPair
}

fn default_grid() -> usize {
    64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub material: MaterialSection,
    pub geometry: GeometrySection,
    pub cavity: CavitySection,
    pub run: RunSection,
}

/// Where a configuration problem sits.
#[derive(Debug, Clone, PartialEq)]
pub struct Location {
    pub source: String,
    pub section: String,
    pub key: Option<String>,
    pub line: Option<usize>,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.source)?;
        if let Some(line) = self.line {
            write!(f, ":{line}")?;
        }
        write!(f, " [{}]", self.section)?;
        if let Some(key) = &self.key {
            write!(f, " {key}")?;
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{source_name}: {message}")]
    Parse {
        source_name: String,
        message: String,
    },
    #[error("{location}: {message}")]
    Invalid { location: Location, message: String },
}

/// Finds the line of `key` inside `[section]`, 1-based.
fn locate(text: &str, section: &str, key: &str) -> Option<usize> {
    let mut current = String::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(rest) = line.strip_prefix('[') {
            current = rest.trim_end_matches(']').trim().to_string();
            continue;
        }
        if current == section {
            if let Some((k, _)) = line.split_once('=') {
                if k.trim() == key {
                    return Some(n + 1);
                }
            }
        }
    }
    None
}

/// Config-file key corresponding to a model field.
fn config_key(section: &str, field: &str) -> String {
    match (section, field) {
        ("cavity", "omega_s") => "signal_nm".into(),
        ("cavity", "omega_i") => "idler_nm".into(),
        _ => field.into(),
    }
}

/// The pieces of the model assembled from a configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub inputs: RateInputs,
    pub pdc_baseline_per_s: f64,
    pub seed: u64,
    pub duration_s: f64,
    pub polarization: PolarizationGeometry,
    /// Rate used for the accidental-coincidence analysis.
    pub operating_rate_per_s: Option<f64>,
    /// Cavity lifetime used for the accidental-coincidence analysis, s.
    pub cavity_lifetime_s: f64,
    pub warnings: Vec<String>,
}

impl RunConfig {
    pub fn parse(text: &str, source_name: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse {
            source_name: source_name.to_string(),
            message: e.to_string(),
        })
    }

    pub fn shipped() -> Self {
        Self::parse(DEFAULT_CONFIG, "<default>").expect("shipped config parses")
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Builds and validates the model inputs. `text` is the original file
    /// content, used to point errors at a line.
    pub fn resolve(&self, text: &str, source_name: &str) -> Result<Resolved, ConfigError> {
        let fail = |section: &str, key: &str, message: String| {
            let key = config_key(section, key);
            ConfigError::Invalid {
                location: Location {
                    source: source_name.to_string(),
                    section: section.to_string(),
                    line: locate(text, section, &key),
                    key: Some(key),
                },
                message,
            }
        };
        let from_model = |e: tpeqw::Error| match &e {
            tpeqw::Error::Invalid { record, field, .. } => fail(record, field, e.to_string()),
            _ => ConfigError::Invalid {
                location: Location {
                    source: source_name.to_string(),
                    section: "run".into(),
                    key: None,
                    line: None,
                },
                message: e.to_string(),
            },
        };

        let m = &self.material;
        let material = MaterialParams::new(
            m.label.clone(),
            m.e_gap_ev,
            m.e_c_ev,
            m.delta_c_ev,
            m.p1_ev_nm,
            m.q_ev_nm,
        )
        .map_err(from_model)?;
        let omega0 = units::energy_to_angular_frequency(material.e_gap_ev);

        let g = &self.geometry;
        let cavity_height_nm = match g.cavity_height_nm {
            Some(h) => h,
            None => {
                let degenerate_nm = units::m_to_nm(
                    units::angular_frequency_to_wavelength(0.5 * omega0).map_err(from_model)?,
                );
                cavity::half_wave_height(degenerate_nm, g.refractive_index)
                    .map_err(|e| fail("geometry", "refractive_index", e.to_string()))?
            }
        };
        let geometry = DeviceGeometry {
            cavity_height_nm,
            grating_period_nm: g.grating_period_nm,
            fill_factor: g.fill_factor,
            device_area_mm2: g.device_area_mm2,
            refractive_index: g.refractive_index,
            extraction_efficiency: g.extraction_efficiency,
        };
        geometry.validate().map_err(from_model)?;

        let c = &self.cavity;
        let omega_s = units::wavelength_to_angular_frequency(units::nm_to_m(c.signal_nm))
            .map_err(|e| fail("cavity", "signal_nm", e.to_string()))?;
        let omega_i = match c.idler_nm {
            Some(nm) => units::wavelength_to_angular_frequency(units::nm_to_m(nm))
                .map_err(|e| fail("cavity", "idler_nm", e.to_string()))?,
            None => omega0 - omega_s,
        };
        let spec = CavitySpec::new(omega_s, omega_i, c.q_s, c.q_i).map_err(from_model)?;
        let inputs = RateInputs::new(material, geometry, spec, self.run.carrier_density_cm3)
            .map_err(from_model)?;

        let r = &self.run;
        if !(r.pdc_baseline_per_s > 0.0) {
            return Err(fail("run", "pdc_baseline_per_s", "must be > 0".into()));
        }
        if !(r.duration_s > 0.0) {
            return Err(fail("run", "duration_s", "must be > 0".into()));
        }
        if r.sweep_steps < 2 {
            return Err(fail("run", "sweep_steps", "must be >= 2".into()));
        }
        if !(r.sweep_min_nm < r.sweep_max_nm) {
            return Err(fail(
                "run",
                "sweep_max_nm",
                "must exceed sweep_min_nm".into(),
            ));
        }
        if r.quadrature_grid < 64 {
            return Err(fail("run", "quadrature_grid", "must be >= 64".into()));
        }
        if let Some(rate) = r.operating_rate_per_s {
            if !(rate > 0.0) {
                return Err(fail("run", "operating_rate_per_s", "must be > 0".into()));
            }
        }
        let cavity_lifetime_s = match r.cavity_lifetime_ps {
            Some(ps) if ps >= 0.0 => ps * 1e-12,
            Some(_) => return Err(fail("run", "cavity_lifetime_ps", "must be >= 0".into())),
            None => cavity::cavity_lifetime(spec.omega_s, spec.q_s).map_err(from_model)?,
        };

        let warnings = spec.separation_warning().into_iter().collect();
        Ok(Resolved {
            inputs,
            pdc_baseline_per_s: r.pdc_baseline_per_s,
            seed: r.seed,
            duration_s: r.duration_s,
            polarization: r.polarization,
            operating_rate_per_s: r.operating_rate_per_s,
            cavity_lifetime_s,
            warnings,
        })
    }
}

/// A configuration together with the text it came from.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: RunConfig,
    pub text: String,
    pub source_name: String,
}

impl LoadedConfig {
    pub fn from_text(text: &str, source_name: &str) -> Result<Self, ConfigError> {
        Ok(Self {
            config: RunConfig::parse(text, source_name)?,
            text: text.to_string(),
            source_name: source_name.to_string(),
        })
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_text(&text, &path.display().to_string())
    }

    pub fn shipped() -> Self {
        Self::from_text(DEFAULT_CONFIG, "<default>").expect("shipped config parses")
    }

    /// `--config`, then `TPEQW_CONFIG`, then the shipped default.
    pub fn discover(explicit: Option<&Path>) -> Result<Self, ConfigError> {
        if let Some(path) = explicit {
            return Self::from_path(path);
        }
        match std::env::var_os(CONFIG_ENV) {
            Some(path) if !path.is_empty() => Self::from_path(Path::new(&path)),
            _ => Ok(Self::shipped()),
        }
    }

    pub fn resolve(&self) -> Result<Resolved, ConfigError> {
        self.config.resolve(&self.text, &self.source_name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_config_resolves() {
        let loaded = LoadedConfig::shipped();
        let r = loaded.resolve().unwrap();
        assert!(r.warnings.is_empty());
        assert!((r.inputs.geometry.cavity_height_nm - 235.2).abs() < 0.1);
        assert_eq!(r.operating_rate_per_s, Some(7.5e10));
        assert!((r.cavity_lifetime_s - 2.4e-12).abs() < 1e-24);
    }

    #[test]
    fn unknown_key_is_named() {
        let text =
            DEFAULT_CONFIG.replace("fill_factor = 0.5", "fill_factor = 0.5\nfil_factor = 0.5");
        let err = LoadedConfig::from_text(&text, "bad.toml").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("fil_factor"), "{msg}");
        assert!(msg.contains("bad.toml"), "{msg}");
    }

    #[test]
    fn unknown_section_is_named() {
        let text = format!("{DEFAULT_CONFIG}\n[extras]\nfoo = 1\n");
        let msg = LoadedConfig::from_text(&text, "x.toml")
            .unwrap_err()
            .to_string();
        assert!(msg.contains("extras"), "{msg}");
    }

    #[test]
    fn invalid_value_points_at_line() {
        let text = DEFAULT_CONFIG.replace("delta_c_ev = 0.2", "delta_c_ev = 3.5");
        let loaded = LoadedConfig::from_text(&text, "cfg.toml").unwrap();
        let err = loaded.resolve().unwrap_err();
        let ConfigError::Invalid { location, .. } = &err else {
            panic!("{err}");
        };
        assert_eq!(location.section, "material");
        assert_eq!(location.key.as_deref(), Some("delta_c_ev"));
        let expected = text
            .lines()
            .position(|l| l.starts_with("delta_c_ev"))
            .unwrap()
            + 1;
        assert_eq!(location.line, Some(expected));
        assert!(err.to_string().starts_with(&format!("cfg.toml:{expected}")));
    }

    #[test]
    fn inconsistent_idler_rejected() {
        let text = DEFAULT_CONFIG.replace(
            "signal_nm = 1580.0",
            "signal_nm = 1580.0\nidler_nm = 1600.0",
        );
        let err = LoadedConfig::from_text(&text, "c.toml")
            .unwrap()
            .resolve()
            .unwrap_err();
        assert!(err.to_string().contains("idler_nm"), "{err}");
    }

    #[test]
    fn overlapping_lines_warn() {
        let text = DEFAULT_CONFIG
            .replace("signal_nm = 1580.0", "signal_nm = 1599.0")
            .replace("q_s = 1000.0", "q_s = 50.0");
        let r = LoadedConfig::from_text(&text, "w.toml")
            .unwrap()
            .resolve()
            .unwrap();
        assert_eq!(r.warnings.len(), 1);
    }

    #[test]
    fn lifetime_defaults_to_q_over_omega() {
        let text = DEFAULT_CONFIG.replace("cavity_lifetime_ps = 2.4", "");
        let r = LoadedConfig::from_text(&text, "l.toml")
            .unwrap()
            .resolve()
            .unwrap();
        let expected = r.inputs.cavity.q_s / r.inputs.cavity.omega_s;
        assert_eq!(r.cavity_lifetime_s, expected);
    }

    #[test]
    fn toml_round_trip() {
        let cfg = RunConfig::shipped();
        let again = RunConfig::parse(&cfg.to_toml(), "rt").unwrap();
        assert_eq!(cfg, again);
    }
}
