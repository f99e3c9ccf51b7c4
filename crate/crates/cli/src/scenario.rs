//! Scenario files: one TOML document per sweep.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use sojourn_core::derivative::DerivativeSpec;
use sojourn_core::em_pulse::{MediumSpec, PulseSpec};
use sojourn_core::first_passage::LatticeSpec;
use sojourn_core::potentials::{validate, Lead, PotentialProfile, Segment};
use sojourn_core::timescales::{Channel, MethodRegistry};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    TimescaleSweep,
    FirstPassage,
    EmPulse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Relative paths resolve against the scenario file's directory.
    pub path: PathBuf,
    #[serde(default)]
    pub format: Format,
    /// Also write `<path>.json` with per-row diagnostics when the format is CSV.
    #[serde(default)]
    pub json_mirror: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Linspace {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub parameter: String,
    #[serde(default)]
    pub values: Option<Vec<f64>>,
    #[serde(default)]
    pub linspace: Option<Linspace>,
}

impl Sweep {
    pub fn grid(&self) -> Result<Vec<f64>, CliError> {
        let grid = match (&self.values, &self.linspace) {
            (Some(v), None) => v.clone(),
            (None, Some(l)) => match l.count {
                0 => vec![],
                1 => vec![l.start],
                n => (0..n)
                    .map(|i| l.start + (l.stop - l.start) * i as f64 / (n - 1) as f64)
                    .collect(),
            },
            _ => return Err(CliError::invalid("sweep", "give exactly one of `values` or `linspace`")),
        };
        if grid.is_empty() {
            return Err(CliError::invalid("sweep", "grid is empty"));
        }
        if grid.iter().any(|v| !v.is_finite()) {
            return Err(CliError::invalid("sweep", "grid values must be finite"));
        }
        let up = grid.windows(2).all(|w| w[1] > w[0]);
        let down = grid.windows(2).all(|w| w[1] < w[0]);
        if !(up || down) {
            return Err(CliError::invalid("sweep", "grid must be strictly monotone"));
        }
        Ok(grid)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    pub segments: Vec<Segment>,
    /// Half-open `[start, end)` segment range.
    #[serde(default)]
    pub clock_region: Option<[usize; 2]>,
    #[serde(default)]
    pub left: Lead,
    #[serde(default)]
    pub right: Lead,
}

impl ProfileConfig {
    pub fn build(&self) -> PotentialProfile {
        let region = self.clock_region.map_or(0..0, |[a, b]| a..b);
        PotentialProfile {
            segments: self.segments.clone(),
            clock_region: region,
            left: self.left,
            right: self.right,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimescaleSection {
    pub profile: ProfileConfig,
    #[serde(default = "default_channel")]
    pub channel: Channel,
    /// Method labels; all standard methods when absent.
    #[serde(default)]
    pub methods: Option<Vec<String>>,
    /// Add a closed-form sojourn column.
    #[serde(default)]
    pub closed_form: bool,
    #[serde(default)]
    pub derivative: DerivativeSpec,
}

fn default_channel() -> Channel {
    Channel::Transmission
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FirstPassageSection {
    pub lattice: LatticeSpec,
    /// Observation time for a `tau` sweep.
    #[serde(default)]
    pub t_fixed: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmPulseSection {
    pub pulse: PulseSpec,
    pub medium: MediumSpec,
    /// Time-domain fields of the unswept configuration.
    #[serde(default)]
    pub traces_path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub kind: Kind,
    #[serde(default)]
    pub name: Option<String>,
    pub sweep: Sweep,
    pub output: OutputSpec,
    #[serde(default)]
    pub timescale: Option<TimescaleSection>,
    #[serde(default)]
    pub first_passage: Option<FirstPassageSection>,
    #[serde(default)]
    pub em_pulse: Option<EmPulseSection>,
}

const TIMESCALE_PARAMS: &[&str] = &["energy"];
const FIRST_PASSAGE_PARAMS: &[&str] = &["n", "tau", "gamma"];
const EM_PARAMS: &[&str] = &["thickness", "duration", "carrier"];

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let s: Scenario = toml::from_str(text).map_err(|e| CliError::Config {
            field: None,
            message: e.to_string().trim().to_string(),
        })?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        Self::from_toml(&text)
    }

    /// SHA-256 of the canonical JSON form.
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_string(self).expect("scenario serialises");
        Sha256::digest(canonical.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::invalid(
                "schema_version",
                format!("unsupported version {}, expected {SCHEMA_VERSION}", self.schema_version),
            ));
        }
        let present = [
            ("timescale", self.timescale.is_some()),
            ("first_passage", self.first_passage.is_some()),
            ("em_pulse", self.em_pulse.is_some()),
        ];
        let wanted = match self.kind {
            Kind::TimescaleSweep => "timescale",
            Kind::FirstPassage => "first_passage",
            Kind::EmPulse => "em_pulse",
        };
        for (section, is_present) in present {
            if section == wanted && !is_present {
                return Err(CliError::invalid(section, "section is required for this kind"));
            }
            if section != wanted && is_present {
                return Err(CliError::invalid(
                    section,
                    format!("section does not apply to kind `{wanted}`"),
                ));
            }
        }
        let grid = self.sweep.grid()?;
        let allowed = match self.kind {
            Kind::TimescaleSweep => TIMESCALE_PARAMS,
            Kind::FirstPassage => FIRST_PASSAGE_PARAMS,
            Kind::EmPulse => EM_PARAMS,
        };
        if !allowed.contains(&self.sweep.parameter.as_str()) {
            return Err(CliError::invalid(
                "sweep.parameter",
                format!("`{}` is not one of {}", self.sweep.parameter, allowed.join(", ")),
            ));
        }
        match self.kind {
            Kind::TimescaleSweep => self.validate_timescale(),
            Kind::FirstPassage => self.validate_first_passage(&grid),
            Kind::EmPulse => self.validate_em(),
        }
    }

    fn validate_timescale(&self) -> Result<(), CliError> {
        let t = self.timescale.as_ref().unwrap();
        if let Some(v) = validate(&t.profile.build()).first() {
            return Err(CliError::invalid(
                format!("timescale.profile.{}", v.field),
                v.message.clone(),
            ));
        }
        if let Some(methods) = &t.methods {
            MethodRegistry::extended()
                .select(methods)
                .map_err(|e| CliError::invalid("timescale.methods", e.to_string()))?;
        }
        t.derivative
            .validate()
            .map_err(|e| CliError::invalid("timescale.derivative", e.to_string()))
    }

    fn validate_first_passage(&self, grid: &[f64]) -> Result<(), CliError> {
        let f = self.first_passage.as_ref().unwrap();
        f.lattice
            .validate()
            .map_err(|e| CliError::invalid("first_passage.lattice", e.to_string()))?;
        match self.sweep.parameter.as_str() {
            "n" => {
                if grid.iter().any(|&v| v < 1.0 || v.fract() != 0.0) {
                    return Err(CliError::invalid("sweep", "step numbers must be positive integers"));
                }
            }
            "tau" => {
                if !f.t_fixed.is_some_and(|t| t > 0.0) {
                    return Err(CliError::invalid(
                        "first_passage.t_fixed",
                        "a positive t_fixed is required for a tau sweep",
                    ));
                }
                if grid.iter().any(|&v| v <= 0.0) {
                    return Err(CliError::invalid("sweep", "tau values must be positive"));
                }
            }
            _ => {
                if grid.iter().any(|&v| v <= 0.0) {
                    return Err(CliError::invalid("sweep", "gamma values must be positive"));
                }
            }
        }
        Ok(())
    }

    fn validate_em(&self) -> Result<(), CliError> {
        let e = self.em_pulse.as_ref().unwrap();
        e.pulse
            .validate()
            .map_err(|err| CliError::invalid("em_pulse.pulse", err.to_string()))?;
        e.medium
            .validate()
            .map_err(|err| CliError::invalid("em_pulse.medium", err.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BARRIER: &str = r#"
schema_version = 1
kind = "timescale_sweep"

[sweep]
parameter = "energy"
linspace = { start = 0.1, stop = 4.0, count = 5 }

[output]
path = "out.csv"

[timescale.profile]
segments = [{ length = 1.0, v_real = 2.0 }]
clock_region = [0, 1]
"#;

    #[test]
    fn parses_barrier() {
        let s = Scenario::from_toml(BARRIER).unwrap();
        assert_eq!(s.sweep.grid().unwrap().len(), 5);
        assert_eq!(s.timescale.unwrap().channel, Channel::Transmission);
    }

    #[test]
    fn unknown_key_names_field() {
        let bad = BARRIER.replace("v_real = 2.0", "v_rael = 2.0");
        let e = Scenario::from_toml(&bad).unwrap_err();
        assert!(e.to_string().contains("v_rael"), "{e}");
    }

    #[test]
    fn wrong_section_rejected() {
        let bad = format!("{BARRIER}\n[first_passage.lattice]\nn_sites = 5\nhopping = 1.0\ninitial_site = 1\ndetector_sites = [3]\ntau = 0.1\nn_steps = 3\n");
        let e = Scenario::from_toml(&bad).unwrap_err();
        assert!(e.to_string().contains("first_passage"), "{e}");
    }

    #[test]
    fn non_monotone_grid_rejected() {
        let bad = BARRIER.replace(
            "linspace = { start = 0.1, stop = 4.0, count = 5 }",
            "values = [1.0, 3.0, 2.0]",
        );
        assert!(Scenario::from_toml(&bad).is_err());
    }

    #[test]
    fn digest_is_stable() {
        let a = Scenario::from_toml(BARRIER).unwrap();
        let b = Scenario::from_toml(BARRIER).unwrap();
        assert_eq!(a.digest(), b.digest());
        assert_eq!(a.digest().len(), 64);
    }
}
