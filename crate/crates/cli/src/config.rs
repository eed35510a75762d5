//! Run configuration: JSON file, command-line overrides, resolved echo.

use std::path::{Path, PathBuf};

use levsqueeze::angular::{parse_direction, BeamSpec, QuadSpec};
use levsqueeze::optimize::{BeamFamily, Bound, Objective, Parameter, Point};
use levsqueeze::phase::{parse_phase, parse_range};
use levsqueeze::physics::{Laser, ModeKind, Particle, Rotor};
use levsqueeze::scatter::{CrossSectionUnits, GridSpec};
use levsqueeze::detect::WignerSource;
use levsqueeze::squeeze::PhaseReference;
use levsqueeze::angular::Axis;
use serde::{Deserialize, Deserializer, Serialize};

use crate::CliError;

pub const CONFIG_DIR_ENV: &str = "LEVSQUEEZE_CONFIG_DIR";

mod lit {
    use super::*;

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Scalar {
        Num(f64),
        Str(String),
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum List {
        Num(f64),
        Str(String),
        Arr(Vec<Scalar>),
    }

    fn scalar_value<E: serde::de::Error>(s: Scalar) -> Result<f64, E> {
        match s {
            Scalar::Num(v) => Ok(v),
            Scalar::Str(s) => parse_phase("value", &s).map_err(E::custom),
        }
    }

    fn list_value<E: serde::de::Error>(l: List) -> Result<Vec<f64>, E> {
        match l {
            List::Num(v) => Ok(vec![v]),
            List::Str(s) => parse_range("value", &s).map_err(E::custom),
            List::Arr(a) => a.into_iter().map(scalar_value).collect(),
        }
    }

    pub fn scalar<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        scalar_value(Scalar::deserialize(d)?)
    }

    pub fn list<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        list_value(List::deserialize(d)?)
    }

    pub fn opt_list<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<f64>>, D::Error> {
        Option::<List>::deserialize(d)?.map(list_value).transpose()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Squeezer {
    /// Squeezing levels in dB; ignored when `r` is present.
    #[serde(deserialize_with = "lit::list")]
    pub db: Vec<f64>,
    /// Squeezing degrees, as an alternative to `db`.
    #[serde(deserialize_with = "lit::opt_list", skip_serializing_if = "Option::is_none")]
    pub r: Option<Vec<f64>>,
    #[serde(deserialize_with = "lit::list")]
    pub phase: Vec<f64>,
    pub reference: PhaseReference,
}

impl Default for Squeezer {
    fn default() -> Self {
        Squeezer {
            db: vec![15.0],
            r: None,
            phase: vec![0.0],
            reference: PhaseReference::Relative,
        }
    }
}

impl Squeezer {
    /// `(dB, r)` pairs.
    pub fn levels(&self) -> Result<Vec<(f64, f64)>, CliError> {
        match &self.r {
            Some(rs) => rs
                .iter()
                .map(|&r| {
                    if r >= 0.0 && r.is_finite() {
                        Ok((r * 20.0 / std::f64::consts::LN_10, r))
                    } else {
                        Err(CliError::config("squeezer.r", format!("{r} must be non-negative")))
                    }
                })
                .collect(),
            None => self
                .db
                .iter()
                .map(|&d| Ok((d, levsqueeze::squeeze::db_to_r(d)?)))
                .collect(),
        }
    }

    pub fn single(&self, cmd: &str) -> Result<(f64, f64, f64), CliError> {
        let levels = self.levels()?;
        if levels.len() != 1 || self.phase.len() != 1 {
            return Err(CliError::config(
                "squeezer",
                format!("`{cmd}` needs exactly one squeezing level and one phase"),
            ));
        }
        Ok((levels[0].0, levels[0].1, self.phase[0]))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RecoilSection {
    /// Only the perfect-overlap column, ignoring `beams`.
    pub perfect_overlap: bool,
    /// Initial phonon number of the optional reheating table.
    pub n0: f64,
    /// Times in seconds; no reheating table when empty.
    #[serde(deserialize_with = "lit::list")]
    pub reheating_times: Vec<f64>,
}

impl Default for RecoilSection {
    fn default() -> Self {
        RecoilSection {
            perfect_overlap: false,
            n0: 0.0,
            reheating_times: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct IrpSection {
    pub grid: GridSpec,
    pub units: CrossSectionUnits,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SensitivitySection {
    /// `|ξ|` of the curves; from the first beam when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi: Option<f64>,
    pub u_min: f64,
    pub u_max: f64,
    pub u_points: usize,
    /// `ω/Ω`; the low-frequency limit when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_ratio: Option<f64>,
    /// `γ/Ω`.
    pub damping_ratio: f64,
    #[serde(deserialize_with = "lit::list")]
    pub heatmap_e2r: Vec<f64>,
    #[serde(deserialize_with = "lit::list")]
    pub heatmap_xi: Vec<f64>,
    /// Numerical apertures whose `|ξ|` is tabulated for the heatmap axis.
    #[serde(deserialize_with = "lit::list")]
    pub na_ticks: Vec<f64>,
}

impl Default for SensitivitySection {
    fn default() -> Self {
        SensitivitySection {
            xi: None,
            u_min: 1e-3,
            u_max: 1e3,
            u_points: 241,
            omega_ratio: None,
            damping_ratio: 1e-6,
            heatmap_e2r: (0..=32).map(|i| 1.0 + i as f64).collect(),
            heatmap_xi: (0..=20).map(|i| i as f64 * 0.05).collect(),
            na_ticks: vec![0.3, 0.5, 0.7, 0.9],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    pub parameter: Parameter,
    #[serde(deserialize_with = "lit::scalar")]
    pub lo: f64,
    #[serde(deserialize_with = "lit::scalar")]
    pub hi: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizeSection {
    pub objective: Objective,
    pub family: BeamFamily,
    pub free: Vec<Bound>,
    pub base: Point,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub start: Option<Point>,
    pub budget: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanSection>,
}

impl Default for OptimizeSection {
    fn default() -> Self {
        OptimizeSection {
            objective: Objective::RecoilRatio,
            family: BeamFamily::Gaussian,
            free: vec![
                Bound {
                    parameter: Parameter::Na,
                    lo: 0.1,
                    hi: 0.95,
                },
                Bound {
                    parameter: Parameter::Phase,
                    lo: 0.0,
                    hi: 2.0 * std::f64::consts::PI,
                },
            ],
            base: Point::default(),
            start: None,
            budget: 200,
            scan: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WignerSection {
    pub source: WignerSource,
    /// `|ξ|` for the interacting input mode.
    pub xi: f64,
    pub points: usize,
    /// Half-width of the window in marginal standard deviations.
    pub width: f64,
}

impl Default for WignerSection {
    fn default() -> Self {
        WignerSection {
            source: WignerSource::InteractingInput,
            xi: 1.0,
            points: 201,
            width: 8.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub particle: Option<Particle>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rotor: Option<Rotor>,
    pub laser: Laser,
    pub mode: ModeKind,
    pub quad: QuadSpec,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    pub squeezer: Squeezer,
    pub beams: Vec<BeamSpec>,
    pub recoil: RecoilSection,
    pub irp: IrpSection,
    pub sensitivity: SensitivitySection,
    pub optimize: OptimizeSection,
    pub wigner: WignerSection,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            particle: None,
            rotor: None,
            laser: Laser::default(),
            mode: ModeKind::Motion(Axis::Z),
            quad: QuadSpec::default(),
            seed: 0,
            threads: None,
            squeezer: Squeezer::default(),
            beams: Vec::new(),
            recoil: RecoilSection::default(),
            irp: IrpSection::default(),
            sensitivity: SensitivitySection::default(),
            optimize: OptimizeSection::default(),
            wigner: WignerSection::default(),
        }
    }
}

/// The file actually read for `--config`, honouring the config directory.
pub fn locate(path: &Path) -> PathBuf {
    if path.is_relative() && !path.exists() {
        if let Some(dir) = std::env::var_os(CONFIG_DIR_ENV) {
            return Path::new(&dir).join(path);
        }
    }
    path.to_path_buf()
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let path = locate(path);
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::config("config", format!("cannot read {}: {e}", path.display())))?;
        let de = &mut serde_json::Deserializer::from_str(&text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let field = e.path().to_string();
            CliError::config(
                if field == "." { "config".to_string() } else { field },
                e.into_inner().to_string(),
            )
        })
    }

    /// Resolves the particle/rotor choice against the mode and checks the
    /// sections every command relies on.
    pub fn resolve(&mut self) -> Result<(), CliError> {
        match self.mode {
            ModeKind::Motion(_) => {
                if self.rotor.is_some() {
                    return Err(CliError::config("rotor", "motion modes take a particle, not a rotor"));
                }
                let p = *self.particle.get_or_insert_with(Particle::silica);
                p.validate()?;
            }
            ModeKind::Libration(axis) => {
                if axis == Axis::X {
                    return Err(CliError::config("mode.axis", "libration is defined about y or z"));
                }
                if self.particle.is_some() {
                    return Err(CliError::config("particle", "libration modes take a rotor, not a particle"));
                }
                let r = *self.rotor.get_or_insert_with(Rotor::silica_dumbbell);
                r.validate()?;
            }
        }
        QuadSpec::new(self.quad.n_theta, self.quad.n_phi).map_err(|e| prefix("quad", e))?;
        self.laser.validate()?;
        if self.squeezer.phase.is_empty() {
            return Err(CliError::config("squeezer.phase", "no phase given"));
        }
        if self.squeezer.levels()?.is_empty() {
            return Err(CliError::config("squeezer.db", "no squeezing level given"));
        }
        if self.squeezer.phase.iter().any(|p| !p.is_finite()) {
            return Err(CliError::config("squeezer.phase", "not finite"));
        }
        for (i, b) in self.beams.iter().enumerate() {
            b.build(QuadSpec::new(2, 2)?).map_err(|e| prefix(&format!("beams[{i}]"), e))?;
        }
        if let Some(t) = self.threads {
            if t == 0 {
                return Err(CliError::config("threads", "must be at least 1"));
            }
        }
        Ok(())
    }

    /// Resolved configuration as written next to the outputs.
    pub fn echo(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }
}

fn prefix(section: &str, e: levsqueeze::Error) -> CliError {
    match e {
        levsqueeze::Error::InvalidInput { field, reason } => CliError::config(format!("{section}.{field}"), reason),
        other => other.into(),
    }
}

/// `na=0.9,axis=-z,pol=pi/2`.
pub fn parse_beam(s: &str) -> Result<BeamSpec, CliError> {
    let mut beam = BeamSpec {
        na: 0.9,
        axis: [0.0, 0.0, -1.0],
        polarization_angle: 0.0,
    };
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| CliError::config("beam", format!("expected key=value, got `{part}`")))?;
        match k.trim() {
            "na" => beam.na = parse_phase("beam.na", v)?,
            "axis" => beam.axis = parse_direction(v)?,
            "pol" | "polarization" => beam.polarization_angle = parse_phase("beam.pol", v)?,
            other => return Err(CliError::config("beam", format!("unknown key `{other}`"))),
        }
    }
    Ok(beam)
}

/// `na=0.1:0.95`.
pub fn parse_bound(s: &str) -> Result<Bound, CliError> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| CliError::config("free", format!("expected name=lo:hi, got `{s}`")))?;
    let parameter: Parameter = serde_json::from_value(serde_json::Value::String(k.trim().to_string()))
        .map_err(|_| CliError::config("free", format!("unknown parameter `{k}`")))?;
    let (lo, hi) = v
        .split_once(':')
        .ok_or_else(|| CliError::config("free", format!("expected lo:hi, got `{v}`")))?;
    Ok(Bound {
        parameter,
        lo: parse_phase("free.lo", lo)?,
        hi: parse_phase("free.hi", hi)?,
    })
}
