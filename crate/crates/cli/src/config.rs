//! Run configuration: a single JSON document validated against this schema
//! before any computation starts. Unknown keys are rejected everywhere.
//!
//! Top-level layout (every section is optional; each subcommand requires its
//! own section and ignores the rest):
//!
//! ```json
//! {
//!   "output_dir": "out",
//!   "emit_svg": false,
//!   "devices": { "pmos": { ... }, "nmos": { ... } },
//!   "sweep":    { "vdd": 1.65, "grid": {...}, "configs": [ {"label": "HH", "r_up": 106000, "r_dn": 110000} ] },
//!   "surface":  { "vdd": 1.65, "grid": {...}, "m_a": 3500, "m_b": 500, "m_c": 4000, "emit_nor_dual": true },
//!   "energy":   { "r1": 4e6, "r2": 6e6, "c_out": 1e-14, "vdd": 1.65, "v_out_1": 0.0, "l_grid": {...} },
//!   "readout":  { "i_ref": 4e-6, "mirror_gain": 1.0, "ambiguity_margin": 0.165, "pmos": {...}, "nmos": {...} },
//!   "digitize": { "vdd": 1.65, "grid": {...}, "r_up": 4e6, "r_dn": 6e6 },
//!   "texel":    { "dataset": "spikes.csv", "v_trig": 0.3, "stored_states": [19500, 14800, 12700, 10600] }
//! }
//! ```
//!
//! Grids are `{ "start": v, "stop": v, "points": n }` with at least two
//! points. Device blocks override individual fields of the built-in devices
//! (`polarity` is `"n"` or `"p"`; the other fields are numbers). Relative
//! dataset paths are resolved against the directory containing the
//! configuration file.

use std::path::{Path, PathBuf};

use memgate_core::devices::{MemristorState, MosfetParams, Polarity};
use memgate_core::readout::ReadoutParams;
use memgate_core::texel::{TexelArrayConfig, TexelConfig};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub emit_svg: bool,
    #[serde(default)]
    pub devices: Option<DevicePair>,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub surface: Option<SurfaceSection>,
    #[serde(default)]
    pub energy: Option<EnergySection>,
    #[serde(default)]
    pub readout: Option<ReadoutSection>,
    #[serde(default)]
    pub digitize: Option<DigitizeSection>,
    #[serde(default)]
    pub texel: Option<TexelSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DevicePair {
    #[serde(default)]
    pub pmos: Option<DeviceSpec>,
    #[serde(default)]
    pub nmos: Option<DeviceSpec>,
}

/// Partial device description; unset fields keep the built-in value for the
/// slot the device occupies.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceSpec {
    #[serde(default)]
    pub polarity: Option<String>,
    #[serde(default)]
    pub v_th: Option<f64>,
    #[serde(default)]
    pub k_prime: Option<f64>,
    #[serde(default)]
    pub w: Option<f64>,
    #[serde(default)]
    pub l: Option<f64>,
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub g_min: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub vdd: f64,
    pub grid: GridSpec,
    pub configs: Vec<SweepEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepEntry {
    pub label: String,
    pub r_up: f64,
    pub r_dn: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceSection {
    pub vdd: f64,
    pub grid: GridSpec,
    pub m_a: f64,
    pub m_b: f64,
    pub m_c: f64,
    #[serde(default)]
    pub emit_nor_dual: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergySection {
    pub r1: f64,
    pub r2: f64,
    pub c_out: f64,
    pub vdd: f64,
    #[serde(default)]
    pub v_out_1: f64,
    pub l_grid: GridSpec,
    #[serde(default = "default_dt_fraction")]
    pub oracle_dt_fraction: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReadoutSection {
    #[serde(default)]
    pub i_ref: Option<f64>,
    #[serde(default)]
    pub mirror_gain: Option<f64>,
    #[serde(default)]
    pub ambiguity_margin: Option<f64>,
    #[serde(default)]
    pub pmos: Option<DeviceSpec>,
    #[serde(default)]
    pub nmos: Option<DeviceSpec>,
}

/// Without a programmed divider pair the sweep drives the read-out input
/// directly (`v_mid = v_in`); with `r_up`/`r_dn` given, an analogue inverter
/// stage produces `v_mid` first.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DigitizeSection {
    pub vdd: f64,
    pub grid: GridSpec,
    #[serde(default)]
    pub r_up: Option<f64>,
    #[serde(default)]
    pub r_dn: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TexelSection {
    pub dataset: PathBuf,
    pub v_trig: f64,
    #[serde(default = "default_gain")]
    pub gain: f64,
    #[serde(default = "default_offset")]
    pub offset: f64,
    #[serde(default)]
    pub r_load: Option<f64>,
    #[serde(default)]
    pub stored_states: Option<Vec<f64>>,
    #[serde(default)]
    pub program_targets: Option<Vec<f64>>,
}

fn default_dt_fraction() -> f64 {
    1e-3
}

fn default_gain() -> f64 {
    memgate_core::spikesort::DEFAULT_GAIN
}

fn default_offset() -> f64 {
    memgate_core::spikesort::DEFAULT_OFFSET
}

impl RunConfig {
    /// Load and validate the configuration document at `path`.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("cannot read {}: {e}", path.display()))
        })?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

impl GridSpec {
    pub fn build(&self, name: &str) -> Result<Vec<f64>, CliError> {
        if self.points < 2 {
            return Err(CliError::Config(format!(
                "{name}: a grid needs at least two points, got {}",
                self.points
            )));
        }
        if !(self.stop > self.start) {
            return Err(CliError::Config(format!(
                "{name}: grid stop {} must exceed start {}",
                self.stop, self.start
            )));
        }
        Ok(memgate_core::solver::linear_grid(
            self.start,
            self.stop,
            self.points,
        ))
    }
}

impl DeviceSpec {
    /// Apply the overrides on top of `base` and revalidate.
    pub fn resolve(&self, base: &MosfetParams) -> Result<MosfetParams, CliError> {
        let polarity = match self.polarity.as_deref() {
            None => base.polarity,
            Some("n") | Some("N") => Polarity::N,
            Some("p") | Some("P") => Polarity::P,
            Some(other) => {
                return Err(CliError::Config(format!(
                    "device polarity must be \"n\" or \"p\", got \"{other}\""
                )))
            }
        };
        MosfetParams::new(
            polarity,
            self.v_th.unwrap_or(base.v_th),
            self.k_prime.unwrap_or(base.k_prime),
            self.w.unwrap_or(base.w),
            self.l.unwrap_or(base.l),
            self.lambda.unwrap_or(base.lambda),
            self.g_min.unwrap_or(base.g_min),
        )
        .map_err(CliError::from)
    }
}

impl RunConfig {
    /// The inverter/NAND device pair after any configured overrides.
    pub fn device_pair(&self) -> Result<(MosfetParams, MosfetParams), CliError> {
        let mut pmos = MosfetParams::default_pmos();
        let mut nmos = MosfetParams::default_nmos();
        if let Some(pair) = &self.devices {
            if let Some(spec) = &pair.pmos {
                pmos = spec.resolve(&pmos)?;
            }
            if let Some(spec) = &pair.nmos {
                nmos = spec.resolve(&nmos)?;
            }
        }
        Ok((pmos, nmos))
    }

    /// Read-out stage for the digitize command: the beta-matched default at
    /// the given supply, with any configured overrides applied.
    pub fn readout_params(&self, vdd: f64) -> Result<ReadoutParams, CliError> {
        let base = ReadoutParams::symmetric_default(vdd)?;
        let Some(section) = &self.readout else {
            return Ok(base);
        };
        let pmos = match &section.pmos {
            Some(spec) => spec.resolve(&base.pmos)?,
            None => base.pmos.clone(),
        };
        let nmos = match &section.nmos {
            Some(spec) => spec.resolve(&base.nmos)?,
            None => base.nmos.clone(),
        };
        ReadoutParams::new(
            pmos,
            nmos,
            vdd,
            section.i_ref.unwrap_or(base.i_ref),
            section.mirror_gain.unwrap_or(base.mirror_gain),
            section.ambiguity_margin.unwrap_or(base.ambiguity_margin),
        )
        .map_err(CliError::from)
    }
}

impl TexelSection {
    /// Dataset location, with relative paths taken from the configuration
    /// file's directory.
    pub fn dataset_path(&self, config_path: &Path) -> PathBuf {
        if self.dataset.is_absolute() {
            self.dataset.clone()
        } else {
            config_path
                .parent()
                .unwrap_or_else(|| Path::new("."))
                .join(&self.dataset)
        }
    }

    /// Build the texel array: the reference four-texel experiment, with
    /// optional load override, stored resistive states, and template
    /// programming applied in that order.
    pub fn build_array(&self) -> Result<TexelArrayConfig, CliError> {
        if self.stored_states.is_some() && self.program_targets.is_some() {
            return Err(CliError::Config(
                "texel: give either stored_states or program_targets, not both".into(),
            ));
        }
        let mut array = TexelArrayConfig::paper_experiment();
        if let Some(r_load) = self.r_load {
            array = TexelArrayConfig::new(array.texels, r_load)?;
        }
        if let Some(states) = &self.stored_states {
            if states.len() != array.texels.len() {
                return Err(CliError::Config(format!(
                    "texel: {} stored_states for {} texels",
                    states.len(),
                    array.texels.len()
                )));
            }
            let mut texels = Vec::with_capacity(array.texels.len());
            for (texel, &ohms) in array.texels.iter().zip(states) {
                let (lo, hi) = texel.r1.bounds();
                let r1 = MemristorState::new(ohms, lo, hi)?;
                texels.push(TexelConfig::new(
                    texel.pmos.clone(),
                    texel.nmos.clone(),
                    texel.r0.clone(),
                    r1,
                    texel.readout.clone(),
                    texel.vdd,
                    texel.programs,
                    texel.series_limit,
                )?);
            }
            array = TexelArrayConfig::new(texels, array.r_load)?;
        }
        if let Some(targets) = &self.program_targets {
            array = memgate_core::texel::program_template(&array, targets)?;
        }
        Ok(array)
    }
}
