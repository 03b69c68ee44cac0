//! Scenario files: TOML with units in the key names, unknown keys rejected.

use crate::error::{CliError, ParseError, ValidationError};
use oamlos::beam::{BeamSpec, WaveParameters, WaveguideSpec, DEFAULT_PEAK_GAIN_DB};
use oamlos::channel::{oam_channel, plane_wave_channel, ChannelMatrix, Wavefront};
use oamlos::geometry::{build_uniform_linear_geometry, ArrayGeometry};
use oamlos::link::{Equalizer, FrameSchedule};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TxType {
    Horn,
    NtcsOam,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub tx_count: usize,
    pub rx_count: usize,
    pub tx_spacing_m: f64,
    pub rx_spacing_m: f64,
    pub range_m: f64,
    pub height_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveguideConfig {
    pub wide_side_m: f64,
    pub narrow_side_m: f64,
}

impl Default for WaveguideConfig {
    fn default() -> Self {
        let wr90 = WaveguideSpec::wr90();
        Self { wide_side_m: wr90.wide_side_m, narrow_side_m: wr90.narrow_side_m }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamConfig {
    pub arc_angle_deg: f64,
}

impl Default for BeamConfig {
    fn default() -> Self {
        Self { arc_angle_deg: 90.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameConfig {
    pub pilot_len: usize,
    pub payload_len: usize,
}

impl Default for FrameConfig {
    fn default() -> Self {
        let s = FrameSchedule::default();
        Self { pilot_len: s.pilot_len(), payload_len: s.payload_len() }
    }
}

/// One transmitter set-up compared by `capacity-sweep` and `condition-table`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Configuration {
    pub label: String,
    pub tx_type: TxType,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub modes: Vec<i32>,
    /// Square `elements × elements` array with the scenario's spacings;
    /// the scenario's own counts when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elements: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub frequency_ghz: f64,
    pub tx_type: TxType,
    #[serde(default)]
    pub modes: Vec<i32>,
    #[serde(default = "default_attenuation")]
    pub attenuation: f64,
    #[serde(default)]
    pub wavefront: Wavefront,
    #[serde(default = "default_peak_gain_db")]
    pub peak_gain_db: f64,
    pub snr_grid_db: Vec<f64>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub equalizer: Equalizer,
    pub geometry: GeometryConfig,
    #[serde(default)]
    pub waveguide: WaveguideConfig,
    #[serde(default)]
    pub beam: BeamConfig,
    #[serde(default)]
    pub frame: FrameConfig,
    #[serde(default)]
    pub configurations: Vec<Configuration>,
}

fn default_attenuation() -> f64 {
    1.0
}

fn default_peak_gain_db() -> f64 {
    DEFAULT_PEAK_GAIN_DB
}

fn default_trials() -> usize {
    25
}

/// Reads, parses and validates a scenario file.
pub fn parse_scenario(path: &Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Scenario::from_toml_str(&text, &path.display().to_string())
}

fn positive(invariant: &'static str, name: &str, v: f64) -> Result<(), ValidationError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(ValidationError::new(invariant, format!("{name} = {v}")))
    }
}

fn check_modes(tx_type: TxType, modes: &[i32], count: usize, who: &str) -> Result<(), ValidationError> {
    match tx_type {
        TxType::NtcsOam if modes.len() != count => Err(ValidationError::new(
            "modes length = tx count",
            format!("{who}: {} modes for {count} transmitters", modes.len()),
        )),
        TxType::NtcsOam if modes.contains(&0) => {
            Err(ValidationError::new("modes are nonzero", format!("{who}: {modes:?}")))
        }
        TxType::Horn if !modes.is_empty() => Err(ValidationError::new(
            "modes only with tx_type = ntcs_oam",
            format!("{who}: horn transmitters given modes {modes:?}"),
        )),
        _ => Ok(()),
    }
}

impl Scenario {
    /// Parses and validates scenario text; `origin` labels diagnostics.
    pub fn from_toml_str(text: &str, origin: &str) -> Result<Self, CliError> {
        let scenario: Scenario =
            toml::from_str(text).map_err(|e| ParseError::at_span(origin, text, e.span(), e.message()))?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario fields are all representable in TOML")
    }

    pub fn validate(&self) -> Result<(), ValidationError> {
        positive("frequency_ghz > 0", "frequency_ghz", self.frequency_ghz)?;
        positive("attenuation > 0", "attenuation", self.attenuation)?;
        if !self.peak_gain_db.is_finite() {
            return Err(ValidationError::new("peak_gain_db finite", self.peak_gain_db.to_string()));
        }
        let g = &self.geometry;
        if g.tx_count == 0 || g.rx_count == 0 {
            return Err(ValidationError::new(
                "element counts > 0",
                format!("tx_count = {}, rx_count = {}", g.tx_count, g.rx_count),
            ));
        }
        positive("spacings > 0", "tx_spacing_m", g.tx_spacing_m)?;
        positive("spacings > 0", "rx_spacing_m", g.rx_spacing_m)?;
        positive("range_m > 0", "range_m", g.range_m)?;
        positive("height_m > 0", "height_m", g.height_m)?;
        check_modes(self.tx_type, &self.modes, g.tx_count, "scenario")?;

        if self.snr_grid_db.is_empty() {
            return Err(ValidationError::new("snr_grid nonempty", "snr_grid_db = []"));
        }
        if self.snr_grid_db.iter().any(|v| !v.is_finite()) {
            return Err(ValidationError::new("snr_grid finite", format!("{:?}", self.snr_grid_db)));
        }
        if let Some(w) = self.snr_grid_db.windows(2).find(|w| w[1] <= w[0]) {
            return Err(ValidationError::new("snr_grid strictly increasing", format!("{} then {}", w[0], w[1])));
        }
        if self.trials == 0 {
            return Err(ValidationError::new("trials > 0", "trials = 0"));
        }

        positive("waveguide sides > 0", "wide_side_m", self.waveguide.wide_side_m)?;
        positive("waveguide sides > 0", "narrow_side_m", self.waveguide.narrow_side_m)?;
        if self.waveguide.narrow_side_m >= self.waveguide.wide_side_m {
            return Err(ValidationError::new(
                "narrow_side_m < wide_side_m",
                format!("{} >= {}", self.waveguide.narrow_side_m, self.waveguide.wide_side_m),
            ));
        }
        let arc = self.beam.arc_angle_deg;
        if !(arc.is_finite() && arc > 0.0 && arc <= 360.0) {
            return Err(ValidationError::new("0 < arc_angle_deg <= 360", arc.to_string()));
        }
        if self.frame.pilot_len == 0 || self.frame.payload_len == 0 {
            return Err(ValidationError::new(
                "pilot_len > 0 and payload_len > 0",
                format!("pilot_len = {}, payload_len = {}", self.frame.pilot_len, self.frame.payload_len),
            ));
        }

        for (i, c) in self.configurations.iter().enumerate() {
            if c.label.trim().is_empty() {
                return Err(ValidationError::new("configuration labels nonempty", format!("configuration {i}")));
            }
            if self.configurations[..i].iter().any(|o| o.label == c.label) {
                return Err(ValidationError::new("configuration labels unique", c.label.clone()));
            }
            if c.elements == Some(0) {
                return Err(ValidationError::new("elements > 0", c.label.clone()));
            }
            check_modes(c.tx_type, &c.modes, c.elements.unwrap_or(g.tx_count), &c.label)?;
        }
        Ok(())
    }

    pub fn wave(&self) -> Result<WaveParameters, CliError> {
        Ok(WaveParameters::from_frequency(self.frequency_ghz * 1e9)?)
    }

    pub fn waveguide_spec(&self) -> Result<WaveguideSpec, CliError> {
        Ok(WaveguideSpec::new(self.waveguide.wide_side_m, self.waveguide.narrow_side_m)?)
    }

    pub fn arc_angle_rad(&self) -> f64 {
        self.beam.arc_angle_deg.to_radians()
    }

    pub fn schedule(&self) -> Result<FrameSchedule, CliError> {
        Ok(FrameSchedule::new(self.frame.pilot_len, self.frame.payload_len)?)
    }

    /// NTCS beam for `mode` on the scenario's waveguide.
    pub fn ntcs_beam(&self, mode: i32) -> Result<BeamSpec, CliError> {
        let spec = BeamSpec::ntcs_for_waveguide(mode, self.arc_angle_rad(), &self.wave()?, &self.waveguide_spec()?)?;
        Ok(spec.with_peak_gain_db(self.peak_gain_db))
    }

    pub fn horn_beam(&self) -> BeamSpec {
        BeamSpec::plane_wave(self.peak_gain_db)
    }

    /// The listed configurations, or the scenario's own set-up when none are listed.
    pub fn effective_configurations(&self) -> Vec<Configuration> {
        if !self.configurations.is_empty() {
            return self.configurations.clone();
        }
        let label = match self.tx_type {
            TxType::Horn => "horn".to_string(),
            TxType::NtcsOam => {
                let m: Vec<String> = self.modes.iter().map(i32::to_string).collect();
                format!("oam({})", m.join(","))
            }
        };
        vec![Configuration { label, tx_type: self.tx_type, modes: self.modes.clone(), elements: None }]
    }

    pub fn geometry_for(&self, elements: Option<usize>) -> Result<ArrayGeometry, CliError> {
        let g = &self.geometry;
        let (m, n) = elements.map_or((g.tx_count, g.rx_count), |e| (e, e));
        Ok(build_uniform_linear_geometry(m, n, g.tx_spacing_m, g.rx_spacing_m, g.range_m, g.height_m)?)
    }

    pub fn channel_for(&self, config: &Configuration) -> Result<ChannelMatrix, CliError> {
        let geom = self.geometry_for(config.elements)?;
        let wave = self.wave()?;
        let h = match config.tx_type {
            TxType::Horn => plane_wave_channel(&geom, &wave, self.attenuation, &self.horn_beam(), self.wavefront)?,
            TxType::NtcsOam => {
                let beams = config.modes.iter().map(|&l| self.ntcs_beam(l)).collect::<Result<Vec<_>, _>>()?;
                oam_channel(&geom, &wave, self.attenuation, &beams, self.wavefront)?
            }
        };
        Ok(h)
    }

    /// Channel of the scenario's own transmitters.
    pub fn channel(&self) -> Result<ChannelMatrix, CliError> {
        let own = Configuration { label: String::new(), tx_type: self.tx_type, modes: self.modes.clone(), elements: None };
        self.channel_for(&own)
    }
}
