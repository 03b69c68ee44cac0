//! The four sweep commands and the shared run/rerun driver.

use crate::error::{CliError, ValidationError};
use crate::manifest::{RunManifest, MANIFEST_FILE};
use crate::output::{condition, number, write_atomic, Table};
use crate::scenario::Scenario;
use oamlos::beam::{self, cone_angle, main_lobe_phase_slope, BeamError, PatternCut, Truncation};
use oamlos::channel::{shannon_capacity, ChannelAnalytics};
use oamlos::link::{run_link_sim, LinkResult, LinkScenario};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Most azimuth samples a single cut may request.
pub const MAX_CUT_SAMPLES: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, clap::Args)]
#[serde(deny_unknown_fields)]
pub struct PatternCutArgs {
    /// Equivalent OAM mode; defaults to the scenario's first mode.
    #[arg(long, allow_hyphen_values = true)]
    pub mode: Option<i32>,
    /// Cut the plane-wave (horn) pattern instead.
    #[arg(long, conflicts_with = "mode")]
    #[serde(default)]
    pub horn: bool,
    /// Polar angle of the cut; defaults to the cone of the equivalent mode.
    #[arg(long)]
    pub theta_deg: Option<f64>,
    #[arg(long, default_value_t = -90.0, allow_hyphen_values = true)]
    pub azimuth_start_deg: f64,
    #[arg(long, default_value_t = 90.0, allow_hyphen_values = true)]
    pub azimuth_stop_deg: f64,
    #[arg(long, default_value_t = 0.1)]
    pub azimuth_step_deg: f64,
    #[arg(long, default_value_t = 1.0)]
    pub distance_m: f64,
    /// Fixed number of retained harmonics per side; adaptive when omitted.
    #[arg(long)]
    pub truncation_terms: Option<usize>,
}

impl Default for PatternCutArgs {
    fn default() -> Self {
        Self {
            mode: None,
            horn: false,
            theta_deg: None,
            azimuth_start_deg: -90.0,
            azimuth_stop_deg: 90.0,
            azimuth_step_deg: 0.1,
            distance_m: 1.0,
            truncation_terms: None,
        }
    }
}

impl PatternCutArgs {
    pub fn azimuth_grid(&self) -> Result<Vec<f64>, ValidationError> {
        let (a, b, h) = (self.azimuth_start_deg, self.azimuth_stop_deg, self.azimuth_step_deg);
        if !(a.is_finite() && b.is_finite() && h.is_finite() && h > 0.0 && b > a) {
            return Err(ValidationError::new(
                "azimuth_start_deg < azimuth_stop_deg, azimuth_step_deg > 0",
                format!("start {a}, stop {b}, step {h}"),
            ));
        }
        let steps = ((b - a) / h + 1e-9).floor();
        if steps + 1.0 > MAX_CUT_SAMPLES as f64 {
            return Err(ValidationError::new("at most 1e6 azimuth samples", format!("{} requested", steps + 1.0)));
        }
        Ok((0..=steps as usize).map(|i| (a + i as f64 * h).to_radians()).collect())
    }
}

/// A command together with its arguments, as recorded in the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", content = "args", rename_all = "kebab-case")]
pub enum Invocation {
    PatternCut(PatternCutArgs),
    CapacitySweep,
    ConditionTable,
    BerSweep,
}

pub struct PatternCutResult {
    /// `None` for the plane-wave cut.
    pub mode: Option<i32>,
    pub theta: f64,
    pub cut: PatternCut,
    pub recovered_mode: Result<f64, BeamError>,
}

impl PatternCutResult {
    pub fn file_name(&self) -> String {
        match self.mode {
            Some(l) => format!("pattern_cut_l{l}.csv"),
            None => "pattern_cut_horn.csv".to_string(),
        }
    }

    pub fn table(&self) -> Result<Table, CliError> {
        let mut t = Table::new(["azimuth_deg", "amplitude_linear", "amplitude_db", "phase_deg_unwrapped"]);
        let peak = self.cut.amplitude().iter().copied().fold(0.0, f64::max);
        for ((phi, a), p) in self.cut.angles().iter().zip(self.cut.amplitude()).zip(self.cut.phase()) {
            let db = if peak > 0.0 && *a > 0.0 { (20.0 * (a / peak).log10()).max(-300.0) } else { -300.0 };
            t.push(vec![
                number("azimuth_deg", phi.to_degrees())?,
                number("amplitude_linear", *a)?,
                number("amplitude_db", db)?,
                number("phase_deg_unwrapped", p.to_degrees())?,
            ]);
        }
        Ok(t)
    }

    pub fn summary(&self) -> String {
        let what = self.mode.map_or("horn".to_string(), |l| format!("mode {l}"));
        match &self.recovered_mode {
            Ok(s) => format!("{what} at theta {:.3} deg: recovered slope {s:.4}", self.theta.to_degrees()),
            Err(e) => format!("{what} at theta {:.3} deg: no slope ({e})", self.theta.to_degrees()),
        }
    }
}

pub fn pattern_cut(scenario: &Scenario, args: &PatternCutArgs) -> Result<PatternCutResult, CliError> {
    let mode = if args.horn {
        None
    } else {
        args.mode.or_else(|| scenario.modes.first().copied())
    };
    let wave = scenario.wave()?;
    let spec = match mode {
        Some(l) => scenario.ntcs_beam(l)?,
        None => scenario.horn_beam(),
    };
    let theta = match args.theta_deg {
        Some(t) if t.is_finite() && t > 0.0 && t <= 180.0 => t.to_radians(),
        Some(t) => return Err(ValidationError::new("0 < theta_deg <= 180", t.to_string()).into()),
        None => cone_angle(&spec, &wave),
    };
    let truncation = match args.truncation_terms {
        Some(k) => Truncation::Terms(k),
        None => Truncation::Auto,
    };
    let grid = args.azimuth_grid()?;
    let cut = beam::pattern_cut(&spec, &wave, theta, &grid, args.distance_m, truncation)?;
    let recovered_mode = main_lobe_phase_slope(&cut);
    Ok(PatternCutResult { mode, theta, cut, recovered_mode })
}

/// Shannon capacity (bit/s/Hz) per configuration over the SNR grid.
pub struct CapacitySweep {
    pub labels: Vec<String>,
    pub snr_db: Vec<f64>,
    /// `capacity[i][j]`: SNR point `i`, configuration `j`.
    pub capacity: Vec<Vec<f64>>,
}

impl CapacitySweep {
    pub fn column(&self, label: &str) -> Option<Vec<f64>> {
        let j = self.labels.iter().position(|l| l == label)?;
        Some(self.capacity.iter().map(|row| row[j]).collect())
    }

    pub fn table(&self) -> Result<Table, CliError> {
        let mut t = Table::new(std::iter::once("snr_db".to_string()).chain(self.labels.iter().cloned()));
        for (snr, row) in self.snr_db.iter().zip(&self.capacity) {
            let mut r = vec![number("snr_db", *snr)?];
            for (label, c) in self.labels.iter().zip(row) {
                r.push(number(label, *c)?);
            }
            t.push(r);
        }
        Ok(t)
    }
}

pub fn capacity_sweep(scenario: &Scenario) -> Result<CapacitySweep, CliError> {
    let configs = scenario.effective_configurations();
    let channels = configs.iter().map(|c| scenario.channel_for(c)).collect::<Result<Vec<_>, _>>()?;
    let capacity = scenario
        .snr_grid_db
        .iter()
        .map(|db| channels.iter().map(|h| shannon_capacity(h, 10f64.powf(db / 10.0))).collect())
        .collect();
    Ok(CapacitySweep {
        labels: configs.into_iter().map(|c| c.label).collect(),
        snr_db: scenario.snr_grid_db.clone(),
        capacity,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionRow {
    pub label: String,
    pub elements: usize,
    pub cond_number: f64,
    pub rho: f64,
    pub numerically_singular: bool,
}

pub fn condition_table(scenario: &Scenario) -> Result<Vec<ConditionRow>, CliError> {
    scenario
        .effective_configurations()
        .iter()
        .map(|c| {
            let h = scenario.channel_for(c)?;
            let a = ChannelAnalytics::compute(&h, 1.0)?;
            Ok(ConditionRow {
                label: c.label.clone(),
                elements: c.elements.unwrap_or(scenario.geometry.tx_count),
                cond_number: a.condition_number,
                rho: a.rho,
                numerically_singular: a.numerically_singular(),
            })
        })
        .collect()
}

pub fn condition_rows_table(rows: &[ConditionRow]) -> Result<Table, CliError> {
    let mut t = Table::new(["configuration", "elements", "cond_number", "rho", "numerically_singular"]);
    for r in rows {
        t.push(vec![
            r.label.clone(),
            r.elements.to_string(),
            condition("cond_number", r.cond_number)?,
            number("rho", r.rho)?,
            r.numerically_singular.to_string(),
        ]);
    }
    Ok(t)
}

/// Link-level BER sweep of a 2×2 scenario.
pub fn ber_sweep(scenario: &Scenario) -> Result<Vec<LinkResult>, CliError> {
    let g = &scenario.geometry;
    if g.tx_count != 2 || g.rx_count != 2 {
        return Err(ValidationError::new(
            "ber-sweep needs tx_count = rx_count = 2",
            format!("{}×{}", g.rx_count, g.tx_count),
        )
        .into());
    }
    let link = LinkScenario {
        channel: scenario.channel()?,
        schedule: scenario.schedule()?,
        equalizer: scenario.equalizer,
    };
    Ok(run_link_sim(&link, &scenario.snr_grid_db, scenario.trials, scenario.seed)?)
}

pub fn ber_table(results: &[LinkResult], seed: u64) -> Result<Table, CliError> {
    let mut t = Table::new(["snr_db", "ber_stream1", "ber_stream2", "rho", "cond_number", "trials", "seed"]);
    for r in results {
        t.push(vec![
            number("snr_db", r.snr_db)?,
            number("ber_stream1", r.ber_per_stream[0])?,
            number("ber_stream2", r.ber_per_stream[1])?,
            number("rho", r.rho_measured)?,
            condition("cond_number", r.cond_measured)?,
            r.trials.to_string(),
            seed.to_string(),
        ]);
    }
    Ok(t)
}

/// Files written by one run and a human-readable summary.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub outputs: Vec<PathBuf>,
    pub manifest: PathBuf,
    pub summary: Vec<String>,
}

/// Runs `invocation`, writes its CSV and `manifest.json` into `out_dir`.
pub fn execute(invocation: &Invocation, scenario: &Scenario, out_dir: &Path) -> Result<RunReport, CliError> {
    scenario.validate()?;
    let (files, summary): (Vec<(String, Table)>, Vec<String>) = match invocation {
        Invocation::PatternCut(args) => {
            let r = pattern_cut(scenario, args)?;
            (vec![(r.file_name(), r.table()?)], vec![r.summary()])
        }
        Invocation::CapacitySweep => {
            let s = capacity_sweep(scenario)?;
            let line = format!("{} configurations over {} SNR points", s.labels.len(), s.snr_db.len());
            (vec![("capacity_sweep.csv".to_string(), s.table()?)], vec![line])
        }
        Invocation::ConditionTable => {
            let rows = condition_table(scenario)?;
            let lines = rows
                .iter()
                .map(|r| {
                    let flag = if r.numerically_singular { " (numerically singular)" } else { "" };
                    format!("{}: cond {:.4e}, rho {:.4}{flag}", r.label, r.cond_number, r.rho)
                })
                .collect();
            (vec![("condition_table.csv".to_string(), condition_rows_table(&rows)?)], lines)
        }
        Invocation::BerSweep => {
            let results = ber_sweep(scenario)?;
            let lines = results
                .iter()
                .map(|r| format!("{} dB: BER {:.3e} / {:.3e}", r.snr_db, r.ber_per_stream[0], r.ber_per_stream[1]))
                .collect();
            (vec![("ber_sweep.csv".to_string(), ber_table(&results, scenario.seed)?)], lines)
        }
    };

    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let mut outputs = Vec::new();
    for (name, table) in &files {
        let path = out_dir.join(name);
        write_atomic(&path, &table.to_bytes()?)?;
        outputs.push(path);
    }
    let manifest = RunManifest::new(invocation.clone(), scenario.clone(), files.into_iter().map(|(n, _)| n).collect());
    let manifest_path = out_dir.join(MANIFEST_FILE);
    write_atomic(&manifest_path, manifest.to_json().as_bytes())?;
    Ok(RunReport { outputs, manifest: manifest_path, summary })
}

/// Repeats the run recorded in `manifest_path`, writing into `out_dir`.
pub fn rerun(manifest_path: &Path, out_dir: &Path) -> Result<RunReport, CliError> {
    let m = RunManifest::read(manifest_path)?;
    execute(&m.command, &m.scenario, out_dir)
}

