use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::beamforming::{Method, CAPON_RECONSTRUCTION_POINTS, DEFAULT_LOADING_FACTOR};
use crate::error::{Error, Result};
use crate::inc::DEFAULT_POWER_ITERS;
use crate::spectrum::AngularSector;

/// Monte-Carlo experiment description. Angles are in degrees, `_db` fields in
/// dB, everything else linear.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    #[serde(rename = "M")]
    pub num_sensors: usize,
    pub element_spacing_wl: f64,
    pub presumed_soi_deg: f64,
    pub interferer_deg: Vec<f64>,
    pub inr_db: Vec<f64>,
    pub noise_power: f64,
    pub snr_grid_db: Vec<f64>,
    /// Snapshot count used by the SNR sweep.
    pub snapshots: usize,
    pub snapshot_grid: Vec<usize>,
    /// SNR used by the snapshot sweep.
    pub snapshot_sweep_snr_db: f64,
    pub num_trials: usize,
    pub doa_error_halfwidth_deg: f64,
    /// Also draw per-trial DoA errors for the interferers.
    pub perturb_interferer_doas: bool,
    pub pos_error_halfwidth_wl: f64,
    pub soi_sector_halfwidth_deg: f64,
    pub interferer_sector_halfwidth_deg: f64,
    pub soi_grid_step_deg: f64,
    pub interferer_grid_step_deg: f64,
    pub noise_grid_step_deg: f64,
    /// Number of complement directions in the spectrum-matching constraint.
    pub complement_points: usize,
    /// Number of complement directions for the Capon and full-sector baselines.
    pub inc_est_points: usize,
    /// Noise-constraint radius; `None` derives it from the noise level.
    pub zeta: Option<f64>,
    pub power_iters: usize,
    /// DL-SMI loading in units of the estimated noise power.
    pub dl_loading_factor: f64,
    pub methods: Vec<Method>,
    pub master_seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            num_sensors: 10,
            element_spacing_wl: 0.5,
            presumed_soi_deg: 10.0,
            interferer_deg: vec![30.0, 50.0],
            inr_db: vec![30.0, 30.0],
            noise_power: 1.0,
            snr_grid_db: (-20..=30).step_by(5).map(f64::from).collect(),
            snapshots: 50,
            snapshot_grid: (1..=10).map(|i| 10 * i).collect(),
            snapshot_sweep_snr_db: 10.0,
            num_trials: 100,
            doa_error_halfwidth_deg: 5.0,
            perturb_interferer_doas: true,
            pos_error_halfwidth_wl: 0.05,
            soi_sector_halfwidth_deg: 5.0,
            interferer_sector_halfwidth_deg: 5.0,
            soi_grid_step_deg: 0.5,
            interferer_grid_step_deg: 0.2,
            noise_grid_step_deg: 1.0,
            complement_points: 150,
            inc_est_points: CAPON_RECONSTRUCTION_POINTS,
            zeta: None,
            power_iters: DEFAULT_POWER_ITERS,
            dl_loading_factor: DEFAULT_LOADING_FACTOR,
            methods: vec![Method::Optimal, Method::Proposed, Method::Smi, Method::DlSmi, Method::IncEst],
            master_seed: 20_240_601,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn soi_sector(&self) -> Result<AngularSector> {
        AngularSector::around(self.presumed_soi_deg, self.soi_sector_halfwidth_deg)
    }

    pub fn interferer_sectors(&self) -> Result<Vec<AngularSector>> {
        self.interferer_deg
            .iter()
            .map(|&d| AngularSector::around(d, self.interferer_sector_halfwidth_deg))
            .collect()
    }

    /// Full validation, including a positive trial count.
    pub fn validate(&self) -> Result<()> {
        if self.num_trials == 0 {
            return Err(Error::Config("num_trials must be >= 1".into()));
        }
        self.validate_model()
    }

    /// Everything except the trial count; a zero-trial sweep is allowed and
    /// yields an empty table.
    pub fn validate_model(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.num_sensors < 2 {
            return fail(format!("M must be >= 2, got {}", self.num_sensors));
        }
        for (name, v) in [
            ("element_spacing_wl", self.element_spacing_wl),
            ("noise_power", self.noise_power),
            ("soi_grid_step_deg", self.soi_grid_step_deg),
            ("interferer_grid_step_deg", self.interferer_grid_step_deg),
            ("noise_grid_step_deg", self.noise_grid_step_deg),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return fail(format!("{name} must be positive, got {v}"));
            }
        }
        for (name, v) in [
            ("doa_error_halfwidth_deg", self.doa_error_halfwidth_deg),
            ("pos_error_halfwidth_wl", self.pos_error_halfwidth_wl),
            ("soi_sector_halfwidth_deg", self.soi_sector_halfwidth_deg),
            ("interferer_sector_halfwidth_deg", self.interferer_sector_halfwidth_deg),
            ("dl_loading_factor", self.dl_loading_factor),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return fail(format!("{name} must be >= 0, got {v}"));
            }
        }
        if self.pos_error_halfwidth_wl >= self.element_spacing_wl / 2.0 {
            return fail("pos_error_halfwidth_wl must be below half the element spacing".into());
        }
        if self.soi_sector_halfwidth_deg == 0.0 || self.interferer_sector_halfwidth_deg == 0.0 {
            return fail("sector halfwidths must be positive".into());
        }
        if self.interferer_deg.len() != self.inr_db.len() {
            return fail(format!(
                "{} interferer directions but {} INR values",
                self.interferer_deg.len(),
                self.inr_db.len()
            ));
        }
        if self.snr_grid_db.is_empty() || self.snr_grid_db.iter().any(|s| !s.is_finite()) {
            return fail("snr_grid_db must be a nonempty list of finite values".into());
        }
        if self.inr_db.iter().any(|s| !s.is_finite()) || !self.snapshot_sweep_snr_db.is_finite() {
            return fail("power levels must be finite".into());
        }
        if self.snapshots == 0 || self.snapshot_grid.is_empty() || self.snapshot_grid.contains(&0) {
            return fail("snapshot counts must be >= 1 and the snapshot grid nonempty".into());
        }
        if self.complement_points == 0 || self.inc_est_points == 0 || self.power_iters == 0 {
            return fail("complement_points, inc_est_points and power_iters must be >= 1".into());
        }
        if let Some(z) = self.zeta {
            if !(z > 0.0 && z.is_finite()) {
                return fail(format!("zeta must be positive, got {z}"));
            }
        }
        if self.methods.is_empty() {
            return fail("methods must not be empty".into());
        }
        if self.methods.iter().collect::<BTreeSet<_>>().len() != self.methods.len() {
            return fail("methods must not repeat".into());
        }
        self.validate_sectors()
    }

    /// Each source's presumed sector and its reach under the DoA error must stay
    /// clear of every other source's sector.
    fn validate_sectors(&self) -> Result<()> {
        let mut sources = vec![(self.presumed_soi_deg, self.soi_sector_halfwidth_deg, self.doa_error_halfwidth_deg)];
        let reach = if self.perturb_interferer_doas { self.doa_error_halfwidth_deg } else { 0.0 };
        for &d in &self.interferer_deg {
            sources.push((d, self.interferer_sector_halfwidth_deg, reach));
        }
        for &(center, half, err) in &sources {
            if !(-90.0..=90.0).contains(&(center - half.max(err))) || !(-90.0..=90.0).contains(&(center + half.max(err))) {
                return Err(Error::Config(format!("sector or DoA range around {center} deg leaves [-90, 90]")));
            }
        }
        for (i, &(ci, hi, ei)) in sources.iter().enumerate() {
            for (j, &(cj, hj, _)) in sources.iter().enumerate() {
                if i == j {
                    continue;
                }
                let gap = (ci - cj).abs();
                if i < j && gap <= hi + hj {
                    return Err(Error::Config(format!("sectors around {ci} and {cj} deg overlap")));
                }
                if gap <= ei + hj {
                    return Err(Error::Config(format!(
                        "source near {ci} deg can drift into the sector around {cj} deg"
                    )));
                }
            }
        }
        Ok(())
    }
}
