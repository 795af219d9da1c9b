use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::array::{perturb_geometry, steering_vector, synthesize_snapshots, theoretical_covariance, SourceSpec};
use crate::beamforming::{
    capon_reconstruction_weights, dl_smi_weights, mvdr_weights, optimal_weights, output_sinr, smi_weights,
    BeamformerWeights, EvaluationContext, Method,
};
use crate::error::Result;
use crate::harness::config::ExperimentConfig;
use crate::harness::pipeline::{Pipeline, PipelineOutput, SoiFallback};
use crate::numerics::{dot_h, hermitian_inverse, norm2, ComplexVector};

/// Independent variable of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Snr,
    Snapshots,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    pub sigma_n_hat: Option<f64>,
    pub sigma_1_hat: Option<f64>,
    pub solver_iters: Option<usize>,
    pub converged: Option<bool>,
    /// The proposed beamformer steered towards the presumed direction.
    pub used_presumed_sv: bool,
    /// `|wᴴa_build − 1|` against the SV the weights were built for.
    pub distortionless_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialResult {
    pub trial_index: usize,
    /// Index of the sweep point the trial belongs to.
    pub x_index: usize,
    pub seed: u64,
    pub method: Method,
    pub snr_db: f64,
    pub k: usize,
    pub output_sinr_db: f64,
    pub optimal_sinr_db: f64,
    /// `|⟨a_build, a_true⟩| / (‖a_build‖‖a_true‖)`.
    pub soi_sv_correlation: f64,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone)]
pub struct TrialTable {
    pub axis: SweepAxis,
    pub rows: Vec<TrialResult>,
}

impl TrialTable {
    pub fn x_value(&self, row: &TrialResult) -> f64 {
        match self.axis {
            SweepAxis::Snr => row.snr_db,
            SweepAxis::Snapshots => row.k as f64,
        }
    }

    pub fn rows_for(&self, method: Method) -> impl Iterator<Item = &TrialResult> {
        self.rows.iter().filter(move |r| r.method == method)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// `hash(master_seed, x_index, trial_index)` by chained SplitMix64 mixing.
pub fn trial_seed(master_seed: u64, x_index: usize, trial_index: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(master_seed) ^ x_index as u64) ^ trial_index as u64)
}

/// Per-trial draws: perturbed geometry, true DoAs and the snapshot stream.
#[derive(Debug, Clone)]
pub struct TrialScenario {
    pub geometry: crate::array::ArrayGeometry,
    pub sources: Vec<SourceSpec>,
    pub snapshot_seed: u64,
}

pub fn draw_scenario(cfg: &ExperimentConfig, pipe: &Pipeline, snr_db: f64, seed: u64) -> Result<TrialScenario> {
    let geometry = perturb_geometry(pipe.geometry(), cfg.pos_error_halfwidth_wl, splitmix64(seed ^ 1))?;
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed ^ 2));
    let e = cfg.doa_error_halfwidth_deg;
    let mut jitter = |perturb: bool| if perturb && e > 0.0 { rng.random_range(-e..=e) } else { 0.0 };
    let mut sources = vec![SourceSpec::soi(
        cfg.presumed_soi_deg + jitter(true),
        cfg.noise_power * 10f64.powf(snr_db / 10.0),
    )];
    for (&d, &inr) in cfg.interferer_deg.iter().zip(&cfg.inr_db) {
        sources.push(SourceSpec::interferer(
            d + jitter(cfg.perturb_interferer_doas),
            cfg.noise_power * 10f64.powf(inr / 10.0),
        ));
    }
    Ok(TrialScenario { geometry, sources, snapshot_seed: splitmix64(seed ^ 3) })
}

impl TrialScenario {
    pub fn context(&self, noise_power: f64) -> Result<EvaluationContext> {
        let soi = self.sources.iter().find(|s| s.is_soi).expect("scenario has an SOI");
        EvaluationContext::new(
            steering_vector(&self.geometry, soi.doa_deg),
            soi.power,
            theoretical_covariance(&self.geometry, &self.sources, noise_power, false),
        )
    }
}

fn correlation(a: &ComplexVector, b: &ComplexVector) -> f64 {
    (dot_h(a, b).norm() / (norm2(a) * norm2(b))).min(1.0)
}

/// Runs every configured method on one trial.
pub fn run_trial(
    cfg: &ExperimentConfig,
    pipe: &Pipeline,
    x_index: usize,
    trial_index: usize,
    snr_db: f64,
    k: usize,
) -> Result<Vec<TrialResult>> {
    let seed = trial_seed(cfg.master_seed, x_index, trial_index);
    let scenario = draw_scenario(cfg, pipe, snr_db, seed)?;
    let ctx = scenario.context(cfg.noise_power)?;
    let optimal_sinr_db = ctx.optimal_sinr_db()?;
    let x = synthesize_snapshots(&scenario.geometry, &scenario.sources, cfg.noise_power, k, scenario.snapshot_seed)?;
    let r_hat = pipe.sample_covariance(&x)?;

    let needs_pipeline = cfg.methods.iter().any(|m| matches!(m, Method::Proposed | Method::FullSector));
    let proposed: Option<PipelineOutput> = if needs_pipeline {
        Some(pipe.run_on_covariance(&r_hat, SoiFallback::Presumed)?)
    } else {
        None
    };
    let r_inv = hermitian_inverse(&r_hat, 0.0)?;
    let noise_hat = match &proposed {
        Some(p) => p.noise_power,
        None => pipe.noise_power(&r_inv)?,
    };

    let mut rows = Vec::with_capacity(cfg.methods.len());
    for &method in &cfg.methods {
        let mut diag = Diagnostics::default();
        let weights: BeamformerWeights = match method {
            Method::Optimal => optimal_weights(&ctx)?,
            Method::Proposed => {
                let p = proposed.as_ref().expect("pipeline ran");
                diag.sigma_n_hat = Some(p.noise_power);
                diag.sigma_1_hat = p.soi_power;
                diag.solver_iters = Some(p.solver_iterations);
                diag.converged = Some(p.converged);
                diag.used_presumed_sv = p.used_presumed_sv();
                p.weights.clone()
            }
            Method::Smi => smi_weights(&r_hat, pipe.presumed_sv())?,
            Method::DlSmi => {
                diag.sigma_n_hat = Some(noise_hat);
                dl_smi_weights(&r_hat, pipe.presumed_sv(), cfg.dl_loading_factor * noise_hat)?
            }
            Method::IncEst => capon_reconstruction_weights(&r_hat, pipe.geometry(), pipe.wide_grid(), pipe.presumed_sv())?,
            Method::FullSector => {
                let p = proposed.as_ref().expect("pipeline ran");
                diag.sigma_n_hat = Some(p.noise_power);
                let r_in = pipe.full_sector_covariance(&r_inv)?;
                mvdr_weights(&r_in, &p.weights.build_sv, Method::FullSector)?
            }
        };
        diag.distortionless_error = (weights.response() - 1.0).norm();
        rows.push(TrialResult {
            trial_index,
            x_index,
            seed,
            method,
            snr_db,
            k,
            output_sinr_db: output_sinr(&weights, &ctx),
            optimal_sinr_db,
            soi_sv_correlation: correlation(&weights.build_sv, ctx.true_soi_sv()),
            diagnostics: diag,
        });
    }
    Ok(rows)
}

fn sweep(cfg: &ExperimentConfig, axis: SweepAxis, points: Vec<(f64, usize)>) -> Result<TrialTable> {
    cfg.validate_model()?;
    let pipe = Pipeline::new(cfg)?;
    let jobs: Vec<(usize, usize)> =
        (0..points.len()).flat_map(|xi| (0..cfg.num_trials).map(move |t| (xi, t))).collect();
    let chunks = jobs
        .par_iter()
        .map(|&(xi, t)| run_trial(cfg, &pipe, xi, t, points[xi].0, points[xi].1))
        .collect::<Result<Vec<_>>>()?;
    let mut rows: Vec<TrialResult> = chunks.into_iter().flatten().collect();
    let order = |m: Method| cfg.methods.iter().position(|&c| c == m).unwrap_or(usize::MAX);
    rows.sort_by_key(|r| (r.x_index, r.trial_index, order(r.method)));
    Ok(TrialTable { axis, rows })
}

/// Output SINR against SNR at the configured snapshot count.
pub fn sweep_snr(cfg: &ExperimentConfig) -> Result<TrialTable> {
    let points = cfg.snr_grid_db.iter().map(|&s| (s, cfg.snapshots)).collect();
    sweep(cfg, SweepAxis::Snr, points)
}

/// Output SINR against snapshot count at the configured SNR.
pub fn sweep_snapshots(cfg: &ExperimentConfig) -> Result<TrialTable> {
    let points = cfg.snapshot_grid.iter().map(|&k| (cfg.snapshot_sweep_snr_db, k)).collect();
    sweep(cfg, SweepAxis::Snapshots, points)
}
