//! Direct numerical evaluations of reference quantities, printed by
//! `rab-bench oracle`.

use crate::array::{steering_vector, theoretical_covariance, SourceSpec};
use crate::beamforming::{mvdr_weights, output_sinr, EvaluationContext, Method};
use crate::error::{Error, Result};
use crate::harness::config::ExperimentConfig;
use crate::harness::pipeline::{Pipeline, SoiFallback};
use crate::numerics::{dot_h, hermitian_inverse, HermitianMatrix};
use crate::spectrum::{mem_spectrum, AngularGrid};

pub const SUITES: [&str; 4] = ["noise", "optimal", "inc", "pipeline"];

#[derive(Debug, Clone, PartialEq)]
pub struct OracleValue {
    pub name: String,
    pub value: f64,
}

fn val(name: impl Into<String>, value: f64) -> OracleValue {
    OracleValue { name: name.into(), value }
}

/// Mismatch-free scenario at the configured presumed directions.
pub fn nominal_sources(cfg: &ExperimentConfig, snr_db: f64) -> Vec<SourceSpec> {
    let mut s = vec![SourceSpec::soi(cfg.presumed_soi_deg, cfg.noise_power * 10f64.powf(snr_db / 10.0))];
    for (&d, &inr) in cfg.interferer_deg.iter().zip(&cfg.inr_db) {
        s.push(SourceSpec::interferer(d, cfg.noise_power * 10f64.powf(inr / 10.0)));
    }
    s
}

pub fn run_suite(suite: &str, cfg: &ExperimentConfig) -> Result<Vec<OracleValue>> {
    match suite {
        "noise" => noise_suite(cfg),
        "optimal" => optimal_suite(cfg),
        "inc" => inc_suite(cfg),
        "pipeline" => pipeline_suite(cfg),
        "all" => {
            let mut out = Vec::new();
            for s in SUITES {
                out.extend(run_suite(s, cfg)?);
            }
            Ok(out)
        }
        other => Err(Error::InvalidInput(format!("unknown oracle suite '{other}' (expected one of {SUITES:?} or all)"))),
    }
}

fn noise_suite(cfg: &ExperimentConfig) -> Result<Vec<OracleValue>> {
    let pipe = Pipeline::new(cfg)?;
    let grid = AngularGrid::excluding(1.0, &[])?;
    let mut out = Vec::new();
    for s2 in [0.5, 1.0, 3.0] {
        let r_inv = hermitian_inverse(&HermitianMatrix::scaled_identity(cfg.num_sensors, s2), 0.0)?;
        let mut worst: f64 = 0.0;
        for a in grid.steering_vectors(pipe.geometry()) {
            worst = worst.max((mem_spectrum(&r_inv, &a)? - s2).abs());
        }
        out.push(val(format!("noise.mem_max_abs_dev[sigma2={s2}]"), worst));
        out.push(val(format!("noise.estimate[sigma2={s2}]"), pipe.noise_power(&r_inv)?));
    }
    Ok(out)
}

fn optimal_suite(cfg: &ExperimentConfig) -> Result<Vec<OracleValue>> {
    let pipe = Pipeline::new(cfg)?;
    let geom = pipe.geometry();
    let mut out = Vec::new();
    for snr in [0.0, 10.0, 20.0] {
        let sources = nominal_sources(cfg, snr);
        let ctx = EvaluationContext::new(
            steering_vector(geom, cfg.presumed_soi_deg),
            sources[0].power,
            theoretical_covariance(geom, &sources, cfg.noise_power, false),
        )?;
        out.push(val(format!("optimal.sinr_db[snr={snr}]"), ctx.optimal_sinr_db()?));
        out.push(val(format!("optimal.white_noise_bound_db[snr={snr}]"), snr + 10.0 * (cfg.num_sensors as f64).log10()));
    }
    Ok(out)
}

fn inc_suite(cfg: &ExperimentConfig) -> Result<Vec<OracleValue>> {
    let pipe = Pipeline::new(cfg)?;
    let geom = pipe.geometry();
    let sources = nominal_sources(cfg, 10.0);
    let r = theoretical_covariance(geom, &sources, cfg.noise_power, true);
    let truth = theoretical_covariance(geom, &sources, cfg.noise_power, false);
    let run = pipe.run_on_covariance(&r, SoiFallback::Presumed)?;
    let m = cfg.num_sensors as f64;
    let mut out = Vec::new();
    for (est, src) in run.interferences.iter().zip(&sources[1..]) {
        let a = steering_vector(geom, src.doa_deg);
        out.push(val(format!("inc.power_db_error[{}deg]", src.doa_deg), 10.0 * (est.power / src.power).log10()));
        out.push(val(format!("inc.sv_correlation[{}deg]", src.doa_deg), dot_h(&est.sv, &a).norm() / m));
    }
    out.push(val("inc.noise_power", run.noise_power));
    out.push(val("inc.relative_frobenius_error", run.r_inc.sub(&truth).frobenius_norm() / truth.frobenius_norm()));
    Ok(out)
}

fn pipeline_suite(cfg: &ExperimentConfig) -> Result<Vec<OracleValue>> {
    let pipe = Pipeline::new(cfg)?;
    let geom = pipe.geometry();
    let mut out = Vec::new();
    for snr in [0.0, 10.0, 20.0] {
        let sources = nominal_sources(cfg, snr);
        let r = theoretical_covariance(geom, &sources, cfg.noise_power, true);
        let ctx = EvaluationContext::new(
            steering_vector(geom, cfg.presumed_soi_deg),
            sources[0].power,
            theoretical_covariance(geom, &sources, cfg.noise_power, false),
        )?;
        let run = pipe.run_on_covariance(&r, SoiFallback::Presumed)?;
        let proposed = output_sinr(&run.weights, &ctx);
        let r_inv = hermitian_inverse(&r, 0.0)?;
        let full = mvdr_weights(&pipe.full_sector_covariance(&r_inv)?, &run.weights.build_sv, Method::FullSector)?;
        out.push(val(format!("pipeline.optimal_minus_proposed_db[snr={snr}]"), ctx.optimal_sinr_db()? - proposed));
        out.push(val(format!("pipeline.full_sector_minus_proposed_db[snr={snr}]"), output_sinr(&full, &ctx) - proposed));
        out.push(val(
            format!("pipeline.sv_correlation[snr={snr}]"),
            dot_h(&run.weights.build_sv, ctx.true_soi_sv()).norm() / cfg.num_sensors as f64,
        ));
        out.push(val(format!("pipeline.solver_iterations[snr={snr}]"), run.solver_iterations as f64));
    }
    Ok(out)
}
