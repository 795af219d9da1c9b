use std::sync::OnceLock;

use rab_core::array::{steering_vector, theoretical_covariance, ArrayGeometry};
use rab_core::beamforming::{mvdr_weights, output_sinr, EvaluationContext, Method};
use rab_core::harness::oracle::nominal_sources;
use rab_core::harness::{sweep_snr, ExperimentConfig, Pipeline, SoiFallback, TrialTable};
use rab_core::inc::build_interference_matrix;
use rab_core::numerics::{dot_h, hermitian_eig, hermitian_inverse};
use rab_core::spectrum::{AngularGrid, AngularSector};

fn ten_db_table() -> &'static TrialTable {
    static TABLE: OnceLock<TrialTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let cfg = ExperimentConfig { snr_grid_db: vec![10.0], methods: Method::ALL.to_vec(), ..Default::default() };
        sweep_snr(&cfg).unwrap()
    })
}

fn mean(v: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = v.collect();
    v.iter().sum::<f64>() / v.len() as f64
}

fn mean_sinr(t: &TrialTable, m: Method) -> f64 {
    mean(t.rows_for(m).map(|r| r.output_sinr_db))
}

#[test]
fn noise_estimate_is_calibrated_over_seeds() {
    let t = ten_db_table();
    let est: Vec<f64> = t.rows_for(Method::Proposed).map(|r| r.diagnostics.sigma_n_hat.unwrap()).collect();
    assert_eq!(est.len(), 100);
    for e in est {
        assert!((0.5..=2.0).contains(&e), "noise estimate {e}");
    }
}

#[test]
fn recovered_soi_direction_is_accurate() {
    let t = ten_db_table();
    let mut corr: Vec<f64> = t.rows_for(Method::Proposed).map(|r| r.soi_sv_correlation).collect();
    corr.sort_by(f64::total_cmp);
    let median = (corr[49] + corr[50]) / 2.0;
    println!("median SOI steering correlation {median:.4}");
    assert!(median > 0.95);
}

#[test]
fn diagonal_loading_sits_between_smi_and_optimal() {
    let t = ten_db_table();
    let (smi, dl, opt) = (mean_sinr(t, Method::Smi), mean_sinr(t, Method::DlSmi), mean_sinr(t, Method::Optimal));
    println!("smi {smi:.2} dl_smi {dl:.2} optimal {opt:.2}");
    assert!(smi < dl && dl < opt);
}

#[test]
fn full_sector_and_assembled_inc_agree_over_trials() {
    let t = ten_db_table();
    let gap = mean_sinr(t, Method::FullSector) - mean_sinr(t, Method::Proposed);
    println!("mean full-sector minus proposed {gap:.3} dB");
    assert!(gap.abs() < 1.0, "{gap}");
}

#[test]
fn full_sector_and_assembled_inc_agree_on_model_covariance() {
    let cfg = ExperimentConfig::default();
    let pipe = Pipeline::new(&cfg).unwrap();
    let sources = nominal_sources(&cfg, 10.0);
    let geom = pipe.geometry();
    let r = theoretical_covariance(geom, &sources, 1.0, true);
    let ctx = EvaluationContext::new(
        steering_vector(geom, 10.0),
        sources[0].power,
        theoretical_covariance(geom, &sources, 1.0, false),
    )
    .unwrap();
    let run = pipe.run_on_covariance(&r, SoiFallback::Fail).unwrap();
    let full = pipe.full_sector_covariance(&hermitian_inverse(&r, 0.0).unwrap()).unwrap();
    let w_full = mvdr_weights(&full, &run.weights.build_sv, Method::FullSector).unwrap();
    let diff = output_sinr(&w_full, &ctx) - output_sinr(&run.weights, &ctx);
    assert!(diff.abs() < 1.0, "{diff}");
}

#[test]
fn mismatch_free_covariance_is_near_optimal() {
    let cfg = ExperimentConfig::default();
    let pipe = Pipeline::new(&cfg).unwrap();
    let geom = pipe.geometry();
    for snr in [0.0, 10.0, 20.0] {
        let sources = nominal_sources(&cfg, snr);
        let ctx = EvaluationContext::new(
            steering_vector(geom, 10.0),
            sources[0].power,
            theoretical_covariance(geom, &sources, 1.0, false),
        )
        .unwrap();
        let run = pipe.run_on_covariance(&theoretical_covariance(geom, &sources, 1.0, true), SoiFallback::Fail).unwrap();
        let loss = ctx.optimal_sinr_db().unwrap() - output_sinr(&run.weights, &ctx);
        println!("snr {snr}: loss {loss:.2e} dB");
        assert!((0.0..0.5).contains(&loss));
    }
}

#[test]
fn interference_matrix_aligns_with_source() {
    let cfg = ExperimentConfig::default();
    let geom = ArrayGeometry::ula(10, 0.5).unwrap();
    let r = theoretical_covariance(&geom, &nominal_sources(&cfg, 10.0), 1.0, true);
    let grid = AngularGrid::over_sector(&AngularSector::around(30.0, 5.0).unwrap(), 0.2).unwrap();
    let c = build_interference_matrix(&hermitian_inverse(&r, 0.0).unwrap(), &geom, &grid).unwrap();
    let u1 = hermitian_eig(&c).unwrap().vectors[0].clone();
    let a = steering_vector(&geom, 30.0);
    let align = dot_h(&u1, &a).norm() / 10f64.sqrt();
    assert!(align > 0.99, "{align}");
}
