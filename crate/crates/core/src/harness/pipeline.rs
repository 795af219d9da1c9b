use crate::array::{default_ridge, sample_covariance, steering_vector, ArrayGeometry, SnapshotMatrix};
use crate::beamforming::{mvdr_weights, BeamformerWeights, Method};
use crate::error::{Error, Result};
use crate::harness::config::ExperimentConfig;
use crate::inc::{assemble_inc, build_interference_matrix, extract_interference, full_sector_inc, InterferenceEstimate};
use crate::numerics::{hermitian_inverse, ComplexVector, HermitianMatrix};
use crate::spectrum::{estimate_noise_power, AngularGrid, AngularSector};
use crate::spectrum_match::{build_match_problem, recover_soi, solve_match, MatchSolution, SolverOptions};

/// What to do when the recovered SOI covariance has no positive dominant eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SoiFallback {
    /// Surface `DegenerateSignal`.
    Fail,
    /// Steer towards the presumed direction instead.
    Presumed,
}

/// Grids, sectors and options shared by every trial of an experiment.
#[derive(Debug, Clone)]
pub struct Pipeline {
    geom: ArrayGeometry,
    presumed_sv: ComplexVector,
    soi_sector: AngularSector,
    interferer_sectors: Vec<AngularSector>,
    interferer_grids: Vec<AngularGrid>,
    noise_grid: AngularGrid,
    soi_grid: AngularGrid,
    complement_grid: AngularGrid,
    wide_grid: AngularGrid,
    power_iters: usize,
    zeta: Option<f64>,
    solver: SolverOptions,
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub weights: BeamformerWeights,
    pub r_inc: HermitianMatrix,
    pub noise_power: f64,
    pub interferences: Vec<InterferenceEstimate>,
    /// SOI power from the recovered covariance; `None` when the presumed SV was used.
    pub soi_power: Option<f64>,
    pub solver_iterations: usize,
    pub converged: bool,
}

impl PipelineOutput {
    pub fn used_presumed_sv(&self) -> bool {
        self.soi_power.is_none()
    }
}

impl Pipeline {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self> {
        cfg.validate_model()?;
        let geom = ArrayGeometry::ula(cfg.num_sensors, cfg.element_spacing_wl)?;
        let soi_sector = cfg.soi_sector()?;
        let interferer_sectors = cfg.interferer_sectors()?;
        let interferer_grids = interferer_sectors
            .iter()
            .map(|s| AngularGrid::over_sector(s, cfg.interferer_grid_step_deg))
            .collect::<Result<Vec<_>>>()?;
        let mut all = vec![soi_sector];
        all.extend(interferer_sectors.iter().copied());
        Ok(Self {
            presumed_sv: steering_vector(&geom, cfg.presumed_soi_deg),
            noise_grid: AngularGrid::excluding(cfg.noise_grid_step_deg, &all)?,
            soi_grid: AngularGrid::over_sector(&soi_sector, cfg.soi_grid_step_deg)?,
            complement_grid: AngularGrid::complement_uniform(cfg.complement_points, &[soi_sector])?,
            wide_grid: AngularGrid::complement_uniform(cfg.inc_est_points, &[soi_sector])?,
            geom,
            soi_sector,
            interferer_sectors,
            interferer_grids,
            power_iters: cfg.power_iters,
            zeta: cfg.zeta,
            solver: SolverOptions::default(),
        })
    }

    pub fn with_solver_options(mut self, solver: SolverOptions) -> Self {
        self.solver = solver;
        self
    }

    pub fn geometry(&self) -> &ArrayGeometry {
        &self.geom
    }

    pub fn presumed_sv(&self) -> &ComplexVector {
        &self.presumed_sv
    }

    pub fn soi_sector(&self) -> AngularSector {
        self.soi_sector
    }

    /// 200-point complement of the SOI sector used by the Capon and full-sector baselines.
    pub fn wide_grid(&self) -> &AngularGrid {
        &self.wide_grid
    }

    /// Sample covariance with the default ridge applied.
    pub fn sample_covariance(&self, snapshots: &SnapshotMatrix) -> Result<HermitianMatrix> {
        if snapshots.num_sensors() != self.geom.num_sensors() {
            return Err(Error::Shape(format!(
                "{} sensor rows for a {}-sensor array",
                snapshots.num_sensors(),
                self.geom.num_sensors()
            )));
        }
        let scm = sample_covariance(snapshots, 0.0);
        let ridge = default_ridge(&scm, snapshots.num_snapshots());
        Ok(if ridge > 0.0 { scm.add_identity(ridge) } else { scm })
    }

    /// Mean MEM spectrum over directions outside every sector.
    pub fn noise_power(&self, r_inv: &HermitianMatrix) -> Result<f64> {
        estimate_noise_power(r_inv, &self.geom, &self.noise_grid)
    }

    /// Full-sector MEM reconstruction over the wide complement grid.
    pub fn full_sector_covariance(&self, r_inv: &HermitianMatrix) -> Result<HermitianMatrix> {
        full_sector_inc(r_inv, &self.geom, &self.wide_grid)
    }

    /// Runs every stage on raw snapshots; a degenerate SOI estimate is an error.
    pub fn run(&self, snapshots: &SnapshotMatrix) -> Result<PipelineOutput> {
        self.run_on_covariance(&self.sample_covariance(snapshots)?, SoiFallback::Fail)
    }

    pub fn run_on_covariance(&self, r_hat: &HermitianMatrix, fallback: SoiFallback) -> Result<PipelineOutput> {
        let m = self.geom.num_sensors();
        let r_inv = hermitian_inverse(r_hat, 0.0)?;

        let mut interferences = Vec::with_capacity(self.interferer_grids.len());
        for (grid, sector) in self.interferer_grids.iter().zip(&self.interferer_sectors) {
            let c = build_interference_matrix(&r_inv, &self.geom, grid)?;
            let mut est = extract_interference(&c, self.power_iters)?;
            est.sector = Some(*sector);
            interferences.push(est);
        }
        let noise_power = self.noise_power(&r_inv)?;
        let r_inc = assemble_inc(&interferences, noise_power, m)?;

        let problem =
            build_match_problem(&r_inv, &self.geom, &self.soi_grid, &self.complement_grid, noise_power, self.zeta)?;
        let (solution, converged) = match solve_match(&problem, &self.solver) {
            Ok(sol) => (sol, true),
            Err(Error::Infeasible { best }) | Err(Error::SolverNoConvergence { best }) => (*best, false),
            Err(e) => return Err(e),
        };
        let MatchSolution { d_s, iterations, .. } = solution;

        let (sv, soi_power) = match recover_soi(&d_s, noise_power, self.power_iters) {
            Ok(est) => (est.sv, Some(est.power)),
            Err(Error::DegenerateSignal { .. }) if fallback == SoiFallback::Presumed => (self.presumed_sv.clone(), None),
            Err(e) => return Err(e),
        };
        let weights = mvdr_weights(&r_inc, &sv, Method::Proposed)?;
        Ok(PipelineOutput {
            weights,
            r_inc,
            noise_power,
            interferences,
            soi_power,
            solver_iterations: iterations,
            converged,
        })
    }
}

/// Algorithm entry point on raw snapshots.
pub fn run_pipeline(snapshots: &SnapshotMatrix, cfg: &ExperimentConfig) -> Result<PipelineOutput> {
    Pipeline::new(cfg)?.run(snapshots)
}
