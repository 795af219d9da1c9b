//! MVDR weights, output SINR and the baseline beamformers.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::array::ArrayGeometry;
use crate::error::{Error, Result};
use crate::numerics::{cholesky, dot_h, hermitian_inverse, ComplexVector, HermitianMatrix};
use crate::spectrum::{capon_spectrum, AngularGrid};

/// Diagonal loading of the DL-SMI baseline, in units of the estimated noise power.
pub const DEFAULT_LOADING_FACTOR: f64 = 10.0;

/// Complement-grid size of the INC-EST baseline.
pub const CAPON_RECONSTRUCTION_POINTS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Optimal,
    Proposed,
    Smi,
    DlSmi,
    IncEst,
    /// Full-sector MEM reconstruction without eigenpair extraction.
    FullSector,
}

impl Method {
    pub const ALL: [Method; 6] =
        [Method::Optimal, Method::Proposed, Method::Smi, Method::DlSmi, Method::IncEst, Method::FullSector];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Optimal => "optimal",
            Method::Proposed => "proposed",
            Method::Smi => "smi",
            Method::DlSmi => "dl_smi",
            Method::IncEst => "inc_est",
            Method::FullSector => "full_sector",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown method '{s}'")))
    }
}

#[derive(Debug, Clone)]
pub struct BeamformerWeights {
    pub w: ComplexVector,
    pub method: Method,
    /// Steering vector the weights are distortionless towards.
    pub build_sv: ComplexVector,
}

impl BeamformerWeights {
    /// `wᴴa` against the steering vector used to build the weights.
    pub fn response(&self) -> num_complex::Complex64 {
        dot_h(&self.w, &self.build_sv)
    }
}

/// True per-trial quantities the output SINR is measured against.
#[derive(Debug, Clone)]
pub struct EvaluationContext {
    true_soi_sv: ComplexVector,
    true_soi_power: f64,
    true_inc: HermitianMatrix,
}

impl EvaluationContext {
    pub fn new(true_soi_sv: ComplexVector, true_soi_power: f64, true_inc: HermitianMatrix) -> Result<Self> {
        if true_soi_sv.len() != true_inc.dim() {
            return Err(Error::Shape(format!(
                "steering vector of length {} against {}x{} covariance",
                true_soi_sv.len(),
                true_inc.dim(),
                true_inc.dim()
            )));
        }
        if !(true_soi_power > 0.0) {
            return Err(Error::InvalidInput(format!("SOI power must be positive, got {true_soi_power}")));
        }
        cholesky(&true_inc)?;
        Ok(Self { true_soi_sv, true_soi_power, true_inc })
    }

    pub fn true_soi_sv(&self) -> &ComplexVector {
        &self.true_soi_sv
    }

    pub fn true_soi_power(&self) -> f64 {
        self.true_soi_power
    }

    pub fn true_inc(&self) -> &HermitianMatrix {
        &self.true_inc
    }

    /// `10·log₁₀(σ₁² aᴴ R_{i+n}⁻¹ a)`, the SINR of the clairvoyant MVDR beamformer.
    pub fn optimal_sinr_db(&self) -> Result<f64> {
        let inv = hermitian_inverse(&self.true_inc, 0.0)?;
        Ok(10.0 * (self.true_soi_power * inv.quad_form(&self.true_soi_sv)).log10())
    }
}

/// `w = R⁻¹a / (aᴴR⁻¹a)`.
pub fn mvdr_weights(r_in: &HermitianMatrix, a: &ComplexVector, method: Method) -> Result<BeamformerWeights> {
    if a.len() != r_in.dim() {
        return Err(Error::Shape(format!("steering vector of length {} against dimension {}", a.len(), r_in.dim())));
    }
    if a.iter().all(|z| z.norm_sqr() == 0.0) {
        return Err(Error::InvalidInput("steering vector is zero".into()));
    }
    let inv = hermitian_inverse(r_in, 0.0)?;
    let ra = inv.matvec(a);
    let denom = dot_h(a, &ra);
    let w = ra.mapv(|z| z / denom);
    if w.iter().any(|z| !z.is_finite()) {
        return Err(Error::NonFinite("beamformer weights"));
    }
    Ok(BeamformerWeights { w, method, build_sv: a.clone() })
}

/// Output SINR in dB: `σ₁²|wᴴa₁|² / wᴴR_{i+n}w` with the true parameters.
pub fn output_sinr(w: &BeamformerWeights, ctx: &EvaluationContext) -> f64 {
    output_sinr_of(&w.w, ctx)
}

pub fn output_sinr_of(w: &ComplexVector, ctx: &EvaluationContext) -> f64 {
    let signal = ctx.true_soi_power * dot_h(w, &ctx.true_soi_sv).norm_sqr();
    let leak = ctx.true_inc.quad_form(w);
    10.0 * (signal / leak).log10()
}

/// Clairvoyant beamformer built from the true covariance and steering vector.
pub fn optimal_weights(ctx: &EvaluationContext) -> Result<BeamformerWeights> {
    mvdr_weights(&ctx.true_inc, &ctx.true_soi_sv, Method::Optimal)
}

/// Sample-matrix inversion: MVDR with the sample covariance and presumed SV.
pub fn smi_weights(r_hat: &HermitianMatrix, presumed_sv: &ComplexVector) -> Result<BeamformerWeights> {
    mvdr_weights(r_hat, presumed_sv, Method::Smi)
}

/// MVDR with `R̂ + loading·I` and the presumed SV.
pub fn dl_smi_weights(r_hat: &HermitianMatrix, presumed_sv: &ComplexVector, loading: f64) -> Result<BeamformerWeights> {
    if !(loading >= 0.0) {
        return Err(Error::InvalidInput(format!("diagonal loading must be non-negative, got {loading}")));
    }
    mvdr_weights(&r_hat.add_identity(loading), presumed_sv, Method::DlSmi)
}

/// `Σ a(θ)a(θ)ᴴ / (a(θ)ᴴR̂⁻¹a(θ)) · Δθ` over the grid (Capon-weighted sum, Δθ in radians).
pub fn capon_reconstruction(r_hat: &HermitianMatrix, geom: &ArrayGeometry, grid: &AngularGrid) -> Result<HermitianMatrix> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let r_inv = hermitian_inverse(r_hat, 0.0)?;
    let dtheta = grid.delta_rad();
    let mut acc = HermitianMatrix::zeros(geom.num_sensors());
    for a in grid.steering_vectors(geom) {
        acc.add_outer(&a, capon_spectrum(&r_inv, &a)? * dtheta);
    }
    Ok(acc)
}

/// INC-EST baseline: MVDR with the Capon-reconstructed covariance and the presumed SV.
pub fn capon_reconstruction_weights(
    r_hat: &HermitianMatrix,
    geom: &ArrayGeometry,
    complement_grid: &AngularGrid,
    presumed_sv: &ComplexVector,
) -> Result<BeamformerWeights> {
    let r_in = capon_reconstruction(r_hat, geom, complement_grid)?;
    mvdr_weights(&r_in, presumed_sv, Method::IncEst)
}
