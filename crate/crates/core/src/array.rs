//! Linear-array signal model: steering vectors, geometry perturbation,
//! snapshot synthesis and covariance matrices.

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{ComplexVector, HermitianMatrix};

/// Sensor positions along the array axis, in wavelengths.
///
/// The first sensor sits at 0 and is the phase reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrayGeometry {
    positions: Vec<f64>,
}

impl ArrayGeometry {
    pub fn new(positions: Vec<f64>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::InvalidInput("array needs at least one sensor".into()));
        }
        if positions[0] != 0.0 {
            return Err(Error::InvalidInput("first sensor must sit at position 0".into()));
        }
        if positions.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite("sensor position"));
        }
        if let Some(i) = positions.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::GeometryCollision { index: i + 1 });
        }
        Ok(Self { positions })
    }

    /// Uniform linear array with `spacing` wavelengths between neighbours.
    pub fn ula(num_sensors: usize, spacing: f64) -> Result<Self> {
        if !(spacing > 0.0) {
            return Err(Error::InvalidInput(format!("spacing must be positive, got {spacing}")));
        }
        Self::new((0..num_sensors).map(|m| m as f64 * spacing).collect())
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn num_sensors(&self) -> usize {
        self.positions.len()
    }
}

/// One narrowband plane-wave source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceSpec {
    pub doa_deg: f64,
    /// Linear power σ².
    pub power: f64,
    pub is_soi: bool,
}

impl SourceSpec {
    pub fn soi(doa_deg: f64, power: f64) -> Self {
        Self { doa_deg, power, is_soi: true }
    }

    pub fn interferer(doa_deg: f64, power: f64) -> Self {
        Self { doa_deg, power, is_soi: false }
    }
}

/// Checks the per-scenario source invariants: DoAs inside [-90, 90], nonnegative
/// powers, exactly one signal of interest.
pub fn validate_scenario(sources: &[SourceSpec]) -> Result<()> {
    for s in sources {
        check_angle(s.doa_deg)?;
        if !(s.power >= 0.0) {
            return Err(Error::InvalidInput(format!("source power must be >= 0, got {}", s.power)));
        }
    }
    match sources.iter().filter(|s| s.is_soi).count() {
        1 => Ok(()),
        n => Err(Error::InvalidInput(format!("expected exactly one SOI, found {n}"))),
    }
}

fn check_angle(theta_deg: f64) -> Result<()> {
    if !(-90.0..=90.0).contains(&theta_deg) {
        return Err(Error::InvalidInput(format!("angle {theta_deg} deg outside [-90, 90]")));
    }
    Ok(())
}

/// M x K block of array snapshots, one column per time instant.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotMatrix {
    data: Array2<Complex64>,
}

impl SnapshotMatrix {
    pub fn new(data: Array2<Complex64>) -> Result<Self> {
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(Error::Shape("snapshot matrix needs M >= 1 and K >= 1".into()));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("snapshot sample"));
        }
        Ok(Self { data })
    }

    pub fn num_sensors(&self) -> usize {
        self.data.nrows()
    }

    pub fn num_snapshots(&self) -> usize {
        self.data.ncols()
    }

    pub fn data(&self) -> &Array2<Complex64> {
        &self.data
    }
}

/// `a(θ)` with entries `exp(j·2π·p_m·sin θ)`.
///
/// Panics if `theta_deg` is outside [-90, 90].
pub fn steering_vector(geom: &ArrayGeometry, theta_deg: f64) -> ComplexVector {
    assert!(
        (-90.0..=90.0).contains(&theta_deg),
        "steering angle {theta_deg} deg outside [-90, 90]"
    );
    let s = theta_deg.to_radians().sin();
    geom.positions
        .iter()
        .map(|&p| Complex64::from_polar(1.0, 2.0 * PI * p * s))
        .collect()
}

/// Shifts every sensor except the reference by an independent uniform draw in
/// `[-max_shift, max_shift]` wavelengths.
pub fn perturb_geometry(nominal: &ArrayGeometry, max_shift: f64, seed: u64) -> Result<ArrayGeometry> {
    if !(max_shift >= 0.0) {
        return Err(Error::InvalidInput(format!("max_shift must be >= 0, got {max_shift}")));
    }
    if max_shift == 0.0 {
        return Ok(nominal.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut positions = nominal.positions.clone();
    for p in positions.iter_mut().skip(1) {
        *p += rng.random_range(-max_shift..=max_shift);
    }
    ArrayGeometry::new(positions)
}

fn complex_gaussian(rng: &mut ChaCha8Rng, std: f64) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * (std / 2f64.sqrt())
}

/// Draws `k` snapshots `x(k) = Σ_l s_l(k) a(θ_l) + n(k)` with independent
/// circular complex Gaussian waveforms and white noise of power `noise_power`.
pub fn synthesize_snapshots(
    geom: &ArrayGeometry,
    sources: &[SourceSpec],
    noise_power: f64,
    k: usize,
    seed: u64,
) -> Result<SnapshotMatrix> {
    if k == 0 {
        return Err(Error::InvalidInput("snapshot count must be >= 1".into()));
    }
    if !(noise_power >= 0.0) || sources.iter().any(|s| !(s.power >= 0.0)) {
        return Err(Error::InvalidInput("powers must be nonnegative".into()));
    }
    for s in sources {
        check_angle(s.doa_deg)?;
    }
    let m = geom.num_sensors();
    let svs: Vec<ComplexVector> = sources.iter().map(|s| steering_vector(geom, s.doa_deg)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = Array2::<Complex64>::zeros((m, k));
    let noise_std = noise_power.sqrt();
    for t in 0..k {
        for (src, a) in sources.iter().zip(&svs) {
            let amp = complex_gaussian(&mut rng, src.power.sqrt());
            for i in 0..m {
                data[(i, t)] += amp * a[i];
            }
        }
        for i in 0..m {
            data[(i, t)] += complex_gaussian(&mut rng, noise_std);
        }
    }
    SnapshotMatrix::new(data)
}

/// `(1/K) Σ x(k) x(k)ᴴ + ridge·I`.
pub fn sample_covariance(x: &SnapshotMatrix, ridge: f64) -> HermitianMatrix {
    let d = x.data();
    let k = d.ncols() as f64;
    let dh = d.t().mapv(|z| z.conj());
    let scm = HermitianMatrix::symmetrized(d.dot(&dh) / Complex64::new(k, 0.0));
    if ridge != 0.0 {
        scm.add_identity(ridge)
    } else {
        scm
    }
}

/// Ridge applied before inverting a sample covariance built from `k` snapshots:
/// `1e-8·trace/M` when `k < 2M`, zero otherwise.
pub fn default_ridge(scm: &HermitianMatrix, k: usize) -> f64 {
    let m = scm.dim();
    if k < 2 * m {
        1e-8 * scm.trace() / m as f64
    } else {
        0.0
    }
}

/// `Σ σ_l² a(θ_l) a(θ_l)ᴴ + σ_n² I`; the SOI term is skipped unless `include_soi`.
pub fn theoretical_covariance(
    geom: &ArrayGeometry,
    sources: &[SourceSpec],
    noise_power: f64,
    include_soi: bool,
) -> HermitianMatrix {
    let mut r = HermitianMatrix::scaled_identity(geom.num_sensors(), noise_power);
    for s in sources.iter().filter(|s| include_soi || !s.is_soi) {
        r.add_outer(&steering_vector(geom, s.doa_deg), s.power);
    }
    r
}
