//! Angular bookkeeping and spatial power spectra.
//!
//! Two spectra are used throughout: the maximum-entropy (MEM) spectrum built from
//! the first column of `R⁻¹`, and the Capon spectrum `1/(aᴴ R⁻¹ a)`. Both scale
//! linearly with the covariance and return `σ_n²` resp. `σ_n²/M` for white noise.

use serde::{Deserialize, Serialize};

use crate::array::{steering_vector, ArrayGeometry};
use crate::error::{Error, Result};
use crate::numerics::{ComplexVector, HermitianMatrix};

/// Below this modulus a spectrum denominator is treated as zero.
pub const SPECTRUM_FLOOR: f64 = 1e-14;

/// Closed angular interval `[lo_deg, hi_deg]` inside [-90, 90].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngularSector {
    pub lo_deg: f64,
    pub hi_deg: f64,
}

impl AngularSector {
    pub fn new(lo_deg: f64, hi_deg: f64) -> Result<Self> {
        if !(-90.0 <= lo_deg && lo_deg < hi_deg && hi_deg <= 90.0) {
            return Err(Error::InvalidInput(format!("invalid sector [{lo_deg}, {hi_deg}]")));
        }
        Ok(Self { lo_deg, hi_deg })
    }

    /// `[center - halfwidth, center + halfwidth]`, clipped to [-90, 90].
    pub fn around(center_deg: f64, halfwidth_deg: f64) -> Result<Self> {
        Self::new((center_deg - halfwidth_deg).max(-90.0), (center_deg + halfwidth_deg).min(90.0))
    }

    pub fn contains(&self, theta_deg: f64) -> bool {
        theta_deg >= self.lo_deg && theta_deg <= self.hi_deg
    }

    pub fn width_deg(&self) -> f64 {
        self.hi_deg - self.lo_deg
    }

    pub fn overlaps(&self, other: &AngularSector) -> bool {
        self.lo_deg <= other.hi_deg && other.lo_deg <= self.hi_deg
    }
}

/// Sampling points in degrees plus the quadrature spacing.
///
/// Within each contiguous run the spacing is `delta_deg`; a grid covering a
/// union of intervals jumps over the excluded parts.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularGrid {
    angles_deg: Vec<f64>,
    delta_deg: f64,
}

impl AngularGrid {
    pub fn new(angles_deg: Vec<f64>, delta_deg: f64) -> Result<Self> {
        if angles_deg.is_empty() {
            return Err(Error::EmptyGrid);
        }
        if !(delta_deg > 0.0) {
            return Err(Error::InvalidInput(format!("grid spacing must be positive, got {delta_deg}")));
        }
        for w in angles_deg.windows(2) {
            let gap = w[1] - w[0];
            if gap < delta_deg - 1e-9 {
                return Err(Error::InvalidInput(format!(
                    "grid gap {gap} smaller than spacing {delta_deg}"
                )));
            }
        }
        if angles_deg.iter().any(|t| !(-90.0..=90.0).contains(t)) {
            return Err(Error::InvalidInput("grid angle outside [-90, 90]".into()));
        }
        Ok(Self { angles_deg, delta_deg })
    }

    /// `lo, lo + step, ...` up to and including `hi` (within 1e-9).
    pub fn over_sector(sector: &AngularSector, step_deg: f64) -> Result<Self> {
        if !(step_deg > 0.0) {
            return Err(Error::InvalidInput(format!("grid step must be positive, got {step_deg}")));
        }
        let n = ((sector.width_deg() + 1e-9) / step_deg).floor() as usize;
        let angles = (0..=n).map(|i| sector.lo_deg + i as f64 * step_deg).collect();
        Self::new(angles, step_deg)
    }

    /// Points of the lattice `-90 + i·step` over [-90, 90] lying outside every
    /// (closed) excluded sector.
    pub fn excluding(step_deg: f64, excluded: &[AngularSector]) -> Result<Self> {
        let full = AngularSector::new(-90.0, 90.0)?;
        let base = Self::over_sector(&full, step_deg)?;
        let angles: Vec<f64> = base
            .angles_deg
            .into_iter()
            .filter(|&t| !excluded.iter().any(|s| s.contains(t)))
            .collect();
        if angles.is_empty() {
            return Err(Error::EmptyGrid);
        }
        Self::new(angles, step_deg)
    }

    /// `count` points evenly spread over [-90, 90] minus the excluded sectors,
    /// placed at cell midpoints so none falls on a sector edge.
    pub fn complement_uniform(count: usize, excluded: &[AngularSector]) -> Result<Self> {
        if count == 0 {
            return Err(Error::EmptyGrid);
        }
        let runs = complement_intervals(excluded);
        let total: f64 = runs.iter().map(|(a, b)| b - a).sum();
        if !(total > 0.0) {
            return Err(Error::EmptyGrid);
        }
        let delta = total / count as f64;
        let mut angles = Vec::with_capacity(count);
        let mut run = 0;
        let mut offset = 0.0;
        for i in 0..count {
            let s = (i as f64 + 0.5) * delta;
            while s > offset + (runs[run].1 - runs[run].0) {
                offset += runs[run].1 - runs[run].0;
                run += 1;
            }
            angles.push(runs[run].0 + (s - offset));
        }
        Self::new(angles, delta)
    }

    pub fn angles_deg(&self) -> &[f64] {
        &self.angles_deg
    }

    pub fn len(&self) -> usize {
        self.angles_deg.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles_deg.is_empty()
    }

    pub fn delta_deg(&self) -> f64 {
        self.delta_deg
    }

    /// Quadrature weight in radians.
    pub fn delta_rad(&self) -> f64 {
        self.delta_deg.to_radians()
    }

    pub fn steering_vectors(&self, geom: &ArrayGeometry) -> Vec<ComplexVector> {
        self.angles_deg.iter().map(|&t| steering_vector(geom, t)).collect()
    }
}

/// Sorted, merged open complement of `excluded` inside [-90, 90].
fn complement_intervals(excluded: &[AngularSector]) -> Vec<(f64, f64)> {
    let mut ex: Vec<(f64, f64)> = excluded.iter().map(|s| (s.lo_deg, s.hi_deg)).collect();
    ex.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out = Vec::new();
    let mut cursor = -90.0;
    for (lo, hi) in ex {
        if lo > cursor {
            out.push((cursor, lo));
        }
        cursor = f64::max(cursor, hi);
    }
    if cursor < 90.0 {
        out.push((cursor, 90.0));
    }
    out
}

/// Maximum-entropy spectrum `1/(ε_p |aᴴ R⁻¹ b₁|²)` with `ε_p = 1/(b₁ᵀ R⁻¹ b₁)`.
pub fn mem_spectrum(r_inv: &HermitianMatrix, a: &ComplexVector) -> Result<f64> {
    let m = r_inv.dim();
    let mut proj = num_complex::Complex64::new(0.0, 0.0);
    for i in 0..m {
        proj += a[i].conj() * r_inv.get(i, 0);
    }
    let mag = proj.norm();
    if mag < SPECTRUM_FLOOR {
        return Err(Error::DegenerateSpectrum { value: mag });
    }
    Ok(r_inv.get(0, 0).re / (mag * mag))
}

/// Capon (minimum-variance) spectrum `1/(aᴴ R⁻¹ a)`.
pub fn capon_spectrum(r_inv: &HermitianMatrix, a: &ComplexVector) -> Result<f64> {
    let q = r_inv.quad_form(a);
    if q.abs() < SPECTRUM_FLOOR {
        return Err(Error::DegenerateSpectrum { value: q });
    }
    Ok(1.0 / q)
}

/// Noise power as the average MEM spectrum over the noise-only grid.
pub fn estimate_noise_power(r_inv: &HermitianMatrix, geom: &ArrayGeometry, noise_grid: &AngularGrid) -> Result<f64> {
    if noise_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let mut acc = 0.0;
    for &t in noise_grid.angles_deg() {
        acc += mem_spectrum(r_inv, &steering_vector(geom, t))?;
    }
    Ok(acc / noise_grid.len() as f64)
}
