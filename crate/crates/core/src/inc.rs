//! Interference-plus-noise covariance reconstruction.
//!
//! Each interferer gets its own MEM-weighted steering-vector sum over a narrow
//! sector; the dominant eigenpair of that matrix, found with a few power
//! iterations, gives the interferer's power and steering vector. The final
//! matrix adds the white-noise floor estimated from the noise-only directions.

use ndarray::Array1;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::array::ArrayGeometry;
use crate::error::{Error, Result};
use crate::numerics::{inf_norm, norm2, normalize_phase, ComplexVector, HermitianMatrix};
use crate::spectrum::{mem_spectrum, AngularGrid, AngularSector};

/// Iterates whose ∞-norm drops below this are treated as vanished.
const ZERO_ITERATE: f64 = 1e-300;

/// Power iterations used by default.
pub const DEFAULT_POWER_ITERS: usize = 4;

#[derive(Debug, Clone)]
pub struct PowerMethodResult {
    /// Rayleigh-quotient estimate of the dominant eigenvalue.
    pub eigenvalue: f64,
    /// Final iterate, unit 2-norm.
    pub eigenvector: ComplexVector,
    /// `‖A v − λ v‖₂`.
    pub residual: f64,
    pub iterations: usize,
}

/// Power method from the all-ones start vector.
pub fn power_method(a: &HermitianMatrix, k_iters: usize) -> Result<PowerMethodResult> {
    let v0 = Array1::from_elem(a.dim(), Complex64::new(1.0, 0.0));
    power_method_from(a, &v0, k_iters)
}

/// `v_k = A v̄_{k-1}`, `m_k = ‖v_k‖∞`, `v̄_k = v_k / m_k`, for `k_iters` steps.
pub fn power_method_from(a: &HermitianMatrix, v0: &ComplexVector, k_iters: usize) -> Result<PowerMethodResult> {
    if k_iters == 0 {
        return Err(Error::InvalidInput("power method needs at least one iteration".into()));
    }
    if v0.len() != a.dim() {
        return Err(Error::Shape(format!("start vector length {} vs matrix {}", v0.len(), a.dim())));
    }
    let mut v_bar = v0.clone();
    for k in 1..=k_iters {
        let v = a.matvec(&v_bar);
        let m_k = inf_norm(&v);
        if !(m_k >= ZERO_ITERATE) {
            return Err(Error::ZeroIterate { iteration: k });
        }
        v_bar = v.mapv(|z| z / m_k);
    }
    let nrm = norm2(&v_bar);
    let u = v_bar.mapv(|z| z / nrm);
    let eigenvalue = a.quad_form(&u);
    let residual = norm2(&(a.matvec(&u) - u.mapv(|z| z * eigenvalue)));
    Ok(PowerMethodResult { eigenvalue, eigenvector: u, residual, iterations: k_iters })
}

/// Power and steering vector of one interferer, `σ̂² â âᴴ`.
#[derive(Debug, Clone)]
pub struct InterferenceEstimate {
    pub power: f64,
    /// Scaled so `‖sv‖² = M`; first nonzero entry real positive.
    pub sv: ComplexVector,
    pub sector: Option<AngularSector>,
    pub iterations_used: usize,
}

fn mem_weighted_sum(r_inv: &HermitianMatrix, geom: &ArrayGeometry, grid: &AngularGrid) -> Result<HermitianMatrix> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let d = grid.delta_rad();
    let mut c = HermitianMatrix::zeros(geom.num_sensors());
    for a in grid.steering_vectors(geom) {
        let p = mem_spectrum(r_inv, &a)?;
        c.add_outer(&a, p * d);
    }
    Ok(c)
}

/// `Ĉ_l = Σ_j P̂(θ_j) a(θ_j) a(θ_j)ᴴ Δθ` over one interferer's sector grid.
pub fn build_interference_matrix(
    r_inv: &HermitianMatrix,
    geom: &ArrayGeometry,
    sector_grid: &AngularGrid,
) -> Result<HermitianMatrix> {
    mem_weighted_sum(r_inv, geom, sector_grid)
}

/// Reference reconstruction that integrates the MEM spectrum over the whole
/// interference-plus-noise region instead of per-interferer sectors.
pub fn full_sector_inc(r_inv: &HermitianMatrix, geom: &ArrayGeometry, grid: &AngularGrid) -> Result<HermitianMatrix> {
    mem_weighted_sum(r_inv, geom, grid)
}

/// Dominant eigenpair of `Ĉ_l` split as `σ̂² = λ₁/M`, `‖â‖² = M`.
///
/// If the all-ones start is orthogonal to the range of `Ĉ_l` the iteration is
/// restarted once from a fixed pseudo-random vector.
pub fn extract_interference(c: &HermitianMatrix, k_iters: usize) -> Result<InterferenceEstimate> {
    let pm = match power_method(c, k_iters) {
        Err(Error::ZeroIterate { .. }) => {
            let mut rng = ChaCha8Rng::seed_from_u64(0x9e37_79b9_7f4a_7c15);
            let v0: ComplexVector = (0..c.dim())
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            power_method_from(c, &v0, k_iters)?
        }
        other => other?,
    };
    let m = c.dim() as f64;
    let sv = normalize_phase(&pm.eigenvector).mapv(|z| z * m.sqrt());
    Ok(InterferenceEstimate {
        power: pm.eigenvalue / m,
        sv,
        sector: None,
        iterations_used: pm.iterations,
    })
}

/// `Σ σ̂_l² â_l â_lᴴ + σ̂_n² I`.
pub fn assemble_inc(interferences: &[InterferenceEstimate], noise_power: f64, m: usize) -> Result<HermitianMatrix> {
    if !(noise_power > 0.0) {
        return Err(Error::InvalidInput(format!("noise power must be positive, got {noise_power}")));
    }
    let mut r = HermitianMatrix::scaled_identity(m, noise_power);
    for est in interferences {
        if est.sv.len() != m {
            return Err(Error::Shape(format!("steering vector length {} vs M = {m}", est.sv.len())));
        }
        r.add_outer(&est.sv, est.power);
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::{steering_vector, theoretical_covariance, SourceSpec};
    use crate::numerics::{dot_h, hermitian_eig, hermitian_inverse, min_eigenvalue, norm2};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_psd_with_spectrum(eigs: &[f64], rng: &mut ChaCha8Rng) -> HermitianMatrix {
        // Orthonormalize a random complex basis (Gram-Schmidt) and assemble Σ λ u uᴴ.
        let n = eigs.len();
        let mut basis: Vec<ComplexVector> = Vec::new();
        while basis.len() < n {
            let mut v: ComplexVector =
                (0..n).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
            for u in &basis {
                let p = dot_h(u, &v);
                v = &v - &u.mapv(|z| z * p);
            }
            let nv = norm2(&v);
            if nv > 1e-3 {
                basis.push(v.mapv(|z| z / nv));
            }
        }
        let mut a = HermitianMatrix::zeros(n);
        for (l, u) in eigs.iter().zip(&basis) {
            a.add_outer(u, *l);
        }
        a
    }

    #[test]
    fn rank_one_is_exact_after_one_step() {
        let a: ComplexVector = (0..6).map(|k| Complex64::from_polar(1.0, 0.9 * k as f64)).collect();
        let mat = HermitianMatrix::outer(&a, 3.0);
        for k in [1, 2, 4] {
            let pm = power_method(&mat, k).unwrap();
            assert!((pm.eigenvalue - 18.0).abs() < 1e-12);
            let overlap = dot_h(&pm.eigenvector, &a).norm() / norm2(&a);
            assert!((overlap - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_is_a_fixed_point() {
        let pm = power_method(&HermitianMatrix::identity(5), 4).unwrap();
        assert!((pm.eigenvalue - 1.0).abs() < 1e-15);
        for z in pm.eigenvector.iter() {
            assert!((z - c(1.0 / 5f64.sqrt(), 0.0)).norm() < 1e-15);
        }
        assert!(pm.residual < 1e-15);
    }

    #[test]
    fn matches_jacobi_on_gapped_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let a = random_psd_with_spectrum(&[10.0, 4.0, 2.0, 1.0, 0.5, 0.1], &mut rng);
        let pm = power_method(&a, 50).unwrap();
        let eig = hermitian_eig(&a).unwrap();
        assert!((pm.eigenvalue - eig.values[0]).abs() < 1e-8);
        assert!((dot_h(&pm.eigenvector, &eig.vectors[0]).norm() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn zero_iterate_is_reported() {
        // All-ones is orthogonal to [1, -1].
        let v = ComplexVector::from(vec![c(1.0, 0.0), c(-1.0, 0.0)]);
        let a = HermitianMatrix::outer(&v, 1.0);
        assert!(matches!(power_method(&a, 3), Err(Error::ZeroIterate { iteration: 1 })));
        let est = extract_interference(&a, 3).unwrap();
        assert!((est.power - 1.0).abs() < 1e-12);
        assert!((dot_h(&est.sv, &v).norm() - 2.0).abs() < 1e-12);
        assert!(matches!(extract_interference(&HermitianMatrix::zeros(3), 3), Err(Error::ZeroIterate { .. })));
    }

    #[test]
    fn rejects_zero_iterations() {
        assert!(power_method(&HermitianMatrix::identity(2), 0).is_err());
    }

    #[test]
    fn extract_rank_one_and_identity() {
        let a: ComplexVector = (0..8).map(|k| Complex64::from_polar(1.0, -0.4 * k as f64)).collect();
        let est = extract_interference(&HermitianMatrix::outer(&a, 5.0), 4).unwrap();
        assert!((est.power - 5.0).abs() < 1e-12);
        assert!((dot_h(&est.sv, &a).norm() - 8.0).abs() < 1e-10);
        assert!((norm2(&est.sv).powi(2) - 8.0).abs() < 1e-9);

        let est = extract_interference(&HermitianMatrix::identity(4), 4).unwrap();
        assert!((est.power - 0.25).abs() < 1e-15);
        for z in est.sv.iter() {
            assert!((z - c(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn extracted_sv_has_positive_real_first_entry() {
        let a: ComplexVector = (0..5).map(|k| Complex64::from_polar(1.0, 1.0 + 0.7 * k as f64)).collect();
        let est = extract_interference(&HermitianMatrix::outer(&a, 2.0), 4).unwrap();
        assert!(est.sv[0].im.abs() < 1e-12 && est.sv[0].re > 0.0);
    }

    #[test]
    fn single_point_grid_is_rank_one() {
        let g = ArrayGeometry::ula(6, 0.5).unwrap();
        let r = theoretical_covariance(&g, &[SourceSpec::soi(20.0, 10.0)], 1.0, true);
        let r_inv = hermitian_inverse(&r, 0.0).unwrap();
        let grid = AngularGrid::new(vec![-30.0], 0.2).unwrap();
        let cm = build_interference_matrix(&r_inv, &g, &grid).unwrap();
        let a = steering_vector(&g, -30.0);
        let p = mem_spectrum(&r_inv, &a).unwrap();
        let want = HermitianMatrix::outer(&a, p * 0.2f64.to_radians());
        assert!(cm.sub(&want).frobenius_norm() < 1e-12 * want.frobenius_norm());
        let eig = hermitian_eig(&cm).unwrap();
        assert!(eig.values[1].abs() < 1e-10 * eig.values[0]);
    }

    #[test]
    fn identity_covariance_gives_flat_weighting() {
        let g = ArrayGeometry::ula(4, 0.5).unwrap();
        let grid = AngularGrid::over_sector(&AngularSector::around(0.0, 2.0).unwrap(), 1.0).unwrap();
        let cm = build_interference_matrix(&HermitianMatrix::identity(4), &g, &grid).unwrap();
        let mut want = HermitianMatrix::zeros(4);
        for a in grid.steering_vectors(&g) {
            want.add_outer(&a, 1f64.to_radians());
        }
        assert!(cm.sub(&want).frobenius_norm() < 1e-12);
    }

    #[test]
    fn full_sector_sum_decomposes_over_partitions() {
        let g = ArrayGeometry::ula(8, 0.5).unwrap();
        let r = theoretical_covariance(
            &g,
            &[SourceSpec::soi(10.0, 10.0), SourceSpec::interferer(-40.0, 100.0)],
            1.0,
            true,
        );
        let r_inv = hermitian_inverse(&r, 0.0).unwrap();
        let left = AngularGrid::new((0..20).map(|i| -60.0 + i as f64).collect(), 1.0).unwrap();
        let right = AngularGrid::new((20..40).map(|i| -60.0 + i as f64).collect(), 1.0).unwrap();
        let whole = AngularGrid::new((0..40).map(|i| -60.0 + i as f64).collect(), 1.0).unwrap();
        let sum = build_interference_matrix(&r_inv, &g, &left)
            .unwrap()
            .add(&build_interference_matrix(&r_inv, &g, &right).unwrap());
        let full = full_sector_inc(&r_inv, &g, &whole).unwrap();
        assert!(full.sub(&sum).frobenius_norm() <= 1e-12 * full.frobenius_norm());
    }

    #[test]
    fn assemble_examples() {
        let r = assemble_inc(&[], 1.0, 5).unwrap();
        assert_eq!(r, HermitianMatrix::identity(5));
        let a: ComplexVector = (0..5).map(|k| Complex64::from_polar(1.0, 0.3 * k as f64)).collect();
        let est = InterferenceEstimate { power: 7.0, sv: a, sector: None, iterations_used: 4 };
        let r = assemble_inc(&[est], 0.5, 5).unwrap();
        assert!((r.trace() - (7.0 * 5.0 + 0.5 * 5.0)).abs() < 1e-12);
        assert!(min_eigenvalue(&r).unwrap() >= 0.5 - 1e-10);
        assert!(assemble_inc(&[], 0.0, 5).is_err());
    }

    #[test]
    fn rank_one_approximation_error_is_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let eigs = [50.0, rng.random_range(0.0..5.0), rng.random_range(0.0..1.0), 0.01];
            let cm = random_psd_with_spectrum(&eigs, &mut rng);
            let est = extract_interference(&cm, 4).unwrap();
            let approx = HermitianMatrix::outer(&est.sv, est.power);
            let lam2 = hermitian_eig(&cm).unwrap().values[1];
            assert!(cm.sub(&approx).frobenius_norm() <= lam2 * 4f64.sqrt() + 1e-8);
        }
    }

    #[test]
    fn angle_to_dominant_contracts_geometrically() {
        // tan∠(v_k, u₁) ≤ (λ₂/λ₁)^k · tan∠(v₀, u₁) for PSD input.
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..100 {
            let n = rng.random_range(2..=8);
            let mut eigs: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
            eigs[0] = 2.0 + rng.random_range(0.0..3.0);
            let m = random_psd_with_spectrum(&eigs, &mut rng);
            let oracle = hermitian_eig(&m).unwrap();
            let u1 = oracle.vectors[0].clone();
            let ratio = oracle.values[1] / oracle.values[0];
            let tan = |v: &ComplexVector| {
                let c = dot_h(&u1, v).norm() / norm2(v);
                (1.0 - c * c).max(0.0).sqrt() / c
            };
            let tan0 = tan(&ComplexVector::from_elem(n, c(1.0, 0.0)));
            for k in 1..=12 {
                let got = tan(&power_method(&m, k).unwrap().eigenvector);
                let bound = ratio.powi(k as i32) * tan0;
                assert!(got <= bound * (1.0 + 1e-9) + 1e-7, "k={k}: {got} > {bound}");
            }
        }
    }
}
