//! Reference solvers and random generators shared by the integration tests.
//! Nothing here calls into the matching solver.

#![allow(dead_code)]

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use rab_core::array::{steering_vector, ArrayGeometry};
use rab_core::numerics::{psd_project, ComplexVector, HermitianMatrix};
use rab_core::spectrum_match::MatchProblem;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn gaussian_vector(rng: &mut ChaCha8Rng, n: usize) -> ComplexVector {
    Array1::from_shape_fn(n, |_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// Columns of a Haar-ish random unitary by Gram-Schmidt on Gaussian vectors.
pub fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> Vec<ComplexVector> {
    let mut basis: Vec<ComplexVector> = Vec::with_capacity(n);
    while basis.len() < n {
        let mut v = gaussian_vector(rng, n);
        for u in &basis {
            let c: Complex64 = u.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
            v = &v - &u.mapv(|z| z * c);
        }
        let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nrm > 1e-6 {
            basis.push(v.mapv(|z| z / nrm));
        }
    }
    basis
}

/// `Σ λ_i u_i u_iᴴ` for a random orthonormal basis.
pub fn with_spectrum(rng: &mut ChaCha8Rng, values: &[f64]) -> (HermitianMatrix, Vec<ComplexVector>) {
    let n = values.len();
    let u = random_unitary(rng, n);
    let mut a = HermitianMatrix::zeros(n);
    for (v, &l) in u.iter().zip(values) {
        a.add_outer(v, l);
    }
    (a, u)
}

/// `‖u − e^{jφ} v‖` minimized over φ.
pub fn phase_aligned_distance(u: &ComplexVector, v: &ComplexVector) -> f64 {
    let c: Complex64 = v.iter().zip(u.iter()).map(|(a, b)| a.conj() * b).sum();
    let phase = if c.norm() > 0.0 { c / c.norm() } else { Complex64::new(1.0, 0.0) };
    u.iter().zip(v.iter()).map(|(a, b)| (a - b * phase).norm_sqr()).sum::<f64>().sqrt()
}

pub fn columns(geom: &ArrayGeometry, angles: &[f64]) -> Array2<Complex64> {
    let mut out = Array2::zeros((geom.num_sensors(), angles.len()));
    for (j, &t) in angles.iter().enumerate() {
        out.column_mut(j).assign(&steering_vector(geom, t));
    }
    out
}

fn quad(d: &Array2<Complex64>, v: ndarray::ArrayView1<Complex64>) -> f64 {
    let dv = d.dot(&v);
    v.iter().zip(dv.iter()).map(|(a, b)| (a.conj() * b).re).sum()
}

/// Squared objective and constraint norm of a dense matrix.
fn residuals(p: &MatchProblem, d: &Array2<Complex64>) -> (f64, f64) {
    let obj: f64 = p.target.iter().enumerate().map(|(j, t)| (quad(d, p.v_s.column(j)) - 1.0 / t).powi(2)).sum();
    let con: f64 = (0..p.y_s.ncols()).map(|i| (quad(d, p.y_s.column(i)) - p.noise_level).powi(2)).sum();
    (obj, con.sqrt())
}

/// Lower-triangular factor with real diagonal from `M²` reals.
fn factor_of(x: &[f64], m: usize) -> Array2<Complex64> {
    let mut l = Array2::zeros((m, m));
    let mut k = 0;
    for i in 0..m {
        l[(i, i)] = Complex64::new(x[k], 0.0);
        k += 1;
    }
    for i in 0..m {
        for j in 0..i {
            l[(i, j)] = Complex64::new(x[k], x[k + 1]);
            k += 2;
        }
    }
    l
}

pub fn gram_of(x: &[f64], m: usize) -> Array2<Complex64> {
    let l = factor_of(x, m);
    let lh = l.t().mapv(|z| z.conj());
    l.dot(&lh)
}

fn central_gradient(f: &dyn Fn(&[f64]) -> f64, x: &[f64]) -> Vec<f64> {
    let mut g = vec![0.0; x.len()];
    let mut xp = x.to_vec();
    for i in 0..x.len() {
        let h = 1e-6 * x[i].abs().max(1.0);
        xp[i] = x[i] + h;
        let fp = f(&xp);
        xp[i] = x[i] - h;
        let fm = f(&xp);
        xp[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    g
}

/// BFGS with Armijo backtracking and finite-difference gradients.
pub fn bfgs(f: &dyn Fn(&[f64]) -> f64, x0: Vec<f64>, max_iters: usize) -> Vec<f64> {
    let n = x0.len();
    let mut x = x0;
    let mut fx = f(&x);
    let mut g = central_gradient(f, &x);
    let mut h = Array2::<f64>::eye(n);
    for _ in 0..max_iters {
        let gn = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if gn < 1e-14 * (1.0 + fx.abs()) {
            break;
        }
        let ga = Array1::from(g.clone());
        let mut dir = -h.dot(&ga);
        if dir.dot(&ga) >= 0.0 {
            h = Array2::eye(n);
            dir = -ga.clone();
        }
        let slope = dir.dot(&ga);
        let mut step = 1.0;
        let mut accepted = None;
        while step > 1e-16 {
            let xn: Vec<f64> = x.iter().zip(dir.iter()).map(|(a, d)| a + step * d).collect();
            let fn_ = f(&xn);
            if fn_ <= fx + 1e-4 * step * slope {
                accepted = Some((xn, fn_));
                break;
            }
            step *= 0.5;
        }
        let Some((xn, fn_)) = accepted else { break };
        let gn_vec = central_gradient(f, &xn);
        let s = Array1::from_iter(xn.iter().zip(&x).map(|(a, b)| a - b));
        let y = Array1::from_iter(gn_vec.iter().zip(&g).map(|(a, b)| a - b));
        let sy = s.dot(&y);
        let improved = fx - fn_;
        x = xn;
        fx = fn_;
        g = gn_vec;
        if sy > 1e-300 {
            let rho = 1.0 / sy;
            let hy = h.dot(&y);
            let yhy = y.dot(&hy);
            for i in 0..n {
                for j in 0..n {
                    h[(i, j)] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
                }
            }
        }
        if improved <= 1e-18 * (1.0 + fx.abs()) && step < 1e-8 {
            break;
        }
    }
    x
}

/// Objective of the matching program found by minimizing
/// `‖fit‖² + μ·max(0, ‖noise‖ − ζ)²` over `D = LLᴴ` for an increasing penalty
/// sequence. The returned value is evaluated at the final iterate and is
/// accompanied by its constraint norm.
pub fn penalty_continuation_oracle(p: &MatchProblem) -> (f64, f64) {
    let m = p.num_sensors();
    let scale = p.noise_level / m as f64;
    let mut x: Vec<f64> = (0..m * m).map(|k| if k < m { scale.sqrt() } else { 0.0 }).collect();
    let norm = p.target.iter().map(|t| 1.0 / (t * t)).sum::<f64>();
    for stage in 0..14 {
        let mu = 10f64.powi(stage) / (p.zeta * p.zeta).max(1e-300) * norm;
        let f = |z: &[f64]| {
            let (obj, con) = residuals(p, &gram_of(z, m));
            obj + mu * (con - p.zeta).max(0.0).powi(2)
        };
        x = bfgs(&f, x, 2000);
    }
    let (obj, con) = residuals(p, &gram_of(&x, m));
    (obj.sqrt(), con)
}

/// Accelerated projected gradient for `min ‖diag(VᴴDV) − 1/target‖²` over
/// `D ⪰ 0`, ignoring the noise constraint.
pub fn projected_gradient_oracle(p: &MatchProblem, iters: usize) -> (HermitianMatrix, f64) {
    let m = p.num_sensors();
    let g = p.v_s.ncols();
    let lipschitz: f64 = 2.0 * (0..g).map(|j| p.v_s.column(j).iter().map(|z| z.norm_sqr()).sum::<f64>().powi(2)).sum::<f64>();
    let step = 1.0 / lipschitz;
    let gradient = |d: &HermitianMatrix| {
        let mut grad = HermitianMatrix::zeros(m);
        for (j, t) in p.target.iter().enumerate() {
            let v = p.v_s.column(j).to_owned();
            grad.add_outer(&v, 2.0 * (d.quad_form(&v) - 1.0 / t));
        }
        grad
    };
    let mut x = HermitianMatrix::zeros(m);
    let mut y = x.clone();
    let mut t_k = 1.0f64;
    let mut best = (x.clone(), p.objective(&x));
    for _ in 0..iters {
        let next = psd_project(&y.sub(&gradient(&y).scale(step))).expect("finite iterate");
        let t_next = (1.0 + (1.0 + 4.0 * t_k * t_k).sqrt()) / 2.0;
        let obj = p.objective(&next);
        if obj > best.1 {
            // restart momentum
            t_k = 1.0;
            y = next.clone();
        } else {
            y = next.add(&next.sub(&x).scale((t_k - 1.0) / t_next));
            t_k = t_next;
        }
        if obj < best.1 {
            best = (next.clone(), obj);
        }
        x = next;
    }
    best
}

/// Matching program whose targets come from a known feasible `D* = R*⁻¹`.
pub fn planted_instance(seed: u64) -> (MatchProblem, HermitianMatrix) {
    use rab_core::array::{theoretical_covariance, SourceSpec};
    use rab_core::numerics::hermitian_inverse;
    use rab_core::spectrum::{AngularGrid, AngularSector};
    use rand::SeedableRng;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = [4, 6, 8, 10][(seed % 4) as usize];
    let geom = ArrayGeometry::ula(m, 0.5).unwrap();
    let center: f64 = rng.random_range(-40.0..40.0);
    let sector = AngularSector::around(center, 5.0).unwrap();
    let mut sources = vec![SourceSpec::soi(center + rng.random_range(-4.0..4.0), 10f64.powf(rng.random_range(0.0..2.0)))];
    for _ in 0..rng.random_range(1..=2) {
        let side = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let doa = (center + side * rng.random_range(15.0..40.0)).clamp(-85.0, 85.0);
        sources.push(SourceSpec::interferer(doa, 10f64.powf(rng.random_range(1.0..3.0))));
    }
    let d_star = hermitian_inverse(&theoretical_covariance(&geom, &sources, 1.0, true), 0.0).unwrap();
    let soi = AngularGrid::over_sector(&sector, 0.5).unwrap();
    let comp = AngularGrid::complement_uniform(150, &[sector]).unwrap();
    let v_s = columns(&geom, soi.angles_deg());
    let y_s = columns(&geom, comp.angles_deg());
    let target = (0..v_s.ncols()).map(|j| 1.0 / d_star.quad_form(&v_s.column(j).to_owned())).collect();
    let mut p = MatchProblem { v_s, y_s, target, noise_level: m as f64, zeta: 1.0, initial: None };
    p.zeta = 1.1 * p.constraint_norm(&d_star);
    (p, d_star)
}

/// Three sensors with four sector and four complement directions.
pub fn tiny_instance(seed: u64) -> MatchProblem {
    use rab_core::array::{theoretical_covariance, SourceSpec};
    use rab_core::numerics::hermitian_inverse;
    use rab_core::spectrum::{capon_spectrum, AngularGrid, AngularSector};
    use rand::SeedableRng;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let geom = ArrayGeometry::ula(3, 0.5).unwrap();
    let center: f64 = rng.random_range(-30.0..30.0);
    let sector = AngularSector::around(center, 5.0).unwrap();
    let side = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    let sources = [
        SourceSpec::soi(center + rng.random_range(-4.0..4.0), 10f64.powf(rng.random_range(0.0..1.5))),
        SourceSpec::interferer(center + side * rng.random_range(20.0..50.0), 10f64.powf(rng.random_range(1.0..2.0))),
    ];
    let r_inv = hermitian_inverse(&theoretical_covariance(&geom, &sources, 1.0, true), 0.0).unwrap();
    let angles: Vec<f64> = [-4.5, -1.5, 1.5, 4.5].iter().map(|o| center + o).collect();
    let comp = AngularGrid::complement_uniform(4, &[sector]).unwrap();
    let v_s = columns(&geom, &angles);
    let y_s = columns(&geom, comp.angles_deg());
    let target = (0..4).map(|j| capon_spectrum(&r_inv, &v_s.column(j).to_owned()).unwrap()).collect();
    let noise_level = 3.0 / rng.random_range(0.8..1.25);
    let zeta = rng.random_range(0.05..0.3) * 2.0 * noise_level;
    MatchProblem { v_s, y_s, target, noise_level, zeta, initial: Some(r_inv) }
}

/// Random positive targets over scattered directions, `M = 4`.
pub fn unconstrained_instance(seed: u64) -> MatchProblem {
    use rab_core::spectrum::{AngularGrid, AngularSector};
    use rand::SeedableRng;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let geom = ArrayGeometry::ula(4, 0.5).unwrap();
    let angles: Vec<f64> = (0..21).map(|_| rng.random_range(-60.0..60.0)).collect();
    let comp = AngularGrid::complement_uniform(150, &[AngularSector::around(0.0, 5.0).unwrap()]).unwrap();
    let target = (0..21).map(|_| 1.0 / rng.random_range(0.5..8.0)).collect();
    MatchProblem {
        v_s: columns(&geom, &angles),
        y_s: columns(&geom, comp.angles_deg()),
        target,
        noise_level: 4.0,
        zeta: 1e6,
        initial: None,
    }
}
