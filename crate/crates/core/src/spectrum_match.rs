//! Desired-signal covariance reconstruction by spatial-spectrum matching.
//!
//! The unknown is `D = R_{s+n}⁻¹`. On the SOI sector the reciprocal spectrum
//! `a(ν)ᴴ D a(ν)` is fitted to the reciprocal Capon spectrum of the sample
//! covariance, while on the complementary directions it must stay within a
//! norm ball of radius ζ around the white-noise level:
//!
//! ```text
//! min  ‖diag(V_sᴴ D V_s) − diag(V_sᴴ R̂⁻¹ V_s)‖₂
//! s.t. ‖diag(Y_sᴴ D Y_s) − ℓ·1‖₂ ≤ ζ,   D ⪰ 0
//! ```
//!
//! The program is solved over the M² real coordinates of `D` by a log-barrier
//! path-following method: a second-order-cone epigraph for the objective, a
//! ball barrier for the noise constraint and `−log det D` for the PSD cone,
//! each centering stage run by damped Newton steps.

use ndarray::{s, Array1, Array2};
use num_complex::Complex64;

use crate::array::ArrayGeometry;
use crate::error::{Error, Result};
use crate::inc::power_method;
use crate::numerics::{cholesky, hermitian_inverse, normalize_phase, ComplexVector, HermitianMatrix};
use crate::spectrum::{capon_spectrum, AngularGrid};

/// Floor applied to the recovered SOI power.
pub const MIN_SOI_POWER: f64 = 1e-12;

/// Default ζ as a fraction of `√Q · ℓ` (10% average per-angle deviation).
pub const DEFAULT_ZETA_FRACTION: f64 = 0.1;

#[derive(Debug, Clone)]
pub struct MatchProblem {
    /// M x G steering vectors over the SOI sector.
    pub v_s: Array2<Complex64>,
    /// M x Q steering vectors over the complementary directions.
    pub y_s: Array2<Complex64>,
    /// Capon spectrum of the sample covariance at each SOI-sector angle.
    pub target: Vec<f64>,
    /// Reciprocal-spectrum level `ℓ` required on the complement.
    pub noise_level: f64,
    pub zeta: f64,
    /// Warm start, normally `R̂⁻¹`.
    pub initial: Option<HermitianMatrix>,
}

impl MatchProblem {
    pub fn num_sensors(&self) -> usize {
        self.v_s.nrows()
    }

    /// Objective of the spectrum match at `d`.
    pub fn objective(&self, d: &HermitianMatrix) -> f64 {
        self.target
            .iter()
            .enumerate()
            .map(|(j, t)| {
                let v = self.v_s.column(j).to_owned();
                (d.quad_form(&v) - 1.0 / t).powi(2)
            })
            .sum::<f64>()
            .sqrt()
    }

    /// `‖diag(Y_sᴴ D Y_s) − ℓ·1‖₂`.
    pub fn constraint_norm(&self, d: &HermitianMatrix) -> f64 {
        (0..self.y_s.ncols())
            .map(|i| {
                let y = self.y_s.column(i).to_owned();
                (d.quad_form(&y) - self.noise_level).powi(2)
            })
            .sum::<f64>()
            .sqrt()
    }

    fn validate(&self) -> Result<()> {
        let m = self.v_s.nrows();
        if self.v_s.ncols() == 0 || self.y_s.ncols() == 0 {
            return Err(Error::EmptyGrid);
        }
        if self.y_s.nrows() != m || self.target.len() != self.v_s.ncols() {
            return Err(Error::Shape("match problem dimensions disagree".into()));
        }
        if self.target.iter().any(|t| !(*t > 0.0)) {
            return Err(Error::InvalidInput("match targets must be positive".into()));
        }
        if !(self.noise_level > 0.0) || !(self.zeta > 0.0) {
            return Err(Error::InvalidInput("noise level and zeta must be positive".into()));
        }
        Ok(())
    }
}

/// Level `ℓ = M/σ̂_n²`: the reciprocal Capon spectrum of white noise with power σ̂_n².
pub fn noise_reciprocal_level(m: usize, sigma_n2: f64) -> f64 {
    m as f64 / sigma_n2
}

/// Default ζ for `q` complement points at level `ℓ`.
pub fn default_zeta(q: usize, noise_level: f64) -> f64 {
    DEFAULT_ZETA_FRACTION * (q as f64).sqrt() * noise_level
}

fn columns(geom: &ArrayGeometry, grid: &AngularGrid) -> Array2<Complex64> {
    let svs = grid.steering_vectors(geom);
    let mut out = Array2::zeros((geom.num_sensors(), svs.len()));
    for (j, a) in svs.iter().enumerate() {
        out.column_mut(j).assign(a);
    }
    out
}

/// Assembles the matching program from `R̂⁻¹`, the SOI-sector grid, the
/// complement grid and the estimated noise power. `zeta = None` picks
/// [`default_zeta`].
pub fn build_match_problem(
    r_hat_inv: &HermitianMatrix,
    geom: &ArrayGeometry,
    soi_grid: &AngularGrid,
    complement_grid: &AngularGrid,
    sigma_n2: f64,
    zeta: Option<f64>,
) -> Result<MatchProblem> {
    if soi_grid.is_empty() || complement_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if !(sigma_n2 > 0.0) {
        return Err(Error::InvalidInput(format!("noise power must be positive, got {sigma_n2}")));
    }
    let v_s = columns(geom, soi_grid);
    let y_s = columns(geom, complement_grid);
    let target = (0..v_s.ncols())
        .map(|j| capon_spectrum(r_hat_inv, &v_s.column(j).to_owned()))
        .collect::<Result<Vec<_>>>()?;
    let noise_level = noise_reciprocal_level(geom.num_sensors(), sigma_n2);
    let zeta = zeta.unwrap_or_else(|| default_zeta(y_s.ncols(), noise_level));
    let p = MatchProblem { v_s, y_s, target, noise_level, zeta, initial: Some(r_hat_inv.clone()) };
    p.validate()?;
    Ok(p)
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Newton-step budget over all barrier stages.
    pub max_iters: usize,
    /// Stop once the barrier duality bound is below `gap_abs + gap_rel·objective`.
    pub gap_abs: f64,
    pub gap_rel: f64,
    /// Growth factor of the barrier weight between centering stages.
    pub growth: f64,
    /// Centering ends when half the squared Newton decrement is below this.
    pub centering_tol: f64,
    /// Relative slack on ζ when checking the returned point.
    pub feasibility_slack: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iters: 2000,
            gap_abs: 1e-7,
            gap_rel: 1e-6,
            growth: 10.0,
            centering_tol: 1e-10,
            feasibility_slack: 1e-3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MatchSolution {
    pub d_s: HermitianMatrix,
    pub objective: f64,
    pub constraint_norm: f64,
    /// Newton steps taken.
    pub iterations: usize,
    pub converged: bool,
    /// Best objective after each step, once a feasible point exists.
    pub objective_history: Vec<f64>,
}

/// Real coordinates of a Hermitian matrix, isometric to the Frobenius norm:
/// the diagonal, then `√2·Re` and `√2·Im` of each upper off-diagonal entry.
struct HermitianCoords {
    m: usize,
}

impl HermitianCoords {
    fn len(&self) -> usize {
        self.m * self.m
    }

    fn to_vec(&self, h: &HermitianMatrix) -> Array1<f64> {
        self.vec_of(h.as_array())
    }

    /// Coordinates of a (Hermitian) dense matrix, read from its upper triangle.
    fn vec_of(&self, h: &Array2<Complex64>) -> Array1<f64> {
        let m = self.m;
        let mut x = Array1::zeros(m * m);
        let mut k = m;
        for i in 0..m {
            x[i] = h[(i, i)].re;
            for j in (i + 1)..m {
                let z = h[(i, j)];
                x[k] = std::f64::consts::SQRT_2 * z.re;
                x[k + 1] = std::f64::consts::SQRT_2 * z.im;
                k += 2;
            }
        }
        x
    }

    fn to_matrix(&self, x: &Array1<f64>) -> HermitianMatrix {
        let m = self.m;
        let mut a = Array2::<Complex64>::zeros((m, m));
        let mut k = m;
        for i in 0..m {
            a[(i, i)] = Complex64::new(x[i], 0.0);
            for j in (i + 1)..m {
                let z = Complex64::new(x[k], x[k + 1]) / std::f64::consts::SQRT_2;
                a[(i, j)] = z;
                a[(j, i)] = z.conj();
                k += 2;
            }
        }
        HermitianMatrix::symmetrized(a)
    }

    /// `G E_k G` for the basis matrix `E_k` of coordinate `k` and Hermitian `G`.
    fn sandwich_basis(&self, g: &Array2<Complex64>, k: usize) -> Array2<Complex64> {
        let m = self.m;
        let col = |i: usize| g.column(i);
        let outer = |i: usize, j: usize| {
            let (ci, cj) = (col(i), col(j));
            Array2::from_shape_fn((m, m), |(r, c)| ci[r] * cj[c].conj())
        };
        if k < m {
            return outer(k, k);
        }
        let mut idx = m;
        for i in 0..m {
            for j in (i + 1)..m {
                if k == idx || k == idx + 1 {
                    let gij = outer(i, j);
                    let gji = gij.t().mapv(|z| z.conj());
                    let s = std::f64::consts::FRAC_1_SQRT_2;
                    return if k == idx {
                        (gij + gji).mapv(|z| z * s)
                    } else {
                        (gij - gji).mapv(|z| z * Complex64::new(0.0, s))
                    };
                }
                idx += 2;
            }
        }
        unreachable!("coordinate {k} out of range")
    }

    /// Row `r` with `r·x = vᴴ D v`.
    fn quad_form_row(&self, v: &ComplexVector) -> Array1<f64> {
        let m = self.m;
        let mut row = Array1::zeros(m * m);
        let mut k = m;
        for i in 0..m {
            row[i] = v[i].norm_sqr();
            for j in (i + 1)..m {
                let c = v[i].conj() * v[j];
                row[k] = std::f64::consts::SQRT_2 * c.re;
                row[k + 1] = -std::f64::consts::SQRT_2 * c.im;
                k += 2;
            }
        }
        row
    }
}

/// Dense real symmetric positive-definite factorization `A = L Lᵀ`.
struct RealCholesky {
    l: Array2<f64>,
}

impl RealCholesky {
    fn factor(a: &Array2<f64>) -> Result<Self> {
        let n = a.nrows();
        let mut l = Array2::<f64>::zeros((n, n));
        for j in 0..n {
            let mut d = a[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if !(d > 0.0) {
                return Err(Error::NotPositiveDefinite { index: j, pivot: d });
            }
            let ljj = d.sqrt();
            l[(j, j)] = ljj;
            for i in (j + 1)..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / ljj;
            }
        }
        Ok(Self { l })
    }

    fn solve(&self, b: &Array1<f64>) -> Array1<f64> {
        let n = b.len();
        let l = &self.l;
        let mut y = b.clone();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= l[(i, k)] * y[k];
            }
            y[i] = s / l[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s -= l[(k, i)] * y[k];
            }
            y[i] = s / l[(i, i)];
        }
        y
    }
}

fn l2(v: &Array1<f64>) -> f64 {
    v.dot(v).sqrt()
}

fn log_det(d: &HermitianMatrix) -> Option<f64> {
    let l = cholesky(d).ok()?;
    Some((0..d.dim()).map(|i| 2.0 * l[(i, i)].re.ln()).sum())
}

/// `min ‖A x − τ‖  s.t. ‖B x − c‖ ≤ radius, D(x) ⪰ 0`, in epigraph form over
/// `(x, u)` and solved by a log-barrier path-following method.
struct BarrierProgram<'a> {
    coords: &'a HermitianCoords,
    a: &'a Array2<f64>,
    tau: &'a Array1<f64>,
    ata: Array2<f64>,
    ball: Option<Ball<'a>>,
}

struct Ball<'a> {
    b: &'a Array2<f64>,
    center: &'a Array1<f64>,
    radius: f64,
    btb: Array2<f64>,
}

struct BarrierRun {
    x: Array1<f64>,
    iterations: usize,
    converged: bool,
    history: Vec<f64>,
}

impl<'a> BarrierProgram<'a> {
    fn new(
        coords: &'a HermitianCoords,
        a: &'a Array2<f64>,
        tau: &'a Array1<f64>,
        ball: Option<(&'a Array2<f64>, &'a Array1<f64>, f64)>,
    ) -> Self {
        Self {
            coords,
            a,
            tau,
            ata: a.t().dot(a),
            ball: ball.map(|(b, center, radius)| Ball { b, center, radius, btb: b.t().dot(b) }),
        }
    }

    fn residual(&self, x: &Array1<f64>) -> f64 {
        l2(&(self.a.dot(x) - self.tau))
    }

    fn degree(&self) -> f64 {
        2.0 + if self.ball.is_some() { 2.0 } else { 0.0 } + self.coords.m as f64
    }

    /// Barrier value, or `None` outside the open domain.
    fn barrier(&self, x: &Array1<f64>, u: f64) -> Option<f64> {
        let r = self.a.dot(x) - self.tau;
        let g = u * u - r.dot(&r);
        if !(u > 0.0 && g > 0.0) {
            return None;
        }
        let mut val = -g.ln();
        if let Some(ball) = &self.ball {
            let e = ball.b.dot(x) - ball.center;
            let g2 = ball.radius * ball.radius - e.dot(&e);
            if !(g2 > 0.0) {
                return None;
            }
            val -= g2.ln();
        }
        let ld = log_det(&self.coords.to_matrix(x))?;
        Some(val - ld)
    }

    /// Gradient and Hessian of the barrier at `(x, u)`; `u` is the last coordinate.
    fn derivatives(&self, x: &Array1<f64>, u: f64) -> Result<(Array1<f64>, Array2<f64>)> {
        let n = x.len();
        let mut grad = Array1::<f64>::zeros(n + 1);
        let mut hess = Array2::<f64>::zeros((n + 1, n + 1));

        let r = self.a.dot(x) - self.tau;
        let g = u * u - r.dot(&r);
        let mut dg = Array1::<f64>::zeros(n + 1);
        dg.slice_mut(s![..n]).assign(&(self.a.t().dot(&r) * -2.0));
        dg[n] = 2.0 * u;
        grad.scaled_add(-1.0 / g, &dg);
        hess.slice_mut(s![..n, ..n]).scaled_add(2.0 / g, &self.ata);
        hess[(n, n)] -= 2.0 / g;
        add_outer_real(&mut hess, &dg, 1.0 / (g * g));

        if let Some(ball) = &self.ball {
            let e = ball.b.dot(x) - ball.center;
            let g2 = ball.radius * ball.radius - e.dot(&e);
            let mut dg2 = Array1::<f64>::zeros(n + 1);
            dg2.slice_mut(s![..n]).assign(&(ball.b.t().dot(&e) * -2.0));
            grad.scaled_add(-1.0 / g2, &dg2);
            hess.slice_mut(s![..n, ..n]).scaled_add(2.0 / g2, &ball.btb);
            add_outer_real(&mut hess, &dg2, 1.0 / (g2 * g2));
        }

        let inv = hermitian_inverse(&self.coords.to_matrix(x), 0.0)?;
        let inv = inv.as_array();
        grad.slice_mut(s![..n]).scaled_add(-1.0, &self.coords.vec_of(inv));
        let mut block = hess.slice_mut(s![..n, ..n]);
        for k in 0..n {
            let col = self.coords.vec_of(&self.coords.sandwich_basis(inv, k));
            let mut row = block.row_mut(k);
            row += &col;
        }
        Ok((grad, hess))
    }

    /// Path following from the strictly feasible `x0`. With `stop_below`, returns
    /// as soon as the residual drops under that value.
    fn solve(&self, x0: Array1<f64>, opts: &SolverOptions, gap_abs: f64, stop_below: Option<f64>) -> Result<BarrierRun> {
        let n = x0.len();
        let nu = self.degree();
        let r0 = self.residual(&x0);
        let mut u = 1.1 * r0 + 1e-3 * (l2(self.tau) / (self.tau.len() as f64).sqrt()).max(1e-12);
        let mut x = x0;
        let mut t = nu / u;
        let mut best = (x.clone(), r0);
        let mut history = vec![r0];
        let mut iterations = 0;

        if stop_below.is_some_and(|lim| r0 < lim) {
            return Ok(BarrierRun { x, iterations, converged: true, history });
        }

        loop {
            // Centering by damped Newton on t·u + barrier.
            loop {
                if iterations >= opts.max_iters {
                    return Ok(BarrierRun { x: best.0, iterations, converged: false, history });
                }
                let (mut grad, mut hess) = self.derivatives(&x, u)?;
                grad[n] += t;
                let step = solve_spd(&mut hess, &grad.mapv(|v| -v))?;
                let decrement = -grad.dot(&step);
                iterations += 1;
                if decrement / 2.0 <= opts.centering_tol {
                    break;
                }
                let f0 = t * u + self.barrier(&x, u).ok_or(Error::NonFinite("barrier"))?;
                let mut alpha = 1.0;
                let mut progress = 0.0;
                while alpha > 1e-14 {
                    let xn = &x + &(&step.slice(s![..n]) * alpha);
                    let un = u + alpha * step[n];
                    if let Some(b) = self.barrier(&xn, un) {
                        let f1 = t * un + b;
                        if f1 <= f0 - 0.01 * alpha * decrement {
                            x = xn;
                            u = un;
                            progress = f0 - f1;
                            break;
                        }
                    }
                    alpha *= 0.5;
                }
                let res = self.residual(&x);
                if res < best.1 {
                    best = (x.clone(), res);
                }
                history.push(best.1);
                if stop_below.is_some_and(|lim| res < lim) {
                    return Ok(BarrierRun { x: best.0, iterations, converged: true, history });
                }
                // The optimum is nonnegative, so a residual below the tolerance is optimal.
                if stop_below.is_none() && best.1 <= gap_abs {
                    return Ok(BarrierRun { x: best.0, iterations, converged: true, history });
                }
                // Centered to working precision.
                if progress <= 1e-13 * (1.0 + f0.abs()) {
                    break;
                }
            }
            if nu / t <= gap_abs + opts.gap_rel * best.1 {
                return Ok(BarrierRun { x: best.0, iterations, converged: true, history });
            }
            t *= opts.growth;
        }
    }
}

fn add_outer_real(h: &mut Array2<f64>, v: &Array1<f64>, scale: f64) {
    let n = v.len();
    for i in 0..n {
        if v[i] == 0.0 {
            continue;
        }
        let vi = v[i] * scale;
        for j in 0..n {
            h[(i, j)] += vi * v[j];
        }
    }
}

/// Solves `H x = b` for symmetric positive-definite `H`, adding a small ridge
/// if rounding has cost definiteness.
fn solve_spd(h: &mut Array2<f64>, b: &Array1<f64>) -> Result<Array1<f64>> {
    let n = h.nrows();
    let mut ridge = 0.0;
    let base = (0..n).map(|i| h[(i, i)].abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    for _ in 0..8 {
        let mut m = h.clone();
        for i in 0..n {
            m[(i, i)] += ridge;
        }
        if let Ok(ch) = RealCholesky::factor(&m) {
            return Ok(ch.solve(b));
        }
        ridge = if ridge == 0.0 { 1e-14 * base } else { ridge * 100.0 };
    }
    Err(Error::NotPositiveDefinite { index: 0, pivot: 0.0 })
}

/// Solves the spectrum-matching program.
///
/// Internally the steering vectors are normalized to unit norm and `D` is
/// expressed in units of the noise level. The warm start is used when it is
/// strictly feasible; otherwise the path starts from the noise-only solution
/// (a scaled identity), and from a phase-one search if even that violates the
/// noise constraint. Every iterate is PSD and strictly feasible, and the
/// best one by objective is returned.
///
/// Errors: `Infeasible` if phase one cannot reach the noise ball,
/// `SolverNoConvergence` if the Newton budget runs out. Both carry the
/// best-effort solution.
pub fn solve_match(p: &MatchProblem, opts: &SolverOptions) -> Result<MatchSolution> {
    p.validate()?;
    let m = p.num_sensors();
    let coords = HermitianCoords { m };
    let g = p.v_s.ncols();
    let q = p.y_s.ncols();
    let mf = m as f64;

    let scale = p.noise_level / mf;
    let unscale = mf * scale;
    let a_rows: Vec<Array1<f64>> = (0..g)
        .map(|j| coords.quad_form_row(&p.v_s.column(j).to_owned()) / mf)
        .collect();
    let b_rows: Vec<Array1<f64>> = (0..q)
        .map(|i| coords.quad_form_row(&p.y_s.column(i).to_owned()) / mf)
        .collect();
    let a_mat = stack(&a_rows, coords.len());
    let b_mat = stack(&b_rows, coords.len());
    let t: Array1<f64> = p.target.iter().map(|t| 1.0 / (t * unscale)).collect();
    let ones = Array1::from_elem(q, 1.0);
    let radius = p.zeta / unscale;

    let strictly_feasible = |x: &Array1<f64>| {
        l2(&(b_mat.dot(x) - &ones)) < radius && log_det(&coords.to_matrix(x)).is_some()
    };
    let finish = |x: &Array1<f64>, iterations: usize, converged: bool, history: Vec<f64>| {
        let d = coords.to_matrix(x);
        MatchSolution {
            objective: l2(&(a_mat.dot(x) - &t)) * unscale,
            constraint_norm: l2(&(b_mat.dot(x) - &ones)) * unscale,
            d_s: d.scale(scale),
            iterations,
            converged,
            objective_history: history.into_iter().map(|h| h * unscale).collect(),
        }
    };

    let warm = p.initial.as_ref().map(|d0| coords.to_vec(&d0.scale(1.0 / scale)));
    let identity = coords.to_vec(&HermitianMatrix::identity(m));
    let level = {
        let n_i = b_mat.dot(&identity);
        n_i.sum() / n_i.dot(&n_i)
    };
    let noise_only = &identity * level;

    let mut spent = 0;
    let start = match warm.filter(|x| strictly_feasible(x)) {
        Some(x) => x,
        None if strictly_feasible(&noise_only) => noise_only,
        None => {
            let phase_one = BarrierProgram::new(&coords, &b_mat, &ones, None);
            let run = phase_one.solve(noise_only, opts, 0.0, Some(radius * (1.0 - 1e-6)))?;
            spent = run.iterations;
            if !strictly_feasible(&run.x) {
                let best = finish(&run.x, run.iterations, false, Vec::new());
                return Err(Error::Infeasible { best: Box::new(best) });
            }
            run.x
        }
    };

    let program = BarrierProgram::new(&coords, &a_mat, &t, Some((&b_mat, &ones, radius)));
    let budget = SolverOptions { max_iters: opts.max_iters.saturating_sub(spent), ..*opts };
    let run = program.solve(start, &budget, opts.gap_abs / unscale, None)?;
    let sol = finish(&run.x, run.iterations + spent, run.converged, run.history);
    if !run.converged {
        return Err(Error::SolverNoConvergence { best: Box::new(sol) });
    }
    Ok(sol)
}

fn stack(rows: &[Array1<f64>], n: usize) -> Array2<f64> {
    let mut out = Array2::zeros((rows.len(), n));
    for (i, r) in rows.iter().enumerate() {
        out.row_mut(i).assign(r);
    }
    out
}

/// Signal-of-interest estimate recovered from `D_s`.
#[derive(Debug, Clone)]
pub struct SoiEstimate {
    pub power: f64,
    /// Scaled so `‖sv‖² = M`, first nonzero entry real positive.
    pub sv: ComplexVector,
    /// `D_s⁻¹ − σ̂_n² I`.
    pub r_s: HermitianMatrix,
}

/// Removes the noise floor from `D_s⁻¹` and extracts the dominant eigenpair
/// with `k_iters` power iterations.
pub fn recover_soi(d_s: &HermitianMatrix, sigma_n2: f64, k_iters: usize) -> Result<SoiEstimate> {
    if !(sigma_n2 > 0.0) {
        return Err(Error::InvalidInput(format!("noise power must be positive, got {sigma_n2}")));
    }
    let m = d_s.dim();
    let ridge = 1e-8 * d_s.trace() / m as f64;
    let r_sn = hermitian_inverse(d_s, ridge)?;
    let r_s = r_sn.add_identity(-sigma_n2);
    let pm = match power_method(&r_s, k_iters) {
        Ok(pm) => pm,
        Err(Error::ZeroIterate { .. }) => return Err(Error::DegenerateSignal { lambda: 0.0 }),
        Err(e) => return Err(e),
    };
    if !(pm.eigenvalue > 0.0) {
        return Err(Error::DegenerateSignal { lambda: pm.eigenvalue });
    }
    let mf = m as f64;
    Ok(SoiEstimate {
        power: (pm.eigenvalue / mf).max(MIN_SOI_POWER),
        sv: normalize_phase(&pm.eigenvector).mapv(|z| z * mf.sqrt()),
        r_s,
    })
}
