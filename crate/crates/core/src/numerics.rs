//! Dense complex linear-algebra kernels.
//!
//! Everything here works on small (M <= ~32) dense matrices: a Cholesky-based
//! Hermitian inverse, a cyclic Jacobi eigensolver, Frobenius-nearest PSD
//! projection and a handful of vector helpers shared by the rest of the crate.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex column vector (steering vectors, weights, power-method iterates).
pub type ComplexVector = Array1<Complex64>;

/// Tolerance used when validating Hermitian symmetry on construction.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Maximum number of cyclic Jacobi sweeps before reporting `NoConvergence`.
pub const MAX_JACOBI_SWEEPS: usize = 100;

#[inline]
pub(crate) fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Square complex matrix that is Hermitian up to [`HERMITIAN_TOL`].
///
/// The stored entries are exactly Hermitian: constructors average the two
/// triangles and zero the imaginary part of the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    data: Array2<Complex64>,
}

impl HermitianMatrix {
    /// Validates Hermitian structure (absolute tolerance 1e-12) and finiteness.
    pub fn new(data: Array2<Complex64>) -> Result<Self> {
        let (n, m) = data.dim();
        if n != m || n == 0 {
            return Err(Error::Shape(format!("expected nonempty square matrix, got {n}x{m}")));
        }
        for i in 0..n {
            for j in i..n {
                let a = data[(i, j)];
                let b = data[(j, i)].conj();
                if !a.re.is_finite() || !a.im.is_finite() {
                    return Err(Error::NonFinite("matrix entry"));
                }
                if (a - b).norm() > HERMITIAN_TOL {
                    return Err(Error::NotHermitian { row: i, col: j });
                }
            }
        }
        Ok(Self::symmetrized(data))
    }

    /// Builds from any square matrix by taking the Hermitian part `(A + Aᴴ)/2`.
    ///
    /// Used for results of products that are Hermitian in exact arithmetic.
    pub fn symmetrized(mut data: Array2<Complex64>) -> Self {
        let n = data.nrows();
        assert_eq!(n, data.ncols(), "square matrix required");
        for i in 0..n {
            data[(i, i)] = c64(data[(i, i)].re, 0.0);
            for j in (i + 1)..n {
                let avg = (data[(i, j)] + data[(j, i)].conj()) * 0.5;
                data[(i, j)] = avg;
                data[(j, i)] = avg.conj();
            }
        }
        Self { data }
    }

    pub fn identity(n: usize) -> Self {
        Self::scaled_identity(n, 1.0)
    }

    pub fn scaled_identity(n: usize, scale: f64) -> Self {
        let mut data = Array2::zeros((n, n));
        for i in 0..n {
            data[(i, i)] = c64(scale, 0.0);
        }
        Self { data }
    }

    pub fn zeros(n: usize) -> Self {
        Self { data: Array2::zeros((n, n)) }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.data[(i, i)] = c64(d, 0.0);
        }
        m
    }

    /// `scale * v vᴴ`.
    pub fn outer(v: &ComplexVector, scale: f64) -> Self {
        let n = v.len();
        let mut data = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                data[(i, j)] = v[i] * v[j].conj() * scale;
            }
        }
        Self::symmetrized(data)
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn as_array(&self) -> &Array2<Complex64> {
        &self.data
    }

    pub fn into_array(self) -> Array2<Complex64> {
        self.data
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.data[(i, i)].re).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `self + scale * v vᴴ`, in place.
    pub fn add_outer(&mut self, v: &ComplexVector, scale: f64) {
        let n = self.dim();
        assert_eq!(v.len(), n);
        for i in 0..n {
            for j in 0..n {
                self.data[(i, j)] += v[i] * v[j].conj() * scale;
            }
        }
        for i in 0..n {
            self.data[(i, i)].im = 0.0;
        }
    }

    pub fn add_identity(&self, shift: f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.dim() {
            out.data[(i, i)].re += shift;
        }
        out
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self { data: self.data.mapv(|z| z * factor) }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { data: &self.data + &other.data }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { data: &self.data - &other.data }
    }

    pub fn matvec(&self, v: &ComplexVector) -> ComplexVector {
        self.data.dot(v)
    }

    /// Real part of `vᴴ A v` (exactly real for Hermitian A).
    pub fn quad_form(&self, v: &ComplexVector) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            let mut row = Complex64::new(0.0, 0.0);
            for j in 0..n {
                row += self.data[(i, j)] * v[j];
            }
            acc += (v[i].conj() * row).re;
        }
        acc
    }

    /// `uᴴ A v`.
    pub fn bilinear(&self, u: &ComplexVector, v: &ComplexVector) -> Complex64 {
        dot_h(u, &self.matvec(v))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// `uᴴ v`.
pub fn dot_h(u: &ComplexVector, v: &ComplexVector) -> Complex64 {
    u.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm2(v: &ComplexVector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest entry modulus. Ties resolve to the lowest index (see [`inf_norm_index`]).
pub fn inf_norm(v: &ComplexVector) -> f64 {
    inf_norm_index(v).1
}

/// Index and modulus of the largest-modulus entry; the first maximum wins.
pub fn inf_norm_index(v: &ComplexVector) -> (usize, f64) {
    let mut best = (0, 0.0);
    for (i, z) in v.iter().enumerate() {
        let m = z.norm();
        if m > best.1 {
            best = (i, m);
        }
    }
    best
}

/// Rotates `v` so that its first entry with modulus above `1e-12 * ‖v‖∞` is real positive.
pub fn normalize_phase(v: &ComplexVector) -> ComplexVector {
    let scale = inf_norm(v);
    if scale == 0.0 {
        return v.clone();
    }
    match v.iter().find(|z| z.norm() > 1e-12 * scale) {
        Some(z) => {
            let rot = z.conj() / z.norm();
            v.mapv(|x| x * rot)
        }
        None => v.clone(),
    }
}

/// Lower-triangular Cholesky factor `L` with `A = L Lᴴ`.
pub fn cholesky(a: &HermitianMatrix) -> Result<Array2<Complex64>> {
    let n = a.dim();
    let src = a.as_array();
    let mut l = Array2::<Complex64>::zeros((n, n));
    for j in 0..n {
        let mut d = src[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > 0.0) {
            return Err(Error::NotPositiveDefinite { index: j, pivot: d });
        }
        let ljj = d.sqrt();
        l[(j, j)] = c64(ljj, 0.0);
        for i in (j + 1)..n {
            let mut s = src[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / ljj;
        }
    }
    Ok(l)
}

/// `(A + ridge·I)⁻¹` through a Cholesky factorization.
pub fn hermitian_inverse(a: &HermitianMatrix, ridge: f64) -> Result<HermitianMatrix> {
    if !(ridge >= 0.0) {
        return Err(Error::InvalidInput(format!("ridge must be nonnegative, got {ridge}")));
    }
    let n = a.dim();
    let shifted = if ridge > 0.0 { a.add_identity(ridge) } else { a.clone() };
    let l = cholesky(&shifted)?;

    // L⁻¹ by forward substitution, then A⁻¹ = L⁻ᴴ L⁻¹.
    let mut linv = Array2::<Complex64>::zeros((n, n));
    for col in 0..n {
        for i in col..n {
            let mut s = if i == col { c64(1.0, 0.0) } else { c64(0.0, 0.0) };
            for k in col..i {
                s -= l[(i, k)] * linv[(k, col)];
            }
            linv[(i, col)] = s / l[(i, i)];
        }
    }
    let mut inv = Array2::<Complex64>::zeros((n, n));
    for i in 0..n {
        for j in 0..=i {
            let mut s = c64(0.0, 0.0);
            for k in i..n {
                s += linv[(k, i)].conj() * linv[(k, j)];
            }
            inv[(i, j)] = s;
            inv[(j, i)] = s.conj();
        }
    }
    Ok(HermitianMatrix::symmetrized(inv))
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues sorted descending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors, `vectors[i]` pairs with `values[i]`.
    pub vectors: Vec<ComplexVector>,
}

impl HermitianEigen {
    /// `Σ f(λ_i) v_i v_iᴴ`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let n = self.vectors.first().map_or(0, |v| v.len());
        let mut out = HermitianMatrix::zeros(n);
        for (lam, v) in self.values.iter().zip(&self.vectors) {
            let w = f(*lam);
            if w != 0.0 {
                out.add_outer(v, w);
            }
        }
        out
    }
}

/// Cyclic Jacobi eigensolver working directly on the complex Hermitian matrix.
///
/// Each rotation first removes the phase of the pivot `a_pq` and then applies a
/// real Givens rotation, so the accumulated transform stays unitary.
pub fn hermitian_eig(a: &HermitianMatrix) -> Result<HermitianEigen> {
    let n = a.dim();
    let mut m = a.as_array().clone();
    let mut v = Array2::<Complex64>::eye(n);
    let scale = a.frobenius_norm();

    let off_norm = |m: &Array2<Complex64>| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    while scale > 0.0 {
        if off_norm(&m) <= 1e-15 * scale {
            break;
        }
        if sweeps == MAX_JACOBI_SWEEPS {
            return Err(Error::NoConvergence { iterations: sweeps });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                let mag = apq.norm();
                if mag <= 1e-300 {
                    continue;
                }
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                // Skip rotations that cannot change the diagonal at working precision.
                if mag < 1e-18 * (app.abs() + aqq.abs()) {
                    m[(p, q)] = c64(0.0, 0.0);
                    m[(q, p)] = c64(0.0, 0.0);
                    continue;
                }
                let phase = apq / mag;
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // U = diag(1, conj(phase)) · [[c, s], [-s, c]]
                let u_pp = c64(c, 0.0);
                let u_pq = c64(s, 0.0);
                let u_qp = phase.conj() * (-s);
                let u_qq = phase.conj() * c;

                // M <- M U
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = mkp * u_pp + mkq * u_qp;
                    m[(k, q)] = mkp * u_pq + mkq * u_qq;
                }
                // M <- Uᴴ M
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = u_pp.conj() * mpk + u_qp.conj() * mqk;
                    m[(q, k)] = u_pq.conj() * mpk + u_qq.conj() * mqk;
                }
                m[(p, q)] = c64(0.0, 0.0);
                m[(q, p)] = c64(0.0, 0.0);
                m[(p, p)].im = 0.0;
                m[(q, q)].im = 0.0;
                // V <- V U
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * u_pp + vkq * u_qp;
                    v[(k, q)] = vkp * u_pq + vkq * u_qq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(j, j)].re.total_cmp(&m[(i, i)].re).then(i.cmp(&j)));
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let vectors = order.iter().map(|&i| v.column(i).to_owned()).collect();
    Ok(HermitianEigen { values, vectors })
}

/// Frobenius-nearest positive semidefinite matrix: clamps negative eigenvalues to zero.
pub fn psd_project(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    let eig = hermitian_eig(a)?;
    if eig.values.iter().all(|&l| l >= 0.0) {
        return Ok(a.clone());
    }
    Ok(eig.reconstruct_with(|l| l.max(0.0)))
}

/// Smallest eigenvalue, via the Jacobi solver.
pub fn min_eigenvalue(a: &HermitianMatrix) -> Result<f64> {
    Ok(*hermitian_eig(a)?.values.last().expect("nonempty matrix"))
}
