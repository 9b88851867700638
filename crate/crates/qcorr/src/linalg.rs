//! Dense complex linear algebra sized for few-qubit density matrices.
//!
//! Storage is row-major `Vec<Complex64>`; nothing here is tuned for matrices
//! larger than 16x16. The Hermitian eigensolver is a cyclic Jacobi sweep:
//! deterministic, branch-free in its update order, and accurate at these
//! sizes, which matters because criterion margins downstream are compared
//! against 1e-8..1e-9 thresholds.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type C64 = Complex64;

/// Shorthand for a complex scalar.
#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Shorthand for a real scalar lifted to complex.
#[inline]
pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },
    #[error("eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
}

/// Comparison thresholds used across the crate, bundled so they can be set
/// once (e.g. from a config file) and threaded through every check.
///
/// `herm_tol` bounds the accepted Hermiticity defect of inputs, `psd_tol`
/// the accepted negative dip of eigenvalues, and `eq_tol` is the generic
/// "numerically equal" threshold used by criterion margins.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub herm_tol: f64,
    pub psd_tol: f64,
    pub eq_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            herm_tol: 1e-9,
            psd_tol: 1e-9,
            eq_tol: 1e-8,
        }
    }
}

/// Bipartite dimension pair (d_A, d_B).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    pub da: usize,
    pub db: usize,
}

impl Dims {
    pub fn new(da: usize, db: usize) -> Self {
        Dims { da, db }
    }

    pub fn total(&self) -> usize {
        self.da * self.db
    }

    /// Row/column index of |a>|b> in the product basis.
    #[inline]
    pub fn joint(&self, a: usize, b: usize) -> usize {
        a * self.db + b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subsystem {
    A,
    B,
}

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![C64::default(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, cr(1.0));
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, f(r, c));
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self, LinalgError> {
        let nr = rows.len();
        let nc = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != nc) {
            return Err(LinalgError::DimensionMismatch(
                "ragged row lengths".to_string(),
            ));
        }
        Ok(ComplexMatrix {
            rows: nr,
            cols: nc,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    /// Column vector from a slice.
    pub fn col_vector(v: &[C64]) -> Self {
        ComplexMatrix {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    /// Outer product v v† of a ket, as a square matrix.
    pub fn outer(v: &[C64]) -> Self {
        let n = v.len();
        Self::from_fn(n, n, |r, c| v[r] * v[c].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn square_dim(&self) -> Result<usize, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(self.rows)
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: C64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, k: C64) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * k).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == C64::default() {
                    continue;
                }
                for c in 0..other.cols {
                    let v = out.get(r, c) + a * other.get(k, c);
                    out.set(r, c, v);
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r))
    }

    pub fn trace(&self) -> C64 {
        let n = self.rows.min(self.cols);
        (0..n).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from the own adjoint (0 for Hermitian).
    pub fn hermiticity_defect(&self) -> f64 {
        if self.rows != self.cols {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for r in 0..self.rows {
            for c in r..self.cols {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Largest entrywise deviation of self†·self from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        if self.rows != self.cols {
            return f64::INFINITY;
        }
        self.adjoint()
            .mul(self)
            .max_abs_diff(&Self::identity(self.rows))
    }

    /// Kronecker product, self acting on the first factor.
    pub fn kron(&self, other: &Self) -> Self {
        let (r1, c1, r2, c2) = (self.rows, self.cols, other.rows, other.cols);
        Self::from_fn(r1 * r2, c1 * c2, |r, c| {
            self.get(r / r2, c / c2) * other.get(r % r2, c % c2)
        })
    }

    /// Entry matrix representation for serialization: rows of [re, im] pairs.
    pub fn to_entry_rows(&self) -> Vec<Vec<[f64; 2]>> {
        (0..self.rows)
            .map(|r| {
                (0..self.cols)
                    .map(|c| {
                        let z = self.get(r, c);
                        [z.re, z.im]
                    })
                    .collect()
            })
            .collect()
    }

    pub fn from_entry_rows(rows: &[Vec<[f64; 2]>]) -> Result<Self, LinalgError> {
        let converted: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|p| c(p[0], p[1])).collect())
            .collect();
        Self::from_rows(&converted)
    }
}

/// Tensor (Kronecker) product with A on the left.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

/// u m u†.
pub fn conjugate_by(u: &ComplexMatrix, m: &ComplexMatrix) -> ComplexMatrix {
    u.mul(m).mul(&u.adjoint())
}

/// [a, b] = ab - ba.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.mul(b).sub(&b.mul(a))
}

/// Trace out one subsystem of an operator on H_A (x) H_B.
pub fn partial_trace(
    rho: &ComplexMatrix,
    dims: Dims,
    keep: Subsystem,
) -> Result<ComplexMatrix, LinalgError> {
    let n = rho.square_dim()?;
    if n != dims.total() {
        return Err(LinalgError::DimensionMismatch(format!(
            "matrix is {}x{} but dims give {}",
            n,
            n,
            dims.total()
        )));
    }
    let out = match keep {
        Subsystem::A => ComplexMatrix::from_fn(dims.da, dims.da, |a1, a2| {
            (0..dims.db)
                .map(|b| rho.get(dims.joint(a1, b), dims.joint(a2, b)))
                .sum()
        }),
        Subsystem::B => ComplexMatrix::from_fn(dims.db, dims.db, |b1, b2| {
            (0..dims.da)
                .map(|a| rho.get(dims.joint(a, b1), dims.joint(a, b2)))
                .sum()
        }),
    };
    Ok(out)
}

/// Transpose one tensor factor of an operator on H_A (x) H_B.
pub fn partial_transpose(
    rho: &ComplexMatrix,
    dims: Dims,
    side: Subsystem,
) -> Result<ComplexMatrix, LinalgError> {
    let n = rho.square_dim()?;
    if n != dims.total() {
        return Err(LinalgError::DimensionMismatch(format!(
            "matrix is {}x{} but dims give {}",
            n,
            n,
            dims.total()
        )));
    }
    let mut out = ComplexMatrix::zeros(n, n);
    for a1 in 0..dims.da {
        for b1 in 0..dims.db {
            for a2 in 0..dims.da {
                for b2 in 0..dims.db {
                    let v = match side {
                        Subsystem::B => rho.get(dims.joint(a1, b2), dims.joint(a2, b1)),
                        Subsystem::A => rho.get(dims.joint(a2, b1), dims.joint(a1, b2)),
                    };
                    out.set(dims.joint(a1, b1), dims.joint(a2, b2), v);
                }
            }
        }
    }
    Ok(out)
}

/// Real eigenvalues in descending order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum(Vec<f64>);

impl Spectrum {
    /// Sorts descending; ties keep their incoming order.
    pub fn from_unsorted(mut vals: Vec<f64>) -> Self {
        vals.sort_by(|a, b| b.partial_cmp(a).expect("eigenvalues are finite"));
        Spectrum(vals)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }

    pub fn min(&self) -> f64 {
        *self.0.last().expect("nonempty spectrum")
    }

    pub fn max(&self) -> f64 {
        self.0[0]
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn purity(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum()
    }

    /// Nonnegative (within psd_tol) and summing to one (within eq_tol)?
    pub fn is_density_spectrum(&self, tols: &Tolerances) -> bool {
        self.min() >= -tols.psd_tol && (self.sum() - 1.0).abs() <= tols.eq_tol
    }
}

fn off_diag_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                s += a.get(r, c).norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in descending order together with the matching
/// eigenvector columns, so `m v_i = lambda_i v_i`. Fails if the input's
/// Hermiticity defect exceeds `tols.herm_tol`.
pub fn hermitian_eig(
    m: &ComplexMatrix,
    tols: &Tolerances,
) -> Result<(Spectrum, ComplexMatrix), LinalgError> {
    let n = m.square_dim()?;
    let defect = m.hermiticity_defect();
    if defect > tols.herm_tol {
        return Err(LinalgError::NotHermitian { defect });
    }
    // Average away the sub-tolerance asymmetry so rotations see an exactly
    // Hermitian matrix.
    let mut a = ComplexMatrix::from_fn(n, n, |r, c| {
        (m.get(r, c) + m.get(c, r).conj()) * cr(0.5)
    });
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);

    const MAX_SWEEPS: usize = 64;
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diag_norm(&a) <= 1e-14 * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                let g = apq.norm();
                if g <= 1e-18 * scale {
                    continue;
                }
                let phase = apq / cr(g);
                let theta = 0.5 * (2.0 * g).atan2(a.get(p, p).re - a.get(q, q).re);
                let (s, cth) = theta.sin_cos();
                // Columns: col_p <- c*col_p + s*conj(phase)*col_q,
                //          col_q <- -s*phase*col_p + c*col_q.
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, akp * cr(cth) + akq * phase.conj() * cr(s));
                    a.set(k, q, akq * cr(cth) - akp * phase * cr(s));
                }
                // Rows: the adjoint rotation.
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, apk * cr(cth) + aqk * phase * cr(s));
                    a.set(q, k, aqk * cr(cth) - apk * phase.conj() * cr(s));
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, vkp * cr(cth) + vkq * phase.conj() * cr(s));
                    v.set(k, q, vkq * cr(cth) - vkp * phase * cr(s));
                }
            }
        }
    }
    if !converged && off_diag_norm(&a) > 1e-12 * scale {
        return Err(LinalgError::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).expect("finite eigenvalues"));
    let vals: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let vecs = ComplexMatrix::from_fn(n, n, |r, c| v.get(r, order[c]));
    Ok((Spectrum(vals), vecs))
}

/// Eigenvalues only; descending.
pub fn hermitian_eigenvalues(
    m: &ComplexMatrix,
    tols: &Tolerances,
) -> Result<Spectrum, LinalgError> {
    hermitian_eig(m, tols).map(|(s, _)| s)
}

/// Eigenvalues of a real symmetric matrix given as rows (descending).
pub fn symmetric_eigenvalues(rows: &[Vec<f64>], tols: &Tolerances) -> Result<Spectrum, LinalgError> {
    let m = ComplexMatrix::from_rows(
        &rows
            .iter()
            .map(|r| r.iter().map(|&x| cr(x)).collect())
            .collect::<Vec<_>>(),
    )?;
    hermitian_eigenvalues(&m, tols)
}

/// The 2x2 Pauli matrices; index 1..=3 for x, y, z.
pub fn pauli(i: usize) -> ComplexMatrix {
    match i {
        1 => ComplexMatrix::from_rows(&[vec![cr(0.0), cr(1.0)], vec![cr(1.0), cr(0.0)]]),
        2 => ComplexMatrix::from_rows(&[vec![cr(0.0), c(0.0, -1.0)], vec![c(0.0, 1.0), cr(0.0)]]),
        3 => ComplexMatrix::from_rows(&[vec![cr(1.0), cr(0.0)], vec![cr(0.0), cr(-1.0)]]),
        _ => panic!("pauli index must be 1, 2 or 3"),
    }
    .expect("static shape")
}

/// Traceless Hermitian basis with Tr(s_m s_n) = 2 delta_mn; reduces to the
/// Pauli triple (x, y, z) at d = 2.
pub fn hermitian_basis(d: usize) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(d * d - 1);
    for k in 1..d {
        for j in 0..k {
            let mut sym = ComplexMatrix::zeros(d, d);
            sym.set(j, k, cr(1.0));
            sym.set(k, j, cr(1.0));
            out.push(sym);
            let mut asym = ComplexMatrix::zeros(d, d);
            asym.set(j, k, c(0.0, -1.0));
            asym.set(k, j, c(0.0, 1.0));
            out.push(asym);
        }
        let norm = (2.0 / (k as f64 * (k as f64 + 1.0))).sqrt();
        let mut diag = ComplexMatrix::zeros(d, d);
        for j in 0..k {
            diag.set(j, j, cr(norm));
        }
        diag.set(k, k, cr(-(k as f64) * norm));
        out.push(diag);
    }
    out
}
