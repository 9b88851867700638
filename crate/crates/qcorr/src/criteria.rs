//! Correlation criteria for bipartite states.
//!
//! Every check returns a [`CriterionVerdict`] whose signed margin is
//! positive exactly when the tested property holds, so downstream sweeps and
//! audits can bisect and gate on one number. Thresholds sit inside the
//! margin; `holds == (margin >= 0.0)` always.

use serde::Serialize;
use serde_json::json;
use std::sync::OnceLock;
use thiserror::Error;

use crate::entropy::{binary_entropy, entropy_report, von_neumann};
use crate::linalg::{
    commutator, cr, hermitian_basis, hermitian_eig, partial_trace, partial_transpose,
    symmetric_eigenvalues, tensor, ComplexMatrix, Dims, LinalgError, Subsystem, Tolerances, C64,
};
use crate::states::{DensityMatrix, StateError};

#[derive(Debug, Error)]
pub enum CriteriaError {
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("state is not pure (largest eigenvalue {largest})")]
    NotPure { largest: f64 },
    #[error("operation requires a two-qubit state, got {da}x{db}")]
    NotTwoQubit { da: usize, db: usize },
    #[error("ket norm is {norm}, expected 1")]
    NotNormalized { norm: f64 },
    #[error("operator {which} is not a projector (defect {defect:.3e})")]
    NotProjector { which: usize, defect: f64 },
    #[error("projectors {i} and {j} are not orthogonal (overlap {overlap:.3e})")]
    NotOrthogonal { i: usize, j: usize, overlap: f64 },
    #[error("projector pair does not resolve the identity (defect {defect:.3e})")]
    IncompleteProjectors { defect: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// Outcome of a single criterion: `holds` is equivalent to `margin >= 0`,
/// and the margin is the signed distance to the decision threshold.
#[derive(Debug, Clone, Serialize)]
pub struct CriterionVerdict {
    pub holds: bool,
    pub margin: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<serde_json::Value>,
}

impl CriterionVerdict {
    fn new(margin: f64) -> Self {
        CriterionVerdict {
            holds: margin >= 0.0,
            margin,
            witness: None,
        }
    }

    fn with_witness(margin: f64, witness: serde_json::Value) -> Self {
        CriterionVerdict {
            holds: margin >= 0.0,
            margin,
            witness: Some(witness),
        }
    }
}

/// Local Bloch vectors and correlation tensor of a bipartite state in a
/// traceless Hermitian basis with Tr(s_m s_n) = 2 delta_mn per side.
#[derive(Debug, Clone, Serialize)]
pub struct FanoBloch {
    pub dims: Dims,
    /// Length d_A^2 - 1.
    pub a: Vec<f64>,
    /// Length d_B^2 - 1.
    pub b: Vec<f64>,
    /// Row index runs over the A basis, column over the B basis.
    pub t: Vec<Vec<f64>>,
}

fn tr_prod(x: &ComplexMatrix, y: &ComplexMatrix) -> C64 {
    debug_assert_eq!(x.cols(), y.rows());
    debug_assert_eq!(x.rows(), y.cols());
    let mut s = C64::default();
    for i in 0..x.rows() {
        for j in 0..x.cols() {
            s += x.get(i, j) * y.get(j, i);
        }
    }
    s
}

/// The fifteen two-qubit basis operators s_m (x) I, I (x) s_n, s_m (x) s_n,
/// cached because the hot search loops recompute Bloch data constantly.
fn two_qubit_basis() -> &'static (Vec<ComplexMatrix>, Vec<ComplexMatrix>, Vec<ComplexMatrix>) {
    static CELL: OnceLock<(Vec<ComplexMatrix>, Vec<ComplexMatrix>, Vec<ComplexMatrix>)> =
        OnceLock::new();
    CELL.get_or_init(|| {
        let paulis = hermitian_basis(2);
        let id = ComplexMatrix::identity(2);
        let a_side: Vec<_> = paulis.iter().map(|p| tensor(p, &id)).collect();
        let b_side: Vec<_> = paulis.iter().map(|p| tensor(&id, p)).collect();
        let mut corr = Vec::with_capacity(9);
        for pa in &paulis {
            for pb in &paulis {
                corr.push(tensor(pa, pb));
            }
        }
        (a_side, b_side, corr)
    })
}

/// Decomposition of rho over the product operator basis. Coefficients are
/// normalized so that reconstruction reads
/// rho = (1/(dA dB)) (I + sum a_m s_m(x)I + sum b_n I(x)s_n + sum t_mn s_m(x)s_n);
/// for qubits this makes a_m = tr(rho (s_m (x) I)) etc.
pub fn fano_bloch(rho: &DensityMatrix) -> FanoBloch {
    let dims = rho.dims();
    let m = rho.matrix();
    if rho.is_two_qubit() {
        let (a_ops, b_ops, t_ops) = two_qubit_basis();
        let a = a_ops.iter().map(|op| tr_prod(m, op).re).collect();
        let b = b_ops.iter().map(|op| tr_prod(m, op).re).collect();
        let t = (0..3)
            .map(|i| (0..3).map(|j| tr_prod(m, &t_ops[3 * i + j]).re).collect())
            .collect();
        return FanoBloch { dims, a, b, t };
    }
    let basis_a = hermitian_basis(dims.da);
    let basis_b = hermitian_basis(dims.db);
    let id_a = ComplexMatrix::identity(dims.da);
    let id_b = ComplexMatrix::identity(dims.db);
    let ca = dims.da as f64 / 2.0;
    let cb = dims.db as f64 / 2.0;
    let a = basis_a
        .iter()
        .map(|s| ca * tr_prod(m, &tensor(s, &id_b)).re)
        .collect();
    let b = basis_b
        .iter()
        .map(|s| cb * tr_prod(m, &tensor(&id_a, s)).re)
        .collect();
    let t = basis_a
        .iter()
        .map(|sa| {
            basis_b
                .iter()
                .map(|sb| ca * cb * tr_prod(m, &tensor(sa, sb)).re)
                .collect()
        })
        .collect();
    FanoBloch { dims, a, b, t }
}

/// Rebuilds the state matrix from its decomposition (exact inverse of
/// [`fano_bloch`] up to roundoff).
pub fn fano_reconstruct(fb: &FanoBloch) -> ComplexMatrix {
    let dims = fb.dims;
    let basis_a = hermitian_basis(dims.da);
    let basis_b = hermitian_basis(dims.db);
    let id_a = ComplexMatrix::identity(dims.da);
    let id_b = ComplexMatrix::identity(dims.db);
    let mut m = ComplexMatrix::identity(dims.total());
    for (coef, s) in fb.a.iter().zip(&basis_a) {
        m = m.add(&tensor(s, &id_b).scale(cr(*coef)));
    }
    for (coef, s) in fb.b.iter().zip(&basis_b) {
        m = m.add(&tensor(&id_a, s).scale(cr(*coef)));
    }
    for (i, sa) in basis_a.iter().enumerate() {
        for (j, sb) in basis_b.iter().enumerate() {
            m = m.add(&tensor(sa, sb).scale(cr(fb.t[i][j])));
        }
    }
    m.scale(cr(1.0 / dims.total() as f64))
}

fn vec_norm_sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

fn t_norm_sq(t: &[Vec<f64>]) -> f64 {
    t.iter().map(|row| vec_norm_sq(row)).sum()
}

/// t^T t for the 3x3 two-qubit correlation tensor.
fn t_gram(t: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut g = vec![vec![0.0; 3]; 3];
    for (i, gi) in g.iter_mut().enumerate() {
        for (j, gij) in gi.iter_mut().enumerate() {
            *gij = (0..3).map(|k| t[k][i] * t[k][j]).sum();
        }
    }
    g
}

fn require_two_qubit(rho: &DensityMatrix) -> Result<(), CriteriaError> {
    if !rho.is_two_qubit() {
        return Err(CriteriaError::NotTwoQubit {
            da: rho.dims().da,
            db: rho.dims().db,
        });
    }
    Ok(())
}

/// Frobenius distance to the product of the own marginals; a state factorizes
/// exactly when this distance vanishes.
pub fn is_product(rho: &DensityMatrix, tols: &Tolerances) -> Result<CriterionVerdict, CriteriaError> {
    let ra = partial_trace(rho.matrix(), rho.dims(), Subsystem::A)?;
    let rb = partial_trace(rho.matrix(), rho.dims(), Subsystem::B)?;
    let dist = rho.matrix().sub(&tensor(&ra, &rb)).frobenius_norm();
    Ok(CriterionVerdict::with_witness(
        tols.eq_tol - dist,
        json!({ "distance": dist }),
    ))
}

/// Residuals of the bilinear factorization conditions: the absolute values
/// of all 2x2 minors of the reshuffled matrix
/// R[(a1,a2),(b1,b2)] = rho[(a1,b1),(a2,b2)], which has rank one exactly for
/// product states. For two qubits this is the classical list of 36 entry
/// conditions (m11 m14 = m12 m13 and so on); all vanish iff rho = rhoA (x) rhoB.
pub fn product_condition_residuals(rho: &DensityMatrix) -> Vec<f64> {
    let dims = rho.dims();
    let m = rho.matrix();
    let (ra, ca) = (dims.da * dims.da, dims.db * dims.db);
    let r = ComplexMatrix::from_fn(ra, ca, |row, col| {
        let (a1, a2) = (row / dims.da, row % dims.da);
        let (b1, b2) = (col / dims.db, col % dims.db);
        m.get(dims.joint(a1, b1), dims.joint(a2, b2))
    });
    let mut out = Vec::new();
    for r1 in 0..ra {
        for r2 in (r1 + 1)..ra {
            for c1 in 0..ca {
                for c2 in (c1 + 1)..ca {
                    let minor = r.get(r1, c1) * r.get(r2, c2) - r.get(r1, c2) * r.get(r2, c1);
                    out.push(minor.norm());
                }
            }
        }
    }
    out
}

/// Pure-state separability: the marginal of a pure product state is pure, so
/// the verdict is S(rho_A) = 0 within tolerance. Requires a pure input.
pub fn is_separable_pure(
    rho: &DensityMatrix,
    tols: &Tolerances,
) -> Result<CriterionVerdict, CriteriaError> {
    let largest = rho.spectrum().max();
    if (largest - 1.0).abs() > 1e-8 {
        return Err(CriteriaError::NotPure { largest });
    }
    let s_a = von_neumann(&rho.reduced(Subsystem::A, tols)?);
    Ok(CriterionVerdict::with_witness(
        tols.eq_tol - s_a,
        json!({ "marginal_entropy": s_a }),
    ))
}

/// Positivity of the partial transpose. The margin is the smallest
/// eigenvalue of rho^{T_B} shifted by the positivity tolerance; for 2x2 and
/// 2x3 systems a nonnegative margin is equivalent to separability.
pub fn is_ppt(rho: &DensityMatrix, tols: &Tolerances) -> Result<CriterionVerdict, CriteriaError> {
    let pt = partial_transpose(rho.matrix(), rho.dims(), Subsystem::B)?;
    let (vals, _) = hermitian_eig(&pt, tols)?;
    Ok(CriterionVerdict::with_witness(
        vals.min() + tols.psd_tol,
        json!({ "min_eigenvalue": vals.min() }),
    ))
}

/// Largest attainable CHSH expectation 2 sqrt(mu1 + mu2), where mu1, mu2 are
/// the two largest eigenvalues of t^T t. The verdict reports nonlocality
/// (value > 2). Two-qubit only.
pub fn chsh_max(
    rho: &DensityMatrix,
    tols: &Tolerances,
) -> Result<(f64, CriterionVerdict), CriteriaError> {
    require_two_qubit(rho)?;
    let fb = fano_bloch(rho);
    let gram = t_gram(&fb.t);
    let mu = symmetric_eigenvalues(&gram, tols)?;
    let value = 2.0 * (mu.get(0).max(0.0) + mu.get(1).max(0.0)).sqrt();
    let verdict = CriterionVerdict::with_witness(
        value - 2.0,
        json!({ "mu": [mu.get(0), mu.get(1)] }),
    );
    Ok((value, verdict))
}

/// Best violation of the three-setting steering inequality: the maximum of
/// (1/sqrt 3) |sum_i <A_i (x) B_i>| over an orthonormal triad of A-axes and
/// unit B-axes. For a fixed triad the optimal B-axes give
/// (1/sqrt 3) sum_i |t^T a_i|; a triad equalizing the three quadratic forms
/// a_i^T (t t^T) a_i maximizes that concave sum (such a basis always
/// exists), so the maximum is the Frobenius norm of t. The verdict reports
/// steerability (value > 1).
pub fn steerable_three(
    rho: &DensityMatrix,
    tols: &Tolerances,
) -> Result<(f64, CriterionVerdict), CriteriaError> {
    require_two_qubit(rho)?;
    let fb = fano_bloch(rho);
    let gram = t_gram(&fb.t);
    let mu = symmetric_eigenvalues(&gram, tols)?;
    let singular: Vec<f64> = mu.values().iter().map(|&x| x.max(0.0).sqrt()).collect();
    let value = singular.iter().map(|s| s * s).sum::<f64>().sqrt();
    let verdict = CriterionVerdict::with_witness(
        value - 1.0,
        json!({ "singular_values": singular }),
    );
    Ok((value, verdict))
}

/// Bloch-space zero-discord test for measurements on A: with x the A Bloch
/// vector and K = x x^T + t t^T, the state is undisturbed by some projective
/// measurement on A iff |x|^2 + |t|^2 equals the largest eigenvalue of K.
/// The margin is tolerance minus that gap (the gap is never negative).
pub fn zero_discord_dakic(
    rho: &DensityMatrix,
    tols: &Tolerances,
) -> Result<CriterionVerdict, CriteriaError> {
    require_two_qubit(rho)?;
    let fb = fano_bloch(rho);
    let mut k = vec![vec![0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            k[i][j] = fb.a[i] * fb.a[j] + (0..3).map(|n| fb.t[i][n] * fb.t[j][n]).sum::<f64>();
        }
    }
    let k_max = symmetric_eigenvalues(&k, tols)?.max();
    let gap = vec_norm_sq(&fb.a) + t_norm_sq(&fb.t) - k_max;
    Ok(CriterionVerdict::with_witness(
        tols.eq_tol - gap,
        json!({ "gap": gap }),
    ))
}

fn blocks_of(rho: &DensityMatrix, measured: Subsystem) -> Vec<ComplexMatrix> {
    let dims = rho.dims();
    let m = rho.matrix();
    match measured {
        // Measurement on A leaves the state undisturbed for some basis iff
        // the dA x dA operators (I (x) <mu|) rho (I (x) |nu>) are normal and
        // mutually commuting.
        Subsystem::A => {
            let mut blocks = Vec::with_capacity(dims.db * dims.db);
            for mu in 0..dims.db {
                for nu in 0..dims.db {
                    blocks.push(ComplexMatrix::from_fn(dims.da, dims.da, |a1, a2| {
                        m.get(dims.joint(a1, mu), dims.joint(a2, nu))
                    }));
                }
            }
            blocks
        }
        // Mirror image: dB x dB operators (<m| (x) I) rho (|n> (x) I).
        Subsystem::B => {
            let mut blocks = Vec::with_capacity(dims.da * dims.da);
            for am in 0..dims.da {
                for an in 0..dims.da {
                    blocks.push(ComplexMatrix::from_fn(dims.db, dims.db, |b1, b2| {
                        m.get(dims.joint(am, b1), dims.joint(an, b2))
                    }));
                }
            }
            blocks
        }
    }
}

/// Block criterion for vanishing discord under measurements on `measured`:
/// all blocks must be normal and pairwise commuting. Works for any dims.
pub fn zero_discord_blocks(
    rho: &DensityMatrix,
    measured: Subsystem,
    tols: &Tolerances,
) -> Result<CriterionVerdict, CriteriaError> {
    let blocks = blocks_of(rho, measured);
    let scale = tols.eq_tol * (1.0 + rho.matrix().frobenius_norm());
    let mut worst = 0.0f64;
    let mut witness = json!(null);
    for (i, x) in blocks.iter().enumerate() {
        let normality = commutator(x, &x.adjoint()).frobenius_norm();
        if normality > worst {
            worst = normality;
            witness = json!({ "kind": "normality", "block": i, "defect": normality });
        }
        for (j, y) in blocks.iter().enumerate().skip(i + 1) {
            let comm = commutator(x, y).frobenius_norm();
            if comm > worst {
                worst = comm;
                witness = json!({ "kind": "commutator", "blocks": [i, j], "defect": comm });
            }
        }
    }
    Ok(CriterionVerdict::with_witness(scale - worst, witness))
}

/// How a bipartite state embeds classical randomness on each side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classicality {
    /// Diagonal in a product basis; both measurements can leave it fixed.
    ClassicalClassical,
    /// Classical on A only (a mixture of A-basis blocks).
    ClassicalQuantum,
    /// Classical on B only.
    QuantumClassical,
    /// Classical on neither side.
    QuantumQuantum,
}

/// Classifies by the two block criteria: classical on A means measurement on
/// A can leave the state fixed (zero discord with A measured), and likewise
/// for B.
pub fn classify_ccq(
    rho: &DensityMatrix,
    tols: &Tolerances,
) -> Result<Classicality, CriteriaError> {
    let classical_a = zero_discord_blocks(rho, Subsystem::A, tols)?.holds;
    let classical_b = zero_discord_blocks(rho, Subsystem::B, tols)?.holds;
    Ok(match (classical_a, classical_b) {
        (true, true) => Classicality::ClassicalClassical,
        (true, false) => Classicality::ClassicalQuantum,
        (false, true) => Classicality::QuantumClassical,
        (false, false) => Classicality::QuantumQuantum,
    })
}

/// Projective-measurement discord for two qubits, minimized numerically.
///
/// For a measurement along unit vector n on the measured side the outcome
/// probabilities and conditional Bloch vectors have closed forms in the
/// decomposition data, so the objective is cheap; the minimizer is a
/// 64x64 sphere grid followed by Nelder-Mead refinement from the five best
/// grid points. Returns D(other|measured) in bits, clamped at zero.
pub fn discord_numeric(
    rho: &DensityMatrix,
    measured: Subsystem,
    tols: &Tolerances,
) -> Result<f64, CriteriaError> {
    require_two_qubit(rho)?;
    let fb = fano_bloch(rho);
    let report = entropy_report(rho, tols)?;
    let (s_meas, local, tmap): (f64, [f64; 3], Box<dyn Fn(&[f64; 3]) -> [f64; 3]>) = match measured
    {
        Subsystem::A => (
            report.s_a,
            [fb.a[0], fb.a[1], fb.a[2]],
            Box::new({
                let t = fb.t.clone();
                move |n: &[f64; 3]| {
                    let mut out = [0.0; 3];
                    for (j, o) in out.iter_mut().enumerate() {
                        *o = (0..3).map(|i| t[i][j] * n[i]).sum();
                    }
                    out
                }
            }),
        ),
        Subsystem::B => (
            report.s_b,
            [fb.b[0], fb.b[1], fb.b[2]],
            Box::new({
                let t = fb.t.clone();
                move |n: &[f64; 3]| {
                    let mut out = [0.0; 3];
                    for (i, o) in out.iter_mut().enumerate() {
                        *o = (0..3).map(|j| t[i][j] * n[j]).sum();
                    }
                    out
                }
            }),
        ),
    };
    let other = match measured {
        Subsystem::A => [fb.b[0], fb.b[1], fb.b[2]],
        Subsystem::B => [fb.a[0], fb.a[1], fb.a[2]],
    };

    let objective = |theta: f64, phi: f64| -> f64 {
        let n = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
        let m = tmap(&n);
        let ln = local[0] * n[0] + local[1] * n[1] + local[2] * n[2];
        let mut s = 0.0;
        for sign in [1.0, -1.0] {
            let p = 0.5 * (1.0 + sign * ln);
            if p > 1e-15 {
                let u = [
                    other[0] + sign * m[0],
                    other[1] + sign * m[1],
                    other[2] + sign * m[2],
                ];
                let r = (vec_norm_sq(&u).sqrt() / (2.0 * p)).min(1.0);
                s += p * binary_entropy(0.5 * (1.0 + r));
            }
        }
        s
    };

    const GRID: usize = 64;
    let mut samples: Vec<(f64, f64, f64)> = Vec::with_capacity(GRID * GRID);
    for i in 0..GRID {
        let theta = std::f64::consts::PI * (i as f64 + 0.5) / GRID as f64;
        for j in 0..GRID {
            let phi = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / GRID as f64;
            samples.push((objective(theta, phi), theta, phi));
        }
    }
    samples.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite objective"));
    let mut best = samples[0].0;
    let step = std::f64::consts::PI / GRID as f64;
    for &(_, theta, phi) in samples.iter().take(5) {
        let refined = nelder_mead(&objective, (theta, phi), step, 200);
        best = best.min(refined);
    }

    let d = s_meas - report.s_joint + best;
    debug_assert!(d > -1e-6, "discord evaluated to {d}");
    Ok(d.max(0.0))
}

/// Minimizes f over two unconstrained angles from one starting simplex.
fn nelder_mead(f: &dyn Fn(f64, f64) -> f64, start: (f64, f64), scale: f64, iters: usize) -> f64 {
    let mut pts = [
        start,
        (start.0 + scale, start.1),
        (start.0, start.1 + scale),
    ];
    let mut vals = [f(pts[0].0, pts[0].1), f(pts[1].0, pts[1].1), f(pts[2].0, pts[2].1)];
    for _ in 0..iters {
        // Order best -> worst.
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&a, &b| vals[a].partial_cmp(&vals[b]).expect("finite objective"));
        let (b, m, w) = (idx[0], idx[1], idx[2]);
        if (vals[w] - vals[b]).abs() < 1e-13 {
            break;
        }
        let centroid = (
            0.5 * (pts[b].0 + pts[m].0),
            0.5 * (pts[b].1 + pts[m].1),
        );
        let refl = (
            centroid.0 + (centroid.0 - pts[w].0),
            centroid.1 + (centroid.1 - pts[w].1),
        );
        let f_refl = f(refl.0, refl.1);
        if f_refl < vals[b] {
            let exp = (
                centroid.0 + 2.0 * (centroid.0 - pts[w].0),
                centroid.1 + 2.0 * (centroid.1 - pts[w].1),
            );
            let f_exp = f(exp.0, exp.1);
            if f_exp < f_refl {
                pts[w] = exp;
                vals[w] = f_exp;
            } else {
                pts[w] = refl;
                vals[w] = f_refl;
            }
        } else if f_refl < vals[m] {
            pts[w] = refl;
            vals[w] = f_refl;
        } else {
            let contr = (
                centroid.0 + 0.5 * (pts[w].0 - centroid.0),
                centroid.1 + 0.5 * (pts[w].1 - centroid.1),
            );
            let f_contr = f(contr.0, contr.1);
            if f_contr < vals[w] {
                pts[w] = contr;
                vals[w] = f_contr;
            } else {
                for i in [m, w] {
                    pts[i] = (
                        0.5 * (pts[i].0 + pts[b].0),
                        0.5 * (pts[i].1 + pts[b].1),
                    );
                    vals[i] = f(pts[i].0, pts[i].1);
                }
            }
        }
    }
    vals.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Two-outcome weak measurement: an interpolation between no measurement
/// (xi = 0) and the projective pair (xi -> infinity), built from orthogonal
/// projectors that resolve the identity.
#[derive(Debug, Clone)]
pub struct WeakMeasurementPair {
    pi1: ComplexMatrix,
    pi2: ComplexMatrix,
    xi: f64,
}

impl WeakMeasurementPair {
    pub fn new(
        pi1: ComplexMatrix,
        pi2: ComplexMatrix,
        xi: f64,
        tols: &Tolerances,
    ) -> Result<Self, CriteriaError> {
        for (which, p) in [(0usize, &pi1), (1, &pi2)] {
            let d = p.square_dim()?;
            let herm = p.hermiticity_defect();
            let idem = p.mul(p).max_abs_diff(p);
            if herm > tols.herm_tol || idem > 1e-9 {
                return Err(CriteriaError::NotProjector {
                    which,
                    defect: herm.max(idem),
                });
            }
            if d != pi1.rows() {
                return Err(CriteriaError::DimensionMismatch(
                    "projector dimensions differ".into(),
                ));
            }
        }
        let overlap = pi1.mul(&pi2).frobenius_norm();
        if overlap > 1e-9 {
            return Err(CriteriaError::NotOrthogonal {
                i: 0,
                j: 1,
                overlap,
            });
        }
        let completeness = pi1
            .add(&pi2)
            .max_abs_diff(&ComplexMatrix::identity(pi1.rows()));
        if completeness > 1e-9 {
            return Err(CriteriaError::IncompleteProjectors {
                defect: completeness,
            });
        }
        Ok(WeakMeasurementPair { pi1, pi2, xi })
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    /// P(+xi) = sqrt((1 - tanh xi)/2) P1 + sqrt((1 + tanh xi)/2) P2, and
    /// P(-xi) swaps the coefficients. P(xi)^2 + P(-xi)^2 = I.
    pub fn operator(&self, positive_branch: bool) -> ComplexMatrix {
        let tanh = self.xi.tanh();
        let (c1, c2) = if positive_branch {
            (((1.0 - tanh) / 2.0).sqrt(), ((1.0 + tanh) / 2.0).sqrt())
        } else {
            (((1.0 + tanh) / 2.0).sqrt(), ((1.0 - tanh) / 2.0).sqrt())
        };
        self.pi1.scale(cr(c1)).add(&self.pi2.scale(cr(c2)))
    }
}

/// Result of applying a weak measurement pair to one side of a state.
#[derive(Debug, Clone)]
pub struct WeakMeasurementOutcome {
    pub p_plus: f64,
    pub p_minus: f64,
    /// Conditional states of the unmeasured subsystem.
    pub post_plus: DensityMatrix,
    pub post_minus: DensityMatrix,
    /// sum_x p(x) S(post_x) in bits.
    pub cond_entropy: f64,
}

/// Applies the pair on `side` and returns outcome probabilities, conditional
/// states of the other side, and the measured conditional entropy.
pub fn weak_measure(
    rho: &DensityMatrix,
    side: Subsystem,
    wm: &WeakMeasurementPair,
    tols: &Tolerances,
) -> Result<WeakMeasurementOutcome, CriteriaError> {
    let dims = rho.dims();
    let d_side = match side {
        Subsystem::A => dims.da,
        Subsystem::B => dims.db,
    };
    if wm.pi1.rows() != d_side {
        return Err(CriteriaError::DimensionMismatch(format!(
            "measurement is {}-dimensional but side has dimension {}",
            wm.pi1.rows(),
            d_side
        )));
    }
    let keep = match side {
        Subsystem::A => Subsystem::B,
        Subsystem::B => Subsystem::A,
    };
    let branch = |positive: bool| -> Result<(f64, DensityMatrix), CriteriaError> {
        let p_op = wm.operator(positive);
        let full = match side {
            Subsystem::A => tensor(&p_op, &ComplexMatrix::identity(dims.db)),
            Subsystem::B => tensor(&ComplexMatrix::identity(dims.da), &p_op),
        };
        let sandwich = full.mul(rho.matrix()).mul(&full.adjoint());
        let p = sandwich.trace().re;
        let reduced = partial_trace(&sandwich, dims, keep)?;
        let d_other = reduced.rows();
        let post = if p > 1e-12 {
            DensityMatrix::new(reduced.scale(cr(1.0 / p)), Dims::new(d_other, 1), tols)?
        } else {
            // Outcome never occurs; an arbitrary valid state keeps the
            // record well-formed and contributes nothing below.
            DensityMatrix::new(
                ComplexMatrix::identity(d_other).scale(cr(1.0 / d_other as f64)),
                Dims::new(d_other, 1),
                tols,
            )?
        };
        Ok((p, post))
    };
    let (p_plus, post_plus) = branch(true)?;
    let (p_minus, post_minus) = branch(false)?;
    let cond_entropy = p_plus * von_neumann(&post_plus) + p_minus * von_neumann(&post_minus);
    Ok(WeakMeasurementOutcome {
        p_plus,
        p_minus,
        post_plus,
        post_minus,
        cond_entropy,
    })
}

/// Weak-measurement discord vanishes for every measurement strength and
/// basis exactly when the state is a product state, i.e. when the mutual
/// information is zero — which is what the margin tests.
pub fn zero_super_discord(
    rho: &DensityMatrix,
    tols: &Tolerances,
) -> Result<CriterionVerdict, CriteriaError> {
    let report = entropy_report(rho, tols)?;
    Ok(CriterionVerdict::with_witness(
        tols.eq_tol - report.mutual,
        json!({ "mutual_information": report.mutual }),
    ))
}

/// Five-projector contextuality value <psi| sum_i P_i |psi> under the cyclic
/// orthogonality constraint P_i P_{i+1} = 0 (indices mod 5). Values above 2
/// are impossible for noncontextual assignments.
pub fn kcbs_value(
    psi: &[C64],
    projectors: &[ComplexMatrix],
    tols: &Tolerances,
) -> Result<(f64, CriterionVerdict), CriteriaError> {
    let d = psi.len();
    if d < 3 {
        return Err(CriteriaError::DimensionMismatch(format!(
            "state dimension {d} < 3"
        )));
    }
    if projectors.len() != 5 {
        return Err(CriteriaError::DimensionMismatch(format!(
            "expected 5 projectors, got {}",
            projectors.len()
        )));
    }
    let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(CriteriaError::NotNormalized { norm });
    }
    for (which, p) in projectors.iter().enumerate() {
        if p.square_dim()? != d {
            return Err(CriteriaError::DimensionMismatch(format!(
                "projector {which} does not match the state dimension"
            )));
        }
        let herm = p.hermiticity_defect();
        let idem = p.mul(p).max_abs_diff(p);
        if herm > tols.herm_tol || idem > 1e-9 {
            return Err(CriteriaError::NotProjector {
                which,
                defect: herm.max(idem),
            });
        }
    }
    for i in 0..5 {
        let j = (i + 1) % 5;
        let overlap = projectors[i].mul(&projectors[j]).frobenius_norm();
        if overlap > 1e-9 {
            return Err(CriteriaError::NotOrthogonal { i, j, overlap });
        }
    }
    let mut value = 0.0;
    for p in projectors {
        let mut s = C64::default();
        for r in 0..d {
            for c_ in 0..d {
                s += psi[r].conj() * p.get(r, c_) * psi[c_];
            }
        }
        value += s.re;
    }
    let verdict = CriterionVerdict::new(value - 2.0);
    Ok((value, verdict))
}

/// The standard five-cycle projector family in dimension 3: unit vectors on
/// a cone around the z-axis at azimuths 4 pi j / 5, with the cone angle
/// chosen so neighbours are orthogonal. The axis state |2> then scores
/// sqrt(5) > 2.
pub fn kcbs_pentagram() -> Vec<ComplexMatrix> {
    let cos_pi5 = (std::f64::consts::PI / 5.0).cos();
    let cos2 = cos_pi5 / (1.0 + cos_pi5);
    let (ct, st) = (cos2.sqrt(), (1.0 - cos2).sqrt());
    (0..5)
        .map(|j| {
            let az = 4.0 * std::f64::consts::PI * j as f64 / 5.0;
            let v = [cr(st * az.cos()), cr(st * az.sin()), cr(ct)];
            ComplexMatrix::outer(&v)
        })
        .collect()
}
