//! Density matrices and the named families used throughout the crate.
//!
//! Construction always validates: Hermiticity and unit trace within the
//! configured tolerances, positive semidefiniteness via the eigenvalue floor.
//! A [`DensityMatrix`] therefore always carries its spectrum (descending),
//! which most downstream criteria consume directly.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{
    c, conjugate_by, cr, hermitian_eig, partial_trace, tensor, ComplexMatrix, Dims, LinalgError,
    Spectrum, Subsystem, Tolerances, C64,
};

#[derive(Debug, Error)]
pub enum StateError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },
    #[error("trace is {trace:.12}, expected 1")]
    NotUnitTrace { trace: f64 },
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eig:.3e})")]
    NotPsd { min_eig: f64 },
    #[error("parameter {name} = {value} outside [{lo}, {hi}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not unitary (defect {defect:.3e})")]
    NotUnitary { defect: f64 },
    #[error("rank must be in 1..={max}, got {rank}")]
    BadRank { rank: usize, max: usize },
    #[error("state file: {0}")]
    Format(String),
}

/// Bipartite density matrix with its descending spectrum attached.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    dims: Dims,
    spectrum: Spectrum,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity, then stores the
    /// eigenvalues computed along the way.
    pub fn new(matrix: ComplexMatrix, dims: Dims, tols: &Tolerances) -> Result<Self, StateError> {
        let n = matrix.square_dim()?;
        if n != dims.total() {
            return Err(StateError::DimensionMismatch(format!(
                "matrix is {n}x{n} but dims are {}x{}",
                dims.da, dims.db
            )));
        }
        let defect = matrix.hermiticity_defect();
        if defect > tols.herm_tol {
            return Err(StateError::NotHermitian { defect });
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > tols.herm_tol.max(1e-9) || trace.im.abs() > tols.herm_tol {
            return Err(StateError::NotUnitTrace { trace: trace.re });
        }
        let (spectrum, _) = hermitian_eig(&matrix, tols)?;
        if spectrum.min() < -tols.psd_tol {
            return Err(StateError::NotPsd {
                min_eig: spectrum.min(),
            });
        }
        Ok(DensityMatrix {
            matrix,
            dims,
            spectrum,
        })
    }

    /// Wraps a matrix known to be a valid state with an already-known
    /// spectrum (global-unitary images, reductions). Hermiticity and trace
    /// are still asserted cheaply; the eigendecomposition is not repeated.
    pub(crate) fn trusted(matrix: ComplexMatrix, dims: Dims, spectrum: Spectrum) -> Self {
        debug_assert!(matrix.hermiticity_defect() < 1e-8);
        debug_assert!((matrix.trace().re - 1.0).abs() < 1e-8);
        DensityMatrix {
            matrix,
            dims,
            spectrum,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn dim_total(&self) -> usize {
        self.dims.total()
    }

    /// Eigenvalues, descending.
    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn purity(&self) -> f64 {
        self.spectrum.purity()
    }

    pub fn is_two_qubit(&self) -> bool {
        self.dims.da == 2 && self.dims.db == 2
    }

    /// Reduced state of one subsystem.
    pub fn reduced(&self, keep: Subsystem, tols: &Tolerances) -> Result<DensityMatrix, StateError> {
        let m = partial_trace(&self.matrix, self.dims, keep)?;
        let d = m.rows();
        let (spectrum, _) = hermitian_eig(&m, tols)?;
        Ok(DensityMatrix::trusted(m, Dims::new(d, 1), spectrum))
    }

    /// Image under a global unitary, u rho u†. The spectrum is carried over
    /// unchanged (it is invariant); Hermiticity is restored by averaging to
    /// keep roundoff from accumulating across repeated conjugations.
    pub fn conjugated(&self, u: &UnitaryMatrix) -> Result<DensityMatrix, StateError> {
        if u.dim() != self.dim_total() {
            return Err(StateError::DimensionMismatch(format!(
                "unitary is {0}x{0} but state is {1}x{1}",
                u.dim(),
                self.dim_total()
            )));
        }
        let raw = conjugate_by(u.matrix(), &self.matrix);
        let n = raw.rows();
        let sym = ComplexMatrix::from_fn(n, n, |r, c_| {
            (raw.get(r, c_) + raw.get(c_, r).conj()) * cr(0.5)
        });
        Ok(DensityMatrix::trusted(
            sym,
            self.dims,
            self.spectrum.clone(),
        ))
    }

    /// Serializes as `{"dims": [dA, dB], "matrix": [[[re, im], ...], ...]}`.
    pub fn to_json(&self) -> String {
        let file = StateFile {
            dims: [self.dims.da, self.dims.db],
            matrix: self.matrix.to_entry_rows(),
        };
        serde_json::to_string_pretty(&file).expect("state serialization cannot fail")
    }

    pub fn from_json(text: &str, tols: &Tolerances) -> Result<Self, StateError> {
        let file: StateFile =
            serde_json::from_str(text).map_err(|e| StateError::Format(e.to_string()))?;
        let matrix = ComplexMatrix::from_entry_rows(&file.matrix)?;
        DensityMatrix::new(matrix, Dims::new(file.dims[0], file.dims[1]), tols)
    }
}

#[derive(Serialize, Deserialize)]
struct StateFile {
    dims: [usize; 2],
    matrix: Vec<Vec<[f64; 2]>>,
}

/// Square matrix validated to be unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    matrix: ComplexMatrix,
}

impl UnitaryMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self, StateError> {
        matrix.square_dim()?;
        let defect = matrix.unitarity_defect();
        if defect > 1e-8 {
            return Err(StateError::NotUnitary { defect });
        }
        Ok(UnitaryMatrix { matrix })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn mul(&self, other: &UnitaryMatrix) -> UnitaryMatrix {
        UnitaryMatrix {
            matrix: self.matrix.mul(&other.matrix),
        }
    }

    pub fn adjoint(&self) -> UnitaryMatrix {
        UnitaryMatrix {
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn to_entry_rows(&self) -> Vec<Vec<[f64; 2]>> {
        self.matrix.to_entry_rows()
    }
}

/// The four maximally entangled two-qubit basis states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BellState {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [
        BellState::PhiPlus,
        BellState::PhiMinus,
        BellState::PsiPlus,
        BellState::PsiMinus,
    ];

    /// Ket in the product basis |00>, |01>, |10>, |11>.
    pub fn ket(self) -> Vec<C64> {
        let r = cr(std::f64::consts::FRAC_1_SQRT_2);
        match self {
            BellState::PhiPlus => vec![r, cr(0.0), cr(0.0), r],
            BellState::PhiMinus => vec![r, cr(0.0), cr(0.0), -r],
            BellState::PsiPlus => vec![cr(0.0), r, r, cr(0.0)],
            BellState::PsiMinus => vec![cr(0.0), r, -r, cr(0.0)],
        }
    }
}

impl std::str::FromStr for BellState {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "phi+" | "phiplus" | "phi_plus" => Ok(BellState::PhiPlus),
            "phi-" | "phiminus" | "phi_minus" => Ok(BellState::PhiMinus),
            "psi+" | "psiplus" | "psi_plus" => Ok(BellState::PsiPlus),
            "psi-" | "psiminus" | "psi_minus" => Ok(BellState::PsiMinus),
            other => Err(format!("unknown Bell state {other:?}")),
        }
    }
}

const TWO_QUBITS: Dims = Dims { da: 2, db: 2 };

/// Projector onto a Bell state.
pub fn bell(which: BellState) -> DensityMatrix {
    let m = ComplexMatrix::outer(&which.ket());
    DensityMatrix::new(m, TWO_QUBITS, &Tolerances::default()).expect("Bell projectors are states")
}

/// Two-qubit state with maximally mixed marginals and diagonal correlation
/// tensor (t1, t2, t3): rho = (1/4)(I + sum_i t_i s_i (x) s_i).
///
/// Rejects parameter triples outside the state tetrahedron (the matrix built
/// from them fails positivity).
pub fn weyl(t: [f64; 3], tols: &Tolerances) -> Result<DensityMatrix, StateError> {
    let mut m = ComplexMatrix::identity(4);
    for i in 0..3 {
        let p = crate::linalg::pauli(i + 1);
        m = m.add(&tensor(&p, &p).scale(cr(t[i])));
    }
    DensityMatrix::new(m.scale(cr(0.25)), TWO_QUBITS, tols)
}

/// Singlet weight w on the maximally mixed background:
/// rho = w |psi-><psi-| + (1-w)/4 I. Valid for w in [-1/3, 1].
pub fn werner(w: f64, tols: &Tolerances) -> Result<DensityMatrix, StateError> {
    if !(-1.0 / 3.0 - 1e-12..=1.0 + 1e-12).contains(&w) {
        return Err(StateError::OutOfRange {
            name: "w",
            value: w,
            lo: -1.0 / 3.0,
            hi: 1.0,
        });
    }
    let singlet = ComplexMatrix::outer(&BellState::PsiMinus.ket());
    let m = singlet
        .scale(cr(w))
        .add(&ComplexMatrix::identity(4).scale(cr((1.0 - w) / 4.0)));
    DensityMatrix::new(m, TWO_QUBITS, tols)
}

/// lambda |psi_theta><psi_theta| + (1-lambda) rho_top, with
/// psi_theta = sin(theta)|01> + cos(theta)|10> and
/// rho_top = (|00><00| + |11><11|)/2. lambda in [0,1], theta in [0, pi/2].
pub fn gisin(lambda: f64, theta: f64, tols: &Tolerances) -> Result<DensityMatrix, StateError> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(StateError::OutOfRange {
            name: "lambda",
            value: lambda,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let half_pi = std::f64::consts::FRAC_PI_2;
    if !(0.0..=half_pi + 1e-12).contains(&theta) {
        return Err(StateError::OutOfRange {
            name: "theta",
            value: theta,
            lo: 0.0,
            hi: half_pi,
        });
    }
    let (s, co) = theta.sin_cos();
    let psi = vec![cr(0.0), cr(s), cr(co), cr(0.0)];
    let mut m = ComplexMatrix::outer(&psi).scale(cr(lambda));
    let top = (1.0 - lambda) / 2.0;
    m.set(0, 0, m.get(0, 0) + cr(top));
    m.set(3, 3, m.get(3, 3) + cr(top));
    DensityMatrix::new(m, TWO_QUBITS, tols)
}

/// Haar-distributed random unitary: QR factorization of a complex Ginibre
/// matrix, with the R diagonal kept real positive so the factor is unique
/// (and therefore Haar). Deterministic for a fixed generator state.
pub fn haar_unitary<R: Rng>(d: usize, rng: &mut R) -> UnitaryMatrix {
    loop {
        let g = ComplexMatrix::from_fn(d, d, |_, _| {
            c(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        if let Some(q) = gram_schmidt_columns(&g) {
            return UnitaryMatrix::new(q).expect("orthonormalized columns are unitary");
        }
    }
}

/// Modified Gram-Schmidt with one re-orthogonalization pass. Returns None on
/// (measure-zero) rank deficiency so the caller can resample.
fn gram_schmidt_columns(g: &ComplexMatrix) -> Option<ComplexMatrix> {
    let d = g.rows();
    let mut cols: Vec<Vec<C64>> = (0..d).map(|j| (0..d).map(|i| g.get(i, j)).collect()).collect();
    for j in 0..d {
        for _pass in 0..2 {
            for i in 0..j {
                let proj: C64 = (0..d).map(|k| cols[i][k].conj() * cols[j][k]).sum();
                for k in 0..d {
                    let v = cols[i][k];
                    cols[j][k] -= proj * v;
                }
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return None;
        }
        for k in 0..d {
            cols[j][k] /= cr(norm);
        }
    }
    Some(ComplexMatrix::from_fn(d, d, |r, c_| cols[c_][r]))
}

/// Interaction angles of the two-qubit canonical form
/// exp(-i (l1 sx(x)sx + l2 sy(x)sy + l3 sz(x)sz)).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CartanAngles {
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
}

/// Closed form of the canonical interaction unitary. The three generators
/// commute, so the matrix splits into the {|00>,|11>} block rotated by
/// l1 - l2 and the {|01>,|10>} block rotated by l1 + l2, with opposite
/// sz(x)sz phases.
pub fn cartan_unitary(angles: CartanAngles) -> UnitaryMatrix {
    let CartanAngles { l1, l2, l3 } = angles;
    let d = l1 - l2;
    let s = l1 + l2;
    let em = C64::from_polar(1.0, -l3);
    let ep = C64::from_polar(1.0, l3);
    let mut m = ComplexMatrix::zeros(4, 4);
    m.set(0, 0, em * cr(d.cos()));
    m.set(0, 3, em * c(0.0, -d.sin()));
    m.set(3, 0, em * c(0.0, -d.sin()));
    m.set(3, 3, em * cr(d.cos()));
    m.set(1, 1, ep * cr(s.cos()));
    m.set(1, 2, cr(s.sin()) * c(l3.sin(), -l3.cos()));
    m.set(2, 1, cr(s.sin()) * c(l3.sin(), -l3.cos()));
    m.set(2, 2, ep * cr(s.cos()));
    UnitaryMatrix::new(m).expect("closed form is unitary")
}

/// Phases of a single-qubit special unitary
/// [[e^{i a} cos f, e^{i b} sin f], [-e^{-i b} sin f, e^{-i a} cos f]].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalPhases {
    pub alpha: f64,
    pub beta: f64,
    pub phi: f64,
}

impl LocalPhases {
    pub const IDENTITY: LocalPhases = LocalPhases {
        alpha: 0.0,
        beta: 0.0,
        phi: 0.0,
    };
}

/// Single-qubit SU(2) element from its phase parameterization.
pub fn su2(p: LocalPhases) -> UnitaryMatrix {
    let (s, co) = p.phi.sin_cos();
    let m = ComplexMatrix::from_rows(&[
        vec![C64::from_polar(co, p.alpha), C64::from_polar(s, p.beta)],
        vec![-C64::from_polar(s, -p.beta), C64::from_polar(co, -p.alpha)],
    ])
    .expect("static shape");
    UnitaryMatrix::new(m).expect("parameterization is unitary")
}

/// Product of independent single-qubit unitaries, U_A (x) U_B.
pub fn local_unitary(a: LocalPhases, b: LocalPhases) -> UnitaryMatrix {
    UnitaryMatrix::new(tensor(su2(a).matrix(), su2(b).matrix()))
        .expect("tensor of unitaries is unitary")
}

/// Haar-random ket of dimension d.
pub fn random_ket<R: Rng>(d: usize, rng: &mut R) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..d)
            .map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|z| z / cr(norm)).collect();
        }
    }
}

/// Random mixed state of the given rank: G G† / tr(G G†) with G a
/// (d_A d_B) x rank complex Ginibre matrix.
pub fn random_density<R: Rng>(
    dims: Dims,
    rank: usize,
    rng: &mut R,
    tols: &Tolerances,
) -> Result<DensityMatrix, StateError> {
    let n = dims.total();
    if rank == 0 || rank > n {
        return Err(StateError::BadRank { rank, max: n });
    }
    let g = ComplexMatrix::from_fn(n, rank, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let gg = g.mul(&g.adjoint());
    let tr = gg.trace().re;
    DensityMatrix::new(gg.scale(cr(1.0 / tr)), dims, tols)
}

/// Seeded generator with a documented algorithm; substream selection keeps
/// parallel corpora reproducible.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent substream of the same seed.
pub fn seeded_rng_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
