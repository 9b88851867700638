//! Spectrum-only ("absolute") criteria: properties that survive every
//! global unitary, decided from the eigenvalues alone, plus a randomized
//! search that tries to falsify them by exhibiting a conjugation that
//! breaks the ordinary property.
//!
//! Eigenvalue indices follow the descending convention of
//! [`Spectrum`](crate::linalg::Spectrum): `d1 >= d2 >= ...`.

use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::criteria::{
    chsh_max, is_ppt, is_product, steerable_three, zero_discord_dakic, CriteriaError,
    CriterionVerdict,
};
use crate::entropy::{entropy_report, shannon};
use crate::linalg::{
    cr, symmetric_eigenvalues, tensor, ComplexMatrix, Dims, LinalgError, Spectrum, Tolerances,
};
use crate::states::{
    cartan_unitary, haar_unitary, seeded_rng, CartanAngles, DensityMatrix, StateError,
    UnitaryMatrix,
};

#[derive(Debug, Error)]
pub enum AbsoluteError {
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Criteria(#[from] CriteriaError),
    #[error("spectrum has {got} entries, expected {want}")]
    SpectrumLength { got: usize, want: usize },
    #[error("criterion is not available for {da}x{db} systems ({detail})")]
    UnsupportedDims {
        da: usize,
        db: usize,
        detail: &'static str,
    },
    #[error("no counterexample within {budget} candidates (best margin {best_margin:.6e})")]
    BudgetExhausted { budget: usize, best_margin: f64 },
}

/// The properties with a spectrum-only characterization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AbsoluteProperty {
    Separability,
    Ppt,
    Locality,
    Unsteerability3,
    NonnegativeConditionalEntropy,
    ZeroDiscord,
    Product,
}

impl AbsoluteProperty {
    pub const ALL: [AbsoluteProperty; 7] = [
        AbsoluteProperty::Separability,
        AbsoluteProperty::Ppt,
        AbsoluteProperty::Locality,
        AbsoluteProperty::Unsteerability3,
        AbsoluteProperty::NonnegativeConditionalEntropy,
        AbsoluteProperty::ZeroDiscord,
        AbsoluteProperty::Product,
    ];

    pub fn key(self) -> &'static str {
        match self {
            AbsoluteProperty::Separability => "separability",
            AbsoluteProperty::Ppt => "ppt",
            AbsoluteProperty::Locality => "locality",
            AbsoluteProperty::Unsteerability3 => "unsteerability-3",
            AbsoluteProperty::NonnegativeConditionalEntropy => {
                "nonnegative-conditional-entropy"
            }
            AbsoluteProperty::ZeroDiscord => "zero-discord",
            AbsoluteProperty::Product => "product",
        }
    }
}

fn check_len(spectrum: &Spectrum, dims: Dims) -> Result<(), AbsoluteError> {
    if spectrum.len() != dims.total() {
        return Err(AbsoluteError::SpectrumLength {
            got: spectrum.len(),
            want: dims.total(),
        });
    }
    Ok(())
}

fn require_two_qubit_spectrum(spectrum: &Spectrum) -> Result<(), AbsoluteError> {
    if spectrum.len() != 4 {
        return Err(AbsoluteError::SpectrumLength {
            got: spectrum.len(),
            want: 4,
        });
    }
    Ok(())
}

/// Absolute separability for 2 x n systems: with eigenvalues descending,
/// every global-unitary orbit member is separable iff
/// d1 <= d_{2n-1} + 2 sqrt(d_{2n-2} d_{2n}).
pub fn absolutely_separable_2xn(
    spectrum: &Spectrum,
    dims: Dims,
) -> Result<CriterionVerdict, AbsoluteError> {
    check_len(spectrum, dims)?;
    if dims.da.min(dims.db) != 2 {
        return Err(AbsoluteError::UnsupportedDims {
            da: dims.da,
            db: dims.db,
            detail: "absolute separability needs a qubit on one side",
        });
    }
    let n2 = dims.total();
    let d = |i: usize| spectrum.get(i - 1); // 1-based like the inequality
    let margin = d(n2 - 1) + 2.0 * (d(n2 - 2) * d(n2)).sqrt() - d(1);
    Ok(verdict(
        margin,
        json!({ "bound": d(n2 - 1) + 2.0 * (d(n2 - 2) * d(n2)).sqrt(), "largest": d(1) }),
    ))
}

fn verdict(margin: f64, witness: serde_json::Value) -> CriterionVerdict {
    CriterionVerdict {
        holds: margin >= 0.0,
        margin,
        witness: Some(witness),
    }
}

/// All permutations of 0..n (Heap's algorithm, iterative).
fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut items: Vec<usize> = (0..n).collect();
    let mut out = vec![items.clone()];
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                items.swap(0, i);
            } else {
                items.swap(c[i], i);
            }
            out.push(items.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// Absolute PPT: the partial transpose stays positive on the whole unitary
/// orbit iff, for every assignment, the test matrix L + L^T is positive
/// semidefinite, where L places the p(p+1)/2 smallest eigenvalues on the
/// upper triangle and the negated p(p-1)/2 largest on the strict lower
/// triangle (p the smaller local dimension). For p = 2 this reduces to the
/// single inequality of [`absolutely_separable_2xn`]; supported for p <= 3.
pub fn absolutely_ppt(
    spectrum: &Spectrum,
    dims: Dims,
    tols: &Tolerances,
) -> Result<CriterionVerdict, AbsoluteError> {
    check_len(spectrum, dims)?;
    let p = dims.da.min(dims.db);
    if p > 3 {
        return Err(AbsoluteError::UnsupportedDims {
            da: dims.da,
            db: dims.db,
            detail: "assignment enumeration is only tabulated for min dim <= 3",
        });
    }
    if p == 1 {
        return Ok(verdict(f64::INFINITY, json!({ "trivial": true })));
    }
    let n = dims.total();
    let mut upper_pos = Vec::new();
    let mut lower_pos = Vec::new();
    for k in 0..p {
        for l in 0..p {
            if k <= l {
                upper_pos.push((k, l));
            } else {
                lower_pos.push((k, l));
            }
        }
    }
    let perms_up = permutations(upper_pos.len());
    let perms_lo = permutations(lower_pos.len());
    let mut worst = f64::INFINITY;
    let mut worst_witness = json!(null);
    for pu in &perms_up {
        for pl in &perms_lo {
            let mut sym = vec![vec![0.0; p]; p];
            for (slot, &(k, l)) in upper_pos.iter().enumerate() {
                // s-th smallest eigenvalue, s = pu[slot].
                let v = spectrum.get(n - 1 - pu[slot]);
                sym[k][l] += v;
                sym[l][k] += v;
            }
            for (slot, &(k, l)) in lower_pos.iter().enumerate() {
                let v = -spectrum.get(pl[slot]);
                sym[k][l] += v;
                sym[l][k] += v;
            }
            let min_eig = symmetric_eigenvalues(&sym, tols)?.min();
            if min_eig < worst {
                worst = min_eig;
                worst_witness = json!({ "upper": pu, "lower": pl });
            }
        }
    }
    Ok(verdict(worst, worst_witness))
}

/// Absolute locality for two qubits: no global unitary can push the best
/// CHSH value past 2 iff (2d1 + 2d2 - 1)^2 + (2d1 + 2d3 - 1)^2 <= 1.
pub fn absolutely_local(spectrum: &Spectrum) -> Result<CriterionVerdict, AbsoluteError> {
    require_two_qubit_spectrum(spectrum)?;
    let d = |i: usize| spectrum.get(i - 1);
    let c1 = 2.0 * (d(1) + d(2)) - 1.0;
    let c2 = 2.0 * (d(1) + d(3)) - 1.0;
    let margin = 1.0 - (c1 * c1 + c2 * c2);
    Ok(verdict(margin, json!({ "c": [c1, c2] })))
}

/// Absolute three-setting unsteerability for two qubits:
/// 3 sum d_i^2 - 2 sum_{i<j} d_i d_j <= 1, equivalently purity <= 1/2.
pub fn absolutely_unsteerable3(spectrum: &Spectrum) -> Result<CriterionVerdict, AbsoluteError> {
    require_two_qubit_spectrum(spectrum)?;
    let v = spectrum.values();
    let sq: f64 = v.iter().map(|x| x * x).sum();
    let mut cross = 0.0;
    for i in 0..4 {
        for j in (i + 1)..4 {
            cross += v[i] * v[j];
        }
    }
    let margin = 1.0 - (3.0 * sq - 2.0 * cross);
    Ok(verdict(margin, json!({ "purity": sq })))
}

/// Absolute nonnegativity of the conditional entropy for two qubits: both
/// marginals can be driven to maximal mixedness, so the orbit minimum of
/// S(B|A) is S(spectrum) - 1 and the criterion is S(spectrum) >= 1.
pub fn absolutely_nonneg_cond_entropy(
    spectrum: &Spectrum,
) -> Result<CriterionVerdict, AbsoluteError> {
    require_two_qubit_spectrum(spectrum)?;
    let s = shannon(spectrum.values()).map_err(|_| AbsoluteError::SpectrumLength {
        got: spectrum.len(),
        want: 4,
    })?;
    Ok(verdict(s - 1.0, json!({ "entropy": s })))
}

/// Absolute zero discord: the only two-qubit state whose discord vanishes
/// on the entire unitary orbit is the maximally mixed one, so the spectrum
/// must be uniform (slack 1e-9 for roundoff in the eigensolve).
pub fn absolutely_zero_discord(spectrum: &Spectrum) -> Result<CriterionVerdict, AbsoluteError> {
    require_two_qubit_spectrum(spectrum)?;
    let dev = spectrum
        .values()
        .iter()
        .map(|d| (d - 0.25).abs())
        .fold(0.0, f64::max);
    Ok(verdict(1e-9 - dev, json!({ "max_deviation": dev })))
}

/// First necessary condition for two-qubit spectra on the zero-discord
/// boundary family: the multiset must have the form {a, a, b, b} with
/// a + b = 1/2 (slack 1e-9, as for [`absolutely_zero_discord`]).
pub fn necessary_family_step1(spectrum: &Spectrum) -> Result<CriterionVerdict, AbsoluteError> {
    require_two_qubit_spectrum(spectrum)?;
    let d = |i: usize| spectrum.get(i - 1);
    // Descending order forces the pairing d1 = d2, d3 = d4.
    let dev = (d(1) - d(2))
        .abs()
        .max((d(3) - d(4)).abs())
        .max((d(1) + d(3) - 0.5).abs());
    Ok(verdict(1e-9 - dev, json!({ "deviation": dev })))
}

/// Closed-form dispatch over [`AbsoluteProperty`].
pub fn absolute_check(
    property: AbsoluteProperty,
    spectrum: &Spectrum,
    dims: Dims,
    tols: &Tolerances,
) -> Result<CriterionVerdict, AbsoluteError> {
    match property {
        AbsoluteProperty::Separability => absolutely_separable_2xn(spectrum, dims),
        AbsoluteProperty::Ppt => absolutely_ppt(spectrum, dims, tols),
        AbsoluteProperty::Locality => absolutely_local(spectrum),
        AbsoluteProperty::Unsteerability3 => absolutely_unsteerable3(spectrum),
        AbsoluteProperty::NonnegativeConditionalEntropy => {
            absolutely_nonneg_cond_entropy(spectrum)
        }
        // A state that stays product under every conjugation in particular
        // keeps zero discord, which already forces the uniform spectrum; and
        // the uniform spectrum is the product state I/2 x I/2 in every
        // basis. The two absolute properties therefore share one verdict.
        AbsoluteProperty::ZeroDiscord | AbsoluteProperty::Product => {
            absolutely_zero_discord(spectrum)
        }
    }
}

/// Margin of the ordinary (basis-dependent) property on a concrete state;
/// the search below drives this negative. Two-qubit only.
pub fn ordinary_margin(
    rho: &DensityMatrix,
    property: AbsoluteProperty,
    tols: &Tolerances,
) -> Result<f64, AbsoluteError> {
    let m = match property {
        // PPT is exact for separability at this size.
        AbsoluteProperty::Separability | AbsoluteProperty::Ppt => is_ppt(rho, tols)?.margin,
        AbsoluteProperty::Locality => {
            let (value, _) = chsh_max(rho, tols)?;
            2.0 - value
        }
        AbsoluteProperty::Unsteerability3 => {
            let (value, _) = steerable_three(rho, tols)?;
            1.0 - value
        }
        AbsoluteProperty::NonnegativeConditionalEntropy => {
            let report = entropy_report(rho, tols)?;
            report.cond_a_given_b.min(report.cond_b_given_a)
        }
        AbsoluteProperty::ZeroDiscord => zero_discord_dakic(rho, tols)?.margin,
        AbsoluteProperty::Product => is_product(rho, tols)?.margin,
    };
    Ok(m)
}

/// A conjugation that breaks the ordinary property, disproving the
/// absolute one.
#[derive(Debug, Clone)]
pub struct CounterexampleReport {
    /// Applying this to the input state yields the breaking state.
    pub unitary: UnitaryMatrix,
    /// Ordinary-property margin of the breaking state (below -1e-6).
    pub margin: f64,
    pub candidates_tried: usize,
}

const BREAK_MARGIN: f64 = -1e-6;

/// Columns (Phi+, |01>, |10>, Phi-): mixes the extreme eigenvalue pair into
/// Bell projectors while the middle pair stays product. Permuted over all
/// eigenvalue assignments this family realizes the worst partial-transpose
/// eigenvalue on the orbit, and it also reaches nonzero discord for every
/// non-uniform spectrum.
fn pair_arrangement() -> UnitaryMatrix {
    let s = cr(1.0 / 2.0_f64.sqrt());
    let z = cr(0.0);
    let o = cr(1.0);
    UnitaryMatrix::new(
        ComplexMatrix::from_rows(&[
            vec![s, z, z, s],
            vec![z, o, z, z],
            vec![z, z, o, z],
            vec![s, z, z, -s],
        ])
        .expect("static matrix"),
    )
    .expect("unitary by construction")
}

/// Every column maximally entangled: conjugating any diagonal matrix gives
/// a state with both marginals maximally mixed, the extremal arrangement
/// for the entropic, steering, and CHSH orbit bounds.
fn magic_arrangement() -> UnitaryMatrix {
    cartan_unitary(CartanAngles {
        l1: std::f64::consts::FRAC_PI_4,
        l2: 0.0,
        l3: 0.0,
    })
}

fn permutation_unitary(perm: &[usize]) -> UnitaryMatrix {
    let n = perm.len();
    let mut m = ComplexMatrix::zeros(n, n);
    for (col, &row) in perm.iter().enumerate() {
        m.set(row, col, cr(1.0));
    }
    UnitaryMatrix::new(m).expect("permutation matrix")
}

/// Tries to disprove the absolute property for the spectrum of `rho` by
/// searching conjugations. Deterministic phase first: the pair and magic
/// arrangements over all 24 eigenvalue assignments (which realize the
/// closed-form orbit extremes); then alternating Haar unitaries and a
/// Cartan grid dressed with random local unitaries. Returns the breaking
/// conjugation relative to the *input* state, or the budget failure with
/// the best margin seen.
pub fn falsify_absolute(
    rho: &DensityMatrix,
    property: AbsoluteProperty,
    budget: usize,
    seed: u64,
    tols: &Tolerances,
) -> Result<CounterexampleReport, AbsoluteError> {
    if !rho.is_two_qubit() {
        return Err(AbsoluteError::UnsupportedDims {
            da: rho.dims().da,
            db: rho.dims().db,
            detail: "the falsification search is two-qubit only",
        });
    }
    let dims = rho.dims();
    let tols_eig = *tols;
    // Work on the diagonalized state: rho = W D W^dagger, candidates U D U^dagger.
    let (spectrum, w) = crate::linalg::hermitian_eig(rho.matrix(), &tols_eig)?;
    let d_matrix = ComplexMatrix::from_fn(4, 4, |i, j| {
        if i == j {
            cr(spectrum.get(i).max(0.0))
        } else {
            cr(0.0)
        }
    });
    let d_state = DensityMatrix::trusted(d_matrix, dims, spectrum.clone());
    let w_adj = UnitaryMatrix::new(w.adjoint())?;

    let mut tried = 0usize;
    let mut best_margin = f64::INFINITY;
    let mut check = |u: &UnitaryMatrix,
                     tried: &mut usize|
     -> Result<Option<CounterexampleReport>, AbsoluteError> {
        *tried += 1;
        let candidate = d_state.conjugated(u)?;
        let margin = ordinary_margin(&candidate, property, tols)?;
        if margin < best_margin {
            best_margin = margin;
        }
        if margin < BREAK_MARGIN {
            return Ok(Some(CounterexampleReport {
                unitary: u.mul(&w_adj),
                margin,
                candidates_tried: *tried,
            }));
        }
        Ok(None)
    };

    let pair = pair_arrangement();
    let magic = magic_arrangement();
    for perm in permutations(4) {
        if tried >= budget {
            break;
        }
        let p = permutation_unitary(&perm);
        for base in [&pair, &magic] {
            if tried >= budget {
                break;
            }
            if let Some(hit) = check(&base.mul(&p), &mut tried)? {
                return Ok(hit);
            }
        }
    }

    let mut rng = seeded_rng(seed);
    // The Cartan core has period pi in each angle; eight points cover one
    // period. The first pass through the grid runs the bare cores, later
    // passes dress them with random local unitaries.
    let grid: Vec<f64> = (0..8)
        .map(|k| k as f64 * std::f64::consts::PI / 8.0)
        .collect();
    let mut grid_idx = 0usize;
    while tried < budget {
        let candidate = if tried % 2 == 0 {
            haar_unitary(4, &mut rng)
        } else {
            let (i, j, k) = (
                grid_idx % 8,
                (grid_idx / 8) % 8,
                (grid_idx / 64) % 8,
            );
            let core = cartan_unitary(CartanAngles {
                l1: grid[i],
                l2: grid[j],
                l3: grid[k],
            });
            let dressed = if grid_idx < 512 {
                core
            } else {
                let ua = haar_unitary(2, &mut rng);
                let ub = haar_unitary(2, &mut rng);
                let va = haar_unitary(2, &mut rng);
                let vb = haar_unitary(2, &mut rng);
                UnitaryMatrix::new(
                    tensor(ua.matrix(), ub.matrix())
                        .mul(core.matrix())
                        .mul(&tensor(va.matrix(), vb.matrix())),
                )?
            };
            grid_idx += 1;
            dressed
        };
        if let Some(hit) = check(&candidate, &mut tried)? {
            return Ok(hit);
        }
    }
    Err(AbsoluteError::BudgetExhausted {
        budget,
        best_margin,
    })
}
