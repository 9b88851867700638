//! Entropies in bits (base-2 logarithms throughout).
//!
//! Everything is spectrum-based: the von Neumann entropy of a state is the
//! Shannon entropy of its eigenvalues, so no matrix logarithm is ever needed.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{Subsystem, Tolerances};
use crate::states::{DensityMatrix, StateError};

#[derive(Debug, Error)]
pub enum EntropyError {
    #[error("not a probability vector: {0}")]
    NotAProbabilityVector(String),
}

fn entropy_kernel<I: IntoIterator<Item = f64>>(probs: I) -> f64 {
    let mut s = 0.0;
    for p in probs {
        if p > 0.0 {
            s -= p * p.log2();
        }
    }
    s
}

/// Shannon entropy in bits. Entries may dip to -1e-12 (clamped to zero);
/// the vector must sum to 1 within 1e-9.
pub fn shannon(probs: &[f64]) -> Result<f64, EntropyError> {
    let mut sum = 0.0;
    for &p in probs {
        if p < -1e-12 {
            return Err(EntropyError::NotAProbabilityVector(format!(
                "entry {p} is negative"
            )));
        }
        sum += p;
    }
    if (sum - 1.0).abs() > 1e-9 {
        return Err(EntropyError::NotAProbabilityVector(format!(
            "sum is {sum}, expected 1"
        )));
    }
    Ok(entropy_kernel(probs.iter().map(|&p| p.max(0.0))))
}

/// Entropy of the two-point distribution (p, 1-p); p is clamped into [0, 1].
pub fn binary_entropy(p: f64) -> f64 {
    let p = p.clamp(0.0, 1.0);
    entropy_kernel([p, 1.0 - p])
}

/// Von Neumann entropy in bits: Shannon entropy of the eigenvalues.
/// Validation already bounded the negative dip, so it is clamped away here.
pub fn von_neumann(rho: &DensityMatrix) -> f64 {
    entropy_kernel(rho.spectrum().values().iter().map(|&p| p.max(0.0)))
}

/// Joint, marginal, conditional and mutual entropies of a bipartite state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub s_joint: f64,
    pub s_a: f64,
    pub s_b: f64,
    /// S(A|B) = S(AB) - S(B); negative values witness entanglement.
    pub cond_a_given_b: f64,
    /// S(B|A) = S(AB) - S(A).
    pub cond_b_given_a: f64,
    /// I(A:B) = S(A) + S(B) - S(AB).
    pub mutual: f64,
}

pub fn entropy_report(rho: &DensityMatrix, tols: &Tolerances) -> Result<EntropyReport, StateError> {
    let s_joint = von_neumann(rho);
    let s_a = von_neumann(&rho.reduced(Subsystem::A, tols)?);
    let s_b = von_neumann(&rho.reduced(Subsystem::B, tols)?);
    Ok(EntropyReport {
        s_joint,
        s_a,
        s_b,
        cond_a_given_b: s_joint - s_b,
        cond_b_given_a: s_joint - s_a,
        mutual: s_a + s_b - s_joint,
    })
}
