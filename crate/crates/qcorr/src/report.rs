//! One-shot classification reports, threshold bisection, and hierarchy
//! audits.
//!
//! [`analyze`] bundles every applicable criterion into a serializable
//! [`PropertyReport`]. [`bisect_threshold`] locates criterion boundaries
//! along one-parameter families after a monotonicity pre-scan, and the
//! audit functions cross-check the implication chain
//! product => classical => separable => unsteerable => local
//! on concrete margins.

use serde::Serialize;
use thiserror::Error;

use crate::absolute::{
    absolute_check, necessary_family_step1, AbsoluteError, AbsoluteProperty,
};
use crate::criteria::{
    chsh_max, classify_ccq, discord_numeric, is_ppt, is_product, is_separable_pure,
    steerable_three, zero_discord_blocks, zero_discord_dakic, zero_super_discord, Classicality,
    CriteriaError, CriterionVerdict,
};
use crate::entropy::{entropy_report, EntropyReport};
use crate::linalg::{Dims, Spectrum, Subsystem, Tolerances};
use crate::states::DensityMatrix;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Criteria(#[from] CriteriaError),
    #[error(transparent)]
    Absolute(#[from] AbsoluteError),
    #[error("margin is not monotone over the scan: turning point near {at}")]
    NotMonotone { at: f64 },
    #[error("margin does not change sign on [{lo}, {hi}] (endpoints {lo_margin:.3e}, {hi_margin:.3e})")]
    NoCrossing {
        lo: f64,
        hi: f64,
        lo_margin: f64,
        hi_margin: f64,
    },
}

/// Where the analyzed state came from, for the report header.
#[derive(Debug, Clone, Serialize)]
pub struct StateDescriptor {
    pub label: String,
    pub params: serde_json::Value,
}

impl StateDescriptor {
    pub fn family(name: &str, params: serde_json::Value) -> Self {
        StateDescriptor {
            label: name.to_string(),
            params,
        }
    }
}

/// Basis-dependent criteria. Two-qubit-only entries are `None` elsewhere.
#[derive(Debug, Clone, Serialize)]
pub struct CriteriaSection {
    pub product: CriterionVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pure_separability: Option<CriterionVerdict>,
    pub ppt: CriterionVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chsh_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nonlocal: Option<CriterionVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steering_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steerable: Option<CriterionVerdict>,
    /// D(B|A): measurement on A.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discord_b_given_a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discord_a_given_b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zero_discord_bloch_a: Option<CriterionVerdict>,
    pub zero_discord_blocks_a: CriterionVerdict,
    pub zero_discord_blocks_b: CriterionVerdict,
    pub classicality: Classicality,
    pub zero_super_discord: CriterionVerdict,
}

/// Spectrum-only criteria; entries absent where no closed form applies.
#[derive(Debug, Clone, Serialize)]
pub struct AbsoluteSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub separability: Option<CriterionVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ppt: Option<CriterionVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub locality: Option<CriterionVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unsteerability3: Option<CriterionVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nonnegative_conditional_entropy: Option<CriterionVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zero_discord: Option<CriterionVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family_step1: Option<CriterionVerdict>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PropertyReport {
    pub schema_version: u32,
    pub state: StateDescriptor,
    pub dims: [usize; 2],
    pub tolerances: Tolerances,
    /// Seed used by any stochastic step that produced the input state;
    /// absent for deterministic constructions.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub spectrum: Vec<f64>,
    pub purity: f64,
    pub entropy: EntropyReport,
    pub criteria: CriteriaSection,
    pub absolute: AbsoluteSection,
    /// Implication-chain breaches among the computed verdicts; empty means
    /// the report is internally consistent.
    pub hierarchy_violations: Vec<String>,
}

/// Margins feeding the implication audit; each is positive when the named
/// property holds decisively.
#[derive(Debug, Clone, Copy)]
pub struct HierarchyMargins {
    pub product: f64,
    pub zero_discord_a: f64,
    pub zero_discord_b: f64,
    pub separable: f64,
    pub unsteerable: f64,
    pub local: f64,
    pub nonneg_cond_entropy: f64,
}

/// Checks every implication in the chain, flagging a link only when the
/// antecedent holds by more than `gate` and the consequent fails by more
/// than `gate` (so boundary noise never trips it).
pub fn hierarchy_audit(m: &HierarchyMargins, gate: f64) -> Vec<String> {
    let links: [(&str, f64, &str, f64); 7] = [
        ("product", m.product, "zero-discord(A)", m.zero_discord_a),
        ("product", m.product, "zero-discord(B)", m.zero_discord_b),
        ("zero-discord(A)", m.zero_discord_a, "separable", m.separable),
        ("zero-discord(B)", m.zero_discord_b, "separable", m.separable),
        ("separable", m.separable, "unsteerable(3)", m.unsteerable),
        ("unsteerable(3)", m.unsteerable, "local(CHSH)", m.local),
        (
            "separable",
            m.separable,
            "nonnegative conditional entropy",
            m.nonneg_cond_entropy,
        ),
    ];
    links
        .iter()
        .filter(|(_, ante, _, cons)| *ante > gate && *cons < -gate)
        .map(|(a, ante, c, cons)| {
            format!("{a} (margin {ante:.3e}) but not {c} (margin {cons:.3e})")
        })
        .collect()
}

/// Same audit on the spectrum-only criteria. All links here are exact
/// consequences of the closed forms; any hit is a bug.
pub fn absolute_hierarchy_audit(
    spectrum: &Spectrum,
    dims: Dims,
    tols: &Tolerances,
    gate: f64,
) -> Result<Vec<String>, ReportError> {
    let margin = |p: AbsoluteProperty| -> Result<f64, ReportError> {
        Ok(absolute_check(p, spectrum, dims, tols)?.margin)
    };
    let sep = margin(AbsoluteProperty::Separability)?;
    let ppt = margin(AbsoluteProperty::Ppt)?;
    let unst = margin(AbsoluteProperty::Unsteerability3)?;
    let local = margin(AbsoluteProperty::Locality)?;
    let nnce = margin(AbsoluteProperty::NonnegativeConditionalEntropy)?;
    let zd = margin(AbsoluteProperty::ZeroDiscord)?;
    let links: [(&str, f64, &str, f64); 6] = [
        ("abs-separable", sep, "abs-ppt", ppt),
        ("abs-ppt", ppt, "abs-separable", sep),
        ("abs-separable", sep, "abs-unsteerable(3)", unst),
        ("abs-unsteerable(3)", unst, "abs-local", local),
        ("abs-separable", sep, "abs-nonneg-cond-entropy", nnce),
        ("abs-zero-discord", zd, "abs-separable", sep),
    ];
    Ok(links
        .iter()
        .filter(|(_, ante, _, cons)| *ante > gate && *cons < -gate)
        .map(|(a, ante, c, cons)| {
            format!("{a} (margin {ante:.3e}) but not {c} (margin {cons:.3e})")
        })
        .collect())
}

/// Runs every criterion that applies to the state's dimensions and collects
/// the results, cross-auditing the implication chain on the way.
pub fn analyze(
    rho: &DensityMatrix,
    descriptor: StateDescriptor,
    tols: &Tolerances,
) -> Result<PropertyReport, ReportError> {
    let dims = rho.dims();
    let two_qubit = rho.is_two_qubit();
    let entropy = entropy_report(rho, tols).map_err(CriteriaError::from)?;

    let product = is_product(rho, tols)?;
    let ppt = is_ppt(rho, tols)?;
    let pure_separability = if rho.spectrum().max() >= 1.0 - 1e-8 {
        Some(is_separable_pure(rho, tols)?)
    } else {
        None
    };
    let blocks_a = zero_discord_blocks(rho, Subsystem::A, tols)?;
    let blocks_b = zero_discord_blocks(rho, Subsystem::B, tols)?;
    let classicality = classify_ccq(rho, tols)?;
    let super_discord = zero_super_discord(rho, tols)?;

    let mut criteria = CriteriaSection {
        product,
        pure_separability,
        ppt,
        chsh_value: None,
        nonlocal: None,
        steering_value: None,
        steerable: None,
        discord_b_given_a: None,
        discord_a_given_b: None,
        zero_discord_bloch_a: None,
        zero_discord_blocks_a: blocks_a,
        zero_discord_blocks_b: blocks_b,
        classicality,
        zero_super_discord: super_discord,
    };
    let mut hierarchy_violations = Vec::new();
    if two_qubit {
        let (chsh, nonlocal) = chsh_max(rho, tols)?;
        let (steer, steerable) = steerable_three(rho, tols)?;
        criteria.chsh_value = Some(chsh);
        criteria.nonlocal = Some(nonlocal);
        criteria.steering_value = Some(steer);
        criteria.steerable = Some(steerable);
        criteria.discord_b_given_a = Some(discord_numeric(rho, Subsystem::A, tols)?);
        criteria.discord_a_given_b = Some(discord_numeric(rho, Subsystem::B, tols)?);
        criteria.zero_discord_bloch_a = Some(zero_discord_dakic(rho, tols)?);

        hierarchy_violations = hierarchy_audit(
            &HierarchyMargins {
                product: criteria.product.margin,
                zero_discord_a: criteria.zero_discord_blocks_a.margin,
                zero_discord_b: criteria.zero_discord_blocks_b.margin,
                separable: criteria.ppt.margin,
                unsteerable: 1.0 - steer,
                local: 2.0 - chsh,
                nonneg_cond_entropy: entropy.cond_a_given_b.min(entropy.cond_b_given_a),
            },
            1e-7,
        );
    }

    let spectrum = rho.spectrum();
    let mut absolute = AbsoluteSection {
        separability: None,
        ppt: None,
        locality: None,
        unsteerability3: None,
        nonnegative_conditional_entropy: None,
        zero_discord: None,
        family_step1: None,
    };
    if dims.da.min(dims.db) == 2 {
        absolute.separability = Some(absolute_check(
            AbsoluteProperty::Separability,
            spectrum,
            dims,
            tols,
        )?);
    }
    if dims.da.min(dims.db) <= 3 {
        absolute.ppt = Some(absolute_check(AbsoluteProperty::Ppt, spectrum, dims, tols)?);
    }
    if two_qubit {
        absolute.locality = Some(absolute_check(
            AbsoluteProperty::Locality,
            spectrum,
            dims,
            tols,
        )?);
        absolute.unsteerability3 = Some(absolute_check(
            AbsoluteProperty::Unsteerability3,
            spectrum,
            dims,
            tols,
        )?);
        absolute.nonnegative_conditional_entropy = Some(absolute_check(
            AbsoluteProperty::NonnegativeConditionalEntropy,
            spectrum,
            dims,
            tols,
        )?);
        absolute.zero_discord = Some(absolute_check(
            AbsoluteProperty::ZeroDiscord,
            spectrum,
            dims,
            tols,
        )?);
        absolute.family_step1 = Some(necessary_family_step1(spectrum)?);
        hierarchy_violations.extend(absolute_hierarchy_audit(spectrum, dims, tols, 1e-7)?);
    }

    Ok(PropertyReport {
        schema_version: 1,
        state: descriptor,
        dims: [dims.da, dims.db],
        tolerances: *tols,
        seed: None,
        spectrum: spectrum.values().to_vec(),
        purity: rho.purity(),
        entropy,
        criteria,
        absolute,
        hierarchy_violations,
    })
}

/// Result of a verified bisection.
#[derive(Debug, Clone, Serialize)]
pub struct Bisection {
    pub threshold: f64,
    pub bracket: (f64, f64),
    /// Margins just outside the bracket have the expected opposite signs.
    pub verified: bool,
}

const SCAN_POINTS: usize = 33;
const SCAN_SLACK: f64 = 1e-9;

/// Finds the zero of a margin function on [lo, hi] down to `width`.
///
/// A 33-point pre-scan rejects non-monotone margins (turning points larger
/// than the numeric slack) and inputs without a sign change, so a silent
/// wrong root is impossible; the returned bracket is then verified by
/// sampling two widths outside it on each side.
pub fn bisect_threshold(
    mut f: impl FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    width: f64,
) -> Result<Bisection, ReportError> {
    assert!(hi > lo && width > 0.0, "degenerate bisection interval");
    let xs: Vec<f64> = (0..SCAN_POINTS)
        .map(|i| lo + (hi - lo) * i as f64 / (SCAN_POINTS - 1) as f64)
        .collect();
    let ms: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let increasing = ms[SCAN_POINTS - 1] > ms[0];
    for i in 1..SCAN_POINTS {
        let step = ms[i] - ms[i - 1];
        let against = if increasing { -step } else { step };
        if against > SCAN_SLACK {
            return Err(ReportError::NotMonotone { at: xs[i] });
        }
    }
    let mut bracket = None;
    for i in 1..SCAN_POINTS {
        if (ms[i - 1] >= 0.0) != (ms[i] >= 0.0) {
            bracket = Some((xs[i - 1], xs[i], ms[i - 1]));
            break;
        }
    }
    let Some((mut a, mut b, mut fa)) = bracket else {
        return Err(ReportError::NoCrossing {
            lo,
            hi,
            lo_margin: ms[0],
            hi_margin: ms[SCAN_POINTS - 1],
        });
    };
    while b - a > width {
        let mid = 0.5 * (a + b);
        let fm = f(mid);
        if (fm >= 0.0) == (fa >= 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    let threshold = 0.5 * (a + b);
    let left = f((threshold - 2.0 * width).max(lo));
    let right = f((threshold + 2.0 * width).min(hi));
    let verified = (left >= 0.0) != (right >= 0.0);
    Ok(Bisection {
        threshold,
        bracket: (a, b),
        verified,
    })
}
