//! Classification of bipartite quantum states by their correlation
//! properties.
//!
//! The crate provides dense complex linear algebra sized for few-qubit
//! problems ([`linalg`]), standard state families and random-state
//! generation ([`states`]), entropic quantities ([`entropy`]), criteria for
//! entanglement, steering, nonlocality, discord, and contextuality
//! ([`criteria`]), spectrum-only criteria stable under global unitaries
//! together with a randomized falsification search ([`absolute`]), and a
//! report layer that bundles everything into one serializable record with
//! threshold bisection and hierarchy audits ([`report`]).
//!
//! Everything is deterministic: random searches take explicit seeds and all
//! tolerances travel through [`linalg::Tolerances`].

pub mod absolute;
pub mod criteria;
pub mod entropy;
pub mod linalg;
pub mod report;
pub mod states;
