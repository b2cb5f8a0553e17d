//! Brute-force references for the closed-form paths.
//!
//! Nothing here shares code with the product formula or the correlation
//! sums beyond the sector spectra (`ε_k`, `α_k`) themselves.

mod dense;
mod joint;
mod pseudospin;
mod spin_chain;

pub use dense::{is_unitary, DenseOperator};
pub use joint::{joint_two_time, JointMoments, JOINT_DIMENSION_CAP};
pub use pseudospin::{pseudospin_overlap, rk_closed_form, rk_numeric};
pub use spin_chain::{SpinChainEd, MAX_ED_SPINS};
