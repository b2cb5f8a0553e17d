use nalgebra::DMatrix;
use num_complex::Complex64;

use super::dense::DenseOperator;
use crate::decoherence::coeffs;
use crate::error::{Error, Result};
use crate::spectrum::DressedSector;

/// `ε (s_z cos 2α + s_x sin 2α)` in the basis `(|+⟩, |−⟩)`.
fn rotated_hamiltonian(alpha: f64, eps: f64) -> DenseOperator {
    let (s, c) = (2.0 * alpha).sin_cos();
    let z = |x: f64| Complex64::new(eps * x, 0.0);
    DenseOperator::new(DMatrix::from_row_slice(2, 2, &[z(c), z(s), z(s), z(-c)]))
}

/// `⟨−| e^{iH t} e^{−iH' t} |−⟩` for two rotated two-level Hamiltonians,
/// evolved by eigendecomposition.
pub fn pseudospin_overlap(alpha: f64, eps: f64, alpha_p: f64, eps_p: f64, t: f64) -> Complex64 {
    let forward = rotated_hamiltonian(alpha, eps).evolution(-t);
    let backward = rotated_hamiltonian(alpha_p, eps_p).evolution(t);
    (forward * backward)[(1, 1)]
}

/// Closed-form per-momentum factor from the `C_{a,b}` weights.
pub fn rk_closed_form(alpha: f64, eps: f64, alpha_p: f64, eps_p: f64, t: f64) -> Complex64 {
    coeffs(alpha, alpha_p).factor(eps, eps_p, t)
}

/// Numerical per-momentum overlap of two sectors at grid index `k_index`.
pub fn rk_numeric(left: &DressedSector, right: &DressedSector, k_index: usize, t: f64) -> Result<Complex64> {
    if !left.compatible(right) {
        return Err(Error::SectorMismatch);
    }
    if k_index >= left.len() {
        return Err(Error::InvalidGrid(format!("index {k_index} out of {}", left.len())));
    }
    Ok(pseudospin_overlap(left.alpha[k_index], left.eps[k_index], right.alpha[k_index], right.eps[k_index], t))
}
