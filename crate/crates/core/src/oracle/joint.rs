//! Joint field ⊗ chain simulation.
//!
//! Each momentum pair is a two-level system in the basis `(|+⟩, |−⟩)`; a
//! sector `(m, n)` acts on the `2^K` chain space as
//! `Σ_k ε_k (cos 2α_k s_z + sin 2α_k s_x) + ω₁ m + ω₂ n`. The full Hamiltonian
//! is block diagonal in `(m, n)`, and the mode operator
//! `A = (a₁ + i a₂) ⊗ 1` is applied explicitly on the truncated Fock space.
//! Correlators come straight from state vectors, with no decoherence factors
//! or amplitude sums involved.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::dense::DenseOperator;
use crate::correlations::FieldState;
use crate::error::{Error, Result};
use crate::spectrum::{build_sector, ChainConfig};

/// Largest total dimension `(M₁+1)(M₂+1)·2^K` accepted.
pub const JOINT_DIMENSION_CAP: usize = 4096;

/// Lab-frame correlators at one time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JointMoments {
    /// `⟨A†(t) A⟩`
    pub first: Complex64,
    /// `⟨A† A†(t) A(t) A⟩`
    pub second: f64,
    /// `⟨A†(t) A(t)⟩`
    pub intensity: f64,
}

/// Per-sector chain vectors, indexed `[m][n]`.
type JointState = Vec<Vec<DVector<Complex64>>>;

fn chain_hamiltonian(eps: &[f64], alpha: &[f64], offset: f64) -> DenseOperator {
    let k = eps.len();
    let dim = 1usize << k;
    let mut h = DMatrix::<Complex64>::zeros(dim, dim);
    for s in 0..dim {
        h[(s, s)] += Complex64::new(offset, 0.0);
        for (j, (&e, &a)) in eps.iter().zip(alpha).enumerate() {
            let (sin2, cos2) = (2.0 * a).sin_cos();
            let minus = (s >> j) & 1 == 1;
            h[(s, s)] += Complex64::new(if minus { -e * cos2 } else { e * cos2 }, 0.0);
            h[(s ^ (1 << j), s)] += Complex64::new(e * sin2, 0.0);
        }
    }
    DenseOperator::new(h)
}

fn lower(psi: &JointState) -> JointState {
    let rows = psi.len();
    let cols = psi[0].len();
    let zero = DVector::<Complex64>::zeros(psi[0][0].len());
    let mut out = vec![vec![zero; cols]; rows];
    for m in 0..rows {
        for n in 0..cols {
            if m + 1 < rows {
                out[m][n] += &psi[m + 1][n] * Complex64::new(((m + 1) as f64).sqrt(), 0.0);
            }
            if n + 1 < cols {
                out[m][n] += &psi[m][n + 1] * Complex64::new(0.0, ((n + 1) as f64).sqrt());
            }
        }
    }
    out
}

fn evolve(psi: &JointState, u: &[Vec<DMatrix<Complex64>>]) -> JointState {
    psi.iter()
        .zip(u)
        .map(|(row, ur)| row.iter().zip(ur).map(|(v, um)| um * v).collect())
        .collect()
}

fn inner(a: &JointState, b: &JointState) -> Complex64 {
    a.iter().flatten().zip(b.iter().flatten()).map(|(x, y)| x.dotc(y)).sum()
}

/// Evolves the joint state exactly and returns the lab-frame correlators.
/// The chain is described by the first `K` entries of `cfg.k_grid`, all of
/// them; keep `N` small.
pub fn joint_two_time(state: &FieldState, cfg: &ChainConfig, t: f64) -> Result<JointMoments> {
    let (m_max, n_max) = state.truncation();
    let k = cfg.k_grid.len();
    let dim = (m_max + 1)
        .checked_mul(n_max + 1)
        .and_then(|d| 1usize.checked_shl(k as u32).and_then(|c| d.checked_mul(c)))
        .unwrap_or(usize::MAX);
    if k >= usize::BITS as usize || dim > JOINT_DIMENSION_CAP {
        return Err(Error::DimensionCap { dim, cap: JOINT_DIMENSION_CAP });
    }
    let chain_dim = 1usize << k;
    let mut u = Vec::with_capacity(m_max + 1);
    for m in 0..=m_max {
        let mut row = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            let sector = build_sector(cfg, m, n)?;
            let offset = cfg.omega1 * m as f64 + cfg.omega2 * n as f64;
            row.push(chain_hamiltonian(&sector.eps, &sector.alpha, offset).evolution(t));
        }
        u.push(row);
    }
    let mut ground = DVector::<Complex64>::zeros(chain_dim);
    ground[chain_dim - 1] = Complex64::new(1.0, 0.0);
    let psi: JointState = state
        .mode1()
        .iter()
        .map(|&c| state.mode2().iter().map(|&d| &ground * (c * d)).collect())
        .collect();

    let a_psi = lower(&psi);
    let u_psi = evolve(&psi, &u);
    let u_a_psi = evolve(&a_psi, &u);
    let a_u_psi = lower(&u_psi);
    let a_u_a_psi = lower(&u_a_psi);
    Ok(JointMoments {
        first: inner(&a_u_psi, &u_a_psi),
        second: inner(&a_u_a_psi, &a_u_a_psi).re,
        intensity: inner(&a_u_psi, &a_u_psi).re,
    })
}
