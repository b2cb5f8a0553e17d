//! Exact diagonalization of the periodic ring
//! `H(λ) = B Σ_j (λ σ^x_j + σ^z_j σ^z_{j+1})` with `σ^x = −(|0⟩⟨1| + |1⟩⟨0|)`.
//!
//! For `λ > 0` every off-diagonal element in the `σ^z` basis is `−Bλ ≤ 0`, so
//! the ground state has positive amplitudes and is invariant under translation
//! and the global flip `Π_j σ^x_j`. Both symmetries commute with `H(λ)` for any
//! `λ`, so the evolution can be carried out in the fully symmetric sector
//! (zero momentum, even flip parity). `SpinChainEd::full` skips the reduction.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAX_ED_SPINS: usize = 12;

/// Ground state of `H(λ_ref)` evolved under `H(λ_a)` and `H(λ_b)`.
#[derive(Clone, Debug)]
pub struct SpinChainEd {
    pub n_spins: usize,
    pub dim: usize,
    energies_a: DVector<f64>,
    energies_b: DVector<f64>,
    ground_a: DVector<f64>,
    ground_b: DVector<f64>,
    /// `V_aᵀ V_b`.
    basis_change: DMatrix<f64>,
}

struct SectorOperators {
    transverse: DMatrix<f64>,
    bond: DMatrix<f64>,
}

fn zz_energy(state: u32, n: usize) -> f64 {
    (0..n)
        .map(|j| {
            let a = (state >> j) & 1;
            let b = (state >> ((j + 1) % n)) & 1;
            if a == b { 1.0 } else { -1.0 }
        })
        .sum()
}

fn rotate(state: u32, n: usize) -> u32 {
    let mask = (1u32 << n) - 1;
    ((state << 1) | (state >> (n - 1))) & mask
}

/// Orbits of the group generated by translation and global flip, or singletons.
fn orbits(n: usize, symmetric: bool) -> (Vec<Vec<u32>>, HashMap<u32, usize>) {
    let total = 1u32 << n;
    let mask = total - 1;
    let mut index = HashMap::with_capacity(total as usize);
    let mut orbits = Vec::new();
    for s in 0..total {
        if index.contains_key(&s) {
            continue;
        }
        let id = orbits.len();
        let mut members = vec![s];
        index.insert(s, id);
        if symmetric {
            let mut frontier = vec![s];
            while let Some(x) = frontier.pop() {
                for y in [rotate(x, n), !x & mask] {
                    if let std::collections::hash_map::Entry::Vacant(e) = index.entry(y) {
                        e.insert(id);
                        members.push(y);
                        frontier.push(y);
                    }
                }
            }
        }
        orbits.push(members);
    }
    (orbits, index)
}

fn sector_operators(n: usize, symmetric: bool) -> SectorOperators {
    let (orbits, index) = orbits(n, symmetric);
    let dim = orbits.len();
    let mut transverse = DMatrix::zeros(dim, dim);
    let mut bond = DMatrix::zeros(dim, dim);
    let norm: Vec<f64> = orbits.iter().map(|o| (o.len() as f64).sqrt().recip()).collect();
    for (j, members) in orbits.iter().enumerate() {
        for &x in members {
            let amp = norm[j];
            bond[(j, j)] += zz_energy(x, n) * amp * norm[j];
            for site in 0..n {
                let y = x ^ (1 << site);
                let i = index[&y];
                transverse[(i, j)] -= amp * norm[i];
            }
        }
    }
    SectorOperators { transverse, bond }
}

impl SpinChainEd {
    /// Symmetric-sector evolution; `n_spins` even, `4 ≤ n_spins ≤ 12`.
    pub fn new(n_spins: usize, b: f64, lambda_ref: f64, lambda_a: f64, lambda_b: f64) -> Result<Self> {
        Self::build(n_spins, b, lambda_ref, lambda_a, lambda_b, true)
    }

    /// Same quantity in the full `2^N` space.
    pub fn full(n_spins: usize, b: f64, lambda_ref: f64, lambda_a: f64, lambda_b: f64) -> Result<Self> {
        Self::build(n_spins, b, lambda_ref, lambda_a, lambda_b, false)
    }

    fn build(n: usize, b: f64, lambda_ref: f64, lambda_a: f64, lambda_b: f64, symmetric: bool) -> Result<Self> {
        if n > MAX_ED_SPINS {
            return Err(Error::DimensionCap { dim: 1 << n, cap: 1 << MAX_ED_SPINS });
        }
        if n < 4 || !n.is_multiple_of(2) {
            return Err(Error::InvalidChainSize(n));
        }
        for (name, v) in [("lambda_ref", lambda_ref), ("lambda_a", lambda_a), ("lambda_b", lambda_b), ("b", b)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter { name, reason: format!("{v} must be > 0") });
            }
        }
        let ops = sector_operators(n, symmetric);
        let hamiltonian = |lambda: f64| (&ops.transverse * lambda + &ops.bond) * b;
        let reference = SymmetricEigen::new(hamiltonian(lambda_ref));
        let ground_index = reference.eigenvalues.imin();
        let ground = reference.eigenvectors.column(ground_index).into_owned();
        let eig_a = SymmetricEigen::new(hamiltonian(lambda_a));
        let eig_b = SymmetricEigen::new(hamiltonian(lambda_b));
        Ok(Self {
            n_spins: n,
            dim: ground.len(),
            ground_a: eig_a.eigenvectors.transpose() * &ground,
            ground_b: eig_b.eigenvectors.transpose() * &ground,
            basis_change: eig_a.eigenvectors.transpose() * &eig_b.eigenvectors,
            energies_a: eig_a.eigenvalues,
            energies_b: eig_b.eigenvalues,
        })
    }

    /// `⟨G| e^{iH(λ_a)t} e^{−iH(λ_b)t} |G⟩`.
    pub fn overlap(&self, t: f64) -> Complex64 {
        let evolved_b: DVector<Complex64> = DVector::from_iterator(
            self.dim,
            self.energies_b
                .iter()
                .zip(self.ground_b.iter())
                .map(|(&e, &g)| Complex64::from_polar(g, -e * t)),
        );
        let mut total = Complex64::new(0.0, 0.0);
        for i in 0..self.dim {
            let row = self.basis_change.row(i);
            let y: Complex64 = row.iter().zip(evolved_b.iter()).map(|(&m, &x)| x * m).sum();
            total += Complex64::from_polar(self.ground_a[i], self.energies_a[i] * t) * y;
        }
        total
    }
}
