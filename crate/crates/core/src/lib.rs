//! Decoherence factor, two-mode field correlations and second-order coherence
//! for a transverse-field Ising chain dispersively coupled to two resonator
//! modes.
//!
//! The chain `H = B Σ_j (λ σ^x_j + σ^z_j σ^z_{j+1})` sees its transverse
//! coupling shifted by the photon numbers `(m, n)` of the two modes. Each
//! photon-number sector is a free-fermion problem, so overlaps of the chain
//! ground state evolved under two sectors factorize over momentum pairs.
//!
//! Module map:
//! - [`spectrum`]: momentum grid, dressed couplings, Bogoliubov angles, circuit
//!   parameter conversion.
//! - [`decoherence`]: the overlap `r(t)` between two sectors, its modulus
//!   square in explicit trigonometric form and the short-time Gaussian bound.
//! - [`correlations`]: first- and second-order correlations of `A = a₁ + i a₂`
//!   and `g²(t)` for truncated pure field states.
//! - [`oracle`]: brute-force verifiers (2×2 pseudospin evolution, spin-chain
//!   exact diagonalization, joint field⊗chain simulation).

pub mod correlations;
pub mod decoherence;
pub mod error;
pub mod oracle;
pub mod spectrum;
pub mod timegrid;

pub use correlations::{Correlator, FieldState, Frame};

pub use decoherence::{BoundParams, CoeffQuad, ComplexSeries, ScaledComplex};
pub use error::{Error, Result};
pub use spectrum::{ChainConfig, DressedSector, PhysicalParams};
pub use timegrid::TimeGrid;

pub use num_complex::Complex64;
