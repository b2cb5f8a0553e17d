//! Quasi-particle spectrum of the photon-dressed Ising sectors.
//!
//! Conventions: momenta live on `k_m = 2πm/N`, `m = 1 … N/2 − 1`; the
//! Bogoliubov angle uses the two-argument arctangent so `θ_k ∈ (0, π)`; the
//! reference (ground-state) sector is `(m, n) = (0, 0)` and its coupling is the
//! user-facing `λ_ref`.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default mode-2 coupling of the circuit layout.
pub const DEFAULT_ETA2: f64 = 0.1;
/// Mode frequency ratio `ω₁/ω₂` of the antinode layout.
pub const MODE_FREQUENCY_RATIO: f64 = 3.0;
/// Default `ω₂/B`; gives `(ω₁ − ω₂)/B = 150`, the ratio of the circuit estimates
/// `ω₂ ≈ 120 GHz`, `B ≈ 1.6 GHz`.
pub const DEFAULT_OMEGA2_OVER_B: f64 = 75.0;

/// Positive momenta `2πm/N`, `m = 1 … N/2 − 1`.
pub fn build_k_grid(n_spins: usize) -> Result<Vec<f64>> {
    if n_spins < 4 || !n_spins.is_multiple_of(2) {
        return Err(Error::InvalidChainSize(n_spins));
    }
    let n = n_spins as f64;
    Ok((1..n_spins / 2).map(|m| 2.0 * PI * m as f64 / n).collect())
}

/// Half-odd momenta `π(2m − 1)/N`, `m = 1 … N/2`: the antiperiodic fermion
/// grid on which the even-parity sector of a periodic spin ring lives.
pub fn build_half_odd_k_grid(n_spins: usize) -> Result<Vec<f64>> {
    if n_spins < 2 || !n_spins.is_multiple_of(2) {
        return Err(Error::InvalidChainSize(n_spins));
    }
    let n = n_spins as f64;
    Ok((1..=n_spins / 2)
        .map(|m| PI * (2 * m - 1) as f64 / n)
        .collect())
}

/// Quasi-particle energy `2B√(1 + λ² − 2λ cos k)`.
#[inline]
pub fn epsilon(lambda: f64, k: f64, b: f64) -> f64 {
    // (1 - λ)² + 2λ(1 - cos k) keeps the radicand non-negative under rounding
    let radicand = (1.0 - lambda).powi(2) + 4.0 * lambda * (0.5 * k).sin().powi(2);
    2.0 * b * radicand.max(0.0).sqrt()
}

/// Bogoliubov angle `θ_k(λ) = atan2(sin k, λ − cos k)`, in `(0, π)` for `k ∈ (0, π)`.
#[inline]
pub fn theta(lambda: f64, k: f64) -> f64 {
    k.sin().atan2(lambda - k.cos())
}

/// Transverse coupling of the `(m, n)`-photon sector, normalized so that the
/// vacuum sector has `λ_{0,0} = λ_ref`.
pub fn dressed_lambda(lambda_ref: f64, m: usize, n: usize, eta1: f64, eta2: f64) -> Result<f64> {
    let (e1, e2) = (eta1 * eta1, eta2 * eta2);
    let vacuum = 1.0 - 0.5 * e1 - 0.5 * e2;
    if vacuum <= 0.0 {
        return Err(Error::NonPositiveDressing { m: 0, n: 0, bracket: vacuum });
    }
    let bracket = 1.0 - (m as f64 + 0.5) * e1 - (n as f64 + 0.5) * e2;
    if bracket <= 0.0 {
        return Err(Error::NonPositiveDressing { m, n, bracket });
    }
    if m == 0 && n == 0 {
        return Ok(lambda_ref);
    }
    Ok(lambda_ref * bracket / vacuum)
}

/// Model parameters of the chain and the two modes. Energies and frequencies
/// share one unit; with `b = 1` times are in units of `1/B`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    pub n_spins: usize,
    pub b: f64,
    pub lambda_ref: f64,
    pub eta1: f64,
    pub eta2: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub k_grid: Vec<f64>,
}

impl ChainConfig {
    /// Circuit defaults: `B = 1`, `η₂ = 0.1`, `η₁ = √3 η₂`, `ω₁ = 3ω₂`,
    /// `ω₂ = 75 B`, integer momentum grid.
    pub fn new(n_spins: usize, lambda_ref: f64) -> Result<Self> {
        let omega2 = DEFAULT_OMEGA2_OVER_B;
        let cfg = Self {
            n_spins,
            b: 1.0,
            lambda_ref,
            eta1: MODE_FREQUENCY_RATIO.sqrt() * DEFAULT_ETA2,
            eta2: DEFAULT_ETA2,
            omega1: MODE_FREQUENCY_RATIO * omega2,
            omega2,
            k_grid: build_k_grid(n_spins)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_couplings(mut self, eta1: f64, eta2: f64) -> Result<Self> {
        self.eta1 = eta1;
        self.eta2 = eta2;
        self.validate()?;
        Ok(self)
    }

    /// Sets `η₂` and ties `η₁ = √(ω₁/ω₂) η₂`.
    pub fn with_eta2(self, eta2: f64) -> Result<Self> {
        let ratio = (self.omega1 / self.omega2).sqrt();
        self.with_couplings(ratio * eta2, eta2)
    }

    pub fn with_frequencies(mut self, omega1: f64, omega2: f64) -> Result<Self> {
        self.omega1 = omega1;
        self.omega2 = omega2;
        self.validate()?;
        Ok(self)
    }

    pub fn with_energy_scale(mut self, b: f64) -> Result<Self> {
        self.b = b;
        self.validate()?;
        Ok(self)
    }

    pub fn with_k_grid(mut self, k_grid: Vec<f64>) -> Result<Self> {
        self.k_grid = k_grid;
        self.validate()?;
        Ok(self)
    }

    /// `ω₁ − ω₂`.
    pub fn delta_omega(&self) -> f64 {
        self.omega1 - self.omega2
    }

    pub fn lambda(&self, m: usize, n: usize) -> Result<f64> {
        dressed_lambda(self.lambda_ref, m, n, self.eta1, self.eta2)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_spins < 2 || !self.n_spins.is_multiple_of(2) {
            return Err(Error::InvalidChainSize(self.n_spins));
        }
        let positive = |name: &'static str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter { name, reason: format!("{v} must be finite and > 0") })
            }
        };
        positive("b", self.b)?;
        positive("lambda_ref", self.lambda_ref)?;
        for (name, eta) in [("eta1", self.eta1), ("eta2", self.eta2)] {
            if !(0.0..1.0).contains(&eta) {
                return Err(Error::InvalidParameter { name, reason: format!("{eta} outside [0, 1)") });
            }
        }
        if !(self.omega1.is_finite() && self.omega2.is_finite()) {
            return Err(Error::InvalidParameter { name: "omega", reason: "non-finite".into() });
        }
        if self.k_grid.is_empty() {
            return Err(Error::InvalidGrid("empty".into()));
        }
        if self.k_grid.iter().any(|&k| !(k > 0.0 && k < PI)) {
            return Err(Error::InvalidGrid("momenta must lie in (0, π)".into()));
        }
        if self.k_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid("momenta must be strictly increasing".into()));
        }
        // vacuum bracket
        self.lambda(0, 0)?;
        Ok(())
    }
}

/// The `(m, n)`-photon sector: dressed coupling and per-momentum spectrum,
/// Bogoliubov angle, and rotation angle `α_k = (θ_k(λ_{m,n}) − θ_k(λ_ref))/2`
/// relative to the reference sector.
#[derive(Clone, Debug)]
pub struct DressedSector {
    pub m: usize,
    pub n: usize,
    pub lambda: f64,
    pub lambda_ref: f64,
    pub k: Arc<[f64]>,
    pub eps: Vec<f64>,
    pub theta: Vec<f64>,
    pub alpha: Vec<f64>,
}

impl DressedSector {
    pub fn len(&self) -> usize {
        self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }

    /// True when both sectors share the momentum grid and the reference state.
    pub fn compatible(&self, other: &DressedSector) -> bool {
        self.lambda_ref.to_bits() == other.lambda_ref.to_bits()
            && (Arc::ptr_eq(&self.k, &other.k) || self.k[..] == other.k[..])
    }
}

pub fn build_sector(cfg: &ChainConfig, m: usize, n: usize) -> Result<DressedSector> {
    let k: Arc<[f64]> = cfg.k_grid.clone().into();
    build_sector_on(cfg, &k, m, n)
}

/// Builds a sector sharing an already-allocated momentum grid.
pub fn build_sector_on(cfg: &ChainConfig, k: &Arc<[f64]>, m: usize, n: usize) -> Result<DressedSector> {
    cfg.validate()?;
    let lambda = cfg.lambda(m, n)?;
    let lambda_ref = cfg.lambda_ref;
    let eps = k.iter().map(|&q| epsilon(lambda, q, cfg.b)).collect();
    let theta: Vec<f64> = k.iter().map(|&q| theta(lambda, q)).collect();
    let alpha = if m == 0 && n == 0 {
        vec![0.0; k.len()]
    } else {
        k.iter()
            .zip(&theta)
            .map(|(&q, &th)| 0.5 * (th - self::theta(lambda_ref, q)))
            .collect()
    };
    Ok(DressedSector { m, n, lambda, lambda_ref, k: Arc::clone(k), eps, theta, alpha })
}

// --- circuit parameters -------------------------------------------------------

pub const VACUUM_PERMEABILITY: f64 = 1.256_637_062_12e-6;
pub const FLUX_QUANTUM: f64 = 2.067_833_848e-15;
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
pub const HBAR: f64 = 1.054_571_817e-34;
pub const PLANCK: f64 = 6.626_070_15e-34;

/// Charging-coupling value quoted alongside the reference circuit, in Hz.
pub const QUOTED_B_HZ: f64 = 1.6e9;

/// SI circuit parameters of the qubit array and resonator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Single-junction Josephson energy, Hz.
    pub josephson_hz: f64,
    /// Inter-box coupling capacitance, F.
    pub c_m: f64,
    /// Total box capacitance, F.
    pub c_sigma: f64,
    /// SQUID loop area, m².
    pub loop_area: f64,
    /// Loop distance from the resonator center conductor, m.
    pub loop_distance: f64,
    /// Resonator length, m.
    pub tlr_length: f64,
    /// Resonator inductance per unit length, H/m.
    pub inductance_per_length: f64,
    /// Mode angular frequencies, rad/s.
    pub omega1: f64,
    pub omega2: f64,
}

impl PhysicalParams {
    /// The reference circuit: C_Σ = 600 aF, C_m = 30 aF, 1 cm resonator,
    /// 10 μm² loop at 1 μm, E_J = 13 GHz, ω₂ = 2π·120 GHz, ω₁ = 3ω₂.
    ///
    /// The inductance per unit length is not part of that set; a standard
    /// 50 Ω coplanar-waveguide value of 4.2e-7 H/m is used.
    pub fn reference_circuit() -> Self {
        let omega2 = 2.0 * PI * 120e9;
        Self {
            josephson_hz: 13e9,
            c_m: 30e-18,
            c_sigma: 600e-18,
            loop_area: 10e-12,
            loop_distance: 1e-6,
            tlr_length: 1e-2,
            inductance_per_length: 4.2e-7,
            omega1: MODE_FREQUENCY_RATIO * omega2,
            omega2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("josephson_hz", self.josephson_hz),
            ("c_m", self.c_m),
            ("c_sigma", self.c_sigma),
            ("loop_area", self.loop_area),
            ("loop_distance", self.loop_distance),
            ("tlr_length", self.tlr_length),
            ("inductance_per_length", self.inductance_per_length),
            ("omega1", self.omega1),
            ("omega2", self.omega2),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter { name, reason: format!("{v} must be finite and > 0") });
            }
        }
        if self.c_m >= self.c_sigma {
            return Err(Error::InvalidParameter {
                name: "c_m",
                reason: format!("coupling capacitance {} must be below total {}", self.c_m, self.c_sigma),
            });
        }
        Ok(())
    }

    /// `B = e² C_m / C_Σ²` in joules.
    pub fn b_joules(&self) -> f64 {
        ELEMENTARY_CHARGE.powi(2) * self.c_m / self.c_sigma.powi(2)
    }
}

/// Spin–mode coupling `η = (π μ₀ S)/(2π r Φ₀) · √(ħω/(L l))` for a mode of
/// angular frequency `omega`.
pub fn eta_from_physical(p: &PhysicalParams, omega: f64) -> Result<f64> {
    p.validate()?;
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::InvalidParameter { name: "omega", reason: format!("{omega} must be > 0") });
    }
    let geometric = PI * VACUUM_PERMEABILITY * p.loop_area / (2.0 * PI * p.loop_distance * FLUX_QUANTUM);
    let zero_point_current = (HBAR * omega / (p.tlr_length * p.inductance_per_length)).sqrt();
    Ok(geometric * zero_point_current)
}

/// Everything derived from a [`PhysicalParams`] set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CircuitReport {
    pub eta1: f64,
    pub eta2: f64,
    /// `η₁/η₂`, equal to `√(ω₁/ω₂)`.
    pub eta_ratio: f64,
    /// `e²C_m/C_Σ²` divided by `h`.
    pub b_formula_hz: f64,
    /// `e²C_m/C_Σ²` divided by `ħ` (rad/s).
    pub b_formula_rad_s: f64,
    pub b_quoted_hz: f64,
    /// `E_J / B` using the formula value in Hz.
    pub lambda_bare: f64,
    /// `ω₂ / B` using the formula value in Hz and `ω₂/2π`.
    pub omega2_over_b: f64,
}

pub fn circuit_report(p: &PhysicalParams) -> Result<CircuitReport> {
    let eta1 = eta_from_physical(p, p.omega1)?;
    let eta2 = eta_from_physical(p, p.omega2)?;
    let b = p.b_joules();
    let b_formula_hz = b / PLANCK;
    Ok(CircuitReport {
        eta1,
        eta2,
        eta_ratio: eta1 / eta2,
        b_formula_hz,
        b_formula_rad_s: b / HBAR,
        b_quoted_hz: QUOTED_B_HZ,
        lambda_bare: p.josephson_hz / b_formula_hz,
        omega2_over_b: p.omega2 / (2.0 * PI) / b_formula_hz,
    })
}
