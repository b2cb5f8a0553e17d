//! Correlations of the combined mode `A = a₁ + i a₂`.
//!
//! The chain starts in its ground state and the two modes in a product of
//! truncated pure states `Σ_m c_m |m⟩ ⊗ Σ_n d_n |n⟩`. Because photons and
//! chain exchange no energy, every correlator reduces to a finite sum of
//! amplitude products times decoherence factors `r^{(m,n)}_{m',n'}(t)`.
//!
//! - first order `⟨A†(t) A⟩`
//! - second order `⟨A† A†(t) A(t) A⟩`, carrying `e^{±i(ω₁−ω₂)t}`
//! - intensity `⟨A†(t) A(t)⟩`
//! - `g²(t) = ⟨A† A†(t) A(t) A⟩ / (⟨A†A⟩ ⟨A†(t) A(t)⟩)`
//!
//! Fock indices outside the truncation contribute zero; terms whose amplitude
//! weight vanishes are skipped before any decoherence factor is requested.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decoherence::{OverlapKernel, ScaledComplex};
use crate::error::{Error, Result};
use crate::spectrum::{build_sector_on, ChainConfig, DressedSector};
use crate::timegrid::TimeGrid;

/// Photon numbers `(m, n)` of modes 1 and 2.
pub type Sector = (usize, usize);

/// Phase convention of the first-order correlation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Frame {
    /// Free-field phases `e^{iω₁t}`, `e^{iω₂t}` omitted from first-order terms.
    #[default]
    AsPrinted,
    /// Free-field phases included.
    LabFrame,
}

impl std::str::FromStr for Frame {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "as-printed" => Ok(Self::AsPrinted),
            "lab-frame" | "lab" => Ok(Self::LabFrame),
            other => Err(format!("unknown frame `{other}` (expected as-printed or lab-frame)")),
        }
    }
}

impl std::fmt::Display for Frame {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::AsPrinted => "as-printed",
            Self::LabFrame => "lab-frame",
        })
    }
}

const NORM_TOL: f64 = 1e-12;
/// Dropped tail mass allowed when truncating a coherent state.
pub const COHERENT_TAIL_TOL: f64 = 1e-10;
/// `g²` samples with `|⟨A†A⟩⟨A†(t)A(t)⟩|` below this are flagged.
pub const G2_DENOMINATOR_TOL: f64 = 1e-12;

/// Truncated amplitudes of the two modes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldState {
    c: Vec<Complex64>,
    d: Vec<Complex64>,
}

impl FieldState {
    pub fn new(c: Vec<Complex64>, d: Vec<Complex64>) -> Result<Self> {
        for (name, v) in [("mode 1", &c), ("mode 2", &d)] {
            if v.len() < 2 {
                return Err(Error::InvalidFieldState(format!("{name} truncation must be at least 1")));
            }
            if v.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                return Err(Error::InvalidFieldState(format!("{name} has non-finite amplitudes")));
            }
            let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            if (norm - 1.0).abs() > NORM_TOL {
                return Err(Error::InvalidFieldState(format!("{name} norm {norm} differs from 1")));
            }
        }
        Ok(Self { c, d })
    }

    /// Normalizes the inputs before validating.
    pub fn normalized(c: Vec<Complex64>, d: Vec<Complex64>) -> Result<Self> {
        let scale = |v: Vec<Complex64>| {
            let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if n == 0.0 {
                v
            } else {
                v.into_iter().map(|z| z / n).collect()
            }
        };
        Self::new(scale(c), scale(d))
    }

    pub fn vacuum() -> Self {
        let one = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        Self { c: one.clone(), d: one }
    }

    /// Both modes in `(|0⟩ + |1⟩)/√2`.
    pub fn half_half() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self { c: vec![h, h], d: vec![h, h] }
    }

    /// Both modes in the coherent state `|α⟩`, truncated at `truncation` and
    /// renormalized.
    pub fn coherent(alpha: Complex64, truncation: usize) -> Result<Self> {
        let amps = coherent_amplitudes(alpha, truncation);
        Self::normalized(amps.clone(), amps)
    }

    /// Both modes in `|α⟩` with the smallest truncation whose dropped tail mass
    /// is below [`COHERENT_TAIL_TOL`].
    pub fn coherent_auto(alpha: Complex64) -> Result<Self> {
        Self::coherent(alpha, coherent_truncation(alpha.norm(), COHERENT_TAIL_TOL))
    }

    pub fn mode1(&self) -> &[Complex64] {
        &self.c
    }

    pub fn mode2(&self) -> &[Complex64] {
        &self.d
    }

    /// Highest retained Fock index of each mode.
    pub fn truncation(&self) -> (usize, usize) {
        (self.c.len() - 1, self.d.len() - 1)
    }

    #[inline]
    fn c(&self, m: i64) -> Complex64 {
        amplitude(&self.c, m)
    }

    #[inline]
    fn d(&self, n: i64) -> Complex64 {
        amplitude(&self.d, n)
    }

    /// Joint amplitudes `ψ[m][n] = c_m d_n`.
    fn joint(&self) -> Vec<Vec<Complex64>> {
        self.c.iter().map(|&cm| self.d.iter().map(|&dn| cm * dn).collect()).collect()
    }

    /// `⟨A†A⟩` evaluated directly from the amplitudes.
    pub fn intensity_moment(&self) -> f64 {
        norm_sqr(&lower(&self.joint()))
    }

    /// `⟨A†A†AA⟩` evaluated directly from the amplitudes.
    pub fn pair_moment(&self) -> f64 {
        norm_sqr(&lower(&lower(&self.joint())))
    }
}

#[inline]
fn amplitude(v: &[Complex64], i: i64) -> Complex64 {
    if i < 0 {
        return Complex64::new(0.0, 0.0);
    }
    v.get(i as usize).copied().unwrap_or_default()
}

/// `A = a₁ + i a₂` on a joint amplitude table.
fn lower(psi: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let rows = psi.len();
    let cols = psi[0].len();
    let mut out = vec![vec![Complex64::new(0.0, 0.0); cols]; rows];
    for m in 0..rows {
        for n in 0..cols {
            if m + 1 < rows {
                out[m][n] += ((m + 1) as f64).sqrt() * psi[m + 1][n];
            }
            if n + 1 < cols {
                out[m][n] += Complex64::i() * ((n + 1) as f64).sqrt() * psi[m][n + 1];
            }
        }
    }
    out
}

fn norm_sqr(psi: &[Vec<Complex64>]) -> f64 {
    psi.iter().flatten().map(|z| z.norm_sqr()).sum()
}

pub fn coherent_amplitudes(alpha: Complex64, truncation: usize) -> Vec<Complex64> {
    let mut amps = Vec::with_capacity(truncation + 1);
    let mut current = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for m in 0..=truncation {
        if m > 0 {
            current *= alpha / (m as f64).sqrt();
        }
        amps.push(current);
    }
    amps
}

/// Smallest truncation `M ≥ 1` with Poisson tail mass beyond `M` below `tol`.
pub fn coherent_truncation(alpha_abs: f64, tol: f64) -> usize {
    let mean = alpha_abs * alpha_abs;
    let mut weight = (-mean).exp();
    let mut kept = weight;
    let mut m = 0usize;
    while m < 1 || 1.0 - kept >= tol {
        m += 1;
        weight *= mean / m as f64;
        kept += weight;
        if m > 10_000 {
            break;
        }
    }
    m
}

// --- formula sums ---------------------------------------------------------------

fn sqrt_u(x: i64) -> f64 {
    (x as f64).sqrt()
}

fn sec(m: i64, n: i64) -> Sector {
    debug_assert!(m >= 0 && n >= 0);
    (m as usize, n as usize)
}

/// `⟨A†(t)A⟩`. `w1`, `w2` multiply the mode-1 and mode-2 terms (free-field
/// phases in the lab frame, ones otherwise).
fn first_order_sum<R>(st: &FieldState, w1: Complex64, w2: Complex64, mut r: R) -> Result<Complex64>
where
    R: FnMut(Sector, Sector) -> Result<Complex64>,
{
    let i = Complex64::i();
    let (m_max, n_max) = st.truncation();
    let mut total = Complex64::new(0.0, 0.0);
    for m in 0..=m_max as i64 {
        for n in 0..=n_max as i64 {
            let (cm, dn) = (st.c(m), st.d(n));
            let p = cm.norm_sqr() * dn.norm_sqr();
            if p != 0.0 {
                if m >= 1 {
                    total += p * m as f64 * r(sec(m, n), sec(m - 1, n))? * w1;
                }
                if n >= 1 {
                    total += p * n as f64 * r(sec(m, n), sec(m, n - 1))? * w2;
                }
            }
            if m >= 1 {
                let g = st.c(m - 1).conj() * cm * st.d(n + 1).conj() * dn;
                if g != Complex64::new(0.0, 0.0) {
                    total -= i * g * sqrt_u(m * (n + 1)) * r(sec(m - 1, n + 1), sec(m - 1, n))? * w2;
                }
            }
            if n >= 1 {
                let g = st.c(m + 1).conj() * cm * st.d(n - 1).conj() * dn;
                if g != Complex64::new(0.0, 0.0) {
                    total += i * g * sqrt_u((m + 1) * n) * r(sec(m + 1, n - 1), sec(m, n - 1))? * w1;
                }
            }
        }
    }
    Ok(total)
}

/// `⟨A†A†(t)A(t)A⟩` with `w = e^{i(ω₁−ω₂)t}`.
fn second_order_sum<R>(st: &FieldState, w: Complex64, mut r: R) -> Result<Complex64>
where
    R: FnMut(Sector, Sector) -> Result<Complex64>,
{
    let i = Complex64::i();
    let wc = w.conj();
    let zero = Complex64::new(0.0, 0.0);
    let (m_max, n_max) = st.truncation();
    let mut total = zero;
    for m in 0..=m_max as i64 {
        for n in 0..=n_max as i64 {
            let (cm, dn) = (st.c(m), st.d(n));
            let p = cm.norm_sqr() * dn.norm_sqr();
            if p != 0.0 {
                total += p * ((m + n) * (m + n - 1)) as f64;
                if m >= 1 && n >= 1 {
                    let mn = (m * n) as f64;
                    total += p * mn * r(sec(m - 1, n), sec(m, n - 1))? * wc;
                    total += p * mn * r(sec(m, n - 1), sec(m - 1, n))? * w;
                }
            }
            if n >= 1 {
                let g = st.c(m + 1).conj() * cm * st.d(n - 1).conj() * dn;
                if g != zero {
                    let s = sqrt_u((m + 1) * n);
                    let mut shifted = zero;
                    if m >= 1 {
                        shifted += m as f64 * s * r(sec(m, n - 1), sec(m - 1, n))?;
                    }
                    if n >= 2 {
                        shifted += (n - 1) as f64 * s * r(sec(m + 1, n - 2), sec(m, n - 1))?;
                    }
                    total += i * g * ((m + n - 1) as f64 * s + shifted * w);
                }
            }
            if m >= 1 {
                let g = st.c(m - 1).conj() * cm * st.d(n + 1).conj() * dn;
                if g != zero {
                    let s = sqrt_u(m * (n + 1));
                    let mut shifted = zero;
                    if m >= 2 {
                        shifted += (m - 1) as f64 * s * r(sec(m - 2, n + 1), sec(m - 1, n))?;
                    }
                    if n >= 1 {
                        shifted += n as f64 * s * r(sec(m - 1, n), sec(m, n - 1))?;
                    }
                    total -= i * g * ((m + n - 1) as f64 * s + shifted * wc);
                }
            }
            if n >= 2 {
                let g = st.c(m + 2).conj() * cm * st.d(n - 2).conj() * dn;
                if g != zero {
                    let s = sqrt_u((m + 2) * (m + 1) * n * (n - 1));
                    total -= g * s * r(sec(m + 1, n - 2), sec(m, n - 1))? * w;
                }
            }
            if m >= 2 {
                let g = st.c(m - 2).conj() * cm * st.d(n + 2).conj() * dn;
                if g != zero {
                    let s = sqrt_u((m - 1) * m * (n + 1) * (n + 2));
                    total -= g * s * r(sec(m - 2, n + 1), sec(m - 1, n))? * wc;
                }
            }
        }
    }
    Ok(total)
}

/// `⟨A†(t)A(t)⟩ = Σ |c_m d_n|² (m+n) − 2 Im⟨a₁†(t) a₂(t)⟩`, with
/// `⟨a₁†(t)a₂(t)⟩ = Σ c*_m d*_n c_{m−1} d_{n+1} √(m(n+1)) r^{(m,n)}_{m−1,n+1} w`.
fn intensity_sum<R>(st: &FieldState, w: Complex64, mut r: R) -> Result<Complex64>
where
    R: FnMut(Sector, Sector) -> Result<Complex64>,
{
    let (m_max, n_max) = st.truncation();
    let mut diagonal = 0.0;
    let mut cross = Complex64::new(0.0, 0.0);
    for m in 0..=m_max as i64 {
        for n in 0..=n_max as i64 {
            let (cm, dn) = (st.c(m), st.d(n));
            diagonal += cm.norm_sqr() * dn.norm_sqr() * (m + n) as f64;
            if m >= 1 {
                let g = cm.conj() * dn.conj() * st.c(m - 1) * st.d(n + 1);
                if g != Complex64::new(0.0, 0.0) {
                    cross += g * sqrt_u(m * (n + 1)) * r(sec(m, n), sec(m - 1, n + 1))? * w;
                }
            }
        }
    }
    Ok(Complex64::new(diagonal - 2.0 * cross.im, 0.0))
}

/// Which correlators a table must serve.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Needs {
    pub first_order: bool,
    pub second_order: bool,
}

impl Needs {
    pub const ALL: Self = Self { first_order: true, second_order: true };
    /// Second order and intensity, enough for `g²`.
    pub const G2: Self = Self { first_order: false, second_order: true };
}

fn canonical(a: Sector, b: Sector) -> (Sector, Sector, bool) {
    if a <= b { (a, b, false) } else { (b, a, true) }
}

/// Every sector pair `(left, right)` whose decoherence factor enters the
/// requested correlators for this state, reported with `left < right`
/// (the reversed pair is the complex conjugate).
pub fn needed_sectors(state: &FieldState, needs: Needs) -> BTreeSet<(Sector, Sector)> {
    let mut pairs = BTreeSet::new();
    let one = Complex64::new(1.0, 0.0);
    let mut record = |a: Sector, b: Sector| {
        let (x, y, _) = canonical(a, b);
        pairs.insert((x, y));
        Ok(one)
    };
    if needs.first_order {
        first_order_sum(state, one, one, &mut record).expect("recording never fails");
    }
    if needs.second_order {
        second_order_sum(state, one, &mut record).expect("recording never fails");
        intensity_sum(state, one, &mut record).expect("recording never fails");
    }
    pairs
}

/// Overlap kernels for a fixed set of sector pairs on one chain configuration.
#[derive(Clone, Debug)]
pub struct SectorTable {
    pub config: ChainConfig,
    sectors: HashMap<Sector, DressedSector>,
    kernels: Vec<OverlapKernel>,
    index: HashMap<(Sector, Sector), usize>,
}

impl SectorTable {
    pub fn new(cfg: &ChainConfig, pairs: impl IntoIterator<Item = (Sector, Sector)>) -> Result<Self> {
        cfg.validate()?;
        let grid: Arc<[f64]> = cfg.k_grid.clone().into();
        let mut sectors = HashMap::new();
        let mut kernels = Vec::new();
        let mut index = HashMap::new();
        let sector = |s: Sector, sectors: &mut HashMap<Sector, DressedSector>| -> Result<DressedSector> {
            if let Some(found) = sectors.get(&s) {
                return Ok(found.clone());
            }
            let built = build_sector_on(cfg, &grid, s.0, s.1)?;
            sectors.insert(s, built.clone());
            Ok(built)
        };
        for (a, b) in pairs {
            let (x, y, _) = canonical(a, b);
            if x == y || index.contains_key(&(x, y)) {
                continue;
            }
            let left = sector(x, &mut sectors)?;
            let right = sector(y, &mut sectors)?;
            index.insert((x, y), kernels.len());
            kernels.push(OverlapKernel::new(&left, &right)?);
        }
        Ok(Self { config: cfg.clone(), sectors, kernels, index })
    }

    pub fn for_state(cfg: &ChainConfig, state: &FieldState, needs: Needs) -> Result<Self> {
        Self::new(cfg, needed_sectors(state, needs))
    }

    pub fn len(&self) -> usize {
        self.kernels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kernels.is_empty()
    }

    pub fn sector(&self, s: Sector) -> Option<&DressedSector> {
        self.sectors.get(&s)
    }

    pub fn contains(&self, a: Sector, b: Sector) -> bool {
        let (x, y, _) = canonical(a, b);
        x == y || self.index.contains_key(&(x, y))
    }

    /// All canonical pair values at time `t`.
    pub fn values_at(&self, t: f64) -> Vec<Complex64> {
        self.kernels.iter().map(|k| k.eval(t).to_complex()).collect()
    }

    fn lookup<'a>(&'a self, values: &'a [Complex64]) -> impl FnMut(Sector, Sector) -> Result<Complex64> + 'a {
        move |a, b| {
            let (x, y, flipped) = canonical(a, b);
            if x == y {
                return Ok(Complex64::new(1.0, 0.0));
            }
            let idx = *self.index.get(&(x, y)).ok_or(Error::MissingSector(a, b))?;
            Ok(if flipped { values[idx].conj() } else { values[idx] })
        }
    }
}

fn phase(omega: f64, t: f64) -> Complex64 {
    Complex64::from_polar(1.0, omega * t)
}

/// `⟨A†(t) A⟩`.
pub fn first_order(state: &FieldState, table: &SectorTable, t: f64, frame: Frame) -> Result<Complex64> {
    let values = table.values_at(t);
    first_order_with(state, table, &values, t, frame)
}

fn first_order_with(
    state: &FieldState,
    table: &SectorTable,
    values: &[Complex64],
    t: f64,
    frame: Frame,
) -> Result<Complex64> {
    let (w1, w2) = match frame {
        Frame::AsPrinted => (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)),
        Frame::LabFrame => (phase(table.config.omega1, t), phase(table.config.omega2, t)),
    };
    first_order_sum(state, w1, w2, table.lookup(values))
}

/// `⟨A† A†(t) A(t) A⟩`.
pub fn second_order(state: &FieldState, table: &SectorTable, t: f64) -> Result<Complex64> {
    let values = table.values_at(t);
    second_order_sum(state, phase(table.config.delta_omega(), t), table.lookup(&values))
}

/// `⟨A†(t) A(t)⟩`.
pub fn intensity(state: &FieldState, table: &SectorTable, t: f64) -> Result<f64> {
    let values = table.values_at(t);
    Ok(intensity_sum(state, phase(table.config.delta_omega(), t), table.lookup(&values))?.re)
}

/// `g²(t)`; errors when the denominator is below [`G2_DENOMINATOR_TOL`].
pub fn g2(state: &FieldState, table: &SectorTable, t: f64) -> Result<f64> {
    let values = table.values_at(t);
    let w = phase(table.config.delta_omega(), t);
    let numerator = second_order_sum(state, w, table.lookup(&values))?;
    let now = intensity_sum(state, w, table.lookup(&values))?.re;
    ratio(numerator.re, state.intensity_moment() * now)
}

fn ratio(numerator: f64, denominator: f64) -> Result<f64> {
    if denominator.abs() <= G2_DENOMINATOR_TOL || !denominator.is_finite() {
        return Err(Error::VanishingDenominator(denominator));
    }
    Ok(numerator / denominator)
}

/// Closed form of `g²` for both modes in `(|0⟩+|1⟩)/√2`, with `x = r e^{iφ}`,
/// `r = r^{(1,0)}_{0,1}(t)` and `φ = (ω₁−ω₂)t`:
///
/// ```text
/// g² = ½ (1 + Re x) / (1 − ½ Im x)
/// ```
///
/// The ½ on `Im x` comes from `⟨a₁†(t)a₂(t)⟩ = ¼ x`.
pub fn g2_specialized(r: Complex64, phase_angle: f64) -> Result<f64> {
    let x = r * Complex64::from_polar(1.0, phase_angle);
    ratio(0.5 * (1.0 + x.re), 1.0 - 0.5 * x.im)
}

/// `½ (1 + Re x)/(1 − Im x)`: the closed form with unit weight on `Im x`.
/// It agrees with [`g2_specialized`] only where `Im x = 0` and is singular at
/// `x = i`; it does not equal the correlator ratio.
pub fn g2_specialized_unit_im_weight(r: Complex64, phase_angle: f64) -> Result<f64> {
    let x = r * Complex64::from_polar(1.0, phase_angle);
    ratio(0.5 * (1.0 + x.re), 1.0 - x.im)
}

/// Series output of a [`Correlator`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub times: Vec<f64>,
    /// `⟨A†(t)A⟩`, when requested.
    pub g1: Option<Vec<Complex64>>,
    /// `⟨A†A†(t)A(t)A⟩`.
    pub g2num: Vec<Complex64>,
    /// `⟨A†(t)A(t)⟩`.
    pub intensity: Vec<f64>,
    /// `g²(t)`; `None` marks a flagged denominator.
    pub g2: Vec<Option<f64>>,
    pub frame: Frame,
}

impl CorrelationResult {
    /// Mean of the unflagged `g²` samples in the last `fraction` of the series.
    pub fn trailing_mean(&self, fraction: f64) -> Option<f64> {
        let len = self.g2.len();
        let start = len - ((len as f64 * fraction).round() as usize).clamp(1, len);
        let tail: Vec<f64> = self.g2[start..].iter().flatten().copied().collect();
        (!tail.is_empty()).then(|| tail.iter().sum::<f64>() / tail.len() as f64)
    }

    pub fn gap_count(&self) -> usize {
        self.g2.iter().filter(|v| v.is_none()).count()
    }
}

/// A field state with its sector table, evaluated over time grids.
#[derive(Clone, Debug)]
pub struct Correlator {
    pub state: FieldState,
    pub table: SectorTable,
    pub frame: Frame,
    pub with_first_order: bool,
}

impl Correlator {
    pub fn new(cfg: &ChainConfig, state: FieldState, frame: Frame, with_first_order: bool) -> Result<Self> {
        let needs = if with_first_order { Needs::ALL } else { Needs::G2 };
        let table = SectorTable::for_state(cfg, &state, needs)?;
        Ok(Self { state, table, frame, with_first_order })
    }

    pub fn g2_at(&self, t: f64) -> Result<f64> {
        g2(&self.state, &self.table, t)
    }

    pub fn evaluate(&self, grid: &TimeGrid) -> Result<CorrelationResult> {
        if grid.is_empty() {
            return Err(Error::EmptyTimeGrid);
        }
        let columns: Vec<Vec<ScaledComplex>> = self.table.kernels.iter().map(|k| k.eval_grid(grid)).collect();
        let initial = self.state.intensity_moment();
        let dw = self.table.config.delta_omega();
        let rows: Vec<Result<(Option<Complex64>, Complex64, f64)>> = (0..grid.len())
            .into_par_iter()
            .map(|j| {
                let t = grid.at(j);
                let values: Vec<Complex64> = columns.iter().map(|c| c[j].to_complex()).collect();
                let w = phase(dw, t);
                let g1 = if self.with_first_order {
                    Some(first_order_with(&self.state, &self.table, &values, t, self.frame)?)
                } else {
                    None
                };
                let num = second_order_sum(&self.state, w, self.table.lookup(&values))?;
                let now = intensity_sum(&self.state, w, self.table.lookup(&values))?.re;
                Ok((g1, num, now))
            })
            .collect();
        let mut out = CorrelationResult {
            times: grid.to_vec(),
            g1: self.with_first_order.then(Vec::new),
            g2num: Vec::with_capacity(grid.len()),
            intensity: Vec::with_capacity(grid.len()),
            g2: Vec::with_capacity(grid.len()),
            frame: self.frame,
        };
        for row in rows {
            let (g1, num, now) = row?;
            if let (Some(col), Some(v)) = (out.g1.as_mut(), g1) {
                col.push(v);
            }
            out.g2num.push(num);
            out.intensity.push(now);
            out.g2.push(ratio(num.re, initial * now).ok());
        }
        Ok(out)
    }
}
