//! Decoherence factor `r^{(m,n)}_{m',n'}(t) = ⟨G| e^{iH^{(m,n)}t} e^{-iH^{(m',n')}t} |G⟩`.
//!
//! In the pseudospin basis each momentum pair contributes an independent
//! two-level overlap, so
//!
//! ```text
//! r(t) = Π_k Σ_{a,b = ±} C_{a,b,k} exp(i (a ε_k + b ε'_k) t)
//! ```
//!
//! with real weights `C_{a,b,k}` built from the sector rotation angles `α_k`,
//! `α'_k`. Products run in ascending `k` and carry a binary exponent so that
//! `|r|` far below `f64::MIN_POSITIVE` still has a meaningful logarithm.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::{ChainConfig, DressedSector};
use crate::timegrid::TimeGrid;

/// The four weights `C_{a,b,k}` for one momentum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoeffQuad {
    pub c_pp: f64,
    pub c_mm: f64,
    pub c_pm: f64,
    pub c_mp: f64,
}

/// Weights for rotation angle `alpha` (left sector) and `alpha_p` (right sector).
#[inline]
pub fn coeffs(alpha: f64, alpha_p: f64) -> CoeffQuad {
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = alpha_p.sin_cos();
    let (sd, cd) = (alpha - alpha_p).sin_cos();
    CoeffQuad {
        c_pp: sa * cb * sd,
        c_mm: -ca * sb * sd,
        c_pm: sa * sb * cd,
        c_mp: ca * cb * cd,
    }
}

impl CoeffQuad {
    pub fn sum(&self) -> f64 {
        self.c_pp + self.c_mm + self.c_pm + self.c_mp
    }

    /// `Σ_{a,b} C_{a,b} e^{i(a ε + b ε') t}`.
    pub fn factor(&self, eps: f64, eps_p: f64, t: f64) -> Complex64 {
        let (ss, cs) = ((eps + eps_p) * t).sin_cos();
        let (sd, cd) = ((eps - eps_p) * t).sin_cos();
        Complex64::new(
            (self.c_pp + self.c_mm) * cs + (self.c_pm + self.c_mp) * cd,
            (self.c_pp - self.c_mm) * ss + (self.c_pm - self.c_mp) * sd,
        )
    }
}

const RESCALE_EXP: i32 = 256;
const RESCALE_BELOW: f64 = 8.636_168_555_094_445e-78; // 2^-256

/// A complex number `mantissa · 2^exp2`, used for long products of sub-unit
/// factors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledComplex {
    pub mantissa: Complex64,
    pub exp2: i64,
}

impl ScaledComplex {
    pub const ONE: Self = Self { mantissa: Complex64 { re: 1.0, im: 0.0 }, exp2: 0 };

    #[inline]
    pub fn mul_assign(&mut self, f: Complex64) {
        self.mantissa *= f;
        let scale = self.mantissa.re.abs().max(self.mantissa.im.abs());
        if scale < RESCALE_BELOW && scale != 0.0 {
            let up = f64::powi(2.0, RESCALE_EXP);
            self.mantissa *= up;
            self.exp2 -= RESCALE_EXP as i64;
        }
    }

    /// Plain value; underflows to zero once the exponent leaves `f64` range.
    pub fn to_complex(&self) -> Complex64 {
        let mut v = self.mantissa;
        let mut e = self.exp2;
        while e < 0 {
            let step = e.max(-(RESCALE_EXP as i64));
            v *= f64::powi(2.0, step as i32);
            if v.re == 0.0 && v.im == 0.0 {
                break;
            }
            e -= step;
        }
        v
    }

    /// `ln |z|²`, finite even where [`to_complex`](Self::to_complex) underflows.
    pub fn ln_norm_sqr(&self) -> f64 {
        self.mantissa.norm_sqr().ln() + 2.0 * self.exp2 as f64 * LN_2
    }
}

/// Per-momentum constants of a sector pair, ready for repeated evaluation.
///
/// Each factor is `A cos(Σt) + B cos(Δt) + i (C sin(Σt) + D sin(Δt))` with
/// `Σ = ε + ε'`, `Δ = ε − ε'`, `A = C_{++} + C_{--}`, `B = C_{+-} + C_{-+}`,
/// `C = C_{++} − C_{--}`, `D = C_{+-} − C_{-+}`.
#[derive(Clone, Debug)]
pub struct OverlapKernel {
    pub left: (usize, usize),
    pub right: (usize, usize),
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
    d: Vec<f64>,
    sum: Vec<f64>,
    diff: Vec<f64>,
}

/// Number of consecutive uniform samples advanced by phasor rotation before
/// the phases are recomputed from scratch.
const BLOCK: usize = 64;

impl OverlapKernel {
    pub fn new(left: &DressedSector, right: &DressedSector) -> Result<Self> {
        Self::with_coeffs(left, right, coeffs)
    }

    /// Builds the kernel with a caller-supplied weight rule. Used by mutation
    /// checks in the verification runner.
    pub fn with_coeffs(
        left: &DressedSector,
        right: &DressedSector,
        rule: impl Fn(f64, f64) -> CoeffQuad,
    ) -> Result<Self> {
        if !left.compatible(right) {
            return Err(Error::SectorMismatch);
        }
        let len = left.len();
        let mut kernel = Self {
            left: (left.m, left.n),
            right: (right.m, right.n),
            a: Vec::with_capacity(len),
            b: Vec::with_capacity(len),
            c: Vec::with_capacity(len),
            d: Vec::with_capacity(len),
            sum: Vec::with_capacity(len),
            diff: Vec::with_capacity(len),
        };
        for i in 0..len {
            let q = rule(left.alpha[i], right.alpha[i]);
            kernel.a.push(q.c_pp + q.c_mm);
            kernel.b.push(q.c_pm + q.c_mp);
            kernel.c.push(q.c_pp - q.c_mm);
            kernel.d.push(q.c_pm - q.c_mp);
            kernel.sum.push(left.eps[i] + right.eps[i]);
            kernel.diff.push(left.eps[i] - right.eps[i]);
        }
        Ok(kernel)
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn eval(&self, t: f64) -> ScaledComplex {
        let mut acc = ScaledComplex::ONE;
        for i in 0..self.len() {
            let (ss, cs) = (self.sum[i] * t).sin_cos();
            let (sd, cd) = (self.diff[i] * t).sin_cos();
            acc.mul_assign(Complex64::new(
                self.a[i] * cs + self.b[i] * cd,
                self.c[i] * ss + self.d[i] * sd,
            ));
        }
        acc
    }

    /// Evaluates on every grid point. Uniform grids advance phases by rotation
    /// within blocks of 64 samples; blocks run in parallel, and each sample's
    /// product is still accumulated in ascending `k`, so the output does not
    /// depend on the thread count.
    pub fn eval_grid(&self, grid: &TimeGrid) -> Vec<ScaledComplex> {
        match grid {
            TimeGrid::Explicit(times) => times.par_iter().map(|&t| self.eval(t)).collect(),
            &TimeGrid::Uniform { t0, dt, len } => {
                let blocks = len.div_ceil(BLOCK);
                let chunks: Vec<Vec<ScaledComplex>> = (0..blocks)
                    .into_par_iter()
                    .map(|b| {
                        let start = b * BLOCK;
                        let width = BLOCK.min(len - start);
                        self.eval_uniform_block(t0 + start as f64 * dt, dt, width)
                    })
                    .collect();
                chunks.into_iter().flatten().collect()
            }
        }
    }

    fn eval_uniform_block(&self, t_start: f64, dt: f64, width: usize) -> Vec<ScaledComplex> {
        let mut acc = vec![ScaledComplex::ONE; width];
        for i in 0..self.len() {
            let (a, b, c, d) = (self.a[i], self.b[i], self.c[i], self.d[i]);
            let (ss, cs) = (self.sum[i] * t_start).sin_cos();
            let (sd, cd) = (self.diff[i] * t_start).sin_cos();
            let mut ps = Complex64::new(cs, ss);
            let mut pd = Complex64::new(cd, sd);
            let (rs_s, rs_c) = (self.sum[i] * dt).sin_cos();
            let (rd_s, rd_c) = (self.diff[i] * dt).sin_cos();
            let rot_s = Complex64::new(rs_c, rs_s);
            let rot_d = Complex64::new(rd_c, rd_s);
            for slot in acc.iter_mut() {
                slot.mul_assign(Complex64::new(a * ps.re + b * pd.re, c * ps.im + d * pd.im));
                ps *= rot_s;
                pd *= rot_d;
            }
        }
        acc
    }
}

/// Decoherence factor of `left` against `right` at time `t`.
pub fn r_factor(left: &DressedSector, right: &DressedSector, t: f64) -> Result<Complex64> {
    Ok(r_factor_scaled(left, right, t)?.to_complex())
}

pub fn r_factor_scaled(left: &DressedSector, right: &DressedSector, t: f64) -> Result<ScaledComplex> {
    Ok(OverlapKernel::new(left, right)?.eval(t))
}

/// `|r(t)|²` from the explicit per-momentum form
///
/// ```text
/// F_k = [sin²(α−α') cos Σt + cos²(α−α') cos Δt]²
///     + [sin(α+α') sin(α−α') sin Σt − cos(α+α') cos(α−α') sin Δt]²
/// ```
///
/// evaluated independently of [`CoeffQuad`].
pub fn r_squared_fk(left: &DressedSector, right: &DressedSector, t: f64) -> Result<f64> {
    Ok(r_squared_fk_ln(left, right, t)?.exp())
}

/// Natural log of [`r_squared_fk`].
pub fn r_squared_fk_ln(left: &DressedSector, right: &DressedSector, t: f64) -> Result<f64> {
    if !left.compatible(right) {
        return Err(Error::SectorMismatch);
    }
    let mut mantissa = 1.0f64;
    let mut exp2 = 0i64;
    for i in 0..left.len() {
        let (x, y) = (left.alpha[i], right.alpha[i]);
        let (sdiff, cdiff) = (x - y).sin_cos();
        let (ssum, csum) = (x + y).sin_cos();
        let (s_sig, c_sig) = ((left.eps[i] + right.eps[i]) * t).sin_cos();
        let (s_del, c_del) = ((left.eps[i] - right.eps[i]) * t).sin_cos();
        let first = sdiff * sdiff * c_sig + cdiff * cdiff * c_del;
        let second = ssum * sdiff * s_sig - csum * cdiff * s_del;
        mantissa *= first * first + second * second;
        if mantissa < RESCALE_BELOW && mantissa != 0.0 {
            mantissa *= f64::powi(2.0, RESCALE_EXP);
            exp2 -= RESCALE_EXP as i64;
        }
    }
    Ok(mantissa.ln() + exp2 as f64 * LN_2)
}

/// Times paired with complex samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexSeries {
    pub times: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl ComplexSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn abs2(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }
}

/// [`r_factor`] over a time grid.
pub fn r_series(left: &DressedSector, right: &DressedSector, grid: &TimeGrid) -> Result<ComplexSeries> {
    if grid.is_empty() {
        return Err(Error::EmptyTimeGrid);
    }
    let kernel = OverlapKernel::new(left, right)?;
    let values = kernel.eval_grid(grid).iter().map(ScaledComplex::to_complex).collect();
    Ok(ComplexSeries { times: grid.to_vec(), values })
}

/// Parameters of the short-time Gaussian bound `|r^{(1,0)}_{0,1}(t)|² ≤ e^{−γt²}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    pub k_c: f64,
    /// Nearest integer to `N k_c / 2π`.
    pub n_c: u64,
    /// `4π² N_c (N_c+1)(2N_c+1) / (6N²)`, i.e. `Σ_{m ≤ N_c} (2πm/N)²`.
    pub e_kc: f64,
    /// `4B² (λ_{1,0} − λ_{0,1})² E(k_c) / (λ_{0,1} − 1)²`.
    pub gamma: f64,
    pub lambda10: f64,
    pub lambda01: f64,
    /// First zero of `sin(2Bt|λ_{1,0} − 1|)`; the bound is only claimed on
    /// `(0, short_time_limit]`.
    pub short_time_limit: f64,
}

/// Default cutoff `k_c = 2π/10`.
pub const DEFAULT_CUTOFF: f64 = 2.0 * PI / 10.0;

pub fn decay_bound(cfg: &ChainConfig, k_c: f64) -> Result<BoundParams> {
    cfg.validate()?;
    if !(k_c > 0.0 && k_c <= PI) {
        return Err(Error::InvalidParameter { name: "k_c", reason: format!("{k_c} outside (0, π]") });
    }
    let lambda10 = cfg.lambda(1, 0)?;
    let lambda01 = cfg.lambda(0, 1)?;
    if lambda01 == 1.0 {
        return Err(Error::BoundUndefined);
    }
    let n = cfg.n_spins as f64;
    let n_c = (n * k_c / (2.0 * PI)).round() as u64;
    let nc = n_c as f64;
    let e_kc = 4.0 * PI * PI * nc * (nc + 1.0) * (2.0 * nc + 1.0) / (6.0 * n * n);
    let gamma = 4.0 * cfg.b * cfg.b * (lambda10 - lambda01).powi(2) * e_kc / (lambda01 - 1.0).powi(2);
    let short_time_limit = PI / (2.0 * cfg.b * (lambda10 - 1.0).abs());
    Ok(BoundParams { k_c, n_c, e_kc, gamma, lambda10, lambda01, short_time_limit })
}

impl BoundParams {
    pub fn envelope(&self, t: f64) -> f64 {
        (-self.gamma * t * t).exp()
    }

    /// Whether `|r|²(t) ≤ e^{−γt²} + tol`; only meaningful on the short-time window.
    pub fn bound_holds(&self, abs2: f64, t: f64, tol: f64) -> bool {
        abs2 <= self.envelope(t) + tol
    }

    pub fn in_short_time_window(&self, t: f64) -> bool {
        t > 0.0 && t <= self.short_time_limit
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::build_sector;
    use approx::assert_relative_eq;

    fn pair(n: usize, lambda: f64) -> (DressedSector, DressedSector) {
        let cfg = ChainConfig::new(n, lambda).unwrap();
        (build_sector(&cfg, 1, 0).unwrap(), build_sector(&cfg, 0, 1).unwrap())
    }

    #[test]
    fn coeffs_equal_angles() {
        let q = coeffs(0.4, 0.4);
        assert_eq!((q.c_pp, q.c_mm), (0.0, 0.0));
        assert_relative_eq!(q.c_pm, 0.4f64.sin().powi(2), epsilon = 1e-16);
        assert_relative_eq!(q.c_mp, 0.4f64.cos().powi(2), epsilon = 1e-16);
        assert_eq!(coeffs(0.0, 0.0), CoeffQuad { c_pp: 0.0, c_mm: 0.0, c_pm: 0.0, c_mp: 1.0 });
    }

    #[test]
    fn coeffs_sum_to_one() {
        let q = coeffs(0.3, 0.1);
        assert_relative_eq!(q.c_pp, 0.3f64.sin() * 0.1f64.cos() * 0.2f64.sin(), epsilon = 1e-16);
        assert_relative_eq!(q.sum(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn r_at_zero_is_one() {
        let (a, b) = pair(64, 1.0);
        let r = r_factor(&a, &b, 0.0).unwrap();
        assert!((r - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn identical_sectors_give_unity() {
        let (a, _) = pair(128, 0.9);
        for t in [0.0, 0.3, 7.0, 41.0] {
            let r = r_factor(&a, &a, t).unwrap();
            assert!((r - 1.0).norm() < 1e-12, "t={t} r={r}");
            assert_relative_eq!(r_squared_fk(&a, &a, t).unwrap(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn fk_form_matches_modulus() {
        let (a, b) = pair(48, 1.05);
        for t in [0.0, 0.5, 3.3, 20.0] {
            let lhs = r_squared_fk(&a, &b, t).unwrap();
            let rhs = r_factor(&a, &b, t).unwrap().norm_sqr();
            assert!((lhs - rhs).abs() < 1e-10);
        }
        assert_relative_eq!(r_squared_fk(&a, &b, 0.0).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn mismatched_grids_rejected() {
        let (a, _) = pair(16, 1.0);
        let (b, _) = pair(18, 1.0);
        assert_eq!(r_factor(&a, &b, 1.0).unwrap_err(), Error::SectorMismatch);
        let (c, _) = pair(16, 1.1);
        assert_eq!(r_squared_fk(&a, &c, 1.0).unwrap_err(), Error::SectorMismatch);
    }

    #[test]
    fn scaled_product_survives_underflow() {
        let mut z = ScaledComplex::ONE;
        for _ in 0..2000 {
            z.mul_assign(Complex64::new(0.5, 0.0));
        }
        assert_relative_eq!(z.ln_norm_sqr(), 2.0 * 2000.0 * 0.5f64.ln(), max_relative = 1e-12);
        assert_eq!(z.to_complex(), Complex64::new(0.0, 0.0));
        let mut w = ScaledComplex::ONE;
        for _ in 0..300 {
            w.mul_assign(Complex64::new(0.0, 0.5));
        }
        assert_relative_eq!(w.to_complex().norm(), 0.5f64.powi(300), max_relative = 1e-12);
    }

    #[test]
    fn series_matches_pointwise() {
        let (a, b) = pair(400, 1.0);
        let grid = TimeGrid::uniform(30.0, 1000).unwrap();
        let series = r_series(&a, &b, &grid).unwrap();
        for (i, &t) in series.times.iter().enumerate().step_by(37) {
            let direct = r_factor(&a, &b, t).unwrap();
            assert!((series.values[i] - direct).norm() < 1e-10, "t={t}");
        }
        let single = r_series(&a, &b, &TimeGrid::uniform(0.0, 1).unwrap()).unwrap();
        assert_eq!(single.len(), 1);
        assert!((single.values[0] - 1.0).norm() < 1e-12);
    }

    #[test]
    fn bound_parameters() {
        let cfg = ChainConfig::new(8000, 1.0).unwrap().with_couplings(0.03f64.sqrt(), 0.1).unwrap();
        let p = decay_bound(&cfg, DEFAULT_CUTOFF).unwrap();
        assert_eq!(p.n_c, 800);
        // brute sum of (2πm/N)² for m ≤ 800
        let brute: f64 = (1..=800).map(|m| (2.0 * PI * m as f64 / 8000.0).powi(2)).sum();
        assert_relative_eq!(p.e_kc, brute, max_relative = 1e-12);
        assert_relative_eq!(p.e_kc, 105.473_254_613_011_62, max_relative = 1e-12);
        assert_relative_eq!(p.gamma, 1_687.572_073_808_186, max_relative = 1e-10);
    }

    #[test]
    fn bound_trivial_for_equal_couplings() {
        let cfg = ChainConfig::new(100, 1.0).unwrap().with_couplings(0.1, 0.1).unwrap();
        assert_eq!(decay_bound(&cfg, DEFAULT_CUTOFF).unwrap().gamma, 0.0);
    }

    #[test]
    fn bound_undefined_at_dressed_criticality() {
        let base = ChainConfig::new(100, 1.0).unwrap();
        let lambda_ref = 1.0 / base.lambda(0, 1).unwrap();
        let cfg = ChainConfig { lambda_ref, ..base };
        if cfg.lambda(0, 1).unwrap() == 1.0 {
            assert_eq!(decay_bound(&cfg, DEFAULT_CUTOFF).unwrap_err(), Error::BoundUndefined);
        }
    }
}
