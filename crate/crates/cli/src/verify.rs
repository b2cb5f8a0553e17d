//! Oracle suites behind `bunching verify`.

use bunching_core::correlations::{second_order, FieldState, Needs, SectorTable};
use bunching_core::decoherence::{coeffs, decay_bound, r_squared_fk, CoeffQuad, OverlapKernel, DEFAULT_CUTOFF};
use bunching_core::oracle::{joint_two_time, rk_numeric, SpinChainEd, MAX_ED_SPINS};
use bunching_core::spectrum::{build_half_odd_k_grid, build_sector, ChainConfig, DressedSector};
use bunching_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::CliError;
use crate::output::number;

pub struct Options {
    pub lambda: f64,
    pub eta2: f64,
    pub samples: usize,
    pub ed_n: usize,
    pub seed: u64,
    /// Flip the sign of `C_{--}` in the closed-form paths.
    pub mutate: bool,
}

pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    /// Reported but not counted towards the exit status.
    pub informational: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, pass: bool, detail: String) -> Self {
        Self { name, pass, informational: false, detail }
    }
}

fn rule(mutate: bool) -> impl Fn(f64, f64) -> CoeffQuad + Copy {
    move |a, b| {
        let q = coeffs(a, b);
        if mutate { CoeffQuad { c_mm: -q.c_mm, ..q } } else { q }
    }
}

fn random_chain(rng: &mut ChaCha8Rng, max_half: usize) -> Result<ChainConfig, CliError> {
    Ok(ChainConfig::new(2 * rng.gen_range(2..=max_half), rng.gen_range(0.05..3.0))?
        .with_couplings(rng.gen_range(0.0..0.3), rng.gen_range(0.0..0.3))?)
}

fn random_pair(rng: &mut ChaCha8Rng, cfg: &ChainConfig) -> Result<(DressedSector, DressedSector), CliError> {
    let a = build_sector(cfg, rng.gen_range(0..=2), rng.gen_range(0..=2))?;
    let b = build_sector(cfg, rng.gen_range(0..=2), rng.gen_range(0..=2))?;
    Ok((a, b))
}

fn per_k(opts: &Options, rng: &mut ChaCha8Rng) -> Result<Check, CliError> {
    let rule = rule(opts.mutate);
    let mut worst = 0.0f64;
    for _ in 0..opts.samples {
        let cfg = random_chain(rng, 32)?;
        let (a, b) = random_pair(rng, &cfg)?;
        let i = rng.gen_range(0..a.len());
        let t = rng.gen_range(-30.0..30.0);
        let closed = rule(a.alpha[i], b.alpha[i]).factor(a.eps[i], b.eps[i], t);
        worst = worst.max((rk_numeric(&a, &b, i, t)? - closed).norm());
    }
    Ok(Check::new("per-k-oracle", worst <= 1e-12, format!("max |d| = {} over {} samples (<= 1e-12)", number(worst), opts.samples)))
}

fn unitarity(opts: &Options, rng: &mut ChaCha8Rng) -> Result<Check, CliError> {
    let rule = rule(opts.mutate);
    let (mut at_zero, mut excess) = (0.0f64, f64::NEG_INFINITY);
    let count = (opts.samples / 10).max(1);
    for _ in 0..count {
        let cfg = random_chain(rng, 1000)?;
        let (a, b) = random_pair(rng, &cfg)?;
        let kernel = OverlapKernel::with_coeffs(&a, &b, rule)?;
        at_zero = at_zero.max((kernel.eval(0.0).to_complex() - 1.0).norm());
        excess = excess.max(kernel.eval(rng.gen_range(0.0..100.0)).to_complex().norm() - 1.0);
    }
    Ok(Check::new(
        "unitarity",
        at_zero <= 1e-12 && excess <= 1e-9,
        format!("max |r(0)-1| = {}, max |r|-1 = {} over {count} pairs", number(at_zero), number(excess)),
    ))
}

fn fk_identity(opts: &Options, rng: &mut ChaCha8Rng) -> Result<Check, CliError> {
    let rule = rule(opts.mutate);
    let mut worst = 0.0f64;
    let count = (opts.samples / 10).max(1);
    for _ in 0..count {
        let cfg = random_chain(rng, 32)?;
        let (a, b) = random_pair(rng, &cfg)?;
        let t = rng.gen_range(-30.0..30.0);
        let kernel = OverlapKernel::with_coeffs(&a, &b, rule)?;
        worst = worst.max((r_squared_fk(&a, &b, t)? - kernel.eval(t).to_complex().norm_sqr()).abs());
    }
    Ok(Check::new("fk-identity", worst <= 1e-10, format!("max |d| = {} over {count} samples (<= 1e-10)", number(worst))))
}

fn spin_chain(opts: &Options) -> Result<Vec<Check>, CliError> {
    let n = opts.ed_n;
    if n > MAX_ED_SPINS {
        return Err(CliError::Usage(format!("--ed-n {n} exceeds {MAX_ED_SPINS}")));
    }
    let rule = rule(opts.mutate);
    let cfg = ChainConfig::new(n, opts.lambda)?.with_eta2(opts.eta2)?;
    let (a, b) = (build_sector(&cfg, 1, 0)?, build_sector(&cfg, 0, 1)?);
    let ed = SpinChainEd::new(n, cfg.b, cfg.lambda_ref, a.lambda, b.lambda)?;
    let product = OverlapKernel::with_coeffs(&a, &b, rule)?;
    let odd = cfg.clone().with_k_grid(build_half_odd_k_grid(n)?)?;
    let exact = OverlapKernel::with_coeffs(&build_sector(&odd, 1, 0)?, &build_sector(&odd, 0, 1)?, rule)?;
    let (mut dev, mut odd_dev) = (0.0f64, 0.0f64);
    for i in 0..=500 {
        let t = 0.01 * i as f64;
        let z = ed.overlap(t);
        dev = dev.max((z.norm_sqr() - product.eval(t).to_complex().norm_sqr()).abs());
        odd_dev = odd_dev.max((z - exact.eval(t).to_complex()).norm());
    }
    Ok(vec![
        Check::new(
            "spin-chain-ed",
            dev <= 0.15,
            format!("N={n}: max ||r|^2_ED - |r|^2_product| on [0,5] = {} (<= 0.15)", number(dev)),
        ),
        Check::new(
            "spin-chain-ed-half-odd",
            odd_dev <= 1e-10,
            format!("N={n}: product on k = (2m-1)pi/N vs ED, max |d| = {} (<= 1e-10)", number(odd_dev)),
        ),
    ])
}

fn joint(rng: &mut ChaCha8Rng) -> Result<Check, CliError> {
    let mut worst = 0.0f64;
    let count = 5;
    for _ in 0..count {
        let amps = |rng: &mut ChaCha8Rng| -> Vec<Complex64> {
            let m = rng.gen_range(1..=3);
            (0..=m).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
        };
        let (c, d) = (amps(rng), amps(rng));
        let state = FieldState::normalized(c, d)?;
        let cfg = ChainConfig::new(2 * rng.gen_range(2..=6), rng.gen_range(0.3..2.0))?
            .with_couplings(rng.gen_range(0.1..0.4), rng.gen_range(0.1..0.3))?
            .with_frequencies(rng.gen_range(1.0..6.0), rng.gen_range(0.2..1.0))?;
        let table = SectorTable::for_state(&cfg, &state, Needs::G2)?;
        let t = rng.gen_range(0.0..20.0);
        let j = joint_two_time(&state, &cfg, t)?;
        worst = worst.max((second_order(&state, &table, t)? - j.second).norm());
    }
    Ok(Check::new("joint-two-time", worst <= 1e-8, format!("second order max |d| = {} over {count} states (<= 1e-8)", number(worst))))
}

fn gaussian_bound(opts: &Options) -> Result<Check, CliError> {
    let cfg = ChainConfig::new(8000, opts.lambda)?.with_eta2(opts.eta2)?;
    let p = match decay_bound(&cfg, DEFAULT_CUTOFF) {
        Ok(p) => p,
        Err(e) => {
            return Ok(Check { name: "gaussian-bound", pass: false, informational: true, detail: e.to_string() });
        }
    };
    let kernel = OverlapKernel::new(&build_sector(&cfg, 1, 0)?, &build_sector(&cfg, 0, 1)?)?;
    let steps = 500;
    let mut violations = 0;
    for i in 1..=steps {
        let t = p.short_time_limit * i as f64 / steps as f64;
        if !p.bound_holds(kernel.eval(t).to_complex().norm_sqr(), t, 1e-6) {
            violations += 1;
        }
    }
    Ok(Check {
        name: "gaussian-bound",
        pass: violations == 0,
        informational: true,
        detail: format!(
            "N=8000, gamma = {}, {violations}/{steps} samples on (0, {}] above e^(-gamma t^2) + 1e-6",
            number(p.gamma),
            number(p.short_time_limit)
        ),
    })
}

pub fn run(opts: &Options) -> Result<Vec<Check>, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut checks = vec![per_k(opts, &mut rng)?, unitarity(opts, &mut rng)?, fk_identity(opts, &mut rng)?];
    checks.extend(spin_chain(opts)?);
    checks.push(joint(&mut rng)?);
    checks.push(gaussian_bound(opts)?);
    Ok(checks)
}
