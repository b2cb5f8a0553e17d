//! Acceptance criteria, one line each.
//!
//! Every criterion prints `PASS` or `FAIL` with the measured numbers. Some
//! criteria are known not to hold for the model as implemented; those are
//! listed with `Expect::Fail` and a reason, still print `FAIL`, and only make
//! the run exit non-zero if they unexpectedly start passing (or a `Pass`
//! criterion fails).

use std::process::ExitCode;
use std::time::Instant;

use bunching_core::correlations::{second_order, Correlator, FieldState, Frame, Needs, SectorTable};
use bunching_core::decoherence::{decay_bound, r_factor, r_series, r_squared_fk, DEFAULT_CUTOFF};
use bunching_core::oracle::{joint_two_time, rk_closed_form, rk_numeric, SpinChainEd};
use bunching_core::spectrum::{build_sector, circuit_report, ChainConfig, PhysicalParams};
use bunching_core::{Complex64, TimeGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_917;

/// `min_t |r^{(1,0)}_{0,1}|²` for N = 8000 on `t ∈ [0, 50]`, 20 000 steps,
/// default couplings.
const SNAPSHOT_MIN_ABS2: [(f64, f64); 3] =
    [(0.1, 0.991_672_091_737_764_6), (1.0, 1.363_099_005_522_874_5e-22), (2.0, 0.689_527_269_528_942_3)];

enum Expect {
    Pass,
    Fail(&'static str),
}

struct Verdict {
    pass: bool,
    detail: String,
}

struct Criterion {
    name: &'static str,
    expect: Expect,
    run: fn() -> Verdict,
}

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED)
}

fn pair(cfg: &ChainConfig) -> (bunching_core::DressedSector, bunching_core::DressedSector) {
    (build_sector(cfg, 1, 0).unwrap(), build_sector(cfg, 0, 1).unwrap())
}

fn unitarity() -> Verdict {
    let mut rng = rng();
    let (mut at_zero, mut excess) = (0.0f64, f64::NEG_INFINITY);
    for _ in 0..1000 {
        let n = 2 * rng.gen_range(2..=4000);
        let cfg = ChainConfig::new(n, rng.gen_range(0.05..3.0)).unwrap();
        let a = build_sector(&cfg, rng.gen_range(0..=3), rng.gen_range(0..=3)).unwrap();
        let b = build_sector(&cfg, rng.gen_range(0..=3), rng.gen_range(0..=3)).unwrap();
        let t = rng.gen_range(0.0..100.0);
        at_zero = at_zero.max((r_factor(&a, &b, 0.0).unwrap() - 1.0).norm());
        excess = excess.max(r_factor(&a, &b, t).unwrap().norm() - 1.0);
    }
    Verdict {
        pass: at_zero <= 1e-12 && excess <= 1e-9,
        detail: format!("max |r(0)-1| = {at_zero:.2e} (<= 1e-12), max |r(t)|-1 = {excess:.2e} (<= 1e-9), 1000 samples"),
    }
}

fn oracle_equivalence() -> Verdict {
    let start = Instant::now();
    let mut rng = rng();
    let mut per_k = 0.0f64;
    for _ in 0..10_000 {
        let cfg = ChainConfig::new(2 * rng.gen_range(2..=32), rng.gen_range(0.05..3.0))
            .unwrap()
            .with_couplings(rng.gen_range(0.0..0.3), rng.gen_range(0.0..0.3))
            .unwrap();
        let a = build_sector(&cfg, rng.gen_range(0..=2), rng.gen_range(0..=2)).unwrap();
        let b = build_sector(&cfg, rng.gen_range(0..=2), rng.gen_range(0..=2)).unwrap();
        let i = rng.gen_range(0..a.len());
        let t = rng.gen_range(-30.0..30.0);
        let closed = rk_closed_form(a.alpha[i], a.eps[i], b.alpha[i], b.eps[i], t);
        per_k = per_k.max((rk_numeric(&a, &b, i, t).unwrap() - closed).norm());
    }
    let mut fk = 0.0f64;
    for _ in 0..1000 {
        let cfg = ChainConfig::new(2 * rng.gen_range(2..=32), rng.gen_range(0.05..3.0)).unwrap();
        let a = build_sector(&cfg, rng.gen_range(0..=2), rng.gen_range(0..=2)).unwrap();
        let b = build_sector(&cfg, rng.gen_range(0..=2), rng.gen_range(0..=2)).unwrap();
        let t = rng.gen_range(-30.0..30.0);
        fk = fk.max((r_squared_fk(&a, &b, t).unwrap() - r_factor(&a, &b, t).unwrap().norm_sqr()).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    Verdict {
        pass: per_k <= 1e-12 && fk <= 1e-10 && secs < 10.0,
        detail: format!(
            "per-k max |d| = {per_k:.2e} (<= 1e-12, 1e4 samples), F_k product vs |r|^2 max |d| = {fk:.2e} (<= 1e-10), {secs:.2} s (< 10 s)"
        ),
    }
}

fn ed_deviation(n: usize) -> f64 {
    let cfg = ChainConfig::new(n, 1.0).unwrap();
    let (a, b) = pair(&cfg);
    let ed = SpinChainEd::new(n, cfg.b, cfg.lambda_ref, a.lambda, b.lambda).unwrap();
    (0..=500)
        .map(|i| {
            let t = i as f64 * 0.01;
            (ed.overlap(t).norm_sqr() - r_factor(&a, &b, t).unwrap().norm_sqr()).abs()
        })
        .fold(0.0, f64::max)
}

fn ed_consistency() -> Verdict {
    let start = Instant::now();
    let devs: Vec<(usize, f64)> = [6, 8, 10, 12].into_iter().map(|n| (n, ed_deviation(n))).collect();
    let at_ten = devs[2].1;
    let shrinking = devs.windows(2).all(|w| w[1].1 < w[0].1);
    let secs = start.elapsed().as_secs_f64();
    let listed: Vec<String> = devs.iter().map(|(n, d)| format!("N={n}: {d:.4}")).collect();
    Verdict {
        pass: at_ten <= 0.15 && shrinking && secs < 120.0,
        detail: format!(
            "max ||r|^2_ED - |r|^2_product| on [0,5]: {} ; N=10 within 0.15: {}, shrinking in N: {shrinking}, {secs:.1} s",
            listed.join(", "),
            at_ten <= 0.15
        ),
    }
}

fn random_state(rng: &mut ChaCha8Rng) -> FieldState {
    let amps = |rng: &mut ChaCha8Rng| -> Vec<Complex64> {
        let m = rng.gen_range(1..=3);
        (0..=m).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
    };
    let c = amps(rng);
    let d = amps(rng);
    FieldState::normalized(c, d).unwrap()
}

fn joint_validation() -> Verdict {
    let mut rng = rng();
    let mut worst = 0.0f64;
    let mut worst_other = 0.0f64;
    for _ in 0..20 {
        let state = random_state(&mut rng);
        let cfg = ChainConfig::new(2 * rng.gen_range(2..=6), rng.gen_range(0.3..2.0))
            .unwrap()
            .with_couplings(rng.gen_range(0.1..0.4), rng.gen_range(0.1..0.3))
            .unwrap()
            .with_frequencies(rng.gen_range(1.0..6.0), rng.gen_range(0.2..1.0))
            .unwrap();
        let table = SectorTable::for_state(&cfg, &state, Needs::ALL).unwrap();
        let t = rng.gen_range(0.0..20.0);
        let joint = joint_two_time(&state, &cfg, t).unwrap();
        let second = second_order(&state, &table, t).unwrap();
        worst = worst.max((second - joint.second).norm());
        let first = bunching_core::correlations::first_order(&state, &table, t, Frame::LabFrame).unwrap();
        let intensity = bunching_core::correlations::intensity(&state, &table, t).unwrap();
        worst_other = worst_other.max((first - joint.first).norm()).max((intensity - joint.intensity).abs());
    }
    Verdict {
        pass: worst <= 1e-8,
        detail: format!(
            "second order max |d| = {worst:.2e} (<= 1e-8) over 20 states (M <= 3, K <= 5); first order and intensity max |d| = {worst_other:.2e}"
        ),
    }
}

fn criticality_contrast() -> Verdict {
    let grid = TimeGrid::uniform(50.0, 20_000).unwrap();
    let mut mins = Vec::new();
    let mut snapshot_dev = 0.0f64;
    for &(lambda, frozen) in &SNAPSHOT_MIN_ABS2 {
        let cfg = ChainConfig::new(8000, lambda).unwrap();
        let (a, b) = pair(&cfg);
        let min = r_series(&a, &b, &grid).unwrap().abs2().into_iter().fold(f64::INFINITY, f64::min);
        snapshot_dev = snapshot_dev.max(((min - frozen) / frozen).abs());
        mins.push((lambda, min));
    }
    let ordered = mins[1].1 < mins[0].1 && mins[1].1 < mins[2].1;
    let listed: Vec<String> = mins.iter().map(|(l, m)| format!("lambda={l}: {m:e}")).collect();
    Verdict {
        pass: ordered && snapshot_dev <= 1e-6,
        detail: format!(
            "min |r|^2 on [0,50], N=8000: {}; critical minimum lowest: {ordered}; snapshot rel. dev {snapshot_dev:.1e} (<= 1e-6)",
            listed.join(", ")
        ),
    }
}

fn gaussian_bound() -> Verdict {
    let cfg = ChainConfig::new(8000, 1.0).unwrap();
    let bound = decay_bound(&cfg, DEFAULT_CUTOFF).unwrap();
    let (a, b) = pair(&cfg);
    let steps = 2000;
    let mut violations = 0;
    let mut first = None;
    let mut excess = f64::NEG_INFINITY;
    for i in 1..=steps {
        let t = bound.short_time_limit * i as f64 / steps as f64;
        let abs2 = r_factor(&a, &b, t).unwrap().norm_sqr();
        excess = excess.max(abs2 - bound.envelope(t));
        if !bound.bound_holds(abs2, t, 1e-6) {
            violations += 1;
            first.get_or_insert((t, abs2, bound.envelope(t)));
        }
    }
    let first = first.map_or("none".to_string(), |(t, r, e)| format!("t={t:.4}: |r|^2={r:.4e} vs e^(-gt^2)={e:.4e}"));
    Verdict {
        pass: violations == 0,
        detail: format!(
            "N_c={}, E(k_c)={:.4}, gamma={:.2}, window (0, {:.2}]; {violations}/{steps} samples exceed bound + 1e-6 (max excess {excess:.3e}); first: {first}",
            bound.n_c, bound.e_kc, bound.gamma, bound.short_time_limit
        ),
    }
}

fn half_half_run(lambda: f64) -> (f64, f64) {
    let cfg = ChainConfig::new(8000, lambda).unwrap();
    let corr = Correlator::new(&cfg, FieldState::half_half(), Frame::AsPrinted, false).unwrap();
    let res = corr.evaluate(&TimeGrid::uniform(50.0, 20_000).unwrap()).unwrap();
    (res.g2[0].unwrap(), res.trailing_mean(0.25).unwrap())
}

fn bunching_steady_state() -> Verdict {
    let (g0, critical) = half_half_run(1.0);
    let (_, weak) = half_half_run(0.1);
    let (_, strong) = half_half_run(2.0);
    let critical_ok = (g0 - 1.0).abs() <= 1e-10 && (critical - 0.5).abs() <= 0.05;
    let off_ok = weak > 0.7 && strong > 0.7;
    Verdict {
        pass: critical_ok && off_ok,
        detail: format!(
            "lambda=1: g2(0)-1 = {:.1e}, trailing mean {critical:.4} (0.5 +- 0.05: {critical_ok}); trailing mean lambda=0.1: {weak:.4}, lambda=2: {strong:.4} (> 0.7: {off_ok})",
            g0 - 1.0
        ),
    }
}

fn coherent_margin(truncation: usize) -> (f64, f64) {
    let cfg = ChainConfig::new(8000, 1.0).unwrap();
    let state = FieldState::coherent(Complex64::new(1.0, 0.0), truncation).unwrap();
    let corr = Correlator::new(&cfg, state, Frame::AsPrinted, false).unwrap();
    let res = corr.evaluate(&TimeGrid::uniform(50.0, 2000).unwrap()).unwrap();
    let g0 = res.g2[0].unwrap();
    (g0, g0 - res.trailing_mean(0.25).unwrap())
}

fn coherent_bunching() -> Verdict {
    let (g0, margin) = coherent_margin(12);
    let (_, refined) = coherent_margin(14);
    // A margin that belongs to the model, not to the truncation, must survive
    // raising the cutoff.
    let persistent = margin > 0.0 && refined >= 0.5 * margin;
    Verdict {
        pass: persistent,
        detail: format!(
            "M=12: g2(0) = {g0:.12}, g2(0) - trailing mean = {margin:.3e}; M=14: {refined:.3e}; margin survives truncation: {persistent}"
        ),
    }
}

fn parameter_pipeline() -> Verdict {
    let report = circuit_report(&PhysicalParams::reference_circuit()).unwrap();
    let in_range = (0.05..=0.2).contains(&report.eta2);
    let ratio_ok = (report.eta_ratio - 3f64.sqrt()).abs() <= 2.0 * f64::EPSILON;
    Verdict {
        pass: in_range && ratio_ok,
        detail: format!(
            "eta2 = {:.4e} (in [0.05, 0.2]: {in_range}), eta1/eta2 - sqrt(3) = {:.1e}; B formula {:.3} GHz vs quoted {:.1} GHz (reported only)",
            report.eta2,
            report.eta_ratio - 3f64.sqrt(),
            report.b_formula_hz / 1e9,
            report.b_quoted_hz / 1e9
        ),
    }
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { name: "unitarity", expect: Expect::Pass, run: unitarity },
        Criterion { name: "oracle-equivalence", expect: Expect::Pass, run: oracle_equivalence },
        Criterion {
            name: "spin-chain-ed",
            expect: Expect::Fail(
                "deviation grows from N=6 to N=12; the periodic-momentum product and the ring ground state differ by a boundary term that peaks near N=50",
            ),
            run: ed_consistency,
        },
        Criterion { name: "second-order-vs-joint", expect: Expect::Pass, run: joint_validation },
        Criterion { name: "criticality-contrast", expect: Expect::Pass, run: criticality_contrast },
        Criterion {
            name: "gaussian-bound",
            expect: Expect::Fail(
                "short-time decay is set by all momenta, rate ~3.3 B^2 independent of lambda, far below gamma",
            ),
            run: gaussian_bound,
        },
        Criterion {
            name: "bunching-steady-state",
            expect: Expect::Fail(
                "with r -> rho e^{i phi}, the time average of g2 is 1/(2 sqrt(1 - rho^2/4)) <= 0.577 for any rho",
            ),
            run: bunching_steady_state,
        },
        Criterion {
            name: "coherent-bunching",
            expect: Expect::Fail("A|a,a> = a(1+i)|a,a> makes g2 identically 1; the margin is truncation error"),
            run: coherent_bunching,
        },
        Criterion {
            name: "parameter-pipeline",
            expect: Expect::Fail("the listed circuit values give eta2 ~ 4e-4 for any realistic inductance per length"),
            run: parameter_pipeline,
        },
    ];

    let mut unexpected = 0;
    for c in &criteria {
        let start = Instant::now();
        let verdict = (c.run)();
        let secs = start.elapsed().as_secs_f64();
        let status = if verdict.pass { "PASS" } else { "FAIL" };
        println!("{status} {:<22} {} [{secs:.1} s]", c.name, verdict.detail);
        match (&c.expect, verdict.pass) {
            (Expect::Pass, true) => {}
            (Expect::Fail(why), false) => println!("     known: {why}"),
            (Expect::Pass, false) => {
                unexpected += 1;
                println!("     UNEXPECTED failure");
            }
            (Expect::Fail(_), true) => {
                unexpected += 1;
                println!("     UNEXPECTED pass; update the expectation");
            }
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
