use bunching_core::correlations::{
    first_order, g2, g2_specialized, intensity, second_order, FieldState, Frame, Needs, SectorTable,
};
use bunching_core::decoherence::{coeffs, r_factor, r_squared_fk, CoeffQuad, OverlapKernel};
use bunching_core::oracle::{pseudospin_overlap, rk_closed_form};
use bunching_core::spectrum::{build_sector, ChainConfig};
use bunching_core::Complex64;
use proptest::prelude::*;

fn chain() -> impl Strategy<Value = ChainConfig> {
    (2usize..=32, 0.05f64..3.0, 0.0f64..0.3, 0.0f64..0.3)
        .prop_map(|(half, lambda, e1, e2)| ChainConfig::new(2 * half, lambda).unwrap().with_couplings(e1, e2).unwrap())
}

fn sector_index() -> impl Strategy<Value = (usize, usize)> {
    (0usize..=2, 0usize..=2)
}

fn amplitudes(max: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2..=max + 1)
        .prop_map(|v| v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect())
        .prop_filter("non-zero", |v: &Vec<Complex64>| v.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-3)
}

fn field_state() -> impl Strategy<Value = FieldState> {
    (amplitudes(3), amplitudes(3)).prop_map(|(c, d)| FieldState::normalized(c, d).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conjugate_and_time_reversal(cfg in chain(), a in sector_index(), b in sector_index(), t in -40.0f64..40.0) {
        let (sa, sb) = (build_sector(&cfg, a.0, a.1).unwrap(), build_sector(&cfg, b.0, b.1).unwrap());
        let r = r_factor(&sa, &sb, t).unwrap();
        prop_assert!((r - r_factor(&sb, &sa, t).unwrap().conj()).norm() <= 1e-12);
        prop_assert!((r_factor(&sa, &sb, -t).unwrap() - r.conj()).norm() <= 1e-12);
        prop_assert!(r.norm() <= 1.0 + 1e-9);
    }

    #[test]
    fn decoupled_sectors_give_unity(half in 2usize..=64, lambda in 0.05f64..3.0, a in sector_index(), b in sector_index(), t in 0.0f64..100.0) {
        let cfg = ChainConfig::new(2 * half, lambda).unwrap().with_couplings(0.0, 0.0).unwrap();
        let r = r_factor(&build_sector(&cfg, a.0, a.1).unwrap(), &build_sector(&cfg, b.0, b.1).unwrap(), t).unwrap();
        prop_assert!((r - 1.0).norm() <= 1e-12);
    }

    #[test]
    fn per_k_factor_matches_pseudospin(alpha in -1.5f64..1.5, alpha_p in -1.5f64..1.5, eps in 0.0f64..8.0, eps_p in 0.0f64..8.0, t in -30.0f64..30.0) {
        let numeric = pseudospin_overlap(alpha, eps, alpha_p, eps_p, t);
        prop_assert!((numeric - rk_closed_form(alpha, eps, alpha_p, eps_p, t)).norm() <= 1e-12);
    }

    #[test]
    fn fk_identity(cfg in chain(), a in sector_index(), b in sector_index(), t in -30.0f64..30.0) {
        let (sa, sb) = (build_sector(&cfg, a.0, a.1).unwrap(), build_sector(&cfg, b.0, b.1).unwrap());
        let fk = r_squared_fk(&sa, &sb, t).unwrap();
        prop_assert!((fk - r_factor(&sa, &sb, t).unwrap().norm_sqr()).abs() <= 1e-10);
    }

    #[test]
    fn half_half_general_path_matches_closed_form(half in 2usize..=200, lambda in 0.05f64..3.0, t in 0.0f64..30.0) {
        let cfg = ChainConfig::new(2 * half, lambda).unwrap();
        let st = FieldState::half_half();
        let table = SectorTable::for_state(&cfg, &st, Needs::G2).unwrap();
        let r = r_factor(table.sector((1, 0)).unwrap(), table.sector((0, 1)).unwrap(), t).unwrap();
        let closed = g2_specialized(r, cfg.delta_omega() * t).unwrap();
        prop_assert!((g2(&st, &table, t).unwrap() - closed).abs() <= 1e-10);
    }

    #[test]
    fn equal_time_moments(st in field_state(), lambda in 0.3f64..2.0) {
        let cfg = ChainConfig::new(24, lambda).unwrap();
        let table = SectorTable::for_state(&cfg, &st, Needs::ALL).unwrap();
        let second = second_order(&st, &table, 0.0).unwrap();
        prop_assert!((second.re - st.pair_moment()).abs() <= 1e-10);
        prop_assert!(second.im.abs() <= 1e-10);
        prop_assert!((intensity(&st, &table, 0.0).unwrap() - st.intensity_moment()).abs() <= 1e-10);
        let first = first_order(&st, &table, 0.0, Frame::AsPrinted).unwrap();
        prop_assert!((first - st.intensity_moment()).norm() <= 1e-10);
    }

    /// With mode 2 in a number state the cross terms vanish and the
    /// remaining sum is Hermitian under `t → −t`.
    #[test]
    fn first_order_time_reversal_with_fock_mode(c in amplitudes(3), n in 0usize..=3, t in 0.0f64..20.0) {
        let mut d = vec![Complex64::new(0.0, 0.0); 4];
        d[n] = Complex64::new(1.0, 0.0);
        let st = FieldState::normalized(c, d).unwrap();
        let cfg = ChainConfig::new(40, 1.0).unwrap();
        let table = SectorTable::for_state(&cfg, &st, Needs::ALL).unwrap();
        let fwd = first_order(&st, &table, t, Frame::AsPrinted).unwrap();
        let back = first_order(&st, &table, -t, Frame::AsPrinted).unwrap();
        prop_assert!((back - fwd.conj()).norm() <= 1e-12);
    }
}

#[test]
fn decoupled_half_half_is_periodic() {
    let cfg = ChainConfig::new(100, 1.0).unwrap().with_couplings(0.0, 0.0).unwrap();
    let st = FieldState::half_half();
    let table = SectorTable::for_state(&cfg, &st, Needs::G2).unwrap();
    let period = 2.0 * std::f64::consts::PI / cfg.delta_omega();
    for i in 0..200 {
        let t = 0.013 * i as f64;
        let phi = cfg.delta_omega() * t;
        let expected = 0.5 * (1.0 + phi.cos()) / (1.0 - 0.5 * phi.sin());
        let here = g2(&st, &table, t).unwrap();
        assert!((here - expected).abs() < 1e-12);
        assert!((g2(&st, &table, t + 7.0 * period).unwrap() - here).abs() < 1e-9);
    }
}

#[test]
fn sign_flip_in_c_mm_breaks_unitarity() {
    let cfg = ChainConfig::new(64, 1.0).unwrap();
    let (a, b) = (build_sector(&cfg, 1, 0).unwrap(), build_sector(&cfg, 0, 1).unwrap());
    let flipped = |x: f64, y: f64| {
        let q = coeffs(x, y);
        CoeffQuad { c_mm: -q.c_mm, ..q }
    };
    let mutant = OverlapKernel::with_coeffs(&a, &b, flipped).unwrap();
    assert!((mutant.eval(0.0).to_complex() - 1.0).norm() > 1e-6);
    let good = OverlapKernel::new(&a, &b).unwrap();
    assert!((good.eval(0.0).to_complex() - 1.0).norm() < 1e-12);
}
