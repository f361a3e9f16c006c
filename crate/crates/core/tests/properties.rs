use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use squeeze_probe_core::approx::{approx_coherences, coupling_correlation, rephasing_condition};
use squeeze_probe_core::gaussian::{
    characteristic_value, epr_covariance, is_separable, mts_covariance, mts_from_r,
    position_correlation, purity, purity_tolerance, quadrature_variance, sts_covariance,
    validate_physical, Quadrature,
};
use squeeze_probe_core::nonmarkov::{pair_measures, MeasureConfig};
use squeeze_probe_core::{
    BathSpec, BellPair, Complex64, Dynamics, Qubit, QubitAmplitudes, Schedule, TwoModeCovariance,
};

fn sts_strategy() -> impl Strategy<Value = TwoModeCovariance> {
    (
        -3.0..3.0f64,
        0.0..std::f64::consts::TAU,
        0.0..5.0f64,
        0.0..5.0f64,
    )
        .prop_map(|(r, phi, n1, n2)| sts_covariance(r, phi, n1, n2).unwrap())
}

fn schedule_strategy() -> impl Strategy<Value = Schedule> {
    (0.001..0.3f64, 0.0..0.3f64, 0.001..0.3f64)
        .prop_map(|(l1, s2, l2)| Schedule::new(0.0, l1, s2, s2 + l2).unwrap())
}

fn bath_strategy() -> impl Strategy<Value = BathSpec> {
    (
        0.1..2.0f64,
        0.1..2.0f64,
        0.5..2.0f64,
        -1.0..1.0f64,
        -1.0..1.0f64,
    )
        .prop_map(|(a1, a2, wc, e1, e2)| BathSpec::new(a1, a2, wc, e1, e2).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn constructors_are_physical(r in -6.0..6.0f64, phi in 0.0..std::f64::consts::TAU, n1 in 0.0..10.0f64, n2 in 0.0..10.0f64) {
        prop_assert!(validate_physical(&sts_covariance(r, phi, n1, n2).unwrap()));
        prop_assert!(validate_physical(&epr_covariance(r)));
        prop_assert!(validate_physical(&mts_from_r(r)));
        prop_assert!(validate_physical(&mts_covariance(n1, n2).unwrap()));
    }

    #[test]
    fn product_rule(cov in sts_strategy(), sched in schedule_strategy(), bath in bath_strategy(), frac in 0.0..1.2f64) {
        let d = Dynamics::new(sched, bath, cov).unwrap();
        let t = frac * sched.end();
        let s = d.sample(t);
        let lhs = s.kappa12.norm() * s.lambda12.norm();
        let rhs = s.kappa1.norm_sqr() * s.kappa2.norm_sqr();
        prop_assert!((lhs - rhs).abs() <= 1e-12, "{lhs} vs {rhs}");
    }

    #[test]
    fn sign_flip_swaps_pairs(r in 0.0..4.0f64, n1 in 0.0..3.0f64, n2 in 0.0..3.0f64, sched in schedule_strategy(), frac in 0.0..1.2f64) {
        let bath = BathSpec::default();
        let p = Dynamics::new(sched, bath, sts_covariance(r, 0.0, n1, n2).unwrap()).unwrap();
        let m = Dynamics::new(sched, bath, sts_covariance(-r, 0.0, n1, n2).unwrap()).unwrap();
        let t = frac * sched.end();
        prop_assert!((p.bell_distance(t, BellPair::I) - m.bell_distance(t, BellPair::II)).abs() <= 1e-12);
        prop_assert!((p.bell_distance(t, BellPair::II) - m.bell_distance(t, BellPair::I)).abs() <= 1e-12);
    }

    #[test]
    fn local_factors_decay(cov in sts_strategy(), sched in schedule_strategy(), bath in bath_strategy()) {
        let d = Dynamics::new(sched, bath, cov).unwrap();
        let n = 64;
        let mut prev = [0.0f64, 0.0];
        for i in 0..=n {
            let t = 1.1 * sched.end() * i as f64 / n as f64;
            let now = [d.ln_abs_kappa_local(Qubit::First, t), d.ln_abs_kappa_local(Qubit::Second, t)];
            prop_assert!(now[0] <= prev[0] && now[1] <= prev[1]);
            prev = now;
        }
    }

    #[test]
    fn moduli_ignore_qubit_energies(cov in sts_strategy(), sched in schedule_strategy(), e1 in -3.0..3.0f64, e2 in -3.0..3.0f64) {
        let plain = Dynamics::new(sched, BathSpec::default(), cov).unwrap();
        let shifted = Dynamics::new(sched, BathSpec::new(1.0, 1.0, 1.0, e1, e2).unwrap(), cov).unwrap();
        let t = 0.7 * sched.end();
        let (a, b) = (plain.sample(t), shifted.sample(t));
        prop_assert!((a.kappa12.norm() - b.kappa12.norm()).abs() <= 1e-15);
        prop_assert!((a.lambda12.norm() - b.lambda12.norm()).abs() <= 1e-15);
    }

    #[test]
    fn moduli_bounded_by_one(cov in sts_strategy(), sched in schedule_strategy(), bath in bath_strategy(), frac in 0.0..1.2f64) {
        let s = Dynamics::new(sched, bath, cov).unwrap().sample(frac * sched.end());
        for z in [s.kappa1, s.kappa2, s.kappa12, s.lambda12] {
            prop_assert!(z.norm() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn density_matrix_is_a_state(cov in sts_strategy(), sched in schedule_strategy(), frac in 0.0..1.5f64, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw: Vec<Complex64> = (0..4).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let norm = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let amps = QubitAmplitudes::new(raw[0] / norm, raw[1] / norm, raw[2] / norm, raw[3] / norm).unwrap();
        let d = Dynamics::new(sched, BathSpec::default(), cov).unwrap();
        let rho = d.reduced_density_matrix(frac * sched.end(), &amps).unwrap();
        prop_assert!((rho.trace() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        prop_assert!(rho.max_hermiticity_defect() < 1e-15);
        prop_assert!(rho.eigenvalues()[0] >= -1e-10, "{:?}", rho.eigenvalues());
    }

    #[test]
    fn characteristic_value_shrinks_with_scale(cov in sts_strategy(), l in prop::array::uniform4(-1.0..1.0f64), s in 0.0..1.0f64) {
        prop_assume!(l.iter().any(|x| x.abs() > 1e-3));
        let scaled = l.map(|x| x * s);
        let full = characteristic_value(&cov, l).unwrap();
        let part = characteristic_value(&cov, scaled).unwrap();
        prop_assert!(part >= full);
        prop_assert!(full < 1.0);
    }

    #[test]
    fn epr_correlation(r in -6.0..6.0f64) {
        prop_assert!((position_correlation(&epr_covariance(r)) - (2.0 * r).tanh()).abs() <= 1e-12);
    }

    #[test]
    fn epr_is_pure(r in -5.0..5.0f64) {
        let s = epr_covariance(r);
        prop_assert!((purity(&s).unwrap() - 1.0).abs() <= purity_tolerance(&s));
    }

    #[test]
    fn mts_difference_variance_is_one(r in -6.0..6.0f64) {
        prop_assert_eq!(quadrature_variance(&mts_from_r(r), Quadrature::Difference), 1.0);
    }

    #[test]
    fn negative_r_flips_cross_terms(r in 0.0..4.0f64, n1 in 0.0..5.0f64, n2 in 0.0..5.0f64) {
        let p = sts_covariance(r, 0.0, n1, n2).unwrap();
        let m = sts_covariance(-r, 0.0, n1, n2).unwrap();
        prop_assert_eq!((p.a, p.b), (m.a, m.b));
        prop_assert_eq!((p.c_plus, p.c_minus), (-m.c_plus, -m.c_minus));
    }

    #[test]
    fn approx_condition_matches_correlation(r in -4.0..4.0f64) {
        for s in [epr_covariance(r), mts_from_r(r)] {
            for pair in BellPair::BOTH {
                let c = rephasing_condition(&s, pair, 0.1);
                prop_assert!((c.value - 1.0 - coupling_correlation(&s, pair)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn approx_rephasing_improves_with_correlation(r in 0.0..4.0f64, dr in 0.01..1.0f64, dt in 0.001..0.05f64) {
        let sched = Schedule::consecutive(dt).unwrap();
        for make in [epr_covariance as fn(f64) -> TwoModeCovariance, mts_from_r] {
            let (_, lo) = approx_coherences(2.0 * dt, &sched, 1.0, 1.0, &make(r));
            let (_, hi) = approx_coherences(2.0 * dt, &sched, 1.0, 1.0, &make(r + dr));
            prop_assert!(hi >= lo - 1e-12);
        }
    }
}

#[test]
fn ppt_agrees_with_scalar_criterion_on_grid() {
    for i in 0..=50 {
        let r = 5.0 * i as f64 / 50.0;
        for j in 0..=20 {
            for k in 0..=20 {
                let (n1, n2) = (0.5 * j as f64, 0.5 * k as f64);
                let scalar = r.cosh().powi(2) <= (n1 + 1.0) * (n2 + 1.0) / (n1 + n2 + 1.0);
                let ppt = is_separable(&sts_covariance(r, 0.0, n1, n2).unwrap()).unwrap();
                // the tolerance of the uncertainty test only matters on the boundary
                let margin = r.cosh().powi(2) - (n1 + 1.0) * (n2 + 1.0) / (n1 + n2 + 1.0);
                if margin.abs() > 1e-9 {
                    assert_eq!(scalar, ppt, "r = {r}, n1 = {n1}, n2 = {n2}");
                }
            }
        }
    }
}

#[test]
fn negative_squeezing_keeps_measure() {
    let bath = BathSpec::default();
    let cfg = MeasureConfig::default();
    for r in [0.5, 1.5, 3.0] {
        for dt in [0.02, 0.1] {
            let sched = Schedule::consecutive(dt).unwrap();
            let p = pair_measures(
                &Dynamics::new(sched, bath, sts_covariance(r, 0.0, 1.0, 2.0).unwrap()).unwrap(),
                &cfg,
            )
            .unwrap();
            let m = pair_measures(
                &Dynamics::new(sched, bath, sts_covariance(-r, 0.0, 1.0, 2.0).unwrap()).unwrap(),
                &cfg,
            )
            .unwrap();
            assert!((p[0] - m[1]).abs() < 1e-10 && (p[1] - m[0]).abs() < 1e-10);
        }
    }
}

#[test]
fn simultaneous_windows_without_squeezing_factorize() {
    let sched = Schedule::new(0.0, 0.3, 0.0, 0.3).unwrap();
    let d = Dynamics::new(
        sched,
        BathSpec::new(0.7, 1.3, 1.0, 0.2, 0.1).unwrap(),
        epr_covariance(0.0),
    )
    .unwrap();
    for t in [0.0, 0.1, 0.3, 0.5] {
        let s = d.sample(t);
        assert!((s.kappa12 - s.kappa1 * s.kappa2).norm() < 1e-15);
    }
}
