use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use squeeze_probe_core::estimator::{
    distinguish_photon_numbers, estimate_r, forward_curve, EstimationWarning, EstimatorConfig,
    Family, Measurement,
};
use squeeze_probe_core::search::logspace;
use squeeze_probe_core::BathSpec;

fn noisy(family: &Family, r: f64, dts: &[f64], noise: f64, seed: u64) -> Vec<Measurement> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = EstimatorConfig::default();
    forward_curve(family, r, &BathSpec::default(), dts, None, &cfg.measure)
        .unwrap()
        .into_iter()
        .map(|(dt, v)| {
            let observed = (v + rng.gen_range(-noise..=noise)).clamp(0.0, 1.0);
            Measurement::new(dt, observed, None).unwrap()
        })
        .collect()
}

#[test]
fn noisy_epr_fit_stays_close() {
    let dts = logspace(0.0338, 0.135, 5);
    for seed in 0..8 {
        let data = noisy(&Family::Epr, 3.0, &dts, 0.005, seed);
        let res = estimate_r(
            &data,
            &Family::Epr,
            &BathSpec::default(),
            (0.0, 6.0),
            &EstimatorConfig::default(),
        )
        .unwrap();
        assert!((res.r_hat - 3.0).abs() <= 0.05, "seed {seed}: {res:?}");
        assert!(res.residual > 0.0);
    }
}

#[test]
fn noise_masks_photon_number_split() {
    let family = Family::Sts {
        phi: 0.0,
        n1: 1.0,
        n2: 3.0,
    };
    let dts = [0.05, 0.08, 0.1, 0.13, 0.16];
    for seed in 0..4 {
        let data = noisy(&family, 2.0, &dts, 0.01, seed);
        let est = distinguish_photon_numbers(
            &data,
            2.0,
            0.0,
            4.0,
            &BathSpec::default(),
            17,
            &EstimatorConfig::default(),
        )
        .unwrap();
        assert!(
            est.warnings
                .iter()
                .any(|w| matches!(w, EstimationWarning::InsufficientPrecision { .. })),
            "seed {seed}: {est:?}"
        );
    }
}

#[test]
fn input_order_is_irrelevant() {
    let dts = logspace(0.04, 0.12, 5);
    let data = noisy(&Family::Mts, 2.5, &dts, 0.003, 11);
    let mut reversed = data.clone();
    reversed.reverse();
    let cfg = EstimatorConfig::default();
    let a = estimate_r(&data, &Family::Mts, &BathSpec::default(), (0.0, 6.0), &cfg).unwrap();
    let b = estimate_r(
        &reversed,
        &Family::Mts,
        &BathSpec::default(),
        (0.0, 6.0),
        &cfg,
    )
    .unwrap();
    assert_eq!(a, b);
}
